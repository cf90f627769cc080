//! Staged artifact writes: everything goes to a hidden staging directory
//! inside the output directory and is renamed into place only when the
//! whole command has succeeded, so failures leave no partial outputs.

use std::fs;
use std::path::{Path, PathBuf};

use crate::args::CliError;

pub struct Stage {
    final_dir: PathBuf,
    stage_dir: PathBuf,
    files: Vec<String>,
    committed: bool,
}

impl Stage {
    pub fn new(output_dir: &Path) -> Result<Stage, CliError> {
        fs::create_dir_all(output_dir)
            .map_err(|e| CliError::Input(format!("cannot create {}: {e}", output_dir.display())))?;
        let stage_dir = output_dir.join(format!(".stage-{}", std::process::id()));
        if stage_dir.exists() {
            fs::remove_dir_all(&stage_dir).ok();
        }
        fs::create_dir_all(&stage_dir)
            .map_err(|e| CliError::Internal(format!("cannot create staging dir: {e}")))?;
        Ok(Stage {
            final_dir: output_dir.to_path_buf(),
            stage_dir,
            files: Vec::new(),
            committed: false,
        })
    }

    /// Write one artifact into the staging area.
    pub fn write(&mut self, name: &str, contents: &[u8]) -> Result<(), CliError> {
        fs::write(self.stage_dir.join(name), contents)
            .map_err(|e| CliError::Internal(format!("cannot write staged {name}: {e}")))?;
        self.files.push(name.to_string());
        Ok(())
    }

    /// Move every staged file into the output directory. Renames within the
    /// same directory tree are atomic per file.
    pub fn commit(mut self) -> Result<(), CliError> {
        for name in &self.files {
            fs::rename(self.stage_dir.join(name), self.final_dir.join(name))
                .map_err(|e| CliError::Internal(format!("cannot move {name} into place: {e}")))?;
        }
        self.committed = true;
        fs::remove_dir_all(&self.stage_dir).ok();
        Ok(())
    }
}

impl Drop for Stage {
    fn drop(&mut self) {
        if !self.committed {
            fs::remove_dir_all(&self.stage_dir).ok();
        }
    }
}
