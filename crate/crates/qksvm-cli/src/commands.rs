//! Subcommand implementations.

use std::collections::BTreeMap;
use std::time::Instant;

use qksvm::derive_seed;
use qksvm::kernel::{cross_gram, gram_matrix, KernelMatrix};
use qksvm::metrics::{
    accuracy_score, confusion, kfold_cross_validate, metric_set, CvReport, StdMode,
};
use qksvm::preprocess::{run_pipeline, DiagnosisCode, PipelineOutput, RawRecord};
use qksvm::svm::{decision_values, predict, train_dual, LabeledDataset, ModelFile, SvmModel};

use crate::args::{BenchArgs, CliError, CvArgs, PredictArgs, ReportArgs, StdChoice};
use crate::artifacts::Stage;
use crate::context::{
    config_echo, kernel_config, load_bundle, load_records, parse_column_map, pipeline_config,
    selected_models, svm_params, ModelBundle, ModelKind, STREAM_CV,
};
use crate::report::{
    confusion_csv, metrics_csv, render_details, render_table, BenchmarkReport, CvDocument,
    DatasetSummary, EvalBlock, ModelReport, ModelReports, REPORT_FORMAT_VERSION,
};

/// stdout may be a closed pipe (`qksvm report | head`); dropping the rest
/// of the output is the right behavior, not a panic.
fn emit(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().write_all(text.as_bytes());
}

fn dataset_summary(records: &[RawRecord], pipe: &PipelineOutput) -> DatasetSummary {
    let (pos, neg) = {
        let mut pos = 0;
        let mut neg = 0;
        for &y in pipe.train.y.iter().chain(pipe.test.y.iter()) {
            if y == 1 {
                pos += 1;
            } else {
                neg += 1;
            }
        }
        (pos, neg)
    };
    DatasetSummary {
        records: records.len(),
        oversampled: pipe.oversampled_len,
        train: pipe.train.len(),
        test: pipe.test.len(),
        positive_count: pos,
        negative_count: neg,
    }
}

struct TrainedModel {
    gram: KernelMatrix,
    model: SvmModel,
    report: ModelReport,
}

fn train_one(
    args: &BenchArgs,
    records: &[RawRecord],
    kind: ModelKind,
) -> Result<(PipelineOutput, TrainedModel), CliError> {
    let pipe = run_pipeline(records, &pipeline_config(args, kind))?;
    let kcfg = kernel_config(args, kind);
    let mut gram = gram_matrix(&pipe.train.x, &kcfg)?;
    gram.set_row_ids(pipe.train.ids.clone())?;
    if args.psd_project {
        gram.psd_project()?;
    }
    let gram_diagnostics = gram.psd_diagnostics()?;

    let (model, train_diagnostics) = train_dual(&gram, &pipe.train.y, &svm_params(args))?;
    if let Some(warning) = &train_diagnostics.warning {
        eprintln!("warning ({}): {warning}", kind.name());
    }
    let model = model.with_train_refs(pipe.train.x.clone());

    let train_pred = predict(&model, gram.values())?;
    let train_conf = confusion(&pipe.train.y, &train_pred, 1)?;
    let kx = cross_gram(&pipe.test.x, &pipe.train.x, &kcfg)?;
    let test_pred = predict(&model, &kx)?;
    let test_conf = confusion(&pipe.test.y, &test_pred, 1)?;

    let report = ModelReport {
        kernel: kcfg,
        gram_diagnostics,
        support_count: model.support_indices.len(),
        train: EvalBlock {
            confusion: train_conf,
            metrics: metric_set(&train_conf)?,
        },
        test: EvalBlock {
            confusion: test_conf,
            metrics: metric_set(&test_conf)?,
        },
        train_diagnostics,
    };
    Ok((
        pipe,
        TrainedModel {
            gram,
            model,
            report,
        },
    ))
}

pub fn cmd_kernel(args: &BenchArgs) -> Result<(), CliError> {
    let records = load_records(args)?;
    let mut stage = Stage::new(&args.output_dir)?;
    for kind in selected_models(args.model) {
        let pipe = run_pipeline(&records, &pipeline_config(args, kind))?;
        let kcfg = kernel_config(args, kind);
        let mut gram = gram_matrix(&pipe.train.x, &kcfg)?;
        gram.set_row_ids(pipe.train.ids.clone())?;
        if args.psd_project {
            gram.psd_project()?;
        }
        let mut csv = Vec::new();
        gram.write_csv(&mut csv)?;
        stage.write(&format!("gram_{}.csv", kind.name()), &csv)?;
        let mut pgm = Vec::new();
        gram.write_pgm(&mut pgm)?;
        stage.write(&format!("gram_{}.pgm", kind.name()), &pgm)?;
        let d = gram.psd_diagnostics()?;
        emit(&format!(
            "{}: {}x{} gram, min eigenvalue {:.3e}, symmetry error {:.3e}\n",
            kind.name(),
            gram.size(),
            gram.size(),
            d.min_eigenvalue,
            d.symmetry_error
        ));
    }
    stage.commit()
}

pub fn cmd_run(args: &BenchArgs) -> Result<(), CliError> {
    let records = load_records(args)?;
    let mut stage = Stage::new(&args.output_dir)?;
    let mut models = ModelReports::default();
    let mut timings = BTreeMap::new();
    let mut dataset: Option<DatasetSummary> = None;
    let mut all_converged = true;

    for kind in selected_models(args.model) {
        let started = Instant::now();
        let (pipe, trained) = train_one(args, &records, kind)?;
        timings.insert(
            format!("{}_seconds", kind.name()),
            started.elapsed().as_secs_f64(),
        );
        dataset.get_or_insert_with(|| dataset_summary(&records, &pipe));
        all_converged &= trained.report.train_diagnostics.converged;

        let mut csv = Vec::new();
        trained.gram.write_csv(&mut csv)?;
        stage.write(&format!("gram_{}.csv", kind.name()), &csv)?;
        let mut pgm = Vec::new();
        trained.gram.write_pgm(&mut pgm)?;
        stage.write(&format!("gram_{}.pgm", kind.name()), &pgm)?;
        stage.write(
            &format!("confusion_{}.csv", kind.name()),
            confusion_csv(&trained.report.test.confusion).as_bytes(),
        )?;

        let bundle = ModelBundle {
            model: ModelFile::from_model(&trained.model),
            scalers: pipe.scalers.clone(),
            positive_label: format!("{:?}", args.positive_label),
        };
        let bundle_json = serde_json::to_string_pretty(&bundle)
            .map_err(|e| CliError::Internal(format!("model serialization failed: {e}")))?;
        stage.write(
            &format!("model_{}.json", kind.name()),
            bundle_json.as_bytes(),
        )?;

        match kind {
            ModelKind::Qsvm => models.qsvm = Some(trained.report),
            ModelKind::Svm => models.svm = Some(trained.report),
        }
    }

    let report = BenchmarkReport {
        format_version: REPORT_FORMAT_VERSION,
        config: config_echo(args),
        dataset: dataset.ok_or_else(|| CliError::Internal("no model selected".into()))?,
        models,
        timings,
    };
    let report_json = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::Internal(format!("report serialization failed: {e}")))?;
    stage.write("report.json", report_json.as_bytes())?;
    stage.write("metrics.csv", metrics_csv(&report).as_bytes())?;
    stage.commit()?;

    emit(&render_table(&report));
    emit(&render_details(&report));
    emit(&format!(
        "artifacts written to {}\n",
        args.output_dir.display()
    ));

    if !all_converged {
        return Err(CliError::NonConvergence(
            "solver did not converge within max passes; see report.json".into(),
        ));
    }
    Ok(())
}

/// Full preprocessed dataset in split order (train rows then test rows);
/// fold shuffles are applied on top of this fixed layout.
fn stitched_full(pipe: &PipelineOutput) -> Result<LabeledDataset, CliError> {
    let mut x = pipe.train.x.clone();
    let mut y = pipe.train.y.clone();
    let mut ids = pipe.train.ids.clone();
    x.extend(pipe.test.x.iter().cloned());
    y.extend(pipe.test.y.iter().copied());
    ids.extend(pipe.test.ids.iter().cloned());
    Ok(LabeledDataset::new(x, y, ids)?)
}

fn cv_one(args: &CvArgs, records: &[RawRecord], kind: ModelKind) -> Result<CvReport, CliError> {
    let pipe = run_pipeline(records, &pipeline_config(&args.bench, kind))?;
    let full = stitched_full(&pipe)?;
    let kcfg = kernel_config(&args.bench, kind);
    let params = svm_params(&args.bench);
    let std_mode = match args.cv_std {
        StdChoice::Population => StdMode::Population,
        StdChoice::Sample => StdMode::Sample,
    };
    let report = kfold_cross_validate(
        &full,
        args.folds,
        derive_seed(args.bench.seed, STREAM_CV),
        std_mode,
        |train| {
            let gram = gram_matrix(&train.x, &kcfg)?;
            let (model, _) = train_dual(&gram, &train.y, &params)?;
            Ok((model, train.x.clone()))
        },
        |(model, train_x), holdout| {
            let kx = cross_gram(&holdout.x, train_x, &kcfg)?;
            accuracy_score(&holdout.y, &predict(model, &kx)?)
        },
    )?;
    Ok(report)
}

pub fn cmd_cv(args: &CvArgs) -> Result<(), CliError> {
    let records = load_records(&args.bench)?;
    let mut models = BTreeMap::new();
    for kind in selected_models(args.bench.model) {
        let report = cv_one(args, &records, kind)?;
        emit(&format!(
            "{}: {}-fold accuracy mean {:.4}, std {:.4}\n",
            kind.name(),
            report.k,
            report.mean,
            report.std
        ));
        for (i, score) in report.fold_scores.iter().enumerate() {
            emit(&format!("  fold {:>2}: {score:.8}\n", i + 1));
        }
        models.insert(kind.name().to_string(), report);
    }
    let doc = CvDocument {
        format_version: REPORT_FORMAT_VERSION,
        config: config_echo(&args.bench),
        folds: args.folds,
        std_mode: format!("{:?}", args.cv_std).to_lowercase(),
        models,
    };
    let json = serde_json::to_string_pretty(&doc)
        .map_err(|e| CliError::Internal(format!("cv serialization failed: {e}")))?;
    let mut stage = Stage::new(&args.bench.output_dir)?;
    stage.write("cv.json", json.as_bytes())?;
    stage.commit()
}

pub fn cmd_predict(args: &PredictArgs) -> Result<(), CliError> {
    let bundle = load_bundle(&args.model_file)?;
    let model = bundle.model.into_model()?;
    if model.train_refs.is_empty() {
        return Err(CliError::Input(
            "model file has no training vectors; cannot evaluate kernels".into(),
        ));
    }
    let column_map = parse_column_map(args.column_map.as_deref())?;
    if !args.input.exists() {
        return Err(CliError::Input(format!(
            "input file not found: {}",
            args.input.display()
        )));
    }
    let (ids, raw_rows) = qksvm::preprocess::load_features_csv(&args.input, &column_map)?;

    let mut out = String::from("id,decision_value,predicted_label\n");
    if raw_rows.is_empty() {
        eprintln!(
            "warning: no data rows in {}; writing empty output",
            args.input.display()
        );
    } else {
        let mut rows = raw_rows;
        for scaler in &bundle.scalers {
            rows = scaler.apply(&rows)?;
        }
        let expected_dim = model.train_refs[0].len();
        if rows[0].len() != expected_dim {
            return Err(CliError::Input(format!(
                "feature dimension mismatch: input has {} features, model expects {expected_dim}",
                rows[0].len()
            )));
        }
        let kx = cross_gram(&rows, &model.train_refs, &model.kernel)?;
        let values = decision_values(&model, &kx)?;
        let positive: DiagnosisCode = match bundle.positive_label.as_str() {
            "M" => DiagnosisCode::M,
            "B" => DiagnosisCode::B,
            other => {
                return Err(CliError::Input(format!(
                    "model file has unknown positive_label '{other}'"
                )))
            }
        };
        let negative = match positive {
            DiagnosisCode::M => DiagnosisCode::B,
            DiagnosisCode::B => DiagnosisCode::M,
        };
        for (id, value) in ids.iter().zip(&values) {
            let label = if *value >= 0.0 { positive } else { negative };
            out.push_str(&format!("{id},{value},{label}\n"));
        }
    }

    let parent = args
        .output
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .map(|p| p.to_path_buf())
        .unwrap_or_else(|| std::path::PathBuf::from("."));
    let name = args
        .output
        .file_name()
        .ok_or_else(|| CliError::Input("output path has no file name".into()))?
        .to_string_lossy()
        .to_string();
    let mut stage = Stage::new(&parent)?;
    stage.write(&name, out.as_bytes())?;
    stage.commit()
}

pub fn cmd_report(args: &ReportArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.report)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", args.report.display())))?;
    let report: BenchmarkReport = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("malformed report {}: {e}", args.report.display())))?;
    emit(&render_table(&report));
    emit(&render_details(&report));
    Ok(())
}
