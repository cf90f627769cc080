//! Kernelized soft-margin SVM trained on a precomputed Gram matrix.
//!
//! The solver is SMO with second-order working-set selection: each step
//! picks the maximal-violating pair, solves the two-variable subproblem in
//! closed form, and clips to the box, so the iterate stays feasible at all
//! times. It never looks at feature vectors, only at kernel values, which
//! is what makes it identical over RBF and quantum Grams.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::featuremap::FeatureVector;
use crate::kernel::{KernelConfig, KernelMatrix};
use crate::matrix::Matrix;

const TAU: f64 = 1e-12;

/// Binary dataset with labels in {-1, +1}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    pub x: Vec<FeatureVector>,
    pub y: Vec<i8>,
    pub ids: Vec<String>,
}

impl LabeledDataset {
    pub fn new(x: Vec<FeatureVector>, y: Vec<i8>, ids: Vec<String>) -> Result<Self> {
        if x.len() != y.len() || x.len() != ids.len() {
            return Err(Error::DimensionMismatch {
                left: x.len(),
                right: y.len().max(ids.len()),
                context: "dataset rows, labels and ids",
            });
        }
        for &label in &y {
            if label != 1 && label != -1 {
                return Err(Error::InvalidLabel(label as i32));
            }
        }
        Ok(LabeledDataset { x, y, ids })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// (count of +1, count of -1)
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.y.iter().filter(|&&l| l == 1).count();
        (pos, self.y.len() - pos)
    }

    pub fn subset(&self, indices: &[usize]) -> LabeledDataset {
        LabeledDataset {
            x: indices.iter().map(|&i| self.x[i].clone()).collect(),
            y: indices.iter().map(|&i| self.y[i]).collect(),
            ids: indices.iter().map(|&i| self.ids[i].clone()).collect(),
        }
    }
}

/// Solver settings. `max_passes` bounds the number of working-set steps.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SvmParams {
    pub c: f64,
    pub tol: f64,
    pub max_passes: usize,
    pub support_epsilon: f64,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            c: 1.0,
            tol: 1e-3,
            max_passes: 10_000,
            support_epsilon: 1e-8,
        }
    }
}

/// Trained model: dual coefficients plus everything needed to evaluate the
/// decision function against new kernel rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub alphas: Vec<f64>,
    pub bias: f64,
    pub support_indices: Vec<usize>,
    pub y_train: Vec<i8>,
    pub c: f64,
    pub kernel: KernelConfig,
    /// Retained training vectors; may be empty when the caller keeps the
    /// Gram around instead.
    pub train_refs: Vec<FeatureVector>,
}

impl SvmModel {
    pub fn with_train_refs(mut self, train_refs: Vec<FeatureVector>) -> Self {
        self.train_refs = train_refs;
        self
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrainDiagnostics {
    pub dual_objective: f64,
    pub iterations: usize,
    pub kkt_violation_max: f64,
    pub converged: bool,
    pub warning: Option<String>,
}

/// Dual objective: sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij.
pub fn dual_objective(alphas: &[f64], k: &Matrix, y: &[i8]) -> Result<f64> {
    let n = alphas.len();
    if !k.is_square() || k.rows() != n || y.len() != n {
        return Err(Error::DimensionMismatch {
            left: k.rows(),
            right: n.max(y.len()),
            context: "dual objective dimensions",
        });
    }
    let mut quad = 0.0;
    for i in 0..n {
        if alphas[i] == 0.0 {
            continue;
        }
        for j in 0..n {
            if alphas[j] == 0.0 {
                continue;
            }
            quad += alphas[i] * alphas[j] * (y[i] as f64) * (y[j] as f64) * k.get(i, j);
        }
    }
    Ok(alphas.iter().sum::<f64>() - 0.5 * quad)
}

struct Solver<'a> {
    k: &'a Matrix,
    y: Vec<f64>,
    c: f64,
    alphas: Vec<f64>,
    grad: Vec<f64>,
}

impl<'a> Solver<'a> {
    fn new(k: &'a Matrix, y: &[i8], c: f64) -> Self {
        let n = y.len();
        Solver {
            k,
            y: y.iter().map(|&l| l as f64).collect(),
            c,
            alphas: vec![0.0; n],
            // f(alpha) = 1/2 a'Qa - e'a, so grad at alpha = 0 is -e
            grad: vec![-1.0; n],
        }
    }

    #[inline]
    fn q(&self, i: usize, j: usize) -> f64 {
        self.y[i] * self.y[j] * self.k.get(i, j)
    }

    fn in_i_up(&self, t: usize) -> bool {
        (self.y[t] > 0.0 && self.alphas[t] < self.c) || (self.y[t] < 0.0 && self.alphas[t] > 0.0)
    }

    fn in_i_low(&self, t: usize) -> bool {
        (self.y[t] > 0.0 && self.alphas[t] > 0.0) || (self.y[t] < 0.0 && self.alphas[t] < self.c)
    }

    /// Maximal-violating-pair gap and the second-order working set.
    /// Returns (gap, i, j); indices are usize::MAX when no pair is selectable.
    fn select_working_set(&self) -> (f64, usize, usize) {
        let n = self.y.len();
        let mut g_max = f64::NEG_INFINITY;
        let mut g_min = f64::INFINITY;
        let mut i_sel = usize::MAX;
        for t in 0..n {
            if self.in_i_up(t) {
                let v = -self.y[t] * self.grad[t];
                if v > g_max {
                    g_max = v;
                    i_sel = t;
                }
            }
        }
        let mut j_sel = usize::MAX;
        let mut best = f64::INFINITY;
        for t in 0..n {
            if !self.in_i_low(t) {
                continue;
            }
            let v = -self.y[t] * self.grad[t];
            if v < g_min {
                g_min = v;
            }
            if i_sel != usize::MAX && v < g_max {
                let b = g_max - v;
                let mut a =
                    self.k.get(i_sel, i_sel) + self.k.get(t, t) - 2.0 * self.k.get(i_sel, t);
                if a <= 0.0 {
                    a = TAU;
                }
                let score = -(b * b) / a;
                if score < best {
                    best = score;
                    j_sel = t;
                }
            }
        }
        (g_max - g_min, i_sel, j_sel)
    }

    /// Closed-form two-variable subproblem with box clipping.
    fn update_pair(&mut self, i: usize, j: usize) {
        let c = self.c;
        let old_i = self.alphas[i];
        let old_j = self.alphas[j];
        if self.y[i] != self.y[j] {
            let mut quad = self.q(i, i) + self.q(j, j) + 2.0 * self.q(i, j);
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-self.grad[i] - self.grad[j]) / quad;
            let diff = self.alphas[i] - self.alphas[j];
            self.alphas[i] += delta;
            self.alphas[j] += delta;
            if diff > 0.0 {
                if self.alphas[j] < 0.0 {
                    self.alphas[j] = 0.0;
                    self.alphas[i] = diff;
                }
            } else if self.alphas[i] < 0.0 {
                self.alphas[i] = 0.0;
                self.alphas[j] = -diff;
            }
            if diff > 0.0 {
                if self.alphas[i] > c {
                    self.alphas[i] = c;
                    self.alphas[j] = c - diff;
                }
            } else if self.alphas[j] > c {
                self.alphas[j] = c;
                self.alphas[i] = c + diff;
            }
        } else {
            let mut quad = self.q(i, i) + self.q(j, j) - 2.0 * self.q(i, j);
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (self.grad[i] - self.grad[j]) / quad;
            let sum = self.alphas[i] + self.alphas[j];
            self.alphas[i] -= delta;
            self.alphas[j] += delta;
            if sum > c {
                if self.alphas[i] > c {
                    self.alphas[i] = c;
                    self.alphas[j] = sum - c;
                }
            } else if self.alphas[j] < 0.0 {
                self.alphas[j] = 0.0;
                self.alphas[i] = sum;
            }
            if sum > c {
                if self.alphas[j] > c {
                    self.alphas[j] = c;
                    self.alphas[i] = sum - c;
                }
            } else if self.alphas[i] < 0.0 {
                self.alphas[i] = 0.0;
                self.alphas[j] = sum;
            }
        }
        let di = self.alphas[i] - old_i;
        let dj = self.alphas[j] - old_j;
        for t in 0..self.y.len() {
            self.grad[t] += self.q(t, i) * di + self.q(t, j) * dj;
        }
    }

    /// Bias from free support vectors, falling back to the midpoint of the
    /// boundary bounds when none are free.
    fn bias(&self) -> f64 {
        let mut ub = f64::INFINITY;
        let mut lb = f64::NEG_INFINITY;
        let mut sum_free = 0.0;
        let mut n_free = 0usize;
        for t in 0..self.y.len() {
            let yg = self.y[t] * self.grad[t];
            if self.alphas[t] >= self.c {
                if self.y[t] < 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else if self.alphas[t] <= 0.0 {
                if self.y[t] > 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else {
                n_free += 1;
                sum_free += yg;
            }
        }
        let rho = if n_free > 0 {
            sum_free / n_free as f64
        } else {
            (ub + lb) / 2.0
        };
        -rho
    }
}

fn solve(
    k: &KernelMatrix,
    y: &[i8],
    params: &SvmParams,
    mut objective_trace: Option<&mut Vec<f64>>,
) -> Result<(SvmModel, TrainDiagnostics)> {
    let n = k.size();
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            left: y.len(),
            right: n,
            context: "labels vs gram size",
        });
    }
    if n == 0 {
        return Err(Error::EmptyInput("training set"));
    }
    for &label in y {
        if label != 1 && label != -1 {
            return Err(Error::InvalidLabel(label as i32));
        }
    }
    if !(params.c.is_finite() && params.c > 0.0) {
        return Err(Error::Config(format!(
            "C must be positive, got {}",
            params.c
        )));
    }

    let has_pos = y.contains(&1);
    let has_neg = y.contains(&-1);
    if !(has_pos && has_neg) {
        // equality constraint forces alpha = 0; predict the lone class
        let model = SvmModel {
            alphas: vec![0.0; n],
            bias: y[0] as f64,
            support_indices: Vec::new(),
            y_train: y.to_vec(),
            c: params.c,
            kernel: k.provenance().clone(),
            train_refs: Vec::new(),
        };
        let diag = TrainDiagnostics {
            dual_objective: 0.0,
            iterations: 0,
            kkt_violation_max: 0.0,
            converged: true,
            warning: Some("single-class training set; bias fixed to the lone label".into()),
        };
        return Ok((model, diag));
    }

    let mut solver = Solver::new(k.values(), y, params.c);
    let mut iterations = 0usize;
    let mut gap = f64::INFINITY;
    let mut converged = false;
    if let Some(trace) = objective_trace.as_deref_mut() {
        trace.push(dual_objective(&solver.alphas, k.values(), y)?);
    }
    while iterations < params.max_passes {
        let (g, i, j) = solver.select_working_set();
        gap = g;
        if gap <= params.tol || i == usize::MAX || j == usize::MAX {
            converged = true;
            break;
        }
        solver.update_pair(i, j);
        iterations += 1;
        if let Some(trace) = objective_trace.as_deref_mut() {
            trace.push(dual_objective(&solver.alphas, k.values(), y)?);
        }
    }
    if !converged {
        // re-check the gap left by the final step
        let (g, _, _) = solver.select_working_set();
        gap = g;
        converged = gap <= params.tol;
    }

    let bias = solver.bias();
    let objective = dual_objective(&solver.alphas, k.values(), y)?;
    let support_indices: Vec<usize> = solver
        .alphas
        .iter()
        .enumerate()
        .filter(|(_, &a)| a > params.support_epsilon)
        .map(|(i, _)| i)
        .collect();

    let model = SvmModel {
        alphas: solver.alphas,
        bias,
        support_indices,
        y_train: y.to_vec(),
        c: params.c,
        kernel: k.provenance().clone(),
        train_refs: Vec::new(),
    };
    let diag = TrainDiagnostics {
        dual_objective: objective,
        iterations,
        kkt_violation_max: gap.max(0.0),
        converged,
        warning: None,
    };
    Ok((model, diag))
}

/// Train on a precomputed Gram matrix. Non-convergence is not an error:
/// the best iterate comes back with `converged = false`.
pub fn train_dual(
    k: &KernelMatrix,
    y: &[i8],
    params: &SvmParams,
) -> Result<(SvmModel, TrainDiagnostics)> {
    solve(k, y, params, None)
}

/// Same as [`train_dual`] but records the dual objective after every
/// working-set step, for convergence analysis.
pub fn train_dual_traced(
    k: &KernelMatrix,
    y: &[i8],
    params: &SvmParams,
    trace: &mut Vec<f64>,
) -> Result<(SvmModel, TrainDiagnostics)> {
    solve(k, y, params, Some(trace))
}

/// Pre-sign decision values; `k_cross` rows are evaluation points, columns
/// follow the training order.
pub fn decision_values(model: &SvmModel, k_cross: &Matrix) -> Result<Vec<f64>> {
    let n = model.alphas.len();
    if k_cross.cols() != n {
        return Err(Error::DimensionMismatch {
            left: k_cross.cols(),
            right: n,
            context: "cross-gram columns vs training size",
        });
    }
    let mut out = Vec::with_capacity(k_cross.rows());
    for r in 0..k_cross.rows() {
        let row = k_cross.row(r);
        let mut acc = model.bias;
        for (i, &alpha) in model.alphas.iter().enumerate() {
            if alpha != 0.0 {
                acc += alpha * (model.y_train[i] as f64) * row[i];
            }
        }
        out.push(acc);
    }
    Ok(out)
}

/// Sign of the decision values; an exact zero maps to +1.
pub fn predict(model: &SvmModel, k_cross: &Matrix) -> Result<Vec<i8>> {
    Ok(decision_values(model, k_cross)?
        .into_iter()
        .map(|v| if v >= 0.0 { 1 } else { -1 })
        .collect())
}

/// w = sum alpha_i y_i x_i. Only meaningful for the linear kernel, where
/// decision values reduce to w.x + b; other kernels get an error.
pub fn primal_weights(model: &SvmModel, x_train: &[FeatureVector]) -> Result<Vec<f64>> {
    if !matches!(model.kernel, KernelConfig::Linear) {
        return Err(Error::UnsupportedDiagnostic(
            "primal weights are only defined for the linear kernel",
        ));
    }
    if x_train.len() != model.alphas.len() {
        return Err(Error::DimensionMismatch {
            left: x_train.len(),
            right: model.alphas.len(),
            context: "training vectors vs alphas",
        });
    }
    if x_train.is_empty() {
        return Err(Error::EmptyInput("training vectors"));
    }
    let dim = x_train[0].len();
    let mut w = vec![0.0; dim];
    for (i, xi) in x_train.iter().enumerate() {
        let coef = model.alphas[i] * model.y_train[i] as f64;
        for (wd, &xd) in w.iter_mut().zip(xi) {
            *wd += coef * xd;
        }
    }
    Ok(w)
}

const MODEL_FORMAT_VERSION: u32 = 1;

/// Versioned on-disk form of a trained model.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub kernel: KernelConfig,
    pub c: f64,
    pub alphas: Vec<f64>,
    pub bias: f64,
    pub support_indices: Vec<usize>,
    pub y_train: Vec<i8>,
    pub train_vectors: Vec<FeatureVector>,
}

impl ModelFile {
    pub fn from_model(model: &SvmModel) -> Self {
        ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            kernel: model.kernel.clone(),
            c: model.c,
            alphas: model.alphas.clone(),
            bias: model.bias,
            support_indices: model.support_indices.clone(),
            y_train: model.y_train.clone(),
            train_vectors: model.train_refs.clone(),
        }
    }

    pub fn into_model(self) -> Result<SvmModel> {
        if self.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::ModelFile(format!(
                "unsupported model format_version {} (expected {MODEL_FORMAT_VERSION})",
                self.format_version
            )));
        }
        Ok(SvmModel {
            alphas: self.alphas,
            bias: self.bias,
            support_indices: self.support_indices,
            y_train: self.y_train,
            c: self.c,
            kernel: self.kernel,
            train_refs: self.train_vectors,
        })
    }
}

impl SvmModel {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ModelFile::from_model(self))?)
    }

    pub fn from_json(text: &str) -> Result<SvmModel> {
        let file: ModelFile = serde_json::from_str(text)?;
        file.into_model()
    }
}
