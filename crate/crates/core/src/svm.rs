//! Two-class linear soft-margin classifier.
//!
//! Minimizes `(1/2)||w||^2 + C * sum_i hinge(1 - y_i (w.x_i + b))` by seeded
//! stochastic subgradient descent with step `1/(lambda t)`, `lambda = 1/(C n)`
//! (the Pegasos schedule), keeping the best iterate seen at each epoch
//! checkpoint. Inputs are min-max scaled per coordinate to [0, 1]; the scaling
//! is fitted on the training set only and stored with the model.

use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::derive_seed;

/// Default training epochs used by [`cross_validate`] and the CLI.
pub const DEFAULT_EPOCHS: usize = 200;

#[derive(Debug, Error)]
pub enum SvmError {
    #[error("training data contains a single class")]
    SingleClassData,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{n} samples cannot be split into {k} folds")]
    TooFewSamples { n: usize, k: usize },
    #[error("labels must be +1 or -1")]
    BadLabel,
    #[error("C parameter must be positive")]
    BadCParam,
    #[error("cannot access model file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed model file {path}: {detail}")]
    MalformedModelFile { path: PathBuf, detail: String },
}

/// Trained linear model: decision score is `w . scale(x) + b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    weights: Vec<f64>,
    bias: f64,
    c_param: f64,
    scale_min: Vec<f64>,
    scale_range: Vec<f64>,
}

/// Binary confusion counts with +1 as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub true_neg: usize,
    pub false_pos: usize,
    pub false_neg: usize,
    pub true_pos: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.true_neg + self.false_pos + self.false_neg + self.true_pos
    }

    pub fn accuracy(&self) -> f64 {
        (self.true_pos + self.true_neg) as f64 / self.total() as f64
    }

    pub fn record(&mut self, truth: i8, predicted: i8) {
        match (truth, predicted) {
            (1, 1) => self.true_pos += 1,
            (1, _) => self.false_neg += 1,
            (_, 1) => self.false_pos += 1,
            _ => self.true_neg += 1,
        }
    }
}

impl std::fmt::Display for ConfusionMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{:<8} {:>8} {:>8}", "", "pred -1", "pred +1")?;
        writeln!(f, "{:<8} {:>8} {:>8}", "true -1", self.true_neg, self.false_pos)?;
        write!(f, "{:<8} {:>8} {:>8}", "true +1", self.false_neg, self.true_pos)
    }
}

fn validate_dataset(samples: &[Vec<f64>], labels: &[i8]) -> Result<usize, SvmError> {
    if samples.len() != labels.len() || samples.len() < 2 {
        return Err(SvmError::TooFewSamples {
            n: samples.len().min(labels.len()),
            k: 2,
        });
    }
    if labels.iter().any(|&y| y != 1 && y != -1) {
        return Err(SvmError::BadLabel);
    }
    if !(labels.contains(&1) && labels.contains(&-1)) {
        return Err(SvmError::SingleClassData);
    }
    let dim = samples[0].len();
    for s in samples {
        if s.len() != dim {
            return Err(SvmError::DimensionMismatch {
                expected: dim,
                got: s.len(),
            });
        }
    }
    Ok(dim)
}

/// Fits per-coordinate min-max bounds: returns `(min, max - min)`.
pub fn fit_minmax(samples: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let dim = samples[0].len();
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for s in samples {
        for (d, &v) in s.iter().enumerate() {
            lo[d] = lo[d].min(v);
            hi[d] = hi[d].max(v);
        }
    }
    let range = lo.iter().zip(&hi).map(|(&a, &b)| b - a).collect();
    (lo, range)
}

#[inline]
fn scale_into(x: &[f64], lo: &[f64], range: &[f64], out: &mut Vec<f64>) {
    out.clear();
    out.extend(x.iter().zip(lo.iter().zip(range)).map(|(&v, (&l, &r))| {
        if r > 0.0 {
            (v - l) / r
        } else {
            0.0
        }
    }));
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Full-batch hinge objective `(1/2)||w||^2 + C sum_i max(0, 1 - y_i (w.x_i + b))`
/// over already-scaled samples.
pub fn hinge_objective(scaled: &[Vec<f64>], labels: &[i8], c: f64, w: &[f64], b: f64) -> f64 {
    let reg = 0.5 * dot(w, w);
    let loss: f64 = scaled
        .iter()
        .zip(labels)
        .map(|(x, &y)| (1.0 - y as f64 * (dot(w, x) + b)).max(0.0))
        .sum();
    reg + c * loss
}

/// Full-batch subgradient of [`hinge_objective`] at `(w, b)`. At hinge kinks
/// the active-set convention (margin < 1 contributes) is used.
pub fn hinge_subgradient(
    scaled: &[Vec<f64>],
    labels: &[i8],
    c: f64,
    w: &[f64],
    b: f64,
) -> (Vec<f64>, f64) {
    let mut gw = w.to_vec();
    let mut gb = 0.0;
    for (x, &y) in scaled.iter().zip(labels) {
        if (y as f64) * (dot(w, x) + b) < 1.0 {
            for (g, &xi) in gw.iter_mut().zip(x) {
                *g -= c * y as f64 * xi;
            }
            gb -= c * y as f64;
        }
    }
    (gw, gb)
}

/// Trains a model; see the module docs for the optimization scheme.
pub fn train(
    samples: &[Vec<f64>],
    labels: &[i8],
    c: f64,
    epochs: usize,
    seed: u64,
) -> Result<SvmModel, SvmError> {
    train_traced(samples, labels, c, epochs, seed).map(|(m, _)| m)
}

/// Like [`train`] but also returns the objective value of the retained
/// (best-so-far) iterate at each epoch checkpoint; the trace is non-increasing.
pub fn train_traced(
    samples: &[Vec<f64>],
    labels: &[i8],
    c: f64,
    epochs: usize,
    seed: u64,
) -> Result<(SvmModel, Vec<f64>), SvmError> {
    let dim = validate_dataset(samples, labels)?;
    if c <= 0.0 {
        return Err(SvmError::BadCParam);
    }
    let n = samples.len();
    let (scale_min, scale_range) = fit_minmax(samples);
    let mut buf = Vec::with_capacity(dim);
    let scaled: Vec<Vec<f64>> = samples
        .iter()
        .map(|x| {
            scale_into(x, &scale_min, &scale_range, &mut buf);
            buf.clone()
        })
        .collect();

    let lambda = 1.0 / (c * n as f64);
    let w_norm_cap = (1.0 / lambda).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut best_w = w.clone();
    let mut best_b = b;
    let mut best_obj = hinge_objective(&scaled, labels, c, &w, b);
    let mut trace = Vec::with_capacity(epochs);
    let mut t = 0u64;

    for _ in 0..epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let x = &scaled[i];
            let y = labels[i] as f64;
            let margin = y * (dot(&w, x) + b);
            // The bias rides along as an implicit constant-1 coordinate of
            // the iterate; the retained model is still scored against the
            // unregularized objective below.
            let shrink = 1.0 - eta * lambda;
            for wi in w.iter_mut() {
                *wi *= shrink;
            }
            b *= shrink;
            if margin < 1.0 {
                for (wi, &xi) in w.iter_mut().zip(x) {
                    *wi += eta * y * xi;
                }
                b += eta * y;
            }
            // Projection onto the 1/sqrt(lambda) ball keeps the schedule's
            // early large steps bounded.
            let norm = (dot(&w, &w) + b * b).sqrt();
            if norm > w_norm_cap {
                let f = w_norm_cap / norm;
                for wi in w.iter_mut() {
                    *wi *= f;
                }
                b *= f;
            }
        }
        let obj = hinge_objective(&scaled, labels, c, &w, b);
        if obj < best_obj {
            best_obj = obj;
            best_w.copy_from_slice(&w);
            best_b = b;
        }
        trace.push(best_obj);
    }

    Ok((
        SvmModel {
            weights: best_w,
            bias: best_b,
            c_param: c,
            scale_min,
            scale_range,
        },
        trace,
    ))
}

impl SvmModel {
    /// Builds a model from raw parts; mainly for tests and deserialization.
    pub fn from_parts(
        weights: Vec<f64>,
        bias: f64,
        c_param: f64,
        scale_min: Vec<f64>,
        scale_range: Vec<f64>,
    ) -> Result<Self, SvmError> {
        if c_param <= 0.0 {
            return Err(SvmError::BadCParam);
        }
        if scale_min.len() != weights.len() || scale_range.len() != weights.len() {
            return Err(SvmError::DimensionMismatch {
                expected: weights.len(),
                got: scale_min.len().min(scale_range.len()),
            });
        }
        Ok(Self {
            weights,
            bias,
            c_param,
            scale_min,
            scale_range,
        })
    }

    /// Identity-scaled model (no feature rescaling).
    pub fn with_identity_scale(weights: Vec<f64>, bias: f64, c_param: f64) -> Self {
        let dim = weights.len();
        Self {
            weights,
            bias,
            c_param,
            scale_min: vec![0.0; dim],
            scale_range: vec![1.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn c_param(&self) -> f64 {
        self.c_param
    }

    /// Decision score and label; a score of exactly 0 maps to +1.
    pub fn predict(&self, x: &[f64]) -> Result<(i8, f64), SvmError> {
        if x.len() != self.weights.len() {
            return Err(SvmError::DimensionMismatch {
                expected: self.weights.len(),
                got: x.len(),
            });
        }
        let mut scaled = Vec::with_capacity(x.len());
        scale_into(x, &self.scale_min, &self.scale_range, &mut scaled);
        let score = dot(&self.weights, &scaled) + self.bias;
        Ok((if score >= 0.0 { 1 } else { -1 }, score))
    }

    /// Writes the model as line-oriented text with 17-significant-digit
    /// floats, which round-trip f64 bit-exactly.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), SvmError> {
        let path = path.as_ref();
        let fmt_vec = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x:.16e}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let text = format!(
            "svmlinear v1\ndim {}\nc {:.16e}\nbias {:.16e}\nscale_min {}\nscale_range {}\nw {}\n",
            self.weights.len(),
            self.c_param,
            self.bias,
            fmt_vec(&self.scale_min),
            fmt_vec(&self.scale_range),
            fmt_vec(&self.weights),
        );
        std::fs::write(path, text).map_err(|source| SvmError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, SvmError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| SvmError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let malformed = |detail: &str| SvmError::MalformedModelFile {
            path: path.to_path_buf(),
            detail: detail.to_string(),
        };
        let mut lines = text.lines();
        if lines.next() != Some("svmlinear v1") {
            return Err(malformed("missing 'svmlinear v1' magic line"));
        }
        let mut field = |name: &str| -> Result<String, SvmError> {
            let line = lines
                .next()
                .ok_or_else(|| malformed(&format!("missing {name} line")))?;
            line.strip_prefix(name)
                .and_then(|rest| rest.strip_prefix(' '))
                .map(str::to_string)
                .ok_or_else(|| malformed(&format!("expected '{name} ...' line")))
        };
        let parse_f64s = |s: &str, what: &str| -> Result<Vec<f64>, SvmError> {
            s.split_whitespace()
                .map(|tok| tok.parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| malformed(&format!("unparsable float in {what}")))
        };

        let dim: usize = field("dim")?
            .parse()
            .map_err(|_| malformed("unparsable dim"))?;
        let c_param: f64 = field("c")?
            .parse()
            .map_err(|_| malformed("unparsable c"))?;
        let bias: f64 = field("bias")?
            .parse()
            .map_err(|_| malformed("unparsable bias"))?;
        let scale_min = parse_f64s(&field("scale_min")?, "scale_min")?;
        let scale_range = parse_f64s(&field("scale_range")?, "scale_range")?;
        let weights = parse_f64s(&field("w")?, "w")?;
        for (name, v) in [
            ("scale_min", &scale_min),
            ("scale_range", &scale_range),
            ("w", &weights),
        ] {
            if v.len() != dim {
                return Err(malformed(&format!(
                    "{name} has {} values, header declares dim {dim}",
                    v.len()
                )));
            }
        }
        Self::from_parts(weights, bias, c_param, scale_min, scale_range)
    }
}

/// Seeded-shuffle k-fold cross-validation. Returns the mean validation
/// accuracy as a percentage and one confusion matrix per fold, in fold order.
/// Folds are evaluated in parallel; results are order-independent.
pub fn cross_validate(
    samples: &[Vec<f64>],
    labels: &[i8],
    k: usize,
    c: f64,
    seed: u64,
) -> Result<(f64, Vec<ConfusionMatrix>), SvmError> {
    let n = samples.len();
    if k < 2 || k > n {
        return Err(SvmError::TooFewSamples { n, k });
    }
    validate_dataset(samples, labels)?;

    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    // Contiguous split of the shuffled order; the first n % k folds take one
    // extra sample.
    let base = n / k;
    let extra = n % k;
    let mut folds: Vec<Vec<usize>> = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        folds.push(order[start..start + len].to_vec());
        start += len;
    }

    let matrices: Vec<ConfusionMatrix> = folds
        .par_iter()
        .enumerate()
        .map(|(f, val_idx)| {
            let in_val: std::collections::HashSet<usize> = val_idx.iter().copied().collect();
            let mut tr_x = Vec::with_capacity(n - val_idx.len());
            let mut tr_y = Vec::with_capacity(n - val_idx.len());
            for i in 0..n {
                if !in_val.contains(&i) {
                    tr_x.push(samples[i].clone());
                    tr_y.push(labels[i]);
                }
            }
            let model = train(&tr_x, &tr_y, c, DEFAULT_EPOCHS, derive_seed(seed, f as u64))?;
            let mut cm = ConfusionMatrix::default();
            for &i in val_idx {
                let (pred, _) = model.predict(&samples[i])?;
                cm.record(labels[i], pred);
            }
            Ok(cm)
        })
        .collect::<Result<Vec<_>, SvmError>>()?;

    let mean_acc =
        matrices.iter().map(ConfusionMatrix::accuracy).sum::<f64>() / k as f64 * 100.0;
    Ok((mean_acc, matrices))
}
