//! Disambiguation evaluation harness: generate, anneal, match, aggregate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::anneal::{anneal, match_placements, AnnealConfig};
use crate::derive_seed;
use crate::plotseg::TemplateLibrary;

use super::{gen_overlap_image, OverlapSpec, SynthError};

/// Aggregated per-shape recovery counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeRecall {
    pub shape_id: String,
    pub total: usize,
    pub correct: usize,
    pub recall: f64,
}

/// Recall table in the style of the disambiguation experiment summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecallTable {
    pub images: usize,
    pub tol: u32,
    pub rows: Vec<ShapeRecall>,
}

impl RecallTable {
    /// Overall recall across shapes.
    pub fn overall(&self) -> f64 {
        let total: usize = self.rows.iter().map(|r| r.total).sum();
        let correct: usize = self.rows.iter().map(|r| r.correct).sum();
        if total == 0 {
            1.0
        } else {
            correct as f64 / total as f64
        }
    }

    pub fn recall_of(&self, shape_id: &str) -> Option<f64> {
        self.rows.iter().find(|r| r.shape_id == shape_id).map(|r| r.recall)
    }
}

impl std::fmt::Display for RecallTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{:<12} {:>6} {:>9} {:>9}", "Shape", "Total", "Correct", "% Recall")?;
        for row in &self.rows {
            writeln!(
                f,
                "{:<12} {:>6} {:>9} {:>9.1}",
                row.shape_id,
                row.total,
                row.correct,
                row.recall * 100.0
            )?;
        }
        write!(
            f,
            "{:<12} {:>6} {:>9} {:>9.1}",
            "(all)",
            self.rows.iter().map(|r| r.total).sum::<usize>(),
            self.rows.iter().map(|r| r.correct).sum::<usize>(),
            self.overall() * 100.0
        )
    }
}

/// Runs generate -> anneal -> match over `n_images` images and aggregates
/// per-shape totals and correct recoveries.
///
/// Image `i` uses spec seed `derive_seed(spec.seed, i)` and anneal seed
/// `derive_seed(config.seed, i)`, so the whole evaluation is fixed by the two
/// base seeds and parallel execution cannot change the outcome.
pub fn eval_disambiguation(
    n_images: usize,
    spec_template: &OverlapSpec,
    config: &AnnealConfig,
    tol: u32,
    templates: &TemplateLibrary,
) -> Result<RecallTable, SynthError> {
    let reports: Vec<_> = (0..n_images)
        .into_par_iter()
        .map(|i| {
            let spec = OverlapSpec {
                seed: derive_seed(spec_template.seed, i as u64),
                ..spec_template.clone()
            };
            // Salt the annealer stream so equal base seeds cannot correlate
            // the generator's truth draws with the initial candidate draws.
            let cfg = AnnealConfig {
                seed: derive_seed(config.seed ^ 0x616e_6e65_616c, i as u64),
                ..config.clone()
            };
            let (target, truth) = gen_overlap_image(&spec, templates)?;
            let result = anneal(&target, templates, &cfg)?;
            Ok(match_placements(&result, &truth, tol))
        })
        .collect::<Result<_, SynthError>>()?;

    let mut tally: std::collections::BTreeMap<String, (usize, usize)> =
        std::collections::BTreeMap::new();
    for report in &reports {
        for shape in &report.per_shape {
            let entry = tally.entry(shape.shape_id.clone()).or_insert((0, 0));
            entry.0 += shape.total;
            entry.1 += shape.correct;
        }
    }

    Ok(RecallTable {
        images: n_images,
        tol,
        rows: tally
            .into_iter()
            .map(|(shape_id, (total, correct))| ShapeRecall {
                shape_id,
                total,
                correct,
                recall: if total == 0 {
                    1.0
                } else {
                    correct as f64 / total as f64
                },
            })
            .collect(),
    })
}
