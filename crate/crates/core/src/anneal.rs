//! Disambiguation of overlapping data points by simulated annealing.
//!
//! The target is a binary pixel region that failed shape classification. A
//! population of candidate shape placements is rendered (logical OR of
//! template masks) into a canvas `C`; the cost is the Grammian trace
//! `Tr[(B - C)^T (B - C)]`, which for binary matrices is exactly the count of
//! mismatched pixels against the target `B`. Each iteration perturbs one
//! placement by at most one pixel per coordinate and applies the Metropolis
//! rule: always accept improvements, accept a worsening of `dE` with
//! probability `exp(-dE / T)`. Housekeeping runs on fixed periods — every
//! `alpha` steps coincident same-shape duplicates are removed, every `beta`
//! steps the temperature cools by `T *= 1 - e`, and every `gamma` steps the
//! offsets of two placements of different shapes are swapped (proposed under
//! the same Metropolis rule).

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::derive_seed;
use crate::plotseg::TemplateLibrary;
use crate::raster::BinaryImage;

#[derive(Debug, Error)]
pub enum AnnealError {
    #[error("no usable templates: {0}")]
    NoTemplates(String),
    #[error("target image has no foreground")]
    EmptyTarget,
    #[error("placement of '{shape_id}' at ({i}, {j}) exceeds the {h}x{w} canvas")]
    OutOfBounds {
        shape_id: String,
        i: usize,
        j: usize,
        h: usize,
        w: usize,
    },
    #[error("canvas dimensions do not match target dimensions")]
    DimensionMismatch,
    #[error("unknown shape id '{0}'")]
    UnknownShape(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

/// A candidate data point: a template placed at an integer top-left offset.
/// Weight 0 marks a placement removed by the duplicate sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement {
    pub shape_id: String,
    /// Top-left offset `(i, j)` in target coordinates.
    pub offset: (usize, usize),
    pub weight: u8,
}

impl Placement {
    pub fn new(shape_id: impl Into<String>, i: usize, j: usize) -> Self {
        Self {
            shape_id: shape_id.into(),
            offset: (i, j),
            weight: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnnealConfig {
    pub max_iterations: u64,
    /// Cooling fraction e in (0, 1): T <- T * (1 - e).
    pub temp_constant_e: f64,
    /// Steps between duplicate-removal sweeps.
    pub alpha: u64,
    /// Steps between coolings.
    pub beta: u64,
    /// Steps between type-swap proposals.
    pub gamma: u64,
    /// Stop as soon as the cost reaches this value.
    pub epsilon: u64,
    pub initial_candidates_per_shape: usize,
    pub seed: u64,
    /// Same-shape placements within this Euclidean distance count as
    /// duplicates.
    pub duplicate_distance: f64,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        Self {
            max_iterations: 10_000,
            temp_constant_e: 0.4,
            alpha: 200,
            beta: 100,
            gamma: 150,
            epsilon: 0,
            initial_candidates_per_shape: 20,
            seed: 42,
            duplicate_distance: 2.0,
        }
    }
}

impl AnnealConfig {
    fn validate(&self) -> Result<(), AnnealError> {
        let ok = self.temp_constant_e > 0.0
            && self.temp_constant_e < 1.0
            && self.alpha >= 1
            && self.beta >= 1
            && self.gamma >= 1
            && self.initial_candidates_per_shape >= 1;
        if ok {
            Ok(())
        } else {
            Err(AnnealError::InvalidConfig(
                "e must be in (0, 1) and all periods >= 1".into(),
            ))
        }
    }
}

/// Surviving placements and convergence information of one annealing run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnealResult {
    /// Placements with weight 1; weight-0 duplicates are dropped.
    pub placements: Vec<Placement>,
    pub final_cost: u64,
    pub iterations_used: u64,
    pub converged: bool,
}

/// ORs each weight-1 placement's template mask into an `h` x `w` canvas.
pub fn render(
    placements: &[Placement],
    templates: &TemplateLibrary,
    h: usize,
    w: usize,
) -> Result<BinaryImage, AnnealError> {
    let mut canvas = BinaryImage::zeros(w, h);
    for p in placements {
        if p.weight == 0 {
            continue;
        }
        let tpl = templates
            .get(&p.shape_id)
            .ok_or_else(|| AnnealError::UnknownShape(p.shape_id.clone()))?;
        let (i, j) = p.offset;
        if i + tpl.mask.height() > h || j + tpl.mask.width() > w {
            return Err(AnnealError::OutOfBounds {
                shape_id: p.shape_id.clone(),
                i,
                j,
                h,
                w,
            });
        }
        for (r, c) in tpl.mask.foreground() {
            canvas.set(i + r, j + c, 1);
        }
    }
    Ok(canvas)
}

/// Grammian-trace cost `Tr[(B - C)^T (B - C)]`: the number of pixels where the
/// rendered candidate canvas differs from the target.
pub fn cost(
    target: &BinaryImage,
    placements: &[Placement],
    templates: &TemplateLibrary,
) -> Result<u64, AnnealError> {
    let canvas = render(placements, templates, target.height(), target.width())?;
    if canvas.width() != target.width() || canvas.height() != target.height() {
        return Err(AnnealError::DimensionMismatch);
    }
    Ok(canvas
        .data()
        .iter()
        .zip(target.data())
        .filter(|(a, b)| a != b)
        .count() as u64)
}

/// Prepared template: foreground offsets flattened for the hot loop.
struct Tpl {
    shape_id: String,
    height: usize,
    width: usize,
    pixels: Vec<(usize, usize)>,
}

struct Candidate {
    tpl: usize,
    i: usize,
    j: usize,
    active: bool,
    /// Pixels of this candidate sitting on target background. Well-seated
    /// candidates have low waste; strays and clumps have high waste.
    waste: u32,
}

/// Incremental annealing engine: tracks per-pixel coverage counts so that
/// moving one placement costs O(template area) rather than O(canvas).
struct Engine<'a> {
    target: &'a BinaryImage,
    tpls: &'a [Tpl],
    coverage: Vec<u16>,
    cands: Vec<Candidate>,
    active: Vec<usize>,
    cost: u64,
    temp: f64,
    rng: ChaCha8Rng,
}

impl<'a> Engine<'a> {
    fn new(target: &'a BinaryImage, tpls: &'a [Tpl], seed: u64) -> Self {
        // With no coverage, cost = number of target foreground pixels.
        Self {
            target,
            tpls,
            coverage: vec![0; target.width() * target.height()],
            cands: Vec::new(),
            active: Vec::new(),
            cost: target.foreground_count() as u64,
            temp: 0.0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    #[inline]
    fn stamp(&mut self, tpl: usize, i: usize, j: usize, add: bool) {
        let w = self.target.width();
        for &(r, c) in &self.tpls[tpl].pixels {
            let idx = (i + r) * w + (j + c);
            let b = self.target.data()[idx] as i64;
            let before = (self.coverage[idx] > 0) as i64;
            if add {
                self.coverage[idx] += 1;
            } else {
                self.coverage[idx] -= 1;
            }
            let after = (self.coverage[idx] > 0) as i64;
            if before != after {
                // Mismatch contribution flips with the rendered bit.
                let delta = (b - after).abs() - (b - before).abs();
                self.cost = (self.cost as i64 + delta) as u64;
            }
        }
    }

    fn waste_at(&self, tpl: usize, i: usize, j: usize) -> u32 {
        let w = self.target.width();
        self.tpls[tpl]
            .pixels
            .iter()
            .filter(|&&(r, c)| self.target.data()[(i + r) * w + (j + c)] == 0)
            .count() as u32
    }

    fn add_candidate(&mut self, tpl: usize, i: usize, j: usize) {
        self.stamp(tpl, i, j, true);
        let waste = self.waste_at(tpl, i, j);
        self.cands.push(Candidate {
            tpl,
            i,
            j,
            active: true,
            waste,
        });
        self.active.push(self.cands.len() - 1);
    }

    fn deactivate(&mut self, cand_idx: usize) {
        let (tpl, i, j) = {
            let c = &self.cands[cand_idx];
            (c.tpl, c.i, c.j)
        };
        self.stamp(tpl, i, j, false);
        self.cands[cand_idx].active = false;
        let pos = self.active.iter().position(|&k| k == cand_idx).unwrap();
        self.active.swap_remove(pos);
    }

    fn reactivate(&mut self, cand_idx: usize) {
        let (tpl, i, j) = {
            let c = &self.cands[cand_idx];
            (c.tpl, c.i, c.j)
        };
        self.stamp(tpl, i, j, true);
        let waste = self.waste_at(tpl, i, j);
        let c = &mut self.cands[cand_idx];
        c.active = true;
        c.waste = waste;
        self.active.push(cand_idx);
    }

    fn move_candidate(&mut self, cand_idx: usize, ni: usize, nj: usize) {
        let (tpl, i, j) = {
            let c = &self.cands[cand_idx];
            (c.tpl, c.i, c.j)
        };
        if (ni, nj) == (i, j) {
            return;
        }
        self.stamp(tpl, i, j, false);
        self.stamp(tpl, ni, nj, true);
        let waste = self.waste_at(tpl, ni, nj);
        let c = &mut self.cands[cand_idx];
        c.i = ni;
        c.j = nj;
        c.waste = waste;
    }

    /// Metropolis rule: accept improvements outright, worsenings with
    /// probability exp(-dE/T). dE == 0 always passes (exp(0) = 1).
    fn accept(&mut self, before: u64, after: u64) -> bool {
        if after < before {
            return true;
        }
        let de = (after - before) as f64;
        if de == 0.0 {
            return true;
        }
        if self.temp <= 0.0 {
            return false;
        }
        self.rng.random::<f64>() < (-de / self.temp).exp()
    }

    fn bounds(&self, tpl: usize) -> (usize, usize) {
        (
            self.target.height() - self.tpls[tpl].height,
            self.target.width() - self.tpls[tpl].width,
        )
    }

    /// Waste-weighted draw from a candidate set (weight = waste + 1). Strays
    /// and clumps soak up the move budget; placements seated exactly on
    /// target ink are rarely disturbed (and a disturbance is uphill anyway).
    fn pick_weighted(rng: &mut ChaCha8Rng, cands: &[Candidate], pool: &[usize]) -> usize {
        let total: u64 = pool.iter().map(|&k| cands[k].waste as u64 + 1).sum();
        let mut ticket = rng.random_range(0..total);
        for &k in pool {
            let w = cands[k].waste as u64 + 1;
            if ticket < w {
                return k;
            }
            ticket -= w;
        }
        *pool.last().unwrap()
    }

    /// One perturbation: +-1 per coordinate on a waste-weighted random active
    /// placement.
    fn perturb(&mut self) {
        if self.active.is_empty() {
            return;
        }
        let cand_idx = Self::pick_weighted(&mut self.rng, &self.cands, &self.active);
        let (tpl, i, j) = {
            let c = &self.cands[cand_idx];
            (c.tpl, c.i, c.j)
        };
        // round(rand*2 - 1) with round-half-away-from-zero gives {-1, 0, +1}.
        let di = (self.rng.random::<f64>() * 2.0 - 1.0).round() as isize;
        let dj = (self.rng.random::<f64>() * 2.0 - 1.0).round() as isize;
        let (bi, bj) = self.bounds(tpl);
        let ni = (i as isize + di).clamp(0, bi as isize) as usize;
        let nj = (j as isize + dj).clamp(0, bj as isize) as usize;

        let before = self.cost;
        self.move_candidate(cand_idx, ni, nj);
        let after = self.cost;
        if !self.accept(before, after) {
            self.move_candidate(cand_idx, i, j);
        }
    }

    /// Removes one of every pair of same-shape placements whose offsets lie
    /// within the duplicate distance, provided the removal does not raise the
    /// cost. Fully coincident duplicates are always free to remove (OR
    /// idempotence); a removal that would uncover target ink is skipped, so
    /// candidates merely crossing paths in the hot phase survive.
    fn duplicate_sweep(&mut self, duplicate_distance: f64) {
        let snapshot: Vec<usize> = self.active.clone();
        for (pos, &a) in snapshot.iter().enumerate() {
            if !self.cands[a].active {
                continue;
            }
            for &b in &snapshot[pos + 1..] {
                if !self.cands[b].active
                    || !self.cands[a].active
                    || self.cands[a].tpl != self.cands[b].tpl
                {
                    continue;
                }
                let d = ((self.cands[a].i as f64 - self.cands[b].i as f64).powi(2)
                    + (self.cands[a].j as f64 - self.cands[b].j as f64).powi(2))
                .sqrt();
                if d <= duplicate_distance {
                    let before = self.cost;
                    self.deactivate(b);
                    if self.cost > before {
                        self.reactivate(b);
                    }
                }
            }
        }
    }

    /// Proposes swapping the offsets of two placements of different shapes,
    /// clamped into each receiver's bounds, under the Metropolis rule. Both
    /// parties are drawn waste-weighted, so a mis-typed squatter and a nearby
    /// stray propose their exchange often.
    fn swap_types(&mut self) {
        if self.active.len() < 2 {
            return;
        }
        let a = Self::pick_weighted(&mut self.rng, &self.cands, &self.active);
        let others: Vec<usize> = self
            .active
            .iter()
            .copied()
            .filter(|&k| self.cands[k].tpl != self.cands[a].tpl)
            .collect();
        if others.is_empty() {
            return;
        }
        let b = Self::pick_weighted(&mut self.rng, &self.cands, &others);

        let (ai, aj) = (self.cands[a].i, self.cands[a].j);
        let (bi, bj) = (self.cands[b].i, self.cands[b].j);
        let (abi, abj) = self.bounds(self.cands[a].tpl);
        let (bbi, bbj) = self.bounds(self.cands[b].tpl);
        let na = (bi.min(abi), bj.min(abj));
        let nb = (ai.min(bbi), aj.min(bbj));

        let before = self.cost;
        self.move_candidate(a, na.0, na.1);
        self.move_candidate(b, nb.0, nb.1);
        if !self.accept(before, self.cost) {
            self.move_candidate(b, bi, bj);
            self.move_candidate(a, ai, aj);
        }
    }

    fn placements(&self) -> Vec<Placement> {
        self.active
            .iter()
            .map(|&k| {
                let c = &self.cands[k];
                Placement::new(self.tpls[c.tpl].shape_id.clone(), c.i, c.j)
            })
            .collect()
    }

    /// Terminal cleanup: repeatedly removes the placement whose removal
    /// lowers (or leaves unchanged) the cost — strays explaining no target
    /// ink and fully redundant covers. Survivors each make a strictly
    /// positive contribution.
    fn prune(&mut self) {
        loop {
            let mut order: Vec<usize> = self.active.clone();
            order.sort_by_key(|&k| std::cmp::Reverse(self.cands[k].waste));
            let mut removed_any = false;
            for k in order {
                if !self.cands[k].active {
                    continue;
                }
                let before = self.cost;
                self.deactivate(k);
                if self.cost > before {
                    self.reactivate(k);
                } else {
                    removed_any = true;
                }
            }
            if !removed_any {
                break;
            }
        }
    }
}

fn prepare_templates(
    templates: &TemplateLibrary,
    h: usize,
    w: usize,
) -> Result<Vec<Tpl>, AnnealError> {
    if templates.is_empty() {
        return Err(AnnealError::NoTemplates("library is empty".into()));
    }
    let tpls: Vec<Tpl> = templates
        .iter()
        .filter(|t| t.mask.height() <= h && t.mask.width() <= w)
        .map(|t| Tpl {
            shape_id: t.shape_id.clone(),
            height: t.mask.height(),
            width: t.mask.width(),
            pixels: t.mask.foreground().collect(),
        })
        .collect();
    if tpls.is_empty() {
        return Err(AnnealError::NoTemplates(format!(
            "no template fits the {h}x{w} target"
        )));
    }
    Ok(tpls)
}

struct RunOutcome {
    placements: Vec<Placement>,
    final_cost: u64,
    iterations_used: u64,
    converged: bool,
    trace: Vec<u64>,
}

/// Initial population for one run: carried-over placements (by template
/// index), optionally topped up with fresh uniform candidates to
/// `initial_candidates_per_shape` per template.
struct InitPlan {
    carried: Vec<(usize, usize, usize)>,
    top_up: bool,
}

fn run_once(
    target: &BinaryImage,
    tpls: &[Tpl],
    config: &AnnealConfig,
    seed: u64,
    init: &InitPlan,
    record_trace: bool,
) -> Result<RunOutcome, AnnealError> {
    let (h, w) = (target.height(), target.width());
    let mut engine = Engine::new(target, tpls, seed);

    for &(tpl_idx, i, j) in &init.carried {
        let (bi, bj) = (h - tpls[tpl_idx].height, w - tpls[tpl_idx].width);
        if i > bi || j > bj {
            return Err(AnnealError::OutOfBounds {
                shape_id: tpls[tpl_idx].shape_id.clone(),
                i,
                j,
                h,
                w,
            });
        }
        engine.add_candidate(tpl_idx, i, j);
    }
    if init.top_up {
        for (tpl_idx, tpl) in tpls.iter().enumerate() {
            let carried = init.carried.iter().filter(|c| c.0 == tpl_idx).count();
            let (bi, bj) = (h - tpl.height, w - tpl.width);
            for _ in carried..config.initial_candidates_per_shape {
                let i = engine.rng.random_range(0..=bi);
                let j = engine.rng.random_range(0..=bj);
                engine.add_candidate(tpl_idx, i, j);
            }
        }
    }

    // Initial energy doubles as the starting temperature.
    engine.temp = engine.cost as f64;
    let mut trace = Vec::new();
    if engine.cost <= config.epsilon {
        engine.prune();
        return Ok(RunOutcome {
            placements: engine.placements(),
            final_cost: engine.cost,
            iterations_used: 0,
            converged: true,
            trace,
        });
    }

    let mut iterations_used = config.max_iterations;
    let mut converged = false;
    for t in 1..=config.max_iterations {
        engine.perturb();
        if t % config.alpha == 0 {
            engine.duplicate_sweep(config.duplicate_distance);
        }
        if t % config.beta == 0 {
            engine.temp *= 1.0 - config.temp_constant_e;
        }
        if t % config.gamma == 0 {
            engine.swap_types();
        }
        if record_trace {
            trace.push(engine.cost);
        }
        if engine.cost <= config.epsilon {
            iterations_used = t;
            converged = true;
            break;
        }
    }

    engine.prune();
    let converged = converged || engine.cost <= config.epsilon;

    #[cfg(debug_assertions)]
    {
        let recount = cost(target, &engine.placements(), &dummy_library(tpls))?;
        assert_eq!(
            engine.cost, recount,
            "incremental cost drifted from the ground-truth recount"
        );
    }

    Ok(RunOutcome {
        placements: engine.placements(),
        final_cost: engine.cost,
        iterations_used,
        converged,
        trace,
    })
}

/// Rebuilds a library view over prepared templates for the debug recount.
#[cfg(debug_assertions)]
fn dummy_library(tpls: &[Tpl]) -> TemplateLibrary {
    use crate::plotseg::ShapeTemplate;

    let mut lib = TemplateLibrary::new();
    for t in tpls {
        let mut mask = BinaryImage::zeros(t.width, t.height);
        for &(r, c) in &t.pixels {
            mask.set(r, c, 1);
        }
        lib.push(ShapeTemplate::new(t.shape_id.clone(), mask).unwrap())
            .unwrap();
    }
    lib
}

/// Restarts attempted while the cost stays above a tenth of the target
/// foreground.
const MAX_RESTARTS: u64 = 7;

/// A placement carries over into a restart when at most this fraction of its
/// pixels sits on target background.
const CARRY_WASTE_FRACTION: f64 = 0.35;

/// Runs the annealer from seeded-uniform random initial candidates
/// (`initial_candidates_per_shape` per template).
///
/// While the run ends unconverged with a cost above 10% of the target
/// foreground, up to [`MAX_RESTARTS`] seeded restarts are attempted. A restart
/// keeps the placements that already sit on target ink (waste at most
/// [`CARRY_WASTE_FRACTION`] of their area) and resamples the stranded rest
/// uniformly; the best run by cost wins.
pub fn anneal(
    target: &BinaryImage,
    templates: &TemplateLibrary,
    config: &AnnealConfig,
) -> Result<AnnealResult, AnnealError> {
    config.validate()?;
    if target.foreground_count() == 0 {
        return Err(AnnealError::EmptyTarget);
    }
    let tpls = prepare_templates(templates, target.height(), target.width())?;
    // With stray placements pruned from run outcomes, any genuinely missed or
    // mis-typed shape costs far more than residual +-1 misalignments; keep
    // hopping until the cost is down to the few-percent regime.
    let threshold = (target.foreground_count() as u64 / 50).max(2);

    let waste_of = |tpl_idx: usize, i: usize, j: usize| -> u32 {
        let w = target.width();
        tpls[tpl_idx]
            .pixels
            .iter()
            .filter(|&&(r, c)| target.data()[(i + r) * w + (j + c)] == 0)
            .count() as u32
    };
    let as_tpl_idx = |p: &Placement| -> usize {
        tpls.iter()
            .position(|t| t.shape_id == p.shape_id)
            .expect("run output only contains prepared templates")
    };

    // A zero-iteration budget means no search at all; restarts would turn it
    // into a random-restart sampler.
    let max_hops = if config.max_iterations == 0 {
        0
    } else {
        MAX_RESTARTS
    };
    let mut best: Option<RunOutcome> = None;
    let mut carried: Vec<(usize, usize, usize)> = Vec::new();
    for hop in 0..=max_hops {
        let seed = if hop == 0 {
            config.seed
        } else {
            derive_seed(config.seed, hop)
        };
        let init = InitPlan {
            carried: std::mem::take(&mut carried),
            top_up: true,
        };
        let outcome = run_once(target, &tpls, config, seed, &init, false)?;
        let better = best
            .as_ref()
            .is_none_or(|b| outcome.final_cost < b.final_cost);
        if better {
            best = Some(outcome);
        }
        let best_ref = best.as_ref().unwrap();
        if best_ref.converged || best_ref.final_cost <= threshold {
            break;
        }
        carried = best_ref
            .placements
            .iter()
            .map(|p| (as_tpl_idx(p), p.offset.0, p.offset.1))
            .filter(|&(t, i, j)| {
                let area = tpls[t].pixels.len() as f64;
                f64::from(waste_of(t, i, j)) <= CARRY_WASTE_FRACTION * area
            })
            .collect();
    }

    let best = best.expect("at least one run executes");
    Ok(AnnealResult {
        placements: best.placements,
        final_cost: best.final_cost,
        iterations_used: best.iterations_used,
        converged: best.converged,
    })
}

/// Runs the annealer from caller-supplied initial placements (weight-0
/// entries are ignored). No restart is attempted.
pub fn anneal_with_initial(
    target: &BinaryImage,
    templates: &TemplateLibrary,
    config: &AnnealConfig,
    initial: &[Placement],
) -> Result<AnnealResult, AnnealError> {
    config.validate()?;
    if target.foreground_count() == 0 {
        return Err(AnnealError::EmptyTarget);
    }
    let tpls = prepare_templates(templates, target.height(), target.width())?;
    let carried = initial
        .iter()
        .filter(|p| p.weight != 0)
        .map(|p| {
            tpls.iter()
                .position(|t| t.shape_id == p.shape_id)
                .map(|idx| (idx, p.offset.0, p.offset.1))
                .ok_or_else(|| AnnealError::UnknownShape(p.shape_id.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let init = InitPlan {
        carried,
        top_up: false,
    };
    let out = run_once(target, &tpls, config, config.seed, &init, false)?;
    Ok(AnnealResult {
        placements: out.placements,
        final_cost: out.final_cost,
        iterations_used: out.iterations_used,
        converged: out.converged,
    })
}

/// Like [`anneal`] but single-run (no restart) and returning the cost after
/// every iteration; used to check schedule properties.
pub fn anneal_traced(
    target: &BinaryImage,
    templates: &TemplateLibrary,
    config: &AnnealConfig,
) -> Result<(AnnealResult, Vec<u64>), AnnealError> {
    config.validate()?;
    if target.foreground_count() == 0 {
        return Err(AnnealError::EmptyTarget);
    }
    let tpls = prepare_templates(templates, target.height(), target.width())?;
    let init = InitPlan {
        carried: Vec::new(),
        top_up: true,
    };
    let out = run_once(target, &tpls, config, config.seed, &init, true)?;
    Ok((
        AnnealResult {
            placements: out.placements,
            final_cost: out.final_cost,
            iterations_used: out.iterations_used,
            converged: out.converged,
        },
        out.trace,
    ))
}

/// Per-shape tally of matched ground-truth placements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeCount {
    pub shape_id: String,
    pub total: usize,
    pub correct: usize,
}

impl ShapeCount {
    pub fn recall(&self) -> f64 {
        if self.total == 0 {
            1.0
        } else {
            self.correct as f64 / self.total as f64
        }
    }
}

/// Result of greedy one-to-one matching of recovered placements to truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    /// Overall fraction of truth placements recovered.
    pub recall: f64,
    pub per_shape: Vec<ShapeCount>,
}

/// Greedy one-to-one matching in truth order: a truth placement is correct iff
/// an unmatched result placement of the same shape lies within `tol`
/// (Chebyshev distance) of it; the nearest eligible candidate is consumed.
pub fn match_placements(result: &AnnealResult, truth: &[Placement], tol: u32) -> MatchReport {
    let mut used = vec![false; result.placements.len()];
    let mut tally: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    let mut correct_total = 0usize;

    for t in truth {
        if t.weight == 0 {
            continue;
        }
        let entry = tally.entry(t.shape_id.as_str()).or_insert((0, 0));
        entry.0 += 1;
        let best = result
            .placements
            .iter()
            .enumerate()
            .filter(|(k, p)| {
                !used[*k]
                    && p.shape_id == t.shape_id
                    && chebyshev(p.offset, t.offset) <= tol as usize
            })
            .min_by_key(|(k, p)| (chebyshev(p.offset, t.offset), *k));
        if let Some((k, _)) = best {
            used[k] = true;
            entry.1 += 1;
            correct_total += 1;
        }
    }

    let truth_total: usize = tally.values().map(|v| v.0).sum();
    MatchReport {
        recall: if truth_total == 0 {
            1.0
        } else {
            correct_total as f64 / truth_total as f64
        },
        per_shape: tally
            .into_iter()
            .map(|(shape_id, (total, correct))| ShapeCount {
                shape_id: shape_id.to_string(),
                total,
                correct,
            })
            .collect(),
    }
}

fn chebyshev(a: (usize, usize), b: (usize, usize)) -> usize {
    let dr = a.0.abs_diff(b.0);
    let dc = a.1.abs_diff(b.1);
    dr.max(dc)
}

/// Centroid of a placement in target coordinates: its top-left offset plus the
/// template's own centroid.
pub fn placement_centroid(
    placement: &Placement,
    templates: &TemplateLibrary,
) -> Result<(f64, f64), AnnealError> {
    let tpl = templates
        .get(&placement.shape_id)
        .ok_or_else(|| AnnealError::UnknownShape(placement.shape_id.clone()))?;
    let (cr, cc) = tpl.centroid();
    Ok((placement.offset.0 as f64 + cr, placement.offset.1 as f64 + cc))
}
