//! Statistic assembly: sum a score over the configuration points of a region,
//! weighted by a test function, plus the first/second difference operators
//! and the Monte Carlo stabilization probe built on them.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::process::{
    self, MarkedPoint, PointConfig, Pos, ProcessError, WindowSpec,
};
use crate::rng::{self, tag};
use crate::scores::{self, EvalContext, ScoreError, ScoreSpec};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error(transparent)]
    Process(#[from] ProcessError),
    #[error("region must be a positive-volume subset of the window: {0}")]
    BadRegion(String),
    #[error("test function is identically zero; the statistic would vanish almost surely")]
    ZeroTestFn,
    #[error("test function kind cannot be used here: {0}")]
    BadTestFn(String),
    #[error("inserted point duplicates an existing position")]
    DuplicateInsert,
    #[error("inserted point lies outside the window")]
    InsertOutsideWindow,
    #[error("need at least {needed} replications, got {got}")]
    TooFewReps { needed: usize, got: usize },
}

/// Summation region: the whole window or an axis-aligned sub-box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    All,
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

impl Region {
    pub fn contains(&self, w: &WindowSpec, p: &Pos) -> bool {
        match self {
            Region::All => true,
            Region::Box { lo, hi } => (0..w.dim).all(|i| p[i] >= lo[i] && p[i] <= hi[i]),
        }
    }

    pub fn volume(&self, w: &WindowSpec) -> f64 {
        match self {
            Region::All => w.volume(),
            Region::Box { lo, hi } => (0..w.dim).map(|i| (hi[i] - lo[i]).max(0.0)).product(),
        }
    }

    /// Lower/upper corners clipped to the window.
    pub fn bounds(&self, w: &WindowSpec) -> (Vec<f64>, Vec<f64>) {
        match self {
            Region::All => (w.lo.clone(), w.hi.clone()),
            Region::Box { lo, hi } => (lo.clone(), hi.clone()),
        }
    }

    pub fn validate(&self, w: &WindowSpec) -> Result<(), EvalError> {
        if let Region::Box { lo, hi } = self {
            if lo.len() != w.dim || hi.len() != w.dim {
                return Err(EvalError::BadRegion(format!(
                    "region dimension {} does not match window dimension {}",
                    lo.len(),
                    w.dim
                )));
            }
            for i in 0..w.dim {
                if !(lo[i] < hi[i]) {
                    return Err(EvalError::BadRegion(format!("axis {i} has empty extent")));
                }
                if lo[i] < w.lo[i] - 1e-12 || hi[i] > w.hi[i] + 1e-12 {
                    return Err(EvalError::BadRegion(format!(
                        "axis {i} extends outside the window"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Intersection with another region, `None` when empty.
    pub fn intersect(&self, other: &Region, w: &WindowSpec) -> Option<(Vec<f64>, Vec<f64>)> {
        let (alo, ahi) = self.bounds(w);
        let (blo, bhi) = other.bounds(w);
        let lo: Vec<f64> = alo.iter().zip(&blo).map(|(a, b)| a.max(*b)).collect();
        let hi: Vec<f64> = ahi.iter().zip(&bhi).map(|(a, b)| a.min(*b)).collect();
        if lo.iter().zip(&hi).all(|(l, h)| l < h) {
            Some((lo, hi))
        } else {
            None
        }
    }
}

/// Bounded test function weighting each point's score by its position.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFn {
    Constant { value: f64 },
    Coordinate { axis: usize },
    Affine { base: f64, gradient: Vec<f64> },
    /// Programmatic test function with a declared Lipschitz constant; not
    /// representable in on-disk configs.
    #[serde(skip)]
    Custom { lipschitz: f64, f: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync> },
}

impl std::fmt::Debug for TestFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TestFn::Constant { value } => write!(f, "Constant({value})"),
            TestFn::Coordinate { axis } => write!(f, "Coordinate({axis})"),
            TestFn::Affine { base, gradient } => write!(f, "Affine({base}, {gradient:?})"),
            TestFn::Custom { lipschitz, .. } => write!(f, "Custom(lipschitz = {lipschitz})"),
        }
    }
}

impl TestFn {
    pub fn one() -> TestFn {
        TestFn::Constant { value: 1.0 }
    }

    pub fn eval(&self, p: &Pos, dim: usize) -> f64 {
        match self {
            TestFn::Constant { value } => *value,
            TestFn::Coordinate { axis } => p[*axis],
            TestFn::Affine { base, gradient } => {
                let mut v = *base;
                for i in 0..dim.min(gradient.len()) {
                    v += gradient[i] * p[i];
                }
                v
            }
            TestFn::Custom { f, .. } => f(&p[..dim]),
        }
    }

    /// Declared Lipschitz constant (exact for the data variants).
    pub fn lipschitz(&self) -> f64 {
        match self {
            TestFn::Constant { .. } => 0.0,
            TestFn::Coordinate { .. } => 1.0,
            TestFn::Affine { gradient, .. } => {
                gradient.iter().map(|g| g * g).sum::<f64>().sqrt()
            }
            TestFn::Custom { lipschitz, .. } => *lipschitz,
        }
    }

    pub fn validate(&self, dim: usize) -> Result<(), EvalError> {
        match self {
            TestFn::Constant { value } if *value == 0.0 => Err(EvalError::ZeroTestFn),
            TestFn::Affine { base, gradient } => {
                if gradient.len() != dim {
                    return Err(EvalError::BadTestFn(format!(
                        "gradient has {} entries for dimension {dim}",
                        gradient.len()
                    )));
                }
                if *base == 0.0 && gradient.iter().all(|g| *g == 0.0) {
                    return Err(EvalError::ZeroTestFn);
                }
                Ok(())
            }
            TestFn::Coordinate { axis } if *axis >= dim => {
                Err(EvalError::BadTestFn(format!("axis {axis} out of range for dimension {dim}")))
            }
            _ => Ok(()),
        }
    }
}

/// One statistic: a score, a summation region, and a test function.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StatisticSpec {
    pub score: ScoreSpec,
    pub region: Region,
    pub testfn: TestFn,
}

impl StatisticSpec {
    /// Score summed over the whole window with unit weight.
    pub fn plain(score: ScoreSpec) -> StatisticSpec {
        StatisticSpec { score, region: Region::All, testfn: TestFn::one() }
    }

    pub fn validate(&self, w: &WindowSpec) -> Result<(), EvalError> {
        self.score.validate(w.dim)?;
        self.region.validate(w)?;
        if self.region.volume(w) <= 0.0 {
            return Err(EvalError::BadRegion("region has zero volume".into()));
        }
        self.testfn.validate(w.dim)
    }
}

/// Values of an m-vector of statistics on one configuration.
#[derive(Debug, Clone)]
pub struct StatVector {
    pub values: Vec<f64>,
    pub s: f64,
    pub seed: u64,
}

/// Replicated statistic values at one intensity: an R x m matrix plus the
/// per-row seeds that regenerate each replication.
#[derive(Debug, Clone)]
pub struct ReplicationBatch {
    pub s: f64,
    pub values: Vec<Vec<f64>>,
    pub seeds: Vec<u64>,
    pub wall_secs: f64,
}

impl ReplicationBatch {
    pub fn reps(&self) -> usize {
        self.values.len()
    }

    pub fn width(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn column_mean(&self, j: usize) -> f64 {
        self.values.iter().map(|row| row[j]).sum::<f64>() / self.reps() as f64
    }
}

fn eval_with_ctx(
    ctx: &EvalContext,
    cfg: &PointConfig,
    spec: &StatisticSpec,
) -> Result<f64, EvalError> {
    let dim = cfg.window.dim;
    let mut acc = 0.0;
    for (i, p) in cfg.points.iter().enumerate() {
        if !spec.region.contains(&cfg.window, &p.pos) {
            continue;
        }
        let f = spec.testfn.eval(&p.pos, dim);
        if f == 0.0 {
            continue;
        }
        acc += f * scores::score(&spec.score, ctx, i as u32)?;
    }
    Ok(acc)
}

/// Evaluate one statistic. Scores always see the whole configuration; only
/// the summation is restricted to the region.
pub fn eval_statistic(cfg: &PointConfig, spec: &StatisticSpec) -> Result<f64, EvalError> {
    spec.validate(&cfg.window)?;
    let ctx = EvalContext::new(cfg, &[&spec.score])?;
    eval_with_ctx(&ctx, cfg, spec)
}

/// Evaluate an m-vector of statistics in one pass over a shared spatial
/// index.
pub fn eval_vector(cfg: &PointConfig, specs: &[StatisticSpec]) -> Result<Vec<f64>, EvalError> {
    for spec in specs {
        spec.validate(&cfg.window)?;
    }
    let score_refs: Vec<&ScoreSpec> = specs.iter().map(|s| &s.score).collect();
    let ctx = EvalContext::new(cfg, &score_refs)?;
    specs.iter().map(|spec| eval_with_ctx(&ctx, cfg, spec)).collect()
}

fn insert_points(cfg: &PointConfig, extra: &[MarkedPoint]) -> Result<PointConfig, EvalError> {
    let mut out = cfg.clone();
    for z in extra {
        let pos = cfg.window.reduce(&z.pos);
        if !cfg.window.contains(&pos) {
            return Err(EvalError::InsertOutsideWindow);
        }
        if out.points.iter().any(|p| p.pos == pos) {
            return Err(EvalError::DuplicateInsert);
        }
        out.points.push(MarkedPoint { pos, mark: z.mark });
    }
    Ok(out)
}

/// First difference: the change of the statistic when `z` is inserted.
/// Implemented by full re-evaluation.
pub fn diff1(cfg: &PointConfig, spec: &StatisticSpec, z: MarkedPoint) -> Result<f64, EvalError> {
    let with = insert_points(cfg, &[z])?;
    Ok(eval_statistic(&with, spec)? - eval_statistic(cfg, spec)?)
}

/// Second difference: the four-evaluation alternating sum over inserting
/// `z1`, `z2`, both, or neither. The pair is evaluated in a canonical
/// coordinate order so the result is exactly symmetric in its arguments.
pub fn diff2(
    cfg: &PointConfig,
    spec: &StatisticSpec,
    z1: MarkedPoint,
    z2: MarkedPoint,
) -> Result<f64, EvalError> {
    let dim = cfg.window.dim;
    let swap = {
        let a = &z1.pos[..dim];
        let b = &z2.pos[..dim];
        a > b
    };
    let (a, b) = if swap { (z2, z1) } else { (z1, z2) };
    let h0 = eval_statistic(cfg, spec)?;
    let ha = eval_statistic(&insert_points(cfg, &[a])?, spec)?;
    let hb = eval_statistic(&insert_points(cfg, &[b])?, spec)?;
    let hab = eval_statistic(&insert_points(cfg, &[a, b])?, spec)?;
    Ok(hab - ha - hb + h0)
}

/// Estimated probability that the second difference at two points separated
/// by a given distance is nonzero.
#[derive(Debug, Clone, Serialize)]
pub struct ProbePoint {
    pub separation: f64,
    pub hits: u64,
    pub reps: u64,
    pub freq: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
}

fn wilson(hits: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.96f64;
    let n = n as f64;
    let p = hits as f64 / n;
    let denom = 1.0 + z * z / n;
    let center = (p + z * z / (2.0 * n)) / denom;
    let half = z * ((p * (1.0 - p) + z * z / (4.0 * n)) / n).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Debug, Clone)]
pub struct ProbeParams {
    pub reps: u64,
    /// |diff2| above this counts as a hit; absorbs floating-point residue of
    /// the four-term cancellation, far below any genuine score change.
    pub tol: f64,
    pub color_probs: Option<Vec<f64>>,
}

impl Default for ProbeParams {
    fn default() -> Self {
        ProbeParams { reps: 2000, tol: 1e-9, color_probs: None }
    }
}

/// Monte Carlo frequency of `diff2 != 0` at a fixed interior anchor, for each
/// separation (offsets along the first axis). One configuration per
/// replication is shared across all separations, so the estimates are
/// comparable point by point. The probe inserts exactly two points; wider
/// multi-point insertions are not probed.
pub fn stab_probe(
    spec: &StatisticSpec,
    window: &WindowSpec,
    s: f64,
    separations: &[f64],
    params: &ProbeParams,
    master_seed: u64,
) -> Result<Vec<ProbePoint>, EvalError> {
    window.validate()?;
    spec.validate(window)?;
    let dim = window.dim;
    let mut anchor = [0.0f64; process::MAX_DIM];
    for i in 0..dim {
        anchor[i] = 0.5 * (window.lo[i] + window.hi[i]);
    }
    for &sep in separations {
        let mut probe = anchor;
        probe[0] += sep;
        if window.boundary == process::Boundary::Hard && !window.contains(&probe) {
            return Err(EvalError::InsertOutsideWindow);
        }
    }
    let hit_rows: Vec<Result<Vec<bool>, EvalError>> = (0..params.reps)
        .into_par_iter()
        .map(|rep| {
            let seed = rng::derive_seed(master_seed, &[tag::PROBE, rep]);
            let cfg = if window.density.is_constant() {
                process::sample_homogeneous(window, s, seed)?
            } else {
                process::sample_inhomogeneous(window, s, seed)?
            };
            let cfg = match &params.color_probs {
                Some(probs) => process::attach_colors(&cfg, probs, rng::derive_seed(seed, &[tag::MARKS]))?,
                None => cfg,
            };
            let mark_for = |idx: u64| -> crate::process::Mark {
                match &params.color_probs {
                    Some(probs) => {
                        use rand::Rng;
                        let mut r = rng::stream(seed, &[tag::MARKS, idx]);
                        let u: f64 = r.gen();
                        let mut acc = 0.0;
                        let mut color = probs.len() as u16;
                        for (j, q) in probs.iter().enumerate() {
                            acc += q;
                            if u < acc {
                                color = j as u16 + 1;
                                break;
                            }
                        }
                        crate::process::Mark::Color(color)
                    }
                    None => crate::process::Mark::None,
                }
            };
            let za = MarkedPoint { pos: anchor, mark: mark_for(1) };
            let h0 = eval_statistic(&cfg, spec)?;
            let ha = eval_statistic(&insert_points(&cfg, &[za])?, spec)?;
            let mut hits = Vec::with_capacity(separations.len());
            for (si, &sep) in separations.iter().enumerate() {
                let mut pos = anchor;
                pos[0] += sep;
                let zb = MarkedPoint { pos, mark: mark_for(2 + si as u64) };
                let hb = eval_statistic(&insert_points(&cfg, &[zb])?, spec)?;
                let hab = eval_statistic(&insert_points(&cfg, &[za, zb])?, spec)?;
                let d2 = hab - ha - hb + h0;
                hits.push(d2.abs() > params.tol);
            }
            Ok(hits)
        })
        .collect();
    let mut counts = vec![0u64; separations.len()];
    for row in hit_rows {
        for (i, h) in row?.into_iter().enumerate() {
            counts[i] += u64::from(h);
        }
    }
    Ok(separations
        .iter()
        .zip(&counts)
        .map(|(&sep, &hits)| {
            let (lo, hi) = wilson(hits, params.reps);
            ProbePoint {
                separation: sep,
                hits,
                reps: params.reps,
                freq: hits as f64 / params.reps as f64,
                wilson_lo: lo,
                wilson_hi: hi,
            }
        })
        .collect())
}

/// Run `reps` independent replications at intensity `s`: sample, optionally
/// color, evaluate the statistic vector. Parallel over replications with
/// per-replication seeds, so the row order and every value are independent of
/// the worker count.
pub fn replicate(
    window: &WindowSpec,
    specs: &[StatisticSpec],
    s: f64,
    reps: usize,
    master_seed: u64,
    color_probs: Option<&[f64]>,
) -> Result<ReplicationBatch, EvalError> {
    window.validate()?;
    for spec in specs {
        spec.validate(window)?;
    }
    let start = Instant::now();
    let rows: Vec<Result<(u64, Vec<f64>), EvalError>> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let seed = rng::replication_seed(master_seed, s, rep as u64);
            let cfg = if window.density.is_constant() {
                process::sample_homogeneous(window, s, seed)?
            } else {
                process::sample_inhomogeneous(window, s, seed)?
            };
            let cfg = match color_probs {
                Some(probs) => {
                    process::attach_colors(&cfg, probs, rng::derive_seed(seed, &[tag::MARKS]))?
                }
                None => cfg,
            };
            Ok((seed, eval_vector(&cfg, specs)?))
        })
        .collect();
    let mut values = Vec::with_capacity(reps);
    let mut seeds = Vec::with_capacity(reps);
    for row in rows {
        let (seed, vals) = row?;
        seeds.push(seed);
        values.push(vals);
    }
    Ok(ReplicationBatch { s, values, seeds, wall_secs: start.elapsed().as_secs_f64() })
}
