//! Covariance machinery for statistic vectors.
//!
//! Four routes to a covariance matrix, kept deliberately independent so they
//! can cross-check each other:
//!
//! * [`empirical_sigma`] — sample covariance of the normalized statistic
//!   vector across replications, with jackknife standard errors;
//! * [`rgg_sigma_closed_form`] — the limiting covariance of the
//!   geometric-graph vertex/edge pair on the unit cube;
//! * [`rgg_cov_exact`] — the exact finite-intensity vertex/edge covariance,
//!   whose gap to the limit is the boundary-layer integral evaluated in
//!   closed form;
//! * [`asymptotic_sigma_mc`] — the generic two-term estimator of the limiting
//!   covariance for any scaled score family, by Monte Carlo over the
//!   stationary regime with Palm insertions at the origin and at an offset.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::process::{Boundary, DensitySpec, Mark, MarkedPoint, WindowSpec, MAX_DIM};
use crate::rng::{self, tag};
use crate::scores::{self, EvalContext, RadiusRule, ScoreSpec};
use crate::statistics::{self, EvalError, Region, ReplicationBatch, StatisticSpec, TestFn};

#[derive(Debug, Error)]
pub enum CovError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("need at least {needed} replications, got {got}")]
    TooFewReps { needed: usize, got: usize },
    #[error("score family `{0}` is not scaled; the asymptotic covariance formula does not apply")]
    NotScaled(String),
    #[error("interaction radius {r} exceeds the unit box at intensity {s}")]
    RadiusExceedsBox { r: f64, s: f64 },
    #[error("invalid specification: {0}")]
    BadSpec(String),
}

impl From<crate::process::ProcessError> for CovError {
    fn from(e: crate::process::ProcessError) -> CovError {
        CovError::Eval(EvalError::from(e))
    }
}

impl From<crate::scores::ScoreError> for CovError {
    fn from(e: crate::scores::ScoreError) -> CovError {
        CovError::Eval(EvalError::from(e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovKind {
    EmpiricalSigmaS,
    AsymptoticSigma,
    ClosedForm,
    ExactQuadrature,
}

/// An m x m covariance estimate with per-entry standard errors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CovEstimate {
    pub matrix: Vec<Vec<f64>>,
    pub stderr: Vec<Vec<f64>>,
    pub n_samples: usize,
    pub kind: CovKind,
}

impl CovEstimate {
    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix[i][j]
    }

    /// Largest entrywise absolute difference against another matrix.
    pub fn max_abs_diff(&self, other: &CovEstimate) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                m = m.max((self.matrix[i][j] - other.matrix[i][j]).abs());
            }
        }
        m
    }

    pub fn min_eigenvalue(&self) -> f64 {
        crate::linalg::sym_eigen(&self.matrix).0[0]
    }
}

/// Sum in a canonical value order, so the result depends only on the multiset
/// of summands, never on row order.
fn sorted_sum(mut vals: Vec<f64>) -> f64 {
    vals.sort_unstable_by(f64::total_cmp);
    vals.iter().sum()
}

/// Sample covariance of the `s^{-1/2}`-normalized statistic vector, i.e. the
/// finite-intensity covariance matrix of the replicated experiment, with
/// delete-one jackknife standard errors per entry. All reductions run in a
/// canonical order: permuting replications cannot change a single bit.
pub fn empirical_sigma(batch: &ReplicationBatch) -> Result<CovEstimate, CovError> {
    let r = batch.reps();
    if r < 2 {
        return Err(CovError::TooFewReps { needed: 2, got: r });
    }
    let m = batch.width();
    let s = batch.s;
    // Two-pass centering: raw values are large, fluctuations are not.
    let means: Vec<f64> = (0..m)
        .map(|j| sorted_sum(batch.values.iter().map(|row| row[j]).collect()) / r as f64)
        .collect();
    let centered: Vec<Vec<f64>> = batch
        .values
        .iter()
        .map(|row| row.iter().zip(&means).map(|(v, mu)| v - mu).collect())
        .collect();
    let mut matrix = vec![vec![0.0; m]; m];
    let mut stderr = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in i..m {
            let s_ij = sorted_sum(centered.iter().map(|c| c[i] * c[j]).collect());
            let cov = s_ij / (r as f64 - 1.0) / s;
            matrix[i][j] = cov;
            matrix[j][i] = cov;
            let se = if r >= 3 {
                // Delete-one covariances from the totals.
                let loo: Vec<f64> = centered
                    .iter()
                    .map(|c| {
                        (s_ij - c[i] * c[j] * r as f64 / (r as f64 - 1.0)) / (r as f64 - 2.0) / s
                    })
                    .collect();
                let mean_loo = sorted_sum(loo.clone()) / r as f64;
                let ss =
                    sorted_sum(loo.iter().map(|t| (t - mean_loo) * (t - mean_loo)).collect());
                ((r as f64 - 1.0) / r as f64 * ss).sqrt()
            } else {
                f64::INFINITY
            };
            stderr[i][j] = se;
            stderr[j][i] = se;
        }
    }
    Ok(CovEstimate { matrix, stderr, n_samples: r, kind: CovKind::EmpiricalSigmaS })
}

/// Volume of the d-dimensional unit ball.
pub fn unit_ball_volume(dim: usize) -> f64 {
    match dim {
        0 => 1.0,
        1 => 2.0,
        d => unit_ball_volume(d - 2) * 2.0 * std::f64::consts::PI / d as f64,
    }
}

/// Gamma(twice/2) for positive half-integers.
fn gamma_half(twice: u32) -> f64 {
    match twice {
        1 => std::f64::consts::PI.sqrt(),
        2 => 1.0,
        n => (n as f64 - 2.0) / 2.0 * gamma_half(n - 2),
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Limiting covariance of the vertex/edge count pair of the geometric graph
/// with scaled radius factor `rho` on the unit cube:
/// `[[1, K], [K, K^2 + K/2]]` with `K = kappa_d rho^d`.
pub fn rgg_sigma_closed_form(dim: usize, rho: f64) -> CovEstimate {
    let kd = unit_ball_volume(dim) * rho.powi(dim as i32);
    let matrix = vec![vec![1.0, kd], vec![kd, kd * kd + 0.5 * kd]];
    CovEstimate { matrix, stderr: vec![vec![0.0; 2]; 2], n_samples: 0, kind: CovKind::ClosedForm }
}

/// Exact finite-intensity vertex/edge covariance of the geometric graph on
/// the unit cube and its gap to the limit.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RggExactCov {
    /// `Cov(V_s, E_s) / s`, exactly.
    pub cov_over_s: f64,
    /// Limit entry `kappa_d rho^d`.
    pub sigma12: f64,
    /// `sigma12 - cov_over_s`, the boundary-layer mass; positive.
    pub gap: f64,
    /// Bound on the evaluation error: the integral is a polynomial in the
    /// interaction radius with unit-ball moment coefficients, so only
    /// floating-point rounding enters.
    pub error_bound: f64,
}

/// The pair covariance reduces to an integral of the box self-overlap volume
/// over the interaction ball,
/// `Cov/s = s * int_{B(0,r)} prod_i (1 - |z_i|) dz` with `r = rho s^{-1/d}`,
/// and expanding the product leaves unit-ball moments
/// `int_{B(0,1)} prod_{i in S} |u_i| du = pi^{(d-k)/2} / Gamma((d+k)/2 + 1)`
/// for `|S| = k`. Requires `r <= 1` so the overlap factors stay nonnegative.
pub fn rgg_cov_exact(dim: usize, rho: f64, s: f64) -> Result<RggExactCov, CovError> {
    if dim == 0 || dim > MAX_DIM {
        return Err(CovError::BadSpec(format!("dimension {dim} unsupported")));
    }
    let r = rho * s.powf(-1.0 / dim as f64);
    if !(r > 0.0) || r > 1.0 {
        return Err(CovError::RadiusExceedsBox { r, s });
    }
    let sigma12 = unit_ball_volume(dim) * rho.powi(dim as i32);
    let mut cov = 0.0f64;
    let mut mag = 0.0f64;
    for k in 0..=dim {
        let moment =
            std::f64::consts::PI.powf((dim - k) as f64 / 2.0) / gamma_half((dim + k) as u32 + 2);
        let term = binomial(dim, k) * (-r).powi(k as i32) * moment;
        cov += term;
        mag += term.abs();
    }
    let cov_over_s = s * r.powi(dim as i32) * cov;
    let gap = sigma12 - cov_over_s;
    let error_bound = 16.0 * f64::EPSILON * s * r.powi(dim as i32) * mag;
    Ok(RggExactCov { cov_over_s, sigma12, gap, error_bound })
}

/// Tuning for the asymptotic covariance estimator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct McParams {
    /// Spatial strata per axis over each pair's region intersection.
    pub x_strata_per_axis: usize,
    /// Points sampled per stratum.
    pub x_samples_per_stratum: usize,
    /// Stationary process realizations per sampled point.
    pub reals_per_x: usize,
    /// Radial shells for the offset integral.
    pub y_shells: usize,
    /// Offsets per shell per realization.
    pub y_per_shell: usize,
    /// Stationary window half-width; default 6 interaction ranges.
    pub w_override: Option<f64>,
    /// Offset truncation; defaults to the window half-width.
    pub y_max_override: Option<f64>,
    pub seed: u64,
}

impl Default for McParams {
    fn default() -> Self {
        McParams {
            x_strata_per_axis: 2,
            x_samples_per_stratum: 8,
            reals_per_x: 96,
            y_shells: 12,
            y_per_shell: 4,
            w_override: None,
            y_max_override: None,
            seed: 0x5161,
        }
    }
}

/// Asymptotic covariance estimate plus the truncation bookkeeping that went
/// into it.
#[derive(Debug, Clone, Serialize)]
pub struct McSigma {
    pub estimate: CovEstimate,
    pub w: f64,
    pub y_max: f64,
    /// Allowance for mass beyond the truncation: exactly zero for families
    /// with a deterministic interaction radius, a measured-quantile tail
    /// allowance otherwise.
    pub truncation_budget: f64,
}

/// Stationary interaction reach of the unscaled parent at unit intensity;
/// `None` for the kNN families (random radius).
fn parent_reach(parent: &ScoreSpec, dim: usize) -> Option<f64> {
    parent.deterministic_reach(1.0, dim)
}

/// 99.9%-style interaction quantile for random-radius families, measured with
/// the second-difference probe on a stationary patch at density `u`: the
/// smallest probed separation with no observed interaction.
fn measured_quantile(
    parent: &StatisticSpec,
    u: f64,
    dim: usize,
    color_probs: Option<&[f64]>,
    seed: u64,
) -> Result<f64, CovError> {
    let spacing = (1.0 / (u * unit_ball_volume(dim))).powf(1.0 / dim as f64);
    let side = 14.0 * spacing;
    let w = WindowSpec::boxed(
        vec![-side / 2.0; dim],
        vec![side / 2.0; dim],
        Boundary::Torus,
        DensitySpec::constant(u),
    );
    let seps: Vec<f64> = (1..=5).map(|i| i as f64 * spacing).collect();
    let params = statistics::ProbeParams {
        reps: 300,
        color_probs: color_probs.map(<[f64]>::to_vec),
        ..Default::default()
    };
    let pts = statistics::stab_probe(parent, &w, 1.0, &seps, &params, seed)?;
    for p in &pts {
        if p.hits == 0 {
            return Ok(p.separation);
        }
    }
    Ok(2.0 * seps[seps.len() - 1])
}

struct PairPlan {
    i: usize,
    j: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
    /// Skip offsets beyond this when both parents have deterministic reach:
    /// the two factors depend on disjoint balls of the same Poisson process,
    /// so the integrand is exactly zero there.
    hard_cut: Option<f64>,
}

/// Estimate the limiting covariance matrix of the normalized statistic vector
/// for scaled score families.
///
/// Entry (i, j) is the sum of two integrals over the region intersection: the
/// single-point term `E[xi_i xi_j]` at a point adjoined to the stationary
/// process with the frozen local density, and the offset integral of the
/// two-point product minus the product of means. The two-point product
/// evaluates both scores on one shared realization carrying both insertions;
/// the product of means reuses that realization for the first factor (common
/// random numbers) and an independent realization for the second.
pub fn asymptotic_sigma_mc(
    specs: &[StatisticSpec],
    window: &WindowSpec,
    color_probs: Option<&[f64]>,
    params: &McParams,
) -> Result<McSigma, CovError> {
    window.validate().map_err(EvalError::from)?;
    let dim = window.dim;
    let m = specs.len();
    let mut parents = Vec::with_capacity(m);
    for spec in specs {
        spec.validate(window)?;
        let parent =
            spec.score.unscaled_parent().ok_or_else(|| CovError::NotScaled(spec.score.label()))?;
        parents.push(parent);
    }
    // Interaction ranges drive the stationary window size.
    let mut max_reach = 0.0f64;
    let mut any_random = false;
    for parent in &parents {
        match parent_reach(parent, dim) {
            Some(r) => max_reach = max_reach.max(r),
            None => any_random = true,
        }
    }
    if any_random {
        let u_ref = window.density.sup_bound().max(1e-9);
        for (idx, parent) in parents.iter().enumerate() {
            if parent_reach(parent, dim).is_none() {
                let probe_spec = StatisticSpec {
                    score: parent.clone(),
                    region: Region::All,
                    testfn: TestFn::one(),
                };
                let q = measured_quantile(
                    &probe_spec,
                    u_ref,
                    dim,
                    color_probs,
                    rng::derive_seed(params.seed, &[tag::PROBE, idx as u64]),
                )?;
                max_reach = max_reach.max(q);
            }
        }
    }
    if max_reach <= 0.0 {
        max_reach = 1.0;
    }
    let w_half = params.w_override.unwrap_or(6.0 * max_reach);
    let y_max = params.y_max_override.unwrap_or(w_half);

    // Pair plans: region intersections and deterministic cuts.
    let mut plans = Vec::new();
    for i in 0..m {
        for j in i..m {
            if let Some((lo, hi)) = specs[i].region.intersect(&specs[j].region, window) {
                let hard_cut =
                    match (parent_reach(&parents[i], dim), parent_reach(&parents[j], dim)) {
                        (Some(a), Some(b)) => Some(a + b),
                        _ => None,
                    };
                plans.push(PairPlan { i, j, lo, hi, hard_cut });
            }
        }
    }

    let shells: Vec<(f64, f64)> = (0..params.y_shells)
        .map(|k| {
            let a = y_max * k as f64 / params.y_shells as f64;
            let b = y_max * (k + 1) as f64 / params.y_shells as f64;
            (a, b)
        })
        .collect();
    let kd = unit_ball_volume(dim);

    let strata_total = params.x_strata_per_axis.pow(dim as u32);
    let mut matrix = vec![vec![0.0; m]; m];
    let mut stderr = vec![vec![0.0; m]; m];
    let mut budget = 0.0f64;

    for plan in &plans {
        let cell_vol: f64 = (0..dim)
            .map(|a| (plan.hi[a] - plan.lo[a]) / params.x_strata_per_axis as f64)
            .product();
        // One task per (stratum, sample); deterministic reduction by index.
        let tasks: Vec<(usize, usize)> = (0..strata_total)
            .flat_map(|c| (0..params.x_samples_per_stratum).map(move |t| (c, t)))
            .collect();
        let pair_tag = (plan.i * m + plan.j) as u64;
        let values: Vec<Result<f64, CovError>> = tasks
            .par_iter()
            .map(|&(cell, t)| {
                let seed =
                    rng::derive_seed(params.seed, &[tag::PALM, pair_tag, cell as u64, t as u64]);
                sample_pair_integrand(
                    specs, &parents, plan, window, color_probs, params, dim, w_half, &shells, kd,
                    cell, seed,
                )
            })
            .collect();
        let mut per_stratum: Vec<Vec<f64>> = vec![Vec::new(); strata_total];
        for (k, v) in values.into_iter().enumerate() {
            per_stratum[tasks[k].0].push(v?);
        }
        let mut total = 0.0;
        let mut var = 0.0;
        for vals in &per_stratum {
            let n = vals.len() as f64;
            let mean = vals.iter().sum::<f64>() / n;
            let ss =
                vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0).max(1.0);
            total += cell_vol * mean;
            var += cell_vol * cell_vol * ss / n;
        }
        matrix[plan.i][plan.j] = total;
        matrix[plan.j][plan.i] = total;
        let se = var.sqrt();
        stderr[plan.i][plan.j] = se;
        stderr[plan.j][plan.i] = se;
        if plan.hard_cut.is_none() {
            budget = budget.max(1e-3 * total.abs());
        }
    }

    Ok(McSigma {
        estimate: CovEstimate {
            matrix,
            stderr,
            n_samples: strata_total * params.x_samples_per_stratum,
            kind: CovKind::AsymptoticSigma,
        },
        w: w_half,
        y_max,
        truncation_budget: budget,
    })
}

#[allow(clippy::too_many_arguments)]
fn sample_pair_integrand(
    specs: &[StatisticSpec],
    parents: &[ScoreSpec],
    plan: &PairPlan,
    window: &WindowSpec,
    color_probs: Option<&[f64]>,
    params: &McParams,
    dim: usize,
    w_half: f64,
    shells: &[(f64, f64)],
    kd: f64,
    cell: usize,
    seed: u64,
) -> Result<f64, CovError> {
    use rand::Rng;
    let mut xrng = rng::stream(seed, &[tag::PALM]);
    // Stratified x inside its cell.
    let mut x = [0.0f64; MAX_DIM];
    let mut c = cell;
    for a in 0..dim {
        let na = params.x_strata_per_axis;
        let ca = c % na;
        c /= na;
        let width = (plan.hi[a] - plan.lo[a]) / na as f64;
        x[a] = plan.lo[a] + (ca as f64 + xrng.gen::<f64>()) * width;
    }
    let u = window.density_at(&x);
    if u <= 0.0 {
        return Ok(0.0);
    }
    let fw = specs[plan.i].testfn.eval(&x, dim) * specs[plan.j].testfn.eval(&x, dim);
    if fw == 0.0 {
        return Ok(0.0);
    }
    let sim_window = WindowSpec::boxed(
        vec![-w_half; dim],
        vec![w_half; dim],
        Boundary::Hard,
        DensitySpec::constant(u),
    );
    let pi = &parents[plan.i];
    let pj = &parents[plan.j];
    let score_refs = [pi, pj];
    let draw_mark = |r: &mut rand_chacha::ChaCha8Rng| -> Mark {
        match color_probs {
            Some(probs) => {
                let v: f64 = r.gen();
                let mut acc = 0.0;
                let mut color = probs.len() as u16;
                for (jj, q) in probs.iter().enumerate() {
                    acc += q;
                    if v < acc {
                        color = jj as u16 + 1;
                        break;
                    }
                }
                Mark::Color(color)
            }
            None => Mark::None,
        }
    };

    let mut t1_sum = 0.0;
    let mut t2_sum = 0.0;
    for real in 0..params.reals_per_x {
        let rseed = rng::derive_seed(seed, &[real as u64]);
        let base = crate::process::sample_homogeneous(&sim_window, 1.0, rseed)?;
        let base = match color_probs {
            Some(probs) => {
                crate::process::attach_colors(&base, probs, rng::derive_seed(rseed, &[tag::MARKS]))?
            }
            None => base,
        };
        let alt = crate::process::sample_homogeneous(
            &sim_window,
            1.0,
            rng::derive_seed(rseed, &[tag::COUPLING]),
        )?;
        let alt = match color_probs {
            Some(probs) => crate::process::attach_colors(
                &alt,
                probs,
                rng::derive_seed(rseed, &[tag::MARKS, 2]),
            )?,
            None => alt,
        };
        let mut mark_rng = rng::stream(rseed, &[tag::MARKS, 3]);
        let origin_mark = draw_mark(&mut mark_rng);
        let origin = MarkedPoint { pos: [0.0; MAX_DIM], mark: origin_mark };

        // Single-insertion term: both parent scores at the origin point of
        // one realization.
        let cfg0 = base.with_points(&[origin]);
        let anchor0 = (cfg0.len() - 1) as u32;
        let ctx0 = EvalContext::new(&cfg0, &score_refs)?;
        let xi_i0 = scores::score(pi, &ctx0, anchor0)?;
        let xi_j0 = scores::score(pj, &ctx0, anchor0)?;
        t1_sum += xi_i0 * xi_j0;

        let mut shell_rng = rng::stream(rseed, &[tag::PALM, 7]);
        for &(a, b) in shells {
            if let Some(cut) = plan.hard_cut {
                if a >= cut {
                    continue;
                }
            }
            let shell_vol = kd * (b.powi(dim as i32) - a.powi(dim as i32));
            let mut acc = 0.0;
            for _ in 0..params.y_per_shell {
                let rho = (a.powi(dim as i32)
                    + shell_rng.gen::<f64>() * (b.powi(dim as i32) - a.powi(dim as i32)))
                .powf(1.0 / dim as f64);
                let mut dir = [0.0f64; MAX_DIM];
                let mut norm = 0.0;
                while norm < 1e-12 {
                    for da in dir.iter_mut().take(dim) {
                        *da = crate::rng::normal(&mut shell_rng);
                    }
                    norm = dir[..dim].iter().map(|v| v * v).sum::<f64>().sqrt();
                }
                let mut y = [0.0f64; MAX_DIM];
                for aix in 0..dim {
                    y[aix] = dir[aix] / norm * rho;
                }
                let y_mark = draw_mark(&mut mark_rng);
                let ypt = MarkedPoint { pos: y, mark: y_mark };
                if !sim_window.contains(&y) {
                    continue;
                }
                let cfg_ab = base.with_points(&[origin, ypt]);
                let na = (cfg_ab.len() - 2) as u32;
                let nb = (cfg_ab.len() - 1) as u32;
                let ctx_ab = EvalContext::new(&cfg_ab, &score_refs)?;
                let a_val = scores::score(pi, &ctx_ab, na)? * scores::score(pj, &ctx_ab, nb)?;
                let cfg_b = alt.with_points(&[ypt]);
                let ctx_b = EvalContext::new(&cfg_b, &score_refs)?;
                let b_val = xi_i0 * scores::score(pj, &ctx_b, (cfg_b.len() - 1) as u32)?;
                acc += a_val - b_val;
            }
            t2_sum += shell_vol * acc / params.y_per_shell as f64;
        }
    }
    let t1 = t1_sum / params.reals_per_x as f64;
    let t2 = t2_sum / params.reals_per_x as f64;
    Ok(fw * (u * t1 + u * u * t2))
}

/// One covariance-gap evaluation at intensity `s`.
#[derive(Debug, Clone, Serialize)]
pub struct GapEntry {
    pub i: usize,
    pub j: usize,
    pub gap: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapPoint {
    pub s: f64,
    pub entries: Vec<GapEntry>,
}

/// Gap between the finite-intensity covariance and the limiting covariance
/// along an intensity grid.
#[derive(Debug, Clone, Serialize)]
pub struct GapCurve {
    pub points: Vec<GapPoint>,
    pub exact: bool,
}

impl GapCurve {
    /// `(s, gap, stderr)` rows for one entry, for rate fitting.
    pub fn entry_curve(&self, i: usize, j: usize) -> Vec<(f64, f64, f64)> {
        self.points
            .iter()
            .filter_map(|p| {
                p.entries.iter().find(|e| (e.i, e.j) == (i, j)).map(|e| (p.s, e.gap, e.stderr))
            })
            .collect()
    }
}

pub enum GapMode {
    /// Deterministic evaluation for the canonical vertex/edge pair.
    ExactRgg,
    /// Replicated empirical covariance against a reference limit matrix.
    Mc { reference: CovEstimate, reps: usize },
}

/// Require the canonical vertex/edge pair on the unit cube and return its
/// scaled-radius factor.
fn rgg_pair_rho(specs: &[StatisticSpec], window: &WindowSpec) -> Result<f64, CovError> {
    let unit_cube = window.boundary == Boundary::Hard
        && matches!(window.density, DensitySpec::Constant { value } if value == 1.0)
        && (0..window.dim).all(|i| window.lo[i] == 0.0 && window.hi[i] == 1.0);
    if !unit_cube {
        return Err(CovError::BadSpec(
            "exact gap evaluation needs the unit cube with unit density".into(),
        ));
    }
    if specs.len() != 2 {
        return Err(CovError::BadSpec("exact gap evaluation needs exactly two statistics".into()));
    }
    let plain = |t: &TestFn| matches!(t, TestFn::Constant { value } if *value == 1.0);
    let all = |r: &Region| matches!(r, Region::All);
    if !(all(&specs[0].region) && all(&specs[1].region))
        || !(plain(&specs[0].testfn) && plain(&specs[1].testfn))
    {
        return Err(CovError::BadSpec(
            "exact gap evaluation needs full-window statistics with unit weight".into(),
        ));
    }
    if specs[0].score != ScoreSpec::Unit {
        return Err(CovError::BadSpec("first statistic must be the vertex count".into()));
    }
    match &specs[1].score {
        ScoreSpec::RipsVolume { k: 1, r: RadiusRule::Scaled { rho }, alpha } if *alpha == 0.0 => {
            Ok(*rho)
        }
        other => Err(CovError::BadSpec(format!(
            "second statistic must be the scaled edge count, got {}",
            other.label()
        ))),
    }
}

/// Covariance-gap curve over an intensity grid.
pub fn gap_curve(
    specs: &[StatisticSpec],
    window: &WindowSpec,
    s_grid: &[f64],
    mode: &GapMode,
    master_seed: u64,
    color_probs: Option<&[f64]>,
) -> Result<GapCurve, CovError> {
    if s_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CovError::BadSpec("intensity grid must be strictly increasing".into()));
    }
    match mode {
        GapMode::ExactRgg => {
            let rho = rgg_pair_rho(specs, window)?;
            let dim = window.dim;
            let mut points = Vec::with_capacity(s_grid.len());
            for &s in s_grid {
                let exact = rgg_cov_exact(dim, rho, s)?;
                points.push(GapPoint {
                    s,
                    entries: vec![
                        // Vertex count is Poisson at every s: no gap.
                        GapEntry { i: 0, j: 0, gap: 0.0, stderr: 0.0 },
                        GapEntry { i: 0, j: 1, gap: exact.gap, stderr: exact.error_bound },
                    ],
                });
            }
            Ok(GapCurve { points, exact: true })
        }
        GapMode::Mc { reference, reps } => {
            let mut points = Vec::with_capacity(s_grid.len());
            for &s in s_grid {
                let batch = statistics::replicate(
                    window,
                    specs,
                    s,
                    *reps,
                    rng::derive_seed(master_seed, &[s.to_bits()]),
                    color_probs,
                )?;
                let emp = empirical_sigma(&batch)?;
                let mut entries = Vec::new();
                for i in 0..specs.len() {
                    for j in i..specs.len() {
                        entries.push(GapEntry {
                            i,
                            j,
                            gap: (reference.matrix[i][j] - emp.matrix[i][j]).abs(),
                            stderr: emp.stderr[i][j],
                        });
                    }
                }
                points.push(GapPoint { s, entries });
            }
            Ok(GapCurve { points, exact: false })
        }
    }
}
