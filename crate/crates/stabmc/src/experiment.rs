//! Declarative experiment runner.
//!
//! An experiment is a TOML document: a window, a list of statistics, an
//! intensity grid, a replication count, a master seed, and a set of analysis
//! flags. Running it writes plain CSV/JSON artifacts plus a manifest into an
//! output directory. Replication is parallel with per-task seeds, and every
//! artifact byte is independent of the worker count, so reruns diff clean.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::covariance::{
    self, empirical_sigma, CovError, CovEstimate, GapCurve, GapMode, McParams,
};
use crate::gaussian::{self, GaussError, GaussianSpec};
use crate::process::WindowSpec;
use crate::rates::{self, RateError, RateFit};
use crate::rng::{self, tag};
use crate::statistics::{self, EvalError, ProbeParams, StatisticSpec};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("configuration invalid:\n{}", .0.join("\n"))]
    Validation(Vec<String>),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("config parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Cov(#[from] CovError),
    #[error(transparent)]
    Gauss(#[from] GaussError),
    #[error(transparent)]
    Rate(#[from] RateError),
    #[error("serialization: {0}")]
    Serde(String),
    #[error("unknown curve id `{0}` (expected gap_i_j or dk)")]
    BadCurve(String),
    #[error("bundle mismatch: manifest hash {stored} but recomputed {actual}")]
    HashMismatch { stored: String, actual: String },
    #[error("bundle is missing artifact {0}")]
    MissingArtifact(String),
}

/// Reference matrix used by gap and distance analyses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    /// Closed-form vertex/edge limit on the unit cube.
    ClosedFormRgg,
    /// Output of the asymptotic covariance estimator (requires that analysis).
    AsymptoticMc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub struct GapCfg {
    pub mode: GapModeCfg,
    #[serde(default)]
    pub reference: Option<Reference>,
    #[serde(default = "default_gap_reps")]
    pub reps: usize,
}

fn default_gap_reps() -> usize {
    2000
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapModeCfg {
    ExactRgg,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DkVersus {
    /// Whiten by the per-intensity empirical covariance.
    SigmaS,
    /// Whiten by the limiting covariance (reference required).
    SigmaLimit,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DkCfg {
    pub versus: DkVersus,
    #[serde(default)]
    pub reference: Option<Reference>,
    #[serde(default = "default_dk_grid")]
    pub grid: usize,
    /// Gaussian comparison sample size as a multiple of the replication count.
    #[serde(default = "default_oversample")]
    pub oversample: usize,
}

fn default_dk_grid() -> usize {
    64
}

fn default_oversample() -> usize {
    10
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeCfg {
    /// Index into `statistics`.
    pub statistic: usize,
    pub separations: Vec<f64>,
    #[serde(default = "default_probe_reps")]
    pub reps: u64,
    /// Probe at this single intensity (defaults to the last grid entry).
    #[serde(default)]
    pub s: Option<f64>,
}

fn default_probe_reps() -> u64 {
    2000
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RateCfg {
    /// Curve ids: `gap_i_j` (gap-curve entry) or `dk`.
    pub curves: Vec<String>,
    pub targets: Vec<f64>,
    #[serde(default = "default_rate_tol")]
    pub tolerance: f64,
}

fn default_rate_tol() -> f64 {
    0.1
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Analyses {
    #[serde(default)]
    pub empirical_sigma: bool,
    #[serde(default)]
    pub asymptotic_sigma: Option<McParams>,
    #[serde(default)]
    pub gap_curve: Option<GapCfg>,
    #[serde(default)]
    pub dk: Option<DkCfg>,
    #[serde(default)]
    pub stab_probe: Option<ProbeCfg>,
    #[serde(default)]
    pub rate_fit: Option<RateCfg>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    pub s_grid: Vec<f64>,
    pub reps_per_s: usize,
    /// 0 means the default worker pool.
    #[serde(default)]
    pub parallelism: usize,
    #[serde(default = "default_outdir")]
    pub output_dir: String,
    pub window: WindowSpec,
    pub statistics: Vec<StatisticSpec>,
    /// Categorical mark distribution attached after sampling, when present.
    #[serde(default)]
    pub color_probs: Option<Vec<f64>>,
    #[serde(default)]
    pub analyses: Analyses,
}

fn default_outdir() -> String {
    "results".into()
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<ExperimentConfig, ExperimentError> {
        toml::from_str(text).map_err(|e| ExperimentError::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String, ExperimentError> {
        toml::to_string(self).map_err(|e| ExperimentError::Serde(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig, ExperimentError> {
        Self::from_toml(&fs::read_to_string(path)?)
    }

    /// Itemized validation; empty means runnable.
    pub fn validate(&self) -> Vec<String> {
        let mut errs = Vec::new();
        if self.s_grid.is_empty() {
            errs.push("s_grid must not be empty".into());
        }
        for &s in &self.s_grid {
            if !(s.is_finite() && s > 0.0) {
                errs.push(format!("intensity {s} must be positive and finite"));
            }
        }
        if let Err(e) = self.window.validate() {
            errs.push(format!("window: {e}"));
        }
        if self.statistics.is_empty() {
            errs.push("at least one statistic is required".into());
        }
        for (i, spec) in self.statistics.iter().enumerate() {
            if let Err(e) = spec.validate(&self.window) {
                errs.push(format!("statistics[{i}]: {e}"));
            }
        }
        if let Some(probs) = &self.color_probs {
            let sum: f64 = probs.iter().sum();
            if probs.iter().any(|p| *p < 0.0) || (sum - 1.0).abs() > 1e-12 {
                errs.push(format!(
                    "color_probs must be a probability vector (sum = {sum})"
                ));
            }
        }
        let needs_colors = self
            .statistics
            .iter()
            .any(|s| matches!(s.score, crate::scores::ScoreSpec::ColoredNn { .. }));
        if needs_colors && self.color_probs.is_none() {
            errs.push("colored statistics require color_probs".into());
        }
        let a = &self.analyses;
        let cov_requested = a.empirical_sigma
            || a.gap_curve.is_some()
            || a.dk.is_some();
        if cov_requested && self.reps_per_s < 2 {
            errs.push("covariance analyses need reps_per_s >= 2".into());
        }
        let needs_scaled = a.asymptotic_sigma.is_some()
            || matches!(&a.gap_curve, Some(g) if g.mode == GapModeCfg::Mc)
            || matches!(&a.dk, Some(d) if d.versus == DkVersus::SigmaLimit);
        if needs_scaled {
            for (i, spec) in self.statistics.iter().enumerate() {
                if !spec.score.is_scaled_family() {
                    errs.push(format!(
                        "statistics[{i}] ({}) is not a scaled family but a limiting-covariance analysis was requested",
                        spec.score.label()
                    ));
                }
            }
        }
        if let Some(g) = &a.gap_curve {
            if g.mode == GapModeCfg::Mc {
                match g.reference {
                    None => errs.push("gap_curve in mc mode needs a reference".into()),
                    Some(Reference::AsymptoticMc) if a.asymptotic_sigma.is_none() => errs.push(
                        "gap_curve reference asymptotic_mc requires the asymptotic_sigma analysis"
                            .into(),
                    ),
                    _ => {}
                }
            }
        }
        if let Some(d) = &a.dk {
            if d.versus == DkVersus::SigmaLimit {
                match d.reference {
                    None => errs.push("dk versus sigma_limit needs a reference".into()),
                    Some(Reference::AsymptoticMc) if a.asymptotic_sigma.is_none() => errs.push(
                        "dk reference asymptotic_mc requires the asymptotic_sigma analysis".into(),
                    ),
                    _ => {}
                }
            }
            if self.statistics.len() > 3 {
                errs.push("grid distance supports at most 3 statistics".into());
            }
        }
        if let Some(p) = &a.stab_probe {
            if p.statistic >= self.statistics.len() {
                errs.push(format!("stab_probe.statistic {} out of range", p.statistic));
            }
            if p.separations.is_empty() {
                errs.push("stab_probe.separations must not be empty".into());
            }
        }
        if let Some(rf) = &a.rate_fit {
            if rf.curves.len() != rf.targets.len() {
                errs.push("rate_fit.curves and rate_fit.targets must have equal length".into());
            }
            for c in &rf.curves {
                if parse_curve_id(c).is_none() {
                    errs.push(format!("rate_fit: unknown curve id `{c}`"));
                }
            }
            if a.rate_fit.is_some() && a.gap_curve.is_none() && a.dk.is_none() {
                errs.push("rate_fit needs a gap_curve or dk analysis to fit".into());
            }
        }
        errs
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum CurveId {
    Gap(usize, usize),
    Dk,
}

fn parse_curve_id(id: &str) -> Option<CurveId> {
    if id == "dk" {
        return Some(CurveId::Dk);
    }
    let rest = id.strip_prefix("gap_")?;
    let (i, j) = rest.split_once('_')?;
    Some(CurveId::Gap(i.parse().ok()?, j.parse().ok()?))
}

/// Manifest written next to every result bundle. No timing data: every byte
/// of the bundle is a pure function of the configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub complete: bool,
    #[serde(default)]
    pub error: Option<String>,
    pub artifacts: Vec<String>,
    /// Per-intensity batch files, in grid order.
    pub batches: Vec<String>,
    #[serde(default)]
    pub truncation_budget: Option<f64>,
}

fn fnv64(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    h
}

fn config_hash(config: &ExperimentConfig) -> Result<String, ExperimentError> {
    let body = serde_json::to_string(config).map_err(|e| ExperimentError::Serde(e.to_string()))?;
    let keyed = format!("{}|{}", env!("CARGO_PKG_VERSION"), body);
    Ok(format!("{:016x}", fnv64(keyed.as_bytes())))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), ExperimentError> {
    fs::write(dir.join(name), contents)?;
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String, ExperimentError> {
    serde_json::to_string_pretty(value).map_err(|e| ExperimentError::Serde(e.to_string()))
}

/// Everything a run produced, with the on-disk bundle already written.
pub struct RunSummary {
    pub dir: PathBuf,
    pub manifest: Manifest,
    pub batches: Vec<statistics::ReplicationBatch>,
    pub sigma_s: Vec<CovEstimate>,
    pub sigma_limit: Option<CovEstimate>,
    pub gap: Option<GapCurve>,
    pub dk: Vec<(f64, gaussian::DkEstimate)>,
    pub rate_rows: Vec<rates::RateReportRow>,
}

/// Run an experiment and persist the bundle. A failure mid-run still writes
/// the manifest, flagged incomplete with the error message.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunSummary, ExperimentError> {
    let errs = config.validate();
    if !errs.is_empty() {
        return Err(ExperimentError::Validation(errs));
    }
    let dir = PathBuf::from(&config.output_dir);
    fs::create_dir_all(&dir)?;
    let hash = config_hash(config)?;

    let result = if config.parallelism > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.parallelism)
            .build()
            .map_err(|e| ExperimentError::Serde(e.to_string()))?;
        pool.install(|| run_stages(config, &dir))
    } else {
        run_stages(config, &dir)
    };

    match result {
        Ok(mut summary) => {
            let manifest = Manifest {
                version: env!("CARGO_PKG_VERSION").into(),
                config: config.clone(),
                config_hash: hash,
                complete: true,
                error: None,
                artifacts: summary.manifest.artifacts.clone(),
                batches: summary.manifest.batches.clone(),
                truncation_budget: summary.manifest.truncation_budget,
            };
            write_file(&dir, "manifest.json", &to_json(&manifest)?)?;
            summary.manifest = manifest;
            Ok(summary)
        }
        Err(e) => {
            let manifest = Manifest {
                version: env!("CARGO_PKG_VERSION").into(),
                config: config.clone(),
                config_hash: hash,
                complete: false,
                error: Some(e.to_string()),
                artifacts: Vec::new(),
                batches: Vec::new(),
                truncation_budget: None,
            };
            let _ = write_file(&dir, "manifest.json", &to_json(&manifest)?);
            Err(e)
        }
    }
}

fn fmt_s(s: f64) -> String {
    if s.fract() == 0.0 && s.abs() < 1e15 {
        format!("{}", s as i64)
    } else {
        format!("{s}")
    }
}

fn run_stages(config: &ExperimentConfig, dir: &Path) -> Result<RunSummary, ExperimentError> {
    let mut artifacts = Vec::new();
    let mut batch_files = Vec::new();
    let specs = &config.statistics;
    let m = specs.len();
    let color_probs = config.color_probs.as_deref();

    // Replication batches, one CSV per intensity.
    let mut batches = Vec::with_capacity(config.s_grid.len());
    for (idx, &s) in config.s_grid.iter().enumerate() {
        let batch = statistics::replicate(
            &config.window,
            specs,
            s,
            config.reps_per_s,
            config.master_seed,
            color_probs,
        )?;
        let mut csv = String::from("s,rep,seed");
        for (j, spec) in specs.iter().enumerate() {
            let _ = write!(csv, ",stat_{j}_{}", spec.score.family_name());
        }
        csv.push('\n');
        for (rep, (row, seed)) in batch.values.iter().zip(&batch.seeds).enumerate() {
            let _ = write!(csv, "{},{},{}", fmt_s(s), rep, seed);
            for v in row {
                let _ = write!(csv, ",{v}");
            }
            csv.push('\n');
        }
        let name = format!("batch_{idx:03}_s{}.csv", fmt_s(s));
        write_file(dir, &name, &csv)?;
        artifacts.push(name.clone());
        batch_files.push(name);
        batches.push(batch);
    }

    // Per-intensity empirical covariance.
    let mut sigma_s = Vec::new();
    if config.analyses.empirical_sigma
        || config.analyses.dk.as_ref().is_some_and(|d| d.versus == DkVersus::SigmaS)
    {
        for (idx, batch) in batches.iter().enumerate() {
            let est = empirical_sigma(batch)?;
            let name = format!("sigma_s_{idx:03}.json", );
            write_file(dir, &name, &to_json(&est)?)?;
            artifacts.push(name);
            sigma_s.push(est);
        }
    }

    // Limiting covariance.
    let mut sigma_limit = None;
    let mut truncation_budget = None;
    if let Some(params) = &config.analyses.asymptotic_sigma {
        let out = covariance::asymptotic_sigma_mc(specs, &config.window, color_probs, params)?;
        write_file(dir, "sigma_limit.json", &to_json(&out)?)?;
        artifacts.push("sigma_limit.json".into());
        truncation_budget = Some(out.truncation_budget);
        sigma_limit = Some(out.estimate);
    }

    let reference_matrix = |reference: Option<Reference>| -> Result<CovEstimate, ExperimentError> {
        match reference {
            Some(Reference::ClosedFormRgg) | None => Ok(covariance::rgg_sigma_closed_form(
                config.window.dim,
                extract_rho(specs).unwrap_or(1.0),
            )),
            Some(Reference::AsymptoticMc) => sigma_limit
                .clone()
                .ok_or_else(|| ExperimentError::Serde("asymptotic sigma missing".into())),
        }
    };

    // Covariance-gap curve.
    let mut gap = None;
    if let Some(cfg) = &config.analyses.gap_curve {
        let mode = match cfg.mode {
            GapModeCfg::ExactRgg => GapMode::ExactRgg,
            GapModeCfg::Mc => GapMode::Mc {
                reference: reference_matrix(cfg.reference)?,
                reps: cfg.reps,
            },
        };
        let curve = covariance::gap_curve(
            specs,
            &config.window,
            &config.s_grid,
            &mode,
            rng::derive_seed(config.master_seed, &[tag::REPLICATION, 0x6761_70]),
            color_probs,
        )?;
        let mut csv = String::from("s,i,j,gap,stderr\n");
        for p in &curve.points {
            for e in &p.entries {
                let _ = writeln!(csv, "{},{},{},{},{}", fmt_s(p.s), e.i, e.j, e.gap, e.stderr);
            }
        }
        write_file(dir, "gap_curve.csv", &csv)?;
        artifacts.push("gap_curve.csv".into());
        gap = Some(curve);
    }

    // Distance to the Gaussian.
    let mut dk_rows = Vec::new();
    if let Some(cfg) = &config.analyses.dk {
        let mut csv = String::from("s,dk,noise_floor,grid\n");
        for (idx, batch) in batches.iter().enumerate() {
            let sigma = match cfg.versus {
                DkVersus::SigmaS => sigma_s[idx].clone(),
                DkVersus::SigmaLimit => reference_matrix(cfg.reference)?,
            };
            let white = gaussian::standardize(batch, &sigma, true)?;
            let mut identity = vec![vec![0.0; m]; m];
            for (j, row) in identity.iter_mut().enumerate() {
                row[j] = 1.0;
            }
            let gauss = GaussianSpec::new(identity)?;
            let n_gauss = batch.reps() * cfg.oversample;
            let sample = gaussian::sample_gaussian(
                &gauss,
                n_gauss,
                rng::derive_seed(config.master_seed, &[tag::GAUSSIAN, idx as u64]),
            );
            let d = gaussian::dk_estimate(&white, &sample, cfg.grid)?;
            let _ = writeln!(csv, "{},{},{},{}", fmt_s(batch.s), d.value, d.noise_floor, d.grid);
            dk_rows.push((batch.s, d));
        }
        write_file(dir, "dk_curve.csv", &csv)?;
        artifacts.push("dk_curve.csv".into());
    }

    // Stabilization probe.
    if let Some(cfg) = &config.analyses.stab_probe {
        let s = cfg.s.unwrap_or(*config.s_grid.last().unwrap());
        let params = ProbeParams {
            reps: cfg.reps,
            color_probs: config.color_probs.clone(),
            ..Default::default()
        };
        let pts = statistics::stab_probe(
            &specs[cfg.statistic],
            &config.window,
            s,
            &cfg.separations,
            &params,
            rng::derive_seed(config.master_seed, &[tag::PROBE]),
        )?;
        let mut csv = String::from("separation,hits,reps,freq,wilson_lo,wilson_hi\n");
        for p in &pts {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{}",
                p.separation, p.hits, p.reps, p.freq, p.wilson_lo, p.wilson_hi
            );
        }
        write_file(dir, "stab_probe.csv", &csv)?;
        artifacts.push("stab_probe.csv".into());
    }

    // Rate fits over the requested curves.
    let mut rate_rows = Vec::new();
    if let Some(cfg) = &config.analyses.rate_fit {
        let mut fits: Vec<(String, RateFit)> = Vec::new();
        for id in &cfg.curves {
            let curve = match parse_curve_id(id) {
                Some(CurveId::Gap(i, j)) => {
                    let g = gap.as_ref().ok_or_else(|| ExperimentError::BadCurve(id.clone()))?;
                    g.entry_curve(i, j)
                }
                Some(CurveId::Dk) => {
                    dk_rows.iter().map(|(s, d)| (*s, d.value, d.noise_floor)).collect()
                }
                None => return Err(ExperimentError::BadCurve(id.clone())),
            };
            fits.push((id.clone(), rates::fit_rate(&curve)?));
        }
        rate_rows = rates::rate_report(&fits, &cfg.targets, cfg.tolerance);
        let mut csv = String::from("curve,target,exponent,stderr,z_score,tolerance,pass\n");
        for r in &rate_rows {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{}",
                r.curve, r.target, r.exponent, r.stderr, r.z_score, r.tolerance, r.pass
            );
        }
        write_file(dir, "rate_report.csv", &csv)?;
        artifacts.push("rate_report.csv".into());
    }

    Ok(RunSummary {
        dir: dir.to_path_buf(),
        manifest: Manifest {
            version: env!("CARGO_PKG_VERSION").into(),
            config: config.clone(),
            config_hash: String::new(),
            complete: true,
            error: None,
            artifacts,
            batches: batch_files,
            truncation_budget,
        },
        batches,
        sigma_s,
        sigma_limit,
        gap,
        dk: dk_rows,
        rate_rows,
    })
}

/// Scaled-radius factor of the edge statistic if this is the canonical
/// vertex/edge pair.
fn extract_rho(specs: &[StatisticSpec]) -> Option<f64> {
    use crate::scores::{RadiusRule, ScoreSpec};
    specs.iter().find_map(|s| match &s.score {
        ScoreSpec::RipsVolume { k: 1, r: RadiusRule::Scaled { rho }, alpha } if *alpha == 0.0 => {
            Some(*rho)
        }
        _ => None,
    })
}

/// Validate a config file; `Ok` with the parsed config, or the itemized error
/// list.
pub fn validate_config(path: &Path) -> Result<ExperimentConfig, ExperimentError> {
    let config = ExperimentConfig::load(path)?;
    let errs = config.validate();
    if errs.is_empty() {
        Ok(config)
    } else {
        Err(ExperimentError::Validation(errs))
    }
}

/// Re-read a bundle and emit selected curves as one long-format CSV
/// (`curve,s,value,stderr`). The manifest hash is recomputed and must match.
pub fn export_plotdata(bundle: &Path, curves: &[String]) -> Result<String, ExperimentError> {
    let manifest: Manifest = serde_json::from_str(&fs::read_to_string(bundle.join("manifest.json"))?)
        .map_err(|e| ExperimentError::Serde(e.to_string()))?;
    let actual = config_hash(&manifest.config)?;
    if actual != manifest.config_hash {
        return Err(ExperimentError::HashMismatch { stored: manifest.config_hash, actual });
    }
    let mut out = String::from("curve,s,value,stderr\n");
    for id in curves {
        match parse_curve_id(id) {
            Some(CurveId::Gap(i, j)) => {
                let path = bundle.join("gap_curve.csv");
                if !path.exists() {
                    return Err(ExperimentError::MissingArtifact("gap_curve.csv".into()));
                }
                for line in fs::read_to_string(path)?.lines().skip(1) {
                    let cols: Vec<&str> = line.split(',').collect();
                    if cols.len() == 5 && cols[1] == i.to_string() && cols[2] == j.to_string() {
                        let _ = writeln!(out, "{id},{},{},{}", cols[0], cols[3], cols[4]);
                    }
                }
            }
            Some(CurveId::Dk) => {
                let path = bundle.join("dk_curve.csv");
                if !path.exists() {
                    return Err(ExperimentError::MissingArtifact("dk_curve.csv".into()));
                }
                for line in fs::read_to_string(path)?.lines().skip(1) {
                    let cols: Vec<&str> = line.split(',').collect();
                    if cols.len() == 4 {
                        let _ = writeln!(out, "dk,{},{},{}", cols[0], cols[1], cols[2]);
                    }
                }
            }
            None => return Err(ExperimentError::BadCurve(id.clone())),
        }
    }
    Ok(out)
}

/// Built-in experiment presets.
pub fn presets() -> Vec<(&'static str, &'static str)> {
    vec![
        ("poisson-sanity", "count statistic on the unit square; checks the Poisson mean"),
        (
            "rgg-vertex-edge",
            "geometric-graph vertex/edge pair, d=2, rho=1: empirical covariance, exact gap curve, rate fit",
        ),
        ("entropy-limit", "directed 1-nn length on the unit torus; scaled mean approaches 1/2"),
        ("knn-probe", "second-difference stabilization probe for the 1-nn edge score"),
    ]
}

pub fn preset(name: &str) -> Option<ExperimentConfig> {
    use crate::scores::{RadiusRule, ScoreSpec};
    use crate::statistics::{Region, TestFn};
    let unit_window = WindowSpec::unit_cube(2);
    match name {
        "poisson-sanity" => Some(ExperimentConfig {
            master_seed: 7,
            s_grid: vec![100.0],
            reps_per_s: 100,
            parallelism: 0,
            output_dir: "results/poisson-sanity".into(),
            window: unit_window,
            statistics: vec![StatisticSpec::plain(ScoreSpec::Unit)],
            color_probs: None,
            analyses: Analyses { empirical_sigma: true, ..Default::default() },
        }),
        "rgg-vertex-edge" => Some(ExperimentConfig {
            master_seed: 24,
            s_grid: (8..=14).map(|e| 2f64.powi(e)).collect(),
            reps_per_s: 400,
            parallelism: 0,
            output_dir: "results/rgg-vertex-edge".into(),
            window: unit_window,
            statistics: vec![
                StatisticSpec::plain(ScoreSpec::Unit),
                StatisticSpec::plain(ScoreSpec::rgg_edge(RadiusRule::Scaled { rho: 1.0 })),
            ],
            color_probs: None,
            analyses: Analyses {
                empirical_sigma: true,
                gap_curve: Some(GapCfg {
                    mode: GapModeCfg::ExactRgg,
                    reference: None,
                    reps: default_gap_reps(),
                }),
                rate_fit: Some(RateCfg {
                    curves: vec!["gap_0_1".into()],
                    targets: vec![-0.5],
                    tolerance: 0.05,
                }),
                ..Default::default()
            },
        }),
        "entropy-limit" => Some(ExperimentConfig {
            master_seed: 91,
            s_grid: vec![1.0e4, 1.0e5],
            reps_per_s: 16,
            parallelism: 0,
            output_dir: "results/entropy-limit".into(),
            window: WindowSpec::unit_torus(2),
            statistics: vec![StatisticSpec {
                score: ScoreSpec::KnnDirected { k: 1, q: 1.0 },
                region: Region::All,
                testfn: TestFn::one(),
            }],
            color_probs: None,
            analyses: Analyses { empirical_sigma: true, ..Default::default() },
        }),
        "knn-probe" => {
            let s = 1.0e4f64;
            let sep = s.powf(-0.5);
            Some(ExperimentConfig {
                master_seed: 33,
                s_grid: vec![s],
                reps_per_s: 2,
                parallelism: 0,
                output_dir: "results/knn-probe".into(),
                window: WindowSpec::boxed(
                    vec![0.0, 0.0],
                    vec![0.2, 0.2],
                    crate::process::Boundary::Torus,
                    crate::process::DensitySpec::constant(1.0),
                ),
                statistics: vec![StatisticSpec::plain(ScoreSpec::KnnEdge { k: 1, q: 1.0 })],
                color_probs: None,
                analyses: Analyses {
                    stab_probe: Some(ProbeCfg {
                        statistic: 0,
                        separations: (1..=4).map(|i| i as f64 * sep).collect(),
                        reps: 4000,
                        s: Some(s),
                    }),
                    ..Default::default()
                },
            })
        }
        _ => None,
    }
}
