//! Marked Poisson process generation on boxes and flat tori.
//!
//! All samplers are pure functions of `(spec, seed)`: no global state, no
//! thread-local randomness, so they are safe to call from any number of
//! threads and always reproduce bit-identical output.

use std::collections::HashSet;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::{self, tag};

/// Hard cap on the ambient dimension; grids and stack buffers size to this.
pub const MAX_DIM: usize = 8;

/// A position in `R^d`, padded with zeros beyond the active dimension.
pub type Pos = [f64; MAX_DIM];

/// Build a padded position from a coordinate slice.
pub fn pos_from(coords: &[f64]) -> Pos {
    let mut p = [0.0; MAX_DIM];
    p[..coords.len()].copy_from_slice(coords);
    p
}

#[derive(Debug, Error)]
pub enum ProcessError {
    #[error("window dimension {0} outside supported range 1..={MAX_DIM}")]
    BadDimension(usize),
    #[error("window axis {axis} has empty extent [{lo}, {hi}]")]
    EmptyAxis { axis: usize, lo: f64, hi: f64 },
    #[error("torus windows require a constant density")]
    TorusNonConstant,
    #[error("density is negative or exceeds its declared supremum at {at:?} (g = {value}, sup = {sup})")]
    DensityOutOfRange { at: Vec<f64>, value: f64, sup: f64 },
    #[error("density grid has {values} values but the cell layout needs {cells}")]
    GridShape { values: usize, cells: usize },
    #[error("density supremum must be positive and finite, got {0}")]
    BadSup(f64),
    #[error("homogeneous sampling requires a constant density")]
    NotConstant,
    #[error("color probabilities must be nonnegative and sum to 1 within 1e-12 (sum = {0})")]
    BadSimplex(f64),
    #[error("anchor position lies outside the window")]
    AnchorOutside,
    #[error("intensity must be nonnegative and finite, got {0}")]
    BadIntensity(f64),
}

/// Mark attached to a point: nothing, a color id, or a coupling time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mark {
    None,
    Color(u16),
    Time(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkedPoint {
    pub pos: Pos,
    pub mark: Mark,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Hard,
    Torus,
}

/// Intensity density on the window. `sup_bound` is the thinning envelope; the
/// declared Lipschitz constant is carried as metadata for grid densities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DensitySpec {
    Constant { value: f64 },
    Affine { base: f64, gradient: Vec<f64>, sup_bound: f64 },
    Grid { cells_per_axis: Vec<usize>, values: Vec<f64>, sup_bound: f64, lipschitz: f64 },
}

impl DensitySpec {
    pub fn constant(value: f64) -> Self {
        DensitySpec::Constant { value }
    }

    pub fn sup_bound(&self) -> f64 {
        match self {
            DensitySpec::Constant { value } => *value,
            DensitySpec::Affine { sup_bound, .. } => *sup_bound,
            DensitySpec::Grid { sup_bound, .. } => *sup_bound,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, DensitySpec::Constant { .. })
    }

    /// Declared Lipschitz constant (exact for constant/affine).
    pub fn lipschitz(&self) -> f64 {
        match self {
            DensitySpec::Constant { .. } => 0.0,
            DensitySpec::Affine { gradient, .. } => {
                gradient.iter().map(|g| g * g).sum::<f64>().sqrt()
            }
            DensitySpec::Grid { lipschitz, .. } => *lipschitz,
        }
    }
}

/// Observation window: an axis-aligned box with hard or periodic boundary and
/// an intensity density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub dim: usize,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub boundary: Boundary,
    pub density: DensitySpec,
}

impl WindowSpec {
    /// Unit cube `[0,1]^d` with unit constant density and hard boundary.
    pub fn unit_cube(dim: usize) -> Self {
        WindowSpec {
            dim,
            lo: vec![0.0; dim],
            hi: vec![1.0; dim],
            boundary: Boundary::Hard,
            density: DensitySpec::constant(1.0),
        }
    }

    /// Unit torus `[0,1)^d` with unit constant density.
    pub fn unit_torus(dim: usize) -> Self {
        WindowSpec { boundary: Boundary::Torus, ..Self::unit_cube(dim) }
    }

    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>, boundary: Boundary, density: DensitySpec) -> Self {
        let dim = lo.len();
        WindowSpec { dim, lo, hi, boundary, density }
    }

    pub fn validate(&self) -> Result<(), ProcessError> {
        if self.dim == 0 || self.dim > MAX_DIM {
            return Err(ProcessError::BadDimension(self.dim));
        }
        if self.lo.len() != self.dim || self.hi.len() != self.dim {
            return Err(ProcessError::BadDimension(self.dim));
        }
        for axis in 0..self.dim {
            if !(self.lo[axis] < self.hi[axis]) {
                return Err(ProcessError::EmptyAxis {
                    axis,
                    lo: self.lo[axis],
                    hi: self.hi[axis],
                });
            }
        }
        let sup = self.density.sup_bound();
        if !(sup.is_finite() && sup >= 0.0) {
            return Err(ProcessError::BadSup(sup));
        }
        match &self.density {
            DensitySpec::Constant { value } => {
                if !(value.is_finite() && *value >= 0.0) {
                    return Err(ProcessError::BadSup(*value));
                }
            }
            DensitySpec::Affine { gradient, .. } => {
                if gradient.len() != self.dim {
                    return Err(ProcessError::BadDimension(gradient.len()));
                }
                // Affine densities attain their extremes at box corners.
                for corner in 0..(1usize << self.dim) {
                    let x: Vec<f64> = (0..self.dim)
                        .map(|i| if corner >> i & 1 == 1 { self.hi[i] } else { self.lo[i] })
                        .collect();
                    let g = self.density_at(&pos_from(&x));
                    if g < 0.0 || g > sup * (1.0 + 1e-12) {
                        return Err(ProcessError::DensityOutOfRange { at: x, value: g, sup });
                    }
                }
            }
            DensitySpec::Grid { cells_per_axis, values, .. } => {
                if cells_per_axis.len() != self.dim {
                    return Err(ProcessError::BadDimension(cells_per_axis.len()));
                }
                let cells: usize = cells_per_axis.iter().product();
                if cells != values.len() || cells == 0 {
                    return Err(ProcessError::GridShape { values: values.len(), cells });
                }
                for v in values {
                    if *v < 0.0 || *v > sup * (1.0 + 1e-12) {
                        return Err(ProcessError::DensityOutOfRange {
                            at: vec![],
                            value: *v,
                            sup,
                        });
                    }
                }
            }
        }
        if self.boundary == Boundary::Torus && !self.density.is_constant() {
            return Err(ProcessError::TorusNonConstant);
        }
        Ok(())
    }

    pub fn side(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim).map(|i| self.side(i)).product()
    }

    pub fn contains(&self, p: &Pos) -> bool {
        (0..self.dim).all(|i| p[i] >= self.lo[i] && p[i] <= self.hi[i])
    }

    /// Reduce a position into the box modulo side lengths (torus mode).
    pub fn reduce(&self, p: &Pos) -> Pos {
        let mut out = *p;
        if self.boundary == Boundary::Torus {
            for i in 0..self.dim {
                let len = self.side(i);
                let mut x = (out[i] - self.lo[i]) % len;
                if x < 0.0 {
                    x += len;
                }
                out[i] = self.lo[i] + x;
            }
        }
        out
    }

    pub fn density_at(&self, p: &Pos) -> f64 {
        match &self.density {
            DensitySpec::Constant { value } => *value,
            DensitySpec::Affine { base, gradient, .. } => {
                let mut g = *base;
                for i in 0..self.dim {
                    g += gradient[i] * p[i];
                }
                g
            }
            DensitySpec::Grid { cells_per_axis, values, .. } => {
                let mut idx = 0usize;
                let mut stride = 1usize;
                for i in 0..self.dim {
                    let n = cells_per_axis[i];
                    let frac = (p[i] - self.lo[i]) / self.side(i);
                    let c = ((frac * n as f64).floor() as isize).clamp(0, n as isize - 1) as usize;
                    idx += c * stride;
                    stride *= n;
                }
                values[idx]
            }
        }
    }

    /// Mass of the intensity density over the window, `∫_W g`.
    /// Exact for constant/affine/grid densities.
    pub fn density_mass(&self) -> f64 {
        match &self.density {
            DensitySpec::Constant { value } => value * self.volume(),
            DensitySpec::Affine { base, gradient, .. } => {
                // Affine integrates to g(center) * Vol.
                let mut g = *base;
                for i in 0..self.dim {
                    g += gradient[i] * 0.5 * (self.lo[i] + self.hi[i]);
                }
                g * self.volume()
            }
            DensitySpec::Grid { cells_per_axis, values, .. } => {
                let cell_vol: f64 = (0..self.dim)
                    .map(|i| self.side(i) / cells_per_axis[i] as f64)
                    .product();
                values.iter().sum::<f64>() * cell_vol
            }
        }
    }
}

/// A finite simple marked point set inside a window at intensity `s`.
#[derive(Debug, Clone)]
pub struct PointConfig {
    pub window: WindowSpec,
    pub intensity: f64,
    pub points: Vec<MarkedPoint>,
}

impl PointConfig {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// A copy with extra points appended (positions torus-reduced).
    pub fn with_points(&self, extra: &[MarkedPoint]) -> PointConfig {
        let mut out = self.clone();
        for p in extra {
            out.points.push(MarkedPoint { pos: self.window.reduce(&p.pos), mark: p.mark });
        }
        out
    }
}

/// Driver atom of the coupling: a spatial position, an arrival time, and a
/// mark. The time decides membership in each derived view.
#[derive(Debug, Clone, Copy)]
pub struct DriverPoint {
    pub pos: Pos,
    pub t: f64,
    pub mark: Mark,
}

/// Coupled pair of processes driven by one realization: a point `(z, t)`
/// belongs to the inhomogeneous view iff `t <= s*g(z)` and to the stationary
/// view frozen at the anchor iff `t <= s*g(anchor)`.
#[derive(Debug, Clone)]
pub struct CoupledPair {
    pub window: WindowSpec,
    pub intensity: f64,
    pub anchor: Pos,
    pub driver: Vec<DriverPoint>,
}

impl CoupledPair {
    /// View with the spatially varying density.
    pub fn sg_view(&self) -> PointConfig {
        let s = self.intensity;
        let pts = self
            .driver
            .iter()
            .filter(|d| d.t <= s * self.window.density_at(&d.pos))
            .map(|d| MarkedPoint { pos: d.pos, mark: d.mark })
            .collect();
        PointConfig { window: self.window.clone(), intensity: s, points: pts }
    }

    /// View with the density frozen at the anchor.
    pub fn sgx_view(&self) -> PointConfig {
        let s = self.intensity;
        let ga = self.window.density_at(&self.anchor);
        let pts = self
            .driver
            .iter()
            .filter(|d| d.t <= s * ga)
            .map(|d| MarkedPoint { pos: d.pos, mark: d.mark })
            .collect();
        PointConfig { window: self.window.clone(), intensity: s, points: pts }
    }
}

fn uniform_in_window<R: Rng>(rng: &mut R, w: &WindowSpec) -> Pos {
    let mut p = [0.0; MAX_DIM];
    for i in 0..w.dim {
        p[i] = rng.gen_range(w.lo[i]..w.hi[i]);
    }
    p
}

/// Resample any duplicated positions so the configuration is simple. Touches
/// nothing unless a collision actually occurs (probability zero in theory,
/// representable in finite precision).
fn ensure_simple<R: Rng>(points: &mut [MarkedPoint], rng: &mut R, w: &WindowSpec) {
    let mut seen: HashSet<[u64; MAX_DIM]> = HashSet::with_capacity(points.len() * 2);
    for p in points.iter_mut() {
        loop {
            let key = p.pos.map(f64::to_bits);
            if seen.insert(key) {
                break;
            }
            p.pos = uniform_in_window(rng, w);
        }
    }
}

fn check_intensity(s: f64) -> Result<(), ProcessError> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(ProcessError::BadIntensity(s));
    }
    Ok(())
}

/// Homogeneous Poisson process at rate `s * u` on the window (`u` the constant
/// density). Point count is Poisson(`s*u*Vol`), positions i.i.d. uniform.
pub fn sample_homogeneous(w: &WindowSpec, s: f64, seed: u64) -> Result<PointConfig, ProcessError> {
    w.validate()?;
    check_intensity(s)?;
    let u = match &w.density {
        DensitySpec::Constant { value } => *value,
        _ => return Err(ProcessError::NotConstant),
    };
    let mean = s * u * w.volume();
    let n = rng::poisson_count(&mut rng::stream(seed, &[tag::COUNT]), mean);
    let mut pos_rng = rng::stream(seed, &[tag::POSITIONS]);
    let mut points: Vec<MarkedPoint> = (0..n)
        .map(|_| MarkedPoint { pos: uniform_in_window(&mut pos_rng, w), mark: Mark::None })
        .collect();
    ensure_simple(&mut points, &mut pos_rng, w);
    Ok(PointConfig { window: w.clone(), intensity: s, points })
}

/// Inhomogeneous Poisson process with intensity `s*g` by thinning a
/// homogeneous process at the envelope rate `s*sup_bound`: a candidate at `z`
/// survives with probability `g(z)/sup_bound`.
pub fn sample_inhomogeneous(
    w: &WindowSpec,
    s: f64,
    seed: u64,
) -> Result<PointConfig, ProcessError> {
    w.validate()?;
    check_intensity(s)?;
    let sup = w.density.sup_bound();
    if sup == 0.0 {
        return Ok(PointConfig { window: w.clone(), intensity: s, points: Vec::new() });
    }
    let mean = s * sup * w.volume();
    let n = rng::poisson_count(&mut rng::stream(seed, &[tag::COUNT]), mean);
    let mut pos_rng = rng::stream(seed, &[tag::POSITIONS]);
    let mut thin_rng = rng::stream(seed, &[tag::THINNING]);
    let mut points = Vec::new();
    for _ in 0..n {
        let pos = uniform_in_window(&mut pos_rng, w);
        let g = w.density_at(&pos);
        if g > sup * (1.0 + 1e-12) || g < 0.0 {
            return Err(ProcessError::DensityOutOfRange {
                at: pos[..w.dim].to_vec(),
                value: g,
                sup,
            });
        }
        if thin_rng.gen::<f64>() < g / sup {
            points.push(MarkedPoint { pos, mark: Mark::None });
        }
    }
    ensure_simple(&mut points, &mut pos_rng, w);
    Ok(PointConfig { window: w.clone(), intensity: s, points })
}

/// Attach i.i.d. categorical color marks, independent of positions.
pub fn attach_colors(
    config: &PointConfig,
    probs: &[f64],
    seed: u64,
) -> Result<PointConfig, ProcessError> {
    let sum: f64 = probs.iter().sum();
    if probs.iter().any(|p| *p < 0.0) || (sum - 1.0).abs() > 1e-12 {
        return Err(ProcessError::BadSimplex(sum));
    }
    let mut out = config.clone();
    let mut rng = rng::stream(seed, &[tag::MARKS]);
    for p in &mut out.points {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut color = probs.len() as u16 - 1;
        for (j, q) in probs.iter().enumerate() {
            acc += q;
            if u < acc {
                color = j as u16;
                break;
            }
        }
        // Colors are 1-based ids.
        p.mark = Mark::Color(color + 1);
    }
    Ok(out)
}

/// Sample the coupling of the inhomogeneous process and the stationary process
/// frozen at `anchor`: one driver realization on `W x [0, s*sup]`, two views.
pub fn sample_coupled(
    w: &WindowSpec,
    s: f64,
    anchor: &Pos,
    seed: u64,
) -> Result<CoupledPair, ProcessError> {
    w.validate()?;
    check_intensity(s)?;
    if !w.contains(anchor) {
        return Err(ProcessError::AnchorOutside);
    }
    let sup = w.density.sup_bound();
    let mean = s * sup * w.volume();
    let n = rng::poisson_count(&mut rng::stream(seed, &[tag::COUNT, tag::COUPLING]), mean);
    let mut pos_rng = rng::stream(seed, &[tag::POSITIONS, tag::COUPLING]);
    let mut driver: Vec<DriverPoint> = (0..n)
        .map(|_| {
            let pos = uniform_in_window(&mut pos_rng, w);
            let t = pos_rng.gen_range(0.0..s * sup);
            DriverPoint { pos, t, mark: Mark::None }
        })
        .collect();
    // Deduplicate driver positions the same way configurations are kept simple.
    let mut seen: HashSet<[u64; MAX_DIM]> = HashSet::with_capacity(driver.len() * 2);
    for d in &mut driver {
        loop {
            let key = d.pos.map(f64::to_bits);
            if seen.insert(key) {
                break;
            }
            d.pos = uniform_in_window(&mut pos_rng, w);
        }
    }
    Ok(CoupledPair { window: w.clone(), intensity: s, anchor: *anchor, driver })
}
