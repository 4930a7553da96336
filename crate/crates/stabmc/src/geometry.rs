//! Geometry kernels: uniform-grid spatial index with certified kNN and range
//! queries, circumspheres, barycentric interior tests, and simplex volumes.
//!
//! Distances are Euclidean on hard windows and minimum-image on tori. All
//! queries return results identical to a naive scan, including the fixed
//! tie-break order (lexicographic coordinates, then point id).

use thiserror::Error;

use crate::diag;
use crate::linalg;
use crate::process::{Boundary, Pos, WindowSpec, MAX_DIM};

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("query needs {needed} points but only {available} are eligible")]
    TooFewPoints { needed: usize, available: usize },
    #[error("degenerate simplex: generators lie in a lower-dimensional affine space")]
    DegenerateSimplex,
    #[error("expected {expected} points of dimension <= {max}, got {got}")]
    BadSimplexSize { expected: String, got: usize, max: usize },
}

/// Distance metric induced by a window: plain Euclidean, or minimum-image on
/// the torus.
#[derive(Debug, Clone, Copy)]
pub struct Metric {
    dim: usize,
    torus: bool,
    lengths: [f64; MAX_DIM],
}

impl Metric {
    pub fn for_window(w: &WindowSpec) -> Metric {
        let mut lengths = [0.0; MAX_DIM];
        for i in 0..w.dim {
            lengths[i] = w.side(i);
        }
        Metric { dim: w.dim, torus: w.boundary == Boundary::Torus, lengths }
    }

    pub fn euclidean(dim: usize) -> Metric {
        Metric { dim, torus: false, lengths: [0.0; MAX_DIM] }
    }

    /// Per-axis separation, minimum-image on the torus.
    #[inline]
    pub fn delta(&self, a: &Pos, b: &Pos, axis: usize) -> f64 {
        let mut d = a[axis] - b[axis];
        if self.torus {
            let len = self.lengths[axis];
            d = d.rem_euclid(len);
            if d > 0.5 * len {
                d -= len;
            }
        }
        d
    }

    #[inline]
    pub fn dist2(&self, a: &Pos, b: &Pos) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            let d = self.delta(a, b, i);
            acc += d * d;
        }
        acc
    }

    #[inline]
    pub fn dist(&self, a: &Pos, b: &Pos) -> f64 {
        self.dist2(a, b).sqrt()
    }
}

/// Tie-break key: lexicographic coordinates, then point id. Total order on
/// simple configurations.
#[inline]
fn tie_less(pts: &[Pos], dim: usize, a: u32, b: u32) -> bool {
    let pa = &pts[a as usize];
    let pb = &pts[b as usize];
    for i in 0..dim {
        if pa[i] != pb[i] {
            return pa[i] < pb[i];
        }
    }
    a < b
}

/// Uniform-grid index over a window. Immutable once built; queries take
/// shared references and are safe to run concurrently.
#[derive(Debug, Clone)]
pub struct GridIndex {
    metric: Metric,
    dim: usize,
    lo: [f64; MAX_DIM],
    cell_size: f64,
    cells_per_axis: [usize; MAX_DIM],
    strides: [usize; MAX_DIM],
    /// CSR layout: ids of points in cell c live in `ids[starts[c]..starts[c+1]]`.
    starts: Vec<u32>,
    ids: Vec<u32>,
    pts: Vec<Pos>,
}

impl GridIndex {
    /// Build with the default cell size `(Vol/n)^{1/d}`, giving expected unit
    /// occupancy for Poisson input.
    pub fn build(window: &WindowSpec, pts: Vec<Pos>) -> GridIndex {
        let n = pts.len().max(1);
        let cell = (window.volume() / n as f64).powf(1.0 / window.dim as f64);
        Self::build_with_cell(window, pts, cell)
    }

    pub fn build_with_cell(window: &WindowSpec, pts: Vec<Pos>, cell_size: f64) -> GridIndex {
        let dim = window.dim;
        let metric = Metric::for_window(window);
        let mut lo = [0.0; MAX_DIM];
        let mut cells_per_axis = [1usize; MAX_DIM];
        let mut total = 1usize;
        for i in 0..dim {
            lo[i] = window.lo[i];
            let c = (window.side(i) / cell_size).floor().max(1.0) as usize;
            // Keep the table near the point count even for skewed inputs.
            cells_per_axis[i] = c.min(4 * pts.len().max(1));
            total = total.saturating_mul(cells_per_axis[i]);
        }
        let mut strides = [0usize; MAX_DIM];
        let mut acc = 1usize;
        for i in 0..dim {
            strides[i] = acc;
            acc *= cells_per_axis[i];
        }
        let mut idx = GridIndex {
            metric,
            dim,
            lo,
            cell_size,
            cells_per_axis,
            strides,
            starts: Vec::new(),
            ids: Vec::new(),
            pts,
        };
        let mut counts = vec![0u32; total + 1];
        let cells: Vec<usize> = idx.pts.iter().map(|p| idx.cell_of(p)).collect();
        for &c in &cells {
            counts[c + 1] += 1;
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let mut ids = vec![0u32; idx.pts.len()];
        let mut cursor = counts.clone();
        for (i, &c) in cells.iter().enumerate() {
            ids[cursor[c] as usize] = i as u32;
            cursor[c] += 1;
        }
        idx.starts = counts;
        idx.ids = ids;
        idx
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn position(&self, id: u32) -> &Pos {
        &self.pts[id as usize]
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    #[inline]
    fn axis_cell(&self, x: f64, axis: usize) -> isize {
        let c = ((x - self.lo[axis]) / self.cell_size).floor() as isize;
        c.clamp(0, self.cells_per_axis[axis] as isize - 1)
    }

    #[inline]
    fn cell_of(&self, p: &Pos) -> usize {
        let mut idx = 0usize;
        for i in 0..self.dim {
            idx += self.axis_cell(p[i], i) as usize * self.strides[i];
        }
        idx
    }

    /// Visit every cell whose Chebyshev ring index around `center` is exactly
    /// `ring`, handling torus wrap-around without duplicates.
    fn for_ring_cells<F: FnMut(usize)>(&self, center: &[isize; MAX_DIM], ring: isize, mut f: F) {
        let dim = self.dim;
        let mut offs = [0isize; MAX_DIM];
        self.ring_rec(center, ring, 0, false, &mut offs, &mut f, dim);
    }

    #[allow(clippy::too_many_arguments)]
    fn ring_rec<F: FnMut(usize)>(
        &self,
        center: &[isize; MAX_DIM],
        ring: isize,
        axis: usize,
        saturated: bool,
        offs: &mut [isize; MAX_DIM],
        f: &mut F,
        dim: usize,
    ) {
        if axis == dim {
            if saturated || ring == 0 {
                let mut idx = 0usize;
                for i in 0..dim {
                    let n = self.cells_per_axis[i] as isize;
                    let mut c = center[i] + offs[i];
                    if self.metric.torus {
                        c = c.rem_euclid(n);
                    } else if c < 0 || c >= n {
                        return;
                    }
                    idx += c as usize * self.strides[i];
                }
                f(idx);
            }
            return;
        }
        let n = self.cells_per_axis[axis] as isize;
        // Torus axes use the canonical offset range [-(n-1)/2, n/2] so every
        // residue appears exactly once; within it the wrapped Chebyshev
        // distance is plain |off|.
        let (lo, hi) = if self.metric.torus {
            (-ring.min((n - 1) / 2), ring.min(n / 2))
        } else {
            (-ring, ring)
        };
        for off in lo..=hi {
            offs[axis] = off;
            let sat = saturated || off.abs() == ring;
            self.ring_rec(center, ring, axis + 1, sat, offs, f, dim);
        }
    }

    fn max_ring(&self) -> isize {
        let mut m = 0isize;
        for i in 0..self.dim {
            let n = self.cells_per_axis[i] as isize;
            let r = if self.metric.torus { n / 2 } else { n };
            m = m.max(r);
        }
        m
    }

    /// The `k` nearest neighbors of `x`, closest first. Exact: the search
    /// expands grid rings until the k-th distance certifiably beats every
    /// unexplored cell. Ties are broken by coordinate order, then id.
    pub fn knn(&self, x: &Pos, k: usize, exclude: Option<u32>) -> Result<Vec<u32>, GeometryError> {
        let available = self.len() - usize::from(exclude.is_some());
        if k == 0 {
            return Ok(Vec::new());
        }
        if available < k {
            return Err(GeometryError::TooFewPoints { needed: k, available });
        }
        let mut center = [0isize; MAX_DIM];
        for i in 0..self.dim {
            center[i] = self.axis_cell(x[i], i);
        }
        // Best-k kept sorted: (dist2, id). Ties on dist2 resolved by order.
        let mut best: Vec<(f64, u32)> = Vec::with_capacity(k + 1);
        let max_ring = self.max_ring();
        let mut ring = 0isize;
        loop {
            self.for_ring_cells(&center, ring, |cell| {
                let lo = self.starts[cell] as usize;
                let hi = self.starts[cell + 1] as usize;
                for &id in &self.ids[lo..hi] {
                    if exclude == Some(id) {
                        continue;
                    }
                    let d2 = self.metric.dist2(x, &self.pts[id as usize]);
                    if best.len() == k {
                        let (wd, wid) = best[k - 1];
                        if d2 > wd {
                            continue;
                        }
                        if d2 == wd && !tie_less(&self.pts, self.dim, id, wid) {
                            if wd == d2 {
                                diag::note_knn_tie();
                            }
                            continue;
                        }
                        if d2 == wd {
                            diag::note_knn_tie();
                        }
                    }
                    let mut pos = best.len();
                    while pos > 0 {
                        let (pd, pid) = best[pos - 1];
                        if d2 > pd || (d2 == pd && !tie_less(&self.pts, self.dim, id, pid)) {
                            break;
                        }
                        pos -= 1;
                    }
                    best.insert(pos, (d2, id));
                    if best.len() > k {
                        best.pop();
                    }
                }
            });
            // Points in rings > `ring` are at distance >= ring*cell_size; stop
            // once the current k-th distance strictly beats that bound (ties
            // could still be displaced by the ordering, hence strict).
            if best.len() == k {
                let bound = ring as f64 * self.cell_size;
                if best[k - 1].0 < bound * bound {
                    break;
                }
            }
            ring += 1;
            if ring > max_ring {
                break;
            }
        }
        if best.len() < k {
            return Err(GeometryError::TooFewPoints { needed: k, available });
        }
        Ok(best.into_iter().map(|(_, id)| id).collect())
    }

    /// Ids of points within the closed ball of radius `r` around `x`, in id
    /// order.
    pub fn range(&self, x: &Pos, r: f64, exclude: Option<u32>) -> Vec<u32> {
        let mut out = Vec::new();
        if r < 0.0 {
            return out;
        }
        let r2 = r * r;
        let mut center = [0isize; MAX_DIM];
        for i in 0..self.dim {
            center[i] = self.axis_cell(x[i], i);
        }
        let reach = (r / self.cell_size).floor() as isize + 1;
        let max_ring = self.max_ring().min(reach);
        for ring in 0..=max_ring {
            self.for_ring_cells(&center, ring, |cell| {
                let lo = self.starts[cell] as usize;
                let hi = self.starts[cell + 1] as usize;
                for &id in &self.ids[lo..hi] {
                    if exclude == Some(id) {
                        continue;
                    }
                    if self.metric.dist2(x, &self.pts[id as usize]) <= r2 {
                        out.push(id);
                    }
                }
            });
        }
        out.sort_unstable();
        out
    }
}

/// Circumscribed sphere of `k+1` points (the unique `(k-1)`-sphere within
/// their affine hull).
#[derive(Debug, Clone, Copy)]
pub struct Circumsphere {
    pub center: Pos,
    pub radius: f64,
    pub degenerate: bool,
}

const DEGENERACY_TOL: f64 = 1e-12;

/// Solve for the circumcenter of `pts` (k+1 positions, k <= dim) in the
/// affine hull. Degenerate inputs are flagged, not rejected.
pub fn circumsphere(pts: &[Pos], dim: usize) -> Result<Circumsphere, GeometryError> {
    let k = pts.len().checked_sub(1).ok_or(GeometryError::BadSimplexSize {
        expected: "at least 1".into(),
        got: 0,
        max: dim,
    })?;
    if k > dim || dim > MAX_DIM {
        return Err(GeometryError::BadSimplexSize {
            expected: format!("between 1 and {}", dim + 1),
            got: pts.len(),
            max: dim,
        });
    }
    if k == 0 {
        return Ok(Circumsphere { center: pts[0], radius: 0.0, degenerate: false });
    }
    // Gram system: 2 v_i . (c - p0) = |v_i|^2 with v_i = p_i - p0.
    let mut gram = [0.0f64; MAX_DIM * MAX_DIM];
    let mut rhs = [0.0f64; MAX_DIM];
    let base = &pts[0];
    for i in 0..k {
        for j in 0..k {
            let mut dot = 0.0;
            for a in 0..dim {
                dot += (pts[i + 1][a] - base[a]) * (pts[j + 1][a] - base[a]);
            }
            gram[i * k + j] = dot;
        }
        rhs[i] = 0.5 * gram[i * k + i];
    }
    let ok = linalg::solve_in_place(&mut gram[..k * k], &mut rhs[..k], k, DEGENERACY_TOL);
    if !ok {
        return Ok(Circumsphere { center: *base, radius: 0.0, degenerate: true });
    }
    let mut center = *base;
    for a in 0..dim {
        let mut c = 0.0;
        for i in 0..k {
            c += rhs[i] * (pts[i + 1][a] - base[a]);
        }
        center[a] += c;
    }
    let metric = Metric::euclidean(dim);
    let radius = metric.dist(&center, base);
    Ok(Circumsphere { center, radius, degenerate: false })
}

/// Whether `c` lies strictly inside the convex hull of the simplex `pts`
/// (all barycentric coordinates above the degeneracy tolerance).
pub fn center_in_interior(pts: &[Pos], c: &Pos, dim: usize) -> Result<bool, GeometryError> {
    let k = pts.len() - 1;
    if k == 0 || k > dim {
        return Err(GeometryError::BadSimplexSize {
            expected: format!("between 2 and {}", dim + 1),
            got: pts.len(),
            max: dim,
        });
    }
    let base = &pts[0];
    let mut gram = [0.0f64; MAX_DIM * MAX_DIM];
    let mut rhs = [0.0f64; MAX_DIM];
    for i in 0..k {
        for j in 0..k {
            let mut dot = 0.0;
            for a in 0..dim {
                dot += (pts[i + 1][a] - base[a]) * (pts[j + 1][a] - base[a]);
            }
            gram[i * k + j] = dot;
        }
        let mut dot = 0.0;
        for a in 0..dim {
            dot += (pts[i + 1][a] - base[a]) * (c[a] - base[a]);
        }
        rhs[i] = dot;
    }
    if !linalg::solve_in_place(&mut gram[..k * k], &mut rhs[..k], k, DEGENERACY_TOL) {
        return Err(GeometryError::DegenerateSimplex);
    }
    let mut lambda0 = 1.0;
    for i in 0..k {
        lambda0 -= rhs[i];
    }
    Ok(rhs[..k].iter().chain(std::iter::once(&lambda0)).all(|&l| l > DEGENERACY_TOL))
}

/// k-dimensional volume of the simplex on `k+1` vertices via the Gram
/// determinant; 0 for degenerate input.
pub fn simplex_volume(pts: &[Pos], dim: usize) -> f64 {
    let k = pts.len() - 1;
    if k == 0 {
        return 0.0;
    }
    debug_assert!(k <= dim);
    let base = &pts[0];
    let mut gram = [0.0f64; MAX_DIM * MAX_DIM];
    for i in 0..k {
        for j in 0..k {
            let mut dot = 0.0;
            for a in 0..dim {
                dot += (pts[i + 1][a] - base[a]) * (pts[j + 1][a] - base[a]);
            }
            gram[i * k + j] = dot;
        }
    }
    let det = linalg::det_in_place(&mut gram[..k * k], k);
    if det <= 0.0 {
        return 0.0;
    }
    let mut fact = 1.0f64;
    for i in 1..=k {
        fact *= i as f64;
    }
    det.sqrt() / fact
}
