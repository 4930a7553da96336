//! The per-point score-function catalog.
//!
//! A score assigns a real value to a point of a configuration, depending only
//! on the local geometry around it: k-nearest-neighbor edge weights and
//! degrees, colored nearest-neighbor coincidences, geometric-graph component,
//! degree, and subgraph counts, Vietoris–Rips face volumes, and index-k
//! critical points of the ball complex. Summing a score over the points of a
//! region yields the statistics assembled in [`crate::statistics`].
//!
//! Scores whose radius follows the `scaled` rule `r_s = rho * s^{-1/d}` are
//! exactly the scores obtained by evaluating the fixed-radius score on the
//! `s^{1/d}`-dilation of the configuration about the anchor point; the
//! `knn_directed` and `rips_volume` families carry the matching power-of-`s`
//! prefactor that the dilation induces on distances and volumes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diag;
use crate::geometry::{self, GridIndex, Metric};
use crate::process::{Mark, PointConfig, Pos};

#[derive(Debug, Error)]
pub enum ScoreError {
    #[error("score parameter out of range: {0}")]
    BadParameter(String),
    #[error("colored score requires every point to carry a color mark")]
    UncoloredPoint,
    #[error(
        "critical-point enumeration with infinite radius is capped at n <= {cap} for k = {k} \
         (configuration has {n} points); use a finite radius"
    )]
    InfiniteRadiusCap { k: usize, cap: usize, n: usize },
    #[error("subgraph pattern must be connected, with 2..=5 vertices")]
    BadPattern,
}

/// Radius rule for the geometric-graph families: a fixed radius, the scaled
/// radius `rho * s^{-1/d}`, or no radius cut at all.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum RadiusRule {
    Fixed { r: f64 },
    Scaled { rho: f64 },
    Infinite,
}

impl RadiusRule {
    pub fn radius(&self, s: f64, dim: usize) -> Option<f64> {
        match self {
            RadiusRule::Fixed { r } => Some(*r),
            RadiusRule::Scaled { rho } => Some(rho * s.powf(-1.0 / dim as f64)),
            RadiusRule::Infinite => None,
        }
    }

    fn validate(&self, allow_infinite: bool) -> Result<(), ScoreError> {
        match self {
            RadiusRule::Fixed { r } if !(r.is_finite() && *r > 0.0) => {
                Err(ScoreError::BadParameter(format!("fixed radius {r} must be positive")))
            }
            RadiusRule::Scaled { rho } if !(rho.is_finite() && *rho > 0.0) => {
                Err(ScoreError::BadParameter(format!("radius factor {rho} must be positive")))
            }
            RadiusRule::Infinite if !allow_infinite => {
                Err(ScoreError::BadParameter("this family needs a finite radius".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Small connected graph pattern (2..=5 vertices) for subgraph counting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PatternDef", into = "PatternDef")]
pub struct Pattern {
    n: usize,
    adj: [[bool; 5]; 5],
    automorphisms: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PatternDef {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl From<Pattern> for PatternDef {
    fn from(p: Pattern) -> PatternDef {
        PatternDef { vertices: p.n, edges: p.edges() }
    }
}

impl TryFrom<PatternDef> for Pattern {
    type Error = ScoreError;
    fn try_from(def: PatternDef) -> Result<Pattern, ScoreError> {
        Pattern::new(def.vertices, &def.edges)
    }
}

impl Pattern {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Pattern, ScoreError> {
        if !(2..=5).contains(&n) {
            return Err(ScoreError::BadPattern);
        }
        let mut adj = [[false; 5]; 5];
        for &(a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(ScoreError::BadPattern);
            }
            adj[a][b] = true;
            adj[b][a] = true;
        }
        // Connectivity by closure from vertex 0.
        let mut seen = [false; 5];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for w in 0..n {
                if adj[v][w] && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if !seen[..n].iter().all(|&s| s) {
            return Err(ScoreError::BadPattern);
        }
        let mut pat = Pattern { n, adj, automorphisms: 1 };
        pat.automorphisms = pat.count_self_embeddings();
        Ok(pat)
    }

    pub fn edge() -> Pattern {
        Pattern::new(2, &[(0, 1)]).unwrap()
    }

    pub fn triangle() -> Pattern {
        Pattern::new(3, &[(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    pub fn path(n: usize) -> Result<Pattern, ScoreError> {
        let edges: Vec<(usize, usize)> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        Pattern::new(n, &edges)
    }

    pub fn vertices(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a][b]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in a + 1..self.n {
                if self.adj[a][b] {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn automorphisms(&self) -> u64 {
        self.automorphisms
    }

    fn count_self_embeddings(&self) -> u64 {
        let mut count = 0;
        let mut perm: Vec<usize> = (0..self.n).collect();
        permute(&mut perm, 0, &mut |p| {
            let ok = (0..self.n).all(|a| {
                (a + 1..self.n).all(|b| !self.adj[a][b] || self.adj[p[a]][p[b]])
            });
            if ok {
                count += 1;
            }
        });
        count
    }
}

fn permute<F: FnMut(&[usize])>(items: &mut Vec<usize>, k: usize, f: &mut F) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, f);
        items.swap(k, i);
    }
}

/// Catalog entry: a score family with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ScoreSpec {
    /// Constant score 1: the statistic is the point count of the region.
    Unit,
    /// Undirected kNN edge weight: half of `|x-y|^q` over the k nearest
    /// neighbors when the pair is mutual, the full weight otherwise. Summing
    /// over all points gives the q-weighted length of the undirected kNN
    /// graph.
    KnnEdge { k: usize, q: f64 },
    /// Directed kNN weight `sum |x-y|^q` with the dilation prefactor
    /// `s^{q/d}`; sums to the scaled length of the directed kNN graph.
    KnnDirected { k: usize, q: f64 },
    /// Indicator that the undirected kNN degree equals `j`.
    KnnDegree { k: usize, j: usize },
    /// Half the number of nearest-neighbor edges at the point joining two
    /// color-`color` endpoints; sums to the monochromatic edge count.
    ColoredNn { color: u16 },
    /// `1/k` if the point lies in a connected component of size exactly `k`
    /// of the geometric graph at the rule's radius.
    RggComponent { k: usize, r: RadiusRule },
    /// Indicator that the geometric-graph degree equals `j`.
    RggDegree { j: usize, r: RadiusRule },
    /// Subgraph copies of `pattern` containing the point, divided by the
    /// pattern size; sums to the total copy count.
    RggSubgraph { pattern: Pattern, r: RadiusRule },
    /// `1/(k+1)` times the sum of `Vol_k^alpha` over the k-faces of the
    /// Vietoris-Rips complex containing the point, with the dilation
    /// prefactor `s^{alpha k / d}`.
    RipsVolume { k: usize, r: RadiusRule, alpha: f64 },
    /// `1/(k+1)` times the number of (k+1)-subsets containing the point that
    /// generate an index-k critical point with circumradius in `(0, r]`.
    CriticalPoints { k: usize, r: RadiusRule },
}

/// Enumeration caps for critical points with no radius cut; global subset
/// enumeration beyond these is a brute-force oracle, not an experiment path.
const INFINITE_CAPS: [(usize, usize); 3] = [(1, 2000), (2, 300), (3, 80)];

impl ScoreSpec {
    pub fn validate(&self, dim: usize) -> Result<(), ScoreError> {
        let bad = |msg: String| Err(ScoreError::BadParameter(msg));
        match self {
            ScoreSpec::Unit => Ok(()),
            ScoreSpec::KnnEdge { k, q } | ScoreSpec::KnnDirected { k, q } => {
                if *k < 1 {
                    return bad("k must be >= 1".into());
                }
                if !(q.is_finite() && *q >= 0.0) {
                    return bad(format!("q = {q} must be >= 0"));
                }
                Ok(())
            }
            ScoreSpec::KnnDegree { k, .. } => {
                if *k < 1 {
                    return bad("k must be >= 1".into());
                }
                Ok(())
            }
            ScoreSpec::ColoredNn { color } => {
                if *color == 0 {
                    return bad("color ids are 1-based".into());
                }
                Ok(())
            }
            ScoreSpec::RggComponent { k, r } => {
                if *k < 1 {
                    return bad("component size k must be >= 1".into());
                }
                r.validate(false)
            }
            ScoreSpec::RggDegree { r, .. } => r.validate(false),
            ScoreSpec::RggSubgraph { pattern, r } => {
                if pattern.vertices() < 2 {
                    return Err(ScoreError::BadPattern);
                }
                r.validate(false)
            }
            ScoreSpec::RipsVolume { k, r, alpha } => {
                if *k < 1 || *k > dim {
                    return bad(format!("rips face dimension k = {k} must be in 1..={dim}"));
                }
                if !(alpha.is_finite() && *alpha >= 0.0) {
                    return bad(format!("alpha = {alpha} must be >= 0"));
                }
                r.validate(false)
            }
            ScoreSpec::CriticalPoints { k, r } => {
                if *k < 1 || *k > dim {
                    return bad(format!("critical index k = {k} must be in 1..={dim}"));
                }
                r.validate(true)
            }
        }
    }

    /// Stable family name used in configs and CSV headers.
    pub fn family_name(&self) -> &'static str {
        match self {
            ScoreSpec::Unit => "unit",
            ScoreSpec::KnnEdge { .. } => "knn_edge",
            ScoreSpec::KnnDirected { .. } => "knn_directed",
            ScoreSpec::KnnDegree { .. } => "knn_degree",
            ScoreSpec::ColoredNn { .. } => "colored_nn",
            ScoreSpec::RggComponent { .. } => "rgg_component",
            ScoreSpec::RggDegree { .. } => "rgg_degree",
            ScoreSpec::RggSubgraph { .. } => "rgg_subgraph",
            ScoreSpec::RipsVolume { .. } => "rips_volume",
            ScoreSpec::CriticalPoints { .. } => "critical_points",
        }
    }

    /// Human-readable label with parameters.
    pub fn label(&self) -> String {
        fn rr(r: &RadiusRule) -> String {
            match r {
                RadiusRule::Fixed { r } => format!("r={r}"),
                RadiusRule::Scaled { rho } => format!("rho={rho}"),
                RadiusRule::Infinite => "r=inf".into(),
            }
        }
        match self {
            ScoreSpec::Unit => "unit".into(),
            ScoreSpec::KnnEdge { k, q } => format!("knn_edge(k={k},q={q})"),
            ScoreSpec::KnnDirected { k, q } => format!("knn_directed(k={k},q={q})"),
            ScoreSpec::KnnDegree { k, j } => format!("knn_degree(k={k},j={j})"),
            ScoreSpec::ColoredNn { color } => format!("colored_nn(j={color})"),
            ScoreSpec::RggComponent { k, r } => format!("rgg_component(k={k},{})", rr(r)),
            ScoreSpec::RggDegree { j, r } => format!("rgg_degree(j={j},{})", rr(r)),
            ScoreSpec::RggSubgraph { pattern, r } => {
                format!("rgg_subgraph(n={},{})", pattern.vertices(), rr(r))
            }
            ScoreSpec::RipsVolume { k, r, alpha } => {
                format!("rips_volume(k={k},alpha={alpha},{})", rr(r))
            }
            ScoreSpec::CriticalPoints { k, r } => format!("critical_points(k={k},{})", rr(r)),
        }
    }

    /// Geometric-graph edge score: 1-faces of the Rips complex with `alpha=0`
    /// give exactly half the degree, so the statistic is the edge count.
    pub fn rgg_edge(r: RadiusRule) -> ScoreSpec {
        ScoreSpec::RipsVolume { k: 1, r, alpha: 0.0 }
    }

    fn radius_rule(&self) -> Option<&RadiusRule> {
        match self {
            ScoreSpec::RggComponent { r, .. }
            | ScoreSpec::RggDegree { r, .. }
            | ScoreSpec::RggSubgraph { r, .. }
            | ScoreSpec::RipsVolume { r, .. }
            | ScoreSpec::CriticalPoints { r, .. } => Some(r),
            _ => None,
        }
    }

    /// Whether the family obeys the dilation scaling law, so that the
    /// asymptotic covariance machinery applies.
    pub fn is_scaled_family(&self) -> bool {
        match self {
            ScoreSpec::Unit
            | ScoreSpec::KnnDirected { .. }
            | ScoreSpec::KnnDegree { .. }
            | ScoreSpec::ColoredNn { .. } => true,
            ScoreSpec::KnnEdge { q, .. } => *q == 0.0,
            _ => match self.radius_rule() {
                Some(RadiusRule::Scaled { .. }) | Some(RadiusRule::Infinite) => true,
                Some(RadiusRule::Fixed { .. }) => false,
                None => false,
            },
        }
    }

    /// The fixed score generating this one under dilation, evaluated at unit
    /// intensity. `None` when the family is not scaled.
    pub fn unscaled_parent(&self) -> Option<ScoreSpec> {
        if !self.is_scaled_family() {
            return None;
        }
        let fix = |r: &RadiusRule| match r {
            RadiusRule::Scaled { rho } => RadiusRule::Fixed { r: *rho },
            other => *other,
        };
        Some(match self {
            ScoreSpec::RggComponent { k, r } => ScoreSpec::RggComponent { k: *k, r: fix(r) },
            ScoreSpec::RggDegree { j, r } => ScoreSpec::RggDegree { j: *j, r: fix(r) },
            ScoreSpec::RggSubgraph { pattern, r } => {
                ScoreSpec::RggSubgraph { pattern: pattern.clone(), r: fix(r) }
            }
            ScoreSpec::RipsVolume { k, r, alpha } => {
                ScoreSpec::RipsVolume { k: *k, r: fix(r), alpha: *alpha }
            }
            ScoreSpec::CriticalPoints { k, r } => ScoreSpec::CriticalPoints { k: *k, r: fix(r) },
            other => other.clone(),
        })
    }

    /// Dilation prefactor `s^{gamma/d}` applied on top of the raw sum.
    pub fn prefactor(&self, s: f64, dim: usize) -> f64 {
        match self {
            ScoreSpec::KnnDirected { q, .. } => s.powf(q / dim as f64),
            ScoreSpec::RipsVolume { k, alpha, .. } => s.powf(alpha * *k as f64 / dim as f64),
            _ => 1.0,
        }
    }

    /// Deterministic reach for finite-radius families: deleting points
    /// farther than this from the anchor never changes the score. `None` for
    /// the kNN families, whose radius of stabilization is random.
    pub fn deterministic_reach(&self, s: f64, dim: usize) -> Option<f64> {
        match self {
            ScoreSpec::Unit => Some(0.0),
            ScoreSpec::RggComponent { k, r } => {
                r.radius(s, dim).map(|rr| *k as f64 * rr)
            }
            ScoreSpec::RggDegree { r, .. } => r.radius(s, dim),
            ScoreSpec::RggSubgraph { pattern, r } => {
                r.radius(s, dim).map(|rr| (pattern.vertices() - 1) as f64 * rr)
            }
            ScoreSpec::RipsVolume { r, .. } => r.radius(s, dim),
            ScoreSpec::CriticalPoints { r, .. } => r.radius(s, dim).map(|rr| 2.0 * rr),
            _ => None,
        }
    }

    fn needs_colors(&self) -> bool {
        matches!(self, ScoreSpec::ColoredNn { .. })
    }

    fn knn_order(&self) -> Option<usize> {
        match self {
            ScoreSpec::KnnEdge { k, .. }
            | ScoreSpec::KnnDirected { k, .. }
            | ScoreSpec::KnnDegree { k, .. } => Some(*k),
            ScoreSpec::ColoredNn { .. } => Some(1),
            _ => None,
        }
    }
}

/// Forward/reverse k-nearest-neighbor lists for one k, built once per
/// configuration.
#[derive(Debug)]
struct NnGraph {
    k: usize,
    /// Flat `n x k`; row `i` lists the neighbors of point `i`, closest first.
    forward: Vec<u32>,
    /// Points with fewer than k candidates have no defined neighborhood.
    ok: Vec<bool>,
    rev_starts: Vec<u32>,
    rev: Vec<u32>,
}

impl NnGraph {
    fn build(grid: &GridIndex, k: usize) -> NnGraph {
        let n = grid.len();
        let mut forward = vec![u32::MAX; n * k];
        let mut ok = vec![false; n];
        for i in 0..n {
            if let Ok(nbrs) = grid.knn(grid.position(i as u32), k, Some(i as u32)) {
                forward[i * k..(i + 1) * k].copy_from_slice(&nbrs);
                ok[i] = true;
            }
        }
        let mut counts = vec![0u32; n + 1];
        for (i, &okk) in ok.iter().enumerate() {
            if okk {
                for &t in &forward[i * k..(i + 1) * k] {
                    counts[t as usize + 1] += 1;
                }
            }
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let mut rev = vec![0u32; counts[n] as usize];
        let mut cursor = counts.clone();
        for (i, &okk) in ok.iter().enumerate() {
            if okk {
                for &t in &forward[i * k..(i + 1) * k] {
                    rev[cursor[t as usize] as usize] = i as u32;
                    cursor[t as usize] += 1;
                }
            }
        }
        NnGraph { k, forward, ok, rev_starts: counts, rev }
    }

    #[inline]
    fn neighbors(&self, i: u32) -> &[u32] {
        let i = i as usize;
        &self.forward[i * self.k..(i + 1) * self.k]
    }

    #[inline]
    fn reverse(&self, i: u32) -> &[u32] {
        let i = i as usize;
        &self.rev[self.rev_starts[i] as usize..self.rev_starts[i + 1] as usize]
    }

    #[inline]
    fn points_to(&self, from: u32, to: u32) -> bool {
        self.ok[from as usize] && self.neighbors(from).contains(&to)
    }
}

/// Immutable evaluation context: configuration, spatial index, and whatever
/// nearest-neighbor graphs the requested score families need. Build once,
/// share across threads.
pub struct EvalContext<'a> {
    pub cfg: &'a PointConfig,
    grid: GridIndex,
    metric: Metric,
    nn: Vec<NnGraph>,
}

impl<'a> EvalContext<'a> {
    pub fn new(cfg: &'a PointConfig, specs: &[&ScoreSpec]) -> Result<EvalContext<'a>, ScoreError> {
        for spec in specs {
            spec.validate(cfg.window.dim)?;
        }
        if specs.iter().any(|s| s.needs_colors())
            && cfg.points.iter().any(|p| !matches!(p.mark, Mark::Color(_)))
        {
            return Err(ScoreError::UncoloredPoint);
        }
        let positions: Vec<Pos> = cfg.points.iter().map(|p| p.pos).collect();
        let grid = GridIndex::build(&cfg.window, positions);
        let metric = Metric::for_window(&cfg.window);
        let mut ks: Vec<usize> = specs.iter().filter_map(|s| s.knn_order()).collect();
        ks.sort_unstable();
        ks.dedup();
        let nn = ks.iter().map(|&k| NnGraph::build(&grid, k)).collect();
        Ok(EvalContext { cfg, grid, metric, nn })
    }

    pub fn grid(&self) -> &GridIndex {
        &self.grid
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    fn nn_graph(&self, k: usize) -> &NnGraph {
        self.nn
            .iter()
            .find(|g| g.k == k)
            .expect("evaluation context was not prepared for this kNN order")
    }

    #[inline]
    fn pos(&self, id: u32) -> &Pos {
        self.grid.position(id)
    }

    fn s(&self) -> f64 {
        self.cfg.intensity
    }

    fn dim(&self) -> usize {
        self.cfg.window.dim
    }
}

/// Evaluate a score at configuration point `id`. Pure; the value depends only
/// on the configuration, the score parameters, and the configuration's
/// intensity (through the radius rule and dilation prefactor).
pub fn score(spec: &ScoreSpec, ctx: &EvalContext, id: u32) -> Result<f64, ScoreError> {
    let raw = match spec {
        ScoreSpec::Unit => 1.0,
        ScoreSpec::KnnEdge { k, q } => knn_edge(ctx, id, *k, *q),
        ScoreSpec::KnnDirected { k, q } => knn_directed(ctx, id, *k, *q),
        ScoreSpec::KnnDegree { k, j } => knn_degree(ctx, id, *k, *j),
        ScoreSpec::ColoredNn { color } => colored_nn(ctx, id, *color),
        ScoreSpec::RggComponent { k, r } => {
            rgg_component(ctx, id, *k, r.radius(ctx.s(), ctx.dim()).unwrap())
        }
        ScoreSpec::RggDegree { j, r } => {
            rgg_degree(ctx, id, *j, r.radius(ctx.s(), ctx.dim()).unwrap())
        }
        ScoreSpec::RggSubgraph { pattern, r } => {
            rgg_subgraph(ctx, id, pattern, r.radius(ctx.s(), ctx.dim()).unwrap())
        }
        ScoreSpec::RipsVolume { k, r, alpha } => {
            rips_volume(ctx, id, *k, r.radius(ctx.s(), ctx.dim()).unwrap(), *alpha)
        }
        ScoreSpec::CriticalPoints { k, r } => {
            critical_points(ctx, id, *k, r.radius(ctx.s(), ctx.dim()))?
        }
    };
    Ok(raw * spec.prefactor(ctx.s(), ctx.dim()))
}

fn knn_edge(ctx: &EvalContext, id: u32, k: usize, q: f64) -> f64 {
    let g = ctx.nn_graph(k);
    if !g.ok[id as usize] {
        diag::note_degenerate_score();
        return 0.0;
    }
    let x = ctx.pos(id);
    let mut acc = 0.0;
    for &y in g.neighbors(id) {
        let d = ctx.metric.dist(x, ctx.pos(y));
        let w = d.powf(q);
        acc += if g.points_to(y, id) { 0.5 * w } else { w };
    }
    acc
}

fn knn_directed(ctx: &EvalContext, id: u32, k: usize, q: f64) -> f64 {
    let g = ctx.nn_graph(k);
    if !g.ok[id as usize] {
        diag::note_degenerate_score();
        return 0.0;
    }
    let x = ctx.pos(id);
    g.neighbors(id).iter().map(|&y| ctx.metric.dist(x, ctx.pos(y)).powf(q)).sum()
}

fn knn_degree(ctx: &EvalContext, id: u32, k: usize, j: usize) -> f64 {
    let g = ctx.nn_graph(k);
    if !g.ok[id as usize] {
        diag::note_degenerate_score();
        return 0.0;
    }
    let fwd = g.neighbors(id);
    let mut deg = fwd.len();
    for &y in g.reverse(id) {
        if !fwd.contains(&y) {
            deg += 1;
        }
    }
    f64::from(deg == j)
}

fn colored_nn(ctx: &EvalContext, id: u32, color: u16) -> f64 {
    let g = ctx.nn_graph(1);
    if !g.ok[id as usize] {
        diag::note_degenerate_score();
        return 0.0;
    }
    let my = match ctx.cfg.points[id as usize].mark {
        Mark::Color(c) => c,
        _ => unreachable!("context construction validated marks"),
    };
    if my != color {
        return 0.0;
    }
    let fwd = g.neighbors(id);
    let mut half_edges = 0.0;
    let mut count = |y: u32| {
        if let Mark::Color(c) = ctx.cfg.points[y as usize].mark {
            if c == color {
                half_edges += 0.5;
            }
        }
    };
    for &y in fwd {
        count(y);
    }
    for &y in g.reverse(id) {
        if !fwd.contains(&y) {
            count(y);
        }
    }
    half_edges
}

fn rgg_component(ctx: &EvalContext, id: u32, k: usize, r: f64) -> f64 {
    // BFS with early exit once the component exceeds k points.
    let mut members = vec![id];
    let mut frontier = vec![id];
    while let Some(v) = frontier.pop() {
        for w in ctx.grid.range(ctx.pos(v), r, Some(v)) {
            if !members.contains(&w) {
                members.push(w);
                if members.len() > k {
                    return 0.0;
                }
                frontier.push(w);
            }
        }
    }
    if members.len() == k {
        1.0 / k as f64
    } else {
        0.0
    }
}

fn rgg_degree(ctx: &EvalContext, id: u32, j: usize, r: f64) -> f64 {
    f64::from(ctx.grid.range(ctx.pos(id), r, Some(id)).len() == j)
}

fn rgg_subgraph(ctx: &EvalContext, id: u32, pattern: &Pattern, r: f64) -> f64 {
    let np = pattern.vertices();
    let x = ctx.pos(id);
    // Connected copies through `id` live within (np-1) hops, each of length
    // at most r.
    let cands = ctx.grid.range(x, (np - 1) as f64 * r, Some(id));
    let nloc = cands.len() + 1;
    if nloc < np {
        return 0.0;
    }
    // Local adjacency; vertex 0 is the anchor.
    let mut local_pos: Vec<&Pos> = Vec::with_capacity(nloc);
    local_pos.push(x);
    for &c in &cands {
        local_pos.push(ctx.pos(c));
    }
    let r2 = r * r;
    let mut adj = vec![Vec::new(); nloc];
    for a in 0..nloc {
        for b in a + 1..nloc {
            if ctx.metric.dist2(local_pos[a], local_pos[b]) <= r2 {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
    }
    let is_adj = |a: usize, b: usize| adj[a].contains(&b);
    let mut copies = 0u64;
    let mut s_set = vec![0usize];
    let mut blocked = vec![false; nloc];
    blocked[0] = true;
    let ext: Vec<usize> = adj[0].clone();
    for &e in &ext {
        blocked[e] = true;
    }
    enumerate_connected(&adj, np, &mut s_set, &ext, &mut blocked, &mut |s| {
        copies += count_embeddings(pattern, s, &is_adj);
    });
    (copies / pattern.automorphisms()) as f64 / np as f64
}

/// Enumerate each connected vertex set of size `target` containing vertex 0
/// exactly once (extension lists plus an exclusion set).
fn enumerate_connected(
    adj: &[Vec<usize>],
    target: usize,
    s_set: &mut Vec<usize>,
    ext: &[usize],
    blocked: &mut Vec<bool>,
    emit: &mut impl FnMut(&[usize]),
) {
    if s_set.len() == target {
        emit(s_set);
        return;
    }
    for i in 0..ext.len() {
        let u = ext[i];
        let mut newly = Vec::new();
        for &w in &adj[u] {
            if !blocked[w] {
                blocked[w] = true;
                newly.push(w);
            }
        }
        let mut ext2: Vec<usize> = ext[i + 1..].to_vec();
        ext2.extend_from_slice(&newly);
        s_set.push(u);
        enumerate_connected(adj, target, s_set, &ext2, blocked, emit);
        s_set.pop();
        for &w in &newly {
            blocked[w] = false;
        }
    }
}

/// Number of injective maps from the pattern onto exactly the vertex set `s`
/// preserving pattern edges. Divided by the automorphism count this is the
/// number of subgraph copies on that vertex set.
fn count_embeddings(pattern: &Pattern, s: &[usize], is_adj: &dyn Fn(usize, usize) -> bool) -> u64 {
    let np = pattern.vertices();
    debug_assert_eq!(np, s.len());
    let mut perm: Vec<usize> = (0..np).collect();
    let mut count = 0;
    permute(&mut perm, 0, &mut |p| {
        let ok = (0..np).all(|a| {
            (a + 1..np).all(|b| !pattern.has_edge(a, b) || is_adj(s[p[a]], s[p[b]]))
        });
        if ok {
            count += 1;
        }
    });
    count
}

fn rips_volume(ctx: &EvalContext, id: u32, k: usize, r: f64, alpha: f64) -> f64 {
    let x = ctx.pos(id);
    let nbrs = ctx.grid.range(x, r, Some(id));
    if nbrs.len() < k {
        return 0.0;
    }
    let dim = ctx.dim();
    let r2 = r * r;
    // Chart coordinates relative to x keep torus face volumes well defined;
    // adjacency stays in the window metric.
    let chart: Vec<Pos> = nbrs
        .iter()
        .map(|&y| {
            let mut p = [0.0; crate::process::MAX_DIM];
            for a in 0..dim {
                p[a] = ctx.metric.delta(ctx.pos(y), x, a);
            }
            p
        })
        .collect();
    let mut acc = 0.0;
    let mut combo = Vec::with_capacity(k);
    let mut simplex: Vec<Pos> = Vec::with_capacity(k + 1);
    for_each_combo(nbrs.len(), k, &mut combo, 0, &mut |sel| {
        // All chosen neighbors must be pairwise within r.
        for (ai, &a) in sel.iter().enumerate() {
            for &b in &sel[ai + 1..] {
                if ctx.metric.dist2(ctx.pos(nbrs[a]), ctx.pos(nbrs[b])) > r2 {
                    return;
                }
            }
        }
        simplex.clear();
        simplex.push([0.0; crate::process::MAX_DIM]);
        for &a in sel {
            simplex.push(chart[a]);
        }
        let vol = geometry::simplex_volume(&simplex, dim);
        acc += vol.powf(alpha);
    });
    acc / (k + 1) as f64
}

fn for_each_combo(
    n: usize,
    k: usize,
    combo: &mut Vec<usize>,
    start: usize,
    f: &mut impl FnMut(&[usize]),
) {
    if combo.len() == k {
        f(combo);
        return;
    }
    let remaining = k - combo.len();
    for i in start..=n.saturating_sub(remaining) {
        combo.push(i);
        for_each_combo(n, k, combo, i + 1, f);
        combo.pop();
    }
}

fn critical_points(
    ctx: &EvalContext,
    id: u32,
    k: usize,
    radius: Option<f64>,
) -> Result<f64, ScoreError> {
    let n = ctx.cfg.len();
    let cands: Vec<u32> = match radius {
        Some(r) => ctx.grid.range(ctx.pos(id), 2.0 * r, Some(id)),
        None => {
            let cap = INFINITE_CAPS
                .iter()
                .find(|(kk, _)| *kk == k)
                .map(|(_, c)| *c)
                .ok_or_else(|| ScoreError::BadParameter(
                    format!("critical points with infinite radius support k <= 3, got k = {k}"),
                ))?;
            if n > cap {
                return Err(ScoreError::InfiniteRadiusCap { k, cap, n });
            }
            (0..n as u32).filter(|&i| i != id).collect()
        }
    };
    if cands.len() < k {
        return Ok(0.0);
    }
    let dim = ctx.dim();
    let x = ctx.pos(id);
    let chart: Vec<Pos> = cands
        .iter()
        .map(|&y| {
            let mut p = [0.0; crate::process::MAX_DIM];
            for a in 0..dim {
                p[a] = ctx.metric.delta(ctx.pos(y), x, a);
            }
            p
        })
        .collect();
    let mut hits = 0u64;
    let mut combo = Vec::with_capacity(k);
    let mut simplex: Vec<Pos> = Vec::with_capacity(k + 1);
    let mut check = |sel: &[usize]| {
        simplex.clear();
        simplex.push([0.0; crate::process::MAX_DIM]);
        for &a in sel {
            simplex.push(chart[a]);
        }
        let cs = match geometry::circumsphere(&simplex, dim) {
            Ok(cs) => cs,
            Err(_) => return,
        };
        if cs.degenerate || !(cs.radius > 0.0) {
            return;
        }
        if let Some(r) = radius {
            if cs.radius > r {
                return;
            }
        }
        match geometry::center_in_interior(&simplex, &cs.center, dim) {
            Ok(true) => {}
            _ => return,
        }
        // Open-ball emptiness over the whole configuration; generators are
        // excluded by id, everything else must be strictly outside.
        let mut gcenter = *x;
        for a in 0..dim {
            gcenter[a] += cs.center[a];
        }
        gcenter = ctx.cfg.window.reduce(&gcenter);
        let r2 = cs.radius * cs.radius;
        for w in ctx.grid.range(&gcenter, cs.radius, None) {
            if w == id || sel.iter().any(|&a| cands[a] == w) {
                continue;
            }
            if ctx.metric.dist2(&gcenter, ctx.pos(w)) < r2 {
                return;
            }
        }
        hits += 1;
    };
    for_each_combo(cands.len(), k, &mut combo, 0, &mut check);
    Ok(hits as f64 / (k + 1) as f64)
}
