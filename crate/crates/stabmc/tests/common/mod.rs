//! Brute-force oracles for the score catalog, written independently of the
//! library's evaluation paths: naive all-pairs scans instead of grid queries,
//! Cayley-Menger determinants instead of Gram volumes, classical planar
//! circumcenter formulas instead of affine-hull solves.

use stabmc::process::{Boundary, Mark, PointConfig, Pos, WindowSpec};
use stabmc::scores::Pattern;

pub fn dist2(w: &WindowSpec, a: &Pos, b: &Pos) -> f64 {
    let mut acc = 0.0;
    for i in 0..w.dim {
        let mut d = (a[i] - b[i]).abs();
        if w.boundary == Boundary::Torus {
            let len = w.hi[i] - w.lo[i];
            d %= len;
            if d > 0.5 * len {
                d = len - d;
            }
        }
        acc += d * d;
    }
    acc
}

pub fn dist(w: &WindowSpec, a: &Pos, b: &Pos) -> f64 {
    dist2(w, a, b).sqrt()
}

fn lex_less(w: &WindowSpec, a: &Pos, b: &Pos, ia: usize, ib: usize) -> bool {
    for i in 0..w.dim {
        if a[i] != b[i] {
            return a[i] < b[i];
        }
    }
    ia < ib
}

/// All other points ordered by distance from point `i`, ties broken by
/// coordinates then id.
pub fn nn_order(cfg: &PointConfig, i: usize) -> Vec<usize> {
    let w = &cfg.window;
    let x = &cfg.points[i].pos;
    let mut others: Vec<usize> = (0..cfg.len()).filter(|&j| j != i).collect();
    others.sort_by(|&a, &b| {
        let da = dist2(w, x, &cfg.points[a].pos);
        let db = dist2(w, x, &cfg.points[b].pos);
        da.partial_cmp(&db).unwrap().then_with(|| {
            if lex_less(w, &cfg.points[a].pos, &cfg.points[b].pos, a, b) {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Greater
            }
        })
    });
    others
}

pub fn knn_of(cfg: &PointConfig, i: usize, k: usize) -> Vec<usize> {
    nn_order(cfg, i).into_iter().take(k).collect()
}

/// Undirected kNN-graph edge set.
fn knn_edges(cfg: &PointConfig, k: usize) -> Vec<(usize, usize)> {
    let n = cfg.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in knn_of(cfg, i, k) {
            let e = (i.min(j), i.max(j));
            if !edges.contains(&e) {
                edges.push(e);
            }
        }
    }
    edges
}

pub fn oracle_knn_edge(cfg: &PointConfig, i: usize, k: usize, q: f64) -> f64 {
    if cfg.len() <= k {
        return 0.0;
    }
    let w = &cfg.window;
    let x = &cfg.points[i].pos;
    let mut acc = 0.0;
    for j in knn_of(cfg, i, k) {
        let mutual = knn_of(cfg, j, k).contains(&i);
        let d = dist(w, x, &cfg.points[j].pos).powf(q);
        acc += if mutual { d / 2.0 } else { d };
    }
    acc
}

pub fn oracle_knn_directed(cfg: &PointConfig, i: usize, k: usize, q: f64, s: f64) -> f64 {
    if cfg.len() <= k {
        return 0.0;
    }
    let w = &cfg.window;
    let x = &cfg.points[i].pos;
    let base: f64 = knn_of(cfg, i, k)
        .into_iter()
        .map(|j| dist(w, x, &cfg.points[j].pos).powf(q))
        .sum();
    base * s.powf(q / w.dim as f64)
}

pub fn oracle_knn_degree(cfg: &PointConfig, i: usize, k: usize, j: usize) -> f64 {
    if cfg.len() <= k {
        return 0.0;
    }
    let deg = knn_edges(cfg, k).iter().filter(|&&(a, b)| a == i || b == i).count();
    f64::from(deg == j)
}

pub fn oracle_colored_nn(cfg: &PointConfig, i: usize, color: u16) -> f64 {
    if cfg.len() <= 1 {
        return 0.0;
    }
    let my = match cfg.points[i].mark {
        Mark::Color(c) => c,
        _ => panic!("uncolored point in colored oracle"),
    };
    if my != color {
        return 0.0;
    }
    knn_edges(cfg, 1)
        .iter()
        .filter(|&&(a, b)| a == i || b == i)
        .filter(|&&(a, b)| {
            let other = if a == i { b } else { a };
            matches!(cfg.points[other].mark, Mark::Color(c) if c == color)
        })
        .count() as f64
        / 2.0
}

/// Component sizes by union-find over all pairs.
pub fn component_sizes(cfg: &PointConfig, r: f64) -> Vec<usize> {
    let n = cfg.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for a in 0..n {
        for b in a + 1..n {
            if dist2(&cfg.window, &cfg.points[a].pos, &cfg.points[b].pos) <= r * r {
                let ra = find(&mut parent, a);
                let rb = find(&mut parent, b);
                if ra != rb {
                    parent[ra] = rb;
                }
            }
        }
    }
    let mut sizes = vec![0usize; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        sizes[root] += 1;
    }
    (0..n).map(|i| sizes[find(&mut parent, i)]).collect()
}

pub fn oracle_rgg_component(cfg: &PointConfig, i: usize, k: usize, r: f64) -> f64 {
    if component_sizes(cfg, r)[i] == k {
        1.0 / k as f64
    } else {
        0.0
    }
}

pub fn oracle_rgg_degree(cfg: &PointConfig, i: usize, j: usize, r: f64) -> f64 {
    let deg = (0..cfg.len())
        .filter(|&b| b != i)
        .filter(|&b| dist2(&cfg.window, &cfg.points[i].pos, &cfg.points[b].pos) <= r * r)
        .count();
    f64::from(deg == j)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 1 {
        return vec![vec![0]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for slot in 0..n {
            let mut q: Vec<usize> = p.iter().map(|&v| if v >= slot { v + 1 } else { v }).collect();
            q.insert(0, slot);
            out.push(q);
        }
    }
    out
}

fn embeddings(pat: &Pattern, adj: &dyn Fn(usize, usize) -> bool, verts: &[usize]) -> usize {
    let np = pat.vertices();
    permutations(np)
        .into_iter()
        .filter(|perm| {
            (0..np).all(|a| {
                (a + 1..np).all(|b| !pat.has_edge(a, b) || adj(verts[perm[a]], verts[perm[b]]))
            })
        })
        .count()
}

fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if items.len() < k {
        return vec![];
    }
    let mut out = Vec::new();
    for (idx, &first) in items.iter().enumerate() {
        for mut tail in subsets(&items[idx + 1..], k - 1) {
            let mut set = vec![first];
            set.append(&mut tail);
            out.push(set);
        }
    }
    out
}

/// Number of subgraph copies of the pattern containing point `i`, divided by
/// the pattern size, by exhaustive subset enumeration.
pub fn oracle_rgg_subgraph(cfg: &PointConfig, i: usize, pat: &Pattern, r: f64) -> f64 {
    let np = pat.vertices();
    let n = cfg.len();
    if n < np {
        return 0.0;
    }
    let adj = |a: usize, b: usize| {
        dist2(&cfg.window, &cfg.points[a].pos, &cfg.points[b].pos) <= r * r
    };
    let aut = embeddings(pat, &adj_self(pat), &(0..np).collect::<Vec<_>>());
    let others: Vec<usize> = (0..n).filter(|&a| a != i).collect();
    let mut copies = 0usize;
    for mut set in subsets(&others, np - 1) {
        set.push(i);
        copies += embeddings(pat, &adj, &set);
    }
    (copies / aut) as f64 / np as f64
}

fn adj_self(pat: &Pattern) -> impl Fn(usize, usize) -> bool + '_ {
    move |a, b| pat.has_edge(a, b)
}

/// Cayley-Menger determinant volume of the simplex on `verts`.
pub fn cayley_menger_volume(cfg: &PointConfig, verts: &[usize]) -> f64 {
    let k = verts.len() - 1;
    let n = k + 2;
    let mut m = vec![vec![0.0f64; n]; n];
    for i in 1..n {
        m[0][i] = 1.0;
        m[i][0] = 1.0;
    }
    for a in 0..=k {
        for b in 0..=k {
            m[a + 1][b + 1] =
                dist2(&cfg.window, &cfg.points[verts[a]].pos, &cfg.points[verts[b]].pos);
        }
    }
    let det = dense_det(&mut m);
    let sign = if (k + 1) % 2 == 0 { 1.0 } else { -1.0 };
    let mut kfact = 1.0f64;
    for i in 1..=k {
        kfact *= i as f64;
    }
    let v2 = sign * det / (2f64.powi(k as i32) * kfact * kfact);
    if v2 <= 0.0 {
        0.0
    } else {
        v2.sqrt()
    }
}

fn dense_det(m: &mut [Vec<f64>]) -> f64 {
    let n = m.len();
    let mut det = 1.0;
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if m[row][col].abs() > m[pivot][col].abs() {
                pivot = row;
            }
        }
        if m[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for c in col..n {
                m[row][c] -= f * m[col][c];
            }
        }
    }
    det
}

pub fn oracle_rips_volume(
    cfg: &PointConfig,
    i: usize,
    k: usize,
    r: f64,
    alpha: f64,
    s: f64,
) -> f64 {
    let n = cfg.len();
    let others: Vec<usize> = (0..n).filter(|&a| a != i).collect();
    let ok = |a: usize, b: usize| {
        dist2(&cfg.window, &cfg.points[a].pos, &cfg.points[b].pos) <= r * r
    };
    let mut acc = 0.0;
    for set in subsets(&others, k) {
        let mut verts = set.clone();
        verts.push(i);
        let clique =
            (0..verts.len()).all(|a| (a + 1..verts.len()).all(|b| ok(verts[a], verts[b])));
        if clique {
            acc += cayley_menger_volume(cfg, &verts).powf(alpha);
        }
    }
    acc / (k + 1) as f64 * s.powf(alpha * k as f64 / cfg.window.dim as f64)
}

/// Planar circumcenter by the classical determinant formula; `None` for
/// (near-)collinear triples.
fn circumcenter_2d(a: &Pos, b: &Pos, c: &Pos) -> Option<(f64, f64, f64)> {
    let ax = a[0] - c[0];
    let ay = a[1] - c[1];
    let bx = b[0] - c[0];
    let by = b[1] - c[1];
    let d = 2.0 * (ax * by - ay * bx);
    if d.abs() < 1e-12 {
        return None;
    }
    let a2 = ax * ax + ay * ay;
    let b2 = bx * bx + by * by;
    let ux = (a2 * by - b2 * ay) / d + c[0];
    let uy = (b2 * ax - a2 * bx) / d + c[1];
    let r = ((ux - a[0]).powi(2) + (uy - a[1]).powi(2)).sqrt();
    Some((ux, uy, r))
}

/// Strict interior test for a planar triangle via signed areas.
fn inside_triangle_2d(p: (f64, f64), a: &Pos, b: &Pos, c: &Pos) -> bool {
    let sign = |p1: (f64, f64), p2: &Pos, p3: &Pos| {
        (p1.0 - p3[0]) * (p2[1] - p3[1]) - (p2[0] - p3[0]) * (p1.1 - p3[1])
    };
    let d1 = sign(p, a, b);
    let d2 = sign(p, b, c);
    let d3 = sign(p, c, a);
    (d1 > 1e-12 && d2 > 1e-12 && d3 > 1e-12) || (d1 < -1e-12 && d2 < -1e-12 && d3 < -1e-12)
}

/// Index-k critical point score in the plane (hard windows), k in {1, 2}:
/// exhaustive subsets, midpoint/classical circumcenters, strict open-ball
/// emptiness.
pub fn oracle_critical_2d(cfg: &PointConfig, i: usize, k: usize, r: Option<f64>) -> f64 {
    assert!(cfg.window.boundary == Boundary::Hard && cfg.window.dim == 2);
    let n = cfg.len();
    let others: Vec<usize> = (0..n).filter(|&a| a != i).collect();
    let mut hits = 0usize;
    for set in subsets(&others, k) {
        let (cx, cy, rad) = match k {
            1 => {
                let a = &cfg.points[i].pos;
                let b = &cfg.points[set[0]].pos;
                let cx = 0.5 * (a[0] + b[0]);
                let cy = 0.5 * (a[1] + b[1]);
                let rad = 0.5 * ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
                // Midpoint of a nondegenerate segment is always interior.
                (cx, cy, rad)
            }
            2 => {
                let a = &cfg.points[i].pos;
                let b = &cfg.points[set[0]].pos;
                let c = &cfg.points[set[1]].pos;
                match circumcenter_2d(a, b, c) {
                    Some((cx, cy, rad)) if inside_triangle_2d((cx, cy), a, b, c) => (cx, cy, rad),
                    _ => continue,
                }
            }
            _ => panic!("planar oracle supports k in {{1, 2}}"),
        };
        if !(rad > 0.0) {
            continue;
        }
        if let Some(rmax) = r {
            if rad > rmax {
                continue;
            }
        }
        let empty = (0..n)
            .filter(|&w| w != i && !set.contains(&w))
            .all(|w| {
                let p = &cfg.points[w].pos;
                (p[0] - cx).powi(2) + (p[1] - cy).powi(2) >= rad * rad
            });
        if empty {
            hits += 1;
        }
    }
    hits as f64 / (k + 1) as f64
}
