//! Small dense linear algebra: direct elimination with partial pivoting for
//! the tiny systems arising in geometry kernels, and a Jacobi eigensolver for
//! the symmetric covariance matrices (m is at most a handful in practice).

/// Solve `a x = b` in place for an `n x n` row-major system. Returns `false`
/// when a pivot falls below `tol_rel` times the largest initial entry, which
/// callers treat as degeneracy.
pub fn solve_in_place(a: &mut [f64], b: &mut [f64], n: usize, tol_rel: f64) -> bool {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    let scale = a.iter().fold(0.0f64, |m, &x| m.max(x.abs())).max(1e-300);
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if a[row * n + col].abs() > a[pivot * n + col].abs() {
                pivot = row;
            }
        }
        if a[pivot * n + col].abs() < tol_rel * scale {
            return false;
        }
        if pivot != col {
            for j in 0..n {
                a.swap(col * n + j, pivot * n + j);
            }
            b.swap(col, pivot);
        }
        let inv = 1.0 / a[col * n + col];
        for row in col + 1..n {
            let f = a[row * n + col] * inv;
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                a[row * n + j] -= f * a[col * n + j];
            }
            b[row] -= f * b[col];
        }
    }
    for col in (0..n).rev() {
        let mut acc = b[col];
        for j in col + 1..n {
            acc -= a[col * n + j] * b[j];
        }
        b[col] = acc / a[col * n + col];
    }
    true
}

/// Determinant of an `n x n` row-major matrix, destroying its argument.
pub fn det_in_place(a: &mut [f64], n: usize) -> f64 {
    debug_assert_eq!(a.len(), n * n);
    let mut det = 1.0f64;
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if a[row * n + col].abs() > a[pivot * n + col].abs() {
                pivot = row;
            }
        }
        if a[pivot * n + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for j in 0..n {
                a.swap(col * n + j, pivot * n + j);
            }
            det = -det;
        }
        det *= a[col * n + col];
        let inv = 1.0 / a[col * n + col];
        for row in col + 1..n {
            let f = a[row * n + col] * inv;
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                a[row * n + j] -= f * a[col * n + j];
            }
        }
    }
    det
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns `(values, vectors)` with `vectors[k]` the unit eigenvector for
/// `values[k]`, sorted ascending. Deterministic sweep order.
pub fn sym_eigen(mat: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = mat.len();
    let mut a: Vec<f64> = mat.iter().flat_map(|r| r.iter().copied()).collect();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let norm: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off.sqrt() < 1e-14 * norm {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].partial_cmp(&a[j * n + j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&j| (0..n).map(|i| v[i * n + j]).collect())
        .collect();
    (values, vectors)
}

/// `root * root^T == mat` for a positive semi-definite symmetric matrix;
/// eigenvalues in `[clip, 0)` are clipped to zero, anything below `clip`
/// yields `Err(min_eigenvalue)`.
pub fn psd_root(mat: &[Vec<f64>], clip: f64) -> Result<Vec<Vec<f64>>, f64> {
    let n = mat.len();
    let (vals, vecs) = sym_eigen(mat);
    if vals[0] < clip {
        return Err(vals[0]);
    }
    let mut root = vec![vec![0.0; n]; n];
    for (k, &lam) in vals.iter().enumerate() {
        let s = lam.max(0.0).sqrt();
        for i in 0..n {
            root[i][k] = vecs[k][i] * s;
        }
    }
    Ok(root)
}

/// Symmetric inverse square root `mat^{-1/2}`; `Err(min_eigenvalue)` when any
/// eigenvalue is at or below `min_eig`.
pub fn inv_sqrt(mat: &[Vec<f64>], min_eig: f64) -> Result<Vec<Vec<f64>>, f64> {
    let n = mat.len();
    let (vals, vecs) = sym_eigen(mat);
    if vals[0] <= min_eig {
        return Err(vals[0]);
    }
    let mut out = vec![vec![0.0; n]; n];
    for (k, &lam) in vals.iter().enumerate() {
        let w = 1.0 / lam.sqrt();
        for i in 0..n {
            for j in 0..n {
                out[i][j] += vecs[k][i] * vecs[k][j] * w;
            }
        }
    }
    Ok(out)
}

pub fn mat_vec(mat: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    mat.iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_a_known_system() {
        let mut a = vec![2.0, 1.0, -1.0, -3.0, -1.0, 2.0, -2.0, 1.0, 2.0];
        let mut b = vec![8.0, -11.0, -3.0];
        assert!(solve_in_place(&mut a, &mut b, 3, 1e-12));
        let expect = [2.0, 3.0, -1.0];
        for (x, e) in b.iter().zip(expect.iter()) {
            assert!((x - e).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_singular_systems() {
        let mut a = vec![1.0, 2.0, 2.0, 4.0];
        let mut b = vec![1.0, 2.0];
        assert!(!solve_in_place(&mut a, &mut b, 2, 1e-12));
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let mut a = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 10.0];
        let d = det_in_place(&mut a, 3);
        assert!((d - (-3.0)).abs() < 1e-12);
    }

    #[test]
    fn jacobi_recovers_spectrum() {
        // Symmetric with known eigenvalues {1, 3}.
        let m = vec![vec![2.0, 1.0], vec![1.0, 2.0]];
        let (vals, vecs) = sym_eigen(&m);
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
        for (k, lam) in vals.iter().enumerate() {
            let mv = mat_vec(&m, &vecs[k]);
            for i in 0..2 {
                assert!((mv[i] - lam * vecs[k][i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn psd_root_reproduces_matrix() {
        let m = vec![vec![4.0, 2.0], vec![2.0, 3.0]];
        let r = psd_root(&m, -1e-10).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = 0.0;
                for k in 0..2 {
                    acc += r[i][k] * r[j][k];
                }
                assert!((acc - m[i][j]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn inv_sqrt_whitens() {
        let m = vec![vec![4.0, 2.0], vec![2.0, 3.0]];
        let w = inv_sqrt(&m, 1e-12).unwrap();
        // w m w^T should be the identity.
        let mut prod = vec![vec![0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        prod[i][j] += w[i][k] * m[k][l] * w[l][j];
                    }
                }
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((prod[i][j] - expect).abs() < 1e-10);
            }
        }
    }
}
