//! Dense symmetric linear algebra used by every module.
//!
//! The workhorse is [`jacobi_eigh`], a cyclic Jacobi eigensolver. It is
//! O(n^3) per sweep but deterministic and accurate to near machine
//! precision, which is what makes it usable as the oracle that every other
//! computation in the crate is checked against.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

const MAX_JACOBI_SWEEPS: usize = 100;

/// Maximum absolute asymmetry |a_ij - a_ji| over all pairs.
pub fn max_asymmetry(a: &Array2<f64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((a[[i, j]] - a[[j, i]]).abs());
        }
    }
    worst
}

pub fn frobenius_norm(a: &Array2<f64>) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn offdiag_frobenius(a: &Array2<f64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[[i, j]] * a[[i, j]];
            }
        }
    }
    s.sqrt()
}

/// Flips eigenvector signs so the first coordinate of magnitude above
/// 1e-12 of each column is positive. Keeps outputs reproducible across
/// rotation orders.
pub fn canonicalize_signs(v: &mut Array2<f64>) {
    let (n, k) = v.dim();
    for j in 0..k {
        let mut sign = 1.0;
        for i in 0..n {
            if v[[i, j]].abs() > 1e-12 {
                sign = v[[i, j]].signum();
                break;
            }
        }
        if sign < 0.0 {
            for i in 0..n {
                v[[i, j]] = -v[[i, j]];
            }
        }
    }
}

/// Sign convention for a single vector: first coordinate of magnitude
/// above 1e-12 is made positive.
pub fn canonicalize_signs_vec(v: &mut Array1<f64>) {
    for &x in v.iter() {
        if x.abs() > 1e-12 {
            if x < 0.0 {
                v.mapv_inplace(|y| -y);
            }
            return;
        }
    }
}

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Sweeps rotate every off-diagonal pair in row order until the off-diagonal
/// Frobenius mass drops below `tol` relative to the input Frobenius norm.
/// Returns eigenvalues ascending with orthonormal, sign-canonical
/// eigenvectors as columns.
pub fn jacobi_eigh(m: &Array2<f64>, tol: f64) -> Result<(Array1<f64>, Array2<f64>)> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: m.ncols(),
        });
    }
    let asym = max_asymmetry(m);
    let scale = m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    if asym > 1e-10 * (1.0 + scale) {
        return Err(Error::NotSymmetric(asym));
    }

    let mut a = m.to_owned();
    // Work on the symmetrized copy so tiny input asymmetries cannot drift.
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (a[[i, j]] + a[[j, i]]);
            a[[i, j]] = avg;
            a[[j, i]] = avg;
        }
    }
    let mut v = Array2::<f64>::eye(n);
    let threshold = tol * frobenius_norm(&a).max(f64::MIN_POSITIVE);

    let mut converged = offdiag_frobenius(&a) <= threshold;
    let mut sweeps = 0;
    while !converged {
        if sweeps >= MAX_JACOBI_SWEEPS {
            return Err(Error::NoConvergence(MAX_JACOBI_SWEEPS));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[[p, q]];
                if apq == 0.0 {
                    continue;
                }
                let app = a[[p, p]];
                let aqq = a[[q, q]];
                // Stable rotation angle (Golub & Van Loan).
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for i in 0..n {
                    if i != p && i != q {
                        let aip = a[[i, p]];
                        let aiq = a[[i, q]];
                        a[[i, p]] = c * aip - s * aiq;
                        a[[p, i]] = a[[i, p]];
                        a[[i, q]] = s * aip + c * aiq;
                        a[[q, i]] = a[[i, q]];
                    }
                }
                a[[p, p]] = c * c * app - 2.0 * s * c * apq + s * s * aqq;
                a[[q, q]] = s * s * app + 2.0 * s * c * apq + c * c * aqq;
                a[[p, q]] = 0.0;
                a[[q, p]] = 0.0;

                for i in 0..n {
                    let vip = v[[i, p]];
                    let viq = v[[i, q]];
                    v[[i, p]] = c * vip - s * viq;
                    v[[i, q]] = s * vip + c * viq;
                }
            }
        }
        sweeps += 1;
        converged = offdiag_frobenius(&a) <= threshold;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[[i, i]].total_cmp(&a[[j, j]]));

    let mut values = Array1::<f64>::zeros(n);
    let mut vectors = Array2::<f64>::zeros((n, n));
    for (out, &idx) in order.iter().enumerate() {
        values[out] = a[[idx, idx]];
        for i in 0..n {
            vectors[[i, out]] = v[[i, idx]];
        }
    }
    canonicalize_signs(&mut vectors);
    Ok((values, vectors))
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve_linear(a: &Array2<f64>, b: &Array1<f64>) -> Result<Array1<f64>> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: b.len(),
        });
    }
    let mut m = a.to_owned();
    let mut x = b.to_owned();
    for col in 0..n {
        let mut pivot = col;
        for row in (col + 1)..n {
            if m[[row, col]].abs() > m[[pivot, col]].abs() {
                pivot = row;
            }
        }
        if m[[pivot, col]].abs() < 1e-300 {
            return Err(Error::SingularSystem);
        }
        if pivot != col {
            for j in 0..n {
                m.swap([col, j], [pivot, j]);
            }
            x.swap(col, pivot);
        }
        for row in (col + 1)..n {
            let factor = m[[row, col]] / m[[col, col]];
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                m[[row, j]] -= factor * m[[col, j]];
            }
            x[row] -= factor * x[col];
        }
    }
    for col in (0..n).rev() {
        let mut s = x[col];
        for j in (col + 1)..n {
            s -= m[[col, j]] * x[j];
        }
        x[col] = s / m[[col, col]];
    }
    Ok(x)
}

/// Dense matrix product, row-parallel when the `parallel` feature is on.
pub fn matmul(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    #[cfg(feature = "parallel")]
    {
        let (n, k) = a.dim();
        let m = b.ncols();
        assert_eq!(k, b.nrows(), "inner dimensions must agree");
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut row = vec![0.0; m];
                for l in 0..k {
                    let ail = a[[i, l]];
                    if ail == 0.0 {
                        continue;
                    }
                    for (j, r) in row.iter_mut().enumerate() {
                        *r += ail * b[[l, j]];
                    }
                }
                row
            })
            .collect();
        let mut out = Array2::<f64>::zeros((n, m));
        for (i, row) in rows.into_iter().enumerate() {
            for (j, val) in row.into_iter().enumerate() {
                out[[i, j]] = val;
            }
        }
        out
    }
    #[cfg(not(feature = "parallel"))]
    {
        matmul_seq(a, b)
    }
}

/// Sequential matrix product; the benchmark baseline.
pub fn matmul_seq(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    a.dot(b)
}

/// Largest absolute eigenvalue of a symmetric matrix.
pub fn spectral_norm_sym(a: &Array2<f64>) -> Result<f64> {
    let (values, _) = jacobi_eigh(a, 1e-12)?;
    Ok(values.iter().fold(0.0f64, |acc, v| acc.max(v.abs())))
}

/// Orthonormal basis of the subspace orthogonal to `u`, as the columns of an
/// n x (n-1) matrix. `u` need not be normalized but must be nonzero.
pub fn orthonormal_complement(u: &Array1<f64>) -> Array2<f64> {
    let n = u.len();
    let norm = u.dot(u).sqrt();
    assert!(norm > 0.0, "complement of the zero vector is undefined");
    let unit = u / norm;
    let mut basis: Vec<Array1<f64>> = Vec::with_capacity(n - 1);
    for k in 0..n {
        if basis.len() == n - 1 {
            break;
        }
        let mut cand = Array1::<f64>::zeros(n);
        cand[k] = 1.0;
        let mut w = &cand - &(&unit * unit.dot(&cand));
        for b in &basis {
            let proj = b.dot(&w);
            w = &w - &(b * proj);
        }
        let wn = w.dot(&w).sqrt();
        if wn > 1e-8 {
            basis.push(&w / wn);
        }
    }
    assert_eq!(basis.len(), n - 1, "failed to complete complement basis");
    let mut q = Array2::<f64>::zeros((n, n - 1));
    for (j, b) in basis.iter().enumerate() {
        for i in 0..n {
            q[[i, j]] = b[i];
        }
    }
    q
}

/// Removes the component of `x` along `dir` (which need not be normalized).
pub fn project_out(x: &Array1<f64>, dir: &Array1<f64>) -> Array1<f64> {
    let denom = dir.dot(dir);
    if denom == 0.0 {
        return x.clone();
    }
    x - &(dir * (dir.dot(x) / denom))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use proptest::prelude::*;

    #[test]
    fn diagonal_matrix_is_immediate() {
        let m = Array2::from_diag(&array![3.0, 1.0, 2.0]);
        let (vals, vecs) = jacobi_eigh(&m, 1e-12).unwrap();
        assert_abs_diff_eq!(vals[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(vals[1], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(vals[2], 3.0, epsilon = 1e-14);
        // Axis-aligned eigenvectors, permuted into ascending order.
        assert_abs_diff_eq!(vecs[[1, 0]].abs(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(vecs[[2, 1]].abs(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(vecs[[0, 2]].abs(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn rejects_asymmetric_input() {
        let m = array![[1.0, 2.0], [0.0, 1.0]];
        assert!(matches!(jacobi_eigh(&m, 1e-12), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn solve_matches_known_inverse() {
        let a = array![[4.0, 1.0], [1.0, 3.0]];
        let b = array![1.0, 2.0];
        let x = solve_linear(&a, &b).unwrap();
        let r = a.dot(&x) - &b;
        assert!(r.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn matmul_matches_sequential() {
        let a = Array2::from_shape_fn((17, 13), |(i, j)| (i as f64) - 0.5 * (j as f64));
        let b = Array2::from_shape_fn((13, 9), |(i, j)| (i * j) as f64 / 7.0 - 1.0);
        let p = matmul(&a, &b);
        let q = matmul_seq(&a, &b);
        assert!(frobenius_norm(&(&p - &q)) < 1e-10);
    }

    #[test]
    fn complement_basis_is_orthonormal() {
        let u = array![1.0, 2.0, -1.0, 0.5];
        let q = orthonormal_complement(&u);
        let qtq = q.t().dot(&q);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(qtq[[i, j]], want, epsilon = 1e-12);
            }
        }
        let qtu = q.t().dot(&u);
        assert!(qtu.iter().all(|v| v.abs() < 1e-12));
    }

    proptest! {
        // Oracle soundness: reconstruction and orthogonality on random
        // symmetric matrices.
        #[test]
        fn jacobi_reconstructs_random_symmetric(raw in prop::collection::vec(-1.0f64..1.0, 100)) {
            let n = 10;
            let mut m = Array2::<f64>::zeros((n, n));
            let mut it = raw.into_iter();
            for i in 0..n {
                for j in i..n {
                    let w = it.next().unwrap_or(0.0);
                    m[[i, j]] = w;
                    m[[j, i]] = w;
                }
            }
            let (vals, vecs) = jacobi_eigh(&m, 1e-12).unwrap();
            let lam = Array2::from_diag(&vals);
            let recon = vecs.dot(&lam).dot(&vecs.t());
            prop_assert!(frobenius_norm(&(&recon - &m)) <= 1e-7);
            let gram = vecs.t().dot(&vecs);
            let eye = Array2::<f64>::eye(n);
            prop_assert!(frobenius_norm(&(&gram - &eye)) <= 1e-8);
            for k in 1..n {
                prop_assert!(vals[k] + 1e-12 >= vals[k - 1]);
            }
        }

        #[test]
        fn solve_round_trips(raw in prop::collection::vec(-1.0f64..1.0, 30), b in prop::collection::vec(-1.0f64..1.0, 5)) {
            let n = 5;
            let mut a = Array2::<f64>::zeros((n, n));
            let mut it = raw.into_iter();
            for i in 0..n {
                for j in 0..n {
                    a[[i, j]] = it.next().unwrap_or(0.0);
                }
                a[[i, i]] += 4.0; // diagonally dominant, hence invertible
            }
            let bv = Array1::from_vec(b);
            let x = solve_linear(&a, &bv).unwrap();
            let r = a.dot(&x) - &bv;
            prop_assert!(r.iter().all(|v| v.abs() < 1e-9));
        }
    }
}
