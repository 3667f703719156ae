//! Small dense linear-algebra helpers shared across the crate.
//!
//! Integer matrices are kept exact (Bareiss determinants, cofactor
//! adjugates over `i128`) so that group and coset arithmetic never sees
//! rounding. Complex matrices go through nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type IMat = DMatrix<i64>;
pub type IVec = DVector<i64>;
pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Exact determinant of an integer matrix (Bareiss over `i128`).
pub fn int_det(m: &IMat) -> i128 {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "determinant needs a square matrix");
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| m[(i, j)] as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let swap = (k + 1..n).find(|&i| a[i][k] != 0);
            match swap {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

fn minor_det(m: &IMat, skip_row: usize, skip_col: usize) -> i128 {
    let n = m.nrows();
    let sub = IMat::from_fn(n - 1, n - 1, |i, j| {
        let r = if i < skip_row { i } else { i + 1 };
        let c = if j < skip_col { j } else { j + 1 };
        m[(r, c)]
    });
    int_det(&sub)
}

/// Exact adjugate: `adj(M) * M = det(M) * I`. Cofactor expansion; fine for
/// the small dimensions used here.
pub fn adjugate(m: &IMat) -> DMatrix<i128> {
    let n = m.nrows();
    assert_eq!(n, m.ncols());
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    if n == 1 {
        return DMatrix::from_element(1, 1, 1);
    }
    DMatrix::from_fn(n, n, |i, j| {
        // adj[i][j] = cofactor C_ji
        let c = minor_det(m, j, i);
        if (i + j) % 2 == 0 {
            c
        } else {
            -c
        }
    })
}

/// Exact inverse of a unimodular integer matrix (|det| = 1).
pub fn unimodular_inverse(m: &IMat) -> Option<IMat> {
    let d = int_det(m);
    if d != 1 && d != -1 {
        return None;
    }
    let adj = adjugate(m);
    Some(IMat::from_fn(m.nrows(), m.ncols(), |i, j| {
        (adj[(i, j)] * d) as i64
    }))
}

pub fn int_to_f64(m: &IMat) -> DMatrix<f64> {
    m.map(|e| e as f64)
}

pub fn ivec_to_f64(v: &IVec) -> DVector<f64> {
    v.map(|e| e as f64)
}

/// Integer matrix power (small exponents; entries must stay within i64).
pub fn int_pow(m: &IMat, e: u32) -> IMat {
    let n = m.nrows();
    let mut acc = IMat::identity(n, n);
    for _ in 0..e {
        acc = &acc * m;
    }
    acc
}

/// Moduli of the eigenvalues of a real matrix.
pub fn eigen_moduli_real(m: &DMatrix<f64>) -> Vec<f64> {
    m.clone().complex_eigenvalues().iter().map(|z| z.norm()).collect()
}

/// Moduli of the eigenvalues of a complex matrix, computed through the
/// real 2n x 2n embedding [[Re, -Im], [Im, Re]] whose spectrum is
/// spec(M) together with its conjugates.
pub fn eigen_moduli(m: &CMat) -> Vec<f64> {
    let n = m.nrows();
    let emb = DMatrix::<f64>::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, bj) = (i % n, j % n);
        match (i / n, j / n) {
            (0, 0) | (1, 1) => m[(bi, bj)].re,
            (0, 1) => -m[(bi, bj)].im,
            (1, 0) => m[(bi, bj)].im,
            _ => unreachable!(),
        }
    });
    // Each modulus appears twice; keep one copy of each pair after sorting.
    let mut all = eigen_moduli_real(&emb);
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    all.into_iter().step_by(2).collect()
}

/// Operator 2-norm (largest singular value).
pub fn op_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

pub fn op_norm_real(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest absolute entry.
pub fn max_abs_entry(m: &CMat) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Inverse square root of a Hermitian positive definite matrix.
/// Returns `None` when the smallest eigenvalue is below `rank_tol` times
/// the largest (treated as singular).
pub fn hermitian_inv_sqrt(m: &CMat, rank_tol: f64) -> Option<CMat> {
    let eig = m.clone().symmetric_eigen();
    let max = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    if max <= 0.0 {
        return None;
    }
    if eig.eigenvalues.iter().any(|&l| l <= rank_tol * max) {
        return None;
    }
    let n = m.nrows();
    let mut scaled = eig.eigenvectors.clone();
    for j in 0..n {
        let f = Complex64::new(1.0 / eig.eigenvalues[j].sqrt(), 0.0);
        for i in 0..n {
            scaled[(i, j)] *= f;
        }
    }
    Some(&scaled * eig.eigenvectors.adjoint())
}

/// Hermitian transpose helper for readability at call sites.
pub fn adjoint(m: &CMat) -> CMat {
    m.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_adjugate_are_exact() {
        let m = IMat::from_row_slice(2, 2, &[1, 1, -1, 1]);
        assert_eq!(int_det(&m), 2);
        let adj = adjugate(&m);
        // adj * m = det * I
        let prod = DMatrix::<i128>::from_fn(2, 2, |i, j| {
            (0..2).map(|k| adj[(i, k)] * m[(k, j)] as i128).sum()
        });
        assert_eq!(prod, DMatrix::<i128>::from_row_slice(2, 2, &[2, 0, 0, 2]));
    }

    #[test]
    fn det_singular() {
        let m = IMat::from_row_slice(2, 2, &[2, 4, 1, 2]);
        assert_eq!(int_det(&m), 0);
    }

    #[test]
    fn unimodular_inverse_roundtrip() {
        let m = IMat::from_row_slice(2, 2, &[0, -1, 1, 0]);
        let inv = unimodular_inverse(&m).unwrap();
        assert_eq!(&m * &inv, IMat::identity(2, 2));
    }

    #[test]
    fn eigen_moduli_complex_matches_known() {
        // diag(2i, 0.5) has moduli {2, 0.5}
        let m = CMat::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 2.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.5, 0.0),
            ],
        );
        let mut mods = eigen_moduli(&m);
        mods.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((mods[0] - 0.5).abs() < 1e-12);
        assert!((mods[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn op_norm_of_diagonal() {
        let m = CMat::from_row_slice(
            2,
            2,
            &[
                Complex64::new(3.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(-1.0, 0.0),
            ],
        );
        assert!((op_norm(&m) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn inv_sqrt_of_hermitian() {
        let m = CMat::from_row_slice(
            2,
            2,
            &[
                Complex64::new(2.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(2.0, 0.0),
            ],
        );
        let s = hermitian_inv_sqrt(&m, 1e-12).unwrap();
        // s * m * s = I
        let prod = &s * &m * &s;
        let id = CMat::identity(2, 2);
        assert!(max_abs_entry(&(prod - id)) < 1e-10);
    }
}
