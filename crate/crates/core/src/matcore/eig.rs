//! Hermitian eigendecomposition by cyclic complex Jacobi rotations, and the
//! spectral helpers built on it.

use super::matrix::{vec_norm, CMatrix, C64, ZERO};
use super::MatError;

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_FLOOR: f64 = 1e-15;

#[derive(Clone, Debug)]
pub struct HermEig {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `j` is the eigenvector for `eigenvalues[j]`.
    pub eigenvectors: CMatrix,
}

impl HermEig {
    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// `V f(Λ) V*`.
    pub fn recompose(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        let vals: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        CMatrix::from_fn(n, n, |i, j| {
            let mut acc = ZERO;
            for (k, &l) in vals.iter().enumerate() {
                if l != 0.0 {
                    acc += v[(i, k)] * v[(j, k)].conj() * l;
                }
            }
            acc
        })
    }
}

pub fn herm_eig(a: &CMatrix, tol: f64) -> Result<HermEig, MatError> {
    if !a.is_square() {
        return Err(MatError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let norm = a.frobenius_norm();
    let defect = a.hermitian_defect();
    if defect > tol * norm.max(1.0) {
        return Err(MatError::NotHermitian { defect });
    }
    let n = a.rows();
    let mut w = a.hermitian_part();
    let mut v = CMatrix::identity(n);
    let threshold = OFF_DIAGONAL_FLOOR * norm;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&w) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut w, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&w) > threshold {
        return Err(MatError::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w[(i, i)].re.total_cmp(&w[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| w[(i, i)].re).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermEig {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(w: &CMatrix) -> f64 {
    let n = w.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += w[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

// Annihilates w[p][q] with G = diag(1, e^{-iφ}) · [[c, s], [-s, c]] acting on
// coordinates (p, q), where φ = arg w[p][q]; then w ← G* w G and v ← v G.
fn rotate(w: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let b = w[(p, q)];
    let babs = b.norm();
    if babs == 0.0 {
        return;
    }
    let phase = b / babs;
    let app = w[(p, p)].re;
    let aqq = w[(q, q)].re;
    let theta = (aqq - app) / (2.0 * babs);
    let t = if theta.is_finite() {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    } else {
        0.0
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let pc = phase.conj();
    let n = w.rows();

    // Columns: w ← w G.
    for k in 0..n {
        let wp = w[(k, p)];
        let wq = w[(k, q)];
        w[(k, p)] = wp * c - wq * pc * s;
        w[(k, q)] = wp * s + wq * pc * c;
        let vp = v[(k, p)];
        let vq = v[(k, q)];
        v[(k, p)] = vp * c - vq * pc * s;
        v[(k, q)] = vp * s + vq * pc * c;
    }
    // Rows: w ← G* w.
    for k in 0..n {
        let wp = w[(p, k)];
        let wq = w[(q, k)];
        w[(p, k)] = wp * c - wq * phase * s;
        w[(q, k)] = wp * s + wq * phase * c;
    }
    w[(p, q)] = ZERO;
    w[(q, p)] = ZERO;
    w[(p, p)] = C64::new(w[(p, p)].re, 0.0);
    w[(q, q)] = C64::new(w[(q, q)].re, 0.0);
}

/// Principal square root of a Hermitian positive semidefinite matrix.
/// Eigenvalues in `[-tol, 0)` are clamped to zero.
pub fn psd_sqrt(a: &CMatrix, tol: f64) -> Result<CMatrix, MatError> {
    let eig = herm_eig(a, tol.max(1e-12))?;
    let min = eig.min();
    if min < -tol {
        return Err(MatError::NotPsd { min_eigenvalue: min });
    }
    Ok(eig.recompose(|l| l.max(0.0).sqrt()))
}

/// Largest singular value, `sqrt(λ_max(A*A))`.
pub fn operator_norm(a: &CMatrix) -> f64 {
    if a.rows() == 0 || a.cols() == 0 {
        return 0.0;
    }
    if a.rows() == 1 || a.cols() == 1 {
        return a.frobenius_norm();
    }
    let gram = if a.rows() < a.cols() {
        a.matmul(&a.adjoint())
    } else {
        a.adjoint().matmul(a)
    };
    match herm_eig(&gram, 1e-8) {
        Ok(eig) => eig.max().max(0.0).sqrt(),
        // Gram matrices are Hermitian by construction; only a sweep-budget
        // failure lands here, and the Frobenius norm is a valid upper bound.
        Err(_) => a.frobenius_norm(),
    }
}

/// Orthonormal basis of the numerical kernel of `a`: eigenvectors `v` of
/// `A*A` with `‖A v‖ ≤ tol·max(1, ‖A‖)`.
pub fn kernel_basis(a: &CMatrix, tol: f64) -> CMatrix {
    let n = a.cols();
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    let threshold = tol * operator_norm(a).max(1.0);
    let gram = a.adjoint().matmul(a);
    let eig = match herm_eig(&gram, 1e-8) {
        Ok(e) => e,
        Err(_) => return CMatrix::zeros(n, 0),
    };
    let kept: Vec<Vec<C64>> = (0..n)
        .map(|j| eig.eigenvectors.col(j))
        .filter(|v| vec_norm(&a.mul_vec(v)) <= threshold)
        .collect();
    CMatrix::from_columns(n, &kept)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn closed_form_2x2(a: f64, d: f64, b: C64) -> (f64, f64) {
        let mid = 0.5 * (a + d);
        let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        (mid - rad, mid + rad)
    }

    fn check_invariants(a: &CMatrix, eig: &HermEig, tol: f64) {
        let recon = eig.recompose(|l| l);
        assert!((a - &recon).frobenius_norm() <= tol * a.frobenius_norm().max(1.0));
        let v = &eig.eigenvectors;
        let gram = v.adjoint().matmul(v);
        assert!((&gram - &CMatrix::identity(v.cols())).frobenius_norm() <= tol);
        assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn identity_and_diagonal() {
        let e = herm_eig(&CMatrix::identity(2), 1e-10).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0]);
        check_invariants(&CMatrix::identity(2), &e, 1e-12);

        let d = CMatrix::diag_real(&[3.0, -1.0]);
        let e = herm_eig(&d, 1e-10).unwrap();
        assert_eq!(e.eigenvalues, vec![-1.0, 3.0]);
    }

    #[test]
    fn two_by_two_against_characteristic_polynomial() {
        let a = CMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let (lo, hi) = closed_form_2x2(2.0, 2.0, C64::new(1.0, 0.0));
        assert_eq!((lo, hi), (1.0, 3.0));
        let e = herm_eig(&a, 1e-10).unwrap();
        assert!((e.eigenvalues[0] - lo).abs() < 1e-14);
        assert!((e.eigenvalues[1] - hi).abs() < 1e-14);

        let b = C64::new(0.3, -1.7);
        let m = CMatrix::from_rows(&[vec![C64::new(0.5, 0.0), b], vec![b.conj(), C64::new(-2.0, 0.0)]]).unwrap();
        let (lo, hi) = closed_form_2x2(0.5, -2.0, b);
        let e = herm_eig(&m, 1e-10).unwrap();
        assert!((e.eigenvalues[0] - lo).abs() < 1e-13);
        assert!((e.eigenvalues[1] - hi).abs() < 1e-13);
        check_invariants(&m, &e, 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(herm_eig(&a, 1e-10), Err(MatError::NotHermitian { .. })));
    }

    #[test]
    fn complex_hermitian_5x5() {
        let b = CMatrix::from_fn(5, 5, |i, j| {
            C64::new(((i * 7 + j * 3) % 5) as f64 - 2.0, ((i + 2 * j) % 3) as f64 - 1.0)
        });
        let a = &b + &b.adjoint();
        let e = herm_eig(&a, 1e-10).unwrap();
        check_invariants(&a, &e, 1e-12);
    }

    #[test]
    fn psd_sqrt_cases() {
        let r = psd_sqrt(&CMatrix::diag_real(&[4.0, 9.0]), 1e-9).unwrap();
        assert!((&r - &CMatrix::diag_real(&[2.0, 3.0])).frobenius_norm() < 1e-14);
        let r = psd_sqrt(&CMatrix::identity(3), 1e-9).unwrap();
        assert!((&r - &CMatrix::identity(3)).frobenius_norm() < 1e-14);

        let a = CMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let r = psd_sqrt(&a, 1e-9).unwrap();
        assert!((&r.matmul(&r) - &a).frobenius_norm() < 1e-12);
        assert!(r.hermitian_defect() < 1e-14);

        let neg = CMatrix::diag_real(&[1.0, -1e-3]);
        assert!(matches!(psd_sqrt(&neg, 1e-9), Err(MatError::NotPsd { .. })));
        // Clamped: tiny negative eigenvalue maps to zero.
        let near = CMatrix::diag_real(&[1.0, -1e-12]);
        let r = psd_sqrt(&near, 1e-9).unwrap();
        assert_eq!(r[(1, 1)], ZERO);
    }

    #[test]
    fn operator_norm_cases() {
        assert!((operator_norm(&CMatrix::diag_real(&[0.5, 1.0 / 3.0])) - 0.5).abs() < 1e-15);
        let shift = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!((operator_norm(&shift) - 1.0).abs() < 1e-15);
        assert_eq!(operator_norm(&CMatrix::zeros(0, 3)), 0.0);
    }

    #[test]
    fn kernel_basis_cases() {
        let k = kernel_basis(&CMatrix::zeros(2, 2), 1e-10);
        assert_eq!(k.cols(), 2);
        assert_eq!(kernel_basis(&CMatrix::identity(2), 1e-10).cols(), 0);
        let k = kernel_basis(&CMatrix::diag_real(&[0.0, 1.0]), 1e-10);
        assert_eq!(k.cols(), 1);
        assert!((k[(0, 0)].norm() - 1.0).abs() < 1e-14);
        assert!(k[(1, 0)].norm() < 1e-14);
    }
}
