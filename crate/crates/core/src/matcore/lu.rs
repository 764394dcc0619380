use super::matrix::{CMatrix, C64, ONE, ZERO};
use super::MatError;

/// Relative pivot size below which a matrix is treated as singular.
const SINGULAR_PIVOT: f64 = 1e-13;

struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
    singular: bool,
}

fn factorize(a: &CMatrix) -> Lu {
    let n = a.rows();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    let mut singular = false;
    for k in 0..n {
        let (piv, pmag) =
            (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmag <= SINGULAR_PIVOT * scale {
            singular = true;
            continue;
        }
        if piv != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(piv, j)];
                lu[(piv, j)] = t;
            }
            perm.swap(k, piv);
        }
        let d = lu[(k, k)];
        for i in (k + 1)..n {
            let f = lu[(i, k)] / d;
            lu[(i, k)] = f;
            if f == ZERO {
                continue;
            }
            for j in (k + 1)..n {
                let u = lu[(k, j)];
                lu[(i, j)] -= f * u;
            }
        }
    }
    Lu { lu, perm, singular }
}

impl Lu {
    #[allow(clippy::needless_range_loop)]
    fn solve_into(&self, rhs: &[C64], out: &mut [C64]) {
        let n = self.lu.rows();
        for i in 0..n {
            let mut v = rhs[self.perm[i]];
            for j in 0..i {
                v -= self.lu[(i, j)] * out[j];
            }
            out[i] = v;
        }
        for i in (0..n).rev() {
            let mut v = out[i];
            for j in (i + 1)..n {
                v -= self.lu[(i, j)] * out[j];
            }
            out[i] = v / self.lu[(i, i)];
        }
    }
}

/// Determinant by partially pivoted elimination.
pub fn det(a: &CMatrix) -> C64 {
    assert!(a.is_square(), "det of non-square matrix");
    let n = a.rows();
    let mut lu = a.clone();
    let mut acc = ONE;
    for k in 0..n {
        let (piv, pmag) =
            (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmag == 0.0 {
            return ZERO;
        }
        if piv != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(piv, j)];
                lu[(piv, j)] = t;
            }
            acc = -acc;
        }
        let d = lu[(k, k)];
        acc *= d;
        for i in (k + 1)..n {
            let f = lu[(i, k)] / d;
            for j in (k + 1)..n {
                let u = lu[(k, j)];
                lu[(i, j)] -= f * u;
            }
        }
    }
    acc
}

pub fn inverse(a: &CMatrix) -> Result<CMatrix, MatError> {
    if !a.is_square() {
        return Err(MatError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let f = factorize(a);
    if f.singular {
        return Err(MatError::Singular);
    }
    let mut out = CMatrix::zeros(n, n);
    let mut e = vec![ZERO; n];
    let mut x = vec![ZERO; n];
    for j in 0..n {
        e.iter_mut().for_each(|z| *z = ZERO);
        e[j] = ONE;
        f.solve_into(&e, &mut x);
        out.set_col(j, &x);
    }
    Ok(out)
}

/// `(I − D·Ez)^{-1}`, the resolvent factor of a transfer function.
pub fn inv_resolvent(d: &CMatrix, ez: &CMatrix) -> Result<CMatrix, MatError> {
    let n = d.rows();
    let m = &CMatrix::identity(n) - &d.matmul(ez);
    inverse(&m).map_err(|e| match e {
        MatError::Singular => MatError::SingularResolvent,
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_cases() {
        assert_eq!(det(&CMatrix::identity(3)), ONE);
        let d = CMatrix::diag(&[C64::new(2.0, 0.0), C64::new(0.0, 3.0)]);
        assert!((det(&d) - C64::new(0.0, 6.0)).norm() < 1e-15);
        let s = CMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert_eq!(det(&s), ZERO);
    }

    #[test]
    fn resolvent_cases() {
        let x = inv_resolvent(&CMatrix::zeros(2, 2), &CMatrix::identity(2)).unwrap();
        assert_eq!(x, CMatrix::identity(2));
        let half = CMatrix::diag_real(&[0.5]);
        let x = inv_resolvent(&half, &half).unwrap();
        assert!((x[(0, 0)].re - 4.0 / 3.0).abs() < 1e-15);
        let err = inv_resolvent(&CMatrix::identity(2), &CMatrix::identity(2));
        assert_eq!(err, Err(MatError::SingularResolvent));
    }

    #[test]
    fn inverse_round_trip() {
        let a = CMatrix::from_fn(4, 4, |i, j| {
            C64::new(if i == j { 3.0 } else { 0.3 * (i as f64 - j as f64) }, 0.1 * j as f64)
        });
        let inv = inverse(&a).unwrap();
        assert!((&a.matmul(&inv) - &CMatrix::identity(4)).frobenius_norm() < 1e-13);
    }
}
