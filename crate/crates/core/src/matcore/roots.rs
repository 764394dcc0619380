//! Polynomial roots (Aberth–Ehrlich with Newton polishing) and general
//! eigenvalues through the Faddeev–LeVerrier characteristic polynomial.

use std::f64::consts::TAU;

use super::matrix::{CMatrix, C64, ONE, ZERO};
use super::MatError;

const MAX_ITER: usize = 800;

/// Evaluates `Σ c_k z^k` (ascending coefficients) and its derivative.
pub fn horner(coeffs: &[C64], z: C64) -> (C64, C64) {
    let mut p = ZERO;
    let mut dp = ZERO;
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All roots, with multiplicity, of `Σ coeffs[k] z^k`.
pub fn poly_roots(coeffs: &[C64]) -> Result<Vec<C64>, MatError> {
    let degree = match coeffs.len() {
        0 => return Err(MatError::DegenerateLeadingCoefficient),
        n => n - 1,
    };
    let lead = coeffs[degree];
    if lead.norm() == 0.0 || !lead.re.is_finite() || !lead.im.is_finite() {
        return Err(MatError::DegenerateLeadingCoefficient);
    }
    let monic: Vec<C64> = coeffs.iter().map(|c| c / lead).collect();

    // Exact zero roots deflate off the bottom.
    let zeros = monic.iter().take_while(|c| c.norm() == 0.0).count().min(degree);
    let mut roots = vec![ZERO; zeros];
    let reduced = &monic[zeros..];
    let m = reduced.len() - 1;
    match m {
        0 => return Ok(roots),
        1 => {
            roots.push(-reduced[0]);
            return Ok(roots);
        }
        _ => {}
    }

    // Cauchy-type radius for the starting circle.
    let radius = (0..m)
        .map(|k| reduced[k].norm().powf(1.0 / (m - k) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut z: Vec<C64> = (0..m)
        .map(|k| C64::from_polar(radius, TAU * k as f64 / m as f64 + 0.4))
        .collect();

    for _ in 0..MAX_ITER {
        let mut max_step: f64 = 0.0;
        for k in 0..m {
            let (p, dp) = horner(reduced, z[k]);
            if p == ZERO {
                continue;
            }
            let ratio = p / dp;
            let repulsion: C64 = (0..m)
                .filter(|&j| j != k)
                .map(|j| {
                    let diff = z[k] - z[j];
                    if diff == ZERO {
                        ZERO
                    } else {
                        ONE / diff
                    }
                })
                .sum();
            let step = if dp == ZERO {
                C64::new(1e-8 * (1.0 + z[k].norm()), 0.0)
            } else {
                ratio / (ONE - ratio * repulsion)
            };
            if step.re.is_finite() && step.im.is_finite() {
                z[k] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[k].norm()));
            }
        }
        if max_step <= 1e-15 {
            break;
        }
    }

    for root in z.iter_mut() {
        for _ in 0..2 {
            let (p, dp) = horner(reduced, *root);
            if dp.norm() > 1e-300 {
                let cand = *root - p / dp;
                if horner(reduced, cand).0.norm() < p.norm() {
                    *root = cand;
                }
            }
        }
    }
    roots.extend(z);
    Ok(roots)
}

/// Characteristic polynomial `det(λI − A)` in ascending coefficients, by the
/// Faddeev–LeVerrier recursion.
pub fn charpoly(a: &CMatrix) -> Vec<C64> {
    assert!(a.is_square(), "charpoly of non-square matrix");
    let n = a.rows();
    let mut c = vec![ZERO; n + 1];
    c[n] = ONE;
    let mut m = CMatrix::zeros(n, n);
    let id = CMatrix::identity(n);
    for k in 1..=n {
        m = &a.matmul(&m) + &id.scale(c[n + 1 - k]);
        c[n - k] = -a.matmul(&m).trace() / k as f64;
    }
    c
}

/// Eigenvalues of a general square matrix as characteristic roots. Meant for
/// the small fibres that arise here, not as a general eigensolver.
pub fn eigenvalues_general(a: &CMatrix) -> Result<Vec<C64>, MatError> {
    if a.rows() == 0 {
        return Ok(Vec::new());
    }
    poly_roots(&charpoly(a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted_re(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn simple_roots() {
        let r = sorted_re(poly_roots(&[C64::new(-1.0, 0.0), ZERO, ONE]).unwrap());
        assert!((r[0] + ONE).norm() < 1e-14 && (r[1] - ONE).norm() < 1e-14);
        let r = poly_roots(&[ZERO, ZERO, ONE]).unwrap();
        assert_eq!(r, vec![ZERO, ZERO]);
    }

    #[test]
    fn degenerate_leading() {
        assert_eq!(poly_roots(&[ONE, ZERO]), Err(MatError::DegenerateLeadingCoefficient));
        assert_eq!(poly_roots(&[]), Err(MatError::DegenerateLeadingCoefficient));
        assert_eq!(poly_roots(&[C64::new(5.0, 0.0)]).unwrap(), vec![]);
    }

    #[test]
    fn charpoly_2x2_is_trace_det() {
        let a = CMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let c = charpoly(&a);
        assert!((c[0] - C64::new(-2.0, 0.0)).norm() < 1e-14);
        assert!((c[1] - C64::new(-5.0, 0.0)).norm() < 1e-14);
        assert_eq!(c[2], ONE);
    }

    #[test]
    fn triple_root_is_located() {
        // (z - 0.5)^3
        let c = [C64::new(-0.125, 0.0), C64::new(0.75, 0.0), C64::new(-1.5, 0.0), ONE];
        for r in poly_roots(&c).unwrap() {
            assert!((r - C64::new(0.5, 0.0)).norm() < 1e-4);
            assert!(horner(&c, r).0.norm() < 1e-12);
        }
    }

    #[test]
    fn eigenvalues_of_rotation() {
        let t = 0.3_f64;
        let a = CMatrix::from_real_rows(&[&[t.cos(), -t.sin()], &[t.sin(), t.cos()]]);
        let ev = eigenvalues_general(&a).unwrap();
        for l in ev {
            assert!((l.norm() - 1.0).abs() < 1e-13);
            assert!((l.arg().abs() - t).abs() < 1e-13);
        }
    }
}
