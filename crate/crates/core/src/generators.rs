//! Certified example families and seeded fuzzing inputs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::matcore::{operator_norm, CMatrix, C64, ONE, ZERO};
use crate::tuples::{bdhs_certificate, make_tuple, verify_pn, CertError, OperatorTuple, PnCertificate, TupleError};
use crate::vonneumann::MultiPoly;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("generated certificate was rejected: {0}")]
    CertificateRejected(CertError),
    #[error("tuple hypotheses failed: {0}")]
    HypothesisFailed(CertError),
    #[error(transparent)]
    Tuple(#[from] TupleError),
    #[error("invalid parameters: {0}")]
    Parameters(String),
}

/// Default tolerances for generated tuples.
const COMMUTE_TOL: f64 = 1e-10;
const CONTRACT_TOL: f64 = 1e-10;

/// Lower shift on `C^d`.
pub fn lower_shift(d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| if i == j + 1 { ONE } else { ZERO })
}

/// `(r1·(J ⊗ I), r2·(I ⊗ J))` on `C^{d1·d2}`.
pub fn jordan_pair(d1: usize, d2: usize, r1: f64, r2: f64) -> Result<OperatorTuple, GenError> {
    if d1 == 0 || d2 == 0 {
        return Err(GenError::Parameters("dimensions must be positive".into()));
    }
    if !(r1 > 0.0 && r1 <= 1.0 && r2 > 0.0 && r2 <= 1.0) {
        return Err(GenError::Parameters(format!("radii ({r1}, {r2}) outside (0, 1]")));
    }
    let t1 = lower_shift(d1).kron(&CMatrix::identity(d2)).scale_real(r1);
    let t2 = CMatrix::identity(d1).kron(&lower_shift(d2)).scale_real(r2);
    Ok(make_tuple(vec![t1, t2], COMMUTE_TOL, CONTRACT_TOL)?)
}

/// `(T₁, T₂, T₁^j T₂^k)` with `G₁ = I − T₁^jT₁^{*j}` and
/// `G₂ = T₁^j(I − T₂^kT₂^{*k})T₁^{*j}`.
pub fn product_triple(
    pair: &OperatorTuple,
    j: usize,
    k: usize,
    tol: f64,
) -> Result<(OperatorTuple, PnCertificate), GenError> {
    if pair.n() != 2 || j == 0 || k == 0 {
        return Err(GenError::Parameters("need a pair and j, k ≥ 1".into()));
    }
    let (t1, t2) = (pair.op(1), pair.op(2));
    let dim = pair.dim();
    let id = CMatrix::identity(dim);
    let p1 = t1.pow(j);
    let p2 = t2.pow(k);
    let t3 = p1.matmul(&p2);
    let g1 = &id - &p1.matmul(&p1.adjoint());
    let g2 = p1.matmul(&(&id - &p2.matmul(&p2.adjoint()))).matmul(&p1.adjoint());
    let triple = make_tuple(vec![t1.clone(), t2.clone(), t3], COMMUTE_TOL, CONTRACT_TOL)?;
    let cert = verify_pn(&triple, vec![g1, g2], tol).map_err(GenError::CertificateRejected)?;
    Ok((triple, cert))
}

/// `(T₁, T₂, T_n)` certified by `G₁ = I − T_nT_n*`, `G₂ = 0`.
pub fn bdhs_tuple(pair: &OperatorTuple, tn: &CMatrix, tol: f64) -> Result<(OperatorTuple, PnCertificate), GenError> {
    if pair.n() != 2 {
        return Err(GenError::Parameters("need a pair".into()));
    }
    let mut ops = pair.ops().to_vec();
    ops.push(tn.clone());
    let triple = make_tuple(ops, COMMUTE_TOL, CONTRACT_TOL)?;
    let cert = bdhs_certificate(&triple, tol).map_err(GenError::HypothesisFailed)?;
    Ok((triple, cert))
}

fn gaussian_ish(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Commuting `n`-tuple on `C^d` made of polynomials in one random matrix
/// `X = N + Λ` (strictly lower `N`, diagonal `Λ`), each rescaled to norm
/// `1 − margin`. Deterministic in `seed` (ChaCha8 stream).
pub fn random_candidate(seed: u64, d: usize, n: usize, margin: f64) -> Result<OperatorTuple, GenError> {
    if d == 0 || n == 0 || !(0.0..1.0).contains(&margin) {
        return Err(GenError::Parameters(format!("d = {d}, n = {n}, margin = {margin}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lambda: Vec<C64> = (0..d).map(|_| gaussian_ish(&mut rng).scale(0.5)).collect();
    let x = CMatrix::from_fn(d, d, |i, j| {
        if i > j {
            gaussian_ish(&mut rng).scale(0.5)
        } else if i == j {
            lambda[i]
        } else {
            ZERO
        }
    });
    let x2 = x.matmul(&x);
    let target = 1.0 - margin;
    let mut ops = Vec::with_capacity(n);
    for _ in 0..n {
        let (c0, c1, c2) = (gaussian_ish(&mut rng), gaussian_ish(&mut rng), gaussian_ish(&mut rng));
        let p = &(&CMatrix::identity(d).scale(c0.scale(0.3)) + &x.scale(c1)) + &x2.scale(c2);
        let norm = operator_norm(&p);
        ops.push(if norm > 0.0 { p.scale_real(target / norm) } else { p });
    }
    Ok(make_tuple(ops, COMMUTE_TOL, CONTRACT_TOL)?)
}

/// Random polynomial in `nvars` variables of total degree at most `degree`:
/// each monomial is kept with probability 1/2 with a coefficient uniform in
/// the unit square. Never the zero polynomial.
pub fn random_polynomial(seed: u64, nvars: usize, degree: usize) -> MultiPoly {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut exps: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..nvars {
        exps = exps
            .into_iter()
            .flat_map(|k| {
                let used: usize = k.iter().sum();
                (0..=degree - used).map(move |e| {
                    let mut kk = k.clone();
                    kk.push(e);
                    kk
                })
            })
            .collect();
    }
    loop {
        let mut p = MultiPoly::zero(nvars);
        for k in &exps {
            if rng.gen_bool(0.5) {
                p.add_term(k.clone(), gaussian_ish(&mut rng));
            }
        }
        if !p.terms().is_empty() {
            return p;
        }
    }
}
