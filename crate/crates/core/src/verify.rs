//! Residuals of every dilation identity at a finite degree cap.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::Tolerances;
use crate::hardy::{
    effective_cap, geom_tail, mult_symbol, mult_symbol_adjoint, mult_z_adjoint, z_op, CanonicalIsometry, EmbedJ,
    HardyElement, HardyError, IndexBox,
};
use crate::matcore::{operator_norm, vec_norm, CMatrix, C64, ONE, ZERO};
use crate::realization::{
    build_generating_unitary, build_generating_unitary_ordered, inner_check, iota_matrix, phi_taylor,
    schur_identity_residual, transfer_eval, y_matrix, GeneratedRealization, RealizationError,
};
use crate::tuples::{OperatorTuple, PnCertificate, TupleError};

/// Residual floor for identities that hold exactly in exact arithmetic.
pub const EXACT_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Hardy(#[from] HardyError),
    #[error(transparent)]
    Realization(#[from] RealizationError),
    #[error(transparent)]
    Tuple(#[from] TupleError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub residual: f64,
    pub bound: f64,
    pub passed: bool,
}

impl IdentityCheck {
    fn new(name: impl Into<String>, residual: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            bound,
            passed: residual <= bound,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    /// Requested degree cap; raised to the nilpotency order when needed.
    pub cap: usize,
    pub grid: usize,
    pub schur_points: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            cap: crate::hardy::DEFAULT_CAP,
            grid: 32,
            schur_points: 100,
            seed: 0,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub cap: usize,
    pub spectral_radius: f64,
    /// Geometric tail for unit vectors at this cap.
    pub tail: f64,
    pub defect_rank: usize,
    pub partition: Vec<usize>,
    pub completion_dims: (usize, usize),
    pub singular_points: usize,
    pub checks: Vec<IdentityCheck>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn basis(dim: usize, j: usize) -> Vec<C64> {
    let mut e = vec![ZERO; dim];
    e[j] = ONE;
    e
}

fn diff_norm(a: &[C64], b: &[C64]) -> f64 {
    let d: Vec<C64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    vec_norm(&d)
}

/// Multi-indices whose every component is below the cap, so a single `Z`
/// shift stays inside the box.
fn shiftable(grid: IndexBox) -> impl Iterator<Item = usize> {
    (0..grid.len()).filter(move |&l| (0..grid.vars()).all(|v| grid.component(l, v) < grid.cap()))
}

/// Everything the identities need, built once per tuple.
pub struct DilationContext<'a> {
    pub tuple: &'a OperatorTuple,
    pub cert: &'a PnCertificate,
    pub hat: OperatorTuple,
    pub built: GeneratedRealization,
    pub pi: CanonicalIsometry,
    pub j: EmbedJ,
    pub iota: CMatrix,
    pub y: CMatrix,
    pub cap: usize,
}

impl<'a> DilationContext<'a> {
    pub fn new(tuple: &'a OperatorTuple, cert: &'a PnCertificate, cap: usize, tol: f64) -> Result<Self, VerifyError> {
        let hat = tuple.hat(tuple.n())?;
        let cap = effective_cap(hat.ops(), cap);
        let built = build_generating_unitary(tuple, cert, tol)?;
        let pi = CanonicalIsometry::new(&hat, &cert.defect, &cert.defect_frame, cap)?;
        let j = EmbedJ::new(&hat, cap)?;
        Ok(Self {
            iota: iota_matrix(cert),
            y: y_matrix(cert, tuple),
            tuple,
            cert,
            hat,
            built,
            pi,
            j,
            cap,
        })
    }

    pub fn tail(&self) -> f64 {
        self.pi.tail_bound()
    }

    fn dim(&self) -> usize {
        self.tuple.dim()
    }

    /// `max_{h, k} ‖(ΠT_i*h)_k − (M_{z_i}*Πh)_k‖` over `k` with `k + e_i`
    /// inside the box.
    pub fn intertwining_residual(&self, i: usize) -> f64 {
        let ti = self.tuple.op(i);
        let grid = self.pi.grid();
        let mut worst: f64 = 0.0;
        for h in 0..self.dim() {
            let e = basis(self.dim(), h);
            let lhs = self.pi.apply(&ti.adjoint_mul_vec(&e));
            let rhs = mult_z_adjoint(i, &self.pi.apply(&e));
            for l in (0..grid.len()).filter(|&l| grid.up(l, i - 1).is_some()) {
                worst = worst.max(diff_norm(lhs.coeff(l), rhs.coeff(l)));
            }
        }
        worst
    }

    /// `max_{h, k} ‖(M_Φ*Πh)_k − (ΠT_n*h)_k‖` for a given realization.
    pub fn lifting_residual_for(&self, built: &GeneratedRealization) -> f64 {
        let phi = phi_taylor(&built.realization, self.cap);
        let tn = self.tuple.last();
        (0..self.dim())
            .map(|h| {
                let e = basis(self.dim(), h);
                let lhs = mult_symbol_adjoint(&phi, &self.pi.apply(&e)).expect("Φ acts on the defect space");
                let rhs = self.pi.apply(&tn.adjoint_mul_vec(&e));
                lhs.max_coeff_distance(&rhs)
            })
            .fold(0.0, f64::max)
    }

    pub fn lifting_residual(&self) -> f64 {
        self.lifting_residual_for(&self.built)
    }

    /// Same residual for a completion built from a reversed basis order.
    pub fn permuted_lifting_residual(&self, tol: f64) -> Result<f64, VerifyError> {
        let (e, f) = self.built.completion_dims;
        let order: Vec<usize> = (0..e + f).rev().collect();
        let other = build_generating_unitary_ordered(self.tuple, self.cert, tol, &order)?;
        Ok(self.lifting_residual_for(&other))
    }

    /// `max_h ‖(I ⊗ frame*D)Jh − Πh‖`.
    pub fn id4_residual(&self) -> f64 {
        (0..self.dim())
            .map(|h| {
                let e = basis(self.dim(), h);
                let lhs = self.j.apply(&e).apply_pointwise(self.pi.defect_in_frame());
                lhs.max_coeff_distance(&self.pi.apply(&e))
            })
            .fold(0.0, f64::max)
    }

    /// `J*(I ⊗ ι*) g`.
    fn j_iota_star(&self, g: &HardyElement) -> Vec<C64> {
        self.j.adjoint(&g.apply_pointwise(&self.iota.adjoint()))
    }

    fn state_monomial(&self, lin: usize, xi: usize) -> HardyElement {
        let grid = self.pi.grid();
        let ftot = self.iota.rows();
        HardyElement::monomial(grid, &grid.multi(lin), &basis(ftot, xi))
    }

    /// Both identities `J*(I⊗ι*)Z(z^p⊗ξ) = T^pY*ξ` and
    /// `J*(I⊗ι*)(z^p⊗ξ) = T^pι*ξ` over shiftable monomials.
    pub fn lemma_j_iota_residual(&self) -> f64 {
        let grid = self.pi.grid();
        let part = self.cert.partition();
        let ftot = self.iota.rows();
        let mut worst: f64 = 0.0;
        for l in shiftable(grid) {
            let tp = &self.pi.monomials()[l];
            for xi in 0..ftot {
                let f = self.state_monomial(l, xi);
                let zf = z_op(&part, &f).expect("partition matches ι");
                let e = basis(ftot, xi);
                let shifted = diff_norm(&self.j_iota_star(&zf), &tp.mul_vec(&self.y.adjoint_mul_vec(&e)));
                let plain = diff_norm(&self.j_iota_star(&f), &tp.mul_vec(&self.iota.adjoint_mul_vec(&e)));
                worst = worst.max(shifted).max(plain);
            }
        }
        worst
    }

    /// `Π*(z^p ⊗ m) = T^p D·frame m` with `Π*` taken as the adjoint of the
    /// assembled matrix of `Π`.
    pub fn lemma_pi_adjoint_residual(&self) -> f64 {
        let grid = self.pi.grid();
        let e = self.pi.coeff_dim();
        let pim = self.pi.matrix();
        let df = self.cert.defect.matmul(&self.cert.defect_frame);
        let mut worst: f64 = 0.0;
        for l in 0..grid.len() {
            let p = grid.multi(l);
            let tp = self.hat.monomial(&p);
            for m in 0..e {
                let f = HardyElement::monomial(grid, &p, &basis(e, m));
                let lhs = pim.adjoint_mul_vec(f.as_slice());
                let rhs = tp.matmul(&df).col(m);
                worst = worst.max(diff_norm(&lhs, &rhs));
            }
        }
        worst
    }

    /// `J*(I⊗ι*)[I − Z(I⊗D*)] = Π*(I⊗C*)` over shiftable monomials.
    pub fn lemma_resolvent_residual(&self) -> f64 {
        let grid = self.pi.grid();
        let part = self.cert.partition();
        let ftot = self.iota.rows();
        let r = &self.built.realization;
        let ds = r.d.adjoint();
        let cs = r.c.adjoint();
        let mut worst: f64 = 0.0;
        for l in shiftable(grid) {
            for xi in 0..ftot {
                let f = self.state_monomial(l, xi);
                let zdf = z_op(&part, &f.apply_pointwise(&ds)).expect("partition matches ι");
                let lhs = self.j_iota_star(&f.sub(&zdf));
                let rhs = self.pi.adjoint(&f.apply_pointwise(&cs));
                worst = worst.max(diff_norm(&lhs, &rhs));
            }
        }
        worst
    }

    /// `J*(I⊗ι*)Z(I⊗B*)(1⊗m) = Π*M_Φ̃(1⊗m)` with `Φ̃ = Φ − A*`.
    pub fn lemma_transfer_residual(&self) -> f64 {
        let grid = self.pi.grid();
        let part = self.cert.partition();
        let r = &self.built.realization;
        let phi_tilde = phi_taylor(r, self.cap).without_constant();
        let e = self.pi.coeff_dim();
        let bs = r.b.adjoint();
        (0..e)
            .map(|m| {
                let em = basis(e, m);
                let f = HardyElement::constant(grid, &bs.mul_vec(&em));
                let lhs = self.j_iota_star(&z_op(&part, &f).expect("partition matches ι"));
                let g = mult_symbol(&phi_tilde, &HardyElement::constant(grid, &em)).expect("Φ̃ acts on 𝓓");
                diff_norm(&lhs, &self.pi.adjoint(&g))
            })
            .fold(0.0, f64::max)
    }
}

/// Uniform points with every `|z_i| ≤ 0.95`.
pub fn random_interior_points(seed: u64, vars: usize, count: usize) -> Vec<Vec<C64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (0..vars)
                .map(|_| {
                    C64::from_polar(
                        0.95 * rng.gen::<f64>().sqrt(),
                        rng.gen_range(0.0..std::f64::consts::TAU),
                    )
                })
                .collect()
        })
        .collect()
}

/// Runs the full identity suite on a certified tuple.
pub fn verify_dilation(
    tuple: &OperatorTuple,
    cert: &PnCertificate,
    cfg: &VerifyConfig,
) -> Result<VerificationReport, VerifyError> {
    let tol = cfg.tolerances.cert;
    let ctx = DilationContext::new(tuple, cert, cfg.cap, tol)?;
    let tail = ctx.tail();
    let tail_bound = tail + EXACT_FLOOR;
    let r = &ctx.built.realization;
    let mut checks = vec![
        IdentityCheck::new("generating_identity", ctx.built.generating_residual, 1e-9),
        IdentityCheck::new("unitarity", ctx.built.unitarity_residual, 1e-10),
        IdentityCheck::new("pi_isometry_defect", ctx.pi.isometry_defect(), tail_bound),
    ];
    for i in 1..tuple.n() {
        checks.push(IdentityCheck::new(
            format!("intertwining_z{i}"),
            ctx.intertwining_residual(i),
            EXACT_FLOOR,
        ));
    }
    let lifting = ctx.lifting_residual();
    let lifting_bound = tail + 1e-9;
    checks.push(IdentityCheck::new("lifting", lifting, lifting_bound));
    let permuted = ctx.permuted_lifting_residual(tol)?;
    checks.push(IdentityCheck::new(
        "lifting_permuted_completion",
        permuted,
        lifting_bound,
    ));
    // Each residual is within the tail of zero, so they differ by at most twice it.
    checks.push(IdentityCheck::new(
        "lifting_completion_change",
        (permuted - lifting).abs(),
        2.0 * tail + 1e-9,
    ));
    checks.push(IdentityCheck::new("id4", ctx.id4_residual(), EXACT_FLOOR));
    checks.push(IdentityCheck::new(
        "lemma_j_iota",
        ctx.lemma_j_iota_residual(),
        tail_bound,
    ));
    checks.push(IdentityCheck::new(
        "lemma_pi_adjoint",
        ctx.lemma_pi_adjoint_residual(),
        EXACT_FLOOR,
    ));
    checks.push(IdentityCheck::new(
        "lemma_resolvent",
        ctx.lemma_resolvent_residual(),
        tail_bound,
    ));
    checks.push(IdentityCheck::new(
        "lemma_transfer",
        ctx.lemma_transfer_residual(),
        tail_bound,
    ));

    let points = random_interior_points(cfg.seed, r.vars(), cfg.schur_points);
    let mut schur: f64 = 0.0;
    let mut contract: f64 = 0.0;
    for z in &points {
        schur = schur.max(schur_identity_residual(r, z)?);
        contract = contract.max(operator_norm(&transfer_eval(r, z)?));
    }
    checks.push(IdentityCheck::new("schur_identity", schur, 1e-9));
    checks.push(IdentityCheck::new(
        "transfer_contractive",
        (contract - 1.0).max(0.0),
        1e-9,
    ));
    let inner = inner_check(r, cfg.grid);
    checks.push(IdentityCheck::new("inner", inner.max_deviation, 1e-7));
    checks.push(IdentityCheck::new(
        "inner_singular_fraction",
        inner.singular_points as f64 / inner.points as f64,
        0.01,
    ));

    Ok(VerificationReport {
        cap: ctx.cap,
        spectral_radius: ctx.pi.spectral_radius(),
        tail,
        defect_rank: cert.defect_rank(),
        partition: cert.partition(),
        completion_dims: ctx.built.completion_dims,
        singular_points: inner.singular_points,
        checks,
    })
}

/// `geom_tail` for a unit vector, exposed for reports.
pub fn unit_tail(rho: f64, cap: usize, dim: usize) -> f64 {
    geom_tail(rho, cap, 1.0, dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{jordan_pair, product_triple};
    use crate::tuples::{make_tuple, verify_pn};

    #[test]
    fn zero_triple_suite() {
        let z = CMatrix::zeros(2, 2);
        let t = make_tuple(vec![z.clone(), z.clone(), z.clone()], 1e-10, 1e-10).unwrap();
        let cert = verify_pn(&t, vec![CMatrix::identity(2), z], 1e-8).unwrap();
        let cfg = VerifyConfig {
            cap: 2,
            grid: 8,
            schur_points: 10,
            ..VerifyConfig::default()
        };
        let rep = verify_dilation(&t, &cert, &cfg).unwrap();
        assert!(rep.all_passed(), "{rep:#?}");
        assert_eq!(rep.check("generating_identity").unwrap().residual, 0.0);
    }

    #[test]
    fn nilpotent_product_triple_suite() {
        let pair = jordan_pair(2, 2, 0.9, 0.9).unwrap();
        let (t, cert) = product_triple(&pair, 1, 1, 1e-8).unwrap();
        let cfg = VerifyConfig {
            cap: 3,
            grid: 8,
            schur_points: 20,
            ..VerifyConfig::default()
        };
        let rep = verify_dilation(&t, &cert, &cfg).unwrap();
        assert!(rep.all_passed(), "{rep:#?}");
        assert_eq!(rep.tail, 0.0);
        for c in &rep.checks {
            if c.name != "inner_singular_fraction" {
                assert!(c.residual < 1e-10, "{c:?}");
            }
        }
    }

    #[test]
    fn small_cap_on_normal_tuple_reports_tail() {
        // Diagonal tuple: Π is isometric only in the limit, so the defect
        // at N = 1 is visible but stays under the geometric tail.
        let d1 = CMatrix::diag_real(&[0.3, 0.1]);
        let d2 = CMatrix::diag_real(&[0.2, 0.4]);
        let d3 = CMatrix::zeros(2, 2);
        let t = make_tuple(vec![d1.clone(), d2.clone(), d3], 1e-10, 1e-10).unwrap();
        let id = CMatrix::identity(2);
        let cert = verify_pn(&t, vec![id, CMatrix::zeros(2, 2)], 1e-8).unwrap();
        let cfg = VerifyConfig {
            cap: 1,
            grid: 8,
            schur_points: 5,
            ..VerifyConfig::default()
        };
        let rep = verify_dilation(&t, &cert, &cfg).unwrap();
        let iso = rep.check("pi_isometry_defect").unwrap();
        assert!(iso.residual > 1e-6);
        assert!(rep.all_passed(), "{rep:#?}");
    }
}
