//! Unitary colligations built from a class certificate and the transfer
//! function `Φ(z) = A* + C*E(z)(I − D*E(z))^{-1}B*` of `U*`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hardy::{IndexBox, SymbolSeries};
use crate::matcore::{
    eigenvalues_general, herm_eig, inv_resolvent, operator_norm, unitary_completion_ordered, vec_norm, CMatrix,
    MatError, C64,
};
use crate::tuples::{OperatorTuple, PnCertificate};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RealizationError {
    #[error("domain and image frames are not isometric (Gram residual {residual:e})")]
    IsometryDefect { residual: f64 },
    #[error("block shapes are inconsistent: {0}")]
    Shape(String),
    #[error("point has {got} coordinates, expected {expected}")]
    Arity { expected: usize, got: usize },
    #[error("matrix is not a contraction (norm {norm})")]
    NotContraction { norm: f64 },
    #[error("resolvent I - D*E(z) is singular")]
    SingularResolvent,
    #[error(transparent)]
    Mat(MatError),
}

impl From<MatError> for RealizationError {
    fn from(e: MatError) -> Self {
        match e {
            MatError::SingularResolvent => RealizationError::SingularResolvent,
            other => RealizationError::Mat(other),
        }
    }
}

/// Blocks of `U = [[A, B], [C, D]]` on `𝓓 ⊕ (⊕𝓕_i)`; block `i` of the
/// partition is multiplied by `z_i` in `E(z)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferRealization {
    pub a: CMatrix,
    pub b: CMatrix,
    pub c: CMatrix,
    pub d: CMatrix,
    pub partition: Vec<usize>,
}

impl TransferRealization {
    pub fn from_blocks(
        a: CMatrix,
        b: CMatrix,
        c: CMatrix,
        d: CMatrix,
        partition: Vec<usize>,
    ) -> Result<Self, RealizationError> {
        let e = a.rows();
        let f: usize = partition.iter().sum();
        let ok = a.shape() == (e, e) && b.shape() == (e, f) && c.shape() == (f, e) && d.shape() == (f, f);
        if !ok {
            return Err(RealizationError::Shape(format!(
                "A {:?}, B {:?}, C {:?}, D {:?} with partition {:?}",
                a.shape(),
                b.shape(),
                c.shape(),
                d.shape(),
                partition
            )));
        }
        if partition.is_empty() {
            return Err(RealizationError::Shape("partition has no blocks".into()));
        }
        Ok(Self { a, b, c, d, partition })
    }

    /// Splits a unitary on `C^e ⊕ C^f`.
    pub fn from_unitary(u: &CMatrix, e: usize, partition: Vec<usize>) -> Result<Self, RealizationError> {
        let n = u.rows();
        if !u.is_square() || e > n {
            return Err(RealizationError::Shape(format!("unitary {:?} with e = {e}", u.shape())));
        }
        Self::from_blocks(
            u.block(0, e, 0, e),
            u.block(0, e, e, n),
            u.block(e, n, 0, e),
            u.block(e, n, e, n),
            partition,
        )
    }

    /// `dim 𝓓`.
    pub fn defect_dim(&self) -> usize {
        self.a.rows()
    }

    /// `dim 𝓕`.
    pub fn state_dim(&self) -> usize {
        self.d.rows()
    }

    pub fn vars(&self) -> usize {
        self.partition.len()
    }

    pub fn unitary(&self) -> CMatrix {
        CMatrix::vstack(&[
            &CMatrix::hstack(&[&self.a, &self.b]),
            &CMatrix::hstack(&[&self.c, &self.d]),
        ])
    }

    /// `max(‖U*U − I‖, ‖UU* − I‖)`.
    pub fn unitarity_residual(&self) -> f64 {
        let u = self.unitary();
        let id = CMatrix::identity(u.rows());
        let left = operator_norm(&(&u.adjoint().matmul(&u) - &id));
        let right = operator_norm(&(&u.matmul(&u.adjoint()) - &id));
        left.max(right)
    }

    /// `E(z) = ⊕ z_i I_{𝓕_i}`.
    pub fn e_matrix(&self, z: &[C64]) -> Result<CMatrix, RealizationError> {
        if z.len() != self.vars() {
            return Err(RealizationError::Arity {
                expected: self.vars(),
                got: z.len(),
            });
        }
        let diag: Vec<C64> = self
            .partition
            .iter()
            .zip(z)
            .flat_map(|(&size, &zi)| std::iter::repeat_n(zi, size))
            .collect();
        Ok(CMatrix::diag(&diag))
    }

    /// Projection onto block `i` (0-based) of `𝓕`.
    pub fn block_projection(&self, i: usize) -> CMatrix {
        let start: usize = self.partition[..i].iter().sum();
        let end = start + self.partition[i];
        let diag: Vec<f64> = (0..self.state_dim())
            .map(|k| if (start..end).contains(&k) { 1.0 } else { 0.0 })
            .collect();
        CMatrix::diag_real(&diag)
    }
}

/// A generating unitary together with its construction diagnostics.
#[derive(Clone, Debug)]
pub struct GeneratedRealization {
    pub realization: TransferRealization,
    /// `max_h ‖U(Dh, YH) − (DT_n*h, ιh)‖` over the standard basis.
    pub generating_residual: f64,
    pub unitarity_residual: f64,
    /// `(dim 𝓓, dim 𝓕)`; no minimality is claimed.
    pub completion_dims: (usize, usize),
}

/// `ι h = (frame_i* F_i h)_i`, block column in the certificate frames.
pub fn iota_matrix(cert: &PnCertificate) -> CMatrix {
    let blocks: Vec<CMatrix> = cert
        .f
        .iter()
        .zip(&cert.f_frames)
        .map(|(fi, fr)| fr.adjoint().matmul(fi))
        .collect();
    stack_or_empty(&blocks, cert.defect.rows())
}

/// `Y h = (frame_i* F_i T_i* h)_i`.
pub fn y_matrix(cert: &PnCertificate, tuple: &OperatorTuple) -> CMatrix {
    let blocks: Vec<CMatrix> = cert
        .f
        .iter()
        .zip(&cert.f_frames)
        .enumerate()
        .map(|(i, (fi, fr))| fr.adjoint().matmul(fi).matmul(&tuple.ops()[i].adjoint()))
        .collect();
    stack_or_empty(&blocks, cert.defect.rows())
}

fn stack_or_empty(blocks: &[CMatrix], cols: usize) -> CMatrix {
    let refs: Vec<&CMatrix> = blocks.iter().filter(|b| b.rows() > 0).collect();
    if refs.is_empty() {
        CMatrix::zeros(0, cols)
    } else {
        CMatrix::vstack(&refs)
    }
}

/// Builds `U` with `U(Dh, Yh) = (DT_n*h, ιh)` for every `h`, completing the
/// partial isometry deterministically.
pub fn build_generating_unitary(
    tuple: &OperatorTuple,
    cert: &PnCertificate,
    tol: f64,
) -> Result<GeneratedRealization, RealizationError> {
    let total = cert.defect_rank() + cert.partition().iter().sum::<usize>();
    let order: Vec<usize> = (0..total).collect();
    build_generating_unitary_ordered(tuple, cert, tol, &order)
}

/// [`build_generating_unitary`] with the complement completed in basis `order`.
pub fn build_generating_unitary_ordered(
    tuple: &OperatorTuple,
    cert: &PnCertificate,
    tol: f64,
    order: &[usize],
) -> Result<GeneratedRealization, RealizationError> {
    let n = tuple.n();
    if cert.f.len() != n - 1 || cert.defect.rows() != tuple.dim() {
        return Err(RealizationError::Shape("certificate does not match tuple".into()));
    }
    let dframe = cert.defect_frame.adjoint().matmul(&cert.defect);
    let iota = iota_matrix(cert);
    let y = y_matrix(cert, tuple);
    let domain = CMatrix::vstack(&[&dframe, &y]);
    let image = CMatrix::vstack(&[&dframe.matmul(&tuple.last().adjoint()), &iota]);
    let e = dframe.rows();
    let ambient = domain.rows();

    let u = unitary_completion_ordered(&domain, &image, ambient, tol, order).map_err(|err| match err {
        MatError::NotIsometric { gram_residual } => RealizationError::IsometryDefect {
            residual: gram_residual,
        },
        other => RealizationError::from(other),
    })?;
    let generating_residual = (0..domain.cols())
        .map(|j| {
            let lhs = u.mul_vec(&domain.col(j));
            let diff: Vec<C64> = lhs.iter().zip(image.col(j)).map(|(a, b)| a - b).collect();
            vec_norm(&diff)
        })
        .fold(0.0, f64::max);
    let realization = TransferRealization::from_unitary(&u, e, cert.partition())?;
    let unitarity_residual = realization.unitarity_residual();
    Ok(GeneratedRealization {
        completion_dims: (e, ambient - e),
        realization,
        generating_residual,
        unitarity_residual,
    })
}

/// `Φ(z) = A* + C*E(z)(I − D*E(z))^{-1}B*`.
pub fn transfer_eval(r: &TransferRealization, z: &[C64]) -> Result<CMatrix, RealizationError> {
    let ez = r.e_matrix(z)?;
    let res = inv_resolvent(&r.d.adjoint(), &ez)?;
    let tail = r.c.adjoint().matmul(&ez).matmul(&res).matmul(&r.b.adjoint());
    Ok(&r.a.adjoint() + &tail)
}

/// `‖(I − Φ*Φ) − B(I − E*D)^{-1}(I − E*E)(I − D*E)^{-1}B*‖` at `z`.
pub fn schur_identity_residual(r: &TransferRealization, z: &[C64]) -> Result<f64, RealizationError> {
    let phi = transfer_eval(r, z)?;
    let ez = r.e_matrix(z)?;
    let res = inv_resolvent(&r.d.adjoint(), &ez)?;
    let e = r.defect_dim();
    let f = r.state_dim();
    let lhs = &CMatrix::identity(e) - &phi.adjoint().matmul(&phi);
    let middle = &CMatrix::identity(f) - &ez.adjoint().matmul(&ez);
    let rhs =
        r.b.matmul(&res.adjoint())
            .matmul(&middle)
            .matmul(&res)
            .matmul(&r.b.adjoint());
    Ok(operator_norm(&(&lhs - &rhs)))
}

/// `e^{2πi j/M}` for `j < M`.
pub fn circle_grid(m: usize) -> Vec<C64> {
    (0..m)
        .map(|j| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / m as f64))
        .collect()
}

/// Every point of the `M^{vars}` torus grid, last coordinate fastest.
pub fn torus_points(vars: usize, m: usize) -> Vec<Vec<C64>> {
    let circle = circle_grid(m);
    let mut points = vec![Vec::new()];
    for _ in 0..vars {
        points = points
            .into_iter()
            .flat_map(|p| {
                circle.iter().map(move |&c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    points
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InnerReport {
    pub max_deviation: f64,
    pub points: usize,
    pub singular_points: usize,
}

/// `max ‖Φ(ζ)*Φ(ζ) − I‖` over the torus grid, skipping singular resolvents.
pub fn inner_check(r: &TransferRealization, m: usize) -> InnerReport {
    let points = torus_points(r.vars(), m);
    let id = CMatrix::identity(r.defect_dim());
    let mut max_deviation: f64 = 0.0;
    let mut singular_points = 0;
    for z in &points {
        match transfer_eval(r, z) {
            Ok(phi) => {
                let dev = operator_norm(&(&phi.adjoint().matmul(&phi) - &id));
                max_deviation = max_deviation.max(dev);
            }
            Err(_) => singular_points += 1,
        }
    }
    InnerReport {
        max_deviation,
        points: points.len(),
        singular_points,
    }
}

/// Splitting `C^d = H₀ ⊕ H₁` with `H₀` the largest reducing subspace on
/// which the contraction acts unitarily.
#[derive(Clone, Debug)]
pub struct CnuDecomposition {
    /// Orthonormal basis of `H₀`.
    pub h0: CMatrix,
    /// Compression to `H₀`, unitary.
    pub unitary_part: CMatrix,
    /// Orthonormal basis of `H₁`.
    pub h1: CMatrix,
    /// Compression to `H₁`, completely non-unitary.
    pub cnu_part: CMatrix,
    /// `max(‖P₀AP₁‖, ‖P₁AP₀‖)`.
    pub off_block_residual: f64,
    /// `‖W*W − I‖` of the unitary part.
    pub unitary_residual: f64,
    /// Largest eigenvalue modulus of the cnu part, 0 when `H₁ = {0}`.
    pub cnu_spectral_radius: f64,
}

impl CnuDecomposition {
    pub fn h0_dim(&self) -> usize {
        self.h0.cols()
    }
}

/// `H₀ = ∩_{m ≤ d} ker(I − A^{*m}A^m) ∩ ker(I − A^mA^{*m})`, read off as the
/// null space of the sum of these positive defects.
pub fn cnu_decomposition(a: &CMatrix, tol: f64) -> Result<CnuDecomposition, RealizationError> {
    if !a.is_square() {
        return Err(RealizationError::Shape(format!("{:?} is not square", a.shape())));
    }
    let norm = operator_norm(a);
    if norm > 1.0 + tol {
        return Err(RealizationError::NotContraction { norm });
    }
    let dim = a.rows();
    let id = CMatrix::identity(dim);
    let mut sum = CMatrix::zeros(dim, dim);
    let mut p = id.clone();
    for _ in 0..dim {
        p = p.matmul(a);
        sum = &sum + &(&id - &p.adjoint().matmul(&p));
        sum = &sum + &(&id - &p.matmul(&p.adjoint()));
    }
    let eig = herm_eig(&sum.hermitian_part(), 1e-8)?;
    let cut = tol * (2 * dim).max(1) as f64;
    let (mut zero, mut rest) = (Vec::new(), Vec::new());
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam <= cut {
            zero.push(eig.eigenvectors.col(k));
        } else {
            rest.push(eig.eigenvectors.col(k));
        }
    }
    let h0 = CMatrix::from_columns(dim, &zero);
    let h1 = CMatrix::from_columns(dim, &rest);
    let unitary_part = h0.adjoint().matmul(a).matmul(&h0);
    let cnu_part = h1.adjoint().matmul(a).matmul(&h1);
    let off_block_residual =
        operator_norm(&h0.adjoint().matmul(a).matmul(&h1)).max(operator_norm(&h1.adjoint().matmul(a).matmul(&h0)));
    let unitary_residual = if h0.cols() == 0 {
        0.0
    } else {
        operator_norm(&(&unitary_part.adjoint().matmul(&unitary_part) - &CMatrix::identity(h0.cols())))
    };
    let cnu_spectral_radius = if h1.cols() == 0 {
        0.0
    } else {
        eigenvalues_general(&cnu_part)?
            .iter()
            .map(|l| l.norm())
            .fold(0.0, f64::max)
    };
    Ok(CnuDecomposition {
        h0,
        unitary_part,
        h1,
        cnu_part,
        off_block_residual,
        unitary_residual,
        cnu_spectral_radius,
    })
}

/// Taylor coefficients of `Φ` on the box `[0, N]^{vars}`, from
/// `X_k = δ_{k0}B* + Σ_i D*P_iX_{k−e_i}` and
/// `Φ_k = δ_{k0}A* + Σ_i C*P_iX_{k−e_i}`.
pub fn phi_taylor(r: &TransferRealization, cap: usize) -> SymbolSeries {
    let grid = IndexBox::new(r.vars(), cap);
    let e = r.defect_dim();
    let f = r.state_dim();
    let ds = r.d.adjoint();
    let cs = r.c.adjoint();
    let proj: Vec<CMatrix> = (0..r.vars()).map(|i| r.block_projection(i)).collect();
    let d_p: Vec<CMatrix> = proj.iter().map(|p| ds.matmul(p)).collect();
    let c_p: Vec<CMatrix> = proj.iter().map(|p| cs.matmul(p)).collect();
    let mut x: Vec<CMatrix> = Vec::with_capacity(grid.len());
    let mut phi: Vec<CMatrix> = Vec::with_capacity(grid.len());
    for l in 0..grid.len() {
        let (mut xk, mut pk) = if l == 0 {
            (r.b.adjoint(), r.a.adjoint())
        } else {
            (CMatrix::zeros(f, e), CMatrix::zeros(e, e))
        };
        for var in 0..grid.vars() {
            if let Some(prev) = grid.down(l, var) {
                xk = &xk + &d_p[var].matmul(&x[prev]);
                pk = &pk + &c_p[var].matmul(&x[prev]);
            }
        }
        x.push(xk);
        phi.push(pk);
    }
    SymbolSeries::new(grid, phi).expect("coefficients match the box")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{ONE, ZERO};
    use crate::tuples::{make_tuple, verify_pn};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn zero_triple_realization() -> GeneratedRealization {
        let z = CMatrix::zeros(2, 2);
        let t = make_tuple(vec![z.clone(), z.clone(), z.clone()], 1e-10, 1e-10).unwrap();
        let cert = verify_pn(&t, vec![CMatrix::identity(2), z], 1e-8).unwrap();
        build_generating_unitary(&t, &cert, 1e-8).unwrap()
    }

    /// `U` = rotation on `C ⊕ C` with `A = cos θ`, single variable.
    fn rotation_realization(theta: f64) -> TransferRealization {
        let (s, co) = theta.sin_cos();
        let u = CMatrix::from_real_rows(&[&[co, -s], &[s, co]]);
        TransferRealization::from_unitary(&u, 1, vec![1]).unwrap()
    }

    #[test]
    fn zero_triple_swaps() {
        let g = zero_triple_realization();
        assert_eq!(g.generating_residual, 0.0);
        assert!(g.unitarity_residual < 1e-14);
        assert_eq!(g.completion_dims, (2, 2));
        assert_eq!(g.realization.partition, vec![2, 0]);
        // (h, 0) ↦ (0, h): A = 0 and C is the identity.
        assert!(g.realization.a.max_abs() < 1e-15);
        assert!((&g.realization.c - &CMatrix::identity(2)).max_abs() < 1e-15);
    }

    #[test]
    fn corrupted_certificate_is_rejected() {
        let z = CMatrix::zeros(2, 2);
        let t = make_tuple(vec![z.clone(), z.clone(), z.clone()], 1e-10, 1e-10).unwrap();
        let cert = PnCertificate::assemble(&t, vec![CMatrix::identity(2).scale_real(1.1), z], 1e-8).unwrap();
        assert!(matches!(
            build_generating_unitary(&t, &cert, 1e-8),
            Err(RealizationError::IsometryDefect { .. })
        ));
    }

    #[test]
    fn transfer_at_origin_and_decoupled() {
        let g = zero_triple_realization();
        let r = &g.realization;
        let phi = transfer_eval(r, &[ZERO, ZERO]).unwrap();
        assert_eq!(phi, r.a.adjoint());

        let a = CMatrix::diag(&[c(0.0, 1.0)]);
        let dec = TransferRealization::from_blocks(
            a.clone(),
            CMatrix::zeros(1, 1),
            CMatrix::zeros(1, 1),
            CMatrix::identity(1),
            vec![1],
        )
        .unwrap();
        for z in [c(0.3, 0.1), c(-0.9, 0.0)] {
            assert_eq!(transfer_eval(&dec, &[z]).unwrap(), a.adjoint());
            assert_eq!(schur_identity_residual(&dec, &[z]).unwrap(), 0.0);
        }
        assert_eq!(inner_check(&dec, 16).max_deviation, 0.0);
    }

    #[test]
    fn transfer_matches_neumann_series() {
        let r = rotation_realization(0.7);
        let z = c(0.3, 0.2);
        let phi = transfer_eval(&r, &[z]).unwrap()[(0, 0)];
        let (a, b, cc, d) = (r.a[(0, 0)], r.b[(0, 0)], r.c[(0, 0)], r.d[(0, 0)]);
        let mut sum = a.conj();
        let mut term = cc.conj() * z * b.conj();
        for _ in 0..200 {
            sum += term;
            term *= d.conj() * z;
        }
        assert!((sum - phi).norm() < 1e-12);
    }

    #[test]
    fn scalar_inner_function() {
        // Φ(z) = cos θ + sin²θ·z/(1 − cos θ·z)... a Möbius map, unimodular on 𝕋.
        let r = rotation_realization(1.1);
        let rep = inner_check(&r, 64);
        assert!(rep.max_deviation < 1e-12, "{rep:?}");
        assert_eq!(rep.points, 64);
        assert_eq!(rep.singular_points, 0);
        for z in [c(0.5, 0.1), c(-0.2, -0.7)] {
            assert!(schur_identity_residual(&r, &[z]).unwrap() < 1e-14);
            assert!(transfer_eval(&r, &[z]).unwrap()[(0, 0)].norm() < 1.0);
        }
    }

    #[test]
    fn singular_resolvent_on_boundary() {
        // D = 1: the resolvent vanishes at ζ = 1.
        let r = TransferRealization::from_blocks(
            CMatrix::identity(1),
            CMatrix::zeros(1, 1),
            CMatrix::zeros(1, 1),
            CMatrix::identity(1),
            vec![1],
        )
        .unwrap();
        assert_eq!(transfer_eval(&r, &[ONE]), Err(RealizationError::SingularResolvent));
        let rep = inner_check(&r, 8);
        assert_eq!(rep.singular_points, 1);
        assert_eq!(rep.points, 8);
    }

    #[test]
    fn cnu_examples() {
        let a = CMatrix::diag_real(&[1.0, 0.5]);
        let dec = cnu_decomposition(&a, 1e-9).unwrap();
        assert_eq!(dec.h0_dim(), 1);
        assert!((dec.h0[(0, 0)].norm() - 1.0).abs() < 1e-12);
        assert!((dec.unitary_part[(0, 0)] - ONE).norm() < 1e-12);
        assert!((dec.cnu_part[(0, 0)].re - 0.5).abs() < 1e-12);

        let strict = CMatrix::from_real_rows(&[&[0.5, 0.2], &[0.0, 0.3]]);
        assert_eq!(cnu_decomposition(&strict, 1e-9).unwrap().h0_dim(), 0);

        assert!(matches!(
            cnu_decomposition(&CMatrix::diag_real(&[1.5]), 1e-9),
            Err(RealizationError::NotContraction { .. })
        ));
    }

    #[test]
    fn cnu_rotation_plus_nilpotent() {
        let (s, co) = 0.4f64.sin_cos();
        let rot = CMatrix::from_real_rows(&[&[co, -s], &[s, co]]);
        let nil = CMatrix::from_real_rows(&[&[0.0, 0.0], &[0.5, 0.0]]);
        let a = CMatrix::direct_sum(&[&rot, &nil]);
        let dec = cnu_decomposition(&a, 1e-9).unwrap();
        assert_eq!(dec.h0_dim(), 2);
        assert!(dec.off_block_residual < 1e-12);
        assert!(dec.unitary_residual < 1e-12);
        assert!(dec.cnu_spectral_radius < 1e-6);
        // Oracle: H₀ is spanned by e₁, e₂, so the projector is diag(1,1,0,0).
        let p0 = dec.h0.matmul(&dec.h0.adjoint());
        assert!((&p0 - &CMatrix::diag_real(&[1.0, 1.0, 0.0, 0.0])).max_abs() < 1e-12);
    }

    #[test]
    fn taylor_scalar_closed_form() {
        let r = rotation_realization(0.9);
        let s = phi_taylor(&r, 10);
        let (a, b, cc, d) = (r.a[(0, 0)], r.b[(0, 0)], r.c[(0, 0)], r.d[(0, 0)]);
        assert!((s.coeff(0)[(0, 0)] - a.conj()).norm() < 1e-15);
        for m in 0..10 {
            let want = cc.conj() * b.conj() * d.conj().powu(m as u32);
            assert!((s.coeff(m + 1)[(0, 0)] - want).norm() < 1e-15);
        }
    }

    #[test]
    fn taylor_of_constant_realization() {
        let a = CMatrix::diag(&[c(0.0, 1.0), ONE]);
        let r = TransferRealization::from_blocks(
            a.clone(),
            CMatrix::zeros(2, 2),
            CMatrix::zeros(2, 2),
            CMatrix::identity(2),
            vec![1, 1],
        )
        .unwrap();
        let s = phi_taylor(&r, 3);
        assert_eq!(s.coeff(0), &a.adjoint());
        assert!(s.coeffs()[1..].iter().all(|m| m.max_abs() == 0.0));
    }

    #[test]
    fn partition_drives_variables() {
        let r = TransferRealization::from_blocks(
            CMatrix::zeros(1, 1),
            CMatrix::zeros(1, 3),
            CMatrix::zeros(3, 1),
            CMatrix::zeros(3, 3),
            vec![1, 2],
        )
        .unwrap();
        let e = r.e_matrix(&[c(0.1, 0.0), c(0.2, 0.0)]).unwrap();
        assert_eq!(e, CMatrix::diag_real(&[0.1, 0.2, 0.2]));
        assert!(matches!(r.e_matrix(&[ONE]), Err(RealizationError::Arity { .. })));
        assert!(TransferRealization::from_blocks(
            CMatrix::zeros(1, 1),
            CMatrix::zeros(1, 3),
            CMatrix::zeros(3, 1),
            CMatrix::zeros(3, 3),
            vec![1, 1],
        )
        .is_err());
    }
}
