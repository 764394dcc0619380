//! Commuting contraction tuples, Szegő defects, purity and certificates of
//! membership in the class of tuples that dilate to `(M_z1, …, M_z(n−1), M_Φ)`.

use thiserror::Error;

use crate::matcore::{herm_eig, operator_norm, psd_sqrt, range_onb, CMatrix, MatError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TupleError {
    #[error("a tuple needs at least one operator")]
    Empty,
    #[error("operator {index} has shape {shape:?}, expected {dim}x{dim}")]
    DimensionMismatch {
        index: usize,
        shape: (usize, usize),
        dim: usize,
    },
    #[error("operators {i} and {j} do not commute (residual {residual:e})")]
    NotCommuting { i: usize, j: usize, residual: f64 },
    #[error("operator {index} is not a contraction (norm {norm})")]
    NotContractive { index: usize, norm: f64 },
    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
}

/// `n` commuting contractions on `C^dim`. Indices in the public API are
/// 1-based, matching the usual operator-tuple notation.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorTuple {
    ops: Vec<CMatrix>,
    commute_tol: f64,
    contract_tol: f64,
}

pub fn make_tuple(matrices: Vec<CMatrix>, commute_tol: f64, contract_tol: f64) -> Result<OperatorTuple, TupleError> {
    let dim = matrices.first().ok_or(TupleError::Empty)?.rows();
    for (k, m) in matrices.iter().enumerate() {
        if m.shape() != (dim, dim) {
            return Err(TupleError::DimensionMismatch {
                index: k + 1,
                shape: m.shape(),
                dim,
            });
        }
    }
    for (k, m) in matrices.iter().enumerate() {
        let norm = operator_norm(m);
        if norm > 1.0 + contract_tol {
            return Err(TupleError::NotContractive { index: k + 1, norm });
        }
    }
    for i in 0..matrices.len() {
        for j in (i + 1)..matrices.len() {
            let comm = &matrices[i].matmul(&matrices[j]) - &matrices[j].matmul(&matrices[i]);
            let residual = operator_norm(&comm);
            if residual > commute_tol {
                return Err(TupleError::NotCommuting {
                    i: i + 1,
                    j: j + 1,
                    residual,
                });
            }
        }
    }
    Ok(OperatorTuple {
        ops: matrices,
        commute_tol,
        contract_tol,
    })
}

impl OperatorTuple {
    pub fn dim(&self) -> usize {
        self.ops[0].rows()
    }

    pub fn n(&self) -> usize {
        self.ops.len()
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    /// `T_i`, 1-based.
    pub fn op(&self, i: usize) -> &CMatrix {
        &self.ops[i - 1]
    }

    pub fn last(&self) -> &CMatrix {
        self.ops.last().expect("tuples are non-empty")
    }

    pub fn tolerances(&self) -> (f64, f64) {
        (self.commute_tol, self.contract_tol)
    }

    /// The tuple with `T_i` deleted (1-based), order preserved.
    pub fn hat(&self, i: usize) -> Result<OperatorTuple, TupleError> {
        let n = self.n();
        if i == 0 || i > n || n == 1 {
            return Err(TupleError::IndexOutOfRange { index: i, n });
        }
        let ops = self
            .ops
            .iter()
            .enumerate()
            .filter(|(k, _)| k + 1 != i)
            .map(|(_, m)| m.clone())
            .collect();
        Ok(OperatorTuple {
            ops,
            commute_tol: self.commute_tol,
            contract_tol: self.contract_tol,
        })
    }

    /// `T^k = T_1^{k_1} ⋯ T_n^{k_n}`.
    pub fn monomial(&self, k: &[usize]) -> CMatrix {
        assert_eq!(k.len(), self.n(), "multi-index arity");
        let mut acc = CMatrix::identity(self.dim());
        for (op, &e) in self.ops.iter().zip(k) {
            for _ in 0..e {
                acc = acc.matmul(op);
            }
        }
        acc
    }
}

/// `Σ_{k∈{0,1}^n} (−1)^{|k|} T^k T^{*k}`, expanded term by term.
pub fn szego_defect(tuple: &OperatorTuple) -> CMatrix {
    szego_defect_of(tuple.ops(), tuple.dim())
}

pub(crate) fn szego_defect_of(ops: &[CMatrix], dim: usize) -> CMatrix {
    let mut acc = CMatrix::zeros(dim, dim);
    for mask in 0u32..(1u32 << ops.len()) {
        let mut prod = CMatrix::identity(dim);
        for (i, op) in ops.iter().enumerate() {
            if mask & (1 << i) != 0 {
                prod = prod.matmul(op);
            }
        }
        let term = prod.matmul(&prod.adjoint());
        acc = if mask.count_ones() % 2 == 0 {
            &acc + &term
        } else {
            &acc - &term
        };
    }
    acc
}

/// `Π_j (I − C_{T_j})(X)` with `C_A(X) = A X A*`, applied one factor at a time.
pub fn conjugacy_product(ops: &[CMatrix], x: &CMatrix) -> CMatrix {
    ops.iter()
        .fold(x.clone(), |acc, t| &acc - &t.matmul(&acc).matmul(&t.adjoint()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SzegoReport {
    pub is_szego: bool,
    pub min_eigenvalue: f64,
}

pub fn is_szego(tuple: &OperatorTuple, tol: f64) -> Result<SzegoReport, MatError> {
    let min_eigenvalue = herm_eig(&szego_defect(tuple), 1e-8)?.min();
    Ok(SzegoReport {
        is_szego: min_eigenvalue >= -tol,
        min_eigenvalue,
    })
}

const RADIUS_DOUBLINGS: usize = 10;

/// Spectral radius from `‖A^{2^k}‖^{2^{-k}}`, `k ≤ 10`. The estimate never
/// falls below the true radius and is exactly zero for nilpotent input.
pub fn spectral_radius(a: &CMatrix) -> f64 {
    let scale = operator_norm(a);
    if scale == 0.0 {
        return 0.0;
    }
    // Every ‖B^m‖^{1/m} bounds ρ(B) from above; keep the smallest. Powers are
    // renormalized at each squaring so strict contractions do not underflow.
    let mut power = a.scale_real(1.0 / scale);
    let mut log_norm = 0.0;
    let mut best: f64 = 1.0;
    for k in 1..=RADIUS_DOUBLINGS {
        let square = power.matmul(&power);
        let norm = operator_norm(&square);
        if norm == 0.0 {
            return 0.0;
        }
        log_norm = 2.0 * log_norm + norm.ln();
        power = square.scale_real(1.0 / norm);
        best = best.min((log_norm / (1u64 << k) as f64).exp());
    }
    best * scale
}

/// Pure in finite dimension: every coordinate has spectral radius `< 1 − tol`.
pub fn is_pure(tuple: &OperatorTuple, tol: f64) -> bool {
    tuple.ops().iter().all(|t| spectral_radius(t) < 1.0 - tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    /// `T̂_n` is not Szegő.
    HatLastSzego,
    /// `T̂_1` is not Szegő.
    HatFirstSzego,
    /// `T̂_n` is not pure.
    HatLastPure,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertError {
    #[error("certificates need n >= 3 operators, got {n}")]
    TooFewOperators { n: usize },
    #[error("expected {expected} certificate operators, got {got}")]
    WrongCount { expected: usize, got: usize },
    #[error("certificate operator {index} has the wrong shape")]
    Shape { index: usize },
    #[error("the first n-1 operators are not Szego (min eigenvalue {min_eigenvalue:e})")]
    NotSzego { min_eigenvalue: f64 },
    #[error("operator {index} is not pure (spectral radius {radius})")]
    NotPure { index: usize, radius: f64 },
    #[error("G_{index} is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    GNotPsd { index: usize, min_eigenvalue: f64 },
    #[error("I - T_n T_n^* differs from the sum of the G_i by {residual:e}")]
    SumMismatch { residual: f64 },
    #[error("alternating product for G_{index} is not positive (min eigenvalue {min_eigenvalue:e})")]
    ProductNotPsd { index: usize, min_eigenvalue: f64 },
    #[error("hypothesis failed: {0:?}")]
    HypothesisFailed(Hypothesis),
    #[error(transparent)]
    Tuple(#[from] TupleError),
    #[error(transparent)]
    Mat(#[from] MatError),
}

/// Positive operators `G_1 … G_{n−1}` witnessing membership, with the derived
/// `F_i`, the defect `D = D_{T̂n}` and orthonormal frames of their ranges.
#[derive(Clone, Debug)]
pub struct PnCertificate {
    pub g: Vec<CMatrix>,
    /// `F_i² = Π_{j≠i}(I − C_{T_j})(G_i)`, before the square root.
    pub products: Vec<CMatrix>,
    pub f: Vec<CMatrix>,
    pub defect: CMatrix,
    /// Orthonormal basis of `ran D`.
    pub defect_frame: CMatrix,
    /// Orthonormal bases of `ran F_i`.
    pub f_frames: Vec<CMatrix>,
    pub sum_residual: f64,
    pub szego_min_eigenvalue: f64,
    pub g_min_eigenvalues: Vec<f64>,
    pub product_min_eigenvalues: Vec<f64>,
}

impl PnCertificate {
    /// Derives `F_i`, `D` and the frames from `G` without checking membership.
    /// Negative parts below `tol` are clamped; larger ones are errors.
    pub fn assemble(tuple: &OperatorTuple, g: Vec<CMatrix>, tol: f64) -> Result<Self, CertError> {
        let n = tuple.n();
        if n < 3 {
            return Err(CertError::TooFewOperators { n });
        }
        if g.len() != n - 1 {
            return Err(CertError::WrongCount {
                expected: n - 1,
                got: g.len(),
            });
        }
        let dim = tuple.dim();
        if let Some(i) = g.iter().position(|m| m.shape() != (dim, dim)) {
            return Err(CertError::Shape { index: i + 1 });
        }
        let head = &tuple.ops()[..n - 1];
        let szego = szego_defect_of(head, dim);
        let szego_min_eigenvalue = herm_eig(&szego, 1e-8)?.min();
        if szego_min_eigenvalue < -tol {
            return Err(CertError::NotSzego {
                min_eigenvalue: szego_min_eigenvalue,
            });
        }
        let defect = psd_sqrt(&szego, tol)?;

        let tn = tuple.last();
        let target = &CMatrix::identity(dim) - &tn.matmul(&tn.adjoint());
        let sum = g.iter().fold(CMatrix::zeros(dim, dim), |acc, m| &acc + m);
        let sum_residual = operator_norm(&(&target - &sum));

        let mut g_min_eigenvalues = Vec::with_capacity(n - 1);
        let mut product_min_eigenvalues = Vec::with_capacity(n - 1);
        let mut products = Vec::with_capacity(n - 1);
        let mut f = Vec::with_capacity(n - 1);
        for (i, gi) in g.iter().enumerate() {
            g_min_eigenvalues.push(herm_eig(gi, 1e-8)?.min());
            let others: Vec<CMatrix> = head
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, m)| m.clone())
                .collect();
            let prod = conjugacy_product(&others, gi).hermitian_part();
            let min = herm_eig(&prod, 1e-8)?.min();
            product_min_eigenvalues.push(min);
            if min < -tol {
                return Err(CertError::ProductNotPsd {
                    index: i + 1,
                    min_eigenvalue: min,
                });
            }
            f.push(psd_sqrt(&prod, tol)?);
            products.push(prod);
        }
        let defect_frame = range_onb(&defect, tol);
        let f_frames = f.iter().map(|fi| range_onb(fi, tol)).collect();
        Ok(Self {
            g,
            products,
            f,
            defect,
            defect_frame,
            f_frames,
            sum_residual,
            szego_min_eigenvalue,
            g_min_eigenvalues,
            product_min_eigenvalues,
        })
    }

    /// Frame dimensions `dim ran F_i`, the block partition driving `E(z)`.
    pub fn partition(&self) -> Vec<usize> {
        self.f_frames.iter().map(CMatrix::cols).collect()
    }

    pub fn defect_rank(&self) -> usize {
        self.defect_frame.cols()
    }
}

/// Checks membership with the supplied `G_i` and returns the certificate.
pub fn verify_pn(tuple: &OperatorTuple, g: Vec<CMatrix>, tol: f64) -> Result<PnCertificate, CertError> {
    let n = tuple.n();
    if n < 3 {
        return Err(CertError::TooFewOperators { n });
    }
    if g.len() != n - 1 {
        return Err(CertError::WrongCount {
            expected: n - 1,
            got: g.len(),
        });
    }
    let head = tuple.hat(n)?;
    let szego = is_szego(&head, tol)?;
    if !szego.is_szego {
        return Err(CertError::NotSzego {
            min_eigenvalue: szego.min_eigenvalue,
        });
    }
    for (k, op) in head.ops().iter().enumerate() {
        let radius = spectral_radius(op);
        if radius >= 1.0 - tol {
            return Err(CertError::NotPure { index: k + 1, radius });
        }
    }
    for (i, gi) in g.iter().enumerate() {
        if gi.shape() != (tuple.dim(), tuple.dim()) {
            return Err(CertError::Shape { index: i + 1 });
        }
        let min = herm_eig(gi, 1e-8)?.min();
        if min < -tol {
            return Err(CertError::GNotPsd {
                index: i + 1,
                min_eigenvalue: min,
            });
        }
    }
    let cert = PnCertificate::assemble(tuple, g, tol)?;
    if cert.sum_residual > tol {
        return Err(CertError::SumMismatch {
            residual: cert.sum_residual,
        });
    }
    Ok(cert)
}

/// Certificate `G_1 = I − T_nT_n*`, `G_i = 0` otherwise, valid whenever `T̂_n`
/// and `T̂_1` are Szegő and `T̂_n` is pure.
pub fn bdhs_certificate(tuple: &OperatorTuple, tol: f64) -> Result<PnCertificate, CertError> {
    let n = tuple.n();
    if n < 3 {
        return Err(CertError::TooFewOperators { n });
    }
    let hat_last = tuple.hat(n)?;
    if !is_szego(&hat_last, tol)?.is_szego {
        return Err(CertError::HypothesisFailed(Hypothesis::HatLastSzego));
    }
    if !is_szego(&tuple.hat(1)?, tol)?.is_szego {
        return Err(CertError::HypothesisFailed(Hypothesis::HatFirstSzego));
    }
    if !is_pure(&hat_last, tol) {
        return Err(CertError::HypothesisFailed(Hypothesis::HatLastPure));
    }
    let dim = tuple.dim();
    let tn = tuple.last();
    let mut g = vec![&CMatrix::identity(dim) - &tn.matmul(&tn.adjoint())];
    g.extend((2..n).map(|_| CMatrix::zeros(dim, dim)));
    verify_pn(tuple, g, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{C64, ZERO};

    fn shift(d: usize) -> CMatrix {
        CMatrix::from_fn(d, d, |i, j| if i == j + 1 { C64::new(1.0, 0.0) } else { ZERO })
    }

    fn real(rows: &[&[f64]]) -> CMatrix {
        CMatrix::from_real_rows(rows)
    }

    #[test]
    fn make_tuple_validation() {
        let z = CMatrix::zeros(2, 2);
        assert!(make_tuple(vec![z.clone(), z.clone()], 1e-10, 1e-10).is_ok());

        let id = CMatrix::identity(2);
        match make_tuple(vec![id.clone(), id.scale_real(2.0)], 1e-10, 1e-10) {
            Err(TupleError::NotContractive { index, norm }) => {
                assert_eq!(index, 2);
                assert!((norm - 2.0).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }

        let up = real(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let down = real(&[&[0.0, 0.0], &[1.0, 0.0]]);
        assert!(matches!(
            make_tuple(vec![up, down], 1e-10, 1e-10),
            Err(TupleError::NotCommuting { i: 1, j: 2, .. })
        ));
        assert!(matches!(
            make_tuple(vec![z, CMatrix::zeros(3, 3)], 1e-10, 1e-10),
            Err(TupleError::DimensionMismatch { index: 2, .. })
        ));
        assert_eq!(make_tuple(vec![], 1e-10, 1e-10), Err(TupleError::Empty));
    }

    #[test]
    fn hat_deletes_in_order() {
        let a = CMatrix::diag_real(&[0.1]);
        let b = CMatrix::diag_real(&[0.2]);
        let c = CMatrix::diag_real(&[0.3]);
        let d = CMatrix::diag_real(&[0.4]);
        let t = make_tuple(vec![a.clone(), b.clone(), c.clone(), d.clone()], 1e-10, 1e-10).unwrap();
        let t3 = make_tuple(vec![a.clone(), b.clone(), c.clone()], 1e-10, 1e-10).unwrap();
        assert_eq!(t3.hat(3).unwrap().ops(), &[a.clone(), b.clone()]);
        assert_eq!(t3.hat(1).unwrap().ops(), &[b.clone(), c.clone()]);
        assert_eq!(t.hat(4).unwrap().hat(3).unwrap().ops(), &[a, b]);
        assert!(matches!(t.hat(5), Err(TupleError::IndexOutOfRange { .. })));
        assert!(matches!(t.hat(0), Err(TupleError::IndexOutOfRange { .. })));
    }

    #[test]
    fn szego_defect_examples() {
        let z = CMatrix::zeros(2, 2);
        let t = make_tuple(vec![z.clone(), z], 1e-10, 1e-10).unwrap();
        assert_eq!(szego_defect(&t), CMatrix::identity(2));

        let single = make_tuple(vec![CMatrix::diag_real(&[0.5])], 1e-10, 1e-10).unwrap();
        assert!((szego_defect(&single)[(0, 0)].re - 0.75).abs() < 1e-15);

        // Hand expansion: I − T1T1* − T2T2* + T1T2T2*T1* factors as a tensor product.
        let j = shift(2);
        let i2 = CMatrix::identity(2);
        let t1 = j.kron(&i2);
        let t2 = i2.kron(&j);
        let pair = make_tuple(vec![t1, t2], 1e-10, 1e-10).unwrap();
        let one = &i2 - &j.matmul(&j.adjoint());
        let expected = one.kron(&one);
        assert!((&szego_defect(&pair) - &expected).frobenius_norm() < 1e-15);
        let rep = is_szego(&pair, 1e-10).unwrap();
        assert!(rep.is_szego);
        assert!(rep.min_eigenvalue.abs() < 1e-14);
    }

    #[test]
    fn conjugacy_product_examples() {
        let x = CMatrix::from_real_rows(&[&[2.0, 0.5], &[0.5, 1.0]]);
        assert_eq!(conjugacy_product(&[], &x), x);
        assert_eq!(conjugacy_product(&[CMatrix::zeros(2, 2)], &x), x);

        // Four-term instance G − T1 G T1* − T2 G T2* + T1T2 G T1*T2*.
        let t1 = CMatrix::from_real_rows(&[&[0.3, 0.1], &[0.0, 0.2]]);
        let t2 = t1.matmul(&t1).scale_real(0.5);
        let direct = &(&(&x - &t1.matmul(&x).matmul(&t1.adjoint())) - &t2.matmul(&x).matmul(&t2.adjoint()))
            + &t1.matmul(&t2).matmul(&x).matmul(&t1.adjoint()).matmul(&t2.adjoint());
        let got = conjugacy_product(&[t1, t2], &x);
        assert!((&got - &direct).frobenius_norm() < 1e-15);
    }

    #[test]
    fn purity_examples() {
        let j = shift(2);
        let i2 = CMatrix::identity(2);
        let nil = make_tuple(vec![j.kron(&i2), i2.kron(&j)], 1e-10, 1e-10).unwrap();
        assert!(is_pure(&nil, 1e-9));

        let with_identity = make_tuple(vec![CMatrix::identity(2), CMatrix::zeros(2, 2)], 1e-10, 1e-10).unwrap();
        assert!(!is_pure(&with_identity, 1e-9));

        let rot = CMatrix::from_fn(2, 2, |i, k| {
            let t = 0.7_f64;
            let v = match (i, k) {
                (0, 0) | (1, 1) => t.cos(),
                (0, 1) => -t.sin(),
                _ => t.sin(),
            };
            C64::new(0.99 * v, 0.0)
        });
        assert!((spectral_radius(&rot) - 0.99).abs() < 1e-12);
        let single = make_tuple(vec![rot], 1e-10, 1e-10).unwrap();
        assert!(is_pure(&single, 1e-9));
        assert!(is_szego(&single, 1e-10).unwrap().is_szego);

        // ‖B^{1024}‖ for this B underflows without renormalization.
        let small = CMatrix::from_real_rows(&[&[0.3, 0.0], &[0.5, 0.1]]);
        let r = spectral_radius(&small);
        assert!((0.3..0.303).contains(&r), "{r}");
    }

    #[test]
    fn unitary_last_gives_degenerate_certificate() {
        let z = CMatrix::zeros(2, 2);
        let t = make_tuple(vec![z.clone(), z.clone(), CMatrix::identity(2)], 1e-10, 1e-10).unwrap();
        let cert = verify_pn(&t, vec![z.clone(), z], 1e-8).unwrap();
        assert!(cert.f.iter().all(|f| f.frobenius_norm() == 0.0));
        assert_eq!(cert.partition(), vec![0, 0]);
        assert_eq!(cert.defect_rank(), 2);
    }

    #[test]
    fn sum_mismatch_is_reported() {
        let t3 = CMatrix::diag_real(&[0.5, 0.25]);
        let z = CMatrix::zeros(2, 2);
        let t = make_tuple(vec![z.clone(), z, t3], 1e-10, 1e-10).unwrap();
        let id = CMatrix::identity(2);
        assert!(matches!(
            verify_pn(&t, vec![id.clone(), id], 1e-8),
            Err(CertError::SumMismatch { .. })
        ));
    }

    #[test]
    fn verify_pn_rejections() {
        let z = CMatrix::zeros(2, 2);
        let id = CMatrix::identity(2);
        let pair = make_tuple(vec![z.clone(), z.clone()], 1e-10, 1e-10).unwrap();
        assert!(matches!(
            verify_pn(&pair, vec![id.clone()], 1e-8),
            Err(CertError::TooFewOperators { n: 2 })
        ));

        let t = make_tuple(vec![z.clone(), z.clone(), z.clone()], 1e-10, 1e-10).unwrap();
        assert!(matches!(
            verify_pn(&t, vec![id.clone()], 1e-8),
            Err(CertError::WrongCount { .. })
        ));
        let neg = CMatrix::diag_real(&[1.5, 1.0]);
        let fix = CMatrix::diag_real(&[-0.5, 0.0]);
        assert!(matches!(
            verify_pn(&t, vec![neg, fix], 1e-8),
            Err(CertError::GNotPsd { index: 2, .. })
        ));

        let not_pure = make_tuple(vec![id.clone(), z.clone(), z.clone()], 1e-10, 1e-10).unwrap();
        assert!(matches!(
            verify_pn(&not_pure, vec![id.clone(), z.clone()], 1e-8),
            Err(CertError::NotSzego { .. }) | Err(CertError::NotPure { .. })
        ));
    }

    #[test]
    fn bdhs_on_zero_triple() {
        let z = CMatrix::zeros(2, 2);
        let t = make_tuple(vec![z.clone(), z.clone(), z], 1e-10, 1e-10).unwrap();
        let cert = bdhs_certificate(&t, 1e-8).unwrap();
        assert_eq!(cert.g[0], CMatrix::identity(2));
        assert_eq!(cert.g[1], CMatrix::zeros(2, 2));
    }

    #[test]
    fn bdhs_detects_failed_hypothesis() {
        // (T2, T3) = (0.9·S, 0.9·S) with S the 2x2 shift is not Szegő:
        // I − 2·0.81 SS* + 0.81² S²S*² has a negative diagonal entry.
        let s = shift(2).scale_real(0.9);
        let z = CMatrix::zeros(2, 2);
        let t = make_tuple(vec![z, s.clone(), s], 1e-10, 1e-10).unwrap();
        assert_eq!(
            bdhs_certificate(&t, 1e-8).unwrap_err(),
            CertError::HypothesisFailed(Hypothesis::HatFirstSzego)
        );
    }
}
