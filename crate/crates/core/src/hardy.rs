//! Truncated vector-valued Hardy space over the polydisc.
//!
//! Elements carry coefficients on the box `[0, N]^m` of multi-indices.
//! Multiplication operators drop whatever lands outside the box; adjoints
//! are exact, so identities stated on the adjoint side hold exactly as long
//! as the underlying series are supported inside the box.

use thiserror::Error;

use crate::matcore::{vec_norm, CMatrix, C64, ONE, ZERO};
use crate::tuples::{spectral_radius, OperatorTuple};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HardyError {
    #[error("point lies outside the open polydisc")]
    OutsideDisc,
    #[error("operator {index} is not pure (spectral radius {radius})")]
    NotPure { index: usize, radius: f64 },
    #[error("coefficient dimension {got} does not match partition total {expected}")]
    PartitionMismatch { expected: usize, got: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
}

pub const DEFAULT_CAP: usize = 12;

/// The box `[0, cap]^vars`, linearised with the last variable fastest.
/// Every `k − e_i` precedes `k` in linear order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IndexBox {
    vars: usize,
    cap: usize,
}

impl IndexBox {
    pub fn new(vars: usize, cap: usize) -> Self {
        Self { vars, cap }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn len(&self) -> usize {
        (self.cap + 1).pow(self.vars as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Linear offset of a one-step move in variable `var` (0-based).
    pub fn stride(&self, var: usize) -> usize {
        (self.cap + 1).pow((self.vars - 1 - var) as u32)
    }

    pub fn index(&self, k: &[usize]) -> Option<usize> {
        if k.len() != self.vars || k.iter().any(|&e| e > self.cap) {
            return None;
        }
        Some(k.iter().fold(0, |acc, &e| acc * (self.cap + 1) + e))
    }

    pub fn multi(&self, mut lin: usize) -> Vec<usize> {
        let mut k = vec![0; self.vars];
        for slot in k.iter_mut().rev() {
            *slot = lin % (self.cap + 1);
            lin /= self.cap + 1;
        }
        k
    }

    /// Component `var` of the multi-index at `lin`.
    pub fn component(&self, lin: usize, var: usize) -> usize {
        (lin / self.stride(var)) % (self.cap + 1)
    }

    /// `lin + e_var`, if still inside the box.
    pub fn up(&self, lin: usize, var: usize) -> Option<usize> {
        (self.component(lin, var) < self.cap).then(|| lin + self.stride(var))
    }

    /// `lin − e_var`, if the component is positive.
    pub fn down(&self, lin: usize, var: usize) -> Option<usize> {
        (self.component(lin, var) > 0).then(|| lin - self.stride(var))
    }

    /// `a + b` for two linear indices, if inside the box.
    pub fn add(&self, a: usize, b: usize) -> Option<usize> {
        let mut out = 0;
        for var in 0..self.vars {
            let s = self.component(a, var) + self.component(b, var);
            if s > self.cap {
                return None;
            }
            out = out * (self.cap + 1) + s;
        }
        Some(out)
    }

    /// `a − b` componentwise, if `b ≤ a`.
    pub fn sub(&self, a: usize, b: usize) -> Option<usize> {
        let mut out = 0;
        for var in 0..self.vars {
            let (x, y) = (self.component(a, var), self.component(b, var));
            if y > x {
                return None;
            }
            out = out * (self.cap + 1) + (x - y);
        }
        Some(out)
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.len()).map(|l| self.multi(l))
    }
}

/// Truncated element of `H²_{C^e}(D^m)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HardyElement {
    grid: IndexBox,
    coeff_dim: usize,
    data: Vec<C64>,
}

impl HardyElement {
    pub fn zeros(grid: IndexBox, coeff_dim: usize) -> Self {
        Self {
            grid,
            coeff_dim,
            data: vec![ZERO; grid.len() * coeff_dim],
        }
    }

    /// `z^k ⊗ η`; indices outside the box give the zero element.
    pub fn monomial(grid: IndexBox, k: &[usize], eta: &[C64]) -> Self {
        let mut f = Self::zeros(grid, eta.len());
        if let Some(lin) = grid.index(k) {
            f.coeff_mut(lin).copy_from_slice(eta);
        }
        f
    }

    pub fn constant(grid: IndexBox, eta: &[C64]) -> Self {
        Self::monomial(grid, &vec![0; grid.vars()], eta)
    }

    /// Truncation of the kernel function `k_w ⊗ η`, coefficients `w̄^k η`.
    pub fn kernel(grid: IndexBox, w: &[C64], eta: &[C64]) -> Self {
        let mut f = Self::zeros(grid, eta.len());
        for lin in 0..grid.len() {
            let k = grid.multi(lin);
            let s: C64 = k.iter().zip(w).map(|(&e, wi)| wi.conj().powu(e as u32)).product();
            for (c, e) in f.coeff_mut(lin).iter_mut().zip(eta) {
                *c = s * e;
            }
        }
        f
    }

    pub fn grid(&self) -> IndexBox {
        self.grid
    }

    pub fn coeff_dim(&self) -> usize {
        self.coeff_dim
    }

    pub fn coeff(&self, lin: usize) -> &[C64] {
        &self.data[lin * self.coeff_dim..(lin + 1) * self.coeff_dim]
    }

    pub fn coeff_mut(&mut self, lin: usize) -> &mut [C64] {
        &mut self.data[lin * self.coeff_dim..(lin + 1) * self.coeff_dim]
    }

    pub fn coeff_at(&self, k: &[usize]) -> Option<&[C64]> {
        self.grid.index(k).map(|l| self.coeff(l))
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn norm(&self) -> f64 {
        vec_norm(&self.data)
    }

    pub fn inner(&self, other: &HardyElement) -> C64 {
        assert_eq!((self.grid, self.coeff_dim), (other.grid, other.coeff_dim));
        crate::matcore::inner(&self.data, &other.data)
    }

    /// Largest coefficientwise distance `max_k ‖c_k − d_k‖`.
    pub fn max_coeff_distance(&self, other: &HardyElement) -> f64 {
        assert_eq!((self.grid, self.coeff_dim), (other.grid, other.coeff_dim));
        (0..self.grid.len())
            .map(|l| {
                let d: Vec<C64> = self.coeff(l).iter().zip(other.coeff(l)).map(|(a, b)| a - b).collect();
                vec_norm(&d)
            })
            .fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &HardyElement) -> HardyElement {
        assert_eq!((self.grid, self.coeff_dim), (other.grid, other.coeff_dim));
        Self {
            grid: self.grid,
            coeff_dim: self.coeff_dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// `(I ⊗ X) f`: applies `X` to every coefficient.
    pub fn apply_pointwise(&self, x: &CMatrix) -> HardyElement {
        assert_eq!(x.cols(), self.coeff_dim, "pointwise operator shape");
        let mut out = Self::zeros(self.grid, x.rows());
        for l in 0..self.grid.len() {
            let v = x.mul_vec(self.coeff(l));
            out.coeff_mut(l).copy_from_slice(&v);
        }
        out
    }

    /// Point evaluation of the truncated series.
    pub fn evaluate(&self, z: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; self.coeff_dim];
        for l in 0..self.grid.len() {
            let k = self.grid.multi(l);
            let s: C64 = k.iter().zip(z).map(|(&e, zi)| zi.powu(e as u32)).product();
            for (o, c) in out.iter_mut().zip(self.coeff(l)) {
                *o += s * c;
            }
        }
        out
    }
}

/// `Π_i (1 − z_i w̄_i)^{-1}`.
pub fn szego_kernel_eval(z: &[C64], w: &[C64]) -> Result<C64, HardyError> {
    if z.len() != w.len() {
        return Err(HardyError::Shape("point arity".into()));
    }
    if z.iter().chain(w).any(|p| p.norm() >= 1.0) {
        return Err(HardyError::OutsideDisc);
    }
    Ok(z.iter().zip(w).map(|(a, b)| ONE / (ONE - a * b.conj())).product())
}

/// `M_{z_i}` (1-based `i`), dropping coefficients pushed past the cap.
pub fn mult_z(i: usize, f: &HardyElement) -> HardyElement {
    let var = i - 1;
    let g = f.grid;
    let mut out = HardyElement::zeros(g, f.coeff_dim);
    for l in 0..g.len() {
        if let Some(up) = g.up(l, var) {
            out.coeff_mut(up).copy_from_slice(f.coeff(l));
        }
    }
    out
}

/// `M_{z_i}*`: coefficient at `k` becomes the one at `k + e_i`.
pub fn mult_z_adjoint(i: usize, f: &HardyElement) -> HardyElement {
    let var = i - 1;
    let g = f.grid;
    let mut out = HardyElement::zeros(g, f.coeff_dim);
    for l in 0..g.len() {
        if let Some(up) = g.up(l, var) {
            out.coeff_mut(l).copy_from_slice(f.coeff(up));
        }
    }
    out
}

fn check_partition(partition: &[usize], f: &HardyElement) -> Result<(), HardyError> {
    let total: usize = partition.iter().sum();
    if total != f.coeff_dim {
        return Err(HardyError::PartitionMismatch {
            expected: total,
            got: f.coeff_dim,
        });
    }
    if partition.len() != f.grid.vars() {
        return Err(HardyError::Shape(format!(
            "partition has {} blocks for {} variables",
            partition.len(),
            f.grid.vars()
        )));
    }
    Ok(())
}

/// `Z = M_E` with `E(z) = ⊕ z_i I_{F_i}`: block `i` of every coefficient
/// moves from `k` to `k + e_i`.
pub fn z_op(partition: &[usize], f: &HardyElement) -> Result<HardyElement, HardyError> {
    check_partition(partition, f)?;
    let g = f.grid;
    let mut out = HardyElement::zeros(g, f.coeff_dim);
    let mut offset = 0;
    for (var, &size) in partition.iter().enumerate() {
        for l in 0..g.len() {
            if let Some(up) = g.up(l, var) {
                let src = f.coeff(l)[offset..offset + size].to_vec();
                out.coeff_mut(up)[offset..offset + size].copy_from_slice(&src);
            }
        }
        offset += size;
    }
    Ok(out)
}

pub fn z_op_adjoint(partition: &[usize], f: &HardyElement) -> Result<HardyElement, HardyError> {
    check_partition(partition, f)?;
    let g = f.grid;
    let mut out = HardyElement::zeros(g, f.coeff_dim);
    let mut offset = 0;
    for (var, &size) in partition.iter().enumerate() {
        for l in 0..g.len() {
            if let Some(up) = g.up(l, var) {
                let src = f.coeff(up)[offset..offset + size].to_vec();
                out.coeff_mut(l)[offset..offset + size].copy_from_slice(&src);
            }
        }
        offset += size;
    }
    Ok(out)
}

/// Taylor coefficients `S_k` of an operator-valued analytic function on the box.
#[derive(Clone, Debug)]
pub struct SymbolSeries {
    grid: IndexBox,
    coeffs: Vec<CMatrix>,
}

impl SymbolSeries {
    pub fn new(grid: IndexBox, coeffs: Vec<CMatrix>) -> Result<Self, HardyError> {
        if coeffs.len() != grid.len() {
            return Err(HardyError::Shape(format!(
                "{} coefficients for a box of {}",
                coeffs.len(),
                grid.len()
            )));
        }
        let shape = coeffs[0].shape();
        if coeffs.iter().any(|c| c.shape() != shape) {
            return Err(HardyError::Shape("coefficient blocks differ in shape".into()));
        }
        Ok(Self { grid, coeffs })
    }

    /// The constant symbol `c`.
    pub fn constant(grid: IndexBox, c: CMatrix) -> Self {
        let mut coeffs = vec![CMatrix::zeros(c.rows(), c.cols()); grid.len()];
        coeffs[0] = c;
        Self { grid, coeffs }
    }

    pub fn grid(&self) -> IndexBox {
        self.grid
    }

    pub fn coeff(&self, lin: usize) -> &CMatrix {
        &self.coeffs[lin]
    }

    pub fn coeffs(&self) -> &[CMatrix] {
        &self.coeffs
    }

    pub fn shape(&self) -> (usize, usize) {
        self.coeffs[0].shape()
    }

    pub fn evaluate(&self, z: &[C64]) -> CMatrix {
        let (r, c) = self.shape();
        let mut out = CMatrix::zeros(r, c);
        for (l, s) in self.coeffs.iter().enumerate() {
            let k = self.grid.multi(l);
            let w: C64 = k.iter().zip(z).map(|(&e, zi)| zi.powu(e as u32)).product();
            out = &out + &s.scale(w);
        }
        out
    }

    /// Coefficientwise difference, e.g. `Φ − Φ(0)`.
    pub fn without_constant(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        let (r, c) = self.shape();
        coeffs[0] = CMatrix::zeros(r, c);
        Self {
            grid: self.grid,
            coeffs,
        }
    }
}

/// `M_S f`: coefficient `k` is `Σ_{j≤k} S_j c_{k−j}`, truncated at the box.
pub fn mult_symbol(s: &SymbolSeries, f: &HardyElement) -> Result<HardyElement, HardyError> {
    let (rows, cols) = s.shape();
    if cols != f.coeff_dim || s.grid != f.grid {
        return Err(HardyError::PartitionMismatch {
            expected: cols,
            got: f.coeff_dim,
        });
    }
    let g = f.grid;
    let mut out = HardyElement::zeros(g, rows);
    for j in 0..g.len() {
        let sj = s.coeff(j);
        if sj.max_abs() == 0.0 {
            continue;
        }
        for l in 0..g.len() {
            let Some(k) = g.add(j, l) else { continue };
            let v = sj.mul_vec(f.coeff(l));
            for (o, x) in out.coeff_mut(k).iter_mut().zip(&v) {
                *o += x;
            }
        }
    }
    Ok(out)
}

/// `M_S* g`: coefficient `k` is `Σ_j S_j* g_{k+j}` over `k + j` in the box.
pub fn mult_symbol_adjoint(s: &SymbolSeries, g_el: &HardyElement) -> Result<HardyElement, HardyError> {
    let (rows, cols) = s.shape();
    if rows != g_el.coeff_dim || s.grid != g_el.grid {
        return Err(HardyError::PartitionMismatch {
            expected: rows,
            got: g_el.coeff_dim,
        });
    }
    let g = g_el.grid;
    let mut out = HardyElement::zeros(g, cols);
    for j in 0..g.len() {
        let sj = s.coeff(j);
        if sj.max_abs() == 0.0 {
            continue;
        }
        for k in 0..g.len() {
            let Some(kj) = g.add(k, j) else { continue };
            let v = sj.adjoint_mul_vec(g_el.coeff(kj));
            for (o, x) in out.coeff_mut(k).iter_mut().zip(&v) {
                *o += x;
            }
        }
    }
    Ok(out)
}

/// `T^k` for every `k` in the box, built by one multiplication per index.
pub fn monomial_table(ops: &[CMatrix], grid: IndexBox) -> Vec<CMatrix> {
    let dim = ops[0].rows();
    let mut table: Vec<CMatrix> = Vec::with_capacity(grid.len());
    for l in 0..grid.len() {
        if l == 0 {
            table.push(CMatrix::identity(dim));
            continue;
        }
        let var = (0..grid.vars())
            .rev()
            .find(|&v| grid.component(l, v) > 0)
            .expect("nonzero index has a positive component");
        let prev = grid.down(l, var).expect("positive component");
        let next = table[prev].matmul(&ops[var]);
        table.push(next);
    }
    table
}

/// Smallest `p ≤ dim` with `T^p = 0` exactly, if any.
pub fn nilpotency_order(t: &CMatrix) -> Option<usize> {
    let mut p = t.clone();
    for order in 1..=t.rows().max(1) {
        if p.max_abs() == 0.0 {
            return Some(order);
        }
        p = p.matmul(t);
    }
    None
}

/// Requested cap, raised to the nilpotency order when every operator is
/// nilpotent and the request falls short of it.
pub fn effective_cap(ops: &[CMatrix], requested: usize) -> usize {
    let orders: Option<Vec<usize>> = ops.iter().map(nilpotency_order).collect();
    match orders {
        Some(o) => requested.max(o.into_iter().max().unwrap_or(0)),
        None => requested,
    }
}

/// `C·ρ^{N+1}/(1 − ρ)` with `C = ‖h‖·√d`.
pub fn geom_tail(rho: f64, cap: usize, h_norm: f64, dim: usize) -> f64 {
    if rho >= 1.0 {
        return f64::INFINITY;
    }
    h_norm * (dim as f64).sqrt() * rho.powi(cap as i32 + 1) / (1.0 - rho)
}

fn check_pure(tuple: &OperatorTuple) -> Result<f64, HardyError> {
    let mut rho: f64 = 0.0;
    for (k, t) in tuple.ops().iter().enumerate() {
        let r = spectral_radius(t);
        if r >= 1.0 {
            return Err(HardyError::NotPure {
                index: k + 1,
                radius: r,
            });
        }
        rho = rho.max(r);
    }
    Ok(rho)
}

/// The canonical isometry `h ↦ Σ_k z^k ⊗ frame*·D·T^{*k}h` of a pure Szegő
/// tuple into the defect-valued Hardy space, with coefficients expressed in
/// an orthonormal frame of `ran D`.
#[derive(Clone, Debug)]
pub struct CanonicalIsometry {
    grid: IndexBox,
    /// `frame*·D`, `e × d`.
    defect_in_frame: CMatrix,
    /// `T^k` over the box.
    monomials: Vec<CMatrix>,
    rho: f64,
    dim: usize,
}

impl CanonicalIsometry {
    pub fn new(tuple: &OperatorTuple, defect: &CMatrix, frame: &CMatrix, cap: usize) -> Result<Self, HardyError> {
        let rho = check_pure(tuple)?;
        if defect.shape() != (tuple.dim(), tuple.dim()) || frame.rows() != tuple.dim() {
            return Err(HardyError::Shape("defect or frame does not match the tuple".into()));
        }
        let grid = IndexBox::new(tuple.n(), cap);
        Ok(Self {
            grid,
            defect_in_frame: frame.adjoint().matmul(defect),
            monomials: monomial_table(tuple.ops(), grid),
            rho,
            dim: tuple.dim(),
        })
    }

    pub fn grid(&self) -> IndexBox {
        self.grid
    }

    pub fn coeff_dim(&self) -> usize {
        self.defect_in_frame.rows()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.rho
    }

    pub fn monomials(&self) -> &[CMatrix] {
        &self.monomials
    }

    pub fn defect_in_frame(&self) -> &CMatrix {
        &self.defect_in_frame
    }

    pub fn apply(&self, h: &[C64]) -> HardyElement {
        let mut out = HardyElement::zeros(self.grid, self.coeff_dim());
        for (l, tk) in self.monomials.iter().enumerate() {
            let v = self.defect_in_frame.mul_vec(&tk.adjoint_mul_vec(h));
            out.coeff_mut(l).copy_from_slice(&v);
        }
        out
    }

    /// `Π* g = Σ_k T^k D·frame g_k`.
    pub fn adjoint(&self, g: &HardyElement) -> Vec<C64> {
        let mut out = vec![ZERO; self.dim];
        for (l, tk) in self.monomials.iter().enumerate() {
            let v = tk.mul_vec(&self.defect_in_frame.adjoint_mul_vec(g.coeff(l)));
            out.iter_mut().zip(&v).for_each(|(o, x)| *o += x);
        }
        out
    }

    /// Matrix of the truncated map, `(|box|·e) × d`.
    pub fn matrix(&self) -> CMatrix {
        let cols: Vec<Vec<C64>> = (0..self.dim)
            .map(|j| {
                let mut e = vec![ZERO; self.dim];
                e[j] = ONE;
                self.apply(&e).data
            })
            .collect();
        CMatrix::from_columns(self.grid.len() * self.coeff_dim(), &cols)
    }

    /// `‖Π*Π − I‖` of the truncated map; non-positive defect in the form
    /// `‖Πh‖² − ‖h‖²` is reported by [`Self::isometry_defect_on`].
    pub fn isometry_defect(&self) -> f64 {
        let m = self.matrix();
        crate::matcore::operator_norm(&(&m.adjoint().matmul(&m) - &CMatrix::identity(self.dim)))
    }

    pub fn isometry_defect_on(&self, h: &[C64]) -> f64 {
        self.apply(h).norm().powi(2) - vec_norm(h).powi(2)
    }

    /// Geometric tail bound for unit vectors at this cap.
    pub fn tail_bound(&self) -> f64 {
        geom_tail(self.rho, self.grid.cap(), 1.0, self.dim)
    }
}

/// `J h = Σ_k z^k ⊗ T^{*k} h`, the undeflated companion of `Π`.
#[derive(Clone, Debug)]
pub struct EmbedJ {
    grid: IndexBox,
    monomials: Vec<CMatrix>,
    dim: usize,
}

impl EmbedJ {
    pub fn new(tuple: &OperatorTuple, cap: usize) -> Result<Self, HardyError> {
        check_pure(tuple)?;
        let grid = IndexBox::new(tuple.n(), cap);
        Ok(Self {
            grid,
            monomials: monomial_table(tuple.ops(), grid),
            dim: tuple.dim(),
        })
    }

    pub fn grid(&self) -> IndexBox {
        self.grid
    }

    pub fn apply(&self, h: &[C64]) -> HardyElement {
        let mut out = HardyElement::zeros(self.grid, self.dim);
        for (l, tk) in self.monomials.iter().enumerate() {
            out.coeff_mut(l).copy_from_slice(&tk.adjoint_mul_vec(h));
        }
        out
    }

    /// `J* g = Σ_k T^k g_k`.
    pub fn adjoint(&self, g: &HardyElement) -> Vec<C64> {
        let mut out = vec![ZERO; self.dim];
        for (l, tk) in self.monomials.iter().enumerate() {
            let v = tk.mul_vec(g.coeff(l));
            out.iter_mut().zip(&v).for_each(|(o, x)| *o += x);
        }
        out
    }
}
