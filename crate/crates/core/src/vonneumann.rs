//! Polynomial calculus on commuting tuples and the variety-based von Neumann
//! bound `‖P(T)‖ ≤ sup_θ ‖P(e^{iθ}I, Φ(e^{iθ}))‖`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::Tolerances;
use crate::matcore::{charpoly, det, horner, operator_norm, poly_roots, CMatrix, MatError, C64, ONE, ZERO};
use crate::realization::{
    build_generating_unitary, circle_grid, cnu_decomposition, torus_points, transfer_eval, RealizationError,
    TransferRealization,
};
use crate::tuples::{spectral_radius, OperatorTuple, PnCertificate};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VnError {
    #[error("polynomial has {got} variables, tuple has {expected}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("cannot parse polynomial: {0}")]
    Parse(String),
    #[error(transparent)]
    Realization(#[from] RealizationError),
    #[error(transparent)]
    Mat(#[from] MatError),
}

/// `Σ a_k z^k` in a fixed number of variables; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Vec<usize>, C64>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: C64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// `z_i` (1-based).
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut k = vec![0; nvars];
        k[i - 1] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(k, ONE);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, C64> {
        &self.terms
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|k| k.iter().sum()).max().unwrap_or(0)
    }

    /// Adds `c z^k`, dropping the entry if the coefficient cancels.
    pub fn add_term(&mut self, k: Vec<usize>, c: C64) {
        assert_eq!(k.len(), self.nvars, "multi-index arity");
        let entry = self.terms.entry(k).or_insert(ZERO);
        *entry += c;
        let zero = *entry == ZERO;
        if zero {
            self.terms.retain(|_, v| *v != ZERO);
        }
    }

    /// Parses with a declared arity; variables beyond it are an error.
    pub fn parse_with_arity(s: &str, nvars: usize) -> Result<Self, VnError> {
        let p: MultiPoly = s.parse()?;
        if p.nvars > nvars {
            return Err(VnError::ArityMismatch {
                expected: nvars,
                got: p.nvars,
            });
        }
        Ok(p.with_arity(nvars))
    }

    /// Same polynomial viewed in `nvars ≥ self.nvars` variables.
    pub fn with_arity(&self, nvars: usize) -> Self {
        assert!(nvars >= self.nvars);
        let mut out = Self::zero(nvars);
        for (k, &c) in &self.terms {
            let mut kk = k.clone();
            kk.resize(nvars, 0);
            out.add_term(kk, c);
        }
        out
    }

    pub fn eval_scalar(&self, z: &[C64]) -> C64 {
        self.terms
            .iter()
            .map(|(k, &c)| c * k.iter().zip(z).map(|(&e, zi)| zi.powu(e as u32)).product::<C64>())
            .sum()
    }

    fn max_exponent(&self, var: usize) -> usize {
        self.terms.keys().map(|k| k[var]).max().unwrap_or(0)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (k, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            let sign = if c.im.is_sign_negative() { '-' } else { '+' };
            write!(f, "({}{}{}i)", c.re, sign, c.im.abs())?;
            for (i, &e) in k.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*z{}", i + 1)?,
                    _ => write!(f, "*z{}^{}", i + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

/// Grammar: a sum of terms, each a `*`-product of factors. A factor is a
/// real number, an imaginary number `bi`, a parenthesised constant such as
/// `(a+bi)`, or `zK` / `zK^p`. Whitespace is ignored. The arity is the
/// largest variable index used.
impl FromStr for MultiPoly {
    type Err = VnError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(VnError::Parse("empty input".into()));
        }
        let terms = parse_sum(&compact)?;
        let nvars = terms.iter().flat_map(|(k, _)| k.keys().copied()).max().unwrap_or(0);
        let mut p = MultiPoly::zero(nvars);
        for (vars, c) in terms {
            let mut k = vec![0; nvars];
            for (i, e) in vars {
                k[i - 1] += e;
            }
            p.add_term(k, c);
        }
        Ok(p)
    }
}

type RawTerm = (BTreeMap<usize, usize>, C64);

fn parse_sum(s: &str) -> Result<Vec<RawTerm>, VnError> {
    let bytes = s.as_bytes();
    let mut terms = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'+' | b'-' if depth == 0 && i > start => {
                let prev = bytes[i - 1];
                let exponent_sign = (prev == b'e' || prev == b'E') && i >= 2 && bytes[i - 2].is_ascii_digit();
                if !exponent_sign && prev != b'*' && prev != b'^' {
                    terms.push(parse_term(&s[start..i])?);
                    start = i;
                }
            }
            _ => {}
        }
        if depth < 0 {
            return Err(VnError::Parse("unbalanced parentheses".into()));
        }
    }
    if depth != 0 {
        return Err(VnError::Parse("unbalanced parentheses".into()));
    }
    terms.push(parse_term(&s[start..])?);
    Ok(terms)
}

fn parse_term(t: &str) -> Result<RawTerm, VnError> {
    let (sign, body) = match t.as_bytes().first() {
        Some(b'+') => (1.0, &t[1..]),
        Some(b'-') => (-1.0, &t[1..]),
        _ => (1.0, t),
    };
    if body.is_empty() {
        return Err(VnError::Parse(format!("empty term in '{t}'")));
    }
    let mut coeff = C64::new(sign, 0.0);
    let mut vars = BTreeMap::new();
    for factor in split_factors(body)? {
        if let Some(rest) = factor.strip_prefix('z') {
            let (idx, pow) = match rest.split_once('^') {
                Some((a, b)) => (a, b.parse::<usize>().map_err(|_| bad(factor))?),
                None => (rest, 1),
            };
            let idx: usize = idx.parse().map_err(|_| bad(factor))?;
            if idx == 0 {
                return Err(bad(factor));
            }
            *vars.entry(idx).or_insert(0) += pow;
        } else if let Some(inner) = factor.strip_prefix('(').and_then(|f| f.strip_suffix(')')) {
            let p: MultiPoly = inner.parse()?;
            if p.nvars != 0 {
                return Err(VnError::Parse(format!("variables inside parentheses: '{factor}'")));
            }
            coeff *= p.eval_scalar(&[]);
        } else if let Some(im) = factor.strip_suffix('i') {
            let v = if im.is_empty() {
                1.0
            } else {
                im.parse::<f64>().map_err(|_| bad(factor))?
            };
            coeff *= C64::new(0.0, v);
        } else {
            coeff *= C64::new(factor.parse::<f64>().map_err(|_| bad(factor))?, 0.0);
        }
    }
    if !coeff.re.is_finite() || !coeff.im.is_finite() {
        return Err(VnError::Parse(format!("non-finite coefficient in '{t}'")));
    }
    Ok((vars, coeff))
}

fn split_factors(body: &str) -> Result<Vec<&str>, VnError> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, b) in body.bytes().enumerate() {
        match b {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'*' if depth == 0 => {
                out.push(&body[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&body[start..]);
    if out.iter().any(|f| f.is_empty()) {
        return Err(VnError::Parse(format!("empty factor in '{body}'")));
    }
    Ok(out)
}

fn bad(factor: &str) -> VnError {
    VnError::Parse(format!("bad factor '{factor}'"))
}

/// `Σ a_k T^k` with `T^k = T₁^{k₁}⋯T_n^{k_n}`.
pub fn eval_poly_tuple(p: &MultiPoly, tuple: &OperatorTuple) -> Result<CMatrix, VnError> {
    if p.nvars != tuple.n() {
        return Err(VnError::ArityMismatch {
            expected: tuple.n(),
            got: p.nvars,
        });
    }
    let powers: Vec<Vec<CMatrix>> = tuple
        .ops()
        .iter()
        .enumerate()
        .map(|(i, t)| power_table(t, p.max_exponent(i)))
        .collect();
    let dim = tuple.dim();
    let mut out = CMatrix::zeros(dim, dim);
    for (k, &c) in &p.terms {
        let mono = k
            .iter()
            .enumerate()
            .fold(CMatrix::identity(dim), |acc, (i, &e)| acc.matmul(&powers[i][e]));
        out = &out + &mono.scale(c);
    }
    Ok(out)
}

fn power_table(t: &CMatrix, max: usize) -> Vec<CMatrix> {
    let mut table = vec![CMatrix::identity(t.rows())];
    for e in 1..=max {
        let next = table[e - 1].matmul(t);
        table.push(next);
    }
    table
}

/// Coefficients (ascending in the last variable) of `w ↦ P(ζ, w)`.
pub fn collapse_last(p: &MultiPoly, zeta: &[C64]) -> Vec<C64> {
    let m = p.nvars - 1;
    let mut out = vec![ZERO; p.max_exponent(m) + 1];
    for (k, &c) in &p.terms {
        let s: C64 = k[..m].iter().zip(zeta).map(|(&e, z)| z.powu(e as u32)).product();
        out[k[m]] += c * s;
    }
    out
}

/// `P(ζ₁I, …, ζ_mI, X)` given the powers `X^0, X^1, …` of the last slot.
pub fn eval_poly_last_matrix(p: &MultiPoly, zeta: &[C64], x_powers: &[CMatrix]) -> CMatrix {
    let dim = x_powers[0].rows();
    collapse_last(p, zeta)
        .iter()
        .zip(x_powers)
        .filter(|(c, _)| **c != ZERO)
        .fold(CMatrix::zeros(dim, dim), |acc, (&c, xp)| &acc + &xp.scale(c))
}

/// `Φ = W* ⊕ Φ₁` along the unitary/cnu splitting of `A*`.
#[derive(Clone, Debug)]
pub struct PhiSplit {
    pub h0: CMatrix,
    pub h1: CMatrix,
    /// `Φ₀ ≡ W*`, the unitary part of `A*`.
    pub phi0: CMatrix,
    /// Realization of `Φ₁ = H₁*ΦH₁`, absent when `H₁ = {0}`.
    pub phi1: Option<TransferRealization>,
    /// `max(‖C H₀‖, ‖B* H₀‖)`; zero forces `Φ` to be block diagonal.
    pub coupling_residual: f64,
    pub unitary_residual: f64,
}

impl PhiSplit {
    pub fn h0_dim(&self) -> usize {
        self.h0.cols()
    }

    /// `max(‖H₀*Φ(z)H₁‖, ‖H₁*Φ(z)H₀‖)`.
    pub fn block_residual(&self, r: &TransferRealization, z: &[C64]) -> Result<f64, VnError> {
        let phi = transfer_eval(r, z)?;
        let a = operator_norm(&self.h0.adjoint().matmul(&phi).matmul(&self.h1));
        let b = operator_norm(&self.h1.adjoint().matmul(&phi).matmul(&self.h0));
        Ok(a.max(b))
    }
}

pub fn split_phi(r: &TransferRealization, tol: f64) -> Result<PhiSplit, VnError> {
    let dec = cnu_decomposition(&r.a.adjoint(), tol)?;
    let coupling_residual = if dec.h0.cols() == 0 {
        0.0
    } else {
        operator_norm(&r.c.matmul(&dec.h0)).max(operator_norm(&r.b.adjoint().matmul(&dec.h0)))
    };
    let phi1 = if dec.h1.cols() == 0 {
        None
    } else {
        Some(TransferRealization::from_blocks(
            dec.h1.adjoint().matmul(&r.a).matmul(&dec.h1),
            dec.h1.adjoint().matmul(&r.b),
            r.c.matmul(&dec.h1),
            r.d.clone(),
            r.partition.clone(),
        )?)
    };
    Ok(PhiSplit {
        phi0: dec.unitary_part,
        h0: dec.h0,
        h1: dec.h1,
        phi1,
        coupling_residual,
        unitary_residual: dec.unitary_residual,
    })
}

/// `Φ(ζ)` and its powers at every point of the torus grid, reused across
/// polynomials.
#[derive(Clone, Debug)]
pub struct TorusSamples {
    grid: usize,
    points: Vec<(Vec<C64>, Vec<CMatrix>)>,
    singular_points: usize,
}

impl TorusSamples {
    pub fn new(r: &TransferRealization, grid: usize, max_power: usize) -> Self {
        let mut points = Vec::new();
        let mut singular_points = 0;
        for z in torus_points(r.vars(), grid) {
            match transfer_eval(r, &z) {
                Ok(phi) => points.push((z, power_table(&phi, max_power))),
                Err(_) => singular_points += 1,
            }
        }
        Self {
            grid,
            points,
            singular_points,
        }
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    pub fn singular_points(&self) -> usize {
        self.singular_points
    }

    pub fn max_power(&self) -> usize {
        self.points.first().map_or(0, |(_, p)| p.len() - 1)
    }

    /// `max_ζ ‖P(ζI, Φ(ζ))‖`; `P` must have `vars + 1` variables and degree
    /// in the last variable at most `max_power`.
    pub fn sup(&self, p: &MultiPoly) -> f64 {
        self.points
            .iter()
            .map(|(z, pw)| operator_norm(&eval_poly_last_matrix(p, z, pw)))
            .fold(0.0, f64::max)
    }

    /// Coordinates of the sampled points.
    pub fn points(&self) -> impl Iterator<Item = &[C64]> {
        self.points.iter().map(|(z, _)| z.as_slice())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusSup {
    pub sup: f64,
    pub points: usize,
    pub singular_points: usize,
}

pub fn torus_sup(p: &MultiPoly, r: &TransferRealization, grid: usize) -> Result<TorusSup, VnError> {
    let expected = r.vars() + 1;
    if p.nvars != expected {
        return Err(VnError::ArityMismatch { expected, got: p.nvars });
    }
    let samples = TorusSamples::new(r, grid, p.max_exponent(expected - 1));
    Ok(TorusSup {
        sup: samples.sup(p),
        points: samples.points.len(),
        singular_points: samples.singular_points,
    })
}

/// Samples per unit circle when scanning `|P(ζ', w)|` over `|w| = 1`.
const CIRCLE_SAMPLES: usize = 256;

/// `max_{|w|=1} f(w)` by dense sampling and golden-section refinement of
/// every sampled local maximum.
pub fn circle_max(f: impl Fn(C64) -> f64) -> f64 {
    let step = 2.0 * std::f64::consts::PI / CIRCLE_SAMPLES as f64;
    let g = |t: f64| f(C64::from_polar(1.0, t));
    let vals: Vec<f64> = (0..CIRCLE_SAMPLES).map(|j| g(j as f64 * step)).collect();
    let mut best = vals.iter().copied().fold(0.0, f64::max);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for j in 0..CIRCLE_SAMPLES {
        let prev = vals[(j + CIRCLE_SAMPLES - 1) % CIRCLE_SAMPLES];
        let next = vals[(j + 1) % CIRCLE_SAMPLES];
        if vals[j] < prev || vals[j] < next {
            continue;
        }
        let (mut a, mut b) = ((j as f64 - 1.0) * step, (j as f64 + 1.0) * step);
        let mut c = b - phi * (b - a);
        let mut d = a + phi * (b - a);
        let (mut fc, mut fd) = (g(c), g(d));
        for _ in 0..60 {
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - phi * (b - a);
                fc = g(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + phi * (b - a);
                fd = g(d);
            }
        }
        best = best.max(fc).max(fd);
    }
    best
}

/// Polydisc bound at a matched grid: `max_{ζ'} max_{|w|=1} |P(ζ', w)|`
/// with `ζ'` over the same torus grid in the first `n − 1` variables.
pub fn polydisc_sup(p: &MultiPoly, grid: usize) -> f64 {
    let m = p.nvars.saturating_sub(1);
    if p.nvars == 0 {
        return p.eval_scalar(&[]).norm();
    }
    torus_points(m, grid)
        .iter()
        .map(|z| {
            let q = collapse_last(p, z);
            circle_max(|w| horner(&q, w).0.norm())
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Component {
    V0,
    V1,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarietyPoint {
    pub z: Vec<C64>,
    pub lambda: C64,
    pub component: Component,
    /// `|det(λI − Φ_j(z))|`.
    pub residual: f64,
    /// `root_tol·(1 + ‖Φ_j(z)‖)^e`.
    pub residual_bound: f64,
    pub on_torus: bool,
    /// `|λ| < 1` and every `|z_i| < 1`.
    pub interior: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarietySample {
    pub grid: usize,
    pub radius: f64,
    pub h0_dim: usize,
    pub points: Vec<VarietyPoint>,
    pub singular_points: usize,
}

impl VarietySample {
    pub fn residuals_ok(&self) -> bool {
        self.points.iter().all(|p| p.residual <= p.residual_bound)
    }

    /// `max |P|` over the sampled points of `V`.
    pub fn sup(&self, p: &MultiPoly) -> f64 {
        self.points
            .iter()
            .map(|pt| {
                let mut full = pt.z.clone();
                full.push(pt.lambda);
                p.eval_scalar(&full).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Cartesian grid of `grid × grid` real points per coordinate clipped to
/// `|z| ≤ radius`.
fn disc_grid(grid: usize, radius: f64) -> Vec<C64> {
    let axis: Vec<f64> = if grid <= 1 {
        vec![0.0]
    } else {
        (0..grid)
            .map(|j| -radius + 2.0 * radius * j as f64 / (grid - 1) as f64)
            .collect()
    };
    let mut pts = Vec::new();
    for &x in &axis {
        for &y in &axis {
            let z = C64::new(x, y);
            if z.norm() <= radius * (1.0 + 1e-12) {
                pts.push(z);
            }
        }
    }
    pts
}

fn product_points(vars: usize, axis: &[C64]) -> Vec<Vec<C64>> {
    let mut points = vec![Vec::new()];
    for _ in 0..vars {
        points = points
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    points
}

fn fiber(
    phi: &CMatrix,
    z: &[C64],
    component: Component,
    on_torus: bool,
    root_tol: f64,
) -> Result<Vec<VarietyPoint>, VnError> {
    let e = phi.rows();
    let roots = poly_roots(&charpoly(phi))?;
    let bound = root_tol * (1.0 + operator_norm(phi)).powi(e as i32);
    let z_inside = z.iter().all(|zi| zi.norm() < 1.0);
    Ok(roots
        .into_iter()
        .map(|lambda| {
            let shifted = &CMatrix::identity(e).scale(lambda) - phi;
            VarietyPoint {
                z: z.to_vec(),
                lambda,
                component,
                residual: det(&shifted).norm(),
                residual_bound: bound,
                on_torus,
                interior: z_inside && lambda.norm() < 1.0,
            }
        })
        .collect())
}

/// Points of `V₀ = D^{n−1} × σ(W*)` and of `V₁ = {det(z_nI − Φ₁(z)) = 0}`
/// over the interior grid, plus the `V₁` fibers over the torus grid.
pub fn variety_sample(
    r: &TransferRealization,
    grid: usize,
    radius: f64,
    tols: &Tolerances,
) -> Result<VarietySample, VnError> {
    let split = split_phi(r, tols.cert)?;
    let vars = r.vars();
    let interior = product_points(vars, &disc_grid(grid, radius));
    let torus = product_points(vars, &circle_grid(grid.max(1)));
    let mut points = Vec::new();
    let mut singular_points = 0;
    for z in &interior {
        if split.h0_dim() > 0 {
            points.extend(fiber(&split.phi0, z, Component::V0, false, tols.root)?);
        }
        if let Some(phi1) = &split.phi1 {
            match transfer_eval(phi1, z) {
                Ok(m) => points.extend(fiber(&m, z, Component::V1, false, tols.root)?),
                Err(_) => singular_points += 1,
            }
        }
    }
    if let Some(phi1) = &split.phi1 {
        for z in &torus {
            match transfer_eval(phi1, z) {
                Ok(m) => points.extend(fiber(&m, z, Component::V1, true, tols.root)?),
                Err(_) => singular_points += 1,
            }
        }
    }
    Ok(VarietySample {
        grid,
        radius,
        h0_dim: split.h0_dim(),
        points,
        singular_points,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VnConfig {
    pub grid: usize,
    pub variety_grid: usize,
    pub radius: f64,
    pub tolerances: Tolerances,
}

impl Default for VnConfig {
    fn default() -> Self {
        Self {
            grid: 32,
            variety_grid: 17,
            radius: 0.95,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VnReport {
    /// `‖P(T)‖`.
    pub lhs: f64,
    /// `max_ζ ‖P(ζI, Φ(ζ))‖` over the torus grid.
    pub rhs: f64,
    pub margin: f64,
    pub grid: usize,
    pub singular_points: usize,
    pub h0_dim: usize,
    /// `max_{ζ'} max_{|w|=1} |P(ζ', w)|` at the same grid.
    pub polydisc_rhs: f64,
    /// `max |P|` over interior variety samples, when requested.
    pub variety_sup: Option<f64>,
    pub passed: bool,
}

/// Checks `‖P(T)‖ ≤ rhs + vn_tol` against an already built realization.
pub fn vn_check_with(
    p: &MultiPoly,
    tuple: &OperatorTuple,
    samples: &TorusSamples,
    h0_dim: usize,
    tols: &Tolerances,
) -> Result<VnReport, VnError> {
    let lhs = operator_norm(&eval_poly_tuple(p, tuple)?);
    let needed = p.max_exponent(p.nvars - 1);
    if needed > samples.max_power() {
        return Err(VnError::Parse(format!(
            "degree {needed} in the last variable exceeds sampled powers {}",
            samples.max_power()
        )));
    }
    let rhs = samples.sup(p);
    let margin = rhs - lhs;
    Ok(VnReport {
        lhs,
        rhs,
        margin,
        grid: samples.grid(),
        singular_points: samples.singular_points(),
        h0_dim,
        polydisc_rhs: polydisc_sup(p, samples.grid()),
        variety_sup: None,
        passed: margin >= -tols.vn,
    })
}

/// Builds the realization for `(tuple, cert)` and checks the inequality for `p`.
pub fn vn_check(
    p: &MultiPoly,
    tuple: &OperatorTuple,
    cert: &PnCertificate,
    cfg: &VnConfig,
) -> Result<VnReport, VnError> {
    if p.nvars != tuple.n() {
        return Err(VnError::ArityMismatch {
            expected: tuple.n(),
            got: p.nvars,
        });
    }
    let built = build_generating_unitary(tuple, cert, cfg.tolerances.cert)?;
    let r = &built.realization;
    let split = split_phi(r, cfg.tolerances.cert)?;
    let samples = TorusSamples::new(r, cfg.grid, p.max_exponent(p.nvars - 1));
    let mut report = vn_check_with(p, tuple, &samples, split.h0_dim(), &cfg.tolerances)?;
    let variety = variety_sample(r, cfg.variety_grid, cfg.radius, &cfg.tolerances)?;
    report.variety_sup = Some(variety.sup(p));
    Ok(report)
}

/// `ρ(T_n) < 1 − tol` implies `dim H₀ = 0`.
pub fn pure_tn_refinement(tuple: &OperatorTuple, h0_dim: usize, tol: f64) -> bool {
    spectral_radius(tuple.last()) >= 1.0 - tol || h0_dim == 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tuples::{make_tuple, verify_pn};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn zero_triple() -> (OperatorTuple, PnCertificate) {
        let z = CMatrix::zeros(2, 2);
        let t = make_tuple(vec![z.clone(), z.clone(), z.clone()], 1e-10, 1e-10).unwrap();
        let cert = verify_pn(&t, vec![CMatrix::identity(2), z], 1e-8).unwrap();
        (t, cert)
    }

    /// `Φ(z) = z₁`: `U` swaps `𝓓` and `𝓕`.
    fn flip() -> TransferRealization {
        let u = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        TransferRealization::from_unitary(&u, 1, vec![1]).unwrap()
    }

    #[test]
    fn parse_examples() {
        let p: MultiPoly = "z1*z2 + z3".parse().unwrap();
        assert_eq!(p.nvars(), 3);
        assert_eq!(p.terms().len(), 2);
        let q: MultiPoly = "1+2i".parse().unwrap();
        assert_eq!(q.eval_scalar(&[]), c(1.0, 2.0));
        let r: MultiPoly = " (1.5-2i) * z1^2 * z2 - 3 * z2 + 1e-3 ".parse().unwrap();
        let z = [c(0.3, 0.1), c(-0.2, 0.5)];
        let want = c(1.5, -2.0) * z[0] * z[0] * z[1] - 3.0 * z[1] + c(1e-3, 0.0);
        assert!((r.eval_scalar(&z) - want).norm() < 1e-15);
        assert!("z1 +".parse::<MultiPoly>().is_err());
        assert!("z0".parse::<MultiPoly>().is_err());
        assert!("(z1)".parse::<MultiPoly>().is_err());
        assert!("((1)".parse::<MultiPoly>().is_err());
        assert_eq!("z1 - z1".parse::<MultiPoly>().unwrap().terms().len(), 0);
    }

    #[test]
    fn display_round_trips() {
        let p: MultiPoly = "(0.1-0.7i)*z1^2*z3 + 2i*z2 - 0.3".parse().unwrap();
        let back: MultiPoly = p.to_string().parse().unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn arity_checks() {
        assert!(matches!(
            MultiPoly::parse_with_arity("z4", 3),
            Err(VnError::ArityMismatch { expected: 3, got: 4 })
        ));
        let p = MultiPoly::parse_with_arity("1", 3).unwrap();
        assert_eq!(p.nvars(), 3);
        let (t, _) = zero_triple();
        assert!(matches!(
            eval_poly_tuple(&"z1".parse().unwrap(), &t),
            Err(VnError::ArityMismatch { .. })
        ));
    }

    #[test]
    fn eval_examples() {
        let (t, _) = zero_triple();
        assert_eq!(
            eval_poly_tuple(&MultiPoly::constant(3, ONE), &t).unwrap(),
            CMatrix::identity(2)
        );
        let p = MultiPoly::parse_with_arity("z1*z2 + z3", 3).unwrap();
        assert_eq!(eval_poly_tuple(&p, &t).unwrap().max_abs(), 0.0);
        let a = CMatrix::from_real_rows(&[&[0.5, 0.0], &[0.1, 0.2]]);
        let one = make_tuple(vec![a.clone()], 1e-10, 1e-10).unwrap();
        assert_eq!(eval_poly_tuple(&MultiPoly::var(1, 1), &one).unwrap(), a);
        let sq = eval_poly_tuple(&"z1^2 - 2*z1".parse().unwrap(), &one).unwrap();
        assert!((&sq - &(&a.matmul(&a) - &a.scale_real(2.0))).max_abs() < 1e-15);
    }

    #[test]
    fn torus_sup_examples() {
        let r = flip();
        let z1 = MultiPoly::var(2, 1);
        assert!((torus_sup(&z1, &r, 16).unwrap().sup - 1.0).abs() < 1e-15);
        let k = MultiPoly::constant(2, c(3.0, 4.0));
        assert!((torus_sup(&k, &r, 16).unwrap().sup - 5.0).abs() < 1e-14);
        // Φ = z₁, so z₂ − z₁ vanishes on the torus.
        let p: MultiPoly = "z2 - z1".parse().unwrap();
        assert!(torus_sup(&p, &r, 16).unwrap().sup < 1e-15);

        let w = CMatrix::diag(&[c(0.0, 1.0)]);
        let constant = TransferRealization::from_blocks(
            w,
            CMatrix::zeros(1, 1),
            CMatrix::zeros(1, 1),
            CMatrix::identity(1),
            vec![1],
        )
        .unwrap();
        let rep = torus_sup(&MultiPoly::var(2, 2), &constant, 8).unwrap();
        assert!((rep.sup - 1.0).abs() < 1e-15);
        assert_eq!(rep.singular_points, 1);
    }

    #[test]
    fn circle_max_finds_peak_between_samples() {
        let t0 = 0.0123;
        let peak = C64::from_polar(1.0, t0);
        let v = circle_max(|w| 2.0 - (w - peak).norm());
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn split_examples() {
        let w = CMatrix::diag(&[c(0.0, 1.0), c(-1.0, 0.0)]);
        let dec = TransferRealization::from_blocks(
            w.clone(),
            CMatrix::zeros(2, 1),
            CMatrix::zeros(1, 2),
            CMatrix::identity(1),
            vec![1],
        )
        .unwrap();
        let s = split_phi(&dec, 1e-9).unwrap();
        assert_eq!(s.h0_dim(), 2);
        assert!(s.phi1.is_none());
        let p0 = s.h0.adjoint().matmul(&w.adjoint()).matmul(&s.h0);
        assert!((&p0 - &s.phi0).max_abs() < 1e-12);

        let r = flip();
        let s = split_phi(&r, 1e-9).unwrap();
        assert_eq!(s.h0_dim(), 0);
        let phi1 = s.phi1.as_ref().unwrap();
        let z = [c(0.3, -0.4)];
        let direct = transfer_eval(&r, &z).unwrap();
        let via = s.h1.matmul(&transfer_eval(phi1, &z).unwrap()).matmul(&s.h1.adjoint());
        assert!((&direct - &via).max_abs() < 1e-14);
    }

    #[test]
    fn variety_examples() {
        let tols = Tolerances::default();
        let lam = c(0.6, 0.8);
        let constant = TransferRealization::from_blocks(
            CMatrix::diag(&[lam.conj()]),
            CMatrix::zeros(1, 1),
            CMatrix::zeros(1, 1),
            CMatrix::identity(1),
            vec![1],
        )
        .unwrap();
        let v = variety_sample(&constant, 5, 0.9, &tols).unwrap();
        assert_eq!(v.h0_dim, 1);
        assert!(!v.points.is_empty());
        assert!(v
            .points
            .iter()
            .all(|p| p.component == Component::V0 && (p.lambda - lam).norm() < 1e-12));

        let v = variety_sample(&flip(), 7, 0.9, &tols).unwrap();
        assert!(v.residuals_ok());
        assert!(v.points.iter().all(|p| (p.lambda - p.z[0]).norm() < 1e-12));
        assert!(v
            .points
            .iter()
            .all(|p| p.component == Component::V1 && (p.interior != p.on_torus)));
    }

    #[test]
    fn vn_zero_triple() {
        let (t, cert) = zero_triple();
        let cfg = VnConfig {
            grid: 8,
            variety_grid: 5,
            ..VnConfig::default()
        };
        let one = MultiPoly::constant(3, ONE);
        let rep = vn_check(&one, &t, &cert, &cfg).unwrap();
        assert_eq!((rep.lhs, rep.margin), (1.0, 0.0));
        let p = MultiPoly::parse_with_arity("z1 + z2", 3).unwrap();
        let rep = vn_check(&p, &t, &cert, &cfg).unwrap();
        assert_eq!(rep.lhs, 0.0);
        assert!((rep.rhs - 2.0).abs() < 1e-12);
        assert!(rep.passed);
        assert_eq!(rep.h0_dim, 0);
        assert!(pure_tn_refinement(&t, rep.h0_dim, 1e-10));
        assert!(!pure_tn_refinement(&t, 1, 1e-10));
    }
}
