//! Command implementations. Each returns the rendered document and the exit
//! code; the caller writes the document even when the code is nonzero.

use std::path::Path;

use pndil::generators::{jordan_pair, product_triple, random_candidate, random_polynomial, GenError};
use pndil::realization::build_generating_unitary;
use pndil::tuples::{bdhs_certificate, verify_pn};
use pndil::vonneumann::{variety_sample, vn_check};
use pndil::{
    CertError, MultiPoly, OperatorTuple, PnCertificate, Tolerances, VerifyConfig, VerifyError, VnConfig, VnError,
};

use crate::doc::{self, CertDiagnostics, CertifyReport, Failure, RealizationDoc, TupleDoc};
use crate::error::{exit, CliError};

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub cap: usize,
    pub grid: usize,
    pub variety_grid: usize,
    pub radius: f64,
    pub tolerances: Tolerances,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            cap: 12,
            grid: 32,
            variety_grid: 17,
            radius: 0.95,
            tolerances: Tolerances::default(),
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let t = &self.tolerances;
        let tols = [t.eig, t.psd_clamp, t.root, t.cert, t.vn, t.commute, t.contract];
        if tols.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(CliError::Config("tolerances must be positive".into()));
        }
        if self.cap < 1 {
            return Err(CliError::Config("--cap must be at least 1".into()));
        }
        if self.grid < 4 {
            return Err(CliError::Config("--grid must be at least 4".into()));
        }
        if self.variety_grid < 2 {
            return Err(CliError::Config("--variety-grid must be at least 2".into()));
        }
        if !(self.radius > 0.0 && self.radius < 1.0) {
            return Err(CliError::Config("--radius must lie in (0, 1)".into()));
        }
        Ok(())
    }

    fn vn(&self) -> VnConfig {
        VnConfig {
            grid: self.grid,
            variety_grid: self.variety_grid,
            radius: self.radius,
            tolerances: self.tolerances,
        }
    }
}

pub struct Output {
    pub text: String,
    pub code: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Self {
            text,
            code: exit::SUCCESS,
        }
    }
}

fn check_certificate(doc: &TupleDoc, tuple: &OperatorTuple, tols: &Tolerances) -> Result<PnCertificate, CertError> {
    match &doc.certificate {
        Some(c) => verify_pn(tuple, c.g.clone(), tols.cert),
        None => bdhs_certificate(tuple, tols.cert),
    }
}

fn certified(path: &Path, cfg: &RunConfig) -> Result<(OperatorTuple, PnCertificate), CliError> {
    let doc: TupleDoc = doc::load(path)?;
    let tuple = doc.to_tuple(&cfg.tolerances)?;
    let cert = check_certificate(&doc, &tuple, &cfg.tolerances).map_err(|e| CliError::Certification(e.to_string()))?;
    Ok((tuple, cert))
}

/// Without a certificate in the input, the splitting `G₁ = I − T_nT_n*`,
/// `G_i = 0` otherwise is tried.
pub fn certify(input: &Path, cfg: &RunConfig) -> Result<Output, CliError> {
    let doc: TupleDoc = doc::load(input)?;
    let tuple = doc.to_tuple(&cfg.tolerances)?;
    let report = match check_certificate(&doc, &tuple, &cfg.tolerances) {
        Ok(cert) => CertifyReport {
            tuple: TupleDoc::from_tuple(&tuple, Some(&cert)),
            accepted: true,
            failure: None,
            diagnostics: Some(CertDiagnostics::new(&cert)),
        },
        Err(e) => CertifyReport {
            tuple: doc,
            accepted: false,
            failure: Some(Failure::from_cert_error(&e)),
            diagnostics: None,
        },
    };
    let code = if report.accepted {
        exit::SUCCESS
    } else {
        exit::CERTIFICATION
    };
    Ok(Output {
        text: doc::to_json(&report),
        code,
    })
}

/// Largest accepted `max ‖U(Dh, Yh) − (DT_n*h, ιh)‖` over a basis. A loose
/// certification tolerance can let an inexact certificate through the
/// completion step; this catches it.
const GENERATING_BOUND: f64 = 1e-9;

pub fn dilate(input: &Path, cfg: &RunConfig) -> Result<Output, CliError> {
    let (tuple, cert) = certified(input, cfg)?;
    let built =
        build_generating_unitary(&tuple, &cert, cfg.tolerances.cert).map_err(|e| CliError::Dilation(e.to_string()))?;
    if built.generating_residual > GENERATING_BOUND {
        return Err(CliError::Dilation(format!(
            "isometry defect: generating residual {:e} exceeds {GENERATING_BOUND:e}",
            built.generating_residual
        )));
    }
    let r = &built.realization;
    let doc = RealizationDoc {
        a: r.a.clone(),
        b: r.b.clone(),
        c: r.c.clone(),
        d: r.d.clone(),
        partition: r.partition.clone(),
        defect_rank: Some(cert.defect_rank()),
        completion_dims: Some(built.completion_dims),
        generating_residual: Some(built.generating_residual),
        unitarity_residual: Some(built.unitarity_residual),
    };
    Ok(Output::ok(doc::to_json(&doc)))
}

fn verify_error(e: VerifyError) -> CliError {
    CliError::Dilation(e.to_string())
}

pub fn verify(input: &Path, cfg: &RunConfig) -> Result<Output, CliError> {
    let (tuple, cert) = certified(input, cfg)?;
    let vcfg = VerifyConfig {
        cap: cfg.cap,
        grid: cfg.grid,
        seed: cfg.seed,
        tolerances: cfg.tolerances,
        ..VerifyConfig::default()
    };
    let report = pndil::verify::verify_dilation(&tuple, &cert, &vcfg).map_err(verify_error)?;
    let code = if report.all_passed() {
        exit::SUCCESS
    } else {
        exit::VERIFICATION
    };
    Ok(Output {
        text: doc::to_json(&report),
        code,
    })
}

fn vn_error(e: VnError) -> CliError {
    match e {
        VnError::ArityMismatch { .. } | VnError::Parse(_) => CliError::Parse(e.to_string()),
        _ => CliError::Dilation(e.to_string()),
    }
}

pub fn vn(input: &Path, poly: &Path, cfg: &RunConfig) -> Result<Output, CliError> {
    let text = doc::read_text(poly)?;
    let (tuple, cert) = certified(input, cfg)?;
    let p = MultiPoly::parse_with_arity(text.trim(), tuple.n()).map_err(vn_error)?;
    let report = vn_check(&p, &tuple, &cert, &cfg.vn()).map_err(vn_error)?;
    let code = if report.passed { exit::SUCCESS } else { exit::VN_MARGIN };
    Ok(Output {
        text: doc::to_json(&report),
        code,
    })
}

pub fn variety(input: &Path, cfg: &RunConfig) -> Result<Output, CliError> {
    let (tuple, cert) = certified(input, cfg)?;
    let built =
        build_generating_unitary(&tuple, &cert, cfg.tolerances.cert).map_err(|e| CliError::Dilation(e.to_string()))?;
    let sample = variety_sample(&built.realization, cfg.variety_grid, cfg.radius, &cfg.tolerances).map_err(vn_error)?;
    Ok(Output::ok(doc::to_json(&sample)))
}

fn gen_error(e: GenError) -> CliError {
    match e {
        GenError::Parameters(m) => CliError::Config(m),
        other => CliError::Certification(other.to_string()),
    }
}

pub fn generate_product_triple(
    d1: usize,
    d2: usize,
    r: f64,
    j: usize,
    k: usize,
    cfg: &RunConfig,
) -> Result<Output, CliError> {
    let pair = jordan_pair(d1, d2, r, r).map_err(gen_error)?;
    let (tuple, cert) = product_triple(&pair, j, k, cfg.tolerances.cert).map_err(gen_error)?;
    Ok(Output::ok(doc::to_json(&TupleDoc::from_tuple(&tuple, Some(&cert)))))
}

pub fn generate_random_tuple(dim: usize, n: usize, margin: f64, cfg: &RunConfig) -> Result<Output, CliError> {
    let tuple = random_candidate(cfg.seed, dim, n, margin).map_err(gen_error)?;
    Ok(Output::ok(doc::to_json(&TupleDoc::from_tuple(&tuple, None))))
}

pub fn generate_poly(vars: usize, degree: usize, cfg: &RunConfig) -> Result<Output, CliError> {
    if vars == 0 {
        return Err(CliError::Config("--vars must be at least 1".into()));
    }
    Ok(Output::ok(format!("{}\n", random_polynomial(cfg.seed, vars, degree))))
}
