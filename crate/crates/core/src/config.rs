use serde::{Deserialize, Serialize};

/// Numerical tolerances shared across the pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub eig: f64,
    /// Eigenvalues in `[-psd_clamp, 0)` are treated as zero in square roots.
    pub psd_clamp: f64,
    pub root: f64,
    /// Certificate checks: psd margins, sum identity, rank cut for frames.
    pub cert: f64,
    /// One-sided slack on the von Neumann margin.
    pub vn: f64,
    pub commute: f64,
    pub contract: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eig: 1e-10,
            psd_clamp: 1e-9,
            root: 1e-7,
            cert: 1e-8,
            vn: 1e-7,
            commute: 1e-10,
            contract: 1e-10,
        }
    }
}
