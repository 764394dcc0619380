//! Numerical workbench for commuting contraction tuples: class certificates,
//! explicit isometric dilations through transfer-function realizations,
//! truncated Hardy-space identity checks and the variety-based von Neumann
//! inequality.

pub mod config;
pub mod generators;
pub mod hardy;
pub mod matcore;
pub mod realization;
pub mod tuples;
pub mod verify;
pub mod vonneumann;

pub use config::Tolerances;
pub use hardy::{CanonicalIsometry, EmbedJ, HardyElement, HardyError, IndexBox, SymbolSeries};
pub use matcore::{CMatrix, MatError, C64};
pub use realization::{GeneratedRealization, RealizationError, TransferRealization};
pub use tuples::{make_tuple, verify_pn, CertError, OperatorTuple, PnCertificate, TupleError};
pub use verify::{IdentityCheck, VerificationReport, VerifyConfig, VerifyError};
pub use vonneumann::{MultiPoly, VarietySample, VnConfig, VnError, VnReport};
