//! Library side of the `pndil` command-line tool: JSON documents and command
//! handlers.

pub mod commands;
pub mod doc;
pub mod error;

pub use commands::{Output, RunConfig};
pub use error::{exit, CliError};
