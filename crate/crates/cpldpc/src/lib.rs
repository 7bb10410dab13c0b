//! Standard-library companion to `cpldpc-core`: the CPTABLE file format,
//! parallel drivers, JSON/CSV reports, manifests and the `cpldpc` command line.

pub mod appendix;
pub mod cli;
pub mod cptable;
pub mod error;
pub mod manifest;
pub mod parallel;
pub mod reconcile;
pub mod report;

pub use error::{CliError, Result};
