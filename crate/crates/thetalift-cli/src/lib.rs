//! Command-line front end: coefficient ingestion, the identity suite and
//! its JSON report.

pub mod coeffs;
pub mod compute;
pub mod report;
pub mod suite;
