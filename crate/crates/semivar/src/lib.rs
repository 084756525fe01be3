//! File formats, reports and the command implementations behind the
//! `semivar` binary.

pub mod commands;
pub mod format;
pub mod report;
