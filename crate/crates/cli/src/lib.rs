//! File format, graph export and reports behind the `ybs` binary.

pub mod dot;
pub mod format;
pub mod report;

pub use dot::{export_dot, DotError};
pub use format::{parse_ybs, parse_ybs_all, write_ybs, FormatError};
pub use report::{analyze, SolutionReport, REPORT_SCHEMA};
