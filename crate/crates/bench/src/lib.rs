//! Inputs shared by the benchmarks.

use ybs_core::construct::{gap_example, gi_x, jump_example};
use ybs_core::QuadraticSet;

/// Named solutions of increasing size: 12, 26, 65 and 129 points.
pub fn solutions() -> Vec<(&'static str, QuadraticSet)> {
    vec![
        ("gap12", gap_example()),
        ("jump26", jump_example()),
        ("gi7", gi_x(7).expect("gi_x(7) builds")),
        ("gi8", gi_x(8).expect("gi_x(8) builds")),
    ]
}
