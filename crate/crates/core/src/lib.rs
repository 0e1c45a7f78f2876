//! Finite set-theoretic solutions of the Yang–Baxter equation: verification,
//! retracts and multipermutation level, the permutation group generated by
//! left translations, explicit constructions, and exhaustive enumeration.

pub mod construct;
pub mod enumerate;
pub mod group;
mod iso;
pub mod perm;
pub mod qset;
pub mod retract;

pub use construct::{ConstructError, LinearParams, StuActions};
pub use enumerate::{EnumerateError, EnumerateOptions};
pub use group::{GroupError, PermGroup};
pub use perm::{PermError, Permutation};
pub use qset::{classify, is_square_free_solution, Property, PropertyFlags, QsetError, QuadraticSet};
pub use retract::{mpl, RetractError, RetractTower};
