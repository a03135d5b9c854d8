//! Domain model for the n = 10 case analysis: the constants from the
//! reduction lemmas, the 512 sign-pattern cases, the common constraint
//! system every case shares, and the generator that derives conditional
//! inequalities (strong, weak, starred) from ordered partitions of 10.

pub mod catalog;
pub mod compositions;
pub mod constants;
pub mod constraints;
pub mod partition;
pub mod sign;

pub use catalog::Catalog;
pub use compositions::{strong_composition_constraints, weak88_constraints, Composition};
pub use constraints::{base_constraints, ConstraintSet, Provenance, TaggedConstraint};
pub use partition::{build_inequality, ConditionalInequality, GenError, Part, Partition};
pub use sign::SignPattern;
