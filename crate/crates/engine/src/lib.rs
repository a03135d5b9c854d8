//! Verification engines and the case runner for the n = 10 covering case
//! analysis: a rigorous interval branch-and-bound prover, a heuristic
//! multistart prover replicating the original solver runs, proof-script
//! execution over the 512 sign-pattern cases, and the auxiliary lemma
//! checks.

pub mod bb;
pub mod bounds;
pub mod multistart;
pub mod prover;
pub mod region;
pub mod verdict;

pub use prover::{prover, prover_names, BoundProver, CertifyProver, ReplicateProver};
pub use verdict::{Budget, Stats, Status, Verdict, Witness, FEAS_TOL};
