//! The two interchangeable verification strategies behind one trait,
//! registered by name and selected at runtime (`--mode replicate|certify`).

use woods10_core::Expr;
use woods10_model::ConstraintSet;

use crate::bb;
use crate::multistart::{multistart_max, multistart_min};
use crate::verdict::{Budget, Stats, Status, Verdict, Witness, FEAS_TOL};

pub trait BoundProver: Sync + Send {
    fn name(&self) -> &'static str;

    /// Verify `sup objective <= threshold (+ eps)` over the region.
    fn prove_upper(
        &self,
        objective: &Expr,
        cs: &ConstraintSet,
        threshold: f64,
        budget: &Budget,
        with_bank: bool,
    ) -> Verdict;

    /// Verify `inf objective >= threshold (- eps)` over the region.
    fn prove_lower(
        &self,
        objective: &Expr,
        cs: &ConstraintSet,
        threshold: f64,
        budget: &Budget,
        with_bank: bool,
    ) -> Verdict;
}

/// Rigorous interval branch-and-bound.
pub struct CertifyProver;

impl BoundProver for CertifyProver {
    fn name(&self) -> &'static str {
        "certify"
    }

    fn prove_upper(
        &self,
        objective: &Expr,
        cs: &ConstraintSet,
        threshold: f64,
        budget: &Budget,
        with_bank: bool,
    ) -> Verdict {
        bb::certify_upper(objective, cs, threshold, budget, with_bank)
    }

    fn prove_lower(
        &self,
        objective: &Expr,
        cs: &ConstraintSet,
        threshold: f64,
        budget: &Budget,
        with_bank: bool,
    ) -> Verdict {
        bb::certify_lower(objective, cs, threshold, budget, with_bank)
    }
}

/// Heuristic multistart search reproducing the original solver claims.
/// A claim "verifies" when the best point found respects the bound; a
/// feasible point beating it is a counterexample to the claim.
pub struct ReplicateProver;

impl ReplicateProver {
    fn verdict(found: Option<(woods10_core::Point, f64)>, target: f64, upper: bool) -> Verdict {
        match found {
            None => Verdict {
                status: Status::Inconclusive,
                certified_bound: target,
                witness: None,
                stats: Stats::default(),
            },
            Some((p, v)) => {
                let beats = if upper { v > target } else { v < target };
                let status = if beats {
                    Status::CounterexampleFound
                } else if upper {
                    Status::ProvedUpperBound
                } else {
                    Status::ProvedLowerBound
                };
                Verdict {
                    status,
                    certified_bound: target,
                    witness: Some(Witness {
                        point: p,
                        value: v,
                        max_violation: FEAS_TOL,
                    }),
                    stats: Stats::default(),
                }
            }
        }
    }
}

impl BoundProver for ReplicateProver {
    fn name(&self) -> &'static str {
        "replicate"
    }

    fn prove_upper(
        &self,
        objective: &Expr,
        cs: &ConstraintSet,
        threshold: f64,
        budget: &Budget,
        _with_bank: bool,
    ) -> Verdict {
        let target = threshold + budget.eps;
        Self::verdict(multistart_max(objective, cs, budget).ok(), target, true)
    }

    fn prove_lower(
        &self,
        objective: &Expr,
        cs: &ConstraintSet,
        threshold: f64,
        budget: &Budget,
        _with_bank: bool,
    ) -> Verdict {
        let target = threshold - budget.eps;
        Self::verdict(multistart_min(objective, cs, budget).ok(), target, false)
    }
}

static CERTIFY: CertifyProver = CertifyProver;
static REPLICATE: ReplicateProver = ReplicateProver;

/// Registry of verification strategies by name.
pub fn prover(name: &str) -> Option<&'static dyn BoundProver> {
    match name {
        "certify" => Some(&CERTIFY),
        "replicate" => Some(&REPLICATE),
        _ => None,
    }
}

pub fn prover_names() -> [&'static str; 2] {
    ["replicate", "certify"]
}
