//! Verification outcomes and resource budgets.

use serde::{Deserialize, Serialize};
use woods10_core::Point;

/// Resource limits and tolerances for one optimization claim.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Budget {
    pub max_boxes: u64,
    pub max_seconds: f64,
    pub eps: f64,
    pub min_box_width: f64,
    pub rng_seed: u64,
}

impl Budget {
    pub fn replicate_default() -> Budget {
        Budget {
            max_boxes: 0,
            max_seconds: 120.0,
            eps: 1e-6,
            min_box_width: 1e-9,
            rng_seed: 1,
        }
    }

    pub fn certify_default() -> Budget {
        Budget {
            max_boxes: 40_000_000,
            max_seconds: 600.0,
            eps: 1e-4,
            min_box_width: 1e-9,
            rng_seed: 1,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Budget {
        self.rng_seed = seed;
        self
    }
}

/// Feasibility tolerance for witness points (absolute, per constraint).
pub const FEAS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    ProvedUpperBound,
    ProvedLowerBound,
    CounterexampleFound,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Witness {
    pub point: Point,
    pub value: f64,
    pub max_violation: f64,
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct Stats {
    pub boxes: u64,
    pub splits: u64,
    pub prunes_infeasible: u64,
    pub prunes_bound: u64,
    pub surviving: u64,
    pub wall_ms: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    /// The bound actually certified (threshold +/- eps).
    pub certified_bound: f64,
    pub witness: Option<Witness>,
    pub stats: Stats,
}

impl Verdict {
    pub fn proved(&self) -> bool {
        matches!(self.status, Status::ProvedUpperBound | Status::ProvedLowerBound)
    }
}
