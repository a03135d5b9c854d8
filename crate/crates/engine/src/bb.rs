//! Certify mode: rigorous interval branch-and-bound.
//!
//! To prove `sup f <= t + eps` over a region, the solver exhausts the box
//! tree of `region ∩ { f >= t + eps }`: a box is discarded when a
//! constraint is infeasible on it (interval test or contractor emptying),
//! or when the objective enclosure stays at or below the target. Otherwise
//! it splits on the widest dimension relative to the initial box. A
//! feasible midpoint beating the target is a counterexample witness.
//! Lower-bound claims run the mirror image.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use woods10_core::expr::Workspace;
use woods10_core::{Box10, Constraint, Expr, Point, Rel, Tape, Var, DIM};
use woods10_model::ConstraintSet;

use crate::bounds::ObjectiveBounder;
use crate::region::Region;
use crate::verdict::{Budget, Stats, Status, Verdict, Witness, FEAS_TOL};

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Upper,
    Lower,
}

struct Problem {
    region: Arc<Region>,
    bounder: ObjectiveBounder,
    goal_tape: Tape,
    goal_rel: Rel,
    sense: Sense,
    target: f64,
    root: Box10,
    root_widths: [f64; DIM],
    min_box_width: f64,
    product_eliminate: bool,
}

enum Out {
    PrunedInfeasible,
    PrunedBound,
    Cex(Witness),
    Children(Box10, Option<Box10>),
    Stalled,
}

impl Problem {
    fn probe(&self, b: &Box10, ws: &mut Workspace) -> Option<Witness> {
        let mut p: Point = b.midpoint();
        if self.product_eliminate {
            // snap the last coordinate onto the product-one manifold
            let prod: f64 = p[..9].iter().product();
            if prod <= 0.0 {
                return None;
            }
            let j = 1.0 / prod;
            if !b.get(Var(9)).contains(j) {
                return None;
            }
            p[9] = j;
        }
        let violation = self.region.max_violation(&p);
        if violation > FEAS_TOL {
            return None;
        }
        let value = self.bounder.tape.eval_real(&p, ws).ok()?;
        let beats = match self.sense {
            Sense::Upper => value > self.target,
            Sense::Lower => value < self.target,
        };
        if beats {
            Some(Witness {
                point: p,
                value,
                max_violation: violation,
            })
        } else {
            None
        }
    }

    fn process(&self, mut b: Box10, ws: &mut Workspace) -> Out {
        if self
            .region
            .contract(&mut b, Some((&self.goal_tape, self.goal_rel)), ws, 3)
            .is_none()
        {
            return Out::PrunedInfeasible;
        }
        let range = self.bounder.range(&b, ws);
        let bound_pruned = match self.sense {
            Sense::Upper => range.hi() <= self.target,
            Sense::Lower => range.lo() >= self.target,
        };
        if bound_pruned {
            return Out::PrunedBound;
        }
        if let Some(w) = self.probe(&b, ws) {
            return Out::Cex(w);
        }
        // split widest relative to the root widths; lowest index on ties
        let mut dim = None;
        let mut best = 0.0;
        for i in 0..DIM {
            let w = b.bounds()[i].width();
            if w <= self.min_box_width {
                continue;
            }
            let rel = w / self.root_widths[i].max(1e-12);
            if rel > best + 1e-15 {
                best = rel;
                dim = Some(i);
            }
        }
        let Some(dim) = dim else {
            return Out::Stalled;
        };
        let iv = b.bounds()[dim];
        let at = iv.mid();
        match b.split(Var(dim as u8), at) {
            Ok((l, r)) => Out::Children(l, Some(r)),
            Err(_) => Out::Stalled,
        }
    }
}

const BATCH: usize = 1024;

fn solve(problem: &Problem, budget: &Budget) -> Verdict {
    let start = Instant::now();
    let mut stats = Stats::default();
    let mut ws = Workspace::default();

    let mut queue: Vec<Box10> = Vec::new();
    {
        let mut root = problem.root.clone();
        if problem
            .region
            .contract(&mut root, Some((&problem.goal_tape, problem.goal_rel)), &mut ws, 40)
            .is_some()
        {
            queue.push(root);
        } else {
            stats.prunes_infeasible += 1;
        }
    }

    let mut stalled: u64 = 0;
    let mut witness: Option<Witness> = None;

    while !queue.is_empty() {
        if budget.max_boxes > 0 && stats.boxes >= budget.max_boxes {
            break;
        }
        if budget.max_seconds > 0.0 && start.elapsed().as_secs_f64() > budget.max_seconds {
            break;
        }
        let take = queue.len().min(BATCH);
        let batch: Vec<Box10> = queue.split_off(queue.len() - take);
        let outs: Vec<Out> = batch
            .into_par_iter()
            .map_init(Workspace::default, |ws, b| problem.process(b, ws))
            .collect();
        stats.boxes += take as u64;
        for out in outs {
            match out {
                Out::PrunedInfeasible => stats.prunes_infeasible += 1,
                Out::PrunedBound => stats.prunes_bound += 1,
                Out::Cex(w) => {
                    if witness.is_none() {
                        witness = Some(w);
                    }
                }
                Out::Children(l, r) => {
                    stats.splits += 1;
                    queue.push(l);
                    if let Some(r) = r {
                        queue.push(r);
                    }
                }
                Out::Stalled => stalled += 1,
            }
        }
        if witness.is_some() {
            break;
        }
    }

    stats.surviving = queue.len() as u64 + stalled;
    stats.wall_ms = start.elapsed().as_millis() as u64;

    let status = if let Some(_) = &witness {
        Status::CounterexampleFound
    } else if stats.surviving == 0 {
        match problem.sense {
            Sense::Upper => Status::ProvedUpperBound,
            Sense::Lower => Status::ProvedLowerBound,
        }
    } else {
        Status::Inconclusive
    };
    Verdict {
        status,
        certified_bound: problem.target,
        witness,
        stats,
    }
}

fn build_problem(
    objective: &Expr,
    region: Arc<Region>,
    sense: Sense,
    threshold: f64,
    budget: &Budget,
) -> Problem {
    let (target, goal_rel) = match sense {
        Sense::Upper => (threshold + budget.eps, Rel::Ge),
        Sense::Lower => (threshold - budget.eps, Rel::Le),
    };
    // goal constraint: objective - target (>= 0 for upper, <= 0 for lower);
    // the exact f64 target is kept as a shortest round-trip literal
    let goal = Constraint {
        expr: objective.clone().sub(Expr::decimal(&format!("{target:?}"))),
        rel: goal_rel,
    };
    let goal_tape = Tape::compile(&goal.expr);
    let mut ws = Workspace::default();
    let root = region
        .root_box(&mut ws)
        .unwrap_or_else(|| region.initial_box.clone());
    let root_widths = std::array::from_fn(|i| root.bounds()[i].width());
    let product_eliminate = region.product_constraint().is_some();
    Problem {
        region,
        bounder: ObjectiveBounder::new(objective),
        goal_tape,
        goal_rel,
        sense,
        target,
        root,
        root_widths,
        min_box_width: budget.min_box_width,
        product_eliminate,
    }
}

/// Prove `sup objective <= threshold + eps` over the region, or find a
/// feasible witness beating the target, or run out of budget.
pub fn certify_upper(
    objective: &Expr,
    cs: &ConstraintSet,
    threshold: f64,
    budget: &Budget,
    with_bank: bool,
) -> Verdict {
    let region = Region::compile(cs, with_bank);
    let problem = build_problem(objective, region, Sense::Upper, threshold, budget);
    solve(&problem, budget)
}

/// Mirror image: prove `inf objective >= threshold - eps`.
pub fn certify_lower(
    objective: &Expr,
    cs: &ConstraintSet,
    threshold: f64,
    budget: &Budget,
    with_bank: bool,
) -> Verdict {
    let region = Region::compile(cs, with_bank);
    let problem = build_problem(objective, region, Sense::Lower, threshold, budget);
    solve(&problem, budget)
}
