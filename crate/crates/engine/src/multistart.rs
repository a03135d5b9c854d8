//! Replicate mode: multistart projected-gradient local search with exact
//! penalty, reproducing off-the-shelf-solver bound claims heuristically.
//! The product-one equality is handled by eliminating the last variable;
//! every other constraint enters the penalty. Deterministic for a fixed
//! seed and independent of worker count.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;
use woods10_core::expr::Workspace;
use woods10_core::{Box10, Expr, Point, Rel, Tape, DIM};
use woods10_model::ConstraintSet;

use crate::region::Region;
use crate::verdict::{Budget, FEAS_TOL};

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("no start point reached feasibility")]
pub struct NoFeasibleStart;

const STARTS: usize = 64;
const INTERIOR_MARGIN: f64 = 1e-12;

struct Search {
    objective: Tape,
    constraints: Vec<(Tape, Rel)>,
    bounds: Box10,
    free: Vec<usize>,
    eliminate_j: bool,
}

impl Search {
    /// Fill the eliminated coordinate from the product-one manifold.
    fn complete(&self, x: &mut Point) {
        if self.eliminate_j {
            let prod: f64 = x[..9].iter().product();
            x[9] = if prod > 0.0 { 1.0 / prod } else { f64::MAX };
        }
    }

    fn clamp(&self, x: &mut Point) {
        for i in 0..DIM {
            if self.eliminate_j && i == 9 {
                continue;
            }
            let iv = self.bounds.bounds()[i];
            let lo = iv.lo() + INTERIOR_MARGIN;
            let hi = iv.hi() - INTERIOR_MARGIN;
            x[i] = x[i].clamp(lo, hi.max(lo));
        }
        self.complete(x);
    }

    /// Sum of squared violations and its gradient w.r.t. the free variables.
    fn infeasibility(&self, x: &Point, ws: &mut Workspace) -> (f64, [f64; DIM]) {
        let mut total = 0.0;
        let mut grad = [0.0; DIM];
        for (tape, rel) in &self.constraints {
            let Ok((v, g)) = tape.gradient(x, ws) else {
                return (f64::INFINITY, grad);
            };
            let (active, sign) = match rel {
                Rel::Ge => (v < 0.0, -1.0),
                Rel::Le => (v > 0.0, 1.0),
                Rel::Eq => (v != 0.0, v.signum()),
            };
            if active {
                let mag = sign * v; // positive violation
                total += mag * mag;
                for i in 0..DIM {
                    grad[i] += 2.0 * mag * sign * g[i];
                }
            }
        }
        // bound violations for the eliminated coordinate
        if self.eliminate_j {
            let iv = self.bounds.bounds()[9];
            let (viol, sign) = if x[9] < iv.lo() {
                (iv.lo() - x[9], -1.0)
            } else if x[9] > iv.hi() {
                (x[9] - iv.hi(), 1.0)
            } else {
                (0.0, 0.0)
            };
            if viol > 0.0 {
                total += viol * viol;
                grad[9] += 2.0 * viol * sign;
            }
        }
        (total, self.reduce(x, grad))
    }

    /// Chain rule through the elimination: d/dx_i of F(x, J(x)) with
    /// J = 1/(x_0..x_8) gives dF_i - dF_J * J / x_i.
    fn reduce(&self, x: &Point, mut grad: [f64; DIM]) -> [f64; DIM] {
        if self.eliminate_j {
            let gj = grad[9];
            if gj != 0.0 {
                for i in 0..9 {
                    grad[i] -= gj * x[9] / x[i];
                }
            }
            grad[9] = 0.0;
        }
        for i in 0..DIM {
            if !self.free.contains(&i) {
                grad[i] = 0.0;
            }
        }
        grad
    }

    fn penalized(&self, x: &Point, mu: f64, ws: &mut Workspace) -> (f64, [f64; DIM]) {
        let Ok((f, fg)) = self.objective.gradient(x, ws) else {
            return (f64::NEG_INFINITY, [0.0; DIM]);
        };
        let mut val = f;
        let mut grad = fg;
        for (tape, rel) in &self.constraints {
            let Ok((v, g)) = tape.gradient(x, ws) else {
                return (f64::NEG_INFINITY, [0.0; DIM]);
            };
            let (viol, sign) = match rel {
                Rel::Ge => ((-v).max(0.0), -1.0),
                Rel::Le => (v.max(0.0), 1.0),
                Rel::Eq => (v.abs(), v.signum()),
            };
            if viol > 0.0 {
                val -= mu * viol;
                for i in 0..DIM {
                    grad[i] -= mu * sign * g[i];
                }
            }
        }
        (val, self.reduce(x, grad))
    }

    /// Gradient ascent with backtracking on the penalized objective.
    fn ascend(&self, x: &mut Point, mu: f64, iters: usize, ws: &mut Workspace) {
        let mut step = 0.1;
        for _ in 0..iters {
            let (v0, g) = self.penalized(x, mu, ws);
            if !v0.is_finite() {
                return;
            }
            let norm: f64 = g.iter().map(|d| d * d).sum::<f64>().sqrt();
            if norm < 1e-13 {
                return;
            }
            let mut alpha = step;
            let mut improved = false;
            for _ in 0..25 {
                let mut cand = *x;
                for i in 0..DIM {
                    cand[i] = x[i] + alpha * g[i] / norm;
                }
                self.clamp(&mut cand);
                let (v1, _) = self.penalized(&cand, mu, ws);
                if v1 > v0 + 1e-15 {
                    *x = cand;
                    step = (alpha * 2.0).min(0.5);
                    improved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !improved {
                return;
            }
        }
    }

    /// Descent on squared infeasibility until inside tolerance.
    fn restore(&self, x: &mut Point, ws: &mut Workspace) {
        let mut step = 0.1;
        for _ in 0..400 {
            let (s0, g) = self.infeasibility(x, ws);
            if s0 < 1e-24 {
                return;
            }
            if !s0.is_finite() {
                return;
            }
            let norm: f64 = g.iter().map(|d| d * d).sum::<f64>().sqrt();
            if norm < 1e-16 {
                return;
            }
            let mut alpha = step;
            let mut improved = false;
            for _ in 0..30 {
                let mut cand = *x;
                for i in 0..DIM {
                    cand[i] = x[i] - alpha * g[i] / norm;
                }
                self.clamp(&mut cand);
                let (s1, _) = self.infeasibility(&cand, ws);
                if s1 < s0 * (1.0 - 1e-12) {
                    *x = cand;
                    step = (alpha * 2.0).min(0.25);
                    improved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !improved {
                return;
            }
        }
    }
}

/// Heuristic maximum of the objective over the region, from 64 Latin
/// hypercube starts. The returned point is feasible within `FEAS_TOL`.
pub fn multistart_max(
    objective: &Expr,
    cs: &ConstraintSet,
    budget: &Budget,
) -> Result<(Point, f64), NoFeasibleStart> {
    let region = Region::compile(cs, false);
    let mut ws = Workspace::default();
    let bounds = region
        .root_box(&mut ws)
        .unwrap_or_else(|| region.initial_box.clone());

    let eliminate_j = region.product_constraint().is_some();
    let support: u16 = {
        let mut m = objective.support();
        for t in &cs.items {
            m |= t.constraint.expr.support();
        }
        m
    };
    let mut free: Vec<usize> = (0..DIM).filter(|i| support & (1 << i) != 0).collect();
    if eliminate_j {
        free.retain(|&i| i != 9);
    }

    let constraints: Vec<(Tape, Rel)> = cs
        .items
        .iter()
        .filter(|t| !(eliminate_j && t.provenance == woods10_model::Provenance::ProductOne))
        .map(|t| (Tape::compile(&t.constraint.expr), t.constraint.rel))
        .collect();

    let search = Search {
        objective: Tape::compile(objective),
        constraints,
        bounds: bounds.clone(),
        free: free.clone(),
        eliminate_j,
    };

    // Latin hypercube over the free coordinates
    let mut rng = ChaCha8Rng::seed_from_u64(budget.rng_seed);
    let mut strata: Vec<Vec<usize>> = Vec::new();
    for _ in 0..free.len() {
        let mut order: Vec<usize> = (0..STARTS).collect();
        for i in (1..STARTS).rev() {
            let j = rng.gen_range(0..=i);
            order.swap(i, j);
        }
        strata.push(order);
    }
    let jitter: Vec<Vec<f64>> = (0..STARTS)
        .map(|_| (0..free.len()).map(|_| rng.gen::<f64>()).collect())
        .collect();

    let starts: Vec<Point> = (0..STARTS)
        .map(|s| {
            let mut p: Point = bounds.midpoint();
            for (fi, &i) in free.iter().enumerate() {
                let iv = bounds.bounds()[i];
                let t = (strata[fi][s] as f64 + jitter[s][fi]) / STARTS as f64;
                p[i] = iv.lo() + t * iv.width();
            }
            p
        })
        .collect();

    let results: Vec<Option<(f64, Point)>> = starts
        .into_par_iter()
        .map_init(Workspace::default, |ws, mut x| {
            search.clamp(&mut x);
            search.restore(&mut x, ws);
            for mu in [1e2, 1e4, 1e6] {
                search.ascend(&mut x, mu, 120, ws);
                search.restore(&mut x, ws);
            }
            if region.max_violation(&x) > FEAS_TOL {
                return None;
            }
            let value = search.objective.eval_real(&x, ws).ok()?;
            Some((value, x))
        })
        .collect();

    let mut best: Option<(f64, Point)> = None;
    for r in results.into_iter().flatten() {
        let replace = match &best {
            None => true,
            Some((bv, _)) => r.0 > *bv,
        };
        if replace {
            best = Some(r);
        }
    }
    match best {
        Some((v, p)) => Ok((p, v)),
        None => Err(NoFeasibleStart),
    }
}

/// Heuristic minimum via negation.
pub fn multistart_min(
    objective: &Expr,
    cs: &ConstraintSet,
    budget: &Budget,
) -> Result<(Point, f64), NoFeasibleStart> {
    let (p, v) = multistart_max(&objective.clone().neg(), cs, budget)?;
    Ok((p, -v))
}
