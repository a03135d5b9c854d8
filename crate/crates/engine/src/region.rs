//! Runtime form of a case region: constraints classified into cheap
//! specialized forms plus general contraction tapes, and the composition
//! bank evaluated by dynamic programming over pair deltas.

use std::sync::Arc;

use woods10_core::expr::{contract_fixpoint, Workspace};
use woods10_core::{Box10, Expr, Interval, Point, Rel, Scalar, Tape, Var, DIM};
use woods10_model::ConstraintSet;

use crate::verdict::FEAS_TOL;

/// `X_i - coef * X_j {>=,<=} 0` (chain inequalities and caps).
struct TwoVar {
    i: usize,
    j: usize,
    coef: Interval,
    ge: bool,
}

impl TwoVar {
    fn contract(&self, b: &mut Box10) -> bool {
        let xi = b.bounds()[self.i];
        let xj = b.bounds()[self.j];
        let scaled = self.coef.mul(xj);
        if self.ge {
            // X_i >= coef X_j: raise X_i.lo, cap X_j.hi
            let lo = xi.lo().max(scaled.lo());
            if lo > xi.hi() {
                return false;
            }
            b.set(Var(self.i as u8), Interval::new(lo, xi.hi()));
            if let Ok(q) = Interval::new(lo, xi.hi()).div(self.coef) {
                let hi = xj.hi().min(q.hi());
                if hi < xj.lo() {
                    return false;
                }
                b.set(Var(self.j as u8), Interval::new(xj.lo(), hi));
            }
        } else {
            // X_i <= coef X_j
            let hi = xi.hi().min(scaled.hi());
            if hi < xi.lo() {
                return false;
            }
            b.set(Var(self.i as u8), Interval::new(xi.lo(), hi));
            if let Ok(q) = Interval::new(xi.lo(), hi).div(self.coef) {
                let lo = xj.lo().max(q.lo());
                if lo > xj.hi() {
                    return false;
                }
                b.set(Var(self.j as u8), Interval::new(lo, xj.hi()));
            }
        }
        true
    }

    fn support(&self) -> u16 {
        (1 << self.i) | (1 << self.j)
    }
}

fn match_const(e: &Expr) -> Option<Interval> {
    match e {
        Expr::Const(s) => Some(s.interval()),
        Expr::Neg(inner) => match_const(inner).map(Interval::neg),
        _ => None,
    }
}

/// Match `Var - const` (single-variable bound).
fn match_one_var(e: &Expr) -> Option<(usize, Interval)> {
    let Expr::Sum(ts) = e else { return None };
    if ts.len() != 2 {
        return None;
    }
    let Expr::Var(v) = ts[0] else { return None };
    let Expr::Neg(c) = &ts[1] else { return None };
    let c = match_const(c)?;
    Some((v.index(), c))
}

/// Match `Var_i - coef * Var_j`.
fn match_two_var(e: &Expr) -> Option<(usize, usize, Interval)> {
    let Expr::Sum(ts) = e else { return None };
    if ts.len() != 2 {
        return None;
    }
    let Expr::Var(vi) = ts[0] else { return None };
    let Expr::Neg(rhs) = &ts[1] else { return None };
    match &**rhs {
        Expr::Var(vj) => Some((vi.index(), vj.index(), Interval::point(1.0))),
        Expr::Prod(fs) if fs.len() == 2 => match (&fs[0], &fs[1]) {
            (Expr::Const(s), Expr::Var(vj)) => Some((vi.index(), vj.index(), s.interval())),
            _ => None,
        },
        _ => None,
    }
}

pub struct Region {
    pub cs: ConstraintSet,
    two_vars: Vec<TwoVar>,
    tapes: Vec<(Tape, Rel)>,
    /// Pair modes for the composition bank (None = bank disabled).
    bank: bool,
    pub initial_box: Box10,
}

impl Region {
    /// Compile a constraint set. `with_bank` enables the 88-composition
    /// prune (sound only for case regions under the contradiction
    /// hypothesis; off for plain optimization and the auxiliary lemmas).
    ///
    /// Single-variable bounds are folded into the initial box. Weak
    /// composition bounds with more than one 2-part are covered exactly by
    /// the bank's dynamic program and are dropped from the contraction
    /// loop; the nine single-2 bounds stay, their backward propagation is
    /// what narrows boxes near the all-ones corner.
    pub fn compile(cs: &ConstraintSet, with_bank: bool) -> Arc<Region> {
        let mut initial_box = cs.initial_box.clone();
        let mut two_vars = Vec::new();
        let mut tapes = Vec::new();
        for item in &cs.items {
            let c = &item.constraint;
            if c.rel != Rel::Eq {
                if let Some((i, cst)) = match_one_var(&c.expr) {
                    let iv = initial_box.bounds()[i];
                    let narrowed = match c.rel {
                        Rel::Ge => Interval::new(iv.lo().max(cst.lo()), iv.hi()),
                        Rel::Le => Interval::new(iv.lo(), iv.hi().min(cst.hi())),
                        Rel::Eq => unreachable!(),
                    };
                    if narrowed.lo() <= narrowed.hi() {
                        initial_box.set(Var(i as u8), narrowed);
                    } else {
                        // empty base region; keep a degenerate sliver, the
                        // solver will prune it via the tape
                        tapes.push((Tape::compile(&c.expr), c.rel));
                    }
                    continue;
                }
                if let Some((i, j, coef)) = match_two_var(&c.expr) {
                    if coef.lo() > 0.0 {
                        two_vars.push(TwoVar {
                            i,
                            j,
                            coef,
                            ge: c.rel == Rel::Ge,
                        });
                        continue;
                    }
                }
                if with_bank
                    && item.provenance == woods10_model::Provenance::Weak88
                    && weak_two_part_count(&c.expr) > 1
                {
                    continue;
                }
            }
            tapes.push((Tape::compile(&c.expr), c.rel));
        }
        Arc::new(Region {
            cs: cs.clone(),
            two_vars,
            tapes,
            bank: with_bank,
            initial_box,
        })
    }

    /// Composition-bank prune: smallest upper bound over the 88 weak/strong
    /// composition bounds, via DP over non-overlapping pair deltas. Below
    /// 10 the box is infeasible under the contradiction hypothesis.
    fn bank_min_hi(&self, b: &Box10) -> f64 {
        let bounds = b.bounds();
        let mut s = Interval::point(0.0);
        for iv in bounds.iter() {
            s = s.add(*iv);
        }
        // delta of taking pair (p, p+1): the pair's X and Y leave the sum
        // and the part term enters; suprema decouple exactly, so deltas are
        // computed against X.hi and Y.hi
        let mut delta = [0.0f64; 9];
        for p in 0..9 {
            let x = bounds[p];
            let y = bounds[p + 1];
            // weak part 2Y: delta = 2Y.hi - X.hi - Y.hi = Y.hi - X.hi
            let weak = Interval::point(y.hi()).sub(Interval::point(x.hi())).hi();
            let mut d = weak;
            if 2.0 * x.lo() >= y.hi() && x.lo() > 0.0 && y.lo() > 0.0 {
                // strong part 4X - 2X^2/Y: concave in X at Y = Y.hi; the
                // tangent at the clamped stationary point bounds its sup
                let yh = Interval::point(y.hi());
                let m = Interval::point(y.hi().clamp(x.lo(), x.hi()));
                let g = Interval::point(4.0)
                    .mul(m)
                    .sub(Interval::point(2.0).mul(m.pow_int(2)).div(yh).unwrap());
                let dg = Interval::point(4.0)
                    .sub(Interval::point(4.0).mul(m).div(yh).unwrap());
                let t1 = g.add(dg.mul(Interval::point(x.lo()).sub(m)));
                let t2 = g.add(dg.mul(Interval::point(x.hi()).sub(m)));
                let strong_hi = t1.hi().max(t2.hi());
                let strong_delta = Interval::point(strong_hi)
                    .sub(Interval::point(x.hi()))
                    .sub(Interval::point(y.hi()))
                    .hi();
                d = d.min(strong_delta);
            }
            delta[p] = d;
        }
        // dp[p]: minimal delta sum over non-overlapping pairs at positions >= p
        let mut dp = [0.0f64; 11];
        for p in (0..9).rev() {
            dp[p] = dp[p + 1].min(delta[p] + dp[p + 2]);
        }
        // best nonempty selection
        let mut best = f64::INFINITY;
        for p in 0..9 {
            best = best.min(delta[p] + dp[p + 2]);
        }
        let total = s.add(Interval::point(best));
        total.hi()
    }

    /// HC4 sweep over every constraint plus the goal tape; `None` when the
    /// box empties. Constraints are revisited only while some variable in
    /// their support keeps narrowing.
    pub fn contract(
        &self,
        b: &mut Box10,
        goal: Option<(&Tape, Rel)>,
        ws: &mut Workspace,
        passes: usize,
    ) -> Option<()> {
        let mut changed: u16 = u16::MAX;
        for _ in 0..passes {
            let before = b.clone();
            for tv in &self.two_vars {
                if tv.support() & changed == 0 {
                    continue;
                }
                if !tv.contract(b) {
                    return None;
                }
            }
            for (tape, rel) in &self.tapes {
                if tape.support() & changed == 0 {
                    continue;
                }
                if !tape.contract(*rel, b, ws) {
                    return None;
                }
            }
            if let Some((tape, rel)) = goal {
                if !tape.contract(rel, b, ws) {
                    return None;
                }
            }
            let mut mask = 0u16;
            for i in 0..DIM {
                let w0 = before.bounds()[i].width();
                let w1 = b.bounds()[i].width();
                if w0 - w1 > 0.01 * w0.max(1e-300) {
                    mask |= 1 << i;
                }
            }
            if mask == 0 {
                break;
            }
            changed = mask;
        }
        if self.bank && self.bank_min_hi(b) < 10.0 {
            return None;
        }
        Some(())
    }

    /// Propagated initial box for solving (fresh copy).
    pub fn root_box(&self, ws: &mut Workspace) -> Option<Box10> {
        let mut b = self.initial_box.clone();
        for _ in 0..40 {
            let before = b.clone();
            self.contract(&mut b, None, ws, 2)?;
            if (0..DIM).all(|i| before.bounds()[i].width() - b.bounds()[i].width() < 1e-6) {
                break;
            }
        }
        Some(b)
    }

    /// Maximum constraint violation at a point (for witness checks).
    pub fn max_violation(&self, p: &Point) -> f64 {
        let mut worst: f64 = 0.0;
        for t in &self.cs.items {
            match t.constraint.violation_at(p) {
                Ok(v) => worst = worst.max(v),
                Err(_) => return f64::INFINITY,
            }
        }
        for (i, iv) in self.cs.initial_box.bounds().iter().enumerate() {
            worst = worst.max(iv.lo() - p[i]).max(p[i] - iv.hi());
        }
        worst
    }

    pub fn is_feasible(&self, p: &Point) -> bool {
        self.max_violation(p) <= FEAS_TOL
    }

    /// Index of the product-one equality among the constraints, if present.
    pub fn product_constraint(&self) -> Option<usize> {
        self.cs
            .items
            .iter()
            .position(|t| t.provenance == woods10_model::Provenance::ProductOne)
    }
}

/// Number of 2-parts in a weak composition bound expression.
fn weak_two_part_count(e: &Expr) -> usize {
    let Expr::Sum(ts) = e else { return 0 };
    ts.iter()
        .filter(|t| {
            matches!(t, Expr::Prod(fs) if fs.len() == 2
                && matches!(&fs[0], Expr::Const(s) if *s == Scalar::int(2)))
        })
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use woods10_model::compositions::weak88_constraints;
    use woods10_model::{base_constraints, SignPattern};

    fn region_for(idx: u32, bank: bool) -> Arc<Region> {
        let mut cs = base_constraints(SignPattern::from_case_index(idx).unwrap());
        for w in weak88_constraints() {
            cs.items.push(w);
        }
        assert!(cs.repropagate());
        Region::compile(&cs, bank)
    }

    #[test]
    fn all_ones_feasible_and_bank_keeps_it() {
        let region = region_for(121, true);
        let ones = [1.0; DIM];
        assert!(region.is_feasible(&ones));
        let mut ws = Workspace::default();
        let mut b = Box10::uniform(Interval::new(0.995, 1.005));
        b.set(Var(0), Interval::new(1.0, 1.005));
        assert!(region.contract(&mut b, None, &mut ws, 3).is_some());
        assert!(b.contains_point(&ones));
    }

    #[test]
    fn bank_min_matches_explicit_weak_minimum() {
        let region = region_for(8, true);
        let mut ws = Workspace::default();
        let b = region.root_box(&mut ws).unwrap();
        let dp = region.bank_min_hi(&b);
        // explicit minimum over the 88 weak bounds (no strong upgrades on
        // the wide root box)
        let mut explicit = f64::INFINITY;
        for w in weak88_constraints() {
            let t = Tape::compile(&w.constraint.expr);
            let iv = t.eval_interval(&b, &mut ws).unwrap();
            explicit = explicit.min(iv.hi() + 10.0);
        }
        assert!(
            (dp - explicit).abs() < 1e-9,
            "dp {dp} vs explicit {explicit}"
        );
    }

    #[test]
    fn contraction_keeps_feasible_sample() {
        let region = region_for(48, true);
        // a concrete feasible point of case 48 (signs: B,C,D,F > 1)
        let mut ws = Workspace::default();
        let b = region.root_box(&mut ws).unwrap();
        let ones = [1.0; DIM];
        assert!(b.contains_point(&ones));
    }
}
