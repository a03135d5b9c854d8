//! Objective range bounding over a box.
//!
//! Three enclosures are intersected: the natural interval extension, a
//! mean-value form anchored at the box midpoint, and an exact range for
//! objectives that decompose into support-disjoint parts of known shape
//! (linear terms, the strong radius terms `4X - c X^k / rest`, and
//! monotone single-occurrence parts). Partition bounds always decompose,
//! which removes the dependency problem exactly where branch-and-bound
//! clusters: near the all-ones corner.

use woods10_core::expr::Workspace;
use woods10_core::{Box10, Expr, Interval, Scalar, Tape, Var, DIM};

/// One support-disjoint component of the objective.
enum Group {
    Const(Interval),
    Lin {
        coef: Interval,
        var: Var,
    },
    /// `4X - c X^k / prod(rest)`, concave in X for positive values.
    Strong {
        x: Var,
        rest: Vec<Var>,
        k: u32,
        coef: Interval,
    },
    /// Anything else: natural extension on a compiled tape (single
    /// variable occurrences make this exact for monotone parts).
    Generic {
        tape: Tape,
    },
}

pub struct ObjectiveBounder {
    groups: Vec<Group>,
    /// Tape of the whole objective, for the mean-value form and probes.
    pub tape: Tape,
    decomposed: bool,
}

fn match_lin(e: &Expr) -> Option<(Interval, Var)> {
    match e {
        Expr::Var(v) => Some((Interval::point(1.0), *v)),
        Expr::Neg(inner) => match_lin(inner).map(|(c, v)| (c.neg(), v)),
        Expr::Prod(fs) if fs.len() == 2 => match (&fs[0], &fs[1]) {
            (Expr::Const(s), Expr::Var(v)) => Some((s.interval(), *v)),
            _ => None,
        },
        _ => None,
    }
}

fn match_pow(e: &Expr) -> Option<(Var, u32)> {
    match e {
        Expr::PowInt(b, k) => match **b {
            Expr::Var(v) => Some((v, *k)),
            _ => None,
        },
        Expr::Var(v) => Some((*v, 1)),
        _ => None,
    }
}

fn all_vars(e: &Expr) -> Option<Vec<Var>> {
    match e {
        Expr::Var(v) => Some(vec![*v]),
        Expr::Prod(fs) => {
            let mut out = Vec::with_capacity(fs.len());
            for f in fs {
                match f {
                    Expr::Var(v) => out.push(*v),
                    _ => return None,
                }
            }
            Some(out)
        }
        _ => None,
    }
}

/// Match `4X - c X^k / rest` (normalized form).
fn match_strong(e: &Expr) -> Option<(Var, Vec<Var>, u32, Interval)> {
    let Expr::Sum(terms) = e else { return None };
    if terms.len() != 2 {
        return None;
    }
    let (c4, x) = match_lin(&terms[0])?;
    if c4 != Interval::point(4.0) {
        return None;
    }
    let Expr::Neg(inner) = &terms[1] else { return None };
    let Expr::Div(num, den) = &**inner else { return None };
    let (coef, base, k) = match &**num {
        Expr::Prod(fs) if fs.len() == 2 => match (&fs[0], match_pow(&fs[1])) {
            (Expr::Const(s), Some((v, k))) => (s.interval(), v, k),
            _ => return None,
        },
        other => match match_pow(other) {
            Some((v, k)) => (Interval::point(1.0), v, k),
            None => return None,
        },
    };
    if base != x || k < 2 {
        return None;
    }
    let rest = all_vars(den)?;
    if rest.contains(&x) {
        return None;
    }
    Some((x, rest, k, coef))
}

impl ObjectiveBounder {
    pub fn new(objective: &Expr) -> ObjectiveBounder {
        let norm = objective.normalized();
        let tape = Tape::compile(&norm);
        let children: Vec<Expr> = match &norm {
            Expr::Sum(ts) => ts.clone(),
            other => vec![other.clone()],
        };
        // cluster children by overlapping support
        let supports: Vec<u16> = children.iter().map(|c| c.support()).collect();
        let mut cluster_of: Vec<usize> = (0..children.len()).collect();
        loop {
            let mut changed = false;
            for i in 0..children.len() {
                for j in i + 1..children.len() {
                    if supports[i] & supports[j] != 0 && cluster_of[i] != cluster_of[j] {
                        let target = cluster_of[i].min(cluster_of[j]);
                        let from = cluster_of[i].max(cluster_of[j]);
                        for c in cluster_of.iter_mut() {
                            if *c == from {
                                *c = target;
                            }
                        }
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut groups = Vec::new();
        let mut decomposed = true;
        let mut cluster_ids: Vec<usize> = cluster_of.clone();
        cluster_ids.sort_unstable();
        cluster_ids.dedup();
        for cid in cluster_ids {
            let members: Vec<Expr> = children
                .iter()
                .zip(&cluster_of)
                .filter(|(_, c)| **c == cid)
                .map(|(e, _)| e.clone())
                .collect();
            let e = if members.len() == 1 {
                members.into_iter().next().unwrap()
            } else {
                Expr::Sum(members)
            };
            if let Expr::Const(s) = &e {
                groups.push(Group::Const(s.interval()));
                continue;
            }
            if let Some((coef, var)) = match_lin(&e) {
                groups.push(Group::Lin { coef, var });
                continue;
            }
            if let Some((x, rest, k, coef)) = match_strong(&e) {
                groups.push(Group::Strong { x, rest, k, coef });
                continue;
            }
            groups.push(Group::Generic {
                tape: Tape::compile(&e),
            });
            decomposed = false;
        }
        ObjectiveBounder {
            groups,
            tape,
            decomposed,
        }
    }

    /// Whether the objective fully decomposed into recognized disjoint parts.
    pub fn is_decomposed(&self) -> bool {
        self.decomposed
    }

    fn strong_range(x: Interval, rest: &[Var], k: u32, coef: Interval, b: &Box10) -> Interval {
        let mut r = Interval::point(1.0);
        for v in rest {
            r = r.mul(b.get(*v));
        }
        if r.lo() <= 0.0 || x.lo() < 0.0 {
            // outside the concavity regime; fall back to the natural form
            let quotient = coef
                .mul(x.pow_int(k))
                .div(r)
                .unwrap_or(Interval::ENTIRE);
            return Interval::point(4.0).mul(x).sub(quotient);
        }
        let four = Interval::point(4.0);

        // upper bound: R at its maximum, tangent-line bound at the clamped
        // stationary point (tangents of a concave function lie above it)
        let r_hi = Interval::point(r.hi());
        let ck = coef.mul(Interval::point(k as f64));
        let x_star = (4.0 * r.hi() / ck.mid()).powf(1.0 / (k as f64 - 1.0));
        let m = Interval::point(x_star.clamp(x.lo(), x.hi()));
        let g_m = four
            .mul(m)
            .sub(coef.mul(m.pow_int(k)).div(r_hi).unwrap_or(Interval::ENTIRE));
        let d_m = four.sub(ck.mul(m.pow_int(k - 1)).div(r_hi).unwrap_or(Interval::ENTIRE));
        let t_lo = g_m.add(d_m.mul(Interval::point(x.lo()).sub(m)));
        let t_hi = g_m.add(d_m.mul(Interval::point(x.hi()).sub(m)));
        let hi = t_lo.hi().max(t_hi.hi());

        // lower bound: R at its minimum, concave minimum is at a corner
        let r_lo = Interval::point(r.lo());
        let corner = |xc: f64| {
            let xi = Interval::point(xc);
            four.mul(xi)
                .sub(coef.mul(xi.pow_int(k)).div(r_lo).unwrap_or(Interval::ENTIRE))
        };
        let lo = corner(x.lo()).lo().min(corner(x.hi()).lo());

        // natural extension as a safety net (also covers rounding slack)
        let natural = four
            .mul(x)
            .sub(coef.mul(x.pow_int(k)).div(r).unwrap_or(Interval::ENTIRE));
        Interval::new(lo.max(natural.lo()), hi.min(natural.hi()))
    }

    /// Range enclosure by exact part decomposition (or natural extension
    /// for unrecognized groups).
    pub fn part_range(&self, b: &Box10, ws: &mut Workspace) -> Interval {
        let mut acc = Interval::point(0.0);
        for g in &self.groups {
            let r = match g {
                Group::Const(c) => *c,
                Group::Lin { coef, var } => coef.mul(b.get(*var)),
                Group::Strong { x, rest, k, coef } => {
                    Self::strong_range(b.get(*x), rest, *k, *coef, b)
                }
                Group::Generic { tape } => tape
                    .eval_interval(b, ws)
                    .unwrap_or(Interval::ENTIRE),
            };
            acc = acc.add(r);
        }
        acc
    }

    /// Mean-value form anchored at the box midpoint.
    pub fn mean_value_range(&self, b: &Box10, ws: &mut Workspace) -> Interval {
        let mid = b.midpoint();
        let mut mid_box = b.clone();
        for v in Var::all() {
            mid_box.set(v, Interval::point(mid[v.index()]));
        }
        let f_mid = match self.tape.eval_interval(&mid_box, ws) {
            Ok(iv) => iv,
            Err(_) => return Interval::ENTIRE,
        };
        let (_, grad) = self.tape.interval_gradient(b, ws);
        let mut acc = f_mid;
        for i in 0..DIM {
            if !self.tape.depends_on(Var(i as u8)) {
                continue;
            }
            let dx = b.bounds()[i].sub(Interval::point(mid[i]));
            acc = acc.add(grad[i].mul(dx));
        }
        acc
    }

    /// Intersected enclosure of the objective range over the box.
    pub fn range(&self, b: &Box10, ws: &mut Workspace) -> Interval {
        let part = self.part_range(b, ws);
        if self.decomposed {
            // decomposition is exact; the mean-value form cannot improve it
            return part;
        }
        let mv = self.mean_value_range(b, ws);
        part.intersect(mv).unwrap_or(part)
    }
}

/// Scalar helper: coefficient 2 as used by weak parts.
pub fn two() -> Scalar {
    Scalar::int(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use woods10_core::expr::eval_real;

    fn strong2(x: u8, y: u8) -> Expr {
        Expr::int(4)
            .mul(Expr::var(Var(x)))
            .sub(Expr::int(2).mul(Expr::var(Var(x)).pow(2)).div(Expr::var(Var(y))))
    }

    #[test]
    fn phi14_like_decomposes() {
        let obj = Expr::sum(vec![
            strong2(0, 1),
            strong2(2, 3),
            strong2(4, 5),
            strong2(6, 7),
            Expr::var(Var(8)),
            Expr::var(Var(9)),
        ]);
        let bd = ObjectiveBounder::new(&obj);
        assert!(bd.is_decomposed());

        // box around all-ones: exact sup is attained per part
        let h = 0.01;
        let b = Box10::uniform(Interval::new(1.0 - h, 1.0 + h));
        let mut ws = Workspace::default();
        let r = bd.range(&b, &mut ws);
        // per strong part the max over the box is 2(1+h) (at X = Y = 1+h);
        // plus I.hi + J.hi
        let expected_hi = 4.0 * (2.0 * (1.0 + h)) + 2.0 * (1.0 + h);
        assert!((r.hi() - expected_hi).abs() < 1e-9, "hi {} vs {}", r.hi(), expected_hi);

        // natural extension is much looser
        let natural = bd.tape.eval_interval(&b, &mut ws).unwrap();
        assert!(natural.hi() > expected_hi + 0.01);
    }

    #[test]
    fn part_range_contains_samples() {
        let obj = Expr::sum(vec![
            strong2(0, 1),
            Expr::int(4).mul(Expr::var(Var(6))).sub(
                Expr::ratio(1, 2)
                    .mul(Expr::var(Var(6)).pow(4))
                    .div(Expr::prod(vec![
                        Expr::var(Var(7)),
                        Expr::var(Var(8)),
                        Expr::var(Var(9)),
                    ])),
            ),
            Expr::var(Var(2)),
        ]);
        let bd = ObjectiveBounder::new(&obj);
        assert!(bd.is_decomposed());
        let mut ws = Workspace::default();
        let mut state = 0xdeadbeefu64;
        let mut rnd = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..200 {
            let mut b = Box10::uniform(Interval::point(1.0));
            for v in Var::all() {
                let lo = 0.3 + rnd();
                b.set(v, Interval::new(lo, lo + rnd()));
            }
            let r = bd.range(&b, &mut ws);
            for _ in 0..30 {
                let p: [f64; DIM] = std::array::from_fn(|i| {
                    let iv = b.bounds()[i];
                    iv.lo() + rnd() * iv.width()
                });
                let v = eval_real(&obj, &p).unwrap();
                assert!(
                    r.contains(v),
                    "range {r:?} misses {v} at {p:?}"
                );
            }
        }
    }

    #[test]
    fn mean_value_tight_at_stationary_corner() {
        // S12-like shape: stationary at all-ones, mean-value form sees it
        let mut prod_factors = vec![Expr::var(Var(0)).pow(4)];
        prod_factors.extend((3..10).map(|i| Expr::var(Var(i))));
        let mut terms = vec![
            Expr::int(4).mul(Expr::var(Var(0))),
            Expr::Prod(prod_factors).neg(),
        ];
        terms.extend((3..10).map(|i| Expr::var(Var(i))));
        let obj = Expr::sum(terms);
        let bd = ObjectiveBounder::new(&obj);
        let mut ws = Workspace::default();
        let h = 1e-3;
        let b = Box10::uniform(Interval::new(1.0 - h, 1.0 + h));
        let mv = bd.mean_value_range(&b, &mut ws);
        let natural = bd.tape.eval_interval(&b, &mut ws).unwrap();
        // f = 10 at the stationary point; the mean-value overestimate is O(h^2)
        assert!(mv.hi() < 10.0 + 200.0 * h * h, "mv hi {}", mv.hi());
        assert!(natural.hi() > 10.0 + h);
    }
}
