//! Compositions of 10 into parts 1 and 2, and the constraint families they
//! generate: the 88 weak bounds shared by every case, and the box-adaptive
//! strong variants used by the hardest cases.

use woods10_core::{Box10, Constraint, Expr, Var};

use crate::constraints::{Provenance, TaggedConstraint};
use crate::partition::{strong_term_parts, weak_term_2};

/// A composition of 10 into parts of size 1 and 2, e.g. `(2,1,1,1,1,1,1,1,1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Composition {
    pub parts: Vec<u8>,
}

impl Composition {
    pub fn label(&self) -> String {
        let inner: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        format!("({})", inner.join(","))
    }

    /// Start variable index of each part, consecutive from `A`.
    pub fn spans(&self) -> Vec<(usize, u8)> {
        let mut out = Vec::with_capacity(self.parts.len());
        let mut at = 0usize;
        for &p in &self.parts {
            out.push((at, p));
            at += p as usize;
        }
        debug_assert_eq!(at, 10);
        out
    }
}

/// All compositions of 10 with parts in {1,2} except the all-ones one;
/// exactly 88. Deterministic order: by number of 2-parts ascending, then
/// by 2-part positions lexicographically.
pub fn compositions_12() -> Vec<Composition> {
    fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut pick: Vec<usize> = (0..k).collect();
        loop {
            out.push(pick.clone());
            let mut advanced = false;
            let mut i = k;
            while i > 0 {
                i -= 1;
                if pick[i] < n - k + i {
                    pick[i] += 1;
                    for j in i + 1..k {
                        pick[j] = pick[j - 1] + 1;
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                break;
            }
        }
        out
    }

    let mut out = Vec::with_capacity(88);
    for twos in 1..=5usize {
        let slots = 10 - twos; // number of parts in the composition
        for pick in combinations(slots, twos) {
            let mut parts = vec![1u8; slots];
            for p in pick {
                parts[p] = 2;
            }
            out.push(Composition { parts });
        }
    }
    debug_assert_eq!(out.len(), 88);
    out
}

/// Weak bound of a composition: a 1-part on `X` contributes `X`, a 2-part
/// on `(X, Y)` contributes `2Y`.
pub fn weak_bound(c: &Composition) -> Expr {
    let mut terms = Vec::new();
    for (start, size) in c.spans() {
        match size {
            1 => terms.push(Expr::var(Var(start as u8))),
            2 => terms.push(weak_term_2(Var(start as u8))),
            _ => unreachable!(),
        }
    }
    Expr::sum(terms)
}

/// The 88 weak constraints `bound >= 10`, in generator order.
pub fn weak88_constraints() -> Vec<TaggedConstraint> {
    compositions_12()
        .iter()
        .map(|c| TaggedConstraint {
            constraint: Constraint::ge0(weak_bound(c).sub(Expr::int(10))),
            provenance: Provenance::Weak88,
            label: c.label(),
        })
        .collect()
}

/// Strong-where-provable composition bounds: each 2-part on `(X, Y)` uses
/// the strong term `4X - 2X^2/Y` when the box proves `2X >= Y` outright,
/// and the weak term `2Y` otherwise. Compositions where no part upgrades
/// are omitted (they duplicate the weak list).
pub fn strong_composition_constraints(b: &Box10) -> Vec<TaggedConstraint> {
    let mut out = Vec::new();
    for c in compositions_12() {
        let mut upgraded = false;
        let mut terms = Vec::new();
        for (start, size) in c.spans() {
            match size {
                1 => terms.push(Expr::var(Var(start as u8))),
                2 => {
                    let x = Var(start as u8);
                    let y = Var(start as u8 + 1);
                    let provable = 2.0 * b.get(x).lo() >= b.get(y).hi();
                    if provable {
                        let (_, term) = strong_term_parts(2, x).unwrap();
                        terms.push(term);
                        upgraded = true;
                    } else {
                        terms.push(weak_term_2(x));
                    }
                }
                _ => unreachable!(),
            }
        }
        if upgraded {
            out.push(TaggedConstraint {
                constraint: Constraint::ge0(Expr::sum(terms).sub(Expr::int(10))),
                provenance: Provenance::StrongPart,
                label: format!("{} strong", c.label()),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use woods10_core::expr::eval_real;
    use woods10_core::{Interval, DIM};

    #[test]
    fn exactly_88() {
        assert_eq!(compositions_12().len(), 88);
        assert_eq!(weak88_constraints().len(), 88);
        // no duplicates
        let set: std::collections::HashSet<_> =
            compositions_12().iter().map(|c| c.parts.clone()).collect();
        assert_eq!(set.len(), 88);
    }

    #[test]
    fn first_and_known_entries() {
        let cs = compositions_12();
        assert_eq!(cs[0].label(), "(2,1,1,1,1,1,1,1,1)");
        let b = weak_bound(&cs[0]);
        assert_eq!(
            b.to_string(),
            "(+ (* 2 B) C D E F G H I J)"
        );
        assert!(cs.iter().any(|c| c.label() == "(2,2,2,2,2)"));
        let five = cs.iter().find(|c| c.label() == "(2,2,2,2,2)").unwrap();
        assert_eq!(weak_bound(five).to_string(), "(+ (* 2 B) (* 2 D) (* 2 F) (* 2 H) (* 2 J))");
    }

    #[test]
    fn every_weak_bound_is_ten_at_all_ones() {
        let ones = [1.0; DIM];
        for c in compositions_12() {
            let v = eval_real(&weak_bound(&c), &ones).unwrap();
            assert_eq!(v, 10.0, "composition {}", c.label());
        }
    }

    #[test]
    fn strong_upgrade_follows_box() {
        // box proving 2G >= H upgrades the (G,H) part
        let mut b = Box10::uniform(Interval::new(0.9, 1.1));
        b.set(Var(6), Interval::new(0.8, 1.0));
        b.set(Var(7), Interval::new(0.9, 1.2));
        // 2 * 0.8 = 1.6 >= 1.2: provable
        let list = strong_composition_constraints(&b);
        let gh = list
            .iter()
            .find(|t| t.label == "(1,1,1,1,1,1,2,1,1) strong")
            .expect("composition with 2-part at (G,H)");
        assert!(gh.constraint.expr.to_string().contains("(^ G 2)"));

        // box where 2G < H possible: no upgrade anywhere with H huge
        let mut b2 = Box10::uniform(Interval::new(0.2, 2.2));
        for v in Var::all() {
            b2.set(v, Interval::new(0.2, 2.2));
        }
        assert!(strong_composition_constraints(&b2).is_empty());
    }
}
