//! The common constraint system shared by every case: the Hermite bound on
//! `A`, the Lemma 3/4 chain inequalities exactly as tabulated, the `X <= A`
//! caps, the sign bounds of the case, and the product-one equality. The
//! initial box is computed by propagating these constraints rather than
//! hand-entered, which keeps transcription out of the numbers.

use woods10_core::expr::{contract_fixpoint, Workspace};
use woods10_core::{Box10, Constraint, Expr, Interval, Rel, Tape, Var, DIM};

use crate::constants::{chain_coefficient, gamma10_upper_expr, GAMMA10_UPPER_LIT};
use crate::sign::SignPattern;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Hermite,
    Lemma3,
    Lemma4,
    Cap,
    Sign,
    ProductOne,
    Weak88,
    StrongPart,
    ScriptAdded,
}

#[derive(Debug, Clone)]
pub struct TaggedConstraint {
    pub constraint: Constraint,
    pub provenance: Provenance,
    pub label: String,
}

/// The feasible region of one case: an initial box plus the constraint list.
#[derive(Clone)]
pub struct ConstraintSet {
    pub initial_box: Box10,
    pub items: Vec<TaggedConstraint>,
}

impl ConstraintSet {
    pub fn equalities(&self) -> impl Iterator<Item = &TaggedConstraint> {
        self.items.iter().filter(|t| t.constraint.rel == Rel::Eq)
    }

    pub fn inequalities(&self) -> impl Iterator<Item = &TaggedConstraint> {
        self.items.iter().filter(|t| t.constraint.rel != Rel::Eq)
    }

    pub fn push(&mut self, constraint: Constraint, provenance: Provenance, label: impl Into<String>) {
        self.items.push(TaggedConstraint {
            constraint,
            provenance,
            label: label.into(),
        });
    }

    /// Recompute the initial box by propagating the current constraints.
    /// Returns false if the region is already proven empty.
    pub fn repropagate(&mut self) -> bool {
        let tapes: Vec<(Tape, Rel)> = self
            .items
            .iter()
            .map(|t| (Tape::compile(&t.constraint.expr), t.constraint.rel))
            .collect();
        let mut ws = Workspace::default();
        match contract_fixpoint(&tapes, &mut self.initial_box, &mut ws, 1e-4, 200) {
            Some(()) => true,
            None => false,
        }
    }
}

fn var_expr(i: usize) -> Expr {
    Expr::var(Var(i as u8))
}

pub fn product_one_constraint() -> Constraint {
    Constraint::eq0(Expr::prod(Var::all().map(Expr::var).collect()).sub(Expr::int(1)))
}

/// `X_i >= c * X_j` as `X_i - c X_j >= 0`.
fn chain_constraint(i: usize, j: usize, distance: usize) -> Constraint {
    let coef = chain_coefficient(distance);
    let scaled = if coef == woods10_core::Scalar::int(1) {
        var_expr(j)
    } else {
        Expr::Const(coef).mul(var_expr(j))
    };
    Constraint::ge0(var_expr(i).sub(scaled))
}

/// Emits the common constraints of a case, in the printed order:
/// `A` bounds, the 39 chain/cap inequalities, the nine sign bounds, and
/// the product-one equality. The initial box is contractor-propagated.
pub fn base_constraints(pattern: SignPattern) -> ConstraintSet {
    let mut cs = ConstraintSet {
        initial_box: Box10::uniform(Interval::new(
            1e-4,
            Interval::from_decimal(GAMMA10_UPPER_LIT.parse().unwrap()).hi(),
        )),
        items: Vec::new(),
    };
    cs.initial_box.set(Var(0), {
        let hi = cs.initial_box.get(Var(0)).hi();
        Interval::new(1.0, hi)
    });

    // A > 1 (kept closed) and the Hermite bound
    cs.push(
        Constraint::ge0(var_expr(0).sub(Expr::int(1))),
        Provenance::Sign,
        "A >= 1",
    );
    cs.push(
        Constraint::le0(var_expr(0).sub(gamma10_upper_expr())),
        Provenance::Hermite,
        format!("A <= {GAMMA10_UPPER_LIT}"),
    );

    // chain rows for B..J: distances 1..=min(i,4), then the cap X <= A
    for i in 1..DIM {
        for d in 1..=i.min(4) {
            let prov = if d == 4 { Provenance::Lemma4 } else { Provenance::Lemma3 };
            let coef = chain_coefficient(d);
            cs.push(
                chain_constraint(i, i - d, d),
                prov,
                format!("{} >= {} * {}", Var(i as u8), coef, Var((i - d) as u8)),
            );
        }
        cs.push(
            Constraint::le0(var_expr(i).sub(var_expr(0))),
            Provenance::Cap,
            format!("{} <= A", Var(i as u8)),
        );
    }

    // sign bounds per flag
    for i in 1..DIM {
        let v = var_expr(i).sub(Expr::int(1));
        let (c, lbl) = if pattern.is_greater(i) {
            (Constraint::ge0(v), format!("{} >= 1", Var(i as u8)))
        } else {
            (Constraint::le0(v), format!("{} <= 1", Var(i as u8)))
        };
        cs.push(c, Provenance::Sign, lbl);
    }

    cs.push(product_one_constraint(), Provenance::ProductOne, "product = 1");

    let ok = cs.repropagate();
    debug_assert!(ok, "base region of case {} propagated empty", pattern.case_index());
    cs
}
