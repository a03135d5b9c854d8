//! The named bound functions of the case analysis: phi_1..phi_37 (maximum
//! claims, each annotated with its partition), psi_1..psi_7 (ratio minimum
//! claims), and S_1..S_12 (the closed-form bounds of the two auxiliary
//! lemmas). The phi and S entries are materialized through
//! [`build_inequality`] so the generator itself is exercised; transcription
//! fidelity is checked in tests against independently entered formulas.

use woods10_core::{Expr, Var};

use crate::partition::{build_inequality, ConditionalInequality, Partition};

/// Partition annotation for each phi, in catalog order (phi_1 first).
/// Two pairs are verbatim duplicates in the source list: phi_35 repeats
/// phi_7 and phi_30 repeats phi_15.
pub const PHI_PARTITIONS: [&str; 37] = [
    "(2,1,1,3,1,1,1)",   // phi_1
    "(2,1,1,1,3,1,1)",   // phi_2
    "(2,2,2,4)",         // phi_3
    "(3,1,1,1,3,1)",     // phi_4
    "(2,2,1,4,1)",       // phi_5
    "(3,1,1,3,1,1)",     // phi_6
    "(2,2,4,1,1)",       // phi_7
    "(3,1,3,1,1,1)",     // phi_8
    "(1,2,2,4,1)",       // phi_9
    "(1,4,4,1)",         // phi_10
    "(1,2,2,2,2,1)",     // phi_11
    "(4,2,2,1,1)",       // phi_12
    "(1,4,2,2,1)",       // phi_13
    "(2,2,2,2,1,1)",     // phi_14
    "(2,4,2,1,1)",       // phi_15
    "(1,4,2,1,1,1)",     // phi_16
    "(4,2,1,1,1,1)",     // phi_17
    "(2,2,2,1,1,1,1)",   // phi_18
    "(2,2,2,1,2,1)",     // phi_19
    "(2,4,1,2,1)",       // phi_20
    "(1,4,1,1,1,1,1)",   // phi_21 (printed label omits one trailing 1-part)
    "(1,2,3,1,1,1,1)",   // phi_22
    "(3,1,1,1,1,1,1,1)", // phi_23
    "(4,1,1,1,1,1,1)",   // phi_24
    "(2,2,4,2)",         // phi_25
    "(2,1,4,2,1)",       // phi_26
    "(2,4,4)",           // phi_27
    "(2,4,2,2)",         // phi_28
    "(1,2,4,2,1)",       // phi_29
    "(2,4,2,1,1)",       // phi_30
    "(4,4,2)",           // phi_31
    "(4,2,2,2)",         // phi_32
    "(1,2,4,1,1,1)",     // phi_33
    "(4,4,1,1)",         // phi_34
    "(2,2,4,1,1)",       // phi_35
    "(3,4,2,1)",         // phi_36
    "(1,2,2,2,1,1,1)",   // phi_37
];

#[derive(Clone)]
pub struct Catalog {
    /// phi_l with its annotated partition, as conditional inequalities.
    pub phis: Vec<ConditionalInequality>,
    /// psi_l ratio expressions, `X^3 / (next three)`.
    pub psis: Vec<Expr>,
    /// S_1..S_12 closed-form bounds.
    pub lemma_bounds: Vec<Expr>,
}

/// Partitions behind S_1..S_11; S_12 is not partition-shaped.
pub const S_PARTITIONS: [&str; 11] = [
    "(2,1,1,1,1,1,1,1,1)", // S_1
    "(2,2,1,1,1,1,1,1)",   // S_2
    "(2,2,2,1,1,1,1)",     // S_3
    "(2,2,2,2,1,1)",       // S_4
    "(3,1,1,1,1,1,1,1)",   // S_5
    "(3,3,1,1,1,1)",       // S_6
    "(3,3,3,1)",           // S_7
    "(3,2,1,1,1,1,1)",     // S_8
    "(2,2,3,1,1,1)",       // S_9
    "(2,2,2,3,1)",         // S_10
    "(3,3,2,1,1)",         // S_11
];

pub fn psi(i: usize) -> Expr {
    assert!((1..=7).contains(&i));
    let x = Var(i as u8 - 1);
    Expr::var(x).pow(3).div(Expr::prod(
        (0..3).map(|d| Expr::var(Var(x.0 + 1 + d))).collect(),
    ))
}

/// `S_12 = 4X1 - X1^4 X4..X10 + X4 + ... + X10`.
pub fn s12() -> Expr {
    let mut prod_factors = vec![Expr::var(Var(0)).pow(4)];
    prod_factors.extend((3..10).map(|i| Expr::var(Var(i))));
    let mut terms = vec![
        Expr::int(4).mul(Expr::var(Var(0))),
        Expr::Prod(prod_factors).neg(),
    ];
    terms.extend((3..10).map(|i| Expr::var(Var(i))));
    Expr::sum(terms)
}

pub fn catalog() -> Catalog {
    let phis = PHI_PARTITIONS
        .iter()
        .enumerate()
        .map(|(i, label)| {
            let p = Partition::parse(label).expect("catalog partition");
            let mut ineq = build_inequality(&p, &[]).expect("catalog build");
            ineq.name = Some(format!("phi_{}", i + 1));
            ineq
        })
        .collect();
    let psis = (1..=7).map(psi).collect();
    let mut lemma_bounds: Vec<Expr> = S_PARTITIONS
        .iter()
        .map(|label| {
            let p = Partition::parse(label).expect("lemma partition");
            build_inequality(&p, &[]).expect("lemma build").bound
        })
        .collect();
    lemma_bounds.push(s12());
    Catalog {
        phis,
        psis,
        lemma_bounds,
    }
}

impl Catalog {
    pub fn phi(&self, l: usize) -> &ConditionalInequality {
        &self.phis[l - 1]
    }

    pub fn psi(&self, l: usize) -> &Expr {
        &self.psis[l - 1]
    }

    pub fn lemma_bound(&self, l: usize) -> &Expr {
        &self.lemma_bounds[l - 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use woods10_core::expr::eval_real;
    use woods10_core::DIM;

    #[test]
    fn counts() {
        let c = catalog();
        assert_eq!(c.phis.len(), 37);
        assert_eq!(c.psis.len(), 7);
        assert_eq!(c.lemma_bounds.len(), 12);
    }

    #[test]
    fn psi_shapes() {
        assert_eq!(psi(1).to_string(), "(/ (^ A 3) (* B C D))");
        assert_eq!(psi(2).to_string(), "(/ (^ B 3) (* C D E))");
        assert_eq!(psi(7).to_string(), "(/ (^ G 3) (* H I J))");
    }

    #[test]
    fn all_ones_values() {
        let ones = [1.0; DIM];
        let c = catalog();
        // phi_14 = 10, phi_3 = 9.5, every psi = 1, S_1 = 10: exact
        assert_eq!(eval_real(&c.phi(14).bound, &ones).unwrap(), 10.0);
        assert_eq!(eval_real(&c.phi(3).bound, &ones).unwrap(), 9.5);
        for l in 1..=7 {
            assert_eq!(eval_real(c.psi(l), &ones).unwrap(), 1.0);
        }
        assert_eq!(eval_real(c.lemma_bound(1), &ones).unwrap(), 10.0);
        assert_eq!(eval_real(c.lemma_bound(12), &ones).unwrap(), 10.0);
    }

    #[test]
    fn s12_shape() {
        assert_eq!(
            s12().to_string(),
            "(+ (* 4 A) (- (* (^ A 4) D E F G H I J)) D E F G H I J)"
        );
    }

    #[test]
    fn duplicate_entries_match() {
        let c = catalog();
        assert!(c.phi(7).bound.struct_eq(&c.phi(35).bound));
        assert!(c.phi(15).bound.struct_eq(&c.phi(30).bound));
    }
}
