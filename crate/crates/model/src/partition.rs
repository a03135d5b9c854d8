//! Conditional inequalities from ordered partitions of 10.
//!
//! A part of size k >= 2 contributes the sphere-radius term
//! `4X - c_k X^k / (rest)` with `c_k = 4 delta(S_{k+1})^2`, under the
//! condition `4 delta(S_{k+1})^2 X^(k-1) >= rest` (the squared form of the
//! radius hypothesis). A starred part of size k uses the truth of the
//! covering conjecture in dimension k and contributes `k (prod)^(1/k)`;
//! it may only lead the partition, where its sub-hypothesis `X_i <= X_1`
//! is guaranteed. A size-2 part may be weakened to the unconditional `2Y`.
//! Under the contradiction hypothesis, conditions imply `bound > 10`.

use std::fmt;

use thiserror::Error;
use woods10_core::{Constraint, Expr, Scalar, Var};

use crate::constants::crit_det_sq;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("no critical determinant for parts of size {0}")]
    UnsupportedPartSize(u8),
    #[error("starred part must lead the partition")]
    StarredNotLeading,
    #[error("starred part size {0} outside 2..=9")]
    UnsupportedStarSize(u8),
    #[error("partition parts must sum to 10, got {0}")]
    BadTotal(u8),
    #[error("weak marker only applies to unstarred size-2 parts")]
    BadWeakPart,
    #[error("cannot parse partition label '{0}'")]
    BadLabel(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Part {
    pub size: u8,
    pub starred: bool,
}

/// Ordered partition of 10; variables are assigned to parts consecutively
/// left to right, starting at `A`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    pub parts: Vec<Part>,
}

impl Partition {
    pub fn plain(sizes: &[u8]) -> Partition {
        Partition {
            parts: sizes
                .iter()
                .map(|&size| Part {
                    size,
                    starred: false,
                })
                .collect(),
        }
    }

    pub fn total(&self) -> u8 {
        self.parts.iter().map(|p| p.size).sum()
    }

    /// Parse a label like `(2,2,2,4)` or `(8*,2)`.
    pub fn parse(label: &str) -> Result<Partition, GenError> {
        let inner = label
            .trim()
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| GenError::BadLabel(label.to_string()))?;
        let mut parts = Vec::new();
        for tok in inner.split(',') {
            let tok = tok.trim();
            let (num, starred) = match tok.strip_suffix('*') {
                Some(n) => (n, true),
                None => (tok, false),
            };
            let size: u8 = num
                .parse()
                .map_err(|_| GenError::BadLabel(label.to_string()))?;
            parts.push(Part { size, starred });
        }
        let p = Partition { parts };
        if p.total() != 10 {
            return Err(GenError::BadTotal(p.total()));
        }
        Ok(p)
    }

    /// Start variable of each part.
    pub fn spans(&self) -> Vec<(Var, Part)> {
        let mut out = Vec::with_capacity(self.parts.len());
        let mut at = 0u8;
        for &p in &self.parts {
            out.push((Var(at), p));
            at += p.size;
        }
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let toks: Vec<String> = self
            .parts
            .iter()
            .map(|p| {
                if p.starred {
                    format!("{}*", p.size)
                } else {
                    p.size.to_string()
                }
            })
            .collect();
        write!(f, "({})", toks.join(","))
    }
}

/// A partition-derived bound together with its applicability conditions.
/// Contract: under the contradiction hypothesis, if every condition holds
/// then `bound > 10` on the case region.
#[derive(Debug, Clone)]
pub struct ConditionalInequality {
    pub partition: Partition,
    pub conditions: Vec<Constraint>,
    pub bound: Expr,
    pub name: Option<String>,
}

fn vars_of(start: Var, k: u8) -> Vec<Var> {
    (0..k).map(|i| Var(start.0 + i)).collect()
}

fn prod_of(vars: &[Var]) -> Expr {
    if vars.len() == 1 {
        Expr::var(vars[0])
    } else {
        Expr::prod(vars.iter().copied().map(Expr::var).collect())
    }
}

/// Strong term and condition for a size-k part starting at `start`.
/// k = 1 has a vacuous condition and term `X`. Errors for k > 7, where no
/// critical determinant is known.
pub fn strong_term_parts(k: u8, start: Var) -> Result<(Option<Constraint>, Expr), GenError> {
    if k == 1 {
        return Ok((None, Expr::var(start)));
    }
    if k > 7 {
        return Err(GenError::UnsupportedPartSize(k));
    }
    let vars = vars_of(start, k);
    let x = vars[0];
    let rest = &vars[1..];
    let c = crit_det_sq(k as u32 + 1).expect("k+1 in 3..=8");
    let four_c = match c {
        Scalar::Ratio { num, den } => Scalar::ratio(4 * num, den),
        _ => unreachable!(),
    };

    // condition: 4 delta^2 X^(k-1) >= prod(rest), scaled to integer coefficients
    let (lhs_coef, rhs_coef) = integer_scaling(&four_c);
    let xk1 = if k == 2 {
        Expr::var(x)
    } else {
        Expr::var(x).pow(k as u32 - 1)
    };
    let lhs = if lhs_coef == 1 {
        xk1
    } else {
        Expr::int(lhs_coef).mul(xk1)
    };
    let rhs = if rhs_coef == 1 {
        prod_of(rest)
    } else {
        Expr::int(rhs_coef).mul(prod_of(rest))
    };
    let condition = Constraint::ge0(lhs.sub(rhs));

    // term: 4X - 4 delta^2 X^k / prod(rest)
    let num = if four_c.is_one() {
        Expr::var(x).pow(k as u32)
    } else {
        Expr::Const(four_c).mul(Expr::var(x).pow(k as u32))
    };
    let term = Expr::int(4).mul(Expr::var(x)).sub(num.div(prod_of(rest)));
    Ok((Some(condition), term))
}

trait ScalarExt {
    fn is_one(&self) -> bool;
}

impl ScalarExt for Scalar {
    fn is_one(&self) -> bool {
        *self == Scalar::int(1)
    }
}

/// Write `4 delta^2 = a/b` as the pair of integer coefficients `(a, b)` for
/// the condition `a X^(k-1) >= b rest`.
fn integer_scaling(four_c: &Scalar) -> (i64, i64) {
    match four_c {
        Scalar::Ratio { num, den } => (*num, *den),
        _ => unreachable!(),
    }
}

/// Weak form of a size-2 part on `(X, Y)`: the unconditional bound `2Y`.
pub fn weak_term_2(start: Var) -> Expr {
    Expr::int(2).mul(Expr::var(Var(start.0 + 1)))
}

/// Starred part: `k (prod)^(1/k)` from the covering conjecture in dimension
/// k <= 9, valid only as the leading part. The sub-hypothesis `X_i <= X_1`
/// is automatic there (every variable is at most `A`) but is emitted
/// explicitly for auditability.
pub fn starred_term_parts(k: u8, start: Var) -> Result<(Vec<Constraint>, Expr), GenError> {
    if start != Var(0) {
        return Err(GenError::StarredNotLeading);
    }
    if !(2..=9).contains(&k) {
        return Err(GenError::UnsupportedStarSize(k));
    }
    let vars = vars_of(start, k);
    let conditions = vars[1..]
        .iter()
        .map(|&v| Constraint::le0(Expr::var(v).sub(Expr::var(vars[0]))))
        .collect();
    let term = Expr::int(k as i64).mul(prod_of(&vars).root(k as u32));
    Ok((conditions, term))
}

/// Assemble the conditional inequality of a partition. `weak_parts` lists
/// indices of size-2 parts to take in weak (unconditional) form.
pub fn build_inequality(
    partition: &Partition,
    weak_parts: &[usize],
) -> Result<ConditionalInequality, GenError> {
    if partition.total() != 10 {
        return Err(GenError::BadTotal(partition.total()));
    }
    for &w in weak_parts {
        let p = partition
            .parts
            .get(w)
            .ok_or(GenError::BadWeakPart)?;
        if p.size != 2 || p.starred {
            return Err(GenError::BadWeakPart);
        }
    }
    let mut terms = Vec::new();
    let mut conditions = Vec::new();
    for (idx, (start, part)) in partition.spans().into_iter().enumerate() {
        if part.starred {
            if idx != 0 {
                return Err(GenError::StarredNotLeading);
            }
            let (conds, term) = starred_term_parts(part.size, start)?;
            conditions.extend(conds);
            terms.push(term);
        } else if weak_parts.contains(&idx) {
            terms.push(weak_term_2(start));
        } else {
            let (cond, term) = strong_term_parts(part.size, start)?;
            conditions.extend(cond);
            terms.push(term);
        }
    }
    Ok(ConditionalInequality {
        partition: partition.clone(),
        conditions,
        bound: Expr::sum(terms),
        name: None,
    })
}
