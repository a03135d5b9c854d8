//! Numeric substrate for the case-analysis verifier: directed-rounded
//! interval arithmetic over the ten squared minima `A..J`, and factorable
//! expression trees with point/interval evaluation, reverse-mode gradients
//! and forward-backward constraint contraction.

pub mod expr;
pub mod interval;

pub use expr::{Constraint, DomainError, Expr, Point, Rel, Scalar, Tape};
pub use interval::{Box10, Interval, IntervalError, Var, DIM};
