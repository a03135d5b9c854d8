//! Contractor soundness: contraction never excludes a satisfying sample
//! point, and applying it twice never widens.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use woods10_core::{Box10, Constraint, Expr, Interval, Rel, Tape, Var, DIM};

fn product_all() -> Expr {
    Expr::prod(Var::all().map(Expr::var).collect())
}

fn rand_box(rng: &mut StdRng) -> Box10 {
    let mut b = Box10::uniform(Interval::point(1.0));
    for v in Var::all() {
        let lo = rng.gen_range(0.05..1.5);
        let hi = lo + rng.gen_range(0.0..1.5);
        b.set(v, Interval::new(lo, hi));
    }
    b
}

fn rand_point_in(rng: &mut StdRng, b: &Box10) -> [f64; DIM] {
    std::array::from_fn(|i| {
        let iv = b.bounds()[i];
        iv.lo() + rng.gen::<f64>() * iv.width()
    })
}

#[test]
fn contraction_never_removes_satisfying_points() {
    let mut rng = StdRng::seed_from_u64(11);
    let constraints = [
        Constraint::eq0(product_all().sub(Expr::int(1))),
        Constraint::ge0(
            Expr::int(2)
                .mul(Expr::var(Var(8)))
                .sub(Expr::var(Var(9))),
        ),
        Constraint::le0(Expr::var(Var(0)).pow(2).sub(Expr::prod(vec![
            Expr::var(Var(1)),
            Expr::var(Var(2)),
        ]))),
        Constraint::ge0(
            Expr::sum(Var::all().map(Expr::var).collect()).sub(Expr::int(10)),
        ),
    ];
    for c in &constraints {
        let tape = Tape::compile(&c.expr);
        let mut ws = woods10_core::expr::Workspace::default();
        let mut hits = 0;
        'outer: for _ in 0..4000 {
            let b = rand_box(&mut rng);
            // sample satisfying points first
            let mut sats = Vec::new();
            for _ in 0..40 {
                let p = rand_point_in(&mut rng, &b);
                if c.satisfied_at(&p, 0.0).unwrap_or(false) {
                    sats.push(p);
                }
            }
            let mut contracted = b.clone();
            let feasible = tape.contract(c.rel, &mut contracted, &mut ws);
            if !feasible {
                assert!(sats.is_empty(), "contractor emptied a box with satisfying point for {c}");
                continue 'outer;
            }
            for p in &sats {
                assert!(
                    contracted.contains_point(p),
                    "contractor removed satisfying point {p:?} for {c}"
                );
                hits += 1;
            }
            // idempotent-or-narrowing
            let mut twice = contracted.clone();
            if tape.contract(c.rel, &mut twice, &mut ws) {
                assert!(contracted.contains_box(&twice));
            }
        }
        // equality constraints rarely hit by random sampling; inequality ones must
        if c.rel != Rel::Eq {
            assert!(hits > 100, "too few satisfying samples for {c}: {hits}");
        }
    }
}

#[test]
fn interval_extension_contains_sampled_values() {
    // natural extension containment on a nontrivial expression
    let phi3_like = Expr::sum(vec![
        Expr::int(4)
            .mul(Expr::var(Var(0)))
            .sub(Expr::int(2).mul(Expr::var(Var(0)).pow(2)).div(Expr::var(Var(1)))),
        Expr::int(4)
            .mul(Expr::var(Var(6)))
            .sub(Expr::ratio(1, 2).mul(Expr::var(Var(6)).pow(4)).div(Expr::prod(vec![
                Expr::var(Var(7)),
                Expr::var(Var(8)),
                Expr::var(Var(9)),
            ]))),
    ]);
    let tape = Tape::compile(&phi3_like);
    let mut ws = woods10_core::expr::Workspace::default();
    let mut rng = StdRng::seed_from_u64(12);
    for _ in 0..1000 {
        let b = rand_box(&mut rng);
        let iv = tape.eval_interval(&b, &mut ws).unwrap();
        for _ in 0..20 {
            let p = rand_point_in(&mut rng, &b);
            let v = tape.eval_real(&p, &mut ws).unwrap();
            assert!(
                iv.contains(v),
                "interval {iv:?} misses value {v} at {p:?} on box {b:?}"
            );
        }
    }
}
