//! Per-component timing on representative boxes. Run with --release.

use std::time::Instant;

use woods10_core::expr::Workspace;
use woods10_core::{Box10, Interval, Rel, Tape, Var};
use woods10_engine::bounds::ObjectiveBounder;
use woods10_engine::region::Region;
use woods10_model::catalog::catalog;
use woods10_model::compositions::weak88_constraints;
use woods10_model::{base_constraints, SignPattern};

fn time<F: FnMut()>(label: &str, iters: usize, mut f: F) {
    let t = Instant::now();
    for _ in 0..iters {
        f();
    }
    let per = t.elapsed().as_nanos() as f64 / iters as f64;
    println!("{label:40} {per:>12.0} ns/iter");
}

fn main() {
    let cat = catalog();
    let mut cs = base_constraints(SignPattern::from_case_index(121).unwrap());
    for w in weak88_constraints() {
        cs.items.push(w);
    }
    assert!(cs.repropagate());
    let region = Region::compile(&cs, true);
    let mut ws = Workspace::default();

    let root = region.root_box(&mut ws).unwrap();
    let mut corner = Box10::uniform(Interval::new(0.99, 1.01));
    corner.set(Var(0), Interval::new(1.0, 1.01));
    for i in [3usize, 4, 5, 6] {
        corner.set(Var(i as u8), Interval::new(0.99, 1.0));
    }

    let bounder = ObjectiveBounder::new(&cat.phi(18).bound);
    let goal_expr = cat
        .phi(18)
        .bound
        .clone()
        .sub(woods10_core::Expr::decimal("10.0001"));
    let goal = Tape::compile(&goal_expr);

    let single_weak = Tape::compile(&cs.items[51].constraint.expr);
    let product = Tape::compile(
        &woods10_core::Expr::prod(Var::all().map(woods10_core::Expr::var).collect())
            .sub(woods10_core::Expr::int(1)),
    );

    for (name, b) in [("root", &root), ("corner", &corner)] {
        println!("--- box: {name}");
        time("region.contract x3", 2000, || {
            let mut bb = b.clone();
            let _ = region.contract(&mut bb, Some((&goal, Rel::Ge)), &mut ws, 3);
        });
        time("single weak tape contract", 20000, || {
            let mut bb = b.clone();
            let _ = single_weak.contract(Rel::Ge, &mut bb, &mut ws);
        });
        time("product tape contract", 20000, || {
            let mut bb = b.clone();
            let _ = product.contract(Rel::Eq, &mut bb, &mut ws);
        });
        time("goal tape contract", 20000, || {
            let mut bb = b.clone();
            let _ = goal.contract(Rel::Ge, &mut bb, &mut ws);
        });
        time("bounder.range", 20000, || {
            let _ = bounder.range(b, &mut ws);
        });
        time("bounder.mean_value", 20000, || {
            let _ = bounder.mean_value_range(b, &mut ws);
        });
    }
}
