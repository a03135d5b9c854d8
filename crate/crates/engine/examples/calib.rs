//! Calibration harness for certify-mode performance on representative
//! claims. Not part of the test suite; run with --release.

use std::time::Instant;

use woods10_engine::bb::{certify_lower, certify_upper};
use woods10_engine::Budget;
use woods10_model::catalog::catalog;
use woods10_model::compositions::weak88_constraints;
use woods10_model::{base_constraints, SignPattern};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).map(|s| s.as_str()).unwrap_or("all");

    let cat = catalog();
    let budget = Budget {
        max_boxes: 50_000_000,
        max_seconds: 300.0,
        eps: 1e-4,
        min_box_width: 1e-9,
        rng_seed: 1,
    };

    let case_region = |idx: u32| {
        let mut cs = base_constraints(SignPattern::from_case_index(idx).unwrap());
        for w in weak88_constraints() {
            cs.items.push(w);
        }
        assert!(cs.repropagate());
        cs
    };

    if which == "all" || which == "trivial" {
        // certify_upper(A, {A in [1,2]}, 3): no splits expected
        let mut cs = base_constraints(SignPattern::from_case_index(2).unwrap());
        cs.items.clear();
        cs.push(
            woods10_core::Constraint::le0(
                woods10_core::Expr::var(woods10_core::Var(0)).sub(woods10_core::Expr::int(2)),
            ),
            woods10_model::Provenance::ScriptAdded,
            "A <= 2",
        );
        assert!(cs.repropagate());
        let t = Instant::now();
        let v = certify_upper(
            &woods10_core::Expr::var(woods10_core::Var(0)),
            &cs,
            3.0,
            &budget,
            false,
        );
        println!(
            "trivial A<=3: {:?} boxes={} in {:?}",
            v.status,
            v.stats.boxes,
            t.elapsed()
        );
    }

    if which == "all" || which == "case121" {
        // final step region of case 121: the three established claims join
        let mut cs = case_region(121);
        cs.push(
            woods10_core::Constraint::le0(
                woods10_core::Expr::var(woods10_core::Var(2)).sub(woods10_core::Expr::decimal("1.05")),
            ),
            woods10_model::Provenance::ScriptAdded,
            "C <= 1.05",
        );
        cs.push(
            woods10_core::Constraint::le0(
                woods10_core::Expr::var(woods10_core::Var(1)).sub(woods10_core::Expr::decimal("1.24")),
            ),
            woods10_model::Provenance::ScriptAdded,
            "B <= 1.24",
        );
        cs.push(
            woods10_core::Constraint::le0(
                woods10_core::Expr::var(woods10_core::Var(0)).pow(3).sub(
                    woods10_core::Expr::int(2).mul(woods10_core::Expr::prod(vec![
                        woods10_core::Expr::var(woods10_core::Var(1)),
                        woods10_core::Expr::var(woods10_core::Var(2)),
                        woods10_core::Expr::var(woods10_core::Var(3)),
                    ])),
                ),
            ),
            woods10_model::Provenance::ScriptAdded,
            "A^3 <= 2BCD",
        );
        assert!(cs.repropagate());
        let which_phi: usize = std::env::args()
            .nth(2)
            .and_then(|s| s.parse().ok())
            .unwrap_or(37);
        // optional extra branch constraint: 2G >= H or 2G <= H
        match std::env::args().nth(3).as_deref() {
            Some("ge") => {
                cs.push(
                    woods10_core::Constraint::ge0(
                        woods10_core::Expr::int(2)
                            .mul(woods10_core::Expr::var(woods10_core::Var(6)))
                            .sub(woods10_core::Expr::var(woods10_core::Var(7))),
                    ),
                    woods10_model::Provenance::ScriptAdded,
                    "2G >= H",
                );
            }
            Some("le") => {
                cs.push(
                    woods10_core::Constraint::le0(
                        woods10_core::Expr::int(2)
                            .mul(woods10_core::Expr::var(woods10_core::Var(6)))
                            .sub(woods10_core::Expr::var(woods10_core::Var(7))),
                    ),
                    woods10_model::Provenance::ScriptAdded,
                    "2G <= H",
                );
            }
            _ => {}
        }
        assert!(cs.repropagate());
        let t = Instant::now();
        let v = certify_upper(&cat.phi(which_phi).bound, &cs, 10.0, &budget, true);
        println!(
            "case121 phi_{}<=10 (with claims): {:?} boxes={} splits={} inf={} bnd={} surv={} in {:?}",
            which_phi,
            v.status,
            v.stats.boxes,
            v.stats.splits,
            v.stats.prunes_infeasible,
            v.stats.prunes_bound,
            v.stats.surviving,
            t.elapsed()
        );
        if let Some(w) = &v.witness {
            println!("  witness value {} viol {} at {:?}", w.value, w.max_violation, w.point);
        }
    }

    if which == "all" || which == "case8" {
        // case 8 else-branch: region + G^3 <= 2HIJ, phi_4 <= 10
        let mut cs = case_region(8);
        let g3 = woods10_core::Expr::var(woods10_core::Var(6))
            .pow(3)
            .sub(woods10_core::Expr::int(2).mul(woods10_core::Expr::prod(vec![
                woods10_core::Expr::var(woods10_core::Var(7)),
                woods10_core::Expr::var(woods10_core::Var(8)),
                woods10_core::Expr::var(woods10_core::Var(9)),
            ])));
        cs.push(
            woods10_core::Constraint::le0(g3),
            woods10_model::Provenance::ScriptAdded,
            "G^3 <= 2HIJ",
        );
        assert!(cs.repropagate());
        let t = Instant::now();
        let v = certify_upper(&cat.phi(4).bound, &cs, 10.0, &budget, true);
        println!(
            "case8 phi_4<=10: {:?} boxes={} splits={} inf={} bnd={} surv={} in {:?}",
            v.status,
            v.stats.boxes,
            v.stats.splits,
            v.stats.prunes_infeasible,
            v.stats.prunes_bound,
            v.stats.surviving,
            t.elapsed()
        );
    }

    if which == "all" || which == "psi" {
        // case 48 + B >= 1.6: min psi_2 >= 2
        let mut cs = case_region(48);
        cs.push(
            woods10_core::Constraint::ge0(
                woods10_core::Expr::var(woods10_core::Var(1)).sub(woods10_core::Expr::decimal("1.6")),
            ),
            woods10_model::Provenance::ScriptAdded,
            "B >= 1.6",
        );
        assert!(cs.repropagate());
        let t = Instant::now();
        let v = certify_lower(cat.psi(2), &cs, 2.0, &budget, true);
        println!(
            "case48 psi_2>=2 (B>=1.6): {:?} boxes={} surv={} in {:?}",
            v.status,
            v.stats.boxes,
            v.stats.surviving,
            t.elapsed()
        );
    }
}
