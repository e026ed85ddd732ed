use dso_core::solver::{
    solve_lp, solve_milp, BranchRule, LpStandardForm, LpStatus, MilpProblem, MilpStatus, NodeOrder, Relation,
    SolveOptions,
};
use dso_testkit::{enumerate_binaries, random_lp, random_milp, vertex_enumeration};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Lagrangian bound `min over the box of (c - A'^T y)^T z` for the row-activity form.
fn dual_bound(p: &MilpProblem, duals: &[f64]) -> f64 {
    let mut reduced: Vec<f64> = p.objective.clone();
    for (i, c) in p.constraints.iter().enumerate() {
        for &(j, a) in &c.terms {
            reduced[j] -= a * duals[i];
        }
    }
    let mut bound = 0.0;
    let mut term = |d: f64, l: f64, u: f64| {
        if d.abs() < 1e-12 {
            return;
        }
        bound += if d > 0.0 { d * l } else { d * u };
    };
    for j in 0..p.num_cols() {
        term(reduced[j], p.lower[j], p.upper[j]);
    }
    for (i, c) in p.constraints.iter().enumerate() {
        let (l, u) = match c.relation {
            Relation::Le => (f64::NEG_INFINITY, c.rhs),
            Relation::Ge => (c.rhs, f64::INFINITY),
            Relation::Eq => (c.rhs, c.rhs),
        };
        term(duals[i], l, u);
    }
    bound
}

#[test]
fn random_lps_match_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let opts = SolveOptions::default();
    for case in 0..25 {
        let p = random_lp(&mut rng, 5, 8);
        let r = solve_lp(&LpStandardForm::from_problem(&p), &opts);
        let oracle = vertex_enumeration(&p).expect("feasible by construction");
        assert_eq!(r.status, LpStatus::Optimal, "case {case}");
        assert!((r.objective - oracle).abs() <= 1e-8 * oracle.abs().max(1.0), "case {case}: {} vs {oracle}", r.objective);
        assert!(p.max_violation(&r.values) <= opts.feasibility_tol);
        let db = dual_bound(&p, &r.duals);
        assert!(r.objective >= db - 1e-8, "weak duality: {} < {db}", r.objective);
        assert!((r.objective - db).abs() <= 1e-7, "strong duality gap at optimum: {} vs {db}", r.objective);
    }
}

#[test]
fn random_milps_match_binary_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let opts = SolveOptions::default();
    for case in 0..200 {
        let k = rng.gen_range(1..=12);
        let c = rng.gen_range(1..=30);
        let m = rng.gen_range(2..=14);
        let p = random_milp(&mut rng, k, c, m);
        let s = solve_milp(&p, &opts).unwrap();
        let oracle = enumerate_binaries(&p, &opts).expect("feasible by construction");
        assert_eq!(s.status, MilpStatus::Optimal, "case {case}");
        assert!(
            (s.objective - oracle).abs() <= 1e-6 * oracle.abs().max(1.0),
            "case {case}: {} vs {oracle}",
            s.objective
        );
        assert!(p.max_violation(&s.values) <= 1e-6, "case {case}");
    }
}

#[test]
fn search_orders_agree_and_invariants_hold() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..30 {
        let p = random_milp(&mut rng, 10, 12, 10);
        let best = SolveOptions { trace: true, ..SolveOptions::default() };
        let dfs = SolveOptions { node_order: NodeOrder::DepthFirst, branch_rule: BranchRule::FirstFractional, ..best };
        let a = solve_milp(&p, &best).unwrap();
        let b = solve_milp(&p, &dfs).unwrap();
        assert!((a.objective - b.objective).abs() <= 1e-6 * a.objective.abs().max(1.0));
        for s in [&a, &b] {
            let mut last = f64::INFINITY;
            for e in &s.trace {
                if let Some(lb) = e.lp_bound {
                    assert!(lb >= e.parent_bound - 1e-9, "child bound below parent");
                }
                if let Some(inc) = e.incumbent {
                    assert!(inc <= last);
                    last = inc;
                }
            }
        }
        // reproducibility
        let again = solve_milp(&p, &best).unwrap();
        assert_eq!(again.values, a.values);
        assert_eq!(again.nodes_explored, a.nodes_explored);
    }
}

#[test]
fn continuous_problem_is_a_single_lp() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let p = random_lp(&mut rng, 6, 9);
    let opts = SolveOptions::default();
    let lp = solve_lp(&LpStandardForm::from_problem(&p), &opts);
    let milp = solve_milp(&p, &opts).unwrap();
    assert_eq!(milp.nodes_explored, 1);
    assert_eq!(milp.values, lp.values);
    assert_eq!(milp.objective, lp.objective);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn optimal_lp_points_are_feasible(seed in any::<u64>(), rows in 1usize..12, cols in 1usize..15) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_lp(&mut rng, rows, cols);
        let opts = SolveOptions::default();
        let r = solve_lp(&LpStandardForm::from_problem(&p), &opts);
        prop_assert_eq!(r.status, LpStatus::Optimal);
        prop_assert!(p.max_violation(&r.values) <= opts.feasibility_tol);
    }
}
