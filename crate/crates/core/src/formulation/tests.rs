use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::casestudy::bundled_case_study;
use crate::model::*;
use crate::solver::{solve_lp, LpStandardForm, LpStatus, MilpSolution, Relation, SolveOptions};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Family = fn(&Scenario, &VariableRegistry, &mut MilpProblem);

fn family(s: &Scenario, add: Family) -> (VariableRegistry, MilpProblem) {
    let mut p = MilpProblem::default();
    let reg = VariableRegistry::allocate(s, &mut p);
    add(s, &reg, &mut p);
    (reg, p)
}

fn row_violation(p: &MilpProblem, x: &[f64]) -> f64 {
    p.constraints.iter().map(|c| c.violation(x)).fold(0.0, f64::max)
}

fn point(reg: &VariableRegistry, set: &[(Var, f64)]) -> Vec<f64> {
    let mut x = vec![0.0; reg.len()];
    for &(v, val) in set {
        x[reg.col(v)] = val;
    }
    x
}

fn fix(p: &mut MilpProblem, reg: &VariableRegistry, v: Var, val: f64) {
    let c = reg.col(v);
    p.lower[c] = val;
    p.upper[c] = val;
}

fn lp(p: &MilpProblem) -> crate::solver::LpResult {
    let mut q = p.clone();
    q.integral.iter_mut().for_each(|b| *b = false);
    solve_lp(&LpStandardForm::from_problem(&q), &SolveOptions::default())
}

fn flat(t: usize, v: f64) -> Vec<f64> {
    vec![v; t]
}

fn offers(t: usize, e: Option<f64>, c: f64) -> OfferPrices {
    OfferPrices {
        energy: e.map(|e| flat(t, e)).unwrap_or_default(),
        cap_up: flat(t, c),
        cap_dn: flat(t, c),
        mil_up: flat(t, c / 20.0),
        mil_dn: flat(t, c / 20.0),
    }
}

/// Two buses, one branch, the given aggregators on bus 2.
fn micro(t: usize, kinds: Vec<AggregatorKind>) -> Scenario {
    let aggregators = kinds
        .into_iter()
        .enumerate()
        .map(|(i, kind)| {
            let e = if matches!(kind, AggregatorKind::Drag(_)) { None } else { Some(25.0) };
            Aggregator { id: alloc::format!("a{i}"), bus: 2, offers: offers(t, e, 20.0), kind }
        })
        .collect();
    Scenario {
        horizon: Horizon::hourly(1, t as u32),
        wholesale: WholesalePrices {
            energy: flat(t, 30.0),
            cap_up: flat(t, 20.0),
            cap_dn: flat(t, 20.0),
            mil_up: flat(t, 1.0),
            mil_dn: flat(t, 1.0),
        },
        regulation: RegulationSignal { mu_up: flat(t, 0.5), mu_dn: flat(t, 0.5), s_up: flat(t, 1.0), s_dn: flat(t, 1.0) },
        network: Network {
            buses: (1..=2).map(|id| Bus { id, p_load: flat(t, 0.0), q_load: flat(t, 0.0) }).collect(),
            branches: vec![Branch { id: 1, from: 1, to: 2, r: 0.01, x: 0.01, pl_max: 20.0, ql_max: 20.0 }],
            substation: 1,
            v_min: 0.9,
            v_max: 1.1,
            v_substation: 1.0,
            s_base: 1.0,
        },
        aggregators,
    }
}

fn ddgag() -> AggregatorKind {
    AggregatorKind::Ddgag(DdgagConfig { p_min: 0.0, p_max: 5.0, ru: 1.0, rd: 1.0, tan_phi: 0.33 })
}

fn drag() -> AggregatorKind {
    AggregatorKind::Drag(DragConfig {
        blocks: vec![DemandBlock { p_max: 10.0, price: vec![29.0] }],
        cap_up_max: 1.0,
        cap_dn_max: 1.0,
        tan_phi: 0.33,
    })
}

#[test]
fn bundled_has_25_binaries() {
    let s = bundled_case_study();
    let m = build(&s).unwrap();
    let es = m.registry.binaries().filter(|(_, v)| matches!(v, Var::BEs(..))).count();
    let ev = m.registry.binaries().filter(|(_, v)| matches!(v, Var::BEv(_))).count();
    assert_eq!((es, ev), (24, 1));
    let marked = m.problem.integral.iter().filter(|&&b| b).count();
    assert_eq!(marked, 25);
}

#[test]
fn registry_is_a_bijection_onto_columns() {
    let m = build(&bundled_case_study()).unwrap();
    assert_eq!(m.registry.len(), m.problem.num_cols());
    for (col, v) in m.registry.iter() {
        assert_eq!(m.registry.get(v), Some(col));
        assert_eq!(m.registry.var(col), v);
    }
}

#[test]
fn bundled_row_count_by_hand() {
    let s = bundled_case_study();
    // per hour: drag 2 + esag 14 + ddgag 2 + balances 2*5 + drops 4 + anchor 1 + pools 2
    let per_hour = 2 + 14 + 2 + 10 + 4 + 1 + 2;
    // evcs: 5 rows for each of its 9 hours, plus the two fill rows
    let evcs = 5 * 9 + 2;
    let m = build(&s).unwrap();
    assert_eq!(m.problem.num_rows(), 24 * per_hour + evcs);
    assert_eq!(row_count(&s), m.problem.num_rows());
}

#[test]
fn single_hour_single_generator_rows() {
    let s = micro(1, vec![ddgag()]);
    let m = build(&s).unwrap();
    // ddgag 2, balances 2 * 2 buses, 1 drop, 1 anchor, 2 pools
    assert_eq!(m.problem.num_rows(), 2 + 4 + 1 + 1 + 2);
    assert_eq!(row_count(&s), m.problem.num_rows());
    let names: Vec<&str> = m.problem.row_names.iter().map(String::as_str).collect();
    assert_eq!(
        names,
        [
            "ddgag_head[1,a0]",
            "ddgag_floor[1,a0]",
            "p_balance[1,1]",
            "q_balance[1,1]",
            "p_balance[1,2]",
            "q_balance[1,2]",
            "v_drop[1,1]",
            "v_anchor[1]",
            "pool_up[1]",
            "pool_dn[1]",
        ]
    );
}

#[test]
fn build_is_bit_identical() {
    let s = bundled_case_study();
    let (a, b) = (build(&s).unwrap(), build(&s).unwrap());
    assert_eq!(a.problem.row_names, b.problem.row_names);
    assert_eq!(a.problem.col_names, b.problem.col_names);
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a.problem.objective), bits(&b.problem.objective));
    assert_eq!(bits(&a.problem.lower), bits(&b.problem.lower));
    assert_eq!(bits(&a.problem.upper), bits(&b.problem.upper));
    for (x, y) in a.problem.constraints.iter().zip(&b.problem.constraints) {
        assert_eq!(x.relation, y.relation);
        assert_eq!(x.rhs.to_bits(), y.rhs.to_bits());
        let tx: Vec<(usize, u64)> = x.terms.iter().map(|&(j, v)| (j, v.to_bits())).collect();
        let ty: Vec<(usize, u64)> = y.terms.iter().map(|&(j, v)| (j, v.to_bits())).collect();
        assert_eq!(tx, ty);
    }
}

#[test]
fn every_column_is_bounded_or_referenced() {
    let m = build(&bundled_case_study()).unwrap();
    let mut used = vec![false; m.problem.num_cols()];
    for c in &m.problem.constraints {
        for &(j, _) in &c.terms {
            used[j] = true;
        }
    }
    for j in 0..used.len() {
        assert!(used[j] || (m.problem.lower[j].is_finite() && m.problem.upper[j].is_finite()), "{}", m.column_name(j));
    }
}

#[test]
fn objective_first_hour_coefficients() {
    let s = bundled_case_study();
    let m = build(&s).unwrap();
    let c = |v| m.problem.objective[m.registry.col(v)];
    assert_eq!(c(Var::PSub(0)), -24.3);
    // capacity 14.7 plus S * mu_up * mileage = 1 * 0.45 * 14.7 / 20
    assert!((c(Var::RSubUp(0)) + 15.03075).abs() < 1e-12);
    assert!((c(Var::RSubDn(0)) + (14.7 + 0.42 * 0.735)).abs() < 1e-12);
    // esag and ddgag are paid for energy, the station pays, demand blocks carry utility
    assert_eq!(c(Var::P(0, 1)), 25.0);
    assert_eq!(c(Var::P(0, 3)), 28.0);
    assert_eq!(c(Var::P(16, 2)), -29.5);
    assert_eq!(c(Var::Block(0, 0, 0)), -29.0);
    assert!((c(Var::RUp(0, 1)) - (23.0 + 0.45 * 23.0 / 20.0)).abs() < 1e-12);
    assert_eq!(c(Var::E(0, 1)), 0.0);
    assert_eq!(c(Var::V(0, 0)), 0.0);
}

#[test]
fn zero_prices_give_zero_objective() {
    let mut s = bundled_case_study();
    let zero = |v: &mut Vec<f64>| v.iter_mut().for_each(|x| *x = 0.0);
    let w = &mut s.wholesale;
    for v in [&mut w.energy, &mut w.cap_up, &mut w.cap_dn, &mut w.mil_up, &mut w.mil_dn] {
        zero(v);
    }
    for a in &mut s.aggregators {
        let o = &mut a.offers;
        for v in [&mut o.energy, &mut o.cap_up, &mut o.cap_dn, &mut o.mil_up, &mut o.mil_dn] {
            zero(v);
        }
        if let AggregatorKind::Drag(d) = &mut a.kind {
            d.blocks.iter_mut().for_each(|b| zero(&mut b.price));
        }
    }
    let m = build(&s).unwrap();
    assert!(m.problem.objective.iter().all(|&c| c == 0.0));
}

#[test]
fn drag_headroom_examples() {
    let s = micro(1, vec![drag()]);
    let (reg, p) = family(&s, add_drag_constraints);
    assert_eq!(p.num_rows(), 2);
    let ok = point(&reg, &[(Var::Block(0, 0, 0), 10.0)]);
    assert_eq!(row_violation(&p, &ok), 0.0);
    let bad = point(&reg, &[(Var::Block(0, 0, 0), 10.0), (Var::RUp(0, 0), 0.5)]);
    assert!((row_violation(&p, &bad) - 0.5).abs() < 1e-12);
    let idle = point(&reg, &[(Var::RDn(0, 0), 0.3)]);
    assert!(row_violation(&p, &idle) > 0.0);
    let c = reg.col(Var::RUp(0, 0));
    assert_eq!((p.lower[c], p.upper[c]), (0.0, 1.0));
}

#[test]
fn drag_rejection_sampling() {
    let s = micro(1, vec![drag()]);
    let (reg, p) = family(&s, add_drag_constraints);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut yes, mut no) = (0, 0);
    for _ in 0..2000 {
        let (blk, up, dn) = (rng.gen_range(0.0..10.0), rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
        let x = point(&reg, &[(Var::Block(0, 0, 0), blk), (Var::RUp(0, 0), up), (Var::RDn(0, 0), dn)]);
        let oracle = blk - dn >= 0.0 && blk + up <= 10.0;
        assert_eq!(row_violation(&p, &x) == 0.0, oracle, "{blk} {up} {dn}");
        if oracle {
            yes += 1
        } else {
            no += 1
        }
    }
    assert!(yes > 0 && no > 0);
}

#[test]
fn ddgag_headroom_examples() {
    let s = micro(1, vec![ddgag()]);
    let (reg, p) = family(&s, add_ddgag_constraints);
    let ok = point(&reg, &[(Var::P(0, 0), 4.0), (Var::RUp(0, 0), 1.0)]);
    assert_eq!(row_violation(&p, &ok), 0.0);
    let bad = point(&reg, &[(Var::P(0, 0), 4.5), (Var::RUp(0, 0), 1.0)]);
    assert!((row_violation(&p, &bad) - 0.5).abs() < 1e-12);
    let floor = point(&reg, &[(Var::RDn(0, 0), 0.2)]);
    assert!(row_violation(&p, &floor) > 0.0);
}

#[test]
fn ddgag_rejection_sampling() {
    let mut s = micro(1, vec![ddgag()]);
    if let AggregatorKind::Ddgag(d) = &mut s.aggregators[0].kind {
        d.p_min = 1.0;
    }
    let (reg, p) = family(&s, add_ddgag_constraints);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..2000 {
        let (pw, up, dn) = (rng.gen_range(1.0..5.0), rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
        let x = point(&reg, &[(Var::P(0, 0), pw), (Var::RUp(0, 0), up), (Var::RDn(0, 0), dn)]);
        let oracle = pw + up <= 5.0 && pw - dn >= 1.0;
        assert_eq!(row_violation(&p, &x) == 0.0, oracle);
    }
}

fn esag_case() -> Scenario {
    let mut s = bundled_case_study();
    s.aggregators.retain(|a| a.class() == AggregatorClass::Esag);
    s
}

#[test]
fn esag_first_state_from_initial_charge() {
    let s = esag_case();
    let (reg, mut p) = family(&s, add_esag_constraints);
    for (v, val) in [
        (Var::PDi(0, 0), 2.0),
        (Var::PCh(0, 0), 0.0),
        (Var::RUp(0, 0), 0.0),
        (Var::RDn(0, 0), 0.0),
        (Var::RUpDi(0, 0), 0.0),
        (Var::RDnDi(0, 0), 0.0),
        (Var::RUpCh(0, 0), 0.0),
        (Var::RDnCh(0, 0), 0.0),
        (Var::BEs(0, 0), 1.0),
    ] {
        fix(&mut p, &reg, v, val);
    }
    let r = lp(&p);
    assert_eq!(r.status, LpStatus::Optimal);
    // 8 MWh less the 2 MW discharged for one hour
    assert!((r.values[reg.col(Var::E(0, 0))] - 6.0).abs() < 1e-9);
    assert!((r.values[reg.col(Var::P(0, 0))] - 2.0).abs() < 1e-9);
}

#[test]
fn esag_discharge_mode_closes_charging() {
    let s = esag_case();
    let (reg, p) = family(&s, add_esag_constraints);
    let gate = |x: &[f64]| {
        p.constraints
            .iter()
            .zip(&p.row_names)
            .filter(|(_, n)| n.starts_with("esag_gate_"))
            .map(|(c, _)| c.violation(x))
            .fold(0.0, f64::max)
    };
    for v in [Var::PCh(0, 0), Var::RUpCh(0, 0), Var::RDnCh(0, 0)] {
        let x = point(&reg, &[(Var::BEs(0, 0), 1.0), (v, 0.1)]);
        assert!((gate(&x) - 0.1).abs() < 1e-12);
    }
    for v in [Var::PDi(0, 0), Var::RUpDi(0, 0), Var::RDnDi(0, 0)] {
        assert!(gate(&point(&reg, &[(v, 0.1)])) > 0.0);
        assert_eq!(gate(&point(&reg, &[(Var::BEs(0, 0), 1.0), (v, 0.1)])), 0.0);
    }
}

#[test]
fn esag_has_fourteen_rows_per_hour() {
    let s = esag_case();
    let (_, p) = family(&s, add_esag_constraints);
    assert_eq!(p.num_rows(), 14 * 24);
}

fn evcs_case() -> (Scenario, VariableRegistry, MilpProblem) {
    let mut s = bundled_case_study();
    s.aggregators.retain(|a| a.class() == AggregatorClass::Evcs);
    let (reg, p) = family(&s, add_evcs_constraints);
    (s, reg, p)
}

#[test]
fn evcs_rows_cover_plug_in_hours_only() {
    let (s, reg, p) = evcs_case();
    let gated: Vec<&String> = p.row_names.iter().filter(|n| n.starts_with("evcs_gate_p[")).collect();
    assert_eq!(gated.len(), 9);
    assert_eq!(gated[0], "evcs_gate_p[16,evcs-1]");
    for (t, hour) in s.horizon.steps.iter().enumerate() {
        for v in [Var::P(t, 0), Var::RUp(t, 0), Var::RDn(t, 0)] {
            let c = reg.col(v);
            if *hour < 16 {
                assert_eq!((p.lower[c], p.upper[c]), (0.0, 0.0));
            } else {
                assert!(p.upper[c] > 0.0);
            }
        }
    }
}

#[test]
fn evcs_fill_window() {
    let (s, reg, mut p) = evcs_case();
    fix(&mut p, &reg, Var::BEv(0), 1.0);
    let hours: Vec<usize> = (0..24).filter(|&t| s.horizon.steps[t] >= 16).collect();
    for &t in &hours {
        fix(&mut p, &reg, Var::RUp(t, 0), 0.0);
        fix(&mut p, &reg, Var::RDn(t, 0), 0.0);
    }
    let mut bounds = Vec::new();
    for sign in [1.0, -1.0] {
        p.objective = vec![0.0; reg.len()];
        for &t in &hours {
            p.objective[reg.col(Var::P(t, 0))] = sign;
        }
        let r = lp(&p);
        assert_eq!(r.status, LpStatus::Optimal);
        bounds.push(sign * r.objective);
    }
    // 0.9 * 10 - 2 and 10 - 2 MWh
    assert!((bounds[0] - 7.0).abs() < 1e-9, "{bounds:?}");
    assert!((bounds[1] - 8.0).abs() < 1e-9, "{bounds:?}");
}

#[test]
fn evcs_disabled_forces_zero() {
    let (_, reg, mut p) = evcs_case();
    fix(&mut p, &reg, Var::BEv(0), 0.0);
    p.objective = vec![0.0; reg.len()];
    for (c, v) in reg.iter() {
        if matches!(v, Var::P(..) | Var::RUp(..) | Var::RDn(..)) {
            p.objective[c] = -1.0;
        }
    }
    let r = lp(&p);
    assert_eq!(r.status, LpStatus::Optimal);
    assert!(r.objective.abs() < 1e-12);
}

#[test]
fn voltage_drop_on_single_branch() {
    let s = micro(1, vec![ddgag()]);
    let mut p = MilpProblem::default();
    let reg = VariableRegistry::allocate(&s, &mut p);
    add_network_constraints(&s, &reg, &mut p).unwrap();
    let drop = p.row_names.iter().position(|n| n == "v_drop[1,1]").unwrap();
    let x = point(&reg, &[(Var::Pl(0, 0), 1.0), (Var::V(0, 0), 1.0), (Var::V(1, 0), 0.99)]);
    assert!(p.constraints[drop].violation(&x) < 1e-15);
    let x = point(&reg, &[(Var::Pl(0, 0), 1.0), (Var::V(0, 0), 1.0), (Var::V(1, 0), 1.0)]);
    assert!((p.constraints[drop].violation(&x) - 0.01).abs() < 1e-15);
}

#[test]
fn zero_flow_is_feasible() {
    let s = bundled_case_study();
    let mut p = MilpProblem::default();
    let reg = VariableRegistry::allocate(&s, &mut p);
    add_network_constraints(&s, &reg, &mut p).unwrap();
    let mut x = vec![0.0; reg.len()];
    for (c, v) in reg.iter() {
        if let Var::V(..) = v {
            x[c] = 1.0;
        }
    }
    assert_eq!(row_violation(&p, &x), 0.0);
}

#[test]
fn self_loop_is_inconsistent_topology() {
    let mut s = micro(1, vec![ddgag()]);
    s.network.branches[0].to = 1;
    let mut p = MilpProblem::default();
    let reg = VariableRegistry::allocate(&s, &mut p);
    let err = add_network_constraints(&s, &reg, &mut p).unwrap_err();
    assert_eq!(err, FormulationError::InconsistentTopology { branch: 1 });
    assert!(matches!(build(&s), Err(FormulationError::Validation(r)) if r.has(ViolationCode::BranchSelfLoop)));
}

#[test]
fn parallel_branches_are_inconsistent_topology() {
    let mut s = micro(1, vec![ddgag()]);
    s.network.branches.push(Branch { id: 2, from: 2, to: 1, r: 0.01, x: 0.01, pl_max: 1.0, ql_max: 1.0 });
    let mut p = MilpProblem::default();
    let reg = VariableRegistry::allocate(&s, &mut p);
    assert!(matches!(add_network_constraints(&s, &reg, &mut p), Err(FormulationError::InconsistentTopology { .. })));
}

#[test]
fn pooled_regulation_examples() {
    let s = micro(1, vec![ddgag()]);
    let (reg, mut p) = family(&s, add_aggregation_constraints);
    fix(&mut p, &reg, Var::RUp(0, 0), 1.0);
    fix(&mut p, &reg, Var::RDn(0, 0), 0.0);
    let r = lp(&p);
    assert_eq!(r.values[reg.col(Var::RSubUp(0))], 1.0);

    let s = micro(1, vec![drag()]);
    let (reg, p) = family(&s, add_aggregation_constraints);
    let x = point(&reg, &[(Var::RUp(0, 0), 0.5), (Var::RSubDn(0), 0.5)]);
    assert_eq!(row_violation(&p, &x), 0.0);
    let x = point(&reg, &[(Var::RUp(0, 0), 0.5), (Var::RSubUp(0), 0.5)]);
    assert!(row_violation(&p, &x) > 0.0);
}

#[test]
fn validation_failure_propagates() {
    let mut s = bundled_case_study();
    s.network.s_base = -1.0;
    match build(&s) {
        Err(FormulationError::Validation(r)) => assert!(r.has(ViolationCode::BaseNonPositive)),
        other => panic!("{other:?}"),
    }
}

fn small() -> Scenario {
    micro(3, vec![drag_hours(3), ddgag()])
}

fn drag_hours(t: usize) -> AggregatorKind {
    AggregatorKind::Drag(DragConfig {
        blocks: vec![DemandBlock { p_max: 4.0, price: flat(t, 35.0) }, DemandBlock { p_max: 6.0, price: flat(t, 20.0) }],
        cap_up_max: 1.0,
        cap_dn_max: 1.0,
        tan_phi: 0.33,
    })
}

#[test]
fn decode_zero_vector() {
    let m = build(&small()).unwrap();
    let sched = decode_values(&m, &vec![0.0; m.registry.len()]).unwrap();
    assert_eq!(sched.objective, 0.0);
    assert!(sched.p_sub.iter().chain(&sched.r_sub_up).all(|&v| v == 0.0));
    for e in &sched.entities {
        assert!(e.energy.iter().chain(&e.cap_up).chain(&e.cap_dn).all(|&v| v == 0.0));
    }
    assert!(sched.v.iter().flatten().all(|&v| v == 0.0));
}

#[test]
fn decode_errors() {
    let m = build(&small()).unwrap();
    assert_eq!(
        decode_values(&m, &[0.0; 3]),
        Err(FormulationError::DimensionMismatch { expected: m.registry.len(), got: 3 })
    );
    let sol = MilpSolution {
        status: MilpStatus::NodeLimit,
        values: vec![0.0; m.registry.len()],
        objective: 0.0,
        best_bound: 0.0,
        gap: 1.0,
        nodes_explored: 1,
        lp_iterations: 0,
        trace: Vec::new(),
    };
    assert_eq!(decode(&m, &sol), Err(FormulationError::NonOptimalStatus(MilpStatus::NodeLimit)));
}

#[test]
fn small_case_solves_and_passes_residuals() {
    let s = small();
    let m = build(&s).unwrap();
    let sol = crate::solver::solve_milp(&m.problem, &SolveOptions::default()).unwrap();
    let sched = decode(&m, &sol).unwrap();
    let r = residuals(&m, &sched);
    assert!(r.passes(1e-6), "{r:?}");
    assert!(r.max_aggregation <= 1e-9);
    assert!((sched.objective - sol.objective).abs() <= 1e-8 * sol.objective.abs().max(1.0));

    let mut bent = sched.clone();
    bent.v[1][0] += 1e-3;
    assert!(!residuals(&m, &bent).passes(1e-6));
}

#[test]
fn residuals_flag_broken_block_sum() {
    let m = build(&small()).unwrap();
    let sol = crate::solver::solve_milp(&m.problem, &SolveOptions::default()).unwrap();
    let mut sched = decode(&m, &sol).unwrap();
    sched.entities[0].energy[0] += 0.5;
    assert!((residuals(&m, &sched).max_block_sum - 0.5).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn pooled_identity_holds_for_random_awards(seed in any::<u64>()) {
        let s = bundled_case_study();
        let (reg, p) = family(&s, add_aggregation_constraints);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = vec![0.0; reg.len()];
        for (c, v) in reg.iter() {
            if matches!(v, Var::RUp(..) | Var::RDn(..)) {
                x[c] = rng.gen_range(0.0..2.0);
            }
        }
        for t in 0..24 {
            let mut up = 0.0;
            let mut dn = 0.0;
            for (k, a) in s.aggregators.iter().enumerate() {
                let (ru, rd) = (x[reg.col(Var::RUp(t, k))], x[reg.col(Var::RDn(t, k))]);
                match a.class() {
                    AggregatorClass::Esag | AggregatorClass::Ddgag => { up += ru; dn += rd; }
                    _ => { up += rd; dn += ru; }
                }
            }
            x[reg.col(Var::RSubUp(t))] = up;
            x[reg.col(Var::RSubDn(t))] = dn;
        }
        prop_assert!(row_violation(&p, &x) <= 1e-12);
    }

    #[test]
    fn encode_inverts_decode(seed in any::<u64>()) {
        let m = build(&small()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..m.registry.len())
            .map(|j| {
                let (l, u) = (m.problem.lower[j], m.problem.upper[j].min(m.problem.lower[j] + 10.0));
                if m.problem.integral[j] { f64::from(rng.gen_range(0..=1u8)) } else { rng.gen_range(l..=u) }
            })
            .collect();
        let sched = decode_values(&m, &x).unwrap();
        prop_assert_eq!(encode(&m, &sched), x);
    }
}

#[test]
fn relation_kinds_match_families() {
    let m = build(&bundled_case_study()).unwrap();
    for (c, n) in m.problem.constraints.iter().zip(&m.problem.row_names) {
        let want = if n.starts_with("esag_state") || n.contains("balance") || n.starts_with("pool_") || n.starts_with("v_") {
            Relation::Eq
        } else if n.starts_with("drag_floor") || n.starts_with("ddgag_floor") || n.starts_with("evcs_floor") || n.starts_with("evcs_fill_min") {
            Relation::Ge
        } else if n.starts_with("esag_split") || n.starts_with("esag_up_split") || n.starts_with("esag_dn_split") {
            Relation::Eq
        } else {
            Relation::Le
        };
        assert_eq!(c.relation, want, "{n}");
    }
}
