use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{FormulationError, Var, VariableRegistry};
use crate::model::{AggregatorKind, Scenario};
use crate::solver::{MilpProblem, Relation};

use Relation::{Eq, Ge, Le};

/// Cost vector of the DSO problem (minimised), one entry per registered column.
///
/// Wholesale sales and regulation income of the DSO enter with a minus
/// sign; payments to aggregators with a plus sign, except charging
/// stations and demand blocks, which pay the DSO.
pub fn build_objective(s: &Scenario, reg: &VariableRegistry) -> Vec<f64> {
    let mut c = vec![0.0; reg.len()];
    let h = s.horizon.step_hours;
    let w = &s.wholesale;
    for t in 0..s.horizon.len() {
        let (su, sd) = s.regulation.mileage_factors(t);
        c[reg.col(Var::PSub(t))] = -h * w.energy[t];
        c[reg.col(Var::RSubUp(t))] = -h * (w.cap_up[t] + su * w.mil_up[t]);
        c[reg.col(Var::RSubDn(t))] = -h * (w.cap_dn[t] + sd * w.mil_dn[t]);
        for (k, a) in s.aggregators.iter().enumerate() {
            let o = &a.offers;
            c[reg.col(Var::RUp(t, k))] = h * (o.cap_up[t] + su * o.mil_up[t]);
            c[reg.col(Var::RDn(t, k))] = h * (o.cap_dn[t] + sd * o.mil_dn[t]);
            match &a.kind {
                AggregatorKind::Drag(d) => {
                    for (b, block) in d.blocks.iter().enumerate() {
                        c[reg.col(Var::Block(b, t, k))] = -h * block.price[t];
                    }
                }
                AggregatorKind::Esag(_) | AggregatorKind::Ddgag(_) => c[reg.col(Var::P(t, k))] = h * o.energy[t],
                AggregatorKind::Evcs(_) => c[reg.col(Var::P(t, k))] = -h * o.energy[t],
            }
        }
    }
    c
}

/// Number of rows [`super::build`] produces for `s`.
pub fn row_count(s: &Scenario) -> usize {
    let t = s.horizon.len();
    let net = &s.network;
    let mut per_step = 2 * net.buses.len() + net.branches.len() + 1 + 2;
    let mut fixed = 0;
    for a in &s.aggregators {
        match &a.kind {
            AggregatorKind::Drag(_) | AggregatorKind::Ddgag(_) => per_step += 2,
            AggregatorKind::Esag(_) => per_step += 14,
            AggregatorKind::Evcs(e) => fixed += 5 * e.availability.len() + 2,
        }
    }
    t * per_step + fixed
}

/// Demand blocks must cover the down-regulation award and leave headroom
/// for the up-regulation award.
pub fn add_drag_constraints(s: &Scenario, reg: &VariableRegistry, p: &mut MilpProblem) {
    for (t, hour) in s.horizon.steps.iter().enumerate() {
        for (k, a) in s.aggregators.iter().enumerate() {
            let AggregatorKind::Drag(d) = &a.kind else { continue };
            let blocks: Vec<(usize, f64)> = (0..d.blocks.len()).map(|b| (reg.col(Var::Block(b, t, k)), 1.0)).collect();

            let mut floor = blocks.clone();
            floor.push((reg.col(Var::RDn(t, k)), -1.0));
            p.add_row(format!("drag_floor[{hour},{}]", a.id), floor, Ge, 0.0);

            let mut head = blocks;
            head.push((reg.col(Var::RUp(t, k)), 1.0));
            p.add_row(format!("drag_head[{hour},{}]", a.id), head, Le, d.total_p_max());
        }
    }
}

/// Storage energy state, injection and capacity splits, mode gating and
/// rate headroom.
pub fn add_esag_constraints(s: &Scenario, reg: &VariableRegistry, p: &mut MilpProblem) {
    let h = s.horizon.step_hours;
    for (t, hour) in s.horizon.steps.iter().enumerate() {
        let (mu_up, mu_dn) = (s.regulation.mu_up[t], s.regulation.mu_dn[t]);
        for (k, a) in s.aggregators.iter().enumerate() {
            let AggregatorKind::Esag(e) = &a.kind else { continue };
            let id = &a.id;
            let c = |v: Var| reg.col(v);
            let (pc, up, dn) = (c(Var::P(t, k)), c(Var::RUp(t, k)), c(Var::RDn(t, k)));
            let (p_di, p_ch) = (c(Var::PDi(t, k)), c(Var::PCh(t, k)));
            let (up_di, dn_di, up_ch, dn_ch) =
                (c(Var::RUpDi(t, k)), c(Var::RDnDi(t, k)), c(Var::RUpCh(t, k)), c(Var::RDnCh(t, k)));
            let b = c(Var::BEs(t, k));

            // Energy state, written as printed: deployed up-regulation is
            // credited to the state and deployed down-regulation debited.
            let mut state = vec![
                (pc, h),
                (c(Var::E(t, k)), 1.0),
                (up, -h * mu_up / e.eta_di),
                (dn, h * e.eta_ch * mu_dn),
            ];
            let rhs = if t == 0 {
                e.e_init
            } else {
                state.push((c(Var::E(t - 1, k)), -1.0));
                0.0
            };
            p.add_row(format!("esag_state[{hour},{id}]"), state, Eq, rhs);

            p.add_row(
                format!("esag_split[{hour},{id}]"),
                vec![(pc, 1.0), (p_di, -1.0 / e.eta_di), (p_ch, e.eta_ch)],
                Eq,
                0.0,
            );
            p.add_row(format!("esag_up_split[{hour},{id}]"), vec![(up, 1.0), (up_di, -1.0), (dn_ch, -1.0)], Eq, 0.0);
            p.add_row(format!("esag_dn_split[{hour},{id}]"), vec![(dn, 1.0), (dn_di, -1.0), (up_ch, -1.0)], Eq, 0.0);

            for (name, x) in [("p_di", p_di), ("r_up_di", up_di), ("r_dn_di", dn_di)] {
                p.add_row(format!("esag_gate_{name}[{hour},{id}]"), vec![(x, 1.0), (b, -e.dr_max)], Le, 0.0);
            }
            for (name, x) in [("p_ch", p_ch), ("r_up_ch", up_ch), ("r_dn_ch", dn_ch)] {
                p.add_row(format!("esag_gate_{name}[{hour},{id}]"), vec![(x, 1.0), (b, e.cr_max)], Le, e.cr_max);
            }

            p.add_row(format!("esag_di_floor[{hour},{id}]"), vec![(dn_di, 1.0), (p_di, -1.0)], Le, 0.0);
            p.add_row(format!("esag_di_head[{hour},{id}]"), vec![(p_di, 1.0), (up_di, 1.0)], Le, e.dr_max);
            p.add_row(format!("esag_ch_floor[{hour},{id}]"), vec![(dn_ch, 1.0), (p_ch, -1.0)], Le, 0.0);
            p.add_row(format!("esag_ch_head[{hour},{id}]"), vec![(p_ch, 1.0), (up_ch, 1.0)], Le, e.cr_max);
        }
    }
}

/// Charging station rows over its plug-in hours plus the two-sided
/// end-of-window charge requirement. Columns outside the window are fixed
/// to zero by their bounds.
pub fn add_evcs_constraints(s: &Scenario, reg: &VariableRegistry, p: &mut MilpProblem) {
    let h = s.horizon.step_hours;
    for (k, a) in s.aggregators.iter().enumerate() {
        let AggregatorKind::Evcs(e) = &a.kind else { continue };
        let id = &a.id;
        let b = reg.col(Var::BEv(k));
        let mut delivered = Vec::new();
        for &hour in &e.availability {
            let Some(t) = s.horizon.index_of(hour) else { continue };
            let (pc, up, dn) = (reg.col(Var::P(t, k)), reg.col(Var::RUp(t, k)), reg.col(Var::RDn(t, k)));
            p.add_row(format!("evcs_gate_p[{hour},{id}]"), vec![(pc, 1.0), (b, -e.er_max)], Le, 0.0);
            p.add_row(format!("evcs_gate_r_up[{hour},{id}]"), vec![(up, 1.0), (b, -e.err_max)], Le, 0.0);
            p.add_row(format!("evcs_gate_r_dn[{hour},{id}]"), vec![(dn, 1.0), (b, -e.err_max)], Le, 0.0);
            p.add_row(format!("evcs_head[{hour},{id}]"), vec![(pc, 1.0), (up, 1.0)], Le, e.er_max);
            p.add_row(format!("evcs_floor[{hour},{id}]"), vec![(pc, 1.0), (dn, -1.0)], Ge, 0.0);

            let g = h * e.gamma_ch;
            delivered.push((pc, g));
            delivered.push((up, g * s.regulation.mu_up[t]));
            delivered.push((dn, -g * s.regulation.mu_dn[t]));
        }
        let mut low = delivered.clone();
        low.push((b, e.e_init - 0.9 * e.cl_max));
        p.add_row(format!("evcs_fill_min[{id}]"), low, Ge, 0.0);
        let mut high = delivered;
        high.push((b, e.e_init - e.cl_max));
        p.add_row(format!("evcs_fill_max[{id}]"), high, Le, 0.0);
    }
}

/// Generator output plus reserved regulation must stay within its limits.
pub fn add_ddgag_constraints(s: &Scenario, reg: &VariableRegistry, p: &mut MilpProblem) {
    for (t, hour) in s.horizon.steps.iter().enumerate() {
        for (k, a) in s.aggregators.iter().enumerate() {
            let AggregatorKind::Ddgag(d) = &a.kind else { continue };
            let pc = reg.col(Var::P(t, k));
            p.add_row(
                format!("ddgag_head[{hour},{}]", a.id),
                vec![(pc, 1.0), (reg.col(Var::RUp(t, k)), 1.0)],
                Le,
                d.p_max,
            );
            p.add_row(
                format!("ddgag_floor[{hour},{}]", a.id),
                vec![(pc, 1.0), (reg.col(Var::RDn(t, k)), -1.0)],
                Ge,
                d.p_min,
            );
        }
    }
}

/// Nodal active and reactive balances, linearised voltage drops and the
/// substation voltage anchor.
///
/// Balances use the printed sign convention: consumption positive,
/// generation negative, `+P_sub` at the substation and `+A[j][n] * Pl_j`
/// for each branch. A positive `P_sub` is therefore an export to the
/// wholesale market.
pub fn add_network_constraints(s: &Scenario, reg: &VariableRegistry, p: &mut MilpProblem) -> Result<(), FormulationError> {
    let net = &s.network;
    let a = net.incidence();
    let c = net.adjacency();
    for (j, br) in net.branches.iter().enumerate() {
        let from = a[j].iter().position(|&v| v == 1);
        let to = a[j].iter().position(|&v| v == -1);
        let sources = a[j].iter().filter(|&&v| v == 1).count();
        let sinks = a[j].iter().filter(|&&v| v == -1).count();
        let (Some(f), Some(t)) = (from, to) else {
            return Err(FormulationError::InconsistentTopology { branch: br.id });
        };
        let parallel = net
            .branches
            .iter()
            .filter(|o| (o.from == br.from && o.to == br.to) || (o.from == br.to && o.to == br.from))
            .count();
        if sources != 1 || sinks != 1 || c[f][t] != 1 || c[t][f] != 1 || parallel != 1 {
            return Err(FormulationError::InconsistentTopology { branch: br.id });
        }
    }
    let sub = net.bus_index(net.substation).ok_or(FormulationError::InconsistentTopology { branch: 0 })?;

    for (t, hour) in s.horizon.steps.iter().enumerate() {
        for (n, bus) in net.buses.iter().enumerate() {
            let mut pt = Vec::new();
            let mut qt = Vec::new();
            for (k, ag) in s.aggregators.iter().enumerate() {
                if net.bus_index(ag.bus) != Some(n) {
                    continue;
                }
                match &ag.kind {
                    AggregatorKind::Drag(d) => {
                        for b in 0..d.blocks.len() {
                            let col = reg.col(Var::Block(b, t, k));
                            pt.push((col, 1.0));
                            qt.push((col, d.tan_phi));
                        }
                    }
                    AggregatorKind::Evcs(_) => pt.push((reg.col(Var::P(t, k)), 1.0)),
                    AggregatorKind::Esag(_) => pt.push((reg.col(Var::P(t, k)), -1.0)),
                    AggregatorKind::Ddgag(d) => {
                        let col = reg.col(Var::P(t, k));
                        pt.push((col, -1.0));
                        qt.push((col, -d.tan_phi));
                    }
                }
            }
            if n == sub {
                pt.push((reg.col(Var::PSub(t)), 1.0));
                qt.push((reg.col(Var::QSub(t)), 1.0));
            }
            for (j, row) in a.iter().enumerate() {
                if row[n] != 0 {
                    pt.push((reg.col(Var::Pl(j, t)), f64::from(row[n])));
                    qt.push((reg.col(Var::Ql(j, t)), f64::from(row[n])));
                }
            }
            p.add_row(format!("p_balance[{hour},{}]", bus.id), pt, Eq, -bus.p_load[t]);
            p.add_row(format!("q_balance[{hour},{}]", bus.id), qt, Eq, -bus.q_load[t]);
        }

        for (j, br) in net.branches.iter().enumerate() {
            let f = net.bus_index(br.from).unwrap_or(0);
            let to = net.bus_index(br.to).unwrap_or(0);
            p.add_row(
                format!("v_drop[{hour},{}]", br.id),
                vec![
                    (reg.col(Var::V(to, t)), 1.0),
                    (reg.col(Var::V(f, t)), -1.0),
                    (reg.col(Var::Pl(j, t)), br.r / net.s_base),
                    (reg.col(Var::Ql(j, t)), br.x / net.s_base),
                ],
                Eq,
                0.0,
            );
        }
        p.add_row(format!("v_anchor[{hour}]"), vec![(reg.col(Var::V(sub, t)), 1.0)], Eq, net.v_substation);
    }
    Ok(())
}

/// The DSO's regulation offers pool the aggregators' awards. Load-type
/// aggregators (demand response, charging stations) provide up-regulation
/// by consuming less, so their awards cross over.
pub fn add_aggregation_constraints(s: &Scenario, reg: &VariableRegistry, p: &mut MilpProblem) {
    for (t, hour) in s.horizon.steps.iter().enumerate() {
        let mut up = vec![(reg.col(Var::RSubUp(t)), 1.0)];
        let mut dn = vec![(reg.col(Var::RSubDn(t)), 1.0)];
        for (k, a) in s.aggregators.iter().enumerate() {
            let (ru, rd) = (reg.col(Var::RUp(t, k)), reg.col(Var::RDn(t, k)));
            match a.kind {
                AggregatorKind::Esag(_) | AggregatorKind::Ddgag(_) => {
                    up.push((ru, -1.0));
                    dn.push((rd, -1.0));
                }
                AggregatorKind::Drag(_) | AggregatorKind::Evcs(_) => {
                    up.push((rd, -1.0));
                    dn.push((ru, -1.0));
                }
            }
        }
        p.add_row(format!("pool_up[{hour}]"), up, Eq, 0.0);
        p.add_row(format!("pool_dn[{hour}]"), dn, Eq, 0.0);
    }
}
