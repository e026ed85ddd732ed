use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::model::{AggregatorKind, Scenario};
use crate::solver::MilpProblem;

/// A decision variable. `t` is the step index, `k` the aggregator index,
/// `a` the demand block, `j` the branch and `n` the bus, all zero-based
/// positions in the scenario's lists.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    PSub(usize),
    QSub(usize),
    RSubUp(usize),
    RSubDn(usize),
    /// Energy award of an ESAG, EVCS or DDGAG, `(t, k)`.
    P(usize, usize),
    RUp(usize, usize),
    RDn(usize, usize),
    /// Demand block consumption, `(a, t, k)`.
    Block(usize, usize, usize),
    E(usize, usize),
    PDi(usize, usize),
    PCh(usize, usize),
    RUpDi(usize, usize),
    RDnDi(usize, usize),
    RUpCh(usize, usize),
    RDnCh(usize, usize),
    /// Storage mode: 1 discharging, 0 charging.
    BEs(usize, usize),
    /// Charging station participation.
    BEv(usize),
    Pl(usize, usize),
    Ql(usize, usize),
    V(usize, usize),
}

/// Bijective map between variables and column indices `0..len`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct VariableRegistry {
    index: BTreeMap<Var, usize>,
    vars: Vec<Var>,
}

impl VariableRegistry {
    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn get(&self, v: Var) -> Option<usize> {
        self.index.get(&v).copied()
    }

    /// Column of `v`; panics when the scenario has no such variable.
    pub fn col(&self, v: Var) -> usize {
        match self.index.get(&v) {
            Some(&c) => c,
            None => panic!("variable {v:?} is not registered"),
        }
    }

    pub fn var(&self, col: usize) -> Var {
        self.vars[col]
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Var)> + '_ {
        self.vars.iter().copied().enumerate()
    }

    pub fn binaries(&self) -> impl Iterator<Item = (usize, Var)> + '_ {
        self.iter().filter(|(_, v)| matches!(v, Var::BEs(..) | Var::BEv(_)))
    }

    fn push(&mut self, p: &mut MilpProblem, v: Var, name: String, lo: f64, hi: f64) {
        let integral = matches!(v, Var::BEs(..) | Var::BEv(_));
        let col = p.add_column(name, lo, hi, 0.0, integral);
        let prev = self.index.insert(v, col);
        debug_assert!(prev.is_none());
        self.vars.push(v);
    }

    /// Create every column of `s` in `p`, with box bounds and zero cost.
    /// Columns are laid out step by step, then the per-station binaries.
    pub fn allocate(s: &Scenario, p: &mut MilpProblem) -> Self {
        let mut reg = VariableRegistry::default();
        let net = &s.network;
        let pl_sum: f64 = net.branches.iter().map(|b| b.pl_max).sum();
        let ql_sum: f64 = net.branches.iter().map(|b| b.ql_max).sum();
        let inf = f64::INFINITY;

        for (t, &hour) in s.horizon.steps.iter().enumerate() {
            reg.push(p, Var::PSub(t), format!("p_sub[{hour}]"), -pl_sum, pl_sum);
            reg.push(p, Var::QSub(t), format!("q_sub[{hour}]"), -ql_sum, ql_sum);
            reg.push(p, Var::RSubUp(t), format!("r_sub_up[{hour}]"), 0.0, inf);
            reg.push(p, Var::RSubDn(t), format!("r_sub_dn[{hour}]"), 0.0, inf);

            for (k, a) in s.aggregators.iter().enumerate() {
                let id = a.id.as_str();
                let nm = |f: &str| format!("{f}[{hour},{id}]");
                match &a.kind {
                    AggregatorKind::Drag(d) => {
                        for (b, block) in d.blocks.iter().enumerate() {
                            reg.push(p, Var::Block(b, t, k), format!("block[{b},{hour},{id}]"), 0.0, block.p_max);
                        }
                        reg.push(p, Var::RUp(t, k), nm("r_up"), 0.0, d.cap_up_max);
                        reg.push(p, Var::RDn(t, k), nm("r_dn"), 0.0, d.cap_dn_max);
                    }
                    AggregatorKind::Esag(e) => {
                        let both = e.dr_max + e.cr_max;
                        reg.push(p, Var::P(t, k), nm("p"), -e.eta_ch * e.cr_max, e.dr_max / e.eta_di);
                        reg.push(p, Var::RUp(t, k), nm("r_up"), 0.0, both);
                        reg.push(p, Var::RDn(t, k), nm("r_dn"), 0.0, both);
                        reg.push(p, Var::E(t, k), nm("e"), e.e_min, e.e_max);
                        reg.push(p, Var::PDi(t, k), nm("p_di"), 0.0, e.dr_max);
                        reg.push(p, Var::PCh(t, k), nm("p_ch"), 0.0, e.cr_max);
                        reg.push(p, Var::RUpDi(t, k), nm("r_up_di"), 0.0, e.dr_max);
                        reg.push(p, Var::RDnDi(t, k), nm("r_dn_di"), 0.0, e.dr_max);
                        reg.push(p, Var::RUpCh(t, k), nm("r_up_ch"), 0.0, e.cr_max);
                        reg.push(p, Var::RDnCh(t, k), nm("r_dn_ch"), 0.0, e.cr_max);
                        reg.push(p, Var::BEs(t, k), nm("b_es"), 0.0, 1.0);
                    }
                    AggregatorKind::Evcs(e) => {
                        let (er, err) = if e.availability.contains(&hour) { (e.er_max, e.err_max) } else { (0.0, 0.0) };
                        reg.push(p, Var::P(t, k), nm("p"), 0.0, er);
                        reg.push(p, Var::RUp(t, k), nm("r_up"), 0.0, err);
                        reg.push(p, Var::RDn(t, k), nm("r_dn"), 0.0, err);
                    }
                    AggregatorKind::Ddgag(d) => {
                        reg.push(p, Var::P(t, k), nm("p"), d.p_min, d.p_max);
                        reg.push(p, Var::RUp(t, k), nm("r_up"), 0.0, d.ru);
                        reg.push(p, Var::RDn(t, k), nm("r_dn"), 0.0, d.rd);
                    }
                }
            }

            for (j, br) in net.branches.iter().enumerate() {
                reg.push(p, Var::Pl(j, t), format!("pl[{},{hour}]", br.id), -br.pl_max, br.pl_max);
                reg.push(p, Var::Ql(j, t), format!("ql[{},{hour}]", br.id), -br.ql_max, br.ql_max);
            }
            for (n, bus) in net.buses.iter().enumerate() {
                reg.push(p, Var::V(n, t), format!("v[{},{hour}]", bus.id), net.v_min, net.v_max);
            }
        }

        for (k, a) in s.aggregators.iter().enumerate() {
            if let AggregatorKind::Evcs(_) = a.kind {
                reg.push(p, Var::BEv(k), format!("b_ev[{}]", a.id), 0.0, 1.0);
            }
        }
        reg
    }
}
