use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{DsoModel, FormulationError, Var};
use crate::model::{AggregatorClass, AggregatorKind};
use crate::solver::{MilpSolution, MilpStatus};

/// Storage internals per step.
#[derive(Clone, Debug, PartialEq)]
pub struct StorageSchedule {
    /// Energy held at the end of each step, MWh.
    pub charge: Vec<f64>,
    pub p_di: Vec<f64>,
    pub p_ch: Vec<f64>,
    pub r_up_di: Vec<f64>,
    pub r_dn_di: Vec<f64>,
    pub r_up_ch: Vec<f64>,
    pub r_dn_ch: Vec<f64>,
    pub discharging: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntitySchedule {
    pub id: String,
    pub class: AggregatorClass,
    /// Energy award per step, MW. For demand response this is the sum of
    /// its blocks.
    pub energy: Vec<f64>,
    pub cap_up: Vec<f64>,
    pub cap_dn: Vec<f64>,
    /// Demand response block consumption, `[block][step]`.
    pub blocks: Vec<Vec<f64>>,
    pub storage: Option<StorageSchedule>,
    /// Charging station participation.
    pub ev_enabled: Option<bool>,
}

/// A decoded solution.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub hours: Vec<u32>,
    pub p_sub: Vec<f64>,
    pub q_sub: Vec<f64>,
    pub r_sub_up: Vec<f64>,
    pub r_sub_dn: Vec<f64>,
    pub entities: Vec<EntitySchedule>,
    /// Branch flows `[branch][step]`.
    pub pl: Vec<Vec<f64>>,
    pub ql: Vec<Vec<f64>>,
    /// Bus voltages `[bus][step]`.
    pub v: Vec<Vec<f64>>,
    /// Objective recomputed from the decoded values, $.
    pub objective: f64,
    /// Fingerprint of the scenario this schedule solves.
    pub fingerprint: [u8; 32],
}

impl Schedule {
    pub fn entity(&self, id: &str) -> Option<&EntitySchedule> {
        self.entities.iter().find(|e| e.id == id)
    }
}

/// Decode an optimal solver result.
pub fn decode(m: &DsoModel, sol: &MilpSolution) -> Result<Schedule, FormulationError> {
    if sol.status != MilpStatus::Optimal {
        return Err(FormulationError::NonOptimalStatus(sol.status));
    }
    decode_values(m, &sol.values)
}

/// Decode a raw column vector without looking at solver status.
pub fn decode_values(m: &DsoModel, x: &[f64]) -> Result<Schedule, FormulationError> {
    let reg = &m.registry;
    if x.len() != reg.len() {
        return Err(FormulationError::DimensionMismatch { expected: reg.len(), got: x.len() });
    }
    let s = &m.scenario;
    let nt = s.horizon.len();
    let series = |f: &dyn Fn(usize) -> Var| -> Vec<f64> { (0..nt).map(|t| x[reg.col(f(t))]).collect() };

    let entities = s
        .aggregators
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let mut e = EntitySchedule {
                id: a.id.clone(),
                class: a.class(),
                energy: Vec::new(),
                cap_up: series(&|t| Var::RUp(t, k)),
                cap_dn: series(&|t| Var::RDn(t, k)),
                blocks: Vec::new(),
                storage: None,
                ev_enabled: None,
            };
            match &a.kind {
                AggregatorKind::Drag(d) => {
                    e.blocks = (0..d.blocks.len()).map(|b| series(&|t| Var::Block(b, t, k))).collect();
                    e.energy = (0..nt).map(|t| e.blocks.iter().map(|b| b[t]).sum()).collect();
                }
                AggregatorKind::Esag(_) => {
                    e.energy = series(&|t| Var::P(t, k));
                    e.storage = Some(StorageSchedule {
                        charge: series(&|t| Var::E(t, k)),
                        p_di: series(&|t| Var::PDi(t, k)),
                        p_ch: series(&|t| Var::PCh(t, k)),
                        r_up_di: series(&|t| Var::RUpDi(t, k)),
                        r_dn_di: series(&|t| Var::RDnDi(t, k)),
                        r_up_ch: series(&|t| Var::RUpCh(t, k)),
                        r_dn_ch: series(&|t| Var::RDnCh(t, k)),
                        discharging: (0..nt).map(|t| x[reg.col(Var::BEs(t, k))] > 0.5).collect(),
                    });
                }
                AggregatorKind::Evcs(_) => {
                    e.energy = series(&|t| Var::P(t, k));
                    e.ev_enabled = Some(x[reg.col(Var::BEv(k))] > 0.5);
                }
                AggregatorKind::Ddgag(_) => e.energy = series(&|t| Var::P(t, k)),
            }
            e
        })
        .collect();

    let net = &s.network;
    let mut sched = Schedule {
        hours: s.horizon.steps.clone(),
        p_sub: series(&Var::PSub),
        q_sub: series(&Var::QSub),
        r_sub_up: series(&Var::RSubUp),
        r_sub_dn: series(&Var::RSubDn),
        entities,
        pl: (0..net.branches.len()).map(|j| series(&|t| Var::Pl(j, t))).collect(),
        ql: (0..net.branches.len()).map(|j| series(&|t| Var::Ql(j, t))).collect(),
        v: (0..net.buses.len()).map(|n| series(&|t| Var::V(n, t))).collect(),
        objective: 0.0,
        fingerprint: m.fingerprint,
    };
    sched.objective = m.problem.objective_value(&encode(m, &sched));
    Ok(sched)
}

/// Rebuild the column vector described by `sched`.
pub fn encode(m: &DsoModel, sched: &Schedule) -> Vec<f64> {
    let bit = |b: bool| if b { 1.0 } else { 0.0 };
    let mut x = vec![0.0; m.registry.len()];
    for (col, v) in m.registry.iter() {
        let ent = |k: usize| &sched.entities[k];
        let st = |k: usize| ent(k).storage.as_ref().expect("storage entity");
        x[col] = match v {
            Var::PSub(t) => sched.p_sub[t],
            Var::QSub(t) => sched.q_sub[t],
            Var::RSubUp(t) => sched.r_sub_up[t],
            Var::RSubDn(t) => sched.r_sub_dn[t],
            Var::P(t, k) => ent(k).energy[t],
            Var::RUp(t, k) => ent(k).cap_up[t],
            Var::RDn(t, k) => ent(k).cap_dn[t],
            Var::Block(b, t, k) => ent(k).blocks[b][t],
            Var::E(t, k) => st(k).charge[t],
            Var::PDi(t, k) => st(k).p_di[t],
            Var::PCh(t, k) => st(k).p_ch[t],
            Var::RUpDi(t, k) => st(k).r_up_di[t],
            Var::RDnDi(t, k) => st(k).r_dn_di[t],
            Var::RUpCh(t, k) => st(k).r_up_ch[t],
            Var::RDnCh(t, k) => st(k).r_dn_ch[t],
            Var::BEs(t, k) => bit(st(k).discharging[t]),
            Var::BEv(k) => bit(ent(k).ev_enabled.unwrap_or(false)),
            Var::Pl(j, t) => sched.pl[j][t],
            Var::Ql(j, t) => sched.ql[j][t],
            Var::V(n, t) => sched.v[n][t],
        };
    }
    x
}

/// Worst violations of a schedule against its model.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Residuals {
    /// Largest row violation and the row's name.
    pub max_row: f64,
    pub worst_row: Option<String>,
    pub max_bound: f64,
    /// Pooled regulation identities recomputed from the entity awards.
    pub max_aggregation: f64,
    /// Demand response energy against the sum of its blocks.
    pub max_block_sum: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.max_row.max(self.max_bound).max(self.max_aggregation).max(self.max_block_sum)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max() <= tol
    }
}

pub fn residuals(m: &DsoModel, sched: &Schedule) -> Residuals {
    let x = encode(m, sched);
    let p = &m.problem;
    let mut r = Residuals::default();
    for (i, c) in p.constraints.iter().enumerate() {
        let v = c.violation(&x);
        if v > r.max_row {
            r.max_row = v;
            r.worst_row = Some(p.row_names[i].clone());
        }
    }
    for (j, &xj) in x.iter().enumerate() {
        r.max_bound = r.max_bound.max(p.lower[j] - xj).max(xj - p.upper[j]);
    }
    for t in 0..sched.hours.len() {
        let mut up = 0.0;
        let mut dn = 0.0;
        for e in &sched.entities {
            match e.class {
                AggregatorClass::Esag | AggregatorClass::Ddgag => {
                    up += e.cap_up[t];
                    dn += e.cap_dn[t];
                }
                AggregatorClass::Drag | AggregatorClass::Evcs => {
                    up += e.cap_dn[t];
                    dn += e.cap_up[t];
                }
            }
            if e.class == AggregatorClass::Drag {
                let sum: f64 = e.blocks.iter().map(|b| b[t]).sum();
                r.max_block_sum = r.max_block_sum.max((sum - e.energy[t]).abs());
            }
        }
        r.max_aggregation = r.max_aggregation.max((up - sched.r_sub_up[t]).abs()).max((dn - sched.r_sub_dn[t]).abs());
    }
    r
}
