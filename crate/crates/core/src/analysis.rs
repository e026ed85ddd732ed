//! Post-solve economics: per-entity revenue and the offer-price sweep.

use alloc::string::String;
use alloc::vec::Vec;

use crate::formulation::{build, decode, DsoModel, FormulationError, Schedule};
use crate::model::{AggregatorClass, AggregatorKind, Scenario};
use crate::solver::{solve_milp, MilpSolution, MilpStatus, SolveError, SolveOptions};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error("schedule was solved for a different scenario")]
    StaleSchedule,
    #[error("no aggregator with id `{0}`")]
    UnknownTarget(String),
    #[error(transparent)]
    Formulation(#[from] FormulationError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Revenue of one aggregator over the horizon, $.
#[derive(Clone, Debug, PartialEq)]
pub struct EntityRevenue {
    pub id: String,
    pub class: AggregatorClass,
    /// Income from energy sales, negative when the entity buys. For demand
    /// response this is the bid value of the consumed blocks, negated.
    pub energy: f64,
    pub capacity: f64,
    pub mileage: f64,
    /// `energy + capacity + mileage`.
    pub total: f64,
    /// Like `total`, but counting only the hours in which energy is sold.
    pub gross_total: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RevenueReport {
    pub entities: Vec<EntityRevenue>,
    /// Wholesale income of the DSO per step (energy, capacity and mileage).
    pub dso_position: Vec<f64>,
}

impl RevenueReport {
    pub fn entity(&self, id: &str) -> Option<&EntityRevenue> {
        self.entities.iter().find(|e| e.id == id)
    }

    pub fn dso_total(&self) -> f64 {
        self.dso_position.iter().sum()
    }

    /// DSO income less what it pays the aggregators. Equals the negated
    /// objective of the problem the schedule solves.
    pub fn dso_surplus(&self) -> f64 {
        self.dso_total() - self.entities.iter().map(|e| e.total).sum::<f64>()
    }
}

/// Regroup the objective terms by entity.
pub fn compute_revenue(sched: &Schedule, s: &Scenario) -> Result<RevenueReport, AnalysisError> {
    if sched.fingerprint != s.fingerprint() {
        return Err(AnalysisError::StaleSchedule);
    }
    let h = s.horizon.step_hours;
    let w = &s.wholesale;
    let nt = s.horizon.len();

    let dso_position = (0..nt)
        .map(|t| {
            let (su, sd) = s.regulation.mileage_factors(t);
            h * (w.energy[t] * sched.p_sub[t]
                + (w.cap_up[t] + su * w.mil_up[t]) * sched.r_sub_up[t]
                + (w.cap_dn[t] + sd * w.mil_dn[t]) * sched.r_sub_dn[t])
        })
        .collect();

    let entities = s
        .aggregators
        .iter()
        .zip(&sched.entities)
        .map(|(a, e)| {
            let o = &a.offers;
            let mut r = EntityRevenue {
                id: a.id.clone(),
                class: a.class(),
                energy: 0.0,
                capacity: 0.0,
                mileage: 0.0,
                total: 0.0,
                gross_total: 0.0,
            };
            let mut sold = 0.0;
            for t in 0..nt {
                let (su, sd) = s.regulation.mileage_factors(t);
                let energy = match &a.kind {
                    AggregatorKind::Drag(d) => -d.blocks.iter().zip(&e.blocks).map(|(b, x)| b.price[t] * x[t]).sum::<f64>(),
                    AggregatorKind::Evcs(_) => -o.energy[t] * e.energy[t],
                    AggregatorKind::Esag(_) | AggregatorKind::Ddgag(_) => o.energy[t] * e.energy[t],
                };
                r.energy += h * energy;
                sold += h * energy.max(0.0);
                r.capacity += h * (o.cap_up[t] * e.cap_up[t] + o.cap_dn[t] * e.cap_dn[t]);
                r.mileage += h * (su * o.mil_up[t] * e.cap_up[t] + sd * o.mil_dn[t] * e.cap_dn[t]);
            }
            r.total = r.energy + r.capacity + r.mileage;
            r.gross_total = sold + r.capacity + r.mileage;
            r
        })
        .collect();

    Ok(RevenueReport { entities, dso_position })
}

/// A built model with its solver result and, when optimal, the decoded schedule.
#[derive(Clone, Debug)]
pub struct Solved {
    pub model: DsoModel,
    pub solution: MilpSolution,
    pub schedule: Option<Schedule>,
}

pub fn solve_scenario(s: &Scenario, opts: &SolveOptions) -> Result<Solved, AnalysisError> {
    let model = build(s)?;
    let solution = solve_milp(&model.problem, opts)?;
    let schedule = if solution.status == MilpStatus::Optimal { Some(decode(&model, &solution)?) } else { None };
    Ok(Solved { model, solution, schedule })
}

pub const SWEEP_CASES: u32 = 40;

/// Multiplier applied in sweep case `i`.
pub fn sweep_multiplier(i: u32) -> f64 {
    f64::from(i) / 10.0
}

/// Copy of `s` with the energy offer prices of `target` multiplied by `m`.
/// Demand response bids sit on its blocks, so those are scaled instead.
pub fn scale_energy_offers(s: &Scenario, target: &str, m: f64) -> Result<Scenario, AnalysisError> {
    let mut out = s.clone();
    let a = out.aggregators.iter_mut().find(|a| a.id == target).ok_or_else(|| AnalysisError::UnknownTarget(target.into()))?;
    a.offers.energy.iter_mut().for_each(|p| *p *= m);
    if let AggregatorKind::Drag(d) = &mut a.kind {
        for b in &mut d.blocks {
            b.price.iter_mut().for_each(|p| *p *= m);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepCase {
    pub i: u32,
    pub multiplier: f64,
    /// `None` when the case could not be built or solved at all.
    pub status: Option<MilpStatus>,
    pub objective: Option<f64>,
    pub revenue: Option<RevenueReport>,
    pub error: Option<String>,
}

impl SweepCase {
    pub fn is_optimal(&self) -> bool {
        self.status == Some(MilpStatus::Optimal)
    }
}

/// Solve one sweep case. Failures are recorded in the result.
pub fn sweep_case(s: &Scenario, target: &str, i: u32, opts: &SolveOptions) -> Result<SweepCase, AnalysisError> {
    let multiplier = sweep_multiplier(i);
    let scaled = scale_energy_offers(s, target, multiplier)?;
    let mut case = SweepCase { i, multiplier, status: None, objective: None, revenue: None, error: None };
    match solve_scenario(&scaled, opts) {
        Ok(solved) => {
            case.status = Some(solved.solution.status);
            if let Some(sched) = &solved.schedule {
                case.objective = Some(solved.solution.objective);
                case.revenue = Some(compute_revenue(sched, &scaled)?);
            }
        }
        Err(e) => case.error = Some(alloc::format!("{e}")),
    }
    Ok(case)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub target: String,
    pub cases: Vec<SweepCase>,
}

/// All forty cases, one after another.
pub fn run_sweep(s: &Scenario, target: &str, opts: &SolveOptions) -> Result<SweepResult, AnalysisError> {
    let cases = (1..=SWEEP_CASES).map(|i| sweep_case(s, target, i, opts)).collect::<Result<_, _>>()?;
    Ok(SweepResult { target: target.into(), cases })
}
