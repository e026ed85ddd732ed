//! Result files: `schedule.csv`, `network.csv`, `revenue.csv` and `solve.json`.

use std::fs;
use std::path::Path;
use std::time::Duration;

use dso_core::analysis::{compute_revenue, AnalysisError, RevenueReport, Solved};
use dso_core::formulation::{residuals, Schedule};
use dso_core::model::Scenario;
use dso_core::solver::{MilpStatus, SolveOptions};
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum ExportError {
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("schedule fingerprint does not match the scenario")]
    Stale,
}

/// Everything written for one solve.
#[derive(Clone, Debug)]
pub struct ResultBundle {
    pub scenario: Scenario,
    pub options: SolveOptions,
    pub status: MilpStatus,
    pub objective: f64,
    pub best_bound: f64,
    pub gap: f64,
    pub nodes: usize,
    pub lp_iterations: usize,
    /// Left out of `solve.json` when `None`, which keeps reruns byte-identical.
    pub wall_time: Option<Duration>,
    pub schedule: Option<Schedule>,
    pub revenue: Option<RevenueReport>,
    pub max_residual: Option<f64>,
}

impl ResultBundle {
    pub fn from_solved(solved: &Solved, options: SolveOptions, wall_time: Option<Duration>) -> Result<Self, AnalysisError> {
        let s = &solved.model.scenario;
        let revenue = solved.schedule.as_ref().map(|sched| compute_revenue(sched, s)).transpose()?;
        let max_residual = solved.schedule.as_ref().map(|sched| residuals(&solved.model, sched).max());
        let sol = &solved.solution;
        Ok(ResultBundle {
            scenario: s.clone(),
            options,
            status: sol.status,
            objective: sol.objective,
            best_bound: sol.best_bound,
            gap: sol.gap,
            nodes: sol.nodes_explored,
            lp_iterations: sol.lp_iterations,
            wall_time,
            schedule: solved.schedule.clone(),
            revenue,
            max_residual,
        })
    }
}

/// Decimal text for a CSV cell; negative zero is written as `0`.
pub fn num(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else {
        format!("{v}")
    }
}

/// CSV text with a header row and `\n` line ends.
pub fn csv_bytes(header: &[&str], rows: Vec<Vec<String>>) -> Result<Vec<u8>, csv::Error> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    Ok(w.into_inner().expect("writing to memory cannot fail"))
}

fn write_csv(path: &Path, header: &[&str], rows: Vec<Vec<String>>) -> Result<(), ExportError> {
    let bytes = csv_bytes(header, rows)?;
    fs::write(path, bytes).map_err(|source| ExportError::Io { path: path.display().to_string(), source })
}

pub const SCHEDULE_HEADER: [&str; 7] = ["t", "entity", "energy_MW", "cap_up_MW", "cap_dn_MW", "charge_MWh", "mode"];
pub const NETWORK_HEADER: [&str; 6] = ["t", "element", "id", "Pl_MW", "Ql_MVAr", "V_pu"];
pub const REVENUE_HEADER: [&str; 7] = ["entity", "class", "energy_$", "capacity_$", "mileage_$", "total_$", "gross_total_$"];

/// Rows of `schedule.csv`: the substation first, then each aggregator.
pub fn schedule_rows(s: &Schedule) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for (t, hour) in s.hours.iter().enumerate() {
        rows.push(vec![
            hour.to_string(),
            "substation".into(),
            num(s.p_sub[t]),
            num(s.r_sub_up[t]),
            num(s.r_sub_dn[t]),
            String::new(),
            String::new(),
        ]);
    }
    for e in &s.entities {
        for (t, hour) in s.hours.iter().enumerate() {
            let (charge, mode) = match (&e.storage, e.ev_enabled) {
                (Some(st), _) => (num(st.charge[t]), if st.discharging[t] { "discharge" } else { "charge" }.to_string()),
                (None, Some(on)) => (String::new(), if on { "on" } else { "off" }.to_string()),
                _ => (String::new(), String::new()),
            };
            rows.push(vec![hour.to_string(), e.id.clone(), num(e.energy[t]), num(e.cap_up[t]), num(e.cap_dn[t]), charge, mode]);
        }
    }
    rows
}

pub fn network_rows(s: &Schedule, sc: &Scenario) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for (t, hour) in s.hours.iter().enumerate() {
        for (j, br) in sc.network.branches.iter().enumerate() {
            rows.push(vec![hour.to_string(), "branch".into(), br.id.to_string(), num(s.pl[j][t]), num(s.ql[j][t]), String::new()]);
        }
        for (n, bus) in sc.network.buses.iter().enumerate() {
            rows.push(vec![hour.to_string(), "bus".into(), bus.id.to_string(), String::new(), String::new(), num(s.v[n][t])]);
        }
    }
    rows
}

pub fn revenue_rows(r: &RevenueReport) -> Vec<Vec<String>> {
    r.entities
        .iter()
        .map(|e| {
            vec![
                e.id.clone(),
                e.class.as_str().into(),
                num(e.energy),
                num(e.capacity),
                num(e.mileage),
                num(e.total),
                num(e.gross_total),
            ]
        })
        .collect()
}

#[derive(Serialize)]
struct OptionsJson {
    feasibility_tol: f64,
    optimality_tol: f64,
    integrality_tol: f64,
    relative_gap: f64,
    max_nodes: usize,
    max_lp_iterations: usize,
    refactor_interval: usize,
    node_order: String,
    branch_rule: String,
}

#[derive(Serialize)]
struct SolveJson {
    status: String,
    objective: Option<f64>,
    best_bound: f64,
    gap: Option<f64>,
    nodes: usize,
    lp_iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time_s: Option<f64>,
    max_residual: Option<f64>,
    dso_wholesale_income: Option<f64>,
    dso_surplus: Option<f64>,
    scenario_sha256: String,
    options: OptionsJson,
}

pub fn solve_json(b: &ResultBundle) -> String {
    let o = &b.options;
    let optimal = b.status == MilpStatus::Optimal;
    let doc = SolveJson {
        status: format!("{:?}", b.status),
        objective: b.objective.is_finite().then_some(b.objective),
        best_bound: b.best_bound,
        gap: b.gap.is_finite().then_some(b.gap),
        nodes: b.nodes,
        lp_iterations: b.lp_iterations,
        wall_time_s: b.wall_time.map(|d| d.as_secs_f64()),
        max_residual: b.max_residual,
        dso_wholesale_income: b.revenue.as_ref().filter(|_| optimal).map(|r| r.dso_total()),
        dso_surplus: b.revenue.as_ref().filter(|_| optimal).map(|r| r.dso_surplus()),
        scenario_sha256: b.scenario.fingerprint_hex(),
        options: OptionsJson {
            feasibility_tol: o.feasibility_tol,
            optimality_tol: o.optimality_tol,
            integrality_tol: o.integrality_tol,
            relative_gap: o.relative_gap,
            max_nodes: o.max_nodes,
            max_lp_iterations: o.max_lp_iterations,
            refactor_interval: o.refactor_interval,
            node_order: format!("{:?}", o.node_order),
            branch_rule: format!("{:?}", o.branch_rule),
        },
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("summary serializes");
    out.push('\n');
    out
}

/// Write the four result files into `dir`, creating it if needed. Without
/// a schedule only `solve.json` is written.
pub fn export_results(b: &ResultBundle, dir: &Path) -> Result<(), ExportError> {
    let io = |path: &Path| {
        let path = path.display().to_string();
        move |source| ExportError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    if let Some(sched) = &b.schedule {
        if sched.fingerprint != b.scenario.fingerprint() {
            return Err(ExportError::Stale);
        }
        write_csv(&dir.join("schedule.csv"), &SCHEDULE_HEADER, schedule_rows(sched))?;
        write_csv(&dir.join("network.csv"), &NETWORK_HEADER, network_rows(sched, &b.scenario))?;
    }
    if let Some(r) = &b.revenue {
        write_csv(&dir.join("revenue.csv"), &REVENUE_HEADER, revenue_rows(r))?;
    }
    let path = dir.join("solve.json");
    fs::write(&path, solve_json(b)).map_err(io(&path))
}

