//! The offer-price sweep spread over worker threads.

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use dso_core::analysis::{sweep_case, AnalysisError, SweepCase, SweepResult, SWEEP_CASES};
use dso_core::model::Scenario;
use dso_core::solver::SolveOptions;

use crate::export::{csv_bytes, num, ExportError};

/// Worker count: `DSO_THREADS` if set to a positive integer, otherwise the
/// number of available processors.
pub fn thread_count() -> usize {
    std::env::var("DSO_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Solve the given cases on up to `threads` workers. Results come back in
/// the order of `cases`.
pub fn run_cases(
    s: &Scenario,
    target: &str,
    cases: &[u32],
    opts: &SolveOptions,
    threads: usize,
) -> Result<Vec<SweepCase>, AnalysisError> {
    if s.aggregator(target).is_none() {
        return Err(AnalysisError::UnknownTarget(target.into()));
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<SweepCase, AnalysisError>>>> = Mutex::new(vec![None; cases.len()]);
    let workers = threads.clamp(1, cases.len().max(1));
    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= cases.len() {
                    break;
                }
                let r = sweep_case(s, target, cases[k], opts);
                slots.lock().expect("no worker panicked")[k] = Some(r);
            });
        }
    });
    slots.into_inner().expect("no worker panicked").into_iter().map(|r| r.expect("every case ran")).collect()
}

/// All forty cases on [`thread_count`] workers.
pub fn run_sweep_parallel(s: &Scenario, target: &str, opts: &SolveOptions) -> Result<SweepResult, AnalysisError> {
    let cases: Vec<u32> = (1..=SWEEP_CASES).collect();
    let cases = run_cases(s, target, &cases, opts, thread_count())?;
    Ok(SweepResult { target: target.into(), cases })
}

pub const SWEEP_HEADER: [&str; 9] =
    ["i", "multiplier", "entity", "energy_$", "capacity_$", "mileage_$", "total_$", "gross_total_$", "status"];

/// One row per case for the swept aggregator.
pub fn sweep_rows(r: &SweepResult) -> Vec<Vec<String>> {
    r.cases
        .iter()
        .map(|c| {
            let status = match (&c.status, &c.error) {
                (Some(st), _) => format!("{st:?}"),
                (None, Some(_)) => "Error".into(),
                (None, None) => "Unknown".into(),
            };
            let e = c.revenue.as_ref().and_then(|rev| rev.entity(&r.target));
            let cell = |f: fn(&dso_core::analysis::EntityRevenue) -> f64| e.map(|e| num(f(e))).unwrap_or_default();
            vec![
                c.i.to_string(),
                num(c.multiplier),
                r.target.clone(),
                cell(|e| e.energy),
                cell(|e| e.capacity),
                cell(|e| e.mileage),
                cell(|e| e.total),
                cell(|e| e.gross_total),
                status,
            ]
        })
        .collect()
}

pub fn sweep_csv(r: &SweepResult) -> Result<Vec<u8>, csv::Error> {
    csv_bytes(&SWEEP_HEADER, sweep_rows(r))
}

pub fn write_sweep_csv(r: &SweepResult, path: &Path) -> Result<(), ExportError> {
    let bytes = sweep_csv(r)?;
    std::fs::write(path, bytes).map_err(|source| ExportError::Io { path: path.display().to_string(), source })
}
