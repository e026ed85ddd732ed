//! Compiles a [`Scenario`] into the DSO coordination MILP and decodes
//! solver output back into a [`Schedule`].
//!
//! Columns are created once, with their box bounds, by
//! [`VariableRegistry::allocate`]. The row families are added afterwards by
//! the `add_*` functions, each of which only reads the registry.

mod constraints;
mod registry;
mod schedule;

use alloc::string::String;

use crate::model::{validate_scenario, Scenario, ValidationReport};
use crate::solver::{MilpProblem, MilpStatus};

pub use constraints::{
    add_aggregation_constraints, add_ddgag_constraints, add_drag_constraints, add_esag_constraints,
    add_evcs_constraints, add_network_constraints, build_objective, row_count,
};
pub use registry::{Var, VariableRegistry};
pub use schedule::{decode, decode_values, encode, residuals, EntitySchedule, Residuals, Schedule, StorageSchedule};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum FormulationError {
    #[error("scenario is invalid:\n{0}")]
    Validation(ValidationReport),
    #[error("branch {branch} does not join exactly one sending and one receiving bus")]
    InconsistentTopology { branch: u32 },
    #[error("solution has {got} values, the model has {expected} columns")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("solver finished with status {0:?}")]
    NonOptimalStatus(MilpStatus),
}

/// A compiled scenario: the problem, its column map and the scenario it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct DsoModel {
    pub problem: MilpProblem,
    pub registry: VariableRegistry,
    pub scenario: Scenario,
    pub fingerprint: [u8; 32],
}

impl DsoModel {
    /// Value of `v` in a raw column vector.
    pub fn value(&self, values: &[f64], v: Var) -> Option<f64> {
        self.registry.get(v).map(|c| values[c])
    }

    pub fn column_name(&self, col: usize) -> &str {
        &self.problem.col_names[col]
    }

    pub fn fingerprint_hex(&self) -> String {
        self.scenario.fingerprint_hex()
    }
}

/// Build the full problem. Identical scenarios give identical problems.
pub fn build(s: &Scenario) -> Result<DsoModel, FormulationError> {
    let report = validate_scenario(s);
    if !report.is_empty() {
        return Err(FormulationError::Validation(report));
    }
    let mut problem = MilpProblem::default();
    let registry = VariableRegistry::allocate(s, &mut problem);
    problem.objective = build_objective(s, &registry);
    add_drag_constraints(s, &registry, &mut problem);
    add_esag_constraints(s, &registry, &mut problem);
    add_evcs_constraints(s, &registry, &mut problem);
    add_ddgag_constraints(s, &registry, &mut problem);
    add_network_constraints(s, &registry, &mut problem)?;
    add_aggregation_constraints(s, &registry, &mut problem);
    Ok(DsoModel { problem, registry, scenario: s.clone(), fingerprint: s.fingerprint() })
}

#[cfg(test)]
mod tests;
