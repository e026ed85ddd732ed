//! Bounded-variable two-phase revised simplex and best-first branch-and-bound.
//!
//! The engine is sized for problems with a few thousand columns and a few
//! dozen binaries. Rows are stored sparsely; the basis is kept as a product
//! form of the inverse and rebuilt every [`SolveOptions::refactor_interval`]
//! pivots.

mod bnb;
mod factor;
mod lp;
pub mod mps;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use bnb::{solve_milp, MilpSolution, MilpStatus, NodeEvent, SolveError};
pub use lp::{solve_lp, solve_lp_from, LpBasis, LpResult, LpStandardForm, LpStatus};

/// Sense of a linear row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

/// One sparse row `sum(coef * x[col]) <relation> rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub terms: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(j, a)| a * values[j]).sum()
    }

    /// Amount by which `values` violates this row (0 when satisfied).
    pub fn violation(&self, values: &[f64]) -> f64 {
        let lhs = self.activity(values);
        match self.relation {
            Relation::Le => (lhs - self.rhs).max(0.0),
            Relation::Ge => (self.rhs - lhs).max(0.0),
            Relation::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// A minimisation MILP over bounded columns with optional 0/1 integrality.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MilpProblem {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub integral: Vec<bool>,
    pub col_names: Vec<String>,
    pub row_names: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ProblemError {
    #[error("row {row} references column {col} but the problem has {ncols} columns")]
    BadColumn { row: usize, col: usize, ncols: usize },
    #[error("column {col} has lower bound {lower} above upper bound {upper}")]
    CrossedBounds { col: usize, lower: f64, upper: f64 },
    #[error("column {col} has a non-finite objective coefficient")]
    NonFiniteObjective { col: usize },
    #[error("row {row} has a non-finite coefficient or right-hand side")]
    NonFiniteRow { row: usize },
    #[error("integral column {col} is not bounded within [0, 1]")]
    NonBinaryIntegral { col: usize },
    #[error("column vectors have inconsistent lengths")]
    Shape,
}

impl MilpProblem {
    pub fn num_cols(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.constraints.len()
    }

    pub fn add_column(&mut self, name: String, lower: f64, upper: f64, cost: f64, integral: bool) -> usize {
        self.objective.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        self.integral.push(integral);
        self.col_names.push(name);
        self.objective.len() - 1
    }

    pub fn add_row(&mut self, name: String, terms: Vec<(usize, f64)>, relation: Relation, rhs: f64) -> usize {
        self.constraints.push(Constraint { terms, relation, rhs });
        self.row_names.push(name);
        self.constraints.len() - 1
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.iter().zip(values).map(|(c, x)| c * x).sum()
    }

    /// Largest row or bound violation of `values`.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let rows = self.constraints.iter().map(|c| c.violation(values));
        let bounds = values
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&x, (&l, &u))| (l - x).max(x - u).max(0.0));
        rows.chain(bounds).fold(0.0, f64::max)
    }

    pub fn check(&self) -> Result<(), ProblemError> {
        let n = self.num_cols();
        if self.lower.len() != n || self.upper.len() != n || self.integral.len() != n {
            return Err(ProblemError::Shape);
        }
        for (col, &c) in self.objective.iter().enumerate() {
            if !c.is_finite() {
                return Err(ProblemError::NonFiniteObjective { col });
            }
        }
        for col in 0..n {
            let (lower, upper) = (self.lower[col], self.upper[col]);
            if lower > upper || lower.is_nan() || upper.is_nan() {
                return Err(ProblemError::CrossedBounds { col, lower, upper });
            }
            if self.integral[col] && (lower < 0.0 || upper > 1.0) {
                return Err(ProblemError::NonBinaryIntegral { col });
            }
        }
        for (row, c) in self.constraints.iter().enumerate() {
            if !c.rhs.is_finite() {
                return Err(ProblemError::NonFiniteRow { row });
            }
            for &(col, a) in &c.terms {
                if col >= n {
                    return Err(ProblemError::BadColumn { row, col, ncols: n });
                }
                if !a.is_finite() {
                    return Err(ProblemError::NonFiniteRow { row });
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeOrder {
    BestFirst,
    DepthFirst,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchRule {
    MostFractional,
    FirstFractional,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    pub feasibility_tol: f64,
    pub optimality_tol: f64,
    pub integrality_tol: f64,
    pub relative_gap: f64,
    pub max_nodes: usize,
    pub max_lp_iterations: usize,
    pub refactor_interval: usize,
    pub node_order: NodeOrder,
    pub branch_rule: BranchRule,
    /// Record one [`NodeEvent`] per explored node.
    pub trace: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            feasibility_tol: 1e-7,
            optimality_tol: 1e-9,
            integrality_tol: 1e-6,
            relative_gap: 1e-6,
            max_nodes: 100_000,
            max_lp_iterations: 200_000,
            refactor_interval: 50,
            node_order: NodeOrder::BestFirst,
            branch_rule: BranchRule::MostFractional,
            trace: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum OptionsError {
    #[error("tolerance `{0}` must be positive and finite")]
    Tolerance(&'static str),
    #[error("refactor interval must be at least 1")]
    RefactorInterval,
}

impl SolveOptions {
    pub fn check(&self) -> Result<(), OptionsError> {
        let tols = [
            ("feasibility_tol", self.feasibility_tol),
            ("optimality_tol", self.optimality_tol),
            ("integrality_tol", self.integrality_tol),
            ("relative_gap", self.relative_gap),
        ];
        for (name, v) in tols {
            if !(v > 0.0 && v.is_finite()) {
                return Err(OptionsError::Tolerance(name));
            }
        }
        if self.refactor_interval == 0 {
            return Err(OptionsError::RefactorInterval);
        }
        Ok(())
    }
}
