use alloc::vec;
use alloc::vec::Vec;

use super::factor::Factor;
use super::{MilpProblem, Relation, SolveOptions};

const PIVOT_TOL: f64 = 1e-9;
const DEGENERATE_STEP: f64 = 1e-12;
const STALL_LIMIT: usize = 60;
const MAX_VERIFY_ROUNDS: usize = 8;
const RESIDUAL_TOL: f64 = 1e-9;

/// Equality form `A x - s = 0` with bounds on both structural columns `x`
/// and the row activities `s` (one logical column per row).
///
/// Logical column `n + i` belongs to row `i` and has coefficient `-1` there
/// and nowhere else.
#[derive(Clone, Debug, PartialEq)]
pub struct LpStandardForm {
    n: usize,
    m: usize,
    col_start: Vec<usize>,
    row_index: Vec<usize>,
    values: Vec<f64>,
    cost: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl LpStandardForm {
    pub fn from_problem(p: &MilpProblem) -> Self {
        let n = p.num_cols();
        let m = p.num_rows();
        let mut counts = vec![0usize; n + 1];
        for c in &p.constraints {
            for &(j, _) in &c.terms {
                counts[j + 1] += 1;
            }
        }
        for j in 0..n {
            counts[j + 1] += counts[j];
        }
        let col_start = counts.clone();
        let nnz = col_start[n];
        let mut fill = counts;
        let mut row_index = vec![0; nnz];
        let mut values = vec![0.0; nnz];
        for (i, c) in p.constraints.iter().enumerate() {
            for &(j, a) in &c.terms {
                let k = fill[j];
                row_index[k] = i;
                values[k] = a;
                fill[j] += 1;
            }
        }
        let mut lower = p.lower.clone();
        let mut upper = p.upper.clone();
        for c in &p.constraints {
            let (l, u) = match c.relation {
                Relation::Le => (f64::NEG_INFINITY, c.rhs),
                Relation::Ge => (c.rhs, f64::INFINITY),
                Relation::Eq => (c.rhs, c.rhs),
            };
            lower.push(l);
            upper.push(u);
        }
        LpStandardForm { n, m, col_start, row_index, values, cost: p.objective.clone(), lower, upper }
    }

    pub fn num_structural(&self) -> usize {
        self.n
    }

    pub fn num_rows(&self) -> usize {
        self.m
    }

    /// Bounds of every column, structural first then logical.
    pub fn bounds(&self) -> (&[f64], &[f64]) {
        (&self.lower, &self.upper)
    }

    pub fn set_bounds(&mut self, col: usize, lower: f64, upper: f64) {
        self.lower[col] = lower;
        self.upper[col] = upper;
    }

    pub fn cost(&self) -> &[f64] {
        &self.cost
    }

    /// Nonzeros `(row, value)` of structural column `j`.
    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.col_start[j]..self.col_start[j + 1];
        self.row_index[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    fn dot(&self, j: usize, y: &[f64]) -> f64 {
        if j >= self.n {
            -y[j - self.n]
        } else {
            self.column(j).map(|(i, a)| a * y[i]).sum()
        }
    }

    fn scatter(&self, j: usize, out: &mut [f64]) {
        if j >= self.n {
            out[j - self.n] = -1.0;
        } else {
            for (i, a) in self.column(j) {
                out[i] = a;
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum State {
    Basic,
    AtLower,
    AtUpper,
    FreeZero,
}

/// A simplex basis that can seed a later solve of the same form with
/// different bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct LpBasis {
    head: Vec<usize>,
    at_upper: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpResult {
    pub status: LpStatus,
    /// Structural column values.
    pub values: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    /// Row multipliers `y = c_B B^-1` at termination.
    pub duals: Vec<f64>,
    pub basis: LpBasis,
}

pub fn solve_lp(lp: &LpStandardForm, opts: &SolveOptions) -> LpResult {
    Simplex::new(lp, &lp.lower, &lp.upper, opts, None).run()
}

/// Solve starting from `basis`, typically the optimal basis of a related problem.
pub fn solve_lp_from(lp: &LpStandardForm, opts: &SolveOptions, basis: &LpBasis) -> LpResult {
    Simplex::new(lp, &lp.lower, &lp.upper, opts, Some(basis)).run()
}

pub(crate) fn solve_with_bounds(
    lp: &LpStandardForm,
    lower: &[f64],
    upper: &[f64],
    opts: &SolveOptions,
    basis: Option<&LpBasis>,
) -> LpResult {
    Simplex::new(lp, lower, upper, opts, basis).run()
}

struct Simplex<'a> {
    lp: &'a LpStandardForm,
    opts: &'a SolveOptions,
    lower: &'a [f64],
    upper: &'a [f64],
    head: Vec<usize>,
    state: Vec<State>,
    x: Vec<f64>,
    factor: Factor,
    iterations: usize,
}

struct Step {
    theta: f64,
    leaving: Option<(usize, State)>,
}

impl<'a> Simplex<'a> {
    fn new(
        lp: &'a LpStandardForm,
        lower: &'a [f64],
        upper: &'a [f64],
        opts: &'a SolveOptions,
        basis: Option<&LpBasis>,
    ) -> Self {
        let total = lp.n + lp.m;
        let mut state = vec![State::AtLower; total];
        let head: Vec<usize> = match basis {
            Some(b) if b.head.len() == lp.m && b.at_upper.len() == total => {
                for (j, s) in state.iter_mut().enumerate() {
                    if b.at_upper[j] {
                        *s = State::AtUpper;
                    }
                }
                b.head.clone()
            }
            _ => (lp.n..total).collect(),
        };
        for &j in &head {
            state[j] = State::Basic;
        }
        let mut s = Simplex {
            lp,
            opts,
            lower,
            upper,
            head,
            state,
            x: vec![0.0; total],
            factor: Factor::default(),
            iterations: 0,
        };
        for j in 0..total {
            if s.state[j] != State::Basic {
                s.place_nonbasic(j, s.state[j]);
            }
        }
        s.refactor();
        s
    }

    /// Put nonbasic `j` on the preferred bound, falling back to whichever is finite.
    fn place_nonbasic(&mut self, j: usize, preferred: State) {
        let (l, u) = (self.lower[j], self.upper[j]);
        let st = match preferred {
            State::AtUpper if u.is_finite() => State::AtUpper,
            _ if l.is_finite() => State::AtLower,
            _ if u.is_finite() => State::AtUpper,
            _ => State::FreeZero,
        };
        self.state[j] = st;
        self.x[j] = match st {
            State::AtLower => l,
            State::AtUpper => u,
            _ => 0.0,
        };
    }

    fn refactor(&mut self) {
        let lp = self.lp;
        let (factor, re) = Factor::reinvert(lp.m, lp.n, &self.head, |j, out| out.extend(lp.column(j)));
        self.factor = factor;
        self.head = re.head;
        for &j in &self.head {
            self.state[j] = State::Basic;
        }
        for j in re.rejected {
            let (l, u, v) = (self.lower[j], self.upper[j], self.x[j]);
            let near_upper = u.is_finite() && (!l.is_finite() || (v - u).abs() < (v - l).abs());
            self.place_nonbasic(j, if near_upper { State::AtUpper } else { State::AtLower });
        }
        self.recompute_basic();
    }

    fn recompute_basic(&mut self) {
        let lp = self.lp;
        let mut rhs = vec![0.0; lp.m];
        for (j, &st) in self.state.iter().enumerate() {
            if st == State::Basic || self.x[j] == 0.0 {
                continue;
            }
            let v = self.x[j];
            if j >= lp.n {
                rhs[j - lp.n] += v;
            } else {
                for (i, a) in lp.column(j) {
                    rhs[i] -= a * v;
                }
            }
        }
        self.factor.ftran(&mut rhs);
        for (pos, &j) in self.head.iter().enumerate() {
            self.x[j] = rhs[pos];
        }
    }

    /// Largest `|a_i x - s_i|` over all rows.
    fn row_residual(&self) -> f64 {
        let lp = self.lp;
        let mut r: Vec<f64> = self.x[lp.n..].iter().map(|s| -s).collect();
        for j in 0..lp.n {
            let v = self.x[j];
            if v != 0.0 {
                for (i, a) in lp.column(j) {
                    r[i] += a * v;
                }
            }
        }
        r.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn infeasibility(&self, j: usize) -> f64 {
        let v = self.x[j];
        (self.lower[j] - v).max(v - self.upper[j]).max(0.0)
    }

    fn primal_infeasible(&self) -> bool {
        let tol = self.opts.feasibility_tol;
        self.head.iter().any(|&j| self.infeasibility(j) > tol)
    }

    fn run(mut self) -> LpResult {
        let tol = self.opts.feasibility_tol;
        let mut stall = 0usize;
        let mut verify_rounds = 0usize;
        let m = self.lp.m;
        let mut y = vec![0.0; m];
        let mut alpha = vec![0.0; m];

        loop {
            if self.iterations >= self.opts.max_lp_iterations {
                return self.finish(LpStatus::IterationLimit, &y);
            }
            if self.factor.updates() >= self.opts.refactor_interval {
                self.refactor();
            }

            let phase_one = self.primal_infeasible();
            for (pos, &j) in self.head.iter().enumerate() {
                y[pos] = if phase_one {
                    let v = self.x[j];
                    if v < self.lower[j] - tol {
                        -1.0
                    } else if v > self.upper[j] + tol {
                        1.0
                    } else {
                        0.0
                    }
                } else if j < self.lp.n {
                    self.lp.cost[j]
                } else {
                    0.0
                };
            }
            self.factor.btran(&mut y);

            let bland = stall >= STALL_LIMIT;
            let Some((q, dir)) = self.price(&y, phase_one, bland) else {
                // Confirm on a fresh factorisation unless the current point
                // already satisfies the rows to working precision.
                let stale = self.factor.updates() > 0 && self.row_residual() > RESIDUAL_TOL;
                if stale && verify_rounds < MAX_VERIFY_ROUNDS {
                    verify_rounds += 1;
                    self.refactor();
                    continue;
                }
                let status = if phase_one { LpStatus::Infeasible } else { LpStatus::Optimal };
                return self.finish(status, &y);
            };

            alpha.iter_mut().for_each(|v| *v = 0.0);
            self.lp.scatter(q, &mut alpha);
            self.factor.ftran(&mut alpha);

            let step = self.ratio_test(q, dir, &alpha, bland);
            if !step.theta.is_finite() {
                if phase_one {
                    // Cannot happen in exact arithmetic; rebuild and retry.
                    verify_rounds += 1;
                    if verify_rounds > MAX_VERIFY_ROUNDS {
                        return self.finish(LpStatus::Infeasible, &y);
                    }
                    self.refactor();
                    continue;
                }
                return self.finish(LpStatus::Unbounded, &y);
            }

            let theta = step.theta;
            if theta != 0.0 {
                self.x[q] += dir * theta;
                for (pos, &j) in self.head.iter().enumerate() {
                    if alpha[pos] != 0.0 {
                        self.x[j] -= dir * theta * alpha[pos];
                    }
                }
            }
            match step.leaving {
                None => {
                    let to = if dir > 0.0 { State::AtUpper } else { State::AtLower };
                    self.place_nonbasic(q, to);
                }
                Some((pos, to)) => {
                    let out = self.head[pos];
                    self.place_nonbasic(out, to);
                    self.head[pos] = q;
                    self.state[q] = State::Basic;
                    self.factor.update(pos, &alpha);
                }
            }
            self.iterations += 1;
            if theta <= DEGENERATE_STEP {
                stall += 1;
            } else {
                stall = 0;
            }
        }
    }

    /// Pick an entering column and its direction (+1 increase, -1 decrease).
    fn price(&self, y: &[f64], phase_one: bool, bland: bool) -> Option<(usize, f64)> {
        let dtol = self.opts.optimality_tol;
        let n = self.lp.n;
        let mut best: Option<(usize, f64)> = None;
        let mut best_score = 0.0;
        for (j, &st) in self.state.iter().enumerate() {
            if st == State::Basic || self.lower[j] == self.upper[j] {
                continue;
            }
            let c = if phase_one || j >= n { 0.0 } else { self.lp.cost[j] };
            let d = c - self.lp.dot(j, y);
            let dir = match st {
                State::AtLower if d < -dtol => 1.0,
                State::AtUpper if d > dtol => -1.0,
                State::FreeZero if d.abs() > dtol => -d.signum(),
                _ => continue,
            };
            if bland {
                return Some((j, dir));
            }
            if d.abs() > best_score {
                best_score = d.abs();
                best = Some((j, dir));
            }
        }
        best
    }

    /// Two-pass (Harris) ratio test; plain minimum-ratio with lowest-index
    /// ties when `bland` is set.
    fn ratio_test(&self, q: usize, dir: f64, alpha: &[f64], bland: bool) -> Step {
        let tol = self.opts.feasibility_tol;
        let relax = if bland { 0.0 } else { tol };
        let flip = self.upper[q] - self.lower[q];

        // (pos, exact ratio, relaxed ratio, bound state on leaving)
        let mut cands: Vec<(usize, f64, f64, State)> = Vec::new();
        for (pos, &a) in alpha.iter().enumerate() {
            if a.abs() <= PIVOT_TOL {
                continue;
            }
            let j = self.head[pos];
            let rate = -dir * a;
            let (v, l, u) = (self.x[j], self.lower[j], self.upper[j]);
            let hit = if rate < 0.0 {
                if v > u + tol {
                    Some((u, State::AtUpper))
                } else if v < l - tol || !l.is_finite() {
                    None
                } else {
                    Some((l, State::AtLower))
                }
            } else if v < l - tol {
                Some((l, State::AtLower))
            } else if v > u + tol || !u.is_finite() {
                None
            } else {
                Some((u, State::AtUpper))
            };
            if let Some((bound, st)) = hit {
                let gap = (v - bound).abs();
                let exact = gap / rate.abs();
                let relaxed = (gap + relax) / rate.abs();
                cands.push((pos, exact, relaxed, st));
            }
        }

        if bland {
            let mut best: Option<(usize, f64, State)> = None;
            for &(pos, t, _, st) in &cands {
                let better = match best {
                    None => true,
                    Some((bp, bt, _)) => t < bt || (t == bt && self.head[pos] < self.head[bp]),
                };
                if better {
                    best = Some((pos, t, st));
                }
            }
            return match best {
                Some((_, t, _)) if flip <= t => Step { theta: flip, leaving: None },
                Some((pos, t, st)) => Step { theta: t.max(0.0), leaving: Some((pos, st)) },
                None => Step { theta: flip, leaving: None },
            };
        }

        let tmax = cands.iter().map(|c| c.2).fold(f64::INFINITY, f64::min);
        if flip <= tmax {
            return Step { theta: flip, leaving: None };
        }
        let mut best: Option<(usize, f64, State)> = None;
        let mut best_abs = 0.0;
        for &(pos, t, _, st) in &cands {
            if t <= tmax && alpha[pos].abs() > best_abs {
                best_abs = alpha[pos].abs();
                best = Some((pos, t, st));
            }
        }
        match best {
            Some((pos, t, st)) => Step { theta: t.max(0.0), leaving: Some((pos, st)) },
            None => Step { theta: f64::INFINITY, leaving: None },
        }
    }

    fn finish(self, status: LpStatus, y: &[f64]) -> LpResult {
        let n = self.lp.n;
        let values = self.x[..n].to_vec();
        let objective = values.iter().zip(&self.lp.cost).map(|(x, c)| x * c).sum();
        let at_upper = self.state.iter().map(|s| *s == State::AtUpper).collect();
        LpResult {
            status,
            values,
            objective,
            iterations: self.iterations,
            duals: y.to_vec(),
            basis: LpBasis { head: self.head, at_upper },
        }
    }
}
