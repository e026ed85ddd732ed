//! Random instance generators and brute-force oracles for the solver tests.
//!
//! Nothing here calls branch-and-bound. The LP oracle enumerates vertices with
//! its own dense elimination; the MILP oracle enumerates every binary
//! assignment and solves each residual LP on its own.

use dso_core::solver::{solve_lp, LpStandardForm, LpStatus, MilpProblem, Relation, SolveOptions};
use rand::Rng;

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Dense bounded LP with `rows` inequality rows over `cols` columns in
/// `[0, u]`, feasible by construction.
pub fn random_lp<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> MilpProblem {
    let mut p = MilpProblem::default();
    let mut x0 = Vec::with_capacity(cols);
    for j in 0..cols {
        let u = rng.gen_range(1..=5) as f64;
        x0.push(rng.gen_range(0.0..=u));
        p.add_column(format!("x{j}"), 0.0, u, round2(rng.gen_range(-5.0..5.0)), false);
    }
    for i in 0..rows {
        let terms: Vec<(usize, f64)> = (0..cols).map(|j| (j, round2(rng.gen_range(-1.0..1.0)))).collect();
        let act: f64 = terms.iter().map(|&(j, a)| a * x0[j]).sum();
        let slack = round2(rng.gen_range(0.0..2.0));
        let (rel, rhs) = if rng.gen_bool(0.7) { (Relation::Le, act + slack) } else { (Relation::Ge, act - slack) };
        p.add_row(format!("r{i}"), terms, rel, rhs);
    }
    p
}

/// Solve `a x = b` (n x n, row-major) by Gaussian elimination; `None` if singular.
fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[p][k].abs() < 1e-10 {
            return None;
        }
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            if f != 0.0 {
                for j in k..n {
                    a[i][j] -= f * a[k][j];
                }
                b[i] -= f * b[k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    Some(x)
}

/// Minimum objective over all vertices of a problem with finite column bounds.
///
/// Every `n`-subset of the hyperplanes {rows, x_j = l_j, x_j = u_j} is solved;
/// feasible intersections are vertices. Returns `None` when no vertex is feasible.
pub fn vertex_enumeration(p: &MilpProblem) -> Option<f64> {
    let n = p.num_cols();
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    for c in &p.constraints {
        let mut a = vec![0.0; n];
        for &(j, v) in &c.terms {
            a[j] += v;
        }
        planes.push((a, c.rhs));
    }
    for j in 0..n {
        assert!(p.lower[j].is_finite() && p.upper[j].is_finite(), "vertex oracle needs finite bounds");
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        planes.push((e.clone(), p.lower[j]));
        planes.push((e, p.upper[j]));
    }
    let mut best: Option<f64> = None;
    let mut idx: Vec<usize> = (0..n).collect();
    let total = planes.len();
    loop {
        let a = idx.iter().map(|&i| planes[i].0.clone()).collect();
        let b = idx.iter().map(|&i| planes[i].1).collect();
        if let Some(x) = dense_solve(a, b) {
            if p.max_violation(&x) <= 1e-9 {
                let obj = p.objective_value(&x);
                best = Some(best.map_or(obj, |b: f64| b.min(obj)));
            }
        }
        // next combination
        let mut k = n;
        loop {
            if k == 0 {
                return best;
            }
            k -= 1;
            if idx[k] < total - n + k {
                idx[k] += 1;
                for l in k + 1..n {
                    idx[l] = idx[l - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Sparse MILP with `binaries` 0/1 columns followed by `continuous` bounded
/// columns, feasible by construction at a random integral point.
pub fn random_milp<R: Rng>(rng: &mut R, binaries: usize, continuous: usize, rows: usize) -> MilpProblem {
    let mut p = MilpProblem::default();
    let mut x0 = Vec::new();
    for j in 0..binaries {
        x0.push(if rng.gen_bool(0.5) { 1.0 } else { 0.0 });
        p.add_column(format!("b{j}"), 0.0, 1.0, round2(rng.gen_range(-10.0..10.0)), true);
    }
    for j in 0..continuous {
        let u = rng.gen_range(1..=6) as f64;
        let l = if rng.gen_bool(0.3) { -u } else { 0.0 };
        x0.push(rng.gen_range(l..=u));
        p.add_column(format!("x{j}"), l, u, round2(rng.gen_range(-5.0..5.0)), false);
    }
    let n = binaries + continuous;
    for i in 0..rows {
        let mut terms = Vec::new();
        for j in 0..n {
            if rng.gen_bool(0.4) {
                terms.push((j, round2(rng.gen_range(-3.0..3.0))));
            }
        }
        if terms.is_empty() {
            terms.push((rng.gen_range(0..n), 1.0));
        }
        let act: f64 = terms.iter().map(|&(j, a)| a * x0[j]).sum();
        let slack = round2(rng.gen_range(0.0..3.0));
        let roll: f64 = rng.gen();
        let (rel, rhs) = if roll < 0.1 {
            (Relation::Eq, act)
        } else if roll < 0.65 {
            (Relation::Le, act + slack)
        } else {
            (Relation::Ge, act - slack)
        };
        p.add_row(format!("r{i}"), terms, rel, rhs);
    }
    p
}

/// Best objective over all assignments of the integral columns, each residual
/// LP (binaries substituted into the right-hand sides) solved on its own.
pub fn enumerate_binaries(p: &MilpProblem, opts: &SolveOptions) -> Option<f64> {
    let ints: Vec<usize> = (0..p.num_cols()).filter(|&j| p.integral[j]).collect();
    let conts: Vec<usize> = (0..p.num_cols()).filter(|&j| !p.integral[j]).collect();
    let mut pos = vec![usize::MAX; p.num_cols()];
    for (k, &j) in conts.iter().enumerate() {
        pos[j] = k;
    }
    assert!(ints.len() <= 20);
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << ints.len()) {
        let mut fixed = vec![0.0; p.num_cols()];
        let mut constant = 0.0;
        let mut ok = true;
        for (k, &j) in ints.iter().enumerate() {
            let v = ((mask >> k) & 1) as f64;
            if v < p.lower[j] || v > p.upper[j] {
                ok = false;
            }
            fixed[j] = v;
            constant += p.objective[j] * v;
        }
        if !ok {
            continue;
        }
        let mut r = MilpProblem::default();
        for &j in &conts {
            r.add_column(String::new(), p.lower[j], p.upper[j], p.objective[j], false);
        }
        let mut trivially_infeasible = false;
        for c in &p.constraints {
            let shift: f64 = c.terms.iter().filter(|(j, _)| p.integral[*j]).map(|&(j, a)| a * fixed[j]).sum();
            let terms: Vec<(usize, f64)> =
                c.terms.iter().filter(|(j, _)| !p.integral[*j]).map(|&(j, a)| (pos[j], a)).collect();
            let rhs = c.rhs - shift;
            if terms.is_empty() {
                let bad = match c.relation {
                    Relation::Le => rhs < -1e-9,
                    Relation::Ge => rhs > 1e-9,
                    Relation::Eq => rhs.abs() > 1e-9,
                };
                trivially_infeasible |= bad;
                continue;
            }
            r.add_row(String::new(), terms, c.relation, rhs);
        }
        if trivially_infeasible {
            continue;
        }
        let obj = if conts.is_empty() {
            0.0
        } else {
            let lp = solve_lp(&LpStandardForm::from_problem(&r), opts);
            match lp.status {
                LpStatus::Optimal => lp.objective,
                LpStatus::Infeasible => continue,
                s => panic!("residual LP ended with {s:?}"),
            }
        };
        let total = obj + constant;
        best = Some(best.map_or(total, |b: f64| b.min(total)));
    }
    best
}
