use alloc::collections::BinaryHeap;
use alloc::rc::Rc;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::lp::{solve_with_bounds, LpBasis, LpStandardForm, LpStatus};
use super::{BranchRule, MilpProblem, NodeOrder, OptionsError, ProblemError, SolveOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MilpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Node budget exhausted; the incumbent (if any) and gap are reported.
    NodeLimit,
    /// A node relaxation hit the simplex iteration cap.
    IterationLimit,
}

/// One explored node, recorded when [`SolveOptions::trace`] is set.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeEvent {
    pub depth: usize,
    /// Relaxation bound inherited from the parent (`-inf` at the root).
    pub parent_bound: f64,
    /// This node's relaxation objective, `None` if infeasible.
    pub lp_bound: Option<f64>,
    /// Incumbent objective after processing the node.
    pub incumbent: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MilpSolution {
    pub status: MilpStatus,
    /// Incumbent values; empty when no integer-feasible point was found.
    pub values: Vec<f64>,
    pub objective: f64,
    pub best_bound: f64,
    pub gap: f64,
    pub nodes_explored: usize,
    pub lp_iterations: usize,
    pub trace: Vec<NodeEvent>,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Options(#[from] OptionsError),
}

struct Node {
    bound: f64,
    seq: usize,
    depth: usize,
    fixes: Vec<(usize, f64, f64)>,
    basis: Option<Rc<LpBasis>>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // BinaryHeap is a max-heap: smallest bound, then earliest insertion, on top.
    fn cmp(&self, other: &Self) -> Ordering {
        other.bound.total_cmp(&self.bound).then_with(|| other.seq.cmp(&self.seq))
    }
}

enum Queue {
    Best(BinaryHeap<Node>),
    Depth(Vec<Node>),
}

impl Queue {
    fn push(&mut self, n: Node) {
        match self {
            Queue::Best(h) => h.push(n),
            Queue::Depth(v) => v.push(n),
        }
    }

    fn pop(&mut self) -> Option<Node> {
        match self {
            Queue::Best(h) => h.pop(),
            Queue::Depth(v) => v.pop(),
        }
    }

    fn min_bound(&self) -> f64 {
        let nodes: &mut dyn Iterator<Item = &Node> = match self {
            Queue::Best(h) => &mut h.iter(),
            Queue::Depth(v) => &mut v.iter(),
        };
        nodes.map(|n| n.bound).fold(f64::INFINITY, f64::min)
    }
}

fn relative_gap(incumbent: f64, bound: f64) -> f64 {
    ((incumbent - bound) / incumbent.abs().max(1.0)).max(0.0)
}

fn fractionality(x: f64) -> f64 {
    let floor = floor(x);
    (x - floor).min(floor + 1.0 - x)
}

fn floor(x: f64) -> f64 {
    let t = x as i64 as f64;
    if t > x {
        t - 1.0
    } else {
        t
    }
}

fn round(x: f64) -> f64 {
    floor(x + 0.5)
}

/// Best-first (or depth-first) branch-and-bound over the LP relaxation.
pub fn solve_milp(p: &MilpProblem, opts: &SolveOptions) -> Result<MilpSolution, SolveError> {
    p.check()?;
    opts.check()?;
    let form = LpStandardForm::from_problem(p);
    let (root_lower, root_upper) = form.bounds();
    let integral: Vec<usize> = (0..p.num_cols()).filter(|&j| p.integral[j]).collect();

    let mut queue = match opts.node_order {
        NodeOrder::BestFirst => Queue::Best(BinaryHeap::new()),
        NodeOrder::DepthFirst => Queue::Depth(Vec::new()),
    };
    let mut seq = 0usize;
    queue.push(Node { bound: f64::NEG_INFINITY, seq, depth: 0, fixes: Vec::new(), basis: None });

    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    // Lowest bound among nodes discarded only because of the gap tolerance.
    let mut pruned_bound = f64::INFINITY;
    let mut nodes = 0usize;
    let mut iterations = 0usize;
    let mut trace = Vec::new();
    let mut status = None;

    let prunable = |inc: &Option<(f64, Vec<f64>)>, bound: f64| match inc {
        Some((obj, _)) => bound >= *obj || relative_gap(*obj, bound) <= opts.relative_gap,
        None => false,
    };

    while let Some(node) = queue.pop() {
        if prunable(&incumbent, node.bound) {
            pruned_bound = pruned_bound.min(node.bound);
            continue;
        }
        if nodes >= opts.max_nodes {
            queue.push(node);
            status = Some(MilpStatus::NodeLimit);
            break;
        }
        nodes += 1;

        let mut lower = root_lower.to_vec();
        let mut upper = root_upper.to_vec();
        for &(j, l, u) in &node.fixes {
            lower[j] = l;
            upper[j] = u;
        }
        let lp = solve_with_bounds(&form, &lower, &upper, opts, node.basis.as_deref());
        iterations += lp.iterations;

        let mut event = NodeEvent { depth: node.depth, parent_bound: node.bound, lp_bound: None, incumbent: None };
        match lp.status {
            LpStatus::Infeasible => {}
            LpStatus::Unbounded => {
                status = Some(MilpStatus::Unbounded);
                break;
            }
            LpStatus::IterationLimit => {
                status = Some(MilpStatus::IterationLimit);
                break;
            }
            LpStatus::Optimal => {
                event.lp_bound = Some(lp.objective);
                if prunable(&incumbent, lp.objective) {
                    pruned_bound = pruned_bound.min(lp.objective);
                } else if let Some(col) = pick_branch(&integral, &lp.values, opts) {
                    let value = lp.values[col];
                    let basis = Rc::new(lp.basis);
                    let down = (col, lower[col], floor(value));
                    let up = (col, floor(value) + 1.0, upper[col]);
                    let children = if opts.node_order == NodeOrder::DepthFirst && value - floor(value) >= 0.5 {
                        [down, up]
                    } else if opts.node_order == NodeOrder::DepthFirst {
                        [up, down]
                    } else {
                        [down, up]
                    };
                    for fix in children {
                        seq += 1;
                        let mut fixes = node.fixes.clone();
                        fixes.push(fix);
                        queue.push(Node {
                            bound: lp.objective,
                            seq,
                            depth: node.depth + 1,
                            fixes,
                            basis: Some(basis.clone()),
                        });
                    }
                } else {
                    // Integer feasible: re-solve with integers pinned so the reported point is exactly integral.
                    let (obj, values) = if integral.is_empty() {
                        (lp.objective, lp.values)
                    } else {
                        for &j in &integral {
                            let r = round(lp.values[j]);
                            lower[j] = r;
                            upper[j] = r;
                        }
                        let polished = solve_with_bounds(&form, &lower, &upper, opts, Some(&lp.basis));
                        iterations += polished.iterations;
                        if polished.status == LpStatus::Optimal {
                            (polished.objective, polished.values)
                        } else {
                            (lp.objective, lp.values)
                        }
                    };
                    if incumbent.as_ref().is_none_or(|(best, _)| obj < *best) {
                        incumbent = Some((obj, values));
                    }
                }
            }
        }
        if opts.trace {
            event.incumbent = incumbent.as_ref().map(|(o, _)| *o);
            trace.push(event);
        }
    }

    let open_bound = queue.min_bound().min(pruned_bound);
    let (status, values, objective, best_bound, gap) = match (status, incumbent) {
        (Some(MilpStatus::Unbounded), _) => {
            (MilpStatus::Unbounded, Vec::new(), f64::NEG_INFINITY, f64::NEG_INFINITY, f64::INFINITY)
        }
        (s, Some((obj, values))) => {
            let bound = open_bound.min(obj);
            (s.unwrap_or(MilpStatus::Optimal), values, obj, bound, relative_gap(obj, bound))
        }
        (Some(s), None) => (s, Vec::new(), f64::INFINITY, open_bound, f64::INFINITY),
        (None, None) => (MilpStatus::Infeasible, Vec::new(), f64::INFINITY, f64::INFINITY, f64::INFINITY),
    };
    Ok(MilpSolution {
        status,
        values,
        objective,
        best_bound,
        gap,
        nodes_explored: nodes,
        lp_iterations: iterations,
        trace,
    })
}

fn pick_branch(integral: &[usize], values: &[f64], opts: &SolveOptions) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for &j in integral {
        let f = fractionality(values[j]);
        if f <= opts.integrality_tol {
            continue;
        }
        match opts.branch_rule {
            BranchRule::FirstFractional => return Some(j),
            BranchRule::MostFractional => {
                if best.is_none_or(|(_, bf)| f > bf) {
                    best = Some((j, f));
                }
            }
        }
    }
    best.map(|(j, _)| j)
}
