//! Product-form basis inverse: `B^-1 = E_k ... E_1`, one eta per pivot.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

const SINGULAR_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
struct Eta {
    pivot: usize,
    pivot_val: f64,
    others: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, Default)]
pub(crate) struct Factor {
    etas: Vec<Eta>,
    since_refactor: usize,
}

/// Outcome of a reinversion: which basis positions could not be pivoted.
pub(crate) struct Reinversion {
    /// `head[pos]` after reinversion.
    pub head: Vec<usize>,
    /// Columns dropped from the basis because they were (near) dependent.
    pub rejected: Vec<usize>,
}

impl Factor {
    pub fn updates(&self) -> usize {
        self.since_refactor
    }

    /// Solve `B x = rhs` in place.
    pub fn ftran(&self, x: &mut [f64]) {
        for eta in &self.etas {
            let xp = x[eta.pivot];
            if xp == 0.0 {
                continue;
            }
            let xp = xp / eta.pivot_val;
            x[eta.pivot] = xp;
            for &(i, w) in &eta.others {
                x[i] -= w * xp;
            }
        }
    }

    /// Solve `y B = rhs` in place.
    pub fn btran(&self, y: &mut [f64]) {
        for eta in self.etas.iter().rev() {
            let mut acc = y[eta.pivot];
            for &(i, w) in &eta.others {
                acc -= y[i] * w;
            }
            y[eta.pivot] = acc / eta.pivot_val;
        }
    }

    /// Record a basis change at position `pivot` given the FTRAN'd entering column.
    pub fn update(&mut self, pivot: usize, column: &[f64]) {
        self.push_eta(pivot, column);
        self.since_refactor += 1;
    }

    fn push_eta(&mut self, pivot: usize, column: &[f64]) {
        let others = column
            .iter()
            .enumerate()
            .filter(|&(i, &w)| i != pivot && w != 0.0)
            .map(|(i, &w)| (i, w))
            .collect();
        self.etas.push(Eta { pivot, pivot_val: column[pivot], others });
    }

    /// Rebuild the factorisation for the columns in `head`.
    ///
    /// `column(j, out)` appends the nonzeros of structural column `j` to
    /// `out`. Logical columns (`j >= n_struct`) are the negated unit vector of
    /// row `j - n_struct`. Rows left unpivoted are filled with their logical
    /// column.
    pub fn reinvert<F>(m: usize, n_struct: usize, head: &[usize], mut column: F) -> (Factor, Reinversion)
    where
        F: FnMut(usize, &mut Vec<(usize, f64)>),
    {
        let mut factor = Factor::default();
        let mut new_head = vec![usize::MAX; m];
        let mut eta_of_row = vec![usize::MAX; m];
        let mut rejected = Vec::new();

        let mut structural: Vec<(usize, usize, Vec<(usize, f64)>)> = Vec::new();
        for &j in head {
            if j >= n_struct {
                let row = j - n_struct;
                new_head[row] = j;
                eta_of_row[row] = factor.etas.len();
                factor.etas.push(Eta { pivot: row, pivot_val: -1.0, others: Vec::new() });
            } else {
                let mut col = Vec::new();
                column(j, &mut col);
                structural.push((col.len(), j, col));
            }
        }
        structural.sort_unstable_by_key(|c| (c.0, c.1));

        // Sparse FTRAN: only etas whose pivot row is nonzero are applied, in
        // creation order.
        let mut w = vec![0.0; m];
        let mut touched: Vec<usize> = Vec::new();
        let mut seen = vec![false; m];
        let mut queued = vec![false; m];
        let mut heap: BinaryHeap<Reverse<usize>> = BinaryHeap::new();
        for (_, j, col) in structural {
            for &(i, a) in &col {
                w[i] += a;
                if !seen[i] {
                    seen[i] = true;
                    touched.push(i);
                }
                if eta_of_row[i] != usize::MAX && !queued[i] {
                    queued[i] = true;
                    heap.push(Reverse(eta_of_row[i]));
                }
            }
            while let Some(Reverse(e)) = heap.pop() {
                let eta = &factor.etas[e];
                queued[eta.pivot] = false;
                let xp = w[eta.pivot];
                if xp == 0.0 {
                    continue;
                }
                let xp = xp / eta.pivot_val;
                w[eta.pivot] = xp;
                for &(i, v) in &eta.others {
                    w[i] -= v * xp;
                    if !seen[i] {
                        seen[i] = true;
                        touched.push(i);
                    }
                    let ei = eta_of_row[i];
                    if ei != usize::MAX && ei > e && !queued[i] {
                        queued[i] = true;
                        heap.push(Reverse(ei));
                    }
                }
            }

            let mut best = None;
            let mut best_abs = SINGULAR_TOL;
            for &i in &touched {
                if new_head[i] == usize::MAX && w[i].abs() > best_abs {
                    best_abs = w[i].abs();
                    best = Some(i);
                }
            }
            match best {
                Some(p) => {
                    touched.sort_unstable();
                    let others = touched.iter().filter(|&&i| i != p && w[i] != 0.0).map(|&i| (i, w[i])).collect();
                    eta_of_row[p] = factor.etas.len();
                    factor.etas.push(Eta { pivot: p, pivot_val: w[p], others });
                    new_head[p] = j;
                }
                None => rejected.push(j),
            }
            for &i in &touched {
                w[i] = 0.0;
                seen[i] = false;
            }
            touched.clear();
        }

        for (row, slot) in new_head.iter_mut().enumerate() {
            if *slot == usize::MAX {
                *slot = n_struct + row;
                // Remaining etas never touch an unpivoted row's pivot, so the
                // logical's image through them is still -e_row.
                factor.etas.push(Eta { pivot: row, pivot_val: -1.0, others: Vec::new() });
            }
        }
        (factor, Reinversion { head: new_head, rejected })
    }
}
