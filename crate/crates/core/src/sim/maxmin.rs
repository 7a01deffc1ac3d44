//! Max-min fair rate allocation by progressive filling.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

/// Allocates rates to flows sharing capacity-constrained elements.
///
/// `flows[f]` lists the elements flow `f` crosses; `capacities[e]` is the
/// capacity of element `e`. All unfrozen flows grow at the same rate until
/// some element saturates, at which point the flows crossing it are frozen.
/// A flow that crosses no element is unconstrained and gets infinity.
pub fn max_min_allocate(capacities: &[f64], flows: &[Vec<usize>]) -> Vec<f64> {
    let mut solver = MaxMinSolver::default();
    for elems in flows {
        solver.add_flow(elems);
    }
    let mut rates = Vec::new();
    solver.solve(capacities, &mut rates);
    rates
}

/// Progressive-filling solver that keeps its buffers between calls.
#[derive(Debug, Default)]
pub(crate) struct MaxMinSolver {
    flow_start: Vec<usize>,
    flow_elems: Vec<usize>,
    elem_start: Vec<usize>,
    elem_flows: Vec<usize>,
    frozen: Vec<bool>,
    frozen_sum: Vec<f64>,
    unfrozen: Vec<usize>,
    heap: BinaryHeap<Reverse<(Share, usize)>>,
}

impl MaxMinSolver {
    pub(crate) fn clear(&mut self) {
        self.flow_start.clear();
        self.flow_elems.clear();
    }

    pub(crate) fn add_flow(&mut self, elems: &[usize]) {
        if self.flow_start.is_empty() {
            self.flow_start.push(0);
        }
        self.flow_elems.extend_from_slice(elems);
        self.flow_start.push(self.flow_elems.len());
    }

    /// Solves for the flows added since the last [`clear`](Self::clear).
    pub(crate) fn solve(&mut self, capacities: &[f64], rates: &mut Vec<f64>) {
        let n = self.flow_start.len().saturating_sub(1);
        let m = capacities.len();
        rates.clear();
        rates.resize(n, f64::INFINITY);

        // Flows per element, as offsets into `elem_flows`.
        self.elem_start.clear();
        self.elem_start.resize(m + 1, 0);
        for &e in &self.flow_elems {
            self.elem_start[e + 1] += 1;
        }
        for e in 0..m {
            self.elem_start[e + 1] += self.elem_start[e];
        }
        self.elem_flows.clear();
        self.elem_flows.resize(self.flow_elems.len(), 0);
        self.unfrozen.clear();
        self.unfrozen.resize(m, 0);
        for f in 0..n {
            for k in self.flow_start[f]..self.flow_start[f + 1] {
                let e = self.flow_elems[k];
                self.elem_flows[self.elem_start[e] + self.unfrozen[e]] = f;
                self.unfrozen[e] += 1;
            }
        }
        self.frozen.clear();
        self.frozen.resize(n, false);
        self.frozen_sum.clear();
        self.frozen_sum.resize(m, 0.0);

        let share = |e: usize, frozen_sum: &[f64], unfrozen: &[usize]| {
            (capacities[e] - frozen_sum[e]).max(0.0) / unfrozen[e] as f64
        };
        // Freezing a flow at the current level never lowers another
        // element's share, so stale heap keys are lower bounds and can be
        // refreshed lazily.
        self.heap.clear();
        for e in 0..m {
            if self.unfrozen[e] > 0 {
                let key = share(e, &self.frozen_sum, &self.unfrozen);
                self.heap.push(Reverse((Share(key), e)));
            }
        }
        while let Some(Reverse((Share(key), e))) = self.heap.pop() {
            if self.unfrozen[e] == 0 {
                continue;
            }
            let level = share(e, &self.frozen_sum, &self.unfrozen);
            if level > key {
                self.heap.push(Reverse((Share(level), e)));
                continue;
            }
            for k in self.elem_start[e]..self.elem_start[e + 1] {
                let f = self.elem_flows[k];
                if self.frozen[f] {
                    continue;
                }
                self.frozen[f] = true;
                rates[f] = level;
                for j in self.flow_start[f]..self.flow_start[f + 1] {
                    let g = self.flow_elems[j];
                    self.frozen_sum[g] += level;
                    self.unfrozen[g] -= 1;
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Share(f64);

impl Eq for Share {}

impl PartialOrd for Share {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Share {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}
