//! Depth-first branch and bound with parity propagation.
//!
//! Each node fixes one bit, propagates the parity rows in reduced form and
//! bounds the subtree by summing, over factors, the largest table entry
//! still consistent with the partial assignment. A subtree is cut when that
//! bound does not beat the incumbent.

use std::cmp::Ordering;
use std::time::Instant;

use super::{Budget, MapResult, MapStatus};
use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::model::{BinaryModel, Factor};
use crate::parity::{ParitySystem, Propagation, Propagator};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverOptions {
    pub budget: Budget,
    /// Bound-based pruning; turning it off only changes node counts.
    pub prune: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            budget: Budget::unlimited(),
            prune: true,
        }
    }
}

pub fn solve(model: &BinaryModel, system: &ParitySystem, budget: Budget) -> Result<MapResult> {
    solve_with(model, system, &SolverOptions { budget, ..SolverOptions::default() })
}

/// Largest entry of `factor` consistent with `values`.
fn consistent_max(factor: &Factor, values: &[Option<bool>]) -> f64 {
    let k = factor.arity();
    let (mut mask, mut fixed) = (0usize, 0usize);
    for (p, &b) in factor.scope().iter().enumerate() {
        if let Some(v) = values[b] {
            let bit = 1 << (k - 1 - p);
            mask |= bit;
            if v {
                fixed |= bit;
            }
        }
    }
    let table = factor.log_table();
    if mask == 0 {
        return factor.max_log();
    }
    let mut best = f64::NEG_INFINITY;
    for (idx, &x) in table.iter().enumerate() {
        if idx & mask == fixed && x > best {
            best = x;
        }
    }
    best
}

/// Sum over factors of the largest entry consistent with `partial`; never
/// below the log weight of any completion.
pub fn upper_bound(model: &BinaryModel, partial: &[Option<bool>]) -> f64 {
    assert_eq!(partial.len(), model.num_bits(), "partial assignment length");
    model
        .factors()
        .iter()
        .map(|f| consistent_max(f, partial))
        .sum()
}

/// Static branching order: bits in the most parity rows first, then larger
/// total spread (max minus min) of the factors touching the bit.
fn branching_order(model: &BinaryModel, system: &ParitySystem, touching: &[Vec<usize>]) -> Vec<usize> {
    let n = model.num_bits();
    let mut rows_per_bit = vec![0usize; n];
    for r in 0..system.num_rows() {
        for (b, count) in rows_per_bit.iter_mut().enumerate() {
            if system.coefficient(r, b) {
                *count += 1;
            }
        }
    }
    let spread: Vec<f64> = touching
        .iter()
        .map(|fs| {
            fs.iter()
                .map(|&f| {
                    let t = model.factors()[f].log_table();
                    let hi = t.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    let lo = t.iter().copied().fold(f64::INFINITY, f64::min);
                    if lo == f64::NEG_INFINITY { f64::INFINITY } else { hi - lo }
                })
                .sum()
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        rows_per_bit[b]
            .cmp(&rows_per_bit[a])
            .then_with(|| spread[b].total_cmp(&spread[a]))
            .then(a.cmp(&b))
    });
    order
}

enum Flow {
    Continue,
    Abort,
}

struct Search<'a> {
    model: &'a BinaryModel,
    options: SolverOptions,
    touching: Vec<Vec<usize>>,
    order: Vec<usize>,
    prop: Propagator,
    factor_max: Vec<f64>,
    undo: Vec<(usize, f64)>,
    incumbent: f64,
    best: Option<Bits>,
    trace: Vec<f64>,
    nodes: u64,
    start: Instant,
    aborted: bool,
    open_bound: f64,
}

impl Search<'_> {
    fn bound(&self) -> f64 {
        self.factor_max.iter().sum()
    }

    fn refresh(&mut self, var: usize) {
        for i in 0..self.touching[var].len() {
            let f = self.touching[var][i];
            let new = consistent_max(&self.model.factors()[f], self.prop.values());
            if new != self.factor_max[f] {
                self.undo.push((f, self.factor_max[f]));
                self.factor_max[f] = new;
            }
        }
    }

    fn apply(&mut self, assigned: &[(usize, bool)]) {
        for &(v, _) in assigned {
            self.refresh(v);
        }
    }

    fn undo_to(&mut self, mark: usize) {
        while self.undo.len() > mark {
            let (f, old) = self.undo.pop().expect("undo entry");
            self.factor_max[f] = old;
        }
    }

    /// Bound if `var` took `value`, before propagation.
    fn child_bound(&self, var: usize, value: bool) -> f64 {
        let values = self.prop.values();
        let mut trial: Vec<Option<bool>> = Vec::new();
        let mut total = 0.0;
        for (f, &current) in self.factor_max.iter().enumerate() {
            let term = if self.model.factors()[f].scope().contains(&var) {
                if trial.is_empty() {
                    trial = values.to_vec();
                    trial[var] = Some(value);
                }
                consistent_max(&self.model.factors()[f], &trial)
            } else {
                current
            };
            total += term;
        }
        total
    }

    fn out_of_budget(&self) -> bool {
        let budget = self.options.budget;
        if budget.max_nodes.is_some_and(|cap| self.nodes > cap) {
            return true;
        }
        match budget.max_time {
            Some(limit) if self.nodes.is_multiple_of(64) => self.start.elapsed() >= limit,
            _ => false,
        }
    }

    fn prunes(&self, bound: f64) -> bool {
        self.options.prune && bound <= self.incumbent
    }

    fn dfs(&mut self) -> Flow {
        self.nodes += 1;
        let bound = self.bound();
        if self.out_of_budget() {
            self.aborted = true;
            self.open_bound = self.open_bound.max(bound);
            return Flow::Abort;
        }
        if self.prunes(bound) {
            return Flow::Continue;
        }
        let next = self.order.iter().copied().find(|&v| self.prop.value(v).is_none());
        let Some(var) = next else {
            // every bit fixed without conflict: all rows hold
            if bound > self.incumbent {
                self.incumbent = bound;
                self.trace.push(bound);
                let mut x = Bits::zeros(self.model.num_bits());
                for (i, v) in self.prop.values().iter().enumerate() {
                    x.set(i, v.expect("leaf is fully assigned"));
                }
                self.best = Some(x);
            }
            return Flow::Continue;
        };

        let b0 = self.child_bound(var, false);
        let b1 = self.child_bound(var, true);
        let branches = match b1.total_cmp(&b0) {
            Ordering::Greater => [(true, b1), (false, b0)],
            _ => [(false, b0), (true, b1)],
        };
        for (k, &(value, child_bound)) in branches.iter().enumerate() {
            if self.prunes(child_bound) {
                continue;
            }
            let mark = self.undo.len();
            self.prop.push();
            let flow = match self.prop.assign(var, value) {
                Propagation::Conflict => Flow::Continue,
                Propagation::Forced(forced) => {
                    self.refresh(var);
                    self.apply(&forced);
                    self.dfs()
                }
            };
            self.prop.pop();
            self.undo_to(mark);
            if let Flow::Abort = flow {
                for &(_, later) in &branches[k + 1..] {
                    self.open_bound = self.open_bound.max(later);
                }
                return Flow::Abort;
            }
        }
        Flow::Continue
    }
}

/// Branch and bound under `options`. Exhausting the tree gives `Optimal` or
/// `Empty`; hitting the budget gives `Timeout` with the incumbent and a
/// proven upper bound assembled from the unexplored subtrees.
pub fn solve_with(model: &BinaryModel, system: &ParitySystem, options: &SolverOptions) -> Result<MapResult> {
    let n = model.num_bits();
    if system.num_vars() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: system.num_vars(),
        });
    }
    let start = Instant::now();
    let reduced = system.row_reduce();
    if !reduced.is_feasible() {
        return Ok(MapResult::empty(0, start.elapsed()));
    }

    let mut touching = vec![Vec::new(); n];
    for (f, factor) in model.factors().iter().enumerate() {
        for &b in factor.scope() {
            touching[b].push(f);
        }
    }
    let order = branching_order(model, system, &touching);
    let mut prop = Propagator::new(&reduced);
    let Propagation::Forced(root_forced) = prop.start() else {
        unreachable!("feasible system cannot conflict at the root");
    };
    let factor_max = model.factors().iter().map(Factor::max_log).collect();

    let mut search = Search {
        model,
        options: *options,
        touching,
        order,
        prop,
        factor_max,
        undo: Vec::new(),
        incumbent: f64::NEG_INFINITY,
        best: None,
        trace: Vec::new(),
        nodes: 0,
        start,
        aborted: false,
        open_bound: f64::NEG_INFINITY,
    };
    search.apply(&root_forced);
    search.dfs();

    let status = match (search.aborted, &search.best) {
        (true, _) => MapStatus::Timeout,
        (false, Some(_)) => MapStatus::Optimal,
        (false, None) => MapStatus::Empty,
    };
    let upper = if search.aborted {
        search.open_bound.max(search.incumbent)
    } else {
        search.incumbent
    };
    Ok(MapResult {
        status,
        best_log_weight: search.incumbent,
        best_assignment: search.best,
        upper_bound: upper,
        nodes_expanded: search.nodes,
        wall_time: start.elapsed(),
        incumbent_trace: search.trace,
    })
}
