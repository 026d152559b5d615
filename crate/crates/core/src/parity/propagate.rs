//! Unit propagation of parity constraints under partial assignments.
//!
//! The propagator keeps the constraint rows in reduced form over the still
//! unassigned variables. In that form a variable is implied exactly when its
//! row has no other variable left, so scanning for single-variable rows after
//! each substitution finds every implied bit.

use super::{coefficient_bits, row_flip, row_get, row_xor, ParitySystem, ReducedParitySystem, Row};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Propagation {
    /// Newly implied `(variable, value)` pairs, already applied.
    Forced(Vec<(usize, bool)>),
    /// Some row reduced to `0 = 1`.
    Conflict,
}

impl Propagation {
    pub fn is_conflict(&self) -> bool {
        matches!(self, Propagation::Conflict)
    }
}

struct Level {
    rows: Vec<Row>,
    pivots: Vec<usize>,
    trail_len: usize,
}

/// Incremental elimination state with push/pop levels for depth-first search.
///
/// After a [`Propagation::Conflict`] the current level is unusable until
/// [`Propagator::pop`] restores the previous one.
pub struct Propagator {
    n: usize,
    rows: Vec<Row>,
    pivots: Vec<usize>,
    values: Vec<Option<bool>>,
    trail: Vec<usize>,
    levels: Vec<Level>,
    feasible: bool,
}

impl Propagator {
    pub fn new(reduced: &ReducedParitySystem) -> Self {
        Propagator {
            n: reduced.num_vars(),
            rows: reduced.raw_rows().to_vec(),
            pivots: reduced.pivots().to_vec(),
            values: vec![None; reduced.num_vars()],
            trail: Vec::new(),
            levels: Vec::new(),
            feasible: reduced.is_feasible(),
        }
    }

    /// Applies the bits implied before any assignment.
    pub fn start(&mut self) -> Propagation {
        if !self.feasible {
            return Propagation::Conflict;
        }
        Propagation::Forced(self.take_units())
    }

    pub fn value(&self, var: usize) -> Option<bool> {
        self.values[var]
    }

    pub fn values(&self) -> &[Option<bool>] {
        &self.values
    }

    /// Rows still containing an unassigned variable.
    pub fn active_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn push(&mut self) {
        self.levels.push(Level {
            rows: self.rows.clone(),
            pivots: self.pivots.clone(),
            trail_len: self.trail.len(),
        });
    }

    pub fn pop(&mut self) {
        let level = self.levels.pop().expect("pop without matching push");
        for var in self.trail.drain(level.trail_len..) {
            self.values[var] = None;
        }
        self.rows = level.rows;
        self.pivots = level.pivots;
    }

    /// Sets `var = value` and propagates.
    pub fn assign(&mut self, var: usize, value: bool) -> Propagation {
        match self.values[var] {
            Some(v) if v == value => return Propagation::Forced(Vec::new()),
            Some(_) => return Propagation::Conflict,
            None => {}
        }
        if !self.substitute(var, value) {
            return Propagation::Conflict;
        }
        Propagation::Forced(self.take_units())
    }

    fn substitute(&mut self, var: usize, value: bool) -> bool {
        self.values[var] = Some(value);
        self.trail.push(var);
        let n = self.n;
        let mut lost_pivot = None;
        for (r, row) in self.rows.iter_mut().enumerate() {
            if row_get(row, var) {
                row_flip(row, var);
                if value {
                    row_flip(row, n);
                }
                if self.pivots[r] == var {
                    lost_pivot = Some(r);
                }
            }
        }
        let Some(r) = lost_pivot else {
            return true;
        };
        let first = coefficient_bits(&self.rows[r], n).next();
        match first {
            None => {
                if row_get(&self.rows[r], n) {
                    return false;
                }
                self.rows.swap_remove(r);
                self.pivots.swap_remove(r);
            }
            Some(p) => {
                // p was free, so no other pivot column is touched
                self.pivots[r] = p;
                let pivot_row = self.rows[r].clone();
                for (s, row) in self.rows.iter_mut().enumerate() {
                    if s != r && row_get(row, p) {
                        row_xor(row, &pivot_row);
                    }
                }
            }
        }
        true
    }

    fn take_units(&mut self) -> Vec<(usize, bool)> {
        let n = self.n;
        let mut forced = Vec::new();
        let mut r = 0;
        while r < self.rows.len() {
            let single = {
                let mut vars = coefficient_bits(&self.rows[r], n);
                vars.next().is_some() && vars.next().is_none()
            };
            if single {
                let var = self.pivots[r];
                let value = row_get(&self.rows[r], n);
                self.values[var] = Some(value);
                self.trail.push(var);
                forced.push((var, value));
                self.rows.swap_remove(r);
                self.pivots.swap_remove(r);
            } else {
                r += 1;
            }
        }
        forced.sort_unstable();
        forced
    }
}

/// Bits implied by `reduced` together with `partial`, excluding `partial`
/// itself, or a conflict.
pub fn propagate(reduced: &ReducedParitySystem, partial: &[(usize, bool)]) -> Propagation {
    let mut prop = Propagator::new(reduced);
    let Propagation::Forced(mut forced) = prop.start() else {
        return Propagation::Conflict;
    };
    for &(var, value) in partial {
        assert!(var < reduced.num_vars(), "variable {var} out of range");
        match prop.assign(var, value) {
            Propagation::Conflict => return Propagation::Conflict,
            Propagation::Forced(more) => forced.extend(more),
        }
    }
    forced.retain(|(v, _)| !partial.iter().any(|(p, _)| p == v));
    forced.sort_unstable();
    Propagation::Forced(forced)
}

/// Same contract as [`propagate`], computed by substituting `partial` into
/// the rows and reducing from scratch.
pub fn propagate_by_reduction(
    reduced: &ReducedParitySystem,
    partial: &[(usize, bool)],
) -> Propagation {
    let n = reduced.num_vars();
    let mut rows = reduced.to_system().raw_rows().to_vec();
    for row in &mut rows {
        for &(var, value) in partial {
            if row_get(row, var) {
                row_flip(row, var);
                if value {
                    row_flip(row, n);
                }
            }
        }
    }
    let again = ParitySystem::from_raw(n, rows).row_reduce();
    if !again.is_feasible() {
        return Propagation::Conflict;
    }
    let mut forced: Vec<(usize, bool)> = again
        .raw_rows()
        .iter()
        .zip(again.pivots())
        .filter(|(row, _)| coefficient_bits(row, n).count() == 1)
        .map(|(row, &p)| (p, row_get(row, n)))
        .collect();
    forced.sort_unstable();
    Propagation::Forced(forced)
}
