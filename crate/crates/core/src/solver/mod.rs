//! Constrained MAP: maximize the log weight over `{0,1}^n` subject to a
//! parity system.

mod bnb;
mod brute;

pub use bnb::{solve, solve_with, upper_bound, SolverOptions};
pub use brute::{brute_force_map, DEFAULT_BRUTE_FORCE_CAP};

use std::time::Duration;

use serde::Serialize;

use crate::bits::Bits;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MapStatus {
    /// The search space was exhausted and the incumbent is a maximizer.
    Optimal,
    /// The budget ran out; the incumbent is a lower bound on the maximum.
    Timeout,
    /// Proven: no configuration of positive weight satisfies the system.
    Empty,
}

impl MapStatus {
    /// Optimal or proven empty.
    pub fn is_exact(self) -> bool {
        !matches!(self, MapStatus::Timeout)
    }
}

/// Node and wall-clock limits; whichever is reached first stops the search.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub max_time: Option<Duration>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn nodes(max_nodes: u64) -> Self {
        Budget {
            max_nodes: Some(max_nodes),
            max_time: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MapResult {
    pub status: MapStatus,
    /// `-inf` when nothing of positive weight was found.
    pub best_log_weight: f64,
    pub best_assignment: Option<Bits>,
    /// Proven upper bound on the constrained maximum. Equal to
    /// `best_log_weight` unless the search timed out.
    pub upper_bound: f64,
    pub nodes_expanded: u64,
    pub wall_time: Duration,
    /// Successive incumbent values in the order they were found.
    pub incumbent_trace: Vec<f64>,
}

impl MapResult {
    pub(crate) fn empty(nodes_expanded: u64, wall_time: Duration) -> Self {
        MapResult {
            status: MapStatus::Empty,
            best_log_weight: f64::NEG_INFINITY,
            best_assignment: None,
            upper_bound: f64::NEG_INFINITY,
            nodes_expanded,
            wall_time,
            incumbent_trace: Vec::new(),
        }
    }

    /// Natural log of the gap between the proven upper bound and the
    /// incumbent: `0` when exact, `+inf` when nothing was found below a
    /// positive bound.
    pub fn log_gap(&self) -> f64 {
        if self.upper_bound == f64::NEG_INFINITY {
            0.0
        } else {
            self.upper_bound - self.best_log_weight
        }
    }
}
