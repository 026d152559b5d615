use std::time::Instant;

use super::{MapResult, MapStatus};
use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::model::BinaryModel;
use crate::parity::ParitySystem;

pub const DEFAULT_BRUTE_FORCE_CAP: usize = 24;

/// Reference maximizer: enumerates all `2^n` patterns in increasing order
/// and keeps the first strict improvement.
pub fn brute_force_map(model: &BinaryModel, system: &ParitySystem, cap: usize) -> Result<MapResult> {
    let n = model.num_bits();
    if system.num_vars() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: system.num_vars(),
        });
    }
    let cap = cap.min(63);
    if n > cap {
        return Err(Error::CapExceeded {
            what: "enumeration",
            bits: n,
            cap,
        });
    }
    let start = Instant::now();
    let mut best = f64::NEG_INFINITY;
    let mut arg = None;
    let mut trace = Vec::new();
    for x in 0..1u64 << n {
        if !system.satisfied_by_word(x) {
            continue;
        }
        let w = model.log_weight_word(x);
        if w > best {
            best = w;
            arg = Some(x);
            trace.push(w);
        }
    }
    let nodes = 1u64 << n;
    let Some(x) = arg else {
        return Ok(MapResult::empty(nodes, start.elapsed()));
    };
    Ok(MapResult {
        status: MapStatus::Optimal,
        best_log_weight: best,
        best_assignment: Some(Bits::from_u64(n, x)),
        upper_bound: best,
        nodes_expanded: nodes,
        wall_time: start.elapsed(),
        incumbent_trace: trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{binarize, parse_uai};

    #[test]
    fn single_bit_picks_heavier_state() {
        let m = binarize(&parse_uai("MARKOV\n1\n2\n1\n1 0\n2\n2 5\n").unwrap());
        let r = brute_force_map(&m, &ParitySystem::empty(1), 24).unwrap();
        assert_eq!(r.status, MapStatus::Optimal);
        assert_eq!(r.best_log_weight, 5f64.ln());
        assert_eq!(r.best_assignment, Some(Bits::from_u64(1, 1)));
    }

    #[test]
    fn singleton_feasible_set() {
        let m = binarize(&parse_uai("MARKOV\n2\n2 2\n1\n2 0 1\n4\n1 2 3 4\n").unwrap());
        let sys = ParitySystem::from_masks(2, &[(0b01, false), (0b10, false)]);
        let r = brute_force_map(&m, &sys, 24).unwrap();
        assert_eq!(r.best_log_weight, 1f64.ln());
        assert_eq!(r.best_assignment, Some(Bits::zeros(2)));
    }

    #[test]
    fn cap_and_dimension_errors() {
        let m = binarize(&parse_uai("MARKOV\n2\n2 2\n0\n").unwrap());
        assert!(matches!(
            brute_force_map(&m, &ParitySystem::empty(2), 1),
            Err(Error::CapExceeded { bits: 2, cap: 1, .. })
        ));
        assert!(brute_force_map(&m, &ParitySystem::empty(3), 24).is_err());
    }

    #[test]
    fn zero_weight_feasible_set_is_empty() {
        let m = binarize(&parse_uai("MARKOV\n1\n2\n1\n1 0\n2\n0 3\n").unwrap());
        let sys = ParitySystem::from_masks(1, &[(1, false)]);
        let r = brute_force_map(&m, &sys, 24).unwrap();
        assert_eq!(r.status, MapStatus::Empty);
        assert_eq!(r.best_log_weight, f64::NEG_INFINITY);
    }
}
