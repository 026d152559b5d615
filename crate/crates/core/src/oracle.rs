//! Exact enumeration for models small enough to list every configuration.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::logspace::{ln_pow2, log_sum_exp, LogSumExp};
use crate::model::{BinaryModel, FactorGraph};

pub const DEFAULT_ORACLE_CAP: usize = 24;

const CHUNK_BITS: usize = 14;

fn check_cap(n: usize, cap: usize) -> Result<()> {
    let cap = cap.min(63);
    if n > cap {
        return Err(Error::CapExceeded {
            what: "exact enumeration",
            bits: n,
            cap,
        });
    }
    Ok(())
}

/// `ln Z` by enumerating all `2^n` patterns. Chunks are summed in parallel
/// and combined in chunk order, so the result does not depend on the
/// number of threads.
pub fn brute_force_log_z(model: &BinaryModel, cap: usize) -> Result<f64> {
    let n = model.num_bits();
    check_cap(n, cap)?;
    let chunk_bits = CHUNK_BITS.min(n);
    let chunks = 1u64 << (n - chunk_bits);
    let partial: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = LogSumExp::new();
            let base = c << chunk_bits;
            for x in base..base + (1u64 << chunk_bits) {
                acc.push(model.log_weight_word(x));
            }
            acc.value()
        })
        .collect();
    Ok(log_sum_exp(&partial))
}

/// `ln Z` of a multi-valued graph by enumerating its own configurations;
/// `cap` bounds `log2` of the configuration count.
pub fn graph_log_z(graph: &FactorGraph, cap: usize) -> Result<f64> {
    let total: f64 = graph.cardinalities().iter().map(|&c| (c as f64).log2()).sum();
    if total > cap as f64 + 1e-9 {
        return Err(Error::CapExceeded {
            what: "exact enumeration",
            bits: total.ceil() as usize,
            cap,
        });
    }
    let cards = graph.cardinalities();
    let mut values = vec![0usize; cards.len()];
    let mut acc = LogSumExp::new();
    loop {
        acc.push(graph.log_weight(&values)?);
        // odometer, last variable fastest
        let mut i = cards.len();
        loop {
            if i == 0 {
                return Ok(acc.value());
            }
            i -= 1;
            values[i] += 1;
            if values[i] < cards[i] {
                break;
            }
            values[i] = 0;
        }
    }
}

/// All `2^n` log weights sorted in non-increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileProfile {
    n: usize,
    sorted: Vec<f64>,
}

impl QuantileProfile {
    pub fn from_log_weights(mut weights: Vec<f64>) -> Result<Self> {
        if !weights.len().is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "profile needs 2^n weights, got {}",
                weights.len()
            )));
        }
        let n = weights.len().trailing_zeros() as usize;
        weights.sort_by(|a, b| b.total_cmp(a));
        Ok(QuantileProfile { n, sorted: weights })
    }

    pub fn num_bits(&self) -> usize {
        self.n
    }

    pub fn sorted_log_weights(&self) -> &[f64] {
        &self.sorted
    }

    /// Log weight of the `rank`-th heaviest configuration (1-based).
    pub fn at_rank(&self, rank: usize) -> f64 {
        self.sorted[rank - 1]
    }

    /// `b_i`: log weight of the `2^i`-th heaviest configuration.
    pub fn b(&self, i: usize) -> f64 {
        self.sorted[(1usize << i) - 1]
    }

    /// `b_0, ..., b_n`.
    pub fn quantiles(&self) -> Vec<f64> {
        (0..=self.n).map(|i| self.b(i)).collect()
    }

    pub fn log_z(&self) -> f64 {
        let mut acc = LogSumExp::new();
        for &w in &self.sorted {
            acc.push(w);
        }
        acc.value()
    }

    /// Number of configurations with log weight at least `log_u`.
    pub fn tail_count(&self, log_u: f64) -> u64 {
        self.sorted.partition_point(|&w| w >= log_u) as u64
    }
}

pub fn brute_force_quantiles(model: &BinaryModel, cap: usize) -> Result<QuantileProfile> {
    let n = model.num_bits();
    check_cap(n, cap)?;
    let weights: Vec<f64> = (0..1u64 << n)
        .into_par_iter()
        .map(|x| model.log_weight_word(x))
        .collect();
    QuantileProfile::from_log_weights(weights)
}

/// `G(u)`: number of configurations of weight at least `u` (weight space).
pub fn brute_force_tail(model: &BinaryModel, u: f64, cap: usize) -> Result<u64> {
    if !(u > 0.0) {
        return Err(Error::InvalidArgument(format!("u must be positive, got {u}")));
    }
    let n = model.num_bits();
    check_cap(n, cap)?;
    let log_u = u.ln();
    Ok((0..1u64 << n)
        .into_par_iter()
        .filter(|&x| model.log_weight_word(x) >= log_u)
        .count() as u64)
}

/// `ln b_0 + sum_{i<n} b_{f(i)} 2^i` for an index map `f`.
fn shifted_sum(profile: &QuantileProfile, index: impl Fn(usize) -> usize) -> f64 {
    let mut terms = vec![profile.b(0)];
    terms.extend((0..profile.n).map(|i| profile.b(index(i)) + ln_pow2(i)));
    log_sum_exp(&terms)
}

/// The two-sided bracket `[ln L, ln U]` with `L = b_0 + sum b_{i+1} 2^i`
/// and `U = b_0 + sum b_i 2^i`; `Z` lies inside and `U <= 2L`.
pub fn exact_sandwich(profile: &QuantileProfile) -> (f64, f64) {
    (shifted_sum(profile, |i| i + 1), shifted_sum(profile, |i| i))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeCheck {
    pub log_l_prime: f64,
    pub log_u_prime: f64,
    pub log_z: f64,
    /// `U' <= 2^(2c) L'`.
    pub ratio_holds: bool,
    /// `L' <= Z <= U'`.
    pub sandwich_holds: bool,
}

impl RangeCheck {
    pub fn pass(&self) -> bool {
        self.ratio_holds && self.sandwich_holds
    }
}

/// Slack for the log-space comparisons in [`lemma2_check`].
pub const RANGE_TOLERANCE: f64 = 1e-9;

/// Evaluates the widened bracket `L' = b_0 + sum b_{min(i+c+1, n)} 2^i`,
/// `U' = b_0 + sum b_{max(i+1-c, 0)} 2^i` and checks `U' <= 2^(2c) L'`
/// and `L' <= Z <= U'`.
pub fn lemma2_check(profile: &QuantileProfile, c: usize) -> RangeCheck {
    let n = profile.n;
    let log_l = shifted_sum(profile, |i| (i + c + 1).min(n));
    let log_u = shifted_sum(profile, |i| (i + 1).saturating_sub(c));
    let log_z = profile.log_z();
    let ratio_holds = log_u == f64::NEG_INFINITY || log_u <= log_l + ln_pow2(2 * c) + RANGE_TOLERANCE;
    let sandwich_holds = log_z == f64::NEG_INFINITY
        || (log_l <= log_z + RANGE_TOLERANCE && log_z <= log_u + RANGE_TOLERANCE);
    RangeCheck {
        log_l_prime: log_l,
        log_u_prime: log_u,
        log_z,
        ratio_holds,
        sandwich_holds,
    }
}
