//! Random Ising instances on cliques and grids.
//!
//! Draws come from a ChaCha8 stream seeded with `seed`, consumed in a fixed
//! order so a seed names the same instance everywhere. Each uniform draw on
//! `[lo, hi]` is `lo + (hi - lo) * u` with `u` the next `f64` in `[0, 1)`.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Factor, FactorGraph};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsingMode {
    /// Couplings drawn from `[0, w]`.
    Attractive,
    /// Couplings drawn from `[-w, w]`.
    Mixed,
}

impl FromStr for IsingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "attractive" => Ok(IsingMode::Attractive),
            "mixed" => Ok(IsingMode::Mixed),
            other => Err(Error::InvalidArgument(format!(
                "unknown coupling mode {other:?} (expected attractive or mixed)"
            ))),
        }
    }
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.gen::<f64>()
}

/// Clique Ising model over `n` binary variables.
///
/// Every pair `i < j` gets `psi(x_i, x_j) = exp(-w_ij)` when `x_i != x_j` and
/// 1 otherwise, with `w_ij` uniform on `[0, w * sqrt(j - i)]`. The closed
/// chain `0-1-...-(n-1)-0` adds a second interaction uniform on
/// `[-chain_strength, 0]` with the same form; the two are multiplied into one
/// factor per pair.
///
/// Draw order: all `w_ij` for `i < j` lexicographically, then one chain draw
/// per cycle edge `(i, i+1 mod n)` for `i = 0..n` (a single edge when `n = 2`).
pub fn generate_clique_ising(n: usize, w: f64, chain_strength: f64, seed: u64) -> Result<FactorGraph> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("clique needs at least 2 variables, got {n}")));
    }
    if !(w >= 0.0 && chain_strength >= 0.0 && w.is_finite() && chain_strength.is_finite()) {
        return Err(Error::InvalidArgument("w and chain strength must be finite and nonnegative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coupling = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            coupling[i][j] = uniform(&mut rng, 0.0, w * ((j - i) as f64).sqrt());
        }
    }
    let edges = if n == 2 { 1 } else { n };
    for i in 0..edges {
        let j = (i + 1) % n;
        let (a, b) = (i.min(j), i.max(j));
        coupling[a][b] += uniform(&mut rng, -chain_strength, 0.0);
    }
    let mut factors = Vec::with_capacity(n * (n - 1) / 2);
    for (i, row) in coupling.iter().enumerate() {
        for (j, &c) in row.iter().enumerate().skip(i + 1) {
            factors.push(Factor::new(vec![i, j], vec![0.0, -c, -c, 0.0]));
        }
    }
    FactorGraph::new(vec![2; n], factors)
}

/// Grid Ising model with spins `s = 2x - 1`.
///
/// Adjacent sites get `psi = exp(w_ij s_i s_j)` and each site a field
/// `psi = exp(f_i s_i)` with `f_i` uniform on `[-f, f]`. Sites are numbered
/// row-major. Draw order: for each site, its right then its down coupling,
/// then all fields row-major. Factors follow the same order.
pub fn generate_grid_ising(
    rows: usize,
    cols: usize,
    w: f64,
    f: f64,
    mode: IsingMode,
    seed: u64,
) -> Result<FactorGraph> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidArgument(format!("grid must be non-empty, got {rows}x{cols}")));
    }
    if !(w >= 0.0 && f >= 0.0 && w.is_finite() && f.is_finite()) {
        return Err(Error::InvalidArgument("w and f must be finite and nonnegative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let low = match mode {
        IsingMode::Attractive => 0.0,
        IsingMode::Mixed => -w,
    };
    let mut factors = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let site = r * cols + c;
            let mut neighbors = Vec::with_capacity(2);
            if c + 1 < cols {
                neighbors.push(site + 1);
            }
            if r + 1 < rows {
                neighbors.push(site + cols);
            }
            for other in neighbors {
                let k = uniform(&mut rng, low, w);
                factors.push(Factor::new(vec![site, other], vec![k, -k, -k, k]));
            }
        }
    }
    for site in 0..rows * cols {
        let h = uniform(&mut rng, -f, f);
        factors.push(Factor::new(vec![site], vec![-h, h]));
    }
    FactorGraph::new(vec![2; rows * cols], factors)
}
