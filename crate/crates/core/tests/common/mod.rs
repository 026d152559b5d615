#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wish_core::model::{generate_clique_ising, generate_grid_ising, Factor, IsingMode};
use wish_core::FactorGraph;

/// A random Ising model on exactly `bits` binary variables. Even seeds give
/// cliques, odd seeds grids (or a chain when `bits` is prime).
pub fn random_ising(bits: usize, seed: u64) -> FactorGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x005E_ED0F_1513);
    if seed.is_multiple_of(2) {
        let w = rng.gen_range(0.05..0.5);
        let chain = rng.gen_range(0.5..3.0);
        generate_clique_ising(bits, w, chain, seed).unwrap()
    } else {
        let rows = (2..bits).find(|&r| bits.is_multiple_of(r)).unwrap_or(1);
        let mode = if rng.gen_bool(0.5) { IsingMode::Mixed } else { IsingMode::Attractive };
        let w = rng.gen_range(0.2..1.5);
        let f = rng.gen_range(0.1..1.0);
        generate_grid_ising(rows, bits / rows, w, f, mode, seed).unwrap()
    }
}

/// A uniform model: no factors, every configuration has weight 1.
pub fn uniform(bits: usize) -> FactorGraph {
    FactorGraph::new(vec![2; bits], vec![]).unwrap()
}

/// Random multi-valued model with cardinalities in `2..=5`, at most
/// `max_bits` binarized bits, unary, pairwise and triple factors, and about
/// one zero entry in ten.
pub fn random_multivalued(max_bits: usize, seed: u64) -> FactorGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cards = Vec::new();
    let mut bits = 0;
    loop {
        let k: usize = rng.gen_range(2..=5);
        let width = (usize::BITS - (k - 1).leading_zeros()) as usize;
        if bits + width > max_bits || cards.len() >= 8 {
            break;
        }
        bits += width;
        cards.push(k);
    }
    let n = cards.len();
    let table = |scope: &[usize], rng: &mut ChaCha8Rng| -> Factor {
        let len: usize = scope.iter().map(|&v| cards[v]).product();
        let t = (0..len)
            .map(|_| if rng.gen_bool(0.1) { f64::NEG_INFINITY } else { rng.gen_range(-2.0..2.0) })
            .collect();
        Factor::new(scope.to_vec(), t)
    };
    let mut factors = Vec::new();
    for v in 0..n {
        factors.push(table(&[v], &mut rng));
    }
    for _ in 0..n {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b {
            factors.push(table(&[a, b], &mut rng));
        }
    }
    if n >= 3 {
        factors.push(table(&[2, 0, 1], &mut rng));
    }
    FactorGraph::new(cards, factors).unwrap()
}
