use super::{coefficient_bits, row_flip, row_get, row_xor, ParitySystem, Row};
use crate::bits::{words_for, Bits};

/// Reduced row-echelon form of a parity system over GF(2).
///
/// Only pivot rows are kept; each pivot column is zero in every other row.
/// An inconsistent system (some row reduced to `0 = 1`) is flagged instead.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedParitySystem {
    n: usize,
    rows: Vec<Row>,
    pivots: Vec<usize>,
    feasible: bool,
}

impl ReducedParitySystem {
    pub(super) fn new(system: &ParitySystem) -> Self {
        let n = system.num_vars();
        let mut rows: Vec<Row> = system.raw_rows().to_vec();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..n {
            let Some(found) = (rank..rows.len()).find(|&r| row_get(&rows[r], col)) else {
                continue;
            };
            rows.swap(rank, found);
            let (head, tail) = rows.split_at_mut(rank);
            let (pivot_row, tail) = tail.split_first_mut().expect("pivot row exists");
            for row in head.iter_mut().chain(tail.iter_mut()) {
                if row_get(row, col) {
                    row_xor(row, pivot_row);
                }
            }
            pivots.push(col);
            rank += 1;
        }
        let feasible = rows[rank..].iter().all(|row| !row_get(row, n));
        rows.truncate(rank);
        ReducedParitySystem {
            n,
            rows,
            pivots,
            feasible,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Pivot column of each kept row, increasing.
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_feasible(&self) -> bool {
        self.feasible
    }

    pub(crate) fn raw_rows(&self) -> &[Row] {
        &self.rows
    }

    /// `log2` of the number of solutions, `None` when infeasible.
    pub fn log2_solution_count(&self) -> Option<usize> {
        self.feasible.then(|| self.n - self.rank())
    }

    /// The reduced rows as a system; an infeasible system gets one `0 = 1` row.
    pub fn to_system(&self) -> ParitySystem {
        let mut rows = self.rows.clone();
        if !self.feasible {
            let mut contradiction = vec![0u64; words_for(self.n + 1)];
            row_flip(&mut contradiction, self.n);
            rows.push(contradiction);
        }
        ParitySystem::from_raw(self.n, rows)
    }

    /// Enumerates every solution by ranging over the free variables.
    /// Intended for small systems (`n - rank` up to about 20).
    pub fn solutions(&self) -> Vec<Bits> {
        if !self.feasible {
            return Vec::new();
        }
        let mut is_pivot = vec![false; self.n];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..self.n).filter(|&i| !is_pivot[i]).collect();
        assert!(free.len() < 32, "too many free variables to enumerate");
        (0..1u64 << free.len())
            .map(|mask| {
                let mut x = Bits::zeros(self.n);
                for (k, &v) in free.iter().enumerate() {
                    x.set(v, (mask >> k) & 1 == 1);
                }
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    let mut value = row_get(row, self.n);
                    for v in coefficient_bits(row, self.n).filter(|&v| v != p) {
                        value ^= x.get(v);
                    }
                    x.set(p, value);
                }
                x
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn contradictory_pair_is_infeasible() {
        let sys = ParitySystem::from_masks(2, &[(0b11, false), (0b11, true)]);
        let red = sys.row_reduce();
        assert!(!red.is_feasible());
        assert_eq!(red.log2_solution_count(), None);
        assert!(red.solutions().is_empty());
        assert!(!red.to_system().evaluate(&Bits::zeros(2)).unwrap());
    }

    #[test]
    fn identity_has_full_rank() {
        let sys = ParitySystem::from_masks(4, &[(1, true), (2, false), (4, true), (8, false)]);
        let red = sys.row_reduce();
        assert_eq!(red.rank(), 4);
        assert_eq!(red.pivots(), &[0, 1, 2, 3]);
        let sols = red.solutions();
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0], Bits::from_u64(4, 0b0101));
    }

    #[test]
    fn solution_count_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let sys = ParitySystem::sample(4, 2, &mut rng);
            let red = sys.row_reduce();
            let brute: Vec<u64> = (0..16)
                .filter(|&x| sys.evaluate(&Bits::from_u64(4, x)).unwrap())
                .collect();
            match red.log2_solution_count() {
                Some(k) => assert_eq!(brute.len(), 1 << k),
                None => assert!(brute.is_empty()),
            }
            let mut listed: Vec<u64> = red
                .solutions()
                .iter()
                .map(|b| (0..4).map(|i| (b.get(i) as u64) << i).sum())
                .collect();
            listed.sort_unstable();
            assert_eq!(listed, brute);
        }
    }

    #[test]
    fn reduced_form_has_clean_pivot_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let sys = ParitySystem::sample(100, 40, &mut rng);
        let red = sys.row_reduce();
        for (r, &p) in red.pivots().iter().enumerate() {
            for (s, row) in red.raw_rows().iter().enumerate() {
                assert_eq!(row_get(row, p), r == s);
            }
        }
    }
}
