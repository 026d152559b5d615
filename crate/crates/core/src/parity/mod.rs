//! Random parity constraints `A x = b (mod 2)` over bit-packed rows.
//!
//! A row stores the `n` coefficients of `A` followed by the right-hand side
//! in bit `n`, so row operations are plain word XORs.

mod propagate;
mod reduce;

pub use propagate::{propagate, propagate_by_reduction, Propagation, Propagator};
pub use reduce::ReducedParitySystem;

use std::fmt;

use rand::Rng;

use crate::bits::{words_for, Bits, WORD_BITS};
use crate::error::{Error, Result};

pub(crate) type Row = Vec<u64>;

#[inline]
pub(crate) fn row_get(row: &[u64], i: usize) -> bool {
    (row[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
}

#[inline]
pub(crate) fn row_flip(row: &mut [u64], i: usize) {
    row[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
}

#[inline]
pub(crate) fn row_xor(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

/// Coefficient bits of an augmented row, skipping the right-hand side.
pub(crate) fn coefficient_bits(row: &[u64], n: usize) -> impl Iterator<Item = usize> + '_ {
    row.iter().enumerate().flat_map(move |(wi, &word)| {
        let mut w = word;
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let b = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(wi * WORD_BITS + b)
        })
    })
    .take_while(move |&i| i < n)
}

/// The hash `h(x) = A x + b (mod 2)`; a configuration satisfies the system
/// when `h(x) = 0`, i.e. when `A x = b`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ParitySystem {
    n: usize,
    rows: Vec<Row>,
}

impl ParitySystem {
    /// Zero rows: satisfied by every configuration.
    pub fn empty(n: usize) -> Self {
        ParitySystem { n, rows: Vec::new() }
    }

    pub fn from_rows(n: usize, rows: &[(Vec<bool>, bool)]) -> Result<Self> {
        let mut sys = ParitySystem::empty(n);
        for (coeffs, rhs) in rows {
            if coeffs.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: coeffs.len(),
                });
            }
            let mut row = vec![0u64; words_for(n + 1)];
            for (i, _) in coeffs.iter().enumerate().filter(|(_, &c)| c) {
                row_flip(&mut row, i);
            }
            if *rhs {
                row_flip(&mut row, n);
            }
            sys.rows.push(row);
        }
        Ok(sys)
    }

    /// Rows given as coefficient masks (bit `i` of the mask is `A[r][i]`),
    /// for `n < 64`.
    pub fn from_masks(n: usize, rows: &[(u64, bool)]) -> Self {
        assert!(n < WORD_BITS, "from_masks supports n < 64");
        let mask = (1u64 << n) - 1;
        ParitySystem {
            n,
            rows: rows
                .iter()
                .map(|&(a, b)| vec![(a & mask) | ((b as u64) << n)])
                .collect(),
        }
    }

    pub(crate) fn from_raw(n: usize, rows: Vec<Row>) -> Self {
        ParitySystem { n, rows }
    }

    /// Draws `m` rows; for each row the `n` coefficients and then the
    /// right-hand side are independent fair coins from `rng`.
    pub fn sample<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Self {
        let mut sys = ParitySystem::empty(n);
        for _ in 0..m {
            let mut row = vec![0u64; words_for(n + 1)];
            for i in 0..=n {
                if rng.gen::<bool>() {
                    row_flip(&mut row, i);
                }
            }
            sys.rows.push(row);
        }
        sys
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn coefficient(&self, row: usize, var: usize) -> bool {
        assert!(var < self.n);
        row_get(&self.rows[row], var)
    }

    pub fn rhs(&self, row: usize) -> bool {
        row_get(&self.rows[row], self.n)
    }

    pub(crate) fn raw_rows(&self) -> &[Row] {
        &self.rows
    }

    fn check_len(&self, x: &Bits) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        Ok(())
    }

    /// `A x + b (mod 2)`, one bit per row.
    pub fn hash(&self, x: &Bits) -> Result<Bits> {
        self.check_len(x)?;
        let mut h = Bits::zeros(self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            h.set(r, x.and_parity(row) ^ row_get(row, self.n));
        }
        Ok(h)
    }

    /// True iff `A x = b (mod 2)` holds on every row.
    pub fn evaluate(&self, x: &Bits) -> Result<bool> {
        self.check_len(x)?;
        Ok(self.satisfied_by(x))
    }

    #[inline]
    pub(crate) fn satisfied_by(&self, x: &Bits) -> bool {
        self.rows
            .iter()
            .all(|row| x.and_parity(row) == row_get(row, self.n))
    }

    /// Word-level check for `n < 64`, bit `i` of `x` is variable `i`.
    #[inline]
    pub(crate) fn satisfied_by_word(&self, x: u64) -> bool {
        self.rows
            .iter()
            .all(|row| (row[0] & x).count_ones() & 1 == ((row[0] >> self.n) & 1) as u32)
    }

    pub fn row_reduce(&self) -> ReducedParitySystem {
        ReducedParitySystem::new(self)
    }

    /// Reads the dump format written by `Display`: one row per line, the
    /// coefficient bits, then `| ` and the right-hand side bit.
    pub fn from_dump(n: usize, text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (lhs, rhs) = line
                .split_once('|')
                .ok_or_else(|| Error::parse(i + 1, "missing '|' separator"))?;
            let bit = |c: char| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::parse(i + 1, format!("unexpected character {other:?}"))),
            };
            let coeffs = lhs
                .chars()
                .filter(|c| !c.is_whitespace())
                .map(bit)
                .collect::<Result<Vec<_>>>()?;
            if coeffs.len() != n {
                return Err(Error::parse(
                    i + 1,
                    format!("row has {} coefficients, expected {n}", coeffs.len()),
                ));
            }
            let rhs: Vec<bool> = rhs
                .chars()
                .filter(|c| !c.is_whitespace())
                .map(bit)
                .collect::<Result<_>>()?;
            if rhs.len() != 1 {
                return Err(Error::parse(i + 1, "right-hand side must be one bit"));
            }
            rows.push((coeffs, rhs[0]));
        }
        ParitySystem::from_rows(n, &rows)
    }
}

impl fmt::Display for ParitySystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            for i in 0..self.n {
                f.write_str(if row_get(row, i) { "1" } else { "0" })?;
            }
            writeln!(f, " | {}", row_get(row, self.n) as u8)?;
        }
        Ok(())
    }
}

impl fmt::Debug for ParitySystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ParitySystem(n={}, m={})\n{self}", self.n, self.rows.len())
    }
}
