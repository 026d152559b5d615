//! Discrete factor graphs with log-space tables.

mod binary;
mod generate;
mod uai;

pub use binary::{binarize, power_model, BinaryModel, VariableEncoding};
pub use generate::{generate_clique_ising, generate_grid_ising, IsingMode};
pub use uai::{parse_uai, write_uai};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// One potential: an ordered scope and a row-major table of log values.
///
/// The last variable of the scope varies fastest. `-inf` entries encode a
/// potential of zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    scope: Vec<usize>,
    log_table: Vec<f64>,
}

impl Factor {
    /// Builds a factor without checking it against a graph; tables are
    /// validated by [`FactorGraph::new`].
    pub fn new(scope: Vec<usize>, log_table: Vec<f64>) -> Self {
        Factor { scope, log_table }
    }

    pub fn scope(&self) -> &[usize] {
        &self.scope
    }

    pub fn log_table(&self) -> &[f64] {
        &self.log_table
    }

    pub fn arity(&self) -> usize {
        self.scope.len()
    }

    /// Largest table entry.
    pub fn max_log(&self) -> f64 {
        self.log_table
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorGraph {
    cardinalities: Vec<usize>,
    factors: Vec<Factor>,
}

impl FactorGraph {
    pub fn new(cardinalities: Vec<usize>, factors: Vec<Factor>) -> Result<Self> {
        if let Some(i) = cardinalities.iter().position(|&c| c == 0) {
            return Err(Error::InvalidModel(format!(
                "variable {i} has cardinality 0"
            )));
        }
        for (fi, factor) in factors.iter().enumerate() {
            let mut seen = vec![false; cardinalities.len()];
            let mut size = 1usize;
            for &v in &factor.scope {
                if v >= cardinalities.len() {
                    return Err(Error::InvalidModel(format!(
                        "factor {fi} references variable {v}, but there are {}",
                        cardinalities.len()
                    )));
                }
                if std::mem::replace(&mut seen[v], true) {
                    return Err(Error::InvalidModel(format!(
                        "factor {fi} lists variable {v} twice"
                    )));
                }
                size = size.checked_mul(cardinalities[v]).ok_or_else(|| {
                    Error::InvalidModel(format!("factor {fi} table is too large"))
                })?;
            }
            if factor.log_table.len() != size {
                return Err(Error::InvalidModel(format!(
                    "factor {fi} has {} entries, expected {size}",
                    factor.log_table.len()
                )));
            }
            if let Some(bad) = factor
                .log_table
                .iter()
                .find(|v| v.is_nan() || **v == f64::INFINITY)
            {
                return Err(Error::InvalidModel(format!(
                    "factor {fi} has log entry {bad}"
                )));
            }
        }
        Ok(FactorGraph {
            cardinalities,
            factors,
        })
    }

    pub fn num_variables(&self) -> usize {
        self.cardinalities.len()
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cardinalities
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// Row-major position of the values of `scope` inside a factor table.
    pub fn table_index(&self, scope: &[usize], values: &[usize]) -> usize {
        scope
            .iter()
            .fold(0, |idx, &v| idx * self.cardinalities[v] + values[v])
    }

    /// `sum_a log psi_a(x_a)` for a full assignment of original values.
    pub fn log_weight(&self, values: &[usize]) -> Result<f64> {
        if values.len() != self.cardinalities.len() {
            return Err(Error::DimensionMismatch {
                expected: self.cardinalities.len(),
                found: values.len(),
            });
        }
        if let Some(i) = (0..values.len()).find(|&i| values[i] >= self.cardinalities[i]) {
            return Err(Error::InvalidArgument(format!(
                "value {} out of range for variable {i}",
                values[i]
            )));
        }
        Ok(self
            .factors
            .iter()
            .map(|f| f.log_table[self.table_index(&f.scope, values)])
            .sum())
    }

    /// SHA-256 over a canonical byte encoding of the graph.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update((self.cardinalities.len() as u64).to_le_bytes());
        for &c in &self.cardinalities {
            hasher.update((c as u64).to_le_bytes());
        }
        hasher.update((self.factors.len() as u64).to_le_bytes());
        for f in &self.factors {
            hasher.update((f.scope.len() as u64).to_le_bytes());
            for &v in &f.scope {
                hasher.update((v as u64).to_le_bytes());
            }
            for &x in &f.log_table {
                hasher.update(x.to_bits().to_le_bytes());
            }
        }
        hex::encode(hasher.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair_1234() -> FactorGraph {
        let table = [1.0f64, 2.0, 3.0, 4.0].iter().map(|w| w.ln()).collect();
        FactorGraph::new(vec![2, 2], vec![Factor::new(vec![0, 1], table)]).unwrap()
    }

    #[test]
    fn rejects_bad_scopes_and_tables() {
        let dup = FactorGraph::new(vec![2, 2], vec![Factor::new(vec![0, 0], vec![0.0; 4])]);
        assert!(matches!(dup, Err(Error::InvalidModel(_))));
        let oob = FactorGraph::new(vec![2], vec![Factor::new(vec![1], vec![0.0; 2])]);
        assert!(oob.is_err());
        let short = FactorGraph::new(vec![2, 3], vec![Factor::new(vec![0, 1], vec![0.0; 5])]);
        assert!(short.is_err());
        let zero = FactorGraph::new(vec![0], vec![]);
        assert!(zero.is_err());
    }

    #[test]
    fn row_major_lookup() {
        let g = pair_1234();
        assert!((g.log_weight(&[1, 1]).unwrap() - 4f64.ln()).abs() < 1e-15);
        assert!((g.log_weight(&[1, 0]).unwrap() - 3f64.ln()).abs() < 1e-15);
        assert!((g.log_weight(&[0, 1]).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!(g.log_weight(&[0]).is_err());
    }

    #[test]
    fn digest_is_content_sensitive() {
        let a = pair_1234();
        let mut b = pair_1234();
        assert_eq!(a.digest(), b.digest());
        b.factors[0].log_table[3] = 0.0;
        assert_ne!(a.digest(), b.digest());
    }
}
