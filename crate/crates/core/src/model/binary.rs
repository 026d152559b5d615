//! Binary encodings of multi-valued factor graphs.

use super::{Factor, FactorGraph};
use crate::bits::Bits;
use crate::error::{Error, Result};

/// Bit range of one original variable. Codes are read most significant bit
/// first; codes `0..cardinality` map to values in order, the rest are dead.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VariableEncoding {
    pub first_bit: usize,
    pub width: usize,
    pub cardinality: usize,
}

impl VariableEncoding {
    pub fn bits(&self) -> std::ops::Range<usize> {
        self.first_bit..self.first_bit + self.width
    }

    pub fn has_dead_codes(&self) -> bool {
        (1usize << self.width) != self.cardinality
    }

    pub fn code(&self, x: &Bits) -> usize {
        self.bits().fold(0, |code, b| (code << 1) | x.get(b) as usize)
    }
}

/// `ceil(log2(cardinality))`.
pub fn bit_width(cardinality: usize) -> usize {
    debug_assert!(cardinality >= 1);
    (usize::BITS - (cardinality - 1).leading_zeros()) as usize
}

/// A factor graph over `{0,1}^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryModel {
    graph: FactorGraph,
    encoding: Vec<VariableEncoding>,
}

impl BinaryModel {
    pub fn num_bits(&self) -> usize {
        self.graph.num_variables()
    }

    /// The bit-level graph; every cardinality is 2.
    pub fn graph(&self) -> &FactorGraph {
        &self.graph
    }

    pub fn factors(&self) -> &[Factor] {
        self.graph.factors()
    }

    pub fn encoding(&self) -> &[VariableEncoding] {
        &self.encoding
    }

    pub fn log_weight(&self, x: &Bits) -> Result<f64> {
        if x.len() != self.num_bits() {
            return Err(Error::DimensionMismatch {
                expected: self.num_bits(),
                found: x.len(),
            });
        }
        Ok(self
            .factors()
            .iter()
            .map(|f| f.log_table()[local_index(f.scope(), |b| x.get(b))])
            .sum())
    }

    /// Log weight of the pattern whose bit `i` is bit `i` of `x`.
    /// Requires `num_bits() <= 64`.
    pub(crate) fn log_weight_word(&self, x: u64) -> f64 {
        self.factors()
            .iter()
            .map(|f| f.log_table()[local_index(f.scope(), |b| (x >> b) & 1 == 1)])
            .sum()
    }

    /// Original values for a bit pattern, or `None` on a dead code.
    pub fn decode(&self, x: &Bits) -> Option<Vec<usize>> {
        self.encoding
            .iter()
            .map(|e| Some(e.code(x)).filter(|&c| c < e.cardinality))
            .collect()
    }

    pub fn encode(&self, values: &[usize]) -> Result<Bits> {
        if values.len() != self.encoding.len() {
            return Err(Error::DimensionMismatch {
                expected: self.encoding.len(),
                found: values.len(),
            });
        }
        let mut x = Bits::zeros(self.num_bits());
        for (e, &v) in self.encoding.iter().zip(values) {
            if v >= e.cardinality {
                return Err(Error::InvalidArgument(format!("value {v} out of range")));
            }
            for (j, b) in e.bits().enumerate() {
                x.set(b, (v >> (e.width - 1 - j)) & 1 == 1);
            }
        }
        Ok(x)
    }
}

/// Row-major index of a binary factor entry, first scope bit most significant.
#[inline]
pub(crate) fn local_index(scope: &[usize], bit: impl Fn(usize) -> bool) -> usize {
    scope.iter().fold(0, |idx, &b| (idx << 1) | bit(b) as usize)
}

/// Encodes every variable in `ceil(log2 |X_i|)` consecutive bits.
///
/// Each original factor becomes a factor over the concatenated bit ranges of
/// its scope with dead codes set to `-inf`. Variables with dead codes also get
/// a unary domain factor, so uncovered variables keep zero weight on dead
/// codes and the partition function is preserved exactly.
pub fn binarize(graph: &FactorGraph) -> BinaryModel {
    let mut encoding = Vec::with_capacity(graph.num_variables());
    let mut next = 0;
    for &card in graph.cardinalities() {
        let width = bit_width(card);
        encoding.push(VariableEncoding {
            first_bit: next,
            width,
            cardinality: card,
        });
        next += width;
    }

    let mut factors = Vec::with_capacity(graph.factors().len());
    for f in graph.factors() {
        let scope: Vec<usize> = f.scope().iter().flat_map(|&v| encoding[v].bits()).collect();
        let size = 1usize << scope.len();
        let mut table = Vec::with_capacity(size);
        for idx in 0..size {
            let mut rest = idx;
            let mut orig = 0usize;
            let mut stride = 1usize;
            let mut dead = false;
            for &v in f.scope().iter().rev() {
                let e = encoding[v];
                let code = rest & ((1 << e.width) - 1);
                rest >>= e.width;
                if code >= e.cardinality {
                    dead = true;
                    break;
                }
                orig += code * stride;
                stride *= e.cardinality;
            }
            table.push(if dead {
                f64::NEG_INFINITY
            } else {
                f.log_table()[orig]
            });
        }
        factors.push(Factor::new(scope, table));
    }
    for e in encoding.iter().filter(|e| e.has_dead_codes()) {
        let table = (0..1usize << e.width)
            .map(|c| if c < e.cardinality { 0.0 } else { f64::NEG_INFINITY })
            .collect();
        factors.push(Factor::new(e.bits().collect(), table));
    }

    let graph = FactorGraph::new(vec![2; next], factors).expect("binarized graph is well formed");
    BinaryModel { graph, encoding }
}

/// Disjoint union of `copies` relabeled copies of `model`; its partition
/// function is the original one raised to the power `copies`.
pub fn power_model(model: &BinaryModel, copies: usize) -> Result<BinaryModel> {
    if copies == 0 {
        return Err(Error::InvalidArgument("power must be at least 1".into()));
    }
    let n = model.num_bits();
    let mut factors = Vec::with_capacity(model.factors().len() * copies);
    let mut encoding = Vec::with_capacity(model.encoding.len() * copies);
    for c in 0..copies {
        let shift = c * n;
        factors.extend(model.factors().iter().map(|f| {
            Factor::new(
                f.scope().iter().map(|b| b + shift).collect(),
                f.log_table().to_vec(),
            )
        }));
        encoding.extend(model.encoding.iter().map(|e| VariableEncoding {
            first_bit: e.first_bit + shift,
            ..*e
        }));
    }
    let graph = FactorGraph::new(vec![2; n * copies], factors)?;
    Ok(BinaryModel { graph, encoding })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_uai;

    #[test]
    fn widths() {
        let w: Vec<usize> = [1, 2, 3, 4, 5, 8, 9].iter().map(|&c| bit_width(c)).collect();
        assert_eq!(w, vec![0, 1, 2, 2, 3, 3, 4]);
    }

    #[test]
    fn binary_graph_keeps_identity_encoding() {
        let g = parse_uai("MARKOV\n3\n2 2 2\n1\n2 0 2\n4\n1 2 3 4\n").unwrap();
        let m = binarize(&g);
        assert_eq!(m.num_bits(), 3);
        assert_eq!(m.factors().len(), 1);
        assert_eq!(m.factors()[0].scope(), &[0, 2]);
        assert_eq!(m.factors()[0].log_table(), g.factors()[0].log_table());
        for (i, e) in m.encoding().iter().enumerate() {
            assert_eq!((e.first_bit, e.width), (i, 1));
        }
    }

    #[test]
    fn cardinalities_2_3_5_use_six_bits() {
        let g = FactorGraph::new(vec![2, 3, 5], vec![]).unwrap();
        let m = binarize(&g);
        assert_eq!(m.num_bits(), 6);
        let ranges: Vec<_> = m.encoding().iter().map(|e| e.bits()).collect();
        assert_eq!(ranges, vec![0..1, 1..3, 3..6]);
    }

    #[test]
    fn dead_code_has_zero_weight() {
        let g = parse_uai("MARKOV\n1\n3\n1\n1 0\n3\n1 2 3\n").unwrap();
        let m = binarize(&g);
        assert_eq!(m.num_bits(), 2);
        let w = |v: u64| m.log_weight(&Bits::from_u64(2, v)).unwrap();
        // bit 0 is the most significant bit of the code
        assert!((w(0b00) - 1f64.ln()).abs() < 1e-15);
        assert!((w(0b10) - 2f64.ln()).abs() < 1e-15);
        assert!((w(0b01) - 3f64.ln()).abs() < 1e-15);
        assert_eq!(w(0b11), f64::NEG_INFINITY);
        assert_eq!(m.decode(&Bits::from_u64(2, 0b11)), None);
        assert_eq!(m.decode(&Bits::from_u64(2, 0b01)), Some(vec![2]));
    }

    #[test]
    fn encode_decode_inverse() {
        let g = FactorGraph::new(vec![5, 1, 3], vec![]).unwrap();
        let m = binarize(&g);
        for a in 0..5 {
            for c in 0..3 {
                let x = m.encode(&[a, 0, c]).unwrap();
                assert_eq!(m.decode(&x), Some(vec![a, 0, c]));
            }
        }
        assert!(m.encode(&[5, 0, 0]).is_err());
    }

    #[test]
    fn log_weight_rejects_wrong_length() {
        let m = binarize(&FactorGraph::new(vec![2, 2], vec![]).unwrap());
        assert!(matches!(
            m.log_weight(&Bits::zeros(3)),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn power_model_shifts_scopes() {
        let g = parse_uai("MARKOV\n2\n2 2\n1\n2 0 1\n4\n1 2 3 4\n").unwrap();
        let m = binarize(&g);
        assert_eq!(power_model(&m, 1).unwrap(), m);
        let p = power_model(&m, 3).unwrap();
        assert_eq!(p.num_bits(), 6);
        assert_eq!(p.factors()[2].scope(), &[4, 5]);
        assert!(power_model(&m, 0).is_err());
    }
}
