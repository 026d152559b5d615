//! Helpers for values kept as natural logarithms, where `-inf` means zero.

use std::f64::consts::LN_2;

/// `ln(e^a + e^b)`, exact for `-inf` operands.
#[inline]
pub fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Log of the sum of exponentials of `values`; `-inf` terms are dropped and
/// an empty or all-`-inf` input yields `-inf`.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let sum: f64 = values.iter().map(|&v| (v - max).exp()).sum();
    max + sum.ln()
}

/// Streaming accumulator for [`log_sum_exp`] with a running shift.
#[derive(Debug, Clone, Copy)]
pub struct LogSumExp {
    max: f64,
    scaled: f64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self::new()
    }
}

impl LogSumExp {
    pub fn new() -> Self {
        LogSumExp {
            max: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }

    pub fn push(&mut self, value: f64) {
        if value == f64::NEG_INFINITY {
            return;
        }
        if value <= self.max {
            self.scaled += (value - self.max).exp();
        } else {
            self.scaled = self.scaled * (self.max - value).exp() + 1.0;
            self.max = value;
        }
    }

    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.ln()
        }
    }
}

/// Converts a natural-log value to base 10.
pub fn to_log10(value: f64) -> f64 {
    value / std::f64::consts::LN_10
}

/// `ln(2^k)`.
#[inline]
pub fn ln_pow2(k: usize) -> f64 {
    k as f64 * LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_add_handles_zero_weights() {
        assert_eq!(log_add(f64::NEG_INFINITY, f64::NEG_INFINITY), f64::NEG_INFINITY);
        assert_eq!(log_add(1.5, f64::NEG_INFINITY), 1.5);
        assert!((log_add(2f64.ln(), 3f64.ln()) - 5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn slice_and_streaming_agree() {
        let xs = [0.0, -700.0, 3.25, f64::NEG_INFINITY, 800.0, 799.5];
        let mut acc = LogSumExp::new();
        for &x in &xs {
            acc.push(x);
        }
        assert!((acc.value() - log_sum_exp(&xs)).abs() < 1e-12);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert_eq!(LogSumExp::new().value(), f64::NEG_INFINITY);
    }

    #[test]
    fn large_magnitudes_do_not_overflow() {
        let v = log_sum_exp(&[1000.0, 1000.0]);
        assert!((v - (1000.0 + LN_2)).abs() < 1e-12);
    }
}
