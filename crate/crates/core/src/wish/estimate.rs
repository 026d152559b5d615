use crate::error::{Error, Result};
use crate::logspace::{ln_pow2, log_sum_exp};

/// Repetitions per level: `ceil(ln(1/delta) / alpha * ln n)`, at least 1.
pub fn compute_t(delta: f64, alpha: f64, n: usize) -> Result<usize> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("delta must lie in (0, 1), got {delta}")));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n must be at least 2, got {n}")));
    }
    let t = ((1.0 / delta).ln() / alpha * (n as f64).ln()).ceil();
    if !(t < usize::MAX as f64) {
        return Err(Error::InvalidArgument("repetition count overflows".into()));
    }
    Ok((t as usize).max(1))
}

/// Lower median: the `ceil(T/2)`-th smallest value.
pub fn lower_median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty(), "median of nothing");
    values.sort_by(|a, b| a.total_cmp(b));
    values[(values.len() - 1) / 2]
}

/// `ln(M_0 + sum_{i<n} M_{i+1} 2^i)` from log-space medians.
pub fn estimate_log_w(medians: &[f64]) -> f64 {
    let Some((&m0, rest)) = medians.split_first() else {
        return f64::NEG_INFINITY;
    };
    let mut terms = Vec::with_capacity(medians.len());
    terms.push(m0);
    terms.extend(rest.iter().enumerate().map(|(i, &m)| m + ln_pow2(i)));
    log_sum_exp(&terms)
}

/// Tail-count estimate `2^q(u)` where `q(u)` is the largest `i` with
/// `M_j >= u` for all `j <= i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailEstimate {
    /// `None` when `M_0 < u`, i.e. the estimate is 0.
    pub q: Option<usize>,
}

impl TailEstimate {
    pub fn count(&self) -> f64 {
        self.q.map_or(0.0, |q| (q as f64).exp2())
    }
}

pub fn estimate_tail(medians: &[f64], u: f64) -> Result<TailEstimate> {
    if !(u > 0.0) {
        return Err(Error::InvalidArgument(format!("u must be positive, got {u}")));
    }
    let log_u = u.ln();
    let run = medians.iter().take_while(|&&m| m >= log_u).count();
    Ok(TailEstimate { q: run.checked_sub(1) })
}

/// Smallest `l` with `(1 + epsilon)^l >= kappa`.
pub fn power_for_accuracy(epsilon: f64, kappa: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    let base = 1.0 + epsilon;
    let mut l = 1usize;
    while base.powi(l as i32) < kappa {
        l += 1;
    }
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn repetitions_formula() {
        assert_eq!(compute_t(0.1, 0.0042, 16).unwrap(), 1521);
        assert_eq!(compute_t(0.01, 0.0042, 16).unwrap(), 3041);
        assert_eq!(compute_t(0.05, 0.0042, 10).unwrap(), 1643);
        assert_eq!(compute_t(0.9, 10.0, 2).unwrap(), 1);
        assert!(compute_t(0.0, 0.0042, 16).is_err());
        assert!(compute_t(1.0, 0.0042, 16).is_err());
        assert!(compute_t(0.1, 0.0, 16).is_err());
        assert!(compute_t(0.1, 0.0042, 1).is_err());
    }

    #[test]
    fn repetitions_scale_with_log_inverse_delta() {
        let a = compute_t(0.1, 0.0042, 16).unwrap();
        let b = compute_t(0.01, 0.0042, 16).unwrap();
        assert!(b == 2 * a - 1 || b == 2 * a);
    }

    #[test]
    fn median_takes_lower_middle() {
        assert_eq!(lower_median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(lower_median(&mut [4.0, 1.0, 3.0, 2.0]), 2.0);
        assert_eq!(
            lower_median(&mut [f64::NEG_INFINITY, 0.0, f64::NEG_INFINITY, 1.0]),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn estimate_examples() {
        for n in 0..10 {
            let est = estimate_log_w(&vec![0.0; n + 1]);
            assert!((est - n as f64 * LN_2).abs() < 1e-12);
        }
        let est = estimate_log_w(&[4f64.ln(), 2f64.ln(), 0.0]);
        assert!((est - 8f64.ln()).abs() < 1e-12);
        assert_eq!(estimate_log_w(&[1.5, f64::NEG_INFINITY, f64::NEG_INFINITY]), 1.5);
        assert_eq!(estimate_log_w(&[f64::NEG_INFINITY; 3]), f64::NEG_INFINITY);
    }

    #[test]
    fn tail_examples() {
        let medians = [5f64.ln(), 5f64.ln(), 3f64.ln(), 0.0];
        let t = estimate_tail(&medians, 4.0).unwrap();
        assert_eq!(t.q, Some(1));
        assert_eq!(t.count(), 2.0);
        assert_eq!(estimate_tail(&medians, 6.0).unwrap().count(), 0.0);
        assert_eq!(estimate_tail(&medians, 0.5).unwrap().q, Some(3));
        assert!(estimate_tail(&medians, 0.0).is_err());
    }

    #[test]
    fn power_counts() {
        assert_eq!(power_for_accuracy(1.0, 16.0).unwrap(), 4);
        assert_eq!(power_for_accuracy(3.0, 16.0).unwrap(), 2);
        assert_eq!(power_for_accuracy(15.0, 16.0).unwrap(), 1);
        assert_eq!(power_for_accuracy(100.0, 16.0).unwrap(), 1);
        assert_eq!(power_for_accuracy(0.5, 16.0).unwrap(), 7);
        assert!(power_for_accuracy(0.0, 16.0).is_err());
    }
}
