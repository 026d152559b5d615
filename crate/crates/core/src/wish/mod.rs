//! The estimator: for every level `i = 0..=n`, draw `T` random parity
//! systems with `i` rows, solve each constrained MAP instance, and combine
//! the per-level medians into `M_0 + sum_{i<n} M_{i+1} 2^i`.

mod estimate;
mod executor;

pub use estimate::{
    compute_t, estimate_log_w, estimate_tail, lower_median, power_for_accuracy, TailEstimate,
};
pub use executor::{instance_seed, Executor, Job, PoolExecutor, SerialExecutor};

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::logspace::ln_pow2;
use crate::model::{power_model, BinaryModel};
use crate::parity::ParitySystem;
use crate::solver::{solve_with, Budget, MapStatus, SolverOptions};

/// Largest `alpha` for which the factor-16 statement is certified.
pub const ALPHA_BOUND: f64 = 0.0042;
/// Approximation factor `2^(2c)` for `c = 2`.
pub const APPROXIMATION_FACTOR: f64 = 16.0;

#[derive(Debug, Clone, PartialEq)]
pub struct WishConfig {
    pub delta: f64,
    pub alpha: f64,
    pub t_override: Option<usize>,
    /// Slack in the level bracket; reporting assumes 2.
    pub c: usize,
    pub budget: Budget,
    pub master_seed: u64,
    /// Stop after this many consecutive levels with median `-inf` and
    /// treat the remaining levels as `-inf`. Voids the certificate.
    pub early_stop: Option<usize>,
    /// Largest bit count `refine` will build a power model for.
    pub refine_bit_cap: usize,
}

impl Default for WishConfig {
    fn default() -> Self {
        WishConfig {
            delta: 0.1,
            alpha: ALPHA_BOUND,
            t_override: None,
            c: 2,
            budget: Budget::unlimited(),
            master_seed: 0,
            early_stop: None,
            refine_bit_cap: 128,
        }
    }
}

impl WishConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidArgument(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!("alpha must be positive, got {}", self.alpha)));
        }
        if self.t_override == Some(0) {
            return Err(Error::InvalidArgument("T override must be at least 1".into()));
        }
        if self.c == 0 {
            return Err(Error::InvalidArgument("c must be at least 1".into()));
        }
        if self.early_stop == Some(0) {
            return Err(Error::InvalidArgument("early stop needs at least one level".into()));
        }
        Ok(())
    }

    /// Repetitions for an `n`-bit model. One-bit models use the `n = 2` value.
    pub fn repetitions(&self, n: usize) -> Result<usize> {
        match self.t_override {
            Some(t) => Ok(t),
            None => compute_t(self.delta, self.alpha, n.max(2)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum InstanceStatus {
    Optimal,
    Timeout,
    Empty,
    /// The solver panicked; the instance contributes `-inf`.
    Failed,
}

impl From<MapStatus> for InstanceStatus {
    fn from(s: MapStatus) -> Self {
        match s {
            MapStatus::Optimal => InstanceStatus::Optimal,
            MapStatus::Timeout => InstanceStatus::Timeout,
            MapStatus::Empty => InstanceStatus::Empty,
        }
    }
}

/// Outcome of one `(level, trial)` optimization.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceRecord {
    pub level: usize,
    pub trial: usize,
    pub seed: u64,
    pub status: InstanceStatus,
    pub log_weight: f64,
    pub upper_bound: f64,
    pub nodes: u64,
    pub wall_time: Duration,
    pub error: Option<String>,
}

impl InstanceRecord {
    /// Equality ignoring wall time.
    pub fn same_outcome(&self, other: &InstanceRecord) -> bool {
        InstanceRecord {
            wall_time: Duration::ZERO,
            ..self.clone()
        } == InstanceRecord {
            wall_time: Duration::ZERO,
            ..other.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Guarantee {
    /// Every instance exact: a 16-approximation with probability `1 - delta`.
    Exact16x,
    /// Every instance within a known ratio `L` of its optimum: a
    /// `16 L`-approximation.
    Factor16L { log_l: f64 },
    /// Only `estimate / 16 <= W` holds with probability `1 - delta`.
    LowerBound,
}

impl Guarantee {
    pub fn label(&self) -> &'static str {
        match self {
            Guarantee::Exact16x => "EXACT_16X",
            Guarantee::Factor16L { .. } => "FACTOR_16L",
            Guarantee::LowerBound => "LOWER_BOUND",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WishResult {
    pub n: usize,
    pub t: usize,
    /// `M_0..M_n` in natural log.
    pub medians: Vec<f64>,
    /// Sorted by `(level, trial)`.
    pub records: Vec<InstanceRecord>,
    pub log_estimate: f64,
    pub guarantee: Guarantee,
    pub failure_probability: f64,
    /// Reasons the probability statement does not apply even when every
    /// instance was solved exactly.
    pub certificate_voided_by: Vec<String>,
}

impl WishResult {
    pub fn is_certified(&self) -> bool {
        self.guarantee == Guarantee::Exact16x && self.certificate_voided_by.is_empty()
    }

    pub fn log10_estimate(&self) -> f64 {
        crate::logspace::to_log10(self.log_estimate)
    }

    /// Tail-count estimate for threshold `u` (weight space).
    pub fn tail(&self, u: f64) -> Result<TailEstimate> {
        estimate_tail(&self.medians, u)
    }

    /// Bit-for-bit comparison of everything except wall times.
    pub fn same_outcome(&self, other: &WishResult) -> bool {
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        self.n == other.n
            && self.t == other.t
            && bits(&self.medians) == bits(&other.medians)
            && self.log_estimate.to_bits() == other.log_estimate.to_bits()
            && self.guarantee == other.guarantee
            && self.certificate_voided_by == other.certificate_voided_by
            && self.records.len() == other.records.len()
            && self.records.iter().zip(&other.records).all(|(a, b)| a.same_outcome(b))
    }
}

fn run_instance(model: &BinaryModel, job: &Job, options: &SolverOptions) -> InstanceRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(job.seed);
    let system = ParitySystem::sample(model.num_bits(), job.level, &mut rng);
    let outcome = catch_unwind(AssertUnwindSafe(|| solve_with(model, &system, options)));
    let base = InstanceRecord {
        level: job.level,
        trial: job.trial,
        seed: job.seed,
        status: InstanceStatus::Failed,
        log_weight: f64::NEG_INFINITY,
        upper_bound: f64::INFINITY,
        nodes: 0,
        wall_time: Duration::ZERO,
        error: None,
    };
    match outcome {
        Ok(Ok(r)) => InstanceRecord {
            status: r.status.into(),
            log_weight: r.best_log_weight,
            upper_bound: r.upper_bound,
            nodes: r.nodes_expanded,
            wall_time: r.wall_time,
            ..base
        },
        Ok(Err(e)) => InstanceRecord {
            error: Some(e.to_string()),
            ..base
        },
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "solver panicked".into());
            InstanceRecord {
                error: Some(msg),
                ..base
            }
        }
    }
}

/// Combines per-instance records into medians, the estimate and its
/// guarantee. Levels without records (after an early stop) count as `-inf`.
pub fn aggregate(n: usize, t: usize, mut records: Vec<InstanceRecord>, config: &WishConfig) -> WishResult {
    records.sort_by_key(|r| (r.level, r.trial));
    let mut medians = vec![f64::NEG_INFINITY; n + 1];
    for (level, median) in medians.iter_mut().enumerate() {
        let mut values: Vec<f64> = records
            .iter()
            .filter(|r| r.level == level)
            .map(|r| r.log_weight)
            .collect();
        if !values.is_empty() {
            *median = lower_median(&mut values);
        }
    }
    let log_estimate = estimate_log_w(&medians);

    let guarantee = if records.iter().any(|r| r.status == InstanceStatus::Failed) {
        Guarantee::LowerBound
    } else if records.iter().all(|r| r.status != InstanceStatus::Timeout) {
        Guarantee::Exact16x
    } else {
        let log_l = records
            .iter()
            .filter(|r| r.status == InstanceStatus::Timeout)
            .map(|r| {
                if r.upper_bound == f64::NEG_INFINITY {
                    0.0
                } else {
                    r.upper_bound - r.log_weight
                }
            })
            .fold(0.0f64, f64::max);
        if log_l.is_finite() {
            Guarantee::Factor16L { log_l }
        } else {
            Guarantee::LowerBound
        }
    };

    let mut voided = Vec::new();
    if config.t_override.is_some() {
        voided.push("t_override".to_string());
    }
    if config.alpha > ALPHA_BOUND {
        voided.push("alpha_above_0.0042".to_string());
    }
    if config.c != 2 {
        voided.push("c_not_2".to_string());
    }
    if records.len() < (n + 1) * t {
        voided.push("early_stop".to_string());
    }

    WishResult {
        n,
        t,
        medians,
        records,
        log_estimate,
        guarantee,
        failure_probability: config.delta,
        certificate_voided_by: voided,
    }
}

/// Runs every `(level, trial)` instance through `executor` and aggregates.
/// The result depends only on `model` and `config` (wall times aside, and
/// unless a wall-clock budget cuts searches short).
pub fn run_wish(model: &BinaryModel, config: &WishConfig, executor: &dyn Executor) -> Result<WishResult> {
    config.validate()?;
    let n = model.num_bits();
    if n == 0 {
        return Err(Error::InvalidArgument("model has no bits to hash".into()));
    }
    let t = config.repetitions(n)?;
    let options = SolverOptions {
        budget: config.budget,
        prune: true,
    };
    let work = |job: &Job| run_instance(model, job, &options);
    let jobs_for = |level: usize| {
        (0..t).map(move |trial| Job {
            level,
            trial,
            seed: instance_seed(config.master_seed, level, trial),
        })
    };

    let records = match config.early_stop {
        None => {
            let jobs: Vec<Job> = (0..=n).flat_map(jobs_for).collect();
            executor.run(&jobs, &work)
        }
        Some(patience) => {
            let mut records = Vec::new();
            let mut empty_run = 0;
            for level in 0..=n {
                let jobs: Vec<Job> = jobs_for(level).collect();
                let batch = executor.run(&jobs, &work);
                let mut values: Vec<f64> = batch.iter().map(|r| r.log_weight).collect();
                records.extend(batch);
                if lower_median(&mut values) == f64::NEG_INFINITY {
                    empty_run += 1;
                    if empty_run >= patience {
                        break;
                    }
                } else {
                    empty_run = 0;
                }
            }
            records
        }
    };
    Ok(aggregate(n, t, records, config))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefineResult {
    /// Number of model copies.
    pub power: usize,
    /// Run on the power model.
    pub inner: WishResult,
    /// `ln` of the refined estimate: the inner estimate divided by `power`.
    pub log_estimate: f64,
    /// `16^(1/power)`, at most `1 + epsilon`.
    pub factor: f64,
}

/// Runs the estimator on the product of `power` copies of `model`, with
/// `power` the smallest integer such that `16^(1/power) <= 1 + epsilon`,
/// and takes the `power`-th root of the estimate.
pub fn refine(
    model: &BinaryModel,
    epsilon: f64,
    config: &WishConfig,
    executor: &dyn Executor,
) -> Result<RefineResult> {
    let power = power_for_accuracy(epsilon, APPROXIMATION_FACTOR)?;
    let bits = power * model.num_bits();
    if bits > config.refine_bit_cap {
        return Err(Error::CapExceeded {
            what: "refinement power model",
            bits,
            cap: config.refine_bit_cap,
        });
    }
    let product = power_model(model, power)?;
    let inner = run_wish(&product, config, executor)?;
    Ok(RefineResult {
        power,
        log_estimate: inner.log_estimate / power as f64,
        factor: APPROXIMATION_FACTOR.powf(1.0 / power as f64),
        inner,
    })
}

/// `ln 16` for `c = 2`.
pub fn log_factor(c: usize) -> f64 {
    ln_pow2(2 * c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{binarize, generate_clique_ising, parse_uai, FactorGraph};
    use crate::oracle::brute_force_log_z;
    use crate::solver::{brute_force_map, solve};

    fn record(level: usize, trial: usize, status: InstanceStatus, w: f64, ub: f64) -> InstanceRecord {
        InstanceRecord {
            level,
            trial,
            seed: 0,
            status,
            log_weight: w,
            upper_bound: ub,
            nodes: 1,
            wall_time: Duration::ZERO,
            error: None,
        }
    }

    fn config(t: usize, seed: u64) -> WishConfig {
        WishConfig {
            t_override: Some(t),
            master_seed: seed,
            ..WishConfig::default()
        }
    }

    #[test]
    fn level_zero_is_unconstrained_map() {
        let m = binarize(&generate_clique_ising(7, 0.5, 3.0, 2).unwrap());
        let r = run_wish(&m, &config(5, 1), &SerialExecutor).unwrap();
        let map = solve(&m, &ParitySystem::empty(7), Budget::unlimited()).unwrap();
        assert_eq!(r.medians[0], map.best_log_weight);
        assert_eq!(r.records.len(), 8 * 5);
        assert_eq!(r.guarantee, Guarantee::Exact16x);
        assert!(!r.is_certified());
        assert_eq!(r.certificate_voided_by, vec!["t_override".to_string()]);
    }

    #[test]
    fn records_reproduce_their_instances() {
        let m = binarize(&generate_clique_ising(6, 0.5, 3.0, 4).unwrap());
        let r = run_wish(&m, &config(3, 9), &SerialExecutor).unwrap();
        for rec in &r.records {
            assert_eq!(rec.seed, instance_seed(9, rec.level, rec.trial));
            let mut rng = ChaCha8Rng::seed_from_u64(rec.seed);
            let sys = ParitySystem::sample(6, rec.level, &mut rng);
            assert_eq!(brute_force_map(&m, &sys, 24).unwrap().best_log_weight, rec.log_weight);
        }
    }

    #[test]
    fn pool_and_serial_agree() {
        let m = binarize(&generate_clique_ising(8, 0.3, 2.0, 5).unwrap());
        let a = run_wish(&m, &config(7, 3), &SerialExecutor).unwrap();
        let b = run_wish(&m, &config(7, 3), &PoolExecutor::new(4).unwrap()).unwrap();
        assert!(a.same_outcome(&b));
        let c = run_wish(&m, &config(7, 4), &SerialExecutor).unwrap();
        assert!(!a.same_outcome(&c));
    }

    #[test]
    fn uniform_model_estimate_within_factor_16() {
        let m = binarize(&FactorGraph::new(vec![2; 4], vec![]).unwrap());
        let log_z = 4.0 * std::f64::consts::LN_2;
        let hits = (0..50)
            .filter(|&s| {
                let r = run_wish(&m, &config(compute_t(0.1, 0.0042, 4).unwrap().min(31), s), &SerialExecutor).unwrap();
                (r.log_estimate - log_z).abs() <= log_factor(2)
            })
            .count();
        assert!(hits >= 45, "{hits}/50");
    }

    #[test]
    fn single_configuration_model() {
        // weight 1 on 000, 0 elsewhere
        let text = "MARKOV\n3\n2 2 2\n1\n3 0 1 2\n8\n1 0 0 0 0 0 0 0\n";
        let m = binarize(&parse_uai(text).unwrap());
        let hits = (0..50)
            .filter(|&s| {
                let r = run_wish(&m, &config(15, s), &SerialExecutor).unwrap();
                assert_eq!(r.medians[0], 0.0);
                r.log_estimate.abs() <= log_factor(2)
            })
            .count();
        assert!(hits >= 45, "{hits}/50");
        assert_eq!(brute_force_log_z(&m, 24).unwrap(), 0.0);
    }

    #[test]
    fn guarantee_classification() {
        let cfg = WishConfig::default();
        let exact = vec![
            record(0, 0, InstanceStatus::Optimal, 1.0, 1.0),
            record(1, 0, InstanceStatus::Empty, f64::NEG_INFINITY, f64::NEG_INFINITY),
        ];
        let r = aggregate(1, 1, exact.clone(), &cfg);
        assert_eq!(r.guarantee, Guarantee::Exact16x);
        assert!(r.is_certified());

        let mut partial = exact.clone();
        partial[1] = record(1, 0, InstanceStatus::Timeout, 0.5, 0.5 + 2f64.ln());
        let r = aggregate(1, 1, partial, &cfg);
        match r.guarantee {
            Guarantee::Factor16L { log_l } => assert!((log_l - 2f64.ln()).abs() < 1e-15),
            other => panic!("{other:?}"),
        }

        let mut unknown = exact.clone();
        unknown[1] = record(1, 0, InstanceStatus::Timeout, f64::NEG_INFINITY, 3.0);
        assert_eq!(aggregate(1, 1, unknown, &cfg).guarantee, Guarantee::LowerBound);

        let mut failed = exact;
        failed[0].status = InstanceStatus::Failed;
        assert_eq!(aggregate(1, 1, failed, &cfg).guarantee, Guarantee::LowerBound);
    }

    #[test]
    fn estimate_is_monotone_in_each_instance_value() {
        let m = binarize(&generate_clique_ising(6, 0.5, 3.0, 8).unwrap());
        let base = run_wish(&m, &config(5, 2), &SerialExecutor).unwrap();
        let cfg = config(5, 2);
        for k in 0..base.records.len() {
            let mut lowered = base.records.clone();
            lowered[k].log_weight -= 1.0;
            lowered[k].status = InstanceStatus::Timeout;
            let r = aggregate(base.n, base.t, lowered, &cfg);
            assert!(r.log_estimate <= base.log_estimate);
        }
    }

    #[test]
    fn early_stop_truncates_and_voids() {
        let text = "MARKOV\n4\n2 2 2 2\n1\n1 0\n2\n1 0\n";
        let m = binarize(&parse_uai(text).unwrap());
        let cfg = WishConfig {
            early_stop: Some(1),
            ..config(3, 1)
        };
        let r = run_wish(&m, &cfg, &SerialExecutor).unwrap();
        assert!(r.records.len() <= 5 * 3);
        assert!(r.certificate_voided_by.contains(&"early_stop".to_string()));
    }

    #[test]
    fn refine_power_and_cap() {
        let m = binarize(&generate_clique_ising(3, 0.5, 3.0, 1).unwrap());
        let r = refine(&m, 3.0, &config(5, 1), &SerialExecutor).unwrap();
        assert_eq!(r.power, 2);
        assert_eq!(r.inner.n, 6);
        assert!((r.factor - 4.0).abs() < 1e-12);
        assert_eq!(r.log_estimate, r.inner.log_estimate / 2.0);
        let one = refine(&m, 15.0, &config(5, 1), &SerialExecutor).unwrap();
        let plain = run_wish(&m, &config(5, 1), &SerialExecutor).unwrap();
        assert!(one.inner.same_outcome(&plain));
        let capped = WishConfig {
            refine_bit_cap: 5,
            ..config(5, 1)
        };
        assert!(matches!(refine(&m, 3.0, &capped, &SerialExecutor), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn invalid_configs() {
        let m = binarize(&FactorGraph::new(vec![2; 2], vec![]).unwrap());
        for bad in [
            WishConfig { delta: 0.0, ..Default::default() },
            WishConfig { alpha: -1.0, ..Default::default() },
            WishConfig { t_override: Some(0), ..Default::default() },
        ] {
            assert!(run_wish(&m, &bad, &SerialExecutor).is_err());
        }
        let empty = binarize(&FactorGraph::new(vec![], vec![]).unwrap());
        assert!(run_wish(&empty, &WishConfig::default(), &SerialExecutor).is_err());
    }
}
