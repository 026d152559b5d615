//! JSON documents emitted by the command line tool. Log values are natural
//! logs; `-inf` is written as `null` and every log value has a `log10` twin.

use serde::Serialize;

use crate::logspace::to_log10;
use crate::model::BinaryModel;
use crate::solver::Budget;
use crate::wish::{Guarantee, InstanceRecord, InstanceStatus, RefineResult, WishConfig, WishResult};

/// Bumped on any incompatible change to the documents below.
pub const SCHEMA_VERSION: u32 = 1;

pub(crate) fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn log10(x: f64) -> Option<f64> {
    finite(to_log10(x))
}

#[derive(Debug, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

impl ToolInfo {
    pub fn current() -> Self {
        ToolInfo {
            name: "wish",
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ModelInfo {
    pub digest: String,
    pub variables: usize,
    pub factors: usize,
    pub bits: usize,
}

impl ModelInfo {
    pub fn of(model: &BinaryModel, original: &crate::model::FactorGraph) -> Self {
        ModelInfo {
            digest: original.digest(),
            variables: original.num_variables(),
            factors: original.factors().len(),
            bits: model.num_bits(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ConfigEcho {
    pub delta: f64,
    pub alpha: f64,
    pub t_override: Option<usize>,
    pub c: usize,
    pub budget_nodes: Option<u64>,
    pub budget_seconds: Option<f64>,
    pub seed: u64,
    pub epsilon: Option<f64>,
}

impl ConfigEcho {
    pub fn new(config: &WishConfig, epsilon: Option<f64>) -> Self {
        let Budget { max_nodes, max_time } = config.budget;
        ConfigEcho {
            delta: config.delta,
            alpha: config.alpha,
            t_override: config.t_override,
            c: config.c,
            budget_nodes: max_nodes,
            budget_seconds: max_time.map(|d| d.as_secs_f64()),
            seed: config.master_seed,
            epsilon,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ResultSummary {
    pub n: usize,
    #[serde(rename = "T")]
    pub t: usize,
    pub medians: Vec<Option<f64>>,
    pub log_estimate: Option<f64>,
    pub log10_estimate: Option<f64>,
    pub guarantee: &'static str,
    /// `ln L` for `FACTOR_16L`.
    pub log_l: Option<f64>,
    pub failure_probability: f64,
    pub certified: bool,
    pub certificate_voided_by: Vec<String>,
}

impl ResultSummary {
    pub fn new(r: &WishResult) -> Self {
        ResultSummary {
            n: r.n,
            t: r.t,
            medians: r.medians.iter().map(|&m| finite(m)).collect(),
            log_estimate: finite(r.log_estimate),
            log10_estimate: log10(r.log_estimate),
            guarantee: r.guarantee.label(),
            log_l: match r.guarantee {
                Guarantee::Factor16L { log_l } => Some(log_l),
                _ => None,
            },
            failure_probability: r.failure_probability,
            certified: r.is_certified(),
            certificate_voided_by: r.certificate_voided_by.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct InstanceRow {
    pub i: usize,
    pub t: usize,
    pub seed: u64,
    pub status: InstanceStatus,
    pub log_weight: Option<f64>,
    pub upper_bound: Option<f64>,
    pub nodes: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl InstanceRow {
    pub fn new(r: &InstanceRecord, timings: bool) -> Self {
        InstanceRow {
            i: r.level,
            t: r.trial,
            seed: r.seed,
            status: r.status,
            log_weight: finite(r.log_weight),
            upper_bound: finite(r.upper_bound),
            nodes: r.nodes,
            wall_time_seconds: timings.then_some(r.wall_time.as_secs_f64()),
            error: r.error.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Totals {
    pub instances: usize,
    pub optimal: usize,
    pub timeout: usize,
    pub empty: usize,
    pub failed: usize,
    pub nodes: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
}

impl Totals {
    pub fn new(records: &[InstanceRecord], wall: Option<f64>) -> Self {
        let count = |s: InstanceStatus| records.iter().filter(|r| r.status == s).count();
        Totals {
            instances: records.len(),
            optimal: count(InstanceStatus::Optimal),
            timeout: count(InstanceStatus::Timeout),
            empty: count(InstanceStatus::Empty),
            failed: count(InstanceStatus::Failed),
            nodes: records.iter().map(|r| r.nodes).sum(),
            wall_time_seconds: wall,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Refinement {
    pub power: usize,
    pub factor: f64,
    pub log_estimate: Option<f64>,
    pub log10_estimate: Option<f64>,
}

impl Refinement {
    pub fn new(r: &RefineResult) -> Self {
        Refinement {
            power: r.power,
            factor: r.factor,
            log_estimate: finite(r.log_estimate),
            log10_estimate: log10(r.log_estimate),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub model: ModelInfo,
    pub config: ConfigEcho,
    pub result: ResultSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refinement: Option<Refinement>,
    pub instances: Vec<InstanceRow>,
    pub totals: Totals,
}

#[derive(Debug, Serialize)]
pub struct OracleTail {
    pub u: f64,
    #[serde(rename = "G")]
    pub g: u64,
}

#[derive(Debug, Serialize)]
pub struct OracleReport {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub model: ModelInfo,
    pub log_z: Option<f64>,
    pub log10_z: Option<f64>,
    /// `b_0..b_n`.
    pub quantiles: Vec<Option<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail: Option<OracleTail>,
}

impl OracleReport {
    pub fn new(model: ModelInfo, log_z: f64, quantiles: &[f64], tail: Option<OracleTail>) -> Self {
        OracleReport {
            schema_version: SCHEMA_VERSION,
            tool: ToolInfo::current(),
            model,
            log_z: finite(log_z),
            log10_z: log10(log_z),
            quantiles: quantiles.iter().map(|&b| finite(b)).collect(),
            tail,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct TailReport {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub model: ModelInfo,
    pub config: ConfigEcho,
    pub u: f64,
    /// `null` when `M_0 < ln u`.
    pub q: Option<usize>,
    /// `2^q`, or 0.
    pub estimate: f64,
    /// Exact count when the model is within the oracle cap.
    pub oracle_g: Option<u64>,
    pub result: ResultSummary,
    pub totals: Totals,
}
