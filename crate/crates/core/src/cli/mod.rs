//! The `wish` command line tool. [`main_with_args`] parses arguments, runs
//! one command and writes a single JSON (or UAI) document to `out`.
//!
//! Exit codes: 0 guarantee `EXACT_16X` (or a command without a guarantee),
//! 3 degraded guarantee, 1 input error, 2 usage error.

pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::model::{binarize, generate_clique_ising, generate_grid_ising, parse_uai, write_uai, BinaryModel, FactorGraph, IsingMode};
use crate::oracle::{brute_force_quantiles, DEFAULT_ORACLE_CAP};
use crate::solver::Budget;
use crate::wish::{refine, run_wish, Guarantee, PoolExecutor, WishConfig, WishResult, ALPHA_BOUND};

use report::*;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DEGRADED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "wish", version, about = "Partition function estimation with random parity constraints")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the partition function of a UAI model.
    Run {
        model: PathBuf,
        #[command(flatten)]
        wish: WishArgs,
        /// Target accuracy: runs on a power model for a (1 + epsilon)-approximation.
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Estimate the number of configurations with weight at least `u`.
    Tail {
        model: PathBuf,
        #[arg(long)]
        tail: f64,
        #[command(flatten)]
        wish: WishArgs,
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        oracle_cap: usize,
    },
    /// Exact partition function and quantiles by enumeration.
    Oracle {
        model: PathBuf,
        #[arg(long)]
        tail: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        oracle_cap: usize,
    },
    /// Print a random Ising model in UAI format.
    #[command(subcommand)]
    Generate(GenerateCommand),
}

#[derive(Debug, Subcommand)]
pub enum GenerateCommand {
    /// Complete graph with a ferromagnetic chain.
    Clique {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        w: f64,
        /// Defaults to `10 w`.
        #[arg(long)]
        chain_strength: Option<f64>,
        #[arg(long, env = "WISH_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Two-dimensional lattice with local fields.
    Grid {
        rows: usize,
        cols: usize,
        #[arg(long, default_value = "mixed")]
        mode: IsingMode,
        #[arg(long, default_value_t = 1.0)]
        w: f64,
        #[arg(long, default_value_t = 1.0)]
        f: f64,
        #[arg(long, env = "WISH_SEED", default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Args)]
pub struct WishArgs {
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    #[arg(long, default_value_t = ALPHA_BOUND)]
    pub alpha: f64,
    #[arg(long)]
    pub t_override: Option<usize>,
    #[arg(long, env = "WISH_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub budget_nodes: Option<u64>,
    #[arg(long)]
    pub budget_seconds: Option<f64>,
    /// Include wall-clock times (makes the output nondeterministic).
    #[arg(long)]
    pub timings: bool,
}

impl WishArgs {
    fn config(&self) -> Result<WishConfig, String> {
        let max_time = match self.budget_seconds {
            None => None,
            Some(s) if s > 0.0 && s.is_finite() => Some(Duration::from_secs_f64(s)),
            Some(s) => return Err(format!("--budget-seconds must be positive, got {s}")),
        };
        let config = WishConfig {
            delta: self.delta,
            alpha: self.alpha,
            t_override: self.t_override,
            budget: Budget {
                max_nodes: self.budget_nodes,
                max_time,
            },
            master_seed: self.seed,
            ..WishConfig::default()
        };
        config.validate().map_err(|e| e.to_string())?;
        Ok(config)
    }

    fn executor(&self) -> Result<PoolExecutor, String> {
        let threads = match self.jobs {
            Some(j) => j,
            None => std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        PoolExecutor::new(threads).map_err(|e| e.to_string())
    }
}

/// A failure with its exit code and message for standard error.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn input(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

fn load(path: &PathBuf) -> Result<(FactorGraph, BinaryModel), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    let graph = parse_uai(&text).map_err(|e| input(format!("{}: {e}", path.display())))?;
    let model = binarize(&graph);
    Ok((graph, model))
}

fn exit_code(result: &WishResult) -> i32 {
    match result.guarantee {
        Guarantee::Exact16x => EXIT_OK,
        _ => EXIT_DEGRADED,
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialization");
    s.push('\n');
    s
}

fn classify(e: Error) -> Failure {
    match e {
        Error::Parse { .. } | Error::InvalidModel(_) => input(e.to_string()),
        _ => usage(e.to_string()),
    }
}

fn cmd_run(model_path: &PathBuf, args: &WishArgs, epsilon: Option<f64>) -> Result<(String, i32), Failure> {
    let config = args.config().map_err(usage)?;
    let executor = args.executor().map_err(usage)?;
    let (graph, model) = load(model_path)?;
    let start = Instant::now();
    let (result, refinement) = match epsilon {
        None => (run_wish(&model, &config, &executor).map_err(classify)?, None),
        Some(eps) => {
            let r = refine(&model, eps, &config, &executor).map_err(classify)?;
            let refinement = Refinement::new(&r);
            (r.inner, Some(refinement))
        }
    };
    let wall = args.timings.then(|| start.elapsed().as_secs_f64());
    let report = RunReport {
        schema_version: SCHEMA_VERSION,
        tool: ToolInfo::current(),
        model: ModelInfo::of(&model, &graph),
        config: ConfigEcho::new(&config, epsilon),
        result: ResultSummary::new(&result),
        refinement,
        instances: result.records.iter().map(|r| InstanceRow::new(r, args.timings)).collect(),
        totals: Totals::new(&result.records, wall),
    };
    Ok((to_json(&report), exit_code(&result)))
}

fn cmd_tail(model_path: &PathBuf, u: f64, args: &WishArgs, oracle_cap: usize) -> Result<(String, i32), Failure> {
    if !(u > 0.0 && u.is_finite()) {
        return Err(usage(format!("--tail must be positive and finite, got {u}")));
    }
    let config = args.config().map_err(usage)?;
    let executor = args.executor().map_err(usage)?;
    let (graph, model) = load(model_path)?;
    let start = Instant::now();
    let result = run_wish(&model, &config, &executor).map_err(classify)?;
    let wall = args.timings.then(|| start.elapsed().as_secs_f64());
    let tail = result.tail(u).map_err(classify)?;
    let oracle_g = if model.num_bits() <= oracle_cap {
        Some(brute_force_quantiles(&model, oracle_cap).map_err(classify)?.tail_count(u.ln()))
    } else {
        None
    };
    let report = TailReport {
        schema_version: SCHEMA_VERSION,
        tool: ToolInfo::current(),
        model: ModelInfo::of(&model, &graph),
        config: ConfigEcho::new(&config, None),
        u,
        q: tail.q,
        estimate: tail.count(),
        oracle_g,
        result: ResultSummary::new(&result),
        totals: Totals::new(&result.records, wall),
    };
    Ok((to_json(&report), exit_code(&result)))
}

fn cmd_oracle(model_path: &PathBuf, tail: Option<f64>, cap: usize) -> Result<(String, i32), Failure> {
    if let Some(u) = tail {
        if !(u > 0.0 && u.is_finite()) {
            return Err(usage(format!("--tail must be positive and finite, got {u}")));
        }
    }
    let (graph, model) = load(model_path)?;
    if model.num_bits() > cap {
        return Err(usage(format!(
            "model has {} bits; enumeration is capped at {cap} (raise --oracle-cap to force it)",
            model.num_bits()
        )));
    }
    let profile = brute_force_quantiles(&model, cap).map_err(classify)?;
    let tail = tail.map(|u| OracleTail {
        u,
        g: profile.tail_count(u.ln()),
    });
    let report = OracleReport::new(ModelInfo::of(&model, &graph), profile.log_z(), &profile.quantiles(), tail);
    Ok((to_json(&report), EXIT_OK))
}

fn cmd_generate(command: &GenerateCommand) -> Result<(String, i32), Failure> {
    let graph = match *command {
        GenerateCommand::Clique { n, w, chain_strength, seed } => {
            generate_clique_ising(n, w, chain_strength.unwrap_or(10.0 * w), seed)
        }
        GenerateCommand::Grid { rows, cols, mode, w, f, seed } => generate_grid_ising(rows, cols, w, f, mode, seed),
    }
    .map_err(|e| usage(e.to_string()))?;
    Ok((write_uai(&graph), EXIT_OK))
}

fn execute(cli: &Cli) -> Result<(String, i32), Failure> {
    match &cli.command {
        Command::Run { model, wish, epsilon } => cmd_run(model, wish, *epsilon),
        Command::Tail {
            model,
            tail,
            wish,
            oracle_cap,
        } => cmd_tail(model, *tail, wish, *oracle_cap),
        Command::Oracle { model, tail, oracle_cap } => cmd_oracle(model, *tail, *oracle_cap),
        Command::Generate(g) => cmd_generate(g),
    }
}

/// Runs the tool and returns its exit code. Output is written only after
/// all work has finished.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(rendered.as_bytes());
                EXIT_USAGE
            } else {
                let _ = out.write_all(rendered.as_bytes());
                EXIT_OK
            };
        }
    };
    match execute(&cli) {
        Ok((text, code)) => {
            if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
                return EXIT_INPUT;
            }
            code
        }
        Err(f) => {
            let _ = writeln!(err, "wish: {}", f.message);
            f.code
        }
    }
}
