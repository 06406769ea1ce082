use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use moment_witness::embed::{recommended_width, Space};
use moment_witness::graph::{Aggregation, CorpusExperiment, DEFAULT_THRESHOLD};
use moment_witness::transport::{BiLipschitzConfig, TransportMethod};
use moment_witness::witness::{CounterexampleKind, SplitRule, DEFAULT_TOLERANCE};
use moment_witness::{Activation, Seed};
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Bilipschitz,
    SeparationCorpus,
    Counterexample,
    JacobianMap,
    Instability,
    TsystemCheck,
    StaircaseRoundtrip,
    WitnessVerify,
}

/// Raw command line. Unset options take per-command defaults.
#[derive(Debug, Parser)]
#[command(name = "moment-witness", version, about = "Seeded moment-embedding experiments")]
pub struct Cli {
    #[arg(long, value_enum)]
    pub command: Command,
    /// Required; there is no clock-derived default.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,

    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    /// Comma-separated widths.
    #[arg(long = "m-list", value_delimiter = ',')]
    pub m_list: Option<Vec<usize>>,
    /// Comma-separated activation names.
    #[arg(long, value_delimiter = ',')]
    pub activations: Option<Vec<String>>,
    #[arg(long)]
    pub instances: Option<usize>,
    #[arg(long = "rho-min")]
    pub rho_min: Option<f64>,
    #[arg(long = "rho-max")]
    pub rho_max: Option<f64>,
    /// Message-passing and WL rounds.
    #[arg(long = "T")]
    pub rounds: Option<usize>,
    #[arg(long = "dataset-dir")]
    pub dataset_dir: Option<PathBuf>,
    #[arg(long = "dataset-name")]
    pub dataset_name: Option<String>,
    #[arg(long)]
    pub threshold: Option<f64>,

    /// Exponent of the Wasserstein denominator.
    #[arg(long)]
    pub p: Option<u32>,
    #[arg(long)]
    pub sinkhorn: bool,
    #[arg(long = "no-inject")]
    pub no_inject: bool,
    /// Number of parameter seeds for the corpus run, counted from `--seed`.
    #[arg(long)]
    pub seeds: Option<u64>,
    #[arg(long)]
    pub gcn: bool,
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long)]
    pub split: Option<String>,
    #[arg(long = "alphabet-size", value_delimiter = ',')]
    pub alphabet_size: Option<Vec<usize>>,
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub x0: Option<f64>,
    #[arg(long = "eps-list", value_delimiter = ',')]
    pub eps_list: Option<Vec<f64>>,
    #[arg(long)]
    pub draws: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub measure1: Option<PathBuf>,
    #[arg(long)]
    pub measure2: Option<PathBuf>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
}

/// Fully resolved experiment. Serialized verbatim into the sidecar.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub output: PathBuf,
    pub params: Params,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Params {
    Bilipschitz(BiLipschitzConfig),
    SeparationCorpus {
        dataset_dir: Option<PathBuf>,
        dataset_name: Option<String>,
        /// Node bound of the built-in corpus when no dataset is given.
        max_nodes: usize,
        experiment: CorpusExperiment,
    },
    Counterexample {
        kind: CounterexampleKind,
        activation: Activation,
        width: usize,
        d: usize,
        split: SplitRule,
        alphabet_size: usize,
    },
    JacobianMap {
        activation: Activation,
        width: usize,
        grid: usize,
    },
    Instability {
        activation: Activation,
        width: usize,
        x0: f64,
        eps_list: Vec<f64>,
    },
    TsystemCheck {
        draws: usize,
        k: usize,
        half_range: f64,
    },
    StaircaseRoundtrip {
        draws: usize,
        alphabet_sizes: Vec<usize>,
        max_weight: i32,
    },
    WitnessVerify {
        measure1: PathBuf,
        measure2: PathBuf,
        activation: Activation,
        width: Option<usize>,
        trials: usize,
        tolerance: f64,
    },
}

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn activations(names: &Option<Vec<String>>, default: &[Activation]) -> Result<Vec<Activation>, CliError> {
    match names {
        None => Ok(default.to_vec()),
        Some(list) => list
            .iter()
            .map(|s| Activation::from_name(s.trim()).map_err(|e| config(e.to_string())))
            .collect(),
    }
}

fn single_activation(cli: &Cli, default: Activation) -> Result<Activation, CliError> {
    let list = activations(&cli.activations, &[default])?;
    match list.as_slice() {
        [a] => Ok(*a),
        _ => Err(config("this command takes exactly one activation")),
    }
}

fn single_width(cli: &Cli, default: usize) -> Result<usize, CliError> {
    match cli.m_list.as_deref() {
        None => Ok(default),
        Some([m]) if *m > 0 => Ok(*m),
        _ => Err(config("this command takes exactly one positive width in --m-list")),
    }
}

fn parse_kind(s: &str) -> Result<CounterexampleKind, CliError> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| config(format!("unknown counterexample kind `{s}`")))
}

fn parse_split(s: &str) -> Result<SplitRule, CliError> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| config(format!("unknown split rule `{s}`")))
}

const ANALYTIC: [Activation; 3] = [Activation::Tanh, Activation::Sigmoid, Activation::Silu];

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<RunConfig, CliError> {
        let seed = cli.seed.ok_or_else(|| config("--seed is required"))?;
        let params = match cli.command {
            Command::Bilipschitz => {
                let base = BiLipschitzConfig::new(cli.d.unwrap_or(3), cli.n.unwrap_or(10), Seed(seed));
                let cfg = BiLipschitzConfig {
                    rho_min: cli.rho_min.unwrap_or(base.rho_min),
                    rho_max: cli.rho_max.unwrap_or(base.rho_max),
                    instances: cli.instances.unwrap_or(base.instances),
                    widths: cli.m_list.clone().unwrap_or(base.widths.clone()),
                    activations: activations(&cli.activations, &base.activations)?,
                    p: cli.p.unwrap_or(1),
                    transport: if cli.sinkhorn { TransportMethod::Sinkhorn } else { TransportMethod::Exact },
                    inject_counterexample: !cli.no_inject,
                    ..base
                };
                cfg.validate().map_err(|e| config(e.to_string()))?;
                Params::Bilipschitz(cfg)
            }
            Command::SeparationCorpus => {
                let count = cli.seeds.unwrap_or(3);
                if count == 0 {
                    return Err(config("--seeds must be positive"));
                }
                let threshold = cli.threshold.unwrap_or(DEFAULT_THRESHOLD);
                if threshold.is_nan() || threshold <= 0.0 {
                    return Err(config("--threshold must be positive"));
                }
                let mut default = ANALYTIC.to_vec();
                default.extend([Activation::Relu, Activation::LeakyRelu, Activation::HardTanh]);
                Params::SeparationCorpus {
                    dataset_dir: cli.dataset_dir.clone(),
                    dataset_name: cli.dataset_name.clone(),
                    max_nodes: cli.n.unwrap_or(6),
                    experiment: CorpusExperiment {
                        rounds: cli.rounds.unwrap_or(3),
                        activations: activations(&cli.activations, &default)?,
                        widths: cli.m_list.clone().unwrap_or(vec![1]),
                        seeds: (0..count).map(|i| seed.wrapping_add(i)).collect(),
                        aggregation: if cli.gcn { Aggregation::Gcn } else { Aggregation::Sum },
                        threshold,
                    },
                }
            }
            Command::Counterexample => {
                let kind = parse_kind(cli.kind.as_deref().unwrap_or("set-split"))?;
                let d = cli.d.unwrap_or(if kind == CounterexampleKind::Pigeonhole { 1 } else { 2 });
                if kind == CounterexampleKind::Pigeonhole && d != 1 {
                    return Err(config("pigeonhole counterexamples need --d 1"));
                }
                let activation = single_activation(cli, Activation::Relu)?;
                if !activation.is_piecewise_linear() {
                    return Err(config(format!("{activation} is not piecewise linear")));
                }
                let alphabet_size = match cli.alphabet_size.as_deref() {
                    None => 256,
                    Some([s]) if *s >= 3 => *s,
                    _ => return Err(config("--alphabet-size takes one value ≥ 3")),
                };
                Params::Counterexample {
                    kind,
                    activation,
                    width: single_width(cli, 10)?,
                    d,
                    split: parse_split(cli.split.as_deref().unwrap_or("sign"))?,
                    alphabet_size,
                }
            }
            Command::JacobianMap => Params::JacobianMap {
                activation: single_activation(cli, Activation::Relu)?,
                width: single_width(cli, 10)?,
                grid: match cli.grid.unwrap_or(100) {
                    g if g >= 2 => g,
                    _ => return Err(config("--grid must be at least 2")),
                },
            },
            Command::Instability => {
                let eps_list = cli.eps_list.clone().unwrap_or(vec![1e-1, 1e-2, 1e-3, 1e-4]);
                if eps_list.is_empty() || eps_list.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
                    return Err(config("--eps-list must hold positive values"));
                }
                Params::Instability {
                    activation: single_activation(cli, Activation::Tanh)?,
                    width: single_width(cli, 10)?,
                    x0: cli.x0.unwrap_or(0.3),
                    eps_list,
                }
            }
            Command::TsystemCheck => Params::TsystemCheck {
                draws: cli.draws.unwrap_or(500),
                k: match cli.k.unwrap_or(6) {
                    k if k >= 1 => k,
                    _ => return Err(config("--k must be positive")),
                },
                half_range: 3.0,
            },
            Command::StaircaseRoundtrip => {
                let alphabet_sizes = cli.alphabet_size.clone().unwrap_or(vec![3, 10, 50]);
                if alphabet_sizes.is_empty() || alphabet_sizes.contains(&0) {
                    return Err(config("--alphabet-size values must be positive"));
                }
                Params::StaircaseRoundtrip {
                    draws: cli.draws.unwrap_or(1000),
                    alphabet_sizes,
                    max_weight: 5,
                }
            }
            Command::WitnessVerify => {
                let (Some(m1), Some(m2)) = (cli.measure1.clone(), cli.measure2.clone()) else {
                    return Err(config("witness-verify needs --measure1 and --measure2"));
                };
                Params::WitnessVerify {
                    measure1: m1,
                    measure2: m2,
                    activation: single_activation(cli, Activation::Tanh)?,
                    width: cli.m_list.as_ref().map(|_| single_width(cli, 1)).transpose()?,
                    trials: match cli.trials.unwrap_or(1) {
                        t if t >= 1 => t,
                        _ => return Err(config("--trials must be positive")),
                    },
                    tolerance: cli.tol.unwrap_or(DEFAULT_TOLERANCE),
                }
            }
        };
        Ok(RunConfig {
            seed,
            output: cli.out.clone(),
            params,
        })
    }
}

/// Width for a pair of measures when none is given.
pub(crate) fn default_width(n: usize, d: usize) -> usize {
    recommended_width(Space::MeasuresRd, n, d)
}
