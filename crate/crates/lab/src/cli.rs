//! Command-line interface. Parsing lives here so it can be driven from tests.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use cocycle_core::graphon::{
    b_functional, convolve, cut_norm_with, rate_function, CutMode, GraphonJson,
};
use cocycle_core::regularity::fk_decompose_graphon;
use cocycle_core::{GroupStepFunction, HomologyReport, SymmetricDistribution, TwoComplex};
use rayon::prelude::*;
use serde_json::json;

use crate::certify::{run_certification, CertifyOptions};
use crate::config::{parse_group, parse_n_range, ExperimentConfig, Model};
use crate::layers::run_layer_audit;
use crate::ldp::run_ldp_numerics;
use crate::models::ComplexSampler;
use crate::rng::replica_rng;
use crate::table::{render_all, Format, Table};
use crate::trends::{run_betti_trend, run_ez1_trend, violation_count};

#[derive(Debug, Parser)]
#[command(name = "cocycle-lab", version, about = "Experiments on random 2-complexes and cochain graphons")]
pub struct Cli {
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value = "csv")]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact and statistical certificates; nonzero exit on any failure.
    Certify {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Skip the n = 6 enumeration.
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        corrupt_kernel: bool,
    },
    /// Normalized log of the mean cocycle count against n.
    Ez1Trend(TrendArgs),
    /// Layer frequencies of b(W_f) and the exact upper bound audit.
    LayerAudit {
        #[arg(long, default_value = "5..=8")]
        n: String,
        #[arg(long, default_value = "2")]
        group: String,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 10)]
        layers: usize,
    },
    /// MGF gaps, dual values and Gibbs slack.
    LdpNumerics {
        #[arg(long, default_value = "4,8,16,32")]
        n: String,
        #[arg(long, default_value = "3")]
        group: String,
        /// Dual trials; weak duality and Gibbs use ten times as many.
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Quantiles of dim H_1(F_p) / n^2 against n.
    BettiTrend {
        #[command(flatten)]
        trend: TrendArgs,
        /// Comma-separated primes.
        #[arg(long, default_value = "2")]
        p: String,
    },
    /// Draw complexes from a model.
    Sample {
        #[arg(long, default_value = "hypertree")]
        model: Model,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 1)]
        samples: usize,
    },
    /// Homology of a complex given as JSON.
    Homology {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        full_snf: bool,
    },
    /// Operations on step cochain graphons given as JSON
    #[command(subcommand)]
    Graphon(GraphonCommand),
}

#[derive(Debug, Args)]
pub struct TrendArgs {
    #[arg(long, default_value = "one-out")]
    pub model: Model,
    #[arg(long, default_value = "6..=20:2")]
    pub n: String,
    #[arg(long, default_value = "2")]
    pub group: String,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Linial-Meshulam parameter.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
}

#[derive(Debug, Subcommand)]
pub enum GraphonCommand {
    /// Cut norm summed over group elements.
    Cutnorm {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// The functional b(W) = <W, log(W*W)>.
    B {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Rate I_nu(W); uniform nu unless a JSON map is given.
    Rate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        nu: Option<PathBuf>,
    },
    /// V * W on the common refinement.
    Convolve {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        with: PathBuf,
    },
    /// Weak regularity decomposition trace.
    Fk {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0.2)]
        eps: f64,
    },
}

/// Bytes to emit and whether every check passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub output: Vec<u8>,
    pub passed: bool,
}

fn trend_config(a: &TrendArgs, seed: u64) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::new(a.model, parse_n_range(&a.n)?, parse_group(&a.group)?, a.samples, seed);
    cfg.c = a.c;
    Ok(cfg)
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn json_bytes(v: &serde_json::Value) -> Result<Vec<u8>> {
    let mut buf = serde_json::to_vec_pretty(v)?;
    buf.push(b'\n');
    Ok(buf)
}

fn function_json(f: &GroupStepFunction<f64>) -> serde_json::Value {
    let k = f.parts();
    let order = f.group().order();
    let values: Vec<Vec<Vec<f64>>> = (0..k)
        .map(|i| (0..k).map(|j| (0..order).map(|g| *f.get(i, j, g)).collect()).collect())
        .collect();
    json!({ "group": f.group(), "part_measures": f.measures(), "values": values })
}

fn scalar(name: &str, value: f64, format: Format) -> Result<Vec<u8>> {
    let mut t = Table::new(name, &["quantity", "value"]);
    t.push(vec![name.into(), value.into()]);
    t.render(format)
}

/// Errors from here are usage or input errors.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    let format = cli.format;
    let seed = cli.seed;
    let ok = |output| Ok(Outcome { output, passed: true });
    match &cli.command {
        Command::Certify { samples, quick, corrupt_kernel } => {
            let cfg = ExperimentConfig::new(Model::Hypertree, vec![5], parse_group("2")?, *samples, seed);
            cfg.validate()?;
            let opts = CertifyOptions { corrupt_kernel: *corrupt_kernel, quick: *quick };
            let r = run_certification(&cfg, opts)?;
            Ok(Outcome { output: r.to_table().render(format)?, passed: r.passed() })
        }
        Command::Ez1Trend(a) => {
            let t = run_ez1_trend(&trend_config(a, seed)?)?;
            Ok(Outcome { passed: violation_count(&t) <= 1, output: t.render(format)? })
        }
        Command::BettiTrend { trend, p } => {
            let mut cfg = trend_config(trend, seed)?;
            cfg.primes = p.split(',').map(|s| s.trim().parse()).collect::<Result<_, _>>()?;
            let t = run_betti_trend(&cfg)?;
            Ok(Outcome { passed: violation_count(&t) <= cfg.primes.len(), output: t.render(format)? })
        }
        Command::LayerAudit { n, group, samples, layers } => {
            let mut cfg = ExperimentConfig::new(Model::OneOut, parse_n_range(n)?, parse_group(group)?, *samples, seed);
            cfg.layers = *layers;
            let t = run_layer_audit(&cfg)?;
            Ok(Outcome { output: render_all(&t.to_tables(), format)?, passed: t.passed() })
        }
        Command::LdpNumerics { n, group, samples } => {
            let cfg = ExperimentConfig::new(Model::OneOut, parse_n_range(n)?, parse_group(group)?, *samples, seed);
            let r = run_ldp_numerics(&cfg)?;
            Ok(Outcome { output: render_all(&[r.mgf.clone(), r.checks.clone()], format)?, passed: r.passed() })
        }
        Command::Sample { model, n, c, samples } => {
            let sampler = ComplexSampler::new(*model, *n, *c)?;
            let xs = (0..*samples as u64)
                .into_par_iter()
                .map(|i| sampler.sample(&mut replica_rng(seed, "sample", *n, i)))
                .collect::<Result<Vec<TwoComplex>>>()?;
            match format {
                Format::Json => ok(json_bytes(&serde_json::to_value(&xs)?)?),
                Format::Csv => {
                    let mut t = Table::new("samples", &["sample", "n", "faces", "triangles"]);
                    for (i, x) in xs.iter().enumerate() {
                        let tri: Vec<String> =
                            x.triangles().iter().map(|[a, b, c]| format!("{a}-{b}-{c}")).collect();
                        t.push(vec![i.into(), x.n().into(), x.face_count().into(), tri.join(" ").into()]);
                    }
                    ok(t.render(format)?)
                }
            }
        }
        Command::Homology { input, p, full_snf } => {
            let x: TwoComplex = serde_json::from_str(&read(input)?)?;
            let r = HomologyReport::new(&x, *p, *full_snf)?;
            match format {
                Format::Json => ok(json_bytes(&serde_json::to_value(&r)?)?),
                Format::Csv => {
                    let mut t = Table::new("homology", &["quantity", "value"]);
                    let v = serde_json::to_value(&r)?;
                    for (k, val) in v.as_object().expect("struct") {
                        t.push(vec![k.as_str().into(), val.to_string().into()]);
                    }
                    ok(t.render(format)?)
                }
            }
        }
        Command::Graphon(g) => graphon(g, format),
    }
}

fn graphon(cmd: &GraphonCommand, format: Format) -> Result<Outcome> {
    let load = |p: &PathBuf| -> Result<_> { Ok(GraphonJson::parse(&read(p)?)?) };
    let output = match cmd {
        GraphonCommand::Cutnorm { input } => {
            let (v, exact) = cut_norm_with(&load(input)?, CutMode::default())?;
            let mut t = Table::new("cut_norm", &["cut_norm", "exact"]);
            t.push(vec![v.into(), exact.into()]);
            t.render(format)?
        }
        GraphonCommand::B { input } => scalar("b", b_functional(&load(input)?)?, format)?,
        GraphonCommand::Rate { input, nu } => {
            let w = load(input)?;
            let nu = match nu {
                Some(p) => SymmetricDistribution::from_json_map(w.group().clone(), &read(p)?)?,
                None => SymmetricDistribution::uniform(w.group().clone()),
            };
            scalar("rate", rate_function(&w, &nu)?, format)?
        }
        GraphonCommand::Convolve { input, with } => {
            let f = convolve(&load(input)?, &load(with)?)?;
            match format {
                Format::Json => json_bytes(&function_json(&f))?,
                Format::Csv => {
                    let mut t = Table::new("convolution", &["i", "j", "g", "value"]);
                    for i in 0..f.parts() {
                        for j in 0..f.parts() {
                            for g in 0..f.group().order() {
                                t.push(vec![i.into(), j.into(), f.group().key_of(g).into(), (*f.get(i, j, g)).into()]);
                            }
                        }
                    }
                    t.render(format)?
                }
            }
        }
        GraphonCommand::Fk { input, eps } => {
            let trace = fk_decompose_graphon(&load(input)?, *eps, CutMode::default())?;
            match format {
                Format::Json => json_bytes(&serde_json::to_value(&trace)?)?,
                Format::Csv => {
                    let mut t = Table::new(
                        "fk_rounds",
                        &["round", "slice", "witness", "energy_before", "energy_after", "parts_after"],
                    );
                    for (i, r) in trace.rounds.iter().enumerate() {
                        t.push(vec![
                            i.into(),
                            r.slice.map_or(-1, |s| s as i64).to_string().into(),
                            r.witness.into(),
                            r.energy_before.into(),
                            r.energy_after.into(),
                            r.parts_after.into(),
                        ]);
                    }
                    t.render(format)?
                }
            }
        }
    };
    Ok(Outcome { output, passed: true })
}
