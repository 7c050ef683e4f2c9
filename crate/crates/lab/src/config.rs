use std::fmt;
use std::str::FromStr;

use anyhow::{bail, Result};
use cocycle_core::GroupSpec;
use serde::Serialize;

/// Random 2-complex model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Hypertree,
    OneOut,
    /// Linial-Meshulam with face probability `c/n`.
    Lm,
}

impl FromStr for Model {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hypertree" => Ok(Model::Hypertree),
            "one-out" => Ok(Model::OneOut),
            "lm" => Ok(Model::Lm),
            other => bail!("unknown model {other:?} (hypertree, one-out, lm)"),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Hypertree => "hypertree",
            Model::OneOut => "one-out",
            Model::Lm => "lm",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    /// Slack allowed in the upper bound audit.
    pub bound_slack: f64,
    /// Gibbs and weak-duality slack.
    pub inequality: f64,
    /// Dual value versus rate.
    pub dual_gap: f64,
    pub kernel_certificate: f64,
    pub chi_square_p: f64,
    /// Standard errors allowed per trend step.
    pub trend_se: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            bound_slack: 1e-9,
            inequality: 1e-12,
            dual_gap: 1e-10,
            kernel_certificate: 1e-8,
            chi_square_p: 0.01,
            trend_se: 2.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub model: Model,
    pub n_values: Vec<usize>,
    pub group: GroupSpec,
    pub primes: Vec<u64>,
    pub samples: usize,
    pub seed: u64,
    /// Linial-Meshulam parameter.
    pub c: f64,
    /// Number of `b`-layers; `eps = log|G| / layers`.
    pub layers: usize,
    pub tolerances: Tolerances,
}

impl ExperimentConfig {
    pub fn new(model: Model, n_values: Vec<usize>, group: GroupSpec, samples: usize, seed: u64) -> Self {
        ExperimentConfig {
            model,
            n_values,
            group,
            primes: vec![2],
            samples,
            seed,
            c: 1.0,
            layers: 10,
            tolerances: Tolerances::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() {
            bail!("empty n range");
        }
        if let Some(n) = self.n_values.iter().find(|&&n| n < 3) {
            bail!("n = {n}, need n >= 3");
        }
        if self.samples == 0 {
            bail!("samples must be at least 1");
        }
        if self.layers == 0 {
            bail!("layers must be at least 1");
        }
        if self.primes.iter().any(|&p| !cocycle_core::homology::is_prime(p)) {
            bail!("prime list contains a non-prime: {:?}", self.primes);
        }
        if self.model == Model::Lm {
            if let Some(n) = self.n_values.iter().find(|&&n| self.c < 0.0 || self.c > n as f64) {
                bail!("c = {} gives face probability outside [0, 1] at n = {n}", self.c);
            }
        }
        Ok(())
    }
}

/// Parses `a..b`, `a..=b`, `a..b:step` style ranges or comma lists.
pub fn parse_n_range(s: &str) -> Result<Vec<usize>> {
    if let Some((range, step)) = s.split_once(':').map(|(a, b)| (a, Some(b))).or(Some((s, None))) {
        if let Some((lo, hi)) = range.split_once("..") {
            let (hi, inclusive) = match hi.strip_prefix('=') {
                Some(h) => (h, true),
                None => (hi, false),
            };
            let lo: usize = lo.trim().parse()?;
            let hi: usize = hi.trim().parse()?;
            let step: usize = step.map(|t| t.trim().parse()).transpose()?.unwrap_or(1);
            if step == 0 {
                bail!("zero step in {s:?}");
            }
            let end = if inclusive { hi + 1 } else { hi };
            return Ok((lo..end).step_by(step).collect());
        }
    }
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(Into::into))
        .collect()
}

/// `2`, `2x2`, `2,3` all denote direct sums of cyclic groups.
pub fn parse_group(s: &str) -> Result<GroupSpec> {
    let moduli = s
        .split(['x', ','])
        .map(|t| t.trim().parse::<u32>())
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(GroupSpec::new(moduli)?)
}
