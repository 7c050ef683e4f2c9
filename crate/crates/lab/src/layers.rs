//! Layered counting of cochains by the value of `b(W^G_f)`.

use anyhow::Result;
use cocycle_core::complex::{log_avoidance_exact, upperb_bound};
use cocycle_core::graphon::{b_functional, b_terms};
use cocycle_core::simplex::binomial;
use cocycle_core::{sample_random_cochain, Cochain, Rational, SymmetricDistribution};
use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::rng::replica_rng;
use crate::table::Table;

/// Largest `n` at which the exact avoidance probability is audited.
pub const MAX_AUDIT_N: usize = 8;

/// `prod_tau (t_Y(tau)/n)^2 == prod_terms (W*W)^{n^2 weight}` in exact
/// arithmetic; taking logs gives `sum_tau log(t_Y(tau)/n) = (n^2/2) b(W^G_f)`
/// with both sides `-inf` together.
pub fn degree_identity_holds(f: &Cochain) -> bool {
    let n = f.n();
    let nn = Rational::from_integer(BigInt::from(n));
    let y = f.coboundary_triangles();
    let lhs = y.edge_degrees().iter().fold(Rational::one(), |acc, &t| {
        let x = Rational::from_integer(BigInt::from(t)) / &nn;
        acc * &x * &x
    });
    let n2 = &nn * &nn;
    let terms = b_terms(&f.embed_graphon::<Rational>()).expect("embeddings are graphons");
    let mut rhs = Rational::one();
    for term in terms {
        let e = &term.weight * &n2;
        assert!(e.is_integer(), "embedded weights are multiples of 1/n^2");
        let e: u32 = e.to_integer().try_into().expect("small exponent");
        rhs *= num_traits::pow(term.argument, e as usize);
    }
    lhs == rhs
}

/// Both sides of `log P(f in Z^1(T_n, G)) <= (n-2) log n + (n^2/2)(1-2/n) b(W^G_f)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundAudit {
    pub log_probability: f64,
    pub bound: f64,
}

impl BoundAudit {
    pub fn of(f: &Cochain, b: f64) -> Self {
        let n = f.n() as f64;
        let bound = if b == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            (n - 2.0) * n.ln() + 0.5 * n * n * (1.0 - 2.0 / n) * b
        };
        BoundAudit {
            log_probability: log_avoidance_exact(&f.coboundary_triangles()),
            bound,
        }
    }

    /// `bound - log P`, `+inf` when the probability vanishes.
    pub fn slack(&self) -> f64 {
        if self.log_probability == f64::NEG_INFINITY {
            f64::INFINITY
        } else {
            self.bound - self.log_probability
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerRow {
    pub n: usize,
    pub layer: usize,
    /// Layer `i` holds `-i eps >= b > -(i+1) eps`; the last layer also
    /// holds everything below, including `-inf`.
    pub b_upper: f64,
    pub b_lower: f64,
    pub count: usize,
    pub frequency: f64,
    /// `log(frequency * |G|^{C(n,2)})`.
    pub log_count_estimate: f64,
    /// `n^2 (i+2) eps / 2`.
    pub log_count_bound: f64,
    /// `-n^2 (i-1) eps / 2`.
    pub log_probability_bound: f64,
    pub log_contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerAudit {
    pub n: usize,
    pub samples: usize,
    pub bound_checked: usize,
    pub bound_violations: usize,
    pub min_bound_slack: f64,
    /// Cases where `upperb_bound(Y_f)` and the `b` form of the bound differ.
    pub bound_form_mismatches: usize,
    pub degree_identity_failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerTable {
    pub eps: f64,
    pub layers: usize,
    pub rows: Vec<LayerRow>,
    pub audits: Vec<LayerAudit>,
}

impl LayerTable {
    pub fn passed(&self) -> bool {
        self.audits
            .iter()
            .all(|a| a.bound_violations == 0 && a.degree_identity_failures == 0 && a.bound_form_mismatches == 0)
    }

    pub fn to_tables(&self) -> Vec<Table> {
        let mut layers = Table::new(
            "layers",
            &[
                "n",
                "layer",
                "eps",
                "b_upper",
                "b_lower",
                "count",
                "frequency",
                "log_count_estimate",
                "log_count_bound",
                "log_probability_bound",
                "log_contribution",
            ],
        );
        for r in &self.rows {
            layers.push(vec![
                r.n.into(),
                r.layer.into(),
                self.eps.into(),
                r.b_upper.into(),
                r.b_lower.into(),
                r.count.into(),
                r.frequency.into(),
                r.log_count_estimate.into(),
                r.log_count_bound.into(),
                r.log_probability_bound.into(),
                r.log_contribution.into(),
            ]);
        }
        let mut audit = Table::new(
            "layer_audit",
            &[
                "n",
                "samples",
                "upper_bound_checked",
                "upper_bound_violations",
                "upper_bound_min_slack",
                "upper_bound_form_mismatches",
                "degree_identity_failures",
            ],
        );
        for a in &self.audits {
            audit.push(vec![
                a.n.into(),
                a.samples.into(),
                a.bound_checked.into(),
                a.bound_violations.into(),
                a.min_bound_slack.into(),
                a.bound_form_mismatches.into(),
                a.degree_identity_failures.into(),
            ]);
        }
        vec![layers, audit]
    }
}

/// Layer index of `b`: `floor(-b / eps)` capped at `layers`.
pub fn layer_of(b: f64, eps: f64, layers: usize) -> usize {
    if b == f64::NEG_INFINITY {
        return layers;
    }
    ((-b / eps).floor().max(0.0) as usize).min(layers)
}

struct Sampled {
    layer: usize,
    audit: Option<BoundAudit>,
    form_mismatch: bool,
    degree_identity: bool,
}

/// Samples cochains from the uniform `F_{n, nu}` and sorts them into the
/// layers `L_0, ..., L_k`; for `n <= 8` each sample is also audited against
/// the exact avoidance probability.
pub fn run_layer_audit(cfg: &ExperimentConfig) -> Result<LayerTable> {
    cfg.validate()?;
    let nu = SymmetricDistribution::<f64>::uniform(cfg.group.clone());
    let log_g = (cfg.group.order() as f64).ln();
    let eps = log_g / cfg.layers as f64;
    let mut rows = Vec::new();
    let mut audits = Vec::new();
    for &n in &cfg.n_values {
        let audit_bound = n <= MAX_AUDIT_N;
        let sampled: Vec<Sampled> = (0..cfg.samples as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = replica_rng(cfg.seed, "layers", n, i);
                let f = sample_random_cochain(n, &nu, &mut rng)?;
                let b = b_functional(&f.embed_graphon::<f64>())?;
                let audit = audit_bound.then(|| BoundAudit::of(&f, b));
                let form_mismatch = audit.is_some_and(|a| {
                    let direct = upperb_bound(n, &f.coboundary_triangles());
                    !(direct == a.bound || (direct - a.bound).abs() <= 1e-9 * (1.0 + direct.abs()))
                });
                Ok(Sampled {
                    layer: layer_of(b, eps, cfg.layers),
                    audit,
                    form_mismatch,
                    degree_identity: degree_identity_holds(&f),
                })
            })
            .collect::<Result<_>>()?;
        let n2 = (n * n) as f64;
        let log_total = binomial(n, 2) as f64 * log_g;
        for layer in 0..=cfg.layers {
            let count = sampled.iter().filter(|s| s.layer == layer).count();
            let frequency = count as f64 / cfg.samples as f64;
            let log_count = if count == 0 { f64::NEG_INFINITY } else { frequency.ln() + log_total };
            let i = layer as f64;
            let log_p = -n2 * (i - 1.0) * eps / 2.0;
            rows.push(LayerRow {
                n,
                layer,
                b_upper: -i * eps,
                b_lower: if layer == cfg.layers { f64::NEG_INFINITY } else { -(i + 1.0) * eps },
                count,
                frequency,
                log_count_estimate: log_count,
                log_count_bound: n2 * (i + 2.0) * eps / 2.0,
                log_probability_bound: log_p,
                log_contribution: log_count + log_p,
            });
        }
        let slacks: Vec<f64> = sampled.iter().filter_map(|s| s.audit.map(|a| a.slack())).collect();
        audits.push(LayerAudit {
            n,
            samples: cfg.samples,
            bound_checked: slacks.len(),
            bound_violations: slacks.iter().filter(|&&s| !(s >= -cfg.tolerances.bound_slack)).count(),
            min_bound_slack: slacks.iter().cloned().fold(f64::INFINITY, f64::min),
            bound_form_mismatches: sampled.iter().filter(|s| s.form_mismatch).count(),
            degree_identity_failures: sampled.iter().filter(|s| !s.degree_identity).count(),
        });
    }
    Ok(LayerTable {
        eps,
        layers: cfg.layers,
        rows,
        audits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Model;
    use cocycle_core::GroupSpec;

    #[test]
    fn identity_cochain_layer() {
        for n in [4usize, 6, 9] {
            let g = GroupSpec::cyclic(3).unwrap();
            let f = Cochain::zero(n, g).unwrap();
            let b = b_functional(&f.embed_graphon::<f64>()).unwrap();
            let nf = n as f64;
            assert!((b - (1.0 - 1.0 / nf) * ((nf - 2.0) / nf).ln()).abs() < 1e-12);
            assert!(degree_identity_holds(&f));
            let eps = 3f64.ln() / 10.0;
            assert_eq!(layer_of(b, eps, 10), (-b / eps).floor() as usize);
        }
        assert_eq!(layer_of(f64::NEG_INFINITY, 0.1, 10), 10);
        assert_eq!(layer_of(-5.0, 0.1, 10), 10);
        assert_eq!(layer_of(0.0, 0.1, 10), 0);
        assert_eq!(layer_of(-0.1, 0.1, 10), 1);
    }

    #[test]
    fn layers_partition_the_samples() {
        let cfg = ExperimentConfig::new(Model::OneOut, vec![5, 7], GroupSpec::cyclic(2).unwrap(), 60, 3);
        let t = run_layer_audit(&cfg).unwrap();
        for n in [5, 7] {
            let counts: usize = t.rows.iter().filter(|r| r.n == n).map(|r| r.count).sum();
            assert_eq!(counts, 60);
        }
        assert!(t.passed(), "{:?}", t.audits);
        assert_eq!(t.audits[0].bound_checked, 60);
        assert_eq!(t.to_tables().len(), 2);
    }
}
