//! Monte Carlo trends of `log E|Z^1| / n^2` and `dim H_1(F_p) / n^2`.

use anyhow::Result;
use cocycle_core::homology::{count_z1, dim_h1_mod_p, IntegralHomology};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::models::{ln_biguint, ComplexSampler};
use crate::rng::replica_rng;
use crate::stats::{median_se, quantile, summarize, trend_violations};
use crate::table::{Table, Value};

pub const TREND_NOTE: &str = "trend threshold is implementation-chosen: weakly decreasing in n, \
a step may rise by at most the stated number of combined standard errors";

fn mark_violations(t: &mut Table, group_col: Option<&str>, value: &str, se: &str, k: f64) {
    let flag = t.column("trend_violation").expect("flag column");
    let vc = t.column(value).expect("value column");
    let sc = t.column(se).expect("se column");
    let gc = group_col.map(|g| t.column(g).expect("group column"));
    let mut keys: Vec<String> = Vec::new();
    for r in &t.rows {
        let key = gc.map_or(String::new(), |c| format!("{:?}", r[c]));
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    for key in keys {
        let idx: Vec<usize> = (0..t.rows.len())
            .filter(|&i| gc.map_or(String::new(), |c| format!("{:?}", t.rows[i][c])) == key)
            .collect();
        let vals: Vec<f64> = idx.iter().map(|&i| t.rows[i][vc].as_f64().unwrap()).collect();
        let ses: Vec<f64> = idx.iter().map(|&i| t.rows[i][sc].as_f64().unwrap()).collect();
        for step in trend_violations(&vals, &ses, k) {
            t.rows[idx[step]][flag] = Value::Bool(true);
        }
    }
}

/// Number of flagged trend steps.
pub fn violation_count(t: &Table) -> usize {
    t.values("trend_violation").iter().filter(|v| ***v == Value::Bool(true)).count()
}

/// For each `n`: mean of the exact per-sample `|Z^1(X_n, G)|`, its log
/// normalized by `n^2`, and a delta-method standard error on that scale.
/// `E|Z^1|` is heavy tailed, so the sample skewness is reported alongside.
pub fn run_ez1_trend(cfg: &ExperimentConfig) -> Result<Table> {
    cfg.validate()?;
    let mut t = Table::new(
        "ez1_trend",
        &[
            "model",
            "group",
            "n",
            "samples",
            "log_mean_z1",
            "se_mean_z1_relative",
            "normalized_log_mean_z1",
            "se_normalized",
            "skewness_z1",
            "coboundary_floor",
            "trend_violation",
        ],
    );
    let log_g = (cfg.group.order() as f64).ln();
    for &n in &cfg.n_values {
        let sampler = ComplexSampler::new(cfg.model, n, cfg.c)?;
        let logs: Vec<f64> = (0..cfg.samples as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = replica_rng(cfg.seed, "ez1", n, i);
                let x = sampler.sample(&mut rng)?;
                Ok(ln_biguint(&count_z1(&x, &cfg.group)))
            })
            .collect::<Result<_>>()?;
        // counts are at least |G|^{n-1}, so the scaled values are finite
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let scaled: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
        let s = summarize(&scaled);
        let log_mean = top + s.mean.ln();
        let rel = s.se / s.mean;
        let n2 = (n * n) as f64;
        t.push(vec![
            cfg.model.to_string().into(),
            format!("{:?}", cfg.group.moduli()).into(),
            n.into(),
            cfg.samples.into(),
            log_mean.into(),
            rel.into(),
            (log_mean / n2).into(),
            (rel / n2).into(),
            s.skewness.into(),
            ((n - 1) as f64 * log_g / n2).into(),
            false.into(),
        ]);
    }
    mark_violations(&mut t, None, "normalized_log_mean_z1", "se_normalized", cfg.tolerances.trend_se);
    t.notes.push(TREND_NOTE.into());
    t.notes.push(format!("allowed rise: {} SE", cfg.tolerances.trend_se));
    Ok(t)
}

/// For each `n` and prime `p`: quantiles of `dim H_1(X, F_p) / n^2` and the
/// median of `mg(H_1(X, Z)) / n^2`.
pub fn run_betti_trend(cfg: &ExperimentConfig) -> Result<Table> {
    cfg.validate()?;
    let mut t = Table::new(
        "betti_trend",
        &[
            "model",
            "n",
            "p",
            "samples",
            "dim_h1_q25",
            "dim_h1_median",
            "dim_h1_q75",
            "se_median",
            "mg_median",
            "trend_violation",
        ],
    );
    for &n in &cfg.n_values {
        let sampler = ComplexSampler::new(cfg.model, n, cfg.c)?;
        let per: Vec<(Vec<usize>, usize)> = (0..cfg.samples as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = replica_rng(cfg.seed, "betti", n, i);
                let x = sampler.sample(&mut rng)?;
                let dims = cfg
                    .primes
                    .iter()
                    .map(|&p| dim_h1_mod_p(&x, p))
                    .collect::<cocycle_core::Result<Vec<_>>>()?;
                Ok((dims, IntegralHomology::of(&x).mg()))
            })
            .collect::<Result<_>>()?;
        let n2 = (n * n) as f64;
        let mut mg: Vec<f64> = per.iter().map(|(_, m)| *m as f64 / n2).collect();
        mg.sort_by(f64::total_cmp);
        for (k, &p) in cfg.primes.iter().enumerate() {
            let mut d: Vec<f64> = per.iter().map(|(dims, _)| dims[k] as f64 / n2).collect();
            d.sort_by(f64::total_cmp);
            t.push(vec![
                cfg.model.to_string().into(),
                n.into(),
                p.into(),
                cfg.samples.into(),
                quantile(&d, 0.25).into(),
                quantile(&d, 0.5).into(),
                quantile(&d, 0.75).into(),
                median_se(&d).into(),
                quantile(&mg, 0.5).into(),
                false.into(),
            ]);
        }
    }
    mark_violations(&mut t, Some("p"), "dim_h1_median", "se_median", cfg.tolerances.trend_se);
    t.notes.push(TREND_NOTE.into());
    t.notes.push(format!("allowed rise: {} SE", cfg.tolerances.trend_se));
    Ok(t)
}
