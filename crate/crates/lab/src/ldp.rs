//! Finite-n moment generating functions, the dual form of the rate and the
//! Gibbs inequality, on random step graphons.

use anyhow::Result;
use cocycle_core::graphon::{
    b_functional, dual_maximize, dual_rate, entropy_h, equal_parts, mgf_finite_n, random_measures,
    random_test_function, random_w00, random_w00_positive, rate_function,
};
use cocycle_core::{GroupSpec, StepCochainGraphon, SymmetricDistribution};
use rand::Rng;
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::rng::replica_rng;
use crate::table::Table;

/// Random symmetric distribution with full support.
fn random_nu<R: Rng + ?Sized>(g: &GroupSpec, rng: &mut R) -> SymmetricDistribution<f64> {
    let w = random_w00_positive(g, 1, 0.1, rng);
    SymmetricDistribution::new(g.clone(), w.values().to_vec()).expect("symmetric fiber")
}

fn random_cyclic<R: Rng + ?Sized>(rng: &mut R) -> GroupSpec {
    GroupSpec::cyclic(rng.gen_range(2..=6)).expect("nonzero modulus")
}

#[derive(Debug, Clone, PartialEq)]
pub struct LdpReport {
    /// `n`, finite value, limit, gap, ratio to the previous gap.
    pub mgf: Table,
    /// check, trials, value, tolerance, pass.
    pub checks: Table,
}

impl LdpReport {
    pub fn passed(&self) -> bool {
        self.checks
            .values("pass")
            .iter()
            .all(|v| **v == crate::table::Value::Bool(true))
    }
}

/// Gap ratios of consecutive entries of `ns` that double.
pub fn doubling_ratios(ns: &[usize], gaps: &[f64]) -> Vec<(usize, f64)> {
    (1..ns.len())
        .filter(|&i| ns[i] == 2 * ns[i - 1])
        .map(|i| (ns[i], gaps[i] / gaps[i - 1]))
        .collect()
}

/// MGF gaps for one random step `phi` on 4 equal parts over `cfg.group` at
/// each `n` of `cfg.n_values`; then `cfg.samples` dual-value trials and
/// `10 * cfg.samples` weak-duality and Gibbs trials over `Z/m`,
/// `2 <= m <= 6`, with up to 6 parts.
pub fn run_ldp_numerics(cfg: &ExperimentConfig) -> Result<LdpReport> {
    if cfg.samples == 0 || cfg.n_values.iter().any(|&n| n < 2) {
        anyhow::bail!("need samples >= 1 and n >= 2");
    }
    let tol = &cfg.tolerances;
    let mut rng = replica_rng(cfg.seed, "mgf", 0, 0);
    let phi = random_test_function(&cfg.group, equal_parts(4), 1.0, &mut rng);
    let nu = SymmetricDistribution::<f64>::uniform(cfg.group.clone());
    let values = cfg
        .n_values
        .par_iter()
        .map(|&n| mgf_finite_n(&phi, n, &nu))
        .collect::<cocycle_core::Result<Vec<_>>>()?;
    let mut mgf = Table::new("mgf_gap", &["n", "finite", "limit", "gap", "ratio_to_half_n"]);
    let gaps: Vec<f64> = values.iter().map(|v| v.gap()).collect();
    let ratios = doubling_ratios(&cfg.n_values, &gaps);
    for v in &values {
        let ratio = ratios.iter().find(|(n, _)| *n == v.n).map_or(f64::NAN, |r| r.1);
        mgf.push(vec![v.n.into(), v.finite.into(), v.limit.into(), v.gap().into(), ratio.into()]);
    }

    let dual_trials = cfg.samples;
    let dual_gap = (0..dual_trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = replica_rng(cfg.seed, "dual", 0, i);
            let g = random_cyclic(&mut rng);
            let k = rng.gen_range(1..=6);
            let w = random_w00_positive(&g, k, 0.05, &mut rng);
            let nu = if i % 2 == 0 {
                SymmetricDistribution::uniform(g.clone())
            } else {
                random_nu(&g, &mut rng)
            };
            let (_, value) = dual_maximize(&w, &nu)?;
            Ok((value - rate_function(&w, &nu)?).abs())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let many = 10 * cfg.samples;
    let weak_excess = (0..many as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = replica_rng(cfg.seed, "weak", 0, i);
            let g = random_cyclic(&mut rng);
            let k = rng.gen_range(1..=6);
            let w = random_w00(&g, k, if i % 3 == 0 { 0.3 } else { 0.0 }, &mut rng);
            let parts = rng.gen_range(1..=6);
            let scale = rng.gen_range(0.1..4.0);
            let phi = random_test_function(&g, random_measures(parts, &mut rng), scale, &mut rng);
            let nu = random_nu(&g, &mut rng);
            Ok(dual_rate(&phi, &w, &nu)? - rate_function(&w, &nu)?)
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);

    let gibbs = (0..many as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = replica_rng(cfg.seed, "gibbs", 0, i);
            let g = random_cyclic(&mut rng);
            let k = rng.gen_range(1..=6);
            let w = random_w00(&g, k, if i % 3 == 0 { 0.4 } else { 0.0 }, &mut rng);
            Ok(b_functional(&w)? + entropy_h(&w)?)
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let uniform = (2..=6)
        .flat_map(|m| (1..=6).map(move |k| (m, k)))
        .map(|(m, k)| {
            let u = StepCochainGraphon::<f64>::uniform(GroupSpec::cyclic(m).expect("cyclic"), k);
            Ok((b_functional(&u)? + entropy_h(&u)?).abs())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let mut checks = Table::new("ldp_checks", &["check", "trials", "value", "tolerance", "pass"]);
    for &(n, r) in &ratios {
        checks.push(vec![
            format!("mgf_gap_ratio_n{n}").into(),
            1usize.into(),
            r.into(),
            "[0.3, 0.7]".into(),
            (0.3..=0.7).contains(&r).into(),
        ]);
    }
    checks.push(vec![
        "dual_value_minus_rate".into(),
        dual_trials.into(),
        dual_gap.into(),
        tol.dual_gap.into(),
        (dual_gap <= tol.dual_gap).into(),
    ]);
    checks.push(vec![
        "weak_duality_max_excess".into(),
        many.into(),
        weak_excess.into(),
        tol.inequality.into(),
        (weak_excess <= tol.inequality).into(),
    ]);
    checks.push(vec![
        "gibbs_max_b_plus_h".into(),
        many.into(),
        gibbs.into(),
        tol.inequality.into(),
        (gibbs <= tol.inequality).into(),
    ]);
    checks.push(vec![
        "gibbs_uniform_abs".into(),
        25usize.into(),
        uniform.into(),
        tol.inequality.into(),
        (uniform <= tol.inequality).into(),
    ]);
    Ok(LdpReport { mgf, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Model;

    #[test]
    fn small_run_passes() {
        let mut cfg =
            ExperimentConfig::new(Model::OneOut, vec![8, 16, 32], GroupSpec::cyclic(3).unwrap(), 10, 4);
        cfg.primes.clear();
        let r = run_ldp_numerics(&cfg).unwrap();
        assert!(r.passed(), "{:?}", r.checks);
        assert_eq!(r.mgf.rows.len(), 3);
    }

    #[test]
    fn ratios_only_on_doublings() {
        assert_eq!(doubling_ratios(&[4, 8, 12, 24], &[1.0, 0.5, 0.3, 0.15]), vec![(8, 0.5), (24, 0.5)]);
    }
}
