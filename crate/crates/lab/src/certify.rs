//! Bundled exact and statistical certificates.

use std::collections::HashMap;

use anyhow::Result;
use cocycle_core::complex::{
    enumerate_hypertrees, kalai_sum, kalai_total, kernel_certificate, Hypertree,
};
use cocycle_core::graphon::self_convolve;
use cocycle_core::homology::{count_z1, smith_normal_form, BoundaryMatrices, IntMatrix};
use cocycle_core::{
    sample_random_cochain, Cochain, GroupSpec, ProjectionKernel, Rational, SymmetricDistribution,
    TwoComplex,
};
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::config::ExperimentConfig;
use crate::layers::degree_identity_holds;
use crate::rng::replica_rng;
use crate::table::{Table, Value};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: Value,
    pub tolerance: Value,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificationReport {
    pub checks: Vec<Check>,
}

impl CertificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new("certification", &["check", "value", "tolerance", "pass"]);
        for c in &self.checks {
            t.push(vec![c.name.clone().into(), c.value.clone(), c.tolerance.clone(), c.pass.into()]);
        }
        t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CertifyOptions {
    /// Perturb one kernel entry before certifying; the kernel check must
    /// then fail.
    pub corrupt_kernel: bool,
    /// Skip the `n = 6` enumeration.
    pub quick: bool,
}

/// Chi-square statistic and p-value of `samples` hypertree draws at `n`
/// against `|H_1|^2 / n^{C(n-2,2)}`, plus the number of draws outside the
/// support.
pub fn dpp_chi_square(
    kernel: &ProjectionKernel,
    trees: &[Hypertree],
    samples: usize,
    seed: u64,
) -> Result<(f64, f64, usize)> {
    let n = kernel.n();
    let cell: HashMap<Vec<usize>, usize> =
        trees.iter().enumerate().map(|(i, t)| (t.complex.indices(), i)).collect();
    let draws = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = replica_rng(seed, "dpp", n, i);
            Ok(cell.get(&kernel.sample(&mut rng)?.indices()).copied())
        })
        .collect::<Result<Vec<Option<usize>>>>()?;
    let mut counts = vec![0usize; trees.len()];
    let mut outside = 0;
    for d in draws {
        match d {
            Some(c) => counts[c] += 1,
            None => outside += 1,
        }
    }
    let stat: f64 = trees
        .iter()
        .zip(&counts)
        .map(|(t, &c)| {
            let e = t.probability() * samples as f64;
            (c as f64 - e).powi(2) / e
        })
        .sum();
    let dist = ChiSquared::new((trees.len() - 1) as f64)?;
    Ok((stat, 1.0 - dist.cdf(stat), outside))
}

/// `(W_f * W_f)(u, v, g) == P(u, v, g) / n` off the diagonal, exactly.
pub fn convolution_matches_paths(f: &Cochain) -> bool {
    let n = f.n();
    let conv = self_convolve(&f.embed_graphon::<Rational>());
    let p = f.path_counts();
    let nn = BigInt::from(n);
    (1..=n).all(|u| {
        (1..=n).filter(|&v| v != u).all(|v| {
            (0..f.group().order()).all(|g| {
                *conv.get(u - 1, v - 1, g) == Rational::new(BigInt::from(p.get(u, v, g)), nn.clone())
            })
        })
    })
}

/// Divisors of `P d2 Q` with signed permutations `P`, `Q` agree with those
/// of `d2`.
pub fn snf_metamorphic<R: Rng + ?Sized>(x: &TwoComplex, rng: &mut R) -> bool {
    let d2 = BoundaryMatrices::of(x).d2;
    if d2.cols() == 0 {
        return true;
    }
    let mut rows: Vec<usize> = (0..d2.rows()).collect();
    let mut cols: Vec<usize> = (0..d2.cols()).collect();
    rows.shuffle(rng);
    cols.shuffle(rng);
    let row_sign: Vec<i64> = rows.iter().map(|_| if rng.gen_bool(0.5) { -1 } else { 1 }).collect();
    let col_sign: Vec<i64> = cols.iter().map(|_| if rng.gen_bool(0.5) { -1 } else { 1 }).collect();
    let mut m = IntMatrix::zeros(d2.rows(), d2.cols());
    for (i, &r) in rows.iter().enumerate() {
        for (j, &c) in cols.iter().enumerate() {
            m.set(i, j, row_sign[i] * col_sign[j] * d2.get(r, c));
        }
    }
    smith_normal_form(&m) == smith_normal_form(&d2)
}

/// `|Z^1(X, Z/m)|` by testing every cochain.
pub fn brute_force_z1(x: &TwoComplex, m: u32) -> usize {
    let g = GroupSpec::cyclic(m).expect("nonzero modulus");
    cocycle_core::cochain::all_cochains(x.n(), &g)
        .filter(|f| f.is_cocycle_on(x))
        .count()
}

fn exact(name: &str, pass: bool, value: Value) -> Check {
    Check {
        name: name.into(),
        value,
        tolerance: "exact".into(),
        pass,
    }
}

/// Runs every certificate with `cfg.seed`; `cfg.samples` draws feed the
/// chi-square test.
pub fn run_certification(cfg: &ExperimentConfig, opts: CertifyOptions) -> Result<CertificationReport> {
    let tol = &cfg.tolerances;
    let mut checks = Vec::new();
    let max_n = if opts.quick { 5 } else { 6 };
    let mut trees5 = Vec::new();
    for n in 4..=max_n {
        let trees = enumerate_hypertrees(n)?;
        let sum = kalai_sum(&trees);
        let total = kalai_total(n);
        checks.push(exact(&format!("kalai_n{n}"), sum == total, format!("{sum} vs {total}").into()));
        if n == 5 {
            trees5 = trees;
        }
    }

    let clean = ProjectionKernel::build(5)?;
    let kernel = if opts.corrupt_kernel { clean.perturbed(0, 1, 0.05) } else { clean.clone() };
    let err = kernel_certificate(&kernel, &trees5);
    checks.push(Check {
        name: "kernel_certificate_n5".into(),
        value: err.into(),
        tolerance: tol.kernel_certificate.into(),
        pass: err <= tol.kernel_certificate,
    });
    let corrupted = kernel_certificate(&clean.perturbed(0, 1, 0.05), &trees5);
    checks.push(Check {
        name: "corrupted_kernel_rejected".into(),
        value: corrupted.into(),
        tolerance: format!("> {:e}", tol.kernel_certificate).into(),
        pass: corrupted > tol.kernel_certificate,
    });

    let (stat, p, outside) = dpp_chi_square(&clean, &trees5, cfg.samples, cfg.seed)?;
    checks.push(Check {
        name: "dpp_chi_square_n5_p".into(),
        value: p.into(),
        tolerance: format!("> {:e} (stat {stat:.3}, {outside} outside support)", tol.chi_square_p).into(),
        pass: p > tol.chi_square_p && outside == 0,
    });

    let groups = [2u32, 3, 4];
    let conv_ok = (0..100u64).into_par_iter().all(|i| {
        let mut rng = replica_rng(cfg.seed, "conv", 0, i);
        let g = GroupSpec::cyclic(groups[i as usize % 3]).expect("cyclic");
        let n = rng.gen_range(2..=12);
        let f = sample_random_cochain(n, &SymmetricDistribution::<f64>::uniform(g), &mut rng)
            .expect("n >= 2");
        convolution_matches_paths(&f)
    });
    checks.push(exact("convolution_two_paths", conv_ok, 100usize.into()));

    let snf_ok = (0..40u64).into_par_iter().all(|i| {
        let mut rng = replica_rng(cfg.seed, "snf", 0, i);
        let n = rng.gen_range(4..=8);
        let x = cocycle_core::complex::sample_linial_meshulam(n, rng.gen_range(0.5..3.0), &mut rng)
            .expect("valid c");
        snf_metamorphic(&x, &mut rng)
    });
    checks.push(exact("snf_metamorphic", snf_ok, 40usize.into()));

    let z1_ok = (0..30u64).into_par_iter().all(|i| {
        let mut rng = replica_rng(cfg.seed, "z1", 0, i);
        let m = [2u32, 3][i as usize % 2];
        let x = cocycle_core::complex::sample_linial_meshulam(4, rng.gen_range(0.0..4.0), &mut rng)
            .expect("valid c");
        let g = GroupSpec::cyclic(m).expect("cyclic");
        count_z1(&x, &g) == num_bigint::BigUint::from(brute_force_z1(&x, m))
    });
    checks.push(exact("count_z1_brute_force_n4", z1_ok, 30usize.into()));

    let identity_ok = (0..100u64).into_par_iter().all(|i| {
        let mut rng = replica_rng(cfg.seed, "degree_identity", 0, i);
        let g = GroupSpec::cyclic(groups[i as usize % 3]).expect("cyclic");
        let n = rng.gen_range(3..=10);
        let f = sample_random_cochain(n, &SymmetricDistribution::<f64>::uniform(g), &mut rng)
            .expect("n >= 2");
        degree_identity_holds(&f)
    });
    checks.push(exact("degree_identity", identity_ok, 100usize.into()));

    let zero_faceless = count_z1(&TwoComplex::empty(4), &GroupSpec::cyclic(2)?);
    checks.push(exact(
        "faceless_z1_n4",
        zero_faceless == num_bigint::BigUint::from(64u32),
        zero_faceless.to_string().into(),
    ));
    Ok(CertificationReport { checks })
}
