use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::cochain::{all_cochains, sample_random_cochain, Cochain};
use crate::group::{GroupSpec, SymmetricDistribution};
use crate::scalar::Scalar;

fn z(m: u32) -> GroupSpec {
    GroupSpec::cyclic(m).unwrap()
}

fn small_groups() -> Vec<GroupSpec> {
    vec![z(2), z(3), z(4), GroupSpec::new(vec![2, 2]).unwrap(), z(5), z(6)]
}

fn q(a: i64, b: i64) -> BigRational {
    BigRational::ratio(a, b)
}

/// Atom at the identity: `W^0 = 1`, other slices zero.
fn identity_graphon(group: GroupSpec) -> StepCochainGraphon<f64> {
    StepCochainGraphon::from_fn(group, vec![1.0], |_, _, g| if g == 0 { 1.0 } else { 0.0 }).unwrap()
}

#[test]
fn uniform_is_idempotent_and_extremal() {
    for g in small_groups() {
        let order = g.order() as f64;
        let u = StepCochainGraphon::<BigRational>::uniform(g.clone(), 3);
        assert_eq!(&self_convolve(&u), &u);
        assert_eq!(convolve(&u, &u).unwrap(), u.as_function().clone());
        assert!((b_functional(&u).unwrap() + order.ln()).abs() < 1e-12);
        assert!((entropy_h(&u).unwrap() - order.ln()).abs() < 1e-12);
    }
}

#[test]
fn remark_example_is_minus_infinity() {
    let g = z(2);
    for n in [2usize, 3, 5, 10] {
        let nf = n as f64;
        let w = StepCochainGraphon::from_fn(g.clone(), vec![1.0 / nf, 1.0 - 1.0 / nf], |i, j, h| {
            let corner = i == 0 && j == 0;
            match (h, corner) {
                (1, true) | (0, false) => 1.0,
                _ => 0.0,
            }
        })
        .unwrap();
        assert!(w.in_w00());
        assert_eq!(b_functional(&w).unwrap(), f64::NEG_INFINITY);
    }
    assert_eq!(b_functional(&identity_graphon(g)).unwrap(), 0.0);
}

#[test]
fn b_rejects_values_outside_unit_interval() {
    let w = StepCochainGraphon::from_fn(z(2), vec![1.0], |_, _, _| 1.5).unwrap();
    assert!(b_functional(&w).is_err());
}

#[test]
fn rate_examples() {
    let g = z(3);
    let nu = SymmetricDistribution::<f64>::uniform(g.clone());
    let w = identity_graphon(g.clone());
    assert!((rate_function(&w, &nu).unwrap() - 0.5 * 3f64.ln()).abs() < 1e-12);
    assert!((rate_function(&w, &nu).unwrap() - 0.549306).abs() < 1e-6);
    let skew = SymmetricDistribution::new(g.clone(), vec![0.5, 0.25, 0.25]).unwrap();
    let same = StepCochainGraphon::constant(g.clone(), &[0.5, 0.25, 0.25]).unwrap();
    assert!(rate_function(&same, &skew).unwrap().abs() < 1e-15);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let f = sample_random_cochain(5, &nu, &mut rng).unwrap();
    assert_eq!(rate_function(&f.embed_graphon::<f64>(), &nu).unwrap(), f64::INFINITY);
    assert_eq!(entropy_h(&f.embed_graphon::<f64>()).unwrap(), f64::NEG_INFINITY);
    assert!(rate_function(&w, &SymmetricDistribution::<f64>::uniform(z(2))).is_err());
    assert!(entropy_h(&identity_graphon(z(4))).unwrap().abs() < 1e-15);
}

#[test]
fn entropy_matches_shannon_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for g in small_groups() {
        let w = random_w00(&g, 4, 0.3, &mut rng);
        let mut direct = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                for h in 0..g.order() {
                    let x = *w.get(i, j, h);
                    if x > 0.0 {
                        direct -= w.measures()[i] * w.measures()[j] * x * x.ln();
                    }
                }
            }
        }
        assert!((entropy_h(&w).unwrap() - direct).abs() < 1e-12);
    }
}

#[test]
fn gibbs_inequality_on_random_w00() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for trial in 0..1000 {
        let order = rng.gen_range(2..=6);
        let g = z(order);
        let k = rng.gen_range(1..=6);
        let sparsity = if trial % 3 == 0 { 0.4 } else { 0.0 };
        let w = random_w00(&g, k, sparsity, &mut rng);
        let slack = b_functional(&w).unwrap() + entropy_h(&w).unwrap();
        assert!(slack <= 1e-12, "b + H = {slack}");
    }
    for g in small_groups() {
        let u = StepCochainGraphon::<f64>::uniform(g, 5);
        let s = b_functional(&u).unwrap() + entropy_h(&u).unwrap();
        assert!(s.abs() < 1e-12);
    }
}

#[test]
fn convolution_preserves_w00_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for g in small_groups() {
        for k in 1..=4 {
            let v = random_w00_rational(&g, k, 12, &mut rng);
            let w = random_w00_rational(&g, k, 7, &mut rng);
            assert!(v.in_w00() && w.in_w00());
            let vw = self_convolve(&v);
            assert!(vw.in_w00());
            let mixed = convolve(&v, &w).unwrap();
            let order = g.order();
            for fiber in mixed.values().chunks(order) {
                assert_eq!(fiber.iter().cloned().fold(BigRational::zero(), |a, b| a + b), BigRational::one());
                assert!(fiber.iter().all(|x| *x >= BigRational::zero()));
            }
        }
    }
}

#[test]
fn convolution_of_distinct_graphons_need_not_be_symmetric() {
    let g = z(3);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let v = random_w00_rational(&g, 2, 5, &mut rng);
    let w = random_w00_rational(&g, 2, 7, &mut rng);
    let vw = convolve(&v, &w).unwrap();
    let wv = convolve(&w, &v).unwrap();
    // ((V*W)^g)^T = (W*V)^{-g}
    for i in 0..2 {
        for j in 0..2 {
            for h in 0..3 {
                assert_eq!(vw.get(i, j, h), wv.get(j, i, g.neg_index(h)));
            }
        }
    }
}

#[test]
fn convolution_counts_two_paths() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let groups = [z(2), z(3), z(4), GroupSpec::new(vec![2, 2]).unwrap()];
    for trial in 0..100 {
        let g = groups[trial % groups.len()].clone();
        let n = rng.gen_range(2..=12);
        let nu = SymmetricDistribution::<f64>::uniform(g.clone());
        let f = sample_random_cochain(n, &nu, &mut rng).unwrap();
        let w = f.embed_graphon::<BigRational>();
        let conv = self_convolve(&w);
        let p = f.path_counts();
        for u in 1..=n {
            for v in 1..=n {
                for h in 0..g.order() {
                    let expect = if u == v {
                        // v' != u with f(u,v') + f(v',u) = 0
                        if h == 0 { q(n as i64 - 1, n as i64) } else { BigRational::zero() }
                    } else {
                        q(p.get(u, v, h) as i64, n as i64)
                    };
                    assert_eq!(conv.get(u - 1, v - 1, h), &expect);
                }
            }
        }
    }
}

#[test]
fn convolution_refines_mismatched_partitions() {
    let g = z(2);
    let v = StepCochainGraphon::from_fn(g.clone(), vec![q(1, 2), q(1, 2)], |i, _, h| {
        if (i == 0) == (h == 0) { BigRational::one() } else { BigRational::zero() }
    });
    // not symmetric: rejected
    assert!(v.is_err());
    let v = StepCochainGraphon::<BigRational>::uniform(g.clone(), 2);
    let w = StepCochainGraphon::<BigRational>::uniform(g, 3);
    let c = convolve(&v, &w).unwrap();
    assert_eq!(c.parts(), 4);
    assert!(c.values().iter().all(|x| *x == q(1, 2)));
}

#[test]
fn linear_functional_examples() {
    let g = z(3);
    let nu = SymmetricDistribution::<f64>::uniform(g.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in 2..8 {
        let f = sample_random_cochain(n, &nu, &mut rng).unwrap();
        let w = f.embed_graphon::<BigRational>();
        let zero = GroupStepFunction::constant(g.clone(), vec![BigRational::one()], BigRational::zero()).unwrap();
        assert_eq!(linear_functional(&zero, &w).unwrap(), BigRational::zero());
        let c = q(7, 3);
        let phi = GroupStepFunction::constant(g.clone(), vec![BigRational::one()], c.clone()).unwrap();
        assert_eq!(linear_functional(&phi, &w).unwrap(), c * q(n as i64 - 1, n as i64));
    }
}

#[test]
fn linear_functional_symmetrization() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for g in small_groups() {
        let w = random_w00(&g, 3, 0.2, &mut rng);
        let phi = random_test_function(&g, random_measures(4, &mut rng), 2.0, &mut rng);
        assert!(!phi.is_symmetric());
        let a = linear_functional(&phi, &w).unwrap();
        let b = linear_functional(&phi.symmetrize(), &w).unwrap();
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn mgf_simple_cases() {
    let g = z(2);
    let nu = SymmetricDistribution::<f64>::uniform(g.clone());
    for n in [2usize, 3, 7, 20] {
        let zero = GroupStepFunction::constant(g.clone(), vec![1.0], 0.0).unwrap();
        let m = mgf_finite_n(&zero, n, &nu).unwrap();
        assert_eq!((m.finite, m.limit), (0.0, 0.0));
        let c = 0.37;
        let phi = GroupStepFunction::constant(g.clone(), vec![1.0], c).unwrap();
        let m = mgf_finite_n(&phi, n, &nu).unwrap();
        assert!((m.finite - c * (1.0 - 1.0 / n as f64)).abs() < 1e-14);
        assert!((m.limit - c).abs() < 1e-14);
    }
    let phi = GroupStepFunction::constant(g.clone(), vec![1.0], 0.8).unwrap();
    assert!((mgf_finite_n(&phi, 2, &nu).unwrap().finite - 0.4).abs() < 1e-14);
    assert!(mgf_finite_n(&phi, 1, &nu).is_err());
}

/// `(1/n^2) log E exp(n^2 Z_phi(W_F))` by summing over every cochain.
fn brute_force_mgf(phi: &GroupStepFunction<BigRational>, n: usize, nu: &SymmetricDistribution<BigRational>) -> f64 {
    let g = nu.group().clone();
    let n2 = (n * n) as f64;
    let mut terms = Vec::new();
    for f in all_cochains(n, &g) {
        let weight: BigRational = f
            .labels()
            .iter()
            .fold(BigRational::one(), |acc, &l| acc * nu.prob(l).clone());
        let zf = linear_functional(phi, &f.embed_graphon::<BigRational>()).unwrap();
        terms.push((weight.to_f64_lossy().ln(), n2 * zf.to_f64_lossy()));
    }
    let m = terms.iter().map(|(a, b)| a + b).fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = terms.iter().map(|(a, b)| (a + b - m).exp()).sum();
    (m + s.ln()) / n2
}

#[test]
fn mgf_matches_exhaustive_expectation() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for g in [z(2), z(3)] {
        let nus = [
            SymmetricDistribution::<BigRational>::uniform(g.clone()),
            if g.order() == 3 {
                SymmetricDistribution::new(g.clone(), vec![q(1, 2), q(1, 4), q(1, 4)]).unwrap()
            } else {
                SymmetricDistribution::new(g.clone(), vec![q(1, 3), q(2, 3)]).unwrap()
            },
        ];
        for nu in &nus {
            for n in 2..=4 {
                // measures with denominators that do not match the n-grid
                let measures = vec![q(1, 5), q(1, 2), q(3, 10)];
                let phi = GroupStepFunction::from_fn(g.clone(), measures, |_, _, _| {
                    q(rng.gen_range(-20..=20), 10)
                })
                .unwrap();
                let closed = mgf_finite_n(&phi, n, nu).unwrap().finite;
                let brute = brute_force_mgf(&phi, n, nu);
                assert!((closed - brute).abs() < 1e-12, "n = {n}: {closed} vs {brute}");
            }
        }
    }
}

#[test]
fn mgf_gap_is_order_one_over_n() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let g = z(3);
    let nu = SymmetricDistribution::<f64>::uniform(g.clone());
    let phi = random_test_function(&g, equal_parts(4), 1.0, &mut rng);
    let gaps: Vec<f64> = [4usize, 8, 16, 32]
        .iter()
        .map(|&n| mgf_finite_n(&phi, n, &nu).unwrap().gap())
        .collect();
    for w in gaps.windows(2) {
        let ratio = w[1] / w[0];
        assert!((0.3..=0.7).contains(&ratio), "{gaps:?}");
    }
    // unaligned parts: stepping error is also O(1/n)
    let phi = random_test_function(&g, random_measures(3, &mut rng), 1.0, &mut rng);
    let a = mgf_finite_n(&phi, 64, &nu).unwrap().gap().abs();
    let b = mgf_finite_n(&phi, 128, &nu).unwrap().gap().abs();
    assert!(b < a && a < 0.1);
}

#[test]
fn dual_maximizer_recovers_rate() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for trial in 0..100 {
        let g = z(rng.gen_range(2..=6));
        let k = rng.gen_range(1..=5);
        let w = random_w00_positive(&g, k, 0.05, &mut rng);
        let nu = if trial % 2 == 0 {
            SymmetricDistribution::<f64>::uniform(g.clone())
        } else {
            let w0 = random_w00_positive(&g, 1, 0.1, &mut rng);
            SymmetricDistribution::new(g.clone(), w0.values().to_vec()).unwrap()
        };
        let (_, value) = dual_maximize(&w, &nu).unwrap();
        let rate = rate_function(&w, &nu).unwrap();
        assert!((value - rate).abs() <= 1e-10, "{value} vs {rate}");
    }
}

#[test]
fn dual_examples() {
    let g = z(3);
    let nu = SymmetricDistribution::new(g.clone(), vec![0.5, 0.25, 0.25]).unwrap();
    let w = StepCochainGraphon::constant(g.clone(), &[0.5, 0.25, 0.25]).unwrap();
    let (phi, value) = dual_maximize(&w, &nu).unwrap();
    assert!(phi.values().iter().all(|x| x.abs() < 1e-15));
    assert!(value.abs() < 1e-15);
    let err = dual_maximize(&identity_graphon(g.clone()), &nu).unwrap_err();
    assert!(matches!(err, crate::error::Error::ZeroEntry { .. }));
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let f = sample_random_cochain(4, &nu, &mut rng).unwrap();
    assert!(dual_maximize(&f.embed_graphon::<f64>(), &nu).is_err());
}

#[test]
fn weak_duality_and_shift_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for trial in 0..1000 {
        let g = z(rng.gen_range(2..=5));
        let w = random_w00(&g, rng.gen_range(1..=4), if trial % 2 == 0 { 0.3 } else { 0.0 }, &mut rng);
        let nu = SymmetricDistribution::<f64>::uniform(g.clone());
        let phi = random_test_function(&g, random_measures(rng.gen_range(1..=4), &mut rng), 3.0, &mut rng);
        let dual = dual_rate(&phi, &w, &nu).unwrap();
        let rate = rate_function(&w, &nu).unwrap();
        assert!(dual <= rate + 1e-12, "{dual} > {rate}");
        if trial % 10 == 0 {
            let c = rng.gen_range(-2.0..2.0);
            let shifted = phi.map_values(|x| x + c);
            let d2 = dual_rate(&shifted, &w, &nu).unwrap();
            assert!((d2 - dual).abs() < 1e-10);
        }
    }
}

#[test]
fn interpolation_to_uniform() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let g = z(4);
    let w = random_w00(&g, 3, 0.5, &mut rng);
    assert_eq!(interpolate_to_uniform(&w, 1.0).unwrap(), w);
    let u = interpolate_to_uniform(&w, 0.0).unwrap();
    assert!(u.values().iter().all(|x| (x - 0.25).abs() < 1e-15));
    let nu = SymmetricDistribution::<f64>::uniform(g.clone());
    let target = rate_function(&w, &nu).unwrap();
    let gaps: Vec<f64> = [0.9, 0.99, 0.999]
        .iter()
        .map(|&t| {
            let wt = interpolate_to_uniform(&w, t).unwrap();
            assert!(wt.in_w00_positive());
            (rate_function(&wt, &nu).unwrap() - target).abs()
        })
        .collect();
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
    assert!(interpolate_to_uniform(&w, 1.5).is_err());
    let f = Cochain::zero(3, g).unwrap();
    assert!(interpolate_to_uniform(&f.embed_graphon::<f64>(), 0.5).is_err());
}

#[test]
fn interpolation_is_exact_in_rationals() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let g = GroupSpec::new(vec![2, 3]).unwrap();
    let w = random_w00_rational(&g, 3, 10, &mut rng);
    let wt = interpolate_to_uniform(&w, q(3, 7)).unwrap();
    assert!(wt.in_w00_positive());
}

#[test]
fn cut_norm_bounded_by_l1_and_sup_on_embeds() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let nu = SymmetricDistribution::<f64>::uniform(z(3));
    for n in 2..8 {
        let w = sample_random_cochain(n, &nu, &mut rng).unwrap().embed_graphon::<BigRational>();
        let c = cut_norm(&w).unwrap();
        assert!(c <= w.l1_norm());
        // all entries are nonnegative, so the cut norm is the total mass
        assert_eq!(c, w.total_mass());
    }
}
