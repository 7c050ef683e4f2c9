use cocycle_core::complex::{
    enumerate_hypertrees, log_avoidance_exact, sample_linial_meshulam, sample_one_out, upperb_bound,
};
use cocycle_core::homology::{count_z1, dim_h1_mod_p, mg_h1, rp2_six, torsion_bound_check, IntegralHomology};
use cocycle_core::simplex::binomial;
use cocycle_core::{
    sample_random_cochain, GroupSpec, HomologyReport, ProjectionKernel, SymmetricDistribution, TwoComplex,
};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn sampled_hypertrees_have_finite_homology() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in 5..=10 {
        let k = ProjectionKernel::build(n).unwrap();
        for _ in 0..1000 {
            let t = k.sample(&mut rng).unwrap();
            assert_eq!(t.face_count(), binomial(n - 1, 2));
            assert_eq!(IntegralHomology::of(&t).betti1, 0, "n = {n}");
        }
    }
}

#[test]
fn enumerated_hypertrees_respect_torsion_bound() {
    let trees = enumerate_hypertrees(6).unwrap();
    assert!(trees.iter().all(|t| torsion_bound_check(&t.complex)));
    assert!(trees.iter().any(|t| t.complex == rp2_six()));
    let max = trees.iter().map(|t| t.torsion.clone()).max().unwrap();
    assert_eq!(max, 2.into());
}

#[test]
fn report_is_consistent_with_universal_coefficients() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for trial in 0..60 {
        let n = 5 + trial % 4;
        let x = if trial % 2 == 0 {
            sample_one_out(n, &mut rng).unwrap()
        } else {
            sample_linial_meshulam(n, 2.5, &mut rng).unwrap()
        };
        let full = HomologyReport::new(&x, Some(2), true).unwrap();
        let short = HomologyReport::new(&x, None, false).unwrap();
        assert_eq!(full.betti1, short.betti1);
        assert!(short.elementary_divisors.iter().all(|d| d != "1"));
        let even = full.elementary_divisors.iter().filter(|d| d.parse::<u64>().unwrap() % 2 == 0).count();
        assert_eq!(full.dim_h1.unwrap(), full.betti1 + even);
        assert_eq!(full.dim_z1.unwrap(), full.dim_h1.unwrap() + n - 1);
        let sup = [2u64, 3, 5, 7].iter().map(|&p| dim_h1_mod_p(&x, p).unwrap()).max().unwrap();
        assert!(mg_h1(&x) >= sup);
        // |Z^1(X, Z/2)| = 2^{dim Z^1 over F_2}
        let g = GroupSpec::cyclic(2).unwrap();
        assert_eq!(count_z1(&x, &g), BigUint::from(2u32).pow(full.dim_z1.unwrap() as u32));
    }
}

#[test]
fn complex_json_round_trip() {
    let x = rp2_six();
    let s = serde_json::to_string(&x).unwrap();
    assert!(s.starts_with(r#"{"n":6,"triangles":[[1,2,3]"#));
    assert_eq!(serde_json::from_str::<TwoComplex>(&s).unwrap(), x);
    assert!(serde_json::from_str::<TwoComplex>(r#"{"n":3,"triangles":[[1,2,4]]}"#).is_err());
}

#[test]
fn cocycle_probability_is_bounded_by_face_degrees() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let nu = SymmetricDistribution::<f64>::uniform(GroupSpec::cyclic(2).unwrap());
    for n in 5..=7 {
        for _ in 0..30 {
            let f = sample_random_cochain(n, &nu, &mut rng).unwrap();
            let y = f.coboundary_triangles();
            let exact = log_avoidance_exact(&y);
            let bound = upperb_bound(n, &y);
            assert!(exact == f64::NEG_INFINITY || exact <= bound + 1e-9);
        }
    }
}
