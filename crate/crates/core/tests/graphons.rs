use cocycle_core::graphon::{
    b_functional, cut_distance_bounds, cut_norm, random_w00, self_convolve, GraphonJson,
};
use cocycle_core::regularity::{fk_decompose_graphon, step_graphon};
use cocycle_core::graphon::CutMode;
use cocycle_core::{sample_random_cochain, Cochain, GroupSpec, StepCochainGraphon, SymmetricDistribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn relabeling_vertices_keeps_b_and_cut_distance_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let g = GroupSpec::cyclic(3).unwrap();
    let nu = SymmetricDistribution::<f64>::uniform(g);
    let f = sample_random_cochain(5, &nu, &mut rng).unwrap();
    let pi = [3, 1, 5, 2, 4];
    let h = f.permute(&pi).unwrap();
    let (wf, wh) = (f.embed_graphon::<f64>(), h.embed_graphon::<f64>());
    let (bf, bh) = (b_functional(&wf).unwrap(), b_functional(&wh).unwrap());
    assert!(bf == bh || (bf - bh).abs() < 1e-12, "{bf} vs {bh}");
    let d = cut_distance_bounds(&wf, &wh, 0).unwrap();
    assert!(d.exhaustive);
    assert!(d.upper.abs() < 1e-12 && d.lower <= d.upper);
}

#[test]
fn graphon_json_survives_convolution_and_stepping() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = GroupSpec::new(vec![2, 2]).unwrap();
    let w = random_w00(&g, 4, 0.2, &mut rng);
    let text = serde_json::to_string(&GraphonJson::from_graphon(&w)).unwrap();
    let back = GraphonJson::parse(&text).unwrap();
    assert_eq!(back, w);
    let c = self_convolve(&back);
    assert!(c.in_w00());
    let trace = fk_decompose_graphon(&c, 0.1, CutMode::Exact).unwrap();
    let stepped = step_graphon(&c, &trace.final_partition).unwrap();
    let residual = cut_norm(&c.sub(&stepped).unwrap()).unwrap();
    assert!(residual <= 0.1 * c.sup_norm() + 1e-12);
    assert!(trace.residual_exact);
}

#[test]
fn coboundaries_have_the_largest_b() {
    let g = GroupSpec::cyclic(2).unwrap();
    let n = 6;
    let zero = b_functional(&Cochain::zero(n, g.clone()).unwrap().embed_graphon::<f64>()).unwrap();
    let cob = Cochain::coboundary_of(g.clone(), &[0, 1, 1, 0, 1, 0]).unwrap();
    let b = b_functional(&cob.embed_graphon::<f64>()).unwrap();
    assert!((zero - b).abs() < 1e-12);
    let u = StepCochainGraphon::<f64>::uniform(g, 3);
    assert!(b_functional(&u).unwrap() < zero);
}
