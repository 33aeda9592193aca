use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use simplex_gauge::bundle::trivial_bundle;
use simplex_gauge::complex::{fixtures, SimplicialComplex};
use simplex_gauge::connection::{scalar_curvature, Connection};
use simplex_gauge::dynamics::*;
use simplex_gauge::group::{GaugeGroup, GroupElement};
use simplex_gauge::Error;

fn std_gauss(n: usize) -> Gaussian {
    Gaussian::from_spec(&DistributionSpec::standard(n)).unwrap()
}

#[test]
fn gaussian_rejects_bad_covariance() {
    let bad = DistributionSpec { mean: None, covariance: vec![vec![1.0, 2.0], vec![2.0, 1.0]] };
    assert!(Gaussian::from_spec(&bad).is_err());
    let asym = DistributionSpec { mean: None, covariance: vec![vec![1.0, 0.1], vec![0.0, 1.0]] };
    assert!(Gaussian::from_spec(&asym).is_err());
}

#[test]
fn standard_density_at_origin() {
    let g = std_gauss(2);
    assert!((g.density(&[0.0, 0.0]) - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-12);
    assert!((g.mahalanobis(&[3.0, 0.0], &[0.0, 4.0]) - 5.0).abs() < 1e-12);
    let cov = vec![vec![4.0, 0.0], vec![0.0, 1.0]];
    assert!((mahalanobis(&[2.0, 0.0], &[0.0, 0.0], &cov).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn identity_connection_has_zero_static_action() {
    let c = fixtures::torus7();
    let conn = Connection::identity(&trivial_bundle(&c, &GaugeGroup::so(3)));
    let field = sample_field(&DistributionSpec::standard(3), &c, 1).unwrap();
    assert!(static_action(&conn, &field, &std_gauss(3)).unwrap() < 1e-14);
    let p = probability_action(&conn, &field, &std_gauss(3)).unwrap();
    let direct: f64 = c
        .simplices(2)
        .iter()
        .flat_map(|t| t.iter().map(|x| std_gauss(3).density(field.get(*x).unwrap())).collect::<Vec<_>>())
        .sum();
    assert!((p - direct).abs() < 1e-12);
}

#[test]
fn path_enumeration() {
    let c = fixtures::circle(5);
    let p = enumerate_paths(&c, 0, 2, 4).unwrap();
    assert_eq!(p, vec![vec![0, 1, 2], vec![0, 4, 3, 2]]);
    assert_eq!(enumerate_paths(&c, 0, 2, 2).unwrap().len(), 1);
    assert_eq!(enumerate_paths(&c, 3, 3, 4).unwrap(), vec![vec![3]]);
}

#[test]
fn shape_function_bounds_and_errors() {
    assert!((shape_function(&[1.0, 0.0], &[2.0, 0.0]).unwrap() - 1.0).abs() < 1e-12);
    assert!(shape_function(&[1.0, 0.0], &[-1.0, 0.0]).unwrap().abs() < 1e-12);
    assert!(matches!(shape_function(&[0.0, 0.0], &[1.0, 0.0]), Err(Error::Singular(_))));
}

#[test]
fn flat_network_sees_parallel_states() {
    let c = fixtures::disc_fan(4);
    let conn = Connection::identity(&trivial_bundle(&c, &GaugeGroup::circle()));
    let field = MaterialField::constant(&c, vec![1.0, 0.5]);
    let model = NetworkModel { family: PathFamily::default(), distribution: DistributionSpec::standard(2) };
    let links = generate_network(&conn, &field, &model, 3).unwrap();
    assert_eq!(links.len(), 5 * 4);
    assert!(links.iter().all(|l| (l.probability - 1.0).abs() < 1e-12 && l.sampled));
    let mut csv = Vec::new();
    write_network_csv(&links, &mut csv).unwrap();
    assert!(String::from_utf8(csv).unwrap().starts_with("src,dst,probability,sampled"));
}

#[test]
fn disconnected_pairs_get_zero_probability() {
    let c = SimplicialComplex::from_maximal_simplices(4, &[vec![0, 1], vec![2, 3]]).unwrap();
    let conn = Connection::identity(&trivial_bundle(&c, &GaugeGroup::circle()));
    let field = MaterialField::constant(&c, vec![1.0, 0.0]);
    let model = NetworkModel { family: PathFamily::default(), distribution: DistributionSpec::standard(2) };
    let links = generate_network(&conn, &field, &model, 0).unwrap();
    let p = links.iter().find(|l| l.src == 0 && l.dst == 3).unwrap();
    assert_eq!(p.probability, 0.0);
    assert!(matches!(
        wilson_superposition(&conn, &field, 0, 3, &PathFamily::default(), &std_gauss(2)),
        Err(Error::NoPath)
    ));
}

#[test]
fn optimizer_methods_reduce_the_objective() {
    let c = fixtures::disc_fan(5);
    let b = trivial_bundle(&c, &GaugeGroup::so(3));
    let field = sample_field(&DistributionSpec::standard(3), &c, 2).unwrap();
    let init = Connection::random(&b, &mut ChaCha8Rng::seed_from_u64(2));
    let f = Functional::Static(std_gauss(3));
    let start = f.objective(&init, &field).unwrap();
    for method in [OptimizerMethod::CoordinateDescent, OptimizerMethod::SimulatedAnnealing, OptimizerMethod::FiniteDifferenceGradient] {
        let cfg = OptimizerConfig { method, max_iters: 200, ..Default::default() };
        let res = optimize_connection(&f, &field, &init, &cfg).unwrap();
        assert!(res.objective < start, "{:?}", method);
        assert_eq!(res.trace[0], start);
        let again = optimize_connection(&f, &field, &init, &cfg).unwrap();
        assert_eq!(res.trace, again.trace, "{:?} not reproducible", method);
    }
}

#[test]
fn discrete_optimizer_matches_brute_force() {
    let c = fixtures::triangle();
    let g = GaugeGroup::o(1);
    let b = trivial_bundle(&c, &g);
    let field = MaterialField::constant(&c, vec![1.0]);
    let f = Functional::Static(std_gauss(1));
    let (_, best) = brute_force_connection(&f, &field, &b).unwrap();
    let res = optimize_connection(&f, &field, &Connection::identity(&b), &OptimizerConfig::default()).unwrap();
    assert!((res.objective - best).abs() < 1e-12);
    let grad = OptimizerConfig { method: OptimizerMethod::FiniteDifferenceGradient, ..Default::default() };
    assert!(matches!(optimize_connection(&f, &field, &Connection::identity(&b), &grad), Err(Error::Unsupported(_))));
}

#[test]
fn evolve_is_reproducible() {
    let c = fixtures::disc_fan(4);
    let b = trivial_bundle(&c, &GaugeGroup::circle());
    let field = sample_field(&DistributionSpec::standard(2), &c, 5).unwrap();
    let cfg = EvolveConfig { optimizer: OptimizerConfig { max_iters: 20, ..Default::default() }, ..Default::default() };
    let a = evolve(&field, &Connection::identity(&b), &std_gauss(2), 3, &cfg).unwrap();
    let z = evolve(&field, &Connection::identity(&b), &std_gauss(2), 3, &cfg).unwrap();
    assert_eq!(a.steps.len(), 3);
    for (x, y) in a.steps.iter().zip(&z.steps) {
        assert_eq!(x.probability_action, y.probability_action);
        assert_eq!(x.field, y.field);
    }
    let rs = EvolveConfig { resample: true, ..cfg };
    let t = evolve(&field, &Connection::identity(&b), &std_gauss(2), 2, &rs).unwrap();
    assert!(t.steps.iter().all(|s| s.accepted == 5));
    assert!(evolve(&field, &Connection::identity(&b), &std_gauss(2), 0, &rs).is_err());
}

#[test]
fn ising_ferromagnet_on_a_torus() {
    let c = fixtures::grid_torus(3);
    let ferro: Couplings = c.simplices(1).iter().map(|e| ((e[0], e[1]), 1)).collect();
    let (e, deg) = ground_states(&c, &ferro).unwrap();
    assert_eq!((e, deg), (-(c.count(1) as i64), 2));
    let conn = ising_couplings_connection(&trivial_bundle(&c, &GaugeGroup::cyclic(2)), &ferro).unwrap();
    assert!(frustrated_plaquettes(&conn).unwrap().is_empty());
    let (best, spins) = anneal_spins(&c, &ferro, &SpinAnnealConfig::default(), 1).unwrap();
    assert_eq!(best, e);
    assert_eq!(ising_energy(&c, &ferro, &spins).unwrap(), best);
}

#[test]
fn spin_connection_is_pure_gauge() {
    let c = fixtures::triangle();
    let b = trivial_bundle(&c, &GaugeGroup::cyclic(2));
    let spins: BTreeMap<usize, i8> = [(0, 1), (1, -1), (2, -1)].into_iter().collect();
    let conn = spin_connection(&b, &spins).unwrap();
    assert!(frustrated_plaquettes(&conn).unwrap().is_empty());
    assert_eq!(conn.phi(0, 1).unwrap(), GroupElement::Cyclic(1));
    assert!(ising_couplings_connection(&b, &[((0, 1), 2i8)].into_iter().collect()).is_err());
}

#[test]
fn obstruction_trigger_raises_curved_slots() {
    let c = fixtures::two_triangles();
    let g = GaugeGroup::so(3);
    let b = trivial_bundle(&c, &g);
    let mut conn = Connection::identity(&b);
    conn = conn.with_edge(0, 1, g.exp_coords(&[0.0, 0.0, 2.0]).unwrap()).unwrap();
    assert!((scalar_curvature(&conn, &[0, 1, 2], 0).unwrap() - 3.0).abs() > 0.5);
    let trig = ObstructionTrigger { threshold: 0.1, dim: 1, probability: 1.0, classes: vec![1] };
    let nb = apply_obstruction_trigger(&b, &conn, &trig, 0).unwrap();
    assert_eq!(nb.slots().len(), 1);
    let flat = apply_obstruction_trigger(&b, &Connection::identity(&b), &trig, 0).unwrap();
    assert!(flat.slots().is_empty());
    let su2 = GaugeGroup::su2();
    let bs = trivial_bundle(&c, &su2);
    assert!(matches!(apply_obstruction_trigger(&bs, &Connection::identity(&bs), &trig, 0), Err(Error::Unsupported(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn ising_energy_is_flip_invariant(seed in any::<u64>(), spins in prop::collection::vec(prop::bool::ANY, 9)) {
        let c = fixtures::grid_torus(3);
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let cpl: Couplings = c.simplices(1).iter().map(|e| ((e[0], e[1]), if rand::Rng::random_bool(&mut r, 0.5) { 1 } else { -1 })).collect();
        let s: Vec<i8> = spins.iter().map(|b| if *b { 1 } else { -1 }).collect();
        let flipped: Vec<i8> = s.iter().map(|x| -x).collect();
        prop_assert_eq!(ising_energy(&c, &cpl, &s).unwrap(), ising_energy(&c, &cpl, &flipped).unwrap());
        let (ground, _) = ground_states(&c, &cpl).unwrap();
        prop_assert!(ising_energy(&c, &cpl, &s).unwrap() >= ground);
    }

    #[test]
    fn static_action_is_nonnegative_and_gauge_invariant(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let c = fixtures::disc_fan(4);
        let g = GaugeGroup::so(3);
        let b = trivial_bundle(&c, &g);
        let conn = Connection::random(&b, &mut r);
        let field = sample_field(&DistributionSpec::standard(3), &c, seed).unwrap();
        let phi = simplex_gauge::forms::GForm::random(&g, 0, &c, &mut r);
        let a0 = static_action(&conn, &field, &std_gauss(3)).unwrap();
        let a1 = static_action(
            &simplex_gauge::connection::gauge_transform_connection(&conn, &phi).unwrap(),
            &field.gauge_transform(&g, &phi),
            &std_gauss(3),
        ).unwrap();
        prop_assert!(a0 >= 0.0);
        prop_assert!((a0 - a1).abs() < 1e-9);
    }

    #[test]
    fn link_probabilities_are_probabilities(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let c = fixtures::disc_fan(4);
        let conn = Connection::random(&trivial_bundle(&c, &GaugeGroup::circle()), &mut r);
        let field = sample_field(&DistributionSpec::standard(2), &c, seed).unwrap();
        for x1 in 0..5 {
            for x2 in 0..5 {
                if x1 != x2 {
                    let p = link_probability(&conn, &field, &std_gauss(2), &PathFamily::default(), x1, x2).unwrap();
                    prop_assert!((0.0..=1.0).contains(&p));
                }
            }
        }
    }
}
