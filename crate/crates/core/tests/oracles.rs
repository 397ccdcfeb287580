use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use saddlekit::geometry::NormKind;
use saddlekit::oracles::*;
use saddlekit::problems::*;

fn quad() -> QuadraticSaddle<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    QuadraticSaddle::random(&QuadraticParams { n_components: 8, component_spread: 0.3, ..QuadraticParams::default() }, &mut rng).unwrap()
}

#[test]
fn deterministic_mode_returns_exact_gradients() {
    let q = quad();
    let p = q.problem();
    let mut o = OracleHandle::new(p, NoiseModel::deterministic()).unwrap().with_diagnostics(true);
    let (x, y) = ([0.1, 0.2, -0.3, 0.0, 0.5], [0.1, 0.0, -0.2, 0.3]);
    for kind in GradKind::ALL {
        let s = o.sample(kind, &x, &y).unwrap();
        assert_eq!(s.value, p.terms.gradient(kind, &x, &y));
        assert!(s.noise.unwrap().iter().all(|&v| v == 0.0));
        assert_eq!(s.which, kind);
        assert_eq!(s.call_index, 1);
    }
    assert_eq!(o.stats().total(), 3);
}

#[test]
fn full_batch_minibatch_is_exact() {
    let q = quad();
    let p = q.problem();
    let model = NoiseModel { kind: NoiseKind::FiniteSumMinibatch { batch_size: 8, sigma_x_f: 0.0, sigma_x_phi: 0.0, sigma_y_phi: 0.0 }, rng_seed: 3 };
    let mut o = OracleHandle::new(p, model).unwrap();
    let (x, y) = ([0.1, 0.2, -0.3, 0.0, 0.5], [0.1, 0.0, -0.2, 0.3]);
    for kind in GradKind::ALL {
        let v = o.sample(kind, &x, &y).unwrap().value;
        let exact = p.terms.gradient(kind, &x, &y);
        assert!(saddlekit::linalg::dist2(&v, &exact) < 1e-12);
    }
}

#[test]
fn minibatch_is_unbiased() {
    let q = quad();
    let p = q.problem();
    let model = NoiseModel { kind: NoiseKind::FiniteSumMinibatch { batch_size: 2, sigma_x_f: 1.0, sigma_x_phi: 1.0, sigma_y_phi: 1.0 }, rng_seed: 4 };
    let mut o = OracleHandle::new(p, model).unwrap().with_diagnostics(true);
    let (x, y) = ([0.1, 0.2, -0.3, 0.0, 0.5], [0.1, 0.0, -0.2, 0.3]);
    let n = 20000;
    let mut mean = vec![0.0; 4];
    let mut sq = 0.0;
    for _ in 0..n {
        let d = o.sample(GradKind::GradYPhi, &x, &y).unwrap().noise.unwrap();
        saddlekit::linalg::axpy(1.0 / n as f64, &d, &mut mean);
        sq += saddlekit::linalg::dot(&d, &d) / n as f64;
    }
    for m in mean {
        assert!(m.abs() <= 5.0 * sq.sqrt() / (n as f64).sqrt());
    }
    assert!(o.stats().second_moment(GradKind::GradYPhi).is_some());
}

#[test]
fn invalid_batch_or_sigma_is_rejected() {
    let q = quad();
    let bad = NoiseModel { kind: NoiseKind::FiniteSumMinibatch { batch_size: 9, sigma_x_f: 0.0, sigma_x_phi: 0.0, sigma_y_phi: 0.0 }, rng_seed: 0 };
    assert!(OracleHandle::new(q.problem(), bad).is_err());
    assert!(OracleHandle::new(q.problem(), NoiseModel::sub_gaussian(-1.0, 0.0, 0.0, 0)).is_err());
}

#[test]
fn infeasible_query_is_a_domain_error() {
    let q = quad();
    let mut o = OracleHandle::new(q.problem(), NoiseModel::deterministic()).unwrap();
    let far = [10.0, 0.0, 0.0, 0.0, 0.0];
    assert!(matches!(o.sample(GradKind::GradF, &far, &[0.0; 4]), Err(saddlekit::Error::Domain(_))));
}

struct Moments {
    mean: Vec<f64>,
    sq: f64,
    expo: f64,
}

fn moments(norm: NormKind<f64>, len: usize, sigma: f64, seed: u64) -> Moments {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 100_000;
    let mut m = Moments { mean: vec![0.0; len], sq: 0.0, expo: 0.0 };
    for _ in 0..n {
        let d = draw_sub_gaussian(&mut rng, &norm, len, sigma);
        let dn = norm.dual_norm(&d);
        saddlekit::linalg::axpy(1.0 / n as f64, &d, &mut m.mean);
        m.sq += dn * dn / n as f64;
        m.expo += (dn * dn / (sigma * sigma)).exp() / n as f64;
    }
    m
}

#[test]
fn sub_gaussian_moment_checks() {
    let bound = 5.0 / (100_000f64).sqrt();
    for (norm, len, sigma) in [(NormKind::L2, 5, 1.0), (NormKind::L1, 6, 0.5), (NormKind::Lp(1.5), 4, 2.0), (NormKind::SymmetricNuclear, 9, 1.0)] {
        let m = moments(norm, len, sigma, 7);
        for v in &m.mean {
            assert!(v.abs() <= bound * sigma, "{norm:?}: mean {v}");
        }
        assert!(m.sq <= 1.05 * sigma * sigma, "{norm:?}: second moment {}", m.sq);
        assert!(m.expo <= std::f64::consts::E * 1.05, "{norm:?}: exp moment {}", m.expo);
    }
}

#[test]
fn oracle_streams_meet_the_moment_checks() {
    let q = quad();
    let mut o = OracleHandle::new(q.problem(), NoiseModel::sub_gaussian(1.0, 0.5, 1.0, 11)).unwrap().with_diagnostics(true);
    let (x, y) = ([0.0; 5], [0.0; 4]);
    for kind in GradKind::ALL {
        let sigma = o.model().sigma(kind);
        let n = 100_000;
        let mut mean = vec![0.0; if kind == GradKind::GradYPhi { 4 } else { 5 }];
        let mut expo = 0.0;
        for _ in 0..n {
            let d = o.sample(kind, &x, &y).unwrap().noise.unwrap();
            saddlekit::linalg::axpy(1.0 / n as f64, &d, &mut mean);
            expo += (saddlekit::linalg::dot(&d, &d) / (sigma * sigma)).exp() / n as f64;
        }
        assert!(mean.iter().all(|m| m.abs() <= 5.0 * sigma / (n as f64).sqrt()));
        assert!(o.stats().second_moment(kind).unwrap() <= 1.05 * sigma * sigma);
        assert!(expo <= std::f64::consts::E * 1.05);
    }
}

#[test]
fn seeded_streams_are_bitwise_identical() {
    let q = quad();
    let run = |seed| {
        let mut o = OracleHandle::new(q.problem(), NoiseModel::sub_gaussian(0.3, 0.2, 0.1, seed)).unwrap();
        (0..50).flat_map(|i| {
            let kind = GradKind::ALL[i % 3];
            o.sample(kind, &[0.0; 5], &[0.0; 4]).unwrap().value
        }).map(f64::to_bits).collect::<Vec<_>>()
    };
    assert_eq!(run(42), run(42));
    assert_ne!(run(42), run(43));
}

#[test]
fn streams_are_independent_of_call_interleaving() {
    let q = quad();
    let mut a = OracleHandle::new(q.problem(), NoiseModel::sub_gaussian(0.3, 0.2, 0.1, 5)).unwrap();
    let mut b = OracleHandle::new(q.problem(), NoiseModel::sub_gaussian(0.3, 0.2, 0.1, 5)).unwrap();
    let z = ([0.0; 5], [0.0; 4]);
    let _ = a.sample(GradKind::GradF, &z.0, &z.1).unwrap();
    let ya = a.sample(GradKind::GradYPhi, &z.0, &z.1).unwrap().value;
    let yb = b.sample(GradKind::GradYPhi, &z.0, &z.1).unwrap().value;
    assert_eq!(ya, yb);
}
