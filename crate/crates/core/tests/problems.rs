use std::sync::Arc;

use approx::assert_relative_eq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use saddlekit::geometry::{sample_point, GeometrySpec, SetKind, SimpleFunction};
use saddlekit::linalg::{self, DenseMatrix};
use saddlekit::problems::*;

#[derive(Debug)]
struct HalfSquare;

impl SmoothTerms<f64> for HalfSquare {
    fn f(&self, x: &[f64]) -> f64 {
        0.5 * linalg::dot(x, x)
    }
    fn grad_f(&self, x: &[f64]) -> Vec<f64> {
        x.to_vec()
    }
    fn phi(&self, _x: &[f64], _y: &[f64]) -> f64 {
        0.0
    }
    fn grad_x_phi(&self, x: &[f64], _y: &[f64]) -> Vec<f64> {
        vec![0.0; x.len()]
    }
    fn grad_y_phi(&self, _x: &[f64], y: &[f64]) -> Vec<f64> {
        vec![0.0; y.len()]
    }
}

fn pennies() -> MatrixGame<f64> {
    MatrixGame::matching_pennies(MatrixGameGeometry::Euclidean)
}

#[test]
fn evaluate_examples() {
    let zero = MatrixGame::new(DenseMatrix::zeros(2, 2), MatrixGameGeometry::Entropic);
    assert_eq!(evaluate_saddle(zero.problem(), &[0.3, 0.7], &[0.9, 0.1]).unwrap(), 0.0);
    let g = pennies();
    assert_eq!(evaluate_saddle(g.problem(), &[1.0, 0.0], &[1.0, 0.0]).unwrap(), 1.0);
    // direct matrix product
    let (x, y) = ([0.2, 0.8], [0.6, 0.4]);
    let a = [[1.0, -1.0], [-1.0, 1.0]];
    let want: f64 = (0..2).map(|i| (0..2).map(|j| y[i] * a[i][j] * x[j]).sum::<f64>()).sum();
    assert_relative_eq!(evaluate_saddle(g.problem(), &x, &y).unwrap(), want, epsilon = 1e-15);
}

#[test]
fn quadratic_value_at_saddle_matches_kkt_solve() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let q = QuadraticSaddle::<f64>::random(&QuadraticParams::default(), &mut rng).unwrap();
    let (xk, yk) = q.kkt_saddle().unwrap();
    let (xs, ys) = q.saddle_point().unwrap();
    assert!(linalg::dist2(&xk, &xs) < 1e-10 && linalg::dist2(&yk, &ys) < 1e-10);
    assert_relative_eq!(evaluate_saddle(q.problem(), &xk, &yk).unwrap(), q.saddle_value(), epsilon = 1e-10);
    assert!(q.duality_gap(&xs, &ys).unwrap() <= 1e-9);
}

#[test]
fn evaluate_rejects_infeasible_points() {
    let g = pennies();
    assert!(evaluate_saddle(g.problem(), &[1.0, 1.0], &[0.5, 0.5]).is_err());
}

#[test]
fn gap_examples() {
    let g = pennies();
    assert_eq!(duality_gap(&g, &[0.5, 0.5], &[0.5, 0.5]).unwrap(), 0.0);
    assert_eq!(duality_gap(&g, &[1.0, 0.0], &[1.0, 0.0]).unwrap(), 2.0);
    let zero = MatrixGame::new(DenseMatrix::zeros(3, 2), MatrixGameGeometry::Euclidean);
    assert_eq!(duality_gap(&zero, &[0.1, 0.9], &[0.2, 0.3, 0.5]).unwrap(), 0.0);
}

#[test]
fn gap_dominates_grid_sup_on_two_by_two_games() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let grid: Vec<[f64; 2]> = (0..=50).map(|i| [i as f64 / 50.0, 1.0 - i as f64 / 50.0]).collect();
    for _ in 0..20 {
        let g = MatrixGame::<f64>::random(2, 2, MatrixGameGeometry::Euclidean, &mut rng);
        let p = g.problem();
        for _ in 0..10 {
            let x = sample_point(&SetKind::Simplex(2), 2, &mut rng);
            let y = sample_point(&SetKind::Simplex(2), 2, &mut rng);
            let gap = duality_gap(&g, &x, &y).unwrap();
            assert!(gap >= 0.0);
            let best_y = grid.iter().map(|yp| p.evaluate(&x, yp).unwrap()).fold(f64::MIN, f64::max);
            let best_x = grid.iter().map(|xp| p.evaluate(xp, &y).unwrap()).fold(f64::MAX, f64::min);
            assert!(gap >= best_y - best_x - 1e-12);
            assert!(gap <= g.gap_upper_bound() + 1e-12);
        }
    }
}

#[test]
fn quadratic_gap_dominates_sampled_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let q = QuadraticSaddle::<f64>::random(&QuadraticParams::default(), &mut rng).unwrap();
    let p = q.problem();
    for _ in 0..50 {
        let x = sample_point(&p.geom_x.feasible_set, 5, &mut rng);
        let y = sample_point(&p.geom_y.feasible_set, 4, &mut rng);
        let gap = q.duality_gap(&x, &y).unwrap();
        assert!(gap >= 0.0 && gap <= q.gap_upper_bound());
        for _ in 0..50 {
            let xp = sample_point(&p.geom_x.feasible_set, 5, &mut rng);
            let yp = sample_point(&p.geom_y.feasible_set, 4, &mut rng);
            assert!(gap >= p.evaluate(&x, &yp).unwrap() - p.evaluate(&xp, &y).unwrap() - 1e-9);
        }
    }
}

#[test]
fn constrained_qp_gap_at_saddle_and_domination() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let c = ConstrainedQp::<f64>::random(&ConstrainedQpParams::default(), &mut rng).unwrap();
    let p = c.problem();
    let (xs, ys) = c.saddle_point().unwrap();
    assert!(c.duality_gap(&xs, &ys).unwrap() <= 1e-9);
    for _ in 0..20 {
        let x = sample_point(&p.geom_x.feasible_set, p.dim_x(), &mut rng);
        let y = sample_point(&p.geom_y.feasible_set, p.dim_y(), &mut rng);
        let gap = c.duality_gap(&x, &y).unwrap();
        for _ in 0..50 {
            let xp = sample_point(&p.geom_x.feasible_set, p.dim_x(), &mut rng);
            let yp = sample_point(&p.geom_y.feasible_set, p.dim_y(), &mut rng);
            assert!(gap >= p.evaluate(&x, &yp).unwrap() - p.evaluate(&xp, &y).unwrap() - 1e-9);
        }
    }
}

#[test]
fn best_response_at_the_saddle_dual_is_the_saddle_primal() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let q = QuadraticSaddle::<f64>::random(&QuadraticParams::default(), &mut rng).unwrap();
    let (xs, ys) = q.saddle_point().unwrap();
    let tol = 1e-10;
    let x = best_response_x(q.problem(), &ys, tol).unwrap();
    // suboptimality tol under μ-strong convexity bounds the distance by √(2 tol/μ)
    assert!(linalg::dist2(&x, &xs) <= (2.0 * tol / q.problem().constants.mu).sqrt());
}

#[test]
fn decoupled_best_response_is_zero() {
    let p = SaddleProblem {
        terms: Arc::new(HalfSquare),
        g: SimpleFunction::Zero,
        j: SimpleFunction::Zero,
        geom_x: GeometrySpec::euclidean(SetKind::FullSpace),
        geom_y: GeometrySpec::euclidean(SetKind::ball(vec![0.0; 2], 1.0)),
        constants: Constants { l: 1.0, l_xx: 0.0, l_yx: 0.0, l_yy: 0.0, mu: 1.0 },
        diameters: Diameters { d_x: f64::INFINITY, d_y: 2.0 },
    };
    for y in [[0.0, 0.0], [0.5, -0.3], [0.0, 1.0]] {
        let x = best_response_x(&p, &y, 1e-12).unwrap();
        assert!(x.iter().all(|v| v.abs() < 1e-6), "{x:?}");
    }
}

#[test]
fn best_response_rejects_bad_inputs() {
    let g = pennies();
    assert!(best_response_x(g.problem(), &[0.5, 0.5], 1e-6).is_err());
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let q = QuadraticSaddle::<f64>::random(&QuadraticParams::default(), &mut rng).unwrap();
    assert!(best_response_x(q.problem(), &[0.0; 4], 0.0).is_err());
}

#[test]
fn best_response_is_lipschitz_in_y() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let q = QuadraticSaddle::<f64>::random(&QuadraticParams::default(), &mut rng).unwrap();
    let p = q.problem();
    let c = p.constants;
    let tol = 1e-10;
    for _ in 0..100 {
        let y = sample_point(&p.geom_y.feasible_set, 4, &mut rng);
        let dir: Vec<f64> = (0..4).map(|_| rng.random_range(-0.1..0.1)).collect();
        let y2 = p.geom_y.feasible_set.project(&linalg::add(&y, &dir)).unwrap();
        let a = best_response_x(p, &y, tol).unwrap();
        let b = best_response_x(p, &y2, tol).unwrap();
        assert!(linalg::dist2(&a, &b) <= c.l_yx / c.mu * linalg::dist2(&y, &y2) + 2.0 * tol);
    }
}

#[test]
fn constant_certificates_hold_for_every_instance() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for geom in [MatrixGameGeometry::Euclidean, MatrixGameGeometry::Entropic] {
        let g = MatrixGame::<f64>::random(4, 3, geom, &mut rng);
        g.problem().check_constants(500, &mut rng).unwrap();
        pennies().problem().check_constants(200, &mut rng).unwrap();
    }
    for params in [
        QuadraticParams::default(),
        QuadraticParams { l_xx: 0.0, l_yy: 0.0, ..QuadraticParams::default() },
        QuadraticParams { n_components: 5, component_spread: 0.2, ..QuadraticParams::default() },
    ] {
        let q = QuadraticSaddle::<f64>::random(&params, &mut rng).unwrap();
        q.problem().check_constants(500, &mut rng).unwrap();
    }
    let c = ConstrainedQp::<f64>::random(&ConstrainedQpParams::default(), &mut rng).unwrap();
    c.problem().check_constants(500, &mut rng).unwrap();
}

#[test]
fn wrong_constants_are_caught() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let q = QuadraticSaddle::<f64>::random(&QuadraticParams::default(), &mut rng).unwrap();
    let mut p = q.problem().clone();
    p.constants.l_yx *= 0.2;
    assert!(p.check_constants(500, &mut rng).is_err());
}

#[test]
fn quadratic_constants_are_spectral_norms() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let params = QuadraticParams::default();
    let q = QuadraticSaddle::<f64>::random(&params, &mut rng).unwrap();
    let c = q.problem().constants;
    assert_relative_eq!(c.l, params.l, epsilon = 1e-9);
    assert_relative_eq!(c.mu, params.mu, epsilon = 1e-9);
    assert_relative_eq!(c.l_yx, params.l_yx, epsilon = 1e-9);
    assert!(c.l_xx <= params.l_xx + 1e-9 && c.l_yy <= params.l_yy + 1e-9);
}

#[test]
fn finite_sum_components_average_to_the_gradient() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let params = QuadraticParams { n_components: 6, component_spread: 0.3, ..QuadraticParams::default() };
    let q = QuadraticSaddle::<f64>::random(&params, &mut rng).unwrap();
    let t = &q.problem().terms;
    let x = sample_point(&q.problem().geom_x.feasible_set, 5, &mut rng);
    let y = sample_point(&q.problem().geom_y.feasible_set, 4, &mut rng);
    for kind in saddlekit::oracles::GradKind::ALL {
        let full = t.gradient(kind, &x, &y);
        let mut avg = vec![0.0; full.len()];
        for i in 0..6 {
            linalg::axpy(1.0 / 6.0, &t.component_gradient(kind, i, &x, &y), &mut avg);
        }
        assert!(linalg::dist2(&avg, &full) < 1e-12);
    }
}
