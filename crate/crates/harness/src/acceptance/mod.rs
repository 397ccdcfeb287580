//! The acceptance suite: ten numerical checks, each reported as one pass/fail line.

pub mod brute;

use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use saddlekit::geometry::{bregman_prox, lp_norm, sample_point, GeometrySpec, NormKind, SetKind, SimpleFunction};
use saddlekit::linalg::{self, DenseMatrix};
use saddlekit::oracles::{draw_sub_gaussian, GradKind, NoiseKind, NoiseLevels, NoiseModel, OracleHandle};
use saddlekit::problems::{
    best_response_x, ClosedFormInstance, Constants, MatrixGame, MatrixGameGeometry, QuadraticParams, QuadraticSaddle,
    SaddleProblem,
};
use saddlekit::solvers::*;

use crate::fit::fit_rate;

/// Result of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "[PASS]" } else { "[FAIL]" };
        write!(f, "{tag} {:>2} {}: {} ({:.1}s)", self.id, self.title, self.detail, self.elapsed.as_secs_f64())
    }
}

pub const TITLES: [&str; 10] = [
    "bound domination, convex case",
    "schedule conditions",
    "prox oracle equivalence",
    "rescaled subroutine guarantee",
    "deterministic restart",
    "stochastic restart",
    "rate orders",
    "gradient-mapping stopping rule",
    "best-response Lipschitz bound",
    "oracle noise assumptions",
];

type Check = fn() -> Result<String, String>;

const CHECKS: [Check; 10] = [
    bound_domination,
    schedule_conditions,
    prox_equivalence,
    rescaled_guarantee,
    restart_det,
    restart_stoc,
    rate_orders,
    gradient_mapping,
    best_response_lipschitz,
    oracle_noise,
];

/// Runs criterion `id` (1 to 10).
pub fn run_criterion(id: u8) -> CriterionOutcome {
    assert!((1..=10).contains(&id), "criterion ids run from 1 to 10");
    let i = usize::from(id) - 1;
    let start = Instant::now();
    let res = std::panic::catch_unwind(CHECKS[i]).unwrap_or_else(|e| {
        let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
        Err(format!("panicked: {}", msg.unwrap_or_default()))
    });
    let (passed, detail) = match res {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CriterionOutcome { id, title: TITLES[i], passed, detail, elapsed: start.elapsed() }
}

pub fn run_all() -> Vec<CriterionOutcome> {
    (1..=10).map(run_criterion).collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: saddlekit::Error) -> String {
    e.to_string()
}

fn default_schedule(p: &SaddleProblem<f64>, noise: &NoiseLevels<f64>) -> Result<(ScheduleParams<f64>, f64, f64), String> {
    let (rho, rho_p) = default_rhos(p.geom_x.bregman_diameter, p.geom_y.bregman_diameter);
    Ok((ScheduleParams::convex_default(&p.constants, noise, rho, rho_p).map_err(err)?, rho, rho_p))
}

fn b_e(p: &SaddleProblem<f64>, noise: &NoiseLevels<f64>, rho: f64, rho_p: f64, t: usize) -> Result<f64, String> {
    let (ox, oy) = (p.geom_x.bregman_diameter, p.geom_y.bregman_diameter);
    Ok(bound_expectation(&p.constants, noise, ox, oy, rho, rho_p, t).map_err(err)?.value)
}

/// Matrix games with exact gradients: gap at every geometric checkpoint up to
/// `T = 5000` stays below `B_E(t)`, in under 10 s per game.
pub fn bound_domination() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let games: Vec<(&str, MatrixGame<f64>)> = vec![
        ("matching pennies", MatrixGame::matching_pennies(MatrixGameGeometry::Euclidean)),
        ("random 2x2", MatrixGame::random(2, 2, MatrixGameGeometry::Euclidean, &mut rng)),
        ("random 10x10", MatrixGame::random(10, 10, MatrixGameGeometry::Euclidean, &mut rng)),
    ];
    let horizon = 5000;
    let cps = geometric_checkpoints(horizon);
    let zero = NoiseLevels::zero();
    let mut worst: f64 = 0.0;
    let mut slowest: f64 = 0.0;
    for (name, g) in &games {
        let p = g.problem();
        let (sched, rho, rho_p) = default_schedule(p, &zero)?;
        let (n, m) = (p.dim_x(), p.dim_y());
        let mut starts = vec![p.start_point()];
        for _ in 0..3 {
            starts.push((sample_point(&SetKind::Simplex(n), n, &mut rng), sample_point(&SetKind::Simplex(m), m, &mut rng)));
        }
        let mut xv = vec![0.0; n];
        xv[0] = 1.0;
        let mut yv = vec![0.0; m];
        yv[m - 1] = 1.0;
        starts.push((xv, yv));
        let clock = Instant::now();
        for (x1, y1) in starts {
            let mut o = OracleHandle::new(p, NoiseModel::deterministic()).map_err(err)?;
            let opts = RunOptions { x1: Some(x1), y1: Some(y1), checkpoints: cps.clone(), instance: Some(g), observer: None };
            let (_, _, rec) = run_spdhg(p, &mut o, &sched, horizon, opts).map_err(err)?;
            ensure(rec.checkpoints.len() == cps.len(), || format!("{name}: missing checkpoints"))?;
            for cp in &rec.checkpoints {
                let b = b_e(p, &zero, rho, rho_p, cp.t)?;
                let gap = cp.gap.unwrap_or(f64::NAN);
                ensure(gap <= b, || format!("{name}: gap {gap:.3e} > B_E {b:.3e} at t = {}", cp.t))?;
                worst = worst.max(gap / b);
            }
        }
        let secs = clock.elapsed().as_secs_f64();
        slowest = slowest.max(secs);
        ensure(secs < 10.0, || format!("{name}: {secs:.1}s exceeds 10s"))?;
    }
    Ok(format!("{} games, max gap/B_E = {worst:.3}, slowest game {slowest:.2}s", games.len()))
}

/// All three schedule families pass the eight step-size conditions with
/// `γ_t = t` for `t ≤ 10⁵`, over 100 random constant draws.
pub fn schedule_conditions() -> Result<String, String> {
    let t_max = 100_000;
    let draws: Vec<u64> = (0..100).collect();
    let failures: Vec<String> = draws
        .par_iter()
        .filter_map(|&seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(7000 + seed);
            let mut maybe_zero = |hi: f64| if rng.random_bool(0.2) { 0.0 } else { rng.random_range(0.0..hi) };
            let (l, l_xx, l_yy) = (maybe_zero(10.0), maybe_zero(5.0), maybe_zero(5.0));
            let (sx_f, sx_phi, sy) = (maybe_zero(2.0), maybe_zero(2.0), maybe_zero(2.0));
            let c = Constants { l, l_xx, l_yx: rng.random_range(0.01..5.0), l_yy, mu: rng.random_range(0.01..1.0) };
            let noise = NoiseLevels { sigma_x_f: sx_f, sigma_x_phi: sx_phi, sigma_y_phi: sy };
            let (rho, rho_p) = (rng.random_range(0.05..5.0), rng.random_range(0.05..5.0));
            let (om_p, om_y, r) = (rng.random_range(0.1..3.0), rng.random_range(0.1..3.0), rng.random_range(0.05..5.0));
            let vs = rng.random_range(0.001..0.1);
            let scheds = [
                ScheduleParams::convex_default(&c, &noise, rho, rho_p),
                ScheduleParams::rescaled_det(&c, om_p, om_y, r, t_max),
                ScheduleParams::rescaled_stoc(&c, &noise, om_p, om_y, r, vs, t_max),
            ];
            for s in scheds {
                let s = match s {
                    Ok(s) => s,
                    Err(e) => return Some(format!("draw {seed}: {e}")),
                };
                if let Some(v) = verify_schedule(&s, &c, t_max).first_violation() {
                    return Some(format!("draw {seed} {:?}: condition {} fails at t = {}", s.kind, v.condition.id(), v.t));
                }
                if let Some(t) = (1..=t_max).find(|&t| s.gamma(t) != t as f64) {
                    return Some(format!("draw {seed} {:?}: γ_{t} ≠ {t}", s.kind));
                }
            }
            None
        })
        .collect();
    ensure(failures.is_empty(), || format!("{} failing draws, first: {}", failures.len(), failures[0]))?;
    Ok("100 draws x 3 families, 0 violations up to t = 1e5".into())
}

fn simplex_interior(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let u: Vec<f64> = sample_point(&SetKind::Simplex(n), n, rng);
    u.iter().map(|v| 0.5 * v + 0.5 / n as f64).collect()
}

fn uniform_vec(n: usize, scale: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-scale..scale)).collect()
}

fn step_point(u_ref: &[f64], lin: &[f64], lam: f64) -> Vec<f64> {
    u_ref.iter().zip(lin).map(|(u, l)| u - lam * l).collect()
}

/// Closed-form proxes against brute-force minimization, 200 instances per
/// family, compared in the norm of each geometry.
pub fn prox_equivalence() -> Result<String, String> {
    const TOL: f64 = 1e-7;
    const N: usize = 200;
    let names = ["entropy/simplex", "entropy/spectrahedron", "p-norm/orthant", "euclidean/simplex", "euclidean/ball-intersection"];
    let mut worst = [0.0f64; 5];
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let zero = SimpleFunction::Zero;

    for _ in 0..N {
        let n = rng.random_range(2..=100);
        let u_ref = simplex_interior(n, &mut rng);
        let lin = uniform_vec(n, 2.0, &mut rng);
        let lam = rng.random_range(0.05..3.0);
        let fast = bregman_prox(&GeometrySpec::simplex_entropy(n), &u_ref, &lin, lam, &zero).map_err(err)?;
        let slow = brute::entropy_simplex_newton(&u_ref, &lin, lam);
        worst[0] = worst[0].max(linalg::norm1(&linalg::sub(&fast, &slow)));
    }

    for _ in 0..N {
        let n = rng.random_range(2..=6);
        let basis = linalg::sym_eig(&DenseMatrix::from_vec(n, n, uniform_vec(n * n, 1.0, &mut rng)).symmetrized()).1;
        let u_ref = linalg::eig_compose(&simplex_interior(n, &mut rng), &basis).data;
        let lin = DenseMatrix::from_vec(n, n, uniform_vec(n * n, 2.0, &mut rng)).symmetrized().data;
        let lam = rng.random_range(0.05..3.0);
        let fast = bregman_prox(&GeometrySpec::matrix_entropy(n), &u_ref, &lin, lam, &zero).map_err(err)?;
        let slow = brute::entropy_spectrahedron_newton(&u_ref, &lin, lam, n);
        worst[1] = worst[1].max(NormKind::SymmetricNuclear.norm(&linalg::sub(&fast, &slow)));
    }

    for _ in 0..N {
        let n = rng.random_range(2..=6);
        let p = rng.random_range(1.2..=2.0);
        let u_ref: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..2.0)).collect();
        let lin = uniform_vec(n, 1.0, &mut rng);
        let lam = rng.random_range(0.1..2.0);
        let fast = bregman_prox(&GeometrySpec::pnorm_orthant(n, p), &u_ref, &lin, lam, &zero).map_err(err)?;
        let slow = brute::pnorm_orthant_newton(&u_ref, &lin, lam, p);
        worst[2] = worst[2].max(lp_norm(&linalg::sub(&fast, &slow), p));
    }

    for _ in 0..N {
        let n = rng.random_range(2..=50);
        let u_ref: Vec<f64> = sample_point(&SetKind::Simplex(n), n, &mut rng);
        let lin = uniform_vec(n, 3.0, &mut rng);
        let lam = rng.random_range(0.05..3.0);
        let fast = bregman_prox(&GeometrySpec::euclidean(SetKind::Simplex(n)), &u_ref, &lin, lam, &zero).map_err(err)?;
        let slow = brute::simplex_projection_bisection(&step_point(&u_ref, &lin, lam));
        worst[3] = worst[3].max(linalg::dist2(&fast, &slow));
    }

    for i in 0..N {
        let n = rng.random_range(2..=8);
        let base = if i % 2 == 0 { SetKind::Simplex(n) } else { SetKind::NonnegativeOrthant(n) };
        let center: Vec<f64> = sample_point(&base, n, &mut rng);
        let radius = rng.random_range(0.05..1.0);
        let set = base.clone().intersect_ball(center.clone(), radius);
        let u_ref = set.center_point(n);
        let lin = uniform_vec(n, 3.0, &mut rng);
        let lam = rng.random_range(0.1..2.0);
        let fast = bregman_prox(&GeometrySpec::euclidean(set), &u_ref, &lin, lam, &zero).map_err(err)?;
        let proj_base = |u: &[f64]| base.project(u).expect("base projection");
        let slow = brute::dykstra(&step_point(&u_ref, &lin, lam), proj_base, &center, radius);
        worst[4] = worst[4].max(linalg::dist2(&fast, &slow));
    }

    for (w, name) in worst.iter().zip(names) {
        ensure(*w <= TOL, || format!("{name}: max deviation {w:.2e} > {TOL:.0e}"))?;
    }
    let parts: Vec<String> = worst.iter().zip(names).map(|(w, n)| format!("{n} {w:.1e}")).collect();
    Ok(format!("200 instances each, max deviation: {}", parts.join(", ")))
}

/// 20 random strongly convex quadratics with exact gradients, `R = 2‖x⁰ − x*‖`
/// and the closed-form horizon: gap ≤ μR²/16 and `‖x̄ − x*‖ ≤ R/(2√2)`.
pub fn rescaled_guarantee() -> Result<String, String> {
    let clock = Instant::now();
    let mut worst_gap: f64 = 0.0;
    let mut worst_dist: f64 = 0.0;
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(400 + seed);
        let q = QuadraticSaddle::<f64>::random(&QuadraticParams::default(), &mut rng).map_err(err)?;
        let p = q.problem();
        let (xs, _) = q.saddle_point().ok_or("instance without a saddle point")?;
        let (x0, _) = p.start_point();
        let r = 2.0 * linalg::dist2(&x0, &xs);
        let om_p = p.geom_x.normalized_diameter().map_err(err)?;
        let om_y = p.geom_y.bregman_diameter;
        let t = horizon_rescaled_det(&p.constants, om_p, om_y, r).map_err(err)?;
        let sched = ScheduleParams::rescaled_det(&p.constants, om_p, om_y, r, t).map_err(err)?;
        let mut o = OracleHandle::new(p, NoiseModel::deterministic()).map_err(err)?;
        let opts = RunOptions { instance: Some(&q), ..Default::default() };
        let x_set = p.geom_x.feasible_set.clone();
        let (xb, _, rec) = run_spdhg_rescaled(p, &mut o, &x0, r, x_set, t, &sched, opts).map_err(err)?;
        let gap = rec.final_gap.ok_or("no final gap")?;
        let gap_lim = p.constants.mu * r * r / 16.0;
        let dist = linalg::dist2(&xb, &xs);
        let dist_lim = r / (2.0 * 2f64.sqrt());
        ensure(gap <= gap_lim, || format!("instance {seed}: gap {gap:.3e} > μR²/16 = {gap_lim:.3e}"))?;
        ensure(dist <= dist_lim, || format!("instance {seed}: distance {dist:.3e} > R/(2√2) = {dist_lim:.3e}"))?;
        worst_gap = worst_gap.max(gap / gap_lim);
        worst_dist = worst_dist.max(dist / dist_lim);
    }
    let secs = clock.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("{secs:.1}s exceeds 60s"))?;
    Ok(format!("20 instances, max gap/limit {worst_gap:.2e}, max distance/limit {worst_dist:.2e}, {secs:.1}s"))
}

/// Deterministic restarts on the default quadratic for ε ∈ {1e-1, 1e-2, 1e-3}.
pub fn restart_det() -> Result<String, String> {
    let q = QuadraticSaddle::<f64>::random(&QuadraticParams::default(), &mut ChaCha8Rng::seed_from_u64(500)).map_err(err)?;
    let p = q.problem();
    let u = p.diameters.d_x;
    let om_p = p.geom_x.normalized_diameter().map_err(err)?;
    let om_y = p.geom_y.bregman_diameter;
    let (x0, _) = p.start_point();
    let mut ks = Vec::new();
    let mut parts = Vec::new();
    for eps in [1e-1, 1e-2, 1e-3] {
        let (xo, yo, rec) = restart_deterministic(p, &x0, u, eps, Some(&q)).map_err(err)?;
        let gap = q.duality_gap(&xo, &yo).map_err(err)?;
        ensure(gap <= eps, || format!("ε = {eps:.0e}: final gap {gap:.3e}"))?;
        let iters = rec.total_iterations();
        let bound = complexity_det(&p.constants, om_p, om_y, u, eps).map_err(err)?;
        ensure(iters as f64 <= bound, || format!("ε = {eps:.0e}: {iters} iterations > bound {bound:.0}"))?;
        let calls: u64 = rec.stages.iter().map(|s| 3 * (s.horizon as u64 - 1) + 1).sum();
        ensure(rec.total_stats.total() == calls, || format!("ε = {eps:.0e}: {} oracle calls, expected {calls}", rec.total_stats.total()))?;
        for st in &rec.stages {
            let lim = p.constants.mu * st.radius * st.radius / 16.0;
            let g = st.gap.unwrap_or(f64::NAN);
            ensure(g <= lim, || format!("ε = {eps:.0e}, stage {}: gap {g:.3e} > μR²/16 = {lim:.3e}", st.k))?;
        }
        ks.push(rec.plan.k);
        parts.push(format!("ε={eps:.0e}: K={} gap={gap:.2e} iters={iters}<={bound:.0}", rec.plan.k));
    }
    // ⌈log₂ 10⌉ = 4 per decade, one less when the ceiling absorbs the fraction
    for w in ks.windows(2) {
        let d = w[1] - w[0];
        ensure(d == 3 || d == 4, || format!("stage count grew by {d} over one decade of ε"))?;
    }
    Ok(parts.join("; "))
}

fn small_quadratic() -> Result<QuadraticSaddle<f64>, String> {
    let params = QuadraticParams { n: 3, m: 2, mu: 2.0, l: 4.0, l_xx: 0.5, l_yx: 1.0, l_yy: 0.5, r_x: 1.0, r_y: 0.125, ..Default::default() };
    QuadraticSaddle::random(&params, &mut ChaCha8Rng::seed_from_u64(600)).map_err(err)
}

/// Stochastic restarts, σ = 0.05 on every stream, ε = 1e-2, ν = 0.2, 20 seeds:
/// at least 15 successes and `Σ T_k` within the complexity bound.
pub fn restart_stoc() -> Result<String, String> {
    let (eps, nu, sigma) = (1e-2, 0.2, 0.05);
    let q = small_quadratic()?;
    let p = q.problem();
    let u = p.diameters.d_x;
    let om_p = p.geom_x.normalized_diameter().map_err(err)?;
    let om_y = p.geom_y.bregman_diameter;
    let levels = NoiseLevels { sigma_x_f: sigma, sigma_x_phi: sigma, sigma_y_phi: sigma };
    let bound = complexity_stoc(&p.constants, &levels, om_p, om_y, u, eps, nu).map_err(err)?;
    let (x0, _) = p.start_point();
    let clock = Instant::now();
    let runs: Vec<Result<(f64, usize), String>> = (0..20u64)
        .into_par_iter()
        .map(|seed| {
            let mut o = OracleHandle::new(p, NoiseModel::sub_gaussian(sigma, sigma, sigma, seed)).map_err(err)?;
            let (xo, yo, rec) = restart_stochastic(p, &mut o, &x0, u, eps, nu, None).map_err(err)?;
            Ok((q.duality_gap(&xo, &yo).map_err(err)?, rec.total_iterations()))
        })
        .collect();
    let runs: Vec<(f64, usize)> = runs.into_iter().collect::<Result<_, _>>()?;
    let secs = clock.elapsed().as_secs_f64();
    let successes = runs.iter().filter(|(g, _)| *g <= eps).count();
    let max_iters = runs.iter().map(|r| r.1).max().unwrap_or(0);
    let worst = runs.iter().map(|r| r.0).fold(0.0, f64::max);
    ensure(successes >= 15, || format!("{successes}/20 runs reached ε"))?;
    ensure(max_iters as f64 <= bound, || format!("{max_iters} iterations > bound {bound:.3e}"))?;
    ensure(secs < 300.0, || format!("{secs:.0}s exceeds 5 min"))?;
    Ok(format!("{successes}/20 runs with gap ≤ ε (worst {worst:.2e}), {max_iters} iterations ≤ {bound:.3e}, {secs:.0}s"))
}

/// Mean noisy gap of matching pennies decays at slope −0.5 ± 0.1 on
/// `t ∈ [10³, 10⁵]`; the `L` term of `B_E` scales as `T⁻²`.
pub fn rate_orders() -> Result<String, String> {
    let g = MatrixGame::<f64>::matching_pennies(MatrixGameGeometry::Euclidean);
    let p = g.problem();
    let horizon = 100_000;
    let levels = NoiseLevels { sigma_x_f: 0.0, sigma_x_phi: 1.0, sigma_y_phi: 1.0 };
    let (sched, _, _) = default_schedule(p, &levels)?;
    let cps: Vec<usize> = geometric_checkpoints(horizon).into_iter().filter(|&t| t >= 1000).collect();
    let seeds = 10u64;
    let traces: Vec<Result<Vec<f64>, String>> = (0..seeds)
        .into_par_iter()
        .map(|seed| {
            let mut o = OracleHandle::new(p, NoiseModel::sub_gaussian(0.0, 1.0, 1.0, seed)).map_err(err)?;
            let opts = RunOptions { checkpoints: cps.clone(), instance: Some(&g), ..Default::default() };
            let (_, _, rec) = run_spdhg(p, &mut o, &sched, horizon, opts).map_err(err)?;
            Ok(rec.checkpoints.iter().map(|c| c.gap.unwrap_or(f64::NAN)).collect())
        })
        .collect();
    let traces: Vec<Vec<f64>> = traces.into_iter().collect::<Result<_, _>>()?;
    let series: Vec<(f64, f64)> =
        cps.iter().enumerate().map(|(i, &t)| (t as f64, traces.iter().map(|tr| tr[i]).sum::<f64>() / seeds as f64)).collect();
    let noisy = fit_rate(&series).map_err(|e| e.to_string())?;
    ensure((-0.6..=-0.4).contains(&noisy.slope), || format!("noisy gap slope {:.3} outside [−0.6, −0.4]", noisy.slope))?;

    let c = Constants { l: 1.0, ..Default::default() };
    let lead: Vec<(f64, f64)> = cps
        .iter()
        .map(|&t| Ok((t as f64, bound_expectation(&c, &NoiseLevels::zero(), 1.0, 1.0, 1.0, 1.0, t).map_err(err)?.value)))
        .collect::<Result<_, String>>()?;
    let det = fit_rate(&lead).map_err(|e| e.to_string())?;
    ensure((det.slope + 2.0).abs() <= 0.2, || format!("L-term slope {:.3} not −2 ± 0.2", det.slope))?;
    Ok(format!("noisy gap slope {:.3} (r² {:.3}, 10 seeds), L-term slope {:.4}", noisy.slope, noisy.r2, det.slope))
}

/// Gradient-mapping certificate on 1000 ball-constrained quadratics with a
/// planted interior or boundary minimizer: whenever it fires, `P(u⁺) − P* ≤ ε + 1e-9`.
pub fn gradient_mapping() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(800);
    let (mut fired, mut boundary) = (0, 0);
    for inst in 0..1000 {
        let n = rng.random_range(2..=8);
        let mu = rng.random_range(0.1..1.0);
        let l = mu + rng.random_range(0.0..5.0);
        let mut spec: Vec<f64> = (0..n).map(|_| rng.random_range(mu..=l)).collect();
        spec[0] = mu;
        spec[1] = l;
        let basis = linalg::sym_eig(&DenseMatrix::from_vec(n, n, uniform_vec(n * n, 1.0, &mut rng)).symmetrized()).1;
        let h = linalg::eig_compose(&spec, &basis);
        let radius = rng.random_range(0.5..2.0);
        let dir = uniform_vec(n, 1.0, &mut rng);
        let dir = linalg::scale(&dir, 1.0 / linalg::norm2(&dir));
        // KKT: H x* + b + κ x* = 0 with κ > 0 only when ‖x*‖ = radius
        let (x_star, kappa) = if inst % 2 == 0 {
            (linalg::scale(&dir, radius * rng.random_range(0.0..0.9)), 0.0)
        } else {
            boundary += 1;
            (linalg::scale(&dir, radius), rng.random_range(0.1..3.0))
        };
        let b: Vec<f64> = linalg::scale(&linalg::add(&h.matvec(&x_star), &linalg::scale(&x_star, kappa)), -1.0);
        let set = SetKind::ball(vec![0.0; n], radius);
        let g = GeometrySpec::euclidean(set.clone());
        let pval = |u: &[f64]| 0.5 * h.quad(u) + linalg::dot(&b, u);
        let p_star = pval(&x_star);
        let eps = 10f64.powf(rng.random_range(-6.0..-1.0));
        let mut u: Vec<f64> = sample_point(&set, n, &mut rng);
        for _ in 0..5000 {
            let grad = linalg::add(&h.matvec(&u), &b);
            let chk = gradient_mapping_stop(&g, &grad, &u, &SimpleFunction::Zero, 1.0 / l, mu, eps).map_err(err)?;
            if chk.satisfied {
                fired += 1;
                let excess = pval(&chk.u_plus) - p_star;
                ensure(excess <= eps + 1e-9, || format!("instance {inst}: P(u⁺) − P* = {excess:.3e} > ε = {eps:.1e}"))?;
                break;
            }
            u = chk.u_plus;
        }
    }
    ensure(fired == 1000, || format!("certificate fired on only {fired}/1000 instances"))?;
    Ok(format!("1000 instances ({boundary} with boundary optimum), fired on all, 0 counterexamples"))
}

/// `‖x*(y) − x*(y′)‖ ≤ (L_yx/μ)‖y − y′‖ + 2·tol` on 100 pairs.
pub fn best_response_lipschitz() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(900);
    let q = QuadraticSaddle::<f64>::random(&QuadraticParams::default(), &mut rng).map_err(err)?;
    let p = q.problem();
    let c = p.constants;
    let tol = 1e-10;
    let ys = &p.geom_y.feasible_set;
    let m = p.dim_y();
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let y: Vec<f64> = sample_point(ys, m, &mut rng);
        // half the pairs close together, half spread over Y
        let y2: Vec<f64> = if i % 2 == 0 {
            ys.project(&linalg::add(&y, &uniform_vec(m, 0.05, &mut rng))).map_err(err)?
        } else {
            sample_point(ys, m, &mut rng)
        };
        let a = best_response_x(p, &y, tol).map_err(err)?;
        let b = best_response_x(p, &y2, tol).map_err(err)?;
        let lhs = linalg::dist2(&a, &b);
        let rhs = c.l_yx / c.mu * linalg::dist2(&y, &y2) + 2.0 * tol;
        ensure(lhs <= rhs, || format!("pair {i}: {lhs:.6e} > {rhs:.6e}"))?;
        worst = worst.max(lhs / rhs);
    }
    Ok(format!("100 pairs, max ratio to the bound {worst:.3}"))
}

struct MomentCheck {
    mean_dev: f64,
    second: f64,
    expo: f64,
}

fn moment_check(samples: impl Iterator<Item = (Vec<f64>, f64)>, n: usize, sigma: f64) -> MomentCheck {
    let mut mean: Vec<f64> = Vec::new();
    let (mut second, mut expo) = (0.0, 0.0);
    for (d, dn) in samples {
        if mean.is_empty() {
            mean = vec![0.0; d.len()];
        }
        linalg::axpy(1.0 / n as f64, &d, &mut mean);
        second += dn * dn / n as f64;
        expo += (dn * dn / (sigma * sigma)).exp() / n as f64;
    }
    MomentCheck { mean_dev: linalg::norm_inf(&mean) / sigma, second: second / (sigma * sigma), expo }
}

/// Oracle noise at 10⁵ samples per stream: zero mean (within 5σ/√n per
/// coordinate), `E‖δ‖*² ≤ σ²` and `E exp(‖δ‖*²/σ²) ≤ e`, each with 5 % slack.
pub fn oracle_noise() -> Result<String, String> {
    const N: usize = 100_000;
    let mean_lim = 5.0 / (N as f64).sqrt();
    let mut rows = Vec::new();
    let mut judge = |label: String, m: MomentCheck| -> Result<(), String> {
        ensure(m.mean_dev <= mean_lim, || format!("{label}: mean {:.2e}σ", m.mean_dev))?;
        ensure(m.second <= 1.05, || format!("{label}: second moment {:.3}σ²", m.second))?;
        ensure(m.expo <= 1.05 * std::f64::consts::E, || format!("{label}: exponential moment {:.3}", m.expo))?;
        rows.push(format!("{label} E‖δ‖²/σ²={:.2} Eexp={:.2}", m.second, m.expo));
        Ok(())
    };

    let q = QuadraticSaddle::<f64>::random(&QuadraticParams::default(), &mut ChaCha8Rng::seed_from_u64(1000)).map_err(err)?;
    let game = MatrixGame::<f64>::random(5, 4, MatrixGameGeometry::Entropic, &mut ChaCha8Rng::seed_from_u64(1001));
    let instances: [(&str, &SaddleProblem<f64>); 2] = [("quadratic", q.problem()), ("entropic game", game.problem())];
    for (name, p) in instances {
        let model = NoiseModel::sub_gaussian(1.0, 0.5, 2.0, 1002);
        let mut o = OracleHandle::new(p, model).map_err(err)?.with_diagnostics(true);
        let (x, y) = p.start_point();
        for kind in GradKind::ALL {
            let sigma = model.sigma(kind);
            let norm = if kind == GradKind::GradYPhi { p.geom_y.norm } else { p.geom_x.norm };
            let mut draws = Vec::with_capacity(N);
            for _ in 0..N {
                let d = o.sample(kind, &x, &y).map_err(err)?.noise.ok_or("no diagnostics")?;
                let dn = norm.dual_norm(&d);
                draws.push((d, dn));
            }
            judge(format!("{name}/{kind:?}"), moment_check(draws.into_iter(), N, sigma))?;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1003);
    let nuc = NormKind::SymmetricNuclear;
    let draws = (0..N).map(|_| {
        let d = draw_sub_gaussian(&mut rng, &nuc, 16, 1.5);
        let dn = nuc.dual_norm(&d);
        (d, dn)
    });
    judge("nuclear 4x4".into(), moment_check(draws, N, 1.5))?;

    // finite-sum minibatches are unbiased; their spread is measured, not assumed
    let fs = QuadraticParams { n_components: 8, component_spread: 0.3, ..Default::default() };
    let qf = QuadraticSaddle::<f64>::random(&fs, &mut ChaCha8Rng::seed_from_u64(1004)).map_err(err)?;
    let pf = qf.problem();
    let model = NoiseModel {
        kind: NoiseKind::FiniteSumMinibatch { batch_size: 3, sigma_x_f: 1.0, sigma_x_phi: 1.0, sigma_y_phi: 1.0 },
        rng_seed: 1005,
    };
    let mut o = OracleHandle::new(pf, model).map_err(err)?.with_diagnostics(true);
    let (x, y) = pf.start_point();
    for kind in GradKind::ALL {
        let mut mean: Vec<f64> = Vec::new();
        let mut sq: Vec<f64> = Vec::new();
        for _ in 0..N {
            let d = o.sample(kind, &x, &y).map_err(err)?.noise.ok_or("no diagnostics")?;
            if mean.is_empty() {
                mean = vec![0.0; d.len()];
                sq = vec![0.0; d.len()];
            }
            for ((m, s), v) in mean.iter_mut().zip(sq.iter_mut()).zip(&d) {
                *m += v / N as f64;
                *s += v * v / N as f64;
            }
        }
        for (m, s) in mean.iter().zip(&sq) {
            let sd = s.sqrt().max(1e-300);
            ensure(m.abs() <= 5.0 * sd / (N as f64).sqrt(), || format!("minibatch/{kind:?}: biased coordinate, mean {m:.3e}"))?;
        }
    }
    rows.push("minibatch unbiased on all streams".into());
    Ok(rows.join("; "))
}
