//! Matching pennies with noisy dual gradients: gap against the expectation bound.

use saddlekit::oracles::{NoiseModel, OracleHandle};
use saddlekit::problems::{ClosedFormInstance, MatrixGame, MatrixGameGeometry};
use saddlekit::solvers::{bound_expectation, default_rhos, geometric_checkpoints, run_spdhg, RunOptions, ScheduleParams};

fn main() -> saddlekit::Result<()> {
    let game = MatrixGame::<f64>::matching_pennies(MatrixGameGeometry::Euclidean);
    let p = game.problem();
    let noise = NoiseModel::sub_gaussian(0.0, 0.5, 0.5, 7);
    let levels = noise.levels();
    let (ox, oy) = (p.geom_x.bregman_diameter, p.geom_y.bregman_diameter);
    let (rho, rho_p) = default_rhos(ox, oy);
    let sched = ScheduleParams::convex_default(&p.constants, &levels, rho, rho_p)?;

    let horizon = 20_000;
    let mut oracle = OracleHandle::new(p, noise)?;
    let opts = RunOptions { checkpoints: geometric_checkpoints(horizon), instance: Some(&game), ..Default::default() };
    let (x, y, rec) = run_spdhg(p, &mut oracle, &sched, horizon, opts)?;

    for c in &rec.checkpoints {
        let b = bound_expectation(&p.constants, &levels, ox, oy, rho, rho_p, c.t)?.value;
        println!("t = {:>6}  gap = {:.3e}  B_E = {:.3e}", c.t, c.gap.unwrap_or(f64::NAN), b);
    }
    println!("x = {x:.4?}  y = {y:.4?}");
    Ok(())
}
