use serde::{Deserialize, Serialize};

use crate::error::{config, unsupported, Result};
use crate::oracles::{NoiseModel, OracleHandle, OracleStats};
use crate::problems::{ClosedFormInstance, SaddleProblem};
use crate::scalar::Scalar;

use super::bounds::{horizon_rescaled_det, horizon_rescaled_stoc, restart_radius, restart_stage_count};
use super::schedule::ScheduleParams;
use super::spdhg::{run_spdhg_rescaled, RunOptions};

/// Inputs of a restart run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestartConfig<T> {
    /// `U ≥ D_X`
    pub u: T,
    pub epsilon: T,
    /// failure probability (stochastic scheme only)
    pub nu: Option<T>,
}

/// Stage plan: `K`, `ς`, `R_k` and `T_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartPlan<T> {
    pub k: usize,
    pub varsigma: Option<T>,
    pub radii: Vec<T>,
    pub horizons: Vec<usize>,
}

impl<T: Scalar> RestartConfig<T> {
    /// Plans the deterministic (`nu = None`) or stochastic scheme.
    pub fn plan(&self, p: &SaddleProblem<T>, noise: &NoiseModel<T>) -> Result<RestartPlan<T>> {
        let c = &p.constants;
        let k = restart_stage_count(c.mu, self.u, self.epsilon)?;
        let (omega_prime, omega_y) = diameters(p)?;
        let radii: Vec<T> = (1..=k).map(|i| restart_radius(self.u, i)).collect();
        let (varsigma, horizons) = match self.nu {
            None => (None, radii.iter().map(|&r| horizon_rescaled_det(c, omega_prime, omega_y, r)).collect::<Result<Vec<_>>>()?),
            Some(nu) => {
                if !(nu > T::zero() && nu <= T::one()) {
                    return Err(config(format!("ν = {nu} must lie in (0, 1]")));
                }
                let vs = nu / T::of_usize(6 * k);
                let lv = noise.levels();
                let hs = radii.iter().map(|&r| horizon_rescaled_stoc(c, &lv, omega_prime, omega_y, r, vs)).collect::<Result<Vec<_>>>()?;
                (Some(vs), hs)
            }
        };
        Ok(RestartPlan { k, varsigma, radii, horizons })
    }
}

fn diameters<T: Scalar>(p: &SaddleProblem<T>) -> Result<(T, T)> {
    let omega_prime = p.geom_x.normalized_diameter()?;
    let omega_y = p.geom_y.bregman_diameter;
    if !omega_y.is_finite() {
        return Err(config("restart schemes need a finite dual Bregman diameter"));
    }
    Ok((omega_prime, omega_y))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord<T> {
    pub k: usize,
    pub radius: T,
    pub horizon: usize,
    /// exact gap of the stage output, when an instance is supplied
    pub gap: Option<T>,
    pub calls: OracleStats,
    pub max_ball_excess: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecords<T> {
    pub plan: RestartPlan<T>,
    pub stages: Vec<StageRecord<T>>,
    pub total_stats: OracleStats,
}

impl<T> StageRecords<T> {
    /// `Σ_k T_k`
    pub fn total_iterations(&self) -> usize {
        self.stages.iter().map(|s| s.horizon).sum()
    }
}

#[allow(clippy::too_many_arguments)]
fn run_restart<T: Scalar>(
    p: &SaddleProblem<T>,
    o: &mut OracleHandle<T>,
    x1: &[T],
    cfg: &RestartConfig<T>,
    instance: Option<&dyn ClosedFormInstance<T>>,
    stochastic: bool,
) -> Result<(Vec<T>, Vec<T>, StageRecords<T>)> {
    let plan = cfg.plan(p, o.model())?;
    let (omega_prime, omega_y) = diameters(p)?;
    let levels = o.model().levels();
    let y_center = p.start_point().1;
    let mut x_k = x1.to_vec();
    let mut y_out = y_center.clone();
    let mut stages = Vec::with_capacity(plan.k);
    let mut total = OracleStats::default();
    for (i, (&r, &t_k)) in plan.radii.iter().zip(&plan.horizons).enumerate() {
        let (sched, x_prime) = if stochastic {
            let vs = plan.varsigma.expect("stochastic plan carries ς");
            let s = ScheduleParams::rescaled_stoc(&p.constants, &levels, omega_prime, omega_y, r, vs, t_k)?;
            let set = p.geom_x.feasible_set.clone().intersect_ball(x_k.clone(), r / T::of(2.0));
            (s, set)
        } else {
            (ScheduleParams::rescaled_det(&p.constants, omega_prime, omega_y, r, t_k)?, p.geom_x.feasible_set.clone())
        };
        let before = *o.stats();
        let opts = RunOptions { y1: Some(y_center.clone()), instance, checkpoints: vec![t_k], ..Default::default() };
        let (xb, yb, rec) = run_spdhg_rescaled(p, o, &x_k, r, x_prime, t_k, &sched, opts)?;
        let mut calls = *o.stats();
        calls.calls_f -= before.calls_f;
        calls.calls_x_phi -= before.calls_x_phi;
        calls.calls_y_phi -= before.calls_y_phi;
        total.calls_f += calls.calls_f;
        total.calls_x_phi += calls.calls_x_phi;
        total.calls_y_phi += calls.calls_y_phi;
        stages.push(StageRecord { k: i + 1, radius: r, horizon: t_k, gap: rec.final_gap, calls, max_ball_excess: rec.max_ball_excess });
        x_k = xb;
        y_out = yb;
    }
    total.noise_sq_sum = o.stats().noise_sq_sum;
    total.noise_count = o.stats().noise_count;
    Ok((x_k, y_out, StageRecords { plan, stages, total_stats: total }))
}

/// Deterministic restart scheme: `K` rescaled stages over `X`, exact gradients.
pub fn restart_deterministic<T: Scalar>(
    p: &SaddleProblem<T>,
    x1: &[T],
    u: T,
    epsilon: T,
    instance: Option<&dyn ClosedFormInstance<T>>,
) -> Result<(Vec<T>, Vec<T>, StageRecords<T>)> {
    let mut o = OracleHandle::new(p, NoiseModel::deterministic())?;
    let cfg = RestartConfig { u, epsilon, nu: None };
    run_restart(p, &mut o, x1, &cfg, instance, false)
}

/// Stochastic restart scheme: stage `k` runs on `X ∩ B(x_k, R_k/2)` with `ς = ν/(6K)`.
/// Needs the Euclidean primal DGF.
pub fn restart_stochastic<T: Scalar>(
    p: &SaddleProblem<T>,
    o: &mut OracleHandle<T>,
    x0: &[T],
    u: T,
    epsilon: T,
    nu: T,
    instance: Option<&dyn ClosedFormInstance<T>>,
) -> Result<(Vec<T>, Vec<T>, StageRecords<T>)> {
    if !p.geom_x.is_euclidean() {
        return Err(unsupported("the stochastic restart scheme needs the Euclidean primal DGF"));
    }
    let cfg = RestartConfig { u, epsilon, nu: Some(nu) };
    run_restart(p, o, x0, &cfg, instance, true)
}
