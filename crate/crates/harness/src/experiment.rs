//! Running a config: one solver run per seed, records on disk, aggregate summary.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use saddlekit::linalg;
use saddlekit::oracles::OracleHandle;
use saddlekit::problems::ClosedFormInstance;
use saddlekit::solvers::*;

use crate::config::{AlgorithmKind, ExperimentConfig, Instance, NoiseKindSpec};
use crate::error::{HarnessError, Result};
use crate::record::{CallCounts, CheckpointRow, ExperimentSummary, Header, RunRecord, StageRow, Summary};

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    /// one per seed, in config order
    pub records: Vec<RunRecord>,
    pub summary: ExperimentSummary,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

pub fn record_path(dir: &Path, seed: u64) -> PathBuf {
    dir.join(format!("seed-{seed}.jsonl"))
}

pub fn csv_path(dir: &Path, seed: u64) -> PathBuf {
    dir.join(format!("seed-{seed}.csv"))
}

pub fn summary_path(dir: &Path) -> PathBuf {
    dir.join("summary.json")
}

/// Runs every seed of `cfg` (in parallel) and writes the records when
/// `output.path` is set.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    let inst = cfg.instance.build()?;
    let records = cfg.seeds.par_iter().map(|&seed| run_seed(cfg, &inst, seed)).collect::<Result<Vec<_>>>()?;
    let summary = ExperimentSummary::from_records(&records);
    if let Some(dir) = &cfg.output.path {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        for r in &records {
            r.write(&record_path(dir, r.header.seed))?;
            r.write_csv(&csv_path(dir, r.header.seed))?;
        }
        summary.write(&summary_path(dir))?;
    }
    Ok(ExperimentOutcome { records, summary })
}

/// One seed; deterministic given `(cfg, seed)` apart from the wall-clock fields.
pub fn run_seed(cfg: &ExperimentConfig, inst: &Instance, seed: u64) -> Result<RunRecord> {
    let start = Instant::now();
    let header = Header { seed, config: cfg.clone() };
    let mut rec = match cfg.algorithm.kind {
        AlgorithmKind::Spdhg => run_plain(cfg, inst, seed, start)?,
        AlgorithmKind::SpdhgRescaled => run_rescaled(cfg, inst, seed, start)?,
        AlgorithmKind::RestartDet | AlgorithmKind::RestartStoc => run_restart(cfg, inst, seed)?,
    };
    rec.header = header;
    rec.summary.wall_ms = elapsed_ms(start);
    Ok(rec)
}

fn empty_record(cfg: &ExperimentConfig, seed: u64) -> RunRecord {
    RunRecord {
        header: Header { seed, config: cfg.clone() },
        checkpoints: Vec::new(),
        stages: Vec::new(),
        summary: Summary {
            final_gap: None,
            target: None,
            success: None,
            iterations: 0,
            iteration_bound: None,
            calls: CallCounts { f: 0, x_phi: 0, y_phi: 0 },
            wall_ms: 0.0,
        },
    }
}

fn verdict(gap: Option<f64>, target: Option<f64>) -> Option<bool> {
    match (gap, target) {
        (Some(g), Some(t)) => Some(g <= t),
        _ => None,
    }
}

/// Runs with wall-clock stamps at the checkpoints.
fn timed_run(
    start: Instant,
    checkpoints: &[usize],
    go: impl FnOnce(RunOptions<'_, f64>) -> saddlekit::Result<(Vec<f64>, Vec<f64>, saddlekit::RunRecord64)>,
    inst: &dyn ClosedFormInstance<f64>,
) -> Result<(saddlekit::RunRecord64, HashMap<usize, f64>)> {
    let mut stamps = HashMap::new();
    let wanted: std::collections::HashSet<usize> = checkpoints.iter().copied().collect();
    let mut obs = |st: &IterateState<f64>| {
        if wanted.contains(&st.t) {
            stamps.insert(st.t, elapsed_ms(start));
        }
    };
    let opts = RunOptions { checkpoints: checkpoints.to_vec(), instance: Some(inst), observer: Some(&mut obs), ..Default::default() };
    let (_, _, rec) = go(opts)?;
    Ok((rec, stamps))
}

fn rhos(cfg: &ExperimentConfig, inst: &Instance) -> (f64, f64) {
    let p = inst.closed_form().problem();
    let (drho, drho_p) = default_rhos(p.geom_x.bregman_diameter, p.geom_y.bregman_diameter);
    (cfg.schedule.rho.unwrap_or(drho), cfg.schedule.rho_prime.unwrap_or(drho_p))
}

/// The step-size schedule a plain `spdhg` run of `cfg` uses (noise levels of seed 0).
pub fn plain_schedule(cfg: &ExperimentConfig, inst: &Instance) -> Result<ScheduleParams<f64>> {
    let p = inst.closed_form().problem();
    let (rho, rho_p) = rhos(cfg, inst);
    Ok(ScheduleParams::convex_default(&p.constants, &cfg.noise.model(0).levels(), rho, rho_p)?)
}

fn run_plain(cfg: &ExperimentConfig, inst: &Instance, seed: u64, start: Instant) -> Result<RunRecord> {
    let cf = inst.closed_form();
    let p = cf.problem();
    let model = cfg.noise.model(seed);
    let levels = model.levels();
    let (ox, oy) = (p.geom_x.bregman_diameter, p.geom_y.bregman_diameter);
    let (rho, rho_p) = rhos(cfg, inst);
    let sched = ScheduleParams::convex_default(&p.constants, &levels, rho, rho_p)?;
    let horizon = cfg.algorithm.horizon.expect("validated");
    let cps = cfg.output.stride.checkpoints(horizon);
    let mut o = OracleHandle::new(p, model)?;
    let (run, stamps) = timed_run(start, &cps, |opts| run_spdhg(p, &mut o, &sched, horizon, opts), cf)?;
    let bound = |t: usize| -> Result<Option<f64>> { Ok(finite(bound_expectation(&p.constants, &levels, ox, oy, rho, rho_p, t)?.value)) };
    let mut rec = empty_record(cfg, seed);
    for c in &run.checkpoints {
        rec.checkpoints.push(CheckpointRow { t: c.t, gap: c.gap, bound: bound(c.t)?, calls: c.calls.into(), wall_ms: stamps.get(&c.t).copied().unwrap_or(0.0) });
    }
    let target = bound(horizon)?;
    rec.summary.final_gap = run.final_gap;
    rec.summary.target = target;
    rec.summary.success = verdict(run.final_gap, target);
    rec.summary.iterations = horizon;
    rec.summary.calls = run.stats.into();
    Ok(rec)
}

fn run_rescaled(cfg: &ExperimentConfig, inst: &Instance, seed: u64, start: Instant) -> Result<RunRecord> {
    let cf = inst.closed_form();
    let p = cf.problem();
    let model = cfg.noise.model(seed);
    let levels = model.levels();
    let (x0, _) = p.start_point();
    let r = match cfg.algorithm.radius {
        Some(r) => r,
        None => {
            let (xs, _) = cf.saddle_point().expect("validated");
            let d = 2.0 * linalg::dist2(&x0, &xs);
            if d > 0.0 {
                d
            } else {
                p.diameters.d_x
            }
        }
    };
    let om_p = p.geom_x.normalized_diameter()?;
    let om_y = p.geom_y.bregman_diameter;
    let c = &p.constants;
    let noisy = cfg.noise.kind != NoiseKindSpec::Deterministic;
    let vs = cfg.algorithm.nu.unwrap_or(0.1);
    let horizon = match cfg.algorithm.horizon {
        Some(t) => t,
        None if noisy => horizon_rescaled_stoc(c, &levels, om_p, om_y, r, vs)?,
        None => horizon_rescaled_det(c, om_p, om_y, r)?,
    };
    let sched = if noisy {
        ScheduleParams::rescaled_stoc(c, &levels, om_p, om_y, r, vs, horizon)?
    } else {
        ScheduleParams::rescaled_det(c, om_p, om_y, r, horizon)?
    };
    let cps = cfg.output.stride.checkpoints(horizon);
    let mut o = OracleHandle::new(p, model)?;
    let x_set = p.geom_x.feasible_set.clone();
    let (run, stamps) = timed_run(start, &cps, |opts| run_spdhg_rescaled(p, &mut o, &x0, r, x_set, horizon, &sched, opts), cf)?;
    let mut final_bound = bound_rescaled_det(c, om_p, om_y, r, horizon)?.value;
    if noisy {
        final_bound += bound_rescaled_var(&levels, om_p, om_y, r, vs, horizon)?.value;
    }
    let final_bound = finite(final_bound);
    let mut rec = empty_record(cfg, seed);
    for cp in &run.checkpoints {
        // the rescaled bound holds at the horizon the steps were tuned for
        let bound = if cp.t == horizon { final_bound } else { None };
        rec.checkpoints.push(CheckpointRow { t: cp.t, gap: cp.gap, bound, calls: cp.calls.into(), wall_ms: stamps.get(&cp.t).copied().unwrap_or(0.0) });
    }
    rec.summary.final_gap = run.final_gap;
    rec.summary.target = final_bound;
    rec.summary.success = verdict(run.final_gap, final_bound);
    rec.summary.iterations = horizon;
    rec.summary.calls = run.stats.into();
    Ok(rec)
}

fn run_restart(cfg: &ExperimentConfig, inst: &Instance, seed: u64) -> Result<RunRecord> {
    let cf = inst.closed_form();
    let p = cf.problem();
    let a = &cfg.algorithm;
    let u = a.u.unwrap_or(p.diameters.d_x);
    let eps = a.epsilon.expect("validated");
    let (x0, _) = p.start_point();
    let om_p = p.geom_x.normalized_diameter()?;
    let om_y = p.geom_y.bregman_diameter;
    let (xo, yo, st, bound) = if a.kind == AlgorithmKind::RestartDet {
        let (xo, yo, st) = restart_deterministic(p, &x0, u, eps, Some(cf))?;
        (xo, yo, st, complexity_det(&p.constants, om_p, om_y, u, eps)?)
    } else {
        let model = cfg.noise.model(seed);
        let nu = a.nu.expect("validated");
        let mut o = OracleHandle::new(p, model)?;
        let (xo, yo, st) = restart_stochastic(p, &mut o, &x0, u, eps, nu, Some(cf))?;
        (xo, yo, st, complexity_stoc(&p.constants, &model.levels(), om_p, om_y, u, eps, nu)?)
    };
    let gap = cf.duality_gap(&xo, &yo)?;
    let mut rec = empty_record(cfg, seed);
    let mu = p.constants.mu;
    for s in &st.stages {
        rec.stages.push(StageRow { k: s.k, radius: s.radius, horizon: s.horizon, gap: s.gap, target: mu * s.radius * s.radius / 16.0, calls: s.calls.into() });
    }
    rec.summary.final_gap = Some(gap);
    rec.summary.target = Some(eps);
    rec.summary.success = Some(gap <= eps);
    rec.summary.iterations = st.total_iterations();
    rec.summary.iteration_bound = finite(bound);
    rec.summary.calls = st.total_stats.into();
    Ok(rec)
}
