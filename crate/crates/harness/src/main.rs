use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use saddlekit::solvers::verify_schedule;
use saddlekit_harness::acceptance;
use saddlekit_harness::config::AlgorithmKind;
use saddlekit_harness::experiment::plain_schedule;
use saddlekit_harness::{fit_rate, run_experiment, ExperimentConfig, ExperimentOutcome, HarnessError, Result, RunRecord};

const EXIT_ACCEPTANCE: u8 = 3;

#[derive(Parser)]
#[command(name = "saddlekit", version, about = "Stochastic saddle-point solvers and their experiment harness")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Single spdhg or spdhg-rescaled run per seed.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// print every checkpoint of every seed
        #[arg(long)]
        table: bool,
    },
    /// Deterministic or stochastic restart scheme.
    Restart {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        table: bool,
    },
    /// Seed grid and, for restarts, an ε grid.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// seeds as `a..b` or a comma list; replaces the config's seeds
        #[arg(long)]
        seeds: Option<String>,
        /// comma list of ε values, one sub-experiment each
        #[arg(long, value_delimiter = ',')]
        epsilons: Vec<f64>,
    },
    /// Schedule-condition and geometry suites, plus the schedule of a config.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        /// horizon for the config's schedule check
        #[arg(long, default_value_t = 100_000)]
        up_to: usize,
    },
    /// Log-log rate fit of the gap trace in a record file.
    Fit {
        #[arg(long)]
        record: PathBuf,
        #[arg(long)]
        t_min: Option<f64>,
        #[arg(long)]
        t_max: Option<f64>,
    },
    /// Full acceptance suite, or the listed criteria.
    Repro { ids: Vec<u8> },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Solve { config, table } => solve(&config, table, false),
        Cmd::Restart { config, table } => solve(&config, table, true),
        Cmd::Sweep { config, seeds, epsilons } => sweep(&config, seeds.as_deref(), &epsilons),
        Cmd::Verify { config, up_to } => verify(config.as_deref(), up_to),
        Cmd::Fit { record, t_min, t_max } => fit(&record, t_min, t_max),
        Cmd::Repro { ids } => repro(&ids),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn solve(path: &Path, table: bool, restart: bool) -> Result<ExitCode> {
    let cfg = ExperimentConfig::load(path)?;
    if cfg.algorithm.kind.is_restart() != restart {
        let (cmd, other) = if restart { ("restart", "solve") } else { ("solve", "restart") };
        return Err(HarnessError::Config(format!("algorithm.kind = {:?} belongs to `{other}`, not `{cmd}`", cfg.algorithm.kind)));
    }
    let out = run_experiment(&cfg)?;
    report(&out, table);
    Ok(ExitCode::SUCCESS)
}

fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let bad = || HarnessError::Config(format!("--seeds: expected `a..b` or a comma list, got {s:?}"));
    if let Some((a, b)) = s.split_once("..") {
        let (a, b): (u64, u64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        if a >= b {
            return Err(bad());
        }
        return Ok((a..b).collect());
    }
    s.split(',').map(|v| v.trim().parse().map_err(|_| bad())).collect()
}

fn sweep(path: &Path, seeds: Option<&str>, epsilons: &[f64]) -> Result<ExitCode> {
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(s) = seeds {
        cfg.seeds = parse_seeds(s)?;
    }
    if epsilons.is_empty() {
        cfg.validate()?;
        report(&run_experiment(&cfg)?, false);
        return Ok(ExitCode::SUCCESS);
    }
    if !cfg.algorithm.kind.is_restart() {
        return Err(HarnessError::Config("--epsilons needs a restart algorithm".into()));
    }
    // validate the whole grid before running any of it
    let grid = epsilons
        .iter()
        .map(|&eps| {
            let mut c = cfg.clone();
            c.algorithm.epsilon = Some(eps);
            c.output.path = cfg.output.path.as_ref().map(|p| p.join(format!("eps-{eps:e}")));
            c.validate().map(|_| c)
        })
        .collect::<Result<Vec<_>>>()?;
    for c in &grid {
        println!("ε = {:e}", c.algorithm.epsilon.unwrap_or(f64::NAN));
        report(&run_experiment(c)?, false);
    }
    Ok(ExitCode::SUCCESS)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.3e}"))
}

fn report(out: &ExperimentOutcome, table: bool) {
    println!("{:>8} {:>11} {:>11} {:>7} {:>10} {:>10} {:>9}", "seed", "gap", "target", "ok", "iters", "calls", "ms");
    for r in &out.records {
        let s = &r.summary;
        let ok = s.success.map_or("-", |b| if b { "yes" } else { "no" });
        println!(
            "{:>8} {:>11} {:>11} {:>7} {:>10} {:>10} {:>9.0}",
            r.header.seed,
            fmt_opt(s.final_gap),
            fmt_opt(s.target),
            ok,
            s.iterations,
            s.calls.total(),
            s.wall_ms
        );
        if table {
            print_checkpoints(r);
        }
    }
    let sm = &out.summary;
    println!("success: {}/{} judged runs ({})", sm.successes, sm.judged, sm.success_fraction.map_or_else(|| "-".into(), |f| format!("{f:.3}")));
}

fn print_checkpoints(r: &RunRecord) {
    for st in &r.stages {
        println!("    stage {:>3}  R = {:.3e}  T = {:>8}  gap = {}  target = {:.3e}", st.k, st.radius, st.horizon, fmt_opt(st.gap), st.target);
    }
    for c in &r.checkpoints {
        println!("    t = {:>9}  gap = {}  bound = {}", c.t, fmt_opt(c.gap), fmt_opt(c.bound));
    }
}

fn verify(config: Option<&Path>, up_to: usize) -> Result<ExitCode> {
    let mut ok = true;
    for id in [2, 3] {
        let o = acceptance::run_criterion(id);
        ok &= o.passed;
        println!("{o}");
    }
    if let Some(path) = config {
        let cfg = ExperimentConfig::load(path)?;
        if cfg.algorithm.kind == AlgorithmKind::Spdhg {
            let inst = cfg.instance.build()?;
            let sched = plain_schedule(&cfg, &inst)?;
            let rep = verify_schedule(&sched, &inst.closed_form().problem().constants, up_to);
            match rep.first_violation() {
                None => println!("[PASS] config schedule: conditions hold up to t = {up_to}"),
                Some(v) => {
                    ok = false;
                    println!("[FAIL] config schedule: {:?} at t = {} ({:.3e} > {:.3e}), {} violations", v.condition, v.t, v.lhs, v.rhs, rep.violation_count);
                }
            }
        } else {
            println!("config is valid; schedule check applies to spdhg only");
        }
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(EXIT_ACCEPTANCE) })
}

fn fit(path: &Path, t_min: Option<f64>, t_max: Option<f64>) -> Result<ExitCode> {
    let rec = RunRecord::read(path)?;
    let series: Vec<(f64, f64)> = rec
        .gap_series()
        .into_iter()
        .filter(|&(t, _)| t_min.is_none_or(|m| t >= m) && t_max.is_none_or(|m| t <= m))
        .collect();
    let f = fit_rate(&series)?;
    println!("slope {:.4}  intercept {:.4}  r2 {:.4}  ({} points)", f.slope, f.intercept, f.r2, series.len());
    Ok(ExitCode::SUCCESS)
}

fn repro(ids: &[u8]) -> Result<ExitCode> {
    let ids: Vec<u8> = if ids.is_empty() { (1..=10).collect() } else { ids.to_vec() };
    if let Some(bad) = ids.iter().find(|i| !(1..=10).contains(*i)) {
        return Err(HarnessError::Config(format!("criterion ids run from 1 to 10, got {bad}")));
    }
    let mut ok = true;
    for id in ids {
        let o = acceptance::run_criterion(id);
        ok &= o.passed;
        println!("{o}");
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(EXIT_ACCEPTANCE) })
}
