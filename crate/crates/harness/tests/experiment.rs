use saddlekit::solvers::{bound_expectation, default_rhos};
use saddlekit::oracles::NoiseModel;
use saddlekit_harness::experiment::{csv_path, record_path, summary_path};
use saddlekit_harness::{run_experiment, ExperimentConfig, ExperimentSummary, RunRecord};

fn cfg(text: &str) -> ExperimentConfig {
    ExperimentConfig::parse(text).unwrap()
}

#[test]
fn pennies_exact_gap_below_expectation_bound() {
    let c = cfg("[instance]\nname = \"matching-pennies\"\n[algorithm]\nkind = \"spdhg\"\nhorizon = 1000\n");
    let out = run_experiment(&c).unwrap();
    let r = &out.records[0];
    let p = c.instance.build().unwrap().closed_form().problem().clone();
    let (ox, oy) = (p.geom_x.bregman_diameter, p.geom_y.bregman_diameter);
    let (rho, rho_p) = default_rhos(ox, oy);
    let levels = NoiseModel::<f64>::deterministic().levels();
    let b = bound_expectation(&p.constants, &levels, ox, oy, rho, rho_p, 1000).unwrap().value;
    assert_eq!(r.summary.target, Some(b));
    let gap = r.summary.final_gap.unwrap();
    assert!(gap <= b, "gap {gap} > B_E {b}");
    assert_eq!(r.summary.success, Some(true));
    assert_eq!(r.checkpoints.last().unwrap().t, 1000);
    // three calls per step after the first
    assert_eq!(r.summary.calls.total(), 3 * 999 + 1);
}

#[test]
fn random_game_gap_below_bound_at_every_checkpoint() {
    let c = cfg("[instance]\nname = \"matrix-game\"\nrows = 6\ncols = 5\nseed = 11\n[algorithm]\nkind = \"spdhg\"\nhorizon = 2000\n");
    let r = &run_experiment(&c).unwrap().records[0];
    assert!(r.checkpoints.iter().any(|c| c.gap.unwrap() > 0.0));
    for row in &r.checkpoints {
        assert!(row.gap.unwrap() <= row.bound.unwrap(), "t = {}", row.t);
    }
    assert!(r.checkpoints.windows(2).all(|w| w[0].t < w[1].t));
}

#[test]
fn restart_det_halves_squared_radius() {
    let c = cfg("[instance]\nname = \"quadratic-saddle\"\nseed = 500\n[algorithm]\nkind = \"restart-det\"\nepsilon = 1e-3\n");
    let r = &run_experiment(&c).unwrap().records[0];
    assert!(r.stages.len() >= 2);
    for w in r.stages.windows(2) {
        let ratio = w[1].radius.powi(2) / w[0].radius.powi(2);
        assert!((ratio - 0.5).abs() <= 1e-12, "R² ratio {ratio}");
        assert_eq!(w[1].k, w[0].k + 1);
    }
    let gap = r.summary.final_gap.unwrap();
    assert!(gap <= 1e-3, "gap {gap}");
    assert_eq!(r.summary.success, Some(true));
    assert_eq!(r.summary.iterations, r.stages.iter().map(|s| s.horizon).sum::<usize>());
    assert!(r.summary.iterations as f64 <= r.summary.iteration_bound.unwrap());
}

#[test]
fn same_seed_same_record() {
    let text = "seeds = [3, 3, 4]\n[instance]\nname = \"matrix-game\"\nrows = 4\ncols = 4\nseed = 2\n[algorithm]\nkind = \"spdhg\"\nhorizon = 400\n[noise]\nkind = \"sub-gaussian\"\nsigma_x_phi = 0.5\nsigma_y_phi = 0.5\n";
    let a = run_experiment(&cfg(text)).unwrap();
    let b = run_experiment(&cfg(text)).unwrap();
    let body = |r: &RunRecord| r.without_timing().to_jsonl();
    assert_eq!(body(&a.records[0]), body(&b.records[0]));
    assert_eq!(body(&a.records[0]), body(&a.records[1]));
    assert_ne!(body(&a.records[0]), body(&a.records[2]));
}

#[test]
fn files_on_disk_and_summary_matches_manual_count() {
    let dir = tempfile::tempdir().unwrap();
    // noisy runs against B_E: some seeds may land above the expectation bound
    let text = format!(
        "seeds = [0, 1, 2, 3, 4, 5]\n[instance]\nname = \"matching-pennies\"\n[algorithm]\nkind = \"spdhg\"\nhorizon = 50\n[noise]\nkind = \"sub-gaussian\"\nsigma_x_phi = 3.0\nsigma_y_phi = 3.0\n[output]\npath = {:?}\n",
        dir.path().display().to_string()
    );
    let c = cfg(&text);
    let out = run_experiment(&c).unwrap();
    let mut successes = 0;
    let mut judged = 0;
    for &seed in &c.seeds {
        let rec = RunRecord::read(&record_path(dir.path(), seed)).unwrap();
        assert_eq!(rec.header.seed, seed);
        if let Some(ok) = rec.summary.success {
            judged += 1;
            successes += usize::from(ok);
        }
        let csv = std::fs::read_to_string(csv_path(dir.path(), seed)).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,gap,bound"));
        assert_eq!(lines.count(), rec.checkpoints.len());
    }
    let s = ExperimentSummary::read(&summary_path(dir.path())).unwrap();
    assert_eq!(s, out.summary);
    assert_eq!((s.successes, s.judged), (successes, judged));
    assert_eq!(s.success_fraction, Some(successes as f64 / judged as f64));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let text = format!(
        "[instance]\nname = \"matching-pennies\"\n[algorithm]\nkind = \"spdhg\"\nhorizon = 10\n[output]\npath = {:?}\n",
        blocker.join("sub").display().to_string()
    );
    let e = run_experiment(&cfg(&text)).unwrap_err();
    assert!(matches!(e, saddlekit_harness::HarnessError::Io { .. }), "{e}");
    assert_eq!(e.exit_code(), 1);
}
