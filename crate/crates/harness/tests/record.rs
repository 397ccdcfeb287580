use saddlekit_harness::record::{CallCounts, CheckpointRow, Header, StageRow, Summary};
use saddlekit_harness::{run_experiment, ExperimentConfig, HarnessError, RunRecord};

fn sample() -> RunRecord {
    let config = ExperimentConfig::parse("[instance]\nname = \"quadratic-saddle\"\nseed = 9\n[algorithm]\nkind = \"restart-det\"\nepsilon = 0.01\n").unwrap();
    let calls = CallCounts { f: 4, x_phi: 4, y_phi: 5 };
    RunRecord {
        header: Header { seed: 17, config },
        checkpoints: vec![
            CheckpointRow { t: 3, gap: Some(0.1 + 0.2), bound: None, calls, wall_ms: 0.25 },
            CheckpointRow { t: 5, gap: None, bound: Some(1e-300), calls, wall_ms: 1.0 / 3.0 },
        ],
        stages: vec![StageRow { k: 1, radius: 2f64.sqrt(), horizon: 5, gap: Some(std::f64::consts::PI), target: 0.125, calls }],
        summary: Summary {
            final_gap: Some(1.0 / 7.0),
            target: Some(0.01),
            success: Some(false),
            iterations: 5,
            iteration_bound: Some(123.5),
            calls,
            wall_ms: 2.5,
        },
    }
}

#[test]
fn jsonl_round_trip_is_exact() {
    let r = sample();
    let text = r.to_jsonl();
    assert_eq!(text.lines().count(), 1 + 2 + 1 + 1);
    assert_eq!(RunRecord::from_jsonl(&text, "mem").unwrap(), r);
}

#[test]
fn file_round_trip_of_a_real_run() {
    let cfg = ExperimentConfig::parse("[instance]\nname = \"matrix-game\"\nrows = 3\ncols = 3\n[algorithm]\nkind = \"spdhg\"\nhorizon = 200\n").unwrap();
    let r = run_experiment(&cfg).unwrap().records.remove(0);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.jsonl");
    r.write(&path).unwrap();
    assert_eq!(RunRecord::read(&path).unwrap(), r);
}

#[test]
fn every_line_is_self_describing() {
    for line in sample().to_jsonl().lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v.get("type").and_then(|t| t.as_str()).is_some(), "{line}");
    }
}

#[test]
fn rejects_malformed_records() {
    let text = sample().to_jsonl();
    let lines: Vec<&str> = text.lines().collect();
    let parse = |ls: &[&str]| RunRecord::from_jsonl(&ls.join("\n"), "mem");
    // no summary
    assert!(matches!(parse(&lines[..lines.len() - 1]), Err(HarnessError::Parse { .. })));
    // no header
    assert!(matches!(parse(&lines[1..]), Err(HarnessError::Parse { .. })));
    // checkpoints out of order
    let swapped = [lines[0], lines[2], lines[1], lines[3], lines[4]];
    assert!(matches!(parse(&swapped), Err(HarnessError::Parse { .. })));
    // duplicate header
    let dup = [lines[0], lines[0], lines[1], lines[2], lines[3], lines[4]];
    assert!(matches!(parse(&dup), Err(HarnessError::Parse { .. })));
    assert!(matches!(parse(&["not json"]), Err(HarnessError::Parse { .. })));
}
