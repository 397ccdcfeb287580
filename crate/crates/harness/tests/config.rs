use saddlekit_harness::config::{AlgorithmKind, InstanceSpec, NoiseKindSpec, Stride};
use saddlekit_harness::{ExperimentConfig, HarnessError};

const PENNIES: &str = r#"
seeds = [1, 2, 3]

[instance]
name = "matching-pennies"

[algorithm]
kind = "spdhg"
horizon = 500

[output]
stride = 50
"#;

fn config_err(text: &str) -> String {
    match ExperimentConfig::parse(text) {
        Err(e @ HarnessError::Config(_)) => {
            assert_eq!(e.exit_code(), 2);
            e.to_string()
        }
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn parses_minimal_config() {
    let cfg = ExperimentConfig::parse(PENNIES).unwrap();
    assert_eq!(cfg.seeds, vec![1, 2, 3]);
    assert_eq!(cfg.algorithm.kind, AlgorithmKind::Spdhg);
    assert_eq!(cfg.algorithm.horizon, Some(500));
    assert_eq!(cfg.noise.kind, NoiseKindSpec::Deterministic);
    assert_eq!(cfg.output.stride, Stride::Every(50));
    assert!(matches!(cfg.instance, InstanceSpec::MatchingPennies { .. }));
}

#[test]
fn defaults() {
    let cfg = ExperimentConfig::parse("[instance]\nname = \"matching-pennies\"\n[algorithm]\nkind = \"spdhg\"\nhorizon = 100\n").unwrap();
    assert_eq!(cfg.seeds, vec![0]);
    assert_eq!(cfg.output.stride, Stride::default());
    assert_eq!(cfg.output.path, None);
}

#[test]
fn toml_round_trip() {
    let cfg = ExperimentConfig::parse(PENNIES).unwrap();
    assert_eq!(ExperimentConfig::parse(&cfg.to_toml()).unwrap(), cfg);
}

#[test]
fn quadratic_alias() {
    let a = ExperimentConfig::parse("[instance]\nname = \"quadratic\"\nseed = 4\n[algorithm]\nkind = \"restart-det\"\nepsilon = 0.01\n").unwrap();
    let b = ExperimentConfig::parse("[instance]\nname = \"quadratic-saddle\"\nseed = 4\n[algorithm]\nkind = \"restart-det\"\nepsilon = 0.01\n").unwrap();
    assert_eq!(a, b);
}

#[test]
fn stride_checkpoints() {
    assert_eq!(Stride::Every(4).checkpoints(10), vec![4, 8, 10]);
    assert_eq!(Stride::Every(5).checkpoints(10), vec![5, 10]);
    let g = Stride::default().checkpoints(20);
    assert_eq!(&g[..5], &[3, 4, 6, 8, 11]);
    assert_eq!(*g.last().unwrap(), 20);
}

#[test]
fn rejects_unknown_keys() {
    config_err(&PENNIES.replace("horizon = 500", "horizon = 500\nhorizn = 3"));
    config_err(&PENNIES.replace("matching-pennies", "rock-paper-scissors"));
}

#[test]
fn rejects_bad_values() {
    config_err(&PENNIES.replace("seeds = [1, 2, 3]", "seeds = []"));
    config_err(&PENNIES.replace("horizon = 500", "horizon = 2"));
    config_err(&PENNIES.replace("horizon = 500", ""));
    config_err(&PENNIES.replace("stride = 50", "stride = 0"));
    config_err(&PENNIES.replace("stride = 50", "stride = \"linear\""));
    config_err(&format!("{PENNIES}\n[schedule]\nrho = -1.0\n"));
    config_err(&format!("{PENNIES}\n[noise]\nkind = \"sub-gaussian\"\nsigma_x_f = -0.1\n"));
}

#[test]
fn rejects_solver_rejections_at_parse_time() {
    // stochastic restart needs the Euclidean primal geometry
    let msg = config_err(
        "[instance]\nname = \"matching-pennies\"\ngeometry = \"entropic\"\n[algorithm]\nkind = \"restart-stoc\"\nepsilon = 0.01\nnu = 0.1\n",
    );
    assert!(msg.contains("Euclidean") || msg.contains("μ"), "{msg}");
    // restarts need strong convexity
    config_err("[instance]\nname = \"matching-pennies\"\n[algorithm]\nkind = \"restart-det\"\nepsilon = 0.01\n");
    // ε above μU²/4
    config_err("[instance]\nname = \"quadratic-saddle\"\n[algorithm]\nkind = \"restart-det\"\nepsilon = 1e9\n");
    // missing ε
    config_err("[instance]\nname = \"quadratic-saddle\"\n[algorithm]\nkind = \"restart-det\"\n");
    // U below the diameter
    config_err("[instance]\nname = \"quadratic-saddle\"\n[algorithm]\nkind = \"restart-det\"\nepsilon = 0.01\nu = 1e-3\n");
    // noisy restart-stoc without ν
    config_err("[instance]\nname = \"quadratic-saddle\"\n[algorithm]\nkind = \"restart-stoc\"\nepsilon = 0.01\n");
    // ν outside (0, 1]
    config_err("[instance]\nname = \"quadratic-saddle\"\n[algorithm]\nkind = \"restart-stoc\"\nepsilon = 0.01\nnu = 1.5\n");
}

#[test]
fn seed_override_list() {
    let mut cfg = ExperimentConfig::parse(PENNIES).unwrap();
    cfg.apply_seed_override("7, 8,9").unwrap();
    assert_eq!(cfg.seeds, vec![7, 8, 9]);
    assert!(matches!(cfg.apply_seed_override("7,x"), Err(HarnessError::Config(_))));
}
