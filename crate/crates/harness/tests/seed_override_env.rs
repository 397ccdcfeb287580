// Own test binary: this is the only test that touches the environment.
use saddlekit_harness::ExperimentConfig;

#[test]
fn load_applies_environment_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "seeds = [1]\n[instance]\nname = \"matching-pennies\"\n[algorithm]\nkind = \"spdhg\"\nhorizon = 10\n").unwrap();
    std::env::remove_var("SADDLEKIT_SEED_OVERRIDE");
    assert_eq!(ExperimentConfig::load(&path).unwrap().seeds, vec![1]);
    std::env::set_var("SADDLEKIT_SEED_OVERRIDE", "4,5");
    assert_eq!(ExperimentConfig::load(&path).unwrap().seeds, vec![4, 5]);
    // parse never looks at the environment
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(ExperimentConfig::parse(&text).unwrap().seeds, vec![1]);
    std::env::remove_var("SADDLEKIT_SEED_OVERRIDE");
}
