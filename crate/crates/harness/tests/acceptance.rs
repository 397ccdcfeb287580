//! One `[PASS]`/`[FAIL]` line per acceptance criterion. Optional arguments
//! select criterion ids, e.g. `cargo test --test acceptance -- 3 7`.

use saddlekit_harness::acceptance::run_criterion;

fn main() {
    let ids: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).filter(|i| (1..=10).contains(i)).collect();
    let ids = if ids.is_empty() { (1..=10).collect() } else { ids };
    let mut failed = 0;
    for id in ids {
        let out = run_criterion(id);
        println!("{out}");
        if !out.passed {
            failed += 1;
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
