//! Runs one built-in scenario and prints its metrics table.
//!
//! `cargo run --release --example run_scenario -- scenario2-lsmc`

use auv_formation::metrics::{compute_metrics, DEFAULT_SETTLE_THRESHOLD};
use auv_formation::scenario::{builtin_scenario, builtin_scenarios};
use auv_formation::sim::run_scenario;

fn main() -> auv_formation::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "scenario1-blc".into());
    let Some(cfg) = builtin_scenario(&name) else {
        eprintln!("unknown scenario {name}; choose one of:");
        for c in builtin_scenarios() {
            eprintln!("  {}", c.name);
        }
        std::process::exit(1);
    };

    let trace = run_scenario(&cfg)?;
    let metrics = compute_metrics(&trace, DEFAULT_SETTLE_THRESHOLD)?;
    println!("{} ({} rows, up to {} RK4 substeps per step)", cfg.name, trace.rows.len(), trace.meta.max_substeps);
    print!("{}", metrics.to_table());

    let last = trace.final_row().expect("at least the initial row");
    for (i, v) in last.vessels.iter().enumerate() {
        println!("vessel {} final position {:.3?}", i + 1, &v.eta.as_slice()[..3]);
    }
    Ok(())
}
