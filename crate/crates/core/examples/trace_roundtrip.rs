//! Writes a trace to CSV plus its TOML sidecar, reads it back and
//! recomputes the metrics from disk.

use auv_formation::metrics::compute_metrics;
use auv_formation::scenario::builtin_scenario;
use auv_formation::sim::run_scenario;
use auv_formation::trace::{read_trace, sidecar_path, write_trace};

fn main() -> auv_formation::Result<()> {
    let mut cfg = builtin_scenario("scenario3-blc").expect("built-in");
    cfg.horizon = 2.0;
    let trace = run_scenario(&cfg)?;

    let dir = std::env::temp_dir().join("auv-formation-example");
    std::fs::create_dir_all(&dir).map_err(|source| auv_formation::Error::Io { path: dir.clone(), source })?;
    let csv = dir.join(format!("{}.csv", cfg.name));
    write_trace(&trace, &csv)?;
    println!("wrote {} and {}", csv.display(), sidecar_path(&csv).display());

    let back = read_trace(&csv)?;
    println!("rows {} -> {}, identical: {}", trace.rows.len(), back.rows.len(), back == trace);
    print!("{}", compute_metrics(&back, 0.5)?.to_table());
    Ok(())
}
