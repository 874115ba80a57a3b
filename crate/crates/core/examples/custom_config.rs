//! Builds a three-vessel triangle formation holding station, writes it as
//! TOML, parses it back and runs it.

use auv_formation::metrics::{compute_metrics, DEFAULT_SETTLE_THRESHOLD};
use auv_formation::scenario::{builtin_scenario, parse_config, FormationOffset};
use auv_formation::sim::{run_scenario, ReferenceTrajectory};

fn offset(from: usize, to: usize, dx: f64, dy: f64) -> [FormationOffset; 2] {
    [
        FormationOffset { from, to, offset: [dx, dy, 0.0, 0.0, 0.0, 0.0] },
        FormationOffset { from: to, to: from, offset: [-dx, -dy, 0.0, 0.0, 0.0, 0.0] },
    ]
}

fn main() -> auv_formation::Result<()> {
    // Start from a built-in for its gains and vessel model.
    let mut cfg = builtin_scenario("scenario1-lsmc").expect("built-in");
    cfg.name = "triangle-hold".into();
    cfg.horizon = 10.0;
    cfg.vessels.truncate(3);
    cfg.vessels[0].eta0 = [1.0, -1.0, 0.5, 0.0, 0.0, 0.3];
    cfg.vessels[1].eta0 = [-4.0, 2.0, 0.0, 0.1, 0.0, -0.2];
    cfg.vessels[2].eta0 = [3.0, 6.0, 1.0, 0.0, 0.1, 0.0];
    cfg.topology.edges = vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 0.5)];
    cfg.topology.reference_access = vec![1.0, 0.0, 0.0];
    cfg.formation = [offset(0, 1, 5.0, 0.0), offset(1, 2, -2.5, -4.0), offset(0, 2, 2.5, -4.0)].concat();
    cfg.reference = ReferenceTrajectory::stationary([0.0, 0.0, 5.0, 0.0, 0.0, 0.0]);

    let text = cfg.to_toml()?;
    println!("{} lines of TOML", text.lines().count());
    let parsed = parse_config(&text)?;
    assert_eq!(parsed, cfg);

    let trace = run_scenario(&parsed)?;
    print!("{}", compute_metrics(&trace, DEFAULT_SETTLE_THRESHOLD)?.to_table());
    for (i, v) in trace.final_row().unwrap().vessels.iter().enumerate() {
        println!("vessel {} at {:.3?}", i + 1, &v.eta.as_slice()[..3]);
    }
    Ok(())
}
