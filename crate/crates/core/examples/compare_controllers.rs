//! Runs the disturbed scenario under all three laws and compares tracking
//! error with control effort.
//!
//! Total variation is a per-step quantity, so the runs record every step.

use auv_formation::control::ControlLaw;
use auv_formation::metrics::{compute_metrics, DEFAULT_SETTLE_THRESHOLD};
use auv_formation::scenario::builtin_scenario;
use auv_formation::sim::run_scenario;

fn main() -> auv_formation::Result<()> {
    println!("{:<6} {:>10} {:>12} {:>12} {:>14}", "law", "verdict", "settle (s)", "rms e", "TV(tau)");
    for law in [ControlLaw::Blc, ControlLaw::Lc, ControlLaw::Lsmc] {
        let mut cfg = builtin_scenario("scenario2")
            .expect("built-in")
            .with_controller(law);
        cfg.record_every = 1;
        let m = compute_metrics(&run_scenario(&cfg)?, DEFAULT_SETTLE_THRESHOLD)?;
        let rms = m.vessels.iter().map(|v| v.steady_rms_error).fold(0.0, f64::max);
        let settle = m.fleet_settle_time().map_or("-".into(), |t| format!("{t:.2}"));
        println!(
            "{:<6} {:>10} {:>12} {:>12.3e} {:>14.4e}",
            law.name(),
            m.verdict.to_string(),
            settle,
            rms,
            m.total_control_variation()
        );
    }
    Ok(())
}
