//! Drives the shunting neural state with a step and a fast square wave.
//!
//! The activity stays inside `[-d, b]` and passes a smoothed version of
//! its input, which is what the bio-inspired law feeds back instead of `z`.

use auv_formation::neuro::{shunting_equilibrium, shunting_rate, NeuroState, ShuntingParams};
use auv_formation::vessel::Vec6;

fn main() -> auv_formation::Result<()> {
    let p = ShuntingParams::new(10.0, 50.0, 50.0)?;
    let dt = 1e-4;
    let mut s = NeuroState::rest();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    println!("{:>6} {:>8} {:>10} {:>10} {:>10}", "t", "|z|", "min act.", "max act.", "equilib.");
    for k in 1..=20_000 {
        let t = k as f64 * dt;
        let z0 = if t < 0.5 { 5.0 } else if ((t * 40.0) as i64) % 2 == 0 { 200.0 } else { -200.0 };
        let z = Vec6::from_element(z0);
        // Explicit Euler is enough at this step; the rate is bounded by a + |z|.
        s.activity += dt * shunting_rate(&s, &z, &p);
        lo = lo.min(s.activity[0]);
        hi = hi.max(s.activity[0]);
        if k % 1000 == 0 {
            println!("{t:>6.2} {:>8.1} {lo:>10.4} {hi:>10.4} {:>10.4}", z0.abs(), shunting_equilibrium(&z, &p)[0]);
            (lo, hi) = (f64::INFINITY, f64::NEG_INFINITY);
        }
    }
    println!("within [-d, b]: {}", s.within_bounds(&p, 0.0));
    Ok(())
}
