//! Performance metrics computed from a trace.

use crate::error::{Error, Result};
use crate::trace::{SimTrace, Verdict};

pub const DEFAULT_SETTLE_THRESHOLD: f64 = 0.1;

/// Fraction of the run, measured from the end, used for the steady-state RMS.
pub const STEADY_STATE_FRACTION: f64 = 0.25;

#[derive(Debug, Clone, PartialEq)]
pub struct VesselMetrics {
    /// First time after which `|e|` stays below the threshold until the end;
    /// always `None` for a diverged run.
    pub settle_time: Option<f64>,
    pub steady_rms_error: f64,
    pub peak_error: f64,
    pub final_error: f64,
    /// Sum over recorded rows of `|tau(k+1) - tau(k)|_1`.
    pub control_variation: f64,
    pub max_activity: f64,
    pub final_obs_error: f64,
    pub final_param_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub verdict: Verdict,
    pub settle_threshold: f64,
    pub vessels: Vec<VesselMetrics>,
}

impl Metrics {
    pub fn max_final_error(&self) -> f64 {
        self.vessels.iter().map(|v| v.final_error).fold(0.0, f64::max)
    }

    pub fn total_control_variation(&self) -> f64 {
        self.vessels.iter().map(|v| v.control_variation).sum()
    }

    pub fn max_activity(&self) -> f64 {
        self.vessels.iter().map(|v| v.max_activity).fold(0.0, f64::max)
    }

    /// Slowest vessel; `None` if any vessel never settles.
    pub fn fleet_settle_time(&self) -> Option<f64> {
        self.vessels
            .iter()
            .map(|v| v.settle_time)
            .try_fold(0.0, |acc: f64, s| s.map(|s| acc.max(s)))
    }

    /// Fixed-width text table, one line per vessel.
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "verdict: {}\n{:>6} {:>10} {:>12} {:>12} {:>12} {:>14} {:>10} {:>12} {:>12}\n",
            self.verdict, "vessel", "settle[s]", "rms_e(tail)", "peak_e", "final_e", "TV(tau)", "max|act|", "obs_err", "param_err"
        );
        for (i, v) in self.vessels.iter().enumerate() {
            let settle = v.settle_time.map_or("never".to_string(), |s| format!("{s:.3}"));
            out.push_str(&format!(
                "{:>6} {:>10} {:>12.4e} {:>12.4e} {:>12.4e} {:>14.4e} {:>10.4} {:>12.4e} {:>12.4e}\n",
                i + 1,
                settle,
                v.steady_rms_error,
                v.peak_error,
                v.final_error,
                v.control_variation,
                v.max_activity,
                v.final_obs_error,
                v.final_param_error
            ));
        }
        out
    }
}

pub fn compute_metrics(trace: &SimTrace, settle_threshold: f64) -> Result<Metrics> {
    let last = trace.rows.last().ok_or(Error::EmptyTrace)?;
    let t0 = trace.rows[0].t;
    let tail_start = last.t - STEADY_STATE_FRACTION * (last.t - t0);

    let vessels = (0..trace.n_vessels())
        .map(|i| {
            let errs: Vec<(f64, f64)> = trace.rows.iter().map(|r| (r.t, r.vessels[i].e.norm())).collect();

            let settle_time = match errs.iter().rposition(|(_, e)| !(*e < settle_threshold)) {
                _ if trace.verdict() == Verdict::Diverged => None,
                None => Some(errs[0].0),
                Some(k) if k + 1 < errs.len() => Some(errs[k + 1].0),
                Some(_) => None,
            };

            let tail: Vec<f64> = errs.iter().filter(|(t, _)| *t >= tail_start).map(|(_, e)| e * e).collect();
            let steady_rms_error = (tail.iter().sum::<f64>() / tail.len() as f64).sqrt();

            let control_variation = trace
                .rows
                .windows(2)
                .map(|w| (w[1].vessels[i].tau - w[0].vessels[i].tau).abs().sum())
                .sum();

            let max_activity = trace
                .rows
                .iter()
                .map(|r| r.vessels[i].activity.amax())
                .fold(0.0, f64::max);

            let fin = &last.vessels[i];
            VesselMetrics {
                settle_time,
                steady_rms_error,
                peak_error: errs.iter().map(|(_, e)| *e).fold(0.0, f64::max),
                final_error: fin.e.norm(),
                control_variation,
                max_activity,
                final_obs_error: fin.obs_err,
                final_param_error: fin.param_err,
            }
        })
        .collect();

    Ok(Metrics {
        verdict: trace.verdict(),
        settle_threshold,
        vessels,
    })
}
