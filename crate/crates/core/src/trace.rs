//! Simulation traces and their on-disk form.
//!
//! A trace is written as a CSV table plus a TOML sidecar next to it
//! (`run.csv` and `run.meta.toml`). The CSV columns are `t` followed, for
//! each vessel `i` in `1..=n`, by `eta_i_1..6`, `v_i_1..6`, `e_i_1..6`,
//! `z_i_1..6`, `theta_act_i_1..6`, `tau_i_1..6`, `obs_err_i`, `param_err_i`.
//! Values use 17 significant digits so they read back bit-exact.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::ScenarioConfig;
use crate::vessel::Vec6;

/// Columns per vessel: six 6-vectors and two scalars.
pub const COLUMNS_PER_VESSEL: usize = 6 * 6 + 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Completed,
    Diverged,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Completed => "completed",
            Verdict::Diverged => "diverged",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceMeta {
    pub verdict: Verdict,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diverged_at: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default)]
    pub warnings: Vec<String>,
    /// Control steps at which at least one estimated input gain was clamped.
    #[serde(default)]
    pub regularized_steps: usize,
    /// Largest number of RK4 substeps taken within one control period.
    #[serde(default)]
    pub max_substeps: usize,
    pub config: ScenarioConfig,
}

impl TraceMeta {
    pub fn new(config: ScenarioConfig) -> Self {
        Self {
            verdict: Verdict::Completed,
            seed: config.noise.seed,
            diverged_at: None,
            reason: None,
            warnings: Vec::new(),
            regularized_steps: 0,
            max_substeps: 0,
            config,
        }
    }

    pub(crate) fn mark_diverged(&mut self, t: f64, reason: String) {
        self.verdict = Verdict::Diverged;
        self.diverged_at = Some(t);
        self.reason = Some(reason);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VesselRecord {
    pub eta: Vec6,
    pub v: Vec6,
    /// Consensus formation error evaluated on the true states.
    pub e: Vec6,
    /// Auxiliary variable as seen by the controller.
    pub z: Vec6,
    /// Shunting activity (zero for the baseline laws).
    pub activity: Vec6,
    pub tau: Vec6,
    pub obs_err: f64,
    pub param_err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub vessels: Vec<VesselRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub meta: TraceMeta,
    pub rows: Vec<TraceRow>,
}

impl SimTrace {
    pub fn verdict(&self) -> Verdict {
        self.meta.verdict
    }

    pub fn n_vessels(&self) -> usize {
        self.rows.first().map_or(self.meta.config.vessels.len(), |r| r.vessels.len())
    }

    pub fn final_row(&self) -> Option<&TraceRow> {
        self.rows.last()
    }

    pub fn to_csv(&self) -> String {
        let n = self.n_vessels();
        let mut out = csv_header(n).join(",");
        out.push('\n');
        for row in &self.rows {
            write!(out, "{:.16e}", row.t).unwrap();
            for rec in &row.vessels {
                for block in [&rec.eta, &rec.v, &rec.e, &rec.z, &rec.activity, &rec.tau] {
                    for x in block.iter() {
                        write!(out, ",{x:.16e}").unwrap();
                    }
                }
                write!(out, ",{:.16e},{:.16e}", rec.obs_err, rec.param_err).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

pub fn csv_header(n_vessels: usize) -> Vec<String> {
    let mut cols = vec!["t".to_string()];
    for i in 1..=n_vessels {
        for block in ["eta", "v", "e", "z", "theta_act", "tau"] {
            cols.extend((1..=6).map(|k| format!("{block}_{i}_{k}")));
        }
        cols.push(format!("obs_err_{i}"));
        cols.push(format!("param_err_{i}"));
    }
    cols
}

/// Sidecar path for a trace CSV: `run.csv` -> `run.meta.toml`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta.toml")
}

/// Writes the CSV to `path` and the metadata sidecar next to it.
pub fn write_trace(trace: &SimTrace, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, trace.to_csv()).map_err(|e| Error::io(path, e))?;
    let meta = toml::to_string(&trace.meta).map_err(|e| Error::TraceFormat {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    let side = sidecar_path(path);
    fs::write(&side, meta).map_err(|e| Error::io(side, e))
}

pub fn parse_trace_csv(text: &str, path: &Path) -> Result<Vec<TraceRow>> {
    let bad = |reason: String| Error::TraceFormat {
        path: path.to_path_buf(),
        reason,
    };
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().ok_or_else(|| bad("missing header".into()))?.split(',').collect();
    if header.first() != Some(&"t") || !(header.len() - 1).is_multiple_of(COLUMNS_PER_VESSEL) {
        return Err(bad(format!("unexpected header with {} columns", header.len())));
    }
    let n = (header.len() - 1) / COLUMNS_PER_VESSEL;
    if header != csv_header(n) {
        return Err(bad("column names do not match the trace layout".into()));
    }

    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let values = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| bad(format!("line {}: {e}", lineno + 2)))?;
        if values.len() != header.len() {
            return Err(bad(format!(
                "line {}: {} values, expected {}",
                lineno + 2,
                values.len(),
                header.len()
            )));
        }
        let vessels = values[1..]
            .chunks(COLUMNS_PER_VESSEL)
            .map(|c| {
                let block = |k: usize| Vec6::from_column_slice(&c[6 * k..6 * k + 6]);
                VesselRecord {
                    eta: block(0),
                    v: block(1),
                    e: block(2),
                    z: block(3),
                    activity: block(4),
                    tau: block(5),
                    obs_err: c[36],
                    param_err: c[37],
                }
            })
            .collect();
        rows.push(TraceRow { t: values[0], vessels });
    }
    Ok(rows)
}

/// Reads a trace CSV and its sidecar.
pub fn read_trace(path: impl AsRef<Path>) -> Result<SimTrace> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let rows = parse_trace_csv(&text, path)?;
    let side = sidecar_path(path);
    let meta_text = fs::read_to_string(&side).map_err(|e| Error::io(&side, e))?;
    let meta: TraceMeta = toml::from_str(&meta_text).map_err(|e| Error::TraceFormat {
        path: side.clone(),
        reason: e.to_string(),
    })?;
    Ok(SimTrace { meta, rows })
}
