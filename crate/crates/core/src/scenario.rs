//! Scenario configuration.
//!
//! Scenarios are TOML documents. Vessel indices are zero-based; units are
//! SI (m, rad, s, kg, N). Unknown keys are rejected. A complete example is
//! `scenarios/paper_scenario1.toml`; the schema in brief:
//!
//! ```toml
//! name = "scenario1-blc"
//! controller = "blc"          # blc | lc | lsmc
//! dt = 0.001                  # s
//! horizon = 20.0              # s
//! record_every = 10           # steps between trace rows
//!
//! [topology]
//! edges = [[0, 1, 1.0], [1, 2, 1.0]]   # undirected (i, j, weight)
//! reference_access = [1.0, 1.0, 1.0]   # b_i
//!
//! [[formation]]               # desired pose of `from` relative to `to`
//! from = 0                    # both directions required, negated
//! to = 1
//! offset = [0.0, 10.0, 0.0, 0.0, 0.0, 0.0]
//!
//! [[vessels]]                 # one table per vessel
//! eta0 = [3.0, 3.0, 3.0, 0.3, 0.0, 0.2]
//! nu0 = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
//! [vessels.physical]
//! mass = 25.0 ...
//!
//! [estimator]   observer = [..6], adaptation = [..6], initial_input_gain
//! [control]     k1, k2 = [..6], sat_layer, input_gain_floor
//! [control.shunting]  a, b, d
//! [reference]   offset, slope, exp_amplitude = [..6], exp_rate
//! [disturbance] kind = "none" | "sinusoidal", amplitudes = [..6], frequency
//! [noise]       kind = "none" | "gaussian", sigma_eta, sigma_v = [..6], seed
//! ```

use serde::{Deserialize, Serialize};

use crate::control::{ControlGains, ControlLaw, DEFAULT_INPUT_GAIN_FLOOR};
use crate::error::{Error, Result};
use crate::estimator::EstimatorGains;
use crate::graph::Topology;
use crate::neuro::ShuntingParams;
use crate::sim::{DisturbanceKind, DisturbanceSpec, NoiseKind, NoiseSpec, ReferenceTrajectory};
use crate::vessel::{ensure_no_singularity, PhysicalParams, Vec6};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_NOISE_SIGMA: f64 = 0.01;

/// Input-gain prior of the built-in scenarios, a vessel of roughly 50 kg.
/// Starting from zero, the floored input gain puts the first control step
/// near 1e6 N.
pub const NOMINAL_INPUT_GAIN: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyConfig {
    pub edges: Vec<(usize, usize, f64)>,
    pub reference_access: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormationOffset {
    pub from: usize,
    pub to: usize,
    pub offset: [f64; 6],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VesselConfig {
    pub eta0: [f64; 6],
    pub nu0: [f64; 6],
    pub physical: PhysicalParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorConfig {
    pub observer: [f64; 6],
    pub adaptation: [f64; 6],
    /// Starting value of every estimated input gain (1/kg or 1/(kg m^2));
    /// all other parameters start at zero.
    #[serde(default)]
    pub initial_input_gain: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlConfig {
    pub k1: [f64; 6],
    pub k2: [f64; 6],
    pub sat_layer: f64,
    #[serde(default = "default_floor")]
    pub input_gain_floor: f64,
    pub shunting: ShuntingParams,
}

fn default_floor() -> f64 {
    DEFAULT_INPUT_GAIN_FLOOR
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub controller: ControlLaw,
    pub dt: f64,
    pub horizon: f64,
    pub record_every: usize,
    pub topology: TopologyConfig,
    #[serde(default)]
    pub formation: Vec<FormationOffset>,
    pub vessels: Vec<VesselConfig>,
    pub estimator: EstimatorConfig,
    pub control: ControlConfig,
    pub reference: ReferenceTrajectory,
    pub disturbance: DisturbanceSpec,
    pub noise: NoiseSpec,
}

fn all_finite(xs: &[f64]) -> bool {
    xs.iter().all(|x| x.is_finite())
}

impl ScenarioConfig {
    pub fn n_vessels(&self) -> usize {
        self.vessels.len()
    }

    pub fn build_topology(&self) -> Result<Topology> {
        Topology::from_edges(self.n_vessels(), &self.topology.edges, &self.topology.reference_access)
    }

    pub fn estimator_gains(&self) -> Result<EstimatorGains> {
        EstimatorGains::new(
            Vec6::from_column_slice(&self.estimator.observer),
            Vec6::from_column_slice(&self.estimator.adaptation),
        )
    }

    pub fn control_gains(&self) -> Result<ControlGains> {
        let g = ControlGains {
            k1: Vec6::from_column_slice(&self.control.k1),
            k2: Vec6::from_column_slice(&self.control.k2),
            shunting: self.control.shunting,
            sat_layer: self.control.sat_layer,
            input_gain_floor: self.control.input_gain_floor,
        };
        g.validate()?;
        Ok(g)
    }

    /// Checks every invariant, naming the violated rule.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_vessels();
        if n == 0 {
            return Err(Error::invalid("at least one [[vessels]] entry is required"));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::invalid(format!("dt = {} must be > 0", self.dt)));
        }
        if !(self.horizon.is_finite() && self.horizon >= 0.0) {
            return Err(Error::invalid(format!("horizon = {} must be >= 0", self.horizon)));
        }
        if self.record_every == 0 {
            return Err(Error::invalid("record_every must be >= 1"));
        }
        let topology = self.build_topology().map_err(|e| Error::invalid(e.to_string()))?;

        for f in &self.formation {
            if f.from >= n || f.to >= n {
                return Err(Error::invalid(format!(
                    "formation offset ({}, {}) references a vessel outside 0..{n}",
                    f.from, f.to
                )));
            }
            if topology.weight(f.from, f.to) == 0.0 {
                return Err(Error::invalid(format!(
                    "formation offset ({}, {}) is not on a graph edge",
                    f.from, f.to
                )));
            }
            if !all_finite(&f.offset) {
                return Err(Error::invalid("formation offsets must be finite"));
            }
            if f.offset[3..].iter().any(|x| *x != 0.0) {
                return Err(Error::invalid(format!(
                    "formation offset ({}, {}) has nonzero attitude components; relative attitudes must be zero",
                    f.from, f.to
                )));
            }
            let reverse: Vec<_> = self
                .formation
                .iter()
                .filter(|g| g.from == f.to && g.to == f.from)
                .collect();
            let consistent = matches!(reverse.as_slice(), [g] if (0..6).all(|k| g.offset[k] == -f.offset[k]));
            if !consistent {
                return Err(Error::invalid(format!(
                    "formation offset consistency: delta_{0}{1} must equal -delta_{1}{0} (exactly one reverse entry)",
                    f.from, f.to
                )));
            }
            if self
                .formation
                .iter()
                .filter(|g| g.from == f.from && g.to == f.to)
                .count()
                > 1
            {
                return Err(Error::invalid(format!(
                    "formation offset ({}, {}) is given more than once",
                    f.from, f.to
                )));
            }
        }

        for (i, v) in self.vessels.iter().enumerate() {
            v.physical
                .validate()
                .map_err(|e| Error::invalid(format!("vessel {i}: {e}")))?;
            if !all_finite(&v.eta0) || !all_finite(&v.nu0) {
                return Err(Error::invalid(format!("vessel {i}: initial state must be finite")));
            }
            ensure_no_singularity(&nalgebra::Vector3::new(v.eta0[3], v.eta0[4], v.eta0[5]))
                .map_err(|e| Error::invalid(format!("vessel {i}: {e}")))?;
        }

        self.estimator_gains().map_err(|e| Error::invalid(e.to_string()))?;
        if !self.estimator.initial_input_gain.is_finite() {
            return Err(Error::invalid("estimator.initial_input_gain must be finite"));
        }
        self.control_gains().map_err(|e| Error::invalid(e.to_string()))?;

        let r = &self.reference;
        if !(all_finite(&r.offset) && all_finite(&r.slope) && all_finite(&r.exp_amplitude) && r.exp_rate.is_finite()) {
            return Err(Error::invalid("reference coefficients must be finite"));
        }
        if r.is_moving() {
            if let Some(i) = topology.reference_access().iter().position(|b| *b == 0.0) {
                return Err(Error::invalid(format!(
                    "vessel {i} has b_i = 0 but the reference is moving; every vessel needs the reference rate"
                )));
            }
        }

        let d = &self.disturbance;
        if !all_finite(&d.amplitudes) || d.amplitudes.iter().any(|a| *a < 0.0) || !d.frequency.is_finite() {
            return Err(Error::invalid("disturbance amplitudes must be finite and >= 0"));
        }
        let s = &self.noise;
        let sig = s.sigma_eta.iter().chain(&s.sigma_v);
        if sig.clone().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::invalid("noise standard deviations must be finite and >= 0"));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::ConfigParse(e.to_string()))
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.noise.seed = seed;
        self
    }

    /// Sets every noise standard deviation to `sigma`; zero turns noise off.
    pub fn with_noise_sigma(mut self, sigma: f64) -> Self {
        self.noise.sigma_eta = [sigma; 6];
        self.noise.sigma_v = [sigma; 6];
        self.noise.kind = if sigma > 0.0 { NoiseKind::Gaussian } else { NoiseKind::None };
        self
    }

    /// Scales the disturbance amplitudes; a zero scale turns it off.
    pub fn with_disturbance_scale(mut self, scale: f64) -> Self {
        for a in self.disturbance.amplitudes.iter_mut() {
            *a *= scale;
        }
        if scale == 0.0 {
            self.disturbance.kind = DisturbanceKind::None;
        }
        self
    }

    pub fn with_controller(mut self, law: ControlLaw) -> Self {
        let base = self.name.rsplit_once('-').map_or(self.name.as_str(), |(b, _)| b).to_string();
        self.name = format!("{base}-{law}");
        self.control = table_gains(law);
        self.controller = law;
        self
    }
}

/// Parses and fully validates a scenario document.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    if text.trim().is_empty() {
        return Err(Error::ConfigParse("empty scenario document".into()));
    }
    let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Benchmark gains for each law.
pub fn table_gains(law: ControlLaw) -> ControlConfig {
    let (k1, k2) = match law {
        ControlLaw::Blc => ([15.0, 15.0, 15.0, 5.0, 5.0, 5.0], [1.0, 1.0, 1.0, 0.5, 0.5, 0.5]),
        ControlLaw::Lc => ([25.0, 25.0, 25.0, 5.0, 5.0, 5.0], [10.0, 10.0, 10.0, 5.0, 5.0, 5.0]),
        ControlLaw::Lsmc => ([15.0, 15.0, 15.0, 5.0, 5.0, 5.0], [60.0, 60.0, 60.0, 15.0, 15.0, 15.0]),
    };
    ControlConfig {
        k1,
        k2,
        sat_layer: 1.0,
        input_gain_floor: DEFAULT_INPUT_GAIN_FLOOR,
        shunting: ShuntingParams {
            a: 10.0,
            b: 50.0,
            d: 50.0,
        },
    }
}

fn benchmark_fleet(name: &str, law: ControlLaw, disturbance: DisturbanceSpec, noise: NoiseSpec) -> ScenarioConfig {
    let physical = PhysicalParams::benchmark_auv();
    let initial = [
        [3.0, 3.0, 3.0, 0.3, 0.0, 0.2],
        [2.5, 3.5, 3.0, 0.2, 0.0, 0.25],
        [2.0, 3.0, 3.0, 0.3, 0.0, 0.2],
        [3.0, 3.0, 2.0, 0.3, 0.0, 0.2],
    ];
    let offset = |from, to, xyz: [f64; 3]| FormationOffset {
        from,
        to,
        offset: [xyz[0], xyz[1], xyz[2], 0.0, 0.0, 0.0],
    };
    ScenarioConfig {
        name: format!("{name}-{law}"),
        controller: law,
        dt: 1e-3,
        horizon: 20.0,
        record_every: 10,
        topology: TopologyConfig {
            edges: vec![(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)],
            reference_access: vec![1.0; 4],
        },
        formation: vec![
            offset(0, 1, [0.0, 10.0, 0.0]),
            offset(1, 0, [0.0, -10.0, 0.0]),
            offset(1, 2, [-10.0, 0.0, 0.0]),
            offset(2, 1, [10.0, 0.0, 0.0]),
            offset(2, 3, [0.0, -10.0, 0.0]),
            offset(3, 2, [0.0, 10.0, 0.0]),
        ],
        vessels: initial
            .iter()
            .map(|eta0| VesselConfig {
                eta0: *eta0,
                nu0: [0.0; 6],
                physical,
            })
            .collect(),
        estimator: EstimatorConfig {
            observer: [100.0; 6],
            adaptation: [0.1; 6],
            initial_input_gain: NOMINAL_INPUT_GAIN,
        },
        control: table_gains(law),
        reference: ReferenceTrajectory::benchmark_line(),
        disturbance,
        noise,
    }
}

pub const SCENARIO_NAMES: [&str; 3] = ["scenario1", "scenario2", "scenario3"];

/// The nine benchmark runs: nominal tracking, sinusoidal disturbance and
/// Gaussian measurement noise, each under BLC, LC and LSMC.
pub fn builtin_scenarios() -> Vec<ScenarioConfig> {
    let mut out = Vec::with_capacity(9);
    for name in SCENARIO_NAMES {
        for law in ControlLaw::ALL {
            let (disturbance, noise) = match name {
                "scenario1" => (DisturbanceSpec::none(), NoiseSpec::none(DEFAULT_SEED)),
                "scenario2" => (DisturbanceSpec::ocean_current(), NoiseSpec::none(DEFAULT_SEED)),
                _ => (
                    DisturbanceSpec::none(),
                    NoiseSpec::gaussian(DEFAULT_NOISE_SIGMA, DEFAULT_SEED),
                ),
            };
            out.push(benchmark_fleet(name, law, disturbance, noise));
        }
    }
    out
}

/// Looks up `scenarioN-law`; a bare `scenarioN` selects BLC.
pub fn builtin_scenario(name: &str) -> Option<ScenarioConfig> {
    let full = if SCENARIO_NAMES.contains(&name) {
        format!("{name}-blc")
    } else {
        name.to_ascii_lowercase()
    };
    builtin_scenarios().into_iter().find(|c| c.name == full)
}
