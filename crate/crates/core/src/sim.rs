//! Deterministic fleet simulation.
//!
//! Each vessel carries its plant state, its parameter estimator and its
//! shunting activity; the whole fleet is one coupled ODE advanced by RK4.
//! The control loop is sampled: at the start of every step the simulator
//! draws the (possibly noisy) measurements, computes each vessel's control
//! from its neighborhood only, and holds torque, auxiliary variable and
//! measurement noise constant across the four RK4 stages.

use nalgebra::SVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::control::{
    compute_control, consensus_error, ControlGains, ControlLaw, ControlOutput, NeighborInfo,
    NeighborhoodView, ReferenceSample,
};
use crate::error::{Error, Result};
use crate::estimator::{
    estimation_diagnostics, estimator_rates, lyapunov_value, EstimatorGains, EstimatorState,
};
use crate::graph::Topology;
use crate::integrator::{rk4_step, OdeState};
use crate::neuro::{shunting_rate, NeuroState};
use crate::scenario::ScenarioConfig;
use crate::trace::{SimTrace, TraceMeta, TraceRow, VesselRecord};
use crate::vessel::{
    kinematics_rate, plant_acceleration, regression_from_velocity, theta_from_physical,
    PhysicalParams, ThetaVector, Vec6, VesselState,
};

/// Any state or control norm above this ends the run as diverged.
pub const DIVERGENCE_THRESHOLD: f64 = 1e6;

/// Upper bound on `h * rho` for one RK4 substep, where `rho` bounds the
/// fastest local rate of the coupled ODE.
pub const SUBSTEP_RATE_BOUND: f64 = 1.0;

/// Substep cap per control step; beyond it the run is left to diverge.
pub const MAX_SUBSTEPS: usize = 4096;

/// Per-axis `offset + slope t + exp_amplitude e^{-exp_rate t}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceTrajectory {
    pub offset: [f64; 6],
    pub slope: [f64; 6],
    pub exp_amplitude: [f64; 6],
    pub exp_rate: f64,
}

impl ReferenceTrajectory {
    /// Straight 3-D line with an exponential surge onset, level attitude:
    /// `(30 - 30 e^{-t}, 5 t, 2 t, 0, 0, 0)`.
    pub fn benchmark_line() -> Self {
        Self {
            offset: [30.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            slope: [0.0, 5.0, 2.0, 0.0, 0.0, 0.0],
            exp_amplitude: [-30.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            exp_rate: 1.0,
        }
    }

    pub fn stationary(pose: [f64; 6]) -> Self {
        Self {
            offset: pose,
            slope: [0.0; 6],
            exp_amplitude: [0.0; 6],
            exp_rate: 0.0,
        }
    }

    pub fn sample(&self, t: f64) -> ReferenceSample {
        let decay = (-self.exp_rate * t).exp();
        let r = self.exp_rate;
        ReferenceSample {
            eta: Vec6::from_fn(|k, _| self.offset[k] + self.slope[k] * t + self.exp_amplitude[k] * decay),
            rate: Vec6::from_fn(|k, _| self.slope[k] - r * self.exp_amplitude[k] * decay),
            accel: Vec6::from_fn(|k, _| r * r * self.exp_amplitude[k] * decay),
        }
    }

    /// Whether the reference ever has a nonzero rate.
    pub fn is_moving(&self) -> bool {
        self.slope.iter().any(|s| *s != 0.0)
            || (self.exp_rate != 0.0 && self.exp_amplitude.iter().any(|a| *a != 0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DisturbanceKind {
    None,
    Sinusoidal,
}

/// Force-level environmental disturbance (N and N m).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisturbanceSpec {
    pub kind: DisturbanceKind,
    pub amplitudes: [f64; 6],
    /// rad/s
    pub frequency: f64,
}

impl DisturbanceSpec {
    pub fn none() -> Self {
        Self {
            kind: DisturbanceKind::None,
            amplitudes: [0.0; 6],
            frequency: 0.0,
        }
    }

    /// Periodic current/wave load used in the disturbance-rejection case.
    pub fn ocean_current() -> Self {
        Self {
            kind: DisturbanceKind::Sinusoidal,
            amplitudes: [110.0, 110.0, 110.0, 0.5, 0.5, 0.5],
            frequency: 1.0,
        }
    }
}

/// `(A1 sin wt, A2 cos wt, A3 sin wt, A4 sin wt, A5 cos wt, A6 sin wt)`.
pub fn disturbance_signal(t: f64, spec: &DisturbanceSpec) -> Vec6 {
    match spec.kind {
        DisturbanceKind::None => Vec6::zeros(),
        DisturbanceKind::Sinusoidal => {
            let (s, c) = (spec.frequency * t).sin_cos();
            let a = &spec.amplitudes;
            Vec6::new(a[0] * s, a[1] * c, a[2] * s, a[3] * s, a[4] * c, a[5] * s)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    None,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    /// Standard deviations on pose (m, rad).
    pub sigma_eta: [f64; 6],
    /// Standard deviations on body velocity (m/s, rad/s).
    pub sigma_v: [f64; 6],
    pub seed: u64,
}

impl NoiseSpec {
    pub fn none(seed: u64) -> Self {
        Self {
            kind: NoiseKind::None,
            sigma_eta: [0.0; 6],
            sigma_v: [0.0; 6],
            seed,
        }
    }

    pub fn gaussian(sigma: f64, seed: u64) -> Self {
        Self {
            kind: NoiseKind::Gaussian,
            sigma_eta: [sigma; 6],
            sigma_v: [sigma; 6],
            seed,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// Noisy full-state measurement. With no noise the state is returned as is
/// and the generator is not advanced.
pub fn measure<R: Rng + ?Sized>(state: &VesselState, spec: &NoiseSpec, rng: &mut R) -> VesselState {
    match spec.kind {
        NoiseKind::None => *state,
        NoiseKind::Gaussian => {
            let mut out = *state;
            for k in 0..6 {
                let n: f64 = StandardNormal.sample(rng);
                out.eta[k] += spec.sigma_eta[k] * n;
            }
            for k in 0..6 {
                let n: f64 = StandardNormal.sample(rng);
                out.nu[k] += spec.sigma_v[k] * n;
            }
            out
        }
    }
}

/// Plant, estimator and shunting state of one vessel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VesselSim {
    pub vessel: VesselState,
    pub estimator: EstimatorState,
    pub neuro: NeuroState,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VesselRate {
    pub eta_dot: Vec6,
    pub nu_dot: Vec6,
    pub v_hat_dot: Vec6,
    pub theta_dot: SVector<f64, 24>,
    pub activity_dot: Vec6,
}

impl VesselSim {
    fn norms_within(&self, limit: f64) -> bool {
        let finite = self.vessel.is_finite()
            && self.estimator.is_finite()
            && self.neuro.activity.iter().all(|x| x.is_finite());
        finite
            && self.vessel.eta.norm() <= limit
            && self.vessel.nu.norm() <= limit
            && self.estimator.v_hat.norm() <= limit
            && self.estimator.theta_hat.0.norm() <= limit
            && self.neuro.activity.norm() <= limit
    }
}

impl OdeState for VesselSim {
    type Rate = VesselRate;

    fn advanced(&self, h: f64, r: &VesselRate) -> Self {
        Self {
            vessel: VesselState::new(self.vessel.eta + h * r.eta_dot, self.vessel.nu + h * r.nu_dot),
            estimator: EstimatorState {
                v_hat: self.estimator.v_hat + h * r.v_hat_dot,
                theta_hat: ThetaVector(self.estimator.theta_hat.0 + h * r.theta_dot),
            },
            neuro: NeuroState {
                activity: self.neuro.activity + h * r.activity_dot,
            },
        }
    }

    fn rk4_blend(k1: &VesselRate, k2: &VesselRate, k3: &VesselRate, k4: &VesselRate) -> VesselRate {
        let w = 1.0 / 6.0;
        VesselRate {
            eta_dot: (k1.eta_dot + 2.0 * k2.eta_dot + 2.0 * k3.eta_dot + k4.eta_dot) * w,
            nu_dot: (k1.nu_dot + 2.0 * k2.nu_dot + 2.0 * k3.nu_dot + k4.nu_dot) * w,
            v_hat_dot: (k1.v_hat_dot + 2.0 * k2.v_hat_dot + 2.0 * k3.v_hat_dot + k4.v_hat_dot) * w,
            theta_dot: (k1.theta_dot + 2.0 * k2.theta_dot + 2.0 * k3.theta_dot + k4.theta_dot) * w,
            activity_dot: (k1.activity_dot + 2.0 * k2.activity_dot + 2.0 * k3.activity_dot + k4.activity_dot)
                * w,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FleetState {
    pub t: f64,
    pub vessels: Vec<VesselSim>,
}

impl OdeState for FleetState {
    type Rate = Vec<VesselRate>;

    fn advanced(&self, h: f64, rate: &Vec<VesselRate>) -> Self {
        Self {
            t: self.t + h,
            vessels: self.vessels.iter().zip(rate).map(|(v, r)| v.advanced(h, r)).collect(),
        }
    }

    fn rk4_blend(
        k1: &Vec<VesselRate>,
        k2: &Vec<VesselRate>,
        k3: &Vec<VesselRate>,
        k4: &Vec<VesselRate>,
    ) -> Vec<VesselRate> {
        (0..k1.len())
            .map(|i| VesselSim::rk4_blend(&k1[i], &k2[i], &k3[i], &k4[i]))
            .collect()
    }
}

/// Inputs sampled at the start of a step and held across its RK4 stages.
#[derive(Debug, Clone, PartialEq)]
pub struct StepHold {
    pub tau: Vec<Vec6>,
    pub z: Vec<Vec6>,
    /// Velocity measurement noise; the estimator sees `nu + v_noise`.
    pub v_noise: Vec<Vec6>,
}

/// Right-hand side of one vessel's coupled plant/estimator/shunting ODE.
#[allow(clippy::too_many_arguments)]
pub fn vessel_derivative(
    s: &VesselSim,
    tau: &Vec6,
    v_noise: &Vec6,
    d_tilde: &Vec6,
    theta_true: &ThetaVector,
    est_gains: &EstimatorGains,
    shunting: Option<(&crate::neuro::ShuntingParams, &Vec6)>,
) -> Result<VesselRate> {
    let eta_dot = kinematics_rate(&s.vessel)?;
    let nu_dot = plant_acceleration(&s.vessel, tau, theta_true, d_tilde);
    let v_measured = s.vessel.nu + v_noise;
    let psi = regression_from_velocity(&v_measured, tau);
    let est = estimator_rates(&s.estimator, &v_measured, &psi, est_gains);
    let activity_dot = match shunting {
        Some((p, z)) => shunting_rate(&s.neuro, z, p),
        None => Vec6::zeros(),
    };
    Ok(VesselRate {
        eta_dot,
        nu_dot,
        v_hat_dot: est.v_hat_dot,
        theta_dot: est.theta_dot,
        activity_dot,
    })
}

/// A configured fleet simulation.
#[derive(Debug, Clone)]
pub struct Simulator {
    config: ScenarioConfig,
    topology: Topology,
    /// `offsets[i][j]` is the desired pose of `i` relative to `j`.
    offsets: Vec<Vec<Vec6>>,
    theta_true: Vec<ThetaVector>,
    inertia: Vec<Vec6>,
    gains: ControlGains,
    est_gains: EstimatorGains,
    rng: ChaCha8Rng,
}

impl Simulator {
    pub fn new(config: &ScenarioConfig) -> Result<Self> {
        config.validate()?;
        let topology = config.build_topology()?;
        let n = topology.n_vessels();
        let mut offsets = vec![vec![Vec6::zeros(); n]; n];
        for f in &config.formation {
            offsets[f.from][f.to] = Vec6::from_column_slice(&f.offset);
        }
        let physical: Vec<PhysicalParams> = config.vessels.iter().map(|v| v.physical).collect();
        let theta_true = physical.iter().map(theta_from_physical).collect::<Result<Vec<_>>>()?;
        let inertia = physical.iter().map(|p| p.effective_inertia()).collect();
        Ok(Self {
            gains: config.control_gains()?,
            est_gains: config.estimator_gains()?,
            rng: config.noise.rng(),
            config: config.clone(),
            topology,
            offsets,
            theta_true,
            inertia,
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn theta_true(&self, i: usize) -> &ThetaVector {
        &self.theta_true[i]
    }

    pub fn n_vessels(&self) -> usize {
        self.topology.n_vessels()
    }

    /// Initial fleet: configured poses and velocities, parameter estimate
    /// zero apart from the configured input-gain prior, observer seeded with
    /// the first measurement, neurons at rest.
    pub fn initial_state(&mut self) -> FleetState {
        let vessels = self
            .config
            .vessels
            .iter()
            .map(|v| {
                let vessel = VesselState::new(
                    Vec6::from_column_slice(&v.eta0),
                    Vec6::from_column_slice(&v.nu0),
                );
                let measured = measure(&vessel, &self.config.noise, &mut self.rng);
                VesselSim {
                    vessel,
                    estimator: EstimatorState::with_input_gain_prior(measured.nu, self.config.estimator.initial_input_gain),
                    neuro: NeuroState::rest(),
                }
            })
            .collect();
        FleetState { t: 0.0, vessels }
    }

    pub fn measure_fleet(&mut self, fs: &FleetState) -> Vec<VesselState> {
        fs.vessels
            .iter()
            .map(|v| measure(&v.vessel, &self.config.noise, &mut self.rng))
            .collect()
    }

    /// View of vessel `i` built from the given per-vessel states. Only
    /// graph neighbors of `i` are read.
    pub fn neighborhood_view(&self, i: usize, states: &[VesselState], t: f64) -> Result<NeighborhoodView> {
        let own = states[i];
        let neighbors = self
            .topology
            .neighbors(i)
            .map(|(j, weight)| {
                Ok(NeighborInfo {
                    index: j,
                    weight,
                    eta: states[j].eta,
                    eta_rate: kinematics_rate(&states[j])?,
                    offset: self.offsets[i][j],
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(NeighborhoodView {
            state: own,
            eta_rate: kinematics_rate(&own)?,
            neighbors,
            reference_weight: self.topology.reference_access()[i],
            reference: self.config.reference.sample(t),
        })
    }

    /// Per-vessel control from measurements and the current internal states.
    pub fn compute_controls(&self, fs: &FleetState, measured: &[VesselState], t: f64) -> Result<Vec<ControlOutput>> {
        (0..self.n_vessels())
            .map(|i| {
                let view = self.neighborhood_view(i, measured, t)?;
                let v = &fs.vessels[i];
                compute_control(self.config.controller, &view, &v.estimator, &v.neuro, &self.gains)
            })
            .collect()
    }

    /// Coupled fleet right-hand side under held step inputs.
    pub fn fleet_derivative(&self, t: f64, fs: &FleetState, hold: &StepHold) -> Result<Vec<VesselRate>> {
        let force = disturbance_signal(t, &self.config.disturbance);
        fs.vessels
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let d_tilde = force.component_div(&self.inertia[i]);
                let shunting = match self.config.controller {
                    ControlLaw::Blc => Some((&self.gains.shunting, &hold.z[i])),
                    _ => None,
                };
                vessel_derivative(
                    v,
                    &hold.tau[i],
                    &hold.v_noise[i],
                    &d_tilde,
                    &self.theta_true[i],
                    &self.est_gains,
                    shunting,
                )
            })
            .collect()
    }

    /// Bound on the fastest local rate of the fleet ODE under `hold`.
    ///
    /// Per DOF the observer/adaptation error pair has eigenvalues of modulus
    /// at most `l + sqrt(p) |psi_k|`, and `|psi_k|` grows with the held
    /// force. The shunting state decays at `a + |z_k|`, and the plant's own
    /// velocity Jacobian is bounded row by row from the true parameters.
    pub fn stiffness(&self, fs: &FleetState, hold: &StepHold) -> f64 {
        let l = &self.est_gains.observer;
        let p = &self.est_gains.adaptation;
        let mut rho: f64 = 0.0;
        for (i, v) in fs.vessels.iter().enumerate() {
            let psi = regression_from_velocity(&(v.vessel.nu + hold.v_noise[i]), &hold.tau[i]);
            let speed = v.vessel.nu.amax();
            let theta = &self.theta_true[i];
            for k in 0..6 {
                rho = rho.max(l[k] + p[k].sqrt() * psi.row(k).norm());
                let (c1, c2) = theta.cross_terms(k);
                rho = rho.max(2.0 * (c1.abs() + c2.abs()) * speed + theta.damping(k).abs());
            }
            if self.config.controller == ControlLaw::Blc {
                rho = rho.max(self.gains.shunting.a + hold.z[i].amax());
            }
        }
        rho
    }

    /// Number of RK4 substeps used to integrate one control period.
    pub fn substeps(&self, fs: &FleetState, hold: &StepHold) -> usize {
        let n = (self.config.dt * self.stiffness(fs, hold) / SUBSTEP_RATE_BOUND).ceil();
        if n.is_finite() {
            (n as usize).clamp(1, MAX_SUBSTEPS)
        } else {
            MAX_SUBSTEPS
        }
    }

    /// Advances one control period with the inputs held. The period is
    /// split into equal RK4 substeps when the local rates demand it.
    pub fn step(&self, fs: &FleetState, hold: &StepHold) -> Result<FleetState> {
        self.step_with_substeps(fs, hold, self.substeps(fs, hold))
    }

    /// One control period integrated with exactly `n` RK4 substeps.
    pub fn step_with_substeps(&self, fs: &FleetState, hold: &StepHold, n: usize) -> Result<FleetState> {
        let n = n.max(1);
        let h = self.config.dt / n as f64;
        let mut x = fs.clone();
        for k in 0..n {
            let t = fs.t + k as f64 * h;
            x = rk4_step(&x, t, h, |t, s| self.fleet_derivative(t, s, hold))?;
        }
        x.t = fs.t + self.config.dt;
        Ok(x)
    }

    fn record(&self, fs: &FleetState, controls: &[ControlOutput], t: f64) -> TraceRow {
        let truth: Vec<VesselState> = fs.vessels.iter().map(|v| v.vessel).collect();
        let vessels = fs
            .vessels
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let e = self
                    .neighborhood_view(i, &truth, t)
                    .map(|view| consensus_error(&view))
                    .unwrap_or_else(|_| Vec6::repeat(f64::NAN));
                let (obs_err, param_err) =
                    estimation_diagnostics(&v.estimator, &v.vessel.nu, &self.theta_true[i]);
                VesselRecord {
                    eta: v.vessel.eta,
                    v: v.vessel.nu,
                    e,
                    z: controls[i].z,
                    activity: v.neuro.activity,
                    tau: controls[i].tau,
                    obs_err,
                    param_err,
                }
            })
            .collect();
        TraceRow { t, vessels }
    }

    /// Integrates from `t = 0` to the configured horizon.
    pub fn run(mut self) -> SimTrace {
        let dt = self.config.dt;
        let steps = (self.config.horizon / dt).round() as usize;
        let record_every = self.config.record_every.max(1);
        let mut meta = TraceMeta::new(self.config.clone());
        if !self.topology.satisfies_connectivity_assumption() {
            meta.warnings.push(
                "topology is not connected or no vessel has reference access; L + B is not positive definite"
                    .into(),
            );
        }
        let mut rows = Vec::with_capacity(steps / record_every + 2);
        let mut fs = self.initial_state();

        for k in 0..=steps {
            let t = k as f64 * dt;
            fs.t = t;
            let measured = self.measure_fleet(&fs);
            let controls = match self.compute_controls(&fs, &measured, t) {
                Ok(c) => c,
                Err(err) => {
                    meta.mark_diverged(t, err.to_string());
                    break;
                }
            };
            if controls.iter().any(|c| c.regularized) {
                meta.regularized_steps += 1;
            }
            let out_of_bounds = fs.vessels.iter().any(|v| !v.norms_within(DIVERGENCE_THRESHOLD))
                || controls
                    .iter()
                    .any(|c| !(c.tau.norm() <= DIVERGENCE_THRESHOLD && c.z.norm() <= DIVERGENCE_THRESHOLD));
            if k % record_every == 0 || k == steps || out_of_bounds {
                rows.push(self.record(&fs, &controls, t));
            }
            if out_of_bounds {
                meta.mark_diverged(t, format!("a state or control norm exceeded {DIVERGENCE_THRESHOLD:e}"));
                break;
            }
            if k == steps {
                break;
            }
            let hold = StepHold {
                tau: controls.iter().map(|c| c.tau).collect(),
                z: controls.iter().map(|c| c.z).collect(),
                v_noise: measured.iter().zip(&fs.vessels).map(|(m, v)| m.nu - v.vessel.nu).collect(),
            };
            meta.max_substeps = meta.max_substeps.max(self.substeps(&fs, &hold));
            match self.step(&fs, &hold) {
                Ok(next) => fs = next,
                Err(err) => {
                    meta.mark_diverged(t + dt, err.to_string());
                    break;
                }
            }
        }
        SimTrace { meta, rows }
    }
}

/// Validates `cfg` and runs it to completion or divergence.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<SimTrace> {
    Ok(Simulator::new(cfg)?.run())
}

/// One sample of a single-vessel identification run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentificationSample {
    pub t: f64,
    pub obs_error: f64,
    pub param_error: f64,
    /// `1/2 v~^T P v~ + 1/2 |theta~|^2` against the true velocity and parameters.
    pub lyapunov: f64,
}

/// Open-loop identification of one vessel: the excitation torque is sampled
/// at each step start and held, the force disturbance is evaluated at every
/// RK4 stage. Returns one sample per step, including `t = 0`.
pub fn run_identification<T, D>(
    params: &PhysicalParams,
    gains: &EstimatorGains,
    initial: VesselState,
    excitation: T,
    disturbance: D,
    dt: f64,
    horizon: f64,
) -> Result<Vec<IdentificationSample>>
where
    T: Fn(f64) -> Vec6,
    D: Fn(f64) -> Vec6,
{
    if !(dt > 0.0) {
        return Err(Error::invalid("dt must be > 0"));
    }
    let theta_true = theta_from_physical(params)?;
    let inertia = params.effective_inertia();
    let steps = (horizon / dt).round() as usize;
    let mut s = VesselSim {
        vessel: initial,
        estimator: EstimatorState::initial(initial.nu),
        neuro: NeuroState::rest(),
    };
    let sample = |t: f64, s: &VesselSim| {
        let (obs_error, param_error) = estimation_diagnostics(&s.estimator, &s.vessel.nu, &theta_true);
        IdentificationSample {
            t,
            obs_error,
            param_error,
            lyapunov: lyapunov_value(&s.estimator, &s.vessel.nu, &theta_true, gains),
        }
    };
    let mut out = Vec::with_capacity(steps + 1);
    out.push(sample(0.0, &s));
    for k in 0..steps {
        let t = k as f64 * dt;
        let tau = excitation(t);
        s = rk4_step(&s, t, dt, |ts, x| {
            let d_tilde = disturbance(ts).component_div(&inertia);
            vessel_derivative(x, &tau, &Vec6::zeros(), &d_tilde, &theta_true, gains, None)
        })?;
        out.push(sample((k + 1) as f64 * dt, &s));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;
    use crate::trace::Verdict;

    #[test]
    fn benchmark_reference_derivatives() {
        let r = ReferenceTrajectory::benchmark_line();
        let s0 = r.sample(0.0);
        assert_eq!(s0.eta, Vec6::zeros());
        assert_eq!(s0.rate, Vec6::new(30.0, 5.0, 2.0, 0.0, 0.0, 0.0));
        assert_eq!(s0.accel, Vec6::new(-30.0, 0.0, 0.0, 0.0, 0.0, 0.0));
        let s = r.sample(2.0);
        assert!((s.eta[0] - (30.0 - 30.0 * (-2.0f64).exp())).abs() < 1e-12);
        assert_eq!(s.eta[1], 10.0);
        assert!(r.is_moving());
        assert!(!ReferenceTrajectory::stationary([1.0; 6]).is_moving());
    }

    #[test]
    fn disturbance_examples() {
        let d = DisturbanceSpec::ocean_current();
        assert_eq!(disturbance_signal(0.0, &d), Vec6::new(0.0, 110.0, 0.0, 0.0, 0.5, 0.0));
        let q = disturbance_signal(FRAC_PI_2, &d);
        let expected = Vec6::new(110.0, 0.0, 110.0, 0.5, 0.0, 0.5);
        assert!((q - expected).amax() < 1e-12);
        assert_eq!(disturbance_signal(3.0, &DisturbanceSpec::none()), Vec6::zeros());
    }

    #[test]
    fn noiseless_measurement_is_identity() {
        let s = VesselState::new(Vec6::repeat(1.5), Vec6::repeat(-0.25));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(measure(&s, &NoiseSpec::none(1), &mut rng), s);
        assert_eq!(measure(&s, &NoiseSpec::gaussian(0.0, 1), &mut rng), s);
    }

    #[test]
    fn seeded_measurement_is_reproducible() {
        let s = VesselState::new(Vec6::repeat(1.5), Vec6::repeat(-0.25));
        let spec = NoiseSpec::gaussian(0.1, 42);
        let a = measure(&s, &spec, &mut spec.rng());
        let b = measure(&s, &spec, &mut spec.rng());
        assert_eq!(a, b);
        assert_ne!(a, s);
    }

    #[test]
    fn forced_surge_accelerates_one_metre_per_second_squared() {
        let theta = theta_from_physical(&PhysicalParams::benchmark_auv()).unwrap();
        let gains = EstimatorGains::uniform(100.0, 0.1).unwrap();
        let s = VesselSim {
            vessel: VesselState::at_rest(Vec6::zeros()),
            estimator: EstimatorState::initial(Vec6::zeros()),
            neuro: NeuroState::rest(),
        };
        let tau = Vec6::new(33.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        let r = vessel_derivative(&s, &tau, &Vec6::zeros(), &Vec6::zeros(), &theta, &gains, None).unwrap();
        assert!((r.nu_dot - Vec6::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0)).norm() < 1e-15);
        assert_eq!(r.eta_dot, Vec6::zeros());
        assert_eq!(r.v_hat_dot, Vec6::zeros());
        assert_eq!(r.theta_dot, SVector::<f64, 24>::zeros());
    }

    #[test]
    fn fleet_at_rest_has_zero_rates() {
        let mut cfg = crate::scenario::builtin_scenario("scenario1-blc").unwrap();
        cfg.reference = ReferenceTrajectory::stationary([0.0; 6]);
        for v in cfg.vessels.iter_mut() {
            v.eta0 = [0.0; 6];
        }
        cfg.formation.clear();
        let mut sim = Simulator::new(&cfg).unwrap();
        let fs = sim.initial_state();
        let n = sim.n_vessels();
        let hold = StepHold {
            tau: vec![Vec6::zeros(); n],
            z: vec![Vec6::zeros(); n],
            v_noise: vec![Vec6::zeros(); n],
        };
        for r in sim.fleet_derivative(0.0, &fs, &hold).unwrap() {
            assert_eq!(r.eta_dot, Vec6::zeros());
            assert_eq!(r.nu_dot, Vec6::zeros());
            assert_eq!(r.v_hat_dot, Vec6::zeros());
            assert_eq!(r.theta_dot, SVector::<f64, 24>::zeros());
            assert_eq!(r.activity_dot, Vec6::zeros());
        }
    }

    #[test]
    fn zero_horizon_records_only_the_initial_row() {
        let mut cfg = crate::scenario::builtin_scenario("scenario1-blc").unwrap();
        cfg.horizon = 0.0;
        let trace = run_scenario(&cfg).unwrap();
        assert_eq!(trace.rows.len(), 1);
        assert_eq!(trace.rows[0].t, 0.0);
        assert_eq!(trace.meta.verdict, Verdict::Completed);
    }
}
