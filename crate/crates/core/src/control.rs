//! Distributed formation control.
//!
//! Every law is evaluated per vessel from a [`NeighborhoodView`], which holds
//! only the vessel's own measurements, those of its graph neighbors and the
//! reference sample. The backstepping chain is
//!
//! ```text
//! e    = sum_j a_ij (eta - eta_j - delta_ij) + b (eta - eta_ref)
//! v_d  = J^-1 (-K1 e + eta_ref_dot)
//! z    = v - v_d
//! tau  = B^-1 [ v_d_dot + C v + D v + G - K2 w ]
//! ```
//!
//! where `B, C, D, G` are rebuilt from the current parameter estimate and the
//! feedback signal `w` is the shunting activity (BLC), `z` itself (LC) or a
//! boundary-layer saturation of `z` (LSMC).

use nalgebra::Matrix6;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::EstimatorState;
use crate::neuro::{NeuroState, ShuntingParams};
use crate::vessel::{
    transform_jacobian_inverse, transform_jacobian_rate, ThetaVector, Vec6, VesselState,
};

/// Estimated input gains smaller than this in magnitude are clamped away from zero.
pub const DEFAULT_INPUT_GAIN_FLOOR: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ControlLaw {
    /// Learning-based backstepping with shunting neurodynamics feedback.
    Blc,
    /// Learning-based backstepping with linear `z` feedback.
    Lc,
    /// Learning-based sliding mode with boundary-layer saturation.
    Lsmc,
}

impl ControlLaw {
    pub const ALL: [ControlLaw; 3] = [ControlLaw::Blc, ControlLaw::Lc, ControlLaw::Lsmc];

    pub fn name(&self) -> &'static str {
        match self {
            ControlLaw::Blc => "blc",
            ControlLaw::Lc => "lc",
            ControlLaw::Lsmc => "lsmc",
        }
    }
}

impl std::fmt::Display for ControlLaw {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ControlLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "blc" => Ok(ControlLaw::Blc),
            "lc" => Ok(ControlLaw::Lc),
            "lsmc" => Ok(ControlLaw::Lsmc),
            other => Err(Error::invalid(format!(
                "unknown controller '{other}', expected blc, lc or lsmc"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlGains {
    /// Virtual-control gain, positive diagonal.
    pub k1: Vec6,
    /// Torque gain, positive diagonal.
    pub k2: Vec6,
    pub shunting: ShuntingParams,
    /// Boundary-layer width of the LSMC saturation.
    pub sat_layer: f64,
    pub input_gain_floor: f64,
}

impl ControlGains {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: &Vec6| v.iter().all(|x| x.is_finite() && *x > 0.0);
        if !positive(&self.k1) {
            return Err(Error::Gains("K1 must be positive diagonal".into()));
        }
        if !positive(&self.k2) {
            return Err(Error::Gains("K2 must be positive diagonal".into()));
        }
        self.shunting.validate()?;
        if !(self.sat_layer.is_finite() && self.sat_layer > 0.0) {
            return Err(Error::Gains(format!("sat_layer {} must be > 0", self.sat_layer)));
        }
        if !(self.input_gain_floor.is_finite() && self.input_gain_floor > 0.0) {
            return Err(Error::Gains("input gain floor must be > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborInfo {
    pub index: usize,
    pub weight: f64,
    pub eta: Vec6,
    pub eta_rate: Vec6,
    /// Desired pose of self relative to this neighbor.
    pub offset: Vec6,
}

/// Reference pose and its first two time derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReferenceSample {
    pub eta: Vec6,
    pub rate: Vec6,
    pub accel: Vec6,
}

/// Everything vessel `i` may use to compute its control.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborhoodView {
    pub state: VesselState,
    pub eta_rate: Vec6,
    pub neighbors: Vec<NeighborInfo>,
    pub reference_weight: f64,
    pub reference: ReferenceSample,
}

/// Model matrices rebuilt from a parameter estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelEstimate {
    pub b_bar: Matrix6<f64>,
    pub c_bar: Matrix6<f64>,
    pub d_bar: Matrix6<f64>,
    pub g_bar: Vec6,
    /// Set when an input gain had to be clamped to the floor.
    pub regularized: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlOutput {
    pub tau: Vec6,
    pub e: Vec6,
    pub z: Vec6,
    pub v_d: Vec6,
    pub v_d_rate: Vec6,
    pub regularized: bool,
}

pub fn consensus_error(view: &NeighborhoodView) -> Vec6 {
    let eta = view.state.eta;
    let formation: Vec6 = view
        .neighbors
        .iter()
        .map(|n| n.weight * (eta - n.eta - n.offset))
        .sum();
    formation + view.reference_weight * (eta - view.reference.eta)
}

pub fn consensus_error_rate(view: &NeighborhoodView) -> Vec6 {
    let rate = view.eta_rate;
    let formation: Vec6 = view
        .neighbors
        .iter()
        .map(|n| n.weight * (rate - n.eta_rate))
        .sum();
    formation + view.reference_weight * (rate - view.reference.rate)
}

/// `v_d = J^-1 (-K1 e + eta_ref_dot)`.
pub fn virtual_velocity(view: &NeighborhoodView, k1: &Vec6) -> Result<Vec6> {
    let j_inv = transform_jacobian_inverse(&view.state.attitude())?;
    let e = consensus_error(view);
    Ok(j_inv * (-k1.component_mul(&e) + view.reference.rate))
}

/// Analytic time derivative of [`virtual_velocity`].
pub fn virtual_velocity_rate(view: &NeighborhoodView, k1: &Vec6) -> Result<Vec6> {
    let attitude = view.state.attitude();
    let j_inv = transform_jacobian_inverse(&attitude)?;
    let j_dot = transform_jacobian_rate(&attitude, &view.eta_rate.fixed_rows::<3>(3).into_owned())?;
    let e = consensus_error(view);
    let e_dot = consensus_error_rate(view);
    let w = -k1.component_mul(&e) + view.reference.rate;
    let w_dot = -k1.component_mul(&e_dot) + view.reference.accel;
    Ok(-(j_inv * j_dot * j_inv) * w + j_inv * w_dot)
}

pub fn auxiliary_z(v: &Vec6, v_d: &Vec6) -> Vec6 {
    v - v_d
}

/// Builds `B, C, D, G` so that `Psi(v, tau) theta = -C v - D v - G + B tau`.
pub fn matrices_from_theta(theta: &ThetaVector, v: &Vec6, floor: f64) -> ModelEstimate {
    let mut regularized = false;
    let b = Vec6::from_fn(|k, _| {
        let g = theta.input_gain(k);
        if g.abs() < floor {
            regularized = true;
            if g < 0.0 {
                -floor
            } else {
                floor
            }
        } else {
            g
        }
    });
    let d = Vec6::from_fn(|k, _| -theta.damping(k));

    let (vx, vy, wx, wy, wz) = (v[0], v[1], v[3], v[4], v[5]);
    let mut c = Matrix6::zeros();
    // Each DOF row reproduces its two cross regressors; the column picks the
    // velocity component the product is attributed to.
    let (t1, t2) = theta.cross_terms(0);
    c[(0, 2)] = -t1 * wy;
    c[(0, 1)] = -t2 * wz;
    let (t1, t2) = theta.cross_terms(1);
    c[(1, 2)] = -t1 * wx;
    c[(1, 0)] = -t2 * wz;
    let (t1, t2) = theta.cross_terms(2);
    c[(2, 1)] = -t1 * wx;
    c[(2, 0)] = -t2 * wy;
    let (t1, t2) = theta.cross_terms(3);
    c[(3, 2)] = -t1 * vy;
    c[(3, 5)] = -t2 * wy;
    let (t1, t2) = theta.cross_terms(4);
    c[(4, 2)] = -t1 * vx;
    c[(4, 5)] = -t2 * wx;
    let (t1, t2) = theta.cross_terms(5);
    c[(5, 1)] = -t1 * vx;
    c[(5, 4)] = -t2 * wx;

    ModelEstimate {
        b_bar: Matrix6::from_diagonal(&b),
        c_bar: c,
        d_bar: Matrix6::from_diagonal(&d),
        g_bar: Vec6::zeros(),
        regularized,
    }
}

/// `sat(z / layer)` clipped to `[-1, 1]` per component.
pub fn boundary_layer_saturation(z: &Vec6, layer: f64) -> Vec6 {
    z.map(|x| (x / layer).clamp(-1.0, 1.0))
}

/// Shared backstepping quantities evaluated once per control step.
struct Backstep {
    e: Vec6,
    v_d: Vec6,
    v_d_rate: Vec6,
    z: Vec6,
    model: ModelEstimate,
}

fn backstep(view: &NeighborhoodView, est: &EstimatorState, gains: &ControlGains) -> Result<Backstep> {
    let v = view.state.nu;
    let v_d = virtual_velocity(view, &gains.k1)?;
    Ok(Backstep {
        e: consensus_error(view),
        v_d,
        v_d_rate: virtual_velocity_rate(view, &gains.k1)?,
        z: auxiliary_z(&v, &v_d),
        model: matrices_from_theta(&est.theta_hat, &v, gains.input_gain_floor),
    })
}

fn torque(view: &NeighborhoodView, bs: &Backstep, k2: &Vec6, feedback: &Vec6) -> ControlOutput {
    let v = view.state.nu;
    let m = &bs.model;
    let rhs = bs.v_d_rate + m.c_bar * v + m.d_bar * v + m.g_bar - k2.component_mul(feedback);
    let tau = Vec6::from_fn(|k, _| rhs[k] / m.b_bar[(k, k)]);
    ControlOutput {
        tau,
        e: bs.e,
        z: bs.z,
        v_d: bs.v_d,
        v_d_rate: bs.v_d_rate,
        regularized: m.regularized,
    }
}

pub fn blc_control(
    view: &NeighborhoodView,
    est: &EstimatorState,
    neuro: &NeuroState,
    gains: &ControlGains,
) -> Result<ControlOutput> {
    let bs = backstep(view, est, gains)?;
    Ok(torque(view, &bs, &gains.k2, &neuro.activity))
}

pub fn lc_control(view: &NeighborhoodView, est: &EstimatorState, gains: &ControlGains) -> Result<ControlOutput> {
    let bs = backstep(view, est, gains)?;
    let z = bs.z;
    Ok(torque(view, &bs, &gains.k2, &z))
}

pub fn lsmc_control(view: &NeighborhoodView, est: &EstimatorState, gains: &ControlGains) -> Result<ControlOutput> {
    let bs = backstep(view, est, gains)?;
    let s = boundary_layer_saturation(&bs.z, gains.sat_layer);
    Ok(torque(view, &bs, &gains.k2, &s))
}

pub fn compute_control(
    law: ControlLaw,
    view: &NeighborhoodView,
    est: &EstimatorState,
    neuro: &NeuroState,
    gains: &ControlGains,
) -> Result<ControlOutput> {
    match law {
        ControlLaw::Blc => blc_control(view, est, neuro, gains),
        ControlLaw::Lc => lc_control(view, est, gains),
        ControlLaw::Lsmc => lsmc_control(view, est, gains),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vessel::{regression_times, theta_from_physical, PhysicalParams};

    fn gains() -> ControlGains {
        ControlGains {
            k1: Vec6::new(15.0, 15.0, 15.0, 5.0, 5.0, 5.0),
            k2: Vec6::new(1.0, 1.0, 1.0, 0.5, 0.5, 0.5),
            shunting: ShuntingParams::new(10.0, 50.0, 50.0).unwrap(),
            sat_layer: 1.0,
            input_gain_floor: DEFAULT_INPUT_GAIN_FLOOR,
        }
    }

    fn lone_view(eta: Vec6, reference: ReferenceSample) -> NeighborhoodView {
        NeighborhoodView {
            state: VesselState::at_rest(eta),
            eta_rate: Vec6::zeros(),
            neighbors: vec![],
            reference_weight: 1.0,
            reference,
        }
    }

    fn e1() -> Vec6 {
        Vec6::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    }

    fn true_estimator() -> EstimatorState {
        EstimatorState {
            v_hat: Vec6::zeros(),
            theta_hat: theta_from_physical(&PhysicalParams::benchmark_auv()).unwrap(),
        }
    }

    #[test]
    fn consensus_error_examples() {
        let on_track = lone_view(Vec6::repeat(2.0), ReferenceSample { eta: Vec6::repeat(2.0), ..Default::default() });
        assert_eq!(consensus_error(&on_track), Vec6::zeros());

        let off = lone_view(e1(), ReferenceSample::default());
        assert_eq!(consensus_error(&off), e1());

        let mut cancel = lone_view(Vec6::zeros(), ReferenceSample::default());
        cancel.reference_weight = 0.0;
        let half = Vec6::new(0.5, 0.0, 0.0, 0.0, 0.0, 0.0);
        cancel.neighbors = vec![
            NeighborInfo { index: 1, weight: 1.0, eta: -half, eta_rate: Vec6::zeros(), offset: Vec6::zeros() },
            NeighborInfo { index: 2, weight: 1.0, eta: half, eta_rate: Vec6::zeros(), offset: Vec6::zeros() },
        ];
        assert_eq!(consensus_error(&cancel), Vec6::zeros());
    }

    #[test]
    fn consensus_error_rate_examples() {
        let rate = Vec6::new(30.0, 5.0, 2.0, 0.0, 0.0, 0.0);
        let v = lone_view(Vec6::zeros(), ReferenceSample { rate, ..Default::default() });
        assert_eq!(consensus_error_rate(&v), -rate);

        let mut matched = v.clone();
        matched.eta_rate = rate;
        assert_eq!(consensus_error_rate(&matched), Vec6::zeros());

        let mut peers = v.clone();
        peers.reference_weight = 0.0;
        peers.eta_rate = rate;
        peers.neighbors = vec![NeighborInfo {
            index: 1,
            weight: 2.0,
            eta: Vec6::zeros(),
            eta_rate: rate,
            offset: Vec6::zeros(),
        }];
        assert_eq!(consensus_error_rate(&peers), Vec6::zeros());
    }

    #[test]
    fn virtual_velocity_examples() {
        let rate = Vec6::new(30.0, 5.0, 2.0, 0.0, 0.0, 0.0);
        let v = lone_view(Vec6::zeros(), ReferenceSample { rate, ..Default::default() });
        assert_eq!(virtual_velocity(&v, &gains().k1).unwrap(), rate);

        let v = lone_view(e1(), ReferenceSample::default());
        assert_eq!(virtual_velocity(&v, &gains().k1).unwrap(), -15.0 * e1());

        let att = Vec6::new(1.0, 0.0, 0.0, 0.2, -0.1, 0.7);
        let v = lone_view(att, ReferenceSample { rate, ..Default::default() });
        let j_inv = transform_jacobian_inverse(&v.state.attitude()).unwrap();
        assert!((virtual_velocity(&v, &Vec6::zeros()).unwrap() - j_inv * rate).norm() < 1e-14);
    }

    #[test]
    fn virtual_velocity_rate_on_static_reference_is_zero() {
        let v = lone_view(Vec6::repeat(0.1), ReferenceSample { eta: Vec6::repeat(0.1), ..Default::default() });
        assert_eq!(virtual_velocity_rate(&v, &gains().k1).unwrap(), Vec6::zeros());
    }

    #[test]
    fn virtual_velocity_rate_follows_reference_acceleration() {
        // Vessel already moving with the reference at t = 0 of the exp-ramp path.
        let rate = Vec6::new(30.0, 5.0, 2.0, 0.0, 0.0, 0.0);
        let accel = Vec6::new(-30.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        let mut v = lone_view(Vec6::zeros(), ReferenceSample { eta: Vec6::zeros(), rate, accel });
        v.state.nu = rate;
        v.eta_rate = rate;
        let vd_rate = virtual_velocity_rate(&v, &gains().k1).unwrap();
        assert!((vd_rate - accel).norm() < 1e-12);
    }

    #[test]
    fn auxiliary_z_is_antisymmetric() {
        let a = Vec6::new(1.0, 1.0, 1.0, 0.0, 0.0, 0.0);
        assert_eq!(auxiliary_z(&a, &a), Vec6::zeros());
        assert_eq!(auxiliary_z(&a, &Vec6::zeros()), a);
        let b = Vec6::new(0.3, -2.0, 0.0, 1.0, 0.5, -0.25);
        assert_eq!(auxiliary_z(&a, &b), -auxiliary_z(&b, &a));
    }

    #[test]
    fn model_from_true_theta() {
        let theta = theta_from_physical(&PhysicalParams::benchmark_auv()).unwrap();
        let m = matrices_from_theta(&theta, &Vec6::zeros(), DEFAULT_INPUT_GAIN_FLOOR);
        let expected = [33.0, 31.0, 33.0, 50.0, 55.0, 60.0];
        for (k, inertia) in expected.iter().enumerate() {
            assert!((m.b_bar[(k, k)] - 1.0 / inertia).abs() < 1e-15);
        }
        assert!(!m.regularized);
        assert_eq!(m.g_bar, Vec6::zeros());
    }

    #[test]
    fn no_cross_terms_means_no_coriolis() {
        let mut theta = theta_from_physical(&PhysicalParams::benchmark_auv()).unwrap();
        for dof in 0..6 {
            theta.0[4 * dof] = 0.0;
            theta.0[4 * dof + 1] = 0.0;
        }
        let m = matrices_from_theta(&theta, &Vec6::repeat(3.0), DEFAULT_INPUT_GAIN_FLOOR);
        assert_eq!(m.c_bar, Matrix6::zeros());
    }

    #[test]
    fn zero_estimate_is_regularized() {
        let m = matrices_from_theta(&ThetaVector::zeros(), &Vec6::zeros(), 1e-4);
        assert!(m.regularized);
        assert_eq!(m.b_bar, Matrix6::from_diagonal(&Vec6::repeat(1e-4)));
        let mut theta = ThetaVector::zeros();
        for k in 0..6 {
            theta.0[4 * k + 3] = -1e-6;
        }
        let m = matrices_from_theta(&theta, &Vec6::zeros(), 1e-4);
        assert_eq!(m.b_bar, Matrix6::from_diagonal(&Vec6::repeat(-1e-4)));
    }

    #[test]
    fn model_identity_holds_for_random_inputs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let mut theta = ThetaVector::zeros();
            for x in theta.0.iter_mut() {
                *x = rng.random_range(-2.0..2.0);
            }
            for k in 0..6 {
                theta.0[4 * k + 3] = rng.random_range(0.01..1.0);
            }
            let v = Vec6::from_fn(|_, _| rng.random_range(-5.0..5.0));
            let tau = Vec6::from_fn(|_, _| rng.random_range(-5.0..5.0));
            let m = matrices_from_theta(&theta, &v, DEFAULT_INPUT_GAIN_FLOOR);
            let lhs = regression_times(&v, &tau, &theta);
            let rhs = -m.c_bar * v - m.d_bar * v - m.g_bar + m.b_bar * tau;
            assert!((lhs - rhs).amax() < 1e-12);
        }
    }

    #[test]
    fn blc_examples() {
        let est = true_estimator();
        let view = lone_view(Vec6::zeros(), ReferenceSample::default());
        let tau = blc_control(&view, &est, &NeuroState::rest(), &gains()).unwrap().tau;
        assert_eq!(tau, Vec6::zeros());

        let neuro = NeuroState { activity: e1() };
        let tau = blc_control(&view, &est, &neuro, &gains()).unwrap().tau;
        assert!((tau[0] + 33.0).abs() < 1e-12);
        assert!(tau.rows(1, 5).iter().all(|x| *x == 0.0));

        let mut doubled = gains();
        doubled.k2 *= 2.0;
        let tau2 = blc_control(&view, &est, &neuro, &doubled).unwrap().tau;
        assert!((tau2 - 2.0 * tau).norm() < 1e-12);
    }

    #[test]
    fn lc_feedback_term() {
        let est = true_estimator();
        let mut g = gains();
        g.k2 = Vec6::new(10.0, 10.0, 10.0, 5.0, 5.0, 5.0);
        let at_rest = lone_view(Vec6::zeros(), ReferenceSample::default());
        assert_eq!(lc_control(&at_rest, &est, &g).unwrap().tau, Vec6::zeros());

        let mut moving = at_rest.clone();
        moving.state.nu = Vec6::new(0.1, 0.0, 0.0, 0.0, 0.0, 0.0);
        moving.eta_rate = moving.state.nu;
        let with_feedback = lc_control(&moving, &est, &g).unwrap().tau;
        let mut no_fb = g;
        no_fb.k2 = Vec6::repeat(1e-300);
        let without = lc_control(&moving, &est, &no_fb).unwrap().tau;
        assert!((with_feedback[0] - without[0] + 33.0).abs() < 1e-9);
    }

    #[test]
    fn saturation_regions() {
        let z = Vec6::new(5.0, 0.3, -0.3, -7.0, 0.0, 1.0);
        let s = boundary_layer_saturation(&z, 1.0);
        assert_eq!(s, Vec6::new(1.0, 0.3, -0.3, -1.0, 0.0, 1.0));
        let s = boundary_layer_saturation(&z, 0.5);
        assert_eq!(s[1], 0.6);
        assert_eq!(boundary_layer_saturation(&Vec6::zeros(), 1.0), Vec6::zeros());
    }

    #[test]
    fn laws_agree_when_feedback_signals_coincide() {
        let est = true_estimator();
        let mut view = lone_view(
            Vec6::new(0.3, -0.2, 0.1, 0.05, 0.02, 0.1),
            ReferenceSample {
                eta: Vec6::zeros(),
                rate: Vec6::new(1.0, 0.5, 0.0, 0.0, 0.0, 0.0),
                accel: Vec6::zeros(),
            },
        );
        view.state.nu = Vec6::new(0.1, 0.0, -0.05, 0.0, 0.01, 0.0);
        let g = gains();
        let lc = lc_control(&view, &est, &g).unwrap();
        let blc = blc_control(&view, &est, &NeuroState { activity: lc.z }, &g).unwrap();
        assert_eq!(lc.tau, blc.tau);
        let lsmc = lsmc_control(&view, &est, &g).unwrap();
        let expected = blc_control(
            &view,
            &est,
            &NeuroState { activity: boundary_layer_saturation(&lc.z, 1.0) },
            &g,
        )
        .unwrap();
        assert_eq!(lsmc.tau, expected.tau);
    }
}
