//! Online parameter learning: a velocity observer driven by the current
//! parameter estimate, and a gradient adaptation law driven by the
//! observation error.

use nalgebra::SVector;

use crate::error::{Error, Result};
use crate::vessel::{Regressor, ThetaVector, Vec6};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorState {
    pub v_hat: Vec6,
    pub theta_hat: ThetaVector,
}

impl EstimatorState {
    /// No-prior start: zero parameters, observer seeded with the first measurement.
    pub fn initial(v_measured: Vec6) -> Self {
        Self {
            v_hat: v_measured,
            theta_hat: ThetaVector::zeros(),
        }
    }

    /// Zero parameters except every input gain, which starts at `gain`.
    /// A rough `1 / mass` guess keeps the first control steps moderate.
    pub fn with_input_gain_prior(v_measured: Vec6, gain: f64) -> Self {
        let mut s = Self::initial(v_measured);
        for dof in 0..6 {
            s.theta_hat.0[4 * dof + 3] = gain;
        }
        s
    }

    pub fn is_finite(&self) -> bool {
        self.v_hat.iter().all(|x| x.is_finite()) && self.theta_hat.is_finite()
    }
}

/// Positive diagonal observer gain `L` and adaptation gain `P`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorGains {
    pub observer: Vec6,
    pub adaptation: Vec6,
}

impl EstimatorGains {
    pub fn new(observer: Vec6, adaptation: Vec6) -> Result<Self> {
        let ok = |v: &Vec6| v.iter().all(|x| x.is_finite() && *x > 0.0);
        if !ok(&observer) {
            return Err(Error::Gains("observer gain L must be positive diagonal".into()));
        }
        if !ok(&adaptation) {
            return Err(Error::Gains("adaptation gain P must be positive diagonal".into()));
        }
        Ok(Self { observer, adaptation })
    }

    pub fn uniform(observer: f64, adaptation: f64) -> Result<Self> {
        Self::new(Vec6::repeat(observer), Vec6::repeat(adaptation))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorRates {
    pub v_hat_dot: Vec6,
    pub theta_dot: SVector<f64, 24>,
}

/// `v_hat_dot = Psi theta_hat - L (v_hat - v)`, `theta_dot = -Psi^T P (v_hat - v)`.
pub fn estimator_rates(
    s: &EstimatorState,
    v_measured: &Vec6,
    psi: &Regressor,
    gains: &EstimatorGains,
) -> EstimatorRates {
    let obs_error = s.v_hat - v_measured;
    EstimatorRates {
        v_hat_dot: psi * s.theta_hat.0 - gains.observer.component_mul(&obs_error),
        theta_dot: -(psi.transpose() * gains.adaptation.component_mul(&obs_error)),
    }
}

/// `(||v_hat - v||, ||theta_hat - theta_true||)`.
pub fn estimation_diagnostics(s: &EstimatorState, v_measured: &Vec6, theta_true: &ThetaVector) -> (f64, f64) {
    (
        (s.v_hat - v_measured).norm(),
        (s.theta_hat.0 - theta_true.0).norm(),
    )
}

/// `V1 = 1/2 v_tilde^T P v_tilde + 1/2 |theta_tilde|^2`.
pub fn lyapunov_value(
    s: &EstimatorState,
    v_true: &Vec6,
    theta_true: &ThetaVector,
    gains: &EstimatorGains,
) -> f64 {
    let v_tilde = s.v_hat - v_true;
    let theta_tilde = s.theta_hat.0 - theta_true.0;
    0.5 * v_tilde.dot(&gains.adaptation.component_mul(&v_tilde)) + 0.5 * theta_tilde.norm_squared()
}
