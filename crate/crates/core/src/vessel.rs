//! 6-DOF vessel plant.
//!
//! Kinematics `eta_dot = J(eta2) nu` with a ZYX Euler attitude, and dynamics
//! in linear-in-parameters form `nu_dot = Psi(nu, tau) theta + d_tilde`.
//!
//! The true parameter vector is derived from a diagonal inertia model
//! (rigid body plus added mass), linear damping, the Coriolis matrix induced
//! by the diagonal inertia, and no restoring forces. Each DOF owns four
//! consecutive entries of `theta`: two Coriolis cross-term coefficients, the
//! damping coefficient and the input coefficient (inverse effective inertia).

use nalgebra::{Matrix3, Matrix6, SMatrix, SVector, Vector3, Vector6};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec6 = Vector6<f64>;
pub type Regressor = SMatrix<f64, 6, 24>;

/// Pitch may not come closer than this to +/-pi/2.
pub const PITCH_GUARD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VesselState {
    /// Earth-fixed position (m) and ZYX Euler angles (rad).
    pub eta: Vec6,
    /// Body-fixed linear (m/s) and angular (rad/s) velocity.
    pub nu: Vec6,
}

impl VesselState {
    pub fn new(eta: Vec6, nu: Vec6) -> Self {
        Self { eta, nu }
    }

    pub fn at_rest(eta: Vec6) -> Self {
        Self { eta, nu: Vec6::zeros() }
    }

    pub fn attitude(&self) -> Vector3<f64> {
        self.eta.fixed_rows::<3>(3).into_owned()
    }

    pub fn is_finite(&self) -> bool {
        self.eta.iter().chain(self.nu.iter()).all(|x| x.is_finite())
    }
}

/// Physical parameters in SI units. Added-mass terms follow the negative
/// sign convention, so effective inertia is `m - added` for each axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalParams {
    pub mass: f64,
    /// `[I_x, I_y, I_z]`
    pub inertia: [f64; 3],
    /// Linear damping `[beta_vx, beta_vy, beta_vz, beta_wx, beta_wy, beta_wz]`.
    pub damping: [f64; 6],
    /// Added mass / inertia `[beta_vdot_x, .., beta_wdot_z]`.
    pub added_mass: [f64; 6],
}

impl PhysicalParams {
    /// The four-vessel benchmark AUV.
    pub fn benchmark_auv() -> Self {
        Self {
            mass: 25.0,
            inertia: [25.0, 20.0, 30.0],
            damping: [-10.0, -8.0, -12.0, -0.35, -0.2, -0.25],
            added_mass: [-8.0, -6.0, -8.0, -25.0, -35.0, -30.0],
        }
    }

    /// Diagonal of the inertia matrix `M`.
    pub fn effective_inertia(&self) -> Vec6 {
        let rigid = [
            self.mass,
            self.mass,
            self.mass,
            self.inertia[0],
            self.inertia[1],
            self.inertia[2],
        ];
        Vec6::from_fn(|k, _| rigid[k] - self.added_mass[k])
    }

    pub fn validate(&self) -> Result<()> {
        let all = std::iter::once(self.mass)
            .chain(self.inertia)
            .chain(self.damping)
            .chain(self.added_mass);
        if all.clone().any(|x| !x.is_finite()) {
            return Err(Error::PhysicalParams("non-finite entry".into()));
        }
        if self.mass <= 0.0 {
            return Err(Error::PhysicalParams(format!("mass {} must be > 0", self.mass)));
        }
        if let Some(i) = self.inertia.iter().position(|x| *x <= 0.0) {
            return Err(Error::PhysicalParams(format!("inertia[{i}] must be > 0")));
        }
        if let Some(k) = self.effective_inertia().iter().position(|x| *x <= 0.0) {
            return Err(Error::PhysicalParams(format!(
                "effective inertia of DOF {k} is non-positive"
            )));
        }
        Ok(())
    }

    pub fn mass_matrix(&self) -> Matrix6<f64> {
        Matrix6::from_diagonal(&self.effective_inertia())
    }

    /// `D = -diag(beta)`; with negative `beta` this is dissipative.
    pub fn damping_matrix(&self) -> Matrix6<f64> {
        -Matrix6::from_diagonal(&Vec6::from_column_slice(&self.damping))
    }
}

/// The 24-entry dynamic parameter vector, true or estimated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaVector(pub SVector<f64, 24>);

impl ThetaVector {
    pub fn zeros() -> Self {
        Self(SVector::zeros())
    }

    pub fn as_vector(&self) -> &SVector<f64, 24> {
        &self.0
    }

    pub fn cross_terms(&self, dof: usize) -> (f64, f64) {
        (self.0[4 * dof], self.0[4 * dof + 1])
    }

    pub fn damping(&self, dof: usize) -> f64 {
        self.0[4 * dof + 2]
    }

    pub fn input_gain(&self, dof: usize) -> f64 {
        self.0[4 * dof + 3]
    }

    pub fn input_gains(&self) -> Vec6 {
        Vec6::from_fn(|k, _| self.input_gain(k))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

pub fn ensure_no_singularity(attitude: &Vector3<f64>) -> Result<()> {
    let pitch = attitude[1];
    if !pitch.is_finite() || pitch.abs() >= std::f64::consts::FRAC_PI_2 - PITCH_GUARD {
        return Err(Error::Singularity {
            pitch,
            guard: PITCH_GUARD,
        });
    }
    Ok(())
}

/// ZYX rotation body -> Earth, `R = Rz(psi) Ry(theta) Rx(phi)`.
pub fn rotation(attitude: &Vector3<f64>) -> Matrix3<f64> {
    let (sphi, cphi) = attitude[0].sin_cos();
    let (sth, cth) = attitude[1].sin_cos();
    let (spsi, cpsi) = attitude[2].sin_cos();
    Matrix3::new(
        cpsi * cth,
        -spsi * cphi + cpsi * sth * sphi,
        spsi * sphi + cpsi * cphi * sth,
        spsi * cth,
        cpsi * cphi + sphi * sth * spsi,
        -cpsi * sphi + sth * spsi * cphi,
        -sth,
        cth * sphi,
        cth * cphi,
    )
}

/// Maps body angular rates to Euler angle rates.
fn euler_rate_matrix(attitude: &Vector3<f64>) -> Matrix3<f64> {
    let (sphi, cphi) = attitude[0].sin_cos();
    let (sth, cth) = attitude[1].sin_cos();
    let tth = sth / cth;
    Matrix3::new(
        1.0,
        sphi * tth,
        cphi * tth,
        0.0,
        cphi,
        -sphi,
        0.0,
        sphi / cth,
        cphi / cth,
    )
}

fn euler_rate_matrix_inverse(attitude: &Vector3<f64>) -> Matrix3<f64> {
    let (sphi, cphi) = attitude[0].sin_cos();
    let (sth, cth) = attitude[1].sin_cos();
    Matrix3::new(1.0, 0.0, -sth, 0.0, cphi, cth * sphi, 0.0, -sphi, cth * cphi)
}

fn skew(w: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -w[2], w[1], w[2], 0.0, -w[0], -w[1], w[0], 0.0)
}

fn block_diag(a: &Matrix3<f64>, b: &Matrix3<f64>) -> Matrix6<f64> {
    let mut j = Matrix6::zeros();
    j.fixed_view_mut::<3, 3>(0, 0).copy_from(a);
    j.fixed_view_mut::<3, 3>(3, 3).copy_from(b);
    j
}

/// `J(eta2) = blkdiag(R, T)`.
pub fn transform_jacobian(attitude: &Vector3<f64>) -> Result<Matrix6<f64>> {
    ensure_no_singularity(attitude)?;
    Ok(block_diag(&rotation(attitude), &euler_rate_matrix(attitude)))
}

/// Closed-form `J^-1 = blkdiag(R^T, T^-1)`.
pub fn transform_jacobian_inverse(attitude: &Vector3<f64>) -> Result<Matrix6<f64>> {
    ensure_no_singularity(attitude)?;
    Ok(block_diag(
        &rotation(attitude).transpose(),
        &euler_rate_matrix_inverse(attitude),
    ))
}

/// `dJ/dt` along the Euler-angle rate `attitude_rate`.
pub fn transform_jacobian_rate(attitude: &Vector3<f64>, attitude_rate: &Vector3<f64>) -> Result<Matrix6<f64>> {
    ensure_no_singularity(attitude)?;
    // R_dot = R S(omega) with omega the body rate producing attitude_rate.
    let r = rotation(attitude);
    let omega = euler_rate_matrix_inverse(attitude) * attitude_rate;
    let r_dot = r * skew(&omega);

    let (sphi, cphi) = attitude[0].sin_cos();
    let (sth, cth) = attitude[1].sin_cos();
    let tth = sth / cth;
    let sec2 = 1.0 / (cth * cth);
    let d_phi = Matrix3::new(
        0.0,
        cphi * tth,
        -sphi * tth,
        0.0,
        -sphi,
        -cphi,
        0.0,
        cphi / cth,
        -sphi / cth,
    );
    let d_theta = Matrix3::new(
        0.0,
        sphi * sec2,
        cphi * sec2,
        0.0,
        0.0,
        0.0,
        0.0,
        sphi * sth * sec2,
        cphi * sth * sec2,
    );
    let t_dot = d_phi * attitude_rate[0] + d_theta * attitude_rate[1];
    Ok(block_diag(&r_dot, &t_dot))
}

/// `eta_dot = J(eta2) nu`.
pub fn kinematics_rate(state: &VesselState) -> Result<Vec6> {
    Ok(transform_jacobian(&state.attitude())? * state.nu)
}

/// True parameter vector for the diagonal-inertia model.
pub fn theta_from_physical(p: &PhysicalParams) -> Result<ThetaVector> {
    p.validate()?;
    let m = p.effective_inertia();
    let beta = p.damping;
    let (m1, m2, m3, i1, i2, i3) = (m[0], m[1], m[2], m[3], m[4], m[5]);
    #[rustfmt::skip]
    let theta = [
        // surge: (w q, v r, u, tau1)
        -m3 / m1, m2 / m1, beta[0] / m1, 1.0 / m1,
        // sway: (w p, u r, v, tau2)
        m3 / m2, -m1 / m2, beta[1] / m2, 1.0 / m2,
        // heave: (v p, u q, w, tau3)
        -m2 / m3, m1 / m3, beta[2] / m3, 1.0 / m3,
        // roll: (v w, q r, p, tau4)
        (m2 - m3) / i1, (i2 - i3) / i1, beta[3] / i1, 1.0 / i1,
        // pitch: (u w, p r, q, tau5)
        (m3 - m1) / i2, (i3 - i1) / i2, beta[4] / i2, 1.0 / i2,
        // yaw: (u v, p q, r, tau6)
        (m1 - m2) / i3, (i1 - i2) / i3, beta[5] / i3, 1.0 / i3,
    ];
    Ok(ThetaVector(SVector::from_column_slice(&theta)))
}

/// The four regressors of each DOF row, in `theta` order.
pub(crate) fn row_regressors(nu: &Vec6, tau: &Vec6) -> [[f64; 4]; 6] {
    let (vx, vy, vz, wx, wy, wz) = (nu[0], nu[1], nu[2], nu[3], nu[4], nu[5]);
    [
        [vz * wy, vy * wz, vx, tau[0]],
        [vz * wx, vx * wz, vy, tau[1]],
        [vy * wx, vx * wy, vz, tau[2]],
        [vy * vz, wy * wz, wx, tau[3]],
        [vx * vz, wx * wz, wy, tau[4]],
        [vx * vy, wx * wy, wz, tau[5]],
    ]
}

/// Block-sparse regression matrix `Psi(nu, tau)`.
pub fn regression(state: &VesselState, tau: &Vec6) -> Regressor {
    regression_from_velocity(&state.nu, tau)
}

pub fn regression_from_velocity(nu: &Vec6, tau: &Vec6) -> Regressor {
    let mut psi = Regressor::zeros();
    for (row, regs) in row_regressors(nu, tau).iter().enumerate() {
        for (k, r) in regs.iter().enumerate() {
            psi[(row, 4 * row + k)] = *r;
        }
    }
    psi
}

/// `Psi(nu, tau) theta` without materializing the 6x24 matrix.
pub fn regression_times(nu: &Vec6, tau: &Vec6, theta: &ThetaVector) -> Vec6 {
    let regs = row_regressors(nu, tau);
    Vec6::from_fn(|row, _| (0..4).map(|k| regs[row][k] * theta.0[4 * row + k]).sum())
}

/// `nu_dot = Psi(nu, tau) theta_true + d_tilde`.
pub fn plant_acceleration(state: &VesselState, tau: &Vec6, theta_true: &ThetaVector, d_tilde: &Vec6) -> Vec6 {
    regression_times(&state.nu, tau, theta_true) + d_tilde
}
