//! Independent oracles shared by the integration tests. Nothing here calls
//! into the regression code under test.

#![allow(dead_code)]

use nalgebra::{Matrix3, Matrix6, Vector3};

use auv_formation::vessel::{PhysicalParams, Vec6};

pub fn skew(a: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -a.z, a.y, a.z, 0.0, -a.x, -a.y, a.x, 0.0)
}

/// Diagonal rigid-body plus added-mass inertia.
pub fn mass_matrix(p: &PhysicalParams) -> Matrix6<f64> {
    let rigid = [p.mass, p.mass, p.mass, p.inertia[0], p.inertia[1], p.inertia[2]];
    Matrix6::from_diagonal(&Vec6::from_fn(|k, _| rigid[k] - p.added_mass[k]))
}

/// Skew-symmetric Coriolis/centripetal matrix for a diagonal inertia.
pub fn coriolis_matrix(p: &PhysicalParams, v: &Vec6) -> Matrix6<f64> {
    let m = mass_matrix(p);
    let lin: Vector3<f64> = m.fixed_view::<3, 3>(0, 0) * v.fixed_rows::<3>(0);
    let ang: Vector3<f64> = m.fixed_view::<3, 3>(3, 3) * v.fixed_rows::<3>(3);
    let mut c = Matrix6::zeros();
    c.fixed_view_mut::<3, 3>(0, 3).copy_from(&(-skew(&lin)));
    c.fixed_view_mut::<3, 3>(3, 0).copy_from(&(-skew(&lin)));
    c.fixed_view_mut::<3, 3>(3, 3).copy_from(&(-skew(&ang)));
    c
}

/// Linear damping with positive diagonal, so `M v' = tau - C v - D v`.
pub fn damping_matrix(p: &PhysicalParams) -> Matrix6<f64> {
    Matrix6::from_diagonal(&Vec6::from_fn(|k, _| -p.damping[k]))
}

/// `M^-1 (tau - C v - D v)`.
pub fn oracle_acceleration(p: &PhysicalParams, v: &Vec6, tau: &Vec6) -> Vec6 {
    let rhs = tau - coriolis_matrix(p, v) * v - damping_matrix(p) * v;
    mass_matrix(p).try_inverse().unwrap() * rhs
}

/// Two sinusoids per channel at distinct frequencies. High frequencies
/// keep velocities, and with them the weakly identifiable Coriolis
/// regressors, small while the input-gain directions are strongly excited.
pub fn exciting_input(t: f64) -> Vec6 {
    Vec6::from_fn(|k, _| {
        let w = 8.0 * (1.0 + 0.13 * k as f64);
        20.0 * ((w * t).sin() + 0.5 * (1.7 * w * t + k as f64).cos())
    })
}
