//! Classical fixed-step fourth-order Runge-Kutta.

use nalgebra::SVector;

/// A state that can be advanced along a rate and whose rates can be blended.
pub trait OdeState: Clone {
    type Rate;

    /// `self + h * rate`
    fn advanced(&self, h: f64, rate: &Self::Rate) -> Self;

    /// `(k1 + 2 k2 + 2 k3 + k4) / 6`
    fn rk4_blend(k1: &Self::Rate, k2: &Self::Rate, k3: &Self::Rate, k4: &Self::Rate) -> Self::Rate;
}

impl OdeState for f64 {
    type Rate = f64;

    fn advanced(&self, h: f64, rate: &f64) -> f64 {
        self + h * rate
    }

    fn rk4_blend(k1: &f64, k2: &f64, k3: &f64, k4: &f64) -> f64 {
        (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
    }
}

impl<const N: usize> OdeState for SVector<f64, N> {
    type Rate = SVector<f64, N>;

    fn advanced(&self, h: f64, rate: &Self::Rate) -> Self {
        self + rate * h
    }

    fn rk4_blend(k1: &Self::Rate, k2: &Self::Rate, k3: &Self::Rate, k4: &Self::Rate) -> Self::Rate {
        (k1 + k2 * 2.0 + k3 * 2.0 + k4) / 6.0
    }
}

impl OdeState for Vec<f64> {
    type Rate = Vec<f64>;

    fn advanced(&self, h: f64, rate: &Vec<f64>) -> Vec<f64> {
        self.iter().zip(rate).map(|(x, r)| x + h * r).collect()
    }

    fn rk4_blend(k1: &Vec<f64>, k2: &Vec<f64>, k3: &Vec<f64>, k4: &Vec<f64>) -> Vec<f64> {
        (0..k1.len())
            .map(|i| (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0)
            .collect()
    }
}

/// One RK4 step of `x' = f(t, x)`. The first error returned by `f` aborts the step.
pub fn rk4_step<S, E, F>(x: &S, t: f64, dt: f64, mut f: F) -> Result<S, E>
where
    S: OdeState,
    F: FnMut(f64, &S) -> Result<S::Rate, E>,
{
    let half = 0.5 * dt;
    let k1 = f(t, x)?;
    let k2 = f(t + half, &x.advanced(half, &k1))?;
    let k3 = f(t + half, &x.advanced(half, &k2))?;
    let k4 = f(t + dt, &x.advanced(dt, &k3))?;
    Ok(x.advanced(dt, &S::rk4_blend(&k1, &k2, &k3, &k4)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    fn decay(x0: f64, dt: f64, steps: usize) -> f64 {
        let mut x = x0;
        for k in 0..steps {
            x = rk4_step(&x, k as f64 * dt, dt, |_, x| Ok::<_, Infallible>(-x)).unwrap();
        }
        x
    }

    #[test]
    fn exponential_decay_to_one_second() {
        let h = 0.1f64;
        let x = decay(1.0, h, 10);
        // RK4 on a linear ODE applies the degree-4 Taylor polynomial of exp(-h).
        let amplification = 1.0 - h + h * h / 2.0 - h.powi(3) / 6.0 + h.powi(4) / 24.0;
        assert!((x - amplification.powi(10)).abs() < 1e-15);
        assert!((x - (-1.0f64).exp()).abs() < 5e-7);
    }

    #[test]
    fn zero_rate_leaves_state_unchanged() {
        let x = vec![1.0, -2.0, 3.5];
        let y = rk4_step(&x, 0.0, 0.25, |_, x: &Vec<f64>| Ok::<_, Infallible>(vec![0.0; x.len()])).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn fourth_order_convergence() {
        let exact = (-1.0f64).exp();
        let errs: Vec<f64> = [10usize, 20, 40, 80]
            .iter()
            .map(|n| (decay(1.0, 1.0 / *n as f64, *n) - exact).abs())
            .collect();
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((14.0..=18.0).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn time_dependent_rate_is_integrated_exactly_for_cubics() {
        // x' = 3 t^2 has x(t) = t^3, which RK4 reproduces to rounding.
        let mut x = 0.0;
        let dt = 0.1;
        for k in 0..10 {
            x = rk4_step(&x, k as f64 * dt, dt, |t, _| Ok::<_, Infallible>(3.0 * t * t)).unwrap();
        }
        assert!((x - 1.0).abs() < 1e-12);
    }

    #[test]
    fn errors_abort_the_step() {
        let r: Result<f64, &str> = rk4_step(&1.0, 0.0, 0.1, |t, _| if t > 0.0 { Err("boom") } else { Ok(1.0) });
        assert_eq!(r, Err("boom"));
    }
}
