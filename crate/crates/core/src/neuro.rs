//! Shunting neural dynamics used as a bounded, smooth filter on the
//! auxiliary tracking variable.
//!
//! Each channel follows `dv/dt = -(a + |z|) v + g(z)` with `g(z) = b z` for
//! `z >= 0` and `d z` otherwise, which keeps the activity inside `[-d, b]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vessel::Vec6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShuntingParams {
    /// Passive decay rate (1/s).
    pub a: f64,
    /// Upper activity bound.
    pub b: f64,
    /// Magnitude of the lower activity bound.
    pub d: f64,
}

impl ShuntingParams {
    pub fn new(a: f64, b: f64, d: f64) -> Result<Self> {
        let p = Self { a, b, d };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, x) in [("a", self.a), ("b", self.b), ("d", self.d)] {
            if !(x.is_finite() && x > 0.0) {
                return Err(Error::Gains(format!("shunting {name} = {x} must be > 0")));
            }
        }
        Ok(())
    }
}

/// Neural activity of one vessel, one neuron per DOF.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NeuroState {
    pub activity: Vec6,
}

impl NeuroState {
    pub fn rest() -> Self {
        Self::default()
    }

    pub fn within_bounds(&self, p: &ShuntingParams, slack: f64) -> bool {
        self.activity
            .iter()
            .all(|x| *x >= -p.d - slack && *x <= p.b + slack)
    }
}

pub fn shunting_activation(z: &Vec6, p: &ShuntingParams) -> Vec6 {
    z.map(|zj| if zj >= 0.0 { p.b * zj } else { p.d * zj })
}

pub fn shunting_rate(state: &NeuroState, z: &Vec6, p: &ShuntingParams) -> Vec6 {
    let g = shunting_activation(z, p);
    Vec6::from_fn(|j, _| -(p.a + z[j].abs()) * state.activity[j] + g[j])
}

/// Steady activity for a constant input.
pub fn shunting_equilibrium(z: &Vec6, p: &ShuntingParams) -> Vec6 {
    let g = shunting_activation(z, p);
    Vec6::from_fn(|j, _| g[j] / (p.a + z[j].abs()))
}
