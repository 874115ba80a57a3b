//! Distributed consensus formation tracking for fleets of 6-DOF underwater
//! vessels.
//!
//! Each vessel learns its own dynamic parameters online and runs a
//! backstepping controller that reads only its graph neighbors. The robust
//! term is either a shunting neural-dynamics filter (BLC) or one of two
//! baselines: linear feedback (LC) and boundary-layer sliding mode (LSMC).
//!
//! ```no_run
//! use auv_formation::{scenario, sim, metrics};
//!
//! let cfg = scenario::builtin_scenario("scenario1-blc").unwrap();
//! let trace = sim::run_scenario(&cfg).unwrap();
//! let m = metrics::compute_metrics(&trace, metrics::DEFAULT_SETTLE_THRESHOLD).unwrap();
//! println!("{}: {:?}", trace.verdict(), m.vessels[0].settle_time);
//! ```

pub mod control;
pub mod error;
pub mod estimator;
pub mod graph;
pub mod integrator;
pub mod metrics;
pub mod neuro;
pub mod scenario;
pub mod sim;
pub mod trace;
pub mod vessel;

pub use error::{Error, Result};
