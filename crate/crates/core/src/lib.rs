//! Ring-road traffic with delayed car following.
//!
//! Vehicles on a circular track follow an exponential velocity-headway law,
//! optionally reacting to what they saw a fixed delay ago. The crate covers
//! single-lane integration, linear stability of the uniform flow through the
//! Lambert W function, a two-lane model where drivers change lanes when
//! frustrated, and the measurements taken on all of these (detector flow,
//! cycle amplitudes, lane imbalance). [`experiment::run_scenario`] ties them
//! to TOML configs and writes CSV results.
//!
//! See `examples/` for one runnable program per capability.

// `!(x > 0.0)` is deliberate: NaN has to fail parameter checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiment;
pub mod history;
pub mod lambert;
pub mod lane_change;
pub mod metrics;
pub mod model;
pub mod single_lane;
pub mod stability;
pub mod trajectory;

pub use config::{load_config, load_config_str, ConfigSources, ExperimentKind, ScenarioConfig};
pub use error::{Error, Result};
pub use experiment::{run_scenario, RunManifest};
pub use lambert::lambert_w;
pub use lane_change::{run_two_lane, LaneChangeParams, TwoLaneScenario};
pub use model::ModelParams;
pub use single_lane::{run_single_lane, SingleLaneScenario};
pub use trajectory::TrajectoryRecord;
