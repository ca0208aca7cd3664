//! Wind-aware path following for small fixed-wing vehicles.
//!
//! Small aircraft routinely meet winds comparable to, or exceeding, their
//! airspeed. Classic look-ahead guidance assumes the commanded ground
//! course is always achievable and misbehaves in exactly those conditions:
//! the vehicle gets blown away from its path while commanding full effort
//! toward an unreachable bearing. This crate centers the guidance law on a
//! continuous bearing feasibility weight that measures how achievable a
//! ground course is for the current wind ratio, and uses it to
//!
//! * blend the air-relative look-ahead between the wind-triangle solution
//!   and the best-achievable heading, so commands stay smooth as gusts
//!   cross the wind-equals-airspeed boundary,
//! * drive excess-wind airspeed increments that hold position, regain
//!   track, or maintain a minimum ground speed when power margin allows.
//!
//! [`guidance_step`] is the pure per-sample entry point. [`windsim`]
//! closes the loop around a kinematic vehicle model for repeatable
//! experiments, and the remaining modules expose the individual pieces
//! (feasibility weight, path projection, airspeed scheduling) for direct
//! use and analysis.

pub mod airspeed;
pub mod error;
pub mod feasibility;
pub mod geom;
pub mod guidance;
pub mod path;
pub mod windsim;

pub use airspeed::{AirspeedConfig, AirspeedMode};
pub use error::{ConfigError, SimError};
pub use feasibility::{feas, feas_legacy, FeasibilityParams};
pub use geom::{Angle, Vec2};
pub use guidance::{
    guidance_step, GuidanceConfig, GuidanceOutput, Telemetry, VehicleState,
};
pub use path::{PathRef, PathProjection, TurnDir};
pub use windsim::{
    run, InitialState, LogRow, Scenario, SimConfig, SimLog, WindField,
};
