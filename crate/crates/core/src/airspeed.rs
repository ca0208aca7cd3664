//! Airspeed reference compensation for excess wind.
//!
//! Nominal airspeed is only raised when feasibility demands it. The
//! wind-excess term ramps the reference toward the wind speed as the
//! current bearing's feasibility weight drops; the track-keeping term adds
//! speed proportional to normalized track error so the vehicle can push
//! back to the path; the minimum-ground-speed variant shifts the whole
//! scheme by a required forward speed over ground. All increments are zero
//! deep inside the feasible cone, and the total is capped at
//! `v_a_max - v_a_nom`.

use crate::error::ConfigError;
use crate::feasibility::{feas_eval, FeasKind, FeasibilityParams};
use crate::geom::{sat, Vec2, EPS_VEC};

/// Which airspeed compensation scheme is active.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AirspeedMode {
    /// Reference pinned to `v_a_nom`.
    Disabled,
    /// Wind-excess regulation only (zero ground speed is acceptable).
    WindExcess,
    /// Wind-excess regulation plus track-error-driven increment.
    TrackKeeping,
    /// Wind-excess regulation shifted to maintain a forward ground speed,
    /// in m/s.
    MinGroundSpeed(f64),
}

impl AirspeedMode {
    /// Required forward ground speed; zero for every mode but
    /// `MinGroundSpeed`.
    #[inline]
    pub fn v_g_min(&self) -> f64 {
        match *self {
            AirspeedMode::MinGroundSpeed(v) => v,
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AirspeedConfig {
    /// Nominal (minimum commanded) airspeed, m/s.
    pub v_a_nom: f64,
    /// Maximum commandable airspeed, m/s.
    pub v_a_max: f64,
    /// Normalized-track-error buffer of the track-keeping term, in (0, 1].
    pub e_bar_buf: f64,
    /// Wind-excess buffer of the track-keeping term, m/s.
    pub dw_buf: f64,
    /// Cap of the track-keeping increment, m/s.
    pub dv_e_max: f64,
    pub mode: AirspeedMode,
}

impl Default for AirspeedConfig {
    fn default() -> Self {
        AirspeedConfig {
            v_a_nom: 8.8,
            v_a_max: 15.0,
            e_bar_buf: 0.5,
            dw_buf: 0.5,
            dv_e_max: 3.0,
            mode: AirspeedMode::Disabled,
        }
    }
}

impl AirspeedConfig {
    /// Headroom between nominal and maximum airspeed, m/s.
    #[inline]
    pub fn dv_a_max(&self) -> f64 {
        (self.v_a_max - self.v_a_nom).max(0.0)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        ConfigError::require(
            self.v_a_nom > 0.0,
            "airspeed.v_a_nom",
            format!("must be positive, got {}", self.v_a_nom),
        )?;
        ConfigError::require(
            self.v_a_max >= self.v_a_nom,
            "airspeed.v_a_max",
            format!(
                "must be at least v_a_nom ({}), got {}",
                self.v_a_nom, self.v_a_max
            ),
        )?;
        ConfigError::require(
            self.e_bar_buf > 0.0 && self.e_bar_buf <= 1.0,
            "airspeed.e_bar_buf",
            format!("must be in (0, 1], got {}", self.e_bar_buf),
        )?;
        ConfigError::require(
            self.dw_buf > 0.0,
            "airspeed.dw_buf",
            format!("must be positive, got {}", self.dw_buf),
        )?;
        ConfigError::require(
            self.dv_e_max >= 0.0,
            "airspeed.dv_e_max",
            format!("must be non-negative, got {}", self.dv_e_max),
        )?;
        if let AirspeedMode::MinGroundSpeed(v) = self.mode {
            ConfigError::require(
                v >= 0.0,
                "airspeed.v_g_min",
                format!("must be non-negative, got {v}"),
            )?;
        }
        Ok(())
    }
}

/// Wind-excess evaluation for one guidance step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindExcess {
    /// Airspeed increment demanded by the wind excess, m/s.
    pub dv_w: f64,
    /// Saturated wind excess over nominal airspeed, m/s.
    pub dw: f64,
    /// Wind ratio used for feasibility decisions; shifted by the required
    /// ground speed in minimum-ground-speed mode, `w / v_a` otherwise.
    pub beta_eff: f64,
}

pub(crate) fn wind_excess_increment_with(
    kind: FeasKind,
    w: f64,
    lambda: f64,
    v_a: f64,
    cfg: &AirspeedConfig,
    p: &FeasibilityParams,
) -> WindExcess {
    let shift = cfg.mode.v_g_min();
    let beta_eff = (w + shift) / v_a;
    match cfg.mode {
        AirspeedMode::Disabled => WindExcess {
            dv_w: 0.0,
            dw: 0.0,
            beta_eff,
        },
        AirspeedMode::WindExcess | AirspeedMode::TrackKeeping | AirspeedMode::MinGroundSpeed(_) => {
            let dw = sat(w - cfg.v_a_nom + shift, 0.0, cfg.dv_a_max());
            let dv_w = dw * (1.0 - feas_eval(kind, beta_eff, lambda, p));
            WindExcess { dv_w, dw, beta_eff }
        }
    }
}

/// Airspeed increment demanded by the excess of wind (shifted by the
/// required ground speed in minimum-ground-speed mode) over nominal
/// airspeed, weighted by how infeasible the current bearing is.
#[inline]
pub fn wind_excess_increment(
    w: f64,
    lambda: f64,
    v_a: f64,
    cfg: &AirspeedConfig,
    p: &FeasibilityParams,
) -> WindExcess {
    wind_excess_increment_with(FeasKind::Buffered, w, lambda, v_a, cfg, p)
}

pub(crate) fn track_keeping_increment_with(
    kind: FeasKind,
    e_bar: f64,
    dw: f64,
    lambda: f64,
    beta: f64,
    cfg: &AirspeedConfig,
    p: &FeasibilityParams,
) -> f64 {
    if cfg.mode != AirspeedMode::TrackKeeping {
        return 0.0;
    }
    let k_e = sat(e_bar / cfg.e_bar_buf, 0.0, 1.0);
    let k_w = sat(dw / cfg.dw_buf, 0.0, 1.0);
    cfg.dv_e_max * k_e * k_w * (1.0 - feas_eval(kind, beta, lambda, p))
}

/// Track-keeping airspeed increment, active only in
/// [`AirspeedMode::TrackKeeping`]. Scales with normalized track error and
/// with the wind excess, and vanishes when the bearing is fully feasible.
#[inline]
pub fn track_keeping_increment(
    e_bar: f64,
    dw: f64,
    lambda: f64,
    beta: f64,
    cfg: &AirspeedConfig,
    p: &FeasibilityParams,
) -> f64 {
    track_keeping_increment_with(FeasKind::Buffered, e_bar, dw, lambda, beta, cfg, p)
}

/// Total airspeed reference: nominal plus capped increments.
#[inline]
pub fn airspeed_reference(dv_w: f64, dv_e: f64, cfg: &AirspeedConfig) -> f64 {
    cfg.v_a_nom + (dv_w + dv_e).min(cfg.dv_a_max())
}

/// Ground-speed component along the airspeed vector, signed; negative means
/// the vehicle is sliding backwards over ground relative to its nose.
/// Zero when the airspeed vector is degenerate.
#[inline]
pub fn forward_ground_speed(v_g: Vec2, v_a_vec: Vec2) -> f64 {
    let n = v_a_vec.norm();
    if n <= EPS_VEC {
        0.0
    } else {
        v_g.dot(v_a_vec) / n
    }
}
