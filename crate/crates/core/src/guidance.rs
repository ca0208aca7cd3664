//! Wind-aware directional guidance.
//!
//! Each step projects the vehicle onto the path, builds a ground-relative
//! look-ahead bearing from the track error, and converts it into an
//! air-relative look-ahead direction. When the bearing is feasible the
//! air-relative direction is the ground bearing rotated by the wind-triangle
//! crab angle plus a curvature compensation term; when wind exceeds
//! airspeed and the bearing cannot be made good, the direction relaxes to
//! the best-achievable heading, which tends to nose-into-wind. The
//! feasibility weight blends continuously between the two, so commands stay
//! smooth as gusts cross the `wind speed = airspeed` boundary.
//!
//! The lateral acceleration command is `k_adj * v_A^2 * sin(eta)` about the
//! airspeed vector, with `eta` the angle to the air-relative look-ahead
//! direction, mapped to a roll reference through a coordinated-turn model.

use crate::airspeed::{
    airspeed_reference, forward_ground_speed, track_keeping_increment_with,
    wind_excess_increment_with, AirspeedConfig,
};
use crate::error::ConfigError;
use crate::feasibility::{feas_eval, FeasKind, FeasibilityParams};
use crate::geom::{rot, sat, signed_angle, Angle, Vec2, EPS_VEC};
use crate::path::PathRef;
use std::f64::consts::FRAC_PI_2;

/// Below this airspeed, m/s, guidance outputs are held safe instead of
/// computed (wings-level, nominal airspeed command).
pub const V_A_FLOOR: f64 = 2.0;

/// Floor applied under the square root in the curvature compensation
/// denominator `sqrt(1 - (beta sin(lambda_0))^2)`.
pub const EPS_DEN: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuidanceConfig {
    /// Look-ahead gain, 1/s per unit of normalized lateral acceleration.
    pub k: f64,
    /// Safety multiplier applied to the curvature-demanded gain floor.
    pub k_mult: f64,
    /// Track-error boundary time constant, s.
    pub t_b: f64,
    /// Ground-speed cutoff below which the track-error boundary goes
    /// quadratic instead of linear, m/s.
    pub v_g_co: f64,
    /// Roll reference saturation, rad.
    pub phi_max: f64,
    /// Gravitational acceleration for the roll allocation, m/s^2.
    pub g: f64,
    pub feasibility: FeasibilityParams,
    pub airspeed: AirspeedConfig,
}

impl Default for GuidanceConfig {
    fn default() -> Self {
        GuidanceConfig {
            k: 0.11,
            k_mult: 1.1,
            t_b: 7.0,
            v_g_co: 1.0,
            phi_max: 35.0_f64.to_radians(),
            g: 9.81,
            feasibility: FeasibilityParams::default(),
            airspeed: AirspeedConfig::default(),
        }
    }
}

impl GuidanceConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        ConfigError::require(
            self.k > 0.0,
            "guidance.k",
            format!("must be positive, got {}", self.k),
        )?;
        ConfigError::require(
            self.k_mult >= 1.0,
            "guidance.k_mult",
            format!("must be at least 1, got {}", self.k_mult),
        )?;
        ConfigError::require(
            self.t_b > 0.0,
            "guidance.t_b",
            format!("must be positive, got {}", self.t_b),
        )?;
        ConfigError::require(
            self.v_g_co > 0.0,
            "guidance.v_g_co",
            format!("must be positive, got {}", self.v_g_co),
        )?;
        ConfigError::require(
            self.phi_max > 0.0 && self.phi_max <= FRAC_PI_2,
            "guidance.phi_max",
            format!("must be in (0, pi/2] rad, got {}", self.phi_max),
        )?;
        ConfigError::require(
            self.g > 0.0,
            "guidance.g",
            format!("must be positive, got {}", self.g),
        )?;
        self.feasibility.validate()?;
        self.airspeed.validate()
    }
}

/// Ground-relative vehicle state as seen by guidance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleState {
    /// Position, m.
    pub r: Vec2,
    /// Ground velocity, m/s.
    pub v_g: Vec2,
}

impl VehicleState {
    /// Airspeed vector implied by a wind estimate.
    #[inline]
    pub fn airspeed_vector(&self, wind: Vec2) -> Vec2 {
        self.v_g - wind
    }
}

/// Conditions under which a step had to fall back from its nominal math.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DegenerateFlags {
    /// Path projection had no unique closest point.
    pub path_projection: bool,
    /// Raw look-ahead vector vanished; tangent used.
    pub lookahead: bool,
    /// Infeasible-heading numerator vanished; downwind-opposed direction used.
    pub infeasible_lookahead: bool,
    /// Feasibility blend vanished; infeasible branch used.
    pub blend: bool,
    /// Airspeed at or below [`V_A_FLOOR`]; outputs held safe.
    pub invalid_airspeed: bool,
    /// Curvature compensation arcsine argument left [-1, 1] and was clamped.
    pub asin_saturated: bool,
}

/// Everything a step computed, for logging and analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Telemetry {
    /// Wind-to-bearing angle, rad.
    pub lambda: f64,
    /// Wind ratio `|w| / v_A`.
    pub beta: f64,
    /// Wind ratio used for feasibility (shifted in minimum-ground-speed
    /// mode).
    pub beta_eff: f64,
    /// Feasibility weight of the current bearing.
    pub feas: f64,
    /// Track error magnitude, m.
    pub e_norm: f64,
    /// Track error normalized by the boundary, saturated to [0, 1].
    pub e_bar: f64,
    /// Look-ahead angle from the track-error direction, rad.
    pub theta_l: f64,
    /// On-track weight `sin^2(theta_l)`.
    pub sigma_l: f64,
    /// Wind-triangle crab angle applied to the feasible branch, rad.
    pub crab: f64,
    /// Curvature compensation before feasibility/on-track weighting, rad.
    pub eta_c0: f64,
    /// Applied curvature compensation, rad.
    pub eta_c: f64,
    /// Angle from the airspeed vector to the air-relative look-ahead, rad.
    pub eta_a: f64,
    /// Gain after the off-track stability adjustment.
    pub k_adj: f64,
    /// Ground-relative look-ahead bearing (unit).
    pub lookahead_ground: Vec2,
    /// Air-relative look-ahead direction (unit).
    pub lookahead_air: Vec2,
    /// Weight of the infeasible branch in the blend, `1 - feas`.
    pub infeasible_blend: f64,
    /// Wind-excess airspeed increment, m/s.
    pub dv_w: f64,
    /// Track-keeping airspeed increment, m/s.
    pub dv_e: f64,
    /// Saturated wind excess, m/s.
    pub dw: f64,
    /// Ground-speed component along the airspeed vector, m/s.
    pub v_g_fwd: f64,
    pub flags: DegenerateFlags,
}

/// One step's commands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuidanceOutput {
    /// Roll reference, rad, saturated to the configured limit.
    pub roll_ref: f64,
    /// Air-relative lateral acceleration command, m/s^2.
    pub a_lat_ref: f64,
    /// Airspeed reference, m/s.
    pub v_a_ref: f64,
    pub telemetry: Telemetry,
}

/// Track-error boundary: the error magnitude at which the look-ahead
/// bearing has fully rotated onto the track-error direction.
///
/// Linear in ground speed (`t_b * v_g`) above the cutoff; below it the
/// boundary blends quadratically to a floor of `t_b * v_g_co / 2` so that a
/// hovering vehicle keeps a usable boundary. The two branches meet with
/// equal value and slope at the cutoff.
pub fn track_error_boundary(v_g: f64, t_b: f64, v_g_co: f64) -> f64 {
    if v_g < v_g_co {
        t_b / (2.0 * v_g_co) * v_g * v_g + t_b * v_g_co / 2.0
    } else {
        t_b * v_g
    }
}

/// Look-ahead angle and on-track weight from the track error.
///
/// Returns `(theta_l, e_bar, sigma_l)`. At the boundary and beyond
/// (`e_bar = 1`) the look-ahead points straight at the path
/// (`theta_l = 0`); on track it aligns with the tangent
/// (`theta_l = pi/2`).
pub fn lookahead_angle(e_norm: f64, e_b: f64) -> (f64, f64, f64) {
    let e_bar = sat(e_norm / e_b, 0.0, 1.0);
    let theta_l = FRAC_PI_2 * (1.0 - e_bar) * (1.0 - e_bar);
    let s = theta_l.sin();
    (theta_l, e_bar, s * s)
}

/// Ground-relative look-ahead bearing from the unit track-error direction
/// and the path tangent. Returns the unit bearing and a degeneracy flag
/// (flagged when the raw combination vanished and the tangent was used).
pub fn lookahead_vector(e_hat: Vec2, tangent: Vec2, theta_l: f64) -> (Vec2, bool) {
    let raw = e_hat * theta_l.cos() + tangent * theta_l.sin();
    match raw.unit() {
        Some(u) => (u, false),
        None => (tangent, true),
    }
}

/// On-track wind triangle at the path tangent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnTrackTriangle {
    /// Wind-to-tangent angle, rad.
    pub lambda_0: f64,
    /// Crab angle that holds the tangent course, rad.
    pub x_0: f64,
    /// Angle opposite the ground-speed side, rad.
    pub y_0: f64,
    /// Ground speed along the tangent when holding it, m/s.
    pub v_g0: f64,
}

/// Solves the wind triangle for a vehicle holding the path tangent.
/// Calm wind (`|w| <= EPS_VEC`) degenerates to a straight triangle:
/// `lambda_0 = 0`, `x_0 = 0`, `y_0 = pi`, `v_g0 = v_a`.
pub fn wind_triangle_on_track(wind: Vec2, v_a: f64, tangent: Vec2) -> OnTrackTriangle {
    let w = wind.norm();
    if w <= EPS_VEC {
        return OnTrackTriangle {
            lambda_0: 0.0,
            x_0: 0.0,
            y_0: std::f64::consts::PI,
            v_g0: v_a,
        };
    }
    let lambda_0 = signed_angle(wind, tangent).rad();
    let beta = w / v_a;
    let x_0 = sat(beta * lambda_0.sin(), -1.0, 1.0).asin();
    let y_0 = std::f64::consts::PI - x_0.abs() - lambda_0.abs();
    let v_g0 = (v_a * v_a + w * w - 2.0 * v_a * w * y_0.cos()).max(0.0).sqrt();
    OnTrackTriangle {
        lambda_0,
        x_0,
        y_0,
        v_g0,
    }
}

/// Crab angle rotating a ground bearing into the airmass: the heading
/// offset that cancels the crosswind component at wind ratio `beta`.
#[inline]
pub fn airmass_rotation(beta: f64, lambda: f64) -> Angle {
    Angle::new(sat(beta * lambda.sin(), -1.0, 1.0).asin())
}

/// Gain adjustment keeping the curvature compensation solvable off track.
///
/// On track (`sigma_l = 1`) the configured gain applies unchanged; fully
/// off track the gain rises to the curvature-demanded floor
/// `k_mult (1 + beta)^2 |kappa|` (excess wind) or `4 k_mult |kappa|`
/// (feasible wind), whichever exceeds `k`.
pub fn adaptive_gain(k: f64, k_mult: f64, beta: f64, kappa: f64, sigma_l: f64) -> f64 {
    let k_max = if beta >= 1.0 {
        k.max(k_mult * (1.0 + beta) * (1.0 + beta) * kappa.abs())
    } else {
        k.max(4.0 * k_mult * kappa.abs())
    };
    k_max + sigma_l * (k - k_max)
}

/// Curvature compensation angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureRotation {
    /// Raw compensation for the on-track triangle, rad.
    pub eta_c0: f64,
    /// Compensation after feasibility and on-track weighting, rad.
    pub eta_c: f64,
    /// The arcsine argument left [-1, 1] and was clamped.
    pub saturated: bool,
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn curvature_rotation_with(
    kind: FeasKind,
    tri: &OnTrackTriangle,
    beta: f64,
    lambda: f64,
    kappa: f64,
    v_a: f64,
    k_adj: f64,
    sigma_l: f64,
    p: &FeasibilityParams,
) -> CurvatureRotation {
    let s0 = beta * tri.lambda_0.sin();
    let den = (1.0 - s0 * s0).max(EPS_DEN).sqrt();
    let arg = feas_eval(kind, beta, tri.lambda_0, p) * (tri.v_g0 * kappa) / (v_a * k_adj)
        * (1.0 + beta * tri.lambda_0.cos() / den);
    let saturated = arg.abs() > 1.0;
    let eta_c0 = sat(arg, -1.0, 1.0).asin();
    let eta_c = feas_eval(kind, beta, lambda, p) * sigma_l * eta_c0;
    CurvatureRotation {
        eta_c0,
        eta_c,
        saturated,
    }
}

/// Extra air-relative rotation that pre-compensates path curvature, so the
/// acceleration command on a curved path is consistent with the on-track
/// wind triangle.
#[inline]
#[allow(clippy::too_many_arguments)]
pub fn curvature_rotation(
    tri: &OnTrackTriangle,
    beta: f64,
    lambda: f64,
    kappa: f64,
    v_a: f64,
    k_adj: f64,
    sigma_l: f64,
    p: &FeasibilityParams,
) -> CurvatureRotation {
    curvature_rotation_with(
        FeasKind::Buffered,
        tri,
        beta,
        lambda,
        kappa,
        v_a,
        k_adj,
        sigma_l,
        p,
    )
}

/// Best-achievable air-relative direction when the bearing cannot be made
/// good: the heading whose ground velocity is closest to the bearing while
/// conceding the downwind drift, always taking the faster of the two
/// tangent solutions. For `|w| <= v_a` the formula degenerates to straight
/// upwind (it is then only used inside the feasibility blend).
pub fn infeasible_lookahead(l_hat: Vec2, wind: Vec2, v_a: f64) -> (Vec2, bool) {
    let w = wind.norm();
    let num = l_hat * (w * w - v_a * v_a).max(0.0).sqrt() - wind;
    match num.unit() {
        Some(u) => (u, false),
        None => match wind.unit() {
            Some(w_hat) => (-w_hat, true),
            None => (l_hat, true),
        },
    }
}

#[allow(clippy::too_many_arguments)]
fn held_safe_output(
    proj_degenerate: bool,
    e_norm: f64,
    e_bar: f64,
    theta_l: f64,
    sigma_l: f64,
    l_hat: Vec2,
    look_degen: bool,
    v_g: Vec2,
    v_a_vec: Vec2,
    cfg: &GuidanceConfig,
) -> GuidanceOutput {
    GuidanceOutput {
        roll_ref: 0.0,
        a_lat_ref: 0.0,
        v_a_ref: cfg.airspeed.v_a_nom,
        telemetry: Telemetry {
            lambda: 0.0,
            beta: 0.0,
            beta_eff: 0.0,
            feas: 1.0,
            e_norm,
            e_bar,
            theta_l,
            sigma_l,
            crab: 0.0,
            eta_c0: 0.0,
            eta_c: 0.0,
            eta_a: 0.0,
            k_adj: cfg.k,
            lookahead_ground: l_hat,
            lookahead_air: l_hat,
            infeasible_blend: 0.0,
            dv_w: 0.0,
            dv_e: 0.0,
            dw: 0.0,
            v_g_fwd: forward_ground_speed(v_g, v_a_vec),
            flags: DegenerateFlags {
                path_projection: proj_degenerate,
                lookahead: look_degen,
                invalid_airspeed: true,
                ..DegenerateFlags::default()
            },
        },
    }
}

pub(crate) fn guidance_step_with(
    kind: FeasKind,
    state: &VehicleState,
    wind: Vec2,
    path: &PathRef,
    cfg: &GuidanceConfig,
) -> GuidanceOutput {
    let proj = path.project(state.r);
    let tangent = proj.tangent;
    let e = proj.track_error;
    let e_norm = e.norm();

    let e_b = track_error_boundary(state.v_g.norm(), cfg.t_b, cfg.v_g_co);
    let (theta_l, e_bar, sigma_l) = lookahead_angle(e_norm, e_b);
    let e_hat = e.unit().unwrap_or(Vec2::ZERO);
    let (l_hat, look_degen) = lookahead_vector(e_hat, tangent, theta_l);

    let v_a_vec = state.airspeed_vector(wind);
    let v_a = v_a_vec.norm();
    if v_a <= V_A_FLOOR {
        return held_safe_output(
            proj.degenerate,
            e_norm,
            e_bar,
            theta_l,
            sigma_l,
            l_hat,
            look_degen,
            state.v_g,
            v_a_vec,
            cfg,
        );
    }

    let w_norm = wind.norm();
    let lambda = signed_angle(wind, l_hat).rad();
    let beta = w_norm / v_a;

    let p = &cfg.feasibility;
    let excess = wind_excess_increment_with(kind, w_norm, lambda, v_a, &cfg.airspeed, p);
    let f = feas_eval(kind, excess.beta_eff, lambda, p);

    let crab = airmass_rotation(beta, lambda);
    let tri = wind_triangle_on_track(wind, v_a, tangent);
    let k_adj = adaptive_gain(cfg.k, cfg.k_mult, beta, proj.curvature, sigma_l);
    let cr = curvature_rotation_with(
        kind,
        &tri,
        beta,
        lambda,
        proj.curvature,
        v_a,
        k_adj,
        sigma_l,
        p,
    );
    let l_feas = rot(l_hat, crab + Angle::new(cr.eta_c));

    let mut flags = DegenerateFlags {
        path_projection: proj.degenerate,
        lookahead: look_degen,
        asin_saturated: cr.saturated,
        ..DegenerateFlags::default()
    };

    let l_air = if f >= 1.0 {
        l_feas
    } else {
        let (l_inf, inf_degen) = infeasible_lookahead(l_hat, wind, v_a);
        flags.infeasible_lookahead = inf_degen;
        if f <= 0.0 {
            l_inf
        } else {
            match (l_feas * f + l_inf * (1.0 - f)).unit() {
                Some(u) => u,
                None => {
                    flags.blend = true;
                    l_inf
                }
            }
        }
    };

    let eta_a = signed_angle(v_a_vec, l_air).rad();
    let a_lat_ref = k_adj * v_a * v_a * eta_a.sin();
    let roll_ref = sat((a_lat_ref / cfg.g).atan(), -cfg.phi_max, cfg.phi_max);

    let dv_e = track_keeping_increment_with(kind, e_bar, excess.dw, lambda, beta, &cfg.airspeed, p);
    let v_a_ref = airspeed_reference(excess.dv_w, dv_e, &cfg.airspeed);

    GuidanceOutput {
        roll_ref,
        a_lat_ref,
        v_a_ref,
        telemetry: Telemetry {
            lambda,
            beta,
            beta_eff: excess.beta_eff,
            feas: f,
            e_norm,
            e_bar,
            theta_l,
            sigma_l,
            crab: crab.rad(),
            eta_c0: cr.eta_c0,
            eta_c: cr.eta_c,
            eta_a,
            k_adj,
            lookahead_ground: l_hat,
            lookahead_air: l_air,
            infeasible_blend: 1.0 - f,
            dv_w: excess.dv_w,
            dv_e,
            dw: excess.dw,
            v_g_fwd: forward_ground_speed(state.v_g, v_a_vec),
            flags,
        },
    }
}

/// Computes one guidance step: roll and airspeed references plus full
/// telemetry. Pure; all state lives in the caller.
#[inline]
pub fn guidance_step(
    state: &VehicleState,
    wind: Vec2,
    path: &PathRef,
    cfg: &GuidanceConfig,
) -> GuidanceOutput {
    guidance_step_with(FeasKind::Buffered, state, wind, path, cfg)
}

/// [`guidance_step`] evaluated with the superseded sharp feasibility
/// weight, for regression comparison only.
#[inline]
pub fn guidance_step_legacy_feas(
    state: &VehicleState,
    wind: Vec2,
    path: &PathRef,
    cfg: &GuidanceConfig,
) -> GuidanceOutput {
    guidance_step_with(FeasKind::LegacySharp, state, wind, path, cfg)
}
