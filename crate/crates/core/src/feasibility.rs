//! Bearing feasibility in excess wind.
//!
//! A ground-relative bearing is *feasible* when the aircraft can make good
//! that course given wind ratio `beta = w / v_A`. With `lambda` the angle
//! from the wind vector to the bearing, the hard limit is
//!
//! ```text
//! infeasible  <=>  beta * sin|lambda| >= 1   or   (|lambda| >= pi/2 and beta > 1)
//! ```
//!
//! [`feas`] softens that binary edge into a weight in `[0, 1]`: it is 1 deep
//! inside the feasible cone, 0 on the infeasible side, and transitions
//! through a raised-cosine ramp over a wind-ratio buffer below the limit.
//! Both ramp ends have zero slope, so the weight is continuously
//! differentiable in `beta` everywhere, and the transition band is widened
//! below a small cut-off angle so that near-zero `lambda` (wind almost
//! aligned with the bearing) never produces a needle-thin ramp.
//!
//! [`feas_legacy`] is the superseded sharp-edged weight. It is kept as a
//! regression oracle: it jumps from 1 to 0 across `beta = 1` for
//! `|lambda| >= pi/2`, which is exactly the chatter the buffered version
//! removes. It must not be used in a control path.

use crate::error::ConfigError;
use crate::geom::{sat, wrap};
use std::f64::consts::FRAC_PI_2;

/// Shape of the buffered feasibility transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityParams {
    /// Wind-ratio buffer width at `lambda_bar = pi/2`, in `(0, 1)`.
    pub beta_buf: f64,
    /// Cut-off angle below which the transition band is linearly widened,
    /// in `(0, pi/2)` rad.
    pub lambda_co: f64,
}

impl Default for FeasibilityParams {
    fn default() -> Self {
        FeasibilityParams {
            beta_buf: 0.1,
            lambda_co: 1.0_f64.to_radians(),
        }
    }
}

impl FeasibilityParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        ConfigError::require(
            self.beta_buf > 0.0 && self.beta_buf < 1.0,
            "feasibility.beta_buf",
            format!("must be in (0, 1), got {}", self.beta_buf),
        )?;
        ConfigError::require(
            self.lambda_co > 0.0 && self.lambda_co < FRAC_PI_2,
            "feasibility.lambda_co",
            format!("must be in (0, pi/2) rad, got {}", self.lambda_co),
        )
    }
}

/// Which feasibility weight a closed-loop run evaluates.
///
/// `LegacySharp` exists so tests can demonstrate the command chatter the
/// buffered weight was introduced to remove; production callers always use
/// `Buffered`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeasKind {
    Buffered,
    LegacySharp,
}

/// Folds `lambda` to the quarter-turn interval: `sat(|wrap(lambda)|, 0, pi/2)`.
#[inline]
pub fn lambda_bar(lambda: f64) -> f64 {
    sat(wrap(lambda).abs(), 0.0, FRAC_PI_2)
}

/// Hard (binary) feasibility limit for wind ratio `beta` and wind-to-bearing
/// angle `lambda`.
#[inline]
pub fn bearing_infeasible(beta: f64, lambda: f64) -> bool {
    let al = wrap(lambda).abs();
    beta * al.sin() >= 1.0 || (al >= FRAC_PI_2 && beta > 1.0)
}

/// Lower and upper wind-ratio limits `(beta_minus, beta_plus)` of the
/// transition band at folded angle `lambda_bar`.
///
/// Above the cut-off angle the band hugs the hard limit
/// `beta_plus = 1 / sin(lambda_bar)`; below it both limits continue along
/// the tangent at the cut-off, keeping the band wide where the hyperbola
/// blows up.
pub fn beta_limits(lambda_bar: f64, p: &FeasibilityParams) -> (f64, f64) {
    let b = p.beta_buf;
    if lambda_bar < p.lambda_co {
        let s_co = p.lambda_co.sin();
        let beta_plus_co = 1.0 / s_co;
        let m_co = p.lambda_co.cos() / (s_co * s_co);
        let beta_minus_co = (1.0 / s_co - 2.0) * b + 1.0;
        let lead = m_co * (p.lambda_co - lambda_bar);
        (beta_minus_co + lead * b, beta_plus_co + lead)
    } else {
        let s = lambda_bar.sin();
        ((1.0 / s - 2.0) * b + 1.0, 1.0 / s)
    }
}

/// Buffered feasibility weight in `[0, 1]`.
///
/// Exactly 0 at and beyond `beta_plus` (which covers the whole hard-limit
/// region for `lambda_bar >= lambda_co`), exactly 1 at and below
/// `beta_minus`, raised-cosine in between.
pub fn feas(beta: f64, lambda: f64, p: &FeasibilityParams) -> f64 {
    let lb = lambda_bar(lambda);
    let (beta_minus, beta_plus) = beta_limits(lb, p);
    if beta >= beta_plus {
        0.0
    } else if beta > beta_minus {
        let u = sat((beta - beta_minus) / (beta_plus - beta_minus), 0.0, 1.0);
        let c = (FRAC_PI_2 * u).cos();
        c * c
    } else {
        1.0
    }
}

/// Superseded sharp feasibility weight, kept as a regression oracle.
///
/// `sqrt(1 - (beta sin(lambda_bar))^2) / cos(lambda_bar)` clamped to
/// `[0, 1]`, 0 when the bearing is hard-infeasible. The division is guarded
/// as `lambda_bar -> pi/2`: the clamped ratio tends to 1 there whenever the
/// bearing is still feasible.
pub fn feas_legacy(beta: f64, lambda: f64) -> f64 {
    if bearing_infeasible(beta, lambda) {
        return 0.0;
    }
    let lb = lambda_bar(lambda);
    let c = lb.cos();
    if c <= 1e-12 {
        return 1.0;
    }
    let s = beta * lb.sin();
    let num = (1.0 - s * s).max(0.0).sqrt();
    sat(num / c, 0.0, 1.0)
}

/// Evaluates the weight selected by `kind`.
#[inline]
pub fn feas_eval(kind: FeasKind, beta: f64, lambda: f64, p: &FeasibilityParams) -> f64 {
    match kind {
        FeasKind::Buffered => feas(beta, lambda, p),
        FeasKind::LegacySharp => feas_legacy(beta, lambda),
    }
}

/// Single-precision mirror of [`beta_limits`], for conformance testing
/// against reduced-precision targets.
pub fn beta_limits_f32(lambda_bar: f32, p: &FeasibilityParams) -> (f32, f32) {
    let b = p.beta_buf as f32;
    let lambda_co = p.lambda_co as f32;
    if lambda_bar < lambda_co {
        let s_co = lambda_co.sin();
        let beta_plus_co = 1.0 / s_co;
        let m_co = lambda_co.cos() / (s_co * s_co);
        let beta_minus_co = (1.0 / s_co - 2.0) * b + 1.0;
        let lead = m_co * (lambda_co - lambda_bar);
        (beta_minus_co + lead * b, beta_plus_co + lead)
    } else {
        let s = lambda_bar.sin();
        ((1.0 / s - 2.0) * b + 1.0, 1.0 / s)
    }
}

/// Single-precision mirror of [`feas`].
pub fn feas_f32(beta: f32, lambda: f32, p: &FeasibilityParams) -> f32 {
    use std::f32::consts::{FRAC_PI_2 as HALF_PI32, PI as PI32};
    let wrapped = PI32 - (PI32 - lambda).rem_euclid(2.0 * PI32);
    let lb = wrapped.abs().min(HALF_PI32);
    let (beta_minus, beta_plus) = beta_limits_f32(lb, p);
    if beta >= beta_plus {
        0.0
    } else if beta > beta_minus {
        let u = ((beta - beta_minus) / (beta_plus - beta_minus)).clamp(0.0, 1.0);
        let c = (HALF_PI32 * u).cos();
        c * c
    } else {
        1.0
    }
}

/// True when `lambda` lies in the folded interval where the hard limit and
/// the buffered weight share the same zero set.
#[inline]
pub fn above_cutoff(lambda: f64, p: &FeasibilityParams) -> bool {
    lambda_bar(lambda) >= p.lambda_co
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn defaults() -> FeasibilityParams {
        FeasibilityParams::default()
    }

    // Independent transcription of the transition-band limits used as the
    // oracle for beta_limits. Kept deliberately separate from the
    // implementation (no shared helpers).
    fn oracle_limits(lb: f64, beta_buf: f64, lambda_co: f64) -> (f64, f64) {
        let hyper = |a: f64| 1.0 / a.sin();
        if lb >= lambda_co {
            ((hyper(lb) - 2.0) * beta_buf + 1.0, hyper(lb))
        } else {
            let slope = lambda_co.cos() / lambda_co.sin().powi(2);
            let plus = hyper(lambda_co) + slope * (lambda_co - lb);
            let minus =
                (hyper(lambda_co) - 2.0) * beta_buf + 1.0 + slope * (lambda_co - lb) * beta_buf;
            (minus, plus)
        }
    }

    #[test]
    fn band_limits_match_oracle_at_zero_angle() {
        let p = defaults();
        let (minus, plus) = beta_limits(0.0, &p);
        let (om, op) = oracle_limits(0.0, 0.1, 1.0_f64.to_radians());
        assert_abs_diff_eq!(minus, om, epsilon = 1e-12);
        assert_abs_diff_eq!(plus, op, epsilon = 1e-12);
        // Frozen values from the oracle.
        assert_abs_diff_eq!(plus, 114.59, epsilon = 0.01);
        assert_abs_diff_eq!(minus, 12.259, epsilon = 0.001);
    }

    #[test]
    fn band_limits_at_quarter_turn() {
        let p = defaults();
        let (minus, plus) = beta_limits(FRAC_PI_2, &p);
        assert_abs_diff_eq!(plus, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(minus, 0.9, epsilon = 1e-15);
    }

    #[test]
    fn band_is_continuous_and_smooth_at_cutoff() {
        let p = defaults();
        let eps = 1e-9;
        let (m0, p0) = beta_limits(p.lambda_co - eps, &p);
        let (m1, p1) = beta_limits(p.lambda_co + eps, &p);
        assert_abs_diff_eq!(m0, m1, epsilon = 1e-4);
        assert_abs_diff_eq!(p0, p1, epsilon = 1e-4);
        // One-sided slopes agree (the linear lead is the hyperbola tangent).
        let h = 1e-6;
        let slope_below = (beta_limits(p.lambda_co - h, &p).1 - beta_limits(p.lambda_co, &p).1) / h;
        let slope_above = (beta_limits(p.lambda_co, &p).1 - beta_limits(p.lambda_co + h, &p).1) / h;
        assert_abs_diff_eq!(slope_below, slope_above, epsilon = 1e-2 * slope_below.abs());
    }

    #[test]
    fn feas_anchor_values_at_quarter_turn() {
        let p = defaults();
        assert_eq!(feas(0.8, FRAC_PI_2, &p), 1.0);
        assert_abs_diff_eq!(feas(0.95, FRAC_PI_2, &p), 0.5, epsilon = 1e-12);
        assert_eq!(feas(1.05, FRAC_PI_2, &p), 0.0);
    }

    #[test]
    fn feas_is_exactly_zero_on_hard_limit_above_cutoff() {
        let p = defaults();
        assert_eq!(feas(1.0, FRAC_PI_2, &p), 0.0);
        assert_eq!(feas(2.0, std::f64::consts::PI, &p), 0.0);
        assert_eq!(feas(1.0 + 1e-15, 2.0, &p), 0.0);
        let lb = 0.7_f64;
        let on_limit = 1.0 / lb.sin();
        assert_eq!(feas(on_limit, lb, &p), 0.0);
    }

    #[test]
    fn feas_is_one_deep_inside_cone() {
        let p = defaults();
        assert_eq!(feas(0.5, 0.3, &p), 1.0);
        assert_eq!(feas(0.9, FRAC_PI_2, &p), 1.0);
        assert_eq!(feas(3.0, 0.001, &p), 1.0);
        assert_eq!(feas(0.0, 2.0, &p), 1.0);
    }

    #[test]
    fn feas_folds_lambda() {
        let p = defaults();
        for lam in [-2.0, 2.0, -2.0 + 2.0 * std::f64::consts::PI] {
            assert_abs_diff_eq!(feas(0.95, lam, &p), feas(0.95, 2.0, &p), epsilon = 1e-15);
        }
    }

    #[test]
    fn legacy_matches_hand_evaluated_ratio() {
        // Oracle: direct evaluation of sqrt(1 - (b sin l)^2) / cos l.
        let b = 1.05;
        let l: f64 = 1.2;
        let expect = (1.0 - (b * l.sin()).powi(2)).sqrt() / l.cos();
        assert_abs_diff_eq!(feas_legacy(b, l), expect, epsilon = 1e-12);
        assert_abs_diff_eq!(feas_legacy(b, l), 0.567330, epsilon = 1e-5);
    }

    #[test]
    fn legacy_jumps_across_unity_wind_ratio() {
        // The motivating defect: upwind-ish bearings flip 1 -> 0 with no
        // intermediate values as beta crosses 1.
        assert_eq!(feas_legacy(1.0 - 1e-9, 2.0), 1.0);
        assert_eq!(feas_legacy(1.0 + 1e-9, 2.0), 0.0);
        // The buffered weight is already most of the way down before the
        // limit and meets zero continuously.
        let p = defaults();
        assert!(feas(1.0 - 1e-9, 2.0, &p) < 1e-15);
    }

    #[test]
    fn legacy_guard_at_quarter_turn() {
        assert_eq!(feas_legacy(0.5, FRAC_PI_2), 1.0);
        assert_eq!(feas_legacy(1.5, FRAC_PI_2), 0.0);
    }

    #[test]
    fn infeasibility_truth_table() {
        assert!(bearing_infeasible(1.2, std::f64::consts::PI));
        assert!(bearing_infeasible(1.2, FRAC_PI_2));
        assert!(bearing_infeasible(2.0, 0.6));
        assert!(!bearing_infeasible(0.8, std::f64::consts::PI));
        assert!(!bearing_infeasible(0.8, 1.0));
        assert!(!bearing_infeasible(3.0, 0.1));
        assert!(!bearing_infeasible(1.0, FRAC_PI_2 - 0.01));
    }

    #[test]
    fn f32_mirror_tracks_f64_at_anchors() {
        let p = defaults();
        for (beta, lam) in [
            (0.8, FRAC_PI_2),
            (0.95, FRAC_PI_2),
            (1.05, FRAC_PI_2),
            (0.97, 2.3),
            (1.5, 0.72),
            (12.0, 0.005),
        ] {
            let f64v = feas(beta, lam, &p);
            let f32v = feas_f32(beta as f32, lam as f32, &p) as f64;
            assert!(
                (f64v - f32v).abs() < 1e-4,
                "feas mismatch at beta={beta} lambda={lam}: {f64v} vs {f32v}"
            );
        }
    }

    #[test]
    fn params_validation() {
        assert!(defaults().validate().is_ok());
        let bad = FeasibilityParams {
            beta_buf: 1.0,
            ..defaults()
        };
        assert!(bad.validate().unwrap_err().field.contains("beta_buf"));
        let bad = FeasibilityParams {
            lambda_co: 0.0,
            ..defaults()
        };
        assert!(bad.validate().unwrap_err().field.contains("lambda_co"));
    }

    proptest! {
        #[test]
        fn feas_stays_in_unit_interval(
            beta in 0.0..5.0f64,
            lambda in -7.0..7.0f64,
            beta_buf in 0.01..0.99f64,
            lambda_co_deg in 0.1..45.0f64,
        ) {
            let p = FeasibilityParams { beta_buf, lambda_co: lambda_co_deg.to_radians() };
            let f = feas(beta, lambda, &p);
            prop_assert!((0.0..=1.0).contains(&f));
        }

        #[test]
        fn band_lower_limit_stays_below_upper(
            lb in 0.0..FRAC_PI_2,
            beta_buf in 0.01..0.99f64,
            lambda_co_deg in 0.1..45.0f64,
        ) {
            let p = FeasibilityParams { beta_buf, lambda_co: lambda_co_deg.to_radians() };
            let (minus, plus) = beta_limits(lb, &p);
            prop_assert!(minus < plus);
        }

        #[test]
        fn feas_monotone_in_beta(
            lambda in -3.2..3.2f64,
            b0 in 0.0..5.0f64,
            db in 0.0..2.0f64,
        ) {
            let p = FeasibilityParams::default();
            prop_assert!(feas(b0, lambda, &p) >= feas(b0 + db, lambda, &p));
        }

        #[test]
        fn feas_monotone_in_folded_angle(
            beta in 0.0..5.0f64,
            l0 in 0.0..FRAC_PI_2,
            dl in 0.0..FRAC_PI_2,
        ) {
            let p = FeasibilityParams::default();
            let l1 = (l0 + dl).min(FRAC_PI_2);
            prop_assert!(feas(beta, l0, &p) + 1e-12 >= feas(beta, l1, &p));
        }

        #[test]
        fn feas_zero_wherever_hard_infeasible_above_cutoff(
            beta in 0.0..5.0f64,
            lambda in -3.2..3.2f64,
        ) {
            let p = FeasibilityParams::default();
            if bearing_infeasible(beta, lambda) && above_cutoff(lambda, &p) {
                prop_assert_eq!(feas(beta, lambda, &p), 0.0);
            }
        }

        #[test]
        fn legacy_never_exceeds_buffered_region_bounds(
            beta in 0.0..5.0f64,
            lambda in -3.2..3.2f64,
        ) {
            let f = feas_legacy(beta, lambda);
            prop_assert!((0.0..=1.0).contains(&f));
        }
    }
}
