//! Steady-state airspeed map over a wind-speed and bearing-angle grid.
//!
//! Each cell answers: holding a fixed bearing in a fixed wind, what
//! airspeed does the wind-excess scheduler settle at, and what forward
//! ground speed results? The airspeed reference feeds back through the
//! wind ratio, so the settled value is the fixed point of
//! `v = v_nom + dv_w(w, lambda, v)`. The right-hand side is non-increasing
//! in `v` (faster flight can only improve feasibility), so `v - rhs(v)` is
//! strictly increasing and the fixed point is found by bisection.
//!
//! Cells are evaluated twice: with plain wind-excess compensation, and
//! with an additional minimum-ground-speed target, whose map dominates the
//! first cell-wise.

use anyhow::{ensure, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use windpath::airspeed::{airspeed_reference, wind_excess_increment, AirspeedMode};
use windpath::feasibility::feas;
use windpath::geom::{rot, Angle, Vec2};
use windpath::guidance::{airmass_rotation, infeasible_lookahead};
use windpath::{AirspeedConfig, FeasibilityParams};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub w_min: f64,
    pub w_max: f64,
    pub w_count: usize,
    pub lambda_min_deg: f64,
    pub lambda_max_deg: f64,
    pub lambda_count: usize,
    /// Ground-speed target of the second map, m/s.
    pub v_g_min: f64,
    pub v_a_nom: f64,
    pub v_a_max: f64,
    pub beta_buf: f64,
    pub lambda_co_deg: f64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            w_min: 0.0,
            w_max: 15.0,
            w_count: 61,
            lambda_min_deg: -180.0,
            lambda_max_deg: 180.0,
            lambda_count: 73,
            v_g_min: 3.0,
            v_a_nom: 10.0,
            v_a_max: 12.5,
            beta_buf: 0.1,
            lambda_co_deg: 1.0,
        }
    }
}

impl SweepSpec {
    fn airspeed(&self, mode: AirspeedMode) -> AirspeedConfig {
        AirspeedConfig {
            v_a_nom: self.v_a_nom,
            v_a_max: self.v_a_max,
            mode,
            ..AirspeedConfig::default()
        }
    }

    fn feasibility(&self) -> FeasibilityParams {
        FeasibilityParams {
            beta_buf: self.beta_buf,
            lambda_co: self.lambda_co_deg.to_radians(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.w_count >= 2, "w_count must be at least 2");
        ensure!(self.lambda_count >= 2, "lambda_count must be at least 2");
        ensure!(self.w_max > self.w_min, "w range must be increasing");
        ensure!(
            self.lambda_max_deg > self.lambda_min_deg,
            "lambda range must be increasing"
        );
        ensure!(self.v_g_min >= 0.0, "v_g_min must be non-negative");
        self.airspeed(AirspeedMode::WindExcess).validate()?;
        self.feasibility().validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepCell {
    pub w: f64,
    pub lambda_deg: f64,
    pub v_a_ref_base: f64,
    pub v_g_fwd_base: f64,
    pub v_a_ref_min_vg: f64,
    pub v_g_fwd_min_vg: f64,
}

/// Settled airspeed reference for one cell: the unique `v` with
/// `v = v_nom + dv_w(w, lambda, v)`.
fn settle_airspeed(w: f64, lambda: f64, cfg: &AirspeedConfig, p: &FeasibilityParams) -> f64 {
    let reference = |v: f64| {
        let excess = wind_excess_increment(w, lambda, v, cfg, p);
        airspeed_reference(excess.dv_w, 0.0, cfg)
    };
    let mut lo = cfg.v_a_nom;
    let mut hi = cfg.v_a_nom + cfg.dv_a_max();
    if reference(lo) <= lo {
        return lo;
    }
    if reference(hi) >= hi {
        return hi;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if reference(mid) > mid {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Forward ground speed at the settled airspeed, with the heading the
/// guidance law would command for this bearing when exactly on track.
fn steady_forward_speed(
    w: f64,
    lambda: f64,
    v_a: f64,
    shift: f64,
    p: &FeasibilityParams,
) -> f64 {
    let l_hat = Vec2::new(1.0, 0.0);
    let wind = rot(l_hat, Angle::new(-lambda)) * w;
    let beta = w / v_a;
    let l_feas = rot(l_hat, airmass_rotation(beta, lambda));
    let f = feas((w + shift) / v_a, lambda, p);
    let heading = if f >= 1.0 {
        l_feas
    } else {
        let (l_inf, _) = infeasible_lookahead(l_hat, wind, v_a);
        (l_feas * f + l_inf * (1.0 - f)).unit().unwrap_or(l_inf)
    };
    (heading * v_a + wind).dot(heading)
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepCell>> {
    spec.validate()?;
    let p = spec.feasibility();
    let base_cfg = spec.airspeed(AirspeedMode::WindExcess);
    let min_cfg = spec.airspeed(AirspeedMode::MinGroundSpeed(spec.v_g_min));

    let w_step = (spec.w_max - spec.w_min) / (spec.w_count - 1) as f64;
    let l_step = (spec.lambda_max_deg - spec.lambda_min_deg) / (spec.lambda_count - 1) as f64;
    let cells: Vec<(f64, f64)> = (0..spec.w_count)
        .flat_map(|i| {
            (0..spec.lambda_count).map(move |j| {
                (
                    spec.w_min + i as f64 * w_step,
                    spec.lambda_min_deg + j as f64 * l_step,
                )
            })
        })
        .collect();

    Ok(cells
        .into_par_iter()
        .map(|(w, lambda_deg)| {
            let lambda = lambda_deg.to_radians();
            let v_base = settle_airspeed(w, lambda, &base_cfg, &p);
            let v_min = settle_airspeed(w, lambda, &min_cfg, &p);
            SweepCell {
                w,
                lambda_deg,
                v_a_ref_base: v_base,
                v_g_fwd_base: steady_forward_speed(w, lambda, v_base, 0.0, &p),
                v_a_ref_min_vg: v_min,
                v_g_fwd_min_vg: steady_forward_speed(w, lambda, v_min, spec.v_g_min, &p),
            }
        })
        .collect())
}

pub fn write_csv<W: Write>(cells: &[SweepCell], mut out: W) -> std::io::Result<()> {
    writeln!(
        out,
        "w,lambda_deg,v_a_ref_base,v_g_fwd_base,v_a_ref_min_vg,v_g_fwd_min_vg"
    )?;
    for c in cells {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            c.w, c.lambda_deg, c.v_a_ref_base, c.v_g_fwd_base, c.v_a_ref_min_vg, c.v_g_fwd_min_vg
        )?;
    }
    Ok(())
}

/// Largest disagreement between the 32-bit and 64-bit feasibility weights
/// over a dense wind-ratio and bearing grid.
pub fn f32_conformance_max_gap(p: &FeasibilityParams) -> f64 {
    let n_beta = 1501;
    let n_lambda = 1201;
    let mut max_gap = 0.0_f64;
    for i in 0..n_beta {
        let beta = 3.0 * i as f64 / (n_beta - 1) as f64;
        for j in 0..n_lambda {
            let lambda = -std::f64::consts::PI
                + std::f64::consts::TAU * j as f64 / (n_lambda - 1) as f64;
            let f64_val = feas(beta, lambda, p);
            let f32_val = windpath::feasibility::feas_f32(beta as f32, lambda as f32, p);
            max_gap = max_gap.max((f64_val - f32_val as f64).abs());
        }
    }
    max_gap
}
