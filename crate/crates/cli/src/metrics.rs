//! Summary metrics over a simulation log.

use serde::Serialize;
use windpath::geom::wrap;
use windpath::{Scenario, SimLog};

#[derive(Debug, Clone, Serialize)]
pub struct MetricsReport {
    pub scenario: String,
    pub duration: f64,
    pub samples: usize,
    pub track_error_mean: f64,
    pub track_error_max: f64,
    pub track_error_std: f64,
    /// Maximum track error over samples where wind speed exceeded the
    /// nominal airspeed; absent when the run never got there.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub track_error_max_excess_wind: Option<f64>,
    /// Shortfall of forward ground speed below the configured minimum,
    /// over samples where the airspeed scheduler was active; absent
    /// outside minimum-ground-speed mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ground_speed_undershoot_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ground_speed_undershoot_max: Option<f64>,
    /// Fraction of samples with a fully infeasible bearing.
    pub feas_zero_fraction: f64,
    /// Largest commanded-heading change between consecutive samples, deg.
    pub heading_ref_max_step_deg: f64,
    /// Largest airspeed-reference change between consecutive samples, m/s.
    pub v_a_ref_max_step: f64,
    pub asin_saturation_events: usize,
    pub terminal_track_error: f64,
    pub terminal_ground_speed: f64,
    pub terminal_v_g_fwd: f64,
    /// Angle between the terminal ground velocity and the path tangent,
    /// deg; absent when the terminal ground speed is negligible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terminal_course_error_deg: Option<f64>,
}

pub fn compute(name: &str, scenario: &Scenario, log: &SimLog) -> MetricsReport {
    let n = log.rows.len();
    let v_a_nom = scenario.guidance.airspeed.v_a_nom;
    let v_g_min = scenario.guidance.airspeed.mode.v_g_min();

    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut max = 0.0_f64;
    let mut max_excess: Option<f64> = None;
    let mut undershoot: Vec<f64> = Vec::new();
    let mut zero_feas = 0usize;
    let mut heading_step = 0.0_f64;
    let mut v_ref_step = 0.0_f64;
    let mut saturations = 0usize;

    for (i, row) in log.rows.iter().enumerate() {
        sum += row.e_norm;
        sum_sq += row.e_norm * row.e_norm;
        max = max.max(row.e_norm);
        if row.wind.norm() > v_a_nom {
            *max_excess.get_or_insert(0.0) = max_excess.unwrap_or(0.0).max(row.e_norm);
        }
        if v_g_min > 0.0 && row.v_a_ref > v_a_nom + 1e-9 {
            undershoot.push((v_g_min - row.v_g_fwd).max(0.0));
        }
        if row.feas == 0.0 {
            zero_feas += 1;
        }
        if row.asin_saturated {
            saturations += 1;
        }
        if i > 0 {
            let prev = &log.rows[i - 1];
            heading_step = heading_step.max(wrap(row.heading_ref - prev.heading_ref).abs());
            v_ref_step = v_ref_step.max((row.v_a_ref - prev.v_a_ref).abs());
        }
    }

    let mean = sum / n as f64;
    let var = (sum_sq / n as f64 - mean * mean).max(0.0);
    let last = log.last();
    let course_error = scenario
        .path
        .project(last.r)
        .tangent
        .angle()
        .zip(last.v_g.angle())
        .map(|(tangent, course)| wrap(course.rad() - tangent.rad()).abs().to_degrees());

    MetricsReport {
        scenario: name.to_string(),
        duration: last.t,
        samples: n,
        track_error_mean: mean,
        track_error_max: max,
        track_error_std: var.sqrt(),
        track_error_max_excess_wind: max_excess,
        ground_speed_undershoot_mean: (!undershoot.is_empty())
            .then(|| undershoot.iter().sum::<f64>() / undershoot.len() as f64),
        ground_speed_undershoot_max: undershoot.iter().cloned().fold(None, |acc, u| {
            Some(acc.map_or(u, |a: f64| a.max(u)))
        }),
        feas_zero_fraction: zero_feas as f64 / n as f64,
        heading_ref_max_step_deg: heading_step.to_degrees(),
        v_a_ref_max_step: v_ref_step,
        asin_saturation_events: saturations,
        terminal_track_error: last.e_norm,
        terminal_ground_speed: last.v_g.norm(),
        terminal_v_g_fwd: last.v_g_fwd,
        terminal_course_error_deg: course_error,
    }
}
