//! Scenario files: a TOML schema mapping onto [`windpath::Scenario`].
//!
//! Angles are written in degrees in files and converted on load. Sections
//! with natural defaults (`guidance`, `airspeed`, `sim`) may be partial or
//! absent; `path`, `wind`, and `initial` are required. Unknown keys are
//! rejected so typos fail loudly instead of silently using a default.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;
use windpath::airspeed::AirspeedMode;
use windpath::geom::{Angle, Vec2};
use windpath::path::TurnDir;
use windpath::windsim::{InitialState, WindField};
use windpath::{AirspeedConfig, FeasibilityParams, GuidanceConfig, PathRef, Scenario, SimConfig};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub path: PathSection,
    pub wind: WindSection,
    pub initial: InitialSection,
    #[serde(default)]
    pub guidance: GuidanceSection,
    #[serde(default)]
    pub airspeed: AirspeedSection,
    #[serde(default)]
    pub sim: SimSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PathSection {
    Line {
        origin: [f64; 2],
        direction: [f64; 2],
    },
    Circle {
        center: [f64; 2],
        radius: f64,
        turn: TurnSection,
    },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TurnSection {
    Ccw,
    Cw,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WindSection {
    Constant {
        vector: [f64; 2],
    },
    Ramp {
        knots: Vec<RampKnot>,
    },
    Gust {
        base: [f64; 2],
        amplitude: [f64; 2],
        t0: f64,
        period: f64,
    },
    Noise {
        base: [f64; 2],
        sigma: f64,
        correlation_time: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RampKnot {
    pub t: f64,
    pub vector: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    pub position: [f64; 2],
    pub heading_deg: f64,
    #[serde(default)]
    pub roll_deg: f64,
    pub airspeed: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GuidanceSection {
    pub k: f64,
    pub k_mult: f64,
    pub t_b: f64,
    pub v_g_co: f64,
    pub phi_max_deg: f64,
    pub g: f64,
    pub feasibility: FeasibilitySection,
}

impl Default for GuidanceSection {
    fn default() -> Self {
        let g = GuidanceConfig::default();
        GuidanceSection {
            k: g.k,
            k_mult: g.k_mult,
            t_b: g.t_b,
            v_g_co: g.v_g_co,
            phi_max_deg: g.phi_max.to_degrees(),
            g: g.g,
            feasibility: FeasibilitySection::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeasibilitySection {
    pub beta_buf: f64,
    pub lambda_co_deg: f64,
}

impl Default for FeasibilitySection {
    fn default() -> Self {
        let p = FeasibilityParams::default();
        FeasibilitySection {
            beta_buf: p.beta_buf,
            lambda_co_deg: p.lambda_co.to_degrees(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AirspeedSection {
    pub v_a_nom: f64,
    pub v_a_max: f64,
    pub e_bar_buf: f64,
    pub dw_buf: f64,
    pub dv_e_max: f64,
    pub mode: ModeSection,
    /// Required when `mode = "min_ground_speed"`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_g_min: Option<f64>,
}

impl Default for AirspeedSection {
    fn default() -> Self {
        let a = AirspeedConfig::default();
        AirspeedSection {
            v_a_nom: a.v_a_nom,
            v_a_max: a.v_a_max,
            e_bar_buf: a.e_bar_buf,
            dw_buf: a.dw_buf,
            dv_e_max: a.dv_e_max,
            mode: ModeSection::Disabled,
            v_g_min: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeSection {
    Disabled,
    WindExcess,
    TrackKeeping,
    MinGroundSpeed,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    pub dt_sim: f64,
    pub guidance_rate: f64,
    pub tau_roll: f64,
    pub tau_airspeed: f64,
    pub phi_max_deg: f64,
    pub roll_rate_max_deg: f64,
    pub accel_limit: f64,
    pub duration: f64,
    pub seed: u64,
    pub wind_estimator_tau: f64,
}

impl Default for SimSection {
    fn default() -> Self {
        let s = SimConfig::default();
        SimSection {
            dt_sim: s.dt_sim,
            guidance_rate: s.guidance_rate,
            tau_roll: s.tau_roll,
            tau_airspeed: s.tau_airspeed,
            phi_max_deg: s.phi_max.to_degrees(),
            roll_rate_max_deg: s.roll_rate_max.to_degrees(),
            accel_limit: s.accel_limit,
            duration: s.duration,
            seed: s.seed,
            wind_estimator_tau: s.wind_estimator_tau,
        }
    }
}

fn vec2(a: [f64; 2]) -> Vec2 {
    Vec2::new(a[0], a[1])
}

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<ScenarioFile> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading scenario file {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// A complete file with every default spelled out, for `defaults`.
    pub fn example() -> ScenarioFile {
        ScenarioFile {
            name: "example".into(),
            description: "Line following in steady crosswind with all defaults listed".into(),
            path: PathSection::Line {
                origin: [0.0, 0.0],
                direction: [0.0, 1.0],
            },
            wind: WindSection::Constant {
                vector: [-5.0, 0.0],
            },
            initial: InitialSection {
                position: [60.0, 0.0],
                heading_deg: 90.0,
                roll_deg: 0.0,
                airspeed: 8.8,
            },
            guidance: GuidanceSection::default(),
            airspeed: AirspeedSection::default(),
            sim: SimSection::default(),
        }
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).context("serializing scenario")
    }

    /// Builds and validates the runnable scenario.
    pub fn to_scenario(&self) -> Result<Scenario> {
        let path = match &self.path {
            PathSection::Line { origin, direction } => {
                PathRef::line(vec2(*origin), vec2(*direction))?
            }
            PathSection::Circle {
                center,
                radius,
                turn,
            } => PathRef::circle(
                vec2(*center),
                *radius,
                match turn {
                    TurnSection::Ccw => TurnDir::Ccw,
                    TurnSection::Cw => TurnDir::Cw,
                },
            )?,
        };

        let wind = match &self.wind {
            WindSection::Constant { vector } => WindField::Constant(vec2(*vector)),
            WindSection::Ramp { knots } => WindField::PiecewiseRamp(
                knots.iter().map(|k| (k.t, vec2(k.vector))).collect(),
            ),
            WindSection::Gust {
                base,
                amplitude,
                t0,
                period,
            } => WindField::OneMinusCosGust {
                base: vec2(*base),
                amplitude: vec2(*amplitude),
                t0: *t0,
                period: *period,
            },
            WindSection::Noise {
                base,
                sigma,
                correlation_time,
                seed,
            } => WindField::FilteredNoise {
                base: vec2(*base),
                sigma: *sigma,
                correlation_time: *correlation_time,
                seed: *seed,
            },
        };

        let mode = match self.airspeed.mode {
            ModeSection::Disabled => AirspeedMode::Disabled,
            ModeSection::WindExcess => AirspeedMode::WindExcess,
            ModeSection::TrackKeeping => AirspeedMode::TrackKeeping,
            ModeSection::MinGroundSpeed => match self.airspeed.v_g_min {
                Some(v) => AirspeedMode::MinGroundSpeed(v),
                None => bail!("airspeed.v_g_min is required for mode = \"min_ground_speed\""),
            },
        };

        let scenario = Scenario {
            path,
            wind,
            initial: InitialState {
                position: vec2(self.initial.position),
                heading: Angle::new(self.initial.heading_deg.to_radians()),
                roll: self.initial.roll_deg.to_radians(),
                airspeed: self.initial.airspeed,
            },
            guidance: GuidanceConfig {
                k: self.guidance.k,
                k_mult: self.guidance.k_mult,
                t_b: self.guidance.t_b,
                v_g_co: self.guidance.v_g_co,
                phi_max: self.guidance.phi_max_deg.to_radians(),
                g: self.guidance.g,
                feasibility: FeasibilityParams {
                    beta_buf: self.guidance.feasibility.beta_buf,
                    lambda_co: self.guidance.feasibility.lambda_co_deg.to_radians(),
                },
                airspeed: AirspeedConfig {
                    v_a_nom: self.airspeed.v_a_nom,
                    v_a_max: self.airspeed.v_a_max,
                    e_bar_buf: self.airspeed.e_bar_buf,
                    dw_buf: self.airspeed.dw_buf,
                    dv_e_max: self.airspeed.dv_e_max,
                    mode,
                },
            },
            sim: SimConfig {
                dt_sim: self.sim.dt_sim,
                guidance_rate: self.sim.guidance_rate,
                tau_roll: self.sim.tau_roll,
                tau_airspeed: self.sim.tau_airspeed,
                phi_max: self.sim.phi_max_deg.to_radians(),
                roll_rate_max: self.sim.roll_rate_max_deg.to_radians(),
                accel_limit: self.sim.accel_limit,
                duration: self.sim.duration,
                seed: self.sim.seed,
                wind_estimator_tau: self.sim.wind_estimator_tau,
            },
        };
        scenario
            .validate()
            .with_context(|| format!("scenario \"{}\"", self.name))?;
        Ok(scenario)
    }
}
