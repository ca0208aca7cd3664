//! Closed-loop planar simulation of the guidance law.
//!
//! The vehicle model is kinematic: heading follows coordinated-turn
//! dynamics from roll, and roll and airspeed track their references
//! through rate- and acceleration-limited first-order lags. Wind enters as
//! a time-varying field added to the airspeed vector. Guidance runs at a
//! fixed rate with zero-order hold; the continuous states integrate with
//! RK4 substeps between control instants.
//!
//! Runs are deterministic: stochastic wind draws from a counter-seeded
//! generator, so identical scenarios yield bitwise-identical logs.

use crate::error::{ConfigError, SimError};
use crate::geom::{sat, wrap, Angle, Vec2};
use crate::guidance::{guidance_step_with, GuidanceConfig, VehicleState, V_A_FLOOR};
use crate::feasibility::FeasKind;
use crate::path::PathRef;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::FRAC_PI_2;
use std::io::Write;

/// Integration and actuator-model parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Integrator substep, s. Must divide the guidance period.
    pub dt_sim: f64,
    /// Guidance update rate, Hz.
    pub guidance_rate: f64,
    /// Roll tracking time constant, s.
    pub tau_roll: f64,
    /// Airspeed tracking time constant, s.
    pub tau_airspeed: f64,
    /// Physical roll limit, rad.
    pub phi_max: f64,
    /// Roll rate limit, rad/s.
    pub roll_rate_max: f64,
    /// Longitudinal acceleration limit, m/s^2.
    pub accel_limit: f64,
    /// Simulated duration, s.
    pub duration: f64,
    /// Seed for stochastic wind when the field does not carry its own.
    pub seed: u64,
    /// Wind estimator lag fed to guidance, s. Zero means guidance sees the
    /// true wind.
    pub wind_estimator_tau: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dt_sim: 0.005,
            guidance_rate: 50.0,
            tau_roll: 0.3,
            tau_airspeed: 1.5,
            phi_max: 35.0_f64.to_radians(),
            roll_rate_max: 90.0_f64.to_radians(),
            accel_limit: 2.0,
            duration: 60.0,
            seed: 0,
            wind_estimator_tau: 0.0,
        }
    }
}

impl SimConfig {
    /// Guidance period, s.
    #[inline]
    pub fn control_period(&self) -> f64 {
        1.0 / self.guidance_rate
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (value, name) in [
            (self.dt_sim, "sim.dt_sim"),
            (self.guidance_rate, "sim.guidance_rate"),
            (self.tau_roll, "sim.tau_roll"),
            (self.tau_airspeed, "sim.tau_airspeed"),
            (self.roll_rate_max, "sim.roll_rate_max"),
            (self.accel_limit, "sim.accel_limit"),
            (self.duration, "sim.duration"),
        ] {
            ConfigError::require(
                value > 0.0 && value.is_finite(),
                name,
                format!("must be positive and finite, got {value}"),
            )?;
        }
        ConfigError::require(
            self.phi_max > 0.0 && self.phi_max < FRAC_PI_2,
            "sim.phi_max",
            format!("must be in (0, pi/2) rad, got {}", self.phi_max),
        )?;
        ConfigError::require(
            self.wind_estimator_tau >= 0.0 && self.wind_estimator_tau.is_finite(),
            "sim.wind_estimator_tau",
            format!("must be non-negative, got {}", self.wind_estimator_tau),
        )?;
        let period = self.control_period();
        let steps = period / self.dt_sim;
        if (steps - steps.round()).abs() > 1e-9 * steps.round().max(1.0) || steps < 0.5 {
            return Err(ConfigError::new(
                "sim.dt_sim",
                format!(
                    "must divide the guidance period {period} s, got {}",
                    self.dt_sim
                ),
            ));
        }
        Ok(())
    }
}

/// Vehicle state at the start of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialState {
    pub position: Vec2,
    pub heading: Angle,
    /// Initial roll, rad.
    pub roll: f64,
    /// Initial airspeed, m/s.
    pub airspeed: f64,
}

/// Time-varying wind field.
#[derive(Debug, Clone, PartialEq)]
pub enum WindField {
    Constant(Vec2),
    /// Linear interpolation between `(time, wind)` knots, held constant
    /// outside the first and last.
    PiecewiseRamp(Vec<(f64, Vec2)>),
    /// Smooth gust pulse: `base + amplitude * (1 - cos(2 pi (t - t0) / period)) / 2`
    /// inside `[t0, t0 + period]`, `base` outside.
    OneMinusCosGust {
        base: Vec2,
        amplitude: Vec2,
        t0: f64,
        period: f64,
    },
    /// Base wind plus first-order Gauss-Markov turbulence per axis with
    /// stationary standard deviation `sigma`.
    FilteredNoise {
        base: Vec2,
        sigma: f64,
        correlation_time: f64,
        /// Overrides the run seed when set.
        seed: Option<u64>,
    },
}

impl WindField {
    pub fn validate(&self) -> Result<(), ConfigError> {
        match self {
            WindField::Constant(w) => {
                if !w.is_finite() {
                    return Err(ConfigError::new("wind.constant", "must be finite"));
                }
            }
            WindField::PiecewiseRamp(knots) => {
                if knots.is_empty() {
                    return Err(ConfigError::new("wind.knots", "need at least one knot"));
                }
                for pair in knots.windows(2) {
                    ConfigError::require(
                        pair[1].0 > pair[0].0,
                        "wind.knots",
                        format!(
                            "times must be strictly increasing, got {} then {}",
                            pair[0].0, pair[1].0
                        ),
                    )?;
                }
                if knots.iter().any(|(t, w)| !t.is_finite() || !w.is_finite()) {
                    return Err(ConfigError::new("wind.knots", "must be finite"));
                }
            }
            WindField::OneMinusCosGust { period, .. } => {
                ConfigError::require(
                    *period > 0.0 && period.is_finite(),
                    "wind.period",
                    format!("must be positive, got {period}"),
                )?;
            }
            WindField::FilteredNoise {
                sigma,
                correlation_time,
                ..
            } => {
                ConfigError::require(
                    *sigma >= 0.0 && sigma.is_finite(),
                    "wind.sigma",
                    format!("must be non-negative, got {sigma}"),
                )?;
                ConfigError::require(
                    *correlation_time > 0.0 && correlation_time.is_finite(),
                    "wind.correlation_time",
                    format!("must be positive, got {correlation_time}"),
                )?;
            }
        }
        Ok(())
    }

    /// Realizes the field over `[0, duration]`. Stochastic fields are
    /// drawn up front on the integrator grid so a sampler is pure.
    pub fn sampler(&self, duration: f64, dt: f64, default_seed: u64) -> WindSampler {
        match self {
            WindField::FilteredNoise {
                base,
                sigma,
                correlation_time,
                seed,
            } => {
                let n = (duration / dt).ceil() as usize + 2;
                let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(default_seed));
                let a = (-dt / correlation_time).exp();
                let scale = sigma * (1.0 - a * a).sqrt();
                let mut samples = Vec::with_capacity(n);
                let mut gust = Vec2::ZERO;
                for _ in 0..n {
                    samples.push(*base + gust);
                    let nx: f64 = StandardNormal.sample(&mut rng);
                    let ny: f64 = StandardNormal.sample(&mut rng);
                    gust = gust * a + Vec2::new(nx, ny) * scale;
                }
                WindSampler {
                    kind: SamplerKind::Table { dt, samples },
                }
            }
            other => WindSampler {
                kind: SamplerKind::Analytic(other.clone()),
            },
        }
    }
}

enum SamplerKind {
    Analytic(WindField),
    Table { dt: f64, samples: Vec<Vec2> },
}

/// Pure time-to-wind lookup for one run.
pub struct WindSampler {
    kind: SamplerKind,
}

impl WindSampler {
    pub fn sample(&self, t: f64) -> Vec2 {
        match &self.kind {
            SamplerKind::Analytic(WindField::Constant(w)) => *w,
            SamplerKind::Analytic(WindField::PiecewiseRamp(knots)) => {
                if t <= knots[0].0 {
                    return knots[0].1;
                }
                let last = knots[knots.len() - 1];
                if t >= last.0 {
                    return last.1;
                }
                let i = knots.partition_point(|(kt, _)| *kt <= t);
                let (t0, w0) = knots[i - 1];
                let (t1, w1) = knots[i];
                let u = (t - t0) / (t1 - t0);
                w0 + (w1 - w0) * u
            }
            SamplerKind::Analytic(WindField::OneMinusCosGust {
                base,
                amplitude,
                t0,
                period,
            }) => {
                if t < *t0 || t > t0 + period {
                    *base
                } else {
                    let phase = std::f64::consts::TAU * (t - t0) / period;
                    *base + *amplitude * (0.5 * (1.0 - phase.cos()))
                }
            }
            SamplerKind::Analytic(WindField::FilteredNoise { .. }) => {
                unreachable!("stochastic fields are tabulated by sampler()")
            }
            SamplerKind::Table { dt, samples } => {
                let s = (t / dt).clamp(0.0, (samples.len() - 1) as f64);
                let i = (s.floor() as usize).min(samples.len() - 2);
                let u = s - i as f64;
                samples[i] + (samples[i + 1] - samples[i]) * u
            }
        }
    }
}

/// A complete closed-loop experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub path: PathRef,
    pub wind: WindField,
    pub initial: InitialState,
    pub guidance: GuidanceConfig,
    pub sim: SimConfig,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.path.validate()?;
        self.wind.validate()?;
        self.guidance.validate()?;
        self.sim.validate()?;
        if !self.initial.position.is_finite() {
            return Err(ConfigError::new("initial.position", "must be finite"));
        }
        ConfigError::require(
            self.initial.airspeed > V_A_FLOOR && self.initial.airspeed.is_finite(),
            "initial.airspeed",
            format!(
                "must exceed the {V_A_FLOOR} m/s guidance floor, got {}",
                self.initial.airspeed
            ),
        )?;
        ConfigError::require(
            self.initial.roll.abs() <= self.sim.phi_max,
            "initial.roll",
            format!("must be within the roll limit, got {}", self.initial.roll),
        )
    }
}

/// Snapshot of one control instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRow {
    pub t: f64,
    pub r: Vec2,
    pub v_g: Vec2,
    pub v_a: f64,
    /// Heading, rad.
    pub xi: f64,
    /// Roll, rad.
    pub phi: f64,
    pub roll_ref: f64,
    pub v_a_ref: f64,
    pub e_norm: f64,
    pub feas: f64,
    pub lambda: f64,
    pub beta: f64,
    pub v_g_fwd: f64,
    pub wind: Vec2,
    /// Angle of the commanded air-relative direction, rad.
    pub heading_ref: f64,
    pub asin_saturated: bool,
}

/// Full run log, one row per control instant, first row at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimLog {
    pub rows: Vec<LogRow>,
}

impl SimLog {
    pub const CSV_HEADER: &'static str =
        "t,x,y,vg_x,vg_y,v_a,xi,phi,roll_ref,v_a_ref,e_norm,feas,lambda,beta,v_g_fwd,w_x,w_y";

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for row in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                row.t,
                row.r.x,
                row.r.y,
                row.v_g.x,
                row.v_g.y,
                row.v_a,
                row.xi,
                row.phi,
                row.roll_ref,
                row.v_a_ref,
                row.e_norm,
                row.feas,
                row.lambda,
                row.beta,
                row.v_g_fwd,
                row.wind.x,
                row.wind.y
            )?;
        }
        Ok(())
    }

    pub fn last(&self) -> &LogRow {
        self.rows.last().expect("runs log at least the initial row")
    }
}

struct Body {
    r: Vec2,
    xi: f64,
    phi: f64,
    v_a: f64,
}

struct Deriv {
    r: Vec2,
    xi: f64,
    phi: f64,
    v_a: f64,
}

fn deriv(b: &Body, w: Vec2, roll_ref: f64, v_a_ref: f64, g: f64, sim: &SimConfig) -> Deriv {
    let phi_dot = sat(
        (roll_ref - b.phi) / sim.tau_roll,
        -sim.roll_rate_max,
        sim.roll_rate_max,
    );
    let v_a_dot = sat(
        (v_a_ref - b.v_a) / sim.tau_airspeed,
        -sim.accel_limit,
        sim.accel_limit,
    );
    let xi_dot = g * b.phi.tan() / b.v_a.max(V_A_FLOOR);
    let heading = Vec2::new(b.xi.cos(), b.xi.sin());
    Deriv {
        r: heading * b.v_a + w,
        xi: xi_dot,
        phi: phi_dot,
        v_a: v_a_dot,
    }
}

fn advance(b: &Body, d: &Deriv, h: f64) -> Body {
    Body {
        r: b.r + d.r * h,
        xi: b.xi + d.xi * h,
        phi: b.phi + d.phi * h,
        v_a: b.v_a + d.v_a * h,
    }
}

#[allow(clippy::too_many_arguments)]
fn rk4_step(
    b: &Body,
    t: f64,
    h: f64,
    wind: &WindSampler,
    roll_ref: f64,
    v_a_ref: f64,
    g: f64,
    sim: &SimConfig,
) -> Body {
    let w0 = wind.sample(t);
    let wh = wind.sample(t + 0.5 * h);
    let w1 = wind.sample(t + h);
    let k1 = deriv(b, w0, roll_ref, v_a_ref, g, sim);
    let k2 = deriv(&advance(b, &k1, 0.5 * h), wh, roll_ref, v_a_ref, g, sim);
    let k3 = deriv(&advance(b, &k2, 0.5 * h), wh, roll_ref, v_a_ref, g, sim);
    let k4 = deriv(&advance(b, &k3, h), w1, roll_ref, v_a_ref, g, sim);
    let mut next = Body {
        r: b.r + (k1.r + (k2.r + k3.r) * 2.0 + k4.r) * (h / 6.0),
        xi: b.xi + (k1.xi + 2.0 * (k2.xi + k3.xi) + k4.xi) * (h / 6.0),
        phi: b.phi + (k1.phi + 2.0 * (k2.phi + k3.phi) + k4.phi) * (h / 6.0),
        v_a: b.v_a + (k1.v_a + 2.0 * (k2.v_a + k3.v_a) + k4.v_a) * (h / 6.0),
    };
    next.xi = wrap(next.xi);
    next.phi = sat(next.phi, -sim.phi_max, sim.phi_max);
    next
}

pub(crate) fn run_with(kind: FeasKind, scenario: &Scenario) -> Result<SimLog, SimError> {
    scenario.validate()?;
    let sim = &scenario.sim;
    let period = sim.control_period();
    let substeps = (period / sim.dt_sim).round() as usize;
    let h = period / substeps as f64;
    let n_ctrl = (sim.duration * sim.guidance_rate).round() as usize;
    let wind = scenario.wind.sampler(sim.duration, sim.dt_sim, sim.seed);

    let mut body = Body {
        r: scenario.initial.position,
        xi: scenario.initial.heading.rad(),
        phi: scenario.initial.roll,
        v_a: scenario.initial.airspeed,
    };
    let mut wind_est = wind.sample(0.0);
    let est_alpha = if sim.wind_estimator_tau > 0.0 {
        1.0 - (-sim.dt_sim / sim.wind_estimator_tau).exp()
    } else {
        1.0
    };

    let mut rows = Vec::with_capacity(n_ctrl + 1);
    for step in 0..=n_ctrl {
        let t = step as f64 * period;
        let w_true = wind.sample(t);
        let heading = Vec2::new(body.xi.cos(), body.xi.sin());
        let v_g = heading * body.v_a + w_true;
        if !(body.r.is_finite() && v_g.is_finite() && body.phi.is_finite() && body.v_a.is_finite())
        {
            return Err(SimError::NonFinite { t, what: "state" });
        }

        let state = VehicleState { r: body.r, v_g };
        let out = guidance_step_with(kind, &state, wind_est, &scenario.path, &scenario.guidance);
        let tele = &out.telemetry;
        rows.push(LogRow {
            t,
            r: body.r,
            v_g,
            v_a: body.v_a,
            xi: body.xi,
            phi: body.phi,
            roll_ref: out.roll_ref,
            v_a_ref: out.v_a_ref,
            e_norm: tele.e_norm,
            feas: tele.feas,
            lambda: tele.lambda,
            beta: tele.beta,
            v_g_fwd: tele.v_g_fwd,
            wind: w_true,
            heading_ref: tele.lookahead_air.angle().map_or(0.0, |a| a.rad()),
            asin_saturated: tele.flags.asin_saturated,
        });
        if step == n_ctrl {
            break;
        }

        for sub in 0..substeps {
            let ts = t + sub as f64 * h;
            body = rk4_step(
                &body,
                ts,
                h,
                &wind,
                out.roll_ref,
                out.v_a_ref,
                scenario.guidance.g,
                sim,
            );
            if sim.wind_estimator_tau > 0.0 {
                wind_est = wind_est + (wind.sample(ts + h) - wind_est) * est_alpha;
            } else {
                wind_est = wind.sample(ts + h);
            }
        }
    }
    Ok(SimLog { rows })
}

/// Runs a scenario to completion and returns the full log.
pub fn run(scenario: &Scenario) -> Result<SimLog, SimError> {
    run_with(FeasKind::Buffered, scenario)
}

/// [`run`] with the superseded sharp feasibility weight, for regression
/// comparison only.
pub fn run_legacy_feas(scenario: &Scenario) -> Result<SimLog, SimError> {
    run_with(FeasKind::LegacySharp, scenario)
}
