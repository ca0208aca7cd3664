//! Path references and closest-point projection.
//!
//! Guidance follows either an infinite line or a circle (loiter). A
//! projection yields the closest point, the unit tangent there, the signed
//! curvature, and the track-error vector pointing from the vehicle to the
//! path. Curvature is positive for counter-clockwise circles, negative for
//! clockwise, zero for lines.

use crate::error::ConfigError;
use crate::geom::Vec2;

/// Smallest representable circle radius, in meters.
pub const R_MIN: f64 = 1.0;

/// Turn direction of a circular path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TurnDir {
    Ccw,
    Cw,
}

/// A followable path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathRef {
    Line {
        origin: Vec2,
        /// Unit direction of travel.
        dir: Vec2,
    },
    Circle {
        center: Vec2,
        /// Radius in meters, at least [`R_MIN`].
        radius: f64,
        turn: TurnDir,
    },
}

/// Result of projecting a position onto a path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathProjection {
    /// Closest point on the path.
    pub closest: Vec2,
    /// Unit tangent at the closest point, in the direction of travel.
    pub tangent: Vec2,
    /// Signed curvature at the closest point, 1/m.
    pub curvature: f64,
    /// Vector from the vehicle to the closest point.
    pub track_error: Vec2,
    /// Set when the position gave no unique projection (circle center);
    /// the zero-bearing point east of the center is used.
    pub degenerate: bool,
}

impl PathRef {
    /// Line through `origin` along `dir`; `dir` is normalized here.
    pub fn line(origin: Vec2, dir: Vec2) -> Result<PathRef, ConfigError> {
        let dir = dir.unit().ok_or_else(|| {
            ConfigError::new("path.direction", "direction vector has (near-)zero norm")
        })?;
        Ok(PathRef::Line { origin, dir })
    }

    /// Circle of `radius` meters around `center`.
    pub fn circle(center: Vec2, radius: f64, turn: TurnDir) -> Result<PathRef, ConfigError> {
        let path = PathRef::Circle {
            center,
            radius,
            turn,
        };
        path.validate()?;
        Ok(path)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        match self {
            PathRef::Line { dir, .. } => {
                if (dir.norm() - 1.0).abs() > 1e-9 {
                    return Err(ConfigError::new(
                        "path.direction",
                        format!("must be unit length, norm is {}", dir.norm()),
                    ));
                }
            }
            PathRef::Circle { radius, .. } => {
                if !radius.is_finite() || *radius < R_MIN {
                    return Err(ConfigError::new(
                        "path.radius",
                        format!("must be at least {R_MIN} m, got {radius}"),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Closest-point projection of `r`.
    pub fn project(&self, r: Vec2) -> PathProjection {
        match *self {
            PathRef::Line { origin, dir } => {
                let closest = origin + dir * (r - origin).dot(dir);
                PathProjection {
                    closest,
                    tangent: dir,
                    curvature: 0.0,
                    track_error: closest - r,
                    degenerate: false,
                }
            }
            PathRef::Circle {
                center,
                radius,
                turn,
            } => {
                let offset = r - center;
                let (radial, degenerate) = match offset.unit() {
                    Some(u) => (u, false),
                    None => (Vec2::new(1.0, 0.0), true),
                };
                let closest = center + radial * radius;
                let (tangent, curvature) = match turn {
                    TurnDir::Ccw => (radial.perp(), 1.0 / radius),
                    TurnDir::Cw => (-radial.perp(), -1.0 / radius),
                };
                PathProjection {
                    closest,
                    tangent,
                    curvature,
                    track_error: closest - r,
                    degenerate,
                }
            }
        }
    }
}
