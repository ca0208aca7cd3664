//! Planar vector and angle primitives shared by the guidance stack.
//!
//! All angles are radians, wrapped to `(-pi, pi]`, with counter-clockwise
//! positive. Vectors are east-north planar coordinates in meters (or m/s for
//! velocities); callers pick the frame, the math here is frame-agnostic.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Norm threshold below which a vector is treated as directionless.
pub const EPS_VEC: f64 = 1e-6;

/// Wraps an angle in radians to `(-pi, pi]`.
#[inline]
pub fn wrap(rad: f64) -> f64 {
    PI - (PI - rad).rem_euclid(TAU)
}

/// Clamps `v` to `[lo, hi]`. `lo > hi` is a programming error.
#[inline]
pub fn sat(v: f64, lo: f64, hi: f64) -> f64 {
    assert!(lo <= hi, "sat: lo ({lo}) > hi ({hi})");
    v.clamp(lo, hi)
}

/// An angle stored wrapped to `(-pi, pi]`.
///
/// Sums and differences re-wrap, so `Angle` arithmetic never accumulates
/// whole turns.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);

    /// Wraps `rad` into `(-pi, pi]`.
    #[inline]
    pub fn new(rad: f64) -> Self {
        Angle(wrap(rad))
    }

    /// The wrapped value in radians.
    #[inline]
    pub fn rad(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn abs(self) -> f64 {
        self.0.abs()
    }

    #[inline]
    pub fn sin(self) -> f64 {
        self.0.sin()
    }

    #[inline]
    pub fn cos(self) -> f64 {
        self.0.cos()
    }

    /// Unit vector at this angle from the x-axis.
    #[inline]
    pub fn unit_vec(self) -> Vec2 {
        Vec2::new(self.0.cos(), self.0.sin())
    }
}

impl Add for Angle {
    type Output = Angle;
    #[inline]
    fn add(self, rhs: Angle) -> Angle {
        Angle::new(self.0 + rhs.0)
    }
}

impl Sub for Angle {
    type Output = Angle;
    #[inline]
    fn sub(self, rhs: Angle) -> Angle {
        Angle::new(self.0 - rhs.0)
    }
}

impl Neg for Angle {
    type Output = Angle;
    #[inline]
    fn neg(self) -> Angle {
        Angle::new(-self.0)
    }
}

/// Planar vector, column-major `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    #[inline]
    pub fn dot(self, rhs: Vec2) -> f64 {
        self.x * rhs.x + self.y * rhs.y
    }

    /// Planar cross product (z-component of the 3D cross), positive when
    /// `rhs` lies counter-clockwise of `self`.
    #[inline]
    pub fn cross(self, rhs: Vec2) -> f64 {
        self.x * rhs.y - self.y * rhs.x
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Unit vector, or `None` when the norm is at or below [`EPS_VEC`].
    #[inline]
    pub fn unit(self) -> Option<Vec2> {
        let n = self.norm();
        if n <= EPS_VEC {
            None
        } else {
            Some(self * (1.0 / n))
        }
    }

    /// Direction of this vector from the x-axis; `None` when degenerate.
    #[inline]
    pub fn angle(self) -> Option<Angle> {
        if self.norm() <= EPS_VEC {
            None
        } else {
            Some(Angle::new(self.y.atan2(self.x)))
        }
    }

    /// Counter-clockwise rotation by `a`.
    #[inline]
    pub fn rotated(self, a: Angle) -> Vec2 {
        let (s, c) = (a.sin(), a.cos());
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    /// This vector rotated +90 degrees (counter-clockwise perpendicular).
    #[inline]
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    #[inline]
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    #[inline]
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

/// Signed angle from `a` to `b`, counter-clockwise positive, in `(-pi, pi]`.
///
/// Returns zero when either vector is degenerate (norm at or below
/// [`EPS_VEC`]), so callers never see NaN from a vanishing operand.
#[inline]
pub fn signed_angle(a: Vec2, b: Vec2) -> Angle {
    if a.norm() <= EPS_VEC || b.norm() <= EPS_VEC {
        return Angle::ZERO;
    }
    Angle::new(a.cross(b).atan2(a.dot(b)))
}

/// Counter-clockwise rotation of `v` by `a`; free-function form of
/// [`Vec2::rotated`].
#[inline]
pub fn rot(v: Vec2, a: Angle) -> Vec2 {
    v.rotated(a)
}
