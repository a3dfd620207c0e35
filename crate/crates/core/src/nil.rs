//! Points, translations and translation curves of Nil geometry.
//!
//! Nil is modelled on the Heisenberg group acting projectively on affine
//! space. A point is stored by its affine coordinates `(x, y, z)`, i.e. the
//! homogeneous point `(1; x, y, z)`. A translation `(a, b, c)` is the unique
//! group element carrying the origin to `(a, b, c)`; it acts on points by
//!
//! ```text
//! (x, y, z) -> (x + a, y + b, z + a*y + c)
//! ```
//!
//! which is the Heisenberg matrix product `T * P`. The translation distance
//! from the origin is the arc length of the translation curve
//! `t -> (u t, v t, uv t^2 / 2 + w t)` and has the closed form
//! `sqrt(x^2 + y^2 + (z - xy/2)^2)`: after the canonical shear
//! `(x, y, z) -> (x, y, z - xy/2)` it is the Euclidean norm.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{NilError, Result};

/// A point of the model, given by affine coordinates of `(1; x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NilPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl NilPoint {
    pub const ORIGIN: NilPoint = NilPoint { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Euclidean distance between the affine coordinate triples.
    pub fn euclidean_distance(self, other: NilPoint) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2) + (self.z - other.z).powi(2)).sqrt()
    }
}

impl From<[f64; 3]> for NilPoint {
    fn from(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }
}

/// A left translation, identified with the image `(a, b, c)` of the origin.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NilTranslation {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl NilTranslation {
    pub const IDENTITY: NilTranslation = NilTranslation { a: 0.0, b: 0.0, c: 0.0 };

    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    /// The translation carrying the origin onto `p`.
    pub fn to_point(p: NilPoint) -> Self {
        Self::new(p.x, p.y, p.z)
    }

    /// Image of the origin.
    pub fn origin_image(self) -> NilPoint {
        NilPoint::new(self.a, self.b, self.c)
    }

    pub fn inverse(self) -> Self {
        inverse(self)
    }

    /// `self * other`; on points, `other` acts first.
    pub fn then_after(self, other: NilTranslation) -> Self {
        compose(self, other)
    }

    pub fn apply(self, p: NilPoint) -> NilPoint {
        translate(p, self)
    }

    /// Integer power, `n` may be negative.
    pub fn pow(self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { self };
        (0..n.unsigned_abs()).fold(Self::IDENTITY, |acc, _| compose(acc, base))
    }
}

/// Apply translation `t` to point `p`.
pub fn translate(p: NilPoint, t: NilTranslation) -> NilPoint {
    NilPoint::new(p.x + t.a, p.y + t.b, p.z + t.a * p.y + t.c)
}

/// Heisenberg product `t1 * t2`. As a map on points this is `t1 ∘ t2`,
/// so `translate(p, compose(t1, t2)) == translate(translate(p, t2), t1)`.
pub fn compose(t1: NilTranslation, t2: NilTranslation) -> NilTranslation {
    NilTranslation::new(t1.a + t2.a, t1.b + t2.b, t1.c + t2.c + t1.a * t2.b)
}

pub fn inverse(t: NilTranslation) -> NilTranslation {
    NilTranslation::new(-t.a, -t.b, t.a * t.b - t.c)
}

/// Canonical shear `(x, y, z) -> (x, y, z - xy/2)`.
///
/// In these coordinates origin-centred rotations are linear and the
/// translation distance from the origin is the Euclidean norm.
pub fn shear_to_canonical(p: NilPoint) -> Vector3<f64> {
    Vector3::new(p.x, p.y, p.z - 0.5 * p.x * p.y)
}

/// Inverse of [`shear_to_canonical`].
pub fn shear_from_canonical(v: Vector3<f64>) -> NilPoint {
    NilPoint::new(v.x, v.y, v.z + 0.5 * v.x * v.y)
}

/// Rotation through `omega` about the z axis at the origin.
pub fn rotate_about_origin(p: NilPoint, omega: f64) -> NilPoint {
    let (s, c) = omega.sin_cos();
    let (s2, c2) = (2.0 * omega).sin_cos();
    NilPoint::new(
        p.x * c - p.y * s,
        p.x * s + p.y * c,
        p.z - 0.5 * p.x * p.y + 0.25 * (p.x * p.x - p.y * p.y) * s2 + 0.5 * p.x * p.y * c2,
    )
}

/// Initial velocity of a translation curve at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

impl TangentVector {
    pub const fn new(u: f64, v: f64, w: f64) -> Self {
        Self { u, v, w }
    }

    /// Unit tangent with longitude `phi` and altitude `theta`.
    pub fn from_angles(phi: f64, theta: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self::new(ct * cp, ct * sp, st)
    }

    pub fn norm(self) -> f64 {
        (self.u * self.u + self.v * self.v + self.w * self.w).sqrt()
    }

    pub fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.u, self.v, self.w)
    }
}

/// Geographic parameters of a translation curve from the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveParams {
    pub phi: f64,
    pub theta: f64,
    pub r: f64,
}

impl CurveParams {
    pub fn tangent(self) -> TangentVector {
        TangentVector::from_angles(self.phi, self.theta)
    }

    pub fn endpoint(self) -> NilPoint {
        sphere_point(self.r, self.phi, self.theta)
    }
}

/// Point reached at parameter `t` along the translation curve with initial
/// velocity `v`.
pub fn translation_curve(v: TangentVector, t: f64) -> NilPoint {
    NilPoint::new(v.u * t, v.v * t, 0.5 * v.u * v.v * t * t + v.w * t)
}

/// Point of the translation sphere of radius `r` about the origin.
pub fn sphere_point(r: f64, phi: f64, theta: f64) -> NilPoint {
    translation_curve(TangentVector::from_angles(phi, theta), r)
}

/// Inverse cotangent with values in `(0, pi)`.
///
/// Evaluated as `atan(1/t)` so that large arguments keep full relative
/// precision; `FRAC_PI_2 - atan(t)` cancels there.
pub(crate) fn arccot(t: f64) -> f64 {
    if t == 0.0 {
        FRAC_PI_2
    } else if t > 0.0 {
        (1.0 / t).atan()
    } else {
        PI + (1.0 / t).atan()
    }
}

/// `arccot(t)` brought into `[-pi/2, pi/2]`, i.e. `atan(1/t)`; folding the
/// `(0, pi)` value directly would cancel near `pi`.
fn altitude(t: f64) -> f64 {
    (1.0 / t).atan()
}

/// Curve parameters `(phi, theta, r)` of the translation curve from the
/// origin to `p`, dispatched on the zero pattern of the coordinates.
pub fn curve_params_from_point(p: NilPoint) -> Result<CurveParams> {
    let NilPoint { x: a, y: b, z: c } = p;
    let half_pi_sign = |s: f64| FRAC_PI_2.copysign(s);
    let params = match (a != 0.0, b != 0.0, c != 0.0) {
        (false, false, false) => return Err(NilError::ZeroLengthCurve),
        (true, true, _) => {
            let phi0 = arccot(a / b);
            let phi = if b < 0.0 { phi0 - PI } else { phi0 };
            let w = c - 0.5 * a * b;
            let rho = a.hypot(b);
            if w == 0.0 {
                CurveParams {
                    phi,
                    theta: 0.0,
                    r: rho,
                }
            } else {
                let theta = altitude(rho / w);
                CurveParams {
                    phi,
                    theta,
                    r: (w / theta.sin()).abs(),
                }
            }
        }
        (true, false, true) => {
            let phi = if a > 0.0 { 0.0 } else { PI };
            let theta = altitude(a.abs() / c);
            CurveParams {
                phi,
                theta,
                r: (a / theta.cos()).abs(),
            }
        }
        (true, false, false) => CurveParams {
            phi: if a > 0.0 { 0.0 } else { PI },
            theta: 0.0,
            r: a.abs(),
        },
        (false, true, false) => CurveParams {
            phi: half_pi_sign(b),
            theta: 0.0,
            r: b.abs(),
        },
        (false, false, true) => CurveParams {
            phi: 0.0,
            theta: half_pi_sign(c),
            r: c.abs(),
        },
        // Not listed among the coordinate cases; same construction as a = 0 limit.
        (false, true, true) => {
            let theta = altitude(b.abs() / c);
            CurveParams {
                phi: half_pi_sign(b),
                theta,
                r: (c / theta.sin()).abs(),
            }
        }
    };
    Ok(params)
}

/// Translation distance from the origin.
pub fn distance_from_origin(p: NilPoint) -> f64 {
    shear_to_canonical(p).norm()
}

/// Translation distance `d(p, q)`: the length of the translation curve from
/// `p` to `q`, measured after moving `p` to the origin.
pub fn distance(p: NilPoint, q: NilPoint) -> f64 {
    distance_from_origin(translate(q, inverse(NilTranslation::to_point(p))))
}

/// Volume of a translation ball; equal to the Euclidean ball volume.
pub fn ball_volume(r: f64) -> f64 {
    4.0 / 3.0 * PI * r.powi(3)
}

/// Translation balls are convex in the affine model exactly for `r <= 2`.
pub fn is_ball_convex(r: f64) -> bool {
    (0.0..=2.0).contains(&r)
}
