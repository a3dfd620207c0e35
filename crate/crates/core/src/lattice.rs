//! Translation lattices, their fundamental parallelepipeds and covering
//! radii.
//!
//! A lattice is generated by `tau1 = (t11, 0, t13)` and
//! `tau2 = (t21, t22, t23)`; its commutator is a fiber translation by
//! `t11 * t22`, whose `k`-th root is `tau3`. Words such as `T12` are read in
//! order of application: `T12` is the image of the origin under `tau1`
//! followed by `tau2`.

use std::thread;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{NilError, Result};
use crate::nil::{ball_volume, compose, distance, is_ball_convex, NilPoint, NilTranslation};
use crate::simplex::{CircumsphereResult, TranslationTetrahedron};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NilLattice {
    pub t11: f64,
    pub t13: f64,
    pub t21: f64,
    pub t22: f64,
    pub t23: f64,
    pub k: u32,
}

impl NilLattice {
    pub fn new(t11: f64, t13: f64, t21: f64, t22: f64, t23: f64, k: u32) -> Result<Self> {
        let lat = Self {
            t11,
            t13,
            t21,
            t22,
            t23,
            k,
        };
        lat.validate()?;
        Ok(lat)
    }

    /// Lattice with `k = 1` from `[t11, t13, t21, t22, t23]`.
    pub fn from_params(p: [f64; 5]) -> Result<Self> {
        Self::new(p[0], p[1], p[2], p[3], p[4], 1)
    }

    pub fn params(&self) -> [f64; 5] {
        [self.t11, self.t13, self.t21, self.t22, self.t23]
    }

    pub fn validate(&self) -> Result<()> {
        if !self.params().iter().all(|v| v.is_finite()) {
            return Err(NilError::InvalidLattice("non-finite parameter".into()));
        }
        if self.t11 <= 0.0 || self.t22 <= 0.0 {
            return Err(NilError::InvalidLattice(format!(
                "t11 and t22 must be positive (got {}, {})",
                self.t11, self.t22
            )));
        }
        if self.k == 0 {
            return Err(NilError::InvalidLattice("k must be at least 1".into()));
        }
        Ok(())
    }

    /// The packing-optimal lattice with hexagonal projection, used as a
    /// reference covering.
    pub fn hexagonal_packing() -> Self {
        Self {
            t11: 1.31225,
            t13: 0.74565,
            t21: 0.65613,
            t22: 1.13644,
            t23: 1.11847,
            k: 1,
        }
    }

    pub fn unit() -> Self {
        Self {
            t11: 1.0,
            t13: 1.0,
            t21: 1.0,
            t22: 1.0,
            t23: 1.0,
            k: 1,
        }
    }

    pub fn tau1(&self) -> NilTranslation {
        NilTranslation::new(self.t11, 0.0, self.t13)
    }

    pub fn tau2(&self) -> NilTranslation {
        NilTranslation::new(self.t21, self.t22, self.t23)
    }
}

/// `tau3 = (0, 0, t11 t22 / k)`.
pub fn fiber_translation(lat: &NilLattice) -> NilTranslation {
    NilTranslation::new(0.0, 0.0, lat.t11 * lat.t22 / lat.k as f64)
}

/// `tau2^-1 tau1^-1 tau2 tau1`, applied in that order.
pub fn commutator(lat: &NilLattice) -> NilTranslation {
    let (t1, t2) = (lat.tau1(), lat.tau2());
    [t2.inverse(), t1.inverse(), t2, t1]
        .into_iter()
        .fold(NilTranslation::IDENTITY, |acc, t| compose(t, acc))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Parallelepiped {
    pub o: NilPoint,
    pub t1: NilPoint,
    pub t2: NilPoint,
    pub t3: NilPoint,
    pub t12: NilPoint,
    pub t21: NilPoint,
    pub t23: NilPoint,
    pub t213: NilPoint,
    pub t13: NilPoint,
}

pub fn parallelepiped_vertices(lat: &NilLattice) -> Parallelepiped {
    let NilLattice {
        t11,
        t13,
        t21,
        t22,
        t23,
        k,
    } = *lat;
    let k = k as f64;
    let h = t11 * t22;
    Parallelepiped {
        o: NilPoint::ORIGIN,
        t1: NilPoint::new(t11, 0.0, t13),
        t2: NilPoint::new(t21, t22, t23),
        t3: NilPoint::new(0.0, 0.0, h / k),
        t13: NilPoint::new(t11, 0.0, h / k + t13),
        t12: NilPoint::new(t11 + t21, t22, t23 + t13),
        t21: NilPoint::new(t11 + t21, t22, h + t13 + t23),
        t23: NilPoint::new(t21, t22, t23 + h / k),
        t213: NilPoint::new(t11 + t21, t22, (k + 1.0) * h / k + t13 + t23),
    }
}

/// `(t11 t22)^2 / k`.
pub fn parallelepiped_volume(lat: &NilLattice) -> f64 {
    (lat.t11 * lat.t22).powi(2) / lat.k as f64
}

/// Six tetrahedra tiling the Euclidean prism over the parallelogram
/// `O T1 T12 T2` with top `T3 T13 T21 T23`.
///
/// The far half (over `T1 T12 T2`) is cut along the diagonal `T1 T21`.
/// Cutting it along `T12 T13` also tiles the prism, but its circumspheres
/// are far larger and do not give the covering radius.
pub fn decompose_tetrahedra(lat: &NilLattice) -> Result<[TranslationTetrahedron; 6]> {
    if lat.k != 1 {
        return Err(NilError::DecompositionRequiresK1(lat.k));
    }
    let v = parallelepiped_vertices(lat);
    let t = TranslationTetrahedron::new;
    Ok([
        t(v.o, v.t1, v.t2, v.t3),
        t(v.t3, v.t1, v.t23, v.t13),
        t(v.t3, v.t1, v.t23, v.t2),
        t(v.t12, v.t1, v.t23, v.t2),
        t(v.t12, v.t1, v.t23, v.t21),
        t(v.t1, v.t21, v.t23, v.t13),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerificationRecord {
    pub samples: usize,
    pub window: i64,
    pub max_min_distance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringReport {
    pub lattice: NilLattice,
    pub tetra_radii: [f64; 6],
    pub covering_radius: f64,
    pub ball_volume: f64,
    pub cell_volume: f64,
    pub density: f64,
    pub convex: bool,
    pub verification: Option<VerificationRecord>,
    #[serde(skip)]
    pub spheres: Vec<CircumsphereResult>,
}

/// Covering radius as the largest circumradius of the six tetrahedra, with
/// the resulting density.
pub fn covering_radius(lat: &NilLattice) -> Result<CoveringReport> {
    lat.validate()?;
    let spheres = decompose_tetrahedra(lat)?
        .iter()
        .map(|t| t.circumsphere())
        .collect::<Result<Vec<_>>>()?;
    let mut tetra_radii = [0.0; 6];
    for (r, s) in tetra_radii.iter_mut().zip(&spheres) {
        *r = s.radius;
    }
    let covering_radius = tetra_radii.iter().copied().fold(f64::MIN, f64::max);
    let ball_volume = ball_volume(covering_radius);
    let cell_volume = parallelepiped_volume(lat);
    Ok(CoveringReport {
        lattice: *lat,
        tetra_radii,
        covering_radius,
        ball_volume,
        cell_volume,
        density: ball_volume / cell_volume,
        convex: is_ball_convex(covering_radius),
        verification: None,
        spheres,
    })
}

/// Orbit of the origin under `tau3^l tau2^j tau1^i`, `|i|, |j|, |l| <= window`.
pub fn lattice_orbit(lat: &NilLattice, window: i64) -> Vec<NilPoint> {
    let (t1, t2, t3) = (lat.tau1(), lat.tau2(), fiber_translation(lat));
    let mut out: Vec<NilPoint> = Vec::new();
    for i in -window..=window {
        for j in -window..=window {
            for l in -window..=window {
                let t = compose(t3.pow(l), compose(t2.pow(j), t1.pow(i)));
                let p = t.origin_image();
                if !out.contains(&p) {
                    out.push(p);
                }
            }
        }
    }
    out
}

/// Additive recurrence with the generalized golden ratio for dimension 3.
fn low_discrepancy(n: usize, shift: [f64; 3]) -> impl Iterator<Item = [f64; 3]> {
    // Real root of x^4 = x + 1.
    let g = 1.220_744_084_605_759_5_f64;
    let alpha = [1.0 / g, 1.0 / (g * g), 1.0 / (g * g * g)];
    (0..n).map(move |i| {
        let i = i as f64 + 1.0;
        [0, 1, 2].map(|d| (shift[d] + i * alpha[d]).fract())
    })
}

/// Largest distance from `n` quasi-random points of the fundamental prism
/// to the lattice orbit within `window`; passes when at most
/// `radius + 1e-6`.
///
/// The sample sequence is shifted by a vector drawn from `rng_seed`, so runs
/// with equal arguments are identical.
pub fn verify_covering(
    lat: &NilLattice,
    radius: f64,
    n: usize,
    window: i64,
    rng_seed: u64,
) -> Result<VerificationRecord> {
    lat.validate()?;
    if lat.k != 1 {
        return Err(NilError::DecompositionRequiresK1(lat.k));
    }
    if n == 0 || window < 1 {
        return Err(NilError::InvalidArgument(format!(
            "need samples >= 1 and window >= 1 (got {n}, {window})"
        )));
    }
    let orbit = lattice_orbit(lat, window);
    let v = parallelepiped_vertices(lat);
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let shift: [f64; 3] = [rng.gen(), rng.gen(), rng.gen()];
    let points: Vec<NilPoint> = low_discrepancy(n, shift)
        .map(|[s1, s2, s3]| {
            NilPoint::new(
                s1 * v.t1.x + s2 * v.t2.x + s3 * v.t3.x,
                s1 * v.t1.y + s2 * v.t2.y + s3 * v.t3.y,
                s1 * v.t1.z + s2 * v.t2.z + s3 * v.t3.z,
            )
        })
        .collect();
    let nearest = |p: &NilPoint| orbit.iter().map(|q| distance(*q, *p)).fold(f64::INFINITY, f64::min);
    let threads = thread::available_parallelism().map_or(1, |n| n.get()).min(16);
    let chunk = points.len().div_ceil(threads);
    let max_min_distance = thread::scope(|s| {
        let handles: Vec<_> = points
            .chunks(chunk)
            .map(|c| s.spawn(move || c.iter().map(nearest).fold(0.0_f64, f64::max)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("verifier worker panicked"))
            .fold(0.0_f64, f64::max)
    });
    Ok(VerificationRecord {
        samples: n,
        window,
        max_min_distance,
        pass: max_min_distance <= radius + 1e-6,
    })
}
