//! Translation triangles and tetrahedra, and circumscribed translation
//! spheres.

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use crate::error::{NilError, Result};
use crate::nil::{distance, inverse, shear_to_canonical, translate, NilPoint, NilTranslation};
use crate::poly;

/// `p` seen from `base`: the image of `p` under the translation taking
/// `base` to the origin.
fn relative(base: NilPoint, p: NilPoint) -> NilPoint {
    translate(p, inverse(NilTranslation::to_point(base)))
}

/// `(y, w, value of the fourth condition)` at one scan abscissa.
type LocusPoint = (f64, f64, f64);

/// Seeds for circumcentres far from the vertices, in the frame used by
/// `circumsphere` (sheared vertices `q`, unknowns `(x, y, w)`).
///
/// For fixed `x`, equidistance from the first three vertices is a cubic in
/// `y`. Its real roots are followed over sinh-spaced `x` out to `1e5` times
/// the extent, and every sign change of the fourth condition along a branch
/// yields a seed.
fn locus_scan_seeds(q: &[Vector3<f64>; 3], extent: f64) -> Vec<Vector3<f64>> {
    let lines = |x: f64| {
        q.map(|v| {
            let (a, b, g) = (v.x, v.y, v.z);
            let d = [g - 0.5 * b * x, 0.5 * a];
            let d2 = poly::mul(&d, &d);
            let n = [d2[0] + a * a + b * b - 2.0 * a * x, d2[1] - 2.0 * b, d2[2]];
            (d, n)
        })
    };
    let ev = |p: &[f64], s: f64| p.iter().rev().fold(0.0, |acc, &k| acc * s + k);
    let points = |x: f64| -> Vec<LocusPoint> {
        let [(d1, n1), (d2, n2), (d3, n3)] = lines(x);
        let eq = poly::sub(&poly::mul(&n1, &d2), &poly::mul(&n2, &d1));
        poly::real_roots(&eq)
            .into_iter()
            .filter_map(|y| {
                let (dv1, dv2) = (ev(&d1, y), ev(&d2, y));
                let w = if dv1.abs() >= dv2.abs() {
                    ev(&n1, y) / (2.0 * dv1)
                } else {
                    ev(&n2, y) / (2.0 * dv2)
                };
                let h = ev(&n3, y) - 2.0 * w * ev(&d3, y);
                (w.is_finite() && h.is_finite()).then_some((y, w, h))
            })
            .collect()
    };
    let samples = 4000;
    let top = 1e5_f64.asinh();
    let mut seeds = Vec::new();
    let mut prev: Option<(f64, Vec<LocusPoint>)> = None;
    for i in 0..=samples {
        let x = extent * (top * (2.0 * i as f64 / samples as f64 - 1.0)).sinh();
        let cur = points(x);
        if let Some((px, pts)) = &prev {
            for &(y0, w0, h0) in pts {
                let next = cur.iter().min_by(|a, b| (a.0 - y0).abs().total_cmp(&(b.0 - y0).abs()));
                if let Some(&(y1, w1, h1)) = next {
                    if (h0 < 0.0) != (h1 < 0.0) {
                        let t = h0 / (h0 - h1);
                        seeds.push(Vector3::new(px + t * (x - px), y0 + t * (y1 - y0), w0 + t * (w1 - w0)));
                    }
                }
            }
        }
        prev = Some((x, cur));
    }
    seeds
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TranslationTriangle {
    pub a1: NilPoint,
    pub a2: NilPoint,
    pub a3: NilPoint,
}

impl TranslationTriangle {
    pub fn new(a1: NilPoint, a2: NilPoint, a3: NilPoint) -> Self {
        Self { a1, a2, a3 }
    }

    /// `(a1, a2, a3)`, where `a_k` is the side opposite vertex `A_k`.
    pub fn side_lengths(&self) -> (f64, f64, f64) {
        (
            distance(self.a2, self.a3),
            distance(self.a1, self.a3),
            distance(self.a1, self.a2),
        )
    }

    pub fn triangle_inequality_holds(&self) -> bool {
        let (a, b, c) = self.side_lengths();
        a <= b + c && b <= a + c && c <= a + b
    }

    /// Angles `(w1, w2, w3)` between the translation curves leaving each
    /// vertex toward the other two.
    ///
    /// Moving the vertex to the origin, the curve toward `q` starts with the
    /// unit vector along the canonical shear of `q`; in that frame the
    /// metric at the origin is Euclidean.
    pub fn interior_angles(&self) -> Result<(f64, f64, f64)> {
        let angle = |v: NilPoint, p: NilPoint, q: NilPoint| -> Result<f64> {
            let tp = shear_to_canonical(relative(v, p));
            let tq = shear_to_canonical(relative(v, q));
            let (np, nq) = (tp.norm(), tq.norm());
            if np == 0.0 || nq == 0.0 {
                return Err(NilError::DegenerateTriangle("zero-length side".into()));
            }
            Ok((tp.dot(&tq) / (np * nq)).clamp(-1.0, 1.0).acos())
        };
        Ok((
            angle(self.a1, self.a2, self.a3)?,
            angle(self.a2, self.a1, self.a3)?,
            angle(self.a3, self.a1, self.a2)?,
        ))
    }
}

/// Squared distance from the origin and its gradient at `p`.
fn origin_dist2_grad(p: NilPoint) -> (f64, Vector3<f64>) {
    let w = p.z - 0.5 * p.x * p.y;
    (
        p.x * p.x + p.y * p.y + w * w,
        Vector3::new(2.0 * p.x - p.y * w, 2.0 * p.y - p.x * w, 2.0 * w),
    )
}

/// All completions `A3 = (x3, y, z)` of the triangle `O, a2, A3` with
/// `d(O, A3) = d(a2, A3) = side`, sorted lexicographically by `(y, z)`.
pub fn equilateral_completions(a2: NilPoint, x3: f64, side: f64) -> Vec<NilPoint> {
    let s = side;
    let residual = |y: f64, z: f64| {
        let p = NilPoint::new(x3, y, z);
        let q = relative(a2, p);
        let (f1, g1) = origin_dist2_grad(p);
        let (f2, g2) = origin_dist2_grad(q);
        // dq/dy = (0, 1, -a), dq/dz = (0, 0, 1)
        let j = [[g1.y, g1.z], [g2.y - a2.x * g2.z, g2.z]];
        ([f1 - s * s, f2 - s * s], j)
    };
    let offsets = [-s, -0.5 * s, 0.5 * s, s];
    let mut roots: Vec<NilPoint> = Vec::new();
    for &y0 in &offsets {
        for &z0 in &offsets {
            let (mut y, mut z) = (y0, z0);
            for _ in 0..100 {
                let (f, j) = residual(y, z);
                let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
                if det == 0.0 || !det.is_finite() {
                    break;
                }
                let dy = (f[0] * j[1][1] - f[1] * j[0][1]) / det;
                let dz = (j[0][0] * f[1] - j[1][0] * f[0]) / det;
                y -= dy;
                z -= dz;
                if dy.abs().max(dz.abs()) < 1e-14 * (1.0 + y.abs().max(z.abs())) {
                    break;
                }
            }
            let p = NilPoint::new(x3, y, z);
            let ok = p.is_finite()
                && (distance(NilPoint::ORIGIN, p) - s).abs() < 1e-10
                && (distance(a2, p) - s).abs() < 1e-10;
            if ok && !roots.iter().any(|r| r.euclidean_distance(p) < 1e-8) {
                roots.push(p);
            }
        }
    }
    roots.sort_by(|p, q| p.y.total_cmp(&q.y).then(p.z.total_cmp(&q.z)));
    roots
}

/// Third vertex of a triangle with the origin and `a2`, on the plane
/// `x = x3`, at distance `side` from both; the lexicographically smallest
/// `(y, z)` among the completions found.
pub fn solve_equilateral_third_vertex(a2: NilPoint, x3: f64, side: f64) -> Result<NilPoint> {
    equilateral_completions(a2, x3, side)
        .into_iter()
        .next()
        .ok_or(NilError::NoEquilateralCompletion)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TranslationTetrahedron {
    pub a1: NilPoint,
    pub a2: NilPoint,
    pub a3: NilPoint,
    pub a4: NilPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircumsphereResult {
    pub center: NilPoint,
    pub radius: f64,
    /// Largest deviation of a vertex distance from `radius`.
    pub residual: f64,
    /// Newton iterations spent on the returned root.
    pub iterations: usize,
    /// Number of distinct circumscribed spheres found by the multi-start.
    pub distinct_roots: usize,
}

const NEWTON_MAX_ITER: usize = 100;
const ACCEPT_RESIDUAL: f64 = 1e-9;

impl TranslationTetrahedron {
    pub fn new(a1: NilPoint, a2: NilPoint, a3: NilPoint, a4: NilPoint) -> Self {
        Self { a1, a2, a3, a4 }
    }

    pub fn from_array(v: [NilPoint; 4]) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    pub fn vertices(&self) -> [NilPoint; 4] {
        [self.a1, self.a2, self.a3, self.a4]
    }

    /// Signed Euclidean volume of the tetrahedron in model coordinates.
    pub fn euclidean_volume(&self) -> f64 {
        let v = |p: NilPoint| Vector3::new(p.x, p.y, p.z);
        let o = v(self.a1);
        Matrix3::from_columns(&[v(self.a2) - o, v(self.a3) - o, v(self.a4) - o]).determinant() / 6.0
    }

    fn residual_at(&self, c: NilPoint) -> (f64, f64) {
        let d = self.vertices().map(|a| distance(a, c));
        let r = d[0];
        (r, d.iter().fold(0.0_f64, |m, di| m.max((di - r).abs())))
    }

    /// Circumscribed translation sphere.
    ///
    /// With `A1` moved to the origin and the centre written as
    /// `(x, y, w + xy/2)`, each condition `d(O, C) = d(Q_i, C)` is a
    /// quadratic in `(x, y, w)`. These are solved by damped Newton from the
    /// Euclidean circumcentre of the sheared vertices, its eight axis
    /// neighbours and a grid over the vertices' bounding box, widened in
    /// stages if nothing converges. A tetrahedron
    /// can carry more than one circumscribed sphere; the one of least radius
    /// is returned.
    pub fn circumsphere(&self) -> Result<CircumsphereResult> {
        let verts = self.vertices();
        for i in 0..4 {
            for j in i + 1..4 {
                if verts[i] == verts[j] {
                    return Err(NilError::DegenerateTetrahedron("repeated vertex".into()));
                }
            }
        }
        let to_a1 = NilTranslation::to_point(self.a1);
        let q: [Vector3<f64>; 3] = [1, 2, 3].map(|i| {
            let p = relative(self.a1, verts[i]);
            Vector3::new(p.x, p.y, p.z - 0.5 * p.x * p.y)
        });
        // Per vertex: (a, b, g) with g the sheared height.
        let system = |u: &Vector3<f64>| -> (Vector3<f64>, Matrix3<f64>) {
            let (x, y, w) = (u.x, u.y, u.z);
            let mut f = Vector3::zeros();
            let mut j = Matrix3::zeros();
            for (i, qi) in q.iter().enumerate() {
                let (a, b, g) = (qi.x, qi.y, qi.z);
                let d = g - 0.5 * (b * x - a * y);
                f[i] = 2.0 * a * x + 2.0 * b * y - a * a - b * b + 2.0 * w * d - d * d;
                j[(i, 0)] = 2.0 * a - b * w + b * d;
                j[(i, 1)] = 2.0 * b + a * w - a * d;
                j[(i, 2)] = 2.0 * d;
            }
            (f, j)
        };

        let sheared = Matrix3::from_rows(&[q[0].transpose(), q[1].transpose(), q[2].transpose()]);
        if sheared.determinant().abs() < 1e-14 * q.iter().map(|v| v.norm()).fold(1.0, f64::max).powi(3) {
            return Err(NilError::DegenerateTetrahedron("sheared vertices are coplanar".into()));
        }
        let mut near: Vec<Vector3<f64>> = Vec::new();
        // Euclidean circumcentre of O, q1, q2, q3: 2 q_i . c = |q_i|^2.
        let rhs = Vector3::new(q[0].norm_squared(), q[1].norm_squared(), q[2].norm_squared()) * 0.5;
        if let Some(c) = sheared.lu().solve(&rhs) {
            near.push(c);
            for k in 0..8 {
                let s = |bit: usize| if k >> bit & 1 == 1 { 0.5 } else { -0.5 };
                near.push(c + Vector3::new(s(0), s(1), s(2)));
            }
        }
        let (mut lo, mut hi) = (Vector3::zeros(), Vector3::zeros());
        for v in &q {
            lo = lo.inf(v);
            hi = hi.sup(v);
        }
        let extent = (hi - lo).max();
        let grid = |pad: f64| {
            let n = 5;
            let t = |m: usize, lo: f64, hi: f64| (lo - pad) + (hi - lo + 2.0 * pad) * m as f64 / (n - 1) as f64;
            let mut out = Vec::with_capacity(n * n * n);
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        out.push(Vector3::new(t(i, lo.x, hi.x), t(j, lo.y, hi.y), t(k, lo.z, hi.z)));
                    }
                }
            }
            out
        };

        let mut best_residual = f64::INFINITY;
        let mut any_step = false;
        let mut roots: Vec<CircumsphereResult> = Vec::new();
        // Roots far from the vertices have large radius, so wider grids are
        // only tried when the nearer ones found nothing.
        // Past the grids, seeds come from a scan along the curve equidistant
        // from the first three vertices.
        for stage in 0..4 {
            let seeds = match stage {
                0 => near.iter().copied().chain(grid(extent)).collect(),
                1 => grid(4.0 * extent),
                2 => grid(16.0 * extent),
                _ => locus_scan_seeds(&q, extent),
            };
            for seed in seeds {
                let mut u = seed;
                let (mut f, mut jac) = system(&u);
                let mut norm = f.norm();
                let mut iterations = 0;
                while iterations < NEWTON_MAX_ITER && norm > 1e-15 {
                    let Some(step) = jac.lu().solve(&f) else { break };
                    any_step = true;
                    iterations += 1;
                    let mut lambda = 1.0;
                    let mut moved = false;
                    while lambda > 1e-6 {
                        let cand = u - step * lambda;
                        let (fc, jc) = system(&cand);
                        if fc.norm() < norm {
                            u = cand;
                            f = fc;
                            jac = jc;
                            norm = fc.norm();
                            moved = true;
                            break;
                        }
                        lambda *= 0.5;
                    }
                    if !moved {
                        break;
                    }
                }
                let local = NilPoint::new(u.x, u.y, u.z + 0.5 * u.x * u.y);
                let center = translate(local, to_a1);
                if !center.is_finite() {
                    continue;
                }
                let (radius, residual) = self.residual_at(center);
                best_residual = best_residual.min(residual);
                if residual < ACCEPT_RESIDUAL {
                    let dup = roots
                        .iter()
                        .any(|r| (r.radius - radius).abs() < 1e-7 && r.center.euclidean_distance(center) < 1e-6);
                    if !dup {
                        roots.push(CircumsphereResult {
                            center,
                            radius,
                            residual,
                            iterations,
                            distinct_roots: 0,
                        });
                    }
                }
            }
            if !roots.is_empty() {
                break;
            }
        }
        if !any_step {
            return Err(NilError::DegenerateTetrahedron(
                "singular Jacobian at every seed".into(),
            ));
        }
        let count = roots.len();
        roots
            .into_iter()
            .min_by(|a, b| {
                a.radius
                    .total_cmp(&b.radius)
                    .then(a.residual.total_cmp(&b.residual))
                    .then(a.center.x.total_cmp(&b.center.x))
                    .then(a.center.y.total_cmp(&b.center.y))
                    .then(a.center.z.total_cmp(&b.center.z))
            })
            .map(|r| CircumsphereResult {
                distinct_roots: count,
                ..r
            })
            .ok_or(NilError::CircumsphereNoConvergence { best_residual })
    }
}
