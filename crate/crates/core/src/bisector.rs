//! Translation-like bisector (equidistant) surfaces.
//!
//! For `P2 = (a, b, c)` and a point `P = (x, y, z)` put
//! `w = z - xy/2`, `g = c - ab/2` and `D = g - (b x - a y)/2`. Then
//!
//! ```text
//! d(O, P)^2 - d(P2, P)^2 = 2ax + 2by - a^2 - b^2 + 2wD - D^2
//! ```
//!
//! which is linear in `w` (hence in `z`) for fixed `(x, y)`. Every bisector
//! is therefore a graph `z(x, y)` away from the pole curve `D = 0`.

use serde::Serialize;

use crate::error::{NilError, Result};
use crate::nil::{distance, inverse, translate, NilPoint, NilTranslation};
use crate::poly;

/// Zero pattern of `P2 = (a, b, c)` selecting one of the closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BisectorCase {
    Abc,
    Ab,
    Ac,
    Bc,
    AOnly,
    BOnly,
    COnly,
}

impl BisectorCase {
    pub const ALL: [BisectorCase; 7] = [
        BisectorCase::Abc,
        BisectorCase::Ab,
        BisectorCase::Ac,
        BisectorCase::Bc,
        BisectorCase::AOnly,
        BisectorCase::BOnly,
        BisectorCase::COnly,
    ];

    /// Exact zero test on the inputs; `None` for the origin.
    pub fn classify(p2: NilPoint) -> Option<Self> {
        use BisectorCase::*;
        match (p2.x != 0.0, p2.y != 0.0, p2.z != 0.0) {
            (true, true, true) => Some(Abc),
            (true, true, false) => Some(Ab),
            (true, false, true) => Some(Ac),
            (false, true, true) => Some(Bc),
            (true, false, false) => Some(AOnly),
            (false, true, false) => Some(BOnly),
            (false, false, true) => Some(COnly),
            (false, false, false) => None,
        }
    }

    /// Which of `(a, b, c)` are nonzero in this case.
    pub fn pattern(self) -> [bool; 3] {
        use BisectorCase::*;
        match self {
            Abc => [true, true, true],
            Ab => [true, true, false],
            Ac => [true, false, true],
            Bc => [false, true, true],
            AOnly => [true, false, false],
            BOnly => [false, true, false],
            COnly => [false, false, true],
        }
    }
}

/// Pole term `D(x, y)` of the bisector of the origin and `p2`.
pub fn pole_term(p2: NilPoint, x: f64, y: f64) -> f64 {
    let NilPoint { x: a, y: b, z: c } = p2;
    c - 0.5 * a * b - 0.5 * (b * x - a * y)
}

/// Height of the bisector of the origin and `p2` above `(x, y)`, or `None`
/// on the pole curve.
pub fn bisector_z(p2: NilPoint, x: f64, y: f64) -> Result<Option<f64>> {
    if p2 == NilPoint::ORIGIN {
        return Err(NilError::BisectorUndefined);
    }
    let NilPoint { x: a, y: b, .. } = p2;
    let d = pole_term(p2, x, y);
    if d == 0.0 {
        return Ok(None);
    }
    let n = a * a + b * b + d * d - 2.0 * a * x - 2.0 * b * y;
    Ok(Some(n / (2.0 * d) + 0.5 * x * y))
}

/// Rational closed form of the bisector of the origin and `p2` for its zero
/// pattern. `None` where the form's denominator vanishes.
///
/// The fully general form uses `a^3 - a b^2 + 4bc` in its first numerator;
/// with `a b` in place of `a b^2` the surface misses the equidistance
/// condition.
pub fn closed_form_z(p2: NilPoint, x: f64, y: f64) -> Option<f64> {
    use BisectorCase::*;
    let NilPoint { x: a, y: b, z: c } = p2;
    let nz = |den: f64| if den == 0.0 { None } else { Some(den) };
    match BisectorCase::classify(p2)? {
        Abc => {
            let den = nz(a * (b * (a + x) - a * y - 2.0 * c))?;
            let first = (8.0 * x * (a * a + b * b) - 4.0 * (a.powi(3) - a * b * b + 4.0 * b * c)) / den;
            Some(0.25 * (first - b * (a * (a + x) + 8.0) / a + y * (a + 2.0 * x) + 2.0 * c))
        }
        Ab => {
            let den = nz(4.0 * (a * (b - y) + b * x))?;
            let q = b * b - 2.0 * b * y + y * y;
            Some(-(a * a * (q + 4.0) + 2.0 * a * x * (q - 4.0)) / den - b * (x * x + 4.0) * (b - 2.0 * y) / den)
        }
        Ac => {
            let den = nz(4.0 * a * y + 8.0 * c)?;
            Some((a * a * (y * y + 4.0) + 2.0 * a * (2.0 * c * y + x * (y * y - 4.0)) + 4.0 * c * (c + x * y)) / den)
        }
        Bc => {
            let den = nz(8.0 * c - 4.0 * b * x)?;
            Some((b * b * (x * x + 4.0) - 2.0 * b * (2.0 * c * x + (x * x + 4.0) * y) + 4.0 * c * (c + x * y)) / den)
        }
        AOnly => {
            let den = nz(4.0 * y)?;
            Some((a * (y * y + 4.0) + 2.0 * x * (y * y - 4.0)) / den)
        }
        BOnly => {
            let den = nz(4.0 * x)?;
            Some(-(x * x + 4.0) * (b - 2.0 * y) / den)
        }
        COnly => Some(0.5 * (c + x * y)),
    }
}

/// Bisector of two arbitrary points over `(x, y)`.
///
/// `p1` is moved to the origin, the bisector is solved there and the result
/// is moved back. Translations preserve the `(x, y)` columns up to a shift,
/// so the answer is again a height over the original `(x, y)`.
pub fn bisector_general(p1: NilPoint, p2: NilPoint, x: f64, y: f64) -> Result<Option<f64>> {
    if p1 == p2 {
        return Err(NilError::BisectorUndefined);
    }
    let to_p1 = NilTranslation::to_point(p1);
    let q2 = translate(p2, inverse(to_p1));
    let (lx, ly) = (x - p1.x, y - p1.y);
    let z = bisector_z(q2, lx, ly)?;
    Ok(z.map(|z| translate(NilPoint::new(lx, ly, z), to_p1).z))
}

/// Pole term of the bisector of `p1` and `p2` above `(x, y)`.
pub fn pole_term_general(p1: NilPoint, p2: NilPoint, x: f64, y: f64) -> f64 {
    let q2 = translate(p2, inverse(NilTranslation::to_point(p1)));
    pole_term(q2, x - p1.x, y - p1.y)
}

/// `d(p1, p) - d(p2, p)`; zero exactly on the bisector.
pub fn implicit_residual(p1: NilPoint, p2: NilPoint, p: NilPoint) -> f64 {
    distance(p1, p) - distance(p2, p)
}

fn max_residual(a1: NilPoint, a2: NilPoint, a3: NilPoint, p: NilPoint) -> f64 {
    let d1 = distance(a1, p);
    (d1 - distance(a2, p)).abs().max((d1 - distance(a3, p)).abs())
}

/// Point of the equidistant locus of `O`, `(0, b2, b3)` and `(0, c2, c3)`
/// with first coordinate `x`.
pub fn equidistant_locus_yz(b2: f64, b3: f64, c2: f64, c3: f64, x: f64) -> Result<NilPoint> {
    let det = b2 * c3 - b3 * c2;
    if [b2, b3, c2, c3].contains(&0.0) || det == 0.0 {
        return Err(NilError::DegenerateTriple(format!(
            "need b2, b3, c2, c3 != 0 and b2*c3 - b3*c2 != 0 (got {b2}, {b3}, {c2}, {c3})"
        )));
    }
    let x2 = x * x + 4.0;
    let f = -2.0 * b3 * (-2.0 * c2 * x * (b2 * x + 2.0 * c3) + 4.0 * c3 * (b2 * x + c3) + c2 * c2 * x2)
        + b2 * (b2 * x2 * (2.0 * c3 - c2 * x) + x * (c2 * c2 * x2 - 4.0 * c2 * c3 * x + 4.0 * c3 * c3))
        + b3 * b3 * (8.0 * c3 - 4.0 * c2 * x);
    let g = b2 * b2 * x2 * (c2 * x2 - 2.0 * c3 * x)
        - b2 * (4.0 * c2 * x * x2 * (b3 - c3) + 4.0 * c3 * (c3 * x2 - 2.0 * b3 * x * x) + c2 * c2 * x2 * x2)
        + 2.0 * b3 * (2.0 * b3 * (c2 * x2 - 2.0 * c3 * x) + x * (c2 * c2 * x2 - 4.0 * c2 * c3 * x + 4.0 * c3 * c3));
    Ok(NilPoint::new(x, f / (16.0 * det), g / (-32.0 * det)))
}

/// Point of the equidistant locus of `O`, `(b1, 0, b3)` and `(c1, 0, c3)`
/// with second coordinate `y`.
pub fn equidistant_locus_xz(b1: f64, b3: f64, c1: f64, c3: f64, y: f64) -> Result<NilPoint> {
    let det = b1 * c3 - b3 * c1;
    if [b1, b3, c1, c3].contains(&0.0) || det == 0.0 {
        return Err(NilError::DegenerateTriple(format!(
            "need b1, b3, c1, c3 != 0 and b1*c3 - b3*c1 != 0 (got {b1}, {b3}, {c1}, {c3})"
        )));
    }
    let y2 = y * y + 4.0;
    let f = -2.0 * b3 * (-2.0 * c1 * y * (b1 * y - 2.0 * c3) + 4.0 * c3 * (c3 - b1 * y) + c1 * c1 * y2)
        + b1 * (b1 * y2 * (c1 * y + 2.0 * c3) - y * (c1 * c1 * y2 + 4.0 * c1 * c3 * y + 4.0 * c3 * c3))
        + 4.0 * b3 * b3 * (c1 * y + 2.0 * c3);
    let (y3, y4) = (y * y * y, y * y * y * y);
    let g = b1 * b1 * c1 * (y4 - 16.0)
        + b1 * b1 * c3 * (2.0 * y3 + 8.0 * y)
        + b1 * b3 * c1 * (4.0 * y3 - 16.0 * y)
        + 8.0 * b1 * b3 * c3 * y * y
        - b1 * c1 * c1 * (y4 - 16.0)
        + b1 * c1 * c3 * (16.0 * y - 4.0 * y3)
        + b1 * c3 * c3 * (16.0 - 4.0 * y * y)
        + b3 * b3 * c1 * (4.0 * y * y - 16.0)
        + 8.0 * b3 * b3 * c3 * y
        - b3 * c1 * c1 * (2.0 * y3 + 8.0 * y)
        - 8.0 * b3 * c1 * c3 * y * y
        - 8.0 * b3 * c3 * c3 * y;
    Ok(NilPoint::new(f / (16.0 * det), y, g / (32.0 * det)))
}

/// Coordinate used to parameterize a traced locus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LocusAxis {
    #[default]
    X,
    Y,
}

/// Linear pieces of one bisector equation along a line where the
/// parameter coordinate is fixed and `s` is the free one: `D(s)` and `N(s)`
/// as ascending coefficient vectors.
fn bisector_line_polys(q: NilPoint, axis: LocusAxis, fixed: f64) -> ([f64; 2], [f64; 3]) {
    let NilPoint { x: a, y: b, z: c } = q;
    let g = c - 0.5 * a * b;
    let (d, n_lin) = match axis {
        // s = y
        LocusAxis::X => (
            [g - 0.5 * b * fixed, 0.5 * a],
            [a * a + b * b - 2.0 * a * fixed, -2.0 * b],
        ),
        // s = x
        LocusAxis::Y => (
            [g + 0.5 * a * fixed, -0.5 * b],
            [a * a + b * b - 2.0 * b * fixed, -2.0 * a],
        ),
    };
    let d2 = poly::mul(&d, &d);
    let n = [n_lin[0] + d2[0], n_lin[1] + d2[1], d2[2]];
    (d, n)
}

fn eval_lin(p: &[f64], s: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &k| acc * s + k)
}

/// Candidate points of the locus with the parameter coordinate fixed to `t`.
fn locus_candidates(a1: NilPoint, q2: NilPoint, q3: NilPoint, axis: LocusAxis, t: f64) -> Vec<NilPoint> {
    let fixed = match axis {
        LocusAxis::X => t - a1.x,
        LocusAxis::Y => t - a1.y,
    };
    let (d2, n2) = bisector_line_polys(q2, axis, fixed);
    let (d3, n3) = bisector_line_polys(q3, axis, fixed);
    let eq = poly::sub(&poly::mul(&n2, &d3), &poly::mul(&n3, &d2));
    let to_a1 = NilTranslation::to_point(a1);
    poly::real_roots(&eq)
        .into_iter()
        .filter_map(|s| {
            let (dv2, dv3) = (eval_lin(&d2, s), eval_lin(&d3, s));
            let w = if dv2.abs() >= dv3.abs() {
                (dv2 != 0.0).then(|| eval_lin(&n2, s) / (2.0 * dv2))
            } else {
                Some(eval_lin(&n3, s) / (2.0 * dv3))
            }?;
            let (lx, ly) = match axis {
                LocusAxis::X => (fixed, s),
                LocusAxis::Y => (s, fixed),
            };
            let local = NilPoint::new(lx, ly, w + 0.5 * lx * ly);
            Some(translate(local, to_a1))
        })
        .filter(|p| p.is_finite())
        .collect()
}

/// Newton polish of a locus point on the two squared-distance differences,
/// keeping the parameter coordinate fixed.
fn polish_locus_point(a1: NilPoint, a2: NilPoint, a3: NilPoint, axis: LocusAxis, p: NilPoint) -> NilPoint {
    let f = |p: NilPoint| {
        let d1 = distance(a1, p).powi(2);
        [d1 - distance(a2, p).powi(2), d1 - distance(a3, p).powi(2)]
    };
    let mut p = p;
    for _ in 0..8 {
        let r = f(p);
        if r[0].abs().max(r[1].abs()) < 1e-15 {
            break;
        }
        let h = 1e-7 * (1.0 + p.x.abs().max(p.y.abs()).max(p.z.abs()));
        let free = |p: NilPoint, ds: f64, dz: f64| match axis {
            LocusAxis::X => NilPoint::new(p.x, p.y + ds, p.z + dz),
            LocusAxis::Y => NilPoint::new(p.x + ds, p.y, p.z + dz),
        };
        let fs = f(free(p, h, 0.0));
        let fz = f(free(p, 0.0, h));
        let j = [
            [(fs[0] - r[0]) / h, (fz[0] - r[0]) / h],
            [(fs[1] - r[1]) / h, (fz[1] - r[1]) / h],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let ds = (r[0] * j[1][1] - r[1] * j[0][1]) / det;
        let dz = (j[0][0] * r[1] - j[1][0] * r[0]) / det;
        let next = free(p, -ds, -dz);
        if max_residual(a1, a2, a3, next) > max_residual(a1, a2, a3, p) {
            break;
        }
        p = next;
    }
    p
}

/// Trace the locus of points equidistant from three vertices, sampling the
/// parameter coordinate `axis` uniformly over `range`.
///
/// At each sample the two bisector equations reduce to a cubic in the
/// remaining plane coordinate. The first sample takes the root closest to
/// `a1`, later samples the root closest to the previous point. Samples with
/// no root, or whose residual exceeds `1e-8`, are skipped.
pub fn equidistant_locus_along(
    a1: NilPoint,
    a2: NilPoint,
    a3: NilPoint,
    axis: LocusAxis,
    range: (f64, f64),
    samples: usize,
) -> Result<Vec<NilPoint>> {
    if a1 == a2 || a1 == a3 || a2 == a3 {
        return Err(NilError::DegenerateTriple("vertices must be pairwise distinct".into()));
    }
    let back = inverse(NilTranslation::to_point(a1));
    let (q2, q3) = (translate(a2, back), translate(a3, back));
    let mut out: Vec<NilPoint> = Vec::with_capacity(samples);
    for i in 0..samples {
        let t = if samples == 1 {
            range.0
        } else {
            range.0 + (range.1 - range.0) * i as f64 / (samples - 1) as f64
        };
        let candidates = locus_candidates(a1, q2, q3, axis, t);
        let anchor = out.last().copied();
        let pick = candidates.into_iter().min_by(|p, q| {
            let key = |c: &NilPoint| match anchor {
                Some(prev) => c.euclidean_distance(prev),
                None => distance(a1, *c),
            };
            key(p).total_cmp(&key(q))
        });
        if let Some(p) = pick {
            let p = polish_locus_point(a1, a2, a3, axis, p);
            if max_residual(a1, a2, a3, p) < 1e-8 {
                out.push(p);
            }
        }
    }
    Ok(out)
}

/// [`equidistant_locus_along`] parameterized by `x`.
pub fn equidistant_locus_general(
    a1: NilPoint,
    a2: NilPoint,
    a3: NilPoint,
    t_range: (f64, f64),
    samples: usize,
) -> Result<Vec<NilPoint>> {
    equidistant_locus_along(a1, a2, a3, LocusAxis::X, t_range, samples)
}

/// Triangulated height field.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct SurfaceMesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
    /// Grid cells left out because a corner had no finite solution, exceeded
    /// the clamp, or the cell straddles the pole curve.
    pub holes: usize,
}

pub const DEFAULT_Z_CLAMP: f64 = 1e3;

/// Format `v` as plain decimal with `sig` significant digits.
pub fn format_significant(v: f64, sig: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v.is_finite() { "0".to_string() } else { format!("{v}") };
    }
    let exp = v.abs().log10().floor() as i32;
    let decimals = (sig as i32 - 1 - exp).max(0) as usize;
    let s = format!("{v:.decimals$}");
    if s.contains('.') {
        let t = s.trim_end_matches('0').trim_end_matches('.');
        if t == "-0" {
            "0".to_string()
        } else {
            t.to_string()
        }
    } else {
        s
    }
}

impl SurfaceMesh {
    /// Wavefront OBJ text: `v` lines then `f` lines, 1-based, LF endings.
    pub fn to_obj(&self) -> String {
        let mut s = String::new();
        for v in &self.vertices {
            s.push_str(&format!(
                "v {} {} {}\n",
                format_significant(v[0], 9),
                format_significant(v[1], 9),
                format_significant(v[2], 9)
            ));
        }
        for f in &self.faces {
            s.push_str(&format!("f {} {} {}\n", f[0] + 1, f[1] + 1, f[2] + 1));
        }
        s
    }
}

/// Sample the bisector of `p1` and `p2` on an `nx` by `ny` grid and
/// triangulate the regular cells.
pub fn mesh_bisector(
    p1: NilPoint,
    p2: NilPoint,
    x_range: (f64, f64),
    y_range: (f64, f64),
    nx: usize,
    ny: usize,
) -> Result<SurfaceMesh> {
    mesh_bisector_clamped(p1, p2, x_range, y_range, nx, ny, DEFAULT_Z_CLAMP)
}

pub fn mesh_bisector_clamped(
    p1: NilPoint,
    p2: NilPoint,
    x_range: (f64, f64),
    y_range: (f64, f64),
    nx: usize,
    ny: usize,
    clamp: f64,
) -> Result<SurfaceMesh> {
    if nx < 2 || ny < 2 {
        return Err(NilError::InvalidArgument(format!(
            "grid needs nx, ny >= 2 (got {nx}, {ny})"
        )));
    }
    if p1 == p2 {
        return Err(NilError::BisectorUndefined);
    }
    let coord = |r: (f64, f64), i: usize, n: usize| r.0 + (r.1 - r.0) * i as f64 / (n - 1) as f64;
    // Per grid node: (vertex index if usable, sign of the pole term).
    let mut nodes: Vec<(Option<usize>, f64)> = Vec::with_capacity(nx * ny);
    let mut mesh = SurfaceMesh::default();
    for j in 0..ny {
        let y = coord(y_range, j, ny);
        for i in 0..nx {
            let x = coord(x_range, i, nx);
            let pole = pole_term_general(p1, p2, x, y);
            let idx = match bisector_general(p1, p2, x, y)? {
                Some(z) if z.is_finite() && z.abs() <= clamp => {
                    mesh.vertices.push([x, y, z]);
                    Some(mesh.vertices.len() - 1)
                }
                _ => None,
            };
            nodes.push((idx, pole.signum()));
        }
    }
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let corners = [j * nx + i, j * nx + i + 1, (j + 1) * nx + i + 1, (j + 1) * nx + i];
            let ids: Option<Vec<usize>> = corners.iter().map(|&k| nodes[k].0).collect();
            let sign = nodes[corners[0]].1;
            let same_side = corners.iter().all(|&k| nodes[k].1 == sign);
            match ids {
                Some(v) if same_side => {
                    mesh.faces.push([v[0], v[1], v[2]]);
                    mesh.faces.push([v[0], v[2], v[3]]);
                }
                _ => mesh.holes += 1,
            }
        }
    }
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nil::curve_params_from_point;
    use crate::nil::{distance_from_origin, translation_curve, CurveParams};

    /// Root of the distance difference in z by bracketing and bisection.
    fn bisect_height(p2: NilPoint, x: f64, y: f64) -> f64 {
        let f = |z: f64| {
            let p = NilPoint::new(x, y, z);
            distance_from_origin(p) - distance(p2, p)
        };
        let (mut lo, mut hi) = (-50.0, 50.0);
        assert!(f(lo) * f(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f(mid) < 0.0) == (f(lo) < 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn fiber_case() {
        let p2 = NilPoint::new(0.0, 0.0, 1.6);
        for (x, y) in [(0.3, -1.2), (2.0, 0.5), (-1.0, -1.0)] {
            let z = bisector_z(p2, x, y).unwrap().unwrap();
            assert!((z - 0.5 * (1.6 + x * y)).abs() < 1e-14);
        }
        let z = bisector_z(NilPoint::new(0.0, 0.0, 1.0), 0.0, 0.0).unwrap().unwrap();
        assert_eq!(z, 0.5);
    }

    #[test]
    fn bisector_matches_bracketed_root() {
        let p2 = NilPoint::new(0.5, 0.5, 1.5);
        let z = bisector_z(p2, 0.3, -0.2).unwrap().unwrap();
        let p = NilPoint::new(0.3, -0.2, z);
        assert!(implicit_residual(NilPoint::ORIGIN, p2, p).abs() < 1e-10);
        assert!((z - bisect_height(p2, 0.3, -0.2)).abs() < 1e-9);
    }

    #[test]
    fn origin_is_rejected() {
        assert_eq!(bisector_z(NilPoint::ORIGIN, 0.1, 0.2), Err(NilError::BisectorUndefined));
        let p = NilPoint::new(1.0, 2.0, 3.0);
        assert_eq!(bisector_general(p, p, 0.0, 0.0), Err(NilError::BisectorUndefined));
    }

    #[test]
    fn pole_returns_none() {
        // D = c - ab/2 - (bx - ay)/2 vanishes at x = 2c/b for a = 0.
        let p2 = NilPoint::new(0.0, 1.0, 1.0);
        assert_eq!(bisector_z(p2, 2.0, 0.7).unwrap(), None);
    }

    #[test]
    fn classification() {
        use BisectorCase::*;
        assert_eq!(BisectorCase::classify(NilPoint::new(1.0, 2.0, 3.0)), Some(Abc));
        assert_eq!(BisectorCase::classify(NilPoint::new(1.0, 2.0, 0.0)), Some(Ab));
        assert_eq!(BisectorCase::classify(NilPoint::new(1.0, 0.0, 3.0)), Some(Ac));
        assert_eq!(BisectorCase::classify(NilPoint::new(0.0, 2.0, 3.0)), Some(Bc));
        assert_eq!(BisectorCase::classify(NilPoint::new(1.0, 0.0, 0.0)), Some(AOnly));
        assert_eq!(BisectorCase::classify(NilPoint::new(0.0, 2.0, 0.0)), Some(BOnly));
        assert_eq!(BisectorCase::classify(NilPoint::new(0.0, 0.0, 3.0)), Some(COnly));
        assert_eq!(BisectorCase::classify(NilPoint::ORIGIN), None);
        for case in BisectorCase::ALL {
            let [a, b, c] = case.pattern().map(|on| if on { 1.0 } else { 0.0 });
            assert_eq!(BisectorCase::classify(NilPoint::new(a, b, c)), Some(case));
        }
    }

    #[test]
    fn general_reduces_to_origin_case() {
        let p2 = NilPoint::new(0.4, -0.9, 1.1);
        for (x, y) in [(0.1, 0.2), (-1.3, 0.8)] {
            assert_eq!(
                bisector_general(NilPoint::ORIGIN, p2, x, y).unwrap(),
                bisector_z(p2, x, y).unwrap()
            );
        }
    }

    #[test]
    fn curve_midpoint_is_on_bisector() {
        let p2 = NilPoint::new(0.7, -0.4, 1.3);
        let cp: CurveParams = curve_params_from_point(p2).unwrap();
        let mid = translation_curve(cp.tangent(), 0.5 * cp.r);
        assert!(implicit_residual(NilPoint::ORIGIN, p2, mid).abs() < 1e-12);
        let z = bisector_z(p2, mid.x, mid.y).unwrap().unwrap();
        assert!((z - mid.z).abs() < 1e-12);
    }

    #[test]
    fn residual_sign() {
        let p1 = NilPoint::new(0.2, 0.1, 0.0);
        let p2 = NilPoint::new(1.0, -1.0, 0.5);
        let r = implicit_residual(p1, p2, p1);
        assert!((r + distance(p2, p1)).abs() < 1e-15 && r < 0.0);
    }

    #[test]
    fn yz_locus_fig5_configuration() {
        let (a2, a3) = (NilPoint::new(0.0, -0.2, 0.8), NilPoint::new(0.0, 1.0, 1.2));
        for x in [-1.0, -0.3, 0.0, 0.5, 1.5] {
            let p = equidistant_locus_yz(-0.2, 0.8, 1.0, 1.2, x).unwrap();
            assert!(max_residual(NilPoint::ORIGIN, a2, a3, p) < 1e-9);
        }
        assert!(equidistant_locus_yz(1.0, 2.0, 2.0, 4.0, 0.0).is_err());
        assert!(equidistant_locus_yz(0.0, 2.0, 2.0, 4.0, 0.0).is_err());
    }

    #[test]
    fn xz_locus_fig5_configuration() {
        let (a2, a3) = (NilPoint::new(0.5, 0.0, 0.7), NilPoint::new(1.0, 0.0, 0.4));
        for y in [-1.0, -0.3, 0.0, 0.5, 1.5] {
            let p = equidistant_locus_xz(0.5, 0.7, 1.0, 0.4, y).unwrap();
            assert!(max_residual(NilPoint::ORIGIN, a2, a3, p) < 1e-9, "{y} {p:?}");
            let swapped = equidistant_locus_xz(1.0, 0.4, 0.5, 0.7, y).unwrap();
            assert!(swapped.euclidean_distance(p) < 1e-12);
        }
    }

    #[test]
    fn fig4_locus_lies_on_printed_surfaces() {
        let a1 = NilPoint::ORIGIN;
        let a2 = NilPoint::new(0.0, 0.0, 1.0);
        let a3 = NilPoint::new(0.0, 1.0, 0.0);
        let pts = equidistant_locus_general(a1, a2, a3, (-2.0, 2.0), 41).unwrap();
        assert!(pts.len() > 30);
        for p in pts {
            assert!(max_residual(a1, a2, a3, p) < 1e-8);
            assert!((p.z - (4.0 * p.x * p.y + 4.0) / 8.0).abs() < 1e-9);
            // On the pole line of the second surface it is vertical.
            if let Some(s23) = bisector_general(a2, a3, p.x, p.y).unwrap() {
                assert!((p.z - s23).abs() < 1e-8, "{p:?}");
            }
        }
    }

    /// The printed second surface of this configuration,
    /// `z = (2xy^2 - 8x + y^2 + 4y + 4) / (4y)`, is the bisector of
    /// `(0, 0, 1)` and `(1, 0, 1)` rather than of `(0, 0, 1)` and `(0, 1, 0)`.
    #[test]
    fn fig4_printed_second_surface() {
        let printed = |x: f64, y: f64| (2.0 * x * y * y - 8.0 * x + y * y + 4.0 * y + 4.0) / (4.0 * y);
        let a2 = NilPoint::new(0.0, 0.0, 1.0);
        let mut off = 0.0_f64;
        for (x, y) in [(0.3, 0.7), (-1.2, 1.5), (1.9, -0.4)] {
            let z = bisector_general(a2, NilPoint::new(1.0, 0.0, 1.0), x, y)
                .unwrap()
                .unwrap();
            assert!((z - printed(x, y)).abs() < 1e-12);
            let z_a3 = bisector_general(a2, NilPoint::new(0.0, 1.0, 0.0), x, y)
                .unwrap()
                .unwrap();
            off = off.max((z_a3 - printed(x, y)).abs());
        }
        assert!(off > 0.1);
    }

    #[test]
    fn mesh_fiber_pair() {
        let mesh = mesh_bisector(
            NilPoint::ORIGIN,
            NilPoint::new(0.0, 0.0, 2.0),
            (-1.0, 1.0),
            (-1.0, 1.0),
            6,
            5,
        )
        .unwrap();
        assert_eq!(mesh.vertices.len(), 30);
        assert_eq!(mesh.faces.len(), 2 * 5 * 4);
        assert_eq!(mesh.holes, 0);
        for v in &mesh.vertices {
            assert!((v[2] - (2.0 + v[0] * v[1]) / 2.0).abs() < 1e-15);
        }
        let tiny = mesh_bisector(
            NilPoint::ORIGIN,
            NilPoint::new(0.0, 0.0, 2.0),
            (-1.0, 1.0),
            (-1.0, 1.0),
            2,
            2,
        )
        .unwrap();
        assert!(tiny.faces.len() <= 2);
        assert!(mesh_bisector(
            NilPoint::ORIGIN,
            NilPoint::new(0.0, 0.0, 2.0),
            (0.0, 1.0),
            (0.0, 1.0),
            1,
            3
        )
        .is_err());
    }

    #[test]
    fn mesh_skips_pole_cells() {
        // Pole line x = 2 for P2 = (0, 1, 1).
        let p2 = NilPoint::new(0.0, 1.0, 1.0);
        let mesh = mesh_bisector(NilPoint::ORIGIN, p2, (0.0, 4.0), (-1.0, 1.0), 10, 4).unwrap();
        assert!(mesh.holes >= 3);
        for f in &mesh.faces {
            let xs = f.map(|k| mesh.vertices[k][0]);
            assert!(xs.iter().all(|&x| x < 2.0) || xs.iter().all(|&x| x > 2.0));
        }
        for v in &mesh.vertices {
            let p = NilPoint::new(v[0], v[1], v[2]);
            assert!(implicit_residual(NilPoint::ORIGIN, p2, p).abs() < 1e-8 * (1.0 + v[2].abs()));
        }
    }

    #[test]
    fn obj_format() {
        let mesh = SurfaceMesh {
            vertices: vec![[0.0, 1.0, -2.5], [1.0 / 3.0, 1234.56789012, 0.5], [1.0, 0.0, 0.0]],
            faces: vec![[0, 1, 2]],
            holes: 0,
        };
        assert_eq!(
            mesh.to_obj(),
            "v 0 1 -2.5\nv 0.333333333 1234.56789 0.5\nv 1 0 0\nf 1 2 3\n"
        );
    }
}
