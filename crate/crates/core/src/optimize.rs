//! Derivative-free search for thin lattice coverings, and the reference
//! table of lattices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{NilError, Result};
use crate::lattice::{covering_radius, CoveringReport, NilLattice};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    NelderMead,
    CoordinateDescent,
}

impl std::str::FromStr for Method {
    type Err = NilError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nelder-mead" => Ok(Method::NelderMead),
            "coordinate-descent" => Ok(Method::CoordinateDescent),
            _ => Err(NilError::InvalidArgument(format!("unknown method {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub seed_lattice: NilLattice,
    pub method: Method,
    /// Objective evaluations, the seed included.
    pub max_evals: usize,
    /// Stop (or restart) once the simplex spread in both parameters and
    /// density falls below this.
    pub tolerance: f64,
    /// Box for `[t11, t13, t21, t22, t23]`.
    pub bounds: [(f64, f64); 5],
    pub restarts: usize,
    /// Seeds the edge signs of restart simplices.
    pub rng_seed: u64,
}

/// Lower limit on `t11` and `t22`, keeping the cell volume away from zero.
pub const MIN_BASE: f64 = 0.05;
pub const SIMPLEX_EDGE: f64 = 0.05;

impl SearchConfig {
    pub fn new(seed_lattice: NilLattice) -> Self {
        Self {
            seed_lattice,
            method: Method::NelderMead,
            max_evals: 2000,
            tolerance: 1e-9,
            bounds: [(MIN_BASE, 5.0), (-5.0, 5.0), (-5.0, 5.0), (MIN_BASE, 5.0), (-5.0, 5.0)],
            restarts: 5,
            rng_seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceEntry {
    pub eval_index: usize,
    pub params: [f64; 5],
    /// `None` when the evaluation was infeasible.
    pub covering_radius: Option<f64>,
    pub density: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    pub best_lattice: NilLattice,
    pub best_report: CoveringReport,
    pub evals: usize,
    pub trace: Vec<TraceEntry>,
}

impl SearchResult {
    /// Running minimum of the density along the trace.
    pub fn best_so_far(&self) -> Vec<f64> {
        let mut best = f64::INFINITY;
        self.trace
            .iter()
            .map(|e| {
                best = best.min(e.density.unwrap_or(f64::INFINITY));
                best
            })
            .collect()
    }
}

struct Objective<'a> {
    cfg: &'a SearchConfig,
    trace: Vec<TraceEntry>,
    best: Option<CoveringReport>,
}

impl Objective<'_> {
    fn exhausted(&self) -> bool {
        self.trace.len() >= self.cfg.max_evals.max(1)
    }

    /// Density, or `+inf` outside the box, on solver failure or for a
    /// non-convex covering ball.
    fn eval(&mut self, p: &[f64; 5]) -> f64 {
        let in_box = p.iter().zip(&self.cfg.bounds).all(|(v, (lo, hi))| v >= lo && v <= hi)
            && p[0] > MIN_BASE
            && p[3] > MIN_BASE;
        let report = in_box
            .then(|| NilLattice::from_params(*p).and_then(|l| covering_radius(&l)).ok())
            .flatten()
            .filter(|r| r.convex);
        self.trace.push(TraceEntry {
            eval_index: self.trace.len(),
            params: *p,
            covering_radius: report.as_ref().map(|r| r.covering_radius),
            density: report.as_ref().map(|r| r.density),
        });
        match report {
            Some(r) => {
                let d = r.density;
                if self.best.as_ref().is_none_or(|b| d < b.density) {
                    self.best = Some(r);
                }
                d
            }
            None => f64::INFINITY,
        }
    }
}

/// Minimize covering density over `[t11, t13, t21, t22, t23]` with `k = 1`.
pub fn optimize_density(cfg: &SearchConfig) -> Result<SearchResult> {
    if cfg.seed_lattice.k != 1 {
        return Err(NilError::DecompositionRequiresK1(cfg.seed_lattice.k));
    }
    let mut obj = Objective {
        cfg,
        trace: Vec::new(),
        best: None,
    };
    let seed = cfg.seed_lattice.params();
    let f0 = obj.eval(&seed);
    match cfg.method {
        Method::NelderMead => nelder_mead(&mut obj, seed, f0),
        Method::CoordinateDescent => coordinate_descent(&mut obj, seed, f0),
    }
    let evals = obj.trace.len();
    let best_report = obj.best.ok_or(NilError::AllInfeasible)?;
    Ok(SearchResult {
        best_lattice: best_report.lattice,
        best_report,
        evals,
        trace: obj.trace,
    })
}

fn nelder_mead(obj: &mut Objective, start: [f64; 5], f_start: f64) {
    const N: usize = 5;
    let mut rng = ChaCha8Rng::seed_from_u64(obj.cfg.rng_seed);
    let (mut x0, mut f0) = (start, f_start);
    for round in 0..=obj.cfg.restarts {
        // Axis-aligned simplex; restarts flip edge directions at random.
        let mut simplex: Vec<([f64; N], f64)> = vec![(x0, f0)];
        for i in 0..N {
            if obj.exhausted() {
                return;
            }
            let sign = if round > 0 && rng.gen_bool(0.5) { -1.0 } else { 1.0 };
            let mut v = x0;
            v[i] += sign * SIMPLEX_EDGE;
            let f = obj.eval(&v);
            simplex.push((v, f));
        }
        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let spread_f = simplex[N].1 - simplex[0].1;
            let spread_x = simplex[1..]
                .iter()
                .flat_map(|(v, _)| v.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
                .fold(0.0_f64, f64::max);
            let converged = spread_f.is_finite() && spread_f <= obj.cfg.tolerance && spread_x <= obj.cfg.tolerance;
            if converged || obj.exhausted() {
                break;
            }
            let mut centroid = [0.0; N];
            for (v, _) in &simplex[..N] {
                for (c, x) in centroid.iter_mut().zip(v) {
                    *c += x / N as f64;
                }
            }
            let along = |t: f64| -> [f64; N] {
                let worst = simplex[N].0;
                std::array::from_fn(|i| centroid[i] + t * (worst[i] - centroid[i]))
            };
            let xr = along(-1.0);
            let fr = obj.eval(&xr);
            if fr < simplex[0].1 {
                if obj.exhausted() {
                    simplex[N] = (xr, fr);
                    continue;
                }
                let xe = along(-2.0);
                let fe = obj.eval(&xe);
                simplex[N] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[N - 1].1 {
                simplex[N] = (xr, fr);
                continue;
            }
            if obj.exhausted() {
                continue;
            }
            let (xc, fc) = if fr < simplex[N].1 {
                let xc = along(-0.5);
                (xc, obj.eval(&xc))
            } else {
                let xc = along(0.5);
                (xc, obj.eval(&xc))
            };
            if fc < fr.min(simplex[N].1) {
                simplex[N] = (xc, fc);
                continue;
            }
            let best = simplex[0].0;
            for entry in simplex.iter_mut().skip(1) {
                if obj.exhausted() {
                    break;
                }
                let v: [f64; N] = std::array::from_fn(|i| best[i] + 0.5 * (entry.0[i] - best[i]));
                *entry = (v, obj.eval(&v));
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        (x0, f0) = simplex[0];
        if obj.exhausted() {
            return;
        }
    }
}

fn coordinate_descent(obj: &mut Objective, start: [f64; 5], f_start: f64) {
    let (mut x, mut fx) = (start, f_start);
    let mut step = SIMPLEX_EDGE;
    while step > obj.cfg.tolerance && !obj.exhausted() {
        let mut improved = false;
        for i in 0..5 {
            for dir in [1.0, -1.0] {
                if obj.exhausted() {
                    return;
                }
                let mut v = x;
                v[i] += dir * step;
                let f = obj.eval(&v);
                if f < fx {
                    (x, fx) = (v, f);
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
}

/// One row of the reference table: parameters and published `(R, density)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table1Row {
    pub params: [f64; 5],
    pub radius: f64,
    pub density: f64,
}

pub const TABLE1: [Table1Row; 7] = [
    Table1Row {
        params: [1.0, 1.0, 1.0, 1.0, 1.0],
        radius: 0.88666,
        density: 2.91980,
    },
    Table1Row {
        params: [1.31225, 0.74565, 0.65613, 1.13644, 1.11847],
        radius: 0.91257,
        density: 1.43141,
    },
    Table1Row {
        params: [1.3, 0.74, 0.65, 1.13, 1.12],
        radius: 0.90406,
        density: 1.43429,
    },
    Table1Row {
        params: [1.29, 0.74, 0.64, 1.13, 1.12],
        radius: 0.89997,
        density: 1.43692,
    },
    Table1Row {
        params: [1.1, 0.5, 0.5, 1.0, 1.0],
        radius: 0.77177,
        density: 1.59134,
    },
    Table1Row {
        params: [1.1, 0.5, 0.4, 1.0, 1.0],
        radius: 0.78667,
        density: 1.68533,
    },
    Table1Row {
        params: [1.31, 0.74, 0.65, 1.13, 1.12],
        radius: 0.90732,
        density: 1.42783,
    },
];

/// Covering reports for the reference table, in table order.
pub fn table1_harness() -> Result<Vec<(NilLattice, CoveringReport)>> {
    TABLE1
        .iter()
        .map(|row| {
            let lat = NilLattice::from_params(row.params)?;
            Ok((lat, covering_radius(&lat)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_budget_returns_seed() {
        let seed = NilLattice::from_params(TABLE1[2].params).unwrap();
        let cfg = SearchConfig {
            max_evals: 0,
            ..SearchConfig::new(seed)
        };
        let res = optimize_density(&cfg).unwrap();
        assert_eq!(res.evals, 1);
        assert_eq!(res.best_lattice, seed);
        assert_eq!(res.best_report, covering_radius(&seed).unwrap());
    }

    #[test]
    fn unit_lattice_improves() {
        for method in [Method::NelderMead, Method::CoordinateDescent] {
            let cfg = SearchConfig {
                method,
                max_evals: 150,
                ..SearchConfig::new(NilLattice::unit())
            };
            let res = optimize_density(&cfg).unwrap();
            assert!(res.best_report.density < 2.91980);
            let trace = res.best_so_far();
            assert!(trace.windows(2).all(|w| w[1] <= w[0]));
            assert_eq!(res.evals, res.trace.len());
            assert!(res.evals <= 150);
        }
    }

    #[test]
    fn search_is_reproducible() {
        let seed = NilLattice::from_params(TABLE1[4].params).unwrap();
        let cfg = SearchConfig {
            max_evals: 120,
            restarts: 3,
            tolerance: 1e-3,
            ..SearchConfig::new(seed)
        };
        let a = optimize_density(&cfg).unwrap();
        let b = optimize_density(&cfg).unwrap();
        assert_eq!(a.trace, b.trace);
    }

    #[test]
    fn infeasible_seed_with_no_budget() {
        let seed = NilLattice {
            t11: 0.01,
            ..NilLattice::unit()
        };
        let cfg = SearchConfig {
            max_evals: 1,
            ..SearchConfig::new(seed)
        };
        assert_eq!(optimize_density(&cfg).unwrap_err(), NilError::AllInfeasible);
        let k2 = NilLattice {
            k: 2,
            ..NilLattice::unit()
        };
        assert!(optimize_density(&SearchConfig::new(k2)).is_err());
    }

    #[test]
    fn method_names() {
        assert_eq!("nelder-mead".parse::<Method>().unwrap(), Method::NelderMead);
        assert_eq!(
            "coordinate-descent".parse::<Method>().unwrap(),
            Method::CoordinateDescent
        );
        assert!("simplex".parse::<Method>().is_err());
    }
}
