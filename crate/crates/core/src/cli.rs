//! Command-line front end.
//!
//! Every subcommand writes JSON by default (OBJ for meshes, CSV for the
//! reference table and search traces). Exit codes: 0 success, 1 computation
//! error, 2 usage error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bisector::{equidistant_locus_along, format_significant, mesh_bisector_clamped, LocusAxis, DEFAULT_Z_CLAMP};
use crate::error::NilError;
use crate::lattice::{covering_radius, verify_covering, NilLattice};
use crate::nil::{curve_params_from_point, distance, NilPoint};
use crate::optimize::{optimize_density, table1_harness, Method, SearchConfig, TraceEntry, TABLE1};
use crate::simplex::{TranslationTetrahedron, TranslationTriangle};

const SIG_DIGITS: usize = 12;

#[derive(Debug, Parser)]
#[command(
    name = "nilcover",
    version,
    about = "Translation geometry and lattice ball coverings in Nil"
)]
struct Cli {
    /// Write the primary output here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Translation distance between two points.
    Dist {
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        p: NilPoint,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        q: NilPoint,
    },
    /// Parameters (phi, theta, r) of the translation curve from the origin.
    Curve {
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        p: NilPoint,
    },
    /// Sample the bisector surface of two points as a triangle mesh.
    Bisector {
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        p1: NilPoint,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        p2: NilPoint,
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true, default_value = "-2:2")]
        xrange: (f64, f64),
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true, default_value = "-2:2")]
        yrange: (f64, f64),
        #[arg(long, default_value_t = 41)]
        nx: usize,
        #[arg(long, default_value_t = 41)]
        ny: usize,
        /// Cells with |z| above this are left out.
        #[arg(long, default_value_t = DEFAULT_Z_CLAMP)]
        clamp: f64,
        /// Write the OBJ mesh here and print a JSON summary instead.
        #[arg(long)]
        obj: Option<PathBuf>,
    },
    /// Trace the locus of points equidistant from three vertices.
    Locus {
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        a1: NilPoint,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        a2: NilPoint,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        a3: NilPoint,
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true, default_value = "-2:2")]
        range: (f64, f64),
        #[arg(long, default_value_t = 101)]
        samples: usize,
        /// Coordinate swept over the range: x or y.
        #[arg(long, value_parser = parse_axis, default_value = "x")]
        axis: LocusAxis,
    },
    /// Sides, angles and triangle inequality of a translation triangle.
    Triangle {
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        a1: NilPoint,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        a2: NilPoint,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        a3: NilPoint,
    },
    /// Circumscribed translation sphere of a tetrahedron (give --v four times).
    Circumsphere {
        #[arg(long = "v", value_parser = parse_point, allow_hyphen_values = true, num_args = 1, required = true)]
        v: Vec<NilPoint>,
    },
    /// Covering radius and density of a lattice.
    Cover {
        #[command(flatten)]
        lattice: LatticeArgs,
        /// Also run the sampling verifier with this many points.
        #[arg(long)]
        verify: Option<usize>,
        #[arg(long, default_value_t = 2)]
        window: i64,
        #[arg(long, default_value_t = 0)]
        rng_seed: u64,
    },
    /// Check by sampling that balls of a given radius cover the lattice cell.
    Verify {
        #[command(flatten)]
        lattice: LatticeArgs,
        /// Defaults to the lattice's covering radius.
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 2)]
        window: i64,
        #[arg(long, default_value_t = 0)]
        rng_seed: u64,
    },
    /// Recompute the reference table as CSV.
    Table1,
    /// Minimize covering density from a seed lattice.
    Optimize {
        #[arg(long, value_parser = parse_params, allow_hyphen_values = true)]
        seed: [f64; 5],
        #[arg(long, value_parser = parse_method, default_value = "nelder-mead")]
        method: Method,
        #[arg(long, default_value_t = 2000)]
        max_evals: usize,
        #[arg(long, default_value_t = 5)]
        restarts: usize,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        #[arg(long, default_value_t = 0)]
        rng_seed: u64,
        /// Write the per-evaluation trace as CSV here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct LatticeArgs {
    /// t11,t13,t21,t22,t23
    #[arg(long, value_parser = parse_params, allow_hyphen_values = true)]
    lattice: [f64; 5],
    #[arg(long, default_value_t = 1)]
    k: u32,
}

impl LatticeArgs {
    fn build(&self) -> Result<NilLattice, NilError> {
        let [t11, t13, t21, t22, t23] = self.lattice;
        NilLattice::new(t11, t13, t21, t22, t23, self.k)
    }
}

fn parse_floats(s: &str, n: usize, what: &str) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(format!(
            "expected {n} comma-separated numbers for {what}, got {}",
            v.len()
        ));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(format!("{what} must be finite"));
    }
    Ok(v)
}

fn parse_point(s: &str) -> Result<NilPoint, String> {
    let v = parse_floats(s, 3, "a point x,y,z")?;
    Ok(NilPoint::new(v[0], v[1], v[2]))
}

fn parse_params(s: &str) -> Result<[f64; 5], String> {
    let v = parse_floats(s, 5, "t11,t13,t21,t22,t23")?;
    Ok([v[0], v[1], v[2], v[3], v[4]])
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected a:b, got {s:?}"))?;
    let lo = a.trim().parse::<f64>().map_err(|e| format!("{a:?}: {e}"))?;
    let hi = b.trim().parse::<f64>().map_err(|e| format!("{b:?}: {e}"))?;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err("range bounds must be finite".into());
    }
    Ok((lo, hi))
}

fn parse_axis(s: &str) -> Result<LocusAxis, String> {
    match s {
        "x" => Ok(LocusAxis::X),
        "y" => Ok(LocusAxis::Y),
        _ => Err(format!("axis must be x or y, got {s:?}")),
    }
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: NilError| e.to_string())
}

/// Round every float in `v` to `SIG_DIGITS` significant digits.
fn round_numbers(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            let r: f64 = format!("{:.*e}", SIG_DIGITS - 1, x).parse().unwrap_or(x);
            json!(r)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_numbers).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_numbers(v))).collect()),
        other => other,
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let value = serde_json::to_value(v).expect("serializable output");
    let mut s = serde_json::to_string_pretty(&round_numbers(value)).expect("serializable output");
    s.push('\n');
    s
}

fn csv_num(x: f64) -> String {
    format_significant(x, SIG_DIGITS)
}

fn trace_csv(trace: &[TraceEntry]) -> String {
    let mut s = String::from("eval_index,t11,t13,t21,t22,t23,R,density\n");
    for e in trace {
        let p = e.params.map(csv_num).join(",");
        let opt = |v: Option<f64>| v.map_or_else(|| "inf".to_string(), csv_num);
        s.push_str(&format!(
            "{},{},{},{}\n",
            e.eval_index,
            p,
            opt(e.covering_radius),
            opt(e.density)
        ));
    }
    s
}

enum Failure {
    Compute(NilError),
    Io(String),
}

impl From<NilError> for Failure {
    fn from(e: NilError) -> Self {
        Failure::Compute(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn execute(cmd: Command) -> Result<String, Failure> {
    let out = match cmd {
        Command::Dist { p, q } => to_json(&json!({ "distance": distance(p, q) })),
        Command::Curve { p } => to_json(&curve_params_from_point(p)?),
        Command::Bisector {
            p1,
            p2,
            xrange,
            yrange,
            nx,
            ny,
            clamp,
            obj,
        } => {
            let mesh = mesh_bisector_clamped(p1, p2, xrange, yrange, nx, ny, clamp)?;
            match obj {
                Some(path) => {
                    fs::write(&path, mesh.to_obj())?;
                    to_json(&json!({
                        "obj": path.display().to_string(),
                        "vertices": mesh.vertices.len(),
                        "faces": mesh.faces.len(),
                        "holes": mesh.holes,
                    }))
                }
                None => mesh.to_obj(),
            }
        }
        Command::Locus {
            a1,
            a2,
            a3,
            range,
            samples,
            axis,
        } => {
            let pts = equidistant_locus_along(a1, a2, a3, axis, range, samples)?;
            let pts: Vec<[f64; 3]> = pts.into_iter().map(NilPoint::to_array).collect();
            to_json(&json!({ "points": pts }))
        }
        Command::Triangle { a1, a2, a3 } => {
            let tri = TranslationTriangle::new(a1, a2, a3);
            let (s1, s2, s3) = tri.side_lengths();
            let (w1, w2, w3) = tri.interior_angles()?;
            to_json(&json!({
                "sides": [s1, s2, s3],
                "angles": [w1, w2, w3],
                "angle_sum": w1 + w2 + w3,
                "triangle_inequality": tri.triangle_inequality_holds(),
            }))
        }
        Command::Circumsphere { v } => {
            let v: [NilPoint; 4] = v.try_into().map_err(|v: Vec<NilPoint>| {
                NilError::InvalidArgument(format!("need exactly 4 vertices, got {}", v.len()))
            })?;
            to_json(&TranslationTetrahedron::from_array(v).circumsphere()?)
        }
        Command::Cover {
            lattice,
            verify,
            window,
            rng_seed,
        } => {
            let lat = lattice.build()?;
            let mut report = covering_radius(&lat)?;
            if let (Some(n), true) = (verify, report.convex) {
                report.verification = Some(verify_covering(&lat, report.covering_radius, n, window, rng_seed)?);
            }
            to_json(&report)
        }
        Command::Verify {
            lattice,
            radius,
            samples,
            window,
            rng_seed,
        } => {
            let lat = lattice.build()?;
            let radius = match radius {
                Some(r) => r,
                None => covering_radius(&lat)?.covering_radius,
            };
            to_json(&verify_covering(&lat, radius, samples, window, rng_seed)?)
        }
        Command::Table1 => {
            let mut s = String::from("row,t11,t13,t21,t22,t23,R,density,ref_R,ref_density\n");
            for (i, ((lat, rep), row)) in table1_harness()?.iter().zip(TABLE1.iter()).enumerate() {
                s.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    i + 1,
                    lat.params().map(csv_num).join(","),
                    csv_num(rep.covering_radius),
                    csv_num(rep.density),
                    csv_num(row.radius),
                    csv_num(row.density),
                ));
            }
            s
        }
        Command::Optimize {
            seed,
            method,
            max_evals,
            restarts,
            tolerance,
            rng_seed,
            trace,
        } => {
            let seed = NilLattice::from_params(seed)?;
            let cfg = SearchConfig {
                method,
                max_evals,
                restarts,
                tolerance,
                rng_seed,
                ..SearchConfig::new(seed)
            };
            let res = optimize_density(&cfg)?;
            if let Some(path) = trace {
                fs::write(path, trace_csv(&res.trace))?;
            }
            to_json(&json!({
                "best_lattice": res.best_lattice,
                "best_report": res.best_report,
                "evals": res.evals,
                "seed_density": res.trace.first().and_then(|e| e.density),
            }))
        }
    };
    Ok(out)
}

/// Parse `args` (program name first) and run; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                2
            } else {
                let _ = write!(out, "{}", e.render());
                0
            };
            return code;
        }
    };
    match execute(cli.command) {
        Ok(text) => {
            let written = match &cli.output {
                Some(path) => fs::write(path, &text),
                None => out.write_all(text.as_bytes()),
            };
            match written {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    1
                }
            }
        }
        Err(Failure::Compute(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut argv = vec!["nilcover"];
        argv.extend_from_slice(args);
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn rounding_keeps_twelve_digits() {
        let v = round_numbers(json!({ "a": 1.0 / 3.0, "b": [10.0 / 7.0], "n": 3 }));
        assert_eq!(v["a"], json!(0.333333333333));
        assert_eq!(v["b"][0], json!(1.42857142857));
        assert_eq!(v["n"], json!(3));
    }

    #[test]
    fn parsers() {
        assert_eq!(parse_point("-1,3,1").unwrap(), NilPoint::new(-1.0, 3.0, 1.0));
        assert!(parse_point("1,2").is_err());
        assert!(parse_point("1,2,nan").is_err());
        assert_eq!(parse_range("-2:2.5").unwrap(), (-2.0, 2.5));
        assert!(parse_range("2").is_err());
        assert_eq!(parse_params("1,1,1,1,1").unwrap(), [1.0; 5]);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(call(&["dist", "--p", "0,0,0", "--q", "-1,3,1"]).0, 0);
        assert_eq!(call(&["dist", "--p", "0,0,0"]).0, 2);
        assert_eq!(call(&["dist", "--p", "0,0", "--q", "1,1,1"]).0, 2);
        assert_eq!(call(&["frobnicate"]).0, 2);
        let (code, _, err) = call(&["curve", "--p", "0,0,0"]);
        assert_eq!(code, 1);
        assert!(err.contains("zero-length curve"));
        assert_eq!(call(&["--help"]).0, 0);
    }
}
