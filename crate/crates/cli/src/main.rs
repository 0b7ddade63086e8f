use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use curvlink::check::{run_suite_with, Fault, Suite};
use curvlink::duality::{angle_equals_distance, dual_complex};
use curvlink::forms::{ModelPoint, SpaceTag};
use curvlink::hipped::{build, HipSpace};
use curvlink::holonomy::loop_holonomy;
use curvlink::killing::{killing_foot_multistart, random_killing, verify_killing, KillingGenerator, UmbilicSurface};
use curvlink::obj::export_obj;
use curvlink::polygons::{develop, is_convex, regular_polygon, Polygon, PolygonModel};
use curvlink::solvers::{family_sweep, solve_pattern, tangent_dimension, theta_inverse, PatternSpec, TangentConstraint};

const SEED_VAR: &str = "CURVLINK_SEED";

#[derive(Parser)]
#[command(name = "curvlink", version, about = "Polygon moduli, hipped hypersurfaces, dualities and Killing foot points")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Sphere,
    Desitter,
}

impl From<Model> for PolygonModel {
    fn from(m: Model) -> Self {
        match m {
            Model::Sphere => PolygonModel::Sphere,
            Model::Desitter => PolygonModel::DeSitter,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Constraints {
    None,
    Equilateral,
    EquilateralFixed,
    Symmetric,
}

impl From<Constraints> for TangentConstraint {
    fn from(c: Constraints) -> Self {
        match c {
            Constraints::None => TangentConstraint::None,
            Constraints::Equilateral => TangentConstraint::Equilateral,
            Constraints::EquilateralFixed => TangentConstraint::EquilateralFixedLength,
            Constraints::Symmetric => TangentConstraint::Symmetric,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Space {
    Ads,
    Hyp,
}

impl From<Space> for HipSpace {
    fn from(s: Space) -> Self {
        match s {
            Space::Ads => HipSpace::AntiDeSitter,
            Space::Hyp => HipSpace::Hyperbolic,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum InjectFault {
    AngleSign,
}

#[derive(Subcommand)]
enum Verb {
    /// Regular polygon of the rotation-symmetric family.
    GenRegular {
        #[arg(long)]
        model: Model,
        #[arg(long)]
        k: usize,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Side lengths, angles, convexity and closure residual of a polygon file.
    Invariants { polygon: PathBuf },
    /// Dimension of the moduli tangent space at a polygon.
    TangentDim {
        polygon: PathBuf,
        #[arg(long, value_enum, default_value = "none")]
        constraints: Constraints,
    },
    /// Closes a length/angle pattern.
    Solve {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        guess: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Symmetric equilateral 2k-gon with prescribed angles.
    SolveTheta {
        #[arg(long)]
        model: Model,
        #[arg(long)]
        k: usize,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        targets: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Samples the regular family.
    Sweep {
        #[arg(long)]
        model: Model,
        #[arg(long)]
        k: usize,
        #[arg(long, allow_hyphen_values = true)]
        alpha_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        alpha_max: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Hipped hypersurface with a polygon file as link.
    Hipped {
        polygon: PathBuf,
        #[arg(long)]
        space: Space,
        /// Dimension of the ambient space (AdS^dim or H^dim).
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        mesh: Option<PathBuf>,
        #[arg(long)]
        dual: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        tmax: f64,
        #[arg(long, default_value_t = 8)]
        res: usize,
        /// Half-width of the stem grid for dim > 3.
        #[arg(long, default_value_t = 0.5)]
        stem_box: f64,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Foot point of a timelike unitary Killing field on an umbilic hypersurface.
    KillingFoot {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        t: f64,
        #[arg(long, conflicts_with = "matrix")]
        seed: Option<u64>,
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        starts: usize,
    },
    /// Distance of two hyperbolic points and the angle of their dual hyperplanes.
    DualDistance {
        /// Spatial coordinates of the first point, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        a: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        b: Vec<f64>,
    },
    /// Runs a self-check suite.
    Check {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, hide = true)]
        inject_fault: Option<InjectFault>,
    },
}

enum Failure {
    Validation(String),
    NonConvergence(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::NonConvergence(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::NonConvergence(m) | Failure::Io(m) => m,
        }
    }
}

impl From<curvlink::Error> for Failure {
    fn from(e: curvlink::Error) -> Self {
        match e {
            curvlink::Error::NonConvergence { .. } => Failure::NonConvergence(e.to_string()),
            other => Failure::Validation(other.to_string()),
        }
    }
}

#[derive(Serialize)]
struct RunReport {
    verb: &'static str,
    inputs_digest: String,
    outputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(flatten)]
    result: Value,
}

/// Output of one verb: the result fields and whether it counts as success.
struct Outcome {
    result: Value,
    status: std::result::Result<(), Failure>,
}

impl Outcome {
    fn ok(result: Value) -> Self {
        Self { result, status: Ok(()) }
    }
}

struct Run {
    hasher: Sha256,
    outputs: Vec<String>,
    seed: Option<u64>,
}

impl Run {
    fn read(&mut self, path: &Path) -> Result<String, Failure> {
        let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        self.hasher.update(path.as_os_str().as_encoded_bytes());
        self.hasher.update([0]);
        self.hasher.update(text.as_bytes());
        self.hasher.update([0]);
        Ok(text)
    }

    fn read_json<T: serde::de::DeserializeOwned>(&mut self, path: &Path) -> Result<T, Failure> {
        let text = self.read(path)?;
        serde_json::from_str(&text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
    }

    fn write(&mut self, path: &Path, text: &str) -> Result<(), Failure> {
        fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        self.outputs.push(path.display().to_string());
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, path: &Path, value: &T) -> Result<(), Failure> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Io(e.to_string()))?;
        text.push('\n');
        self.write(path, &text)
    }

    fn resolve_seed(&mut self, flag: Option<u64>) -> Result<u64, Failure> {
        let seed = match flag {
            Some(s) => s,
            None => match std::env::var(SEED_VAR) {
                Ok(v) => v
                    .trim()
                    .parse()
                    .map_err(|_| Failure::Io(format!("{SEED_VAR}={v:?} is not an unsigned integer")))?,
                Err(_) => 0,
            },
        };
        self.seed = Some(seed);
        Ok(seed)
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serialisable result")
}

fn verb_name(v: &Verb) -> &'static str {
    match v {
        Verb::GenRegular { .. } => "gen-regular",
        Verb::Invariants { .. } => "invariants",
        Verb::TangentDim { .. } => "tangent-dim",
        Verb::Solve { .. } => "solve",
        Verb::SolveTheta { .. } => "solve-theta",
        Verb::Sweep { .. } => "sweep",
        Verb::Hipped { .. } => "hipped",
        Verb::KillingFoot { .. } => "killing-foot",
        Verb::DualDistance { .. } => "dual-distance",
        Verb::Check { .. } => "check",
    }
}

fn polygon_summary(p: &Polygon) -> Result<Value, Failure> {
    let inv = p.invariants()?;
    let dev = develop(p.model, &inv.lengths, &inv.angles, &inv.frames[0].matrix())?;
    Ok(json!({
        "model": p.model,
        "k": p.k(),
        "lengths": inv.lengths,
        "angles": inv.angles,
        "convex": is_convex(&inv),
        "closure_residual": dev.residual,
    }))
}

fn dispatch(verb: Verb, run: &mut Run) -> Result<Outcome, Failure> {
    match verb {
        Verb::GenRegular { model, k, alpha, out } => {
            let p = regular_polygon(model.into(), k, alpha)?;
            let mut result = polygon_summary(&p)?;
            result["alpha"] = json!(alpha);
            match out {
                Some(path) => run.write_json(&path, &p)?,
                None => result["polygon"] = to_value(&p),
            }
            Ok(Outcome::ok(result))
        }
        Verb::Invariants { polygon } => {
            let p: Polygon = run.read_json(&polygon)?;
            Ok(Outcome::ok(polygon_summary(&p)?))
        }
        Verb::TangentDim { polygon, constraints } => {
            let p: Polygon = run.read_json(&polygon)?;
            let c: TangentConstraint = constraints.into();
            let dim = tangent_dimension(&p, c)?;
            Ok(Outcome::ok(json!({ "constraints": c, "k": p.k(), "dimension": dim })))
        }
        Verb::Solve { spec, guess, out } => {
            let spec: PatternSpec = run.read_json(&spec)?;
            let guess: Value = run.read_json(&guess)?;
            let field = |name: &str| -> Result<Vec<f64>, Failure> {
                serde_json::from_value(guess.get(name).cloned().unwrap_or(Value::Null))
                    .map_err(|e| Failure::Io(format!("guess field {name:?}: {e}")))
            };
            let report = solve_pattern(&spec, &field("lengths")?, &field("angles")?)?;
            if let (Some(path), Some(p)) = (out, report.polygon.as_ref().filter(|_| report.converged)) {
                run.write_json(&path, p)?;
            }
            let status = if report.converged {
                Ok(())
            } else {
                Err(Failure::NonConvergence(report.to_string()))
            };
            Ok(Outcome {
                result: to_value(&report),
                status,
            })
        }
        Verb::SolveTheta { model, k, targets, out } => {
            let p = theta_inverse(model.into(), k, &targets)?;
            let mut result = polygon_summary(&p)?;
            let inv = p.invariants()?;
            let miss = (0..2 * k).map(|i| (inv.angles[i] - targets[i % k]).abs()).fold(0.0, f64::max);
            result["targets"] = json!(targets);
            result["target_residual"] = json!(miss);
            match out {
                Some(path) => run.write_json(&path, &p)?,
                None => result["polygon"] = to_value(&p),
            }
            Ok(Outcome::ok(result))
        }
        Verb::Sweep {
            model,
            k,
            alpha_min,
            alpha_max,
            steps,
            csv,
        } => {
            let sweep = family_sweep(model.into(), k, alpha_min, alpha_max, steps)?;
            if let Some(path) = csv {
                run.write(&path, &sweep.to_csv())?;
            }
            Ok(Outcome::ok(to_value(&sweep)))
        }
        Verb::Hipped {
            polygon,
            space,
            dim,
            mesh,
            dual,
            tmax,
            res,
            stem_box,
            seed,
        } => {
            let p: Polygon = run.read_json(&polygon)?;
            if dim < 3 {
                return Err(Failure::Validation(format!("--dim {dim}: ambient dimension must be at least 3")));
            }
            let hd = build(space.into(), dim - 1, &p)?;
            let (wedge, dihedral) = hd.recover_angles()?;
            let convex = hd.convexity()?;
            let (_, holonomy_residual) = loop_holonomy(&hd)?;
            let mut result = json!({
                "space": hd.space,
                "dim": dim,
                "wedge_angles": wedge,
                "dihedral_angles": dihedral,
                "cone_angle": hd.cone_angle(),
                "convex": convex,
                "holonomy_residual": holonomy_residual,
            });
            if convex && hd.space == HipSpace::AntiDeSitter {
                let seed = run.resolve_seed(seed)?;
                result["spacelike_margin"] = json!(hd.spacelike_check(200, seed)?);
            }
            if let Some(path) = mesh {
                if dim != 3 {
                    return Err(Failure::Validation(format!("OBJ export needs --dim 3, got {dim}")));
                }
                let m = hd.sample_mesh(tmax, stem_box, res)?;
                let text = export_obj(&m)?;
                run.write(&path, &text)?;
                result["mesh"] = json!({
                    "vertices": m.vertices.len(),
                    "faces": m.faces.len(),
                    "max_quadric_defect": m.max_quadric_defect(),
                });
            }
            if let Some(path) = dual {
                let dc = dual_complex(&hd)?;
                let (v, e, f) = dc.cell_counts();
                result["dual"] = json!({ "cells": [v, e, f], "degenerate": dc.degenerate });
                run.write_json(&path, &dc)?;
            }
            Ok(Outcome::ok(result))
        }
        Verb::KillingFoot {
            d,
            t,
            seed,
            matrix,
            starts,
        } => {
            let seed = run.resolve_seed(seed)?;
            let u = match matrix {
                Some(path) => run.read_json::<KillingGenerator>(&path)?,
                None => random_killing(d, seed)?,
            };
            if u.d != d {
                return Err(Failure::Validation(format!("generator is for d = {}, --d is {d}", u.d)));
            }
            let surface = UmbilicSurface::new(t, d)?;
            let found = killing_foot_multistart(&u, &surface, starts, seed)?;
            Ok(Outcome::ok(json!({
                "generator": u,
                "generator_residuals": verify_killing(&u, 20, seed),
                "foot": found.foot,
                "starts": found.starts,
                "spread": found.spread,
            })))
        }
        Verb::DualDistance { a, b } => {
            if a.len() != b.len() || a.len() < 2 {
                return Err(Failure::Validation("points need the same number (at least 2) of coordinates".into()));
            }
            let lift = |c: &[f64]| {
                let mut v = c.to_vec();
                v.push((1.0 + c.iter().map(|x| x * x).sum::<f64>()).sqrt());
                ModelPoint::from_coords(SpaceTag::Hyperbolic(c.len()), v)
            };
            let (angle, distance) = angle_equals_distance(&lift(&a)?, &lift(&b)?)?;
            Ok(Outcome::ok(json!({
                "angle": angle,
                "distance": distance,
                "discrepancy": (angle - distance).abs(),
            })))
        }
        Verb::Check {
            suite,
            seed,
            inject_fault,
        } => {
            let suite: Suite = suite.parse().map_err(|e: curvlink::Error| Failure::Io(e.to_string()))?;
            let seed = run.resolve_seed(seed)?;
            let fault = match inject_fault {
                Some(InjectFault::AngleSign) => Fault::AngleSign,
                None => Fault::None,
            };
            let report = run_suite_with(suite, seed, fault);
            let status = if report.passed {
                Ok(())
            } else {
                Err(Failure::Validation(format!("failing checks: {}", report.failures.join(", "))))
            };
            Ok(Outcome {
                result: to_value(&report),
                status,
            })
        }
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    let start = Instant::now();
    let verb = verb_name(&cli.verb);
    let mut hasher = Sha256::new();
    for a in &args[1..] {
        hasher.update(a.as_bytes());
        hasher.update([0]);
    }
    let mut run = Run {
        hasher,
        outputs: Vec::new(),
        seed: None,
    };
    let outcome = dispatch(cli.verb, &mut run);
    let code = match outcome {
        Ok(out) => {
            let report = RunReport {
                verb,
                inputs_digest: format!("{:x}", run.hasher.finalize()),
                outputs: run.outputs,
                seed: run.seed,
                result: out.result,
            };
            match serde_json::to_string_pretty(&report) {
                Ok(text) => println!("{text}"),
                Err(e) => eprintln!("error: {e}"),
            }
            match out.status {
                Ok(()) => 0,
                Err(f) => {
                    eprintln!("error: {}", f.message());
                    f.code()
                }
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            let failure = json!({ "verb": verb, "error": f.message(), "exit_code": f.code() });
            println!("{}", serde_json::to_string_pretty(&failure).unwrap_or_default());
            f.code()
        }
    };
    eprintln!("{verb}: wall time {:.3} s", start.elapsed().as_secs_f64());
    ExitCode::from(code)
}
