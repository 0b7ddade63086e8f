//! Seeded self-check suites over the invariants of every module.
//!
//! Each check records the worst observed value against its bound, so a
//! report is both a pass/fail verdict and a numeric trace. Reports depend only
//! on the suite and the seed.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use nalgebra::{DVector, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::duality::{ads_half_turn_check, angle_equals_distance, dual_complex, dual_hyperplane, dual_point};
use crate::error::{Error, Result};
use crate::forms::{ip, AmbientVector, ModelPoint, SpaceTag};
use crate::hipped::{build, second_fundamental_form_fd, HipSpace, HippedData};
use crate::holonomy::{bend_representation, dihedral_model, loop_factors, loop_holonomy, BendTarget, Generator, Representation};
use crate::killing::{
    fiber_sample, killing_foot, properness_bound, random_ads_point, random_killing, standard_j, verify_killing,
    UmbilicSurface,
};
use crate::obj::{export_obj, graph_lipschitz_gap, parse_obj, round_trip_defect};
use crate::polygons::{
    constraint_matrix, desitter_alpha_barrier, develop, is_convex, random_polygon, regular_alpha_for_length, regular_length, regular_polygon,
    Polygon, PolygonInvariants, PolygonModel,
};
use crate::solvers::{family_sweep, solve_polygon, tangent_dimension, theta_inverse, PatternSpec, TangentConstraint};

const MODELS: [PolygonModel; 2] = [PolygonModel::Sphere, PolygonModel::DeSitter];
const SPACES: [HipSpace; 2] = [HipSpace::AntiDeSitter, HipSpace::Hyperbolic];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Polygons,
    Hipped,
    Killing,
    Duality,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Suite::All),
            "polygons" => Ok(Suite::Polygons),
            "hipped" => Ok(Suite::Hipped),
            "killing" => Ok(Suite::Killing),
            "duality" => Ok(Suite::Duality),
            other => Err(Error::Invalid(format!("unknown suite {other:?}"))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::All => "all",
            Suite::Polygons => "polygons",
            Suite::Hipped => "hipped",
            Suite::Killing => "killing",
            Suite::Duality => "duality",
        };
        f.write_str(s)
    }
}

/// Deliberate defects used to confirm that the suites catch regressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// Reports every polygon angle with the wrong sign.
    AngleSign,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">")]
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckItem {
    pub name: String,
    pub passed: bool,
    pub worst: f64,
    pub relation: Relation,
    pub bound: f64,
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckItem>,
    /// Names of the failing checks.
    pub failures: Vec<String>,
}

struct Outcome {
    worst: f64,
    samples: usize,
}

struct Runner {
    seed: u64,
    fault: Fault,
    stream: u64,
    checks: Vec<CheckItem>,
}

impl Runner {
    fn rng(&mut self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        self.stream += 1;
        rng
    }

    fn run<F>(&mut self, name: &str, relation: Relation, bound: f64, f: F)
    where
        F: FnOnce(&mut Self, &mut ChaCha8Rng) -> Result<Outcome>,
    {
        let mut rng = self.rng();
        let item = match f(self, &mut rng) {
            Ok(o) => {
                let passed = match relation {
                    Relation::AtMost => o.worst <= bound,
                    Relation::Above => o.worst > bound,
                };
                CheckItem {
                    name: name.into(),
                    passed,
                    worst: o.worst,
                    relation,
                    bound,
                    samples: o.samples,
                    error: None,
                }
            }
            Err(e) => CheckItem {
                name: name.into(),
                passed: false,
                worst: f64::NAN,
                relation,
                bound,
                samples: 0,
                error: Some(e.to_string()),
            },
        };
        self.checks.push(item);
    }

    /// Invariants as seen by the checks, with the configured fault applied.
    fn observed(&self, p: &Polygon) -> Result<PolygonInvariants> {
        let mut inv = p.invariants()?;
        if self.fault == Fault::AngleSign {
            for a in &mut inv.angles {
                *a = -*a;
            }
        }
        Ok(inv)
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> SuiteReport {
    run_suite_with(suite, seed, Fault::None)
}

pub fn run_suite_with(suite: Suite, seed: u64, fault: Fault) -> SuiteReport {
    let mut r = Runner {
        seed,
        fault,
        stream: 0,
        checks: Vec::new(),
    };
    if matches!(suite, Suite::All | Suite::Polygons) {
        polygon_checks(&mut r);
    }
    if matches!(suite, Suite::All | Suite::Hipped) {
        hipped_checks(&mut r);
    }
    if matches!(suite, Suite::All | Suite::Duality) {
        duality_checks(&mut r);
    }
    if matches!(suite, Suite::All | Suite::Killing) {
        killing_checks(&mut r);
    }
    let failures: Vec<String> = r.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
    SuiteReport {
        suite,
        seed,
        passed: failures.is_empty(),
        checks: r.checks,
        failures,
    }
}

fn count(flag: bool) -> f64 {
    if flag {
        1.0
    } else {
        0.0
    }
}

fn random_k<R: Rng>(rng: &mut R) -> usize {
    rng.gen_range(3..=8)
}

/// Closed-form first variation of `(l_0, l_1, theta_0, theta_1)` when
/// vertex 1 moves along its outgoing direction at unit speed.
fn vertex_slide_variation(model: PolygonModel, l0: f64, theta1: f64) -> [f64; 4] {
    let (c, s) = match model {
        PolygonModel::Sphere => (theta1.cos(), theta1.sin()),
        PolygonModel::DeSitter => (theta1.cosh(), theta1.sinh()),
    };
    [c, -1.0, s / l0.sin(), -s * l0.cos() / l0.sin()]
}

fn polygon_checks(r: &mut Runner) {
    r.run("polygon.validity", Relation::AtMost, 0.0, |_, rng| {
        let mut bad = 0.0;
        for j in 0..40 {
            let p = random_polygon(MODELS[j % 2], random_k(rng), 0.3, rng)?;
            bad += count(!p.validate().is_empty());
        }
        Ok(Outcome { worst: bad, samples: 40 })
    });
    r.run("polygon.closure", Relation::AtMost, 1e-9, |me, rng| {
        let mut worst = 0.0f64;
        for j in 0..60 {
            let p = random_polygon(MODELS[j % 2], random_k(rng), 0.3, rng)?;
            let inv = me.observed(&p)?;
            let dev = develop(p.model, &inv.lengths, &inv.angles, &inv.frames[0].matrix())?;
            worst = worst.max(dev.residual);
        }
        Ok(Outcome { worst, samples: 60 })
    });
    r.run("polygon.convexity_sign", Relation::AtMost, 0.0, |me, rng| {
        let mut bad = 0.0;
        for j in 0..20 {
            let model = MODELS[j % 2];
            let k = random_k(rng);
            let reach = match model {
                PolygonModel::Sphere => 1.2,
                PolygonModel::DeSitter => desitter_alpha_barrier(k),
            };
            let alpha = reach * rng.gen_range(0.1..0.8) * if j % 4 < 2 { 1.0 } else { -1.0 };
            let p = regular_polygon(model, k, alpha)?;
            bad += count(is_convex(&me.observed(&p)?) != (alpha > 0.0));
        }
        Ok(Outcome { worst: bad, samples: 20 })
    });
    r.run("polygon.tangent_dimension", Relation::AtMost, 0.0, |_, rng| {
        let mut bad = 0.0;
        let mut n = 0;
        for model in MODELS {
            for k in 3..=8 {
                let generic = random_polygon(model, k, 0.3, rng)?;
                let alpha = regular_alpha_for_length(model, k, (TAU / k as f64) * if model == PolygonModel::Sphere { 0.7 } else { 1.3 })?;
                let regular = regular_polygon(model, k, alpha)?;
                let doubled = regular_polygon(model, 2 * k, rng.gen_range(0.1..0.5))?;
                let got = [
                    tangent_dimension(&generic, TangentConstraint::None)?,
                    tangent_dimension(&regular, TangentConstraint::Equilateral)?,
                    tangent_dimension(&regular, TangentConstraint::EquilateralFixedLength)?,
                    tangent_dimension(&doubled, TangentConstraint::Symmetric)?,
                ];
                let want = [2 * k - 3, k - 2, k - 3, k];
                bad += got.iter().zip(&want).filter(|(a, b)| a != b).count() as f64;
                n += 4;
            }
        }
        Ok(Outcome { worst: bad, samples: n })
    });
    r.run("polygon.variation_formulas", Relation::AtMost, 1e-6, |_, rng| {
        let h = 1e-5;
        let mut worst = 0.0f64;
        for j in 0..20 {
            let model = MODELS[j % 2];
            let p = random_polygon(model, random_k(rng), 0.3, rng)?;
            let inv = p.invariants()?;
            let dir = inv.frames[1].u_plus;
            let (plus, minus) = (p.perturb_vertex(1, &dir, h)?.invariants()?, p.perturb_vertex(1, &dir, -h)?.invariants()?);
            let fd = [
                (plus.lengths[0] - minus.lengths[0]) / (2.0 * h),
                (plus.lengths[1] - minus.lengths[1]) / (2.0 * h),
                (plus.angles[0] - minus.angles[0]) / (2.0 * h),
                (plus.angles[1] - minus.angles[1]) / (2.0 * h),
            ];
            let exact = vertex_slide_variation(model, inv.lengths[0], inv.angles[1]);
            for (a, b) in fd.iter().zip(&exact) {
                worst = worst.max((a - b).abs());
            }
        }
        Ok(Outcome { worst, samples: 20 })
    });
    r.run("polygon.constraint_equation", Relation::AtMost, 1e-6, |_, rng| {
        let h = 1e-5;
        let mut worst = 0.0f64;
        for j in 0..20 {
            let model = MODELS[j % 2];
            let p = random_polygon(model, random_k(rng), 0.3, rng)?;
            let inv = p.invariants()?;
            let a = constraint_matrix(&inv);
            let i = rng.gen_range(0..p.k());
            let raw = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let v = p.vertex(i);
            let xi = raw - v * model.dot(&raw, v);
            let xi = xi / xi.norm();
            let (plus, minus) = (p.perturb_vertex(i, &xi, h)?.invariants()?, p.perturb_vertex(i, &xi, -h)?.invariants()?);
            let k = p.k();
            let tangent = DVector::from_fn(2 * k, |c, _| {
                if c < k {
                    (plus.angles[c] - minus.angles[c]) / (2.0 * h)
                } else {
                    (plus.lengths[c - k] - minus.lengths[c - k]) / (2.0 * h)
                }
            });
            worst = worst.max((a * tangent).amax());
        }
        Ok(Outcome { worst, samples: 20 })
    });
    r.run("solver.equilateral_closure", Relation::AtMost, 1e-9, |_, rng| {
        let mut worst = 0.0f64;
        for (j, model) in MODELS.iter().enumerate() {
            let k = 5 + j;
            let alpha = rng.gen_range(0.2..0.5);
            let l = regular_length(*model, k, alpha);
            let spec = PatternSpec::equilateral(*model, k, l);
            let target = regular_polygon(*model, k, alpha)?.invariants()?;
            let guess: Vec<f64> = target.angles.iter().map(|a| a + rng.gen_range(-0.02..0.02)).collect();
            let p = solve_polygon(&spec, &vec![l; k], &guess)?;
            let inv = p.invariants()?;
            let dev = develop(*model, &inv.lengths, &inv.angles, &inv.frames[0].matrix())?;
            worst = worst.max(dev.residual);
            worst = worst.max(inv.lengths.iter().map(|x| (x - l).abs()).fold(0.0, f64::max));
        }
        Ok(Outcome { worst, samples: 2 })
    });
    r.run("solver.theta_inverse", Relation::AtMost, 1e-8, |_, rng| {
        let mut worst = 0.0f64;
        let mut n = 0;
        for model in MODELS {
            for k in 2..=5 {
                let zero = theta_inverse(model, k, &vec![0.0; k])?.invariants()?;
                worst = worst.max(zero.lengths.iter().map(|l| (l - PI / k as f64).abs()).fold(0.0, f64::max));
                let targets: Vec<f64> = (0..k).map(|_| rng.gen_range(-0.1..0.1)).collect();
                let inv = theta_inverse(model, k, &targets)?.invariants()?;
                for i in 0..2 * k {
                    worst = worst.max((inv.angles[i] - targets[i % k]).abs());
                }
                n += 2;
            }
        }
        Ok(Outcome { worst, samples: n })
    });
    r.run("solver.family_sweep", Relation::AtMost, 1e-12, |_, _| {
        let mut worst = 0.0f64;
        let mut n = 0;
        for model in MODELS {
            let sweep = family_sweep(model, 6, 0.05, 0.6, 12)?;
            for row in &sweep.rows {
                worst = worst.max((row.length - regular_length(model, 6, row.alpha)).abs());
                n += 1;
            }
        }
        Ok(Outcome { worst, samples: n })
    });
}

fn random_build<R: Rng>(space: HipSpace, rng: &mut R, spread: f64) -> Result<HippedData> {
    let d = rng.gen_range(2..=4);
    let p = random_polygon(space.link_model(), random_k(rng), spread, rng)?;
    build(space, d, &p)
}

fn hipped_checks(r: &mut Runner) {
    r.run("hipped.angle_round_trip", Relation::AtMost, 1e-9, |me, rng| {
        let mut worst = 0.0f64;
        for j in 0..30 {
            let hd = random_build(SPACES[j % 2], rng, 0.3)?;
            let inv = me.observed(&hd.polygon)?;
            let (wedge, dihedral) = hd.recover_angles()?;
            for i in 0..hd.wedge_count() {
                worst = worst.max((wedge[i] - inv.lengths[i]).abs()).max((dihedral[i] - inv.angles[i]).abs());
            }
        }
        Ok(Outcome { worst, samples: 30 })
    });
    r.run("hipped.cone_angle", Relation::AtMost, 0.0, |_, rng| {
        let mut worst = 0.0f64;
        for j in 0..20 {
            let hd = random_build(SPACES[j % 2], rng, 0.3)?;
            let total: f64 = hd.invariants.lengths.iter().sum();
            worst = worst.max((hd.cone_angle() - total).abs());
        }
        Ok(Outcome { worst, samples: 20 })
    });
    r.run("hipped.large_cone_angle", Relation::AtMost, 1e-12, |_, _| {
        let mut worst = 0.0f64;
        let mut n = 0;
        for wedges in 3..=5 {
            for half in wedges + 1..=wedges + 3 {
                let k = 2 * half;
                let l = PI / wedges as f64;
                let p = regular_polygon(PolygonModel::DeSitter, k, regular_alpha_for_length(PolygonModel::DeSitter, k, l)?)?;
                let hd = build(HipSpace::AntiDeSitter, 3, &p)?;
                let want = TAU * half as f64 / wedges as f64;
                let excess = if hd.cone_angle() > TAU { 0.0 } else { 1.0 };
                worst = worst.max((hd.cone_angle() - want).abs() / want).max(excess);
                n += 1;
            }
        }
        Ok(Outcome { worst, samples: n })
    });
    r.run("hipped.convexity", Relation::AtMost, 0.0, |me, rng| {
        let mut bad = 0.0;
        for j in 0..40 {
            let hd = random_build(SPACES[j % 2], rng, 0.8)?;
            bad += count(hd.convexity()? != is_convex(&me.observed(&hd.polygon)?));
        }
        Ok(Outcome { worst: bad, samples: 40 })
    });
    r.run("holonomy.loop_closure", Relation::AtMost, 1e-9, |_, rng| {
        let mut worst = 0.0f64;
        for j in 0..30 {
            let hd = random_build(SPACES[j % 2], rng, 0.3)?;
            let (hol, residual) = loop_holonomy(&hd)?;
            let product = loop_factors(&hd)?
                .iter()
                .fold(crate::holonomy::IsometryMatrix::identity(hol.signature), |acc, f| f.compose(&acc));
            worst = worst.max(residual).max((product.entries - &hol.entries).amax());
        }
        Ok(Outcome { worst, samples: 30 })
    });
    r.run("holonomy.bending_form", Relation::AtMost, 1e-11, |_, rng| {
        let mut worst = 0.0f64;
        let mut n = 0;
        for d in 2..=4 {
            let (s1, s2) = dihedral_model(d, rng.gen_range(2..=6))?;
            let rep = Representation {
                signature: (d, 1),
                generators: vec![
                    Generator { label: "a".into(), matrix: s1.entries, mask: false, hypersurface: false },
                    Generator { label: "b".into(), matrix: s2.entries, mask: true, hypersurface: false },
                ],
            };
            for target in [BendTarget::Hyperbolic, BendTarget::AntiDeSitter] {
                let bent = bend_representation(&rep, rng.gen_range(-3.0..3.0), target)?;
                worst = worst.max(bent.max_scaled_form_defect());
                n += 1;
            }
        }
        Ok(Outcome { worst, samples: n })
    });
    r.run("hipped.spacelike_margin", Relation::Above, 0.0, |_, rng| {
        let mut worst = f64::INFINITY;
        let mut n = 0;
        while n < 6 {
            let hd = random_build(HipSpace::AntiDeSitter, rng, 0.3)?;
            if !hd.convexity()? {
                continue;
            }
            worst = worst.min(hd.spacelike_check(30, rng.gen())?);
            n += 1;
        }
        Ok(Outcome { worst, samples: n })
    });
    r.run("hipped.mesh_quadric", Relation::AtMost, 1e-9, |_, rng| {
        let mut worst = 0.0f64;
        for (j, space) in SPACES.iter().enumerate() {
            let hd = random_build(*space, rng, 0.3)?;
            let mesh = hd.sample_mesh(1.5, 0.5, 4 + j)?;
            worst = worst.max(mesh.max_quadric_defect());
        }
        Ok(Outcome { worst, samples: 2 })
    });
    r.run("obj.round_trip", Relation::AtMost, 1e-8, |_, rng| {
        let mut worst = 0.0f64;
        for space in SPACES {
            let p = random_polygon(space.link_model(), random_k(rng), 0.3, rng)?;
            let mesh = build(space, 2, &p)?.sample_mesh(1.5, 0.0, 6)?;
            let data = parse_obj(&export_obj(&mesh)?)?;
            worst = worst.max(round_trip_defect(mesh.tag, &data)?);
        }
        Ok(Outcome { worst, samples: 2 })
    });
    r.run("obj.graph_lipschitz", Relation::Above, 0.0, |_, rng| {
        let mut worst = f64::INFINITY;
        let mut n = 0;
        while n < 3 {
            let p = random_polygon(PolygonModel::DeSitter, random_k(rng), 0.3, rng)?;
            let hd = build(HipSpace::AntiDeSitter, 2, &p)?;
            if !hd.convexity()? {
                continue;
            }
            let data = parse_obj(&export_obj(&hd.sample_mesh(2.0, 0.0, 6)?)?)?;
            worst = worst.min(graph_lipschitz_gap(&data)?);
            n += 1;
        }
        Ok(Outcome { worst, samples: n })
    });
}

fn random_hyperbolic_point<R: Rng>(rng: &mut R) -> Result<ModelPoint> {
    let c: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.5..1.5)).collect();
    let t = (1.0 + c.iter().map(|v| v * v).sum::<f64>()).sqrt();
    ModelPoint::from_coords(SpaceTag::Hyperbolic(3), vec![c[0], c[1], c[2], t])
}

fn duality_checks(r: &mut Runner) {
    r.run("duality.edge_dihedral", Relation::AtMost, 1e-9, |_, rng| {
        let mut worst = 0.0f64;
        let mut n = 0;
        while n < 20 {
            let hd = random_build(SPACES[n % 2], rng, 0.3)?;
            if !hd.convexity()? {
                continue;
            }
            let dc = dual_complex(&hd)?;
            let (_, dihedral) = hd.recover_angles()?;
            for (e, t) in dc.edge_lengths.iter().zip(&dihedral) {
                worst = worst.max((e - t).abs());
            }
            let k = hd.wedge_count();
            worst = worst.max(count(dc.cell_counts() != (k, k, 1)));
            n += 1;
        }
        Ok(Outcome { worst, samples: n })
    });
    r.run("duality.angle_distance", Relation::AtMost, 1e-10, |_, rng| {
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let (a, b) = (random_hyperbolic_point(rng)?, random_hyperbolic_point(rng)?);
            let (angle, dist) = angle_equals_distance(&a, &b)?;
            worst = worst.max((angle - dist).abs());
        }
        Ok(Outcome { worst, samples: 100 })
    });
    r.run("duality.involution", Relation::AtMost, 1e-15, |_, rng| {
        let mut worst = 0.0f64;
        for _ in 0..50 {
            let p = random_hyperbolic_point(rng)?;
            let back = dual_hyperplane(&dual_point(&p)?)?;
            worst = worst.max((back.coords() - p.coords()).amax());
        }
        Ok(Outcome { worst, samples: 50 })
    });
    r.run("duality.ads_half_turn", Relation::AtMost, 0.0, |_, rng| {
        let mut bad = 0.0;
        for j in 0..100 {
            let d = 1 + j % 2;
            let u = random_killing(d, rng.gen())?;
            let x = random_ads_point(d, rng);
            let tag = SpaceTag::AntiDeSitter(2 * d + 1);
            let p = ModelPoint::new(AmbientVector::from_dvector(tag, x.clone())?)?;
            let t = AmbientVector::from_dvector(tag, u.apply(&x))?;
            bad += count(!ads_half_turn_check(&p, &t)?);
        }
        Ok(Outcome { worst: bad, samples: 100 })
    });
}

fn killing_checks(r: &mut Runner) {
    r.run("killing.algebra", Relation::AtMost, 1e-9, |_, rng| {
        let mut worst = 0.0f64;
        for j in 0..20 {
            let u = random_killing(1 + j % 2, rng.gen())?;
            let rep = verify_killing(&u, 20, rng.gen());
            worst = worst.max(rep.antisymmetry).max(rep.square).max(rep.unit_norm);
        }
        Ok(Outcome { worst, samples: 20 })
    });
    r.run("killing.foot_agreement", Relation::AtMost, 1e-6, |_, rng| {
        let mut worst = 0.0f64;
        let mut n = 0;
        for d in 1..=2 {
            for t in [0.3, 0.6, 1.0] {
                let surface = UmbilicSurface::new(t, d)?;
                let u = random_killing(d, rng.gen())?;
                let feet: Vec<_> = (0..10)
                    .map(|_| {
                        let y0: Vec<f64> = (0..2 * d).map(|_| rng.gen_range(-2.0..2.0)).collect();
                        killing_foot(&u, &surface, &y0, 1e-10, 200)
                    })
                    .collect::<Result<_>>()?;
                for a in &feet {
                    for b in &feet {
                        let gap = a.y.iter().zip(&b.y).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
                        worst = worst.max(gap);
                    }
                }
                n += 1;
            }
        }
        Ok(Outcome { worst, samples: n })
    });
    r.run("killing.foot_value", Relation::AtMost, 1e-8, |_, rng| {
        let mut worst = 0.0f64;
        let mut n = 0;
        for d in 1..=2 {
            for t in [0.3, 0.6, 1.0] {
                let surface = UmbilicSurface::new(t, d)?;
                let u = random_killing(d, rng.gen())?;
                for _ in 0..5 {
                    let y0: Vec<f64> = (0..2 * d).map(|_| rng.gen_range(-2.0..2.0)).collect();
                    worst = worst.max((killing_foot(&u, &surface, &y0, 1e-10, 200)?.f - 1.0).abs());
                    n += 1;
                }
            }
        }
        Ok(Outcome { worst, samples: n })
    });
    r.run("killing.standard_foot", Relation::AtMost, 1e-10, |_, rng| {
        let mut worst = 0.0f64;
        for d in 1..=2 {
            let surface = UmbilicSurface::new(rng.gen_range(0.2..1.2), d)?;
            let y0: Vec<f64> = (0..2 * d).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let foot = killing_foot(&standard_j(d), &surface, &y0, 1e-12, 200)?;
            worst = worst.max(foot.y.iter().map(|v| v.abs()).fold(0.0, f64::max));
        }
        Ok(Outcome { worst, samples: 2 })
    });
    r.run("killing.properness", Relation::Above, -1e-9, |_, rng| {
        let mut worst = f64::INFINITY;
        let mut n = 0;
        for d in 1..=2 {
            for t in [0.3, 1.0] {
                let surface = UmbilicSurface::new(t, d)?;
                let u = random_killing(d, rng.gen())?;
                let foot = killing_foot(&u, &surface, &vec![0.0; 2 * d], 1e-10, 200)?;
                let samples: Vec<Vec<f64>> =
                    (0..100).map(|_| (0..2 * d).map(|_| rng.gen_range(-3.0..3.0)).collect()).collect();
                let rep = properness_bound(&u, &surface, &foot.y, &samples)?;
                worst = worst.min(rep.min_slack);
                n += rep.checked;
            }
        }
        Ok(Outcome { worst, samples: n })
    });
    r.run("killing.umbilic_second_form", Relation::AtMost, 1e-4, |_, rng| {
        let mut worst = 0.0f64;
        let mut n = 0;
        for d in 1..=2 {
            for t in [0.3, 0.6, 1.0] {
                let surface = UmbilicSurface::new(t, d)?;
                let ps = surface.as_param_surface();
                let m = 2 * d;
                let y: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let e1: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let e2: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let ii = second_fundamental_form_fd(&ps, &y, &e1, &e2, 1e-4)?;
                let h = 1e-5;
                let shift = |v: &[f64], s: f64| -> Vec<f64> { y.iter().zip(v).map(|(a, b)| a + s * b).collect() };
                let d1 = (surface.point(&shift(&e1, h))? - surface.point(&shift(&e1, -h))?) / (2.0 * h);
                let d2 = (surface.point(&shift(&e2, h))? - surface.point(&shift(&e2, -h))?) / (2.0 * h);
                let g = ip(surface.tag(), d1.as_slice(), d2.as_slice());
                let want = -t.tan() * g;
                worst = worst.max((ii - want).abs() / want.abs().max(1e-3));
                n += 1;
            }
        }
        Ok(Outcome { worst, samples: n })
    });
    r.run("killing.fiber", Relation::AtMost, 1e-12, |_, rng| {
        let mut worst = 0.0f64;
        for d in 1..=2 {
            worst = worst.max(fiber_sample(&UmbilicSurface::new(0.7, d)?, 10, rng.gen())?);
        }
        Ok(Outcome { worst, samples: 20 })
    });
}
