//! Labelled polygons on the round sphere `S^2` and spacelike polygons on the
//! de Sitter plane `dS^2`.
//!
//! At each vertex `v_i` the frame `(v_i, u_i^+, w_i)` is built from the unit
//! direction `u_i^+` of the outgoing edge and the unit normal `w_i` completing
//! a direct orthonormal basis. On `dS^2` the normal is the future-pointing
//! timelike vector, `w = -J (v x u)` with `J = diag(1, 1, -1)`.
//! The angle `theta_i` is defined by
//!
//! ```text
//! sphere:  -u_i^- = cos(theta_i) u_i^+ + sin(theta_i) w_i
//! dS:      -u_i^- = cosh(theta_i) u_i^+ + sinh(theta_i) w_i
//! ```
//!
//! so `theta_i = 0` exactly when `v_{i-1}, v_i, v_{i+1}` are aligned, and a
//! polygon is convex when every `theta_i >= 0`.

use std::f64::consts::{PI, TAU};
use std::fmt;

use nalgebra::{DMatrix, Matrix3, Vector3};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{ModelPoint, SpaceTag};
use crate::linalg::{null_space, RANK_CUTOFF};

const VERTEX_TOL: f64 = 1e-9;
const CROSSING_TOL: f64 = 1e-9;
const CORNER_TOL: f64 = 1e-12;
const RANDOM_MIN_SIDE: f64 = 0.1;
const RANDOM_MAX_ANGLE: f64 = 2.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolygonModel {
    Sphere,
    #[serde(rename = "desitter")]
    DeSitter,
}

impl PolygonModel {
    pub fn tag(self) -> SpaceTag {
        match self {
            PolygonModel::Sphere => SpaceTag::Sphere2,
            PolygonModel::DeSitter => SpaceTag::DeSitter2,
        }
    }

    /// `q(w)` of the frame normal: +1 on the sphere, -1 on de Sitter.
    pub fn normal_sign(self) -> f64 {
        match self {
            PolygonModel::Sphere => 1.0,
            PolygonModel::DeSitter => -1.0,
        }
    }

    pub fn form(self) -> Matrix3<f64> {
        Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, self.normal_sign()))
    }

    pub fn dot(self, a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
        a.x * b.x + a.y * b.y + self.normal_sign() * a.z * b.z
    }

    /// Unit normal to `v` and `u` completing `(v, u, w)` into a direct basis.
    pub fn normal(self, v: &Vector3<f64>, u: &Vector3<f64>) -> Vector3<f64> {
        let c = v.cross(u);
        match self {
            PolygonModel::Sphere => c / c.norm(),
            PolygonModel::DeSitter => {
                let w = Vector3::new(-c.x, -c.y, c.z);
                w / (-self.dot(&w, &w)).sqrt()
            }
        }
    }

    /// Inverse of a frame whose columns are orthonormal for the form.
    pub fn frame_inverse(self, f: &Matrix3<f64>) -> Matrix3<f64> {
        let d = self.form();
        d * f.transpose() * d
    }
}

impl fmt::Display for PolygonModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolygonModel::Sphere => write!(f, "sphere"),
            PolygonModel::DeSitter => write!(f, "desitter"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    pub model: PolygonModel,
    #[serde(with = "vec3_list")]
    pub vertices: Vec<Vector3<f64>>,
}

mod vec3_list {
    use nalgebra::Vector3;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Vector3<f64>], s: S) -> Result<S::Ok, S::Error> {
        let raw: Vec<[f64; 3]> = v.iter().map(|p| [p.x, p.y, p.z]).collect();
        raw.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vector3<f64>>, D::Error> {
        let raw: Vec<[f64; 3]> = Vec::deserialize(d)?;
        Ok(raw.into_iter().map(|p| Vector3::new(p[0], p[1], p[2])).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    TooFewVertices(usize),
    OffQuadric(usize),
    Coincident(usize, usize),
    LengthOutOfRange(usize),
    NegativeDirection(usize),
    Crossing(usize, usize),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TooFewVertices(k) => write!(f, "too few vertices ({k} < 3)"),
            Violation::OffQuadric(i) => write!(f, "vertex {i} off the model quadric"),
            Violation::Coincident(i, j) => write!(f, "vertices {i} and {j} coincide"),
            Violation::LengthOutOfRange(i) => write!(f, "edge {i}: length out of (0,π)"),
            Violation::NegativeDirection(i) => write!(f, "edge {i}: direction is not positive"),
            Violation::Crossing(i, j) => write!(f, "crossing between edges {i} and {j}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VertexFrame {
    pub v: Vector3<f64>,
    pub u_plus: Vector3<f64>,
    pub u_minus: Vector3<f64>,
    pub w: Vector3<f64>,
}

impl VertexFrame {
    /// Columns `(v, u^+, w)`.
    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::from_columns(&[self.v, self.u_plus, self.w])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolygonInvariants {
    pub model: PolygonModel,
    pub lengths: Vec<f64>,
    pub angles: Vec<f64>,
    pub frames: Vec<VertexFrame>,
}

/// Unit tangent at `a` pointing toward `b`, and the distance `a -> b`.
/// Requires `<a, b>` in (-1, 1).
fn direction(model: PolygonModel, a: &Vector3<f64>, b: &Vector3<f64>) -> (Vector3<f64>, f64) {
    let c = model.dot(a, b).clamp(-1.0, 1.0);
    let t = b - a * c;
    let n = model.dot(&t, &t).max(0.0).sqrt();
    (t / n, n.atan2(c))
}

/// Geodesic through `v` with tangent `xi` (any causal type), at time `t`.
pub fn exp_vertex(model: PolygonModel, v: &Vector3<f64>, xi: &Vector3<f64>, t: f64) -> Vector3<f64> {
    let n2 = model.dot(xi, xi);
    if n2.abs() < 1e-300 {
        return v + xi * t;
    }
    let n = n2.abs().sqrt();
    if n2 > 0.0 {
        v * (t * n).cos() + xi * ((t * n).sin() / n)
    } else {
        v * (t * n).cosh() + xi * ((t * n).sinh() / n)
    }
}

impl Polygon {
    pub fn new(model: PolygonModel, vertices: Vec<Vector3<f64>>) -> Self {
        Self { model, vertices }
    }

    /// Builds a polygon and rejects it unless [`validate`](Self::validate) is empty.
    pub fn checked(model: PolygonModel, vertices: Vec<Vector3<f64>>) -> Result<Self> {
        let p = Self::new(model, vertices);
        p.ensure_valid()?;
        Ok(p)
    }

    pub fn k(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, i: usize) -> &Vector3<f64> {
        &self.vertices[i % self.k()]
    }

    pub fn model_point(&self, i: usize) -> ModelPoint {
        let v = self.vertex(i);
        ModelPoint::from_coords(self.model.tag(), vec![v.x, v.y, v.z])
            .expect("polygon vertex on its quadric")
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            let msg: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            Err(Error::InvalidPolygon(msg.join("; ")))
        }
    }

    pub fn validate(&self) -> Vec<Violation> {
        let model = self.model;
        let k = self.k();
        let mut out = vec![];
        if k < 3 {
            out.push(Violation::TooFewVertices(k));
            return out;
        }
        for (i, v) in self.vertices.iter().enumerate() {
            if (model.dot(v, v) - 1.0).abs() > VERTEX_TOL {
                out.push(Violation::OffQuadric(i));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for i in 0..k {
            for j in i + 1..k {
                if (self.vertices[i] - self.vertices[j]).norm() <= VERTEX_TOL {
                    out.push(Violation::Coincident(i, j));
                }
            }
        }
        let mut edges_ok = true;
        for i in 0..k {
            let (a, b) = (self.vertex(i), self.vertex(i + 1));
            let c = model.dot(a, b);
            if c <= -1.0 + VERTEX_TOL || c >= 1.0 - VERTEX_TOL {
                out.push(Violation::LengthOutOfRange(i));
                edges_ok = false;
                continue;
            }
            // the future normal of the edge plane must complete a direct basis
            if model == PolygonModel::DeSitter && a.cross(b).z <= 0.0 {
                out.push(Violation::NegativeDirection(i));
            }
        }
        if edges_ok {
            for i in 0..k {
                for j in 0..k {
                    if i != j && self.open_meets_closed(i, j) {
                        let pair = Violation::Crossing(i.min(j), i.max(j));
                        if !out.contains(&pair) {
                            out.push(pair);
                        }
                    }
                }
            }
        }
        out
    }

    /// Coefficients of `p` in the basis `(a, b)` of the plane containing it.
    fn plane_coefficients(a: &Vector3<f64>, b: &Vector3<f64>, p: &Vector3<f64>) -> (f64, f64) {
        let (aa, ab, bb) = (a.dot(a), a.dot(b), b.dot(b));
        let (pa, pb) = (p.dot(a), p.dot(b));
        let det = aa * bb - ab * ab;
        ((pa * bb - pb * ab) / det, (pb * aa - pa * ab) / det)
    }

    /// Does the open edge `i` meet the closed edge `j`?
    fn open_meets_closed(&self, i: usize, j: usize) -> bool {
        let model = self.model;
        let (a, b) = (self.vertex(i), self.vertex(i + 1));
        let (c, d) = (self.vertex(j), self.vertex(j + 1));
        let n1 = a.cross(b).normalize();
        let n2 = c.cross(d).normalize();
        let line = n1.cross(&n2);
        if line.norm() < 1e-12 {
            return self.coplanar_overlap(i, j);
        }
        let q = model.dot(&line, &line);
        if q <= 0.0 {
            return false;
        }
        let p = line / q.sqrt();
        [p, -p].iter().any(|p| {
            let (s1, t1) = Self::plane_coefficients(a, b, p);
            let (s2, t2) = Self::plane_coefficients(c, d, p);
            s1 > CROSSING_TOL && t1 > CROSSING_TOL && s2 > -CROSSING_TOL && t2 > -CROSSING_TOL
        })
    }

    /// Both edges lie on the same closed geodesic: compare angular intervals.
    fn coplanar_overlap(&self, i: usize, j: usize) -> bool {
        let model = self.model;
        let a = self.vertex(i);
        let (u, l) = direction(model, a, self.vertex(i + 1));
        let angle = |p: &Vector3<f64>| model.dot(p, &u).atan2(model.dot(p, a)).rem_euclid(TAU);
        let start = angle(self.vertex(j));
        let (_, m) = direction(model, self.vertex(j), self.vertex(j + 1));
        // orientation of edge j along the circle
        let mid = exp_vertex(model, self.vertex(j), &direction(model, self.vertex(j), self.vertex(j + 1)).0, m / 2.0);
        let forward = (angle(&mid) - start).rem_euclid(TAU) < PI;
        let (lo, hi) = if forward { (start, start + m) } else { (start - m, start) };
        let (lo, hi) = if lo < 0.0 { (lo + TAU, hi + TAU) } else { (lo, hi) };
        let meets = |lo: f64, hi: f64| lo < l - CROSSING_TOL && hi > CROSSING_TOL;
        meets(lo, hi) || meets(lo - TAU, hi - TAU)
    }

    /// Lengths, angles and vertex frames. Requires a valid polygon.
    pub fn invariants(&self) -> Result<PolygonInvariants> {
        self.ensure_valid()?;
        self.invariants_unchecked()
    }

    /// Same as [`invariants`](Self::invariants) without the crossing check
    /// (used inside finite-difference loops where validity is known).
    pub fn invariants_unchecked(&self) -> Result<PolygonInvariants> {
        let model = self.model;
        let k = self.k();
        let mut lengths = Vec::with_capacity(k);
        let mut angles = Vec::with_capacity(k);
        let mut frames = Vec::with_capacity(k);
        for i in 0..k {
            let v = *self.vertex(i);
            let (u_plus, l) = direction(model, &v, self.vertex(i + 1));
            let (u_minus, _) = direction(model, &v, self.vertex(i + k - 1));
            let w = model.normal(&v, &u_plus);
            let theta = match model {
                PolygonModel::Sphere => (-model.dot(&u_minus, &w)).atan2(-model.dot(&u_minus, &u_plus)),
                PolygonModel::DeSitter => {
                    let ch = -model.dot(&u_minus, &u_plus);
                    if ch < 1.0 - CORNER_TOL {
                        return Err(Error::InvalidPolygon(format!(
                            "vertex {i}: -<u-, u+> = {ch} < 1 (reversed corner)"
                        )));
                    }
                    model.dot(&u_minus, &w).asinh()
                }
            };
            lengths.push(l);
            angles.push(theta);
            frames.push(VertexFrame { v, u_plus, u_minus, w });
        }
        Ok(PolygonInvariants {
            model,
            lengths,
            angles,
            frames,
        })
    }

    /// Closure-constraint matrix `A` (3 x 2k, columns for `theta_dot` then
    /// `l_dot`), an orthonormal basis of its kernel and the kernel dimension.
    pub fn moduli_tangent(&self) -> Result<(DMatrix<f64>, DMatrix<f64>, usize)> {
        let inv = self.invariants()?;
        let a = constraint_matrix(&inv);
        let kernel = null_space(&a, RANK_CUTOFF);
        let dim = kernel.ncols();
        Ok((a, kernel, dim))
    }

    /// Moves vertex `i` along the geodesic with direction `xi` by `h |xi|`.
    pub fn perturb_vertex(&self, i: usize, xi: &Vector3<f64>, h: f64) -> Result<Polygon> {
        let v = self.vertex(i);
        let c = self.model.dot(v, xi);
        if c.abs() > 1e-9 {
            return Err(Error::NotTangent(c));
        }
        let mut out = self.clone();
        let k = self.k();
        out.vertices[i % k] = exp_vertex(self.model, v, xi, h);
        out.ensure_valid()?;
        Ok(out)
    }

    /// `max_i max(|l_i - l_{i+k}|, |theta_i - theta_{i+k}|)` for a 2k-gon.
    pub fn central_symmetry_defect(&self) -> Result<f64> {
        if self.k() % 2 != 0 {
            return Err(Error::Invalid(format!("odd vertex count {}", self.k())));
        }
        let inv = self.invariants()?;
        let half = self.k() / 2;
        Ok((0..half)
            .map(|i| {
                let dl = (inv.lengths[i] - inv.lengths[i + half]).abs();
                let dt = (inv.angles[i] - inv.angles[i + half]).abs();
                dl.max(dt)
            })
            .fold(0.0, f64::max))
    }
}

/// The matrix whose kernel is the image of the differential of the
/// length/angle map: columns `v_i` for `theta_dot_i` and `-w_i` (sphere) or
/// `+w_i` (de Sitter) for `l_dot_i`.
pub fn constraint_matrix(inv: &PolygonInvariants) -> DMatrix<f64> {
    let k = inv.frames.len();
    let s = match inv.model {
        PolygonModel::Sphere => -1.0,
        PolygonModel::DeSitter => 1.0,
    };
    let mut a = DMatrix::zeros(3, 2 * k);
    for (i, f) in inv.frames.iter().enumerate() {
        a.set_column(i, &f.v);
        a.set_column(k + i, &(f.w * s));
    }
    a
}

pub fn is_convex(inv: &PolygonInvariants) -> bool {
    inv.angles.iter().all(|&t| t >= -1e-10)
}

/// Edge transport: rotation by `l` in the `(v, u)` plane of the frame.
pub fn edge_step(l: f64) -> Matrix3<f64> {
    let (s, c) = l.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Corner step taking the arrival frame `(v, -u^-, w_prev)` to `(v, u^+, w)`.
pub fn corner_step(model: PolygonModel, theta: f64) -> Matrix3<f64> {
    match model {
        PolygonModel::Sphere => {
            let (s, c) = theta.sin_cos();
            Matrix3::new(1.0, 0.0, 0.0, 0.0, c, s, 0.0, -s, c)
        }
        PolygonModel::DeSitter => {
            let (s, c) = (theta.sinh(), theta.cosh());
            Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, -s, c)
        }
    }
}

#[derive(Debug, Clone)]
pub struct Development {
    pub vertices: Vec<Vector3<f64>>,
    /// Frames `F_0 .. F_k`; `F_k` is the frame after going once around.
    pub frames: Vec<Matrix3<f64>>,
    pub closure: Matrix3<f64>,
    pub residual: f64,
}

/// Canonical starting frame: `v = e1`, `u = e2`, `w = e3`.
pub fn standard_frame() -> Matrix3<f64> {
    Matrix3::identity()
}

/// Develops a length/angle sequence from the frame `f0` via
/// `F_{i+1} = F_i * R(l_i) * B(theta_{i+1})`.
pub fn develop(
    model: PolygonModel,
    lengths: &[f64],
    angles: &[f64],
    f0: &Matrix3<f64>,
) -> Result<Development> {
    let k = lengths.len();
    if angles.len() != k || k == 0 {
        return Err(Error::Invalid("lengths and angles must have equal positive length".into()));
    }
    if let Some(l) = lengths.iter().find(|&&l| !(l > 0.0 && l < PI)) {
        return Err(Error::Invalid(format!("length {l} out of (0,π)")));
    }
    let mut frames = Vec::with_capacity(k + 1);
    frames.push(*f0);
    for i in 0..k {
        let next = frames[i] * edge_step(lengths[i]) * corner_step(model, angles[(i + 1) % k]);
        frames.push(next);
    }
    let closure = model.frame_inverse(f0) * frames[k];
    let residual = (closure - Matrix3::identity()).norm();
    Ok(Development {
        vertices: frames[..k].iter().map(|f| f.column(0).into_owned()).collect(),
        frames,
        closure,
        residual,
    })
}

/// Rotation-symmetric family: `v_j = (c cos(2 pi j/k), c sin(2 pi j/k), -s)`
/// with `(c, s) = (cos a, sin a)` on the sphere and `(cosh a, sinh a)` on dS.
/// Non-negative `alpha` gives the convex branch (`theta >= 0`).
pub fn regular_polygon(model: PolygonModel, k: usize, alpha: f64) -> Result<Polygon> {
    if k < 3 {
        return Err(Error::Invalid(format!("k = {k} < 3")));
    }
    let (c, s) = match model {
        PolygonModel::Sphere => {
            if alpha.abs() >= PI / 2.0 {
                return Err(Error::Invalid(format!("alpha = {alpha} outside (-π/2, π/2)")));
            }
            (alpha.cos(), alpha.sin())
        }
        PolygonModel::DeSitter => (alpha.cosh(), alpha.sinh()),
    };
    let vertices: Vec<Vector3<f64>> = (0..k)
        .map(|j| {
            let phi = TAU * j as f64 / k as f64;
            Vector3::new(c * phi.cos(), c * phi.sin(), -s)
        })
        .collect();
    if model == PolygonModel::DeSitter && model.dot(&vertices[0], &vertices[1]) <= -1.0 + VERTEX_TOL {
        return Err(Error::Invalid(format!(
            "alpha = {alpha}: consecutive vertices are no longer space related"
        )));
    }
    Polygon::checked(model, vertices)
}

/// Side length of the regular family at parameter `alpha`.
pub fn regular_length(model: PolygonModel, k: usize, alpha: f64) -> f64 {
    let c = (TAU / k as f64).cos();
    let cos_l = match model {
        PolygonModel::Sphere => alpha.sin().powi(2) + alpha.cos().powi(2) * c,
        PolygonModel::DeSitter => alpha.cosh().powi(2) * c - alpha.sinh().powi(2),
    };
    cos_l.acos()
}

/// Inverse of [`regular_length`] on the convex branch.
pub fn regular_alpha_for_length(model: PolygonModel, k: usize, l: f64) -> Result<f64> {
    let c = (TAU / k as f64).cos();
    let x = match model {
        PolygonModel::Sphere => (l.cos() - c) / (1.0 - c),
        PolygonModel::DeSitter => (c - l.cos()) / (1.0 - c),
    };
    match model {
        PolygonModel::Sphere if (0.0..1.0).contains(&x) => Ok(x.sqrt().asin()),
        PolygonModel::DeSitter if x >= 0.0 && l < PI => Ok(x.sqrt().asinh()),
        _ => Err(Error::Invalid(format!("no regular {model} {k}-gon with side {l}"))),
    }
}

/// `sinh^2(alpha)` barrier of the de Sitter family (sides reach length pi).
pub fn desitter_alpha_barrier(k: usize) -> f64 {
    let c = (TAU / k as f64).cos();
    ((1.0 + c) / (1.0 - c)).sqrt().asinh()
}

/// Regular convex polygon with random parameter, each vertex moved along a
/// random tangent geodesic; the coordinate displacement is at most about
/// `spread` times the side length.
/// Redraws until the result is a valid polygon with side lengths in
/// `[0.1, pi - 0.1]` and `|theta_i| <= 2.5`.
pub fn random_polygon<R: Rng + ?Sized>(model: PolygonModel, k: usize, spread: f64, rng: &mut R) -> Result<Polygon> {
    if k < 3 {
        return Err(Error::Invalid(format!("k = {k} < 3")));
    }
    let alpha_max = match model {
        PolygonModel::Sphere => PI / 2.0,
        PolygonModel::DeSitter => desitter_alpha_barrier(k),
    };
    for _ in 0..1000 {
        let alpha = alpha_max * rng.gen_range(0.15..0.7);
        let base = regular_polygon(model, k, alpha)?;
        let step = spread * regular_length(model, k, alpha);
        let vertices: Vec<Vector3<f64>> = base
            .vertices
            .iter()
            .map(|v| {
                let r = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let xi = r - v * model.dot(&r, v);
                let xi = xi / xi.norm().max(1e-12);
                exp_vertex(model, v, &xi, step * rng.gen_range(0.0..1.0))
            })
            .collect();
        let Ok(p) = Polygon::checked(model, vertices) else {
            continue;
        };
        let inv = p.invariants()?;
        let sides_ok = inv.lengths.iter().all(|&l| (RANDOM_MIN_SIDE..=PI - RANDOM_MIN_SIDE).contains(&l));
        if sides_ok && inv.angles.iter().all(|t| t.abs() <= RANDOM_MAX_ANGLE) {
            return Ok(p);
        }
    }
    Err(Error::Invalid(format!("no valid random {model} {k}-gon found")))
}
