//! Signed bilinear forms, the model quadrics built on them, causality
//! classification, geodesics and the conformal chart of anti-de Sitter space.
//!
//! Coordinate conventions (shared by every other module):
//!
//! | tag               | ambient      | form                                   | target |
//! |-------------------|--------------|----------------------------------------|--------|
//! | `Sphere2`         | R^3          | x1^2 + x2^2 + x3^2                     | +1     |
//! | `DeSitter2`       | R^{2,1}      | x0 y0 + x1 y1 - x2 y2                  | +1     |
//! | `Hyperbolic(m)`   | R^{m,1}      | sum_{i<=m} x_i^2 - x_{m+1}^2           | -1     |
//! | `DeSitter(m)`     | R^{m,1}      | same                                   | +1     |
//! | `AntiDeSitter(m)` | R^{m-1,2}    | sum_{i<=m-1} x_i^2 - x_m^2 - x_{m+1}^2 | -1     |
//!
//! Time orientation of `AntiDeSitter(m)` is the positive rotation in the
//! `(x_m, x_{m+1})` plane; in `DeSitter2` the future is `+x2`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for quadric membership and light/space thresholds.
pub const QUADRIC_TOL: f64 = 1e-9;
/// Tolerance below which `q(v)` counts as lightlike.
pub const LIGHTLIKE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpaceTag {
    Sphere2,
    DeSitter2,
    Hyperbolic(usize),
    DeSitter(usize),
    AntiDeSitter(usize),
}

impl SpaceTag {
    pub fn ambient_dim(&self) -> usize {
        match *self {
            SpaceTag::Sphere2 | SpaceTag::DeSitter2 => 3,
            SpaceTag::Hyperbolic(m) | SpaceTag::DeSitter(m) | SpaceTag::AntiDeSitter(m) => m + 1,
        }
    }

    /// Number of negative directions of the ambient form.
    pub fn negative_count(&self) -> usize {
        match self {
            SpaceTag::Sphere2 => 0,
            SpaceTag::AntiDeSitter(_) => 2,
            _ => 1,
        }
    }

    /// Diagonal entry of the form in coordinate `i` (0-based).
    pub fn sign(&self, i: usize) -> f64 {
        if i + self.negative_count() >= self.ambient_dim() {
            -1.0
        } else {
            1.0
        }
    }

    pub fn signs(&self) -> Vec<f64> {
        (0..self.ambient_dim()).map(|i| self.sign(i)).collect()
    }

    pub fn form_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_vec(self.signs()))
    }

    /// Value of `q` on the model quadric.
    pub fn target(&self) -> f64 {
        match self {
            SpaceTag::Sphere2 | SpaceTag::DeSitter2 | SpaceTag::DeSitter(_) => 1.0,
            SpaceTag::Hyperbolic(_) | SpaceTag::AntiDeSitter(_) => -1.0,
        }
    }

    pub fn is_lorentzian(&self) -> bool {
        !matches!(self, SpaceTag::Sphere2 | SpaceTag::Hyperbolic(_))
    }

    fn check_shape(&self) -> Result<()> {
        match *self {
            SpaceTag::Hyperbolic(m) | SpaceTag::DeSitter(m) if m < 1 => {
                Err(Error::Invalid(format!("model dimension {m} < 1")))
            }
            SpaceTag::AntiDeSitter(m) if m < 2 => {
                Err(Error::Invalid(format!("anti-de Sitter dimension {m} < 2")))
            }
            _ => Ok(()),
        }
    }
}

/// Evaluates the form of `tag` on raw coordinate slices.
pub fn ip(tag: SpaceTag, a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .enumerate()
        .map(|(i, (x, y))| tag.sign(i) * x * y)
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmbientVector {
    pub coords: DVector<f64>,
    pub tag: SpaceTag,
}

impl AmbientVector {
    pub fn new(tag: SpaceTag, coords: Vec<f64>) -> Result<Self> {
        tag.check_shape()?;
        if coords.len() != tag.ambient_dim() {
            return Err(Error::Dimension {
                expected: tag.ambient_dim(),
                got: coords.len(),
            });
        }
        Ok(Self {
            coords: DVector::from_vec(coords),
            tag,
        })
    }

    pub fn from_dvector(tag: SpaceTag, coords: DVector<f64>) -> Result<Self> {
        Self::new(tag, coords.as_slice().to_vec())
    }

    /// `i`-th unit coordinate vector.
    pub fn basis(tag: SpaceTag, i: usize) -> Self {
        let mut c = DVector::zeros(tag.ambient_dim());
        c[i] = 1.0;
        Self { coords: c, tag }
    }

    pub fn dot(&self, other: &Self) -> Result<f64> {
        if self.tag != other.tag {
            return Err(Error::TagMismatch(self.tag, other.tag));
        }
        Ok(ip(self.tag, self.coords.as_slice(), other.coords.as_slice()))
    }

    pub fn q(&self) -> f64 {
        ip(self.tag, self.coords.as_slice(), self.coords.as_slice())
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            coords: &self.coords * s,
            tag: self.tag,
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        self.coords.as_slice()
    }
}

/// Point on the model quadric of its tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelPoint {
    pub vec: AmbientVector,
}

impl ModelPoint {
    pub fn new(vec: AmbientVector) -> Result<Self> {
        let q = vec.q();
        let target = vec.tag.target();
        if (q - target).abs() > QUADRIC_TOL {
            return Err(Error::OffQuadric { q, target });
        }
        if let SpaceTag::Hyperbolic(m) = vec.tag {
            if vec.coords[m] <= 0.0 {
                return Err(Error::Invalid("hyperbolic point on the lower sheet".into()));
            }
        }
        Ok(Self { vec })
    }

    pub fn from_coords(tag: SpaceTag, coords: Vec<f64>) -> Result<Self> {
        Self::new(AmbientVector::new(tag, coords)?)
    }

    pub fn tag(&self) -> SpaceTag {
        self.vec.tag
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.vec.coords
    }

    pub fn dot(&self, other: &Self) -> Result<f64> {
        self.vec.dot(&other.vec)
    }
}

/// A null direction up to positive scaling, stored with its largest-magnitude
/// coordinate equal to +1 or -1 (sign of the original coordinate kept, so the
/// ray and its negative stay distinct).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullRay {
    pub rep: AmbientVector,
}

impl NullRay {
    pub fn new(v: AmbientVector) -> Result<Self> {
        let m = v.coords.amax();
        if m == 0.0 {
            return Err(Error::ZeroVector);
        }
        let rep = v.scaled(1.0 / m);
        if rep.q().abs() > QUADRIC_TOL {
            return Err(Error::Invalid(format!("vector is not null (q = {:e})", rep.q())));
        }
        Ok(Self { rep })
    }

    pub fn from_coords(tag: SpaceTag, coords: Vec<f64>) -> Result<Self> {
        Self::new(AmbientVector::new(tag, coords)?)
    }

    pub fn dot(&self, other: &Self) -> Result<f64> {
        self.rep.dot(&other.rep)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CausalType {
    Spacelike,
    Lightlike,
    Timelike,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairRelation {
    Space,
    Light,
    Time,
    Unrelated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryRelation {
    Space,
    Light,
}

pub fn form_eval(a: &AmbientVector, b: &AmbientVector) -> Result<f64> {
    a.dot(b)
}

pub fn classify_vector(v: &AmbientVector) -> Result<CausalType> {
    if v.coords.iter().all(|&x| x == 0.0) {
        return Err(Error::ZeroVector);
    }
    let q = v.q();
    Ok(if q.abs() <= LIGHTLIKE_TOL {
        CausalType::Lightlike
    } else if q > 0.0 {
        CausalType::Spacelike
    } else {
        CausalType::Timelike
    })
}

fn require_ads(p: &ModelPoint) -> Result<()> {
    match p.tag() {
        SpaceTag::AntiDeSitter(_) => Ok(()),
        t => Err(Error::TagMismatch(t, SpaceTag::AntiDeSitter(0))),
    }
}

pub fn pair_relation_ads(x: &ModelPoint, y: &ModelPoint) -> Result<PairRelation> {
    require_ads(x)?;
    let c = x.dot(y)?;
    Ok(if (c + 1.0).abs() <= QUADRIC_TOL {
        PairRelation::Light
    } else if c < -1.0 {
        PairRelation::Space
    } else if c < 1.0 - QUADRIC_TOL {
        PairRelation::Time
    } else {
        PairRelation::Unrelated
    })
}

/// Relation of two points of the Einstein boundary. A positive product means
/// the chosen lifts are on opposite sides; the caller must negate one.
pub fn boundary_relation(xi: &NullRay, eta: &NullRay) -> Result<BoundaryRelation> {
    let c = xi.dot(eta)?;
    if c.abs() <= QUADRIC_TOL {
        Ok(BoundaryRelation::Light)
    } else if c < 0.0 {
        Ok(BoundaryRelation::Space)
    } else {
        Err(Error::Unrelated(format!(
            "<xi, eta> = {c} > 0: negate one representative"
        )))
    }
}

/// Signs `(e_y, e_z)` making `{x, e_y y, e_z z}` pairwise space related,
/// provided the three rays span a subspace of signature (2,1).
pub fn acausal_signs(x: &NullRay, y: &NullRay, z: &NullRay) -> Result<(i32, i32)> {
    let vs = [&x.rep, &y.rep, &z.rep];
    let mut gram = DMatrix::zeros(3, 3);
    for i in 0..3 {
        for j in 0..3 {
            gram[(i, j)] = vs[i].dot(vs[j])?;
        }
    }
    // rank from the Euclidean coordinates; the Gram matrix alone cannot see it
    let n = x.rep.coords.len();
    let mut m = DMatrix::zeros(n, 3);
    for (j, v) in vs.iter().enumerate() {
        let unit = &v.coords / v.coords.norm();
        m.set_column(j, &unit);
    }
    let sv = m.svd(false, false).singular_values;
    if sv.iter().cloned().fold(f64::INFINITY, f64::min) < 1e-9 {
        return Err(Error::Degenerate("rays span a subspace of rank < 3".into()));
    }
    let eig = gram.clone().symmetric_eigen().eigenvalues;
    let scale = eig.amax();
    let pos = eig.iter().filter(|&&e| e > 1e-12 * scale).count();
    let neg = eig.iter().filter(|&&e| e < -1e-12 * scale).count();
    if (pos, neg) != (2, 1) {
        return Err(Error::Degenerate(format!(
            "restricted form has signature ({pos},{neg}), expected (2,1)"
        )));
    }
    let sgn = |c: f64| if c > 0.0 { -1 } else { 1 };
    let (cxy, cxz, cyz) = (gram[(0, 1)], gram[(0, 2)], gram[(1, 2)]);
    let (ey, ez) = (sgn(cxy), sgn(cxz));
    if cxy.abs() <= QUADRIC_TOL || cxz.abs() <= QUADRIC_TOL || (ey * ez) as f64 * cyz >= -QUADRIC_TOL {
        return Err(Error::Degenerate("no sign choice is pairwise space related".into()));
    }
    Ok((ey, ez))
}

/// Geodesic from `p` with unit (or null) initial velocity `xi`, at parameter `s`.
pub fn exp_geodesic(p: &ModelPoint, xi: &AmbientVector, s: f64) -> Result<ModelPoint> {
    let tag = p.tag();
    let c = p.vec.dot(xi)?;
    if c.abs() > QUADRIC_TOL {
        return Err(Error::NotTangent(c));
    }
    let qx = xi.q();
    let pc = &p.vec.coords;
    let xc = &xi.coords;
    let coords = if qx.abs() <= QUADRIC_TOL {
        pc + xc * s
    } else if (qx.abs() - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized(qx));
    } else {
        // circular when q(xi) and the target have the same sign
        if qx * tag.target() > 0.0 {
            pc * s.cos() + xc * s.sin()
        } else {
            pc * s.cosh() + xc * s.sinh()
        }
    };
    ModelPoint::from_coords(tag, coords.as_slice().to_vec())
}

/// Exponential map for an arbitrary tangent vector (length = |q(v)|^{1/2}).
pub fn exp_map(p: &ModelPoint, v: &AmbientVector) -> Result<ModelPoint> {
    let qv = v.q();
    if qv.abs() <= LIGHTLIKE_TOL {
        return exp_geodesic(p, v, 1.0);
    }
    let n = qv.abs().sqrt();
    exp_geodesic(p, &v.scaled(1.0 / n), n)
}

/// Causal type and length of the geodesic segment joining `x` and `y`.
pub fn geodesic_distance(x: &ModelPoint, y: &ModelPoint) -> Result<(CausalType, f64)> {
    let tag = x.tag();
    let c = x.dot(y)?;
    let diff = &x.vec.coords - &y.vec.coords;
    let sum = &x.vec.coords + &y.vec.coords;
    let qd = ip(tag, diff.as_slice(), diff.as_slice());
    let qs = ip(tag, sum.as_slice(), sum.as_slice());
    let circ = |a: f64, b: f64| 2.0 * a.max(0.0).sqrt().atan2(b.max(0.0).sqrt());
    let hyp = |a: f64| 2.0 * (a.max(0.0).sqrt() / 2.0).asinh();
    match tag {
        SpaceTag::Sphere2 => Ok((CausalType::Spacelike, circ(qd, qs))),
        SpaceTag::Hyperbolic(_) => Ok((CausalType::Spacelike, hyp(qd))),
        SpaceTag::DeSitter2 | SpaceTag::DeSitter(_) => {
            // q(x - y) = 2 - 2<x,y> decides the type without cancellation
            if qd.abs() <= LIGHTLIKE_TOL {
                Ok((CausalType::Lightlike, 0.0))
            } else if qd < 0.0 {
                Ok((CausalType::Timelike, hyp(-qd)))
            } else if c > -1.0 + QUADRIC_TOL {
                Ok((CausalType::Spacelike, circ(qd, qs)))
            } else {
                Err(Error::Unrelated(format!("de Sitter <x,y> = {c} <= -1")))
            }
        }
        SpaceTag::AntiDeSitter(_) => {
            if qd.abs() <= LIGHTLIKE_TOL {
                Ok((CausalType::Lightlike, 0.0))
            } else if qd > 0.0 {
                Ok((CausalType::Spacelike, hyp(qd)))
            } else if c < 1.0 - QUADRIC_TOL {
                Ok((CausalType::Timelike, circ(-qd, -qs)))
            } else {
                Err(Error::Unrelated(format!("anti-de Sitter <x,y> = {c} >= 1")))
            }
        }
    }
}

/// Conformal chart `(theta, x) -> (x_1/x_0, .., x_d/x_0, cos(theta)/x_0, sin(theta)/x_0)`
/// from `R x S^d_+` onto `AdS^{d+1}`; `x` has `d+1` coordinates with `x_0 > 0`.
pub fn conformal_chart(theta: f64, x: &[f64]) -> Result<ModelPoint> {
    if x.len() < 3 {
        return Err(Error::Invalid("sphere point needs at least 3 coordinates".into()));
    }
    let x0 = x[0];
    if x0 <= 0.0 {
        return Err(Error::Invalid(format!("x_0 = {x0} <= 0")));
    }
    let norm: f64 = x.iter().map(|v| v * v).sum();
    if (norm - 1.0).abs() > QUADRIC_TOL {
        return Err(Error::OffQuadric { q: norm, target: 1.0 });
    }
    let d = x.len() - 1;
    let mut c: Vec<f64> = x[1..].iter().map(|v| v / x0).collect();
    c.push(theta.cos() / x0);
    c.push(theta.sin() / x0);
    ModelPoint::from_coords(SpaceTag::AntiDeSitter(d + 1), c)
}

/// Inverse of [`conformal_chart`]; `theta` is returned in `[0, 2 pi)`.
pub fn conformal_chart_inverse(p: &ModelPoint) -> Result<(f64, Vec<f64>)> {
    let (theta, x) = conformal_chart_inverse_signed(p)?;
    Ok((theta.rem_euclid(std::f64::consts::TAU), x))
}

/// Same as [`conformal_chart_inverse`] with `theta` in `(-pi, pi]`.
pub fn conformal_chart_inverse_signed(p: &ModelPoint) -> Result<(f64, Vec<f64>)> {
    require_ads(p)?;
    let c = p.coords();
    let n = c.len();
    let (a, b) = (c[n - 2], c[n - 1]);
    let r = a.hypot(b);
    let x0 = 1.0 / r;
    let mut x = vec![x0];
    x.extend(c.iter().take(n - 2).map(|v| v * x0));
    Ok((b.atan2(a), x))
}

/// Smallest ratio `(-1 - <p, p'>) / d(p, p')^2` over sampled pairs. A positive
/// value certifies `<p, p'> <= -1 - c d^2` on the sample.
pub fn spacelike_margin(points: &[ModelPoint], dist: &DMatrix<f64>) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::Invalid("need at least two points".into()));
    }
    if dist.nrows() != points.len() || dist.ncols() != points.len() {
        return Err(Error::Dimension {
            expected: points.len(),
            got: dist.nrows(),
        });
    }
    for p in points {
        require_ads(p)?;
    }
    let mut best = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = dist[(i, j)];
            if d <= 0.0 {
                return Err(Error::Invalid(format!("non-positive distance at ({i},{j})")));
            }
            let c = points[i].dot(&points[j])?;
            best = best.min((-1.0 - c) / (d * d));
        }
    }
    Ok(best)
}

/// Membership in the domain of dependence `{x : <x, y> < 0 for all y}`.
pub fn in_domain_of_dependence(x: &ModelPoint, rays: &[NullRay]) -> Result<bool> {
    require_ads(x)?;
    if rays.is_empty() {
        return Err(Error::Invalid("empty limit set".into()));
    }
    for r in rays {
        if ip(x.tag(), x.coords().as_slice(), r.rep.as_slice()) >= -LIGHTLIKE_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}
