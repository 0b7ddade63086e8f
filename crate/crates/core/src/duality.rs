//! Point/hyperplane dualities between `H^{m}` and `dS^{m}`, the self-duality
//! of `AdS^{m}`, and the dual complex of a convex hipped hypersurface.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{exp_geodesic, geodesic_distance, ip, AmbientVector, ModelPoint, SpaceTag, QUADRIC_TOL};
use crate::hipped::{HipSpace, HippedData};

const HALF_TURN_TOL: f64 = 1e-10;

/// A totally geodesic hyperplane `{x : <x, normal> = 0}` of the model `space`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperplaneRec {
    pub normal: AmbientVector,
    pub space: SpaceTag,
}

impl HyperplaneRec {
    /// Hyperplanes of `dS^m` and `AdS^m` have unit timelike normals, those of
    /// `H^m` unit spacelike ones.
    pub fn new(normal: AmbientVector, space: SpaceTag) -> Result<Self> {
        if normal.tag.ambient_dim() != space.ambient_dim() || normal.tag.signs() != space.signs() {
            return Err(Error::TagMismatch(normal.tag, space));
        }
        let want = match space {
            SpaceTag::DeSitter(_) | SpaceTag::AntiDeSitter(_) => -1.0,
            SpaceTag::Hyperbolic(_) => 1.0,
            _ => return Err(Error::Invalid(format!("no hyperplane duality for {space:?}"))),
        };
        let q = normal.q();
        if (q - want).abs() > QUADRIC_TOL {
            return Err(Error::OffQuadric { q, target: want });
        }
        Ok(Self {
            normal: AmbientVector { coords: normal.coords, tag: space },
            space,
        })
    }

    pub fn contains(&self, p: &ModelPoint) -> Result<f64> {
        Ok(ip(self.space, p.coords().as_slice(), self.normal.as_slice()))
    }
}

/// Companion model of a point: `H^m -> dS^m`, `dS^m -> H^m`, `AdS^m -> AdS^m`.
fn companion(tag: SpaceTag) -> Result<SpaceTag> {
    match tag {
        SpaceTag::Hyperbolic(m) => Ok(SpaceTag::DeSitter(m)),
        SpaceTag::DeSitter(m) => Ok(SpaceTag::Hyperbolic(m)),
        SpaceTag::AntiDeSitter(m) => Ok(SpaceTag::AntiDeSitter(m)),
        t => Err(Error::Invalid(format!("no duality for {t:?}"))),
    }
}

/// The hyperplane of the companion model orthogonal to `x`.
pub fn dual_point(x: &ModelPoint) -> Result<HyperplaneRec> {
    HyperplaneRec::new(x.vec.clone(), companion(x.tag())?)
}

/// Inverse of [`dual_point`]. A past-pointing normal of a de Sitter
/// hyperplane is flipped to the future before returning the `H` point.
pub fn dual_hyperplane(h: &HyperplaneRec) -> Result<ModelPoint> {
    let tag = companion(h.space)?;
    let mut c = h.normal.coords.clone();
    if let SpaceTag::Hyperbolic(m) = tag {
        if c[m] < 0.0 {
            c = -c;
        }
    }
    ModelPoint::new(AmbientVector::from_dvector(tag, c)?)
}

/// Whether the point at time `s` along the timelike unit geodesic from `x`
/// with velocity `t` lies on the dual hyperplane of `x`.
pub fn ads_dual_check_at(x: &ModelPoint, t: &AmbientVector, s: f64) -> Result<bool> {
    if !matches!(x.tag(), SpaceTag::AntiDeSitter(_)) {
        return Err(Error::TagMismatch(x.tag(), SpaceTag::AntiDeSitter(x.tag().ambient_dim() - 1)));
    }
    let q = t.q();
    if (q + 1.0).abs() > QUADRIC_TOL {
        return Err(Error::NotNormalized(q));
    }
    let y = exp_geodesic(x, t, s)?;
    let h = dual_point(x)?;
    Ok(h.contains(&y)?.abs() <= HALF_TURN_TOL)
}

/// Points at time distance `pi / 2` are dual.
pub fn ads_half_turn_check(x: &ModelPoint, t: &AmbientVector) -> Result<bool> {
    ads_dual_check_at(x, t, FRAC_PI_2)
}

/// Hyperbolic distance of `y1, y2` and the angle between their dual
/// de Sitter hyperplanes, measured in the Lorentzian plane `span(y1, y2)`.
pub fn angle_equals_distance(y1: &ModelPoint, y2: &ModelPoint) -> Result<(f64, f64)> {
    let tag = y1.tag();
    if !matches!(tag, SpaceTag::Hyperbolic(_)) {
        return Err(Error::TagMismatch(tag, SpaceTag::Hyperbolic(tag.ambient_dim() - 1)));
    }
    let (_, dist) = geodesic_distance(y1, y2)?;
    let c = y1.dot(y2)?;
    // traces of the dual hyperplanes in span(y1, y2)
    let a1 = y2.coords() + y1.coords() * c;
    let a2 = y1.coords() + y2.coords() * c;
    let q = |v: &DVector<f64>, w: &DVector<f64>| ip(tag, v.as_slice(), w.as_slice());
    let (n1, n2) = (q(&a1, &a1), q(&a2, &a2));
    let angle = if n1 <= 1e-300 || n2 <= 1e-300 {
        0.0
    } else {
        (q(&a1, &a2).abs() / (n1 * n2).sqrt()).max(1.0).acosh()
    };
    Ok((angle, dist))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualComplex {
    pub vertices: Vec<Vec<f64>>,
    /// `edge_lengths[i]` joins vertices `i - 1` and `i`.
    pub edge_lengths: Vec<f64>,
    pub face_signature: (usize, usize),
    pub degenerate: bool,
    pub face_span: Vec<Vec<f64>>,
    #[serde(skip)]
    pub tag: Option<SpaceTag>,
}

impl DualComplex {
    /// Numbers of vertices, edges and two-dimensional faces.
    pub fn cell_counts(&self) -> (usize, usize, usize) {
        (self.vertices.len(), self.edge_lengths.len(), 1)
    }
}

/// Dual points of the faces of a convex hipped hypersurface (face normals
/// read as points of `dS^{d+1}` or `AdS^{d+1}`), joined cyclically.
pub fn dual_complex(hd: &HippedData) -> Result<DualComplex> {
    if !hd.convexity()? {
        return Err(Error::Invalid("hypersurface is not convex".into()));
    }
    let tag = match hd.space {
        HipSpace::Hyperbolic => SpaceTag::DeSitter(hd.d + 1),
        HipSpace::AntiDeSitter => SpaceTag::AntiDeSitter(hd.d + 1),
    };
    let points: Vec<ModelPoint> = hd
        .face_normals()?
        .into_iter()
        .map(|n| ModelPoint::new(AmbientVector::from_dvector(tag, n)?))
        .collect::<Result<_>>()?;
    let k = points.len();
    let mut edge_lengths = Vec::with_capacity(k);
    for i in 0..k {
        edge_lengths.push(geodesic_distance(&points[(i + k - 1) % k], &points[i])?.1);
    }
    let degenerate = (0..k).all(|i| (points[i].coords() - points[0].coords()).amax() <= 1e-12);
    let face_signature = match hd.space {
        HipSpace::Hyperbolic => (3, 0),
        HipSpace::AntiDeSitter => (2, 1),
    };
    Ok(DualComplex {
        vertices: points.iter().map(|p| p.coords().as_slice().to_vec()).collect(),
        edge_lengths,
        face_signature,
        degenerate,
        face_span: hd.link_basis.iter().map(|b| b.as_slice().to_vec()).collect(),
        tag: Some(tag),
    })
}
