//! Form-preserving matrices: link isometries embedded in the big group, fold
//! maps and loop holonomy of hipped hypersurfaces, reflection-group toys and
//! bending of block-embedded representations.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hipped::{HipSpace, HippedData};
use crate::linalg::form_defect;
use crate::polygons::{develop, edge_step, PolygonModel};

pub const FORM_TOL: f64 = 1e-9;

fn signs(p: usize, q: usize) -> Vec<f64> {
    std::iter::repeat(1.0).take(p).chain(std::iter::repeat(-1.0).take(q)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsometryMatrix {
    pub entries: DMatrix<f64>,
    pub signature: (usize, usize),
}

impl IsometryMatrix {
    /// Checks `M^T Q M = Q` within [`FORM_TOL`].
    pub fn new(entries: DMatrix<f64>, signature: (usize, usize)) -> Result<Self> {
        let n = signature.0 + signature.1;
        if entries.nrows() != n || entries.ncols() != n {
            return Err(Error::Dimension {
                expected: n,
                got: entries.nrows(),
            });
        }
        let m = Self { entries, signature };
        let defect = m.form_defect();
        if defect > FORM_TOL {
            return Err(Error::Invalid(format!("matrix does not preserve the form (defect {defect:e})")));
        }
        Ok(m)
    }

    pub fn identity(signature: (usize, usize)) -> Self {
        let n = signature.0 + signature.1;
        Self {
            entries: DMatrix::identity(n, n),
            signature,
        }
    }

    pub fn signs(&self) -> Vec<f64> {
        signs(self.signature.0, self.signature.1)
    }

    pub fn form_defect(&self) -> f64 {
        form_defect(&self.entries, &self.signs())
    }

    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.signature, other.signature, "signature mismatch");
        Self {
            entries: &self.entries * &other.entries,
            signature: self.signature,
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            entries: crate::linalg::form_inverse(&self.entries, &self.signs()),
            signature: self.signature,
        }
    }

    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.entries * v
    }

    pub fn distance_to_identity(&self) -> f64 {
        let n = self.entries.nrows();
        (&self.entries - DMatrix::identity(n, n)).norm()
    }
}

fn hip_signature(hd: &HippedData) -> (usize, usize) {
    match hd.space {
        HipSpace::AntiDeSitter => (hd.d, 2),
        HipSpace::Hyperbolic => (hd.d + 1, 1),
    }
}

/// Acts by `m` on the link coordinates and as the identity elsewhere.
pub fn link_embed(hd: &HippedData, m: &Matrix3<f64>) -> Result<IsometryMatrix> {
    let model = hd.polygon.model;
    let q = model.form();
    let defect = (m.transpose() * q * m - q).amax() / m.amax().powi(2).max(1.0);
    if defect > FORM_TOL {
        return Err(Error::Invalid(format!("link matrix does not preserve the link form (defect {defect:e})")));
    }
    Ok(embed_raw(hd, m))
}

/// [`link_embed`] for products of frames and steps, which are isometries by
/// construction.
fn embed_raw(hd: &HippedData, m: &Matrix3<f64>) -> IsometryMatrix {
    let (_, li) = hd.space.layout(hd.d);
    let n = hd.d + 2;
    let mut big = DMatrix::identity(n, n);
    for a in 0..3 {
        for b in 0..3 {
            big[(li[a], li[b])] = m[(a, b)];
        }
    }
    IsometryMatrix {
        entries: big,
        signature: hip_signature(hd),
    }
}

/// Turn by `theta` in the `(u, w)` plane of a frame, taking the previous
/// normal (in frame coordinates) to `e_3`.
fn fold_block(model: PolygonModel, theta: f64) -> Matrix3<f64> {
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

fn conj(model: PolygonModel, f: &Matrix3<f64>, m: &Matrix3<f64>) -> Matrix3<f64> {
    f * m * model.frame_inverse(f)
}

/// Link isometry fixing `v_i` and carrying the normal of face `i - 1` to
/// that of face `i`.
pub fn fold_at(hd: &HippedData, i: usize) -> Result<IsometryMatrix> {
    let k = hd.wedge_count();
    let model = hd.polygon.model;
    let f = hd.invariants.frames[i % k].matrix();
    Ok(embed_raw(hd, &conj(model, &f, &fold_block(model, hd.invariants.angles[i % k]))))
}

/// Edge transports and folds along the developed frames, in the order
/// `[E_0, K_1, E_1, K_2, .., E_{k-1}, K_k]`; their product (last factor on
/// the left) equals [`loop_holonomy`].
pub fn loop_factors(hd: &HippedData) -> Result<Vec<IsometryMatrix>> {
    let model = hd.polygon.model;
    let inv = &hd.invariants;
    let k = hd.wedge_count();
    let dev = develop(model, &inv.lengths, &inv.angles, &inv.frames[0].matrix())?;
    let mut out = Vec::with_capacity(2 * k);
    for i in 0..k {
        let f = dev.frames[i];
        out.push(embed_raw(hd, &conj(model, &f, &edge_step(inv.lengths[i]))));
        let arrival = f * edge_step(inv.lengths[i]);
        out.push(embed_raw(hd, &conj(model, &arrival, &fold_block(model, inv.angles[(i + 1) % k]))));
    }
    Ok(out)
}

/// Holonomy around the stem and its distance to the identity.
pub fn loop_holonomy(hd: &HippedData) -> Result<(IsometryMatrix, f64)> {
    let model = hd.polygon.model;
    let inv = &hd.invariants;
    let f0 = inv.frames[0].matrix();
    let dev = develop(model, &inv.lengths, &inv.angles, &f0)?;
    let m = embed_raw(hd, &conj(model, &f0, &dev.closure));
    let r = m.distance_to_identity();
    Ok((m, r))
}

/// Reflections `sigma_1, sigma_2` of `H^d` in two hyperplanes meeting at
/// angle `pi / n`.
pub fn dihedral_model(d: usize, n: usize) -> Result<(IsometryMatrix, IsometryMatrix)> {
    if n < 2 || d < 2 {
        return Err(Error::Invalid(format!("need n >= 2 and d >= 2 (got n = {n}, d = {d})")));
    }
    let sig = (d, 1);
    let reflect = |normal: &DVector<f64>| {
        // normal is unit spacelike and supported on spacelike coordinates
        let m = DMatrix::identity(d + 1, d + 1) - normal * normal.transpose() * 2.0;
        IsometryMatrix {
            entries: m,
            signature: sig,
        }
    };
    let mut n1 = DVector::zeros(d + 1);
    n1[d - 1] = 1.0;
    let mut n2 = DVector::zeros(d + 1);
    let a = PI / n as f64;
    n2[d - 1] = a.cos();
    n2[d - 2] = a.sin();
    Ok((reflect(&n1), reflect(&n2)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BendTarget {
    #[serde(rename = "hyp")]
    Hyperbolic,
    #[serde(rename = "ads")]
    AntiDeSitter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub label: String,
    #[serde(with = "matrix_rows")]
    pub matrix: DMatrix<f64>,
    /// Bent side of the splitting.
    pub mask: bool,
    /// Generator of the splitting hypersurface group; must fix the bending
    /// axis.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub hypersurface: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Representation {
    pub signature: (usize, usize),
    pub generators: Vec<Generator>,
}

mod matrix_rows {
    use nalgebra::DMatrix;
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<f64>, D::Error> {
        let rows: Vec<Vec<f64>> = Vec::deserialize(d)?;
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(D::Error::custom("ragged matrix"));
        }
        Ok(DMatrix::from_row_iterator(n, m, rows.into_iter().flatten()))
    }
}

impl Representation {
    pub fn max_form_defect(&self) -> f64 {
        let s = signs(self.signature.0, self.signature.1);
        self.generators
            .iter()
            .map(|g| form_defect(&g.matrix, &s))
            .fold(0.0, f64::max)
    }

    /// Form defect of each generator divided by `max(1, max|M_ij|^2)`, the
    /// rounding floor of `M^T Q M` in double precision.
    pub fn max_scaled_form_defect(&self) -> f64 {
        let s = signs(self.signature.0, self.signature.1);
        self.generators
            .iter()
            .map(|g| form_defect(&g.matrix, &s) / g.matrix.amax().powi(2).max(1.0))
            .fold(0.0, f64::max)
    }

    pub fn check(&self) -> Result<()> {
        let n = self.signature.0 + self.signature.1;
        if let Some(g) = self.generators.iter().find(|g| g.matrix.nrows() != n || g.matrix.ncols() != n) {
            return Err(Error::Invalid(format!("generator {} is not {n}x{n}", g.label)));
        }
        let defect = self.max_scaled_form_defect();
        if defect > FORM_TOL {
            return Err(Error::Invalid(format!("generators do not preserve the form (defect {defect:e})")));
        }
        Ok(())
    }
}

/// Bending one-parameter group: rotation in `(e_{d-1}, e_d)` for the
/// hyperbolic target, boost in `(e_{d-1}, e_{d+1})` for anti-de Sitter
/// (0-based indices).
pub fn bending_axis(target: BendTarget, d: usize, t: f64) -> IsometryMatrix {
    let mut m = DMatrix::identity(d + 2, d + 2);
    let a = d - 1;
    match target {
        BendTarget::Hyperbolic => {
            let (s, c) = t.sin_cos();
            let b = d;
            m[(a, a)] = c;
            m[(a, b)] = -s;
            m[(b, a)] = s;
            m[(b, b)] = c;
            IsometryMatrix {
                entries: m,
                signature: (d + 1, 1),
            }
        }
        BendTarget::AntiDeSitter => {
            let (s, c) = (t.sinh(), t.cosh());
            let b = d + 1;
            m[(a, a)] = c;
            m[(a, b)] = s;
            m[(b, a)] = s;
            m[(b, b)] = c;
            IsometryMatrix {
                entries: m,
                signature: (d, 2),
            }
        }
    }
}

/// Block embedding of `O(d,1)` into the target group: the extra coordinate
/// is a new spacelike direction at index `d` (hyperbolic) or a new timelike
/// direction at index `d + 1` (anti-de Sitter).
pub fn block_embed(m: &DMatrix<f64>, target: BendTarget) -> DMatrix<f64> {
    let d = m.nrows() - 1;
    let extra = match target {
        BendTarget::Hyperbolic => d,
        BendTarget::AntiDeSitter => d + 1,
    };
    let slot = |i: usize| if i < extra { i } else { i + 1 };
    let mut out = DMatrix::identity(d + 2, d + 2);
    for i in 0..=d {
        for j in 0..=d {
            out[(slot(i), slot(j))] = m[(i, j)];
        }
    }
    out
}

/// Embeds a representation into `SO(d+1,1)` or `SO(d,2)` and conjugates the
/// masked generators by the bending group at parameter `t`.
pub fn bend_representation(rep: &Representation, t: f64, target: BendTarget) -> Result<Representation> {
    rep.check()?;
    let (d, q) = rep.signature;
    if q != 1 || d < 2 {
        return Err(Error::Invalid(format!("source must be O(d,1) with d >= 2, got {:?}", rep.signature)));
    }
    let axis = d - 1;
    for g in rep.generators.iter().filter(|g| g.hypersurface) {
        let col = g.matrix.column(axis);
        let defect = col
            .iter()
            .enumerate()
            .map(|(i, v)| (v - if i == axis { 1.0 } else { 0.0 }).abs())
            .fold(0.0, f64::max);
        if defect > FORM_TOL {
            return Err(Error::Invalid(format!(
                "hypersurface generator {} moves the bending axis (defect {defect:e})",
                g.label
            )));
        }
    }
    let r = bending_axis(target, d, t);
    let r_inv = bending_axis(target, d, -t);
    let generators = rep
        .generators
        .iter()
        .map(|g| {
            let big = block_embed(&g.matrix, target);
            let matrix = if g.mask { &r.entries * big * &r_inv.entries } else { big };
            Generator {
                label: g.label.clone(),
                matrix,
                mask: g.mask,
                hypersurface: g.hypersurface,
            }
        })
        .collect();
    let out = Representation {
        signature: r.signature,
        generators,
    };
    out.check()?;
    Ok(out)
}
