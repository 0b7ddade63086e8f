//! Hipped hypersurfaces: cones over a link polygon around a codimension-2
//! totally geodesic stem, in `AdS^{d+1}` (de Sitter links) or `H^{d+1}`
//! (spherical links).
//!
//! Canonical placement, 0-based ambient indices, ambient dimension `d + 2`:
//!
//! ```text
//! AdS:  z = e_d,      stem = e_0 .. e_{d-3},  link = (e_{d-2}, e_{d-1}, e_{d+1})
//! Hyp:  z = e_{d+1},  stem = e_0 .. e_{d-3},  link = (e_{d-2}, e_{d-1}, e_d)
//! ```

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{ip, spacelike_margin, ModelPoint, NullRay, SpaceTag};
use crate::polygons::{Polygon, PolygonInvariants, PolygonModel};

const PARAM_TOL: f64 = 1e-12;
pub const CONVEX_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HipSpace {
    #[serde(rename = "ads")]
    AntiDeSitter,
    #[serde(rename = "hyp")]
    Hyperbolic,
}

impl HipSpace {
    pub fn link_model(self) -> PolygonModel {
        match self {
            HipSpace::AntiDeSitter => PolygonModel::DeSitter,
            HipSpace::Hyperbolic => PolygonModel::Sphere,
        }
    }

    pub fn tag(self, d: usize) -> SpaceTag {
        match self {
            HipSpace::AntiDeSitter => SpaceTag::AntiDeSitter(d + 1),
            HipSpace::Hyperbolic => SpaceTag::Hyperbolic(d + 1),
        }
    }

    /// Ambient indices of `z` and of the three link directions.
    pub fn layout(self, d: usize) -> (usize, [usize; 3]) {
        match self {
            HipSpace::AntiDeSitter => (d, [d - 2, d - 1, d + 1]),
            HipSpace::Hyperbolic => (d + 1, [d - 2, d - 1, d]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct HippedSpec {
    space: HipSpace,
    d: usize,
    polygon: Polygon,
}

/// A hipped hypersurface in canonical position. Serialises as
/// `{"space", "d", "polygon"}`; everything else is derived.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HippedSpec", into = "HippedSpec")]
pub struct HippedData {
    pub space: HipSpace,
    pub d: usize,
    pub z: DVector<f64>,
    pub stem_basis: Vec<DVector<f64>>,
    pub link_basis: [DVector<f64>; 3],
    pub polygon: Polygon,
    pub invariants: PolygonInvariants,
}

impl TryFrom<HippedSpec> for HippedData {
    type Error = Error;
    fn try_from(s: HippedSpec) -> Result<Self> {
        build(s.space, s.d, &s.polygon)
    }
}

impl From<HippedData> for HippedSpec {
    fn from(h: HippedData) -> Self {
        HippedSpec {
            space: h.space,
            d: h.d,
            polygon: h.polygon,
        }
    }
}

pub fn build(space: HipSpace, d: usize, polygon: &Polygon) -> Result<HippedData> {
    if d < 2 {
        return Err(Error::Invalid(format!("d = {d} < 2")));
    }
    if polygon.model != space.link_model() {
        return Err(Error::Invalid(format!(
            "{} link polygon required, got {}",
            space.link_model(),
            polygon.model
        )));
    }
    let invariants = polygon.invariants()?;
    let n = d + 2;
    let e = |i: usize| {
        let mut v = DVector::zeros(n);
        v[i] = 1.0;
        v
    };
    let (zi, li) = space.layout(d);
    Ok(HippedData {
        space,
        d,
        z: e(zi),
        stem_basis: (0..d - 2).map(e).collect(),
        link_basis: [e(li[0]), e(li[1]), e(li[2])],
        polygon: polygon.clone(),
        invariants,
    })
}

impl HippedData {
    pub fn tag(&self) -> SpaceTag {
        self.space.tag(self.d)
    }

    pub fn wedge_count(&self) -> usize {
        self.polygon.k()
    }

    pub fn dot(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        ip(self.tag(), a.as_slice(), b.as_slice())
    }

    /// Ambient image of a link vector.
    pub fn embed_link(&self, v: &Vector3<f64>) -> DVector<f64> {
        &self.link_basis[0] * v.x + &self.link_basis[1] * v.y + &self.link_basis[2] * v.z
    }

    pub fn base_point(&self) -> ModelPoint {
        ModelPoint::from_coords(self.tag(), self.z.as_slice().to_vec()).expect("canonical base point")
    }

    /// `exp_z(u + t w(s))` with `w(s)` the link point at arclength `s` along
    /// edge `i`.
    pub fn eval_point(&self, i: usize, s: f64, u: &[f64], t: f64) -> Result<ModelPoint> {
        Ok(ModelPoint::new(crate::forms::AmbientVector::from_dvector(
            self.tag(),
            self.eval_raw(i, s, u, t)?,
        )?)?)
    }

    fn eval_raw(&self, i: usize, s: f64, u: &[f64], t: f64) -> Result<DVector<f64>> {
        let k = self.wedge_count();
        if i >= k {
            return Err(Error::Invalid(format!("wedge {i} out of range 0..{k}")));
        }
        let l = self.invariants.lengths[i];
        if !(s >= -PARAM_TOL && s <= l + PARAM_TOL) {
            return Err(Error::Invalid(format!("s = {s} outside [0, {l}]")));
        }
        if !(t >= 0.0) {
            return Err(Error::Invalid(format!("t = {t} < 0")));
        }
        if u.len() != self.stem_basis.len() {
            return Err(Error::Dimension {
                expected: self.stem_basis.len(),
                got: u.len(),
            });
        }
        let f = &self.invariants.frames[i];
        let w = self.embed_link(&(f.v * s.cos() + f.u_plus * s.sin()));
        let mut xi = w * t;
        for (c, b) in u.iter().zip(&self.stem_basis) {
            xi += b * *c;
        }
        let r = self.dot(&xi, &xi).max(0.0).sqrt();
        if r == 0.0 {
            return Ok(self.z.clone());
        }
        Ok(&self.z * r.cosh() + xi * (r.sinh() / r))
    }

    /// Unit normal of the hyperplane carrying face `i`: the embedded link
    /// frame normal `w_i` (future-pointing in AdS, outward in `H`).
    pub fn face_normal(&self, i: usize) -> Result<DVector<f64>> {
        let k = self.wedge_count();
        let a = self.polygon.vertex(i % k);
        let b = self.polygon.vertex(i + 1);
        let model = self.polygon.model;
        let c = model.dot(a, b);
        let u = b - a * c;
        if model.dot(&u, &u) <= 1e-24 {
            return Err(Error::Degenerate(format!("edge {i} is degenerate")));
        }
        Ok(self.embed_link(&model.normal(a, &u)))
    }

    pub fn face_normals(&self) -> Result<Vec<DVector<f64>>> {
        (0..self.wedge_count()).map(|i| self.face_normal(i)).collect()
    }

    /// Wedge angles and dihedral angles recomputed from the ambient data.
    pub fn recover_angles(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let k = self.wedge_count();
        let pts: Vec<DVector<f64>> = self.polygon.vertices.iter().map(|v| self.embed_link(v)).collect();
        let normals = self.face_normals()?;
        let mut wedge = Vec::with_capacity(k);
        let mut dihedral = Vec::with_capacity(k);
        for i in 0..k {
            let (p, q) = (&pts[i], &pts[(i + 1) % k]);
            let c = self.dot(p, q).clamp(-1.0, 1.0);
            wedge.push(c.acos());
            let u = (q - p * c) / (1.0 - c * c).sqrt();
            let prev = &normals[(i + k - 1) % k];
            let along = self.dot(prev, &u);
            let th = match self.space {
                HipSpace::AntiDeSitter => along.asinh(),
                HipSpace::Hyperbolic => (-along).atan2(self.dot(prev, &normals[i])),
            };
            dihedral.push(th);
        }
        Ok((wedge, dihedral))
    }

    /// Total angle around the stem.
    pub fn cone_angle(&self) -> f64 {
        self.invariants.lengths.iter().sum()
    }

    pub fn convexity(&self) -> Result<bool> {
        let (_, dihedral) = self.recover_angles()?;
        Ok(dihedral.iter().all(|&t| t >= -CONVEX_TOL))
    }

    /// Face `i` as a parametrised surface in `(s, t, u_1, .., u_{d-2})`.
    pub fn face_surface(&self, i: usize) -> Result<ParamSurface<'_>> {
        let n = self.face_normal(i)?;
        Ok(ParamSurface {
            tag: self.tag(),
            dim: self.d,
            point: Box::new(move |x: &[f64]| self.eval_raw(i, x[0], &x[2..], x[1])),
            normal: Some(Box::new(move |_: &[f64]| Ok(n.clone()))),
        })
    }

    /// Point of the intrinsic model: the surface is a cone manifold of total
    /// angle [`cone_angle`](Self::cone_angle) around a copy of `H^{d-2}`.
    fn intrinsic(&self, phi: f64, u: &[f64], t: f64) -> DVector<f64> {
        let n = self.d + 1;
        let mut xi = DVector::zeros(n);
        for (j, c) in u.iter().enumerate() {
            xi[j] = *c;
        }
        xi[n - 3] = t * phi.cos();
        xi[n - 2] = t * phi.sin();
        let r = xi.norm();
        let mut p = if r == 0.0 { xi.clone() } else { xi * (r.sinh() / r) };
        p[n - 1] = r.cosh();
        p
    }

    /// Intrinsic distance between two samples `(phi, u, t)`, with `phi` the
    /// angular position around the stem.
    pub fn intrinsic_distance(&self, a: (f64, &[f64], f64), b: (f64, &[f64], f64)) -> f64 {
        let total = self.cone_angle();
        let gap = (a.0 - b.0).rem_euclid(total);
        let gap = gap.min(total - gap).min(PI);
        let pa = self.intrinsic(0.0, a.1, a.2);
        let pb = self.intrinsic(gap, b.1, b.2);
        let n = pa.len();
        let c = pa[n - 1] * pb[n - 1] - pa.rows(0, n - 1).dot(&pb.rows(0, n - 1));
        c.max(1.0).acosh()
    }

    /// Samples points with `|u_j| <= 0.5`, `t <= 1` over all wedges and
    /// returns the spacelike margin of the sample against the intrinsic
    /// distance.
    pub fn spacelike_check(&self, n_samples: usize, seed: u64) -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = self.wedge_count();
        let faces: Vec<usize> = (0..n_samples).map(|_| rng.gen_range(0..k)).collect();
        self.spacelike_check_on(&faces, &mut rng)
    }

    /// Same as [`spacelike_check`](Self::spacelike_check) with the wedge of
    /// every sample given.
    pub fn spacelike_check_on(&self, faces: &[usize], rng: &mut ChaCha8Rng) -> Result<f64> {
        if self.space != HipSpace::AntiDeSitter {
            return Err(Error::Invalid("spacelike check needs an anti-de Sitter hypersurface".into()));
        }
        let offsets: Vec<f64> = self
            .invariants
            .lengths
            .iter()
            .scan(0.0, |acc, l| {
                let o = *acc;
                *acc += l;
                Some(o)
            })
            .collect();
        let mut points = Vec::with_capacity(faces.len());
        let mut params: Vec<(f64, Vec<f64>, f64)> = Vec::with_capacity(faces.len());
        for &i in faces {
            let s = rng.gen_range(0.0..self.invariants.lengths[i]);
            let t = rng.gen_range(0.05..1.0);
            let u: Vec<f64> = (0..self.d - 2).map(|_| rng.gen_range(-0.5..0.5)).collect();
            points.push(self.eval_point(i, s, &u, t)?);
            params.push((offsets[i] + s, u, t));
        }
        let m = points.len();
        let mut dist = DMatrix::zeros(m, m);
        for a in 0..m {
            for b in a + 1..m {
                let (pa, pb) = (&params[a], &params[b]);
                let d = self.intrinsic_distance((pa.0, &pa.1, pa.2), (pb.0, &pb.1, pb.2));
                dist[(a, b)] = d;
                dist[(b, a)] = d;
            }
        }
        spacelike_margin(&points, &dist)
    }

    /// Grid mesh over `(s, t)` per wedge, repeated over a stem grid of
    /// half-width `stem_box`. Seam vertices and the stem row are shared.
    pub fn sample_mesh(&self, t_max: f64, stem_box: f64, res: usize) -> Result<Mesh> {
        if res < 2 {
            return Err(Error::Invalid(format!("resolution {res} < 2")));
        }
        if !(t_max > 0.0) {
            return Err(Error::Invalid(format!("t_max = {t_max} must be positive")));
        }
        let k = self.wedge_count();
        let stem_dim = self.d - 2;
        let stem_grid: Vec<Vec<f64>> = grid_points(stem_dim, res, stem_box);
        let mut mesh = Mesh {
            tag: self.tag(),
            vertices: Vec::new(),
            faces: Vec::new(),
            wedge: Vec::new(),
        };
        let mut index: HashMap<(usize, usize, usize, usize), usize> = HashMap::new();
        let step = |j: usize| j as f64 / (res - 1) as f64;
        for (ui, u) in stem_grid.iter().enumerate() {
            // canonical key: the stem row ignores wedge and s; the last s of
            // wedge i is the first s of wedge i + 1
            let key = |i: usize, si: usize, ti: usize| {
                if ti == 0 {
                    (0, 0, 0, ui)
                } else if si == res - 1 {
                    ((i + 1) % k, 0, ti, ui)
                } else {
                    (i, si, ti, ui)
                }
            };
            for i in 0..k {
                let mut ids = vec![vec![0usize; res]; res];
                for si in 0..res {
                    for ti in 0..res {
                        let kk = key(i, si, ti);
                        let id = match index.get(&kk) {
                            Some(&id) => id,
                            None => {
                                let wi = kk.0;
                                let s = (step(kk.1) * self.invariants.lengths[wi]).min(self.invariants.lengths[wi]);
                                let p = self.eval_raw(wi, s, u, step(ti) * t_max)?;
                                mesh.vertices.push(p.as_slice().to_vec());
                                index.insert(kk, mesh.vertices.len() - 1);
                                mesh.vertices.len() - 1
                            }
                        };
                        ids[si][ti] = id;
                    }
                }
                for si in 0..res - 1 {
                    for ti in 0..res - 1 {
                        let mut f = vec![ids[si][ti], ids[si + 1][ti], ids[si + 1][ti + 1], ids[si][ti + 1]];
                        f.dedup();
                        if f.first() == f.last() && f.len() > 1 {
                            f.pop();
                        }
                        if f.len() >= 3 {
                            mesh.faces.push(f);
                            mesh.wedge.push(i);
                        }
                    }
                }
            }
        }
        Ok(mesh)
    }

    /// Ideal endpoints `[p + n_i]` of the normal rays leaving face `i` at the
    /// given `(s, u, t)` samples.
    pub fn concave_development_ideal(&self, i: usize, samples: &[(f64, Vec<f64>, f64)]) -> Result<Vec<NullRay>> {
        if self.space != HipSpace::Hyperbolic {
            return Err(Error::Invalid("ideal development needs a hyperbolic hypersurface".into()));
        }
        if !self.convexity()? {
            return Err(Error::Invalid("hypersurface is not convex".into()));
        }
        let n = self.face_normal(i)?;
        samples
            .iter()
            .map(|(s, u, t)| {
                let p = self.eval_raw(i, *s, u, *t)?;
                NullRay::from_coords(self.tag(), (p + &n).as_slice().to_vec())
            })
            .collect()
    }
}

fn grid_points(dim: usize, res: usize, half: f64) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        let mut next = Vec::with_capacity(out.len() * res);
        for p in &out {
            for j in 0..res {
                let mut q = p.clone();
                q.push(-half + 2.0 * half * j as f64 / (res - 1) as f64);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub tag: SpaceTag,
    pub vertices: Vec<Vec<f64>>,
    /// Quads, or triangles where a quad touches the stem.
    pub faces: Vec<Vec<usize>>,
    pub wedge: Vec<usize>,
}

impl Mesh {
    pub fn max_quadric_defect(&self) -> f64 {
        let target = self.tag.target();
        self.vertices
            .iter()
            .map(|v| (ip(self.tag, v, v) - target).abs())
            .fold(0.0, f64::max)
    }
}

type Evaluator<'a> = Box<dyn Fn(&[f64]) -> Result<DVector<f64>> + 'a>;

/// A parametrised hypersurface with an optional unit normal field.
pub struct ParamSurface<'a> {
    pub tag: SpaceTag,
    pub dim: usize,
    pub point: Evaluator<'a>,
    pub normal: Option<Evaluator<'a>>,
}

/// Central-difference estimate of `g(D_{T1} N, T2)` at `params`.
pub fn second_fundamental_form_fd(
    surface: &ParamSurface<'_>,
    params: &[f64],
    t1: &[f64],
    t2: &[f64],
    h: f64,
) -> Result<f64> {
    let normal = surface
        .normal
        .as_ref()
        .ok_or_else(|| Error::Invalid("surface has no normal field".into()))?;
    if !(1e-6..=1e-3).contains(&h) {
        return Err(Error::Invalid(format!("step {h} outside [1e-6, 1e-3]")));
    }
    if params.len() != surface.dim || t1.len() != surface.dim || t2.len() != surface.dim {
        return Err(Error::Dimension {
            expected: surface.dim,
            got: params.len(),
        });
    }
    let shift = |dir: &[f64], sgn: f64| -> Vec<f64> { params.iter().zip(dir).map(|(p, d)| p + sgn * h * d).collect() };
    let dn = (normal(&shift(t1, 1.0))? - normal(&shift(t1, -1.0))?) / (2.0 * h);
    let dp = ((surface.point)(&shift(t2, 1.0))? - (surface.point)(&shift(t2, -1.0))?) / (2.0 * h);
    Ok(ip(surface.tag, dn.as_slice(), dp.as_slice()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygons::regular_polygon;
    use std::f64::consts::FRAC_PI_4;

    fn ads_hexagon(alpha: f64, d: usize) -> HippedData {
        build(HipSpace::AntiDeSitter, d, &regular_polygon(PolygonModel::DeSitter, 6, alpha).unwrap()).unwrap()
    }

    #[test]
    fn build_and_mismatch() {
        let h = ads_hexagon(0.3, 3);
        assert_eq!(h.stem_basis.len(), 1);
        assert_eq!(h.dot(&h.z, &h.z), -1.0);
        let sq = regular_polygon(PolygonModel::Sphere, 4, FRAC_PI_4).unwrap();
        let hy = build(HipSpace::Hyperbolic, 2, &sq).unwrap();
        assert!(hy.stem_basis.is_empty());
        assert!(build(HipSpace::AntiDeSitter, 3, &sq).is_err());
        assert!(build(HipSpace::Hyperbolic, 1, &sq).is_err());
        let json = serde_json::to_string(&hy).unwrap();
        assert!(json.contains("\"space\":\"hyp\""));
        let back: HippedData = serde_json::from_str(&json).unwrap();
        assert_eq!(back, hy);
    }

    #[test]
    fn points_and_normals() {
        let h = ads_hexagon(0.4, 4);
        assert_eq!(h.eval_point(2, 0.0, &[0.0, 0.0], 0.0).unwrap().coords(), &h.z);
        let p = h.eval_point(1, 0.0, &[0.0, 0.0], 1.0).unwrap();
        let v = h.embed_link(h.polygon.vertex(1));
        assert!((p.coords() - (&h.z * 1f64.cosh() + v * 1f64.sinh())).norm() < 1e-12);
        assert!(h.eval_point(0, 10.0, &[0.0, 0.0], 1.0).is_err());
        assert!(h.eval_point(0, 0.1, &[0.0, 0.0], -1.0).is_err());
        for i in 0..6 {
            let n = h.face_normal(i).unwrap();
            assert!((h.dot(&n, &n) + 1.0).abs() < 1e-12);
            assert!(h.dot(&n, &h.z).abs() < 1e-14);
            let q = h.eval_point(i, 0.3, &[0.2, -0.4], 0.7).unwrap();
            assert!(h.dot(&n, q.coords()).abs() < 1e-10);
        }
        let g = ads_hexagon(0.0, 3);
        for i in 0..6 {
            assert!((g.face_normal(i).unwrap() - &g.link_basis[2]).norm() < 1e-12);
        }
    }

    #[test]
    fn angle_round_trip() {
        let h = ads_hexagon(0.4, 3);
        let (w, t) = h.recover_angles().unwrap();
        for i in 0..6 {
            assert!((w[i] - h.invariants.lengths[i]).abs() < 1e-9);
            assert!((t[i] - h.invariants.angles[i]).abs() < 1e-9);
        }
        assert!(h.cone_angle() > 2.0 * PI);
        assert!((ads_hexagon(0.0, 2).cone_angle() - 2.0 * PI).abs() < 1e-12);
        let sq = build(HipSpace::Hyperbolic, 2, &regular_polygon(PolygonModel::Sphere, 4, FRAC_PI_4).unwrap()).unwrap();
        let (w, t) = sq.recover_angles().unwrap();
        assert!(w.iter().all(|l| (l - PI / 3.0).abs() < 1e-12));
        for i in 0..4 {
            assert!((t[i] - sq.invariants.angles[i]).abs() < 1e-9);
        }
        assert!(sq.convexity().unwrap());
        assert!(ads_hexagon(0.0, 2).recover_angles().unwrap().1.iter().all(|t| t.abs() < 1e-12));
    }

    #[test]
    fn concave_corner() {
        let p = regular_polygon(PolygonModel::DeSitter, 6, 0.0).unwrap();
        let f = p.invariants().unwrap().frames[0].clone();
        let q = [p.perturb_vertex(0, &f.w, 0.05).unwrap(), p.perturb_vertex(0, &(-f.w), 0.05).unwrap()]
            .into_iter()
            .find(|q| q.invariants().unwrap().angles[0] < 0.0)
            .unwrap();
        let h = build(HipSpace::AntiDeSitter, 2, &q).unwrap();
        assert!(!h.convexity().unwrap());
        assert!(ads_hexagon(0.0, 2).convexity().unwrap());
    }

    #[test]
    fn faces_are_flat() {
        let h = ads_hexagon(0.5, 3);
        let s = h.face_surface(1).unwrap();
        let ii = second_fundamental_form_fd(&s, &[0.3, 0.6, 0.1], &[1.0, 0.0, 0.0], &[0.0, 1.0, 1.0], 1e-4).unwrap();
        assert!(ii.abs() < 1e-5);
        assert!(second_fundamental_form_fd(&s, &[0.3, 0.6, 0.1], &[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn spacelike_margins() {
        let h = ads_hexagon(0.4, 3);
        assert!(h.spacelike_check(40, 7).unwrap() > 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let one = h.spacelike_check_on(&[2; 20], &mut rng).unwrap();
        assert!(one >= 0.5 && one < 0.55, "{one}");
        let sq = build(HipSpace::Hyperbolic, 2, &regular_polygon(PolygonModel::Sphere, 4, 0.3).unwrap()).unwrap();
        assert!(sq.spacelike_check(5, 0).is_err());
    }

    #[test]
    fn mesh_is_watertight() {
        let h = ads_hexagon(0.3, 2);
        let m = h.sample_mesh(1.0, 0.0, 8).unwrap();
        assert!(m.max_quadric_defect() < 1e-8);
        // closed fan: 6 wedges * (7*7) - 6*7 seams - (6*7 - 1) stem duplicates
        assert_eq!(m.vertices.len(), 6 * 7 * 7 + 1);
        let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
        for f in &m.faces {
            for j in 0..f.len() {
                let (a, b) = (f[j], f[(j + 1) % f.len()]);
                *edges.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        // only the outer rim t = t_max is boundary
        let boundary = edges.values().filter(|&&c| c == 1).count();
        assert_eq!(boundary, 6 * 7);
        assert!(edges.values().all(|&c| c <= 2));
        assert!(h.sample_mesh(0.0, 0.0, 8).is_err());
        let m3 = ads_hexagon(0.3, 3).sample_mesh(0.5, 0.3, 3).unwrap();
        assert!(m3.max_quadric_defect() < 1e-8);
    }

    #[test]
    fn ideal_rays() {
        let sq = build(HipSpace::Hyperbolic, 3, &regular_polygon(PolygonModel::Sphere, 5, 0.4).unwrap()).unwrap();
        let rays = sq
            .concave_development_ideal(0, &[(0.1, vec![0.0], 0.5), (0.4, vec![0.2], 0.9)])
            .unwrap();
        for r in &rays {
            assert!(r.rep.q().abs() < 1e-10);
        }
        assert_ne!(rays[0], rays[1]);
        assert!(ads_hexagon(0.3, 3).concave_development_ideal(0, &[(0.1, vec![0.0], 0.5)]).is_err());
    }
}
