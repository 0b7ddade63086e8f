//! Wavefront OBJ export of three-dimensional hipped meshes.
//!
//! Hyperbolic meshes go through the Klein projection `x -> (x_1, x_2, x_3) / x_4`.
//! Anti-de Sitter meshes use cylinder coordinates `(y_1, y_2, theta)`, where
//! `(theta, x)` is the inverse conformal chart of the point and `y` is the
//! Klein (gnomonic) chart of `x` on the upper hemisphere.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::forms::{conformal_chart_inverse_signed, ModelPoint, SpaceTag};
use crate::hipped::Mesh;

#[derive(Debug, Clone, PartialEq)]
pub struct ObjData {
    pub vertices: Vec<[f64; 3]>,
    /// Zero-based vertex indices.
    pub faces: Vec<Vec<usize>>,
}

fn require_three_dimensional(tag: SpaceTag) -> Result<()> {
    match tag {
        SpaceTag::Hyperbolic(3) | SpaceTag::AntiDeSitter(3) => Ok(()),
        other => Err(Error::Invalid(format!(
            "OBJ export needs a three-dimensional hyperbolic or anti-de Sitter mesh, got {other:?}"
        ))),
    }
}

pub fn project_vertex(tag: SpaceTag, v: &[f64]) -> Result<[f64; 3]> {
    require_three_dimensional(tag)?;
    let p = ModelPoint::from_coords(tag, v.to_vec())?;
    match tag {
        SpaceTag::Hyperbolic(_) => {
            let c = p.coords();
            Ok([c[0] / c[3], c[1] / c[3], c[2] / c[3]])
        }
        _ => {
            let (theta, x) = conformal_chart_inverse_signed(&p)?;
            Ok([x[1] / x[0], x[2] / x[0], theta])
        }
    }
}

/// Inverse of [`project_vertex`].
pub fn lift_vertex(tag: SpaceTag, y: [f64; 3]) -> Result<Vec<f64>> {
    require_three_dimensional(tag)?;
    match tag {
        SpaceTag::Hyperbolic(_) => {
            let n2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
            if n2 >= 1.0 {
                return Err(Error::Invalid(format!("Klein point outside the unit ball (|y|^2 = {n2})")));
            }
            let s = 1.0 / (1.0 - n2).sqrt();
            Ok(vec![y[0] * s, y[1] * s, y[2] * s, s])
        }
        _ => {
            let r = (1.0 + y[0] * y[0] + y[1] * y[1]).sqrt();
            Ok(vec![y[0], y[1], r * y[2].cos(), r * y[2].sin()])
        }
    }
}

/// OBJ text with one `v` record per vertex and one `f` record per face.
pub fn export_obj(mesh: &Mesh) -> Result<String> {
    require_three_dimensional(mesh.tag)?;
    if mesh.vertices.is_empty() || mesh.faces.is_empty() {
        return Err(Error::Invalid("empty mesh".into()));
    }
    let mut out = String::new();
    for v in &mesh.vertices {
        let y = project_vertex(mesh.tag, v)?;
        let _ = writeln!(out, "v {:.16e} {:.16e} {:.16e}", y[0], y[1], y[2]);
    }
    for f in &mesh.faces {
        if let Some(&bad) = f.iter().find(|&&i| i >= mesh.vertices.len()) {
            return Err(Error::Invalid(format!("face references missing vertex {bad}")));
        }
        out.push('f');
        for i in f {
            let _ = write!(out, " {}", i + 1);
        }
        out.push('\n');
    }
    Ok(out)
}

/// Reads the `v` and `f` records of an OBJ file; other records are ignored.
pub fn parse_obj(text: &str) -> Result<ObjData> {
    let mut data = ObjData {
        vertices: Vec::new(),
        faces: Vec::new(),
    };
    for (n, line) in text.lines().enumerate() {
        let mut parts = line.split_whitespace();
        let bad = |what: &str| Error::Invalid(format!("line {}: {what}", n + 1));
        match parts.next() {
            Some("v") => {
                let c: Vec<f64> = parts
                    .map(|s| s.parse::<f64>().map_err(|_| bad("malformed coordinate")))
                    .collect::<Result<_>>()?;
                if c.len() != 3 {
                    return Err(bad("vertex needs three coordinates"));
                }
                data.vertices.push([c[0], c[1], c[2]]);
            }
            Some("f") => {
                let f: Vec<usize> = parts
                    .map(|s| {
                        let head = s.split('/').next().unwrap_or("");
                        match head.parse::<usize>() {
                            Ok(i) if i >= 1 => Ok(i - 1),
                            _ => Err(bad("malformed face index")),
                        }
                    })
                    .collect::<Result<_>>()?;
                if f.len() < 3 {
                    return Err(bad("face needs at least three vertices"));
                }
                data.faces.push(f);
            }
            _ => {}
        }
    }
    if let Some(&bad) = data.faces.iter().flatten().find(|&&i| i >= data.vertices.len()) {
        return Err(Error::Invalid(format!("face references missing vertex {}", bad + 1)));
    }
    Ok(data)
}

/// Largest `|q(p) - target|` after lifting every OBJ vertex back to the model.
pub fn round_trip_defect(tag: SpaceTag, data: &ObjData) -> Result<f64> {
    let target = tag.target();
    let mut worst = 0.0f64;
    for y in &data.vertices {
        let p = lift_vertex(tag, *y)?;
        worst = worst.max((crate::forms::ip(tag, &p, &p) - target).abs());
    }
    Ok(worst)
}

/// Smallest `d_{S^2}(x, x') - |theta - theta'|` over all vertex pairs of an
/// anti-de Sitter export. Positive means the time coordinate is a strictly
/// 1-Lipschitz graph over the sample.
pub fn graph_lipschitz_gap(data: &ObjData) -> Result<f64> {
    if data.vertices.len() < 2 {
        return Err(Error::Invalid("need at least two vertices".into()));
    }
    let sphere: Vec<[f64; 3]> = data
        .vertices
        .iter()
        .map(|y| {
            let r = (1.0 + y[0] * y[0] + y[1] * y[1]).sqrt();
            [1.0 / r, y[0] / r, y[1] / r]
        })
        .collect();
    let mut gap = f64::INFINITY;
    for i in 0..sphere.len() {
        for j in i + 1..sphere.len() {
            let (a, b) = (sphere[i], sphere[j]);
            let cross = [
                a[1] * b[2] - a[2] * b[1],
                a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0],
            ];
            let sin = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
            let cos = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
            let dist = sin.atan2(cos);
            let dt = (data.vertices[i][2] - data.vertices[j][2]).abs();
            gap = gap.min(dist - dt);
        }
    }
    Ok(gap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hipped::{build, HipSpace};
    use crate::polygons::regular_polygon;

    fn mesh(space: HipSpace, d: usize) -> Mesh {
        let p = regular_polygon(space.link_model(), 6, 0.4).unwrap();
        build(space, d, &p).unwrap().sample_mesh(1.0, 0.5, 5).unwrap()
    }

    #[test]
    fn hyperbolic_export_lies_in_klein_ball() {
        let text = export_obj(&mesh(HipSpace::Hyperbolic, 2)).unwrap();
        let data = parse_obj(&text).unwrap();
        assert!(data.vertices.iter().all(|y| y.iter().map(|c| c * c).sum::<f64>() < 1.0));
        assert!(round_trip_defect(SpaceTag::Hyperbolic(3), &data).unwrap() <= 1e-8);
        assert!(text.lines().all(|l| l.starts_with("v ") || l.starts_with("f ")));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn ads_export_is_a_lipschitz_graph() {
        let m = mesh(HipSpace::AntiDeSitter, 2);
        let data = parse_obj(&export_obj(&m).unwrap()).unwrap();
        assert_eq!(data.vertices.len(), m.vertices.len());
        assert_eq!(data.faces, m.faces);
        assert!(round_trip_defect(SpaceTag::AntiDeSitter(3), &data).unwrap() <= 1e-8);
        assert!(graph_lipschitz_gap(&data).unwrap() > 0.0);
        for (y, v) in data.vertices.iter().zip(&m.vertices) {
            let back = lift_vertex(m.tag, *y).unwrap();
            for (a, b) in back.iter().zip(v) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_other_dimensions_and_empty_meshes() {
        assert!(export_obj(&mesh(HipSpace::AntiDeSitter, 3)).is_err());
        let mut m = mesh(HipSpace::Hyperbolic, 2);
        m.vertices.clear();
        m.faces.clear();
        assert!(export_obj(&m).is_err());
        assert!(parse_obj("v 1 2\n").is_err());
        assert!(parse_obj("v 0 0 0\nf 1 2 3\n").is_err());
    }
}
