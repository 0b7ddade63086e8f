//! Newton-type solvers on the closure constraint: polygons with prescribed
//! length/angle patterns, the inverse of the symmetric angle map, and sweeps
//! of the rotation-symmetric families.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{null_space, pseudo_inverse, RANK_CUTOFF};
use crate::polygons::{
    develop, is_convex, regular_polygon, standard_frame, Polygon, PolygonModel,
};

pub const SOLVE_TOL: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 50;
pub const MAX_HALVINGS: usize = 30;
/// Documented basin of [`theta_inverse`].
pub const THETA_BASIN: f64 = 0.2;
const FD_STEP: f64 = 1e-7;
const LOG_MARGIN: f64 = 1e-6;

/// Wraps an angle to `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

/// Coordinates `(X01, X02, X12)` of the logarithm of the closure matrix of
/// the development from the standard frame.
pub fn closure_residual(model: PolygonModel, lengths: &[f64], angles: &[f64]) -> Result<Vector3<f64>> {
    let dev = develop(model, lengths, angles, &standard_frame())?;
    closure_log(model, &dev.closure)
}

fn closure_log(model: PolygonModel, c: &Matrix3<f64>) -> Result<Vector3<f64>> {
    let d = model.form();
    let a = (c - d * c.transpose() * d) * 0.5;
    let s = -0.5 * (a * a).trace();
    let cos_phi = 0.5 * (c.trace() - 1.0);
    let scale = if s > 0.0 {
        let phi = s.sqrt().atan2(cos_phi);
        if phi >= PI - LOG_MARGIN {
            return Err(Error::Degenerate(format!("far from closed (rotation angle {phi})")));
        }
        phi / phi.sin()
    } else if s < 0.0 {
        let phi = (-s).sqrt().asinh();
        phi / phi.sinh()
    } else {
        1.0
    };
    if s >= 0.0 && cos_phi < -1.0 + LOG_MARGIN {
        return Err(Error::Degenerate("far from closed (rotation angle near π)".into()));
    }
    if !scale.is_finite() {
        return Err(Error::Degenerate("closure logarithm undefined".into()));
    }
    Ok(Vector3::new(a[(0, 1)], a[(0, 2)], a[(1, 2)]) * scale)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    Fixed(f64),
    Shared(usize),
    Free,
}

/// Length/angle pattern. With `symmetric` the patterns describe one half of
/// a `2k`-gon whose entries `i` and `i + k` coincide.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternSpec {
    pub model: PolygonModel,
    pub k: usize,
    pub lengths: Vec<Param>,
    pub angles: Vec<Param>,
    #[serde(default)]
    pub symmetric: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Slot {
    Length(usize),
    Angle(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    LengthGroup(usize),
    AngleGroup(usize),
    Own(Slot),
}

/// Variable layout of a pattern: every half-pattern slot is fixed or points
/// at a solver variable.
struct Layout {
    slot_var: Vec<Option<usize>>,
    nvars: usize,
}

impl PatternSpec {
    pub fn equilateral(model: PolygonModel, k: usize, length: f64) -> Self {
        Self {
            model,
            k,
            lengths: vec![Param::Fixed(length); k],
            angles: vec![Param::Shared(0); k],
            symmetric: false,
        }
    }

    /// Number of polygon vertices.
    pub fn vertex_count(&self) -> usize {
        if self.symmetric {
            2 * self.k
        } else {
            self.k
        }
    }

    fn slots(&self) -> impl Iterator<Item = (Slot, Param)> + '_ {
        let ls = self.lengths.iter().enumerate().map(|(i, p)| (Slot::Length(i), *p));
        let an = self.angles.iter().enumerate().map(|(i, p)| (Slot::Angle(i), *p));
        ls.chain(an)
    }

    fn layout(&self) -> Layout {
        let mut keys: BTreeMap<Key, usize> = BTreeMap::new();
        let mut slot_var = Vec::with_capacity(2 * self.k);
        for (slot, p) in self.slots() {
            let key = match (p, slot) {
                (Param::Fixed(_), _) => {
                    slot_var.push(None);
                    continue;
                }
                (Param::Shared(g), Slot::Length(_)) => Key::LengthGroup(g),
                (Param::Shared(g), Slot::Angle(_)) => Key::AngleGroup(g),
                (Param::Free, s) => Key::Own(s),
            };
            let next = keys.len();
            slot_var.push(Some(*keys.entry(key).or_insert(next)));
        }
        Layout {
            slot_var,
            nvars: keys.len(),
        }
    }

    /// Number of solver variables left after fixing and sharing.
    pub fn variable_count(&self) -> usize {
        self.layout().nvars
    }

    pub fn check(&self) -> Result<()> {
        let n = self.vertex_count();
        if n < 3 {
            return Err(Error::Invalid(format!("{n} vertices, need at least 3")));
        }
        if self.lengths.len() != self.k || self.angles.len() != self.k {
            return Err(Error::Invalid(format!(
                "patterns must have {} entries (got {} lengths, {} angles)",
                self.k,
                self.lengths.len(),
                self.angles.len()
            )));
        }
        for p in &self.lengths {
            if let Param::Fixed(l) = p {
                if !(*l > 0.0 && *l < PI) {
                    return Err(Error::Invalid(format!("fixed length {l} out of (0,π)")));
                }
            }
        }
        for p in &self.angles {
            if let Param::Fixed(t) = p {
                let ok = match self.model {
                    PolygonModel::Sphere => t.abs() <= PI,
                    PolygonModel::DeSitter => t.is_finite(),
                };
                if !ok {
                    return Err(Error::Invalid(format!("fixed angle {t} out of range")));
                }
            }
        }
        if self.variable_count() == 0 {
            return Err(Error::Invalid("pattern leaves no free parameter".into()));
        }
        Ok(())
    }

    /// Expands variables into full length and angle sequences.
    fn expand(&self, layout: &Layout, x: &DVector<f64>) -> (Vec<f64>, Vec<f64>) {
        let mut half = vec![0.0; 2 * self.k];
        for (j, (_, p)) in self.slots().enumerate() {
            half[j] = match (p, layout.slot_var[j]) {
                (Param::Fixed(v), _) => v,
                (_, Some(var)) => x[var],
                (_, None) => unreachable!("non-fixed slot without a variable"),
            };
        }
        let reps = if self.symmetric { 2 } else { 1 };
        let lengths = half[..self.k].repeat(reps);
        let angles = half[self.k..].repeat(reps);
        (lengths, angles)
    }

    /// Initial variable values: the mean of the guess entries bound to each
    /// variable.
    fn initial(&self, layout: &Layout, lengths: &[f64], angles: &[f64]) -> Result<DVector<f64>> {
        let n = self.vertex_count();
        let fold = |v: &[f64]| -> Result<Vec<f64>> {
            if v.len() == n {
                Ok(v[..self.k].to_vec())
            } else if v.len() == self.k {
                Ok(v.to_vec())
            } else {
                Err(Error::Invalid(format!("guess has {} entries, expected {n}", v.len())))
            }
        };
        let half: Vec<f64> = fold(lengths)?.into_iter().chain(fold(angles)?).collect();
        let mut sum = vec![0.0; layout.nvars];
        let mut count = vec![0usize; layout.nvars];
        for (j, var) in layout.slot_var.iter().enumerate() {
            if let Some(v) = var {
                sum[*v] += half[j];
                count[*v] += 1;
            }
        }
        Ok(DVector::from_iterator(
            layout.nvars,
            sum.iter().zip(&count).map(|(s, c)| s / *c as f64),
        ))
    }

    /// Largest deviation of `(lengths, angles)` from the Fixed and Shared
    /// constraints (angles compared mod `2 pi` on the sphere).
    pub fn constraint_defect(&self, lengths: &[f64], angles: &[f64]) -> f64 {
        let n = self.vertex_count();
        let diff = |a: f64, b: f64, angle: bool| match (angle, self.model) {
            (true, PolygonModel::Sphere) => wrap_angle(a - b).abs(),
            _ => (a - b).abs(),
        };
        let mut worst = 0.0f64;
        let mut groups: BTreeMap<Key, f64> = BTreeMap::new();
        for i in 0..n {
            let h = i % self.k;
            for (angle, p, val) in [(false, self.lengths[h], lengths[i]), (true, self.angles[h], angles[i])] {
                match p {
                    Param::Fixed(v) => worst = worst.max(diff(val, v, angle)),
                    Param::Shared(g) => {
                        let key = if angle { Key::AngleGroup(g) } else { Key::LengthGroup(g) };
                        let first = *groups.entry(key).or_insert(val);
                        worst = worst.max(diff(val, first, angle));
                    }
                    Param::Free => {}
                }
                if self.symmetric && i >= self.k {
                    let twin = if angle { angles[h] } else { lengths[h] };
                    worst = worst.max(diff(val, twin, angle));
                }
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub lengths: Vec<f64>,
    pub angles: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub polygon: Option<Polygon>,
    pub message: Option<String>,
}

impl fmt::Display for SolveReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "residual {:e} after {} iterations ({})",
            self.residual,
            self.iterations,
            if self.converged { "converged" } else { "not converged" }
        )
    }
}

/// Damped Gauss-Newton on the closure residual. Always returns the best
/// iterate; `converged` tells whether the tolerance was met with a valid
/// polygon.
pub fn solve_pattern(spec: &PatternSpec, guess_lengths: &[f64], guess_angles: &[f64]) -> Result<SolveReport> {
    spec.check()?;
    let layout = spec.layout();
    let mut x = spec.initial(&layout, guess_lengths, guess_angles)?;
    let eval = |x: &DVector<f64>| -> Option<Vector3<f64>> {
        let (l, a) = spec.expand(&layout, x);
        closure_residual(spec.model, &l, &a).ok()
    };
    let mut r = eval(&x).ok_or_else(|| Error::Invalid("guess residual is not finite".into()))?;
    let mut iterations = 0;
    let mut message = None;
    while r.norm() > SOLVE_TOL && iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut jac = DMatrix::zeros(3, layout.nvars);
        let mut ok = true;
        for j in 0..layout.nvars {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += FD_STEP;
            xm[j] -= FD_STEP;
            match (eval(&xp), eval(&xm)) {
                (Some(rp), Some(rm)) => jac.set_column(j, &((rp - rm) / (2.0 * FD_STEP))),
                _ => ok = false,
            }
        }
        if !ok {
            message = Some("Jacobian evaluation left the admissible domain".into());
            break;
        }
        let rv = DVector::from_column_slice(r.as_slice());
        let step = -(pseudo_inverse(&jac, RANK_CUTOFF) * rv);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial = &x + &step * t;
            if let Some(rt) = eval(&trial) {
                if rt.norm() < r.norm() {
                    accepted = Some((trial, rt));
                    break;
                }
            }
            t *= 0.5;
        }
        match accepted {
            Some((xn, rn)) => {
                x = xn;
                r = rn;
            }
            None => {
                message = Some("line search failed to decrease the residual".into());
                break;
            }
        }
    }
    let (lengths, angles) = spec.expand(&layout, &x);
    let residual = r.norm();
    let mut converged = residual <= SOLVE_TOL;
    let mut polygon = None;
    if converged {
        let dev = develop(spec.model, &lengths, &angles, &standard_frame())?;
        match Polygon::checked(spec.model, dev.vertices) {
            Ok(p) => polygon = Some(p),
            Err(e) => {
                converged = false;
                message = Some(format!("closed but invalid: {e}"));
            }
        }
    } else if message.is_none() {
        message = Some(format!("no convergence within {MAX_ITERATIONS} iterations"));
    }
    Ok(SolveReport {
        lengths,
        angles,
        residual,
        iterations,
        converged,
        polygon,
        message,
    })
}

/// Like [`solve_pattern`] but fails unless a valid polygon was reached.
pub fn solve_polygon(spec: &PatternSpec, guess_lengths: &[f64], guess_angles: &[f64]) -> Result<Polygon> {
    let rep = solve_pattern(spec, guess_lengths, guess_angles)?;
    match rep.polygon {
        Some(p) if rep.converged => Ok(p),
        _ => Err(Error::NonConvergence {
            iterations: rep.iterations,
            residual: rep.residual,
        }),
    }
}

/// Symmetric equilateral `2k`-gon with `theta_i = theta_{i+k} = targets[i]`.
pub fn theta_inverse(model: PolygonModel, k: usize, targets: &[f64]) -> Result<Polygon> {
    if targets.len() != k || k < 2 {
        return Err(Error::Invalid(format!("need k >= 2 targets, got {} for k = {k}", targets.len())));
    }
    let spec = PatternSpec {
        model,
        k,
        lengths: vec![Param::Shared(0); k],
        angles: targets.iter().map(|&t| Param::Fixed(t)).collect(),
        symmetric: true,
    };
    let l0 = PI / k as f64;
    solve_polygon(&spec, &vec![l0; k], targets)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub length: f64,
    pub angle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
    /// Set when the range left the admissible region and rows were dropped.
    pub truncated: bool,
}

impl Sweep {
    /// CSV with header `alpha,length,angle` and 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("alpha,length,angle\n");
        for r in &self.rows {
            s.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", r.alpha, r.length, r.angle));
        }
        s
    }
}

/// Samples the rotation-symmetric family at `steps` evenly spaced values.
pub fn family_sweep(model: PolygonModel, k: usize, alpha_min: f64, alpha_max: f64, steps: usize) -> Result<Sweep> {
    if steps < 2 || alpha_max <= alpha_min || !alpha_min.is_finite() || !alpha_max.is_finite() {
        return Err(Error::Invalid("need alpha_min < alpha_max and at least 2 steps".into()));
    }
    let mut rows = Vec::with_capacity(steps);
    for j in 0..steps {
        let alpha = alpha_min + (alpha_max - alpha_min) * j as f64 / (steps - 1) as f64;
        let row = regular_polygon(model, k, alpha).and_then(|p| p.invariants()).and_then(|inv| {
            if is_convex(&inv) || alpha < 0.0 {
                Ok(SweepRow {
                    alpha,
                    length: inv.lengths[0],
                    angle: inv.angles[0],
                })
            } else {
                Err(Error::Invalid("non-convex member".into()))
            }
        });
        match row {
            Ok(r) => rows.push(r),
            Err(e) if j == 0 => return Err(e),
            Err(_) => return Ok(Sweep { rows, truncated: true }),
        }
    }
    Ok(Sweep { rows, truncated: false })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TangentConstraint {
    None,
    Equilateral,
    EquilateralFixedLength,
    Symmetric,
}

/// Stacked linear system of the closure matrix and the constraint rows, in
/// the variables `(theta_dot, l_dot)`.
pub fn tangent_system(p: &Polygon, c: TangentConstraint) -> Result<DMatrix<f64>> {
    let (a, _, _) = p.moduli_tangent()?;
    let k = p.k();
    let mut rows: Vec<Vec<f64>> = (0..3).map(|r| a.row(r).iter().copied().collect()).collect();
    let unit = |i: usize, j: usize| {
        let mut v = vec![0.0; 2 * k];
        v[i] = 1.0;
        v[j] = -1.0;
        v
    };
    if c != TangentConstraint::None {
        for i in 0..k - 1 {
            rows.push(unit(k + i + 1, k + i));
        }
    }
    match c {
        TangentConstraint::EquilateralFixedLength => {
            let mut v = vec![0.0; 2 * k];
            v[k] = 1.0;
            rows.push(v);
        }
        TangentConstraint::Symmetric => {
            if k % 2 != 0 {
                return Err(Error::Invalid(format!("symmetric constraint needs an even vertex count, got {k}")));
            }
            for i in 0..k / 2 {
                rows.push(unit(i, i + k / 2));
            }
        }
        _ => {}
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Ok(DMatrix::from_row_slice(rows.len(), 2 * k, &flat))
}

/// Kernel dimension of [`tangent_system`].
pub fn tangent_dimension(p: &Polygon, c: TangentConstraint) -> Result<usize> {
    Ok(null_space(&tangent_system(p, c)?, RANK_CUTOFF).ncols())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygons::regular_length;
    use std::f64::consts::TAU;

    #[test]
    fn residual_vanishes_on_closed_data() {
        let p = regular_polygon(PolygonModel::DeSitter, 7, 0.5).unwrap();
        let inv = p.invariants().unwrap();
        assert!(closure_residual(p.model, &inv.lengths, &inv.angles).unwrap().norm() <= 1e-10);
        let r = closure_residual(PolygonModel::DeSitter, &[PI / 3.0; 6], &[0.0; 6]).unwrap();
        assert!(r.norm() < 1e-12);
        let mut bumped = inv.angles.clone();
        bumped[0] += 0.1;
        let n = closure_residual(p.model, &inv.lengths, &bumped).unwrap().norm();
        assert!(n > 1e-3 && n < 1.0, "{n}");
    }

    #[test]
    fn residual_matches_matrix_log() {
        // elliptic and hyperbolic closures: exp of the recovered generator gives back C
        for (model, l, t) in [
            (PolygonModel::Sphere, vec![1.0, 0.9, 1.1], vec![0.3, 0.2, 0.4]),
            (PolygonModel::DeSitter, vec![1.0, 1.3, 1.2, 0.7], vec![0.3, -0.2, 0.4, 0.1]),
            (PolygonModel::DeSitter, vec![0.2, 0.3, 0.2], vec![0.9, 0.8, 1.2]),
        ] {
            let c = develop(model, &l, &t, &standard_frame()).unwrap().closure;
            let x = closure_residual(model, &l, &t).unwrap();
            let e = model.normal_sign();
            let gen = Matrix3::new(0.0, x[0], x[1], -x[0], 0.0, x[2], -e * x[1], -e * x[2], 0.0);
            assert!((gen.exp() - c).norm() < 1e-9, "{model}");
        }
    }

    #[test]
    fn far_from_closed_is_reported() {
        let e = closure_residual(PolygonModel::Sphere, &[PI / 2.0; 2], &[0.0; 2]).unwrap_err();
        assert!(e.to_string().contains("far from closed"));
    }

    #[test]
    fn equilateral_desitter_octagon() {
        let spec = PatternSpec::equilateral(PolygonModel::DeSitter, 8, 0.9);
        let p = solve_polygon(&spec, &[0.9; 8], &[0.2; 8]).unwrap();
        let inv = p.invariants().unwrap();
        let alpha = crate::polygons::regular_alpha_for_length(PolygonModel::DeSitter, 8, 0.9).unwrap();
        let reg = regular_polygon(PolygonModel::DeSitter, 8, alpha).unwrap().invariants().unwrap();
        for i in 0..8 {
            assert!((inv.angles[i] - reg.angles[0]).abs() < 1e-8);
            assert!((inv.lengths[i] - 0.9).abs() < 1e-12);
        }
    }

    #[test]
    fn geodesic_hexagon() {
        let spec = PatternSpec::equilateral(PolygonModel::Sphere, 6, TAU / 6.0);
        let rep = solve_pattern(&spec, &[TAU / 6.0; 6], &[0.0; 6]).unwrap();
        assert!(rep.converged);
        assert!(rep.angles.iter().all(|t| t.abs() < 1e-12));
    }

    #[test]
    fn short_desitter_sides_do_not_close() {
        let l = TAU / 6.0 - 0.3;
        let spec = PatternSpec::equilateral(PolygonModel::DeSitter, 6, l);
        let rep = solve_pattern(&spec, &[l; 6], &[0.1; 6]).unwrap();
        assert!(!rep.converged);
        assert!(rep.message.is_some());
        assert!(solve_polygon(&spec, &[l; 6], &[0.1; 6]).is_err());
    }

    #[test]
    fn projection_leaves_solutions_alone() {
        let p = regular_polygon(PolygonModel::Sphere, 5, 0.4).unwrap();
        let inv = p.invariants().unwrap();
        let spec = PatternSpec::equilateral(p.model, 5, inv.lengths[0]);
        let rep = solve_pattern(&spec, &inv.lengths, &inv.angles).unwrap();
        assert_eq!(rep.iterations, 0);
        assert!(spec.constraint_defect(&rep.lengths, &rep.angles) < 1e-10);
    }

    #[test]
    fn theta_inverse_round_trips() {
        for model in [PolygonModel::Sphere, PolygonModel::DeSitter] {
            let p = theta_inverse(model, 3, &[0.0; 3]).unwrap();
            let inv = p.invariants().unwrap();
            assert!(inv.lengths.iter().all(|l| (l - PI / 3.0).abs() < 1e-9));
            let t = [0.07, 0.0, 0.0, 0.0];
            let p = theta_inverse(model, 4, &t).unwrap();
            let inv = p.invariants().unwrap();
            for i in 0..4 {
                assert!((inv.angles[i] - t[i]).abs() < 1e-8);
                assert!((inv.angles[i + 4] - t[i]).abs() < 1e-8);
            }
            assert!(p.central_symmetry_defect().unwrap() < 1e-8);
        }
    }

    #[test]
    fn theta_inverse_matches_regular_family() {
        let p = theta_inverse(PolygonModel::DeSitter, 3, &[0.05; 3]).unwrap();
        let l = p.invariants().unwrap().lengths[0];
        let alpha = crate::polygons::regular_alpha_for_length(PolygonModel::DeSitter, 6, l).unwrap();
        let reg = regular_polygon(PolygonModel::DeSitter, 6, alpha).unwrap().invariants().unwrap();
        assert!((reg.angles[0] - 0.05).abs() < 1e-8);
    }

    #[test]
    fn sweeps() {
        let s = family_sweep(PolygonModel::DeSitter, 6, 0.0, 1.0, 11).unwrap();
        assert!(!s.truncated);
        assert_eq!(s.rows.len(), 11);
        let r0 = s.rows[0];
        assert_eq!(r0.alpha, 0.0);
        assert!((r0.length - PI / 3.0).abs() < 1e-12 && r0.angle.abs() < 1e-12);
        for w in s.rows.windows(2) {
            assert!(w[1].length > w[0].length && w[1].angle > w[0].angle);
        }
        let s = family_sweep(PolygonModel::Sphere, 4, 0.0, 1.2, 13).unwrap();
        for (w, r) in s.rows.windows(2).zip(&s.rows) {
            assert!(w[1].length < w[0].length);
            assert!((r.length - regular_length(PolygonModel::Sphere, 4, r.alpha)).abs() < 1e-12);
        }
        let barrier = crate::polygons::desitter_alpha_barrier(4);
        let s = family_sweep(PolygonModel::DeSitter, 4, 0.0, barrier + 0.2, 21).unwrap();
        assert!(s.truncated);
        assert!(s.rows.last().unwrap().alpha < barrier);
        let csv = s.to_csv();
        assert!(csv.starts_with("alpha,length,angle\n"));
        assert_eq!(csv.lines().count(), s.rows.len() + 1);
    }

    #[test]
    fn tangent_dimensions() {
        let p = regular_polygon(PolygonModel::DeSitter, 7, 0.6).unwrap();
        assert_eq!(tangent_dimension(&p, TangentConstraint::None).unwrap(), 11);
        assert_eq!(tangent_dimension(&p, TangentConstraint::Equilateral).unwrap(), 5);
        assert_eq!(tangent_dimension(&p, TangentConstraint::EquilateralFixedLength).unwrap(), 4);
        let p = regular_polygon(PolygonModel::DeSitter, 8, 0.3).unwrap();
        assert_eq!(tangent_dimension(&p, TangentConstraint::Symmetric).unwrap(), 4);
        assert!(tangent_dimension(&p.clone(), TangentConstraint::Symmetric).is_ok());
    }

    #[test]
    fn spec_checks() {
        let mut spec = PatternSpec::equilateral(PolygonModel::Sphere, 5, 0.5);
        assert_eq!(spec.variable_count(), 1);
        spec.angles = vec![Param::Fixed(0.1); 5];
        assert!(spec.check().is_err());
        spec.lengths[0] = Param::Fixed(4.0);
        assert!(spec.check().is_err());
        let json = serde_json::to_string(&PatternSpec::equilateral(PolygonModel::DeSitter, 3, 1.0)).unwrap();
        let back: PatternSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back.k, 3);
    }
}
