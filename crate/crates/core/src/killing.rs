//! Timelike unitary Killing fields `x -> u x` of `AdS^{2d+1}` (`u^2 = -Id`,
//! `u` antisymmetric for the form), the umbilic hypersurfaces `P_t`, and the
//! foot point where such a field is orthogonal to `P_t`.
//!
//! `P_t` is parametrised by `y in R^{2d}` through
//! `p(y) = cos t h(y) + sin t e_last`, `h(y) = (y, sqrt(1 + |y|^2), 0)`, with
//! future unit normal `N(y) = -sin t h(y) + cos t e_last`. The function
//! `f = -<u p, N>` reduces to `<h(y), u e_last>` and has minimum 1.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{ip, SpaceTag};
use crate::hipped::ParamSurface;

pub const KILLING_TOL: f64 = 1e-9;

fn tag(d: usize) -> SpaceTag {
    SpaceTag::AntiDeSitter(2 * d + 1)
}

fn form(d: usize) -> DMatrix<f64> {
    tag(d).form_matrix()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KillingGenerator {
    pub d: usize,
    #[serde(with = "rows")]
    pub matrix: DMatrix<f64>,
}

mod rows {
    use nalgebra::DMatrix;
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
        let r: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
        r.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<f64>, D::Error> {
        let r: Vec<Vec<f64>> = Vec::deserialize(d)?;
        let n = r.len();
        if r.iter().any(|row| row.len() != n) {
            return Err(D::Error::custom("matrix must be square"));
        }
        Ok(DMatrix::from_row_iterator(n, n, r.into_iter().flatten()))
    }
}

impl KillingGenerator {
    pub fn new(d: usize, matrix: DMatrix<f64>) -> Result<Self> {
        let n = 2 * d + 2;
        if d < 1 {
            return Err(Error::Invalid("d must be at least 1".into()));
        }
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::Dimension {
                expected: n,
                got: matrix.nrows(),
            });
        }
        Ok(Self { d, matrix })
    }

    pub fn negated(&self) -> Self {
        Self {
            d: self.d,
            matrix: -&self.matrix,
        }
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.matrix * x
    }

    /// `max |Q u + u^T Q|`.
    pub fn antisymmetry_residual(&self) -> f64 {
        let q = form(self.d);
        (&q * &self.matrix + self.matrix.transpose() * &q).amax()
    }

    /// `max |u^2 + Id|`.
    pub fn square_residual(&self) -> f64 {
        let n = self.matrix.nrows();
        (&self.matrix * &self.matrix + DMatrix::identity(n, n)).amax()
    }
}

/// Rotation generators on the coordinate pairs `(0,1), (2,3), ..`.
pub fn standard_j(d: usize) -> KillingGenerator {
    let n = 2 * d + 2;
    let mut m = DMatrix::zeros(n, n);
    for b in 0..=d {
        m[(2 * b + 1, 2 * b)] = 1.0;
        m[(2 * b, 2 * b + 1)] = -1.0;
    }
    KillingGenerator { d, matrix: m }
}

/// `g J g^{-1}` with `g = exp(a)`; `a` must be antisymmetric for the form.
pub fn killing_from_algebra(d: usize, a: &DMatrix<f64>) -> Result<KillingGenerator> {
    let q = form(d);
    let n = 2 * d + 2;
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::Dimension { expected: n, got: a.nrows() });
    }
    let defect = (&q * a + a.transpose() * &q).amax();
    if defect > KILLING_TOL {
        return Err(Error::Invalid(format!("algebra element is not antisymmetric for the form ({defect:e})")));
    }
    let g = a.clone().exp();
    let g_inv = &q * g.transpose() * &q;
    KillingGenerator::new(d, &g * standard_j(d).matrix * g_inv)
}

/// Random conjugate of [`standard_j`]: `a = Q K` with `K` antisymmetric,
/// entries uniform in `[-0.5, 0.5]`.
pub fn random_killing(d: usize, seed: u64) -> Result<KillingGenerator> {
    let n = 2 * d + 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v: f64 = rng.gen_range(-0.5..=0.5);
            k[(i, j)] = v;
            k[(j, i)] = -v;
        }
    }
    killing_from_algebra(d, &(form(d) * k))
}

/// Random point of `AdS^{2d+1}`.
pub fn random_ads_point(d: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    let n = 2 * d + 2;
    let mut x: DVector<f64> = DVector::zeros(n);
    for i in 0..n - 2 {
        x[i] = rng.gen_range(-2.0..2.0);
    }
    let r = (1.0 + x.rows(0, n - 2).norm_squared()).sqrt();
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    x[n - 2] = r * phi.cos();
    x[n - 1] = r * phi.sin();
    x
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KillingReport {
    pub antisymmetry: f64,
    pub square: f64,
    /// `max |g(X, X) + 1|` over the sampled points.
    pub unit_norm: f64,
}

impl KillingReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.antisymmetry <= tol && self.square <= tol && self.unit_norm <= tol
    }
}

pub fn verify_killing(u: &KillingGenerator, n_samples: usize, seed: u64) -> KillingReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = tag(u.d);
    let unit_norm = (0..n_samples)
        .map(|_| {
            let x = random_ads_point(u.d, &mut rng);
            let ux = u.apply(&x);
            (ip(t, ux.as_slice(), ux.as_slice()) + 1.0).abs()
        })
        .fold(0.0, f64::max);
    KillingReport {
        antisymmetry: u.antisymmetry_residual(),
        square: u.square_residual(),
        unit_norm,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UmbilicSurface {
    pub t: f64,
    pub d: usize,
}

impl UmbilicSurface {
    pub fn new(t: f64, d: usize) -> Result<Self> {
        if !(t > 0.0 && t < std::f64::consts::FRAC_PI_2) {
            return Err(Error::Invalid(format!("t = {t} outside (0, π/2)")));
        }
        if d < 1 {
            return Err(Error::Invalid("d must be at least 1".into()));
        }
        Ok(Self { t, d })
    }

    pub fn tag(&self) -> SpaceTag {
        tag(self.d)
    }

    /// Convexity constant `tan t`.
    pub fn convexity(&self) -> f64 {
        self.t.tan()
    }

    fn h(&self, y: &[f64]) -> DVector<f64> {
        let n = 2 * self.d + 2;
        let mut h = DVector::zeros(n);
        let mut r2 = 1.0;
        for (j, v) in y.iter().enumerate() {
            h[j] = *v;
            r2 += v * v;
        }
        h[n - 2] = r2.sqrt();
        h
    }

    fn check(&self, y: &[f64]) -> Result<()> {
        if y.len() != 2 * self.d {
            return Err(Error::Dimension {
                expected: 2 * self.d,
                got: y.len(),
            });
        }
        Ok(())
    }

    pub fn point(&self, y: &[f64]) -> Result<DVector<f64>> {
        self.check(y)?;
        let mut p = self.h(y) * self.t.cos();
        let n = p.len();
        p[n - 1] += self.t.sin();
        Ok(p)
    }

    pub fn normal(&self, y: &[f64]) -> Result<DVector<f64>> {
        self.check(y)?;
        let mut nv = self.h(y) * -self.t.sin();
        let n = nv.len();
        nv[n - 1] += self.t.cos();
        Ok(nv)
    }

    pub fn point_normal(&self, y: &[f64]) -> Result<(DVector<f64>, DVector<f64>)> {
        Ok((self.point(y)?, self.normal(y)?))
    }

    /// Intrinsic distance on `P_t`: `cos t` times the distance in `H^{2d}`.
    pub fn distance(&self, y1: &[f64], y2: &[f64]) -> Result<f64> {
        self.check(y1)?;
        self.check(y2)?;
        let (a, b) = (self.h(y1), self.h(y2));
        let n = a.len();
        let c = a[n - 2] * b[n - 2] - a.rows(0, n - 2).dot(&b.rows(0, n - 2));
        // cosh(rho) = c; use |h1 - h2|^2 = 2 (c - 1) for small separations
        let diff = &a - &b;
        let qd = diff.rows(0, n - 2).norm_squared() - diff[n - 2] * diff[n - 2];
        let rho = if c < 1.5 { 2.0 * (qd.max(0.0).sqrt() / 2.0).asinh() } else { c.acosh() };
        Ok(self.t.cos() * rho)
    }

    pub fn as_param_surface(&self) -> ParamSurface<'_> {
        ParamSurface {
            tag: self.tag(),
            dim: 2 * self.d,
            point: Box::new(move |y: &[f64]| self.point(y)),
            normal: Some(Box::new(move |y: &[f64]| self.normal(y))),
        }
    }

    /// `f(y) = -<u p(y), N(y)>`.
    pub fn support(&self, u: &KillingGenerator, y: &[f64]) -> Result<f64> {
        let (p, nv) = self.point_normal(y)?;
        Ok(-ip(self.tag(), u.apply(&p).as_slice(), nv.as_slice()))
    }

    /// Tangential part `u p - f N` of the field along `P_t`.
    pub fn tangential(&self, u: &KillingGenerator, y: &[f64]) -> Result<DVector<f64>> {
        let (p, nv) = self.point_normal(y)?;
        let f = self.support(u, y)?;
        Ok(u.apply(&p) - nv * f)
    }
}

/// Chart data of `f(y) = a_y . y + a_r sqrt(1 + |y|^2)` with
/// `a = u e_last`.
struct Support {
    ay: DVector<f64>,
    ar: f64,
}

impl Support {
    fn new(u: &KillingGenerator) -> Self {
        let n = 2 * u.d + 2;
        let a = u.matrix.column(n - 1).into_owned();
        Self {
            ay: a.rows(0, n - 2).into_owned(),
            ar: -a[n - 2],
        }
    }

    fn value(&self, y: &DVector<f64>) -> f64 {
        self.ay.dot(y) + self.ar * (1.0 + y.norm_squared()).sqrt()
    }

    fn gradient(&self, y: &DVector<f64>) -> DVector<f64> {
        let r = (1.0 + y.norm_squared()).sqrt();
        &self.ay + y * (self.ar / r)
    }

    fn hessian(&self, y: &DVector<f64>) -> DMatrix<f64> {
        let r = (1.0 + y.norm_squared()).sqrt();
        let m = y.len();
        (DMatrix::identity(m, m) / r - y * y.transpose() / (r * r * r)) * self.ar
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Foot {
    pub y: Vec<f64>,
    pub point: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub gradient_norm: f64,
    /// `sqrt(g(X, X))` of the tangential part at the foot.
    pub tangential_norm: f64,
    /// Whether `u` was replaced by `-u` to make the field future-pointing.
    pub flipped: bool,
}

/// Minimises `f` on the chart by damped Newton with Armijo backtracking
/// (gradient steps when Newton is not a descent direction).
pub fn killing_foot(
    u: &KillingGenerator,
    surface: &UmbilicSurface,
    y0: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<Foot> {
    if u.d != surface.d {
        return Err(Error::Invalid(format!("generator for d = {}, surface for d = {}", u.d, surface.d)));
    }
    let report = verify_killing(u, 8, 0);
    if !report.passes(1e-8) {
        return Err(Error::Invalid(format!("not a timelike unitary Killing generator: {report:?}")));
    }
    let f0 = surface.support(u, y0)?;
    let (u, flipped) = if f0 <= -1.0 {
        (u.negated(), true)
    } else if f0 < 1.0 - 1e-9 {
        return Err(Error::Invalid(format!("f = {f0} < 1 at the initial guess")));
    } else {
        (u.clone(), false)
    };
    let s = Support::new(&u);
    let mut y = DVector::from_column_slice(y0);
    let mut f = s.value(&y);
    let mut iterations = 0;
    let mut g = s.gradient(&y);
    while g.norm() > tol && iterations < max_iter {
        iterations += 1;
        let h = s.hessian(&y);
        let newton = h.clone().cholesky().map(|c| -c.solve(&g));
        let dir = match newton {
            Some(d) if d.dot(&g) < 0.0 => d,
            _ => -&g,
        };
        let slope = dir.dot(&g);
        let mut step = 1.0;
        let mut moved = false;
        let noise = 8.0 * f64::EPSILON * f.abs();
        for _ in 0..60 {
            let trial = &y + &dir * step;
            let ft = s.value(&trial);
            if ft <= f + 1e-4 * step * slope + noise {
                y = trial;
                f = ft;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            // rounding floor: accept a pure Newton step once f stalls at 1
            if let Some(d) = h.cholesky().map(|c| -c.solve(&g)) {
                y += d;
                f = s.value(&y);
            }
            g = s.gradient(&y);
            if g.norm() > tol {
                return Err(Error::NonConvergence {
                    iterations,
                    residual: g.norm(),
                });
            }
            break;
        }
        g = s.gradient(&y);
    }
    if g.norm() > tol {
        return Err(Error::NonConvergence {
            iterations,
            residual: g.norm(),
        });
    }
    if f < 1.0 - 1e-8 {
        return Err(Error::Invalid(format!("f = {f} < 1 at the minimum")));
    }
    let ys: Vec<f64> = y.iter().copied().collect();
    let xt = surface.tangential(&u, &ys)?;
    let tn = ip(surface.tag(), xt.as_slice(), xt.as_slice()).abs().sqrt();
    Ok(Foot {
        point: surface.point(&ys)?.as_slice().to_vec(),
        f: surface.support(&u, &ys)?,
        y: ys,
        iterations,
        gradient_norm: g.norm(),
        tangential_norm: tn,
        flipped,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiStartFoot {
    pub foot: Foot,
    pub starts: usize,
    /// Largest chart distance between the feet found from different starts.
    pub spread: f64,
}

/// Runs [`killing_foot`] from `starts` seeded points in `[-2, 2]^{2d}` and
/// returns the foot with the smallest gradient.
pub fn killing_foot_multistart(
    u: &KillingGenerator,
    surface: &UmbilicSurface,
    starts: usize,
    seed: u64,
) -> Result<MultiStartFoot> {
    if starts == 0 {
        return Err(Error::Invalid("need at least one start".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let feet: Vec<Foot> = (0..starts)
        .map(|_| {
            let y0: Vec<f64> = (0..2 * surface.d).map(|_| rng.gen_range(-2.0..2.0)).collect();
            killing_foot(u, surface, &y0, 1e-10, 200)
        })
        .collect::<Result<_>>()?;
    let mut spread = 0.0f64;
    for a in &feet {
        for b in &feet {
            let gap = a.y.iter().zip(&b.y).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
            spread = spread.max(gap);
        }
    }
    let best = feet
        .into_iter()
        .min_by(|a, b| a.gradient_norm.total_cmp(&b.gradient_norm))
        .expect("at least one start");
    Ok(MultiStartFoot {
        foot: best,
        starts,
        spread,
    })
}

/// Gradient and Hessian of `f` in the chart at `y`, evaluated in closed
/// form.
pub fn support_derivatives(u: &KillingGenerator, y: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
    let s = Support::new(u);
    let y = DVector::from_column_slice(y);
    (s.gradient(&y), s.hessian(&y))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProperReport {
    pub c: f64,
    pub c_prime: f64,
    /// Minimum of `f(y) - cosh(c T - c')` over samples with `c T >= c'`.
    pub min_slack: f64,
    pub checked: usize,
    /// Samples closer than `c'/c` to the base point, where the bound is not
    /// asserted.
    pub skipped: usize,
    /// Minimum slack over the skipped samples (informational).
    pub min_slack_skipped: Option<f64>,
}

/// Checks `f(y) >= cosh(c T - c')` with `c = tan t`,
/// `c' = asinh(sqrt(f(y0)^2 - 1))` and `T` the intrinsic distance from
/// `p(y0)` to `p(y)`.
pub fn properness_bound(
    u: &KillingGenerator,
    surface: &UmbilicSurface,
    y0: &[f64],
    samples: &[Vec<f64>],
) -> Result<ProperReport> {
    let mut u = u.clone();
    let mut f0 = surface.support(&u, y0)?;
    if f0 <= -1.0 {
        u = u.negated();
        f0 = -f0;
    }
    let c = surface.convexity();
    let c_prime = (f0 * f0 - 1.0).max(0.0).sqrt().asinh();
    let mut rep = ProperReport {
        c,
        c_prime,
        min_slack: f64::INFINITY,
        checked: 0,
        skipped: 0,
        min_slack_skipped: None,
    };
    for y in samples {
        let tt = surface.distance(y0, y)?;
        let slack = surface.support(&u, y)? - (c * tt - c_prime).cosh();
        if c * tt >= c_prime {
            rep.checked += 1;
            rep.min_slack = rep.min_slack.min(slack);
        } else {
            rep.skipped += 1;
            rep.min_slack_skipped = Some(rep.min_slack_skipped.map_or(slack, |m: f64| m.min(slack)));
        }
    }
    Ok(rep)
}

/// Conjugates of [`standard_j`] by `O(2d) x {Id}` block elements; each still
/// meets `P_t` orthogonally at `y = 0`. Returns the largest tangential
/// residual `|u p - N|` at `y = 0` over `n` samples.
pub fn fiber_sample(surface: &UmbilicSurface, n: usize, seed: u64) -> Result<f64> {
    let d = surface.d;
    let m = 2 * d;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let y0 = vec![0.0; m];
    let (p, nv) = surface.point_normal(&y0)?;
    let mut worst = 0.0f64;
    for _ in 0..n {
        let raw = DMatrix::from_fn(m, m, |_, _| rng.gen_range(-1.0..1.0));
        let o = raw.qr().q();
        let mut g = DMatrix::identity(m + 2, m + 2);
        g.view_mut((0, 0), (m, m)).copy_from(&o);
        let g_inv = g.transpose();
        let u = KillingGenerator::new(d, &g * standard_j(d).matrix * g_inv)?;
        worst = worst.max((u.apply(&p) - &nv).amax());
    }
    Ok(worst)
}
