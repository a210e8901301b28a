//! Points, unit normals, projections onto planes, and the drift of `r^2`, `log r` and
//! `x3^2` under a process that is infinitesimally Brownian motion on the plane `n^perp`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerance on `|n|^2 - 1` for a valid unit vector.
pub const UNIT_TOLERANCE: f64 = 1e-12;

/// Default off-surface tolerance, relative to the surface scale.
pub const DEFAULT_SURFACE_TOLERANCE: f64 = 1e-6;

const RETRACTION_MAX_ITERS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Point3 {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl Point3 {
    pub const fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Point3 { x1, x2, x3 }
    }

    pub fn r(&self) -> f64 {
        self.x1.hypot(self.x2)
    }

    pub fn log_r(&self) -> f64 {
        self.r().ln()
    }

    pub fn to_vector(&self) -> Vector3<f64> {
        Vector3::new(self.x1, self.x2, self.x3)
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Point3::new(v[0], v[1], v[2])
    }

    fn require_r(&self) -> Result<f64> {
        let r = self.r();
        if r > 0.0 {
            Ok(r)
        } else {
            Err(Error::Singularity(format!(
                "r = 0 at ({}, {}, {})",
                self.x1, self.x2, self.x3
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnitVector3 {
    n1: f64,
    n2: f64,
    n3: f64,
}

impl UnitVector3 {
    /// Validates `|n|^2 = 1` within [`UNIT_TOLERANCE`].
    pub fn new(n1: f64, n2: f64, n3: f64) -> Result<Self> {
        let s = n1 * n1 + n2 * n2 + n3 * n3;
        if (s - 1.0).abs() <= UNIT_TOLERANCE {
            Ok(UnitVector3 { n1, n2, n3 })
        } else {
            Err(Error::validation(format!("|n|^2 = {s} is not 1")))
        }
    }

    /// Normalizes a non-zero vector.
    pub fn normalize(v1: f64, v2: f64, v3: f64) -> Result<Self> {
        let norm = (v1 * v1 + v2 * v2 + v3 * v3).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::validation("cannot normalize a zero or non-finite vector"));
        }
        Ok(UnitVector3 {
            n1: v1 / norm,
            n2: v2 / norm,
            n3: v3 / norm,
        })
    }

    pub fn e3() -> Self {
        UnitVector3 {
            n1: 0.0,
            n2: 0.0,
            n3: 1.0,
        }
    }

    pub fn n1(&self) -> f64 {
        self.n1
    }

    pub fn n2(&self) -> f64 {
        self.n2
    }

    pub fn n3(&self) -> f64 {
        self.n3
    }

    pub fn to_vector(&self) -> Vector3<f64> {
        Vector3::new(self.n1, self.n2, self.n3)
    }

    /// Rotation by `theta` about the `x3` axis.
    pub fn rotate_z(&self, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        UnitVector3 {
            n1: c * self.n1 - s * self.n2,
            n2: s * self.n1 + c * self.n2,
            n3: self.n3,
        }
    }
}

impl Point3 {
    /// Rotation by `theta` about the `x3` axis.
    pub fn rotate_z(&self, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Point3::new(c * self.x1 - s * self.x2, s * self.x1 + c * self.x2, self.x3)
    }
}

/// `I - n n^T`.
pub fn projection(n: &UnitVector3) -> Matrix3<f64> {
    let v = n.to_vector();
    Matrix3::identity() - v * v.transpose()
}

/// `tr(P H P) / 2`, the drift of a function with Hessian `H`.
pub fn half_trace(p: &Matrix3<f64>, h: &Matrix3<f64>) -> f64 {
    0.5 * (p * h * p).trace()
}

/// Drift of `r^2`: `1 + n3^2`.
pub fn drift_r2(n: &UnitVector3) -> f64 {
    1.0 + n.n3 * n.n3
}

/// Hessian of `log r`; the `x3` row and column vanish.
pub fn hessian_log_r(p: &Point3) -> Result<Matrix3<f64>> {
    let r = p.require_r()?;
    let r2 = r * r;
    let r4 = r2 * r2;
    let h11 = 1.0 / r2 - 2.0 * p.x1 * p.x1 / r4;
    let h12 = -2.0 * p.x1 * p.x2 / r4;
    let h22 = 1.0 / r2 - 2.0 * p.x2 * p.x2 / r4;
    Ok(Matrix3::new(h11, h12, 0.0, h12, h22, 0.0, 0.0, 0.0, 0.0))
}

/// Drift of `log r`.
pub fn drift_log_r(p: &Point3, n: &UnitVector3) -> Result<f64> {
    let r = p.require_r()?;
    let r2 = r * r;
    let (u1, u2) = (p.x1 / r, p.x2 / r);
    let cross = 2.0 * u1 * u2 * n.n1 * n.n2 / r2;
    let diag = (1.0 - 2.0 * u1 * u1) * (1.0 - n.n1 * n.n1) + (1.0 - 2.0 * u2 * u2) * (1.0 - n.n2 * n.n2);
    Ok(cross + diag / (2.0 * r2))
}

/// Drift of `x3^2`: `1 - n3^2`.
pub fn drift_x3_sq(n: &UnitVector3) -> f64 {
    n.n1 * n.n1 + n.n2 * n.n2
}

/// `gamma / (2 r^2) - |beta|`, non-negative up to round-off.
pub fn beta_gamma_inequality_gap(p: &Point3, n: &UnitVector3) -> Result<f64> {
    let beta = drift_log_r(p, n)?;
    let r = p.r();
    Ok(drift_x3_sq(n) / (2.0 * r * r) - beta.abs())
}

/// Relative distance of `p` from the catenoid `r = a cosh(x3/a)`.
pub fn catenoid_residual(p: &Point3, a: f64) -> f64 {
    (p.r() / (p.x3 / a).cosh() - a).abs()
}

/// Unit normal of the catenoid `r = a cosh(x3/a)` at (or near) `p`.
pub fn catenoid_normal(p: &Point3, a: f64, tolerance: f64) -> Result<UnitVector3> {
    let r = p.require_r()?;
    let res = catenoid_residual(p, a);
    if !(res <= tolerance) {
        return Err(Error::validation(format!(
            "point at distance {res:e} from the catenoid a = {a} (tolerance {tolerance:e})"
        )));
    }
    UnitVector3::normalize(p.x1 / r, p.x2 / r, -(p.x3 / a).sinh())
}

/// Point of the catenoid at height `x3` and angle `theta`.
pub fn catenoid_point(a: f64, x3: f64, theta: f64) -> Point3 {
    let r = a * (x3 / a).cosh();
    Point3::new(r * theta.cos(), r * theta.sin(), x3)
}

/// Point of the upper catenoid end at radius `r >= a` and angle `theta`.
pub fn catenoid_point_at_radius(a: f64, r: f64, theta: f64) -> Result<Point3> {
    if r < a {
        return Err(Error::domain(format!("radius {r} below the catenoid waist {a}")));
    }
    let x3 = a * (r / a).acosh();
    Ok(Point3::new(r * theta.cos(), r * theta.sin(), x3))
}

/// Area of one catenoid end inside `{r <= rho}`: `pi a^2 (v + sinh v cosh v)`, `v = arccosh(rho/a)`.
pub fn catenoid_area(rho: f64, a: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::validation(format!("catenoid scale a = {a} must be positive")));
    }
    if rho < a {
        return Err(Error::domain(format!("rho = {rho} below the waist radius {a}")));
    }
    let v = (rho / a).acosh();
    Ok(std::f64::consts::PI * a * a * (v + v.sinh() * v.cosh()))
}

/// Closest point on the catenoid, found in the meridian plane through `p`.
pub fn catenoid_retract(p: &Point3, a: f64) -> Result<Point3> {
    let rho = p.require_r()?;
    let z = p.x3;
    let mut s = z / a;
    for _ in 0..RETRACTION_MAX_ITERS {
        let (sh, ch) = (s.sinh(), s.cosh());
        let radial = a * ch - rho;
        let axial = a * s - z;
        let g1 = a * sh * radial + a * axial;
        let g2 = a * ch * radial + a * a * sh * sh + a * a;
        let ds = g1 / g2;
        s -= ds;
        if ds.abs() <= 1e-15 * (1.0 + s.abs()) {
            break;
        }
    }
    let r_new = a * s.cosh();
    Ok(Point3::new(p.x1 / rho * r_new, p.x2 / rho * r_new, a * s))
}

/// `|x1 sin(x3/h) - x2 cos(x3/h)|`, zero exactly on the helicoid.
pub fn helicoid_residual(p: &Point3, pitch: f64) -> f64 {
    let v = p.x3 / pitch;
    (p.x1 * v.sin() - p.x2 * v.cos()).abs()
}

/// Unit normal of the helicoid `(u cos v, u sin v, h v)` at `p`.
pub fn helicoid_normal(p: &Point3, pitch: f64, tolerance: f64) -> Result<UnitVector3> {
    let r = p.require_r()?;
    let res = helicoid_residual(p, pitch);
    if !(res <= tolerance * pitch.max(r)) {
        return Err(Error::validation(format!(
            "point at distance {res:e} from the helicoid of pitch {pitch}"
        )));
    }
    UnitVector3::normalize(pitch * p.x2 / r, -pitch * p.x1 / r, r)
}

/// Closest point on the helicoid near `p`.
pub fn helicoid_retract(p: &Point3, pitch: f64) -> Point3 {
    let h = pitch;
    let mut v = p.x3 / h;
    for _ in 0..RETRACTION_MAX_ITERS {
        let (s, c) = v.sin_cos();
        let u = p.x1 * c + p.x2 * s;
        let du = -p.x1 * s + p.x2 * c;
        let g1 = -2.0 * u * du + 2.0 * h * (h * v - p.x3);
        let g2 = -2.0 * du * du + 2.0 * u * u + 2.0 * h * h;
        let dv = g1 / g2;
        v -= dv;
        if dv.abs() <= 1e-15 * (1.0 + v.abs()) {
            break;
        }
    }
    let (s, c) = v.sin_cos();
    let u = p.x1 * c + p.x2 * s;
    Point3::new(u * c, u * s, h * v)
}

type ControlFn = dyn Fn(&Point3) -> Result<UnitVector3> + Send + Sync;

/// User-supplied adapted control: sees the current point only.
#[derive(Clone)]
pub struct CustomControl {
    pub name: String,
    rule: Arc<ControlFn>,
}

impl CustomControl {
    pub fn new(name: impl Into<String>, rule: impl Fn(&Point3) -> Result<UnitVector3> + Send + Sync + 'static) -> Self {
        CustomControl {
            name: name.into(),
            rule: Arc::new(rule),
        }
    }
}

impl fmt::Debug for CustomControl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomControl").field("name", &self.name).finish()
    }
}

impl PartialEq for CustomControl {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && Arc::ptr_eq(&self.rule, &other.rule)
    }
}

/// Rule producing the kernel vector `n_t` of the diffusion at the current point.
#[derive(Debug, Clone, PartialEq)]
pub enum NormalStrategy {
    /// The plane `{x3 = height}`.
    HorizontalPlane {
        height: f64,
    },
    /// The plane `{x . (cos phi, sin phi, 0) = offset}`.
    VerticalPlane {
        phi: f64,
        offset: f64,
    },
    Catenoid {
        a: f64,
        tolerance: f64,
    },
    Helicoid {
        pitch: f64,
        tolerance: f64,
    },
    /// `n = e_r`: motion in the tangent plane of the vertical cylinder through the point.
    RadialControl,
    Custom(CustomControl),
}

impl NormalStrategy {
    pub fn horizontal_plane(height: f64) -> Self {
        NormalStrategy::HorizontalPlane { height }
    }

    pub fn vertical_plane(phi: f64, offset: f64) -> Self {
        NormalStrategy::VerticalPlane { phi, offset }
    }

    /// Catenoid of waist `a`, checked against the parametrized normal on a sample grid.
    pub fn catenoid(a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::validation(format!("catenoid scale a = {a} must be positive")));
        }
        let s = NormalStrategy::Catenoid {
            a,
            tolerance: DEFAULT_SURFACE_TOLERANCE * a,
        };
        for i in -8..=8 {
            for j in 0..6 {
                let (t, th) = (i as f64 * 0.5, j as f64);
                let (sh, ch) = (t.sinh(), t.cosh());
                // X(t, th) = a (cosh t cos th, cosh t sin th, t)
                let xt = Vector3::new(sh * th.cos(), sh * th.sin(), 1.0);
                let xth = Vector3::new(-ch * th.sin(), ch * th.cos(), 0.0);
                s.check_grid_normal(&catenoid_point(a, a * t, th), xt.cross(&xth))?;
            }
        }
        Ok(s)
    }

    /// Helicoid `(u cos v, u sin v, pitch v)`, checked against the parametrized normal.
    pub fn helicoid(pitch: f64) -> Result<Self> {
        if !(pitch > 0.0 && pitch.is_finite()) {
            return Err(Error::validation(format!("helicoid pitch {pitch} must be positive")));
        }
        let s = NormalStrategy::Helicoid {
            pitch,
            tolerance: DEFAULT_SURFACE_TOLERANCE,
        };
        for i in 1..=8 {
            for j in -6..=6 {
                let (u, v) = (i as f64 * 0.7, j as f64 * 0.9);
                let p = Point3::new(u * v.cos(), u * v.sin(), pitch * v);
                let xu = Vector3::new(v.cos(), v.sin(), 0.0);
                let xv = Vector3::new(-u * v.sin(), u * v.cos(), pitch);
                s.check_grid_normal(&p, xu.cross(&xv))?;
            }
        }
        Ok(s)
    }

    fn check_grid_normal(&self, p: &Point3, reference: Vector3<f64>) -> Result<()> {
        let n = self.normal_at(p)?.to_vector();
        let cos = n.dot(&reference.normalize()).abs();
        if (cos - 1.0).abs() > 1e-10 {
            return Err(Error::validation(format!(
                "normal field disagrees with the surface at {p:?}"
            )));
        }
        Ok(())
    }

    pub fn custom(
        name: impl Into<String>,
        rule: impl Fn(&Point3) -> Result<UnitVector3> + Send + Sync + 'static,
    ) -> Self {
        NormalStrategy::Custom(CustomControl::new(name, rule))
    }

    pub fn name(&self) -> String {
        match self {
            NormalStrategy::HorizontalPlane { .. } => "horizontal_plane".into(),
            NormalStrategy::VerticalPlane { .. } => "vertical_plane".into(),
            NormalStrategy::Catenoid { .. } => "catenoid".into(),
            NormalStrategy::Helicoid { .. } => "helicoid".into(),
            NormalStrategy::RadialControl => "radial_control".into(),
            NormalStrategy::Custom(c) => c.name.clone(),
        }
    }

    /// `n_t` at `p`.
    pub fn normal_at(&self, p: &Point3) -> Result<UnitVector3> {
        match self {
            NormalStrategy::HorizontalPlane { .. } => Ok(UnitVector3::e3()),
            NormalStrategy::VerticalPlane { phi, .. } => UnitVector3::normalize(phi.cos(), phi.sin(), 0.0),
            NormalStrategy::Catenoid { a, tolerance } => catenoid_normal(p, *a, *tolerance),
            NormalStrategy::Helicoid { pitch, tolerance } => helicoid_normal(p, *pitch, *tolerance),
            NormalStrategy::RadialControl => {
                let r = p.require_r()?;
                UnitVector3::normalize(p.x1 / r, p.x2 / r, 0.0)
            }
            NormalStrategy::Custom(c) => (c.rule)(p),
        }
    }

    /// Whether the strategy describes a fixed surface that retraction can project onto.
    pub fn has_surface(&self) -> bool {
        !matches!(self, NormalStrategy::RadialControl | NormalStrategy::Custom(_))
    }

    /// Distance-like residual of `p` from the strategy's surface (0 for controls).
    pub fn surface_residual(&self, p: &Point3) -> f64 {
        match self {
            NormalStrategy::HorizontalPlane { height } => (p.x3 - height).abs(),
            NormalStrategy::VerticalPlane { phi, offset } => (p.x1 * phi.cos() + p.x2 * phi.sin() - offset).abs(),
            NormalStrategy::Catenoid { a, .. } => catenoid_residual(p, *a),
            NormalStrategy::Helicoid { pitch, .. } => helicoid_residual(p, *pitch),
            _ => 0.0,
        }
    }

    /// Closest-point projection onto the strategy's surface; identity for controls.
    pub fn retract(&self, p: &Point3) -> Result<Point3> {
        Ok(match self {
            NormalStrategy::HorizontalPlane { height } => Point3::new(p.x1, p.x2, *height),
            NormalStrategy::VerticalPlane { phi, offset } => {
                let (s, c) = phi.sin_cos();
                let d = p.x1 * c + p.x2 * s - offset;
                Point3::new(p.x1 - d * c, p.x2 - d * s, p.x3)
            }
            NormalStrategy::Catenoid { a, .. } => catenoid_retract(p, *a)?,
            NormalStrategy::Helicoid { pitch, .. } => helicoid_retract(p, *pitch),
            _ => *p,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit(a: f64, b: f64, c: f64) -> UnitVector3 {
        UnitVector3::normalize(a, b, c).unwrap()
    }

    #[test]
    fn projection_examples() {
        assert_eq!(
            projection(&UnitVector3::e3()),
            Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, 0.0))
        );
        assert_eq!(
            projection(&UnitVector3::new(1.0, 0.0, 0.0).unwrap()),
            Matrix3::from_diagonal(&Vector3::new(0.0, 1.0, 1.0))
        );
        let n = unit(0.3, -1.2, 0.7);
        let p = projection(&n);
        assert!((p * p - p).abs().max() < 1e-12);
        assert!((p * n.to_vector()).abs().max() < 1e-12);
        assert_relative_eq!(p.trace(), 2.0, epsilon = 1e-12);
        assert!(UnitVector3::new(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn drift_r2_examples() {
        assert_eq!(drift_r2(&UnitVector3::e3()), 2.0);
        assert_eq!(drift_r2(&UnitVector3::new(0.0, 1.0, 0.0).unwrap()), 1.0);
        let n = unit(0.4, 0.1, -0.8);
        let h = Matrix3::from_diagonal(&Vector3::new(2.0, 2.0, 0.0));
        assert!((drift_r2(&n) - half_trace(&projection(&n), &h)).abs() < 1e-12);
    }

    #[test]
    fn hessian_examples() {
        let h = hessian_log_r(&Point3::new(1.0, 0.0, 0.0)).unwrap();
        assert_eq!((h[(0, 0)], h[(1, 1)], h[(0, 1)]), (-1.0, 1.0, 0.0));
        let h = hessian_log_r(&Point3::new(0.0, 2.0, 0.0)).unwrap();
        assert_relative_eq!(h[(0, 0)], 0.25);
        assert_relative_eq!(h[(1, 1)], -0.25);
        let h = hessian_log_r(&Point3::new(0.3, -1.7, 2.0)).unwrap();
        assert!((h[(0, 0)] + h[(1, 1)]).abs() < 1e-15);
        assert!(matches!(
            hessian_log_r(&Point3::new(0.0, 0.0, 1.0)),
            Err(Error::Singularity(_))
        ));
    }

    #[test]
    fn drift_log_r_examples() {
        let n = unit(0.6, 0.3, 0.5);
        let r = 2.5;
        let beta = drift_log_r(&Point3::new(r, 0.0, 1.0), &n).unwrap();
        assert_relative_eq!(
            beta,
            (n.n1() * n.n1() - n.n2() * n.n2()) / (2.0 * r * r),
            epsilon = 1e-15
        );
        assert_eq!(
            drift_log_r(&Point3::new(1.0, 0.0, 0.0), &UnitVector3::e3()).unwrap(),
            0.0
        );
        assert_relative_eq!(
            drift_log_r(&Point3::new(1.0, 0.0, 0.0), &UnitVector3::new(0.0, 1.0, 0.0).unwrap()).unwrap(),
            -0.5
        );
    }

    #[test]
    fn drift_x3_sq_and_gap_examples() {
        assert_eq!(drift_x3_sq(&UnitVector3::e3()), 0.0);
        assert_eq!(drift_x3_sq(&UnitVector3::new(0.0, 1.0, 0.0).unwrap()), 1.0);
        let p = Point3::new(1.0, 0.0, 0.0);
        assert!(
            beta_gamma_inequality_gap(&p, &UnitVector3::new(0.0, 1.0, 0.0).unwrap())
                .unwrap()
                .abs()
                < 1e-15
        );
        assert_eq!(beta_gamma_inequality_gap(&p, &UnitVector3::e3()).unwrap(), 0.0);
    }

    #[test]
    fn catenoid_normal_examples() {
        let n = catenoid_normal(&Point3::new(1.0, 0.0, 0.0), 1.0, 1e-6).unwrap();
        assert_eq!((n.n1(), n.n2(), n.n3()), (1.0, 0.0, 0.0));
        let p = Point3::new(1f64.cosh(), 0.0, 1.0);
        let n = catenoid_normal(&p, 1.0, 1e-6).unwrap();
        assert_relative_eq!(n.n3() * n.n3(), 1f64.tanh().powi(2), epsilon = 1e-15);
        assert!((n.n3() * n.n3() - 0.5800).abs() < 1e-4);
        assert_relative_eq!(drift_x3_sq(&n), 1.0 / (p.r() * p.r()), epsilon = 1e-15);
        assert!(catenoid_normal(&Point3::new(2.0, 0.0, 0.0), 1.0, 1e-6).is_err());
    }

    #[test]
    fn catenoid_area_examples() {
        assert_eq!(catenoid_area(1.0, 1.0).unwrap(), 0.0);
        let ratio = catenoid_area(100.0, 1.0).unwrap() / (std::f64::consts::PI * 1e4);
        assert!((ratio - 1.0005).abs() < 1e-4, "{ratio}");
        let far = catenoid_area(1e8, 1.0).unwrap() / (std::f64::consts::PI * 1e16);
        assert!((far - 1.0).abs() < 1e-12);
        assert!(matches!(catenoid_area(0.5, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn retractions_land_on_surface() {
        let cat = NormalStrategy::catenoid(1.3).unwrap();
        let hel = NormalStrategy::helicoid(0.8).unwrap();
        for i in 0..40 {
            let t = i as f64 * 0.37;
            let p = catenoid_point(1.3, 1.3 * (t - 6.0), t);
            let off = Point3::new(p.x1 + 1e-3, p.x2 - 2e-3, p.x3 + 1e-3);
            let q = cat.retract(&off).unwrap();
            assert!(cat.surface_residual(&q) < 1e-12, "{q:?}");
            let hp = Point3::new((t + 0.5) * t.cos(), (t + 0.5) * t.sin(), 0.8 * t);
            let q = hel.retract(&Point3::new(hp.x1 + 1e-3, hp.x2, hp.x3 - 1e-3)).unwrap();
            assert!(hel.surface_residual(&q) < 1e-12);
            hel.normal_at(&q).unwrap();
        }
    }

    #[test]
    fn strategies_return_unit_vectors() {
        let p = Point3::new(3.0, -1.0, 0.0);
        for s in [
            NormalStrategy::horizontal_plane(0.0),
            NormalStrategy::vertical_plane(0.4, 0.0),
            NormalStrategy::RadialControl,
        ] {
            let n = s.normal_at(&p).unwrap().to_vector();
            assert!((n.norm_squared() - 1.0).abs() < 1e-12);
        }
        let rad = NormalStrategy::RadialControl.normal_at(&p).unwrap();
        assert!(drift_log_r(&p, &rad).unwrap() > 0.0);
    }
}
