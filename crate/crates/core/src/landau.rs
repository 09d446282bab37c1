//! Exact Landau solutions `(U^b, P^b)` of the stationary Navier–Stokes
//! equations with a point force `b δ` at the origin.
//!
//! For `b = (0, 0, β)` the solution is axisymmetric and, writing `y` for the
//! point, `r = |y|` and `D = a r − y₃`,
//!
//! ```text
//! P = 4 (a y₃ − r) / (r D²),      U = (P / 2) y + 2 e₃ / D,
//! ```
//!
//! which is the spherical-component closed form rewritten without the
//! `1 / sin φ` of the basis vector `e_φ`. Derivatives of both expressions are
//! taken by hand below. General `b` is obtained by rotating this frame.

use crate::error::{Error, Result};
use crate::fields::{ScalarField, VectorField};
use crate::geometry::{ensure_finite, Mat3, Vec3};
use std::f64::consts::PI;
use std::fmt;

/// The internal parameter `a ∈ (1, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LandauParam {
    Finite(f64),
    Infinite,
}

impl LandauParam {
    pub fn value(&self) -> f64 {
        match self {
            LandauParam::Finite(a) => *a,
            LandauParam::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for LandauParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LandauParam::Finite(a) => write!(f, "{a}"),
            LandauParam::Infinite => write!(f, "inf"),
        }
    }
}

/// Switch to the asymptotic series above this `a` (the closed form loses
/// about `3 ε a³` relative accuracy to cancellation).
const SERIES_THRESHOLD: f64 = 8.0;

/// `β(a) / 16π` for large `a`: `1/a + Σ_{k≥1} (4/3 − 1/(2k+3)) a^{−(2k+1)}`.
fn reduced_beta_series(a: f64) -> f64 {
    let inv = 1.0 / a;
    let inv2 = inv * inv;
    let mut term = inv;
    let mut sum = inv;
    for k in 1..60 {
        term *= inv2;
        let c = 4.0 / 3.0 - 1.0 / (2 * k + 3) as f64;
        let add = c * term;
        sum += add;
        if add.abs() < 1e-18 * sum {
            break;
        }
    }
    sum
}

fn reduced_beta_series_derivative(a: f64) -> f64 {
    let inv = 1.0 / a;
    let inv2 = inv * inv;
    let mut term = inv2;
    let mut sum = -inv2;
    for k in 1..60 {
        term *= inv2;
        let c = (4.0 / 3.0 - 1.0 / (2 * k + 3) as f64) * (2 * k + 1) as f64;
        let add = c * term;
        sum -= add;
        if add.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

fn reduced_beta(a: f64) -> f64 {
    if a > SERIES_THRESHOLD {
        reduced_beta_series(a)
    } else {
        let a2 = a * a;
        a + 0.5 * a2 * ((a - 1.0) / (a + 1.0)).ln() + 4.0 * a / (3.0 * (a2 - 1.0))
    }
}

fn reduced_beta_derivative(a: f64) -> f64 {
    if a > SERIES_THRESHOLD {
        reduced_beta_series_derivative(a)
    } else {
        let a2 = a * a;
        let m = a2 - 1.0;
        1.0 + a * ((a - 1.0) / (a + 1.0)).ln() + a2 / m - 4.0 * (a2 + 1.0) / (3.0 * m * m)
    }
}

/// `β(a) = 16π [a + ½ a² log((a−1)/(a+1)) + 4a / (3(a²−1))]`.
pub fn beta_of_a(a: LandauParam) -> Result<f64> {
    match a {
        LandauParam::Infinite => Ok(0.0),
        LandauParam::Finite(a) => {
            if !a.is_finite() {
                return Err(Error::NonFinite("a"));
            }
            if a <= 1.0 {
                return Err(Error::Domain(format!("a = {a} must exceed 1")));
            }
            Ok(16.0 * PI * reduced_beta(a))
        }
    }
}

const A_BRACKET_LO: f64 = 1.0 + 1e-12;
const A_BRACKET_HI: f64 = 1e8;

/// Inverse of [`beta_of_a`]: bisection on the strictly decreasing map, then
/// two guarded Newton steps.
pub fn a_of_beta(beta: f64) -> Result<LandauParam> {
    if !beta.is_finite() {
        return Err(Error::NonFinite("beta"));
    }
    if beta < 0.0 {
        return Err(Error::Domain(format!("beta = {beta} must be non-negative")));
    }
    let target = beta / (16.0 * PI);
    if beta == 0.0 || target < reduced_beta(A_BRACKET_HI) {
        return Ok(LandauParam::Infinite);
    }
    if target > reduced_beta(A_BRACKET_LO) {
        return Err(Error::Domain(format!(
            "beta = {beta} exceeds the supported range"
        )));
    }
    // bisect in log(a − 1), which spreads both ends of the bracket evenly
    let (mut lo, mut hi) = ((A_BRACKET_LO - 1.0).ln(), (A_BRACKET_HI - 1.0).ln());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if reduced_beta(1.0 + mid.exp()) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) < 1e-14 {
            break;
        }
    }
    let (a_lo, a_hi) = (1.0 + lo.exp(), 1.0 + hi.exp());
    let mut a = 0.5 * (a_lo + a_hi);
    for _ in 0..2 {
        let step = (reduced_beta(a) - target) / reduced_beta_derivative(a);
        let next = a - step;
        if next.is_finite() && next > 1.0 && (next - a).abs() <= (a_hi - a_lo).max(1e-15 * a) {
            a = next;
        }
    }
    Ok(LandauParam::Finite(a))
}

/// Minimal rotation taking `e_z` to `dir` (unit); π about `e_x` for `−e_z`.
fn rotation_to(dir: &Vec3) -> Mat3 {
    let c = dir.z;
    if 1.0 + c <= 1e-15 {
        return Mat3::from_diagonal(&Vec3::new(1.0, -1.0, -1.0));
    }
    let k = Vec3::z().cross(dir);
    let kx = k.cross_matrix();
    // (1 − c)/|k|² equals 1/(1 + c) without the cancellation near −e_z
    let f = if c >= 0.0 {
        1.0 / (1.0 + c)
    } else {
        (1.0 - c) / k.norm_squared()
    };
    Mat3::identity() + kx + kx * kx * f
}

/// Closed-form axis-aligned values `(U_ρ, U_φ, P)`; `U_θ ≡ 0`.
pub fn landau_axis_eval(a: LandauParam, rho: f64, phi: f64) -> Result<(f64, f64, f64)> {
    if !(rho.is_finite() && phi.is_finite()) {
        return Err(Error::NonFinite("spherical coordinates"));
    }
    if rho <= 0.0 {
        return Err(Error::ZeroRadius);
    }
    let a = match a {
        LandauParam::Infinite => return Ok((0.0, 0.0, 0.0)),
        LandauParam::Finite(a) if a > 1.0 => a,
        LandauParam::Finite(a) => return Err(Error::Domain(format!("a = {a} must exceed 1"))),
    };
    let (s, c) = phi.sin_cos();
    let d = a - c;
    let u_rho = 2.0 / rho * ((a * a - 1.0) / (d * d) - 1.0);
    let u_phi = 2.0 / rho * (-s / d);
    let p = 4.0 * (a * c - 1.0) / (rho * rho * d * d);
    Ok((u_rho, u_phi, p))
}

/// Value and derivatives of the axis-aligned solution at one point.
#[derive(Debug, Clone, Copy)]
struct AxisJet {
    u: Vec3,
    p: f64,
    grad_u: Mat3,
    grad_p: Vec3,
    lap_u: Vec3,
}

fn sym(a: &Vec3, b: &Vec3) -> Mat3 {
    a * b.transpose() + b * a.transpose()
}

fn axis_jet(a: f64, y: &Vec3) -> AxisJet {
    let r = y.norm();
    let n = y / r;
    let e3 = Vec3::z();
    let proj = Mat3::identity() - n * n.transpose();
    let nn = n * n.transpose();

    let d = a * r - y.z;
    let grad_d = n * a - e3;
    let hess_d = proj * (a / r);

    let num = a * y.z - r;
    let grad_num = e3 * a - n;
    let hess_num = -proj / r;

    let f2 = 1.0 / r;
    let grad_f2 = -n / (r * r);
    let hess_f2 = (nn * 3.0 - Mat3::identity()) / (r * r * r);

    let d2 = d * d;
    let f3 = 1.0 / d2;
    let grad_f3 = -grad_d * (2.0 / (d2 * d));
    let hess_f3 = grad_d * grad_d.transpose() * (6.0 / (d2 * d2)) - hess_d * (2.0 / (d2 * d));

    let p = 4.0 * num * f2 * f3;
    let grad_p = (grad_num * (f2 * f3) + grad_f2 * (num * f3) + grad_f3 * (num * f2)) * 4.0;
    let hess_p = (hess_num * (f2 * f3)
        + hess_f2 * (num * f3)
        + hess_f3 * (num * f2)
        + sym(&grad_num, &grad_f2) * f3
        + sym(&grad_num, &grad_f3) * f2
        + sym(&grad_f2, &grad_f3) * num)
        * 4.0;
    let lap_p = hess_p.trace();

    let g = 1.0 / d;
    let grad_g = -grad_d / d2;
    let lap_g = (grad_d.norm_squared() * 2.0 / (d2 * d)) - hess_d.trace() / d2;

    let u = y * (0.5 * p) + e3 * (2.0 * g);
    let grad_u =
        y * grad_p.transpose() * 0.5 + Mat3::identity() * (0.5 * p) + e3 * grad_g.transpose() * 2.0;
    let lap_u = y * (0.5 * lap_p) + grad_p + e3 * (2.0 * lap_g);
    AxisJet {
        u,
        p,
        grad_u,
        grad_p,
        lap_u,
    }
}

/// A Landau solution for a given momentum-flux vector `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LandauSolution {
    b: Vec3,
    beta: f64,
    a: LandauParam,
    rotation: Mat3,
}

impl LandauSolution {
    pub fn new(b: Vec3) -> Result<Self> {
        ensure_finite(&b, "b")?;
        let beta = b.norm();
        let a = a_of_beta(beta)?;
        let rotation = if beta == 0.0 {
            Mat3::identity()
        } else {
            rotation_to(&(b / beta))
        };
        Ok(Self {
            b,
            beta,
            a,
            rotation,
        })
    }

    /// Solution with `b = (0, 0, β)`.
    pub fn axial(beta: f64) -> Result<Self> {
        Self::new(Vec3::new(0.0, 0.0, beta))
    }

    /// `b = β · dir / |dir|`.
    pub fn with_direction(beta: f64, dir: &Vec3) -> Result<Self> {
        ensure_finite(dir, "direction")?;
        let n = dir.norm();
        if n == 0.0 {
            return Err(Error::Domain("direction vector is zero".into()));
        }
        Self::new(dir * (beta / n))
    }

    pub fn b(&self) -> Vec3 {
        self.b
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn a(&self) -> LandauParam {
        self.a
    }

    pub fn rotation(&self) -> &Mat3 {
        &self.rotation
    }

    /// True when `b` is parallel to `+e_z` (the frame is the identity).
    pub fn is_axial(&self) -> bool {
        self.rotation == Mat3::identity()
    }

    fn jet(&self, x: &Vec3) -> Result<Option<AxisJet>> {
        ensure_finite(x, "point")?;
        if x.norm() == 0.0 {
            return Err(Error::ZeroPoint);
        }
        match self.a {
            LandauParam::Infinite => Ok(None),
            LandauParam::Finite(a) => {
                let y = self.rotation.transpose() * x;
                Ok(Some(axis_jet(a, &y)))
            }
        }
    }

    pub fn eval(&self, x: &Vec3) -> Result<(Vec3, f64)> {
        Ok(match self.jet(x)? {
            None => (Vec3::zeros(), 0.0),
            Some(j) => (self.rotation * j.u, j.p),
        })
    }

    /// `(∇U, ∇P)` with `(∇U)_{ij} = ∂_j U^i`.
    pub fn gradient(&self, x: &Vec3) -> Result<(Mat3, Vec3)> {
        Ok(match self.jet(x)? {
            None => (Mat3::zeros(), Vec3::zeros()),
            Some(j) => (
                self.rotation * j.grad_u * self.rotation.transpose(),
                self.rotation * j.grad_p,
            ),
        })
    }

    pub fn laplacian(&self, x: &Vec3) -> Result<Vec3> {
        Ok(match self.jet(x)? {
            None => Vec3::zeros(),
            Some(j) => self.rotation * j.lap_u,
        })
    }

    /// `−ΔU + (U·∇)U + ∇P` from the analytic derivatives.
    pub fn ns_residual(&self, x: &Vec3) -> Result<Vec3> {
        Ok(match self.jet(x)? {
            None => Vec3::zeros(),
            Some(j) => self.rotation * (-j.lap_u + j.grad_u * j.u + j.grad_p),
        })
    }

    pub fn velocity(&self) -> LandauVelocity {
        LandauVelocity(self.clone())
    }

    pub fn pressure(&self) -> LandauPressure {
        LandauPressure(self.clone())
    }
}

/// `max_{|x|=1} |U^b(x)|`, i.e. the smallest admissible `C₁*` for `U^b`.
///
/// Sampled on a Gauss–Legendre sphere rule plus both poles; the axial
/// maximum sits at a pole.
pub fn measured_c1_star(sol: &LandauSolution) -> f64 {
    let rule = crate::geometry::QuadratureRule::sphere(1.0, 48, 24).expect("valid orders");
    let b_hat = if sol.beta > 0.0 {
        sol.b / sol.beta
    } else {
        Vec3::z()
    };
    rule.nodes()
        .iter()
        .map(|n| n.point)
        .chain([b_hat, -b_hat])
        .map(|x| sol.eval(&x).map(|(u, _)| u.norm()).unwrap_or(0.0))
        .fold(0.0, f64::max)
}

pub fn landau_eval(sol: &LandauSolution, x: &Vec3) -> Result<(Vec3, f64)> {
    sol.eval(x)
}

pub fn landau_gradient(sol: &LandauSolution, x: &Vec3) -> Result<(Mat3, Vec3)> {
    sol.gradient(x)
}

pub fn ns_residual(sol: &LandauSolution, x: &Vec3) -> Result<Vec3> {
    sol.ns_residual(x)
}

/// `U^b` as a [`VectorField`] with analytic derivatives.
#[derive(Debug, Clone)]
pub struct LandauVelocity(pub LandauSolution);

impl VectorField for LandauVelocity {
    fn value(&self, x: &Vec3) -> Result<Vec3> {
        Ok(self.0.eval(x)?.0)
    }
    fn gradient(&self, x: &Vec3) -> Result<Mat3> {
        Ok(self.0.gradient(x)?.0)
    }
    fn laplacian(&self, x: &Vec3) -> Result<Vec3> {
        self.0.laplacian(x)
    }
}

/// `P^b` as a [`ScalarField`].
#[derive(Debug, Clone)]
pub struct LandauPressure(pub LandauSolution);

impl ScalarField for LandauPressure {
    fn value(&self, x: &Vec3) -> Result<f64> {
        Ok(self.0.eval(x)?.1)
    }
    fn gradient(&self, x: &Vec3) -> Result<Vec3> {
        Ok(self.0.gradient(x)?.1)
    }
}
