//! Coordinates, bases, spherical differential operators, finite differences
//! and product quadrature on spheres.
//!
//! Spherical coordinates follow `x = (ρ sinφ cosθ, ρ sinφ sinθ, ρ cosφ)` with
//! φ the polar angle and θ the azimuth. Component triples are always ordered
//! `(ρ, φ, θ)`, and `(e_ρ, e_φ, e_θ)` is a right-handed orthonormal frame.

mod fd;
mod quadrature;

pub use fd::{
    default_gradient_step, default_laplacian_step, fd_gradient, fd_laplacian, fd_scalar_gradient,
};
pub use quadrature::{
    gauss_legendre, gauss_legendre_on, sphere_quadrature, QuadratureNode, QuadratureRule,
};

use crate::error::{Error, Result};
use std::f64::consts::PI;

pub type Vec3 = nalgebra::Vector3<f64>;
pub type Mat3 = nalgebra::Matrix3<f64>;

/// Below this value of `sin φ` the spherical operators refuse to evaluate.
pub const AXIS_THRESHOLD: f64 = 1e-8;

pub(crate) fn ensure_finite(x: &Vec3, what: &'static str) -> Result<()> {
    if x.iter().all(|c| c.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalCoords {
    pub rho: f64,
    pub phi: f64,
    pub theta: f64,
}

impl SphericalCoords {
    pub fn new(rho: f64, phi: f64, theta: f64) -> Result<Self> {
        if !(rho.is_finite() && phi.is_finite() && theta.is_finite()) {
            return Err(Error::NonFinite("spherical coordinates"));
        }
        if rho <= 0.0 {
            return Err(Error::ZeroRadius);
        }
        if !(0.0..=PI).contains(&phi) {
            return Err(Error::Domain(format!("polar angle {phi} outside [0, pi]")));
        }
        let theta = theta.rem_euclid(2.0 * PI);
        let theta = if phi == 0.0 || phi == PI { 0.0 } else { theta };
        Ok(Self { rho, phi, theta })
    }

    pub fn to_cartesian(&self) -> Vec3 {
        let (sp, cp) = self.phi.sin_cos();
        let (st, ct) = self.theta.sin_cos();
        Vec3::new(self.rho * sp * ct, self.rho * sp * st, self.rho * cp)
    }
}

pub fn to_spherical(x: &Vec3) -> Result<SphericalCoords> {
    ensure_finite(x, "point")?;
    let rho = x.norm();
    if rho == 0.0 {
        return Err(Error::ZeroPoint);
    }
    let cyl = x.x.hypot(x.y);
    let phi = cyl.atan2(x.z);
    let theta = if cyl == 0.0 {
        0.0
    } else {
        x.y.atan2(x.x).rem_euclid(2.0 * PI)
    };
    Ok(SphericalCoords { rho, phi, theta })
}

/// Orthonormal frame `(e_ρ, e_φ, e_θ)` at `c`.
pub fn basis_vectors(c: &SphericalCoords) -> (Vec3, Vec3, Vec3) {
    let (sp, cp) = c.phi.sin_cos();
    let (st, ct) = c.theta.sin_cos();
    let e_rho = Vec3::new(sp * ct, sp * st, cp);
    let e_theta = Vec3::new(-st, ct, 0.0);
    let e_phi = Vec3::new(cp * ct, cp * st, -sp);
    (e_rho, e_phi, e_theta)
}

/// Cartesian vector from spherical components `[v_ρ, v_φ, v_θ]`.
pub fn assemble(c: &SphericalCoords, comps: [f64; 3]) -> Vec3 {
    let (er, ep, et) = basis_vectors(c);
    er * comps[0] + ep * comps[1] + et * comps[2]
}

/// Spherical components `[v_ρ, v_φ, v_θ]` of a Cartesian vector.
pub fn decompose(c: &SphericalCoords, v: &Vec3) -> [f64; 3] {
    let (er, ep, et) = basis_vectors(c);
    [v.dot(&er), v.dot(&ep), v.dot(&et)]
}

/// A vector field given by its spherical components.
///
/// `partials` returns `d[k][m] = ∂ v_k / ∂ q_m` for `q = (ρ, φ, θ)`. The
/// default uses central differences; closed-form fields can override it.
pub trait SphericalField: Send + Sync {
    fn components(&self, rho: f64, phi: f64, theta: f64) -> [f64; 3];

    fn partials(&self, c: &SphericalCoords) -> [[f64; 3]; 3] {
        let h = [1e-5 * c.rho, 1e-5, 1e-5];
        let mut d = [[0.0; 3]; 3];
        for m in 0..3 {
            let mut lo = [c.rho, c.phi, c.theta];
            let mut hi = lo;
            lo[m] -= h[m];
            hi[m] += h[m];
            let a = self.components(lo[0], lo[1], lo[2]);
            let b = self.components(hi[0], hi[1], hi[2]);
            for k in 0..3 {
                d[k][m] = (b[k] - a[k]) / (2.0 * h[m]);
            }
        }
        d
    }
}

impl<F> SphericalField for F
where
    F: Fn(f64, f64, f64) -> [f64; 3] + Send + Sync,
{
    fn components(&self, rho: f64, phi: f64, theta: f64) -> [f64; 3] {
        self(rho, phi, theta)
    }
}

fn off_axis(c: &SphericalCoords) -> Result<f64> {
    let s = c.phi.sin();
    if s < AXIS_THRESHOLD {
        Err(Error::AxisSingularity { sin_phi: s })
    } else {
        Ok(s)
    }
}

/// Divergence from the spherical-coordinate formula.
pub fn spherical_div(v: &dyn SphericalField, c: &SphericalCoords) -> Result<f64> {
    let s = off_axis(c)?;
    let cp = c.phi.cos();
    let rho = c.rho;
    let val = v.components(rho, c.phi, c.theta);
    let d = v.partials(c);
    // (1/ρ²)∂ρ(ρ² v_ρ) + (1/(ρ sinφ))∂φ(v_φ sinφ) + (1/(ρ sinφ))∂θ v_θ
    let radial = d[0][0] + 2.0 * val[0] / rho;
    let polar = (d[1][1] * s + val[1] * cp) / (rho * s);
    let azim = d[2][2] / (rho * s);
    Ok(radial + polar + azim)
}

/// Curl from the spherical-coordinate formula, returned as a Cartesian vector.
pub fn spherical_curl(v: &dyn SphericalField, c: &SphericalCoords) -> Result<Vec3> {
    let s = off_axis(c)?;
    let cp = c.phi.cos();
    let rho = c.rho;
    let [_, vp, vt] = v.components(rho, c.phi, c.theta);
    let d = v.partials(c);
    let curl_rho = (d[2][1] * s + vt * cp - d[1][2]) / (rho * s);
    let curl_phi = (d[0][2] / s - (vt + rho * d[2][0])) / rho;
    let curl_theta = (vp + rho * d[1][0] - d[0][1]) / rho;
    Ok(assemble(c, [curl_rho, curl_phi, curl_theta]))
}
