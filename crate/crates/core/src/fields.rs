//! Evaluable fields and the `(u, B, p)` bundle the flux and residual
//! machinery works on.

use crate::error::{Error, Result};
use crate::geometry::{
    default_gradient_step, default_laplacian_step, fd_gradient, fd_laplacian, fd_scalar_gradient,
    Mat3, Vec3,
};
use std::fmt;
use std::sync::Arc;

/// A vector field evaluable away from the origin.
///
/// Derivatives default to central differences; closed-form fields override
/// them. `gradient(x)[(i, j)] = ∂_j f^i`.
pub trait VectorField: Send + Sync {
    fn value(&self, x: &Vec3) -> Result<Vec3>;

    fn gradient(&self, x: &Vec3) -> Result<Mat3> {
        fd_gradient(|y| self.value(y), x, default_gradient_step(x))
    }

    fn laplacian(&self, x: &Vec3) -> Result<Vec3> {
        fd_laplacian(|y| self.value(y), x, default_laplacian_step(x))
    }
}

pub trait ScalarField: Send + Sync {
    fn value(&self, x: &Vec3) -> Result<f64>;

    fn gradient(&self, x: &Vec3) -> Result<Vec3> {
        fd_scalar_gradient(|y| self.value(y), x, default_gradient_step(x))
    }
}

pub type SharedVector = Arc<dyn VectorField>;
pub type SharedScalar = Arc<dyn ScalarField>;

#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroField;

impl VectorField for ZeroField {
    fn value(&self, _x: &Vec3) -> Result<Vec3> {
        Ok(Vec3::zeros())
    }
    fn gradient(&self, _x: &Vec3) -> Result<Mat3> {
        Ok(Mat3::zeros())
    }
    fn laplacian(&self, _x: &Vec3) -> Result<Vec3> {
        Ok(Vec3::zeros())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ConstantScalar(pub f64);

impl ScalarField for ConstantScalar {
    fn value(&self, _x: &Vec3) -> Result<f64> {
        Ok(self.0)
    }
    fn gradient(&self, _x: &Vec3) -> Result<Vec3> {
        Ok(Vec3::zeros())
    }
}

/// `f(x) = A x`.
#[derive(Debug, Clone, Copy)]
pub struct LinearField(pub Mat3);

impl VectorField for LinearField {
    fn value(&self, x: &Vec3) -> Result<Vec3> {
        Ok(self.0 * x)
    }
    fn gradient(&self, _x: &Vec3) -> Result<Mat3> {
        Ok(self.0)
    }
    fn laplacian(&self, _x: &Vec3) -> Result<Vec3> {
        Ok(Vec3::zeros())
    }
}

/// `s · f(x)`.
#[derive(Clone)]
pub struct ScaledField {
    pub inner: SharedVector,
    pub factor: f64,
}

impl VectorField for ScaledField {
    fn value(&self, x: &Vec3) -> Result<Vec3> {
        Ok(self.inner.value(x)? * self.factor)
    }
    fn gradient(&self, x: &Vec3) -> Result<Mat3> {
        Ok(self.inner.gradient(x)? * self.factor)
    }
    fn laplacian(&self, x: &Vec3) -> Result<Vec3> {
        Ok(self.inner.laplacian(x)? * self.factor)
    }
}

/// `c · exp(−|x|² / σ²)`, a smooth pressure-like scalar.
#[derive(Debug, Clone, Copy)]
pub struct GaussianScalar {
    pub amplitude: f64,
    pub width: f64,
}

impl ScalarField for GaussianScalar {
    fn value(&self, x: &Vec3) -> Result<f64> {
        Ok(self.amplitude * (-x.norm_squared() / (self.width * self.width)).exp())
    }
    fn gradient(&self, x: &Vec3) -> Result<Vec3> {
        let s2 = self.width * self.width;
        Ok(x * (-2.0 / s2 * self.value(x)?))
    }
}

/// The advertised singularity constants `|u| ≤ C₁*/|x|`, `|B| ≤ C₂*/|x|`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SingularityBounds {
    pub c1_star: Option<f64>,
    pub c2_star: Option<f64>,
}

/// A `(u, B, p)` bundle. The pressure may be absent for induction-only work.
#[derive(Clone)]
pub struct FieldTriple {
    pub u: SharedVector,
    pub b: SharedVector,
    pub p: Option<SharedScalar>,
    pub bounds: SingularityBounds,
    /// Fields are only evaluated for `0 < |x| ≤ domain_radius`.
    pub domain_radius: f64,
}

impl fmt::Debug for FieldTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldTriple")
            .field("has_pressure", &self.p.is_some())
            .field("bounds", &self.bounds)
            .field("domain_radius", &self.domain_radius)
            .finish()
    }
}

impl FieldTriple {
    pub fn new(u: SharedVector, b: SharedVector, p: Option<SharedScalar>) -> Self {
        Self {
            u,
            b,
            p,
            bounds: SingularityBounds::default(),
            domain_radius: f64::INFINITY,
        }
    }

    pub fn with_bounds(mut self, bounds: SingularityBounds) -> Self {
        self.bounds = bounds;
        self
    }

    pub fn with_domain(mut self, radius: f64) -> Self {
        self.domain_radius = radius;
        self
    }

    /// `(U^b, 0, P^b)` with `C₁*` measured on the unit sphere.
    pub fn landau(sol: &crate::landau::LandauSolution) -> Self {
        let c1 = crate::landau::measured_c1_star(sol);
        Self::new(
            Arc::new(sol.velocity()),
            Arc::new(ZeroField),
            Some(Arc::new(sol.pressure())),
        )
        .with_bounds(SingularityBounds {
            c1_star: Some(c1),
            c2_star: Some(0.0),
        })
    }

    pub fn zero() -> Self {
        Self::new(
            Arc::new(ZeroField),
            Arc::new(ZeroField),
            Some(Arc::new(ConstantScalar(0.0))),
        )
    }

    pub fn pressure(&self) -> Result<&SharedScalar> {
        self.p.as_ref().ok_or(Error::MissingPressure)
    }

    pub(crate) fn check_point(&self, x: &Vec3) -> Result<()> {
        let r = x.norm();
        if r == 0.0 {
            return Err(Error::ZeroPoint);
        }
        if r > self.domain_radius {
            return Err(Error::DomainExceeded {
                radius: r,
                domain: self.domain_radius,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_derivatives_fall_back_to_fd() {
        struct Quadratic;
        impl VectorField for Quadratic {
            fn value(&self, x: &Vec3) -> Result<Vec3> {
                Ok(Vec3::new(x.x * x.x, x.y * x.z, 0.0))
            }
        }
        let x = Vec3::new(1.0, 2.0, 3.0);
        let g = Quadratic.gradient(&x).unwrap();
        assert!((g[(0, 0)] - 2.0).abs() < 1e-8);
        assert!((g[(1, 1)] - 3.0).abs() < 1e-8);
        assert!((g[(1, 2)] - 2.0).abs() < 1e-8);
        let l = Quadratic.laplacian(&x).unwrap();
        assert!((l - Vec3::new(2.0, 0.0, 0.0)).norm() < 1e-5);
    }

    #[test]
    fn gaussian_scalar_gradient() {
        let g = GaussianScalar {
            amplitude: 2.0,
            width: 0.7,
        };
        let x = Vec3::new(0.3, -0.2, 0.5);
        let fd = fd_scalar_gradient(|y| g.value(y), &x, 1e-5).unwrap();
        assert!((fd - g.gradient(&x).unwrap()).norm() < 1e-8);
    }

    #[test]
    fn missing_pressure_is_reported() {
        let t = FieldTriple::new(Arc::new(ZeroField), Arc::new(ZeroField), None);
        assert!(matches!(t.pressure(), Err(Error::MissingPressure)));
    }
}
