//! Catalog of axisymmetric pure-swirl magnetic fields `B = B^θ(r, z) e_θ`.
//!
//! Every profile is written as `B^θ = A r G(r², z)`, so that
//! `B = A G(r², z) (−y, x, 0)` is smooth across the axis and vanishes there.
//! Profiles are registered by name and built at runtime from a
//! [`ProfileParams`]:
//!
//! | name    | `G(s, z)` with `s = r²`, `ζ = z − z₀`, width `σ`         | default `σ` |
//! |---------|-----------------------------------------------------------|-------------|
//! | `gauss` | `exp(−(s + ζ²) / σ²)`                                     | 1.0         |
//! | `poly`  | `1 + ζ/σ − s/(2σ²)`                                       | 1.0         |
//! | `bump`  | `exp(1 − 1/(1 − t))` for `t = (s + ζ²)/σ² < 1`, else 0    | 1.8         |

use crate::error::{Error, Result};
use crate::fields::VectorField;
use crate::geometry::{Mat3, Vec3};
use std::collections::BTreeMap;
use std::sync::Arc;

/// `G` and the partial derivatives the field derivatives need.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ShapeJet {
    pub g: f64,
    pub g_s: f64,
    pub g_z: f64,
    pub g_ss: f64,
    pub g_zz: f64,
}

pub trait SwirlProfile: Send + Sync {
    fn name(&self) -> &'static str;
    /// `G(s, z)` and derivatives, `s = r²`.
    fn shape(&self, s: f64, z: f64) -> ShapeJet;
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ProfileParams {
    pub width: Option<f64>,
    pub shift: f64,
}

struct Gauss {
    width: f64,
    shift: f64,
}

impl SwirlProfile for Gauss {
    fn name(&self) -> &'static str {
        "gauss"
    }
    fn shape(&self, s: f64, z: f64) -> ShapeJet {
        let w2 = self.width * self.width;
        let zeta = z - self.shift;
        let g = (-(s + zeta * zeta) / w2).exp();
        let g_z = -2.0 * zeta / w2 * g;
        ShapeJet {
            g,
            g_s: -g / w2,
            g_z,
            g_ss: g / (w2 * w2),
            g_zz: (4.0 * zeta * zeta / (w2 * w2) - 2.0 / w2) * g,
        }
    }
}

struct Poly {
    width: f64,
    shift: f64,
}

impl SwirlProfile for Poly {
    fn name(&self) -> &'static str {
        "poly"
    }
    fn shape(&self, s: f64, z: f64) -> ShapeJet {
        let w = self.width;
        ShapeJet {
            g: 1.0 + (z - self.shift) / w - s / (2.0 * w * w),
            g_s: -1.0 / (2.0 * w * w),
            g_z: 1.0 / w,
            g_ss: 0.0,
            g_zz: 0.0,
        }
    }
}

struct Bump {
    width: f64,
    shift: f64,
}

impl SwirlProfile for Bump {
    fn name(&self) -> &'static str {
        "bump"
    }
    fn shape(&self, s: f64, z: f64) -> ShapeJet {
        let w2 = self.width * self.width;
        let zeta = z - self.shift;
        let t = (s + zeta * zeta) / w2;
        if t >= 1.0 {
            return ShapeJet::default();
        }
        let m = 1.0 - t;
        let e = (1.0 - 1.0 / m).exp();
        let e1 = -e / (m * m);
        let e2 = e * (2.0 * t - 1.0) / (m * m * m * m);
        let t_z = 2.0 * zeta / w2;
        ShapeJet {
            g: e,
            g_s: e1 / w2,
            g_z: e1 * t_z,
            g_ss: e2 / (w2 * w2),
            g_zz: e2 * t_z * t_z + e1 * 2.0 / w2,
        }
    }
}

type Factory = fn(&ProfileParams) -> Result<Arc<dyn SwirlProfile>>;

struct Entry {
    description: &'static str,
    factory: Factory,
}

fn checked_width(p: &ProfileParams, default: f64) -> Result<f64> {
    let w = p.width.unwrap_or(default);
    if w > 0.0 && w.is_finite() && p.shift.is_finite() {
        Ok(w)
    } else {
        Err(Error::Domain(format!(
            "profile width {w} must be positive and finite"
        )))
    }
}

/// Name → constructor table for swirl profiles.
pub struct ProfileRegistry {
    entries: BTreeMap<&'static str, Entry>,
}

impl ProfileRegistry {
    pub fn empty() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    pub fn builtin() -> Self {
        let mut reg = Self::empty();
        reg.register("gauss", "exp(-(r^2 + (z-z0)^2)/w^2)", |p| {
            Ok(Arc::new(Gauss {
                width: checked_width(p, 1.0)?,
                shift: p.shift,
            }))
        });
        reg.register("poly", "1 + (z-z0)/w - r^2/(2 w^2)", |p| {
            Ok(Arc::new(Poly {
                width: checked_width(p, 1.0)?,
                shift: p.shift,
            }))
        });
        reg.register(
            "bump",
            "compactly supported exp(1 - 1/(1-t)), t = (r^2+(z-z0)^2)/w^2",
            |p| {
                Ok(Arc::new(Bump {
                    width: checked_width(p, 1.8)?,
                    shift: p.shift,
                }))
            },
        );
        reg
    }

    pub fn register(&mut self, name: &'static str, description: &'static str, factory: Factory) {
        self.entries.insert(
            name,
            Entry {
                description,
                factory,
            },
        );
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }

    pub fn describe(&self, name: &str) -> Option<&'static str> {
        self.entries.get(name).map(|e| e.description)
    }

    pub fn create(&self, name: &str, params: &ProfileParams) -> Result<Arc<dyn SwirlProfile>> {
        let entry = self
            .entries
            .get(name)
            .ok_or_else(|| Error::Parse(format!("unknown swirl profile `{name}`")))?;
        (entry.factory)(params)
    }
}

/// `B = A G(r², z) (−y, x, 0)`, with closed-form gradient and Laplacian.
#[derive(Clone)]
pub struct SwirlField {
    pub profile: Arc<dyn SwirlProfile>,
    pub amplitude: f64,
}

impl SwirlField {
    pub fn new(profile: Arc<dyn SwirlProfile>, amplitude: f64) -> Self {
        Self { profile, amplitude }
    }

    pub fn from_registry(name: &str, amplitude: f64, params: &ProfileParams) -> Result<Self> {
        Ok(Self::new(
            ProfileRegistry::builtin().create(name, params)?,
            amplitude,
        ))
    }

    /// Swirl component `B^θ` at cylindrical radius `r` and height `z`.
    pub fn b_theta(&self, r: f64, z: f64) -> f64 {
        self.amplitude * r * self.profile.shape(r * r, z).g
    }
}

fn rotation_generator() -> Mat3 {
    Mat3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0)
}

impl VectorField for SwirlField {
    fn value(&self, x: &Vec3) -> Result<Vec3> {
        let s = x.x * x.x + x.y * x.y;
        let j = self.profile.shape(s, x.z);
        Ok(Vec3::new(-x.y, x.x, 0.0) * (self.amplitude * j.g))
    }

    fn gradient(&self, x: &Vec3) -> Result<Mat3> {
        let s = x.x * x.x + x.y * x.y;
        let j = self.profile.shape(s, x.z);
        let v = Vec3::new(-x.y, x.x, 0.0);
        let grad_g = Vec3::new(2.0 * x.x * j.g_s, 2.0 * x.y * j.g_s, j.g_z);
        Ok((v * grad_g.transpose() + rotation_generator() * j.g) * self.amplitude)
    }

    fn laplacian(&self, x: &Vec3) -> Result<Vec3> {
        let s = x.x * x.x + x.y * x.y;
        let j = self.profile.shape(s, x.z);
        let v = Vec3::new(-x.y, x.x, 0.0);
        Ok(v * (self.amplitude * (8.0 * j.g_s + 4.0 * s * j.g_ss + j.g_zz)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{fd_gradient, fd_laplacian};

    #[test]
    fn registry_lists_and_rejects() {
        let reg = ProfileRegistry::builtin();
        assert_eq!(
            reg.names().collect::<Vec<_>>(),
            vec!["bump", "gauss", "poly"]
        );
        let err = reg
            .create("spiral", &ProfileParams::default())
            .err()
            .unwrap();
        assert!(err.to_string().contains("spiral"));
        assert!(reg
            .create(
                "gauss",
                &ProfileParams {
                    width: Some(-1.0),
                    shift: 0.0
                }
            )
            .is_err());
    }

    #[test]
    fn analytic_derivatives_match_fd() {
        let reg = ProfileRegistry::builtin();
        let x = Vec3::new(0.3, -0.5, 0.4);
        for name in ["gauss", "poly", "bump"] {
            let params = ProfileParams {
                width: Some(1.3),
                shift: 0.2,
            };
            let f = SwirlField::new(reg.create(name, &params).unwrap(), 1.7);
            let g = f.gradient(&x).unwrap();
            let fd = fd_gradient(|y| f.value(y), &x, 1e-5).unwrap();
            assert!((g - fd).norm() < 1e-8, "{name} gradient");
            let l = f.laplacian(&x).unwrap();
            let fdl = fd_laplacian(|y| f.value(y), &x, 1e-3).unwrap();
            assert!(
                (l - fdl).norm() < 1e-5 * l.norm().max(1.0),
                "{name} laplacian"
            );
        }
    }

    #[test]
    fn fields_are_pure_swirl_and_divergence_free() {
        let f = SwirlField::from_registry("gauss", 2.0, &ProfileParams::default()).unwrap();
        let x = Vec3::new(0.4, 0.1, -0.3);
        let b = f.value(&x).unwrap();
        assert!(b.dot(&x).abs() < 1e-15);
        assert_eq!(b.z, 0.0);
        assert!(f.gradient(&x).unwrap().trace().abs() < 1e-14);
        assert_eq!(f.value(&Vec3::new(0.0, 0.0, 0.7)).unwrap(), Vec3::zeros());
    }

    #[test]
    fn bump_has_compact_support() {
        let f = SwirlField::from_registry("bump", 1.0, &ProfileParams::default()).unwrap();
        assert_eq!(f.value(&Vec3::new(1.9, 0.0, 0.0)).unwrap(), Vec3::zeros());
        assert!(f.value(&Vec3::new(0.5, 0.0, 0.0)).unwrap().norm() > 0.0);
    }
}
