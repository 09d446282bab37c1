//! Stress tensors, surface fluxes over spheres, the very-weak formulation and
//! its point-mass limit.

use crate::error::{Error, Result};
use crate::fields::{FieldTriple, ScalarField};
use crate::geometry::{gauss_legendre_on, Mat3, QuadratureRule, Vec3};
use crate::testfields::{check_divergence_free, TestField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::fmt;

/// `T₁ = −(∇u + ∇uᵀ) + u⊗u − B⊗B + p I`.
pub fn stress_t1(t: &FieldTriple, x: &Vec3) -> Result<Mat3> {
    t.check_point(x)?;
    let p = t.pressure()?.value(x)?;
    let g = t.u.gradient(x)?;
    let u = t.u.value(x)?;
    let b = t.b.value(x)?;
    Ok(-(g + g.transpose()) + u * u.transpose() - b * b.transpose() + Mat3::identity() * p)
}

/// `T₂(i, j) = −∂_j B^i + B^i u^j − u^i B^j`.
pub fn stress_t2(t: &FieldTriple, x: &Vec3) -> Result<Mat3> {
    t.check_point(x)?;
    let g = t.b.gradient(x)?;
    let u = t.u.value(x)?;
    let b = t.b.value(x)?;
    Ok(-g + b * u.transpose() - u * b.transpose())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StressKind {
    T1,
    T2,
}

impl StressKind {
    fn eval(self, t: &FieldTriple, x: &Vec3) -> Result<Mat3> {
        match self {
            StressKind::T1 => stress_t1(t, x),
            StressKind::T2 => stress_t2(t, x),
        }
    }
}

impl fmt::Display for StressKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StressKind::T1 => "T1",
            StressKind::T2 => "T2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxReport {
    pub kind: StressKind,
    pub radius: f64,
    /// `∫_{|x|=R} T_{ij} n_j dS` for `i = 1, 2, 3`.
    pub value: Vec3,
    pub orders: (usize, usize),
    /// Distance to the same integral at doubled orders.
    pub error_estimate: f64,
}

fn surface_flux(t: &FieldTriple, kind: StressKind, quad: &QuadratureRule) -> Result<Vec3> {
    quad.integrate_vec(|node| Ok(kind.eval(t, &node.point)? * node.normal))
}

fn ensure_radius(quad: &QuadratureRule, radius: f64) -> Result<()> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Domain(format!(
            "flux radius {radius} must be positive"
        )));
    }
    if (quad.radius() - radius).abs() > 1e-12 * radius {
        return Err(Error::QuadratureMismatch {
            rule: quad.radius(),
            requested: radius,
        });
    }
    Ok(())
}

pub fn flux_integral(
    t: &FieldTriple,
    kind: StressKind,
    radius: f64,
    quad: &QuadratureRule,
) -> Result<FluxReport> {
    ensure_radius(quad, radius)?;
    let value = surface_flux(t, kind, quad)?;
    let fine = surface_flux(t, kind, &quad.refined()?)?;
    Ok(FluxReport {
        kind,
        radius,
        value,
        orders: quad.orders(),
        error_estimate: (fine - value).norm(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VanishingReport {
    pub value: Vec3,
    pub pass: bool,
    pub tol: f64,
}

/// `T₂` flux with pass tolerance `1e−8 (1 + S)`, where `S` is the largest
/// node value of `|T₂|_F · 4πR²`, the size the integral would have without
/// cancellation.
pub fn vanishing_check(
    t: &FieldTriple,
    radius: f64,
    quad: &QuadratureRule,
) -> Result<VanishingReport> {
    ensure_radius(quad, radius)?;
    let mut scale: f64 = 0.0;
    let mut value = Vec3::zeros();
    for node in quad.nodes() {
        let t2 = stress_t2(t, &node.point)?;
        scale = scale.max(t2.norm());
        value += t2 * node.normal * node.weight;
    }
    let tol = 1e-8 * (1.0 + scale * 4.0 * PI * radius * radius);
    Ok(VanishingReport {
        value,
        pass: value.norm() <= tol,
        tol,
    })
}

/// Product rule on a punctured ball: composite Gauss–Legendre in the radius
/// on geometrically graded panels times a sphere rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeQuadrature {
    /// Inner cut radius; the ball `|x| < eps0` is skipped.
    pub eps0: f64,
    pub outer: f64,
    pub panels: usize,
    pub points_per_panel: usize,
    pub n_phi: usize,
    pub n_theta: usize,
}

impl Default for VolumeQuadrature {
    fn default() -> Self {
        Self {
            eps0: 1e-3,
            outer: 2.0,
            panels: 12,
            points_per_panel: 8,
            n_phi: 24,
            n_theta: 32,
        }
    }
}

impl VolumeQuadrature {
    /// Halved inner cut radius and doubled panel count.
    pub fn refined(&self) -> Self {
        Self {
            eps0: self.eps0 / 2.0,
            panels: 2 * self.panels,
            ..*self
        }
    }

    /// `(ρ, weight)` pairs covering `[max(eps0, lo), min(outer, hi)]`.
    fn radial_nodes(&self, lo: f64, hi: f64) -> Result<Vec<(f64, f64)>> {
        if !(self.eps0 > 0.0
            && self.outer > self.eps0
            && self.panels > 0
            && self.points_per_panel > 0)
        {
            return Err(Error::Domain(format!("invalid volume quadrature {self:?}")));
        }
        let a = lo.max(self.eps0);
        let b = hi.min(self.outer);
        if b <= a {
            return Ok(Vec::new());
        }
        let ratio = (b / a).powf(1.0 / self.panels as f64);
        let mut out = Vec::with_capacity(self.panels * self.points_per_panel);
        let mut left = a;
        for k in 0..self.panels {
            let right = if k + 1 == self.panels {
                b
            } else {
                left * ratio
            };
            out.extend(gauss_legendre_on(self.points_per_panel, left, right));
            left = right;
        }
        Ok(out)
    }
}

/// The three pieces of one weak-form integral; `total()` is their sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WeakParts {
    /// `−∫ f·Δζ` with `f = u` (momentum) or `f = B` (induction).
    pub linear: f64,
    /// Momentum: `−∫ u^j u^i ∂_jζ^i`. Induction: `−∫ u^j B^i ∂_jζ^i`.
    pub first: f64,
    /// Momentum: `∫ B^j B^i ∂_jζ^i`. Induction: `∫ B^j u^i ∂_jζ^i`.
    pub second: f64,
}

impl WeakParts {
    pub fn total(&self) -> f64 {
        self.linear + self.first + self.second
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakFormReport {
    pub momentum: WeakParts,
    pub induction: WeakParts,
    /// Change of `(momentum, induction)` totals under [`VolumeQuadrature::refined`].
    pub error_estimate: (f64, f64),
}

fn weak_integrals(
    t: &FieldTriple,
    zeta: &dyn TestField,
    vol: &VolumeQuadrature,
) -> Result<(WeakParts, WeakParts)> {
    let (lo, hi) = zeta.support();
    let sphere = QuadratureRule::sphere(1.0, vol.n_phi, vol.n_theta)?;
    let mut m = WeakParts::default();
    let mut ind = WeakParts::default();
    for (rho, wr) in vol.radial_nodes(lo, hi)? {
        for node in sphere.nodes() {
            let x = node.point * rho;
            let w = wr * node.weight * rho * rho;
            let jet = zeta.jet(&x);
            if jet.value == Vec3::zeros()
                && jet.gradient == Mat3::zeros()
                && jet.laplacian == Vec3::zeros()
            {
                continue;
            }
            let u = t.u.value(&x)?;
            let b = t.b.value(&x)?;
            let g = &jet.gradient;
            m.linear -= w * u.dot(&jet.laplacian);
            m.first -= w * u.dot(&(g * u));
            m.second += w * b.dot(&(g * b));
            ind.linear -= w * b.dot(&jet.laplacian);
            ind.first -= w * b.dot(&(g * u));
            ind.second += w * u.dot(&(g * b));
        }
    }
    Ok((m, ind))
}

/// Very-weak-form residuals of `(u, B)` against a solenoidal test field.
///
/// Both vanish for a very weak solution when `ζ` stays away from the origin;
/// with `ζ(0) ≠ 0` the momentum part picks up the point force, `b·ζ(0)`.
/// The pressure drops out because `div ζ = 0`, which is checked by sampling.
pub fn weak_form_residual(
    t: &FieldTriple,
    zeta: &dyn TestField,
    vol: &VolumeQuadrature,
) -> Result<WeakFormReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    check_divergence_free(zeta, &mut rng, 64, 1e-9)?;
    let (m, ind) = weak_integrals(t, zeta, vol)?;
    let (m2, ind2) = weak_integrals(t, zeta, &vol.refined())?;
    Ok(WeakFormReport {
        momentum: m,
        induction: ind,
        error_estimate: (
            (m2.total() - m.total()).abs(),
            (ind2.total() - ind.total()).abs(),
        ),
    })
}

/// `∫_{|x|=ε} T₁ n φ dS` for each `ε`; tends to `b φ(0)` as `ε → 0`.
pub fn dirac_mass_limit(
    t: &FieldTriple,
    test: &dyn ScalarField,
    eps_list: &[f64],
    orders: (usize, usize),
) -> Result<Vec<Vec3>> {
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Domain("radii must be strictly decreasing".into()));
    }
    eps_list
        .iter()
        .map(|&eps| {
            let quad = QuadratureRule::sphere(eps, orders.0, orders.1)?;
            quad.integrate_vec(|node| {
                Ok(stress_t1(t, &node.point)? * node.normal * test.value(&node.point)?)
            })
        })
        .collect()
}

/// A profile `B(φ)` on `[0, π]` with its derivative.
pub trait PhiProfile {
    fn value_and_derivative(&self, phi: f64) -> (f64, f64);
}

impl<F: Fn(f64) -> (f64, f64)> PhiProfile for F {
    fn value_and_derivative(&self, phi: f64) -> (f64, f64) {
        self(phi)
    }
}

/// `Σ c_k φ^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialProfile(pub Vec<f64>);

impl PolynomialProfile {
    /// Degree-`degree` polynomial in `φ/π` with coefficients uniform in `[−1, 1]`.
    pub fn random<R: Rng>(rng: &mut R, degree: usize) -> Self {
        let coeffs = (0..=degree)
            .map(|k| rng.gen_range(-1.0..1.0) / PI.powi(k as i32))
            .collect();
        Self(coeffs)
    }
}

impl PhiProfile for PolynomialProfile {
    fn value_and_derivative(&self, phi: f64) -> (f64, f64) {
        let mut v = 0.0;
        let mut d = 0.0;
        for c in self.0.iter().rev() {
            d = d * phi + v;
            v = v * phi + c;
        }
        (v, d)
    }
}

/// Gauss–Legendre points used for the φ-identity.
pub const PHI_IDENTITY_ORDER: usize = 64;

/// `∫₀^π [B (cos²φ − sin²φ) + B' sinφ cosφ] dφ`, which is the integral of
/// `(B sinφ cosφ)'` and therefore zero for any C¹ profile.
pub fn phi_identity_integral(profile: &dyn PhiProfile) -> f64 {
    gauss_legendre_on(PHI_IDENTITY_ORDER, 0.0, PI)
        .into_iter()
        .map(|(phi, w)| {
            let (b, db) = profile.value_and_derivative(phi);
            let (s, c) = phi.sin_cos();
            w * (b * (c * c - s * s) + db * s * c)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{ConstantScalar, GaussianScalar, LinearField, ZeroField};
    use crate::geometry::fd_gradient;
    use crate::landau::LandauSolution;
    use crate::profiles::{ProfileParams, SwirlField};
    use crate::testfields::{AffineTestFunction, DivFreeTestField, SmoothCutoff};
    use std::sync::Arc;

    fn landau_triple(beta: f64) -> FieldTriple {
        FieldTriple::landau(&LandauSolution::axial(beta).unwrap())
    }

    #[test]
    fn t1_of_constant_pressure_is_identity() {
        let t = FieldTriple::new(
            Arc::new(ZeroField),
            Arc::new(ZeroField),
            Some(Arc::new(ConstantScalar(1.0))),
        );
        assert_eq!(
            stress_t1(&t, &Vec3::new(0.1, 0.2, 0.3)).unwrap(),
            Mat3::identity()
        );
    }

    #[test]
    fn t1_symmetric_and_matches_hand_assembly() {
        let sol = LandauSolution::new(Vec3::new(0.3, -0.5, 0.8)).unwrap();
        let t = FieldTriple::landau(&sol);
        let x = Vec3::new(0.4, 0.1, -0.7);
        let t1 = stress_t1(&t, &x).unwrap();
        assert!((t1 - t1.transpose()).abs().max() < 1e-13);
        let (g, _) = sol.gradient(&x).unwrap();
        let (u, p) = sol.eval(&x).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let d = if i == j { p } else { 0.0 };
                let hand = -g[(j, i)] - g[(i, j)] + u[i] * u[j] + d;
                assert!((hand - t1[(i, j)]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn t2_special_cases() {
        let m = Mat3::new(0.1, 0.2, -0.3, 0.4, -0.1, 0.5, 0.0, 0.3, 0.0);
        let lin: Arc<LinearField> = Arc::new(LinearField(m));
        let x = Vec3::new(0.2, 0.5, -0.1);
        let none = FieldTriple::new(lin.clone(), Arc::new(ZeroField), None);
        assert_eq!(stress_t2(&none, &x).unwrap(), Mat3::zeros());
        let same = FieldTriple::new(lin.clone(), lin, None);
        assert!((stress_t2(&same, &x).unwrap() + m).abs().max() < 1e-15);
    }

    #[test]
    fn t2_matches_fd_assembly() {
        let sol = LandauSolution::axial(1.0).unwrap();
        let b = SwirlField::from_registry("gauss", 1.3, &ProfileParams::default()).unwrap();
        let t = FieldTriple::new(Arc::new(sol.velocity()), Arc::new(b.clone()), None);
        let x = Vec3::new(0.3, -0.2, 0.6);
        let g = fd_gradient(|y| crate::fields::VectorField::value(&b, y), &x, 1e-5).unwrap();
        let u = sol.eval(&x).unwrap().0;
        let bv = crate::fields::VectorField::value(&b, &x).unwrap();
        let fd = -g + bv * u.transpose() - u * bv.transpose();
        assert!((fd - stress_t2(&t, &x).unwrap()).abs().max() < 1e-8);
    }

    #[test]
    fn landau_momentum_flux_is_b_at_every_radius() {
        let t = landau_triple(1.0);
        for r in [0.25, 0.5, 1.0, 1.5] {
            let q = QuadratureRule::sphere(r, 64, 32).unwrap();
            let rep = flux_integral(&t, StressKind::T1, r, &q).unwrap();
            assert!(
                (rep.value - Vec3::z()).norm() < 1e-8,
                "R={r}: {:?}",
                rep.value
            );
            assert!(rep.error_estimate < 1e-8);
        }
    }

    #[test]
    fn radius_mismatch_is_rejected() {
        let t = landau_triple(1.0);
        let q = QuadratureRule::sphere(1.0, 8, 8).unwrap();
        assert!(matches!(
            flux_integral(&t, StressKind::T1, 0.5, &q),
            Err(Error::QuadratureMismatch { .. })
        ));
        let bounded = landau_triple(1.0).with_domain(0.8);
        assert!(matches!(
            flux_integral(&bounded, StressKind::T1, 1.0, &q),
            Err(Error::DomainExceeded { .. })
        ));
    }

    #[test]
    fn vanishing_for_swirl_and_zero_b() {
        let t = landau_triple(0.5);
        let q = QuadratureRule::sphere(1.0, 32, 32).unwrap();
        let r = vanishing_check(&t, 1.0, &q).unwrap();
        assert_eq!(r.value, Vec3::zeros());
        assert!(r.pass);
        let b = SwirlField::from_registry("poly", 1.0, &ProfileParams::default()).unwrap();
        let t = FieldTriple::new(
            Arc::new(LandauSolution::axial(0.5).unwrap().velocity()),
            Arc::new(b),
            None,
        );
        let r = vanishing_check(&t, 1.0, &q).unwrap();
        assert!(r.pass && r.value.norm() < 1e-8, "{:?}", r.value);
    }

    #[test]
    fn weak_form_vanishes_off_origin_and_sees_point_force_at_it() {
        let t = landau_triple(1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let z = DivFreeTestField::random_annular(&mut rng, 0.5, 1.5);
        let vol = VolumeQuadrature::default();
        let r = weak_form_residual(&t, &z, &vol).unwrap();
        assert!(r.momentum.total().abs() < 1e-6, "{r:?}");
        assert_eq!(r.induction.total(), 0.0);
        let z0 = DivFreeTestField::through_origin(1.0);
        let r = weak_form_residual(&t, &z0, &vol).unwrap();
        assert!((r.momentum.total() - 1.0).abs() < 1e-2, "{r:?}");
    }

    #[test]
    fn weak_form_of_zero_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let z = DivFreeTestField::random_annular(&mut rng, 0.5, 1.5);
        let r = weak_form_residual(&FieldTriple::zero(), &z, &VolumeQuadrature::default()).unwrap();
        assert_eq!((r.momentum.total(), r.induction.total()), (0.0, 0.0));
    }

    #[test]
    fn dirac_limit_is_exact_for_constant_test_and_linear_otherwise() {
        let t = landau_triple(1.0);
        let one = ConstantScalar(1.0);
        for v in dirac_mass_limit(&t, &one, &[0.2, 0.1, 0.05], (32, 32)).unwrap() {
            assert!((v - Vec3::z()).norm() < 1e-10);
        }
        let test = AffineTestFunction {
            value_at_origin: 0.0,
            slope: Vec3::new(0.0, 0.0, 1.0),
            cutoff: SmoothCutoff::default(),
        };
        let vals = dirac_mass_limit(&t, &test, &[0.2, 0.1], (32, 32)).unwrap();
        assert!((vals[0].norm() / vals[1].norm() - 2.0).abs() < 1e-8);
        let g = GaussianScalar {
            amplitude: 1.0,
            width: 1.0,
        };
        assert!(dirac_mass_limit(&t, &g, &[0.1, 0.2], (8, 8)).is_err());
    }

    #[test]
    fn phi_identity_examples() {
        assert!(phi_identity_integral(&|_p: f64| (1.0, 0.0)).abs() < 1e-14);
        assert!(phi_identity_integral(&|p: f64| (p.sin(), p.cos())).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let prof = PolynomialProfile::random(&mut rng, 6);
            assert!(phi_identity_integral(&prof).abs() < 1e-10);
        }
    }

    #[test]
    fn polynomial_profile_derivative() {
        let p = PolynomialProfile(vec![1.0, 2.0, 3.0]);
        assert_eq!(p.value_and_derivative(2.0), (17.0, 14.0));
    }
}
