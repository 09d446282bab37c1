//! Smooth compactly supported helpers: radial cutoffs, scalar test
//! functions and divergence-free vector test fields.

use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::geometry::{Mat3, Vec3};
use rand::Rng;

/// Radial cutoff equal to 1 on `|x| ≤ inner`, 0 on `|x| ≥ outer`, joined by
/// the quintic smoothstep (C² with vanishing first and second derivatives at
/// both ends).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothCutoff {
    pub inner: f64,
    pub outer: f64,
}

impl Default for SmoothCutoff {
    fn default() -> Self {
        Self {
            inner: 4.0 / 3.0,
            outer: 5.0 / 3.0,
        }
    }
}

impl SmoothCutoff {
    pub fn new(inner: f64, outer: f64) -> Result<Self> {
        if !(inner > 0.0 && outer > inner && outer.is_finite()) {
            return Err(Error::Domain(format!(
                "cutoff needs 0 < inner < outer, got ({inner}, {outer})"
            )));
        }
        Ok(Self { inner, outer })
    }

    /// `(f, f', f'')` in the radius.
    pub fn radial(&self, rho: f64) -> (f64, f64, f64) {
        if rho <= self.inner {
            return (1.0, 0.0, 0.0);
        }
        if rho >= self.outer {
            return (0.0, 0.0, 0.0);
        }
        let w = self.outer - self.inner;
        let t = (rho - self.inner) / w;
        let s = t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
        let s1 = 30.0 * t * t * (t - 1.0) * (t - 1.0);
        let s2 = 60.0 * t * (t - 1.0) * (2.0 * t - 1.0);
        (1.0 - s, -s1 / w, -s2 / (w * w))
    }

    pub fn value(&self, x: &Vec3) -> f64 {
        self.radial(x.norm()).0
    }

    pub fn gradient(&self, x: &Vec3) -> Vec3 {
        let r = x.norm();
        if r == 0.0 {
            return Vec3::zeros();
        }
        x * (self.radial(r).1 / r)
    }

    pub fn laplacian(&self, x: &Vec3) -> f64 {
        let r = x.norm();
        if r == 0.0 {
            return 0.0;
        }
        let (_, f1, f2) = self.radial(r);
        f2 + 2.0 * f1 / r
    }
}

/// Polynomial radial bump `χ(ρ) = (q(ρ)/q_max)^m` with `q` quadratic.
///
/// `Annular` uses `q = (ρ − r₁)(r₂ − ρ)` on `(r₁, r₂)`; `Centered` uses
/// `q = 1 − ρ²/R²` on `[0, R)`, which is smooth through the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialBump {
    Annular { inner: f64, outer: f64, power: u32 },
    Centered { radius: f64, power: u32 },
}

impl RadialBump {
    pub fn support(&self) -> (f64, f64) {
        match *self {
            RadialBump::Annular { inner, outer, .. } => (inner, outer),
            RadialBump::Centered { radius, .. } => (0.0, radius),
        }
    }

    /// `[χ, χ', χ'', χ''']` in the radius.
    pub fn derivatives(&self, rho: f64) -> [f64; 4] {
        let (q, q1, q2, qmax, m) = match *self {
            RadialBump::Annular {
                inner,
                outer,
                power,
            } => {
                if rho <= inner || rho >= outer {
                    return [0.0; 4];
                }
                let half = 0.5 * (outer - inner);
                (
                    (rho - inner) * (outer - rho),
                    inner + outer - 2.0 * rho,
                    -2.0,
                    half * half,
                    power,
                )
            }
            RadialBump::Centered { radius, power } => {
                if rho >= radius {
                    return [0.0; 4];
                }
                let r2 = radius * radius;
                (1.0 - rho * rho / r2, -2.0 * rho / r2, -2.0 / r2, 1.0, power)
            }
        };
        let m = m as i32;
        let mf = m as f64;
        let norm = qmax.powi(m);
        let pw = |k: i32| if m - k >= 0 { q.powi(m - k) } else { 0.0 };
        let f0 = pw(0);
        let f1 = mf * pw(1) * q1;
        let f2 = mf * (mf - 1.0) * pw(2) * q1 * q1 + mf * pw(1) * q2;
        let f3 = mf * (mf - 1.0) * (mf - 2.0) * pw(3) * q1 * q1 * q1
            + 3.0 * mf * (mf - 1.0) * pw(2) * q1 * q2;
        [f0 / norm, f1 / norm, f2 / norm, f3 / norm]
    }
}

/// `ζ = curl(χ(|x|) (c + M x))`: smooth, divergence-free, supported where χ is.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivFreeTestField {
    pub bump: RadialBump,
    pub offset: Vec3,
    pub linear: Mat3,
}

/// Value, Jacobian (`(i, j) = ∂_j ζ^i`) and Laplacian of a test field.
#[derive(Debug, Clone, Copy)]
pub struct TestFieldJet {
    pub value: Vec3,
    pub gradient: Mat3,
    pub laplacian: Vec3,
}

pub trait TestField: Send + Sync {
    fn jet(&self, x: &Vec3) -> TestFieldJet;
    /// Radii `(r_in, r_out)` outside of which the field vanishes.
    fn support(&self) -> (f64, f64);
}

impl DivFreeTestField {
    /// Random annular field supported inside `(lo, hi)`.
    pub fn random_annular<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> Self {
        let a = rng.gen_range(lo..(lo + 0.4 * (hi - lo)));
        let b = rng.gen_range((a + 0.3 * (hi - lo)).min(hi)..=hi);
        let mut m = Mat3::zeros();
        for v in m.iter_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
        Self {
            bump: RadialBump::Annular {
                inner: a,
                outer: b,
                power: 6,
            },
            offset: Vec3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ),
            linear: m,
        }
    }

    /// Field with `ζ(0) = e_z`: `curl(χ (−y, x, 0)/2)` with `χ(0) = 1`.
    pub fn through_origin(radius: f64) -> Self {
        Self {
            bump: RadialBump::Centered { radius, power: 6 },
            offset: Vec3::zeros(),
            linear: Mat3::new(0.0, -0.5, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0),
        }
    }

    fn curl_of_linear(&self) -> Vec3 {
        let m = &self.linear;
        Vec3::new(
            m[(2, 1)] - m[(1, 2)],
            m[(0, 2)] - m[(2, 0)],
            m[(1, 0)] - m[(0, 1)],
        )
    }
}

impl TestField for DivFreeTestField {
    fn jet(&self, x: &Vec3) -> TestFieldJet {
        let r = x.norm();
        let [f0, f1, f2, f3] = self.bump.derivatives(r);
        if f0 == 0.0 && f1 == 0.0 && f2 == 0.0 && f3 == 0.0 || r == 0.0 {
            let w = self.curl_of_linear();
            // only the centered bump is nonzero at the origin, where χ = 1
            let chi = if r == 0.0 {
                self.bump.derivatives(0.0)[0]
            } else {
                0.0
            };
            return TestFieldJet {
                value: w * chi,
                gradient: Mat3::zeros(),
                laplacian: Vec3::zeros(),
            };
        }
        let n = x / r;
        let nn = n * n.transpose();
        let grad_chi = n * f1;
        let hess = nn * f2 + (Mat3::identity() - nn) * (f1 / r);
        let lap_chi = f2 + 2.0 * f1 / r;
        let grad_lap = n * (f3 + 2.0 * f2 / r - 2.0 * f1 / (r * r));
        let a = self.offset + self.linear * x;
        let w = self.curl_of_linear();

        let value = grad_chi.cross(&a) + w * f0;
        let mut gradient = Mat3::zeros();
        let mut cross_sum = Vec3::zeros();
        for j in 0..3 {
            let hj = hess.column(j).into_owned();
            let mj = self.linear.column(j).into_owned();
            let col = hj.cross(&a) + grad_chi.cross(&mj) + w * grad_chi[j];
            gradient.set_column(j, &col);
            cross_sum += hj.cross(&mj);
        }
        let laplacian = grad_lap.cross(&a) + cross_sum * 2.0 + w * lap_chi;
        TestFieldJet {
            value,
            gradient,
            laplacian,
        }
    }

    fn support(&self) -> (f64, f64) {
        self.bump.support()
    }
}

/// Samples `div ζ` at `samples` points of the support shell and fails if it
/// exceeds `tol` relative to the field's gradient scale.
pub fn check_divergence_free<R: Rng>(
    zeta: &dyn TestField,
    rng: &mut R,
    samples: usize,
    tol: f64,
) -> Result<()> {
    let (lo, hi) = zeta.support();
    let mut max_div: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for _ in 0..samples {
        let dir = loop {
            let v = Vec3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let n = v.norm();
            if n > 1e-3 && n <= 1.0 {
                break v / n;
            }
        };
        let r = rng.gen_range(lo.max(1e-3 * hi)..hi);
        let jet = zeta.jet(&(dir * r));
        max_div = max_div.max(jet.gradient.trace().abs());
        scale = scale.max(jet.gradient.abs().max());
    }
    if max_div > tol * scale.max(1.0) {
        Err(Error::TestFieldNotDivergenceFree { max_div })
    } else {
        Ok(())
    }
}

/// Scalar test function `(v₀ + g·x) · cutoff(|x|)`, affine near the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineTestFunction {
    pub value_at_origin: f64,
    pub slope: Vec3,
    pub cutoff: SmoothCutoff,
}

impl ScalarField for AffineTestFunction {
    fn value(&self, x: &Vec3) -> Result<f64> {
        Ok((self.value_at_origin + self.slope.dot(x)) * self.cutoff.value(x))
    }
}
