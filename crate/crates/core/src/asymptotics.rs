//! Scaling transforms and diagnostics of the behaviour near the origin.

use crate::error::{Error, Result};
use crate::fields::{FieldTriple, ScalarField, SharedScalar, SharedVector, VectorField};
use crate::geometry::{Mat3, QuadratureRule, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

/// A scalar magnitude evaluable away from the origin.
pub type Magnitude<'a> = &'a (dyn Fn(&Vec3) -> Result<f64> + Sync);

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "scaling factor {lambda} must be positive and finite"
        )))
    }
}

fn scaled_point(x: &Vec3, lambda: f64, domain: f64) -> Result<Vec3> {
    let y = x * lambda;
    let r = y.norm();
    if r > domain {
        return Err(Error::DomainExceeded { radius: r, domain });
    }
    Ok(y)
}

/// `λ f(λx)` with derivatives `λ² ∇f(λx)`, `λ³ Δf(λx)`.
struct ScaledVector {
    inner: SharedVector,
    lambda: f64,
    domain: f64,
}

impl VectorField for ScaledVector {
    fn value(&self, x: &Vec3) -> Result<Vec3> {
        let l = self.lambda;
        Ok(self.inner.value(&scaled_point(x, l, self.domain)?)? * l)
    }
    fn gradient(&self, x: &Vec3) -> Result<Mat3> {
        let l = self.lambda;
        Ok(self.inner.gradient(&scaled_point(x, l, self.domain)?)? * (l * l))
    }
    fn laplacian(&self, x: &Vec3) -> Result<Vec3> {
        let l = self.lambda;
        Ok(self.inner.laplacian(&scaled_point(x, l, self.domain)?)? * (l * l * l))
    }
}

/// `λ² p(λx)`.
struct ScaledScalar {
    inner: SharedScalar,
    lambda: f64,
    domain: f64,
}

impl ScalarField for ScaledScalar {
    fn value(&self, x: &Vec3) -> Result<f64> {
        let l = self.lambda;
        Ok(self.inner.value(&scaled_point(x, l, self.domain)?)? * l * l)
    }
    fn gradient(&self, x: &Vec3) -> Result<Vec3> {
        let l = self.lambda;
        Ok(self.inner.gradient(&scaled_point(x, l, self.domain)?)? * (l * l * l))
    }
}

/// `(λ u(λx), λ B(λx), λ² p(λx))`; the scaled domain is `domain/λ` and the
/// singularity constants carry over unchanged.
pub fn scale_triple(t: &FieldTriple, lambda: f64) -> Result<FieldTriple> {
    check_lambda(lambda)?;
    let domain = t.domain_radius;
    let vec = |f: &SharedVector| -> SharedVector {
        Arc::new(ScaledVector {
            inner: f.clone(),
            lambda,
            domain,
        })
    };
    let p = t.p.as_ref().map(|p| -> SharedScalar {
        Arc::new(ScaledScalar {
            inner: p.clone(),
            lambda,
            domain,
        })
    });
    Ok(FieldTriple::new(vec(&t.u), vec(&t.b), p)
        .with_bounds(t.bounds)
        .with_domain(domain / lambda))
}

/// Sphere suprema `M(r)` and the least-squares fit `log M ≈ c + α (−log r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayProfile {
    pub radii: Vec<f64>,
    pub sup_values: Vec<f64>,
    pub alpha: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the log–log fit.
    pub residual: f64,
}

impl DecayProfile {
    pub fn write_csv<W: Write>(&self, mut out: W, metadata: &[(String, String)]) -> Result<()> {
        writeln!(out, "# alpha={:e}", self.alpha)?;
        writeln!(out, "# intercept={:e}", self.intercept)?;
        writeln!(out, "# fit_residual={:e}", self.residual)?;
        for (k, v) in metadata {
            writeln!(out, "# {k}={v}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["r", "M"])?;
        for (r, m) in self.radii.iter().zip(&self.sup_values) {
            w.write_record([format!("{r:e}"), format!("{m:e}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `max |f|` over the nodes of an `orders` sphere rule of radius `r`.
pub fn sphere_sup(f: Magnitude<'_>, r: f64, orders: (usize, usize)) -> Result<f64> {
    let q = QuadratureRule::sphere(r, orders.0, orders.1)?;
    q.nodes()
        .iter()
        .try_fold(0.0f64, |m, n| Ok(m.max(f(&n.point)?.abs())))
}

fn sphere_sups(f: Magnitude<'_>, radii: &[f64], orders: (usize, usize)) -> Result<Vec<f64>> {
    radii
        .par_iter()
        .map(|&r| sphere_sup(f, r, orders))
        .collect()
}

fn check_radii(radii: &[f64], min_len: usize) -> Result<()> {
    if radii.len() < min_len {
        return Err(Error::Domain(format!(
            "need at least {min_len} radii, got {}",
            radii.len()
        )));
    }
    if radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(Error::Domain("radii must be positive and finite".into()));
    }
    if radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Domain("radii must be strictly decreasing".into()));
    }
    Ok(())
}

pub fn decay_exponent_fit(
    f: Magnitude<'_>,
    radii: &[f64],
    orders: (usize, usize),
) -> Result<DecayProfile> {
    check_radii(radii, 4)?;
    if radii[0] / radii[radii.len() - 1] < 10.0 * (1.0 - 1e-12) {
        return Err(Error::Domain("radii must span at least one decade".into()));
    }
    let sups = sphere_sups(f, radii, orders)?;
    if let Some((r, _)) = radii.iter().zip(&sups).find(|(_, m)| **m <= 0.0) {
        return Err(Error::NonPositiveValues { radius: *r });
    }
    let xs: Vec<f64> = radii.iter().map(|r| -r.ln()).collect();
    let ys: Vec<f64> = sups.iter().map(|m| m.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let alpha = sxy / sxx;
    let intercept = my - alpha * mx;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - alpha * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(DecayProfile {
        radii: radii.to_vec(),
        sup_values: sups,
        alpha,
        intercept,
        residual,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundProfile {
    pub q: f64,
    /// `(r, r^{3/q − 1} M(r))`
    pub weighted: Vec<(f64, f64)>,
}

impl BoundProfile {
    /// Largest weighted value over the sampled spheres.
    pub fn value(&self) -> f64 {
        self.weighted.iter().fold(0.0, |m, (_, v)| m.max(*v))
    }
}

/// `max_r r^{3/q − 1} M(r)` for `q ∈ (1, 3)`.
pub fn pointwise_bound_profile(
    f: Magnitude<'_>,
    q: f64,
    radii: &[f64],
    orders: (usize, usize),
) -> Result<BoundProfile> {
    if !(q > 1.0 && q < 3.0) {
        return Err(Error::Domain(format!("q = {q} must lie in (1, 3)")));
    }
    check_radii(radii, 1)?;
    let sups = sphere_sups(f, radii, orders)?;
    let e = 3.0 / q - 1.0;
    Ok(BoundProfile {
        q,
        weighted: radii
            .iter()
            .zip(&sups)
            .map(|(r, m)| (*r, r.powf(e) * m))
            .collect(),
    })
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    out
}

/// Halton points in bases 2, 3, 5 with a seeded Cranley–Patterson shift.
pub fn shifted_halton(n: usize, seed: u64) -> Vec<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: [f64; 3] = [rng.gen(), rng.gen(), rng.gen()];
    (1..=n as u64)
        .map(|i| {
            let h = [
                radical_inverse(i, 2),
                radical_inverse(i, 3),
                radical_inverse(i, 5),
            ];
            [
                (h[0] + shift[0]).fract(),
                (h[1] + shift[1]).fract(),
                (h[2] + shift[2]).fract(),
            ]
        })
        .collect()
}

/// Minimum sample count for [`weak_l3_norm`].
pub const WEAK_L3_MIN_SAMPLES: usize = 100_000;

/// Sampled `sup_t t |{|f| > t}|^{1/3}` over the ball of radius `radius`.
///
/// With the values sorted in decreasing order, the level set above the
/// `k`-th value has estimated measure `k V / N`; the supremum is taken over
/// `k ≥ max(1, N/1000)` because the smallest level sets are too sparsely
/// sampled to estimate.
pub fn weak_l3_norm(f: Magnitude<'_>, radius: f64, n_samples: usize, seed: u64) -> Result<f64> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Domain(format!(
            "ball radius {radius} must be positive"
        )));
    }
    if n_samples < WEAK_L3_MIN_SAMPLES {
        return Err(Error::Domain(format!(
            "weak-L3 estimate needs at least {WEAK_L3_MIN_SAMPLES} samples, got {n_samples}"
        )));
    }
    let pts = shifted_halton(n_samples, seed);
    let mut vals: Vec<f64> = pts
        .par_iter()
        .map(|[a, b, c]| {
            let r = radius * a.cbrt();
            let cp = 2.0 * b - 1.0;
            let sp = (1.0 - cp * cp).max(0.0).sqrt();
            let th = 2.0 * PI * c;
            let x = Vec3::new(r * sp * th.cos(), r * sp * th.sin(), r * cp);
            f(&x).map(f64::abs)
        })
        .collect::<Result<_>>()?;
    vals.sort_by(|a, b| b.total_cmp(a));
    let cell = 4.0 / 3.0 * PI * radius.powi(3) / n_samples as f64;
    let k_min = (n_samples / 1000).max(1);
    Ok((k_min..=n_samples)
        .map(|k| vals[k - 1] * (k as f64 * cell).cbrt())
        .fold(0.0, f64::max))
}
