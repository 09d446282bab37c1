use super::Vec3;
use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(z) and P_{n-1}(z)
            let (mut p0, mut p1) = (1.0, z);
            if n == 1 {
                p1 = z;
                p0 = 1.0;
            } else {
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    x.iter()
        .zip(&w)
        .map(|(&xi, &wi)| (mid + half * xi, half * wi))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureNode {
    pub point: Vec3,
    pub normal: Vec3,
    pub weight: f64,
}

/// Product rule on the sphere `|x| = R`: Gauss–Legendre in `cos φ` times the
/// trapezoid rule in θ. Integrates spherical polynomials of degree below
/// `min(2 n_phi, n_theta)` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    radius: f64,
    n_phi: usize,
    n_theta: usize,
    nodes: Vec<QuadratureNode>,
}

impl QuadratureRule {
    pub fn sphere(radius: f64, n_phi: usize, n_theta: usize) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::ZeroRadius);
        }
        if n_phi < 2 || n_theta < 4 {
            return Err(Error::Domain(format!(
                "sphere quadrature needs n_phi >= 2 and n_theta >= 4, got ({n_phi}, {n_theta})"
            )));
        }
        let (mu, w_mu) = gauss_legendre(n_phi);
        let dtheta = 2.0 * PI / n_theta as f64;
        let r2 = radius * radius;
        let mut nodes = Vec::with_capacity(n_phi * n_theta);
        for (&cp, &wp) in mu.iter().zip(&w_mu) {
            let sp = (1.0 - cp * cp).max(0.0).sqrt();
            for k in 0..n_theta {
                let (st, ct) = (k as f64 * dtheta).sin_cos();
                let normal = Vec3::new(sp * ct, sp * st, cp);
                nodes.push(QuadratureNode {
                    point: normal * radius,
                    normal,
                    weight: r2 * wp * dtheta,
                });
            }
        }
        Ok(Self {
            radius,
            n_phi,
            n_theta,
            nodes,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn orders(&self) -> (usize, usize) {
        (self.n_phi, self.n_theta)
    }

    pub fn nodes(&self) -> &[QuadratureNode] {
        &self.nodes
    }

    /// Same orders on a sphere of another radius.
    pub fn with_radius(&self, radius: f64) -> Result<Self> {
        Self::sphere(radius, self.n_phi, self.n_theta)
    }

    /// Doubled orders, used as the error reference.
    pub fn refined(&self) -> Result<Self> {
        Self::sphere(self.radius, 2 * self.n_phi, 2 * self.n_theta)
    }

    pub fn integrate<F>(&self, mut f: F) -> Result<f64>
    where
        F: FnMut(&QuadratureNode) -> Result<f64>,
    {
        let mut acc = 0.0;
        for n in &self.nodes {
            acc += n.weight * f(n)?;
        }
        Ok(acc)
    }

    pub fn integrate_vec<F>(&self, mut f: F) -> Result<Vec3>
    where
        F: FnMut(&QuadratureNode) -> Result<Vec3>,
    {
        let mut acc = Vec3::zeros();
        for n in &self.nodes {
            acc += f(n)? * n.weight;
        }
        Ok(acc)
    }
}

/// Convenience wrapper matching the operation name used in the docs.
pub fn sphere_quadrature(radius: f64, n_phi: usize, n_theta: usize) -> Result<QuadratureRule> {
    QuadratureRule::sphere(radius, n_phi, n_theta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in 1..=20 {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let q: f64 = x
                    .iter()
                    .zip(&w)
                    .map(|(xi, wi)| wi * xi.powi(deg as i32))
                    .sum();
                let exact = if deg % 2 == 1 {
                    0.0
                } else {
                    2.0 / (deg as f64 + 1.0)
                };
                assert!((q - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn total_area_and_normals() {
        let r = 1.7;
        let q = QuadratureRule::sphere(r, 24, 16).unwrap();
        let area = 4.0 * PI * r * r;
        let total: f64 = q.nodes().iter().map(|n| n.weight).sum();
        assert!((total - area).abs() < 1e-13 * area);
        assert!(q.nodes().iter().all(|n| n.weight > 0.0));
        for n in q.nodes() {
            assert!((n.point / r - n.normal).norm() < 1e-15);
        }
        let flux = q.integrate_vec(|n| Ok(n.normal)).unwrap();
        assert!(flux.norm() < 1e-13);
    }

    #[test]
    fn second_moment() {
        let r = 0.6;
        let q = QuadratureRule::sphere(r, 8, 8).unwrap();
        let m = q.integrate(|n| Ok((n.point.z / r).powi(2))).unwrap();
        let exact = 4.0 * PI * r * r / 3.0;
        assert!((m - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn rejects_small_orders() {
        assert!(QuadratureRule::sphere(1.0, 1, 8).is_err());
        assert!(QuadratureRule::sphere(1.0, 4, 3).is_err());
        assert!(QuadratureRule::sphere(0.0, 4, 8).is_err());
    }

    /// Associated Legendre P_l^m(μ) by the standard three-term recurrence.
    fn assoc_legendre(l: usize, m: usize, mu: f64) -> f64 {
        let s = (1.0 - mu * mu).sqrt();
        let mut pmm = 1.0;
        for k in 0..m {
            pmm *= -((2 * k + 1) as f64) * s;
        }
        if l == m {
            return pmm;
        }
        let mut pm1 = mu * (2 * m + 1) as f64 * pmm;
        if l == m + 1 {
            return pm1;
        }
        let mut p = 0.0;
        for ll in (m + 2)..=l {
            p = (mu * (2 * ll - 1) as f64 * pm1 - (ll + m - 1) as f64 * pmm) / (ll - m) as f64;
            pmm = pm1;
            pm1 = p;
        }
        p
    }

    #[test]
    fn spherical_harmonics_integrate_to_zero() {
        let (n_phi, n_theta) = (10, 20);
        let q = QuadratureRule::sphere(1.0, n_phi, n_theta).unwrap();
        let bound = (2 * n_phi).min(n_theta);
        for l in 1..bound {
            for m in 0..=l.min(n_theta / 2 - 1) {
                for cosine in [true, false] {
                    let v = q
                        .integrate(|n| {
                            let mu = n.normal.z;
                            let theta = n.normal.y.atan2(n.normal.x);
                            let ang = if cosine {
                                (m as f64 * theta).cos()
                            } else {
                                (m as f64 * theta).sin()
                            };
                            Ok(assoc_legendre(l, m, mu) * ang)
                        })
                        .unwrap();
                    // normalize by the size of P_l^m to keep the tolerance meaningful
                    let scale = (1..=2 * m)
                        .fold(1.0, |a, k| a * (l + m + 1 - k) as f64)
                        .max(1.0);
                    assert!(v.abs() < 1e-12 * scale, "l={l} m={m} value={v}");
                }
            }
        }
    }
}
