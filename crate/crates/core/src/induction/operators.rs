//! Pure-swirl reduction of the linear and advective parts of the induction
//! equation.
//!
//! For `u = u^ρ(ρ, φ) e_ρ + u^φ(ρ, φ) e_φ` and `w = w^θ(ρ, φ) e_θ`:
//!
//! ```text
//! Δ(w^θ e_θ)          = (Δ − 1/(ρ² sin²φ)) w^θ · e_θ
//! (u·∇)w − (w·∇)u     = [u^ρ ∂_ρ w^θ + (u^φ/ρ) ∂_φ w^θ − w^θ (u^ρ + u^φ cot φ)/ρ] · e_θ
//! ```

use super::grid::{AnnulusGrid, GridScalar};
use crate::error::Result;
use crate::fields::{FieldTriple, VectorField};
use crate::geometry::{basis_vectors, SphericalCoords, Vec3};
use crate::testfields::SmoothCutoff;

/// Conservative 5-point discretization of `(Δ − 1/(ρ² sin²φ)) w` at
/// interior nodes; boundary and axis entries are zero.
pub fn swirl_operator(w: &GridScalar) -> GridScalar {
    let g = w.grid;
    let (hr, hp) = (g.h_rho(), g.h_phi());
    let mut out = GridScalar::zeros(g);
    for i in 1..g.n_rho - 1 {
        let r = g.rho(i);
        let (rm, rp) = (r - 0.5 * hr, r + 0.5 * hr);
        for j in 1..g.n_phi - 1 {
            let p = g.phi(j);
            let s = p.sin();
            let (sm, sp) = ((p - 0.5 * hp).sin(), (p + 0.5 * hp).sin());
            let c = w.get(i, j);
            let radial = (rp * rp * (w.get(i + 1, j) - c) - rm * rm * (c - w.get(i - 1, j)))
                / (r * r * hr * hr);
            let polar =
                (sp * (w.get(i, j + 1) - c) - sm * (c - w.get(i, j - 1))) / (r * r * s * hp * hp);
            out.set(i, j, radial + polar - c / (r * r * s * s));
        }
    }
    out
}

/// `(u^ρ, u^φ)` sampled on the grid nodes (θ = 0 half-plane).
#[derive(Debug, Clone, PartialEq)]
pub struct SampledVelocity {
    pub u_rho: GridScalar,
    pub u_phi: GridScalar,
}

impl SampledVelocity {
    pub fn sample(grid: AnnulusGrid, u: &dyn VectorField) -> Result<Self> {
        let mut u_rho = GridScalar::zeros(grid);
        let mut u_phi = GridScalar::zeros(grid);
        for i in 0..grid.n_rho {
            for j in 1..grid.n_phi - 1 {
                let c = SphericalCoords::new(grid.rho(i), grid.phi(j), 0.0)?;
                let (er, ep, _) = basis_vectors(&c);
                let v = u.value(&c.to_cartesian())?;
                u_rho.set(i, j, v.dot(&er));
                u_phi.set(i, j, v.dot(&ep));
            }
        }
        Ok(Self { u_rho, u_phi })
    }

    pub fn zero(grid: AnnulusGrid) -> Self {
        Self {
            u_rho: GridScalar::zeros(grid),
            u_phi: GridScalar::zeros(grid),
        }
    }

    /// Largest `ρ |u|` over the nodes, a sampled `C₁*`.
    pub fn c1_star(&self) -> f64 {
        let g = self.u_rho.grid;
        let mut m: f64 = 0.0;
        for i in 0..g.n_rho {
            for j in 0..g.n_phi {
                m = m.max(g.rho(i) * self.u_rho.get(i, j).hypot(self.u_phi.get(i, j)));
            }
        }
        m
    }
}

/// `u^ρ ∂_ρ w + (u^φ/ρ) ∂_φ w − w (u^ρ + u^φ cot φ)/ρ` by central
/// differences at interior nodes.
pub fn advection_operator(u: &SampledVelocity, w: &GridScalar) -> GridScalar {
    let g = w.grid;
    let (hr, hp) = (g.h_rho(), g.h_phi());
    let mut out = GridScalar::zeros(g);
    for i in 1..g.n_rho - 1 {
        let r = g.rho(i);
        for j in 1..g.n_phi - 1 {
            let (ur, up) = (u.u_rho.get(i, j), u.u_phi.get(i, j));
            let c = w.get(i, j);
            let dr = (w.get(i + 1, j) - w.get(i - 1, j)) / (2.0 * hr);
            let dp = (w.get(i, j + 1) - w.get(i, j - 1)) / (2.0 * hp);
            let cot = g.phi(j).cos() / g.phi(j).sin();
            out.set(i, j, ur * dr + up / r * dp - c * (ur + up * cot) / r);
        }
    }
    out
}

/// `w = φ B`.
pub struct LocalizedField<'a> {
    pub b: &'a dyn VectorField,
    pub cutoff: SmoothCutoff,
}

impl VectorField for LocalizedField<'_> {
    fn value(&self, x: &Vec3) -> Result<Vec3> {
        let c = self.cutoff.value(x);
        if c == 0.0 {
            return Ok(Vec3::zeros());
        }
        Ok(self.b.value(x)? * c)
    }
}

/// `f = −(Δφ) B − 2 (∇φ·∇) B + (u·∇φ) B − (B·∇φ) u`, supported where `∇φ ≠ 0`.
pub struct LocalizationForcing<'a> {
    pub b: &'a dyn VectorField,
    pub u: &'a dyn VectorField,
    pub cutoff: SmoothCutoff,
}

impl VectorField for LocalizationForcing<'_> {
    fn value(&self, x: &Vec3) -> Result<Vec3> {
        let gphi = self.cutoff.gradient(x);
        if gphi == Vec3::zeros() {
            return Ok(Vec3::zeros());
        }
        let lphi = self.cutoff.laplacian(x);
        let b = self.b.value(x)?;
        let u = self.u.value(x)?;
        let gb = self.b.gradient(x)?;
        Ok(-b * lphi - gb * gphi * 2.0 + b * u.dot(&gphi) - u * b.dot(&gphi))
    }
}

pub fn localize_cutoff<'a>(
    b: &'a dyn VectorField,
    u: &'a dyn VectorField,
    cutoff: SmoothCutoff,
) -> (LocalizedField<'a>, LocalizationForcing<'a>) {
    (
        LocalizedField { b, cutoff },
        LocalizationForcing { b, u, cutoff },
    )
}

/// Pointwise residuals of the stationary MHD system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MhdResidual {
    /// `−Δu + (u·∇)u − (B·∇)B + ∇p`
    pub momentum: Vec3,
    /// `−ΔB + (u·∇)B − (B·∇)u`
    pub induction: Vec3,
    pub div_u: f64,
    pub div_b: f64,
}

pub fn mhd_residual(t: &FieldTriple, x: &Vec3) -> Result<MhdResidual> {
    t.check_point(x)?;
    let u = t.u.value(x)?;
    let b = t.b.value(x)?;
    let gu = t.u.gradient(x)?;
    let gb = t.b.gradient(x)?;
    let grad_p = t.pressure()?.gradient(x)?;
    Ok(MhdResidual {
        momentum: -t.u.laplacian(x)? + gu * u - gb * b + grad_p,
        induction: -t.b.laplacian(x)? + gb * u - gu * b,
        div_u: gu.trace(),
        div_b: gb.trace(),
    })
}
