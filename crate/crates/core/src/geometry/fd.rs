use super::{Mat3, Vec3};
use crate::error::{Error, Result};

/// Step for first derivatives: `1e-5 · max(1, |x|)`.
pub fn default_gradient_step(x: &Vec3) -> f64 {
    1e-5 * x.norm().max(1.0)
}

/// Step for second derivatives. Scales with `|x|` so that fields singular at
/// the origin see the same relative resolution at every radius.
pub fn default_laplacian_step(x: &Vec3) -> f64 {
    5e-4 * x.norm()
}

fn check_stencil(x: &Vec3, h: f64) -> Result<()> {
    let r = x.norm();
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Domain(format!(
            "finite-difference step {h} must be positive"
        )));
    }
    if r <= h {
        return Err(Error::StencilHitsOrigin { radius: r, step: h });
    }
    Ok(())
}

/// Central-difference Jacobian, entry `(i, j) = ∂_j f^i`.
pub fn fd_gradient<F>(f: F, x: &Vec3, h: f64) -> Result<Mat3>
where
    F: Fn(&Vec3) -> Result<Vec3>,
{
    check_stencil(x, h)?;
    let mut g = Mat3::zeros();
    for j in 0..3 {
        let mut lo = *x;
        let mut hi = *x;
        lo[j] -= h;
        hi[j] += h;
        let d = (f(&hi)? - f(&lo)?) / (2.0 * h);
        g.set_column(j, &d);
    }
    Ok(g)
}

pub fn fd_scalar_gradient<F>(f: F, x: &Vec3, h: f64) -> Result<Vec3>
where
    F: Fn(&Vec3) -> Result<f64>,
{
    check_stencil(x, h)?;
    let mut g = Vec3::zeros();
    for j in 0..3 {
        let mut lo = *x;
        let mut hi = *x;
        lo[j] -= h;
        hi[j] += h;
        g[j] = (f(&hi)? - f(&lo)?) / (2.0 * h);
    }
    Ok(g)
}

/// Seven-point Laplacian of a vector field, componentwise.
pub fn fd_laplacian<F>(f: F, x: &Vec3, h: f64) -> Result<Vec3>
where
    F: Fn(&Vec3) -> Result<Vec3>,
{
    check_stencil(x, h)?;
    let centre = f(x)?;
    let mut acc = -6.0 * centre;
    for j in 0..3 {
        let mut lo = *x;
        let mut hi = *x;
        lo[j] -= h;
        hi[j] += h;
        acc += f(&hi)? + f(&lo)?;
    }
    Ok(acc / (h * h))
}
