use super::banded::{BandedCholesky, SymmetricBanded};
use super::grid::{AnnulusGrid, GridScalar};
use super::operators::{advection_operator, swirl_operator, SampledVelocity};
use crate::error::{Error, Result};

/// Dirichlet data on the inner and outer spheres, one value per `φ_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShellBoundary {
    pub inner: Vec<f64>,
    pub outer: Vec<f64>,
}

impl ShellBoundary {
    pub fn zero(grid: &AnnulusGrid) -> Self {
        Self {
            inner: vec![0.0; grid.n_phi],
            outer: vec![0.0; grid.n_phi],
        }
    }

    /// The first and last `ρ` rows of `w`.
    pub fn from_grid(w: &GridScalar) -> Self {
        let g = w.grid;
        Self {
            inner: (0..g.n_phi).map(|j| w.get(0, j)).collect(),
            outer: (0..g.n_phi).map(|j| w.get(g.n_rho - 1, j)).collect(),
        }
    }
}

/// Factored `−(Δ − 1/(ρ² sin²φ))` on the interior nodes of a grid.
///
/// Row `(i, j)` is scaled by `ρ_i² sin φ_j`, which makes the 5-point system
/// symmetric positive definite; unknowns are numbered with `φ` fastest so the
/// half-bandwidth is `n_phi − 2`.
pub struct SwirlPoisson {
    grid: AnnulusGrid,
    matrix: SymmetricBanded,
    factor: BandedCholesky,
}

impl SwirlPoisson {
    pub fn new(grid: AnnulusGrid) -> Result<Self> {
        let m = grid.n_phi - 2;
        let n = (grid.n_rho - 2) * m;
        let (hr, hp) = (grid.h_rho(), grid.h_phi());
        let mut a = SymmetricBanded::zeros(n, m);
        for i in 1..grid.n_rho - 1 {
            let r = grid.rho(i);
            let (rm, rp) = (r - 0.5 * hr, r + 0.5 * hr);
            for j in 1..grid.n_phi - 1 {
                let p = grid.phi(j);
                let s = p.sin();
                let (sm, sp) = ((p - 0.5 * hp).sin(), (p + 0.5 * hp).sin());
                let row = (i - 1) * m + (j - 1);
                let cr_m = s * rm * rm / (hr * hr);
                let cr_p = s * rp * rp / (hr * hr);
                let cp_m = sm / (hp * hp);
                let cp_p = sp / (hp * hp);
                a.add(row, row, cr_m + cr_p + cp_m + cp_p + 1.0 / s);
                if j > 1 {
                    a.add(row, row - 1, -cp_m);
                }
                if i > 1 {
                    a.add(row, row - m, -cr_m);
                }
            }
        }
        let factor = a.cholesky()?;
        Ok(Self {
            grid,
            matrix: a,
            factor,
        })
    }

    pub fn grid(&self) -> &AnnulusGrid {
        &self.grid
    }

    /// Solves `−(Δ − 1/(ρ² sin²φ)) w = rhs` with Dirichlet data `bc`, then
    /// refines until the scaled residual is below `1e−10` of the right side.
    pub fn solve(&self, rhs: &GridScalar, bc: &ShellBoundary) -> Result<GridScalar> {
        let g = self.grid;
        if rhs.grid != g || bc.inner.len() != g.n_phi || bc.outer.len() != g.n_phi {
            return Err(Error::Domain(
                "right-hand side or boundary data do not match the grid".into(),
            ));
        }
        rhs.check_finite()?;
        if !bc.inner.iter().chain(&bc.outer).all(|v| v.is_finite()) {
            return Err(Error::NonFinite("boundary data"));
        }
        let m = g.n_phi - 2;
        let hr = g.h_rho();
        let mut b = vec![0.0; self.matrix.dim()];
        for i in 1..g.n_rho - 1 {
            let r = g.rho(i);
            for j in 1..g.n_phi - 1 {
                let s = g.phi(j).sin();
                let row = (i - 1) * m + (j - 1);
                let mut v = r * r * s * rhs.get(i, j);
                if i == 1 {
                    let rm = r - 0.5 * hr;
                    v += s * rm * rm / (hr * hr) * bc.inner[j];
                }
                if i == g.n_rho - 2 {
                    let rp = r + 0.5 * hr;
                    v += s * rp * rp / (hr * hr) * bc.outer[j];
                }
                b[row] = v;
            }
        }
        let b_norm = b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let mut x = self.factor.solve(&b);
        let mut res_norm = f64::INFINITY;
        for _ in 0..4 {
            let ax = self.matrix.matvec(&x);
            let r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
            res_norm = r.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if res_norm <= 1e-10 * b_norm {
                break;
            }
            let dx = self.factor.solve(&r);
            x.iter_mut().zip(&dx).for_each(|(x, d)| *x += d);
        }
        if !(res_norm <= 1e-10 * b_norm) {
            return Err(Error::SolverFailure(format!(
                "residual {res_norm:e} above 1e-10 of right-hand side {b_norm:e}"
            )));
        }
        let mut w = GridScalar::zeros(g);
        for j in 1..g.n_phi - 1 {
            w.set(0, j, bc.inner[j]);
            w.set(g.n_rho - 1, j, bc.outer[j]);
        }
        for i in 1..g.n_rho - 1 {
            for j in 1..g.n_phi - 1 {
                w.set(i, j, x[(i - 1) * m + (j - 1)]);
            }
        }
        Ok(w)
    }
}

/// One-shot factor-and-solve.
pub fn poisson_dirichlet_solve(rhs: &GridScalar, bc: &ShellBoundary) -> Result<GridScalar> {
    SwirlPoisson::new(rhs.grid)?.solve(rhs, bc)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for IterationOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 200,
        }
    }
}

/// Consecutive non-contracting steps that end the iteration.
pub const NON_CONTRACTING_STEPS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Converged,
    MaxIterations,
    NotContracting,
}

/// Per-step record of the Picard iteration `w_{n+1} = Ψ(w_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationHistory {
    /// `max |w_{n+1} − w_n|`
    pub increments_max: Vec<f64>,
    /// Volume-weighted `ℓ²` norm of `w_{n+1} − w_n`.
    pub increments_l2: Vec<f64>,
    /// `increments_max[n] / increments_max[n − 1]`, from the second step on.
    pub ratios: Vec<f64>,
    /// `ℓ²` norm of `−L w_{n+1} + N(u, w_{n+1}) − f` on interior nodes.
    pub residuals: Vec<f64>,
    pub stop: StopReason,
}

impl IterationHistory {
    pub fn converged(&self) -> bool {
        self.stop == StopReason::Converged
    }

    pub fn iterations(&self) -> usize {
        self.increments_max.len()
    }

    pub fn final_residual(&self) -> f64 {
        self.residuals.last().copied().unwrap_or(f64::NAN)
    }

    /// Geometric mean of the last three ratios, or `None` before three exist.
    pub fn asymptotic_ratio(&self) -> Option<f64> {
        let n = self.ratios.len();
        if n < 3 {
            return None;
        }
        let tail = &self.ratios[n - 3..];
        Some((tail.iter().map(|r| r.ln()).sum::<f64>() / 3.0).exp())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationOutcome {
    pub w: GridScalar,
    pub history: IterationHistory,
}

fn interior_l2(w: &GridScalar) -> f64 {
    let mut v = w.clone();
    let g = w.grid;
    for j in 0..g.n_phi {
        v.set(0, j, 0.0);
        v.set(g.n_rho - 1, j, 0.0);
    }
    v.l2_norm()
}

/// Runs the iteration and always returns the history; a non-contracting run
/// is reported through [`StopReason::NotContracting`].
///
/// Stops when the increment is below `tol` and the fixed-point residual is
/// below `10 tol`. Boundary data are taken from `w0`.
pub fn run_contraction(
    solver: &SwirlPoisson,
    u: &SampledVelocity,
    f: &GridScalar,
    w0: &GridScalar,
    opts: IterationOptions,
) -> Result<IterationOutcome> {
    if !(opts.tol > 0.0) || opts.max_iter == 0 {
        return Err(Error::Domain(format!("invalid iteration options {opts:?}")));
    }
    let bc = ShellBoundary::from_grid(w0);
    let mut w = w0.clone();
    for j in [0, w.grid.n_phi - 1] {
        for i in 0..w.grid.n_rho {
            w.set(i, j, 0.0);
        }
    }
    let mut hist = IterationHistory {
        increments_max: Vec::new(),
        increments_l2: Vec::new(),
        ratios: Vec::new(),
        residuals: Vec::new(),
        stop: StopReason::MaxIterations,
    };
    let mut adv = advection_operator(u, &w);
    let mut streak = 0;
    for _ in 0..opts.max_iter {
        let rhs = f.sub(&adv)?;
        let next = solver.solve(&rhs, &bc)?;
        let inc = next.sub(&w)?;
        let inc_max = inc.max_abs();
        let adv_next = advection_operator(u, &next);
        let mut res = swirl_operator(&next);
        for ((r, a), fv) in res.values.iter_mut().zip(&adv_next.values).zip(&f.values) {
            *r = -*r + a - fv;
        }
        if let Some(&prev) = hist.increments_max.last() {
            if prev > 0.0 {
                let ratio = inc_max / prev;
                hist.ratios.push(ratio);
                streak = if ratio >= 1.0 { streak + 1 } else { 0 };
            }
        }
        hist.increments_max.push(inc_max);
        hist.increments_l2.push(inc.l2_norm());
        hist.residuals.push(interior_l2(&res));
        w = next;
        adv = adv_next;
        if !inc_max.is_finite() {
            hist.stop = StopReason::NotContracting;
            break;
        }
        if inc_max < opts.tol && hist.final_residual() < 10.0 * opts.tol {
            hist.stop = StopReason::Converged;
            break;
        }
        if streak >= NON_CONTRACTING_STEPS {
            hist.stop = StopReason::NotContracting;
            break;
        }
    }
    Ok(IterationOutcome { w, history: hist })
}

/// [`run_contraction`] with the non-contracting regime turned into an error.
pub fn contraction_iterate(
    solver: &SwirlPoisson,
    u: &SampledVelocity,
    f: &GridScalar,
    w0: &GridScalar,
    opts: IterationOptions,
) -> Result<(GridScalar, IterationHistory)> {
    let out = run_contraction(solver, u, f, w0, opts)?;
    if out.history.stop == StopReason::NotContracting {
        return Err(Error::NotContracting {
            consecutive: NON_CONTRACTING_STEPS,
            last_ratio: out.history.ratios.last().copied().unwrap_or(f64::INFINITY),
        });
    }
    Ok((out.w, out.history))
}

/// `w* = sin(π(ρ − ρ_min)/(ρ_max − ρ_min)) sin φ` and the forcing that makes it
/// the exact fixed point of the continuous problem with velocity `u`.
pub fn manufactured_problem(grid: AnnulusGrid, u: &SampledVelocity) -> (GridScalar, GridScalar) {
    let k = std::f64::consts::PI / (grid.rho_max - grid.rho_min);
    let s = |r: f64| {
        let t = k * (r - grid.rho_min);
        (t.sin(), k * t.cos(), -k * k * t.sin())
    };
    let exact = GridScalar::from_fn(grid, |r, p| s(r).0 * p.sin());
    let mut f = GridScalar::zeros(grid);
    for i in 1..grid.n_rho - 1 {
        let r = grid.rho(i);
        let (s0, s1, s2) = s(r);
        for j in 1..grid.n_phi - 1 {
            let sp = grid.phi(j).sin();
            let minus_l = -sp * (s2 + 2.0 * s1 / r - 2.0 * s0 / (r * r));
            let adv = u.u_rho.get(i, j) * sp * (s1 - s0 / r);
            f.set(i, j, minus_l + adv);
        }
    }
    (exact, f)
}
