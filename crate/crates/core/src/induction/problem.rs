use super::grid::{AnnulusGrid, GridScalar};
use super::operators::{localize_cutoff, SampledVelocity};
use super::solver::{
    manufactured_problem, run_contraction, IterationOptions, IterationOutcome, StopReason,
    SwirlPoisson,
};
use crate::error::{Error, Result};
use crate::fields::VectorField;
use crate::landau::LandauSolution;
use crate::testfields::SmoothCutoff;

/// Forcing and initial/boundary data for one Picard run.
#[derive(Debug, Clone, PartialEq)]
pub struct InductionProblem {
    pub forcing: GridScalar,
    /// Initial iterate; its first and last `ρ` rows are the Dirichlet data.
    pub initial: GridScalar,
    /// Known fixed point of the continuous problem, when there is one.
    pub exact: Option<GridScalar>,
}

impl InductionProblem {
    pub fn manufactured(grid: AnnulusGrid, u: &SampledVelocity) -> Self {
        let (exact, forcing) = manufactured_problem(grid, u);
        Self {
            forcing,
            initial: GridScalar::zeros(grid),
            exact: Some(exact),
        }
    }

    /// `w = φB` localized with the standard cutoff: forcing from the cutoff
    /// derivatives, inner Dirichlet data from `B` on `|x| = ρ_min`.
    pub fn localized(grid: AnnulusGrid, b: &dyn VectorField, u: &dyn VectorField) -> Result<Self> {
        let (w, f) = localize_cutoff(b, u, SmoothCutoff::default());
        let sampled = GridScalar::from_field_swirl(grid, &w)?;
        let mut initial = GridScalar::zeros(grid);
        for j in 1..grid.n_phi - 1 {
            initial.set(0, j, sampled.get(0, j));
            initial.set(grid.n_rho - 1, j, sampled.get(grid.n_rho - 1, j));
        }
        Ok(Self {
            forcing: GridScalar::from_field_swirl(grid, &f)?,
            initial,
            exact: None,
        })
    }

    pub fn zero(grid: AnnulusGrid) -> Self {
        Self {
            forcing: GridScalar::zeros(grid),
            initial: GridScalar::zeros(grid),
            exact: None,
        }
    }

    pub fn run(
        &self,
        solver: &SwirlPoisson,
        u: &SampledVelocity,
        opts: IterationOptions,
    ) -> Result<IterationOutcome> {
        run_contraction(solver, u, &self.forcing, &self.initial, opts)
    }
}

/// Axial Landau velocity `U^{(0,0,β)}` sampled on `grid`.
pub fn landau_background(grid: AnnulusGrid, beta: f64) -> Result<SampledVelocity> {
    SampledVelocity::sample(grid, &LandauSolution::axial(beta)?.velocity())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdReport {
    /// Largest tested `β` whose iteration did not blow up.
    pub beta_contracting: f64,
    /// Smallest tested `β` that ended in the non-contracting regime.
    pub beta_not_contracting: f64,
    /// Runs performed.
    pub evaluations: usize,
}

impl ThresholdReport {
    pub fn estimate(&self) -> f64 {
        (self.beta_contracting * self.beta_not_contracting).sqrt()
    }
}

/// Empirical smallest `β` for which the manufactured problem stops being
/// contracting: doubling from `start` until a non-contracting run, then
/// geometric bisection down to relative width `rel_width`.
pub fn contraction_threshold(
    solver: &SwirlPoisson,
    start: f64,
    max_beta: f64,
    rel_width: f64,
    opts: IterationOptions,
) -> Result<ThresholdReport> {
    let grid = *solver.grid();
    let mut evaluations = 0;
    let mut blows_up = |beta: f64| -> Result<bool> {
        evaluations += 1;
        let u = landau_background(grid, beta)?;
        let out = InductionProblem::manufactured(grid, &u).run(solver, &u, opts)?;
        Ok(out.history.stop == StopReason::NotContracting)
    };
    if !(start > 0.0 && max_beta > start && rel_width > 0.0) {
        return Err(Error::Domain(
            "threshold search needs 0 < start < max_beta and rel_width > 0".into(),
        ));
    }
    if blows_up(start)? {
        return Err(Error::Domain(format!(
            "iteration already non-contracting at beta = {start}"
        )));
    }
    let mut lo = start;
    let mut hi = start;
    loop {
        hi *= 2.0;
        if hi > max_beta {
            return Err(Error::Domain(format!(
                "no non-contracting beta found up to {max_beta}"
            )));
        }
        if blows_up(hi)? {
            break;
        }
        lo = hi;
    }
    while hi / lo - 1.0 > rel_width {
        let mid = (lo * hi).sqrt();
        if blows_up(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(ThresholdReport {
        beta_contracting: lo,
        beta_not_contracting: hi,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{ProfileParams, SwirlField};

    #[test]
    fn localized_problem_is_supported_in_the_shell() {
        let g = AnnulusGrid::with_sizes(40, 20).unwrap();
        let sol = LandauSolution::axial(0.5).unwrap();
        let b = SwirlField::from_registry("gauss", 1.0, &ProfileParams::default()).unwrap();
        let p = InductionProblem::localized(g, &b, &sol.velocity()).unwrap();
        for i in 0..g.n_rho {
            let r = g.rho(i);
            let row_max = (0..g.n_phi)
                .map(|j| p.forcing.get(i, j).abs())
                .fold(0.0, f64::max);
            if r < 4.0 / 3.0 || r > 5.0 / 3.0 {
                assert_eq!(row_max, 0.0, "rho={r}");
            }
        }
        assert!(p.forcing.max_abs() > 0.0);
        assert!(p.initial.get(0, g.n_phi / 2).abs() > 0.0);
        assert_eq!(p.initial.get(g.n_rho - 1, g.n_phi / 2), 0.0);
    }

    #[test]
    fn threshold_is_bracketed() {
        let g = AnnulusGrid::with_sizes(24, 12).unwrap();
        let solver = SwirlPoisson::new(g).unwrap();
        let opts = IterationOptions {
            tol: 1e-9,
            max_iter: 150,
        };
        let r = contraction_threshold(&solver, 1.0, 1e4, 0.25, opts).unwrap();
        assert!(r.beta_contracting < r.beta_not_contracting);
        assert!(r.beta_not_contracting / r.beta_contracting <= 1.25 + 1e-12);
    }
}
