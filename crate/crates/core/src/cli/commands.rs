use super::checks::{CheckInput, CheckRegistry};
use super::config::{parse_orders, RunConfig, SolveMode};
use super::fieldspec::{parse_list, parse_vec3, FieldSpec};
use super::output::{num, resolve_out_dir, CsvArtifact, EXIT_OK, EXIT_VERIFY_FAILED};
use crate::asymptotics::{decay_exponent_fit, pointwise_bound_profile, weak_l3_norm, DecayProfile};
use crate::error::{Error, Result};
use crate::fields::SharedVector;
use crate::geometry::Vec3;
use crate::induction::{
    contraction_threshold, landau_background, AnnulusGrid, GridField, InductionProblem,
    IterationOptions, IterationOutcome, SampledVelocity, StopReason, SwirlPoisson,
};
use crate::landau::{a_of_beta, LandauParam, LandauSolution};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "singular-mhd",
    version,
    about = "Numerical checks for point singularities of stationary MHD"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate Landau solutions.
    #[command(subcommand)]
    Landau(LandauCommand),
    /// Run a named verification check and write its table.
    Verify(VerifyArgs),
    /// Picard iteration for the localized induction equation.
    Solve(SolveArgs),
    /// Decay exponent and bound profiles near the origin.
    Asymptotics(AsymptoticsArgs),
}

#[derive(Debug, Subcommand)]
pub enum LandauCommand {
    /// Print U, P and the momentum residual at a point.
    Eval {
        #[arg(long)]
        beta: f64,
        /// Force direction `bx,by,bz` (normalized; default e_z).
        #[arg(long, allow_hyphen_values = true)]
        direction: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Print the internal parameter `a` for a given `β`.
    SolveA {
        #[arg(long)]
        beta: f64,
    },
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// flux, vanishing, weak, dirac or cor2.
    pub which: String,
    /// Field selector (`B` for vanishing).
    #[arg(long, default_value = "landau:1")]
    pub field: String,
    /// Velocity selector for vanishing.
    #[arg(long, default_value = "zero")]
    pub u: String,
    #[arg(long, default_value = "0.25,0.5,1,1.5")]
    pub radii: String,
    /// Sphere rule `n_phi,n_theta`.
    #[arg(long, default_value = "64,32")]
    pub orders: String,
    /// Shrinking radii for the dirac check.
    #[arg(long, default_value = "0.2,0.1,0.05")]
    pub eps: String,
    /// Number of random profiles (cor2).
    #[arg(long)]
    pub profiles: Option<usize>,
    /// Number of random test fields (weak).
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Override the check's pass tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// `key = value` run description; defaults apply without it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AsymptoticsArgs {
    /// Field selector or a solution dump (`grid:<path>` / `<path>.csv`).
    #[arg(long)]
    pub field: String,
    #[arg(long, default_value = "1,0.5,0.25,0.1")]
    pub radii: String,
    /// Exponent of the bound profile, in (1, 3).
    #[arg(long, default_value_t = 1.5)]
    pub q: f64,
    #[arg(long, default_value = "32,32")]
    pub orders: String,
    /// Also estimate the weak-L3 norm on the ball of the largest radius.
    #[arg(long)]
    pub weak_l3_samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

fn default_dir() -> PathBuf {
    RunConfig::default().out_dir
}

pub fn landau(cmd: LandauCommand, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        LandauCommand::Eval {
            beta,
            direction,
            point,
        } => {
            let dir = match direction {
                Some(d) => parse_vec3(&d, "direction")?,
                None => Vec3::z(),
            };
            let x = parse_vec3(&point, "point")?;
            let sol = LandauSolution::with_direction(beta, &dir)?;
            let (u, p) = sol.eval(&x)?;
            let res = sol.ns_residual(&x)?;
            let r = x.norm();
            writeln!(out, "beta      {beta}")?;
            writeln!(out, "a         {}", fmt_a(sol.a()))?;
            writeln!(out, "point     {} {} {}", x.x, x.y, x.z)?;
            writeln!(out, "U         {:.15e} {:.15e} {:.15e}", u.x, u.y, u.z)?;
            writeln!(out, "P         {p:.15e}")?;
            writeln!(out, "|res|     {:.3e}", res.norm())?;
            writeln!(out, "|res||x|^3 {:.3e}", res.norm() * r.powi(3))?;
        }
        LandauCommand::SolveA { beta } => {
            let a = a_of_beta(beta)?;
            writeln!(out, "a = {}", fmt_a(a))?;
        }
    }
    Ok(EXIT_OK)
}

fn fmt_a(a: LandauParam) -> String {
    match a {
        LandauParam::Infinite => "inf".into(),
        LandauParam::Finite(a) => format!("{a:.15e}"),
    }
}

pub fn verify(args: VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let registry = CheckRegistry::builtin();
    let check = registry.get(&args.which)?;
    let count = match args.which.as_str() {
        "cor2" => args.profiles.or(args.count).unwrap_or(20),
        _ => args.count.or(args.profiles).unwrap_or(10),
    };
    let input = CheckInput {
        field: args.field.parse()?,
        u: args.u.parse()?,
        radii: parse_list(&args.radii, "radii")?,
        orders: parse_orders(&args.orders)?,
        eps: parse_list(&args.eps, "eps")?,
        count,
        seed: args.seed,
        tol: args.tol,
    };
    let outcome = check.run(&input)?;
    let dir = resolve_out_dir(args.out_dir.as_deref(), &default_dir());
    let path = outcome
        .table
        .save(&dir, &format!("verify_{}.csv", check.name()))?;
    let verdict = if outcome.passed { "PASS" } else { "FAIL" };
    writeln!(out, "{verdict} {}: {}", check.name(), outcome.summary)?;
    writeln!(out, "wrote {}", path.display())?;
    Ok(if outcome.passed {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}

/// One β of the sweep.
struct SweepRun {
    beta: f64,
    c1_star: f64,
    outcome: IterationOutcome,
    error: Option<f64>,
    decay: Option<DecayProfile>,
}

fn solve_one(
    cfg: &RunConfig,
    grid: AnnulusGrid,
    solver: &SwirlPoisson,
    beta: f64,
) -> Result<SweepRun> {
    let sol = LandauSolution::axial(beta)?;
    let u = SampledVelocity::sample(grid, &sol.velocity())?;
    let problem = match cfg.mode {
        SolveMode::Manufactured => InductionProblem::manufactured(grid, &u),
        SolveMode::Localized => {
            InductionProblem::localized(grid, cfg.field.vector()?.as_ref(), &sol.velocity())?
        }
        SolveMode::Zero => InductionProblem::zero(grid),
    };
    let opts = IterationOptions {
        tol: cfg.tol,
        max_iter: cfg.max_iter,
    };
    let outcome = problem.run(solver, &u, opts)?;
    let error = match &problem.exact {
        Some(exact) => Some(outcome.w.sub(exact)?.max_abs()),
        None => None,
    };
    let decay = if cfg.decay_radii.is_empty() || outcome.history.stop != StopReason::Converged {
        None
    } else {
        let field = GridField(outcome.w.clone());
        let mag = move |x: &Vec3| -> Result<f64> {
            Ok(crate::fields::VectorField::value(&field, x)?.norm())
        };
        Some(decay_exponent_fit(&mag, &cfg.decay_radii, cfg.quad_orders)?)
    };
    Ok(SweepRun {
        beta,
        c1_star: u.c1_star(),
        outcome,
        error,
        decay,
    })
}

fn stop_name(s: StopReason) -> &'static str {
    match s {
        StopReason::Converged => "converged",
        StopReason::MaxIterations => "max_iterations",
        StopReason::NotContracting => "not_contracting",
    }
}

pub fn solve(args: SolveArgs, out: &mut dyn Write) -> Result<i32> {
    let cfg = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let dir = resolve_out_dir(args.out_dir.as_deref(), &cfg.out_dir);
    let grid = AnnulusGrid::new(cfg.rho_min, cfg.rho_max, cfg.n_rho, cfg.n_phi)?;
    let solver = SwirlPoisson::new(grid)?;

    let runs: Vec<SweepRun> = cfg
        .betas
        .par_iter()
        .map(|&beta| solve_one(&cfg, grid, &solver, beta))
        .collect::<Result<_>>()?;

    let mut history = CsvArtifact::new(
        "solve",
        &[
            "beta",
            "step",
            "increment_max",
            "increment_l2",
            "ratio",
            "residual",
        ],
    );
    history.extend_meta(cfg.echo());
    let mut summary = CsvArtifact::new(
        "solve",
        &[
            "beta",
            "c1_star",
            "stop",
            "iterations",
            "asymptotic_ratio",
            "final_residual",
            "error",
            "alpha",
        ],
    );
    summary.extend_meta(cfg.echo());
    for (k, run) in runs.iter().enumerate() {
        let h = &run.outcome.history;
        for s in 0..h.iterations() {
            let ratio = match s {
                0 => String::new(),
                _ if h.increments_max[s - 1] > 0.0 => {
                    num(h.increments_max[s] / h.increments_max[s - 1])
                }
                _ => String::new(),
            };
            history.row(vec![
                num(run.beta),
                (s + 1).to_string(),
                num(h.increments_max[s]),
                num(h.increments_l2[s]),
                ratio,
                num(h.residuals[s]),
            ]);
        }
        summary.row(vec![
            num(run.beta),
            num(run.c1_star),
            stop_name(h.stop).into(),
            h.iterations().to_string(),
            h.asymptotic_ratio().map_or_else(String::new, num),
            num(h.final_residual()),
            run.error.map_or_else(String::new, num),
            run.decay
                .as_ref()
                .map_or_else(String::new, |d| num(d.alpha)),
        ]);
        writeln!(
            out,
            "beta={} stop={} iterations={} ratio={}",
            run.beta,
            stop_name(h.stop),
            h.iterations(),
            h.asymptotic_ratio()
                .map_or_else(|| "-".into(), |r| format!("{r:.4}"))
        )?;
        if cfg.dump {
            // the grid writer records its own extent
            let mut meta: Vec<(String, String)> = vec![
                ("command".into(), "solve".into()),
                ("version".into(), env!("CARGO_PKG_VERSION").into()),
            ];
            meta.extend(
                cfg.echo().into_iter().filter(|(k, _)| {
                    !matches!(k.as_str(), "n_rho" | "n_phi" | "rho_min" | "rho_max")
                }),
            );
            meta.push(("beta".into(), run.beta.to_string()));
            meta.push(("stop".into(), stop_name(h.stop).into()));
            let path = dir.join(format!("solution_{k}.csv"));
            std::fs::create_dir_all(&dir)
                .map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
            let f =
                File::create(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            run.outcome.w.write_csv(BufWriter::new(f), &meta)?;
        }
        if let Some(d) = &run.decay {
            let mut meta: Vec<(String, String)> = vec![
                ("command".into(), "solve".into()),
                ("version".into(), env!("CARGO_PKG_VERSION").into()),
            ];
            meta.extend(cfg.echo());
            meta.push(("beta".into(), run.beta.to_string()));
            let path = dir.join(format!("decay_{k}.csv"));
            let f =
                File::create(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            d.write_csv(BufWriter::new(f), &meta)?;
        }
    }
    history.save(&dir, "history.csv")?;
    summary.save(&dir, "summary.csv")?;

    if cfg.mode == SolveMode::Manufactured && cfg.levels >= 2 {
        let table = refinement_table(&cfg)?;
        let errs: Vec<String> = table.iter().map(|(_, _, e)| format!("{e:.3e}")).collect();
        writeln!(out, "refinement errors: {}", errs.join(" "))?;
        let mut conv = CsvArtifact::new("solve", &["n_rho", "n_phi", "h_rho", "error", "ratio"]);
        conv.extend_meta(cfg.echo());
        for (k, (g, _, e)) in table.iter().enumerate() {
            let ratio = if k == 0 {
                String::new()
            } else {
                num(table[k - 1].2 / e)
            };
            conv.row(vec![
                g.n_rho.to_string(),
                g.n_phi.to_string(),
                num(g.h_rho()),
                num(*e),
                ratio,
            ]);
        }
        conv.save(&dir, "refinement.csv")?;
    }

    if cfg.threshold {
        let opts = IterationOptions {
            tol: cfg.tol,
            max_iter: cfg.max_iter,
        };
        let start = cfg
            .betas
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
            .max(0.25);
        let rep = contraction_threshold(&solver, start, cfg.threshold_max, 0.05, opts)?;
        writeln!(
            out,
            "non-contracting threshold: beta in ({}, {}]",
            rep.beta_contracting, rep.beta_not_contracting
        )?;
        let mut t = CsvArtifact::new(
            "solve",
            &[
                "beta_contracting",
                "beta_not_contracting",
                "estimate",
                "evaluations",
            ],
        );
        t.extend_meta(cfg.echo());
        t.row(vec![
            num(rep.beta_contracting),
            num(rep.beta_not_contracting),
            num(rep.estimate()),
            rep.evaluations.to_string(),
        ]);
        t.save(&dir, "threshold.csv")?;
    }
    writeln!(out, "wrote {}", dir.display())?;
    Ok(EXIT_OK)
}

/// Manufactured-solution error on `levels` grids, finest last; each coarser
/// grid has half the spacing count of the next.
pub fn refinement_table(cfg: &RunConfig) -> Result<Vec<(AnnulusGrid, StopReason, f64)>> {
    let mut sizes = vec![(cfg.n_rho, cfg.n_phi)];
    for _ in 1..cfg.levels {
        let (r, p) = *sizes.last().expect("nonempty");
        sizes.push(((r - 1) / 2 + 1, (p - 1) / 2 + 1));
    }
    sizes.reverse();
    let opts = IterationOptions {
        tol: cfg.tol,
        max_iter: cfg.max_iter,
    };
    sizes
        .par_iter()
        .map(|&(nr, np)| {
            let grid = AnnulusGrid::new(cfg.rho_min, cfg.rho_max, nr, np)?;
            let solver = SwirlPoisson::new(grid)?;
            let u = landau_background(grid, cfg.refine_beta)?;
            let p = InductionProblem::manufactured(grid, &u);
            let outcome = p.run(&solver, &u, opts)?;
            let exact = p.exact.as_ref().expect("manufactured");
            Ok((grid, outcome.history.stop, outcome.w.sub(exact)?.max_abs()))
        })
        .collect()
}

pub fn asymptotics(args: AsymptoticsArgs, out: &mut dyn Write) -> Result<i32> {
    if !(args.q > 1.0 && args.q < 3.0) {
        return Err(Error::Domain(format!("q = {} must lie in (1, 3)", args.q)));
    }
    let spec: FieldSpec = args.field.parse()?;
    let radii = parse_list(&args.radii, "radii")?;
    let orders = parse_orders(&args.orders)?;
    let field: SharedVector = spec.vector()?;
    let mag = move |x: &Vec3| -> Result<f64> { Ok(field.value(x)?.norm()) };
    let fit = decay_exponent_fit(&mag, &radii, orders)?;
    let bound = pointwise_bound_profile(&mag, args.q, &radii, orders)?;
    let mut meta = vec![
        ("command".to_string(), "asymptotics".to_string()),
        ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ("field".to_string(), spec.to_string()),
        ("orders".to_string(), format!("{},{}", orders.0, orders.1)),
        ("q".to_string(), args.q.to_string()),
        ("bound_profile".to_string(), num(bound.value())),
    ];
    if let Some(n) = args.weak_l3_samples {
        let r_max = radii.iter().copied().fold(0.0, f64::max);
        let w = weak_l3_norm(&mag, r_max, n, args.seed)?;
        meta.push(("weak_l3_radius".into(), r_max.to_string()));
        meta.push(("weak_l3_samples".into(), n.to_string()));
        meta.push(("seed".into(), args.seed.to_string()));
        meta.push(("weak_l3".into(), num(w)));
        writeln!(out, "weak-L3 norm on B_{r_max}: {w:.6}")?;
    }
    let dir = resolve_out_dir(args.out_dir.as_deref(), &default_dir());
    std::fs::create_dir_all(&dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join("asymptotics.csv");
    let f = File::create(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    fit.write_csv(BufWriter::new(f), &meta)?;
    writeln!(
        out,
        "alpha = {:.4} (fit residual {:.2e}); max r^(3/q-1) M(r) = {:.4e}",
        fit.alpha,
        fit.residual,
        bound.value()
    )?;
    writeln!(out, "wrote {}", path.display())?;
    Ok(EXIT_OK)
}
