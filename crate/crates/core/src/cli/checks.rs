//! `verify` back-ends, registered by name.

use super::fieldspec::FieldSpec;
use super::output::{num, CsvArtifact};
use crate::error::{Error, Result};
use crate::fields::{FieldTriple, SharedScalar};
use crate::flux::{
    dirac_mass_limit, flux_integral, phi_identity_integral, vanishing_check, weak_form_residual,
    PolynomialProfile, StressKind, VolumeQuadrature,
};
use crate::geometry::{QuadratureRule, Vec3};
use crate::testfields::{AffineTestFunction, DivFreeTestField, SmoothCutoff};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Inputs shared by all checks; each check reads the ones it needs.
#[derive(Debug, Clone)]
pub struct CheckInput {
    pub field: FieldSpec,
    /// Velocity for checks that pair it with `--field` as `B`.
    pub u: FieldSpec,
    pub radii: Vec<f64>,
    pub orders: (usize, usize),
    pub eps: Vec<f64>,
    pub count: usize,
    pub seed: u64,
    pub tol: Option<f64>,
}

impl Default for CheckInput {
    fn default() -> Self {
        Self {
            field: FieldSpec::Landau {
                beta: 1.0,
                direction: None,
            },
            u: FieldSpec::Zero,
            radii: vec![0.25, 0.5, 1.0, 1.5],
            orders: (64, 32),
            eps: vec![0.2, 0.1, 0.05],
            count: 20,
            seed: 0,
            tol: None,
        }
    }
}

pub struct CheckOutcome {
    pub table: CsvArtifact,
    pub passed: bool,
    pub summary: String,
}

pub trait Check: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn run(&self, input: &CheckInput) -> Result<CheckOutcome>;
}

pub struct CheckRegistry {
    checks: BTreeMap<&'static str, Box<dyn Check>>,
}

impl CheckRegistry {
    pub fn empty() -> Self {
        Self {
            checks: BTreeMap::new(),
        }
    }

    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(FluxCheck));
        r.register(Box::new(VanishingCheck));
        r.register(Box::new(WeakCheck));
        r.register(Box::new(DiracCheck));
        r.register(Box::new(PhiIdentityCheck));
        r
    }

    pub fn register(&mut self, check: Box<dyn Check>) {
        self.checks.insert(check.name(), check);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.checks.keys().copied()
    }

    pub fn get(&self, name: &str) -> Result<&dyn Check> {
        self.checks.get(name).map(|c| c.as_ref()).ok_or_else(|| {
            let known = self.names().collect::<Vec<_>>().join(", ");
            Error::Parse(format!("unknown check `{name}` (known: {known})"))
        })
    }
}

fn base_table(name: &str, input: &CheckInput, header: &[&str]) -> CsvArtifact {
    let mut t = CsvArtifact::new(&format!("verify {name}"), header);
    t.meta("field", &input.field);
    t
}

fn landau_b(field: &FieldSpec) -> Result<Option<Vec3>> {
    Ok(field.landau()?.map(|s| s.b()))
}

fn radii_list(r: &[f64]) -> String {
    r.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// `T₁` and `T₂` fluxes over each sphere; they must agree across radii, and
/// for a Landau field the `T₁` flux must equal `b`.
struct FluxCheck;

impl Check for FluxCheck {
    fn name(&self) -> &'static str {
        "flux"
    }
    fn description(&self) -> &'static str {
        "sphere fluxes of T1 and T2 are independent of the radius (and T1 gives b for Landau)"
    }
    fn run(&self, input: &CheckInput) -> Result<CheckOutcome> {
        if input.radii.is_empty() {
            return Err(Error::Domain("flux check needs at least one radius".into()));
        }
        let t = input.field.triple()?;
        let b = landau_b(&input.field)?;
        let tol = input
            .tol
            .unwrap_or(1e-8 * b.map_or(1.0, |b| b.norm().max(1.0)));
        let mut table = base_table(
            self.name(),
            input,
            &[
                "kind",
                "radius",
                "x",
                "y",
                "z",
                "error_estimate",
                "deviation",
            ],
        );
        table
            .meta("radii", radii_list(&input.radii))
            .meta("orders", format!("{},{}", input.orders.0, input.orders.1))
            .meta("tol", num(tol));
        let mut worst: f64 = 0.0;
        for kind in [StressKind::T1, StressKind::T2] {
            let mut values = Vec::new();
            for &r in &input.radii {
                let quad = QuadratureRule::sphere(r, input.orders.0, input.orders.1)?;
                values.push((r, flux_integral(&t, kind, r, &quad)?));
            }
            let reference = match (kind, b) {
                (StressKind::T1, Some(b)) => b,
                (StressKind::T2, Some(_)) => Vec3::zeros(),
                _ => values[0].1.value,
            };
            for (r, rep) in &values {
                let dev = (rep.value - reference).norm();
                worst = worst.max(dev);
                table.row(vec![
                    kind.to_string(),
                    num(*r),
                    num(rep.value.x),
                    num(rep.value.y),
                    num(rep.value.z),
                    num(rep.error_estimate),
                    num(dev),
                ]);
            }
        }
        let passed = worst <= tol;
        Ok(CheckOutcome {
            table,
            passed,
            summary: format!("max deviation {worst:e} (tol {tol:e})"),
        })
    }
}

/// `T₂` flux of `(u, B)` with `B` from `--field` and `u` from `--u`.
struct VanishingCheck;

impl Check for VanishingCheck {
    fn name(&self) -> &'static str {
        "vanishing"
    }
    fn description(&self) -> &'static str {
        "the T2 sphere flux of (u, B) vanishes"
    }
    fn run(&self, input: &CheckInput) -> Result<CheckOutcome> {
        if input.radii.is_empty() {
            return Err(Error::Domain(
                "vanishing check needs at least one radius".into(),
            ));
        }
        let t = FieldTriple::new(input.u.vector()?, input.field.vector()?, None);
        let mut table = base_table(
            self.name(),
            input,
            &["radius", "x", "y", "z", "tol", "pass"],
        );
        table
            .meta("u", &input.u)
            .meta("radii", radii_list(&input.radii))
            .meta("orders", format!("{},{}", input.orders.0, input.orders.1));
        let mut passed = true;
        let mut worst: f64 = 0.0;
        for &r in &input.radii {
            let quad = QuadratureRule::sphere(r, input.orders.0, input.orders.1)?;
            let rep = vanishing_check(&t, r, &quad)?;
            let ok = match input.tol {
                Some(tol) => rep.value.norm() <= tol,
                None => rep.pass,
            };
            passed &= ok;
            worst = worst.max(rep.value.norm());
            table.row(vec![
                num(r),
                num(rep.value.x),
                num(rep.value.y),
                num(rep.value.z),
                num(input.tol.unwrap_or(rep.tol)),
                ok.to_string(),
            ]);
        }
        Ok(CheckOutcome {
            table,
            passed,
            summary: format!("max |T2 flux| {worst:e}"),
        })
    }
}

/// Weak-form residuals against `--count` random annular test fields, plus
/// the point-force recovery `b·ζ(0)` for Landau fields.
struct WeakCheck;

impl Check for WeakCheck {
    fn name(&self) -> &'static str {
        "weak"
    }
    fn description(&self) -> &'static str {
        "very-weak-form residuals vanish off the origin and recover b at it"
    }
    fn run(&self, input: &CheckInput) -> Result<CheckOutcome> {
        let t = input.field.triple()?;
        let tol = input.tol.unwrap_or(1e-6);
        let vol = VolumeQuadrature::default();
        let mut rng = ChaCha8Rng::seed_from_u64(input.seed);
        let mut table = base_table(
            self.name(),
            input,
            &[
                "index",
                "support",
                "momentum",
                "induction",
                "expected",
                "error_estimate",
                "pass",
            ],
        );
        table
            .meta("count", input.count)
            .meta("seed", input.seed)
            .meta("tol", num(tol));
        let mut passed = true;
        let mut worst: f64 = 0.0;
        let fields: Vec<DivFreeTestField> = (0..input.count)
            .map(|_| DivFreeTestField::random_annular(&mut rng, 0.1, 1.9))
            .collect();
        let reports = fields
            .par_iter()
            .map(|zeta| weak_form_residual(&t, zeta, &vol))
            .collect::<Result<Vec<_>>>()?;
        for (k, rep) in reports.iter().enumerate() {
            let (m, ind) = (rep.momentum.total(), rep.induction.total());
            let ok = m.abs() <= tol && ind.abs() <= tol;
            passed &= ok;
            worst = worst.max(m.abs()).max(ind.abs());
            table.row(vec![
                k.to_string(),
                "annular".into(),
                num(m),
                num(ind),
                num(0.0),
                num(rep.error_estimate.0.max(rep.error_estimate.1)),
                ok.to_string(),
            ]);
        }
        let mut summary = format!("max off-origin residual {worst:e} (tol {tol:e})");
        if let Some(b) = landau_b(&input.field)? {
            let zeta = DivFreeTestField::through_origin(1.5);
            let rep = weak_form_residual(&t, &zeta, &vol)?;
            let m = rep.momentum.total();
            let expected = b.z;
            let rel = (m - expected).abs() / b.norm().max(f64::MIN_POSITIVE);
            let ok = rel <= 1e-2;
            passed &= ok;
            summary.push_str(&format!(
                "; point force {m:.6} vs {expected:.6} (rel {rel:.2e})"
            ));
            table.row(vec![
                input.count.to_string(),
                "origin".into(),
                num(m),
                num(rep.induction.total()),
                num(expected),
                num(rep.error_estimate.0),
                ok.to_string(),
            ]);
        }
        Ok(CheckOutcome {
            table,
            passed,
            summary,
        })
    }
}

/// `∫_{|x|=ε} T₁ n φ` for an affine test function with `φ(0) = 1`: the
/// distance to `b` must halve with `ε`.
struct DiracCheck;

impl Check for DiracCheck {
    fn name(&self) -> &'static str {
        "dirac"
    }
    fn description(&self) -> &'static str {
        "small-sphere stress integrals converge to b linearly in the radius"
    }
    fn run(&self, input: &CheckInput) -> Result<CheckOutcome> {
        if input.eps.len() < 2 {
            return Err(Error::Domain(
                "dirac check needs at least two radii in --eps".into(),
            ));
        }
        let t = input.field.triple()?;
        let b = landau_b(&input.field)?.unwrap_or_else(Vec3::zeros);
        let test: SharedScalar = Arc::new(AffineTestFunction {
            value_at_origin: 1.0,
            slope: Vec3::new(0.3, -0.2, 1.0),
            cutoff: SmoothCutoff::default(),
        });
        let vals = dirac_mass_limit(&t, test.as_ref(), &input.eps, input.orders)?;
        let mut table = base_table(
            self.name(),
            input,
            &["eps", "x", "y", "z", "deviation", "ratio"],
        );
        table
            .meta("eps", radii_list(&input.eps))
            .meta("orders", format!("{},{}", input.orders.0, input.orders.1));
        let mut passed = true;
        let mut prev: Option<f64> = None;
        let mut ratios = Vec::new();
        for (eps, v) in input.eps.iter().zip(&vals) {
            let dev = (v - b).norm();
            let ratio = prev.map(|p| p / dev);
            if let Some(r) = ratio {
                passed &= (r - 2.0).abs() <= input.tol.unwrap_or(0.4);
                ratios.push(r);
            }
            prev = Some(dev);
            table.row(vec![
                num(*eps),
                num(v.x),
                num(v.y),
                num(v.z),
                num(dev),
                ratio.map_or_else(String::new, num),
            ]);
        }
        let shown = ratios
            .iter()
            .map(|r| format!("{r:.4}"))
            .collect::<Vec<_>>()
            .join(", ");
        Ok(CheckOutcome {
            table,
            passed,
            summary: format!("deviation ratios [{shown}] (target 2)"),
        })
    }
}

/// `∫₀^π (B sinφ cosφ)' dφ = 0` for `--count` random polynomial profiles.
struct PhiIdentityCheck;

impl Check for PhiIdentityCheck {
    fn name(&self) -> &'static str {
        "cor2"
    }
    fn description(&self) -> &'static str {
        "the angular identity for axisymmetric swirl profiles integrates to zero"
    }
    fn run(&self, input: &CheckInput) -> Result<CheckOutcome> {
        let tol = input.tol.unwrap_or(1e-10);
        let mut rng = ChaCha8Rng::seed_from_u64(input.seed);
        let mut table = CsvArtifact::new("verify cor2", &["index", "degree", "integral", "pass"]);
        table
            .meta("count", input.count)
            .meta("seed", input.seed)
            .meta("tol", num(tol));
        let mut passed = true;
        let mut worst: f64 = 0.0;
        for k in 0..input.count {
            let degree = rng.gen_range(1..=8);
            let p = PolynomialProfile::random(&mut rng, degree);
            let v = phi_identity_integral(&p);
            let ok = v.abs() <= tol;
            passed &= ok;
            worst = worst.max(v.abs());
            table.row(vec![
                k.to_string(),
                degree.to_string(),
                num(v),
                ok.to_string(),
            ]);
        }
        Ok(CheckOutcome {
            table,
            passed,
            summary: format!("{} profiles, max |integral| {worst:e}", input.count),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_lists_and_rejects() {
        let r = CheckRegistry::builtin();
        assert_eq!(
            r.names().collect::<Vec<_>>(),
            ["cor2", "dirac", "flux", "vanishing", "weak"]
        );
        let e = r.get("energy").err().unwrap();
        assert!(matches!(e, Error::Parse(ref m) if m.contains("energy")));
    }

    #[test]
    fn landau_flux_and_cor2_pass() {
        let r = CheckRegistry::builtin();
        let input = CheckInput::default();
        let out = r.get("flux").unwrap().run(&input).unwrap();
        assert!(out.passed, "{}", out.summary);
        assert_eq!(out.table.len(), 8);
        let out = r
            .get("cor2")
            .unwrap()
            .run(&CheckInput { seed: 7, ..input })
            .unwrap();
        assert!(out.passed, "{}", out.summary);
    }

    #[test]
    fn vanishing_detects_counterexample() {
        let r = CheckRegistry::builtin();
        let ok = CheckInput {
            field: "swirl:gauss:1".parse().unwrap(),
            u: "landau:0.5".parse().unwrap(),
            radii: vec![1.0],
            ..CheckInput::default()
        };
        assert!(r.get("vanishing").unwrap().run(&ok).unwrap().passed);
    }

    #[test]
    fn dirac_ratio() {
        let r = CheckRegistry::builtin();
        let out = r.get("dirac").unwrap().run(&CheckInput::default()).unwrap();
        assert!(out.passed, "{}", out.summary);
    }
}
