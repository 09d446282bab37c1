use super::fieldspec::{parse_list, FieldSpec};
use crate::error::{Error, Result};
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// What `solve` iterates on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    /// Known exact solution; reports the error and a grid-refinement table.
    Manufactured,
    /// `w = φB` for the configured field `B`.
    Localized,
    /// Zero forcing and zero boundary data.
    Zero,
}

impl FromStr for SolveMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "manufactured" => Ok(SolveMode::Manufactured),
            "localized" => Ok(SolveMode::Localized),
            "zero" => Ok(SolveMode::Zero),
            other => Err(Error::Parse(format!("unknown mode `{other}`"))),
        }
    }
}

impl SolveMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveMode::Manufactured => "manufactured",
            SolveMode::Localized => "localized",
            SolveMode::Zero => "zero",
        }
    }
}

/// Plain-text `key = value` run description. `#` starts a comment.
///
/// | key | default | meaning |
/// |---|---|---|
/// | `n_rho`, `n_phi` | 256, 128 | grid nodes in ρ and φ |
/// | `rho_min`, `rho_max` | 0.05, 2 | radial extent of the shell |
/// | `tol` | 1e-10 | Picard increment tolerance |
/// | `max_iter` | 200 | Picard step cap |
/// | `betas` | 0.25,0.5,1,2 | Landau strengths of the background flow |
/// | `mode` | manufactured | `manufactured`, `localized` or `zero` |
/// | `field` | swirl:gauss:1 | `B` for localized mode |
/// | `levels` | 3 | grids in the manufactured refinement table (0 disables) |
/// | `refine_beta` | 0.5 | background `β` of that table |
/// | `threshold` | false | search for the non-contracting `β` |
/// | `threshold_max` | 1e4 | upper end of that search |
/// | `decay_radii` | empty | radii for a decay fit of each solution |
/// | `quad_orders` | 32,32 | sphere rule of the decay fit |
/// | `dump` | true | write each solution grid |
/// | `out_dir` | singular-mhd-out | output directory |
/// | `seed` | 0 | echoed into every artifact |
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n_rho: usize,
    pub n_phi: usize,
    pub rho_min: f64,
    pub rho_max: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub betas: Vec<f64>,
    pub mode: SolveMode,
    pub field: FieldSpec,
    pub levels: usize,
    pub refine_beta: f64,
    pub threshold: bool,
    pub threshold_max: f64,
    pub decay_radii: Vec<f64>,
    pub quad_orders: (usize, usize),
    pub dump: bool,
    pub out_dir: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n_rho: 256,
            n_phi: 128,
            rho_min: 0.05,
            rho_max: 2.0,
            tol: 1e-10,
            max_iter: 200,
            betas: vec![0.25, 0.5, 1.0, 2.0],
            mode: SolveMode::Manufactured,
            field: FieldSpec::Swirl {
                profile: "gauss".into(),
                amplitude: 1.0,
            },
            levels: 3,
            refine_beta: 0.5,
            threshold: false,
            threshold_max: 1e4,
            decay_radii: Vec::new(),
            quad_orders: (32, 32),
            dump: true,
            out_dir: PathBuf::from("singular-mhd-out"),
            seed: 0,
        }
    }
}

fn typed<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Parse(format!("invalid value `{value}` for `{key}`")))
}

fn finite(key: &str, value: &str) -> Result<f64> {
    let v: f64 = typed(key, value)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Parse(format!("invalid value `{value}` for `{key}`")))
    }
}

pub fn parse_orders(s: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [a, b] => Ok((typed("orders", a)?, typed("orders", b)?)),
        _ => Err(Error::Parse(format!(
            "orders `{s}` must be `n_phi,n_theta`"
        ))),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!(
                    "line {}: expected key = value, got `{line}`",
                    lineno + 1
                ))
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "n_rho" => self.n_rho = typed(key, value)?,
            "n_phi" => self.n_phi = typed(key, value)?,
            "rho_min" => self.rho_min = finite(key, value)?,
            "rho_max" => self.rho_max = finite(key, value)?,
            "tol" => self.tol = finite(key, value)?,
            "max_iter" => self.max_iter = typed(key, value)?,
            "betas" => self.betas = parse_list(value, "betas")?,
            "mode" => self.mode = value.parse()?,
            "field" => self.field = value.parse()?,
            "levels" => self.levels = typed(key, value)?,
            "refine_beta" => self.refine_beta = finite(key, value)?,
            "threshold" => self.threshold = typed(key, value)?,
            "threshold_max" => self.threshold_max = finite(key, value)?,
            "decay_radii" => {
                self.decay_radii = if value.is_empty() {
                    Vec::new()
                } else {
                    parse_list(value, "decay_radii")?
                }
            }
            "quad_orders" => self.quad_orders = parse_orders(value)?,
            "dump" => self.dump = typed(key, value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            "seed" => self.seed = typed(key, value)?,
            other => return Err(Error::Parse(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        if self.betas.is_empty() || self.betas.iter().any(|b| *b < 0.0) {
            return Err(Error::Domain(
                "betas must be a non-empty list of non-negative values".into(),
            ));
        }
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(Error::Domain(
                "tol must be positive and max_iter at least 1".into(),
            ));
        }
        if self.refine_beta < 0.0 || !(self.threshold_max > 0.0) {
            return Err(Error::Domain(
                "refine_beta must be non-negative, threshold_max positive".into(),
            ));
        }
        // grid bounds are checked by AnnulusGrid::new
        crate::induction::AnnulusGrid::new(self.rho_min, self.rho_max, self.n_rho, self.n_phi)?;
        Ok(())
    }

    /// Every key with its value, in file order; used as artifact metadata.
    pub fn echo(&self) -> Vec<(String, String)> {
        let join = |v: &[f64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        vec![
            ("n_rho".into(), self.n_rho.to_string()),
            ("n_phi".into(), self.n_phi.to_string()),
            ("rho_min".into(), self.rho_min.to_string()),
            ("rho_max".into(), self.rho_max.to_string()),
            ("tol".into(), format!("{:e}", self.tol)),
            ("max_iter".into(), self.max_iter.to_string()),
            ("betas".into(), join(&self.betas)),
            ("mode".into(), self.mode.as_str().into()),
            ("field".into(), self.field.to_string()),
            ("levels".into(), self.levels.to_string()),
            ("refine_beta".into(), self.refine_beta.to_string()),
            ("threshold".into(), self.threshold.to_string()),
            ("threshold_max".into(), self.threshold_max.to_string()),
            ("decay_radii".into(), join(&self.decay_radii)),
            (
                "quad_orders".into(),
                format!("{},{}", self.quad_orders.0, self.quad_orders.1),
            ),
            ("dump".into(), self.dump.to_string()),
            ("seed".into(), self.seed.to_string()),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let c = RunConfig::parse("").unwrap();
        assert_eq!(c, RunConfig::default());
        let c = RunConfig::parse(
            "# sweep\nn_rho = 64\nbetas = 1, 2 # trailing\nmode=zero\nquad_orders=16,8\n",
        )
        .unwrap();
        assert_eq!(c.n_rho, 64);
        assert_eq!(c.betas, vec![1.0, 2.0]);
        assert_eq!(c.mode, SolveMode::Zero);
        assert_eq!(c.quad_orders, (16, 8));
    }

    #[test]
    fn rejects_bad_input() {
        let e = RunConfig::parse("n_rhoo = 3").unwrap_err();
        assert!(e.to_string().contains("n_rhoo"));
        assert!(matches!(
            RunConfig::parse("tol = fast"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            RunConfig::parse("just words"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            RunConfig::parse("betas = -1"),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            RunConfig::parse("n_phi = 4"),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            RunConfig::parse("mode = spectral"),
            Err(Error::Parse(_))
        ));
    }
}
