use crate::error::{Error, Result};
use crate::fields::{ConstantScalar, FieldTriple, SharedVector, ZeroField};
use crate::geometry::Vec3;
use crate::induction::{GridField, GridScalar};
use crate::landau::LandauSolution;
use crate::profiles::{ProfileParams, ProfileRegistry, SwirlField};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

/// Textual field selector.
///
/// ```text
/// landau:<beta>[:<bx>,<by>,<bz>]   Landau velocity/pressure, force along the direction (default e_z)
/// swirl:<profile>:<amplitude>      catalog pure-swirl field
/// zero
/// grid:<path> | <path>.csv         grid dump of a swirl component
/// ```
#[derive(Debug, Clone, PartialEq)]
pub enum FieldSpec {
    Landau { beta: f64, direction: Option<Vec3> },
    Swirl { profile: String, amplitude: f64 },
    Zero,
    Grid(PathBuf),
}

fn number(token: &str, what: &str) -> Result<f64> {
    let v: f64 = token
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("invalid {what} `{token}`")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("{what} `{token}` is not finite")));
    }
    Ok(v)
}

/// Comma-separated finite reals.
pub fn parse_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',').map(|t| number(t, what)).collect()
}

pub fn parse_vec3(s: &str, what: &str) -> Result<Vec3> {
    let v = parse_list(s, what)?;
    if v.len() != 3 {
        return Err(Error::Parse(format!(
            "{what} `{s}` needs three comma-separated components"
        )));
    }
    Ok(Vec3::new(v[0], v[1], v[2]))
}

impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "zero" {
            return Ok(FieldSpec::Zero);
        }
        if let Some(path) = s.strip_prefix("grid:") {
            if path.is_empty() {
                return Err(Error::Parse("`grid:` needs a path".into()));
            }
            return Ok(FieldSpec::Grid(path.into()));
        }
        if s.ends_with(".csv") {
            return Ok(FieldSpec::Grid(s.into()));
        }
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["landau", beta] => Ok(FieldSpec::Landau {
                beta: number(beta, "beta")?,
                direction: None,
            }),
            ["landau", beta, dir] => Ok(FieldSpec::Landau {
                beta: number(beta, "beta")?,
                direction: Some(parse_vec3(dir, "direction")?),
            }),
            ["swirl", profile, amp] => {
                if ProfileRegistry::builtin().describe(profile).is_none() {
                    return Err(Error::Parse(format!("unknown swirl profile `{profile}`")));
                }
                Ok(FieldSpec::Swirl {
                    profile: profile.to_string(),
                    amplitude: number(amp, "amplitude")?,
                })
            }
            [head, ..] => Err(Error::Parse(format!(
                "unknown field selector `{head}` in `{s}`"
            ))),
            [] => Err(Error::Parse("empty field selector".into())),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Landau {
                beta,
                direction: None,
            } => write!(f, "landau:{beta}"),
            FieldSpec::Landau {
                beta,
                direction: Some(d),
            } => write!(f, "landau:{beta}:{},{},{}", d.x, d.y, d.z),
            FieldSpec::Swirl { profile, amplitude } => write!(f, "swirl:{profile}:{amplitude}"),
            FieldSpec::Zero => f.write_str("zero"),
            FieldSpec::Grid(p) => write!(f, "grid:{}", p.display()),
        }
    }
}

impl FieldSpec {
    pub fn landau(&self) -> Result<Option<LandauSolution>> {
        match self {
            FieldSpec::Landau { beta, direction } => {
                let d = direction.unwrap_or_else(Vec3::z);
                Ok(Some(LandauSolution::with_direction(*beta, &d)?))
            }
            _ => Ok(None),
        }
    }

    /// The vector field the selector names: the Landau velocity, the swirl
    /// field, zero, or the grid dump as `w^θ e_θ`.
    pub fn vector(&self) -> Result<SharedVector> {
        Ok(match self {
            FieldSpec::Landau { .. } => Arc::new(self.landau()?.expect("landau spec").velocity()),
            FieldSpec::Swirl { profile, amplitude } => Arc::new(SwirlField::from_registry(
                profile,
                *amplitude,
                &ProfileParams::default(),
            )?),
            FieldSpec::Zero => Arc::new(ZeroField),
            FieldSpec::Grid(path) => {
                let file = std::fs::File::open(path)
                    .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                Arc::new(GridField(GridScalar::read_csv(file)?))
            }
        })
    }

    /// A `(u, B, p)` bundle: Landau gives `(U, 0, P)`; other selectors give
    /// `(0, field, 0)`.
    pub fn triple(&self) -> Result<FieldTriple> {
        match self {
            FieldSpec::Landau { .. } => {
                Ok(FieldTriple::landau(&self.landau()?.expect("landau spec")))
            }
            FieldSpec::Zero => Ok(FieldTriple::zero()),
            _ => Ok(FieldTriple::new(
                Arc::new(ZeroField),
                self.vector()?,
                Some(Arc::new(ConstantScalar(0.0))),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_round_trips() {
        for s in [
            "landau:1",
            "landau:0.5:1,0,0",
            "swirl:gauss:2",
            "zero",
            "grid:a/b.csv",
        ] {
            let f: FieldSpec = s.parse().unwrap();
            assert_eq!(f.to_string(), s);
        }
        assert_eq!(
            "dump.csv".parse::<FieldSpec>().unwrap(),
            FieldSpec::Grid("dump.csv".into())
        );
    }

    #[test]
    fn rejects_with_offending_token() {
        let e = "vortex:1".parse::<FieldSpec>().unwrap_err().to_string();
        assert!(e.contains("vortex"));
        let e = "landau:abc".parse::<FieldSpec>().unwrap_err().to_string();
        assert!(e.contains("abc"));
        let e = "swirl:spiral:1"
            .parse::<FieldSpec>()
            .unwrap_err()
            .to_string();
        assert!(e.contains("spiral"));
        assert!("landau:1:1,2".parse::<FieldSpec>().is_err());
        assert!("landau:nan".parse::<FieldSpec>().is_err());
    }

    #[test]
    fn builds_fields() {
        let t = "landau:1:1,0,0"
            .parse::<FieldSpec>()
            .unwrap()
            .triple()
            .unwrap();
        let u = t.u.value(&Vec3::new(1.0, 0.0, 0.0)).unwrap();
        assert!(u.x > 0.0 && u.y.abs() < 1e-14);
        let t = "swirl:poly:1"
            .parse::<FieldSpec>()
            .unwrap()
            .triple()
            .unwrap();
        assert_eq!(t.u.value(&Vec3::new(0.3, 0.0, 0.0)).unwrap(), Vec3::zeros());
        assert!("landau:1:0,0,0"
            .parse::<FieldSpec>()
            .unwrap()
            .triple()
            .is_err());
    }
}
