use crate::error::{Error, Result};
use crate::fields::VectorField;
use crate::geometry::{to_spherical, Vec3};
use std::f64::consts::PI;
use std::io::{BufRead, BufReader, Read, Write};

/// Uniform `(ρ, φ)` grid over the shell `rho_min ≤ ρ ≤ rho_max`, with
/// `φ` running over `[0, π]` so that the first and last columns are the axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusGrid {
    pub rho_min: f64,
    pub rho_max: f64,
    pub n_rho: usize,
    pub n_phi: usize,
}

impl AnnulusGrid {
    pub const DEFAULT_RHO_MIN: f64 = 0.05;
    pub const DEFAULT_RHO_MAX: f64 = 2.0;

    pub fn new(rho_min: f64, rho_max: f64, n_rho: usize, n_phi: usize) -> Result<Self> {
        if !(rho_min > 0.0 && rho_max > rho_min && rho_max.is_finite()) {
            return Err(Error::Domain(format!(
                "grid radii must satisfy 0 < rho_min < rho_max, got ({rho_min}, {rho_max})"
            )));
        }
        if n_rho < 8 || n_phi < 8 {
            return Err(Error::Domain(format!(
                "grid needs at least 8x8 nodes, got {n_rho}x{n_phi}"
            )));
        }
        Ok(Self {
            rho_min,
            rho_max,
            n_rho,
            n_phi,
        })
    }

    /// Default shell `[0.05, 2]`.
    pub fn with_sizes(n_rho: usize, n_phi: usize) -> Result<Self> {
        Self::new(Self::DEFAULT_RHO_MIN, Self::DEFAULT_RHO_MAX, n_rho, n_phi)
    }

    pub fn h_rho(&self) -> f64 {
        (self.rho_max - self.rho_min) / (self.n_rho - 1) as f64
    }

    pub fn h_phi(&self) -> f64 {
        PI / (self.n_phi - 1) as f64
    }

    pub fn rho(&self, i: usize) -> f64 {
        if i + 1 == self.n_rho {
            self.rho_max
        } else {
            self.rho_min + i as f64 * self.h_rho()
        }
    }

    pub fn phi(&self, j: usize) -> f64 {
        if j + 1 == self.n_phi {
            PI
        } else {
            j as f64 * self.h_phi()
        }
    }

    pub fn len(&self) -> usize {
        self.n_rho * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_phi + j
    }

    pub fn is_axis(&self, j: usize) -> bool {
        j == 0 || j + 1 == self.n_phi
    }

    pub fn is_interior(&self, i: usize, j: usize) -> bool {
        i > 0 && i + 1 < self.n_rho && !self.is_axis(j)
    }

    /// Twice-refined grid on the same shell: `2n − 1` nodes per direction,
    /// so every old node is a new node.
    pub fn doubled(&self) -> Self {
        Self {
            n_rho: 2 * self.n_rho - 1,
            n_phi: 2 * self.n_phi - 1,
            ..*self
        }
    }
}

/// Node values `w^θ(ρ_i, φ_j)`, `φ` index fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridScalar {
    pub grid: AnnulusGrid,
    pub values: Vec<f64>,
}

impl GridScalar {
    pub fn zeros(grid: AnnulusGrid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    /// Samples `f(ρ, φ)`; axis columns are set to zero regardless of `f`.
    pub fn from_fn<F: FnMut(f64, f64) -> f64>(grid: AnnulusGrid, mut f: F) -> Self {
        let mut out = Self::zeros(grid);
        for i in 0..grid.n_rho {
            for j in 1..grid.n_phi - 1 {
                out.values[grid.index(i, j)] = f(grid.rho(i), grid.phi(j));
            }
        }
        out
    }

    /// `e_θ · F` at `(ρ, φ, θ = 0)`, where `e_θ = e_y`.
    pub fn from_field_swirl(grid: AnnulusGrid, field: &dyn VectorField) -> Result<Self> {
        let mut out = Self::zeros(grid);
        for i in 0..grid.n_rho {
            for j in 1..grid.n_phi - 1 {
                let (r, p) = (grid.rho(i), grid.phi(j));
                let x = Vec3::new(r * p.sin(), 0.0, r * p.cos());
                out.values[grid.index(i, j)] = field.value(&x)?.y;
            }
        }
        Ok(out)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.grid.index(i, j);
        self.values[k] = v;
    }

    fn same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Domain("grid scalars live on different grids".into()));
        }
        Ok(())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_grid(other)?;
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Max over interior nodes only.
    pub fn interior_max_abs(&self) -> f64 {
        let g = self.grid;
        let mut m: f64 = 0.0;
        for i in 1..g.n_rho - 1 {
            for j in 1..g.n_phi - 1 {
                m = m.max(self.get(i, j).abs());
            }
        }
        m
    }

    /// `(Σ |v|² dV)^{1/2}` with trapezoid weights `dV = 2π ρ² sinφ h_ρ h_φ`.
    pub fn l2_norm(&self) -> f64 {
        self.weighted_sum(|v| v * v).sqrt()
    }

    fn weighted_sum<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let g = self.grid;
        let dv = 2.0 * PI * g.h_rho() * g.h_phi();
        let mut s = 0.0;
        for i in 0..g.n_rho {
            let r = g.rho(i);
            let end = if i == 0 || i + 1 == g.n_rho { 0.5 } else { 1.0 };
            for j in 1..g.n_phi - 1 {
                s += f(self.get(i, j)) * r * r * g.phi(j).sin() * dv * end;
            }
        }
        s
    }

    /// Discrete stand-in for a `W^{1,q}` norm: `ℓ^q` of the values plus
    /// forward difference quotients in `ρ` and `φ/ρ`, volume weighted.
    pub fn w1q_norm(&self, q: f64) -> Result<f64> {
        if !(q >= 1.0 && q.is_finite()) {
            return Err(Error::Domain(format!("norm exponent q = {q} must be >= 1")));
        }
        let g = self.grid;
        let (hr, hp) = (g.h_rho(), g.h_phi());
        let dv = 2.0 * PI * hr * hp;
        let mut s = 0.0;
        for i in 0..g.n_rho {
            let r = g.rho(i);
            for j in 0..g.n_phi {
                let w = r * r * g.phi(j).sin().max(0.0) * dv;
                let v = self.get(i, j);
                let dr = if i + 1 < g.n_rho {
                    (self.get(i + 1, j) - v) / hr
                } else {
                    0.0
                };
                let dp = if j + 1 < g.n_phi {
                    (self.get(i, j + 1) - v) / (hp * r)
                } else {
                    0.0
                };
                s += w * (v.abs().powf(q) + dr.abs().powf(q) + dp.abs().powf(q));
            }
        }
        Ok(s.powf(1.0 / q))
    }

    pub fn axis_is_zero(&self) -> bool {
        (0..self.grid.n_rho)
            .all(|i| self.get(i, 0) == 0.0 && self.get(i, self.grid.n_phi - 1) == 0.0)
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.values.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite("grid values"))
        }
    }

    /// Bilinear interpolation at `(ρ, φ)` inside the grid.
    pub fn interpolate(&self, rho: f64, phi: f64) -> Result<f64> {
        let g = self.grid;
        if rho < g.rho_min || rho > g.rho_max {
            return Err(Error::DomainExceeded {
                radius: rho,
                domain: if rho < g.rho_min {
                    g.rho_min
                } else {
                    g.rho_max
                },
            });
        }
        let tr = ((rho - g.rho_min) / g.h_rho()).clamp(0.0, (g.n_rho - 1) as f64);
        let tp = (phi / g.h_phi()).clamp(0.0, (g.n_phi - 1) as f64);
        let i = (tr.floor() as usize).min(g.n_rho - 2);
        let j = (tp.floor() as usize).min(g.n_phi - 2);
        let (fr, fp) = (tr - i as f64, tp - j as f64);
        Ok(
            (1.0 - fr) * ((1.0 - fp) * self.get(i, j) + fp * self.get(i, j + 1))
                + fr * ((1.0 - fp) * self.get(i + 1, j) + fp * self.get(i + 1, j + 1)),
        )
    }

    /// CSV with a `# key=value` preamble and columns `rho,phi,value`.
    pub fn write_csv<W: Write>(&self, out: W, metadata: &[(String, String)]) -> Result<()> {
        let mut out = out;
        let g = self.grid;
        for (k, v) in metadata {
            writeln!(out, "# {k}={v}")?;
        }
        writeln!(out, "# rho_min={}", g.rho_min)?;
        writeln!(out, "# rho_max={}", g.rho_max)?;
        writeln!(out, "# n_rho={}", g.n_rho)?;
        writeln!(out, "# n_phi={}", g.n_phi)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["rho", "phi", "value"])?;
        for i in 0..g.n_rho {
            for j in 0..g.n_phi {
                w.write_record([
                    format!("{:e}", g.rho(i)),
                    format!("{:e}", g.phi(j)),
                    format!("{:e}", self.get(i, j)),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Inverse of [`GridScalar::write_csv`]; the grid is recovered from the
    /// distinct `rho` and `phi` columns.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let reader = BufReader::new(input);
        let mut body = String::new();
        for line in reader.lines() {
            let line = line?;
            if !line.trim_start().starts_with('#') {
                body.push_str(&line);
                body.push('\n');
            }
        }
        let mut rdr = csv::Reader::from_reader(body.as_bytes());
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["rho", "phi", "value"] {
            return Err(Error::Parse(format!(
                "expected header rho,phi,value, got {headers:?}"
            )));
        }
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let parse = |k: usize| -> Result<f64> {
                rec[k]
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("bad number `{}`: {e}", &rec[k])))
            };
            rows.push((parse(0)?, parse(1)?, parse(2)?));
        }
        let n_phi = rows.iter().take_while(|r| r.0 == rows[0].0).count();
        if n_phi == 0 || rows.len() % n_phi != 0 {
            return Err(Error::Parse(
                "grid CSV is not a full tensor-product grid".into(),
            ));
        }
        let n_rho = rows.len() / n_phi;
        let grid = AnnulusGrid::new(rows[0].0, rows[rows.len() - 1].0, n_rho, n_phi)?;
        let values = rows.iter().map(|r| r.2).collect();
        let out = Self { grid, values };
        out.check_finite()?;
        Ok(out)
    }
}

/// A grid solution viewed as the 3D field `w^θ(ρ, φ) e_θ`.
#[derive(Debug, Clone)]
pub struct GridField(pub GridScalar);

impl VectorField for GridField {
    fn value(&self, x: &Vec3) -> Result<Vec3> {
        let c = to_spherical(x)?;
        let w = self.0.interpolate(c.rho, c.phi)?;
        let (s, co) = c.theta.sin_cos();
        Ok(Vec3::new(-s, co, 0.0) * w)
    }
}
