use crate::error::{Error, Result};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

/// Overrides the configured output directory.
pub const OUT_DIR_ENV: &str = "SINGULAR_MHD_OUT";

pub const EXIT_OK: i32 = 0;
/// Reading or writing files failed.
pub const EXIT_IO: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_VERIFY_FAILED: i32 = 4;
pub const EXIT_SOLVER: i32 = 5;

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) => EXIT_PARSE,
        Error::SolverFailure(_) | Error::NotContracting { .. } => EXIT_SOLVER,
        Error::Io(_) => EXIT_IO,
        _ => EXIT_DOMAIN,
    }
}

/// `--out-dir`, else the environment, else the configured directory.
pub fn resolve_out_dir(flag: Option<&Path>, configured: &Path) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => configured.to_path_buf(),
    }
}

/// A CSV artifact: `# key=value` lines, a header row, then data rows.
pub struct CsvArtifact {
    metadata: Vec<(String, String)>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvArtifact {
    pub fn new(command: &str, header: &[&str]) -> Self {
        Self {
            metadata: vec![
                ("command".into(), command.into()),
                ("version".into(), env!("CARGO_PKG_VERSION").into()),
            ],
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.metadata.push((key.into(), value.to_string()));
        self
    }

    pub fn extend_meta(&mut self, pairs: impl IntoIterator<Item = (String, String)>) -> &mut Self {
        self.metadata.extend(pairs);
        self
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}={v}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save(&self, dir: &Path, name: &str) -> Result<PathBuf> {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        let path = dir.join(name);
        let file =
            File::create(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        self.write_to(BufWriter::new(file))?;
        Ok(path)
    }
}

/// Shortest round-trip float text.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}
