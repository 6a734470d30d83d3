//! Deterministic CSV and JSON rendering.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

/// Environment variable that overrides the output directory when no flag is
/// given.
pub const OUT_DIR_ENV: &str = "EP2D_OUT_DIR";

/// 17 significant digits, enough to round-trip any double.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

/// A numeric table; `None` cells are written empty.
#[derive(Debug, Clone)]
pub struct Table {
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(header: &'static [&'static str]) -> Self {
        Table {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn push_values(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&v| Some(v)).collect());
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(self.header).expect("write to memory");
        for row in &self.rows {
            let cells = row.iter().map(|c| c.map(fmt_num).unwrap_or_default());
            w.write_record(cells).expect("write to memory");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("ascii output")
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// `--out-dir`, else `$EP2D_OUT_DIR`, else the working directory.
pub fn resolve_out_dir(flag: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => PathBuf::from("."),
    }
}

pub fn write_artifact(dir: &Path, name: &str, content: &str) -> Result<PathBuf, CliError> {
    let io = |source, path: &Path| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    std::fs::create_dir_all(dir).map_err(|e| io(e, dir))?;
    let path = dir.join(name);
    std::fs::write(&path, content).map_err(|e| io(e, &path))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_uses_fixed_precision_and_newlines() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![Some(0.1), None]);
        t.push_values(&[1.0, -2.5e-300]);
        assert_eq!(
            t.to_csv(),
            "a,b\n1.0000000000000001e-1,\n1.0000000000000000e0,-2.5000000000000000e-300\n"
        );
    }

    #[test]
    fn formatted_numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, std::f64::consts::PI * 1e200, -7.0e-310] {
            assert_eq!(fmt_num(v).parse::<f64>().unwrap(), v);
        }
    }
}
