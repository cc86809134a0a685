use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

/// One CSV cell. Floats are written with 17 significant digits so that a
/// value round-trips exactly and reruns compare byte for byte.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    F(f64),
    I(u64),
    B(bool),
    S(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(x) if x.is_nan() => "nan".into(),
            Cell::F(x) if x.is_infinite() => if *x > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::F(x) => format!("{x:.16e}"),
            Cell::I(n) => n.to_string(),
            Cell::B(b) => b.to_string(),
            Cell::S(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::I(n as u64)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::I(n)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::B(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::S(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::S(s)
    }
}

#[derive(Clone, Debug)]
pub struct Table {
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
    /// Extra `#` lines written after the hash header (failures, notes).
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(columns: &'static [&'static str]) -> Self {
        Table { columns, rows: Vec::new(), notes: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, command: &str, config_file: &str, config_hash: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# mswt {} {command}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(out, "# config: {config_file}");
        let _ = writeln!(out, "# config_sha256: {config_hash}");
        for n in &self.notes {
            let _ = writeln!(out, "# {n}");
        }
        let mut w = csv::Writer::from_writer(out.into_bytes());
        w.write_record(self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }
}

pub fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Writes `<command>.config.toml` and `<command>.csv` into `dir`. Returns
/// the CSV path.
pub fn write_outputs(dir: &Path, command: &str, snapshot: &str, table: &Table) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let config_name = format!("{command}.config.toml");
    fs::write(dir.join(&config_name), snapshot)?;
    let csv = dir.join(format!("{command}.csv"));
    fs::write(&csv, table.render(command, &config_name, &sha256_hex(snapshot)))?;
    Ok(csv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits() {
        assert_eq!(Cell::F(0.1).render(), "1.0000000000000001e-1");
        assert_eq!(Cell::F(-2.0).render(), "-2.0000000000000000e0");
        let x = std::f64::consts::PI;
        assert_eq!(Cell::F(x).render().parse::<f64>().unwrap(), x);
    }

    #[test]
    fn header_only_table() {
        let t = Table::new(&["a", "b"]);
        let s = t.render("x", "x.config.toml", "00");
        assert_eq!(s.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>(), ["a,b"]);
    }
}
