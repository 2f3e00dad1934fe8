//! Plain CSV and JSON output.
//!
//! CSV files start with `# key: value` provenance lines, then a header row;
//! fields are comma-separated, lines end in `\n`, and floats are written with
//! 17 significant digits so they round-trip exactly.

use std::io::{self, Write};

use serde::Serialize;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Float(x) => write!(f, "{x:.16e}"),
            Cell::Int(i) => write!(f, "{i}"),
            Cell::Text(s) if s.contains([',', '"', '\n']) => write!(f, "\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

/// Key/value pairs written ahead of every output.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Provenance(pub Vec<(String, String)>);

impl Provenance {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.0.push((key.to_string(), value.to_string()));
        self
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Object(
            self.0.iter().map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone()))).collect(),
        )
    }
}

pub fn write_csv<W: Write>(
    mut w: W,
    provenance: &Provenance,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<Cell>>,
) -> io::Result<()> {
    for (k, v) in &provenance.0 {
        writeln!(w, "# {k}: {}", v.replace('\n', " "))?;
    }
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        let line: Vec<String> = row.iter().map(Cell::to_string).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()
}

/// Pretty JSON of `{"provenance": {...}, "result": value}`. Object keys come
/// out sorted, so the layout is stable across versions of the structs.
pub fn write_json<W: Write, S: Serialize>(mut w: W, provenance: &Provenance, value: &S) -> io::Result<()> {
    let doc = serde_json::json!({
        "provenance": provenance.to_json(),
        "result": serde_json::to_value(value)?,
    });
    serde_json::to_writer_pretty(&mut w, &doc)?;
    writeln!(w)?;
    w.flush()
}

/// Data rows of a CSV written by [`write_csv`], skipping provenance and
/// header lines.
pub fn read_csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        let p = Provenance::new().with("seed", 0);
        write_csv(&mut buf, &p, &["x", "n"], vec![vec![Cell::from(0.1), Cell::from(3usize)]]).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s, "# seed: 0\nx,n\n1.0000000000000001e-1,3\n");
        let rows = read_csv_rows(&s);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0][0].parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn floats_round_trip() {
        for x in [std::f64::consts::PI, 1e-300, -2.5e17, 0.0] {
            assert_eq!(Cell::from(x).to_string().parse::<f64>().unwrap(), x);
        }
    }
}
