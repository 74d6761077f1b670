//! Tabular results with a metadata header, rendered as CSV or JSON.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde_json::{Map, Value};

/// Output encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A table plus `key=value` metadata and optional nested JSON extras.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Artifact {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    /// Additional JSON members (ignored by CSV apart from a note).
    pub extra: Map<String, Value>,
}

impl Artifact {
    pub fn new(columns: &[&str]) -> Self {
        Artifact {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn row(&mut self, cells: Vec<Value>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    /// Value of column `name` in row `i`.
    pub fn get(&self, i: usize, name: &str) -> Option<&Value> {
        let c = self.columns.iter().position(|c| c == name)?;
        self.rows.get(i)?.get(c)
    }

    pub fn render(&self, format: Format) -> io::Result<Vec<u8>> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => {
                let mut v = serde_json::to_vec_pretty(&self.to_json())?;
                v.push(b'\n');
                Ok(v)
            }
        }
    }

    fn to_csv(&self) -> io::Result<Vec<u8>> {
        let mut out = Vec::new();
        for (k, v) in &self.meta {
            writeln!(out, "# {k}={v}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(cell_text))?;
        }
        w.into_inner().map_err(|e| e.into_error())
    }

    pub fn to_json(&self) -> Value {
        let meta: Map<String, Value> = self.meta.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().cloned().zip(r.iter().cloned()).collect()))
            .collect();
        let mut obj = Map::new();
        obj.insert("meta".into(), Value::Object(meta));
        obj.insert("rows".into(), Value::Array(rows));
        for (k, v) in &self.extra {
            obj.insert(k.clone(), v.clone());
        }
        Value::Object(obj)
    }
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// A float cell; non-finite values become strings so JSON stays valid.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or_else(|| Value::String(x.to_string()))
}

pub fn text(s: impl ToString) -> Value {
    Value::String(s.to_string())
}

/// Writes `bytes` to `path` through a temporary file in the same
/// directory, so a failed run never leaves a partial file behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_header_comments_and_quotes() {
        let mut a = Artifact::new(&["x", "interval"]);
        a.meta("tool", "cfmetric");
        a.row(vec![num(0.5), text("[2/3, 3/4)")]);
        let s = String::from_utf8(a.render(Format::Csv).unwrap()).unwrap();
        assert_eq!(s, "# tool=cfmetric\nx,interval\n0.5,\"[2/3, 3/4)\"\n");
        let j = a.to_json();
        assert_eq!(j["rows"][0]["interval"], "[2/3, 3/4)");
        assert_eq!(j["meta"]["tool"], "cfmetric");
    }

    #[test]
    fn atomic_write_replaces_target() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub").join("a.csv");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"two");
        assert_eq!(fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
