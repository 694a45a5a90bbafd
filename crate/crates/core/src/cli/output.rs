//! Tables, manifests and the two output formats.

use serde::Serialize;
use serde_json::Value;

use super::config::ConfigFile;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    Missing,
}

impl Cell {
    /// Plain-text rendering; floats get six fractional digits.
    pub fn render(&self) -> String {
        match self {
            Cell::Num(x) if x.is_finite() => {
                let s = format!("{x:.6}");
                match s.strip_prefix('-') {
                    Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
                    _ => s,
                }
            }
            Cell::Num(x) => x.to_string(),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Missing => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Num)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width in table {}", self.name);
        self.rows.push(row);
    }

    /// Two-column (name, bits) table.
    pub fn measures<'a>(name: &str, rows: impl IntoIterator<Item = (&'a str, f64)>) -> Self {
        let mut t = Self::new(name, &["name", "bits"]);
        for (k, v) in rows {
            t.push(vec![k.into(), v.into()]);
        }
        t
    }
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CommandOutput {
    pub tables: Vec<Table>,
    /// Machine-readable extras (region descriptors, full reports).
    pub details: serde_json::Map<String, Value>,
    /// Set when an internal invariant failed; the output is still written.
    pub violation: Option<String>,
}

impl CommandOutput {
    pub fn table(&mut self, t: Table) {
        self.tables.push(t);
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("detail serializes");
        self.details.insert(key.to_string(), v);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_digest: String,
    pub seed: u64,
    pub artifact_version: String,
    /// Seconds since the epoch from `SOURCE_DATE_EPOCH`, if set.
    pub timestamp: Option<String>,
}

impl RunManifest {
    pub fn new(command: String, config_digest: String, seed: u64) -> Self {
        Self {
            command,
            config_digest,
            seed,
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: std::env::var("SOURCE_DATE_EPOCH").ok().filter(|s| !s.is_empty()),
        }
    }
}

fn write_csv(out: &mut Vec<u8>, table: &Table) {
    out.extend_from_slice(format!("# {}\n", table.name).as_bytes());
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(&table.columns).expect("in-memory write");
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::render)).expect("in-memory write");
    }
    out.extend(w.into_inner().expect("in-memory flush"));
}

/// CSV sections, each introduced by a `# name` line, separated by blank lines.
pub fn render_table(manifest: &RunManifest, output: &CommandOutput) -> String {
    let mut meta = Table::new("manifest", &["key", "value"]);
    meta.push(vec!["command".into(), manifest.command.as_str().into()]);
    meta.push(vec!["config_digest".into(), manifest.config_digest.as_str().into()]);
    meta.push(vec!["seed".into(), manifest.seed.into()]);
    meta.push(vec!["artifact_version".into(), manifest.artifact_version.as_str().into()]);
    meta.push(vec![
        "timestamp".into(),
        manifest.timestamp.as_deref().map_or(Cell::Missing, Cell::from),
    ]);
    let mut out = Vec::new();
    for (i, t) in std::iter::once(&meta).chain(&output.tables).enumerate() {
        if i > 0 {
            out.push(b'\n');
        }
        write_csv(&mut out, t);
    }
    String::from_utf8(out).expect("csv output is utf-8")
}

/// One JSON document with the manifest, the resolved config and every table
/// at full precision.
pub fn render_structured(manifest: &RunManifest, config: &ConfigFile, output: &CommandOutput) -> String {
    let doc = serde_json::json!({
        "manifest": manifest,
        "config": config,
        "tables": output.tables,
        "details": output.details,
        "violation": output.violation,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("output serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_digits_half_even() {
        assert_eq!(Cell::Num(0.468995593589281).render(), "0.468996");
        assert_eq!(Cell::Num(0.0078125).render(), "0.007812");
        assert_eq!(Cell::Num(0.0234375).render(), "0.023438");
        assert_eq!(Cell::Num(1.0).render(), "1.000000");
        assert_eq!(Cell::Num(-1e-17).render(), "0.000000");
        assert_eq!(Cell::Num(-0.5).render(), "-0.500000");
        assert_eq!(Cell::Missing.render(), "");
    }

    #[test]
    fn csv_sections() {
        let m = RunManifest {
            command: "info".into(),
            config_digest: "ab".into(),
            seed: 3,
            artifact_version: "0".into(),
            timestamp: None,
        };
        let mut out = CommandOutput::default();
        out.table(Table::measures("measures", [("H(A|C)", 0.5), ("I(A;C)", 0.25)]));
        let text = render_table(&m, &out);
        assert!(text.contains("# measures\nname,bits\nH(A|C),0.500000\nI(A;C),0.250000\n"));
        assert!(text.starts_with("# manifest\nkey,value\ncommand,info\n"));
        assert!(text.contains("timestamp,\n"));
    }

    #[test]
    fn quoting() {
        let mut t = Table::new("t", &["label"]);
        t.push(vec!["min{a, b}".into()]);
        let mut out = Vec::new();
        write_csv(&mut out, &t);
        assert_eq!(String::from_utf8(out).unwrap(), "# t\nlabel\n\"min{a, b}\"\n");
    }
}
