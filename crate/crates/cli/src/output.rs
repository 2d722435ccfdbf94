//! Report writers: CSV rows, JSON summaries with round-trip-exact floats.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

use crate::config::RunConfig;
use crate::CliError;

pub const SCHEMA: u64 = 1;
pub const TOOL: &str = "cmpk";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Float text with 17 significant digits; empty for `None`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// `x:y:z` with 17 significant digits per coordinate.
pub fn fmt_coords(c: &[f64]) -> String {
    c.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(":")
}

/// Pretty JSON whose floats are always written in `{:.16e}` form.
struct ExactFloats(PrettyFormatter<'static>);

impl Formatter for ExactFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write!(w, "{v:.16e}")
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        write!(w, "{:.16e}", v as f64)
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json_string<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExactFloats(PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .map_err(|e| CliError::Io(format!("serializing report: {e}")))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

pub fn to_value<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("report types serialize to JSON")
}

/// Summary skeleton shared by every command.
pub fn summary(cfg: &RunConfig, space_id: &str, diagnostic_only: bool) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("schema".into(), SCHEMA.into());
    m.insert("tool".into(), TOOL.into());
    m.insert("version".into(), VERSION.into());
    m.insert("command".into(), cfg.command.clone().into());
    m.insert("config".into(), to_value(cfg));
    m.insert("seed".into(), cfg.seed.into());
    m.insert("space".into(), space_id.into());
    m.insert("diagnostic_only".into(), diagnostic_only.into());
    m
}

/// Rows as CSV with a header line.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
        let mut w = csv::Writer::from_path(path).map_err(io)?;
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        w.flush()
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}

/// Writes `<out>/<cmd>_rows.csv` and `<out>/<cmd>_summary.json`.
pub fn write_report(
    out: &Path,
    command: &str,
    table: &Table,
    summary: &serde_json::Map<String, Value>,
) -> Result<(PathBuf, PathBuf), CliError> {
    std::fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    let rows = out.join(format!("{command}_rows.csv"));
    let sum = out.join(format!("{command}_summary.json"));
    table.write(&rows)?;
    let text = to_json_string(&Value::Object(summary.clone()))?;
    std::fs::write(&sum, text).map_err(|e| CliError::Io(format!("{}: {e}", sum.display())))?;
    Ok((rows, sum))
}

/// Checks the fields every summary must carry.
pub fn validate_summary(v: &Value) -> Result<(), String> {
    let obj = v.as_object().ok_or("summary is not a JSON object")?;
    let field = |k: &str| obj.get(k).ok_or_else(|| format!("missing field {k:?}"));
    if field("schema")?.as_u64() != Some(SCHEMA) {
        return Err(format!("schema must be {SCHEMA}"));
    }
    if field("tool")?.as_str() != Some(TOOL) {
        return Err(format!("tool must be {TOOL:?}"));
    }
    field("version")?.as_str().ok_or("version must be a string")?;
    let cmd = field("command")?.as_str().ok_or("command must be a string")?;
    let config = field("config")?.as_object().ok_or("config must be an object")?;
    if config.get("command").and_then(Value::as_str) != Some(cmd) {
        return Err("config echo does not match the command".into());
    }
    if config.get("space").and_then(Value::as_object).is_none() {
        return Err("config echo lacks the space descriptor".into());
    }
    field("seed")?
        .as_u64()
        .ok_or("seed must be an unsigned integer")?;
    field("space")?.as_str().ok_or("space must be a string")?;
    field("diagnostic_only")?
        .as_bool()
        .ok_or("diagnostic_only must be a boolean")?;
    let counts = field("counts")?.as_object().ok_or("counts must be an object")?;
    if counts.values().any(|c| c.as_u64().is_none()) {
        return Err("counts must be unsigned integers".into());
    }
    Ok(())
}
