//! Typed result tables and their CSV / JSON encodings.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value as Json};

use crate::config::Format;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Real,
    Integer,
    /// Emitted as two real columns `<name>_re`, `<name>_im`.
    Complex,
    Bool,
    Text,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
}

impl Column {
    pub fn new(name: &str, kind: ColumnKind) -> Self {
        Self { name: name.to_string(), kind }
    }

    fn headers(&self) -> Vec<String> {
        match self.kind {
            ColumnKind::Complex => vec![format!("{}_re", self.name), format!("{}_im", self.name)],
            _ => vec![self.name.clone()],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Real(f64),
    Integer(i64),
    Complex(Complex64),
    Bool(bool),
    Text(String),
}

impl Value {
    fn kind(&self) -> ColumnKind {
        match self {
            Self::Real(_) => ColumnKind::Real,
            Self::Integer(_) => ColumnKind::Integer,
            Self::Complex(_) => ColumnKind::Complex,
            Self::Bool(_) => ColumnKind::Bool,
            Self::Text(_) => ColumnKind::Text,
        }
    }

    /// Bitwise equality for floats, so NaN round-trips compare equal.
    pub fn same(&self, other: &Value) -> bool {
        match (self, other) {
            (Self::Real(a), Self::Real(b)) => a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()),
            (Self::Complex(a), Self::Complex(b)) => {
                Self::Real(a.re).same(&Self::Real(b.re)) && Self::Real(a.im).same(&Self::Real(b.im))
            }
            _ => self == other,
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Self::Real(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Self::Integer(x as i64)
    }
}

impl From<bool> for Value {
    fn from(x: bool) -> Self {
        Self::Bool(x)
    }
}

impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Self::Text(x.to_string())
    }
}

impl From<String> for Value {
    fn from(x: String) -> Self {
        Self::Text(x)
    }
}

impl From<Complex64> for Value {
    fn from(x: Complex64) -> Self {
        Self::Complex(x)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error("row has {found} values, table has {expected} columns")]
    Width { expected: usize, found: usize },
    #[error("column {column} expects {expected:?}, got {found:?}")]
    Kind { column: String, expected: ColumnKind, found: ColumnKind },
    #[error("cannot parse {text:?} in column {column}")]
    Parse { column: String, text: String },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// One stage of an experiment, written as `<experiment>-<stage>.<ext>`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub experiment: String,
    pub stage: String,
    columns: Vec<Column>,
    rows: Vec<Vec<Value>>,
}

impl ResultTable {
    pub fn new(experiment: &str, stage: &str, columns: Vec<Column>) -> Self {
        Self { experiment: experiment.into(), stage: stage.into(), columns, rows: Vec::new() }
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn push(&mut self, row: Vec<Value>) -> Result<(), TableError> {
        if row.len() != self.columns.len() {
            return Err(TableError::Width { expected: self.columns.len(), found: row.len() });
        }
        for (col, v) in self.columns.iter().zip(&row) {
            if v.kind() != col.kind {
                return Err(TableError::Kind { column: col.name.clone(), expected: col.kind, found: v.kind() });
            }
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Rows whose `pass` column is false.
    pub fn failures(&self) -> usize {
        let Some(k) = self.column_index("pass") else { return 0 };
        self.rows.iter().filter(|r| r[k] == Value::Bool(false)).count()
    }

    pub fn file_stem(&self) -> String {
        format!("{}-{}", self.experiment, self.stage)
    }

    /// Equality with NaN-tolerant float comparison.
    pub fn same(&self, other: &ResultTable) -> bool {
        self.experiment == other.experiment
            && self.stage == other.stage
            && self.columns == other.columns
            && self.rows.len() == other.rows.len()
            && self.rows.iter().zip(&other.rows).all(|(a, b)| a.iter().zip(b).all(|(x, y)| x.same(y)))
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, TableError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.columns.iter().flat_map(Column::headers))?;
        for row in &self.rows {
            let mut fields = Vec::with_capacity(row.len() + 2);
            for v in row {
                match v {
                    Value::Real(x) => fields.push(real_text(*x)),
                    Value::Integer(n) => fields.push(n.to_string()),
                    Value::Complex(z) => {
                        fields.push(real_text(z.re));
                        fields.push(real_text(z.im));
                    }
                    Value::Bool(b) => fields.push(b.to_string()),
                    Value::Text(s) => fields.push(s.clone()),
                }
            }
            w.write_record(&fields)?;
        }
        w.flush().map_err(|e| TableError::Io { path: PathBuf::new(), source: e })?;
        w.into_inner().map_err(|e| TableError::Io { path: PathBuf::new(), source: e.into_error() })
    }

    pub fn from_csv(experiment: &str, stage: &str, columns: Vec<Column>, bytes: &[u8]) -> Result<Self, TableError> {
        let mut r = csv::Reader::from_reader(bytes);
        let expected: Vec<String> = columns.iter().flat_map(Column::headers).collect();
        let headers: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        if headers != expected {
            return Err(TableError::Parse { column: "header".into(), text: headers.join(",") });
        }
        let mut table = Self::new(experiment, stage, columns);
        for record in r.records() {
            let record = record?;
            let mut fields = record.iter();
            let mut row = Vec::with_capacity(table.columns.len());
            for col in &table.columns {
                let mut next = || fields.next().unwrap_or_default().to_string();
                row.push(parse_field(col, &next(), &mut next)?);
            }
            table.push(row)?;
        }
        Ok(table)
    }

    /// `{"metadata": ..., "columns": {name: [values]}}`.
    pub fn to_json(&self, metadata: &Metadata) -> Result<Vec<u8>, TableError> {
        let mut cols = Map::new();
        for (k, col) in self.columns.iter().enumerate() {
            match col.kind {
                ColumnKind::Complex => {
                    let re = self.rows.iter().map(|r| json_real(complex_of(&r[k]).re)).collect();
                    let im = self.rows.iter().map(|r| json_real(complex_of(&r[k]).im)).collect();
                    cols.insert(format!("{}_re", col.name), Json::Array(re));
                    cols.insert(format!("{}_im", col.name), Json::Array(im));
                }
                _ => {
                    let values = self.rows.iter().map(|r| json_value(&r[k])).collect();
                    cols.insert(col.name.clone(), Json::Array(values));
                }
            }
        }
        let doc = json!({ "metadata": metadata, "columns": cols });
        let mut out = serde_json::to_vec_pretty(&doc)?;
        out.push(b'\n');
        Ok(out)
    }

    pub fn from_json(bytes: &[u8]) -> Result<(Self, Metadata), TableError> {
        let doc: Json = serde_json::from_slice(bytes)?;
        let metadata: Metadata = serde_json::from_value(doc["metadata"].clone())?;
        let cols = doc["columns"].as_object().cloned().unwrap_or_default();
        let bad = |column: &str| TableError::Parse { column: column.into(), text: "missing or malformed".into() };
        let array = |name: &str| cols.get(name).and_then(Json::as_array).ok_or_else(|| bad(name));
        let len = match metadata.columns.first() {
            Some(c) => array(&c.headers()[0])?.len(),
            None => 0,
        };
        let mut table = Self::new(&metadata.experiment, &metadata.stage, metadata.columns.clone());
        for i in 0..len {
            let mut row = Vec::with_capacity(table.columns.len());
            for col in &table.columns {
                let headers = col.headers();
                let cell = |h: &str| array(h).and_then(|a| a.get(i).cloned().ok_or_else(|| bad(h)));
                let v = match col.kind {
                    ColumnKind::Complex => Value::Complex(Complex64::new(
                        json_to_real(&cell(&headers[0])?).ok_or_else(|| bad(&headers[0]))?,
                        json_to_real(&cell(&headers[1])?).ok_or_else(|| bad(&headers[1]))?,
                    )),
                    ColumnKind::Real => Value::Real(json_to_real(&cell(&col.name)?).ok_or_else(|| bad(&col.name))?),
                    ColumnKind::Integer => Value::Integer(cell(&col.name)?.as_i64().ok_or_else(|| bad(&col.name))?),
                    ColumnKind::Bool => Value::Bool(cell(&col.name)?.as_bool().ok_or_else(|| bad(&col.name))?),
                    ColumnKind::Text => {
                        Value::Text(cell(&col.name)?.as_str().ok_or_else(|| bad(&col.name))?.to_string())
                    }
                };
                row.push(v);
            }
            table.push(row)?;
        }
        Ok((table, metadata))
    }
}

fn complex_of(v: &Value) -> Complex64 {
    match v {
        Value::Complex(z) => *z,
        _ => unreachable!("column kinds are checked on push"),
    }
}

/// 17 significant digits, enough for an exact `f64` round trip.
fn real_text(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn json_real(x: f64) -> Json {
    match serde_json::Number::from_f64(x) {
        Some(n) => Json::Number(n),
        None => Json::String(x.to_string()),
    }
}

fn json_value(v: &Value) -> Json {
    match v {
        Value::Real(x) => json_real(*x),
        Value::Integer(n) => json!(n),
        Value::Bool(b) => json!(b),
        Value::Text(s) => json!(s),
        Value::Complex(_) => unreachable!("complex columns are split"),
    }
}

fn json_to_real(v: &Json) -> Option<f64> {
    match v {
        Json::Number(n) => n.as_f64(),
        Json::String(s) => s.parse().ok(),
        _ => None,
    }
}

fn parse_field(col: &Column, first: &str, next: &mut dyn FnMut() -> String) -> Result<Value, TableError> {
    let err = |text: &str| TableError::Parse { column: col.name.clone(), text: text.to_string() };
    let real = |s: &str| s.parse::<f64>().map_err(|_| err(s));
    Ok(match col.kind {
        ColumnKind::Real => Value::Real(real(first)?),
        ColumnKind::Integer => Value::Integer(first.parse().map_err(|_| err(first))?),
        ColumnKind::Complex => {
            let im = next();
            Value::Complex(Complex64::new(real(first)?, real(&im)?))
        }
        ColumnKind::Bool => Value::Bool(first.parse().map_err(|_| err(first))?),
        ColumnKind::Text => Value::Text(first.to_string()),
    })
}

/// Sidecar for CSV output, embedded in JSON output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub experiment: String,
    pub stage: String,
    pub version: String,
    /// The configuration file, byte for byte.
    pub config: String,
    pub seed: u64,
    pub format: Format,
    pub wall_clock_seconds: f64,
    pub columns: Vec<Column>,
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), TableError> {
    let io = |source| TableError::Io { path: path.to_path_buf(), source };
    let dir = path.parent().unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(bytes).map_err(io)?;
    f.sync_all().map_err(io)?;
    drop(f);
    fs::rename(&tmp, path).map_err(io)
}
