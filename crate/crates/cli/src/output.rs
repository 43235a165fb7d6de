//! Table records and their CSV / JSON renderings.

use std::cmp::Ordering;
use std::io::{self, Write};

use clap::ValueEnum;
use monoword::exact::format_rational;
use monoword::Which;
use num_rational::BigRational;
use serde::Serialize;
use serde_json::value::RawValue;

pub const CSV_HEADER: [&str; 8] = [
    "route",
    "which",
    "n",
    "k",
    "N_or_t_or_s",
    "value",
    "err_bar",
    "exact_flag",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Exact(BigRational),
    Float(f64),
}

/// The abscissa column: word length N, time t or shift s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Param {
    Int(u32),
    Real(f64),
}

impl Param {
    fn as_f64(self) -> f64 {
        match self {
            Param::Int(v) => v as f64,
            Param::Real(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub route: &'static str,
    pub which: Option<Which>,
    pub n: Option<u32>,
    pub k: Option<u32>,
    pub x: Param,
    pub value: Value,
    pub err_bar: Option<f64>,
}

impl Record {
    pub fn exact(&self) -> bool {
        matches!(self.value, Value::Exact(_))
    }

    fn cmp_key(&self, other: &Self) -> Ordering {
        self.route
            .cmp(other.route)
            .then(self.which.cmp(&other.which))
            .then(self.k.cmp(&other.k))
            .then(self.n.cmp(&other.n))
            .then(self.x.as_f64().total_cmp(&other.x.as_f64()))
    }
}

/// Sort by parameter tuple so parallel runs write identical files.
pub fn sort_records(records: &mut [Record]) {
    records.sort_by(|a, b| a.cmp_key(b));
}

/// 17 significant digits.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

fn param_text(p: Param) -> String {
    match p {
        Param::Int(v) => v.to_string(),
        Param::Real(v) => format_float(v),
    }
}

fn value_text(v: &Value) -> String {
    match v {
        Value::Exact(r) => format_rational(r),
        Value::Float(x) => format_float(*x),
    }
}

pub fn write_csv<W: Write>(records: &[Record], out: W) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.route.to_string(),
            r.which.map(|w| w.tag().to_string()).unwrap_or_default(),
            r.n.map(|v| v.to_string()).unwrap_or_default(),
            r.k.map(|v| v.to_string()).unwrap_or_default(),
            param_text(r.x),
            value_text(&r.value),
            r.err_bar.map(format_float).unwrap_or_default(),
            r.exact().to_string(),
        ])?;
    }
    w.flush()
}

/// A float as a JSON number token with 17 significant digits; non-finite
/// values become null.
pub fn raw_float(x: f64) -> Box<RawValue> {
    let text = if x.is_finite() {
        format_float(x)
    } else {
        "null".into()
    };
    RawValue::from_string(text).expect("formatted float is valid JSON")
}

fn raw_string(s: &str) -> Box<RawValue> {
    RawValue::from_string(serde_json::to_string(s).expect("string")).expect("valid JSON")
}

#[derive(Serialize)]
struct JsonRecord {
    route: &'static str,
    which: Option<&'static str>,
    n: Option<u32>,
    k: Option<u32>,
    #[serde(rename = "N_or_t_or_s")]
    x: Box<RawValue>,
    value: Box<RawValue>,
    err_bar: Option<Box<RawValue>>,
    exact_flag: bool,
}

#[derive(Serialize)]
struct JsonTable<'a> {
    command: &'a str,
    records: Vec<JsonRecord>,
}

pub fn write_json<W: Write>(command: &str, records: &[Record], mut out: W) -> io::Result<()> {
    let records = records
        .iter()
        .map(|r| JsonRecord {
            route: r.route,
            which: r.which.map(Which::tag),
            n: r.n,
            k: r.k,
            x: match r.x {
                Param::Int(v) => RawValue::from_string(v.to_string()).expect("integer"),
                Param::Real(v) => raw_float(v),
            },
            value: match &r.value {
                Value::Exact(q) => raw_string(&format_rational(q)),
                Value::Float(x) => raw_float(*x),
            },
            err_bar: r.err_bar.map(raw_float),
            exact_flag: r.exact(),
        })
        .collect();
    serde_json::to_writer_pretty(&mut out, &JsonTable { command, records })?;
    out.write_all(b"\n")
}

pub fn write_table<W: Write>(
    command: &str,
    records: &[Record],
    format: Format,
    out: W,
) -> io::Result<()> {
    match format {
        Format::Csv => write_csv(records, out),
        Format::Json => write_json(command, records, out),
    }
}
