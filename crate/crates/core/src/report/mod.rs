//! Scenario configuration, check records and table emission for the
//! command-line front end.

mod config;
mod scenarios;

pub use config::{Command, OutputFormat, ScenarioConfig};
pub use scenarios::run_scenario;

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};
use std::time::Duration;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::comparison_engine::GridVerdict;
use crate::error::{GeometryError, Result};

/// A float that survives a JSON round trip even when it is not finite.
///
/// Finite values serialize as numbers; `NaN` and the infinities as the
/// strings `"NaN"`, `"inf"` and `"-inf"`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Num(pub f64);

impl PartialEq for Num {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0 || (self.0.is_nan() && other.0.is_nan())
    }
}

impl From<f64> for Num {
    fn from(x: f64) -> Self {
        Num(x)
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let x = self.0;
        if x.is_finite() {
            s.serialize_f64(x)
        } else if x.is_nan() {
            s.serialize_str("NaN")
        } else if x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(f64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(x) => Ok(Num(x)),
            Raw::S(s) => match s.as_str() {
                "NaN" => Ok(Num(f64::NAN)),
                "inf" => Ok(Num(f64::INFINITY)),
                "-inf" => Ok(Num(f64::NEG_INFINITY)),
                other => Err(serde::de::Error::custom(format!("not a number: {other}"))),
            },
        }
    }
}

impl fmt::Display for Num {
    /// 17 significant digits, `NaN`, `inf` or `-inf`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let x = self.0;
        if x.is_finite() {
            write!(f, "{x:.16e}")
        } else if x.is_nan() {
            f.write_str("NaN")
        } else if x > 0.0 {
            f.write_str("inf")
        } else {
            f.write_str("-inf")
        }
    }
}

fn nums(xs: &[f64]) -> Vec<Num> {
    xs.iter().copied().map(Num).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    HypothesisUnmet,
    Inconclusive,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::HypothesisUnmet => "hypothesis_unmet",
            Status::Inconclusive => "inconclusive",
        }
    }

    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// One verdict of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: String,
    pub radius_grid: Vec<Num>,
    pub values: Vec<Num>,
    pub bound: Vec<Option<Num>>,
    pub margin: Num,
    pub worst_radius: Num,
    pub verdict: Status,
    pub hypothesis_failures: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forces_rigidity: Option<bool>,
    /// Named scalars specific to the check.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub detail: BTreeMap<String, Num>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckRecord {
    pub fn new(check: impl Into<String>, verdict: Status) -> Self {
        Self {
            check: check.into(),
            radius_grid: Vec::new(),
            values: Vec::new(),
            bound: Vec::new(),
            margin: Num(f64::NAN),
            worst_radius: Num(f64::NAN),
            verdict,
            hypothesis_failures: Vec::new(),
            forces_rigidity: None,
            detail: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn from_grid(v: &GridVerdict) -> Self {
        let mut rec = Self::new(v.check.clone(), Status::from_pass(v.pass));
        rec.radius_grid = nums(&v.radii);
        rec.values = nums(&v.values);
        rec.bound = v.bound.iter().map(|b| b.map(Num)).collect();
        rec.margin = Num(v.worst_margin);
        rec.worst_radius = Num(v.worst_radius);
        rec
    }

    pub fn unmet(check: impl Into<String>, reason: impl Into<String>) -> Self {
        let mut rec = Self::new(check, Status::HypothesisUnmet);
        rec.hypothesis_failures.push(reason.into());
        rec
    }

    pub fn with_detail(mut self, key: &str, value: f64) -> Self {
        self.detail.insert(key.to_string(), Num(value));
        self
    }
}

/// A rectangular numeric table, e.g. a profile dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Num>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: &[f64]) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(nums(row));
    }
}

/// Wall-clock time of a run. Never serialized and ignored by equality, so
/// emitted reports stay byte-stable.
#[derive(Debug, Clone, Copy, Default)]
pub struct Timing(pub Option<Duration>);

impl PartialEq for Timing {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: Command,
    pub config: ScenarioConfig,
    pub checks: Vec<CheckRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Table>,
    pub exit_code: i32,
    #[serde(skip)]
    pub timing: Timing,
}

impl RunReport {
    pub fn new(config: ScenarioConfig, checks: Vec<CheckRecord>, table: Option<Table>) -> Self {
        let exit_code = exit_code(&checks);
        Self {
            command: config.command,
            config,
            checks,
            table,
            exit_code,
            timing: Timing::default(),
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.check == name)
    }
}

/// 0: all pass; 1: some inequality violated; 3: only unmet hypotheses.
/// Inconclusive verdicts count as neither.
pub fn exit_code(checks: &[CheckRecord]) -> i32 {
    if checks.iter().any(|c| c.verdict == Status::Fail) {
        1
    } else if checks.iter().any(|c| c.verdict == Status::HypothesisUnmet) {
        3
    } else {
        0
    }
}

/// Exit code for a run that never produced a report.
pub const EXIT_INVALID: i32 = 2;

const SUMMARY_COLUMNS: [&str; 8] = [
    "check",
    "verdict",
    "margin",
    "worst_radius",
    "points",
    "forces_rigidity",
    "hypothesis_failures",
    "detail",
];

/// Writes the report as CSV or JSON.
///
/// CSV: the report's table when it has one, otherwise one summary row per
/// check. JSON: the whole report, one object per check.
pub fn emit_table(report: &RunReport, format: OutputFormat, out: &mut impl Write) -> io::Result<()> {
    match format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, report).map_err(io::Error::other)?;
            out.write_all(b"\n")
        }
        OutputFormat::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::CRLF)
                .from_writer(out);
            match &report.table {
                Some(t) => {
                    w.write_record(&t.columns)?;
                    for row in &t.rows {
                        w.write_record(row.iter().map(|x| x.to_string()))?;
                    }
                }
                None => {
                    w.write_record(SUMMARY_COLUMNS)?;
                    for c in &report.checks {
                        let detail: Vec<String> = c.detail.iter().map(|(k, v)| format!("{k}={v}")).collect();
                        w.write_record([
                            c.check.clone(),
                            c.verdict.as_str().to_string(),
                            c.margin.to_string(),
                            c.worst_radius.to_string(),
                            c.radius_grid.len().to_string(),
                            c.forces_rigidity.map(|b| b.to_string()).unwrap_or_default(),
                            c.hypothesis_failures.join("; "),
                            detail.join(";"),
                        ])?;
                    }
                }
            }
            w.flush()
        }
    }
}

pub fn render(report: &RunReport, format: OutputFormat) -> String {
    let mut buf = Vec::new();
    emit_table(report, format, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("utf-8 output")
}

pub fn parse_report(json: &str) -> Result<RunReport> {
    serde_json::from_str(json).map_err(|e| GeometryError::Parse(format!("report: {e}")))
}
