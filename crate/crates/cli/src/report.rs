//! Run reports and their two renderings.
//!
//! The machine format is one JSON object per line with a `record` tag. Every list in a
//! report is built in a canonical order, so identical inputs give identical bytes.

use std::fmt::Write as _;
use std::time::Duration;

use serde::Serialize;

use homotopy_core::report::RelationReport;
use homotopy_core::GradedSpace;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Failed,
    Obstructed,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Failed | Status::Obstructed => 2,
            Status::Error => 1,
        }
    }

    /// Errors dominate failures, which dominate success.
    pub fn combine(self, other: Status) -> Status {
        let rank = |s: Status| match s {
            Status::Ok => 0,
            Status::Failed => 1,
            Status::Obstructed => 2,
            Status::Error => 3,
        };
        if rank(other) > rank(self) {
            other
        } else {
            self
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum Record {
    Bucket { relation: String, arity: usize, open: Vec<usize>, hbar: usize, residuals: usize },
    Residual { relation: String, arity: usize, open: Vec<usize>, hbar: usize, input: Vec<String>, output: Vec<Vec<String>>, value: String },
    /// One coefficient of a computed object (transferred map, MC term, pushforward).
    Term {
        object: String,
        order: usize,
        hbar: usize,
        word: Vec<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        output: Option<String>,
        value: String,
    },
    Obstruction { order: usize, hbar: usize, rank_d: usize, rank_augmented: usize },
    Cohomology { complex: String, degree: i64, cochains: usize, rank_out: usize, rank_in: usize, dim: usize },
    Note { key: String, value: String },
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub scenario: String,
    pub command: String,
    pub max_arity: usize,
    pub max_hbar: usize,
    pub max_order: usize,
    pub records: Vec<Record>,
    pub status: Status,
    pub error: Option<CliError>,
    pub elapsed: Duration,
}

pub fn names(space: &GradedSpace, word: &[usize]) -> Vec<String> {
    word.iter().map(|&i| space.name(i).to_string()).collect()
}

impl RunReport {
    pub fn new(scenario: &str, command: &str, bounds: (usize, usize, usize)) -> Self {
        RunReport {
            scenario: scenario.into(),
            command: command.into(),
            max_arity: bounds.0,
            max_hbar: bounds.1,
            max_order: bounds.2,
            records: Vec::new(),
            status: Status::Ok,
            error: None,
            elapsed: Duration::ZERO,
        }
    }

    /// Appends a relation report; any residual marks the run as failed.
    pub fn relation(&mut self, r: &RelationReport, input: &GradedSpace, output: &GradedSpace) {
        for (k, res) in &r.buckets {
            self.records.push(Record::Bucket { relation: r.relation.clone(), arity: k.arity, open: k.open.clone(), hbar: k.hbar, residuals: res.len() });
            for x in res {
                self.records.push(Record::Residual {
                    relation: r.relation.clone(),
                    arity: k.arity,
                    open: k.open.clone(),
                    hbar: k.hbar,
                    input: names(input, &x.input),
                    output: x.output.iter().map(|w| names(output, w)).collect(),
                    value: x.value.to_text(),
                });
            }
        }
        if !r.passes() {
            self.status = self.status.combine(Status::Failed);
        }
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.records.push(Record::Note { key: key.into(), value: value.to_string() });
    }

    pub fn fail_with(&mut self, e: CliError) {
        self.status = Status::Error;
        self.error = Some(e);
    }

    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }

    pub fn render_machine(&self, timing: bool) -> String {
        #[derive(Serialize)]
        struct Run<'a> {
            record: &'static str,
            scenario: &'a str,
            command: &'a str,
            max_arity: usize,
            max_hbar: usize,
            max_order: usize,
        }
        #[derive(Serialize)]
        struct End<'a> {
            record: &'static str,
            scenario: &'a str,
            status: Status,
            exit: i32,
            #[serde(skip_serializing_if = "Option::is_none")]
            error: Option<String>,
            #[serde(skip_serializing_if = "Option::is_none")]
            elapsed_ms: Option<u128>,
        }
        let mut out = String::new();
        let run = Run { record: "run", scenario: &self.scenario, command: &self.command, max_arity: self.max_arity, max_hbar: self.max_hbar, max_order: self.max_order };
        out.push_str(&line(&run));
        for r in &self.records {
            let serde_json::Value::Object(mut fields) = serde_json::to_value(r).expect("record serializes") else { unreachable!("records are objects") };
            let mut tagged = serde_json::Map::new();
            tagged.insert("record".into(), fields.shift_remove("record").expect("records are tagged"));
            tagged.insert("scenario".into(), self.scenario.clone().into());
            tagged.extend(fields);
            out.push_str(&line(&tagged));
        }
        let end = End {
            record: "status",
            scenario: &self.scenario,
            status: self.status,
            exit: self.exit_code(),
            error: self.error.as_ref().map(|e| format!("{}: {e}", e.code())),
            elapsed_ms: timing.then(|| self.elapsed.as_millis()),
        };
        out.push_str(&line(&end));
        out
    }

    pub fn render_text(&self, timing: bool) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "== {} [{}] arity ≤ {}, ħ ≤ {}, order ≤ {}", self.scenario, self.command, self.max_arity, self.max_hbar, self.max_order);
        for r in &self.records {
            let _ = match r {
                Record::Bucket { relation, arity, open, hbar, residuals } => {
                    let mark = if *residuals == 0 { "ok" } else { "FAIL" };
                    writeln!(out, "  {relation} bucket arity {arity} open {open:?} ħ^{hbar}: {residuals} residuals [{mark}]")
                }
                Record::Residual { input, output, value, .. } => writeln!(out, "    ({}) -> {:?} = {value}", input.join(","), output),
                Record::Term { object, order, hbar, word, output, value } => {
                    let target = output.as_ref().map(|o| format!(" -> {o}")).unwrap_or_default();
                    writeln!(out, "  {object} ε^{order} ħ^{hbar} ({}){target}: {value}", word.join(","))
                }
                Record::Obstruction { order, hbar, rank_d, rank_augmented } => {
                    writeln!(out, "  OBSTRUCTED at ε^{order} ħ^{hbar}: rank D = {rank_d} < rank [D|K] = {rank_augmented}")
                }
                Record::Cohomology { complex, degree, cochains, rank_out, rank_in, dim } => {
                    writeln!(out, "  {complex} degree {degree}: cochains {cochains}, rank out {rank_out}, rank in {rank_in}, H = {dim}")
                }
                Record::Note { key, value } => writeln!(out, "  {key}: {value}"),
            };
        }
        if let Some(e) = &self.error {
            let _ = writeln!(out, "  error: {e}");
        }
        let _ = write!(out, "  status: {:?} (exit {})", self.status, self.exit_code());
        if timing {
            let _ = write!(out, " in {:.3}s", self.elapsed.as_secs_f64());
        }
        out.push('\n');
        out
    }
}

fn line<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string(v).expect("record serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_order() {
        assert_eq!(Status::Ok.combine(Status::Failed), Status::Failed);
        assert_eq!(Status::Obstructed.combine(Status::Failed), Status::Obstructed);
        assert_eq!(Status::Error.combine(Status::Ok), Status::Error);
        assert_eq!([Status::Ok, Status::Failed, Status::Obstructed, Status::Error].map(Status::exit_code), [0, 2, 2, 1]);
    }

    #[test]
    fn machine_lines_lead_with_tag_and_scenario() {
        let mut r = RunReport::new("s", "check", (2, 0, 1));
        r.note("k", 3);
        r.elapsed = Duration::from_millis(7);
        let text = r.render_machine(false);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[1], r#"{"record":"note","scenario":"s","key":"k","value":"3"}"#);
        assert_eq!(lines[2], r#"{"record":"status","scenario":"s","status":"ok","exit":0}"#);
        assert!(r.render_machine(true).contains("\"elapsed_ms\":7"));
    }
}
