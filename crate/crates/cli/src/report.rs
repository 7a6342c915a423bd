use std::fmt::Write as _;

use panel_lattices::VerificationReport;
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Asserted,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Asserted => "asserted",
        }
    }
}

impl From<panel_lattices::Status> for Status {
    fn from(s: panel_lattices::Status) -> Self {
        match s {
            panel_lattices::Status::Pass => Status::Pass,
            panel_lattices::Status::Fail => Status::Fail,
            panel_lattices::Status::Asserted => Status::Asserted,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub name: String,
    /// What the check establishes, or `"plumbing"` for bookkeeping records.
    pub anchor: String,
    pub status: Status,
    pub data: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub input: Value,
    pub records: Vec<Record>,
    pub status: Status,
}

impl Report {
    pub fn new(command: &str, input: Value) -> Self {
        Report {
            tool: "panel-lattices".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            input,
            records: Vec::new(),
            status: Status::Pass,
        }
    }

    pub fn push(&mut self, name: impl Into<String>, anchor: &str, status: Status, data: Value) {
        if status == Status::Fail {
            self.status = Status::Fail;
        }
        self.records.push(Record {
            name: name.into(),
            anchor: anchor.into(),
            status,
            data,
        });
    }

    pub fn check(&mut self, name: impl Into<String>, anchor: &str, ok: bool, data: Value) {
        let status = if ok { Status::Pass } else { Status::Fail };
        self.push(name, anchor, status, data);
    }

    pub fn data(&mut self, name: impl Into<String>, data: Value) {
        self.push(name, "plumbing", Status::Pass, data);
    }

    /// One record per check of `r`, named `prefix.check`.
    pub fn absorb(&mut self, prefix: &str, anchor: &str, r: &VerificationReport) {
        for c in &r.checks {
            self.push(
                format!("{prefix}.{}", c.name),
                anchor,
                c.status.into(),
                Value::String(c.detail.clone()),
            );
        }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialise");
        s.push('\n');
        s
    }

    /// `key = value` lines; multi-line data is indented below its record.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "tool = {} {}", self.tool, self.version).unwrap();
        writeln!(s, "command = {}", self.command).unwrap();
        writeln!(s, "input = {}", self.input).unwrap();
        for r in &self.records {
            writeln!(s, "{} = {} [{}]", r.name, r.status.as_str(), r.anchor).unwrap();
            match &r.data {
                Value::Null => {}
                Value::String(t) => {
                    for line in t.lines() {
                        writeln!(s, "    {line}").unwrap();
                    }
                }
                Value::Array(items) if items.iter().all(Value::is_string) => {
                    for line in items.iter().filter_map(Value::as_str) {
                        writeln!(s, "    {line}").unwrap();
                    }
                }
                other => writeln!(s, "    {other}").unwrap(),
            }
        }
        writeln!(s, "status = {}", self.status.as_str()).unwrap();
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failing_record_fails_report() {
        let mut r = Report::new("plane", Value::Null);
        r.data("n", 7.into());
        assert!(r.passed());
        r.check("x", "anchor", false, Value::Null);
        assert!(!r.passed());
        assert!(r.to_text().ends_with("status = fail\n"));
    }

    #[test]
    fn absorbs_verification_reports() {
        let mut v = VerificationReport::new("s");
        v.check("a", true, "fine");
        v.assert_stated("b", "stated");
        let mut r = Report::new("plane", Value::Null);
        r.absorb("p", "anchor", &v);
        assert_eq!(r.records.len(), 2);
        assert_eq!(r.records[1].name, "p.b");
        assert_eq!(r.records[1].status, Status::Asserted);
        assert!(r.passed());
    }
}
