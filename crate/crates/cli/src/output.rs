//! Rendering of command results as JSON, CSV or plain text.

use kreweras::report::Report;
use serde_json::{json, Value};

use crate::Format;

pub const SCHEMA: u32 = 1;

pub struct Outcome {
    pub json: Value,
    pub csv: String,
    pub text: String,
    pub passed: bool,
}

impl Outcome {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("serializable");
                s.push('\n');
                s
            }
            Format::Csv => self.csv.clone(),
            Format::Text => self.text.clone(),
        }
    }

    /// Verification result: one group per report, with pass counts.
    pub fn from_reports(command: &str, reports: &[Report], extra: Value) -> Self {
        let passed = reports.iter().all(Report::passed);
        let total: usize = reports.iter().map(|r| r.checks.len()).sum();
        let pass_count: usize = reports.iter().map(Report::pass_count).sum();
        let groups: Vec<Value> = reports
            .iter()
            .map(|r| {
                json!({
                    "title": r.title,
                    "passed": r.passed(),
                    "pass_count": r.pass_count(),
                    "total": r.checks.len(),
                    "checks": r.checks,
                })
            })
            .collect();
        let mut body = json!({
            "schema": SCHEMA,
            "command": command,
            "passed": passed,
            "pass_count": pass_count,
            "total": total,
            "groups": groups,
        });
        if let (Value::Object(b), Value::Object(e)) = (&mut body, extra) {
            b.extend(e);
        }
        Outcome { json: body, csv: reports_csv(reports), text: reports_text(reports), passed }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn reports_csv(reports: &[Report]) -> String {
    let mut out = String::from("group,check,passed,detail\n");
    for r in reports {
        for c in &r.checks {
            out.push_str(&format!(
                "{},{},{},{}\n",
                csv_field(&r.title),
                csv_field(&c.name),
                c.passed,
                csv_field(&c.detail)
            ));
        }
    }
    out
}

pub fn reports_text(reports: &[Report]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&format!("== {} ({}/{})\n", r.title, r.pass_count(), r.checks.len()));
        for c in &r.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("{tag}  {}  [{}]\n", c.name, c.detail));
        }
    }
    let total: usize = reports.iter().map(|r| r.checks.len()).sum();
    let ok: usize = reports.iter().map(Report::pass_count).sum();
    out.push_str(&format!("{ok}/{total} checks passed\n"));
    out
}
