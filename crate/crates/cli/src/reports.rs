//! JSON reports: one per subcommand, deterministic apart from the
//! timestamp field.

use std::path::Path;

use serde_json::{Map, Value};

pub enum Outcome {
    Pass,
    CheckFailed,
}

pub struct Report {
    fields: Map<String, Value>,
    ok: bool,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut fields = Map::new();
        fields.insert("command".into(), Value::String(command.into()));
        Self { fields, ok: false }
    }

    pub fn set(&mut self, key: &str, value: impl serde::Serialize) {
        self.fields
            .insert(key.into(), serde_json::to_value(value).expect("serializable"));
    }

    pub fn ok(&mut self, ok: bool) {
        self.ok = ok;
        self.fields.insert("ok".into(), Value::Bool(ok));
    }
}

/// Write the report (with a timestamp appended), echo a one-line summary,
/// and translate `ok` into the process outcome.
pub fn finish(mut report: Report, out: &Path, filename: &str) -> anyhow::Result<Outcome> {
    let ts = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    report.set("timestamp", ts);
    let path = out.join(filename);
    std::fs::write(&path, serde_json::to_string_pretty(&report.fields)?)?;
    let command = report.fields["command"].as_str().unwrap_or("?").to_string();
    println!(
        "{}: {} ({})",
        command,
        if report.ok { "ok" } else { "FAILED" },
        path.display()
    );
    Ok(if report.ok {
        Outcome::Pass
    } else {
        Outcome::CheckFailed
    })
}
