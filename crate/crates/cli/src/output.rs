use std::fs;
use std::io::{self, Write};
use std::time::Duration;

use serde::Serialize;
use serde_json::{json, Value};

use crate::args::Cli;

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

/// One exact comparison; `pass ⇔ expected == actual`.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub inputs: Value,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

impl Check {
    pub fn equal(name: impl Into<String>, inputs: Value, expected: impl ToString, actual: impl ToString) -> Self {
        let (expected, actual) = (expected.to_string(), actual.to_string());
        Check { name: name.into(), inputs, pass: expected == actual, expected, actual }
    }

    pub fn holds(name: impl Into<String>, inputs: Value, actual: bool) -> Self {
        Self::equal(name, inputs, true, actual)
    }
}

/// What a command produced: a result body, its checks, and optionally a CSV rendering.
#[derive(Debug)]
pub struct Outcome {
    pub command: String,
    pub parameters: Value,
    pub result: Value,
    pub checks: Vec<Check>,
    pub csv: Option<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn envelope(&self, seed: u64, elapsed: Option<Duration>) -> Value {
        let passed = self.checks.iter().filter(|c| c.pass).count();
        let mut v = json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "config": { "seed": seed, "parameters": self.parameters },
            "result": self.result,
            "verdict": {
                "pass": self.passed(),
                "total": self.checks.len(),
                "passed": passed,
                "failed": self.checks.len() - passed,
                "checks": self.checks,
            },
        });
        if let Some(d) = elapsed {
            v["wall_clock_ms"] = json!(d.as_millis() as u64);
        }
        v
    }
}

pub fn emit(cli: &Cli, outcome: &Outcome, elapsed: Option<Duration>) -> io::Result<()> {
    let text = match &outcome.csv {
        Some(csv) => {
            if let Some(d) = elapsed {
                eprintln!("wall clock: {} ms", d.as_millis());
            }
            csv.clone()
        }
        None => {
            let mut s = serde_json::to_string_pretty(&outcome.envelope(cli.seed, elapsed)).map_err(io::Error::other)?;
            s.push('\n');
            s
        }
    };
    match &cli.out {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_failed_check_fails_the_verdict() {
        let mut outcome = Outcome {
            command: "demo".into(),
            parameters: Value::Null,
            result: Value::Null,
            checks: vec![Check::equal("a", Value::Null, 1, 1)],
            csv: None,
        };
        assert!(outcome.passed());
        outcome.checks.push(Check::equal("b", Value::Null, "1/2", "1/3"));
        assert!(!outcome.passed());
        let v = outcome.envelope(7, None);
        assert_eq!(v["verdict"]["failed"], 1);
        assert_eq!(v["verdict"]["pass"], false);
        assert_eq!(v["schema_version"], SCHEMA_VERSION);
    }
}
