//! Check reports and file output.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::config::{Format, OutputSpec};
use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    /// `None` when the check could not be evaluated.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub pass: bool,
    pub checks: Vec<CheckResult>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, Value>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.into(),
            pass: true,
            checks: Vec::new(),
            values: BTreeMap::new(),
        }
    }

    /// Runs `f`; it passes when the residual is strictly below `tolerance`.
    pub fn check<F>(&mut self, name: &str, tolerance: f64, timings: bool, f: F)
    where
        F: FnOnce() -> toda_lab::Result<f64>,
    {
        let start = Instant::now();
        let out = f();
        let wall_ms = timings.then(|| start.elapsed().as_secs_f64() * 1e3);
        let (residual, error) = match out {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let pass = residual.is_some_and(|r| r < tolerance);
        self.checks.push(CheckResult {
            name: name.into(),
            residual,
            tolerance,
            pass,
            error,
            wall_ms,
        });
    }

    pub fn value(&mut self, key: &str, v: impl Serialize) {
        self.values.insert(
            key.into(),
            serde_json::to_value(v).expect("plain data serializes"),
        );
    }

    /// Sorts by check name and settles the overall verdict.
    pub fn finish(mut self) -> Self {
        self.checks.sort_by(|a, b| a.name.cmp(&b.name));
        self.pass = self.checks.iter().all(|c| c.pass);
        self
    }

    pub fn failures(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("name,residual,tolerance,pass\n");
        for c in &self.checks {
            let r = c
                .residual
                .map(|r| format!("{r:e}"))
                .unwrap_or_else(|| "error".into());
            s += &format!("{},{},{:e},{}\n", c.name, r, c.tolerance, c.pass);
        }
        s
    }
}

/// A command's artifact rendered in both formats.
pub struct Artifact {
    pub json: String,
    pub csv: String,
}

impl Artifact {
    pub fn from_report(r: &Report) -> Self {
        Artifact {
            json: r.to_json(),
            csv: r.to_csv(),
        }
    }

    pub fn write(&self, outputs: &[OutputSpec]) -> Result<(), CliError> {
        for o in outputs {
            let body = match o.format {
                Format::Json => &self.json,
                Format::Csv => &self.csv,
            };
            if let Some(dir) = std::path::Path::new(&o.target).parent() {
                if !dir.as_os_str().is_empty() {
                    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(o.target.clone(), e))?;
                }
            }
            std::fs::write(&o.target, body).map_err(|e| CliError::Io(o.target.clone(), e))?;
        }
        Ok(())
    }
}
