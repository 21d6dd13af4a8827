//! Check results and the manifest written next to every run.

use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{Context, Result};
use expanderlab::export::Table;
use serde::Serialize;

use crate::config::{ExperimentConfig, Format};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Check {
    /// Passes when value ≤ tolerance.
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: value <= tolerance,
            detail: String::new(),
        }
    }

    /// Passes when value ≥ tolerance.
    pub fn at_least(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: value >= tolerance,
            detail: String::new(),
        }
    }

    pub fn flag(name: impl Into<String>, passed: bool) -> Self {
        Self {
            name: name.into(),
            value: if passed { 1.0 } else { 0.0 },
            tolerance: 1.0,
            passed,
            detail: String::new(),
        }
    }

    pub fn detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

/// Files and checks produced by one command.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Writes artifacts of the requested formats into the output directory.
pub struct Writer<'a> {
    pub dir: &'a Path,
    pub formats: &'a [Format],
}

impl Writer<'_> {
    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn csv(&self, out: &mut Outcome, name: &str, table: &Table) -> Result<()> {
        if self.formats.contains(&Format::Csv) {
            let path = self.path(&format!("{name}.csv"));
            std::fs::write(&path, table.to_csv()).with_context(|| format!("writing {}", path.display()))?;
            out.files.push(path);
        }
        Ok(())
    }

    pub fn json<T: Serialize>(&self, out: &mut Outcome, name: &str, value: &T) -> Result<()> {
        if self.formats.contains(&Format::Json) {
            let path = self.path(&format!("{name}.json"));
            let text = serde_json::to_string_pretty(value)?;
            std::fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
            out.files.push(path);
        }
        Ok(())
    }

    pub fn svg(&self, out: &mut Outcome, name: &str, svg: impl FnOnce() -> String) -> Result<()> {
        if self.formats.contains(&Format::Svg) {
            let path = self.path(&format!("{name}.svg"));
            std::fs::write(&path, svg()).with_context(|| format!("writing {}", path.display()))?;
            out.files.push(path);
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    config: &'a ExperimentConfig,
    files: Vec<String>,
    checks: &'a [Check],
    notes: &'a [String],
    passed: bool,
    elapsed_seconds: f64,
}

pub fn write_manifest(config: &ExperimentConfig, outcome: &Outcome, elapsed: Duration) -> Result<PathBuf> {
    let files = outcome
        .files
        .iter()
        .map(|p| {
            p.strip_prefix(&config.output_dir)
                .unwrap_or(p)
                .to_string_lossy()
                .into_owned()
        })
        .collect();
    let manifest = Manifest {
        config,
        files,
        checks: &outcome.checks,
        notes: &outcome.notes,
        passed: outcome.passed(),
        elapsed_seconds: elapsed.as_secs_f64(),
    };
    let path = config.output_dir.join("manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}
