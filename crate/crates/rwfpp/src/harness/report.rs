use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{AppError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Must hold on every realization.
    Exact,
    /// Pass/fail against a documented tolerance.
    Statistical,
    /// Reported as a warning only.
    Soft,
    /// Expected to fail; kept for context.
    Informational,
}

/// Everything needed to replay one failing trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolationRecord {
    pub plan: String,
    pub spec: String,
    pub jumps: String,
    pub seed: u64,
    pub n: u64,
    pub itinerary: String,
    pub time_index: i64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub kind: CheckKind,
    pub trials: u64,
    pub violations: u64,
    /// Least slack observed (exact checks) in lattice units.
    pub worst_margin: Option<f64>,
    pub statistic: Option<f64>,
    pub tolerance: Option<f64>,
    pub passed: bool,
    pub note: Option<String>,
    pub examples: Vec<ViolationRecord>,
}

impl CheckResult {
    pub fn statistical(id: impl Into<String>, kind: CheckKind, trials: u64, statistic: f64, tolerance: f64, passed: bool) -> Self {
        CheckResult {
            id: id.into(),
            kind,
            trials,
            violations: u64::from(!passed),
            worst_margin: None,
            statistic: Some(statistic),
            tolerance: Some(tolerance),
            passed,
            note: None,
            examples: Vec::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    fn counts(&self) -> bool {
        matches!(self.kind, CheckKind::Exact | CheckKind::Statistical)
    }
}

/// A named CSV attachment, written next to the JSON report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    pub name: String,
    #[serde(skip)]
    pub csv: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
    pub samples: Vec<Sample>,
    pub warnings: Vec<String>,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>) -> Self {
        SuiteReport { suite: suite.into(), passed: true, checks: Vec::new(), samples: Vec::new(), warnings: Vec::new() }
    }

    pub fn push(&mut self, check: CheckResult) {
        if check.kind == CheckKind::Soft && !check.passed {
            self.warnings.push(format!("soft check `{}` did not hold", check.id));
        }
        self.checks.push(check);
        self.passed = self.checks.iter().filter(|c| c.counts()).all(|c| c.passed);
    }

    pub fn merge(&mut self, other: SuiteReport) {
        for c in other.checks {
            self.push(c);
        }
        self.samples.extend(other.samples);
        self.warnings.extend(other.warnings);
    }

    /// True when every exact check holds; statistical outcomes are ignored.
    pub fn exact_passed(&self) -> bool {
        self.checks.iter().filter(|c| c.kind == CheckKind::Exact).all(|c| c.passed)
    }

    pub fn check(&self, id: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// `checks.csv`: one row per check.
    pub fn checks_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["id", "kind", "trials", "violations", "worst_margin", "statistic", "tolerance", "passed"])?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for c in &self.checks {
            let kind = serde_json::to_value(c.kind)?.as_str().unwrap_or_default().to_string();
            w.write_record([
                c.id.clone(),
                kind,
                c.trials.to_string(),
                c.violations.to_string(),
                opt(c.worst_margin),
                opt(c.statistic),
                opt(c.tolerance),
                c.passed.to_string(),
            ])?;
        }
        finish(w)
    }

    /// `violations.csv`: every recorded violation with its coordinates.
    pub fn violations_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["check", "plan", "spec", "jumps", "seed", "n", "itinerary", "time_index", "detail"])?;
        for c in &self.checks {
            for v in &c.examples {
                w.write_record([
                    c.id.clone(),
                    v.plan.clone(),
                    v.spec.clone(),
                    v.jumps.clone(),
                    v.seed.to_string(),
                    v.n.to_string(),
                    v.itinerary.clone(),
                    v.time_index.to_string(),
                    v.detail.clone(),
                ])?;
            }
        }
        finish(w)
    }

    /// Write `<prefix>.json`, `<prefix>_checks.csv`, `<prefix>_violations.csv`
    /// and one CSV per sample into `dir`.
    pub fn write(&self, dir: &Path, prefix: &str) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
        let put = |name: String, body: String| {
            let path = dir.join(name);
            fs::write(&path, body).map_err(|e| AppError::io(path, e))
        };
        put(format!("{prefix}.json"), self.to_json()?)?;
        put(format!("{prefix}_checks.csv"), self.checks_csv()?)?;
        put(format!("{prefix}_violations.csv"), self.violations_csv()?)?;
        for s in &self.samples {
            put(format!("{}.csv", s.name), s.csv.clone())?;
        }
        Ok(())
    }
}

pub(crate) fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| AppError::io("<csv buffer>", e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
