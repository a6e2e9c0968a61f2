//! Check reports and their JSON and text renderings.

use std::fmt::Write as _;

use serde::Serialize;
use spraygeom_core::residual::ResidualStats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// More than 10% of the points could not be evaluated.
    Inconclusive,
    /// Not run because an earlier check failed or a precondition is not met.
    Skipped,
    /// Reported for reference; does not affect the exit status.
    Info,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Skipped => "skipped",
            Verdict::Info => "info",
        }
    }

    /// Whether this verdict keeps the overall run green.
    pub fn ok(self) -> bool {
        matches!(self, Verdict::Pass | Verdict::Info)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub group: String,
    pub name: String,
    pub residual_max: Option<f64>,
    pub residual_mean: Option<f64>,
    pub points_evaluated: usize,
    pub points_skipped: usize,
    pub tol: f64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckResult {
    pub fn from_stats(group: &str, name: &str, stats: &ResidualStats, tol: f64, verdict: Verdict) -> CheckResult {
        CheckResult {
            group: group.to_string(),
            name: name.to_string(),
            residual_max: (stats.evaluated > 0).then_some(stats.max),
            residual_mean: (stats.evaluated > 0).then_some(stats.mean),
            points_evaluated: stats.evaluated,
            points_skipped: stats.skipped,
            tol,
            verdict,
            note: stats.first_error.clone(),
        }
    }

    pub fn bare(group: &str, name: &str, tol: f64, verdict: Verdict, note: Option<String>) -> CheckResult {
        CheckResult {
            group: group.to_string(),
            name: name.to_string(),
            residual_max: None,
            residual_mean: None,
            points_evaluated: 0,
            points_skipped: 0,
            tol,
            verdict,
            note,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub engine: String,
    /// SHA-256 of the scenario file bytes.
    pub scenario_digest: String,
    pub seed: u64,
    pub points: usize,
    pub pass: bool,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.verdict.ok())
    }

    pub fn find(&self, group: &str, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.group == group && c.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Aligned table; `elapsed` is appended when given.
    pub fn to_text(&self, elapsed: Option<std::time::Duration>) -> String {
        let label = |c: &CheckResult| format!("{} / {}", c.group, c.name);
        let width = self.checks.iter().map(|c| label(c).chars().count()).max().unwrap_or(5).max(5);
        let num = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.3e}"));
        let mut out = String::new();
        let _ = writeln!(out, "{}  scenario {}", self.engine, &self.scenario_digest[..16.min(self.scenario_digest.len())]);
        let _ = writeln!(out, "points {}  seed {}", self.points, self.seed);
        let _ = writeln!(out);
        let _ = writeln!(out, "{:<width$}  {:>10}  {:>10}  {:>9}  {:>8}  verdict", "check", "max", "mean", "tol", "skipped");
        for c in &self.checks {
            let _ = write!(
                out,
                "{:<width$}  {:>10}  {:>10}  {:>9.1e}  {:>8}  {}",
                label(c),
                num(c.residual_max),
                num(c.residual_mean),
                c.tol,
                c.points_skipped,
                c.verdict.label()
            );
            if let Some(n) = &c.note {
                let _ = write!(out, "  ({n})");
            }
            out.push('\n');
        }
        let failed = self.failures().count();
        let _ = writeln!(out);
        let _ = write!(out, "{} checks, {} not passing: {}", self.checks.len(), failed, if self.pass { "PASS" } else { "FAIL" });
        if let Some(t) = elapsed {
            let _ = write!(out, "  ({:.2} s)", t.as_secs_f64());
        }
        out.push('\n');
        out
    }
}
