//! Check records and the versioned report.

use std::fmt::Write as _;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "report/v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Exact,
    Numeric,
}

/// A point (holomorphic coordinates as `[re, im]`) and the value seen there.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<[f64; 2]>>,
    pub value: String,
}

impl Witness {
    pub fn at(z: &[Complex64], value: impl Into<String>) -> Self {
        Witness {
            point: Some(z.iter().map(|c| [c.re, c.im]).collect()),
            value: value.into(),
        }
    }

    pub fn note(value: impl Into<String>) -> Self {
        Witness {
            point: None,
            value: value.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// The identity being tested, in words.
    pub formula: String,
    pub status: Status,
    pub kind: Kind,
    /// Exact checks: `"0"` or a description of the nonzero residual.
    /// Numeric checks: the largest residual seen.
    pub residual: serde_json::Value,
    /// Present for numeric checks only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub witnesses: Vec<Witness>,
    pub runtime_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl Check {
    /// Exact check: passes iff `residual` is `None`.
    pub fn exact(name: &str, formula: &str, residual: Option<String>) -> Self {
        Check {
            name: name.into(),
            formula: formula.into(),
            status: if residual.is_none() { Status::Pass } else { Status::Fail },
            kind: Kind::Exact,
            residual: serde_json::Value::String(residual.unwrap_or_else(|| "0".into())),
            tolerance: None,
            seed: None,
            witnesses: Vec::new(),
            runtime_ms: 0.0,
            reason: None,
        }
    }

    /// Numeric check: passes iff `residual < tol`.
    pub fn numeric(name: &str, formula: &str, residual: f64, tol: f64, seed: u64) -> Self {
        Check {
            name: name.into(),
            formula: formula.into(),
            status: if residual < tol { Status::Pass } else { Status::Fail },
            kind: Kind::Numeric,
            residual: serde_json::json!(residual),
            tolerance: Some(tol),
            seed: Some(seed),
            witnesses: Vec::new(),
            runtime_ms: 0.0,
            reason: None,
        }
    }

    /// Numeric check that passes iff `value > threshold` (negative controls).
    pub fn exceeds(name: &str, formula: &str, value: f64, threshold: f64, seed: u64) -> Self {
        let mut c = Check::numeric(name, formula, value, threshold, seed);
        c.status = if value > threshold { Status::Pass } else { Status::Fail };
        c
    }

    pub fn skipped(name: &str, formula: &str, kind: Kind, reason: &str) -> Self {
        Check {
            name: name.into(),
            formula: formula.into(),
            status: Status::Skipped,
            kind,
            residual: serde_json::Value::Null,
            tolerance: None,
            seed: None,
            witnesses: Vec::new(),
            runtime_ms: 0.0,
            reason: Some(reason.into()),
        }
    }

    /// A check whose computation itself failed.
    pub fn errored(name: &str, formula: &str, kind: Kind, err: &crate::Error) -> Self {
        let mut c = Check::skipped(name, formula, kind, &err.to_string());
        c.status = Status::Fail;
        c
    }

    pub fn with_witnesses(mut self, w: Vec<Witness>) -> Self {
        self.witnesses = w;
        self
    }

    pub fn with_reason(mut self, r: impl Into<String>) -> Self {
        self.reason = Some(r.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Runs `f` and stamps its runtime on the result.
pub fn timed(f: impl FnOnce() -> Check) -> Check {
    let t = Instant::now();
    let mut c = f();
    c.runtime_ms = t.elapsed().as_secs_f64() * 1e3;
    c
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub seed: u64,
    pub points: usize,
    pub lambda: String,
    pub parallel: bool,
    pub checks: Vec<Check>,
    pub runtime_ms: f64,
}

impl Report {
    pub fn new(command: &str, cfg: &super::RunConfig) -> Self {
        Report {
            schema: SCHEMA.into(),
            command: command.into(),
            seed: cfg.seed,
            points: cfg.points,
            lambda: cfg.lambda.to_string(),
            parallel: crate::par::is_parallel(),
            checks: Vec::new(),
            runtime_ms: 0.0,
        }
    }

    pub fn extend(&mut self, checks: Vec<Check>) {
        self.checks.extend(checks);
    }

    /// True iff no check failed (skipped checks do not count as failures).
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        let k = |s| self.checks.iter().filter(|c| c.status == s).count();
        (k(Status::Pass), k(Status::Fail), k(Status::Skipped))
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Copy with every runtime zeroed, for reproducibility comparisons.
    pub fn without_timing(&self) -> Report {
        let mut r = self.clone();
        r.runtime_ms = 0.0;
        for c in &mut r.checks {
            c.runtime_ms = 0.0;
        }
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{} {}  seed={} points={} lambda={} parallel={}",
            self.schema, self.command, self.seed, self.points, self.lambda, self.parallel
        );
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skipped => "SKIP",
            };
            let res = match (&c.residual, c.tolerance) {
                (serde_json::Value::Null, _) => String::new(),
                (v, Some(t)) => format!("residual={} tol={t:e}", fmt_value(v)),
                (v, None) => format!("residual={}", fmt_value(v)),
            };
            let _ = write!(s, "{tag} {:<44} {:<7} {res} ({:.0} ms)", c.name, format!("{:?}", c.kind).to_lowercase(), c.runtime_ms);
            if let Some(r) = &c.reason {
                let _ = write!(s, "  [{r}]");
            }
            s.push('\n');
        }
        let (p, f, k) = self.counts();
        let _ = writeln!(s, "{p} passed, {f} failed, {k} skipped in {:.1} s", self.runtime_ms / 1e3);
        s
    }
}

fn fmt_value(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::Number(x) => x.as_f64().map(|x| format!("{x:.3e}")).unwrap_or_else(|| x.to_string()),
        serde_json::Value::String(t) if t.len() > 60 => format!("{}...", &t[..60]),
        serde_json::Value::String(t) => t.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statuses() {
        assert!(Check::exact("a", "x = 0", None).passed());
        assert!(!Check::exact("a", "x = 0", Some("z0".into())).passed());
        assert!(Check::numeric("b", "", 1e-12, 1e-9, 1).passed());
        assert!(!Check::numeric("b", "", 1e-3, 1e-9, 1).passed());
        assert!(Check::exceeds("c", "", 0.5, 1e-3, 1).passed());
        assert!(!Check::exceeds("c", "", 1e-6, 1e-3, 1).passed());
    }

    #[test]
    fn json_round_trip() {
        let cfg = super::super::RunConfig::default_for(3).unwrap();
        let mut r = Report::new("verify test", &cfg);
        r.extend(vec![
            Check::exact("a", "x = 0", None),
            Check::numeric("b", "y small", 1e-12, 1e-9, 3).with_witnesses(vec![Witness::at(&[Complex64::new(1.0, 0.5)], "1e-12")]),
            Check::skipped("c", "", Kind::Numeric, "upstream failed"),
        ]);
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(r.all_pass());
        assert_eq!(r.counts(), (2, 0, 1));
        let exact = &serde_json::from_str::<serde_json::Value>(&r.to_json()).unwrap()["checks"][0];
        assert!(exact.get("tolerance").is_none());
        assert!(r.to_text().contains("SKIP"));
    }
}
