//! Check reports and their text / JSON / CSV renderings.
//!
//! Every command produces a list of named checks, each with a residual and
//! the tolerance it was held to. CSV output has one row per trial with the
//! fixed column set `(suite, n, k, trial, residual, tolerance, pass)`; JSON
//! and text aggregate trials per check (max residual, all-pass). The
//! wall-time field is the only part of the output that varies between runs
//! of an identical configuration, and it is kept last in the JSON document.

use serde::Serialize;

use qmetric_core::WitnessReport;

/// One measured check on one trial.
#[derive(Debug, Clone)]
pub struct TrialRow {
    pub suite: String,
    pub n: usize,
    /// Divisor parameter; 0 when the check has none.
    pub k: usize,
    pub trial: usize,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl TrialRow {
    pub fn new(
        suite: impl Into<String>,
        n: usize,
        k: usize,
        trial: usize,
        residual: f64,
        tolerance: f64,
    ) -> Self {
        Self {
            suite: suite.into(),
            n,
            k,
            trial,
            residual,
            tolerance,
            pass: residual <= tolerance,
        }
    }
}

/// Per-check aggregate over all trials.
#[derive(Debug, Clone, Serialize)]
pub struct CheckSummary {
    pub name: String,
    pub trials: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Distance-command payload.
#[derive(Debug, Clone, Serialize)]
pub struct MkSummary {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub oracle_value: Option<f64>,
}

/// Machine-readable command report.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lip1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lipk: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificates: Option<Vec<WitnessReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mk: Option<MkSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    pub checks: Vec<CheckSummary>,
    pub pass: bool,
    pub wall_time_ms: u128,
}

/// A finished command: the aggregated report plus the raw per-trial rows.
pub struct CommandOutput {
    pub report: Report,
    pub rows: Vec<TrialRow>,
}

pub fn aggregate(rows: &[TrialRow]) -> Vec<CheckSummary> {
    let mut order: Vec<&str> = Vec::new();
    for row in rows {
        if !order.contains(&row.suite.as_str()) {
            order.push(&row.suite);
        }
    }
    order
        .into_iter()
        .map(|name| {
            let group: Vec<&TrialRow> = rows.iter().filter(|r| r.suite == name).collect();
            CheckSummary {
                name: name.to_string(),
                trials: group.len(),
                max_residual: group.iter().map(|r| r.residual).fold(0.0, f64::max),
                tolerance: group[0].tolerance,
                pass: group.iter().all(|r| r.pass),
            }
        })
        .collect()
}

pub fn render_json(report: &Report) -> String {
    serde_json::to_string(report).expect("report serialization cannot fail")
}

pub fn render_csv(rows: &[TrialRow]) -> String {
    let mut out = String::from("suite,n,k,trial,residual,tolerance,pass\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.suite, r.n, r.k, r.trial, r.residual, r.tolerance, r.pass
        ));
    }
    out
}

pub fn render_text(report: &Report) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "qmetric {}  n={} k={} trials={} seed={}\n",
        report.command, report.n, report.k, report.trials, report.seed
    ));
    out.push_str(&format!(
        "{:<42} {:>12} {:>10} {:>6}\n",
        "check", "max residual", "tolerance", "pass"
    ));
    for c in &report.checks {
        out.push_str(&format!(
            "{:<42} {:>12.3e} {:>10.1e} {:>6}\n",
            c.name,
            c.max_residual,
            c.tolerance,
            if c.pass { "yes" } else { "NO" }
        ));
    }
    if let (Some(l1), Some(lk), Some(gap)) = (report.lip1, report.lipk, report.gap) {
        out.push_str(&format!("lip1 = {l1}  lipk = {lk}  gap = {gap}\n"));
    }
    if let Some(certs) = &report.certificates {
        for c in certs {
            out.push_str(&format!(
                "k={}: lip1 = {} (closed form {}), lipk = {} (closed form {}), gap = {}\n",
                c.k, c.lip1_value, c.closed_form_lip1, c.lipk_value, c.closed_form_lipk, c.gap
            ));
        }
        if let Some(first) = certs.first() {
            out.push_str(&first.conclusion);
            out.push('\n');
        }
    }
    if let Some(mk) = &report.mk {
        out.push_str(&format!(
            "value = {}  iterations = {}  converged = {}",
            mk.value, mk.iterations, mk.converged
        ));
        if let Some(ov) = mk.oracle_value {
            out.push_str(&format!("  oracle = {ov}"));
        }
        out.push('\n');
    }
    if let Some(v) = report.value {
        out.push_str(&format!("value = {v}\n"));
    }
    out.push_str(&format!(
        "{} ({}/{} checks) in {} ms  [v{}]\n",
        if report.pass { "PASS" } else { "FAIL" },
        report.checks.iter().filter(|c| c.pass).count(),
        report.checks.len(),
        report.wall_time_ms,
        report.version
    ));
    out
}
