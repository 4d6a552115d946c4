//! Explanation reports: one JSON record per line, then a trailing
//! summary object with per-split, per-method size and timing statistics.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::explain::{ExplainOutcome, Method};
use crate::model::{ExplanationKind, Label};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Classified,
    Rejected,
}

impl Split {
    pub fn of(label: Label) -> Self {
        if label.is_classified() {
            Split::Classified
        } else {
            Split::Rejected
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub instance_id: usize,
    pub label: Label,
    pub score: f64,
    pub kind: ExplanationKind,
    pub indices: Vec<usize>,
    pub size: usize,
    pub certified_minimum: bool,
    /// Worst-case bound lies within tolerance of a threshold.
    pub near_boundary: bool,
    pub method: Method,
    /// Median over `timing_repeats` runs.
    pub solve_time_ms: f64,
    /// Zero when `timing_repeats` is 1.
    pub solve_time_std_ms: f64,
    pub timing_repeats: usize,
    pub nodes: Option<u64>,
}

impl ReportRecord {
    pub fn from_outcome(instance_id: usize, outcome: &ExplainOutcome, near_boundary: bool) -> Self {
        Self {
            instance_id,
            label: outcome.label,
            score: outcome.score,
            kind: outcome.explanation.kind,
            indices: outcome.explanation.indices().to_vec(),
            size: outcome.explanation.size(),
            certified_minimum: outcome.explanation.certified_minimum,
            near_boundary,
            method: outcome.method,
            solve_time_ms: outcome.solve_time.as_secs_f64() * 1e3,
            solve_time_std_ms: 0.0,
            timing_repeats: 1,
            nodes: outcome.nodes,
        }
    }

    /// Replaces the timing with the median and spread of repeated runs.
    pub fn with_timings(mut self, times_ms: &[f64]) -> Self {
        if times_ms.is_empty() {
            return self;
        }
        self.solve_time_ms = median(times_ms);
        self.solve_time_std_ms = mean_std(times_ms).1;
        self.timing_repeats = times_ms.len();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub split: Split,
    pub method: Method,
    pub count: usize,
    pub size_mean: f64,
    pub size_std: f64,
    pub time_ms_mean: f64,
    pub time_ms_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub records: usize,
    pub skipped_out_of_domain: usize,
    pub aggregate: Vec<AggregateRow>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub records: Vec<ReportRecord>,
    pub skipped_out_of_domain: usize,
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    }
}

/// Mean and population standard deviation; `(0, 0)` for no values.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

impl Report {
    /// Rows for every split and method combination, including empty ones.
    pub fn aggregate(&self) -> Vec<AggregateRow> {
        let mut rows = Vec::with_capacity(4);
        for split in [Split::Classified, Split::Rejected] {
            for method in [Method::Minabro, Method::Baseline] {
                let matching: Vec<&ReportRecord> = self
                    .records
                    .iter()
                    .filter(|r| Split::of(r.label) == split && r.method == method)
                    .collect();
                let sizes: Vec<f64> = matching.iter().map(|r| r.size as f64).collect();
                let times: Vec<f64> = matching.iter().map(|r| r.solve_time_ms).collect();
                let (size_mean, size_std) = mean_std(&sizes);
                let (time_ms_mean, time_ms_std) = mean_std(&times);
                rows.push(AggregateRow {
                    split,
                    method,
                    count: matching.len(),
                    size_mean,
                    size_std,
                    time_ms_mean,
                    time_ms_std,
                });
            }
        }
        rows
    }

    pub fn summary(&self) -> ReportSummary {
        ReportSummary {
            records: self.records.len(),
            skipped_out_of_domain: self.skipped_out_of_domain,
            aggregate: self.aggregate(),
        }
    }

    pub fn render(&self) -> Result<String> {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r)?);
            out.push('\n');
        }
        let _ = writeln!(out, "{}", serde_json::to_string(&self.summary())?);
        Ok(out)
    }

    pub fn parse(text: &str) -> Result<(Report, ReportSummary)> {
        let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
        let (last, body) = lines
            .split_last()
            .ok_or_else(|| Error::Parse("empty report".into()))?;
        let summary: ReportSummary = serde_json::from_str(last)?;
        let records = body
            .iter()
            .map(|l| serde_json::from_str(l))
            .collect::<std::result::Result<Vec<ReportRecord>, _>>()?;
        Ok((
            Report {
                records,
                skipped_out_of_domain: summary.skipped_out_of_domain,
            },
            summary,
        ))
    }
}

pub fn write_explanation_report(report: &Report, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, report.render()?)?;
    Ok(())
}

pub fn read_explanation_report(path: impl AsRef<Path>) -> Result<(Report, ReportSummary)> {
    Report::parse(&std::fs::read_to_string(path)?)
}
