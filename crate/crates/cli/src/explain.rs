use std::path::Path;

use anyhow::Context;
use minxp::io::{write_explanation_report, Report, ReportRecord};
use minxp::{explain_with, Instance, Method, RejectClassifier, SolverBudget};
use rayon::prelude::*;

use crate::common::{self, InstanceSource};
use crate::CmdResult;

pub struct Options<'a> {
    pub model: &'a Path,
    pub source: InstanceSource,
    pub methods: Vec<Method>,
    pub budget: SolverBudget,
    pub limit: Option<usize>,
    pub epsilon: f64,
    pub out_report: &'a Path,
}

pub fn record_for(
    clf: &RejectClassifier,
    id: usize,
    instance: &Instance,
    method: Method,
    budget: &SolverBudget,
) -> minxp::Result<ReportRecord> {
    let outcome = explain_with(clf, instance, method, budget)?;
    let slack = clf.explanation_slack(
        instance,
        outcome.explanation.indices(),
        outcome.explanation.kind,
    )?;
    Ok(ReportRecord::from_outcome(
        id,
        &outcome,
        slack <= clf.tolerance(),
    ))
}

/// Explains every instance with every method. Work is spread over a
/// thread pool; records come back ordered by instance id, then method.
pub fn explain_all(
    clf: &RejectClassifier,
    instances: &[(usize, Instance)],
    methods: &[Method],
    budget: &SolverBudget,
) -> minxp::Result<Vec<ReportRecord>> {
    let jobs: Vec<(usize, &Instance, Method)> = instances
        .iter()
        .flat_map(|(id, inst)| methods.iter().map(move |&m| (*id, inst, m)))
        .collect();
    jobs.par_iter()
        .map(|&(id, inst, m)| record_for(clf, id, inst, m, budget))
        .collect()
}

pub fn print_summary(report: &Report) {
    println!(
        "{:<11} {:<9} {:>6} {:>10} {:>10} {:>12} {:>12}",
        "split", "method", "count", "size", "size_sd", "time_ms", "time_ms_sd"
    );
    for row in report.aggregate() {
        println!(
            "{:<11} {:<9} {:>6} {:>10.3} {:>10.3} {:>12.4} {:>12.4}",
            format!("{:?}", row.split).to_lowercase(),
            row.method,
            row.count,
            row.size_mean,
            row.size_std,
            row.time_ms_mean,
            row.time_ms_std
        );
    }
    if report.skipped_out_of_domain > 0 {
        println!("skipped (out of domain): {}", report.skipped_out_of_domain);
    }
    let uncertified = report
        .records
        .iter()
        .filter(|r| r.method == Method::Minabro && !r.certified_minimum)
        .count();
    if uncertified > 0 {
        println!("uncertified (solver budget exhausted): {uncertified}");
    }
}

pub fn run(opts: Options<'_>) -> CmdResult {
    let file = common::load_model_file(opts.model)?;
    let clf = file.classifier()?.with_tolerance(opts.epsilon)?;

    let mut rows: Vec<Vec<f64>> = match &opts.source {
        InstanceSource::Data { data, split } => {
            let raw = common::load(data)?;
            common::to_model_space(&file, &common::select(&raw, data, *split)?)?.rows
        }
        InstanceSource::Json(arg) => {
            let raw = common::parse_instance_json(arg)?;
            raw.into_iter()
                .map(|r| {
                    anyhow::ensure!(
                        r.len() == clf.n_features(),
                        "instance has {} values, model has {} features",
                        r.len(),
                        clf.n_features()
                    );
                    Ok(match &file.scaling {
                        Some(s) => s.transform_row(&r),
                        None => r,
                    })
                })
                .collect::<anyhow::Result<_>>()?
        }
    };
    if let Some(limit) = opts.limit {
        rows.truncate(limit);
    }

    let (instances, skipped) = common::instances(clf.model(), &rows);
    let records = explain_all(&clf, &instances, &opts.methods, &opts.budget)
        .context("explaining instances")?;
    let report = Report {
        records,
        skipped_out_of_domain: skipped,
    };
    write_explanation_report(&report, opts.out_report)
        .with_context(|| format!("writing {}", opts.out_report.display()))?;
    print_summary(&report);
    Ok(())
}
