use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use minxp::io::{report::median, write_explanation_report, Report};
use minxp::{Instance, LinearModel, Method, RejectClassifier, SolverBudget};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::common;
use crate::explain::{print_summary, record_for};
use crate::{CmdResult, DataArgs, SplitArg};

pub enum Source {
    Dataset {
        model: PathBuf,
        data: DataArgs,
        split: SplitArg,
    },
    Synthetic {
        n: usize,
        count: usize,
        seed: u64,
    },
}

pub struct Options<'a> {
    pub source: Source,
    pub methods: Vec<Method>,
    pub repeats: usize,
    pub budget: SolverBudget,
    pub limit: Option<usize>,
    pub epsilon: f64,
    pub out_report: &'a Path,
}

/// Random unit-box model with a rejection band between the 40th and 60th
/// percentiles of the generated instances' scores.
pub fn synthetic(n: usize, count: usize, seed: u64) -> anyhow::Result<(RejectClassifier, Vec<Vec<f64>>)> {
    anyhow::ensure!(n >= 1, "--synthetic-n must be at least 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let model = LinearModel::with_unit_domains(weights, 0.0)?;
    let rows: Vec<Vec<f64>> = (0..count)
        .map(|_| (0..n).map(|_| rng.gen_range(0.0..=1.0)).collect())
        .collect();
    let mut scores: Vec<f64> = rows
        .iter()
        .map(|r| r.iter().zip(model.weights()).map(|(x, w)| x * w).sum())
        .collect();
    scores.sort_by(f64::total_cmp);
    let (mut lo, mut hi) = if scores.is_empty() {
        (-0.5, 0.5)
    } else {
        let at = |q: f64| scores[((scores.len() - 1) as f64 * q).round() as usize];
        (at(0.4), at(0.6))
    };
    if lo >= hi {
        lo -= 0.5;
        hi += 0.5;
    }
    Ok((RejectClassifier::new(model, lo, hi)?, rows))
}

pub fn run(opts: Options<'_>) -> CmdResult {
    let (clf, mut rows) = match &opts.source {
        Source::Dataset { model, data, split } => {
            let file = common::load_model_file(model)?;
            let clf = file.classifier()?;
            let raw = common::load(data)?;
            let rows = common::to_model_space(&file, &common::select(&raw, data, *split)?)?.rows;
            (clf, rows)
        }
        Source::Synthetic { n, count, seed } => synthetic(*n, *count, *seed)?,
    };
    let clf = clf.with_tolerance(opts.epsilon)?;
    if let Some(limit) = opts.limit {
        rows.truncate(limit);
    }
    let repeats = opts.repeats.max(1);
    if opts.repeats <= 1 {
        eprintln!("note: with a single repeat the per-instance timing spread is reported as 0");
    }

    let (instances, skipped) = common::instances(clf.model(), &rows);
    let mut records = Vec::with_capacity(instances.len() * opts.methods.len());
    for (id, inst) in &instances {
        for &method in &opts.methods {
            records.push(timed(&clf, *id, inst, method, &opts.budget, repeats)?);
        }
    }
    let report = Report {
        records,
        skipped_out_of_domain: skipped,
    };
    write_explanation_report(&report, opts.out_report)
        .with_context(|| format!("writing {}", opts.out_report.display()))?;
    print_summary(&report);
    let classified: Vec<f64> = report
        .records
        .iter()
        .filter(|r| r.method == Method::Minabro && r.label.is_classified())
        .map(|r| r.solve_time_ms)
        .collect();
    if !classified.is_empty() {
        println!(
            "median classified explanation time: {:.4} ms",
            median(&classified)
        );
    }
    Ok(())
}

fn timed(
    clf: &RejectClassifier,
    id: usize,
    inst: &Instance,
    method: Method,
    budget: &SolverBudget,
    repeats: usize,
) -> anyhow::Result<minxp::io::ReportRecord> {
    let mut times = Vec::with_capacity(repeats);
    let mut record = None;
    for _ in 0..repeats {
        let start = Instant::now();
        let r = record_for(clf, id, inst, method, budget)?;
        times.push(start.elapsed().as_secs_f64() * 1e3);
        record = Some(r);
    }
    Ok(record.expect("at least one repeat").with_timings(&times))
}
