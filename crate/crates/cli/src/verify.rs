use std::path::PathBuf;

use minxp::oracle::{
    check_against_oracle, sampled_sufficiency_check, CaseGenerator, MAX_BRUTE_FORCE_FEATURES,
};
use minxp::{explain_minimum, Explanation, Instance, Label, RejectClassifier, SolverBudget};

use crate::common;
use crate::{CmdResult, DataArgs, Failure, SplitArg};

pub struct Options {
    pub dataset: Option<(PathBuf, DataArgs)>,
    pub max_n: usize,
    pub cases: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub inject_fault: bool,
}

const SAMPLED_TRIALS: usize = 1000;

#[derive(Default)]
struct Tally {
    classified: (usize, usize),
    rejected: (usize, usize),
    failures: Vec<String>,
}

impl Tally {
    fn record(&mut self, what: String, label: Label, ok: bool) {
        let slot = if label.is_classified() {
            &mut self.classified
        } else {
            &mut self.rejected
        };
        slot.1 += 1;
        if ok {
            slot.0 += 1;
        } else {
            self.failures.push(what);
        }
    }
}

fn corrupt(e: Explanation) -> Explanation {
    let mut idx = e.indices().to_vec();
    if idx.pop().is_none() {
        idx.push(0);
    }
    Explanation::new(idx, e.kind, e.certified_minimum)
}

fn check(
    tally: &mut Tally,
    name: String,
    clf: &RejectClassifier,
    inst: &Instance,
    seed: u64,
    inject_fault: bool,
) -> anyhow::Result<()> {
    let outcome = explain_minimum(clf, inst, &SolverBudget::default())?;
    let mut explanation = outcome.explanation;
    if inject_fault {
        explanation = corrupt(explanation);
    }
    let result = check_against_oracle(clf, inst, &explanation)?;
    let sampled = result.valid
        && sampled_sufficiency_check(
            clf,
            inst,
            explanation.indices(),
            explanation.kind,
            SAMPLED_TRIALS,
            seed,
        )?;
    let ok = result.agrees() && sampled;
    let detail = format!(
        "{name}: {:?} size {} vs minimum {} (valid {}, sampled {}, certified {})",
        result.label, result.explained_size, result.oracle_size, result.valid, sampled, result.certified
    );
    tally.record(detail, result.label, ok);
    Ok(())
}

pub fn run(opts: Options) -> CmdResult {
    if opts.max_n > MAX_BRUTE_FORCE_FEATURES {
        return Err(Failure::Input(anyhow::anyhow!(
            "--max-n may not exceed {MAX_BRUTE_FORCE_FEATURES}"
        )));
    }
    let mut tally = Tally::default();

    match &opts.dataset {
        Some((model_path, args)) => {
            let file = common::load_model_file(model_path)?;
            let clf = file.classifier()?.with_tolerance(opts.epsilon)?;
            if clf.n_features() > opts.max_n {
                return Err(Failure::Input(anyhow::anyhow!(
                    "model has {} features, more than --max-n {}",
                    clf.n_features(),
                    opts.max_n
                )));
            }
            let raw = common::load(args)?;
            let data = common::to_model_space(&file, &common::select(&raw, args, SplitArg::All)?)?;
            let (instances, _) = common::instances(clf.model(), &data.rows);
            for (id, inst) in &instances {
                check(
                    &mut tally,
                    format!("instance {id}"),
                    &clf,
                    inst,
                    opts.seed ^ *id as u64,
                    opts.inject_fault,
                )?;
            }
        }
        None => {
            if opts.cases == 0 {
                eprintln!("warning: --cases 0 checks nothing");
            }
            if opts.max_n < 2 {
                return Err(Failure::Input(anyhow::anyhow!("--max-n must be at least 2")));
            }
            let mut gen = CaseGenerator::new(opts.seed);
            for i in 0..opts.cases {
                let label = if i % 2 == 0 {
                    Label::Positive
                } else {
                    Label::Negative
                };
                for want in [label, Label::Reject] {
                    let n = gen.feature_count(2, opts.max_n);
                    let case = gen.case_with_label(n, want);
                    check(
                        &mut tally,
                        format!("case {i} ({want:?}, n={n})"),
                        &case.classifier.with_tolerance(opts.epsilon)?,
                        &case.instance,
                        opts.seed.wrapping_add(i as u64),
                        opts.inject_fault,
                    )?;
                }
            }
        }
    }

    println!(
        "{}/{} classified, {}/{} rejected agree",
        tally.classified.0, tally.classified.1, tally.rejected.0, tally.rejected.1
    );
    if tally.failures.is_empty() {
        return Ok(());
    }
    for f in tally.failures.iter().take(20) {
        eprintln!("  {f}");
    }
    Err(Failure::Verification(format!(
        "{} explanation(s) disagree with exhaustive search",
        tally.failures.len()
    )))
}
