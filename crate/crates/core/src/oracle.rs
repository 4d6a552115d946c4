//! Ground truth for small instances: exhaustive minimum-size search,
//! randomized sufficiency checks, and a seeded random-case generator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{
    Explanation, ExplanationKind, Instance, Label, LinearModel, RejectClassifier,
};

/// Largest feature count the exhaustive search accepts.
pub const MAX_BRUTE_FORCE_FEATURES: usize = 20;

/// Smallest sufficient set, found by enumerating subsets by increasing
/// size and lexicographically within a size.
pub fn brute_force_minimum(clf: &RejectClassifier, instance: &Instance) -> Result<Explanation> {
    let n = clf.n_features();
    if n > MAX_BRUTE_FORCE_FEATURES {
        return Err(Error::TooManyFeatures {
            n,
            limit: MAX_BRUTE_FORCE_FEATURES,
        });
    }
    let kind = ExplanationKind::for_label(clf.predict(instance)?.label);
    for k in 0..=n {
        let mut combo: Vec<usize> = (0..k).collect();
        loop {
            if clf.is_valid_explanation(instance, &combo, kind)? {
                return Ok(Explanation::new(combo, kind, true));
            }
            if !next_combination(&mut combo, n) {
                break;
            }
        }
    }
    unreachable!("the full feature set always reproduces the prediction")
}

/// Advances `combo` to the next k-subset of `0..n` in lexicographic order.
fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - k + i {
            combo[i] += 1;
            for t in i + 1..k {
                combo[t] = combo[t - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Checks `fixed` by scoring concrete completions: `trials` uniform draws
/// of the free features plus the two sign-rule corners. Scores are
/// computed directly from the weights, never from the closed-form bounds.
pub fn sampled_sufficiency_check(
    clf: &RejectClassifier,
    instance: &Instance,
    fixed: &[usize],
    kind: ExplanationKind,
    trials: usize,
    seed: u64,
) -> Result<bool> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    let model = clf.model();
    model.check_dim(instance.len())?;
    let n = model.n_features();
    let mut is_fixed = vec![false; n];
    for &j in fixed {
        if j >= n {
            return Err(Error::IndexOutOfRange { index: j, n });
        }
        is_fixed[j] = true;
    }

    let tol = clf.tolerance();
    let accepts = |values: &[f64]| {
        let s = model.score_unchecked(values);
        match kind {
            ExplanationKind::Positive => s >= clf.t_plus() - tol,
            ExplanationKind::Negative => s <= clf.t_minus() + tol,
            ExplanationKind::Rejection => {
                s >= clf.t_minus() - tol && s <= clf.t_plus() + tol
            }
        }
    };

    let x = instance.values();
    let corner = |maximize: bool| -> Vec<f64> {
        (0..n)
            .map(|j| {
                if is_fixed[j] {
                    return x[j];
                }
                let d = model.domains()[j];
                let up = (model.weights()[j] >= 0.0) == maximize;
                if up {
                    d.upper
                } else {
                    d.lower
                }
            })
            .collect()
    };
    if !accepts(&corner(true)) || !accepts(&corner(false)) {
        return Ok(false);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut buf = x.to_vec();
    for _ in 0..trials {
        for j in 0..n {
            if !is_fixed[j] {
                let d = model.domains()[j];
                buf[j] = if d.lower < d.upper {
                    rng.gen_range(d.lower..=d.upper)
                } else {
                    d.lower
                };
            }
        }
        if !accepts(&buf) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone)]
pub struct RandomCase {
    pub classifier: RejectClassifier,
    pub instance: Instance,
    pub label: Label,
}

/// Seeded generator of small random models and instances.
///
/// Weights are uniform in `[-1, 1]`, the bias in `[-0.5, 0.5]`, domains are
/// `[0, 1]` and instances uniform in the box. The rejection band has a
/// width uniform in `[0.05, 1.0]` centred near zero.
#[derive(Debug, Clone)]
pub struct CaseGenerator {
    rng: ChaCha8Rng,
}

impl CaseGenerator {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn random_case(&mut self, n: usize) -> RandomCase {
        let rng = &mut self.rng;
        let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let bias = rng.gen_range(-0.5..=0.5);
        let values: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=1.0)).collect();
        let width = rng.gen_range(0.05..=1.0);
        let centre = rng.gen_range(-0.1..=0.1);
        let model = LinearModel::with_unit_domains(weights, bias).expect("finite weights");
        let instance = Instance::new(values, &model).expect("values in [0, 1]");
        let classifier = RejectClassifier::new(model, centre - width / 2.0, centre + width / 2.0)
            .expect("positive band width");
        let label = classifier
            .predict(&instance)
            .expect("matching dimensions")
            .label;
        RandomCase {
            classifier,
            instance,
            label,
        }
    }

    /// Draws cases with `n` features until one carries `label`.
    pub fn case_with_label(&mut self, n: usize, label: Label) -> RandomCase {
        loop {
            let case = self.random_case(n);
            if case.label == label {
                return case;
            }
        }
    }

    pub fn feature_count(&mut self, min: usize, max: usize) -> usize {
        self.rng.gen_range(min..=max)
    }
}

/// Outcome of comparing one explainer result with the exhaustive minimum.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleCheck {
    pub label: Label,
    pub explained_size: usize,
    pub oracle_size: usize,
    pub valid: bool,
    pub certified: bool,
}

impl OracleCheck {
    pub fn agrees(&self) -> bool {
        self.valid && self.certified && self.explained_size == self.oracle_size
    }
}

pub fn check_against_oracle(
    clf: &RejectClassifier,
    instance: &Instance,
    explanation: &Explanation,
) -> Result<OracleCheck> {
    let label = clf.predict(instance)?.label;
    let oracle = brute_force_minimum(clf, instance)?;
    let valid = explanation.kind == ExplanationKind::for_label(label)
        && clf.is_valid_explanation(instance, explanation.indices(), explanation.kind)?;
    Ok(OracleCheck {
        label,
        explained_size: explanation.size(),
        oracle_size: oracle.size(),
        valid,
        certified: explanation.certified_minimum,
    })
}
