//! Minimum-size explanations for accepted predictions.
//!
//! For a positive prediction the worst-case lower bound starts at
//! `baseline_min` and each fixed feature raises it by its gain
//! `delta_plus[j]`. Every feature costs one unit, so the smallest
//! sufficient set is the shortest prefix of the features sorted by gain
//! whose gains cover `t_plus - baseline_min`. The negative case mirrors
//! this with `delta_minus` against `baseline_max - t_minus`.

use crate::error::{Error, Result};
use crate::model::{Explanation, ExplanationKind, Instance, Label, RejectClassifier};

/// How the greedy prefix was chosen.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyTrace {
    /// Features sorted by non-increasing gain, ties by ascending index.
    pub ordered_indices: Vec<usize>,
    /// Gains in the same order as `ordered_indices`.
    pub gains: Vec<f64>,
    /// Amount the selected gains must cover (before tolerance).
    pub required_margin: f64,
    /// Number of leading features taken.
    pub prefix_length: usize,
}

impl GreedyTrace {
    pub fn prefix_sum(&self, k: usize) -> f64 {
        self.gains[..k].iter().sum()
    }
}

pub fn explain_positive(
    clf: &RejectClassifier,
    instance: &Instance,
) -> Result<(Explanation, GreedyTrace)> {
    explain_classified(clf, instance, ExplanationKind::Positive)
}

pub fn explain_negative(
    clf: &RejectClassifier,
    instance: &Instance,
) -> Result<(Explanation, GreedyTrace)> {
    explain_classified(clf, instance, ExplanationKind::Negative)
}

/// Dispatches on the instance's own prediction. Fails on rejected instances.
pub fn explain_classified(
    clf: &RejectClassifier,
    instance: &Instance,
    kind: ExplanationKind,
) -> Result<(Explanation, GreedyTrace)> {
    let label = clf.predict(instance)?.label;
    if kind == ExplanationKind::Rejection || label != kind.label() {
        return Err(Error::KindMismatch { kind, label });
    }
    // Only one side of the profile matters here, so gains are computed in a
    // single pass rather than through the full coefficient profile. Sorting
    // (gain, index) pairs keeps the comparisons cache-friendly; the index
    // makes the key total, so equal gains stay in ascending index order.
    let model = clf.model();
    let positive = label == Label::Positive;
    let mut bound_sum = 0.0;
    let mut keyed: Vec<(f64, usize)> = Vec::with_capacity(model.n_features());
    for (j, ((&w, d), &x)) in model
        .weights()
        .iter()
        .zip(model.domains())
        .zip(instance.values())
        .enumerate()
    {
        let (hi, lo) = if w >= 0.0 {
            (w * d.upper, w * d.lower)
        } else {
            (w * d.lower, w * d.upper)
        };
        let (bound, gain) = if positive { (lo, w * x - lo) } else { (hi, hi - w * x) };
        bound_sum += bound;
        keyed.push((gain, j));
    }
    // Same summation order as the coefficient profile's baselines.
    let worst = model.bias() + bound_sum;
    let required_margin = if positive {
        clf.t_plus() - worst
    } else {
        worst - clf.t_minus()
    };
    keyed.sort_unstable_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let (sorted_gains, order): (Vec<f64>, Vec<usize>) = keyed.into_iter().unzip();

    let target = required_margin - clf.tolerance();
    let mut covered = 0.0;
    let mut k = 0;
    while covered < target && k < sorted_gains.len() {
        covered += sorted_gains[k];
        k += 1;
    }

    let explanation = Explanation::new(order[..k].to_vec(), kind, true);
    let trace = GreedyTrace {
        ordered_indices: order,
        gains: sorted_gains,
        required_margin,
        prefix_length: k,
    };
    Ok((explanation, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{LinearModel, RejectClassifier};

    fn setup(w: Vec<f64>, t_minus: f64, t_plus: f64, x: Vec<f64>) -> (RejectClassifier, Instance) {
        let model = LinearModel::with_unit_domains(w, 0.0).unwrap();
        let inst = Instance::new(x, &model).unwrap();
        (RejectClassifier::new(model, t_minus, t_plus).unwrap(), inst)
    }

    #[test]
    fn positive_single_feature() {
        let (c, x) = setup(vec![3.0, -2.0, 1.0], 0.0, 1.0, vec![1.0, 0.0, 1.0]);
        let (e, trace) = explain_positive(&c, &x).unwrap();
        assert_eq!(e.indices(), &[0]);
        assert!(e.certified_minimum);
        assert_eq!(trace.prefix_length, 1);
        assert_eq!(trace.required_margin, 3.0);
        assert_eq!(trace.ordered_indices, vec![0, 1, 2]);
        assert_eq!(trace.gains, vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn positive_empty_when_baseline_clears() {
        let model = LinearModel::with_unit_domains(vec![1.0, -0.5], 2.0).unwrap();
        let x = Instance::new(vec![0.3, 0.6], &model).unwrap();
        let c = RejectClassifier::new(model, 0.0, 1.0).unwrap();
        let (e, trace) = explain_positive(&c, &x).unwrap();
        assert_eq!(e.size(), 0);
        assert!(trace.required_margin <= 0.0);
    }

    #[test]
    fn positive_ties_need_both() {
        let (c, x) = setup(vec![1.0, 1.0], 0.0, 1.5, vec![1.0, 1.0]);
        let (e, trace) = explain_positive(&c, &x).unwrap();
        assert_eq!(e.indices(), &[0, 1]);
        assert_eq!(trace.ordered_indices, vec![0, 1]);
        assert!(trace.prefix_sum(1) < trace.required_margin);
    }

    #[test]
    fn negative_mirrors_positive() {
        let (c, x) = setup(vec![-3.0, 2.0, -1.0], -1.0, 0.0, vec![1.0, 0.0, 1.0]);
        let (e, _) = explain_negative(&c, &x).unwrap();
        assert_eq!(e.indices(), &[0]);
        assert_eq!(e.kind, ExplanationKind::Negative);

        let (c, x) = setup(vec![-1.0, -1.0], -1.5, 0.0, vec![1.0, 1.0]);
        let (e, _) = explain_negative(&c, &x).unwrap();
        assert_eq!(e.indices(), &[0, 1]);
    }

    #[test]
    fn negative_empty_when_baseline_below() {
        let model = LinearModel::with_unit_domains(vec![1.0, -0.5], -3.0).unwrap();
        let x = Instance::new(vec![0.3, 0.6], &model).unwrap();
        let c = RejectClassifier::new(model, -1.0, 1.0).unwrap();
        let (e, _) = explain_negative(&c, &x).unwrap();
        assert_eq!(e.size(), 0);
    }

    #[test]
    fn wrong_label_is_rejected() {
        let (c, x) = setup(vec![3.0, -2.0, 1.0], 0.0, 1.0, vec![1.0, 0.0, 1.0]);
        assert!(matches!(
            explain_negative(&c, &x),
            Err(Error::KindMismatch { .. })
        ));
        let (c, x) = setup(vec![2.0, -2.0], -1.0, 1.0, vec![0.5, 0.5]);
        assert!(explain_positive(&c, &x).is_err());
        assert!(explain_classified(&c, &x, ExplanationKind::Rejection).is_err());
    }

    #[test]
    fn tie_break_by_index() {
        let (c, x) = setup(vec![1.0, 2.0, 1.0, 2.0], 0.0, 2.5, vec![1.0; 4]);
        let (e, trace) = explain_positive(&c, &x).unwrap();
        assert_eq!(trace.ordered_indices, vec![1, 3, 0, 2]);
        // margin 2.5 from baseline 0: first gain 2 is not enough
        assert_eq!(e.indices(), &[1, 3]);
    }
}
