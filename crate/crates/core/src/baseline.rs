//! Deletion-based subset-minimal explainer used as a comparison baseline.
//!
//! Starting from every feature, each index is dropped in ascending order
//! when the remaining set still suffices. The result is irredundant but
//! not necessarily of minimum size; a different traversal order can
//! return a different (equally irredundant) set.

use crate::error::Result;
use crate::model::{Explanation, ExplanationKind, Instance, RejectClassifier};

pub fn subset_minimal_explanation(
    clf: &RejectClassifier,
    instance: &Instance,
) -> Result<Explanation> {
    let label = clf.predict(instance)?.label;
    let kind = ExplanationKind::for_label(label);
    let profile = clf.coefficient_profile(instance)?;
    let tol = clf.tolerance();

    let n = clf.n_features();
    let mut current: Vec<usize> = (0..n).collect();
    for j in 0..n {
        current.retain(|&i| i != j);
        if clf.slack_with_profile(&profile, &current, kind)? < -tol {
            let at = current.partition_point(|&i| i < j);
            current.insert(at, j);
        }
    }
    Ok(Explanation::new(current, kind, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::LinearModel;

    fn setup(w: Vec<f64>, b: f64, t_minus: f64, t_plus: f64, x: Vec<f64>) -> (RejectClassifier, Instance) {
        let model = LinearModel::with_unit_domains(w, b).unwrap();
        let inst = Instance::new(x, &model).unwrap();
        (RejectClassifier::new(model, t_minus, t_plus).unwrap(), inst)
    }

    fn assert_irredundant(c: &RejectClassifier, x: &Instance, e: &Explanation) {
        assert!(c.is_valid_explanation(x, e.indices(), e.kind).unwrap());
        for &j in e.indices() {
            let rest: Vec<usize> = e.indices().iter().copied().filter(|&i| i != j).collect();
            assert!(!c.is_valid_explanation(x, &rest, e.kind).unwrap());
        }
    }

    #[test]
    fn rejection_example_is_irredundant() {
        let (c, x) = setup(vec![2.0, -2.0], 0.0, -1.0, 1.0, vec![0.5, 0.5]);
        let e = subset_minimal_explanation(&c, &x).unwrap();
        // dropping 0 leaves {1}: s_max = 1, s_min = -1, still valid; then 1 must stay
        assert_eq!(e.indices(), &[1]);
        assert_eq!(e.kind, ExplanationKind::Rejection);
        assert!(!e.certified_minimum);
        assert_irredundant(&c, &x, &e);
    }

    #[test]
    fn empty_when_nothing_is_needed() {
        let (c, x) = setup(vec![0.1, 0.1], 0.0, -1.0, 1.0, vec![0.5, 0.5]);
        let e = subset_minimal_explanation(&c, &x).unwrap();
        assert_eq!(e.size(), 0);
    }

    #[test]
    fn can_exceed_minimum_size() {
        // minimum is {0} (gain 3 covers margin 3); ascending deletion drops 0
        // first because {1, 2} also covers it
        let (c, x) = setup(vec![3.0, 1.5, 1.5], 0.0, -1.0, 3.0 - 1e-6, vec![1.0, 1.0, 1.0]);
        let e = subset_minimal_explanation(&c, &x).unwrap();
        assert_eq!(e.indices(), &[1, 2]);
        assert_eq!(e.kind, ExplanationKind::Positive);
        assert_irredundant(&c, &x, &e);
    }

    #[test]
    fn negative_instance() {
        let (c, x) = setup(vec![-3.0, 2.0, -1.0], 0.0, -1.0, 0.0, vec![1.0, 0.0, 1.0]);
        let e = subset_minimal_explanation(&c, &x).unwrap();
        assert_eq!(e.kind, ExplanationKind::Negative);
        assert_irredundant(&c, &x, &e);
    }
}
