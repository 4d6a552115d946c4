//! Linear models with a reject option and the closed-form worst-case
//! score bounds every explainer in this crate is built on.
//!
//! A [`RejectClassifier`] labels an instance `Positive` when its score is
//! above `t_plus`, `Negative` when below `t_minus`, and `Reject` on the
//! closed band in between. Fixing a subset of features to their observed
//! values and letting the rest range over their domains yields a score
//! interval `[s_min, s_max]` that [`CoefficientProfile`] evaluates in
//! linear time.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for every threshold comparison.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Bounded real domain `[lower, upper]` of one feature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureDomain {
    pub lower: f64,
    pub upper: f64,
}

impl FeatureDomain {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        let domain = Self { lower, upper };
        domain.validate(0)?;
        Ok(domain)
    }

    pub fn unit() -> Self {
        Self {
            lower: 0.0,
            upper: 1.0,
        }
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    fn validate(&self, feature: usize) -> Result<()> {
        if !(self.lower.is_finite() && self.upper.is_finite()) || self.lower > self.upper {
            return Err(Error::InvalidDomain {
                feature,
                lower: self.lower,
                upper: self.upper,
            });
        }
        Ok(())
    }
}

/// Affine scorer `w . x + b` over bounded feature domains.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    weights: Vec<f64>,
    bias: f64,
    domains: Vec<FeatureDomain>,
}

impl LinearModel {
    pub fn new(weights: Vec<f64>, bias: f64, domains: Vec<FeatureDomain>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyModel);
        }
        if weights.len() != domains.len() {
            return Err(Error::DimensionMismatch {
                expected: weights.len(),
                found: domains.len(),
            });
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite("weights"));
        }
        if !bias.is_finite() {
            return Err(Error::NonFinite("bias"));
        }
        for (i, d) in domains.iter().enumerate() {
            d.validate(i)?;
        }
        Ok(Self {
            weights,
            bias,
            domains,
        })
    }

    /// Model with every feature ranging over `[0, 1]`.
    pub fn with_unit_domains(weights: Vec<f64>, bias: f64) -> Result<Self> {
        let domains = vec![FeatureDomain::unit(); weights.len()];
        Self::new(weights, bias, domains)
    }

    pub fn n_features(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn domains(&self) -> &[FeatureDomain] {
        &self.domains
    }

    /// Linear score of a validated instance.
    pub fn score(&self, instance: &Instance) -> Result<f64> {
        self.check_dim(instance.len())?;
        Ok(self.score_unchecked(instance.values()))
    }

    pub(crate) fn score_unchecked(&self, values: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(values)
            .map(|(w, x)| w * x)
            .sum::<f64>()
            + self.bias
    }

    pub(crate) fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                found,
            });
        }
        Ok(())
    }
}

/// A full feature assignment, checked against a model's domains.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    values: Vec<f64>,
}

impl Instance {
    /// Validates `values` against `model`. Out-of-domain values are an
    /// error; they are never clamped.
    pub fn new(values: Vec<f64>, model: &LinearModel) -> Result<Self> {
        model.check_dim(values.len())?;
        for (i, (&v, d)) in values.iter().zip(model.domains()).enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite("instance"));
            }
            if !d.contains(v) {
                return Err(Error::OutOfDomain {
                    feature: i,
                    value: v,
                    lower: d.lower,
                    upper: d.upper,
                });
            }
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Label {
    Positive,
    Negative,
    Reject,
}

impl Label {
    pub fn is_classified(self) -> bool {
        self != Label::Reject
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub label: Label,
    pub score: f64,
}

/// Linear model plus rejection thresholds `t_minus < t_plus`.
#[derive(Debug, Clone, PartialEq)]
pub struct RejectClassifier {
    model: LinearModel,
    t_minus: f64,
    t_plus: f64,
    tolerance: f64,
}

impl RejectClassifier {
    pub fn new(model: LinearModel, t_minus: f64, t_plus: f64) -> Result<Self> {
        if !(t_minus.is_finite() && t_plus.is_finite()) || t_minus >= t_plus {
            return Err(Error::InvalidThresholds { t_minus, t_plus });
        }
        Ok(Self {
            model,
            t_minus,
            t_plus,
            tolerance: DEFAULT_TOLERANCE,
        })
    }

    /// Replaces the comparison tolerance (default [`DEFAULT_TOLERANCE`]).
    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self> {
        if !tolerance.is_finite() || tolerance < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "tolerance must be finite and non-negative, got {tolerance}"
            )));
        }
        self.tolerance = tolerance;
        Ok(self)
    }

    pub fn model(&self) -> &LinearModel {
        &self.model
    }

    pub fn t_minus(&self) -> f64 {
        self.t_minus
    }

    pub fn t_plus(&self) -> f64 {
        self.t_plus
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn n_features(&self) -> usize {
        self.model.n_features()
    }

    /// Label assigned to a raw score. Scores within tolerance of either
    /// threshold are rejected.
    pub fn label_for_score(&self, score: f64) -> Label {
        if score > self.t_plus + self.tolerance {
            Label::Positive
        } else if score < self.t_minus - self.tolerance {
            Label::Negative
        } else {
            Label::Reject
        }
    }

    pub fn predict(&self, instance: &Instance) -> Result<Prediction> {
        let score = self.model.score(instance)?;
        Ok(Prediction {
            label: self.label_for_score(score),
            score,
        })
    }

    pub fn coefficient_profile(&self, instance: &Instance) -> Result<CoefficientProfile> {
        self.model.check_dim(instance.len())?;
        Ok(CoefficientProfile::compute(&self.model, instance.values()))
    }

    /// Closed-form sufficiency test for `fixed` under the given kind.
    ///
    /// The instance's own prediction must match `kind`.
    pub fn is_valid_explanation(
        &self,
        instance: &Instance,
        fixed: &[usize],
        kind: ExplanationKind,
    ) -> Result<bool> {
        Ok(self.explanation_slack(instance, fixed, kind)? >= -self.tolerance)
    }

    /// Smallest distance by which the worst-case bounds of `fixed` clear
    /// the relevant thresholds. Non-negative for sufficient sets; values
    /// within tolerance of zero mark explanations that sit on a boundary.
    pub fn explanation_slack(
        &self,
        instance: &Instance,
        fixed: &[usize],
        kind: ExplanationKind,
    ) -> Result<f64> {
        let label = self.predict(instance)?.label;
        if kind.label() != label {
            return Err(Error::KindMismatch { kind, label });
        }
        let profile = self.coefficient_profile(instance)?;
        self.slack_with_profile(&profile, fixed, kind)
    }

    pub(crate) fn slack_with_profile(
        &self,
        profile: &CoefficientProfile,
        fixed: &[usize],
        kind: ExplanationKind,
    ) -> Result<f64> {
        Ok(match kind {
            ExplanationKind::Positive => profile.s_min(fixed)? - self.t_plus,
            ExplanationKind::Negative => self.t_minus - profile.s_max(fixed)?,
            ExplanationKind::Rejection => {
                let up = self.t_plus - profile.s_max(fixed)?;
                let down = profile.s_min(fixed)? - self.t_minus;
                up.min(down)
            }
        })
    }
}

/// Per-feature worst-case and observed contributions for one
/// instance/model pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientProfile {
    pub alpha_max: Vec<f64>,
    pub alpha_min: Vec<f64>,
    pub beta: Vec<f64>,
    pub delta_plus: Vec<f64>,
    pub delta_minus: Vec<f64>,
    pub baseline_max: f64,
    pub baseline_min: f64,
}

impl CoefficientProfile {
    fn compute(model: &LinearModel, values: &[f64]) -> Self {
        let n = model.n_features();
        let mut alpha_max = Vec::with_capacity(n);
        let mut alpha_min = Vec::with_capacity(n);
        let mut beta = Vec::with_capacity(n);
        for ((&w, d), &x) in model.weights().iter().zip(model.domains()).zip(values) {
            let (hi, lo) = if w >= 0.0 {
                (w * d.upper, w * d.lower)
            } else {
                (w * d.lower, w * d.upper)
            };
            alpha_max.push(hi);
            alpha_min.push(lo);
            beta.push(w * x);
        }
        let delta_plus = beta.iter().zip(&alpha_min).map(|(b, a)| b - a).collect();
        let delta_minus = alpha_max.iter().zip(&beta).map(|(a, b)| a - b).collect();
        let baseline_max = model.bias() + alpha_max.iter().sum::<f64>();
        let baseline_min = model.bias() + alpha_min.iter().sum::<f64>();
        Self {
            alpha_max,
            alpha_min,
            beta,
            delta_plus,
            delta_minus,
            baseline_max,
            baseline_min,
        }
    }

    pub fn n_features(&self) -> usize {
        self.beta.len()
    }

    /// Largest score reachable when `fixed` keeps its observed values.
    pub fn s_max(&self, fixed: &[usize]) -> Result<f64> {
        let mask = self.mask(fixed)?;
        Ok(self.baseline_max
            + mask
                .iter()
                .enumerate()
                .filter(|(_, &m)| m)
                .map(|(j, _)| self.beta[j] - self.alpha_max[j])
                .sum::<f64>())
    }

    /// Smallest score reachable when `fixed` keeps its observed values.
    pub fn s_min(&self, fixed: &[usize]) -> Result<f64> {
        let mask = self.mask(fixed)?;
        Ok(self.baseline_min
            + mask
                .iter()
                .enumerate()
                .filter(|(_, &m)| m)
                .map(|(j, _)| self.beta[j] - self.alpha_min[j])
                .sum::<f64>())
    }

    fn mask(&self, fixed: &[usize]) -> Result<Vec<bool>> {
        let n = self.n_features();
        let mut mask = vec![false; n];
        for &j in fixed {
            if j >= n {
                return Err(Error::IndexOutOfRange { index: j, n });
            }
            mask[j] = true;
        }
        Ok(mask)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ExplanationKind {
    Positive,
    Negative,
    Rejection,
}

impl ExplanationKind {
    pub fn for_label(label: Label) -> Self {
        match label {
            Label::Positive => ExplanationKind::Positive,
            Label::Negative => ExplanationKind::Negative,
            Label::Reject => ExplanationKind::Rejection,
        }
    }

    pub fn label(self) -> Label {
        match self {
            ExplanationKind::Positive => Label::Positive,
            ExplanationKind::Negative => Label::Negative,
            ExplanationKind::Rejection => Label::Reject,
        }
    }
}

/// A set of fixed features that suffices for the instance's outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Explanation {
    indices: Vec<usize>,
    pub kind: ExplanationKind,
    pub certified_minimum: bool,
}

impl Explanation {
    pub fn new(mut indices: Vec<usize>, kind: ExplanationKind, certified_minimum: bool) -> Self {
        indices.sort_unstable();
        indices.dedup();
        Self {
            indices,
            kind,
            certified_minimum,
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn size(&self) -> usize {
        self.indices.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clf(weights: Vec<f64>, bias: f64, t_minus: f64, t_plus: f64) -> RejectClassifier {
        let model = LinearModel::with_unit_domains(weights, bias).unwrap();
        RejectClassifier::new(model, t_minus, t_plus).unwrap()
    }

    fn inst(c: &RejectClassifier, x: Vec<f64>) -> Instance {
        Instance::new(x, c.model()).unwrap()
    }

    #[test]
    fn score_examples() {
        let m = LinearModel::with_unit_domains(vec![3.0, -2.0, 1.0], 0.0).unwrap();
        let x = Instance::new(vec![1.0, 0.0, 1.0], &m).unwrap();
        assert_eq!(m.score(&x).unwrap(), 4.0);

        let m = LinearModel::with_unit_domains(vec![0.0; 4], 2.5).unwrap();
        let x = Instance::new(vec![0.3, 0.9, 0.0, 1.0], &m).unwrap();
        assert_eq!(m.score(&x).unwrap(), 2.5);

        let m = LinearModel::with_unit_domains(vec![2.0, -2.0], 0.0).unwrap();
        let x = Instance::new(vec![0.5, 0.5], &m).unwrap();
        assert_eq!(m.score(&x).unwrap(), 0.0);
    }

    #[test]
    fn score_dimension_mismatch() {
        let m2 = LinearModel::with_unit_domains(vec![1.0, 1.0], 0.0).unwrap();
        let m3 = LinearModel::with_unit_domains(vec![1.0, 1.0, 1.0], 0.0).unwrap();
        let x = Instance::new(vec![0.5, 0.5, 0.5], &m3).unwrap();
        assert!(matches!(
            m2.score(&x),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 3
            })
        ));
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            LinearModel::with_unit_domains(vec![], 0.0),
            Err(Error::EmptyModel)
        ));
        assert!(LinearModel::new(vec![1.0], 0.0, vec![]).is_err());
        assert!(LinearModel::with_unit_domains(vec![f64::NAN], 0.0).is_err());
        assert!(FeatureDomain::new(1.0, 0.0).is_err());
        assert!(FeatureDomain::new(0.0, f64::INFINITY).is_err());

        let m = LinearModel::with_unit_domains(vec![1.0], 0.0).unwrap();
        assert!(matches!(
            Instance::new(vec![1.5], &m),
            Err(Error::OutOfDomain { feature: 0, .. })
        ));
        assert!(RejectClassifier::new(m.clone(), 1.0, 1.0).is_err());
        assert!(RejectClassifier::new(m, 1.0, 0.0).is_err());
    }

    #[test]
    fn predict_banknote_thresholds() {
        let c = clf(vec![1.0], 0.0, -0.35, 0.01);
        assert_eq!(c.label_for_score(0.5), Label::Positive);
        assert_eq!(c.label_for_score(-0.1), Label::Reject);
        assert_eq!(c.label_for_score(-0.5), Label::Negative);
        // exact threshold hits fall in the closed rejection band
        assert_eq!(c.label_for_score(0.01), Label::Reject);
        assert_eq!(c.label_for_score(-0.35), Label::Reject);
    }

    #[test]
    fn profile_mixed_signs() {
        let c = clf(vec![2.0, -2.0], 0.0, -1.0, 1.0);
        let p = c.coefficient_profile(&inst(&c, vec![0.5, 0.5])).unwrap();
        assert_eq!(p.alpha_max, vec![2.0, 0.0]);
        assert_eq!(p.alpha_min, vec![0.0, -2.0]);
        assert_eq!(p.beta, vec![1.0, -1.0]);
        assert_eq!(p.baseline_max, 2.0);
        assert_eq!(p.baseline_min, -2.0);

        assert_eq!(p.s_max(&[0]).unwrap(), 1.0);
        assert_eq!(p.s_min(&[0]).unwrap(), -1.0);
        assert_eq!(p.s_max(&[]).unwrap(), 2.0);
        assert_eq!(p.s_min(&[]).unwrap(), -2.0);
        assert_eq!(p.s_max(&[0, 1]).unwrap(), 0.0);
        assert_eq!(p.s_min(&[0, 1]).unwrap(), 0.0);
        assert!(matches!(
            p.s_max(&[2]),
            Err(Error::IndexOutOfRange { index: 2, n: 2 })
        ));
    }

    #[test]
    fn profile_zero_weights() {
        let c = clf(vec![0.0; 3], 0.7, -1.0, 1.0);
        let p = c.coefficient_profile(&inst(&c, vec![0.2, 0.4, 0.9])).unwrap();
        assert_eq!(p.alpha_max, vec![0.0; 3]);
        assert_eq!(p.alpha_min, vec![0.0; 3]);
        assert_eq!(p.beta, vec![0.0; 3]);
        assert_eq!(p.baseline_max, 0.7);
        assert_eq!(p.baseline_min, 0.7);
    }

    #[test]
    fn profile_gains() {
        let c = clf(vec![3.0, -2.0, 1.0], 0.0, 0.0, 1.0);
        let p = c.coefficient_profile(&inst(&c, vec![1.0, 0.0, 1.0])).unwrap();
        assert_eq!(p.delta_plus, vec![3.0, 2.0, 1.0]);
        assert_eq!(p.delta_minus, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn validity_examples() {
        let c = clf(vec![2.0, -2.0], 0.0, -1.0, 1.0);
        let x = inst(&c, vec![0.5, 0.5]);
        assert!(c
            .is_valid_explanation(&x, &[0], ExplanationKind::Rejection)
            .unwrap());
        assert!(c
            .is_valid_explanation(&x, &[0, 1], ExplanationKind::Rejection)
            .unwrap());
        assert!(!c
            .is_valid_explanation(&x, &[], ExplanationKind::Rejection)
            .unwrap());

        let c = clf(vec![3.0, -2.0, 1.0], 0.0, 0.0, 1.0);
        let x = inst(&c, vec![1.0, 0.0, 1.0]);
        assert!(!c
            .is_valid_explanation(&x, &[1], ExplanationKind::Positive)
            .unwrap());
        assert!(c
            .is_valid_explanation(&x, &[0, 1, 2], ExplanationKind::Positive)
            .unwrap());
        assert!(matches!(
            c.is_valid_explanation(&x, &[0], ExplanationKind::Negative),
            Err(Error::KindMismatch { .. })
        ));
    }

    #[test]
    fn explanation_normalizes_indices() {
        let e = Explanation::new(vec![3, 1, 3, 0], ExplanationKind::Positive, true);
        assert_eq!(e.indices(), &[0, 1, 3]);
        assert_eq!(e.size(), 3);
    }

    #[test]
    fn tolerance_is_configurable() {
        let c = clf(vec![1.0], 0.0, -1.0, 1.0).with_tolerance(0.1).unwrap();
        assert_eq!(c.label_for_score(1.05), Label::Reject);
        assert_eq!(c.label_for_score(1.2), Label::Positive);
        assert!(clf(vec![1.0], 0.0, -1.0, 1.0).with_tolerance(-1.0).is_err());
    }
}
