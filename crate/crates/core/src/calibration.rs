//! Rejection-threshold calibration by empirical risk minimization, and a
//! small logistic-regression trainer to produce the underlying scorer.
//!
//! The empirical risk of a band `[t_minus, t_plus]` is `E + w_r * R`, with
//! `E` the misclassified accepted instances and `R` the rejected ones,
//! both divided by the total count.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{FeatureDomain, LinearModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskConfig {
    rejection_cost: f64,
}

impl RiskConfig {
    /// `rejection_cost` must lie in `(0, 1]`.
    pub fn new(rejection_cost: f64) -> Result<Self> {
        if !(rejection_cost > 0.0 && rejection_cost <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "rejection cost must lie in (0, 1], got {rejection_cost}"
            )));
        }
        Ok(Self { rejection_cost })
    }

    pub fn rejection_cost(&self) -> f64 {
        self.rejection_cost
    }
}

impl Default for RiskConfig {
    fn default() -> Self {
        Self {
            rejection_cost: 0.24,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub error_ratio: f64,
    pub rejection_ratio: f64,
    pub empirical_risk: f64,
    pub t_minus: f64,
    pub t_plus: f64,
}

impl RiskReport {
    fn from_counts(
        errors: usize,
        rejected: usize,
        total: usize,
        t_minus: f64,
        t_plus: f64,
        config: &RiskConfig,
    ) -> Self {
        let error_ratio = errors as f64 / total as f64;
        let rejection_ratio = rejected as f64 / total as f64;
        Self {
            error_ratio,
            rejection_ratio,
            empirical_risk: error_ratio + config.rejection_cost * rejection_ratio,
            t_minus,
            t_plus,
        }
    }

    pub fn width(&self) -> f64 {
        self.t_plus - self.t_minus
    }
}

fn check_labels(scores: &[f64], labels: &[i8]) -> Result<()> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: scores.len(),
            found: labels.len(),
        });
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::NonFinite("scores"));
    }
    if let Some(bad) = labels.iter().find(|&&y| y != 1 && y != -1) {
        return Err(Error::Parse(format!("label {bad} is not -1 or +1")));
    }
    Ok(())
}

/// Risk of the band `[t_minus, t_plus]`: scores strictly above `t_plus`
/// are positive, strictly below `t_minus` negative, the rest rejected.
pub fn evaluate_risk(
    scores: &[f64],
    labels: &[i8],
    t_minus: f64,
    t_plus: f64,
    config: &RiskConfig,
) -> Result<RiskReport> {
    check_labels(scores, labels)?;
    if scores.is_empty() {
        return Err(Error::DegenerateLabels("no scores".into()));
    }
    if t_minus >= t_plus {
        return Err(Error::InvalidThresholds { t_minus, t_plus });
    }
    let mut errors = 0;
    let mut rejected = 0;
    for (&s, &y) in scores.iter().zip(labels) {
        if s > t_plus {
            errors += usize::from(y != 1);
        } else if s < t_minus {
            errors += usize::from(y != -1);
        } else {
            rejected += 1;
        }
    }
    Ok(RiskReport::from_counts(
        errors,
        rejected,
        scores.len(),
        t_minus,
        t_plus,
        config,
    ))
}

/// Candidate threshold values for a set of scores.
///
/// Each gap between consecutive distinct scores contributes two interior
/// points (at one and two thirds), so a band can sit entirely inside one
/// gap and reject nothing. Two sentinels on each side allow bands that
/// lie wholly below or above every score.
pub fn candidate_thresholds(scores: &[f64]) -> Vec<f64> {
    let mut unique: Vec<f64> = scores.to_vec();
    unique.sort_by(f64::total_cmp);
    unique.dedup();
    let Some((&lo, &hi)) = unique.first().zip(unique.last()) else {
        return Vec::new();
    };
    let mut grid = vec![lo - 2.0, lo - 1.0];
    for pair in unique.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let gap = b - a;
        grid.push(a + gap / 3.0);
        grid.push(a + 2.0 * gap / 3.0);
    }
    grid.push(hi + 1.0);
    grid.push(hi + 2.0);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// Exhaustive search over all ordered pairs of candidate thresholds.
///
/// Ties are broken by the narrowest band, then by the smallest `t_plus`.
pub fn calibrate_thresholds(
    scores: &[f64],
    labels: &[i8],
    config: &RiskConfig,
) -> Result<RiskReport> {
    check_labels(scores, labels)?;
    if scores.len() < 2 {
        return Err(Error::DegenerateLabels(
            "need at least two scored instances".into(),
        ));
    }
    let mut pos: Vec<f64> = Vec::new();
    let mut neg: Vec<f64> = Vec::new();
    for (&s, &y) in scores.iter().zip(labels) {
        if y == 1 {
            pos.push(s)
        } else {
            neg.push(s)
        }
    }
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::DegenerateLabels(
            "both classes must be present".into(),
        ));
    }
    pos.sort_by(f64::total_cmp);
    neg.sort_by(f64::total_cmp);

    let grid = candidate_thresholds(scores);
    let below = |v: &[f64], t: f64| v.partition_point(|&s| s < t);
    let above = |v: &[f64], t: f64| v.len() - v.partition_point(|&s| s <= t);
    // (positives below, negatives below, positives above, negatives above)
    let counts: Vec<[usize; 4]> = grid
        .iter()
        .map(|&t| [below(&pos, t), below(&neg, t), above(&pos, t), above(&neg, t)])
        .collect();

    let m = scores.len();
    let mut best: Option<RiskReport> = None;
    for i in 0..grid.len() {
        let [pos_below, neg_below, _, _] = counts[i];
        for j in i + 1..grid.len() {
            let [_, _, pos_above, neg_above] = counts[j];
            let accepted = pos_below + neg_below + pos_above + neg_above;
            let report = RiskReport::from_counts(
                pos_below + neg_above,
                m - accepted,
                m,
                grid[i],
                grid[j],
                config,
            );
            let better = match &best {
                None => true,
                Some(b) => {
                    report.empirical_risk < b.empirical_risk
                        || (report.empirical_risk == b.empirical_risk
                            && (report.width() < b.width()
                                || (report.width() == b.width() && report.t_plus < b.t_plus)))
                }
            };
            if better {
                best = Some(report);
            }
        }
    }
    Ok(best.expect("grid holds at least four points"))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub l2: f64,
    pub learning_rate: f64,
    pub max_iterations: usize,
    /// Stop once the gradient norm drops below this.
    pub tolerance: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            l2: 1.0,
            learning_rate: 0.1,
            max_iterations: 10_000,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub model: LinearModel,
    pub iterations: usize,
    /// False when the iteration cap was hit first; `model` is then the
    /// best iterate seen.
    pub converged: bool,
    pub loss: f64,
    pub gradient_norm: f64,
}

fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

struct Objective<'a> {
    rows: &'a [Vec<f64>],
    labels: &'a [i8],
    l2: f64,
}

impl Objective<'_> {
    fn loss(&self, w: &[f64], b: f64) -> f64 {
        let m = self.rows.len() as f64;
        let data: f64 = self
            .rows
            .iter()
            .zip(self.labels)
            .map(|(x, &y)| softplus(-f64::from(y) * (dot(w, x) + b)))
            .sum();
        data / m + self.l2 / (2.0 * m) * dot(w, w)
    }

    fn gradient(&self, w: &[f64], b: f64) -> (Vec<f64>, f64) {
        let m = self.rows.len() as f64;
        let mut gw = vec![0.0; w.len()];
        let mut gb = 0.0;
        for (x, &y) in self.rows.iter().zip(self.labels) {
            let y = f64::from(y);
            let coef = -y * sigmoid(-y * (dot(w, x) + b));
            for (g, xi) in gw.iter_mut().zip(x) {
                *g += coef * xi;
            }
            gb += coef;
        }
        for (g, wi) in gw.iter_mut().zip(w) {
            *g = *g / m + self.l2 / m * wi;
        }
        (gw, gb / m)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// L2-regularized logistic regression by batch gradient descent.
///
/// Minimizes `mean(log(1 + exp(-y (w.x + b)))) + l2 / (2m) * |w|^2`; the
/// bias is not penalized. A step that raises the loss is discarded and
/// the learning rate halved.
pub fn train_logistic(
    rows: &[Vec<f64>],
    labels: &[i8],
    domains: Vec<FeatureDomain>,
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    if rows.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: rows.len(),
            found: labels.len(),
        });
    }
    let n = domains.len();
    if let Some(row) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: row.len(),
        });
    }
    if let Some(bad) = labels.iter().find(|&&y| y != 1 && y != -1) {
        return Err(Error::Parse(format!("label {bad} is not -1 or +1")));
    }
    if !(labels.contains(&1) && labels.contains(&-1)) {
        return Err(Error::DegenerateLabels(
            "training data must contain both classes".into(),
        ));
    }

    let objective = Objective {
        rows,
        labels,
        l2: config.l2,
    };
    let mut w = vec![0.0; n];
    let mut b = 0.0;
    let mut loss = objective.loss(&w, b);
    let mut lr = config.learning_rate;
    let mut converged = false;
    let mut grad_norm = f64::INFINITY;
    let mut iterations = 0;

    while iterations < config.max_iterations {
        let (gw, gb) = objective.gradient(&w, b);
        grad_norm = (dot(&gw, &gw) + gb * gb).sqrt();
        if grad_norm < config.tolerance {
            converged = true;
            break;
        }
        iterations += 1;
        let cand_w: Vec<f64> = w.iter().zip(&gw).map(|(wi, g)| wi - lr * g).collect();
        let cand_b = b - lr * gb;
        let cand_loss = objective.loss(&cand_w, cand_b);
        if cand_loss > loss {
            lr /= 2.0;
            if lr < f64::EPSILON {
                break;
            }
            continue;
        }
        w = cand_w;
        b = cand_b;
        loss = cand_loss;
    }
    if !converged && iterations == config.max_iterations {
        let (gw, gb) = objective.gradient(&w, b);
        grad_norm = (dot(&gw, &gw) + gb * gb).sqrt();
        converged = grad_norm < config.tolerance;
    }
    if !converged {
        log::warn!(
            "logistic regression stopped after {iterations} iterations with gradient norm {grad_norm:.3e}"
        );
    }

    Ok(TrainOutcome {
        model: LinearModel::new(w, b, domains)?,
        iterations,
        converged,
        loss,
        gradient_norm: grad_norm,
    })
}
