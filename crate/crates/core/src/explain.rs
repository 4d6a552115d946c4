//! Single entry point that picks the explainer matching a prediction.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::baseline::subset_minimal_explanation;
use crate::error::{Error, Result};
use crate::greedy::{explain_negative, explain_positive};
use crate::ilp::{explain_rejection, SolverBudget};
use crate::model::{Explanation, Instance, Label, RejectClassifier};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Greedy prefix for accepted predictions, exact 0-1 program for rejections.
    Minabro,
    /// Deletion-based subset-minimal explainer.
    Baseline,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Minabro => "minabro",
            Method::Baseline => "baseline",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minabro" => Ok(Method::Minabro),
            "baseline" => Ok(Method::Baseline),
            other => Err(Error::InvalidConfig(format!("unknown method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExplainOutcome {
    pub label: Label,
    pub score: f64,
    pub method: Method,
    pub explanation: Explanation,
    pub solve_time: Duration,
    /// Branch-and-bound nodes, for rejected instances under `Minabro`.
    pub nodes: Option<u64>,
}

pub fn explain_with(
    clf: &RejectClassifier,
    instance: &Instance,
    method: Method,
    budget: &SolverBudget,
) -> Result<ExplainOutcome> {
    let start = Instant::now();
    let prediction = clf.predict(instance)?;
    let (explanation, nodes) = match (method, prediction.label) {
        (Method::Baseline, _) => (subset_minimal_explanation(clf, instance)?, None),
        (Method::Minabro, Label::Positive) => (explain_positive(clf, instance)?.0, None),
        (Method::Minabro, Label::Negative) => (explain_negative(clf, instance)?.0, None),
        (Method::Minabro, Label::Reject) => {
            let (e, sol) = explain_rejection(clf, instance, budget)?;
            (e, Some(sol.nodes_explored))
        }
    };
    Ok(ExplainOutcome {
        label: prediction.label,
        score: prediction.score,
        method,
        explanation,
        solve_time: start.elapsed(),
        nodes,
    })
}

/// Minimum-size explanation for whatever the classifier predicts.
pub fn explain_minimum(
    clf: &RejectClassifier,
    instance: &Instance,
    budget: &SolverBudget,
) -> Result<ExplainOutcome> {
    explain_with(clf, instance, Method::Minabro, budget)
}
