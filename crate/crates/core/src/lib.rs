//! Minimum-size abductive explanations for linear classifiers with a
//! reject option.
//!
//! Accepted predictions are explained by a greedy prefix over per-feature
//! gains ([`greedy`]); rejections by an exact 0-1 program solved with a
//! built-in branch-and-bound ([`ilp`]). [`baseline`] provides a
//! subset-minimal comparison explainer and [`oracle`] exhaustive ground
//! truth for small models.

pub mod baseline;
pub mod calibration;
pub mod error;
pub mod explain;
pub mod greedy;
pub mod ilp;
pub mod io;
pub mod model;
pub mod oracle;

pub use error::{Error, Result};
pub use explain::{explain_minimum, explain_with, ExplainOutcome, Method};
pub use ilp::SolverBudget;
pub use model::{
    CoefficientProfile, Explanation, ExplanationKind, FeatureDomain, Instance, Label,
    LinearModel, Prediction, RejectClassifier, DEFAULT_TOLERANCE,
};
