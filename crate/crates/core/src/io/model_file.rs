//! JSON model files.
//!
//! ```json
//! {"weights":[2.0,-2.0],"bias":0.0,"t_minus":-1.0,"t_plus":1.0,
//!  "domains":[{"lower":0.0,"upper":1.0},{"lower":0.0,"upper":1.0}],
//!  "scaling":null}
//! ```
//!
//! All six fields are required. Thresholds are `null` until calibrated;
//! `scaling` is `null` when the model works on raw feature values.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::dataset::MinMaxScaler;
use crate::model::{FeatureDomain, LinearModel, RejectClassifier};

const FIELDS: [&str; 6] = ["weights", "bias", "t_minus", "t_plus", "domains", "scaling"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub t_minus: Option<f64>,
    pub t_plus: Option<f64>,
    pub domains: Vec<FeatureDomain>,
    pub scaling: Option<MinMaxScaler>,
}

impl ModelFile {
    pub fn from_model(model: &LinearModel, scaling: Option<MinMaxScaler>) -> Self {
        Self {
            weights: model.weights().to_vec(),
            bias: model.bias(),
            t_minus: None,
            t_plus: None,
            domains: model.domains().to_vec(),
            scaling,
        }
    }

    pub fn from_classifier(clf: &RejectClassifier, scaling: Option<MinMaxScaler>) -> Self {
        Self {
            t_minus: Some(clf.t_minus()),
            t_plus: Some(clf.t_plus()),
            ..Self::from_model(clf.model(), scaling)
        }
    }

    pub fn model(&self) -> Result<LinearModel> {
        LinearModel::new(self.weights.clone(), self.bias, self.domains.clone())
    }

    /// Fails if the thresholds have not been calibrated.
    pub fn classifier(&self) -> Result<RejectClassifier> {
        match (self.t_minus, self.t_plus) {
            (Some(lo), Some(hi)) => RejectClassifier::new(self.model()?, lo, hi),
            _ => Err(Error::ModelFormat(
                "model has no rejection thresholds; run calibration first".into(),
            )),
        }
    }

    pub fn with_thresholds(mut self, t_minus: f64, t_plus: f64) -> Result<Self> {
        if !(t_minus < t_plus) {
            return Err(Error::InvalidThresholds { t_minus, t_plus });
        }
        self.t_minus = Some(t_minus);
        self.t_plus = Some(t_plus);
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        self.model()?;
        match (self.t_minus, self.t_plus) {
            (None, None) => {}
            (Some(lo), Some(hi)) => {
                if !(lo < hi) {
                    return Err(Error::InvalidThresholds {
                        t_minus: lo,
                        t_plus: hi,
                    });
                }
            }
            _ => {
                return Err(Error::ModelFormat(
                    "t_minus and t_plus must both be set or both be null".into(),
                ))
            }
        }
        if let Some(s) = &self.scaling {
            if s.min.len() != self.weights.len() || s.max.len() != self.weights.len() {
                return Err(Error::ModelFormat(format!(
                    "scaling covers {} features, model has {}",
                    s.min.len(),
                    self.weights.len()
                )));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::ModelFormat("expected a JSON object".into()))?;
        if let Some(missing) = FIELDS.iter().find(|f| !obj.contains_key(**f)) {
            return Err(Error::ModelFormat(format!("missing field '{missing}'")));
        }
        let file: ModelFile = serde_json::from_value(value)?;
        file.validate()?;
        Ok(file)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelFile> {
    ModelFile::from_json(&std::fs::read_to_string(path)?)
}

pub fn save_model(model: &ModelFile, path: impl AsRef<Path>) -> Result<()> {
    model.validate()?;
    let mut text = model.to_json()?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
