//! Delimiter-separated datasets, min-max scaling and stratified splits.

use std::io::Read;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::FeatureDomain;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub feature_names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Class labels in `{-1, +1}`.
    pub labels: Vec<i8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum LabelColumn {
    #[default]
    Last,
    Index(usize),
    Name(String),
}

impl LabelColumn {
    /// Numeric strings select by index, anything else by header name.
    pub fn parse(text: &str) -> Self {
        match text {
            "last" => LabelColumn::Last,
            s => s
                .parse::<usize>()
                .map(LabelColumn::Index)
                .unwrap_or_else(|_| LabelColumn::Name(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadOptions {
    pub delimiter: u8,
    pub label_column: LabelColumn,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            delimiter: b',',
            label_column: LabelColumn::Last,
        }
    }
}

/// Maps `-1`/`0` to `-1` and `1`/`+1` to `+1`; anything else is an error.
pub fn parse_label(cell: &str) -> Result<i8> {
    let v: f64 = cell
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("label '{cell}' is not numeric")))?;
    if v == 1.0 {
        Ok(1)
    } else if v == 0.0 || v == -1.0 {
        Ok(-1)
    } else {
        Err(Error::Parse(format!(
            "label '{cell}' is not one of -1, 0, 1"
        )))
    }
}

pub fn load_dataset(path: impl AsRef<Path>, options: &LoadOptions) -> Result<Dataset> {
    let file = std::fs::File::open(path)?;
    read_dataset(file, options)
}

pub fn read_dataset<R: Read>(reader: R, options: &LoadOptions) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header.len() < 2 {
        return Err(Error::Parse(
            "need at least one feature column and a label column".into(),
        ));
    }
    let label_idx = match &options.label_column {
        LabelColumn::Last => header.len() - 1,
        LabelColumn::Index(i) if *i < header.len() => *i,
        LabelColumn::Index(i) => {
            return Err(Error::Parse(format!(
                "label column {i} missing ({} columns)",
                header.len()
            )))
        }
        LabelColumn::Name(name) => header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse(format!("label column '{name}' missing")))?,
    };
    let feature_names = header
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != label_idx)
        .map(|(_, h)| h.clone())
        .collect();

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (line, record) in rdr.records().enumerate() {
        let record = record?;
        let mut row = Vec::with_capacity(header.len() - 1);
        for (col, cell) in record.iter().enumerate() {
            if col == label_idx {
                labels.push(parse_label(cell)?);
                continue;
            }
            let v: f64 = cell.parse().map_err(|_| {
                Error::Parse(format!(
                    "row {}, column '{}': '{cell}' is not numeric",
                    line + 1,
                    header[col]
                ))
            })?;
            if !v.is_finite() {
                return Err(Error::NonFinite("dataset cell"));
            }
            row.push(v);
        }
        rows.push(row);
    }
    Ok(Dataset {
        feature_names,
        rows,
        labels,
    })
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            feature_names: self.feature_names.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// Observed per-feature `[min, max]`.
    pub fn observed_domains(&self) -> Vec<FeatureDomain> {
        (0..self.n_features())
            .map(|j| {
                let (lo, hi) = self.rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                    (lo.min(r[j]), hi.max(r[j]))
                });
                if lo.is_finite() {
                    FeatureDomain { lower: lo, upper: hi }
                } else {
                    FeatureDomain::unit()
                }
            })
            .collect()
    }

    /// Seeded split keeping each class's proportion; returns sorted
    /// (train, test) row indices.
    pub fn stratified_split(&self, train_fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut train = Vec::new();
        let mut test = Vec::new();
        for class in [-1i8, 1] {
            let mut idx: Vec<usize> = (0..self.len()).filter(|&i| self.labels[i] == class).collect();
            idx.shuffle(&mut rng);
            let cut = (idx.len() as f64 * train_fraction).round() as usize;
            train.extend_from_slice(&idx[..cut]);
            test.extend_from_slice(&idx[cut..]);
        }
        train.sort_unstable();
        test.sort_unstable();
        (train, test)
    }
}

/// Per-feature min-max transform fitted on training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl MinMaxScaler {
    pub fn fit(data: &Dataset) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::Parse("cannot fit scaling on an empty dataset".into()));
        }
        let domains = data.observed_domains();
        for (j, d) in domains.iter().enumerate() {
            if d.lower == d.upper {
                log::warn!(
                    "feature '{}' is constant in the training data; it scales to 0",
                    data.feature_names[j]
                );
            }
        }
        Ok(Self {
            min: domains.iter().map(|d| d.lower).collect(),
            max: domains.iter().map(|d| d.upper).collect(),
        })
    }

    pub fn n_features(&self) -> usize {
        self.min.len()
    }

    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(&v, (&lo, &hi))| if hi > lo { (v - lo) / (hi - lo) } else { 0.0 })
            .collect()
    }

    /// Scaled copy. Rows outside the training range may leave `[0, 1]`.
    pub fn transform(&self, data: &Dataset) -> Result<Dataset> {
        if data.n_features() != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                found: data.n_features(),
            });
        }
        Ok(Dataset {
            feature_names: data.feature_names.clone(),
            rows: data.rows.iter().map(|r| self.transform_row(r)).collect(),
            labels: data.labels.clone(),
        })
    }
}
