use std::path::Path;
use std::time::Duration;

use anyhow::{bail, Context};
use minxp::io::{load_dataset, Dataset, LabelColumn, LoadOptions, ModelFile};
use minxp::{Instance, LinearModel, SolverBudget};

use crate::{DataArgs, SplitArg};

pub enum InstanceSource {
    Data { data: DataArgs, split: SplitArg },
    Json(String),
}

pub fn budget(node_limit: u64, time_limit: f64) -> anyhow::Result<SolverBudget> {
    if !(time_limit.is_finite() && time_limit > 0.0) {
        bail!("--time-limit must be a positive number of seconds");
    }
    Ok(SolverBudget {
        node_limit,
        time_limit: Duration::from_secs_f64(time_limit),
    })
}

fn delimiter_byte(c: char) -> anyhow::Result<u8> {
    u8::try_from(c).ok().filter(u8::is_ascii).context("delimiter must be a single ASCII character")
}

pub fn load(args: &DataArgs) -> anyhow::Result<Dataset> {
    let options = LoadOptions {
        delimiter: delimiter_byte(args.delimiter)?,
        label_column: LabelColumn::parse(&args.label_col),
    };
    load_dataset(&args.data, &options).with_context(|| format!("reading {}", args.data.display()))
}

/// Train/test partition of `data`; both halves keep raw feature values.
pub fn split(data: &Dataset, args: &DataArgs) -> anyhow::Result<(Dataset, Dataset)> {
    if !(args.train_fraction > 0.0 && args.train_fraction < 1.0) {
        bail!("--train-fraction must lie strictly between 0 and 1");
    }
    let (train, test) = data.stratified_split(args.train_fraction, args.seed);
    Ok((data.subset(&train), data.subset(&test)))
}

pub fn select(data: &Dataset, args: &DataArgs, which: SplitArg) -> anyhow::Result<Dataset> {
    Ok(match which {
        SplitArg::All => data.clone(),
        SplitArg::Train => split(data, args)?.0,
        SplitArg::Test => split(data, args)?.1,
    })
}

/// Applies the model file's scaling, if any.
pub fn to_model_space(file: &ModelFile, data: &Dataset) -> anyhow::Result<Dataset> {
    if data.n_features() != file.weights.len() {
        bail!(
            "dataset has {} features, model has {}",
            data.n_features(),
            file.weights.len()
        );
    }
    Ok(match &file.scaling {
        Some(s) => s.transform(data)?,
        None => data.clone(),
    })
}

pub fn load_model_file(path: &Path) -> anyhow::Result<ModelFile> {
    minxp::io::load_model(path).with_context(|| format!("reading model {}", path.display()))
}

/// Rows as instances of `model`; rows outside the domains are dropped and
/// counted. Returned pairs carry the original row position.
pub fn instances(model: &LinearModel, rows: &[Vec<f64>]) -> (Vec<(usize, Instance)>, usize) {
    let mut out = Vec::with_capacity(rows.len());
    let mut skipped = 0;
    for (id, row) in rows.iter().enumerate() {
        match Instance::new(row.clone(), model) {
            Ok(inst) => out.push((id, inst)),
            Err(e) => {
                log::debug!("skipping instance {id}: {e}");
                skipped += 1;
            }
        }
    }
    if skipped > 0 {
        log::warn!("skipped {skipped} instance(s) outside the model's feature domains");
    }
    (out, skipped)
}

pub fn parse_instance_json(arg: &str) -> anyhow::Result<Vec<Vec<f64>>> {
    let text = if arg.trim_start().starts_with('[') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?
    };
    let value: serde_json::Value = serde_json::from_str(&text).context("parsing instance JSON")?;
    let as_row = |v: &serde_json::Value| -> anyhow::Result<Vec<f64>> {
        v.as_array()
            .context("expected an array of numbers")?
            .iter()
            .map(|x| x.as_f64().context("instance values must be numbers"))
            .collect()
    };
    let items = value.as_array().context("expected a JSON array")?;
    if items.iter().all(|v| v.is_array()) && !items.is_empty() {
        items.iter().map(as_row).collect()
    } else {
        Ok(vec![as_row(&value)?])
    }
}

pub fn accuracy(scores: &[f64], labels: &[i8]) -> f64 {
    if scores.is_empty() {
        return 0.0;
    }
    let correct = scores
        .iter()
        .zip(labels)
        .filter(|(&s, &y)| (s > 0.0) == (y == 1))
        .count();
    correct as f64 / scores.len() as f64
}

pub fn scores(model: &LinearModel, data: &Dataset) -> Vec<f64> {
    data.rows
        .iter()
        .map(|r| r.iter().zip(model.weights()).map(|(x, w)| x * w).sum::<f64>() + model.bias())
        .collect()
}
