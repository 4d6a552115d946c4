use std::path::Path;

use minxp::calibration::{train_logistic, TrainConfig};
use minxp::io::{save_model, MinMaxScaler, ModelFile};
use minxp::FeatureDomain;

use crate::common;
use crate::{CmdResult, DataArgs};

pub fn run(args: &DataArgs, scale: bool, max_iterations: usize, out: &Path) -> CmdResult {
    let data = common::load(args)?;
    let (train, test) = common::split(&data, args)?;

    let (scaler, train_m, test_m, domains) = if scale {
        let s = MinMaxScaler::fit(&train)?;
        let tr = s.transform(&train)?;
        let te = s.transform(&test)?;
        let domains = vec![FeatureDomain::unit(); data.n_features()];
        (Some(s), tr, te, domains)
    } else {
        let domains = data.observed_domains();
        (None, train, test, domains)
    };

    let config = TrainConfig {
        max_iterations,
        ..TrainConfig::default()
    };
    let outcome = train_logistic(&train_m.rows, &train_m.labels, domains, &config)?;
    if !outcome.converged {
        eprintln!(
            "warning: training stopped after {} iterations (gradient norm {:.3e})",
            outcome.iterations, outcome.gradient_norm
        );
    }
    save_model(&ModelFile::from_model(&outcome.model, scaler), out)?;

    let train_acc = common::accuracy(&common::scores(&outcome.model, &train_m), &train_m.labels);
    let test_acc = common::accuracy(&common::scores(&outcome.model, &test_m), &test_m.labels);
    println!("train instances: {}", train_m.len());
    println!("test instances: {}", test_m.len());
    println!("iterations: {}", outcome.iterations);
    println!("converged: {}", outcome.converged);
    println!("train accuracy: {train_acc:.4}");
    println!("accuracy: {test_acc:.4}");
    Ok(())
}
