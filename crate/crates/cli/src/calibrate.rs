use std::path::Path;

use minxp::calibration::{calibrate_thresholds, RiskConfig};
use minxp::io::{save_model, Dataset};
use minxp::{Label, RejectClassifier};

use crate::common;
use crate::{CmdResult, DataArgs, SplitArg};

/// Table-style metrics of a calibrated classifier on one dataset.
struct Summary {
    rejection_rate: f64,
    accuracy_without: f64,
    accuracy_with: f64,
}

fn summarize(clf: &RejectClassifier, data: &Dataset) -> Summary {
    let scores = common::scores(clf.model(), data);
    let mut rejected = 0;
    let mut correct = 0;
    for (&s, &y) in scores.iter().zip(&data.labels) {
        match clf.label_for_score(s) {
            Label::Reject => rejected += 1,
            Label::Positive => correct += usize::from(y == 1),
            Label::Negative => correct += usize::from(y == -1),
        }
    }
    let accepted = scores.len() - rejected;
    Summary {
        rejection_rate: rejected as f64 / scores.len().max(1) as f64,
        accuracy_without: common::accuracy(&scores, &data.labels),
        accuracy_with: if accepted == 0 {
            0.0
        } else {
            correct as f64 / accepted as f64
        },
    }
}

pub fn run(model_path: &Path, args: &DataArgs, wr: f64, split: SplitArg, out: &Path) -> CmdResult {
    let config = RiskConfig::new(wr)?;
    let file = common::load_model_file(model_path)?;
    let model = file.model()?;
    let data = common::load(args)?;
    let fit_on = common::to_model_space(&file, &common::select(&data, args, split)?)?;

    let scores = common::scores(&model, &fit_on);
    let report = calibrate_thresholds(&scores, &fit_on.labels, &config)?;
    let clf = RejectClassifier::new(model, report.t_minus, report.t_plus)?;
    save_model(&file.clone().with_thresholds(report.t_minus, report.t_plus)?, out)?;

    println!("w_r: {wr}");
    println!("t_minus: {}", report.t_minus);
    println!("t_plus: {}", report.t_plus);
    println!("rejection width: {}", report.width());
    println!("empirical risk: {}", report.empirical_risk);
    println!("error ratio: {}", report.error_ratio);
    let fit = summarize(&clf, &fit_on);
    println!("rejection rate: {:.4}", fit.rejection_rate);
    println!("accuracy without reject option: {:.4}", fit.accuracy_without);
    println!("accuracy with reject option: {:.4}", fit.accuracy_with);
    if split == SplitArg::Train {
        let test = common::to_model_space(&file, &common::split(&data, args)?.1)?;
        let held = summarize(&clf, &test);
        println!("test rejection rate: {:.4}", held.rejection_rate);
        println!("test accuracy without reject option: {:.4}", held.accuracy_without);
        println!("test accuracy with reject option: {:.4}", held.accuracy_with);
    }
    Ok(())
}
