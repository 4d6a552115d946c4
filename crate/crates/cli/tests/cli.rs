use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn minxp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minxp"))
        .args(args)
        .env_remove("MINXP_EPSILON")
        .output()
        .expect("spawn minxp")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn ok(o: Output) -> String {
    assert!(o.status.success(), "exit {:?}\n{}\n{}", o.status.code(), stdout(&o), stderr(&o));
    stdout(&o)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Two well separated clusters: positive iff a > b by a wide margin.
fn separable(dir: &Path) -> PathBuf {
    let mut text = String::from("a,b,y\n");
    for i in 0..40 {
        let t = i as f64 / 40.0;
        text.push_str(&format!("{},{},1\n", 0.8 + 0.2 * t, 0.2 * t));
        text.push_str(&format!("{},{},0\n", 0.2 * t, 0.8 + 0.2 * t));
    }
    let path = dir.join("sep.csv");
    fs::write(&path, text).unwrap();
    path
}

/// A noisy two-feature set where calibration has something to reject.
fn noisy(dir: &Path) -> PathBuf {
    let mut text = String::from("a,b,y\n");
    let mut state = 12345u64;
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for _ in 0..120 {
        let (a, b, flip) = (next(), next(), next());
        let y = (a > b) ^ (flip < 0.1);
        text.push_str(&format!("{a},{b},{}\n", u8::from(y)));
    }
    let path = dir.join("noisy.csv");
    fs::write(&path, text).unwrap();
    path
}

fn trained(dir: &Path, data: &Path) -> PathBuf {
    let out = dir.join("model.json");
    ok(minxp(&["train", "--data", s(data), "--out-model", s(&out)]));
    out
}

fn calibrated(dir: &Path, data: &Path) -> PathBuf {
    let model = trained(dir, data);
    let out = dir.join("calibrated.json");
    ok(minxp(&[
        "calibrate", "--model", s(&model), "--data", s(data), "--out-model", s(&out),
    ]));
    out
}

fn report_lines(path: &Path) -> Vec<serde_json::Value> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn strip_timing(mut v: serde_json::Value) -> serde_json::Value {
    if let Some(obj) = v.as_object_mut() {
        for key in ["solve_time_ms", "solve_time_std_ms", "nodes"] {
            obj.remove(key);
        }
        if let Some(rows) = obj.get_mut("aggregate").and_then(|a| a.as_array_mut()) {
            for row in rows {
                let row = row.as_object_mut().unwrap();
                row.remove("time_ms_mean");
                row.remove("time_ms_std");
            }
        }
    }
    v
}

#[test]
fn train_separable_reaches_full_accuracy() {
    let dir = TempDir::new().unwrap();
    let data = separable(dir.path());
    let out = dir.path().join("m.json");
    let text = ok(minxp(&["train", "--data", s(&data), "--out-model", s(&out)]));
    assert!(text.contains("accuracy: 1.0000"), "{text}");
    let model: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(model["t_minus"].is_null());
    assert_eq!(model["weights"].as_array().unwrap().len(), 2);
}

#[test]
fn train_is_deterministic_for_a_seed() {
    let dir = TempDir::new().unwrap();
    let data = noisy(dir.path());
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        ok(minxp(&["train", "--data", s(&data), "--seed", "7", "--out-model", s(out)]));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn missing_dataset_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let o = minxp(&[
        "train",
        "--data",
        s(&dir.path().join("absent.csv")),
        "--out-model",
        s(&dir.path().join("m.json")),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("absent.csv"));
}

#[test]
fn bad_label_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("bad.csv");
    fs::write(&data, "a,y\n0.1,1\n0.2,7\n").unwrap();
    let o = minxp(&["train", "--data", s(&data), "--out-model", s(&dir.path().join("m.json"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn calibrate_rejects_out_of_range_cost() {
    let dir = TempDir::new().unwrap();
    let data = noisy(dir.path());
    let model = trained(dir.path(), &data);
    for wr in ["0", "1.5", "-0.2"] {
        let o = minxp(&[
            "calibrate",
            "--model",
            s(&model),
            "--data",
            s(&data),
            &format!("--wr={wr}"),
            "--out-model",
            s(&dir.path().join("c.json")),
        ]);
        assert_eq!(o.status.code(), Some(2), "wr={wr}");
    }
}

#[test]
fn calibrate_writes_ordered_thresholds_deterministically() {
    let dir = TempDir::new().unwrap();
    let data = noisy(dir.path());
    let model = trained(dir.path(), &data);
    let mut outputs = Vec::new();
    for name in ["c1.json", "c2.json"] {
        let out = dir.path().join(name);
        let text = ok(minxp(&[
            "calibrate", "--model", s(&model), "--data", s(&data), "--out-model", s(&out),
        ]));
        assert!(text.contains("rejection rate"));
        outputs.push(fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let v: serde_json::Value = serde_json::from_slice(&outputs[0]).unwrap();
    assert!(v["t_minus"].as_f64().unwrap() <= v["t_plus"].as_f64().unwrap());
}

#[test]
fn explain_without_thresholds_fails() {
    let dir = TempDir::new().unwrap();
    let data = noisy(dir.path());
    let model = trained(dir.path(), &data);
    let o = minxp(&[
        "explain",
        "--model",
        s(&model),
        "--data",
        s(&data),
        "--out-report",
        s(&dir.path().join("r.jsonl")),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn explain_rejected_instance_from_json() {
    let dir = TempDir::new().unwrap();
    let model = dir.path().join("m.json");
    fs::write(
        &model,
        r#"{"weights":[2.0,-2.0],"bias":0.0,"t_minus":-0.5,"t_plus":0.5,
            "domains":[{"lower":0.0,"upper":1.0},{"lower":0.0,"upper":1.0}],"scaling":null}"#,
    )
    .unwrap();
    let report = dir.path().join("r.jsonl");
    ok(minxp(&[
        "explain",
        "--model",
        s(&model),
        "--instance-json",
        "[0.5, 0.5]",
        "--method",
        "both",
        "--out-report",
        s(&report),
    ]));
    let lines = report_lines(&report);
    assert_eq!(lines.len(), 3);
    let minabro = &lines[0];
    assert_eq!(minabro["label"], "REJECT");
    assert_eq!(minabro["kind"], "REJECTION");
    assert_eq!(minabro["method"], "minabro");
    // Fixing either feature keeps the score within one unit of the middle.
    assert_eq!(minabro["size"], 2);
    assert_eq!(minabro["certified_minimum"], true);
    assert!(lines[1]["size"].as_u64() >= minabro["size"].as_u64());
    assert_eq!(lines[2]["records"], 2);
}

#[test]
fn explain_narrow_rejection_needs_one_feature() {
    let dir = TempDir::new().unwrap();
    let model = dir.path().join("m.json");
    // With x0 = 0.25 fixed the score ranges over [0.5 - 2, 0.5] = [-1.5, 0.5].
    fs::write(
        &model,
        r#"{"weights":[2.0,-2.0],"bias":0.0,"t_minus":-1.5,"t_plus":0.5,
            "domains":[{"lower":0.0,"upper":1.0},{"lower":0.0,"upper":1.0}],"scaling":null}"#,
    )
    .unwrap();
    let report = dir.path().join("r.jsonl");
    ok(minxp(&[
        "explain", "--model", s(&model), "--instance-json", "[0.25, 0.5]", "--out-report", s(&report),
    ]));
    let lines = report_lines(&report);
    assert_eq!(lines[0]["kind"], "REJECTION");
    assert_eq!(lines[0]["indices"], serde_json::json!([0]));
    assert_eq!(lines[0]["near_boundary"], true);
}

#[test]
fn explain_report_is_stable_across_runs() {
    let dir = TempDir::new().unwrap();
    let data = noisy(dir.path());
    let model = calibrated(dir.path(), &data);
    let mut runs = Vec::new();
    for name in ["r1.jsonl", "r2.jsonl"] {
        let out = dir.path().join(name);
        ok(minxp(&[
            "explain", "--model", s(&model), "--data", s(&data), "--method", "both", "--out-report",
            s(&out),
        ]));
        runs.push(report_lines(&out).into_iter().map(strip_timing).collect::<Vec<_>>());
    }
    assert_eq!(runs[0], runs[1]);
    let records = &runs[0][..runs[0].len() - 1];
    assert!(!records.is_empty());
    for pair in records.chunks(2) {
        assert_eq!(pair[0]["instance_id"], pair[1]["instance_id"]);
        assert!(pair[1]["size"].as_u64() >= pair[0]["size"].as_u64());
    }
}

#[test]
fn verify_default_run_agrees() {
    let o = minxp(&["verify"]);
    let text = ok(o);
    assert!(text.contains("500/500 classified, 500/500 rejected agree"), "{text}");
}

#[test]
fn verify_detects_injected_fault() {
    let o = minxp(&["verify", "--cases", "10", "--inject-fault"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("verification failed"));
}

#[test]
fn verify_with_no_cases_warns() {
    let o = minxp(&["verify", "--cases", "0"]);
    assert!(stderr(&o).contains("warning"));
    assert!(ok(o).contains("0/0 classified"));
}

#[test]
fn verify_refuses_large_feature_counts() {
    let o = minxp(&["verify", "--max-n", "40"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_on_dataset_model() {
    let dir = TempDir::new().unwrap();
    let data = noisy(dir.path());
    let model = calibrated(dir.path(), &data);
    let text = ok(minxp(&["verify", "--model", s(&model), "--data", s(&data)]));
    assert!(text.contains("agree"));
}

#[test]
fn epsilon_must_be_non_negative() {
    let o = minxp(&["--epsilon=-1", "verify", "--cases", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn benchmark_single_repeat_notes_zero_spread() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("b.jsonl");
    let o = minxp(&[
        "benchmark",
        "--synthetic-n",
        "50",
        "--synthetic-count",
        "6",
        "--repeats",
        "1",
        "--out-report",
        s(&report),
    ]);
    assert!(stderr(&o).contains("single repeat"));
    ok(o);
    let lines = report_lines(&report);
    assert_eq!(lines.len(), 6 * 2 + 1);
    for r in &lines[..12] {
        assert_eq!(r["timing_repeats"], 1);
        assert_eq!(r["solve_time_std_ms"], 0.0);
    }
}

#[test]
fn benchmark_with_no_instances() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("b.jsonl");
    let text = ok(minxp(&[
        "benchmark",
        "--synthetic-n",
        "5",
        "--synthetic-count",
        "0",
        "--out-report",
        s(&report),
    ]));
    assert!(!text.contains("median classified"));
    let lines = report_lines(&report);
    assert_eq!(lines.len(), 1);
    assert_eq!(lines[0]["records"], 0);
}

#[test]
fn benchmark_needs_a_source() {
    let dir = TempDir::new().unwrap();
    let o = minxp(&["benchmark", "--out-report", s(&dir.path().join("b.jsonl"))]);
    assert_eq!(o.status.code(), Some(2));
}
