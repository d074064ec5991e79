//! End-to-end tests of the `impatience` binary: exit-code contract,
//! file formats, and round-trip stability.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_impatience"))
}

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("impatience-cli-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn write_quasi_hyperbolic_csv(dir: &std::path::Path) -> PathBuf {
    let path = dir.join("qh.csv");
    fs::write(&path, "t,value\n0,1.0\n1,0.54\n2,0.486\n3,0.4374\n").unwrap();
    path
}

#[test]
fn check_reports_stationary_exponential() {
    let dir = scratch_dir("check-exp");
    let path = dir.join("exp.csv");
    fs::write(&path, "t,value\n0,1.0\n1,0.5\n2,0.25\n3,0.125\n").unwrap();
    let output = bin().arg("check").arg(&path).output().unwrap();
    assert_eq!(output.status.code(), Some(0));
    let text = stdout_of(&output);
    assert!(text.contains("stationary: true"), "{text}");
    assert!(text.contains("decreasing impatience: true"), "{text}");
}

#[test]
fn check_passes_quasi_hyperbolic() {
    let dir = scratch_dir("check-qh");
    let path = write_quasi_hyperbolic_csv(&dir);
    let output = bin().arg("check").arg(&path).output().unwrap();
    assert_eq!(output.status.code(), Some(0));
    let text = stdout_of(&output);
    assert!(text.contains("stationary: false"), "{text}");
    assert!(text.contains("decreasing impatience: true"), "{text}");
}

#[test]
fn check_falsifies_increasing_impatience_with_witness() {
    let dir = scratch_dir("check-sq");
    let path = dir.join("sq.csv");
    let mut csv = String::from("t,value\n");
    for t in 0..=4u32 {
        csv.push_str(&format!("{t},{}\n", 0.9f64.powi((t * t) as i32)));
    }
    fs::write(&path, csv).unwrap();
    let output = bin().arg("check").arg(&path).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    let text = stdout_of(&output);
    assert!(text.contains("falsifying investment question"), "{text}");
    // Worst-case rate from the first interior window: 0.9^-5 - 1.
    assert!(text.contains("r=0.693509"), "{text}");
    assert!(text.contains("t=1"), "{text}");
}

#[test]
fn check_rejects_malformed_input() {
    let dir = scratch_dir("check-bad");
    let path = dir.join("bad.csv");
    fs::write(&path, "t,value\n0,1.0\n2,0.5\n").unwrap();
    let output = bin().arg("check").arg(&path).output().unwrap();
    assert_eq!(output.status.code(), Some(2));

    let missing = bin()
        .arg("check")
        .arg(dir.join("absent.csv"))
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn decompose_round_trips_through_document_byte_stably() {
    let dir = scratch_dir("decompose");
    let input = write_quasi_hyperbolic_csv(&dir);
    let doc = dir.join("factor.doc");
    let status = bin()
        .arg("decompose")
        .arg(&input)
        .arg("--output")
        .arg(&doc)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));

    let rebuilt_a = bin()
        .arg("decompose")
        .arg("--reconstruct")
        .arg(&doc)
        .output()
        .unwrap();
    assert_eq!(rebuilt_a.status.code(), Some(0));
    let rebuilt_b = bin()
        .arg("decompose")
        .arg("--reconstruct")
        .arg(&doc)
        .output()
        .unwrap();
    assert_eq!(
        stdout_of(&rebuilt_a),
        stdout_of(&rebuilt_b),
        "reconstruction must be byte-stable"
    );

    // Values reproduce the input factor within 1e-9 relative.
    let original = [1.0, 0.54, 0.486, 0.4374];
    for (line, want) in stdout_of(&rebuilt_a).lines().skip(1).zip(original) {
        let got: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((got / want - 1.0).abs() <= 1e-9, "{got} vs {want}");
    }

    // A second full run of decompose produces the identical document.
    let doc2 = dir.join("factor2.doc");
    bin()
        .arg("decompose")
        .arg(&input)
        .arg("--output")
        .arg(&doc2)
        .status()
        .unwrap();
    assert_eq!(fs::read(&doc).unwrap(), fs::read(&doc2).unwrap());
}

#[test]
fn decompose_rejects_non_di_input_with_exit_1() {
    let dir = scratch_dir("decompose-bad");
    let path = dir.join("sq.csv");
    let mut csv = String::from("t,value\n");
    for t in 0..=3u32 {
        csv.push_str(&format!("{t},{}\n", 0.9f64.powi((t * t) as i32)));
    }
    fs::write(&path, csv).unwrap();
    let output = bin().arg("decompose").arg(&path).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn aggregate_pools_exponentials_and_checks_axioms() {
    let dir = scratch_dir("aggregate");
    let path = dir.join("profile.csv");
    let mut csv = String::from("t,member_1,member_2\n");
    for t in 0..=6i32 {
        csv.push_str(&format!("{t},{},{}\n", 0.4f64.powi(t), 0.9f64.powi(t)));
    }
    fs::write(&path, csv).unwrap();
    let output = bin()
        .args(["aggregate"])
        .arg(&path)
        .args(["--eta", "0.5,0.5", "--check"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    // Geometric mean of exp(0.4) and exp(0.9) is exp(0.6).
    let text = stdout_of(&output);
    let at_t1: f64 = text
        .lines()
        .nth(2)
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!((at_t1 - 0.6).abs() < 1e-12);
    let at_t2: f64 = text
        .lines()
        .nth(3)
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!((at_t2 - 0.36).abs() < 1e-12);
    let report = String::from_utf8_lossy(&output.stderr).into_owned();
    assert!(report.contains("time consistency: pass"), "{report}");
    assert!(report.contains("pareto (dated rewards): pass"), "{report}");
    assert!(
        report.contains("independence of irrelevant alternatives: pass"),
        "{report}"
    );
}

#[test]
fn aggregate_rejects_bad_weights() {
    let dir = scratch_dir("aggregate-bad");
    let path = dir.join("profile.csv");
    fs::write(
        &path,
        "t,member_1,member_2\n0,1.0,1.0\n1,0.5,0.9\n2,0.25,0.81\n",
    )
    .unwrap();
    let output = bin()
        .args(["aggregate"])
        .arg(&path)
        .args(["--eta", "0.5,0.6"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn market_pipeline_synthesize_solve_verify() {
    let dir = scratch_dir("market");
    let input = write_quasi_hyperbolic_csv(&dir);
    let prefix = dir.join("qh");
    let output = bin()
        .args(["market", "synthesize"])
        .arg(&input)
        .arg("--output")
        .arg(&prefix)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    assert!(stdout_of(&output).contains("verification: pass"));

    let economy = dir.join("qh.economy.json");
    assert!(economy.exists());
    assert!(dir.join("qh.equilibrium.json").exists());
    assert!(dir.join("qh.prices.csv").exists());
    assert!(dir.join("qh.allocation.csv").exists());

    let solved = dir.join("solved");
    let output = bin()
        .args(["market", "solve"])
        .arg(&economy)
        .arg("--output")
        .arg(&solved)
        .output()
        .unwrap();
    assert_eq!(
        output.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );

    let output = bin()
        .args(["market", "verify"])
        .arg(&economy)
        .arg("--prices")
        .arg(dir.join("solved.prices.csv"))
        .arg("--allocation")
        .arg(dir.join("solved.allocation.csv"))
        .args(["--tol", "1e-8"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    assert!(stdout_of(&output).contains("verification: pass"));
}

#[test]
fn market_verify_flags_perturbed_prices() {
    let dir = scratch_dir("market-perturb");
    let input = write_quasi_hyperbolic_csv(&dir);
    let prefix = dir.join("qh");
    bin()
        .args(["market", "synthesize"])
        .arg(&input)
        .arg("--output")
        .arg(&prefix)
        .status()
        .unwrap();

    // Perturb one price by 1% and expect verification to fail.
    let prices_path = dir.join("qh.prices.csv");
    let text = fs::read_to_string(&prices_path).unwrap();
    let perturbed: String = text
        .lines()
        .map(|line| {
            if line.starts_with("1,") {
                let value: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
                format!("1,{}\n", value * 1.01)
            } else {
                format!("{line}\n")
            }
        })
        .collect();
    fs::write(&prices_path, perturbed).unwrap();

    let output = bin()
        .args(["market", "verify"])
        .arg(dir.join("qh.economy.json"))
        .arg("--prices")
        .arg(&prices_path)
        .arg("--allocation")
        .arg(dir.join("qh.allocation.csv"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let report = stdout_of(&output);
    assert!(
        report.contains("period 1"),
        "violation must name the perturbed period: {report}"
    );
}

#[test]
fn market_envelope_emits_figure_columns() {
    let output = bin()
        .args([
            "market",
            "envelope",
            "--pairs",
            "1:0.3,0.65:0.6,0.3:0.8",
            "--horizon",
            "6",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let text = stdout_of(&output);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,envelope,agent_1,agent_2,agent_3");
    let first = lines.next().unwrap();
    assert!(first.starts_with("0,1.0000000000000000e0,"), "{first}");

    let bad = bin()
        .args(["market", "envelope", "--pairs", "nonsense"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn selftest_passes_at_reduced_sizes_and_catches_plants() {
    let output = bin()
        .args(["selftest", "--cases", "25", "--jobs", "2", "--seed", "3"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", stdout_of(&output));
    let text = stdout_of(&output);
    assert!(text.contains("convexity-forward"));
    assert!(text.contains("solver-oracle"));

    let controls = bin().args(["selftest", "--expect-fail"]).output().unwrap();
    assert_eq!(controls.status.code(), Some(0));
    assert!(stdout_of(&controls).contains("negative-controls"));
}

#[test]
fn selftest_passes_across_consecutive_seeds() {
    for seed in 0..10 {
        let output = bin()
            .args(["selftest", "--cases", "8", "--jobs", "2", "--seed"])
            .arg(seed.to_string())
            .output()
            .unwrap();
        assert_eq!(
            output.status.code(),
            Some(0),
            "seed {seed}: {}",
            stdout_of(&output)
        );
    }
}

#[test]
fn aggregate_fit_recovers_weights() {
    let dir = scratch_dir("aggregate-fit");
    let path = dir.join("profile.csv");
    // Members must not be collinear in log space for the weights to be
    // identified, so pair a quasi-hyperbolic member with an exponential.
    let mut csv = String::from("t,member_1,member_2\n");
    for t in 0..=8i32 {
        let quasi = 0.6f64.powi(t.min(1)) * 0.9f64.powi(t);
        csv.push_str(&format!("{t},{quasi},{}\n", 0.5f64.powi(t)));
    }
    fs::write(&path, csv).unwrap();

    // Aggregate with known weights, then fit them back from the output.
    let pooled = dir.join("pooled.csv");
    bin()
        .args(["aggregate"])
        .arg(&path)
        .args(["--eta", "0.3,0.7", "--output"])
        .arg(&pooled)
        .status()
        .unwrap();
    let output = bin()
        .args(["aggregate"])
        .arg(&path)
        .args(["--eta", "0.5,0.5", "--fit"])
        .arg(&pooled)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let report = String::from_utf8_lossy(&output.stderr).into_owned();
    let fitted = report
        .lines()
        .find(|l| l.starts_with("fitted weights:"))
        .expect("fit report present");
    let values: Vec<f64> = fitted
        .trim_start_matches("fitted weights:")
        .split_whitespace()
        .map(|v| v.parse().unwrap())
        .collect();
    assert!((values[0] - 0.3).abs() < 1e-6, "{report}");
    assert!((values[1] - 0.7).abs() < 1e-6, "{report}");
}
