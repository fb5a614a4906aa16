use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_logitkit");

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Run {
    let out = Command::new(BIN).args(args).output().expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn asset(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("assets")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write(dir: &TempDir, name: &str, contents: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

const XY_SCHEMA: &str = r#"[
  {"name": "Y", "role": "response", "description": "outcome"},
  {"name": "X", "role": "continuous", "description": "predictor"}
]"#;

/// Simulates the bundled moderate-effect spec into `dir`.
fn simulated(dir: &TempDir, n: usize) -> (PathBuf, PathBuf) {
    let csv = dir.path().join("sim.csv");
    let schema = dir.path().join("sim.json");
    let r = run(&[
        "simulate",
        "--spec",
        &asset("table1_moderate_spec.json"),
        "--out",
        p(&csv),
        "--schema-out",
        p(&schema),
        "--n",
        &n.to_string(),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    (csv, schema)
}

#[test]
fn describe_simulated_table() {
    let dir = TempDir::new().unwrap();
    let (csv, schema) = simulated(&dir, 116);
    let r = run(&["describe", p(&csv), p(&schema)]);
    assert_eq!(r.code, 0);
    let lines: Vec<&str> = r.stdout.lines().collect();
    assert!(lines[1].starts_with("Variable") && lines[1].contains("Definition"));
    let header = lines[1];
    let order = ["Stand.Dev", "Average", "CV(%)"].map(|h| header.find(h).unwrap());
    assert!(order[0] < order[1] && order[1] < order[2]);
    assert_eq!(lines.len(), 12);
    assert!(lines[2..].iter().all(|l| !l.ends_with("undefined")));

    let j: Value =
        serde_json::from_str(&run(&["describe", p(&csv), p(&schema), "--json"]).stdout).unwrap();
    let rows = j["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r["cv_percent"].is_number()));
}

#[test]
fn describe_rejects_empty_csv() {
    let dir = TempDir::new().unwrap();
    let csv = write(&dir, "empty.csv", "");
    let schema = write(&dir, "s.json", XY_SCHEMA);
    let r = run(&["describe", p(&csv), p(&schema)]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("error"));
    let header_only = write(&dir, "h.csv", "Y,X\n");
    assert_eq!(run(&["describe", p(&header_only), p(&schema)]).code, 1);
}

#[test]
fn bad_cells_name_row_and_column() {
    let dir = TempDir::new().unwrap();
    let schema = write(&dir, "s.json", XY_SCHEMA);
    let csv = write(&dir, "d.csv", "X,Y\n1.5,0\n2.5,2\n");
    let r = run(&["describe", p(&csv), p(&schema)]);
    assert_eq!(r.code, 1);
    assert!(
        r.stderr.contains("row 2") && r.stderr.contains("`Y`"),
        "{}",
        r.stderr
    );
    let csv = write(&dir, "m.csv", "X,Y\n1.5,0\n,1\n");
    assert!(run(&["describe", p(&csv), p(&schema)])
        .stderr
        .contains("missing value"));
}

#[test]
fn tabulate_binary_and_binned() {
    let dir = TempDir::new().unwrap();
    let (csv, schema) = simulated(&dir, 200);
    let r = run(&[
        "tabulate",
        p(&csv),
        p(&schema),
        "--variable",
        "D1",
        "--json",
    ]);
    assert_eq!(r.code, 0);
    let j: Value = serde_json::from_str(&r.stdout).unwrap();
    let bins = j["table"]["bins"].as_array().unwrap();
    assert_eq!(bins.len(), 2);
    let total: u64 = bins.iter().map(|b| b["count"].as_u64().unwrap()).sum();
    assert_eq!(total, 200);

    let r = run(&[
        "tabulate",
        p(&csv),
        p(&schema),
        "--variable",
        "X4",
        "--edges",
        "0,13,16,19,100",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("[13, 16)"));
    let r = run(&["tabulate", p(&csv), p(&schema), "--variable", "X4"]);
    assert_eq!(r.code, 1);
}

#[test]
fn fit_prints_table_blocks_in_order() {
    let dir = TempDir::new().unwrap();
    let (csv, schema) = simulated(&dir, 500);
    let r = run(&["fit", p(&csv), p(&schema), "--hl-groups", "10"]);
    assert_eq!(r.code, 0, "{}\n{}", r.stdout, r.stderr);
    let pos = |s: &str| r.stdout.find(s).unwrap_or_else(|| panic!("missing {s}"));
    let blocks = [
        "Coefficient",
        "Log-Likelihood",
        "Test that all slopes are zero",
        "Goodness-of-Fit Tests",
        "Measures of Association",
    ];
    assert!(blocks.windows(2).all(|w| pos(w[0]) < pos(w[1])));
    let hl = r
        .stdout
        .lines()
        .find(|l| l.starts_with("Hosmer-Lemeshow"))
        .unwrap();
    assert_eq!(hl.split_whitespace().nth(2), Some("8"));
    let pearson = r.stdout.lines().find(|l| l.starts_with("Pearson")).unwrap();
    assert_eq!(pearson.split_whitespace().nth(2), Some("490"));
}

/// Every number in the JSON report appears in the text, at its rendered
/// precision.
#[test]
fn json_and_text_carry_the_same_values() {
    use logitkit_cli::format::{dec3, ratio, sig6};
    let dir = TempDir::new().unwrap();
    let (csv, schema) = simulated(&dir, 300);
    let text = run(&["fit", p(&csv), p(&schema)]).stdout;
    let j: Value =
        serde_json::from_str(&run(&["fit", p(&csv), p(&schema), "--json"]).stdout).unwrap();
    let has = |s: String| assert!(text.contains(&s), "text lacks {s}");
    let f = |v: &Value| v.as_f64().unwrap();

    for row in j["descriptives"].as_array().unwrap() {
        has(row["variable"].as_str().unwrap().to_string());
        has(format!("{:.2}", f(&row["std_dev"])));
        has(format!("{:.2}", f(&row["mean"])));
    }
    for name in j["screen"]["value"]["retained"].as_array().unwrap() {
        has(name.as_str().unwrap().to_string());
    }
    let m = &j["model"];
    has(dec3(f(&m["log_likelihood"])));
    has(format!("{} iteration(s)", m["iterations"]));
    for row in j["wald_rows"]["value"].as_array().unwrap() {
        has(sig6(f(&row["coefficient"])));
        has(sig6(f(&row["se"])));
        has(format!("{:.2}", f(&row["z"])));
        has(dec3(f(&row["p_two_sided"])));
        if let Some(or) = row["odds_ratio"].as_f64() {
            has(ratio(or));
            let ci = row["odds_ratio_ci"].as_array().unwrap();
            has(format!("{} - {}", ratio(f(&ci[0])), ratio(f(&ci[1]))));
        }
    }
    let g = &j["g_test"]["value"];
    has(format!(
        "G = {}, DF = {}, P-Value = {}",
        dec3(f(&g["g"])),
        g["df"],
        dec3(f(&g["p"]))
    ));
    has(dec3(f(&g["ll_null"])));
    for key in ["pearson", "deviance", "hosmer_lemeshow"] {
        let v = &j["gof"][key]["value"];
        has(dec3(f(&v["statistic"])));
        has(dec3(f(&v["p"])));
    }
    let a = &j["association"]["value"];
    for key in ["concordant", "discordant", "ties", "total_pairs"] {
        has(a[key].to_string());
    }
    for key in ["somers_d", "gamma", "tau_a", "auc"] {
        has(format!("{:.2}", f(&a[key])));
    }
    for msg in j["flags"]["messages"].as_array().unwrap() {
        has(msg.as_str().unwrap().to_string());
    }
}

fn separable(dir: &TempDir) -> (PathBuf, PathBuf) {
    let mut csv = String::from("Y,X\n");
    for _ in 0..5 {
        csv.push_str("0,0\n1,1\n");
    }
    (write(dir, "sep.csv", &csv), write(dir, "s.json", XY_SCHEMA))
}

#[test]
fn separation_prints_banner_and_exits_2() {
    let dir = TempDir::new().unwrap();
    let (csv, schema) = separable(&dir);
    let r = run(&["fit", p(&csv), p(&schema), "--cv-threshold", "0"]);
    assert_eq!(r.code, 2, "{}", r.stderr);
    assert!(r.stdout.starts_with("!!! SEPARATION DETECTED"));
    assert!(r.stdout.contains("Measures of Association"));
    let j: Value = serde_json::from_str(
        &run(&["fit", p(&csv), p(&schema), "--json", "--cv-threshold", "0"]).stdout,
    )
    .unwrap();
    assert_eq!(j["flags"]["separation"], true);
    assert_eq!(j["flags"]["converged"], false);
    // ten observations cannot fill ten risk groups of two
    assert_eq!(j["gof"]["hosmer_lemeshow"]["status"], "failed");
}

#[test]
fn null_model_data_fits_quietly() {
    let dir = TempDir::new().unwrap();
    let spec = r#"{"n": 400, "seed": 31, "coefficients": {"_intercept": 0.2, "A": 0.0, "B": 0.0},
        "generators": {"A": {"kind": "normal", "params": {"mean": 5, "sd": 2}},
                       "B": {"kind": "uniform", "params": {"lo": 1, "hi": 3}}}}"#;
    let spec = write(&dir, "null.json", spec);
    let (csv, schema) = (dir.path().join("n.csv"), dir.path().join("n.schema.json"));
    assert_eq!(
        run(&[
            "simulate",
            "--spec",
            p(&spec),
            "--out",
            p(&csv),
            "--schema-out",
            p(&schema)
        ])
        .code,
        0
    );
    let r = run(&["fit", p(&csv), p(&schema), "--json"]);
    assert_eq!(r.code, 0);
    let j: Value = serde_json::from_str(&r.stdout).unwrap();
    assert!(
        j["g_test"]["value"]["g"].as_f64().unwrap() < 9.21,
        "G should be near its df of 2"
    );
    for key in ["pearson", "hosmer_lemeshow"] {
        let pv = j["gof"][key]["value"]["p"].as_f64().unwrap();
        assert!(pv > 0.05, "{key} p = {pv}");
    }
    // per-observation deviance carries no fit information, only the identity
    let dev = j["gof"]["deviance"]["value"]["statistic"].as_f64().unwrap();
    let ll = j["model"]["log_likelihood"].as_f64().unwrap();
    assert!((dev + 2.0 * ll).abs() < 1e-9);
}

#[test]
fn cv_screen_drops_homogeneous_columns() {
    let dir = TempDir::new().unwrap();
    let schema = write(
        &dir,
        "s.json",
        r#"[{"name": "Y", "role": "response"}, {"name": "W", "role": "continuous"},
            {"name": "H", "role": "continuous"}]"#,
    );
    let mut csv = String::from("Y,W,H\n");
    for i in 0..40 {
        let w = f64::from(i % 7) + 1.0;
        // H: mean 100, sd about 5
        let h = 100.0 + if i % 2 == 0 { 5.0 } else { -5.0 };
        csv.push_str(&format!("{},{w},{h}\n", u8::from(i % 3 == 0 || i % 5 == 0)));
    }
    let csv = write(&dir, "d.csv", &csv);
    let j: Value =
        serde_json::from_str(&run(&["fit", p(&csv), p(&schema), "--json"]).stdout).unwrap();
    assert_eq!(j["screen"]["value"]["excluded"], serde_json::json!(["H"]));
    assert_eq!(j["model"]["predictors"], serde_json::json!(["W"]));
    let j: Value = serde_json::from_str(
        &run(&["fit", p(&csv), p(&schema), "--json", "--cv-threshold", "0"]).stdout,
    )
    .unwrap();
    assert_eq!(j["screen"]["status"], "skipped");
    assert_eq!(j["model"]["predictors"], serde_json::json!(["W", "H"]));
}

#[test]
fn aliased_predictors_fail_with_named_cause() {
    let dir = TempDir::new().unwrap();
    let schema = write(
        &dir,
        "s.json",
        r#"[{"name": "Y", "role": "response"}, {"name": "A", "role": "continuous"},
            {"name": "B", "role": "continuous"}]"#,
    );
    let csv = write(
        &dir,
        "d.csv",
        "Y,A,B\n0,1,2\n1,2,4\n0,3,6\n1,4,8\n1,5,10\n0,6,12\n",
    );
    let r = run(&["fit", p(&csv), p(&schema), "--cv-threshold", "0"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("singular"), "{}", r.stderr);
    assert!(r.stdout.is_empty());
}

#[test]
fn degenerate_hosmer_lemeshow_bins_exit_nonzero() {
    let dir = TempDir::new().unwrap();
    let schema = write(&dir, "s.json", XY_SCHEMA);
    let mut csv = String::from("Y,X\n");
    for i in 0..12 {
        csv.push_str(&format!("{},{}\n", u8::from(i % 3 == 0 || i == 7), i));
    }
    let csv = write(&dir, "d.csv", &csv);
    let r = run(&["fit", p(&csv), p(&schema), "--hl-groups", "12"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("Hosmer-Lemeshow"), "{}", r.stderr);
    assert!(r.stdout.contains("failed: Hosmer-Lemeshow group"));
    assert_eq!(
        run(&["fit", p(&csv), p(&schema), "--hl-groups", "4"]).code,
        0
    );
}

#[test]
fn usage_errors_exit_1_and_help_exits_0() {
    assert_eq!(run(&["fit"]).code, 1);
    assert_eq!(run(&["frobnicate"]).code, 1);
    assert_eq!(run(&["fit", "a.csv", "b.json", "--alpha"]).code, 1);
    assert_eq!(run(&["--help"]).code, 0);
    assert_eq!(run(&["fit", "missing.csv", "missing.json"]).code, 1);
    let help = run(&["validate", "--help"]).stdout;
    assert!(!help.contains("inject"));
}

#[test]
fn simulate_is_deterministic_and_validates() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let spec = asset("table1_spec.json");
    let r1 = run(&["simulate", "--spec", &spec, "--out", p(&a)]);
    let r2 = run(&["simulate", "--spec", &spec, "--out", p(&b)]);
    assert_eq!(r1.code, 0);
    assert_eq!(r1.stdout, r2.stdout);
    assert!(r1.stdout.contains("seed: 2019") && r1.stdout.contains("response rate"));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let c = dir.path().join("c.csv");
    run(&[
        "simulate",
        "--spec",
        &spec,
        "--out",
        p(&c),
        "--seed",
        "2020",
    ]);
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());

    let zero = write(
        &dir,
        "zero.json",
        r#"{"n": 0, "seed": 1, "coefficients": {"_intercept": 0, "A": 1},
            "generators": {"A": {"kind": "normal", "params": {"mean": 0, "sd": 1}}}}"#,
    );
    let r = run(&[
        "simulate",
        "--spec",
        p(&zero),
        "--out",
        p(&dir.path().join("z.csv")),
    ]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("n must be at least 1"), "{}", r.stderr);
}

#[test]
fn simulated_table_shape_feeds_fit_unchanged() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("t.csv");
    assert_eq!(
        run(&[
            "simulate",
            "--spec",
            &asset("table1_spec.json"),
            "--out",
            p(&csv)
        ])
        .code,
        0
    );
    let r = run(&["fit", p(&csv), &asset("table1_schema.json")]);
    // the published coefficient column makes the simulated fit separate
    assert!(r.code == 0 || r.code == 2, "{}", r.stderr);
    assert!(r.stdout.contains("Measures of Association"));
    let r = run(&["describe", p(&csv), &asset("table1_schema.json")]);
    assert!(r.stdout.contains("Number of dairy farm land ownership"));
}

#[test]
fn validate_is_deterministic() {
    let a = run(&["validate", "--replicates", "100", "--seed", "7"]);
    let b = run(&["validate", "--replicates", "100", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.code, 0, "{}", a.stdout);
    assert_eq!(a.stdout.matches("[PASS]").count(), 4);
    let j: Value = serde_json::from_str(
        &run(&["validate", "--replicates", "100", "--seed", "7", "--json"]).stdout,
    )
    .unwrap();
    assert_eq!(j["checks"].as_array().unwrap().len(), 4);
}

#[test]
fn one_iteration_fault_trips_the_oracle_check() {
    let r = run(&[
        "validate",
        "--replicates",
        "100",
        "--inject-fault",
        "one-iteration",
    ]);
    assert_eq!(r.code, 3);
    let oracle = r
        .stdout
        .lines()
        .find(|l| l.contains("oracle agreement"))
        .unwrap();
    assert!(oracle.starts_with("[FAIL]"), "{oracle}");
}

/// Undamped Newton reaches the same optimum on every default oracle
/// instance, so this fault leaves the battery green.
#[test]
fn no_step_halving_fault_is_not_detected_by_the_oracle() {
    let r = run(&[
        "validate",
        "--replicates",
        "100",
        "--inject-fault",
        "no-step-halving",
        "--json",
    ]);
    let j: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(j["fault"], "no-step-halving");
    assert_eq!(j["checks"][0]["name"], "oracle agreement");
    assert_eq!(j["checks"][0]["passed"], true);
}
