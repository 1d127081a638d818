//! Command matrix: outputs, determinism and the 0/1/2 exit-code contract.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_claimlens"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

fn sample_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/synth_sample.conf")
}

fn run(out: &Path, args: &[&str]) -> Output {
    bin().arg("--out").arg(out).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn claims_header() -> String {
    fs::read_to_string(fixture("reference_claims.csv"))
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_string()
}

/// First `n` data rows of the reference claims file.
fn small_claims(n: usize) -> String {
    let all = fs::read_to_string(fixture("reference_claims.csv")).unwrap();
    all.lines().take(n + 1).map(|l| format!("{l}\n")).collect()
}

#[test]
fn validate_clean_bad_and_missing() {
    let dir = tempfile::tempdir().unwrap();
    let clean = write(dir.path(), "clean.csv", &small_claims(20));
    let o = run(dir.path(), &["validate", p(&clean)]);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    assert_eq!(text(&o.stdout).lines().count(), 1);

    let mut body = small_claims(20);
    body = body.replacen("2019-08-03,2019-08-01", "2019-08-03,not-a-date", 1);
    let bad = write(dir.path(), "bad.csv", &body);
    let o = run(dir.path(), &["validate", p(&bad)]);
    assert_eq!(code(&o), 1);
    let rows: Vec<String> = text(&o.stdout).lines().skip(1).map(String::from).collect();
    assert_eq!(rows.len(), 1, "{rows:?}");
    assert!(rows[0].contains("claim_reported_date"));

    let o = run(dir.path(), &["validate", p(&dir.path().join("nope.csv"))]);
    assert_eq!(code(&o), 2);
}

#[test]
fn triggers_empty_rules_and_syntax_error() {
    let dir = tempfile::tempdir().unwrap();
    let claims = write(dir.path(), "c.csv", &small_claims(30));
    let empty = write(dir.path(), "empty.rules", "# nothing here\n");
    let o = run(dir.path(), &["triggers", p(&claims), "--rules", p(&empty)]);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    assert_eq!(
        fs::read_to_string(dir.path().join("hits.csv")).unwrap(),
        "claim_id,rule_id,category,detail\n"
    );

    let bad = write(
        dir.path(),
        "bad.rules",
        "rule r1 category general :\n  billed_amount >",
    );
    let o = run(dir.path(), &["triggers", p(&claims), "--rules", p(&bad)]);
    assert_eq!(code(&o), 1);
    let err = text(&o.stderr);
    assert!(err.contains("line 2, column"), "{err}");

    let o = run(dir.path(), &["triggers", p(&claims)]);
    assert_eq!(code(&o), 2, "rules or --builtin is required");
}

#[test]
fn triggers_custom_rule_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let claims = write(dir.path(), "c.csv", &small_claims(30));
    let rules = write(
        dir.path(),
        "r.rules",
        "rule big category general description \"large bill\" : billed_amount > 150000;\n",
    );
    let o = run(
        dir.path(),
        &["triggers", p(&claims), "--rules", p(&rules), "--flags-out"],
    );
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    let hits = fs::read_to_string(dir.path().join("hits.csv")).unwrap();
    let flags = fs::read_to_string(dir.path().join("flags.csv")).unwrap();
    let flagged = flags.lines().filter(|l| l.contains(",1,")).count();
    assert_eq!(hits.lines().count() - 1, flagged);
    assert_eq!(flags.lines().count(), 31);
}

#[test]
fn synth_then_builtin_triggers_flag_the_planted_set() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["synth", p(&sample_config())]);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    for f in [
        "claims.csv",
        "covid.csv",
        "ground_truth.csv",
        "synth.manifest.json",
    ] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("synth.manifest.json")).unwrap())
            .unwrap();
    let eval = manifest["parameters"]["evaluation_date"]
        .as_str()
        .unwrap()
        .to_string();

    let claims = dir.path().join("claims.csv");
    let o = run(
        dir.path(),
        &[
            "triggers",
            "--builtin",
            p(&claims),
            "--evaluation-date",
            &eval,
        ],
    );
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    let hits = fs::read_to_string(dir.path().join("hits.csv")).unwrap();
    let flagged: BTreeSet<String> = hits
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().to_string())
        .collect();
    let truth = fs::read_to_string(dir.path().join("ground_truth.csv")).unwrap();
    let planted: BTreeSet<String> = truth
        .lines()
        .filter(|l| l.starts_with("planted,"))
        .map(|l| l.split(',').nth(3).unwrap().to_string())
        .collect();
    assert_eq!(planted.len(), 40 + 15);
    assert_eq!(flagged, planted);
}

#[test]
fn synth_is_reproducible_and_rejects_bad_keys() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = sample_config();
    assert_eq!(code(&run(a.path(), &["synth", p(&cfg)])), 0);
    assert_eq!(code(&run(b.path(), &["synth", p(&cfg)])), 0);
    for f in [
        "claims.csv",
        "covid.csv",
        "ground_truth.csv",
        "synth.manifest.json",
    ] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
    // A different seed changes the claims.
    assert_eq!(code(&run(b.path(), &["--seed", "7", "synth", p(&cfg)])), 0);
    assert_ne!(
        fs::read(a.path().join("claims.csv")).unwrap(),
        fs::read(b.path().join("claims.csv")).unwrap()
    );

    let neg = write(a.path(), "neg.conf", "claims.per_month = -5\n");
    let o = run(a.path(), &["synth", p(&neg)]);
    assert_eq!(code(&o), 2);
    assert!(text(&o.stderr).contains("claims.per_month"));
    let unknown = write(a.path(), "unk.conf", "claims.perr_month = 5\n");
    let o = run(a.path(), &["synth", p(&unknown)]);
    assert_eq!(code(&o), 2);
    assert!(text(&o.stderr).contains("claims.perr_month"));
}

#[test]
fn rates_reproduces_committed_series_and_checks_range() {
    let dir = tempfile::tempdir().unwrap();
    let claims = fixture("reference_claims.csv");
    let covid = fixture("reference_covid.csv");
    let o = run(
        dir.path(),
        &[
            "rates",
            p(&claims),
            p(&covid),
            "--from",
            "2019-08",
            "--to",
            "2020-08",
        ],
    );
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    assert_eq!(
        fs::read(dir.path().join("monthly.csv")).unwrap(),
        fs::read(fixture("reference_monthly.csv")).unwrap()
    );

    let o = run(
        dir.path(),
        &[
            "rates",
            p(&claims),
            p(&covid),
            "--from",
            "2020-08",
            "--to",
            "2020-03",
        ],
    );
    assert_eq!(code(&o), 2);
    let o = run(
        dir.path(),
        &["rates", p(&claims), p(&covid), "--from", "2020-13"],
    );
    assert_eq!(code(&o), 2);

    let empty = write(dir.path(), "empty.csv", &format!("{}\n", claims_header()));
    let o = run(
        dir.path(),
        &[
            "rates",
            p(&empty),
            p(&covid),
            "--from",
            "2020-03",
            "--to",
            "2020-04",
        ],
    );
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    let monthly = fs::read_to_string(dir.path().join("monthly.csv")).unwrap();
    let rows: Vec<&str> = monthly.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.contains(",0,0,0,")), "{rows:?}");
}

#[test]
fn analyze_windows() {
    let dir = tempfile::tempdir().unwrap();
    let monthly = fixture("reference_monthly.csv");
    let o = run(
        dir.path(),
        &[
            "analyze",
            p(&monthly),
            "--from",
            "2020-03",
            "--to",
            "2020-03",
        ],
    );
    assert_eq!(code(&o), 1);

    let o = run(
        dir.path(),
        &[
            "analyze",
            p(&monthly),
            "--from",
            "2020-01",
            "--to",
            "2020-08",
        ],
    );
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("analysis.json")).unwrap())
            .unwrap();
    assert_eq!(
        report["logarithmic_excluded"],
        serde_json::json!(["2020-01"])
    );
    assert_eq!(report["logarithmic"]["n"], 7);
    assert_eq!(report["linear"]["n"], 8);
    assert_eq!(report["format"], "claimlens-analysis");
    assert_eq!(report["version"], 1);
}

fn separable_corpus(dir: &Path) -> PathBuf {
    let cfg = write(
        dir,
        "sep.conf",
        "seed = 5\nfrom = 2020-01\nto = 2020-04\nclaims.per_month = 400\n\
         claims.link_slope = 0\nclaims.base_fraud = 0.1\nclaims.fraud_signal = 1\n",
    );
    let o = run(dir, &["synth", p(&cfg)]);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    dir.join("claims.csv")
}

#[test]
fn train_and_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let claims = separable_corpus(dir.path());
    let o = run(
        dir.path(),
        &["--seed", "9", "train", p(&claims), "--n-trees", "30"],
    );
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("train_metrics.json")).unwrap())
            .unwrap();
    assert_eq!(report["test"]["auc"], 1.0);
    assert_eq!(report["test_rows"], 480);
    let first = fs::read(dir.path().join("model.json")).unwrap();

    let o = run(
        dir.path(),
        &["--seed", "9", "train", p(&claims), "--n-trees", "30"],
    );
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read(dir.path().join("model.json")).unwrap(), first);

    let model = dir.path().join("model.json");
    let o = run(dir.path(), &["evaluate", p(&model), p(&claims)]);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    let metrics: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("metrics.json")).unwrap())
            .unwrap();
    assert_eq!(metrics["samples"], 1600);

    let o = run(
        dir.path(),
        &["train", p(&claims), "--trigger-features", "--n-trees", "5"],
    );
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    let o = run(dir.path(), &["evaluate", p(&model), p(&claims)]);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
}

#[test]
fn train_usage_and_data_failures() {
    let dir = tempfile::tempdir().unwrap();
    let claims = separable_corpus(dir.path());
    let o = run(dir.path(), &["train", p(&claims), "--split", "1.5"]);
    assert_eq!(code(&o), 2);
    let o = run(dir.path(), &["train", p(&claims), "--learning-rate", "0"]);
    assert_eq!(code(&o), 2);

    let one_class = write(dir.path(), "one.csv", &small_claims(2));
    let o = run(dir.path(), &["train", p(&one_class)]);
    assert_eq!(code(&o), 1);
    assert!(text(&o.stderr).contains("degenerate labels"));

    let garbage = write(dir.path(), "garbage.json", "{\"format\": \"other\"}");
    let o = run(dir.path(), &["evaluate", p(&garbage), p(&claims)]);
    assert_eq!(code(&o), 1);
}

#[test]
fn unknown_command_and_flags_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(dir.path(), &["frobnicate"])), 2);
    assert_eq!(code(&run(dir.path(), &["analyze"])), 2);
    assert_eq!(
        code(&run(dir.path(), &["--population", "x", "rates", "a", "b"])),
        2
    );
}
