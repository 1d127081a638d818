//! `claimlens`: batch commands over claim and infection files.
//!
//! Exit codes: 0 success, 1 data or model failure, 2 usage or configuration failure.

mod manifest;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use chrono::NaiveDate;
use claimlens::claims::{
    build_joint_series, parse_claims_csv, parse_covid_csv, read_monthly_csv, write_claims_csv,
    write_covid_csv, write_issues_csv, write_monthly_csv, ClaimRecord, DataError, MonthRange,
    SchemaMap, Severity, YearMonth, DEFAULT_POPULATION,
};
use claimlens::format::round_json;
use claimlens::gbm::{
    build_schema, build_schema_with_flags, fit_gbm, train_test_split, BoostedModel, GbmError,
    Hyperparameters, LabeledDataset,
};
use claimlens::metrics::{evaluate_scores, MetricsReport};
use claimlens::stats::{analyze, AnalysisError};
use claimlens::synth::{generate, write_ground_truth_csv, SynthConfig, SynthError};
use claimlens::triggers::{
    build_context, builtin_rules, default_baseline_window, evaluate_rules, flag_claims,
    parse_rule_set, write_hits_csv, TriggerRule, DEFAULT_K,
};
use clap::{Args, Parser, Subcommand};
use manifest::RunManifest;
use serde::Serialize;

const REPORT_DIGITS: usize = 6;
const DEFAULT_SEED: u64 = 42;

#[derive(Parser, Debug)]
#[command(
    name = "claimlens",
    version,
    about = "Claim flagging, fraud scoring and fraud/infection rate analysis"
)]
struct Cli {
    /// Seed for every random choice (train split, synthetic data).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Population used to turn new infections into a rate.
    #[arg(long, global = true, default_value_t = DEFAULT_POPULATION)]
    population: u64,
    /// Directory for output files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a claims file; issues go to stdout as CSV.
    Validate {
        claims: PathBuf,
        /// `field = source column` lines.
        #[arg(long)]
        schema_map: Option<PathBuf>,
    },
    /// Evaluate trigger rules and write hits.csv (and flags.csv with --flags-out).
    Triggers(TriggersArgs),
    /// Monthly fraud and infection rates, written to monthly.csv.
    Rates {
        claims: PathBuf,
        covid: PathBuf,
        #[arg(long)]
        from: Option<YearMonth>,
        #[arg(long)]
        to: Option<YearMonth>,
        #[arg(long, default_value = "study_region")]
        region: String,
        #[arg(long)]
        schema_map: Option<PathBuf>,
    },
    /// Correlation and regressions over a monthly series, written to analysis.json.
    Analyze {
        monthly: PathBuf,
        #[arg(long)]
        from: Option<YearMonth>,
        #[arg(long)]
        to: Option<YearMonth>,
    },
    /// Fit the boosted-tree scorer; writes model.json and train_metrics.json.
    Train(TrainArgs),
    /// Score labeled claims with a saved model; writes metrics.json.
    Evaluate {
        model: PathBuf,
        claims: PathBuf,
        #[arg(long)]
        evaluation_date: Option<NaiveDate>,
    },
    /// Generate a synthetic corpus from a key = value config.
    Synth { config: PathBuf },
}

#[derive(Args, Debug)]
struct TriggersArgs {
    claims: PathBuf,
    /// Rule file in the trigger language.
    #[arg(long, conflicts_with = "builtin", required_unless_present = "builtin")]
    rules: Option<PathBuf>,
    /// Use the built-in catalog.
    #[arg(long)]
    builtin: bool,
    /// Date for "now" in age-based rules; defaults to the latest reported date.
    #[arg(long)]
    evaluation_date: Option<NaiveDate>,
    #[arg(long)]
    baseline_from: Option<YearMonth>,
    #[arg(long)]
    baseline_to: Option<YearMonth>,
    /// Standard deviations above the baseline mean for utilization rules.
    #[arg(long, default_value_t = DEFAULT_K)]
    k: f64,
    /// Also write one row per claim to flags.csv.
    #[arg(long)]
    flags_out: bool,
    #[arg(long)]
    schema_map: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TrainArgs {
    claims: PathBuf,
    /// Training share of the stratified split.
    #[arg(long, default_value_t = 0.7)]
    split: f64,
    #[arg(long, default_value_t = Hyperparameters::default().n_trees)]
    n_trees: usize,
    #[arg(long, default_value_t = Hyperparameters::default().max_depth)]
    max_depth: usize,
    #[arg(long, default_value_t = Hyperparameters::default().learning_rate)]
    learning_rate: f64,
    #[arg(long, default_value_t = Hyperparameters::default().min_leaf)]
    min_leaf: usize,
    /// Add one 0/1 feature per data-expressible builtin trigger.
    #[arg(long)]
    trigger_features: bool,
    #[arg(long)]
    evaluation_date: Option<NaiveDate>,
}

/// A failed command and the exit code it maps to.
enum Fail {
    Usage(anyhow::Error),
    Data(anyhow::Error),
}

type Outcome = Result<u8, Fail>;

fn usage(e: impl Into<anyhow::Error>) -> Fail {
    Fail::Usage(e.into())
}

fn data(e: impl Into<anyhow::Error>) -> Fail {
    Fail::Data(e.into())
}

impl From<DataError> for Fail {
    fn from(e: DataError) -> Self {
        match e {
            DataError::Usage(_) | DataError::SchemaMap { .. } => usage(e),
            _ => data(e),
        }
    }
}

impl From<GbmError> for Fail {
    fn from(e: GbmError) -> Self {
        match e {
            GbmError::Usage(_) => usage(e),
            _ => data(e),
        }
    }
}

impl From<SynthError> for Fail {
    fn from(e: SynthError) -> Self {
        match e {
            SynthError::Config { .. } | SynthError::Usage(_) => usage(e),
            SynthError::Data(_) => data(e),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Fail::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Fail::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Validate { claims, schema_map } => cmd_validate(claims, schema_map.as_deref()),
        Command::Triggers(args) => cmd_triggers(cli, args),
        Command::Rates {
            claims,
            covid,
            from,
            to,
            region,
            schema_map,
        } => cmd_rates(
            cli,
            claims,
            covid,
            *from,
            *to,
            region,
            schema_map.as_deref(),
        ),
        Command::Analyze { monthly, from, to } => cmd_analyze(cli, monthly, *from, *to),
        Command::Train(args) => cmd_train(cli, args),
        Command::Evaluate {
            model,
            claims,
            evaluation_date,
        } => cmd_evaluate(cli, model, claims, *evaluation_date),
        Command::Synth { config } => cmd_synth(cli, config),
    }
}

/// Reads an input file; an unreadable path is a usage failure.
fn read_input(path: &Path) -> Result<Vec<u8>, Fail> {
    fs::read(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(usage)
}

fn load_schema_map(path: Option<&Path>) -> Result<Option<SchemaMap>, Fail> {
    path.map(|p| {
        let bytes = read_input(p)?;
        let text = String::from_utf8(bytes).map_err(|e| usage(anyhow!("{}: {e}", p.display())))?;
        Ok(SchemaMap::parse(&text)?)
    })
    .transpose()
}

/// Loads claims, reporting error rows on stderr. Error rows are skipped.
fn load_claims(
    path: &Path,
    bytes: &[u8],
    map: Option<&SchemaMap>,
) -> Result<Vec<ClaimRecord>, Fail> {
    let (claims, issues) = parse_claims_csv(bytes, map)?;
    let errors = issues
        .iter()
        .filter(|i| i.severity == Severity::Error)
        .count();
    if errors > 0 {
        eprintln!(
            "warning: {}: skipped {errors} row(s) with errors; run `validate` for details",
            path.display()
        );
    }
    Ok(claims)
}

fn latest_reported(claims: &[ClaimRecord]) -> NaiveDate {
    claims
        .iter()
        .map(|c| c.claim_reported_date)
        .max()
        .unwrap_or(NaiveDate::from_ymd_opt(1970, 1, 1).expect("valid date"))
}

struct OutDir<'a> {
    dir: &'a Path,
    manifest: RunManifest,
}

impl<'a> OutDir<'a> {
    fn new(dir: &'a Path, command: &str) -> Result<Self, Fail> {
        fs::create_dir_all(dir)
            .with_context(|| format!("cannot create output directory {}", dir.display()))
            .map_err(usage)?;
        Ok(Self {
            dir,
            manifest: RunManifest::new(command),
        })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), Fail> {
        let path = self.dir.join(name);
        fs::write(&path, bytes)
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(data)?;
        self.manifest.output(name, bytes);
        Ok(())
    }

    fn finish(self) -> Result<(), Fail> {
        let name = format!("{}.manifest.json", self.manifest.command);
        let path = self.dir.join(&name);
        fs::write(&path, self.manifest.to_json())
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(data)
    }
}

/// Pretty JSON with every float cut to the report precision.
fn report_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_value(value).expect("report serializes");
    round_json(&mut v, REPORT_DIGITS);
    let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
    s.push('\n');
    s.into_bytes()
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> Result<(), DataError>) -> Result<Vec<u8>, Fail> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn cmd_validate(claims: &Path, schema_map: Option<&Path>) -> Outcome {
    let map = load_schema_map(schema_map)?;
    let bytes = read_input(claims)?;
    let (_, issues) = parse_claims_csv(&bytes[..], map.as_ref())?;
    let mut stdout = std::io::stdout().lock();
    write_issues_csv(&mut stdout, &issues)?;
    stdout.flush().map_err(data)?;
    let errors = issues
        .iter()
        .filter(|i| i.severity == Severity::Error)
        .count();
    Ok(if errors == 0 { 0 } else { 1 })
}

fn baseline_window(from: Option<YearMonth>, to: Option<YearMonth>) -> Result<MonthRange, Fail> {
    let d = default_baseline_window();
    let w = MonthRange::new(from.unwrap_or(d.from), to.unwrap_or(d.to));
    if w.is_empty() {
        return Err(usage(anyhow!(
            "baseline window {}..{} is reversed",
            w.from,
            w.to
        )));
    }
    Ok(w)
}

fn cmd_triggers(cli: &Cli, a: &TriggersArgs) -> Outcome {
    if !(a.k.is_finite() && a.k >= 0.0) {
        return Err(usage(anyhow!(
            "--k must be a non-negative number, got {}",
            a.k
        )));
    }
    let window = baseline_window(a.baseline_from, a.baseline_to)?;
    let map = load_schema_map(a.schema_map.as_deref())?;
    let mut out = OutDir::new(&cli.out, "triggers")?;

    let rules: Vec<TriggerRule> = match &a.rules {
        Some(path) => {
            let bytes = read_input(path)?;
            out.manifest.input(path, &bytes);
            let text =
                String::from_utf8(bytes).map_err(|e| data(anyhow!("{}: {e}", path.display())))?;
            parse_rule_set(&text).map_err(|e| data(anyhow!("{}: {e}", path.display())))?
        }
        None => builtin_rules(),
    };
    let bytes = read_input(&a.claims)?;
    out.manifest.input(&a.claims, &bytes);
    let claims = load_claims(&a.claims, &bytes, map.as_ref())?;

    let eval_date = a
        .evaluation_date
        .unwrap_or_else(|| latest_reported(&claims));
    let ctx = build_context(&claims, eval_date, window).with_k(a.k);
    ctx.validate_rules(&claims, &rules).map_err(data)?;
    let hits = evaluate_rules(&rules, &claims, &ctx);

    out.manifest
        .param("rules", if a.builtin { "builtin" } else { "file" });
    out.manifest.param("evaluation_date", eval_date);
    out.manifest
        .param("baseline", format!("{}..{}", window.from, window.to));
    out.manifest.param("k", a.k);
    out.write("hits.csv", &csv_bytes(|b| write_hits_csv(b, &hits))?)?;
    if a.flags_out {
        let flags = flag_claims(&hits, &claims).map_err(data)?;
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["claim_id", "flagged", "rules"])
            .map_err(data)?;
        for (id, f) in &flags {
            w.write_record([
                id.as_str(),
                if f.flagged { "1" } else { "0" },
                &f.rules.join(";"),
            ])
            .map_err(data)?;
        }
        out.write(
            "flags.csv",
            &w.into_inner().map_err(|e| data(anyhow!("{e}")))?,
        )?;
    }
    out.finish()?;
    let flagged: std::collections::BTreeSet<&str> =
        hits.iter().map(|h| h.claim_id.as_str()).collect();
    println!(
        "{} hit(s) on {} of {} claim(s)",
        hits.len(),
        flagged.len(),
        claims.len()
    );
    Ok(0)
}

fn cmd_rates(
    cli: &Cli,
    claims_path: &Path,
    covid_path: &Path,
    from: Option<YearMonth>,
    to: Option<YearMonth>,
    region: &str,
    schema_map: Option<&Path>,
) -> Outcome {
    if cli.population == 0 {
        return Err(usage(anyhow!("--population must be positive")));
    }
    let map = load_schema_map(schema_map)?;
    let mut out = OutDir::new(&cli.out, "rates")?;
    let claim_bytes = read_input(claims_path)?;
    let covid_bytes = read_input(covid_path)?;
    out.manifest.input(claims_path, &claim_bytes);
    out.manifest.input(covid_path, &covid_bytes);
    let claims = load_claims(claims_path, &claim_bytes, map.as_ref())?;
    let (covid, issues) = parse_covid_csv(&covid_bytes[..], region)?;
    for i in &issues {
        eprintln!(
            "warning: {}: row {}: {}",
            covid_path.display(),
            i.row,
            i.message
        );
    }

    let months = || claims.iter().map(|c| c.reported_month());
    let from = from.or_else(|| months().min());
    let to = to.or_else(|| months().max());
    let (Some(from), Some(to)) = (from, to) else {
        return Err(usage(anyhow!(
            "no claims to infer the month range from; pass --from and --to"
        )));
    };
    let series = build_joint_series(&claims, &covid, cli.population, from, to)?;

    out.manifest.param("from", from);
    out.manifest.param("to", to);
    out.manifest.param("population", cli.population);
    out.manifest.param("region", region);
    out.write(
        "monthly.csv",
        &csv_bytes(|b| write_monthly_csv(b, &series))?,
    )?;
    out.finish()?;
    println!("{} month(s) written", series.len());
    Ok(0)
}

fn cmd_analyze(
    cli: &Cli,
    monthly: &Path,
    from: Option<YearMonth>,
    to: Option<YearMonth>,
) -> Outcome {
    let mut out = OutDir::new(&cli.out, "analyze")?;
    let bytes = read_input(monthly)?;
    out.manifest.input(monthly, &bytes);
    let points = read_monthly_csv(&bytes[..])?;
    let from = from.or_else(|| points.iter().map(|p| p.month).min());
    let to = to.or_else(|| points.iter().map(|p| p.month).max());
    let (Some(from), Some(to)) = (from, to) else {
        return Err(data(anyhow!("{} holds no months", monthly.display())));
    };
    if from > to {
        return Err(usage(anyhow!("month range {from}..{to} is reversed")));
    }
    let report = analyze(&points, from, to).map_err(|e| match e {
        AnalysisError::TooFewRows { .. } | AnalysisError::Stats(_) => data(e),
    })?;

    out.manifest.param("from", from);
    out.manifest.param("to", to);
    out.write("analysis.json", &report_json(&report))?;
    out.finish()?;
    println!(
        "pearson r = {}",
        claimlens::format::sig_digits(report.pearson, 4)
    );
    println!(
        "linear: y = {} x + {}, R^2 = {}",
        claimlens::format::sig_digits(report.linear.slope, 5),
        claimlens::format::sig_digits(report.linear.intercept, 4),
        claimlens::format::sig_digits(report.linear.r_squared, 4)
    );
    if let Some(l) = &report.logarithmic {
        println!(
            "logarithmic: y = {} ln(x) + {}, R^2 = {}",
            claimlens::format::sig_digits(l.slope, 4),
            claimlens::format::sig_digits(l.intercept, 4),
            claimlens::format::sig_digits(l.r_squared, 4)
        );
    }
    for m in &report.logarithmic_excluded {
        println!("excluded from logarithmic fit: {m} (infection rate not positive)");
    }
    Ok(0)
}

/// Builtin trigger hits per claim, restricted to rules the data can express.
fn trigger_flags(
    claims: &[ClaimRecord],
    eval_date: NaiveDate,
) -> (Vec<String>, BTreeMap<String, Vec<String>>) {
    let rules: Vec<TriggerRule> = builtin_rules()
        .into_iter()
        .filter(|r| !r.is_placeholder())
        .collect();
    let ctx = build_context(claims, eval_date, default_baseline_window());
    // An empty baseline window only disables the utilization rule.
    let rules: Vec<TriggerRule> = rules
        .into_iter()
        .filter(|r| ctx.validate_rules(claims, std::slice::from_ref(r)).is_ok())
        .collect();
    let mut fired: BTreeMap<String, Vec<String>> = claims
        .iter()
        .map(|c| (c.claim_id.clone(), Vec::new()))
        .collect();
    for h in evaluate_rules(&rules, claims, &ctx) {
        fired.entry(h.claim_id).or_default().push(h.rule_id);
    }
    (rules.into_iter().map(|r| r.id).collect(), fired)
}

#[derive(Serialize)]
struct TrainReport<'a> {
    format: &'static str,
    version: u32,
    seed: u64,
    split: f64,
    train_rows: usize,
    train_positives: usize,
    test_rows: usize,
    test_positives: usize,
    features: usize,
    trees: usize,
    model_sha256: String,
    test: &'a MetricsReport,
}

fn cmd_train(cli: &Cli, a: &TrainArgs) -> Outcome {
    if !(a.split > 0.0 && a.split < 1.0) {
        return Err(usage(anyhow!(
            "--split must lie strictly between 0 and 1, got {}",
            a.split
        )));
    }
    let hp = Hyperparameters {
        n_trees: a.n_trees,
        max_depth: a.max_depth,
        learning_rate: a.learning_rate,
        min_leaf: a.min_leaf,
    };
    if !(hp.learning_rate > 0.0 && hp.learning_rate <= 1.0) || hp.min_leaf == 0 || hp.max_depth == 0
    {
        return Err(usage(anyhow!(
            "hyperparameters out of range: learning rate in (0, 1], max depth and min leaf at least 1"
        )));
    }
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    let mut out = OutDir::new(&cli.out, "train")?;
    let bytes = read_input(&a.claims)?;
    out.manifest.input(&a.claims, &bytes);
    let claims: Vec<ClaimRecord> = load_claims(&a.claims, &bytes, None)?
        .into_iter()
        .filter(|c| c.fraud_status.label().is_some())
        .collect();
    let positives = claims.iter().filter(|c| c.is_fraud()).count();
    if positives == 0 || positives == claims.len() {
        return Err(data(anyhow!(
            "degenerate labels: {positives} fraud and {} non-fraud labeled claim(s); both classes are needed",
            claims.len() - positives
        )));
    }

    // Split on ids and labels alone so the schema sees only training rows.
    let index = LabeledDataset::new(
        vec![Vec::new(); claims.len()],
        claims
            .iter()
            .map(|c| c.fraud_status.label().unwrap_or(0))
            .collect(),
        claims.iter().map(|c| c.claim_id.clone()).collect(),
    )?;
    let (train_idx, test_idx) = train_test_split(&index, a.split, seed)?;
    let pick = |ids: &[String]| -> Vec<ClaimRecord> {
        let wanted: std::collections::HashSet<&String> = ids.iter().collect();
        claims
            .iter()
            .filter(|c| wanted.contains(&c.claim_id))
            .cloned()
            .collect()
    };
    let (train_claims, test_claims) = (pick(&train_idx.ids), pick(&test_idx.ids));

    let eval_date = a
        .evaluation_date
        .unwrap_or_else(|| latest_reported(&claims));
    let (schema, flags) = if a.trigger_features {
        let (rule_ids, flags) = trigger_flags(&claims, eval_date);
        (
            build_schema_with_flags(&train_claims, &rule_ids)?,
            Some(flags),
        )
    } else {
        (build_schema(&train_claims)?, None)
    };
    let train = LabeledDataset::from_claims(&schema, &train_claims, flags.as_ref())?;
    let test = LabeledDataset::from_claims(&schema, &test_claims, flags.as_ref())?;
    let model = fit_gbm(&train, &schema, hp)?;
    let scores = model.predict_dataset(&test)?;
    let metrics = evaluate_scores(&scores, &test.labels).map_err(data)?;

    let model_json = model.to_json();
    let report = TrainReport {
        format: "claimlens-train",
        version: 1,
        seed,
        split: a.split,
        train_rows: train.len(),
        train_positives: train.positives(),
        test_rows: test.len(),
        test_positives: test.positives(),
        features: schema.arity(),
        trees: model.trees.len(),
        model_sha256: manifest::sha256_hex(model_json.as_bytes()),
        test: &metrics,
    };
    out.manifest.param("seed", seed);
    out.manifest.param("split", a.split);
    out.manifest.param("n_trees", hp.n_trees);
    out.manifest.param("max_depth", hp.max_depth);
    out.manifest.param("learning_rate", hp.learning_rate);
    out.manifest.param("min_leaf", hp.min_leaf);
    out.manifest.param("trigger_features", a.trigger_features);
    if a.trigger_features {
        out.manifest.param("evaluation_date", eval_date);
    }
    out.write("model.json", model_json.as_bytes())?;
    out.write("train_metrics.json", &report_json(&report))?;
    out.finish()?;
    println!(
        "held-out AUC {}, F1 at 0.5 {}, best F1 {}",
        claimlens::format::sig_digits(metrics.auc, 4),
        claimlens::format::sig_digits(metrics.f1_at_half, 4),
        claimlens::format::sig_digits(metrics.f1_max, 4)
    );
    Ok(0)
}

fn cmd_evaluate(
    cli: &Cli,
    model_path: &Path,
    claims_path: &Path,
    eval_date: Option<NaiveDate>,
) -> Outcome {
    let mut out = OutDir::new(&cli.out, "evaluate")?;
    let model_bytes = read_input(model_path)?;
    out.manifest.input(model_path, &model_bytes);
    let text = String::from_utf8(model_bytes)
        .map_err(|e| data(anyhow!("{}: {e}", model_path.display())))?;
    let model = BoostedModel::from_json(&text)?;
    let bytes = read_input(claims_path)?;
    out.manifest.input(claims_path, &bytes);
    let claims = load_claims(claims_path, &bytes, None)?;

    let flags = if model.schema.uses_trigger_flags() {
        let date = eval_date.unwrap_or_else(|| latest_reported(&claims));
        out.manifest.param("evaluation_date", date);
        Some(trigger_flags(&claims, date).1)
    } else {
        None
    };
    let ds = LabeledDataset::from_claims(&model.schema, &claims, flags.as_ref())?;
    let scores = model.predict_dataset(&ds)?;
    let metrics = evaluate_scores(&scores, &ds.labels).map_err(data)?;
    out.write("metrics.json", &report_json(&metrics))?;
    out.finish()?;
    println!(
        "AUC {}, F1 at 0.5 {}, best F1 {}",
        claimlens::format::sig_digits(metrics.auc, 4),
        claimlens::format::sig_digits(metrics.f1_at_half, 4),
        claimlens::format::sig_digits(metrics.f1_max, 4)
    );
    Ok(0)
}

fn cmd_synth(cli: &Cli, config: &Path) -> Outcome {
    let bytes = read_input(config)?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|e| usage(anyhow!("{}: {e}", config.display())))?;
    let mut cfg = SynthConfig::parse(&text)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let (covid, claims, truth) = generate(&cfg)?;

    let mut out = OutDir::new(&cli.out, "synth")?;
    out.manifest.input(config, &bytes);
    out.manifest.param("seed", cfg.seed);
    out.manifest.param("evaluation_date", cfg.evaluation_date);
    out.manifest.param(
        "baseline",
        format!("{}..{}", cfg.baseline.from, cfg.baseline.to),
    );
    out.write("claims.csv", &csv_bytes(|b| write_claims_csv(b, &claims))?)?;
    out.write("covid.csv", &csv_bytes(|b| write_covid_csv(b, &covid))?)?;
    out.write(
        "ground_truth.csv",
        &csv_bytes(|b| write_ground_truth_csv(b, &truth))?,
    )?;
    out.finish()?;
    println!(
        "{} claim(s), {} daily infection record(s), {} planted violation(s)",
        claims.len(),
        covid.len(),
        truth.planted.len()
    );
    Ok(0)
}
