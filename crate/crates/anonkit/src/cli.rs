//! Command-line front end.
//!
//! Exit codes: 0 success, 1 invalid request (bad flags, unknown features,
//! bad config), 2 runtime failure. Everything human-readable goes to stderr;
//! data and reports go to the files named by flags.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use anonkit_core::anonymizer::{anonymize, AnonymizationConfig, LabelSource};
use anonkit_core::attacks::{attribute_attack, membership_attack, MembershipAttackConfig};
use anonkit_core::evaluation::{
    equivalence_class_stats, verify_k_anonymity, EquivalenceClassStats, KAnonymityReport,
};
use anonkit_core::learners::{LearnerConfig, SplitCriterion};
use anonkit_core::mondrian::mondrian_anonymize;
use anonkit_core::presets::{learner_preset, qi_preset, LEARNER_PRESETS};
use anonkit_core::tabular::{split, Dataset, QuasiIdentifierSet, Schema};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::experiment::{load_config, plot_csv, run_experiment, AttackKind};
use crate::io::{
    load_csv, load_model, load_predictions, load_schema, save_csv, save_model,
    save_predictions, save_schema, save_tree, write_json, write_json_lines, write_text,
};
use crate::{parallel, synth, Error, Result};

#[derive(Debug, Parser)]
#[command(name = "anonkit", version, about = "Accuracy-guided k-anonymization of training data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Split a dataset into three seeded parts.
    Split(SplitArgs),
    /// Fit a learner preset and save the model.
    Train(TrainArgs),
    /// Write a model's predictions for a dataset.
    Predict(PredictArgs),
    /// Accuracy-guided anonymization.
    Anonymize(AnonymizeArgs),
    /// Median Mondrian baseline.
    Mondrian(MondrianArgs),
    /// Check that a dataset is k-anonymous.
    Verify(VerifyArgs),
    /// Membership inference against a saved model.
    AttackMembership(MembershipArgs),
    /// Attribute inference against a saved model.
    AttackAttribute(AttributeArgs),
    /// Run an experiment grid from a JSON config.
    Experiment(ExperimentArgs),
    /// Write a synthetic dataset and its schema.
    Generate(GenerateArgs),
}

#[derive(Debug, Args)]
struct DataArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    schema: PathBuf,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct QiArgs {
    /// Comma-separated feature names.
    #[arg(long, value_delimiter = ',')]
    qi: Option<Vec<String>>,
    #[arg(long, value_parser = ["adult12", "adult10", "adult8", "loan18"])]
    qi_preset: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CriterionArg {
    Gini,
    Infogain,
}

impl From<CriterionArg> for SplitCriterion {
    fn from(c: CriterionArg) -> Self {
        match c {
            CriterionArg::Gini => SplitCriterion::Gini,
            CriterionArg::Infogain => SplitCriterion::InformationGain,
        }
    }
}

#[derive(Debug, Args)]
struct SplitArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Directory receiving split1.csv, split2.csv and split3.csv.
    #[arg(long)]
    output: PathBuf,
    /// Three comma-separated fractions summing to 1.
    #[arg(long, value_delimiter = ',', default_values_t = [0.4, 0.4, 0.2])]
    fractions: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_parser = LEARNER_PRESETS.to_vec())]
    learner: String,
    /// Model file (JSON).
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    model: PathBuf,
    /// One-column `prediction` CSV.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct AnonymizeArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    output: PathBuf,
    #[command(flatten)]
    qi: QiArgs,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Learner fitted on the input to produce guide labels when no other
    /// label source is given.
    #[arg(long, value_parser = LEARNER_PRESETS.to_vec(), default_value = "dt")]
    learner: String,
    /// Prediction file from an external model.
    #[arg(long, conflicts_with_all = ["use_true_labels", "model"])]
    labels_from: Option<PathBuf>,
    #[arg(long, conflicts_with = "model")]
    use_true_labels: bool,
    /// Saved model whose predictions guide the tree.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = CriterionArg::Gini)]
    criterion: CriterionArg,
    /// Anonymizer tree (JSON).
    #[arg(long)]
    tree_out: Option<PathBuf>,
    /// Verification report (JSON).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MondrianArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    output: PathBuf,
    #[command(flatten)]
    qi: QiArgs,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    qi: QiArgs,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MembershipArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    schema: PathBuf,
    #[arg(long)]
    members: PathBuf,
    #[arg(long)]
    non_members: PathBuf,
    #[arg(long, value_enum, default_value_t = AttackArg::Mlp)]
    attack: AttackArg,
    /// Use raw score vectors instead of sorting them.
    #[arg(long)]
    unsorted: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    report: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AttackArg {
    Mlp,
    Rf,
    Threshold,
}

impl From<AttackArg> for AttackKind {
    fn from(a: AttackArg) -> Self {
        match a {
            AttackArg::Mlp => AttackKind::Mlp,
            AttackArg::Rf => AttackKind::Rf,
            AttackArg::Threshold => AttackKind::Threshold,
        }
    }
}

#[derive(Debug, Args)]
struct AttributeArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    secret: String,
    #[arg(long)]
    report: PathBuf,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    /// One JSON report per line.
    #[arg(long)]
    report: PathBuf,
    /// Plot table (CSV).
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, value_parser = ["adult", "nursery"])]
    dataset: String,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: PathBuf,
    /// Where to write the schema.
    #[arg(long)]
    schema: PathBuf,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                1
            } else {
                2
            }
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Split(a) => cmd_split(a),
        Command::Train(a) => cmd_train(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Anonymize(a) => cmd_anonymize(a),
        Command::Mondrian(a) => cmd_mondrian(a),
        Command::Verify(a) => cmd_verify(a),
        Command::AttackMembership(a) => cmd_membership(a),
        Command::AttackAttribute(a) => cmd_attribute(a),
        Command::Experiment(a) => cmd_experiment(a),
        Command::Generate(a) => cmd_generate(a),
    }
}

fn load(data: &DataArgs) -> Result<Dataset> {
    let schema = load_schema(&data.schema)?;
    read(&data.input, &schema)
}

fn read(path: &Path, schema: &Schema) -> Result<Dataset> {
    let loaded = load_csv(path, schema)?;
    if loaded.skipped_rows > 0 {
        eprintln!(
            "{}: skipped {} rows with missing values",
            path.display(),
            loaded.skipped_rows
        );
    }
    Ok(loaded.data)
}

fn quasi_identifiers(args: &QiArgs, schema: &Schema) -> Result<QuasiIdentifierSet> {
    let names: Vec<String> = match (&args.qi, &args.qi_preset) {
        (Some(list), _) => list.clone(),
        (None, Some(p)) => qi_preset(p)
            .expect("clap restricts preset names")
            .iter()
            .map(|s| s.to_string())
            .collect(),
        (None, None) => unreachable!("clap requires one of --qi, --qi-preset"),
    };
    Ok(QuasiIdentifierSet::new(schema, &names)?)
}

fn usize_k(k: u64) -> Result<usize> {
    usize::try_from(k).map_err(|_| Error::Config(format!("--k {k} is too large")))
}

fn cmd_split(a: SplitArgs) -> Result<()> {
    let fractions: [f64; 3] = a.fractions.as_slice().try_into().map_err(|_| {
        Error::Config(format!("--fractions needs 3 values, got {}", a.fractions.len()))
    })?;
    let data = load(&a.data)?;
    let parts = split(&data, fractions, a.seed)?;
    for (i, part) in parts.iter().enumerate() {
        save_csv(&a.output.join(format!("split{}.csv", i + 1)), part)?;
    }
    eprintln!(
        "split {} rows into {} / {} / {}",
        data.len(),
        parts[0].len(),
        parts[1].len(),
        parts[2].len()
    );
    Ok(())
}

fn preset(name: &str, seed: u64) -> Result<LearnerConfig> {
    learner_preset(name, seed).ok_or_else(|| Error::Config(format!("unknown learner `{name}`")))
}

fn cmd_train(a: TrainArgs) -> Result<()> {
    let data = load(&a.data)?;
    let config = preset(&a.learner, a.seed)?;
    let features = data.schema().feature_names();
    let model = parallel::pool()?
        .install(|| parallel::fit_model(&config, &data, &features, &data.labels()))?;
    save_model(&a.output, &model)?;
    eprintln!(
        "{}: train accuracy {:.4} on {} rows",
        a.learner,
        model.accuracy(&data)?,
        data.len()
    );
    Ok(())
}

fn cmd_predict(a: PredictArgs) -> Result<()> {
    let data = load(&a.data)?;
    let model = load_model(&a.model)?;
    save_predictions(&a.output, data.schema(), &model.predict(&data)?)
}

#[derive(Serialize)]
struct AnonymizationSummary {
    method: &'static str,
    k: usize,
    qi: Vec<String>,
    rows: usize,
    verification: KAnonymityReport,
    classes: EquivalenceClassStats,
}

fn finish(
    method: &'static str,
    output: &Path,
    report: Option<&Path>,
    schema: &Schema,
    qi: &QuasiIdentifierSet,
    k: usize,
) -> Result<()> {
    // Check what was actually written, not the in-memory table.
    let written = read(output, schema)?;
    let verification = verify_k_anonymity(&written, qi, k)?;
    let classes = equivalence_class_stats(&written, qi)?;
    eprintln!(
        "{method}: {} rows, {} classes, min class size {} (k={k})",
        written.len(),
        classes.group_count,
        classes.min_size
    );
    let pass = verification.pass;
    let min = verification.min_group_size;
    if let Some(path) = report {
        write_json(
            path,
            &AnonymizationSummary {
                method,
                k,
                qi: qi.names().iter().map(|s| s.to_string()).collect(),
                rows: written.len(),
                verification,
                classes,
            },
        )?;
    }
    if !pass {
        return Err(anonkit_core::Error::VerificationFailed {
            k,
            min_group_size: min,
        }
        .into());
    }
    Ok(())
}

fn cmd_anonymize(a: AnonymizeArgs) -> Result<()> {
    let data = load(&a.data)?;
    let schema = data.schema().clone();
    let qi = quasi_identifiers(&a.qi, &schema)?;
    let k = usize_k(a.k)?;
    let (labels, source) = if a.use_true_labels {
        (data.labels(), LabelSource::TrueLabels)
    } else if let Some(path) = &a.labels_from {
        let labels = load_predictions(path, &schema)?;
        if labels.len() != data.len() {
            return Err(Error::Format(format!(
                "{}: {} predictions for {} rows",
                path.display(),
                labels.len(),
                data.len()
            )));
        }
        (labels, LabelSource::ModelPredictions)
    } else if let Some(path) = &a.model {
        (load_model(path)?.predict(&data)?, LabelSource::ModelPredictions)
    } else {
        let config = preset(&a.learner, a.seed)?;
        let features = schema.feature_names();
        let model = parallel::pool()?
            .install(|| parallel::fit_model(&config, &data, &features, &data.labels()))?;
        (model.predict(&data)?, LabelSource::ModelPredictions)
    };
    let config = AnonymizationConfig {
        k,
        qi: qi.clone(),
        label_source: source,
        criterion: a.criterion.into(),
        seed: a.seed,
    };
    let (anonymized, tree) = anonymize(&data, &labels, &config)?;
    save_csv(&a.output, &anonymized)?;
    if let Some(path) = &a.tree_out {
        save_tree(path, &tree)?;
    }
    finish("ag", &a.output, a.report.as_deref(), &schema, &qi, k)
}

fn cmd_mondrian(a: MondrianArgs) -> Result<()> {
    let data = load(&a.data)?;
    let schema = data.schema().clone();
    let qi = quasi_identifiers(&a.qi, &schema)?;
    let k = usize_k(a.k)?;
    let anonymized = mondrian_anonymize(&data, &qi, k)?;
    save_csv(&a.output, &anonymized)?;
    finish("mondrian", &a.output, a.report.as_deref(), &schema, &qi, k)
}

fn cmd_verify(a: VerifyArgs) -> Result<()> {
    let data = load(&a.data)?;
    let qi = quasi_identifiers(&a.qi, data.schema())?;
    let k = usize_k(a.k)?;
    let report = verify_k_anonymity(&data, &qi, k)?;
    eprintln!(
        "{}: {} rows, {} classes, min class size {}, k={k}: {}",
        a.data.input.display(),
        data.len(),
        report.group_count,
        report.min_group_size,
        if report.pass { "PASS" } else { "FAIL" }
    );
    for t in report.violating_tuples.iter().take(10) {
        eprintln!("  {} x{}", t.values.join(", "), t.count);
    }
    if report.violating_tuples.len() > 10 {
        eprintln!("  ... {} more", report.violating_tuples.len() - 10);
    }
    if let Some(path) = &a.report {
        write_json(path, &report)?;
    }
    if !report.pass {
        return Err(anonkit_core::Error::VerificationFailed {
            k,
            min_group_size: report.min_group_size,
        }
        .into());
    }
    Ok(())
}

fn cmd_membership(a: MembershipArgs) -> Result<()> {
    let schema = load_schema(&a.schema)?;
    let model = load_model(&a.model)?;
    let members = read(&a.members, &schema)?;
    let non_members = read(&a.non_members, &schema)?;
    let config = MembershipAttackConfig {
        attack_model: AttackKind::from(a.attack).model(a.seed),
        sort_scores: !a.unsorted,
        seed: a.seed,
    };
    let result = membership_attack(&model, &members, &non_members, &config)?;
    eprintln!(
        "membership attack: accuracy {:.4}, precision {:.4}, recall {:.4} on {} records",
        result.accuracy, result.precision, result.recall, result.evaluated
    );
    write_json(&a.report, &result)
}

fn cmd_attribute(a: AttributeArgs) -> Result<()> {
    let data = load(&a.data)?;
    let model = load_model(&a.model)?;
    let result = attribute_attack(&model, &data, &a.secret)?;
    eprintln!(
        "attribute attack on `{}`: accuracy {:.4}, precision {:.4}, recall {:.4}",
        a.secret, result.accuracy, result.precision, result.recall
    );
    write_json(&a.report, &result)
}

fn cmd_experiment(a: ExperimentArgs) -> Result<()> {
    let config = load_config(&a.config)?;
    let base = a.config.parent().unwrap_or(Path::new("."));
    let reports = run_experiment(&config, base)?;
    write_json_lines(&a.report, &reports)?;
    if let Some(path) = &a.plot {
        write_text(path, &plot_csv(&reports))?;
    }
    for r in &reports {
        eprintln!(
            "{} {} {} k={}: baseline {:.4}, accuracy {:.4} (sd {:.4})",
            r.dataset,
            r.learner,
            r.method.name(),
            r.k,
            r.baseline_accuracy.mean,
            r.accuracy.mean,
            r.accuracy.std
        );
    }
    Ok(())
}

fn cmd_generate(a: GenerateArgs) -> Result<()> {
    let data = synth::generate(&a.dataset, a.rows, a.seed)
        .ok_or_else(|| Error::Config(format!("unknown dataset `{}`", a.dataset)))?;
    save_schema(&a.schema, data.schema())?;
    save_csv(&a.output, &data)
}
