//! Config-driven sweeps over k, methods and learners.
//!
//! Every (seed, learner, k) unit runs the accuracy-guided pipeline and, when
//! requested, Median Mondrian on the same splits. Units run in parallel and
//! are merged into one [`EvaluationReport`] per (learner, method, k), sorted
//! by (dataset, learner, method, k). Anonymized outputs are verified after a
//! round trip through the CSV writer and reader.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anonkit_core::anonymizer::{
    anonymize_pipeline, AnonymizationConfig, LabelSource, PipelineConfig,
};
use anonkit_core::attacks::{
    attribute_attack, membership_attack, AttackModel, AttackResult, MembershipAttackConfig,
};
use anonkit_core::evaluation::{
    equivalence_class_stats, verify_k_anonymity, EvaluationReport, Method, RunRecord, Summary,
};
use anonkit_core::learners::{SplitCriterion, TrainedModel};
use anonkit_core::mondrian::mondrian_anonymize;
use anonkit_core::presets::{learner_preset, qi_preset, LEARNER_PRESETS, QI_PRESETS};
use anonkit_core::tabular::{subsample, Dataset, FeatureKind, QuasiIdentifierSet, Schema};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize};

use crate::io::{csv_string, load_csv, load_schema, read_csv};
use crate::{synth, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackKind {
    #[default]
    Mlp,
    Rf,
    Threshold,
}

impl AttackKind {
    pub fn model(self, seed: u64) -> AttackModel {
        match self {
            AttackKind::Mlp => AttackModel::Learner(learner_preset("attack-mlp", seed).expect("preset")),
            AttackKind::Rf => AttackModel::Learner(learner_preset("attack-rf", seed).expect("preset")),
            AttackKind::Threshold => AttackModel::MaxScoreThreshold,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackSettings {
    #[serde(default)]
    pub membership: bool,
    #[serde(default)]
    pub membership_model: AttackKind,
    #[serde(default = "yes")]
    pub sort_scores: bool,
    /// Categorical feature targeted by the attribute attack.
    #[serde(default)]
    pub attribute: Option<String>,
}

fn yes() -> bool {
    true
}

fn default_subsample() -> Option<usize> {
    Some(10_000)
}

fn default_fractions() -> [f64; 3] {
    [0.4, 0.4, 0.2]
}

/// Present-but-nullable: the key must appear in the config.
fn required<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<usize>, D::Error> {
    Option::<usize>::deserialize(d)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// `adult` or `nursery` for the built-in generators, otherwise a CSV path
    /// (relative to the config file) that needs `schema`.
    pub dataset: String,
    #[serde(default)]
    pub schema: Option<PathBuf>,
    /// Generator size for the built-in Adult data.
    #[serde(default)]
    pub rows: Option<usize>,
    #[serde(default)]
    pub qi_preset: Option<String>,
    #[serde(default)]
    pub qi_list: Option<Vec<String>>,
    pub ks: Vec<usize>,
    pub methods: Vec<Method>,
    /// Learner preset names, used for both the original and retrained model.
    pub learners: Vec<String>,
    #[serde(default)]
    pub label_source: LabelSource,
    #[serde(default)]
    pub criterion: SplitCriterion,
    #[serde(default)]
    pub attacks: AttackSettings,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub seeds: Option<Vec<u64>>,
    /// Seeded row cap applied before splitting; `null` uses every row.
    #[serde(default = "default_subsample")]
    pub subsample: Option<usize>,
    #[serde(deserialize_with = "required")]
    pub feature_selection: Option<usize>,
    #[serde(default = "default_fractions")]
    pub fractions: [f64; 3],
    /// Record wall-clock times (makes reports non-reproducible).
    #[serde(default)]
    pub timings: bool,
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// A validated config with its data loaded.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub config: ExperimentConfig,
    pub data: Dataset,
    pub qi: QuasiIdentifierSet,
    pub seeds: Vec<u64>,
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn load_dataset(config: &ExperimentConfig, base: &Path, seed: u64) -> Result<Dataset> {
    if config.schema.is_none() {
        if let Some(d) = synth::generate(&config.dataset, config.rows, seed) {
            return Ok(d);
        }
        return Err(Error::Config(format!(
            "dataset `{}` is not a built-in generator and no schema was given",
            config.dataset
        )));
    }
    let schema = load_schema(&resolve(base, config.schema.as_deref().expect("checked")))?;
    Ok(load_csv(&resolve(base, Path::new(&config.dataset)), &schema)?.data)
}

fn qi_names(config: &ExperimentConfig) -> std::result::Result<Vec<String>, String> {
    match (&config.qi_preset, &config.qi_list) {
        (Some(_), Some(_)) => Err("give either qi_preset or qi_list, not both".into()),
        (None, None) => Err("one of qi_preset or qi_list is required".into()),
        (Some(p), None) => qi_preset(p)
            .map(|names| names.iter().map(|s| s.to_string()).collect())
            .ok_or_else(|| format!("unknown qi_preset `{p}` (known: {})", QI_PRESETS.join(", "))),
        (None, Some(list)) => Ok(list.clone()),
    }
}

/// Checks the whole config and loads the data, reporting every problem found
/// at once.
pub fn prepare(config: &ExperimentConfig, base: &Path) -> Result<Prepared> {
    let mut problems = Vec::new();
    if config.ks.is_empty() {
        problems.push("ks is empty".to_string());
    }
    if config.ks.contains(&0) {
        problems.push("every k must be >= 1".to_string());
    }
    if config.methods.is_empty() {
        problems.push("methods is empty".to_string());
    }
    if config.learners.is_empty() {
        problems.push("learners is empty".to_string());
    }
    for l in &config.learners {
        if learner_preset(l, 0).is_none() {
            problems.push(format!(
                "unknown learner `{l}` (known: {})",
                LEARNER_PRESETS.join(", ")
            ));
        }
    }
    let seeds = match (&config.seed, &config.seeds) {
        (Some(_), Some(_)) => {
            problems.push("give either seed or seeds, not both".into());
            vec![]
        }
        (Some(s), None) => vec![*s],
        (None, Some(s)) if s.is_empty() => {
            problems.push("seeds is empty".into());
            vec![]
        }
        (None, Some(s)) => s.clone(),
        (None, None) => vec![0],
    };
    if config.subsample == Some(0) {
        problems.push("subsample must be >= 1 or null".into());
    }
    if config.feature_selection == Some(0) {
        problems.push("feature_selection must be >= 1 or null".into());
    }
    let f = config.fractions;
    if f.iter().any(|x| !(0.0..=1.0).contains(x)) || (f.iter().sum::<f64>() - 1.0).abs() > 1e-6 {
        problems.push(format!("fractions {f:?} must be in [0,1] and sum to 1"));
    }
    let names = qi_names(config).map_err(|e| problems.push(e)).ok();

    let data = match load_dataset(config, base, seeds.first().copied().unwrap_or(0)) {
        Ok(d) => Some(d),
        Err(e) => {
            problems.push(e.to_string());
            None
        }
    };
    let mut qi = None;
    if let (Some(data), Some(names)) = (&data, &names) {
        let schema: &Schema = data.schema();
        match QuasiIdentifierSet::new(schema, names) {
            Ok(q) => qi = Some(q),
            Err(e) => problems.push(format!("quasi-identifiers: {e}")),
        }
        if let Some(m) = config.feature_selection {
            if m > schema.features.len() {
                problems.push(format!(
                    "feature_selection {m} exceeds the {} features",
                    schema.features.len()
                ));
            }
        }
        if let Some(secret) = &config.attacks.attribute {
            match schema.feature(secret) {
                None => problems.push(format!("attribute attack: unknown feature `{secret}`")),
                Some(f) if f.kind != FeatureKind::Categorical => {
                    problems.push(format!("attribute attack: `{secret}` is numeric"))
                }
                _ => {}
            }
        }
        let smallest = config
            .subsample
            .map_or(data.len(), |s| s.min(data.len()));
        let anon_rows = (smallest as f64 * f[1]) as usize;
        if let Some(&k) = config.ks.iter().max() {
            if k > anon_rows {
                problems.push(format!(
                    "k = {k} exceeds the ~{anon_rows} rows available for anonymization"
                ));
            }
        }
    }
    if !problems.is_empty() {
        return Err(Error::Config(problems.join("; ")));
    }
    Ok(Prepared {
        config: config.clone(),
        data: data.expect("no problems"),
        qi: qi.expect("no problems"),
        seeds,
    })
}

struct Unit<'a> {
    seed: u64,
    learner: &'a str,
    k: usize,
}

fn verify_serialized(data: &Dataset, qi: &QuasiIdentifierSet, k: usize) -> Result<RunRecordParts> {
    let text = csv_string(data)?;
    let reloaded = read_csv(text.as_bytes(), data.schema())?.data;
    let verification = verify_k_anonymity(&reloaded, qi, k)?;
    if !verification.pass {
        return Err(anonkit_core::Error::VerificationFailed {
            k,
            min_group_size: verification.min_group_size,
        }
        .into());
    }
    let classes = equivalence_class_stats(&reloaded, qi)?;
    Ok(RunRecordParts {
        verification,
        classes,
    })
}

struct RunRecordParts {
    verification: anonkit_core::evaluation::KAnonymityReport,
    classes: anonkit_core::evaluation::EquivalenceClassStats,
}

struct Attacks {
    membership: Option<AttackResult>,
    attribute: Option<AttackResult>,
}

fn run_attacks(
    settings: &AttackSettings,
    seed: u64,
    target: &TrainedModel,
    members: &Dataset,
    non_members: &Dataset,
) -> Result<Attacks> {
    let membership = if settings.membership {
        let cfg = MembershipAttackConfig {
            attack_model: settings.membership_model.model(seed),
            sort_scores: settings.sort_scores,
            seed,
        };
        Some(membership_attack(target, members, non_members, &cfg)?)
    } else {
        None
    };
    let attribute = match &settings.attribute {
        Some(secret) => Some(attribute_attack(target, members, secret)?),
        None => None,
    };
    Ok(Attacks {
        membership,
        attribute,
    })
}

fn run_unit(p: &Prepared, unit: &Unit) -> Result<Vec<(Method, RunRecord)>> {
    let cfg = &p.config;
    let data = match cfg.subsample {
        Some(n) => subsample(&p.data, n, unit.seed),
        None => p.data.clone(),
    };
    let learner = learner_preset(unit.learner, unit.seed).expect("validated");
    let mut anonymization = AnonymizationConfig::new(unit.k, p.qi.clone());
    anonymization.label_source = cfg.label_source;
    anonymization.criterion = cfg.criterion;
    anonymization.seed = unit.seed;
    let pipeline = PipelineConfig {
        original: learner.clone(),
        retrain: learner.clone(),
        anonymization,
        fractions: cfg.fractions,
        seed: unit.seed,
        feature_selection: cfg.feature_selection,
    };

    let started = Instant::now();
    let result = anonymize_pipeline(&data, &pipeline)?;
    let features: Vec<&str> = result.features.iter().map(String::as_str).collect();
    let [train, anon_split, test] = &result.splits;
    let anon_input = anon_split.project(&features)?;
    let test_input = test.project(&features)?;
    let qi = p.qi.restrict_to(anon_input.schema())?;
    let before = run_attacks(&cfg.attacks, unit.seed, &result.original_model, train, test)?;
    let ag_elapsed = started.elapsed();

    let mut out = Vec::new();
    for &method in &cfg.methods {
        let started = Instant::now();
        let (anonymized, retrained, accuracy) = match method {
            Method::Ag => (
                result.anonymized.clone(),
                result.retrained_model.clone(),
                result.anonymized_accuracy,
            ),
            Method::Mondrian => {
                let anonymized = mondrian_anonymize(&anon_input, &qi, unit.k)?;
                let model = TrainedModel::fit(&learner, &anonymized, &features)?;
                let accuracy = model.accuracy(&test_input)?;
                (anonymized, model, accuracy)
            }
        };
        let parts = verify_serialized(&anonymized, &qi, unit.k)?;
        let after = run_attacks(&cfg.attacks, unit.seed, &retrained, &anon_input, &test_input)?;
        let mut elapsed = started.elapsed();
        if method == Method::Ag {
            elapsed += ag_elapsed;
        }
        out.push((
            method,
            RunRecord {
                seed: unit.seed,
                baseline_accuracy: result.baseline_accuracy,
                accuracy,
                verification: parts.verification,
                classes: parts.classes,
                membership_before: before.membership,
                membership_after: after.membership,
                attribute_before: before.attribute,
                attribute_after: after.attribute,
                elapsed_ms: cfg.timings.then_some(elapsed.as_millis() as u64),
            },
        ));
    }
    Ok(out)
}

/// Runs every cell of a prepared config on the current rayon pool.
pub fn run_prepared(p: &Prepared) -> Result<Vec<EvaluationReport>> {
    let cfg = &p.config;
    let mut units = Vec::new();
    for learner in &cfg.learners {
        for &k in &cfg.ks {
            for &seed in &p.seeds {
                units.push(Unit {
                    seed,
                    learner,
                    k,
                });
            }
        }
    }
    let results: Vec<Vec<(Method, RunRecord)>> = units
        .par_iter()
        .map(|u| run_unit(p, u))
        .collect::<Result<_>>()?;

    let mut reports = Vec::new();
    for learner in &cfg.learners {
        for &k in &cfg.ks {
            for &method in &cfg.methods {
                let runs: Vec<RunRecord> = units
                    .iter()
                    .zip(&results)
                    .filter(|(u, _)| u.learner == learner && u.k == k)
                    .flat_map(|(_, rs)| rs.iter().filter(|(m, _)| *m == method).map(|(_, r)| r.clone()))
                    .collect();
                let baseline: Vec<f64> = runs.iter().map(|r| r.baseline_accuracy).collect();
                let accuracy: Vec<f64> = runs.iter().map(|r| r.accuracy).collect();
                let preset = learner_preset(learner, 0).expect("validated");
                reports.push(EvaluationReport {
                    dataset: cfg.dataset.clone(),
                    learner: learner.clone(),
                    learner_kind: preset.kind(),
                    method,
                    k,
                    qi: p.qi.names().iter().map(|s| s.to_string()).collect(),
                    label_source: cfg.label_source,
                    feature_selection: cfg.feature_selection,
                    seeds: p.seeds.clone(),
                    baseline_accuracy: Summary::of(&baseline),
                    accuracy: Summary::of(&accuracy),
                    runs,
                });
            }
        }
    }
    reports.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    reports.dedup_by(|a, b| a.sort_key() == b.sort_key());
    Ok(reports)
}

pub fn run_experiment(config: &ExperimentConfig, base: &Path) -> Result<Vec<EvaluationReport>> {
    let prepared = prepare(config, base)?;
    crate::parallel::pool()?.install(|| run_prepared(&prepared))
}

/// Plot table: one row per report with the mean accuracy over seeds.
pub fn plot_csv(reports: &[EvaluationReport]) -> String {
    let mut out = String::from("method,k,accuracy,learner\n");
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.method.name(),
            r.k,
            r.accuracy.mean,
            r.learner
        ));
    }
    out
}
