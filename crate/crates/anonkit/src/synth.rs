//! Synthetic stand-ins for the Adult census and Nursery datasets.
//!
//! Both use the original column names and category lists, so QI presets and
//! configs written for the real files apply unchanged. Values are drawn from
//! hand-picked marginals with a few realistic dependencies (age drives
//! marital status, marital status and sex drive relationship, education
//! drives occupation). The Adult income label is sampled from a logistic
//! model, about a quarter of rows are positive. The Nursery table is the full
//! 12960-row product of its feature domains, labelled by a fixed rule.

use anonkit_core::rng::seeded;
use anonkit_core::tabular::{Dataset, FeatureSpec, Record, Schema, Value};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{LogNormal, Normal};

pub const ADULT_ROWS: usize = 48842;

/// Sharpens the income model so a tree reaches census-like accuracy.
const LOGIT_SCALE: f64 = 2.0;

pub const WORKCLASS: &[&str] = &[
    "Private",
    "Self-emp-not-inc",
    "Self-emp-inc",
    "Federal-gov",
    "Local-gov",
    "State-gov",
    "Without-pay",
    "Never-worked",
];
pub const MARITAL_STATUS: &[&str] = &[
    "Married-civ-spouse",
    "Divorced",
    "Never-married",
    "Separated",
    "Widowed",
    "Married-spouse-absent",
    "Married-AF-spouse",
];
pub const OCCUPATION: &[&str] = &[
    "Tech-support",
    "Craft-repair",
    "Other-service",
    "Sales",
    "Exec-managerial",
    "Prof-specialty",
    "Handlers-cleaners",
    "Machine-op-inspct",
    "Adm-clerical",
    "Farming-fishing",
    "Transport-moving",
    "Priv-house-serv",
    "Protective-serv",
    "Armed-Forces",
];
pub const RELATIONSHIP: &[&str] = &[
    "Wife",
    "Own-child",
    "Husband",
    "Not-in-family",
    "Other-relative",
    "Unmarried",
];
pub const RACE: &[&str] = &[
    "White",
    "Asian-Pac-Islander",
    "Amer-Indian-Eskimo",
    "Other",
    "Black",
];
pub const SEX: &[&str] = &["Female", "Male"];
pub const NATIVE_COUNTRY: &[&str] = &[
    "United-States",
    "Cambodia",
    "England",
    "Puerto-Rico",
    "Canada",
    "Germany",
    "Outlying-US(Guam-USVI-etc)",
    "India",
    "Japan",
    "Greece",
    "South",
    "China",
    "Cuba",
    "Iran",
    "Honduras",
    "Philippines",
    "Italy",
    "Poland",
    "Jamaica",
    "Vietnam",
    "Mexico",
    "Portugal",
    "Ireland",
    "France",
    "Dominican-Republic",
    "Laos",
    "Ecuador",
    "Taiwan",
    "Haiti",
    "Columbia",
    "Hungary",
    "Guatemala",
    "Nicaragua",
    "Scotland",
    "Thailand",
    "Yugoslavia",
    "El-Salvador",
    "Trinadad&Tobago",
    "Peru",
    "Hong",
    "Holand-Netherlands",
];

pub fn adult_schema() -> Schema {
    Schema::new(
        vec![
            FeatureSpec::numeric("age"),
            FeatureSpec::categorical("workclass", WORKCLASS.iter().copied()),
            FeatureSpec::numeric("education-num"),
            FeatureSpec::categorical("marital-status", MARITAL_STATUS.iter().copied()),
            FeatureSpec::categorical("occupation", OCCUPATION.iter().copied()),
            FeatureSpec::categorical("relationship", RELATIONSHIP.iter().copied()),
            FeatureSpec::categorical("race", RACE.iter().copied()),
            FeatureSpec::categorical("sex", SEX.iter().copied()),
            FeatureSpec::numeric("capital-gain"),
            FeatureSpec::numeric("capital-loss"),
            FeatureSpec::numeric("hours-per-week"),
            FeatureSpec::categorical("native-country", NATIVE_COUNTRY.iter().copied()),
        ],
        "income",
        vec!["<=50K".into(), ">50K".into()],
    )
    .expect("adult schema is valid")
}

fn pick(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    WeightedIndex::new(weights).expect("positive weights").sample(rng)
}

struct AdultRow {
    values: Vec<Value>,
    logit: f64,
}

fn adult_row(rng: &mut ChaCha8Rng) -> AdultRow {
    let age_dist = LogNormal::<f64>::new(3.55, 0.33).expect("valid");
    let age = age_dist.sample(rng).round().clamp(17.0, 90.0);
    let sex = pick(rng, &[0.33, 0.67]);
    let edu = [
        0.002, 0.005, 0.01, 0.02, 0.016, 0.028, 0.037, 0.013, 0.323, 0.222, 0.042, 0.033, 0.164,
        0.054, 0.017, 0.012,
    ];
    let education = (pick(rng, &edu) + 1) as f64;

    let married_w = if age < 23.0 {
        [0.06, 0.01, 0.9, 0.01, 0.0, 0.01, 0.01]
    } else if age < 30.0 {
        [0.35, 0.07, 0.52, 0.03, 0.0, 0.02, 0.01]
    } else if age < 60.0 {
        [0.55, 0.2, 0.14, 0.04, 0.03, 0.015, 0.005]
    } else {
        [0.55, 0.12, 0.05, 0.02, 0.24, 0.015, 0.005]
    };
    let marital = pick(rng, &married_w);
    let married = marital == 0 || marital == 6;

    let relationship = if married {
        if rng.random_bool(0.93) {
            if sex == 1 { 2 } else { 0 }
        } else {
            4
        }
    } else if marital == 2 && age < 26.0 {
        pick(rng, &[0.0, 0.62, 0.0, 0.3, 0.05, 0.03])
    } else {
        pick(rng, &[0.0, 0.08, 0.0, 0.55, 0.05, 0.32])
    };

    let occ_w: [f64; 14] = if education >= 13.0 {
        [0.04, 0.04, 0.04, 0.12, 0.24, 0.38, 0.005, 0.01, 0.08, 0.01, 0.01, 0.002, 0.02, 0.001]
    } else if education >= 9.0 {
        [0.03, 0.16, 0.11, 0.12, 0.1, 0.05, 0.05, 0.07, 0.15, 0.03, 0.06, 0.004, 0.02, 0.001]
    } else {
        [0.01, 0.18, 0.22, 0.07, 0.03, 0.01, 0.1, 0.14, 0.05, 0.08, 0.07, 0.03, 0.01, 0.001]
    };
    let occupation = pick(rng, &occ_w);
    let workclass = pick(rng, &[0.7, 0.08, 0.035, 0.03, 0.065, 0.04, 0.0005, 0.0002]);
    let race = pick(rng, &[0.855, 0.031, 0.01, 0.008, 0.096]);
    let country = if rng.random_bool(0.9) {
        0
    } else {
        rng.random_range(1..NATIVE_COUNTRY.len())
    };

    let hours_noise: f64 = Normal::new(0.0, 11.0).expect("valid").sample(rng);
    let hours = (40.0 + if married && sex == 1 { 4.0 } else { 0.0 } + hours_noise)
        .round()
        .clamp(1.0, 99.0);
    let gain = if rng.random_bool(0.083) {
        let g: f64 = LogNormal::new(8.4, 1.0).expect("valid").sample(rng);
        g.round().min(99999.0)
    } else {
        0.0
    };
    let loss = if gain == 0.0 && rng.random_bool(0.047) {
        (1600.0 + Normal::<f64>::new(300.0, 350.0).expect("valid").sample(rng)).round().clamp(155.0, 4356.0)
    } else {
        0.0
    };

    let occupation_effect = [0.4, 0.0, -0.9, 0.25, 0.85, 0.75, -0.7, -0.3, -0.2, -0.7, -0.1, -1.5, 0.3, 0.0];
    let workclass_effect = [0.0, -0.1, 0.6, 0.45, 0.1, 0.0, -1.0, -1.0];
    let mut logit = -3.2
        + if married { 2.3 } else { 0.0 }
        + 0.34 * (education - 10.0)
        + 0.045 * (age.min(55.0) - 38.0)
        - 0.03 * (age - 60.0).max(0.0)
        + occupation_effect[occupation]
        + workclass_effect[workclass]
        + 0.03 * (hours - 40.0)
        + if sex == 1 { 0.2 } else { 0.0 };
    if gain > 7000.0 {
        logit += 4.0;
    } else if gain > 0.0 {
        logit += 0.3;
    }
    if loss > 1800.0 {
        logit += 1.3;
    }

    AdultRow {
        values: vec![
            Value::Numeric(age),
            Value::Category(workclass as u32),
            Value::Numeric(education),
            Value::Category(marital as u32),
            Value::Category(occupation as u32),
            Value::Category(relationship as u32),
            Value::Category(race as u32),
            Value::Category(sex as u32),
            Value::Numeric(gain),
            Value::Numeric(loss),
            Value::Numeric(hours),
            Value::Category(country as u32),
        ],
        logit,
    }
}

/// `rows` Adult-like records with ids `0..rows`.
pub fn adult(rows: usize, seed: u64) -> Dataset {
    let mut rng = seeded(seed);
    let records = (0..rows)
        .map(|i| {
            let row = adult_row(&mut rng);
            let p = 1.0 / (1.0 + (-LOGIT_SCALE * row.logit).exp());
            Record {
                id: i as u64,
                values: row.values,
                label: rng.random_bool(p) as u32,
            }
        })
        .collect();
    Dataset::new(adult_schema(), records).expect("generated rows are valid")
}

pub const NURSERY_ROWS: usize = 12960;

const NURSERY_FEATURES: &[(&str, &[&str])] = &[
    ("parents", &["usual", "pretentious", "great_pret"]),
    (
        "has_nurs",
        &["proper", "less_proper", "improper", "critical", "very_crit"],
    ),
    ("form", &["complete", "completed", "incomplete", "foster"]),
    ("children", &["1", "2", "3", "more"]),
    ("housing", &["convenient", "less_conv", "critical"]),
    ("finance", &["convenient", "inconv"]),
    ("social", &["nonprob", "slightly_prob", "problematic"]),
    ("health", &["recommended", "priority", "not_recom"]),
];

pub const NURSERY_CLASSES: &[&str] = &[
    "not_recom",
    "recommend",
    "very_recom",
    "priority",
    "spec_prior",
];

pub fn nursery_schema() -> Schema {
    Schema::new(
        NURSERY_FEATURES
            .iter()
            .map(|(name, cats)| FeatureSpec::categorical(*name, cats.iter().copied()))
            .collect(),
        "class",
        NURSERY_CLASSES.iter().map(|c| c.to_string()).collect(),
    )
    .expect("nursery schema is valid")
}

fn nursery_class(v: &[u32]) -> u32 {
    let [parents, has_nurs, form, children, housing, finance, social, health] =
        [v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]].map(f64::from);
    if health == 2.0 {
        return 0;
    }
    let score = parents
        + 0.75 * has_nurs
        + 0.5 * form
        + 0.5 * children.min(2.0)
        + 0.75 * housing
        + finance
        + 2.0 * social
        + 2.5 * health;
    if score == 0.0 {
        1
    } else if score <= 1.5 {
        2
    } else if score <= 5.0 {
        3
    } else {
        4
    }
}

/// Every combination of the Nursery feature values, in lexicographic order,
/// with ids `0..12960`.
pub fn nursery() -> Dataset {
    let sizes: Vec<u32> = NURSERY_FEATURES.iter().map(|(_, c)| c.len() as u32).collect();
    let mut records = Vec::with_capacity(NURSERY_ROWS);
    let mut digits = vec![0u32; sizes.len()];
    for id in 0..NURSERY_ROWS as u64 {
        records.push(Record {
            id,
            values: digits.iter().map(|&d| Value::Category(d)).collect(),
            label: nursery_class(&digits),
        });
        for j in (0..digits.len()).rev() {
            digits[j] += 1;
            if digits[j] < sizes[j] {
                break;
            }
            digits[j] = 0;
        }
    }
    Dataset::new(nursery_schema(), records).expect("generated rows are valid")
}

/// Named generator: `adult` (seeded, `rows` default 48842) or `nursery`.
pub fn generate(name: &str, rows: Option<usize>, seed: u64) -> Option<Dataset> {
    match name {
        "adult" => Some(adult(rows.unwrap_or(ADULT_ROWS), seed)),
        "nursery" => Some(nursery()),
        _ => None,
    }
}
