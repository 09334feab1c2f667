use anonkit_core::learners::{
    softmax, Activation, ClassificationModel, DecisionTree, ForestParams, LearnerConfig,
    MaxFeatures, Mlp, RandomForest, TreeParams, TrainedModel, argmax, bootstrap_indices,
};
use anonkit_core::presets::learner_preset;
use anonkit_core::rng::seeded;
use anonkit_core::tabular::{Dataset, EncodedMatrix, FeatureSpec, Record, Schema, Value};
use rand::Rng;

fn relative_error(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale < 1e-10 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn gradient_check(activation: Activation, hidden: &[usize], seed: u64) -> f64 {
    let mut rng = seeded(seed);
    let net = Mlp::initialize(2, 2, hidden, activation, 0.01, seed);
    let x: Vec<f64> = (0..16).map(|_| rng.random_range(-2.0..2.0)).collect();
    let y: Vec<u32> = (0..8).map(|_| rng.random_range(0..2)).collect();
    let (_, analytic) = net.loss_and_gradient(&x, &y);
    let base = net.parameters().to_vec();
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    let mut probe = net.clone();
    for i in 0..base.len() {
        let mut p = base.clone();
        p[i] = base[i] + h;
        probe.set_parameters(&p);
        let up = probe.loss_and_gradient(&x, &y).0;
        p[i] = base[i] - h;
        probe.set_parameters(&p);
        let down = probe.loss_and_gradient(&x, &y).0;
        worst = worst.max(relative_error(analytic[i], (up - down) / (2.0 * h)));
    }
    worst
}

#[test]
fn mlp_gradient_matches_central_differences() {
    for seed in 0..5 {
        assert!(gradient_check(Activation::Tanh, &[4], seed) <= 1e-4);
        assert!(gradient_check(Activation::Relu, &[4], seed) <= 1e-4);
        assert!(gradient_check(Activation::Tanh, &[3, 3], seed) <= 1e-4);
        assert!(gradient_check(Activation::Tanh, &[], seed) <= 1e-4);
    }
}

fn noisy_matrix(seed: u64, n: usize, n_cols: usize) -> (EncodedMatrix, Vec<u32>) {
    let mut rng = seeded(seed);
    let mut values = Vec::with_capacity(n * n_cols);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let row: Vec<f64> = (0..n_cols).map(|_| rng.random_range(-1.0..1.0)).collect();
        let class = if row[0] + 0.5 * row[1] > 0.0 { 1 } else { 0 };
        y.push(if rng.random_bool(0.15) { rng.random_range(0..3) } else { class });
        values.extend(row);
    }
    (EncodedMatrix::from_raw(values, n_cols).unwrap(), y)
}

#[test]
fn probabilities_sum_to_one() {
    let (x, y) = noisy_matrix(3, 400, 4);
    let tree = learner_preset("dt-full", 1).unwrap();
    let mut forest = learner_preset("rf", 2).unwrap();
    if let LearnerConfig::RandomForest(p) = &mut forest {
        p.tree_count = 25;
    }
    let lr = learner_preset("lr", 3).unwrap();
    let models: Vec<ClassificationModel> = [tree, forest, lr]
        .iter()
        .map(|c| ClassificationModel::fit(c, &x, &y, 3).unwrap())
        .collect();
    let mut rng = seeded(99);
    for _ in 0..10_000 {
        let q: Vec<f64> = (0..4).map(|_| rng.random_range(-3.0..3.0)).collect();
        for m in &models {
            let s = m.scores_row(&q);
            assert_eq!(s.len(), 3);
            assert!((s.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
            assert!(s.iter().all(|p| (0.0..=1.0).contains(p)));
        }
    }
}

#[test]
fn one_tree_forest_equals_tree_on_its_bootstrap() {
    let (x, y) = noisy_matrix(5, 200, 3);
    let params = ForestParams {
        tree_count: 1,
        max_features: MaxFeatures::All,
        seed: 17,
        ..ForestParams::default()
    };
    let forest = RandomForest::fit(&params, x.values(), 3, &y, 3);
    let tree_seed = RandomForest::tree_seed(17, 0);
    let samples = bootstrap_indices(anonkit_core::rng::derive_seed(tree_seed, 0), 200);
    let tree_params = TreeParams {
        seed: anonkit_core::rng::derive_seed(tree_seed, 1),
        ..TreeParams::default()
    };
    let tree = DecisionTree::fit(&tree_params, x.values(), 3, &y, 3, &samples);
    assert_eq!(forest.trees()[0], tree);
    for row in x.rows() {
        assert_eq!(forest.predict_proba_row(row), tree.predict_proba_row(row));
    }
}

#[test]
fn fitting_is_deterministic() {
    let (x, y) = noisy_matrix(8, 300, 4);
    for name in ["dt", "rf", "lr", "nn"] {
        let mut cfg = learner_preset(name, 4).unwrap();
        if let LearnerConfig::Mlp(p) = &mut cfg {
            p.epochs = 20;
        }
        let a = ClassificationModel::fit(&cfg, &x, &y, 3).unwrap();
        let b = ClassificationModel::fit(&cfg, &x, &y, 3).unwrap();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn mlp_logit_argmax_matches_softmax_argmax() {
    let (x, y) = noisy_matrix(9, 300, 4);
    let mut cfg = learner_preset("nn", 1).unwrap();
    if let LearnerConfig::Mlp(p) = &mut cfg {
        p.epochs = 30;
    }
    let m = ClassificationModel::fit(&cfg, &x, &y, 3).unwrap();
    for row in x.rows() {
        let logits = m.scores_row(row);
        assert_eq!(argmax(&logits), argmax(&softmax(&logits)));
    }
}

fn small_dataset() -> Dataset {
    let schema = Schema::new(
        vec![
            FeatureSpec::numeric("age"),
            FeatureSpec::categorical("color", ["red", "green", "blue"]),
        ],
        "y",
        vec!["no".into(), "yes".into()],
    )
    .unwrap();
    let mut rng = seeded(1);
    let records = (0..120)
        .map(|i| {
            let age = rng.random_range(18..80) as f64;
            let color = rng.random_range(0..3);
            Record {
                id: i,
                values: vec![Value::Numeric(age), Value::Category(color)],
                label: (age > 45.0 || color == 2) as u32,
            }
        })
        .collect();
    Dataset::new(schema, records).unwrap()
}

#[test]
fn model_json_round_trip_is_exact() {
    let data = small_dataset();
    for name in ["dt", "rf", "lr", "nn"] {
        let mut cfg = learner_preset(name, 2).unwrap();
        if let LearnerConfig::Mlp(p) = &mut cfg {
            p.epochs = 10;
        }
        let model = TrainedModel::fit(&cfg, &data, &["age", "color"]).unwrap();
        let text = serde_json::to_string(&model).unwrap();
        let back: TrainedModel = serde_json::from_str(&text).unwrap();
        assert_eq!(back, model, "{name}");
        assert_eq!(
            back.predict_scores(&data).unwrap(),
            model.predict_scores(&data).unwrap()
        );
    }
}

#[test]
fn tree_learns_the_rule() {
    let data = small_dataset();
    let cfg = learner_preset("dt-full", 0).unwrap();
    let model = TrainedModel::fit(&cfg, &data, &["age", "color"]).unwrap();
    assert_eq!(model.accuracy(&data).unwrap(), 1.0);
}
