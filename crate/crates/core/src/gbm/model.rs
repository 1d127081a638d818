use serde::{Deserialize, Serialize};

use super::dataset::LabeledDataset;
use super::schema::FeatureSchema;
use super::tree::{grow, Columns, Node};
use super::GbmError;
use crate::claims::ClaimRecord;

pub const MODEL_FORMAT: &str = "claimlens-model";
pub const MODEL_VERSION: u32 = 1;

const BASE_RATE_CLAMP: f64 = 1e-6;
const PROBA_CLAMP: f64 = 1e-15;
const HESSIAN_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    pub n_trees: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub min_leaf: usize,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: 3,
            learning_rate: 0.1,
            min_leaf: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostedModel {
    pub format: String,
    pub version: u32,
    pub schema: FeatureSchema,
    pub hyperparameters: Hyperparameters,
    /// Log-odds of the clamped training base rate.
    pub initial_score: f64,
    pub learning_rate: f64,
    pub trees: Vec<Node>,
    /// Mean training logistic loss before the first stage and after each stage.
    pub training_loss: Vec<f64>,
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Logistic loss of raw score `f` for label `y`.
pub fn log_loss(y: u8, f: f64) -> f64 {
    if y == 1 {
        softplus(-f)
    } else {
        softplus(f)
    }
}

fn check_finite(ds: &LabeledDataset, schema: &FeatureSchema) -> Result<(), GbmError> {
    for (r, row) in ds.features.iter().enumerate() {
        if row.len() != schema.arity() {
            return Err(GbmError::Arity {
                expected: schema.arity(),
                got: row.len(),
            });
        }
        if let Some(c) = row.iter().position(|v| !v.is_finite()) {
            return Err(GbmError::NonFinite {
                row: r,
                id: ds.ids[r].clone(),
                column: schema.features[c].name.clone(),
            });
        }
    }
    Ok(())
}

/// Fits a boosted ensemble of regression trees under logistic loss.
pub fn fit_gbm(
    train: &LabeledDataset,
    schema: &FeatureSchema,
    hp: Hyperparameters,
) -> Result<BoostedModel, GbmError> {
    if train.is_empty() {
        return Err(GbmError::Domain("cannot train on an empty dataset".into()));
    }
    if !(hp.learning_rate > 0.0 && hp.learning_rate <= 1.0) {
        return Err(GbmError::Usage(format!(
            "learning rate must lie in (0, 1], got {}",
            hp.learning_rate
        )));
    }
    if hp.min_leaf == 0 {
        return Err(GbmError::Usage("min_leaf must be at least 1".into()));
    }
    check_finite(train, schema)?;

    let n = train.len();
    let y = &train.labels;
    let positives = train.positives();
    let base = (positives as f64 / n as f64).clamp(BASE_RATE_CLAMP, 1.0 - BASE_RATE_CLAMP);
    let initial_score = (base / (1.0 - base)).ln();
    let lr = hp.learning_rate;

    let mut f = vec![initial_score; n];
    let mean_loss = |f: &[f64]| {
        f.iter()
            .zip(y)
            .map(|(&fi, &yi)| log_loss(yi, fi))
            .sum::<f64>()
            / n as f64
    };
    let mut training_loss = vec![mean_loss(&f)];
    let mut trees = Vec::new();

    // With a single class the gradient carries no signal; keep the prior.
    let degenerate = positives == 0 || positives == n;
    if !degenerate {
        let cols = Columns::new(&train.features, schema.arity());
        let mut residuals = vec![0.0; n];
        let mut hessians = vec![0.0; n];
        for _ in 0..hp.n_trees {
            for i in 0..n {
                let p = sigmoid(f[i]);
                residuals[i] = y[i] as f64 - p;
                hessians[i] = p * (1.0 - p);
            }
            let (assign, build) = grow(&cols, &residuals, hp.max_depth, hp.min_leaf);
            let slots = assign.iter().max().map_or(1, |m| m + 1);
            let mut sum_r = vec![0.0; slots];
            let mut sum_h = vec![0.0; slots];
            let mut members: Vec<Vec<usize>> = vec![Vec::new(); slots];
            for (i, &s) in assign.iter().enumerate() {
                sum_r[s] += residuals[i];
                sum_h[s] += hessians[i];
                members[s].push(i);
            }
            // Newton step per leaf, halved until the leaf's loss does not rise.
            let mut values = vec![0.0; slots];
            for s in 0..slots {
                if members[s].is_empty() {
                    continue;
                }
                let leaf_loss = |v: f64| {
                    members[s]
                        .iter()
                        .map(|&i| log_loss(y[i], f[i] + lr * v))
                        .sum::<f64>()
                };
                let before = leaf_loss(0.0);
                let mut v = sum_r[s] / sum_h[s].max(HESSIAN_FLOOR);
                let mut halvings = 0;
                while leaf_loss(v) > before {
                    v /= 2.0;
                    halvings += 1;
                    if halvings > 60 {
                        v = 0.0;
                        break;
                    }
                }
                values[s] = v;
            }
            for (i, &s) in assign.iter().enumerate() {
                f[i] += lr * values[s];
            }
            trees.push(build(&|s| values[s]));
            training_loss.push(mean_loss(&f));
        }
    }

    Ok(BoostedModel {
        format: MODEL_FORMAT.to_string(),
        version: MODEL_VERSION,
        schema: schema.clone(),
        hyperparameters: hp,
        initial_score,
        learning_rate: lr,
        trees,
        training_loss,
    })
}

impl BoostedModel {
    pub fn raw_score(&self, x: &[f64]) -> f64 {
        self.initial_score
            + self.learning_rate * self.trees.iter().map(|t| t.predict(x)).sum::<f64>()
    }

    /// Fraud probability for an encoded feature vector, clamped inside (0, 1).
    pub fn predict_features(&self, x: &[f64]) -> Result<f64, GbmError> {
        if x.len() != self.schema.arity() {
            return Err(GbmError::Arity {
                expected: self.schema.arity(),
                got: x.len(),
            });
        }
        Ok(sigmoid(self.raw_score(x)).clamp(PROBA_CLAMP, 1.0 - PROBA_CLAMP))
    }

    pub fn predict_claim(
        &self,
        claim: &ClaimRecord,
        fired: Option<&[String]>,
    ) -> Result<f64, GbmError> {
        self.predict_features(&self.schema.encode(claim, fired)?)
    }

    pub fn predict_dataset(&self, ds: &LabeledDataset) -> Result<Vec<f64>, GbmError> {
        ds.features
            .iter()
            .map(|x| self.predict_features(x))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, GbmError> {
        let model: BoostedModel =
            serde_json::from_str(text).map_err(|e| GbmError::Model(e.to_string()))?;
        if model.format != MODEL_FORMAT {
            return Err(GbmError::Model(format!(
                "not a model file: format tag is {:?}",
                model.format
            )));
        }
        if model.version != MODEL_VERSION {
            return Err(GbmError::Model(format!(
                "unsupported model version {}",
                model.version
            )));
        }
        let arity = model.schema.arity();
        for (i, t) in model.trees.iter().enumerate() {
            if t.max_feature().is_some_and(|f| f >= arity) {
                return Err(GbmError::Model(format!(
                    "tree {i} references a feature beyond the schema"
                )));
            }
        }
        Ok(model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::claims::ClaimField;
    use crate::gbm::schema::{Feature, FeatureKind};

    fn one_feature_schema() -> FeatureSchema {
        FeatureSchema {
            features: vec![Feature {
                name: "x".into(),
                kind: FeatureKind::Numeric {
                    field: ClaimField::BilledAmount,
                },
            }],
        }
    }

    fn dataset(xs: &[f64], ys: &[u8]) -> LabeledDataset {
        LabeledDataset::new(
            xs.iter().map(|&x| vec![x]).collect(),
            ys.to_vec(),
            (0..xs.len()).map(|i| format!("r{i}")).collect(),
        )
        .unwrap()
    }

    #[test]
    fn sigmoid_and_loss_are_stable() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(sigmoid(-800.0) >= 0.0);
        assert!(log_loss(1, -800.0).is_finite());
        assert!((log_loss(1, 0.0) - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn constant_labels_give_base_rate() {
        let ds = dataset(&[1.0, 2.0, 3.0], &[1, 1, 1]);
        let m = fit_gbm(&ds, &one_feature_schema(), Hyperparameters::default()).unwrap();
        assert!(m.trees.is_empty());
        for x in [-5.0, 2.0, 100.0] {
            let p = m.predict_features(&[x]).unwrap();
            assert!((p - (1.0 - 1e-6)).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_trees_is_the_prior() {
        let ds = dataset(&[1.0, 2.0, 3.0, 4.0], &[1, 0, 0, 0]);
        let hp = Hyperparameters {
            n_trees: 0,
            ..Hyperparameters::default()
        };
        let m = fit_gbm(&ds, &one_feature_schema(), hp).unwrap();
        assert!((m.predict_features(&[9.0]).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn constant_zero_score_is_half() {
        let ds = dataset(&[1.0, 2.0], &[1, 0]);
        let hp = Hyperparameters {
            n_trees: 0,
            ..Hyperparameters::default()
        };
        let m = fit_gbm(&ds, &one_feature_schema(), hp).unwrap();
        assert_eq!(m.initial_score, 0.0);
        assert_eq!(m.predict_features(&[0.0]).unwrap(), 0.5);
    }

    #[test]
    fn separable_fit() {
        let xs: Vec<f64> = (0..200).map(|i| -1.0 + i as f64 / 100.0).collect();
        let ys: Vec<u8> = xs.iter().map(|&x| (x > 0.0) as u8).collect();
        let m = fit_gbm(
            &dataset(&xs, &ys),
            &one_feature_schema(),
            Hyperparameters::default(),
        )
        .unwrap();
        assert_eq!(m.trees.len(), 100);
        assert!(m.predict_features(&[0.5]).unwrap() > 0.9);
        assert!(m.predict_features(&[-0.5]).unwrap() < 0.1);
        for w in m.training_loss.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
        assert!(m.trees.iter().all(|t| t.depth() <= 3));
    }

    #[test]
    fn non_finite_feature_names_row_and_column() {
        let ds = dataset(&[1.0, f64::NAN], &[1, 0]);
        match fit_gbm(&ds, &one_feature_schema(), Hyperparameters::default()) {
            Err(GbmError::NonFinite { row, column, .. }) => {
                assert_eq!(row, 1);
                assert_eq!(column, "x");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn json_round_trip_is_bitwise() {
        let xs: Vec<f64> = (0..120).map(|i| ((i * 37) % 101) as f64 / 7.3).collect();
        let ys: Vec<u8> = xs.iter().map(|&x| (x.sin() > 0.2) as u8).collect();
        let hp = Hyperparameters {
            n_trees: 15,
            min_leaf: 5,
            ..Hyperparameters::default()
        };
        let m = fit_gbm(&dataset(&xs, &ys), &one_feature_schema(), hp).unwrap();
        let back = BoostedModel::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        for x in xs.iter().chain(&[-1e300, 0.123456789, f64::MIN]) {
            assert_eq!(
                m.predict_features(&[*x]).unwrap().to_bits(),
                back.predict_features(&[*x]).unwrap().to_bits()
            );
        }
        assert!(BoostedModel::from_json("{\"format\":\"other\"}").is_err());
    }
}
