use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::schema::FeatureSchema;
use super::GbmError;
use crate::claims::ClaimRecord;

/// Row-major feature matrix with 0/1 labels and claim ids.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
    pub ids: Vec<String>,
}

impl LabeledDataset {
    pub fn new(
        features: Vec<Vec<f64>>,
        labels: Vec<u8>,
        ids: Vec<String>,
    ) -> Result<Self, GbmError> {
        if features.len() != labels.len() || ids.len() != labels.len() {
            return Err(GbmError::Domain(format!(
                "dataset columns differ in length: {} rows, {} labels, {} ids",
                features.len(),
                labels.len(),
                ids.len()
            )));
        }
        if let Some(i) = labels.iter().position(|l| *l > 1) {
            return Err(GbmError::Domain(format!(
                "label at row {i} is {}, not 0 or 1",
                labels[i]
            )));
        }
        if let Some(arity) = features.first().map(Vec::len) {
            if let Some(i) = features.iter().position(|r| r.len() != arity) {
                return Err(GbmError::Arity {
                    expected: arity,
                    got: features[i].len(),
                });
            }
        }
        Ok(Self {
            features,
            labels,
            ids,
        })
    }

    /// Encodes the labeled claims; claims with unknown fraud status are skipped.
    pub fn from_claims(
        schema: &FeatureSchema,
        claims: &[ClaimRecord],
        flags: Option<&BTreeMap<String, Vec<String>>>,
    ) -> Result<Self, GbmError> {
        let mut ds = Self {
            features: Vec::new(),
            labels: Vec::new(),
            ids: Vec::new(),
        };
        let empty = Vec::new();
        for c in claims {
            let Some(label) = c.fraud_status.label() else {
                continue;
            };
            let fired = flags.map(|m| m.get(&c.claim_id).unwrap_or(&empty).as_slice());
            ds.features.push(schema.encode(c, fired)?);
            ds.labels.push(label);
            ds.ids.push(c.claim_id.clone());
        }
        Ok(ds)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn arity(&self) -> usize {
        self.features.first().map_or(0, Vec::len)
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|l| **l == 1).count()
    }

    pub fn subset(&self, rows: &[usize]) -> Self {
        Self {
            features: rows.iter().map(|&i| self.features[i].clone()).collect(),
            labels: rows.iter().map(|&i| self.labels[i]).collect(),
            ids: rows.iter().map(|&i| self.ids[i].clone()).collect(),
        }
    }
}

/// Stratified split. The train size is `round(fraction · n)`; per-class
/// quotas use largest-remainder allocation so each class lands within one row
/// of its exact share. Rows keep their original order in both parts.
pub fn train_test_split(
    ds: &LabeledDataset,
    train_fraction: f64,
    seed: u64,
) -> Result<(LabeledDataset, LabeledDataset), GbmError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(GbmError::Usage(format!(
            "train fraction must lie strictly between 0 and 1, got {train_fraction}"
        )));
    }
    let mut classes: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (i, &l) in ds.labels.iter().enumerate() {
        classes[l as usize].push(i);
    }
    let total = (train_fraction * ds.len() as f64).round() as usize;
    let exact: Vec<f64> = classes
        .iter()
        .map(|c| train_fraction * c.len() as f64)
        .collect();
    let mut quota: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let mut order = [0usize, 1];
    order.sort_by(|&a, &b| {
        let fa = exact[a] - exact[a].floor();
        let fb = exact[b] - exact[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    let mut left = total.saturating_sub(quota.iter().sum());
    for &c in order.iter().cycle().take(4) {
        if left == 0 {
            break;
        }
        if quota[c] < classes[c].len() {
            quota[c] += 1;
            left -= 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::with_capacity(total);
    let mut test = Vec::with_capacity(ds.len() - total);
    for (c, rows) in classes.iter_mut().enumerate() {
        rows.shuffle(&mut rng);
        train.extend_from_slice(&rows[..quota[c]]);
        test.extend_from_slice(&rows[quota[c]..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((ds.subset(&train), ds.subset(&test)))
}
