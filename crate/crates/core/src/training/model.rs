use std::fmt;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::params::ModelParams;
use crate::data::{Dataset, NormalizerSpec};
use crate::error::{Error, Result};
use crate::permutation::{Permutation, PermutationState};
use crate::scalar::Scalar;
use crate::tree::LspTree;

pub const MODEL_FORMAT_VERSION: &str = "bacon-model/1";

/// Why an attempt's epoch loop ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    EpochBudget,
    PostFreezeBudget,
    VanishingGradient,
    ExplodingGradient,
    NonFinite,
}

/// Per-attempt diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttemptReport {
    pub attempt: usize,
    pub seed: u64,
    pub epochs: usize,
    pub stop: StopReason,
    pub freeze_epoch: Option<usize>,
    pub rejected_freezes: usize,
    pub best_loss: f64,
    pub accuracy: Option<f64>,
}

impl fmt::Display for AttemptReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "attempt {} (seed {}): {} epochs, stop {:?}, ", self.attempt, self.seed, self.epochs, self.stop)?;
        match self.freeze_epoch {
            Some(e) => write!(f, "frozen at epoch {e}")?,
            None => write!(f, "never frozen")?,
        }
        write!(f, ", {} rejected freezes, best loss {:.6}", self.rejected_freezes, self.best_loss)?;
        if let Some(a) = self.accuracy {
            write!(f, ", accuracy {a:.4}")?;
        }
        Ok(())
    }
}

/// Where the training rows came from, so the held-out split can be rebuilt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataProvenance {
    pub source: String,
    pub label: Option<String>,
    /// Label value treated as positive in one-vs-rest training.
    pub positive: Option<f64>,
    pub test_fraction: f64,
    pub split_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct TrainingMetadata {
    pub seed: u64,
    pub attempt: usize,
    pub epochs: usize,
    pub freeze_epoch: Option<usize>,
    pub final_loss: f64,
    pub train_accuracy: f64,
    pub threshold: f64,
    /// Number of deepest leaves removed after training.
    #[serde(default)]
    pub pruned: usize,
    #[serde(default)]
    pub attempts: Vec<AttemptReport>,
    #[serde(default)]
    pub data: Option<DataProvenance>,
}

/// Frozen parameters, the extracted chain, and how they were obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel<T> {
    params: ModelParams<T>,
    features: Vec<String>,
    tree: LspTree<T>,
    pub metadata: TrainingMetadata,
    pub normalizer: Option<NormalizerSpec>,
}

impl<T: Scalar> TrainedModel<T> {
    /// `features` are the dataset column names in input order.
    pub fn new(params: ModelParams<T>, features: Vec<String>, metadata: TrainingMetadata) -> Result<Self> {
        let tree = params.to_tree(&features)?.prune(metadata.pruned)?;
        Ok(Self { params, features, tree, metadata, normalizer: None })
    }

    pub fn params(&self) -> &ModelParams<T> {
        &self.params
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn tree(&self) -> &LspTree<T> {
        &self.tree
    }

    /// Same parameters with the `k` deepest leaves removed from the tree.
    pub fn pruned(&self, k: usize) -> Result<Self> {
        let mut metadata = self.metadata.clone();
        metadata.pruned = k;
        let tree = self.params.to_tree(&self.features)?.prune(k)?;
        Ok(Self { tree, metadata, ..self.clone() })
    }

    /// Scores for every row, matched to the tree by column name.
    pub fn predict(&self, data: &Dataset<T>) -> Result<Vec<T>> {
        let binding = self.tree.bind(data.names())?;
        Ok(data
            .rows()
            .rows()
            .into_iter()
            .map(|r| {
                let row = r.to_vec();
                self.tree.evaluate_bound(&row, &binding)
            })
            .collect())
    }

    /// Fraction of rows whose `score ≥ threshold` matches the label.
    pub fn accuracy(&self, data: &Dataset<T>, threshold: T) -> Result<f64> {
        let scores = self.predict(data)?;
        Ok(accuracy_of(&scores, data.labels(), threshold))
    }

    pub fn to_json(&self) -> Result<String> {
        let perm = &self.params.perm;
        let doc = ModelFile {
            version: MODEL_FORMAT_VERSION.to_string(),
            features: self.features.clone(),
            p_hard: perm.hard_assignment().expect("trained models are frozen").clone(),
            theta_w: self.params.theta_w.iter().map(|v| v.to_f64_lossy()).collect(),
            theta_a: self.params.theta_a.iter().map(|v| v.to_f64_lossy()).collect(),
            logits: perm.logits.rows().into_iter().map(|r| r.iter().map(|v| v.to_f64_lossy()).collect()).collect(),
            temperature: perm.temperature.to_f64_lossy(),
            noise: [perm.gumbel_scale, perm.min_noise, perm.max_noise].map(|v| v.to_f64_lossy()),
            metadata: self.metadata.clone(),
            normalizer: self.normalizer.clone(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let probe: serde_json::Value = serde_json::from_str(text)?;
        match probe.get("version").and_then(|v| v.as_str()) {
            Some(MODEL_FORMAT_VERSION) => {}
            Some(other) => {
                return Err(Error::Version { found: other.to_string(), expected: MODEL_FORMAT_VERSION.to_string() })
            }
            None => return Err(Error::Parse("model file lacks a version tag".into())),
        }
        let doc: ModelFile = serde_json::from_value(probe)?;
        let n = doc.features.len();
        if doc.logits.len() != n || doc.logits.iter().any(|r| r.len() != n) {
            return Err(Error::Parse(format!("logit matrix is not {n}x{n}")));
        }
        let flat: Vec<T> = doc.logits.iter().flatten().map(|&v| T::of(v)).collect();
        let logits = Array2::from_shape_vec((n, n), flat).map_err(|e| Error::Parse(e.to_string()))?;
        let [g, lo, hi] = doc.noise.map(T::of);
        let perm = PermutationState::from_parts(logits, T::of(doc.temperature), g, (lo, hi), Some(doc.p_hard))?;
        let params = ModelParams::new(
            perm,
            doc.theta_w.into_iter().map(T::of).collect(),
            doc.theta_a.into_iter().map(T::of).collect(),
        )?;
        let mut model = Self::new(params, doc.features, doc.metadata)?;
        model.normalizer = doc.normalizer;
        Ok(model)
    }
}

pub(crate) fn accuracy_of<T: Scalar>(scores: &[T], labels: &[bool], threshold: T) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    let hits = scores.iter().zip(labels).filter(|(&s, &l)| (s >= threshold) == l).count();
    hits as f64 / labels.len() as f64
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    version: String,
    features: Vec<String>,
    p_hard: Permutation,
    theta_w: Vec<f64>,
    theta_a: Vec<f64>,
    logits: Vec<Vec<f64>>,
    temperature: f64,
    /// Current, minimum and maximum Gumbel scale.
    noise: [f64; 3],
    metadata: TrainingMetadata,
    normalizer: Option<NormalizerSpec>,
}

pub fn save_model<T: Scalar>(model: &TrainedModel<T>, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, model.to_json()?)?;
    Ok(())
}

pub fn load_model<T: Scalar>(path: impl AsRef<Path>) -> Result<TrainedModel<T>> {
    TrainedModel::from_json(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permutation::PermutationConfig;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn model() -> TrainedModel<f64> {
        let cfg = PermutationConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut p: ModelParams<f64> = ModelParams::init(4, &cfg, 0.7, &mut rng).unwrap();
        let cand = Permutation::new(vec![3, 1, 0, 2]).unwrap();
        p.perm = p.perm.freeze(cand).unwrap();
        let names = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
        TrainedModel::new(p, names, TrainingMetadata { seed: 4, threshold: 0.5, final_loss: 0.1 / 3.0, ..Default::default() })
            .unwrap()
    }

    #[test]
    fn json_roundtrip_is_bitwise() {
        let m = model();
        let back = TrainedModel::<f64>::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back, m);
        for (a, b) in back.params().theta_w.iter().zip(&m.params().theta_w) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn file_roundtrip_reproduces_predictions() {
        let m = model();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        save_model(&m, &path).unwrap();
        let back: TrainedModel<f64> = load_model(&path).unwrap();
        let data = Dataset::new(
            m.features().to_vec(),
            ndarray::array![[0.1, 0.2, 0.3, 0.4], [0.9, 0.5, 0.7, 0.05]],
            vec![true, false],
            "mem",
        )
        .unwrap();
        assert_eq!(back.predict(&data).unwrap(), m.predict(&data).unwrap());
    }

    #[test]
    fn rejects_unknown_version_and_garbage() {
        let text = model().to_json().unwrap().replace(MODEL_FORMAT_VERSION, "bacon-model/99");
        assert!(matches!(TrainedModel::<f64>::from_json(&text), Err(Error::Version { .. })));
        assert!(TrainedModel::<f64>::from_json("{}").is_err());
        assert!(TrainedModel::<f64>::from_json("not json").is_err());
    }

    #[test]
    fn pruned_model_keeps_params() {
        let m = model();
        let p = m.pruned(2).unwrap();
        assert_eq!(p.params(), m.params());
        assert_eq!(p.tree().features(), &m.tree().features()[2..]);
        let back = TrainedModel::<f64>::from_json(&p.to_json().unwrap()).unwrap();
        assert_eq!(back.tree().len(), 2);
    }
}
