//! Training: balanced instances, classifier choice, floating feature
//! selection, feature weights and the per-mechanism measure.

mod instances;
mod select;

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use instances::{balance, build_instances, enumerate_instances, feature_names, featurize, Instance};
pub use select::{model_select, sfbs, stratified_folds, Criterion};

use crate::cascade::{CascadeState, Message};
use crate::engine::ActivationModel;
use crate::exec::{derive_seed, Executor};
use crate::features::{extract, Mechanism, FEATURE_COUNT, MECHANISM_OF};
use crate::graph::{NodeId, Topology};
use crate::learners::{Classifier, ClassifierKind, Hyper};
use crate::{Env, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnConfig {
    pub seed: u64,
    pub folds: usize,
    pub candidates: Vec<ClassifierKind>,
    pub hyper: Hyper,
    /// Upper bound on instances per class after balancing.
    pub max_per_class: Option<usize>,
}

impl Default for LearnConfig {
    fn default() -> Self {
        LearnConfig {
            seed: 0,
            folds: 10,
            candidates: ClassifierKind::ALL.to_vec(),
            hyper: Hyper::default(),
            max_per_class: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub folds: usize,
    pub instances: usize,
    /// CV accuracy of each candidate kind on the full feature set.
    pub candidate_accuracy: Vec<(ClassifierKind, f64)>,
    /// Best subset found for each target size, with its CV accuracy.
    pub subsets: Vec<SubsetScore>,
    pub cv_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetScore {
    pub size: usize,
    pub features: Vec<usize>,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub classifier: Classifier,
    /// Selected feature indices into the canonical 18, ascending.
    pub selected: Vec<usize>,
    pub feature_names: Vec<String>,
    /// Normalized weight of each selected feature, aligned with `selected`.
    pub weights: Vec<f64>,
    /// Proportions for CSM, TAM, SCM, EM.
    pub mechanism_measure: [f64; 4],
    pub provenance: Provenance,
}

impl TrainedModel {
    pub fn kind(&self) -> ClassifierKind {
        self.classifier.kind()
    }

    /// Checks the internal consistency of a deserialized model.
    pub fn validate(&self) -> Result<()> {
        if self.selected.is_empty() {
            return Err(Error::param("model selects no features"));
        }
        if let Some(&j) = self.selected.iter().find(|&&j| j >= FEATURE_COUNT) {
            return Err(Error::DimensionMismatch {
                expected: FEATURE_COUNT,
                got: j + 1,
            });
        }
        if self.classifier.dim() != self.selected.len() {
            return Err(Error::DimensionMismatch {
                expected: self.selected.len(),
                got: self.classifier.dim(),
            });
        }
        if self.weights.len() != self.selected.len() {
            return Err(Error::LengthMismatch {
                left: self.weights.len(),
                right: self.selected.len(),
            });
        }
        Ok(())
    }
}

impl<G: Topology + ?Sized> ActivationModel<G> for TrainedModel {
    fn activation_probability(
        &self,
        env: Env<'_, G>,
        state: &CascadeState,
        message: &Message,
        v: NodeId,
    ) -> Result<f64> {
        let x = extract(env, state, v, message)?.project(&self.selected);
        self.classifier.predict_proba(&x)
    }
}

/// Sums normalized feature weights per mechanism and renormalizes. `selected`
/// holds canonical feature indices aligned with `weights`.
pub fn mechanism_measure(weights: &[f64], selected: &[usize]) -> Result<[f64; 4]> {
    if weights.len() != selected.len() {
        return Err(Error::LengthMismatch {
            left: weights.len(),
            right: selected.len(),
        });
    }
    let mut w = [0.0; 4];
    for (&x, &j) in weights.iter().zip(selected) {
        let m: Mechanism = *MECHANISM_OF
            .get(j)
            .ok_or(Error::DimensionMismatch { expected: FEATURE_COUNT, got: j + 1 })?;
        w[m.index()] += x.max(0.0);
    }
    let total: f64 = w.iter().sum();
    if total > 0.0 {
        w.iter_mut().for_each(|x| *x /= total);
    }
    Ok(w)
}

const SELECT_TAG: u64 = 0x5E1;
const FINAL_TAG: u64 = 0xF1A;

/// End-to-end training on a history corpus.
pub fn learn<G: Topology + ?Sized>(
    env: Env<'_, G>,
    cfg: &LearnConfig,
    exec: &dyn Executor,
) -> Result<TrainedModel> {
    let (data, _) = build_instances(env, cfg.seed, cfg.max_per_class)?;
    let select_seed = derive_seed(cfg.seed, SELECT_TAG, 0);
    let (kind, candidate_accuracy) =
        model_select(&cfg.candidates, &data, &cfg.hyper, cfg.folds, select_seed, exec)?;
    let d = data.dim();
    let mut criterion = Criterion::new(&data, kind, cfg.hyper, cfg.folds, select_seed, exec)?;
    let mut subsets = Vec::new();
    for size in d.div_ceil(2)..=d {
        let features = sfbs(&mut criterion, size)?;
        let accuracy = criterion.score(&features)?;
        subsets.push(SubsetScore {
            size,
            features,
            accuracy,
        });
    }
    // Highest accuracy wins; the scan runs smallest first so ties keep the
    // smaller subset.
    let best = subsets
        .iter()
        .fold(&subsets[0], |b, s| if s.accuracy > b.accuracy { s } else { b })
        .clone();
    let fitted = data.select_features(&best.features);
    let classifier = Classifier::fit(kind, &fitted, &cfg.hyper, derive_seed(cfg.seed, FINAL_TAG, 0))?;
    let weights = classifier.feature_weights();
    let mechanism_measure = mechanism_measure(&weights, &best.features)?;
    Ok(TrainedModel {
        classifier,
        feature_names: best
            .features
            .iter()
            .map(|&j| data.feature_names[j].clone())
            .collect(),
        selected: best.features,
        weights,
        mechanism_measure,
        provenance: Provenance {
            seed: cfg.seed,
            folds: cfg.folds,
            instances: data.len(),
            candidate_accuracy,
            cv_accuracy: best.accuracy,
            subsets,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::idx;

    #[test]
    fn mechanism_measure_group_sums() {
        let sel = [idx::KEYW, idx::AVG_EXP_T, idx::SOCIAL_RE, idx::VER_STA];
        let w = mechanism_measure(&[4.786, 91.985, 2.897, 0.332], &sel).unwrap();
        let want = [0.04786, 0.91985, 0.02897, 0.00332];
        for (a, b) in w.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(mechanism_measure(&[1.0], &[idx::CONT_LEN]).unwrap(), [1.0, 0.0, 0.0, 0.0]);
        let u = mechanism_measure(&[0.25; 4], &sel).unwrap();
        assert_eq!(u, [0.25; 4]);
    }

    #[test]
    fn mechanism_measure_rejects_bad_input() {
        assert!(mechanism_measure(&[1.0, 2.0], &[0]).is_err());
        assert!(mechanism_measure(&[1.0], &[18]).is_err());
    }
}
