//! Evaluation protocols: final contagion states, states along the cascade
//! process, final size, and cross-validated spreading-behavior estimation.
//!
//! Cascades are processed in parallel; each one draws from a stream derived
//! from the root seed and its corpus index, and results are collected in
//! corpus order, so output is independent of the worker count.

use fscale_core::baselines::{cascade_features, observe_for_size, CgCPred, LrcqModel};
use fscale_core::engine::{run, SimConfig};
use fscale_core::exec::derive_seed;
use fscale_core::features::{Mechanism, FEATURE_COUNT, MECHANISM_OF};
use fscale_core::learners::{Classifier, ClassifierKind, Dataset, Hyper};
use fscale_core::metrics::{node_accuracy, relative_precision, Confusion};
use fscale_core::pipeline::{build_instances, featurize, stratified_folds, TrainedModel};
use fscale_core::{ActivationModel, Cascade, CascadeState, Sequential};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::io::DataSet;

const HOUR: f64 = 3600.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub fractions: Vec<f64>,
    /// Minimum final size of each cascade group.
    pub groups: Vec<usize>,
    pub per_group: usize,
    pub sim: SimConfig,
    /// Observed fraction for the process experiment.
    pub process_fraction: f64,
    /// Only cascades whose activity spans at most this long enter the
    /// process experiment, seconds.
    pub process_max_duration: f64,
    /// Offsets after the newest observed event, seconds.
    pub checkpoints: Vec<f64>,
    pub size_tolerance: f64,
    pub ridge_lambda: f64,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            fractions: vec![0.05, 0.10, 0.15, 0.20],
            groups: vec![200, 400, 600],
            per_group: 30,
            sim: SimConfig::default(),
            process_fraction: 0.10,
            process_max_duration: 48.0 * HOUR,
            checkpoints: (0..=12).map(|k| f64::from(k) * 4.0 * HOUR).collect(),
            size_tolerance: 0.2,
            ridge_lambda: 1e-3,
            seed: 0,
        }
    }
}

/// A named model hosted by the propagation engine.
pub struct Method<'a> {
    pub name: String,
    pub model: &'a dyn ActivationModel,
}

/// One cell of a results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub group: usize,
    pub fraction: f64,
    pub method: String,
    pub metric: String,
    /// Seconds after the newest observed event, for process rows.
    pub checkpoint: Option<f64>,
    /// Mean over the group; empty when no cascade qualified.
    pub value: Option<f64>,
    pub cascades: usize,
}

const GROUP_TAG: u64 = 0x6E0;
const SIM_TAG: u64 = 0x51A;

/// Indices of cascades with at least `min_size` events, down-sampled to
/// `per_group` with a seeded shuffle and returned ascending.
pub fn select_group(data: &DataSet, min_size: usize, per_group: usize, seed: u64) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut idx: Vec<usize> = (0..data.corpus.len())
        .filter(|&i| data.corpus.cascades[i].len() >= min_size.max(1))
        .collect();
    if idx.len() > per_group {
        let mut rng = fscale_core::exec::rng_from(seed, GROUP_TAG, min_size as u64);
        idx.shuffle(&mut rng);
        idx.truncate(per_group);
        idx.sort_unstable();
    }
    idx
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Runs the engine from the first `frac` of cascade `i`.
pub fn predict(data: &DataSet, model: &dyn ActivationModel, i: usize, frac: f64, cfg: &ExperimentConfig) -> Result<CascadeState> {
    let observed = CascadeState::observe_fraction(&data.graph, &data.corpus.cascades[i], frac)?;
    predict_from(data, model, i, &observed, cfg)
}

/// Runs the engine on cascade `i` from an arbitrary observed state.
pub fn predict_from(
    data: &DataSet,
    model: &dyn ActivationModel,
    i: usize,
    observed: &CascadeState,
    cfg: &ExperimentConfig,
) -> Result<CascadeState> {
    let sim = SimConfig {
        seed: derive_seed(cfg.seed, SIM_TAG, i as u64),
        ..cfg.sim
    };
    let out = run(data.env(), observed, &data.corpus.messages[i], model, &sim, &Sequential)?;
    Ok(out.state)
}

fn full_state(data: &DataSet, c: &Cascade) -> Result<CascadeState> {
    Ok(CascadeState::observe_prefix(&data.graph, c, c.len())?)
}

fn row(experiment: &str, group: usize, fraction: f64, method: &str, metric: &str, value: Option<f64>, n: usize) -> ResultRow {
    ResultRow {
        experiment: experiment.into(),
        group,
        fraction,
        method: method.into(),
        metric: metric.into(),
        checkpoint: None,
        value,
        cascades: n,
    }
}

/// Node-level accuracy of the final predicted state, per group, fraction and
/// method.
pub fn contagion_states(data: &DataSet, methods: &[Method<'_>], cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    for &group in &cfg.groups {
        let members = select_group(data, group, cfg.per_group, cfg.seed);
        for &frac in &cfg.fractions {
            for m in methods {
                let acc = members
                    .par_iter()
                    .map(|&i| {
                        let truth = full_state(data, &data.corpus.cascades[i])?;
                        let pred = predict(data, m.model, i, frac, cfg)?;
                        Ok(node_accuracy(&truth, &pred)?)
                    })
                    .collect::<Result<Vec<f64>>>()?;
                rows.push(row("states", group, frac, &m.name, "accuracy", mean(&acc), acc.len()));
            }
        }
    }
    Ok(rows)
}

/// Node-level accuracy of the states observed before each checkpoint, on
/// short-lived cascades.
pub fn cascade_process(data: &DataSet, methods: &[Method<'_>], cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    let frac = cfg.process_fraction;
    for &group in &cfg.groups {
        let members: Vec<usize> = select_group(data, group, usize::MAX, cfg.seed)
            .into_iter()
            .filter(|&i| {
                let c = &data.corpus.cascades[i];
                match (c.first_time(), c.last_time()) {
                    (Some(a), Some(b)) => b - a <= cfg.process_max_duration,
                    _ => false,
                }
            })
            .take(cfg.per_group)
            .collect();
        for m in methods {
            let series = members
                .par_iter()
                .map(|&i| {
                    let c = &data.corpus.cascades[i];
                    let observed = CascadeState::observe_fraction(&data.graph, c, frac)?;
                    let t_new = observed.cascade.last_time().unwrap_or(0.0);
                    let pred = predict(data, m.model, i, frac, cfg)?;
                    cfg.checkpoints
                        .iter()
                        .map(|&dt| {
                            let truth = CascadeState::observe_before(&data.graph, c, t_new + dt)?;
                            let p = CascadeState::observe_before(&data.graph, &pred.cascade, t_new + dt)?;
                            Ok(node_accuracy(&truth, &p)?)
                        })
                        .collect::<Result<Vec<f64>>>()
                })
                .collect::<Result<Vec<Vec<f64>>>>()?;
            for (k, &dt) in cfg.checkpoints.iter().enumerate() {
                let at: Vec<f64> = series.iter().map(|s| s[k]).collect();
                let mut r = row("process", group, frac, &m.name, "accuracy", mean(&at), at.len());
                r.checkpoint = Some(dt);
                rows.push(r);
            }
        }
    }
    Ok(rows)
}

/// Name under which the cascade-graph regressor is reported.
pub const CG_CPRED: &str = "CG-CPred";

/// Share of final-size predictions within the relative tolerance. Every
/// method sees the same observed prefix of at least two events. The
/// cascade-graph regressor is trained leave-one-out on every other cascade
/// observed at the same fraction.
pub fn size_prediction(data: &DataSet, methods: &[Method<'_>], cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    let eligible: Vec<usize> = (0..data.corpus.len())
        .filter(|&i| data.corpus.cascades[i].len() >= 2)
        .collect();
    for &frac in &cfg.fractions {
        let features = eligible
            .par_iter()
            .map(|&i| {
                let c = &data.corpus.cascades[i];
                let s = observe_for_size(&data.graph, c, frac)?;
                Ok(cascade_features(&data.graph, &s, &data.corpus.messages[i])?)
            })
            .collect::<Result<Vec<[f64; 7]>>>()?;
        let sizes: Vec<f64> = eligible.iter().map(|&i| data.corpus.cascades[i].len() as f64).collect();
        for &group in &cfg.groups {
            let members: Vec<usize> = select_group(data, group.max(2), cfg.per_group, cfg.seed);
            for m in methods {
                let pairs = members
                    .par_iter()
                    .map(|&i| {
                        let c = &data.corpus.cascades[i];
                        let observed = observe_for_size(&data.graph, c, frac)?;
                        let pred = predict_from(data, m.model, i, &observed, cfg)?;
                        Ok((pred.activated_count() as f64, c.len() as f64))
                    })
                    .collect::<Result<Vec<(f64, f64)>>>()?;
                let v = (!pairs.is_empty()).then(|| relative_precision(&pairs, cfg.size_tolerance));
                rows.push(row("size", group, frac, &m.name, "precision@0.2", v, pairs.len()));
            }
            let pairs = members
                .par_iter()
                .map(|&i| {
                    let k = eligible.binary_search(&i).unwrap_or(0);
                    let (xs, ys): (Vec<[f64; 7]>, Vec<f64>) = features
                        .iter()
                        .zip(&sizes)
                        .enumerate()
                        .filter(|&(j, _)| j != k)
                        .map(|(_, (x, y))| (*x, *y))
                        .unzip();
                    let model = CgCPred::fit(&xs, &ys, cfg.ridge_lambda)?;
                    let c = &data.corpus.cascades[i];
                    let s = observe_for_size(&data.graph, c, frac)?;
                    let p = model.predict(&data.graph, &s, &data.corpus.messages[i])?;
                    Ok((p, c.len() as f64))
                })
                .collect::<Result<Vec<(f64, f64)>>>()?;
            let v = (!pairs.is_empty()).then(|| relative_precision(&pairs, cfg.size_tolerance));
            rows.push(row("size", group, frac, CG_CPRED, "precision@0.2", v, pairs.len()));
        }
    }
    Ok(rows)
}

/// Named feature subsets for the estimation table: selected, all, structural,
/// user attributes and the complement of the selection.
pub fn feature_sets(selected: &[usize]) -> Vec<(&'static str, Vec<usize>)> {
    let by = |m: Mechanism| (0..FEATURE_COUNT).filter(|&j| MECHANISM_OF[j] == m).collect::<Vec<_>>();
    let complement: Vec<usize> = (0..FEATURE_COUNT).filter(|j| !selected.contains(j)).collect();
    let mut sets = vec![
        ("OF", selected.to_vec()),
        ("AF", (0..FEATURE_COUNT).collect()),
        ("SF", by(Mechanism::Scm)),
        ("UA", by(Mechanism::Em)),
    ];
    if !complement.is_empty() {
        sets.push(("CF", complement));
    }
    sets
}

/// Pooled cross-validated precision, recall, F1 and accuracy of `kind` on
/// the columns `cols`.
pub fn cv_metrics(
    data: &Dataset,
    kind: ClassifierKind,
    cols: &[usize],
    folds: usize,
    seed: u64,
) -> Result<fscale_core::metrics::ClassMetrics> {
    let folds = stratified_folds(data.labels(), folds, seed)?;
    let mut y_true = Vec::new();
    let mut y_pred = Vec::new();
    for (f, test) in folds.iter().enumerate() {
        let mut mark = vec![false; data.len()];
        test.iter().for_each(|&i| mark[i] = true);
        let train: Vec<usize> = (0..data.len()).filter(|&i| !mark[i]).collect();
        let model = Classifier::fit_view(kind, &data.view(&train, cols), &Hyper::default(), derive_seed(seed, 0xCF, f as u64))?;
        for &i in test {
            let x: Vec<f64> = cols.iter().map(|&j| data.row(i)[j]).collect();
            y_true.push(data.label(i));
            y_pred.push(model.predict(&x)?);
        }
    }
    Ok(Confusion::from_labels(&y_true, &y_pred)?.metrics())
}

/// Rows of the estimation table for one feature set or baseline.
pub fn estimation_rows(name: &str, m: &fscale_core::metrics::ClassMetrics) -> Vec<ResultRow> {
    [
        ("precision", m.precision),
        ("recall", m.recall),
        ("f1", m.f1),
        ("accuracy", m.accuracy),
    ]
    .into_iter()
    .map(|(metric, v)| row("estimation", 0, 0.0, name, metric, Some(v), 0))
    .collect()
}

/// The estimation table: cross-validated metrics of the trained model's
/// classifier kind on each named feature set, and of the hosted LRC-Q
/// baselines on their own two features, all over the same balanced
/// instances.
pub fn estimation(
    data: &DataSet,
    model: &TrainedModel,
    baselines: &[(&str, &LrcqModel)],
    folds: usize,
    max_per_class: Option<usize>,
) -> Result<Vec<ResultRow>> {
    let seed = model.provenance.seed;
    let env = data.env();
    let (instances, inst) = build_instances(env, seed, max_per_class)?;
    let mut rows = Vec::new();
    for (name, cols) in feature_sets(&model.selected) {
        let m = cv_metrics(&instances, model.kind(), &cols, folds, seed)?;
        rows.extend(estimation_rows(name, &m));
    }
    for (name, b) in baselines {
        let x = featurize(env.graph, env.corpus, &inst, |s, _, v| {
            Ok(LrcqModel::features(b.variant, &b.params, env.graph, s, v)?.to_vec())
        })?;
        let ds = Dataset::new(x, inst.iter().map(|i| i.label).collect(), vec!["g".into(), "f".into()])?;
        let m = cv_metrics(&ds, ClassifierKind::Logreg, &[0, 1], folds, seed)?;
        rows.extend(estimation_rows(name, &m));
    }
    Ok(rows)
}

pub fn write_results(path: &std::path::Path, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(crate::error::Error::io(path))
}

pub fn read_results(path: &std::path::Path) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<Vec<ResultRow>, _>>()?)
}
