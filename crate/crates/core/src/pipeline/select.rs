//! Cross-validated criterion, classifier selection and floating backward
//! feature selection.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::exec::{derive_seed, rng_from, Executor};
use crate::learners::{Classifier, ClassifierKind, Dataset, Hyper};
use crate::{Error, Result};

const FOLD_TAG: u64 = 0xF01D;
const FIT_TAG: u64 = 0xF17;

/// Stratified folds: each class is shuffled and dealt round-robin. Returns the
/// held-out row indices of each fold, sorted.
pub fn stratified_folds(labels: &[i8], k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::param("need at least 2 folds"));
    }
    let mut rng = rng_from(seed, FOLD_TAG, 0);
    let mut folds = alloc::vec![Vec::new(); k];
    let mut slot = 0;
    for class in [1i8, -1] {
        let mut rows: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        rows.shuffle(&mut rng);
        for r in rows {
            folds[slot % k].push(r);
            slot += 1;
        }
    }
    folds.iter_mut().for_each(|f| f.sort_unstable());
    Ok(folds)
}

/// Cross-validated accuracy of one classifier kind, memoized per feature
/// subset. Folds and per-fold seeds are fixed at construction, so the score
/// of a subset never depends on evaluation order.
pub struct Criterion<'a> {
    data: &'a Dataset,
    kind: ClassifierKind,
    hyper: Hyper,
    folds: Vec<Vec<usize>>,
    train: Vec<Vec<usize>>,
    seed: u64,
    exec: &'a dyn Executor,
    cache: BTreeMap<u64, f64>,
}

impl<'a> Criterion<'a> {
    pub fn new(
        data: &'a Dataset,
        kind: ClassifierKind,
        hyper: Hyper,
        folds: usize,
        seed: u64,
        exec: &'a dyn Executor,
    ) -> Result<Self> {
        if data.dim() > 64 {
            return Err(Error::param("feature selection supports at most 64 features"));
        }
        let folds = stratified_folds(data.labels(), folds, seed)?;
        let train = folds
            .iter()
            .map(|test| {
                let mut mark = alloc::vec![false; data.len()];
                test.iter().for_each(|&i| mark[i] = true);
                (0..data.len()).filter(|&i| !mark[i]).collect()
            })
            .collect();
        Ok(Criterion {
            data,
            kind,
            hyper,
            folds,
            train,
            seed,
            exec,
            cache: BTreeMap::new(),
        })
    }

    pub fn kind(&self) -> ClassifierKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.data.dim()
    }

    /// Number of distinct subsets scored so far.
    pub fn evaluations(&self) -> usize {
        self.cache.len()
    }

    fn correct_in_fold(&self, cols: &[usize], fold: usize) -> Result<f64> {
        let view = self.data.view(&self.train[fold], cols);
        let seed = derive_seed(self.seed, FIT_TAG, fold as u64);
        let model = Classifier::fit_view(self.kind, &view, &self.hyper, seed)?;
        let test = &self.folds[fold];
        let tview = self.data.view(test, cols);
        let mut buf = Vec::with_capacity(cols.len());
        let mut correct = 0usize;
        for r in 0..tview.len() {
            tview.row_into(r, &mut buf);
            let pred = if model.proba_unchecked(&buf) > 0.5 { 1 } else { -1 };
            correct += usize::from(pred == tview.label(r));
        }
        Ok(correct as f64)
    }

    /// Scores several subsets, fanning (subset, fold) jobs out on the executor.
    pub fn score_many(&mut self, subsets: &[Vec<usize>]) -> Result<Vec<f64>> {
        let mut todo: Vec<(u64, &[usize])> = Vec::new();
        for s in subsets {
            let key = mask(s);
            if !self.cache.contains_key(&key) && !todo.iter().any(|t| t.0 == key) {
                todo.push((key, s));
            }
        }
        if !todo.is_empty() {
            let k = self.folds.len();
            let this = &*self;
            let counts = self.exec.map(todo.len() * k, &|j| {
                let (_, cols) = todo[j / k];
                this.correct_in_fold(cols, j % k)
            })?;
            let n = self.data.len() as f64;
            for (i, (key, _)) in todo.iter().enumerate() {
                let acc = counts[i * k..(i + 1) * k].iter().sum::<f64>() / n;
                self.cache.insert(*key, acc);
            }
        }
        Ok(subsets.iter().map(|s| self.cache[&mask(s)]).collect())
    }

    pub fn score(&mut self, subset: &[usize]) -> Result<f64> {
        Ok(self.score_many(&[subset.to_vec()])?[0])
    }
}

fn mask(s: &[usize]) -> u64 {
    s.iter().fold(0u64, |m, &i| m | (1 << i))
}

/// Scores each candidate kind by CV accuracy on all features and picks the
/// best; kinds within `tie_margin` of the best defer to the simplest one.
pub fn model_select(
    candidates: &[ClassifierKind],
    data: &Dataset,
    hyper: &Hyper,
    folds: usize,
    seed: u64,
    exec: &dyn Executor,
) -> Result<(ClassifierKind, Vec<(ClassifierKind, f64)>)> {
    const TIE_MARGIN: f64 = 0.005;
    if candidates.is_empty() {
        return Err(Error::param("no candidate classifiers"));
    }
    let all: Vec<usize> = (0..data.dim()).collect();
    let mut scores = Vec::new();
    for &kind in candidates {
        let mut c = Criterion::new(data, kind, *hyper, folds, seed, exec)?;
        scores.push((kind, c.score(&all)?));
    }
    let best = scores.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    let mut ranked = scores.clone();
    ranked.sort_by_key(|s| s.0);
    let chosen = ranked
        .iter()
        .find(|s| s.1 >= best - TIE_MARGIN)
        .map(|s| s.0)
        .unwrap_or(ranked[0].0);
    Ok((chosen, scores))
}

/// Picks the best-scoring candidate; ties go to the lowest feature index.
fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

/// Sequential floating backward selection down to `k` features.
///
/// Starts from the full set. Each round removes the feature whose removal
/// scores best, then repeatedly re-includes a previously removed feature while
/// that yields a subset strictly better than the best seen at the larger
/// size. The feature removed in the same round is never re-included
/// immediately. When an exclusion lands on a subset worse than the best
/// already recorded for that size, the search continues from the recorded one.
pub fn sfbs(criterion: &mut Criterion<'_>, k: usize) -> Result<Vec<usize>> {
    let d = criterion.dim();
    if k == 0 || k > d {
        return Err(Error::param(alloc::format!("desired feature count {k} not in 1..={d}")));
    }
    let mut current: Vec<usize> = (0..d).collect();
    let mut best: Vec<Option<(f64, Vec<usize>)>> = alloc::vec![None; d + 1];
    best[d] = Some((criterion.score(&current)?, current.clone()));
    while current.len() > k {
        let removals: Vec<Vec<usize>> = current
            .iter()
            .map(|&x| current.iter().copied().filter(|&y| y != x).collect())
            .collect();
        let scores = criterion.score_many(&removals)?;
        let i = argmax(&scores);
        let excluded = current[i];
        let size = current.len() - 1;
        match &best[size] {
            Some((j, set)) if *j >= scores[i] => current = set.clone(),
            _ => {
                current = removals[i].clone();
                best[size] = Some((scores[i], current.clone()));
            }
        }
        if current.len() == k {
            break;
        }
        loop {
            let pool: Vec<usize> = (0..d)
                .filter(|x| !current.contains(x) && *x != excluded)
                .collect();
            if pool.is_empty() {
                break;
            }
            let additions: Vec<Vec<usize>> = pool
                .iter()
                .map(|&x| {
                    let mut s = current.clone();
                    s.push(x);
                    s.sort_unstable();
                    s
                })
                .collect();
            let scores = criterion.score_many(&additions)?;
            let i = argmax(&scores);
            let size = current.len() + 1;
            let improves = best[size].as_ref().is_none_or(|(j, _)| scores[i] > *j);
            if !improves {
                break;
            }
            current = additions[i].clone();
            best[size] = Some((scores[i], current.clone()));
        }
    }
    Ok(best[k].as_ref().map(|b| b.1.clone()).unwrap_or(current))
}
