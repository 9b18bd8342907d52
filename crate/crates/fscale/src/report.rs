//! Pivoted result tables and a trained-model summary, written as one JSON
//! document.

use std::collections::BTreeSet;

use fscale_core::features::{Mechanism, MECHANISM_OF};
use fscale_core::pipeline::TrainedModel;
use serde::{Deserialize, Serialize};

use crate::experiments::ResultRow;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tables: Vec<Table>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSummary>,
}

/// One experiment and metric, with a column per method. Estimation tables
/// instead have a row per method and a column per metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub experiment: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<String>,
    pub columns: Vec<String>,
    pub rows: Vec<TableRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoint: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cascades: Option<usize>,
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureWeight {
    pub feature: String,
    pub mechanism: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub classifier: String,
    pub cv_accuracy: f64,
    pub candidates: Vec<(String, f64)>,
    /// Selected features by descending weight.
    pub features: Vec<FeatureWeight>,
    pub mechanisms: Vec<(String, f64)>,
}

impl ModelSummary {
    pub fn new(m: &TrainedModel) -> Self {
        let mut features: Vec<FeatureWeight> = m
            .selected
            .iter()
            .zip(&m.feature_names)
            .zip(&m.weights)
            .map(|((&j, name), &w)| FeatureWeight {
                feature: name.clone(),
                mechanism: MECHANISM_OF[j].tag().to_string(),
                weight: w,
            })
            .collect();
        features.sort_by(|a, b| b.weight.total_cmp(&a.weight).then_with(|| a.feature.cmp(&b.feature)));
        ModelSummary {
            classifier: m.kind().to_string(),
            cv_accuracy: m.provenance.cv_accuracy,
            candidates: m
                .provenance
                .candidate_accuracy
                .iter()
                .map(|(k, a)| (k.to_string(), *a))
                .collect(),
            features,
            mechanisms: Mechanism::ALL
                .iter()
                .map(|mc| (mc.tag().to_string(), m.mechanism_measure[mc.index()]))
                .collect(),
        }
    }
}

/// Distinct values in first-appearance order.
fn ordered<T: Clone + PartialEq>(items: impl Iterator<Item = T>) -> Vec<T> {
    let mut out: Vec<T> = Vec::new();
    for x in items {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

fn same(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => x.to_bits() == y.to_bits(),
        (None, None) => true,
        _ => false,
    }
}

impl Report {
    pub fn from_rows(rows: &[ResultRow], model: Option<&TrainedModel>) -> Self {
        let mut tables = Vec::new();
        let experiments = ordered(rows.iter().map(|r| r.experiment.clone()));
        for exp in experiments {
            let mine: Vec<&ResultRow> = rows.iter().filter(|r| r.experiment == exp).collect();
            if exp == "estimation" {
                tables.push(estimation_table(&mine));
                continue;
            }
            for metric in ordered(mine.iter().map(|r| r.metric.clone())) {
                let cells: Vec<&ResultRow> = mine.iter().copied().filter(|r| r.metric == metric).collect();
                let methods = ordered(cells.iter().map(|r| r.method.clone()));
                let keys = ordered(cells.iter().map(|r| (r.group, r.fraction.to_bits(), r.checkpoint.map(f64::to_bits))));
                let rows = keys
                    .into_iter()
                    .map(|(group, frac, cp)| {
                        let at: Vec<&&ResultRow> = cells
                            .iter()
                            .filter(|r| r.group == group && r.fraction.to_bits() == frac && same(r.checkpoint, cp.map(f64::from_bits)))
                            .collect();
                        TableRow {
                            label: None,
                            group: Some(group),
                            fraction: Some(f64::from_bits(frac)),
                            checkpoint: cp.map(f64::from_bits),
                            cascades: at.iter().map(|r| r.cascades).max(),
                            values: methods
                                .iter()
                                .map(|m| at.iter().find(|r| &r.method == m).and_then(|r| r.value))
                                .collect(),
                        }
                    })
                    .collect();
                tables.push(Table {
                    experiment: exp.clone(),
                    metric: Some(metric),
                    columns: methods,
                    rows,
                });
            }
        }
        Report {
            tables,
            model: model.map(ModelSummary::new),
        }
    }

    /// Method names that appear in any table.
    pub fn methods(&self) -> BTreeSet<String> {
        self.tables
            .iter()
            .flat_map(|t| match t.metric {
                Some(_) => t.columns.clone(),
                None => t.rows.iter().filter_map(|r| r.label.clone()).collect(),
            })
            .collect()
    }
}

fn estimation_table(rows: &[&ResultRow]) -> Table {
    let metrics = ordered(rows.iter().map(|r| r.metric.clone()));
    let methods = ordered(rows.iter().map(|r| r.method.clone()));
    Table {
        experiment: "estimation".into(),
        metric: None,
        rows: methods
            .iter()
            .map(|m| TableRow {
                label: Some(m.clone()),
                group: None,
                fraction: None,
                checkpoint: None,
                cascades: None,
                values: metrics
                    .iter()
                    .map(|k| rows.iter().find(|r| &r.method == m && &r.metric == k).and_then(|r| r.value))
                    .collect(),
            })
            .collect(),
        columns: metrics,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(exp: &str, group: usize, frac: f64, method: &str, metric: &str, v: f64) -> ResultRow {
        ResultRow {
            experiment: exp.into(),
            group,
            fraction: frac,
            method: method.into(),
            metric: metric.into(),
            checkpoint: None,
            value: Some(v),
            cascades: 3,
        }
    }

    #[test]
    fn pivots_methods_into_columns() {
        let rows = vec![
            r("states", 50, 0.05, "A", "accuracy", 0.5),
            r("states", 50, 0.05, "B", "accuracy", 0.4),
            r("states", 50, 0.1, "A", "accuracy", 0.6),
            r("estimation", 0, 0.0, "OF", "precision", 0.9),
            r("estimation", 0, 0.0, "OF", "recall", 0.8),
            r("estimation", 0, 0.0, "AF", "precision", 0.7),
        ];
        let rep = Report::from_rows(&rows, None);
        assert_eq!(rep.tables.len(), 2);
        let s = &rep.tables[0];
        assert_eq!(s.columns, vec!["A", "B"]);
        assert_eq!(s.rows.len(), 2);
        assert_eq!(s.rows[0].values, vec![Some(0.5), Some(0.4)]);
        assert_eq!(s.rows[1].values, vec![Some(0.6), None]);
        let e = &rep.tables[1];
        assert_eq!(e.columns, vec!["precision", "recall"]);
        assert_eq!(e.rows[1].label.as_deref(), Some("AF"));
        assert_eq!(e.rows[1].values, vec![Some(0.7), None]);
        assert_eq!(rep.methods().len(), 4);
    }
}
