use alloc::string::String;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Labelled instances: row-major `n × d` matrix with labels in `{+1, -1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: Vec<f64>,
    y: Vec<i8>,
    d: usize,
    pub feature_names: Vec<String>,
}

impl Dataset {
    pub fn new(rows: Vec<Vec<f64>>, y: Vec<i8>, feature_names: Vec<String>) -> Result<Self> {
        let d = feature_names.len();
        let mut x = Vec::with_capacity(rows.len() * d);
        for r in &rows {
            if r.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: r.len(),
                });
            }
            x.extend_from_slice(r);
        }
        Self::from_flat(x, y, feature_names)
    }

    pub fn from_flat(x: Vec<f64>, y: Vec<i8>, feature_names: Vec<String>) -> Result<Self> {
        let d = feature_names.len();
        if d == 0 {
            return Err(Error::param("dataset needs at least one feature"));
        }
        if x.len() != y.len() * d {
            return Err(Error::LengthMismatch {
                left: x.len(),
                right: y.len() * d,
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("dataset contains NaN or infinite values"));
        }
        if y.iter().any(|&l| l != 1 && l != -1) {
            return Err(Error::domain("labels must be +1 or -1"));
        }
        Ok(Dataset {
            x,
            y,
            d,
            feature_names,
        })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.d..(i + 1) * self.d]
    }

    #[inline]
    pub fn label(&self, i: usize) -> i8 {
        self.y[i]
    }

    pub fn labels(&self) -> &[i8] {
        &self.y
    }

    pub fn positives(&self) -> usize {
        self.y.iter().filter(|&&l| l == 1).count()
    }

    /// Copy restricted to the given feature columns, in that order.
    pub fn select_features(&self, cols: &[usize]) -> Dataset {
        let mut x = Vec::with_capacity(self.len() * cols.len());
        for i in 0..self.len() {
            let r = self.row(i);
            x.extend(cols.iter().map(|&c| r[c]));
        }
        Dataset {
            x,
            y: self.y.clone(),
            d: cols.len(),
            feature_names: cols.iter().map(|&c| self.feature_names[c].clone()).collect(),
        }
    }

    pub fn view<'a>(&'a self, rows: &'a [usize], cols: &'a [usize]) -> View<'a> {
        View {
            data: self,
            rows,
            cols,
        }
    }
}

/// Row and column subset of a [`Dataset`] without copying.
#[derive(Clone, Copy)]
pub struct View<'a> {
    data: &'a Dataset,
    rows: &'a [usize],
    cols: &'a [usize],
}

impl View<'_> {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.cols.len()
    }

    #[inline]
    pub fn value(&self, r: usize, j: usize) -> f64 {
        self.data.x[self.rows[r] * self.data.d + self.cols[j]]
    }

    #[inline]
    pub fn label(&self, r: usize) -> i8 {
        self.data.y[self.rows[r]]
    }

    pub fn row_into(&self, r: usize, buf: &mut Vec<f64>) {
        buf.clear();
        let row = self.data.row(self.rows[r]);
        buf.extend(self.cols.iter().map(|&c| row[c]));
    }

    pub fn positives(&self) -> usize {
        (0..self.len()).filter(|&r| self.label(r) == 1).count()
    }

    pub(crate) fn check_trainable(&self) -> Result<()> {
        if self.len() < 2 {
            return Err(Error::param("need at least two training instances"));
        }
        if self.dim() == 0 {
            return Err(Error::param("need at least one feature"));
        }
        let pos = self.positives();
        if pos == 0 || pos == self.len() {
            return Err(Error::SingleClass);
        }
        Ok(())
    }
}
