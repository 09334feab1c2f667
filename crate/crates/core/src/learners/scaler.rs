use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

/// Per-column standardization fitted on training inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    mean: Vec<f64>,
    scale: Vec<f64>,
}

impl Standardizer {
    pub fn identity(n_cols: usize) -> Self {
        Self {
            mean: alloc::vec![0.0; n_cols],
            scale: alloc::vec![1.0; n_cols],
        }
    }

    pub fn fit(x: &[f64], n_cols: usize) -> Self {
        let n = (x.len() / n_cols).max(1) as f64;
        let mut mean = alloc::vec![0.0; n_cols];
        for row in x.chunks_exact(n_cols) {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = alloc::vec![0.0; n_cols];
        for row in x.chunks_exact(n_cols) {
            for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let scale = var
            .into_iter()
            .map(|s| {
                let sd = libm::sqrt(s / n);
                if sd > 0.0 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Self { mean, scale }
    }

    pub fn transform_row(&self, row: &[f64], out: &mut Vec<f64>) {
        out.extend(
            row.iter()
                .zip(self.mean.iter().zip(&self.scale))
                .map(|(v, (m, s))| (v - m) / s),
        );
    }

    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(x.len());
        for row in x.chunks_exact(self.mean.len()) {
            self.transform_row(row, &mut out);
        }
        out
    }
}
