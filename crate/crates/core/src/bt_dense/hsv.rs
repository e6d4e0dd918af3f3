use nalgebra::DMatrix;
use serde::Serialize;

use crate::dense::RealSchur;
use crate::error::{MorError, Result};

/// Hankel singular values in descending order with precomputed tail sums.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HsvSpectrum {
    values: Vec<f64>,
    /// `tails[r] = 2 * sum(values[r..])`, with `tails[len] = 0`.
    #[serde(skip)]
    tails: Vec<f64>,
}

impl HsvSpectrum {
    /// Sorts descending; negative round-off is clamped to zero.
    pub fn new(mut values: Vec<f64>) -> Self {
        for v in &mut values {
            if !(*v > 0.0) {
                *v = 0.0;
            }
        }
        values.sort_by(|a, b| b.total_cmp(a));
        let mut tails = vec![0.0; values.len() + 1];
        for i in (0..values.len()).rev() {
            tails[i] = tails[i + 1] + 2.0 * values[i];
        }
        HsvSpectrum { values, tails }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn largest(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// `2 * sum_{i > r} sigma_i` (1-based `i`).
    pub fn tail_bound(&self, r: usize) -> f64 {
        self.tails[r.min(self.values.len())]
    }

    /// Number of values above `rel * sigma_1`.
    pub fn numerical_rank(&self, rel: f64) -> usize {
        let cut = rel * self.largest();
        self.values.iter().take_while(|&&s| s > cut).count()
    }
}

/// Smallest order `r >= 1` whose truncation bound does not exceed `eps`.
pub fn select_order(hsv: &HsvSpectrum, eps: f64) -> usize {
    (1..=hsv.len()).find(|&r| hsv.tail_bound(r) <= eps).unwrap_or(hsv.len())
}

/// `2 * sum_{i > r} sigma_i`.
pub fn rom_error_bound(hsv: &HsvSpectrum, r: usize) -> f64 {
    hsv.tail_bound(r)
}

/// `sigma_i = sqrt(lambda_i(P Q))`.
pub fn hankel_singular_values(p: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<HsvSpectrum> {
    if p.shape() != q.shape() || p.nrows() != p.ncols() {
        return Err(MorError::DimensionMismatch(format!(
            "P is {:?}, Q is {:?}",
            p.shape(),
            q.shape()
        )));
    }
    let pq = p * q;
    let schur = RealSchur::new(&pq)?;
    let mut values = Vec::with_capacity(pq.nrows());
    for &(s, size) in &schur.blocks {
        if size == 1 {
            values.push(schur.t[(s, s)].max(0.0).sqrt());
        } else {
            // A complex pair from round-off: keep the real part.
            let re = 0.5 * (schur.t[(s, s)] + schur.t[(s + 1, s + 1)]);
            let v = re.max(0.0).sqrt();
            values.push(v);
            values.push(v);
        }
    }
    Ok(HsvSpectrum::new(values))
}
