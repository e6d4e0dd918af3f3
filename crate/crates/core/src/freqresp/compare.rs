use serde::Serialize;

use crate::error::{MorError, Result};
use crate::freqresp::{spectral_norm, CMatrix, SParamSet, TransferFunctionSamples};

/// Grid estimates of the distance between two responses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonMetrics {
    /// `‖a(jω) − b(jω)‖₂` per point.
    pub per_point: Vec<f64>,
    /// Grid maximum of `per_point`, an estimate of the H∞ distance.
    pub max: f64,
    /// Angular frequency attaining `max`.
    pub argmax_omega: f64,
    /// Root mean square of `per_point`.
    pub rms: f64,
    /// Largest entrywise modulus of `a − b`.
    pub max_entry: f64,
    /// Grid maximum of `‖a(jω)‖₂`, for relative figures.
    pub reference_max: f64,
}

impl ComparisonMetrics {
    /// `max / reference_max` (zero when both vanish).
    pub fn relative_max(&self) -> f64 {
        if self.reference_max > 0.0 {
            self.max / self.reference_max
        } else {
            self.max
        }
    }
}

pub fn compare(a: &TransferFunctionSamples, b: &TransferFunctionSamples) -> Result<ComparisonMetrics> {
    compare_values(&a.omegas, &a.values, &b.omegas, &b.values)
}

pub fn compare_sparams(a: &SParamSet, b: &SParamSet) -> Result<ComparisonMetrics> {
    if a.z0 != b.z0 {
        return Err(MorError::GridMismatch(format!("reference impedances differ: {} vs {}", a.z0, b.z0)));
    }
    compare_values(&a.omegas, &a.values, &b.omegas, &b.values)
}

fn compare_values(wa: &[f64], a: &[CMatrix], wb: &[f64], b: &[CMatrix]) -> Result<ComparisonMetrics> {
    if wa.len() != wb.len() || wa.iter().zip(wb).any(|(x, y)| x != y) {
        return Err(MorError::GridMismatch(format!(
            "frequency sets differ ({} vs {} points)",
            wa.len(),
            wb.len()
        )));
    }
    if wa.is_empty() {
        return Err(MorError::GridMismatch("empty frequency set".into()));
    }
    for (x, y) in a.iter().zip(b) {
        if x.shape() != y.shape() {
            return Err(MorError::DimensionMismatch(format!(
                "transfer matrices are {:?} and {:?}",
                x.shape(),
                y.shape()
            )));
        }
    }
    let per_point: Vec<f64> = crate::par::map_indexed(a.len(), |k| spectral_norm(&(&a[k] - &b[k])));
    let reference_max = crate::par::map_slice(a, spectral_norm).into_iter().fold(0.0, f64::max);
    let (mut kmax, mut max) = (0, per_point[0]);
    for (k, &v) in per_point.iter().enumerate() {
        if v > max {
            max = v;
            kmax = k;
        }
    }
    let rms = (per_point.iter().map(|v| v * v).sum::<f64>() / per_point.len() as f64).sqrt();
    let max_entry = a
        .iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y.iter()).map(|(u, v)| (u - v).norm()))
        .fold(0.0, f64::max);
    Ok(ComparisonMetrics {
        per_point,
        max,
        argmax_omega: wa[kmax],
        rms,
        max_entry,
        reference_max,
    })
}
