use num_complex::Complex64;

use crate::error::{MorError, Result};
use crate::freqresp::{CMatrix, TransferFunctionSamples};
use crate::model::ParameterKind;

pub const DEFAULT_Z0: f64 = 50.0;

/// Scattering parameters on a frequency set, reference impedance `z0`.
#[derive(Debug, Clone)]
pub struct SParamSet {
    pub omegas: Vec<f64>,
    pub values: Vec<CMatrix>,
    pub z0: f64,
}

impl SParamSet {
    pub fn hertz(&self) -> Vec<f64> {
        self.omegas.iter().map(|w| w / (2.0 * std::f64::consts::PI)).collect()
    }

    pub fn ports(&self) -> usize {
        self.values.first().map_or(0, |m| m.nrows())
    }
}

/// Solves `D X = N` for small complex matrices, refusing near-singular `D`.
fn solve_checked(d: CMatrix, n: CMatrix, omega: f64, what: &str) -> Result<CMatrix> {
    let scale = d.iter().fold(0.0f64, |a, z| a.max(z.norm()));
    let lu = d.lu();
    let u = lu.u();
    if (0..u.nrows()).any(|k| !(u[(k, k)].norm() > 1e-14 * scale)) {
        return Err(MorError::InvalidArgument(format!("{what} is singular at omega = {omega:e}")));
    }
    Ok(lu.solve(&n).expect("checked pivots"))
}

fn check_square(h: &CMatrix) -> Result<usize> {
    if h.nrows() != h.ncols() {
        return Err(MorError::DimensionMismatch(format!(
            "S-parameters need a square transfer matrix, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    Ok(h.nrows())
}

fn check_z0(z0: f64) -> Result<()> {
    if !(z0 > 0.0) || !z0.is_finite() {
        return Err(MorError::InvalidArgument(format!("reference impedance {z0} must be positive")));
    }
    Ok(())
}

/// `S = (I − Z0 Y)(I + Z0 Y)⁻¹`. The two factors commute, so this is
/// evaluated as `(I + Z0 Y)⁻¹ (I − Z0 Y)`.
pub fn y_to_s_matrix(y: &CMatrix, z0: f64, omega: f64) -> Result<CMatrix> {
    let p = check_square(y)?;
    let i = CMatrix::identity(p, p);
    let zy = y * Complex64::new(z0, 0.0);
    solve_checked(&i + &zy, &i - &zy, omega, "I + Z0 Y")
}

/// `S = (Z − Z0 I)(Z + Z0 I)⁻¹`, evaluated as `(Z + Z0 I)⁻¹ (Z − Z0 I)`.
pub fn z_to_s_matrix(z: &CMatrix, z0: f64, omega: f64) -> Result<CMatrix> {
    let p = check_square(z)?;
    let i = CMatrix::identity(p, p) * Complex64::new(z0, 0.0);
    solve_checked(z + &i, z - &i, omega, "Z + Z0 I")
}

pub fn y_to_s(samples: &TransferFunctionSamples, z0: f64) -> Result<SParamSet> {
    if samples.kind != ParameterKind::Admittance {
        return Err(MorError::InvalidArgument(format!(
            "y_to_s needs admittance samples, got {:?}",
            samples.kind
        )));
    }
    convert(samples, z0, y_to_s_matrix)
}

pub fn z_to_s(samples: &TransferFunctionSamples, z0: f64) -> Result<SParamSet> {
    if samples.kind != ParameterKind::Impedance {
        return Err(MorError::InvalidArgument(format!(
            "z_to_s needs impedance samples, got {:?}",
            samples.kind
        )));
    }
    convert(samples, z0, z_to_s_matrix)
}

/// Converts according to the sample kind.
pub fn to_s_parameters(samples: &TransferFunctionSamples, z0: f64) -> Result<SParamSet> {
    match samples.kind {
        ParameterKind::Admittance => y_to_s(samples, z0),
        ParameterKind::Impedance => z_to_s(samples, z0),
        ParameterKind::Generic => Err(MorError::InvalidArgument(
            "transfer function is neither an impedance nor an admittance; S-parameters undefined".into(),
        )),
    }
}

fn convert(
    samples: &TransferFunctionSamples,
    z0: f64,
    f: fn(&CMatrix, f64, f64) -> Result<CMatrix>,
) -> Result<SParamSet> {
    check_z0(z0)?;
    let values = crate::par::map_indexed(samples.len(), |k| f(&samples.values[k], z0, samples.omegas[k]));
    Ok(SParamSet {
        omegas: samples.omegas.clone(),
        values: values.into_iter().collect::<Result<_>>()?,
        z0,
    })
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 1 || m.ncols() == 1 {
        return m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    }
    m.clone().svd(false, false).singular_values.max()
}
