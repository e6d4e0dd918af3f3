//! Reduced models and the pieces shared by the dense and low-rank
//! truncation routes.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::bt_dense::{select_order, HsvSpectrum};
use crate::error::{MorError, Result};
use crate::model::{DescriptorSystem, ParameterKind};

/// Values below this fraction of `sigma_1` are treated as numerically zero
/// when forming `Sigma^{-1/2}`.
pub const RANK_TOLERANCE: f64 = 1e-14;

/// Default relative tolerance when neither an order nor a tolerance is given.
pub const DEFAULT_RELATIVE_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    Order(usize),
    /// Absolute bound on `2 * sum_{i > r} sigma_i`.
    Tolerance(f64),
    /// Tolerance of `DEFAULT_RELATIVE_EPS` times the sum of all bounds.
    Default,
}

/// Picks the truncation order, clamped to the numerical rank of the
/// spectrum. Clamping is reported through `warnings`.
pub fn resolve_order(hsv: &HsvSpectrum, target: Target, warnings: &mut Vec<String>) -> Result<usize> {
    let rank = hsv.numerical_rank(RANK_TOLERANCE);
    if rank == 0 {
        return Err(MorError::NoExcitation);
    }
    let wanted = match target {
        Target::Order(0) => return Err(MorError::InvalidArgument("order must be at least 1".into())),
        Target::Order(r) => r,
        Target::Tolerance(eps) if !(eps >= 0.0) => {
            return Err(MorError::InvalidArgument(format!("tolerance {eps} must be non-negative")))
        }
        Target::Tolerance(eps) => select_order(hsv, eps),
        Target::Default => select_order(hsv, DEFAULT_RELATIVE_EPS * hsv.tail_bound(0)),
    };
    if wanted > rank {
        warnings.push(format!(
            "requested order {wanted} exceeds numerical rank {rank} (sigma below {RANK_TOLERANCE:e} * sigma_1); using {rank}"
        ));
        return Ok(rank);
    }
    Ok(wanted)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dense,
    Eksm,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EksmSummary {
    pub tol: f64,
    pub formulation: String,
    #[serde(rename = "iterations_P")]
    pub iterations_p: usize,
    #[serde(rename = "iterations_Q")]
    pub iterations_q: usize,
    #[serde(rename = "residual_P")]
    pub residual_p: f64,
    #[serde(rename = "residual_Q")]
    pub residual_q: f64,
    #[serde(rename = "converged_P")]
    pub converged_p: bool,
    #[serde(rename = "converged_Q")]
    pub converged_q: bool,
    #[serde(rename = "rank_P")]
    pub rank_p: usize,
    #[serde(rename = "rank_Q")]
    pub rank_q: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub method: Method,
    pub warnings: Vec<String>,
    pub eksm: Option<EksmSummary>,
}

/// `C̃ x' = G̃ x + B̃ u`, `y = L̃ x` of order `r`.
#[derive(Debug, Clone)]
pub struct ReducedOrderModel {
    pub g: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub l: DMatrix<f64>,
    pub hsv: HsvSpectrum,
    pub error_bound: f64,
    pub ports: Vec<String>,
    pub kind: ParameterKind,
    pub provenance: Provenance,
}

impl ReducedOrderModel {
    pub fn order(&self) -> usize {
        self.g.nrows()
    }

    pub fn to_descriptor(&self) -> Result<DescriptorSystem> {
        DescriptorSystem::from_dense(&self.g, &self.c, &self.b, &self.l, self.kind)?.with_ports(self.ports.clone())
    }
}

/// Left and right projection bases: `T` is `r x N`, `Ti` is `N x r`.
#[derive(Debug, Clone)]
pub struct BalancingTransform {
    pub t: DMatrix<f64>,
    pub ti: DMatrix<f64>,
}

/// SVD of `Z_Qᵀ Z_P` kept so that any truncation order can be cut from
/// it without refactoring.
pub(crate) struct SquareRoot {
    /// `Z_Q U`.
    left: DMatrix<f64>,
    /// `Z_P V`.
    right: DMatrix<f64>,
    s: Vec<f64>,
    pub hsv: HsvSpectrum,
}

impl SquareRoot {
    pub fn new(zp: &DMatrix<f64>, zq: &DMatrix<f64>) -> Self {
        let m = zq.tr_mul(zp);
        let (u, s, vt) = crate::dense::sorted_svd(&m);
        SquareRoot {
            left: zq * u,
            right: zp * vt.transpose(),
            hsv: HsvSpectrum::new(s.clone()),
            s,
        }
    }

    /// `T = Σ_r^{-1/2} U_rᵀ Z_Qᵀ` and `Ti = Z_P V_r Σ_r^{-1/2}`. Rounding in
    /// the SVD is amplified by `σ_1 / σ_r`, so `T Ti = I` is re-imposed by
    /// replacing `T` with `(T Ti)⁻¹ T`.
    pub fn bases(&self, target: Target, warnings: &mut Vec<String>) -> Result<BalancingTransform> {
        let r = resolve_order(&self.hsv, target, warnings)?;
        let mut t = self.left.columns(0, r).transpose();
        let mut ti = self.right.columns(0, r).into_owned();
        for k in 0..r {
            let scale = 1.0 / self.s[k].sqrt();
            t.row_mut(k).scale_mut(scale);
            ti.column_mut(k).scale_mut(scale);
        }
        let t = crate::dense::solve(&(&t * &ti), &t, "T Ti")?;
        Ok(BalancingTransform { t, ti })
    }
}
