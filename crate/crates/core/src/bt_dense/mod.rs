//! Dense Gramians and balanced truncation, the reference route for small
//! models.

mod hsv;
mod lyapunov;

pub use hsv::*;
pub use lyapunov::*;

use nalgebra::DMatrix;

use crate::dense::{checked_lu, sorted_svd, RealSchur};
use crate::error::{MorError, Result};
use crate::model::DescriptorSystem;
use crate::rom::{BalancingTransform, Method, Provenance, ReducedOrderModel, SquareRoot, Target};

/// Largest order accepted by the dense routines.
pub const DEFAULT_DENSE_CAP: usize = 2000;

/// Dense state-space data `A = C⁻¹G`, `B_C = C⁻¹B` and the Gramians.
#[derive(Debug, Clone)]
pub struct DenseGramians {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub l: DMatrix<f64>,
    pub p: DMatrix<f64>,
    pub q: DMatrix<f64>,
}

fn check_cap(sys: &DescriptorSystem, cap: usize) -> Result<()> {
    if sys.order() > cap {
        return Err(MorError::DenseCapExceeded { n: sys.order(), cap });
    }
    Ok(())
}

fn dense_state_space(sys: &DescriptorSystem) -> Result<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)> {
    let lu = checked_lu(&sys.c().to_dense(), "C")?;
    let a = lu.solve(&sys.g().to_dense()).expect("checked");
    let b = lu.solve(&sys.b().to_dense()).expect("checked");
    Ok((a, b, sys.l().to_dense()))
}

/// Solves both Gramian equations of `sys` densely.
pub fn gramians_dense(sys: &DescriptorSystem, cap: usize) -> Result<DenseGramians> {
    check_cap(sys, cap)?;
    let (a, b, l) = dense_state_space(sys)?;
    let at = a.transpose();
    let lt = l.transpose();
    let (p, q) = crate::par::join(|| solve_lyapunov_dense(&a, &b), || solve_lyapunov_dense(&at, &lt));
    Ok(DenseGramians { p: p?, q: q?, a, b, l })
}

/// `(max Re λ(C⁻¹G), stability margin)`.
pub fn spectral_abscissa(sys: &DescriptorSystem) -> Result<(f64, f64)> {
    let (a, _, _) = dense_state_space(sys)?;
    let schur = RealSchur::new(&a)?;
    Ok((schur.spectral_abscissa(), STABILITY_MARGIN * a.norm()))
}

/// Factor `Z` with `Z Zᵀ = X` for a symmetric positive semidefinite `X`.
fn psd_factor(x: &DMatrix<f64>) -> DMatrix<f64> {
    let (u, s, _) = sorted_svd(x);
    let mut z = u;
    for (k, sv) in s.iter().enumerate() {
        z.column_mut(k).scale_mut(sv.sqrt());
    }
    z
}

/// Dense Gramians with the square-root SVD already taken, ready to be
/// truncated at any order.
pub struct DenseBalancing {
    gram: DenseGramians,
    root: SquareRoot,
    ports: Vec<String>,
    kind: crate::model::ParameterKind,
}

impl DenseBalancing {
    pub fn new(sys: &DescriptorSystem, cap: usize) -> Result<Self> {
        let gram = gramians_dense(sys, cap)?;
        let root = SquareRoot::new(&psd_factor(&gram.p), &psd_factor(&gram.q));
        Ok(DenseBalancing {
            gram,
            root,
            ports: sys.ports().to_vec(),
            kind: sys.kind(),
        })
    }

    pub fn gramians(&self) -> &DenseGramians {
        &self.gram
    }

    pub fn hsv(&self) -> &HsvSpectrum {
        &self.root.hsv
    }

    /// The reduced model is `G̃ = T A Ti`, `C̃ = I`, `B̃ = T B_C`,
    /// `L̃ = L Ti`.
    pub fn truncate(&self, target: Target) -> Result<(ReducedOrderModel, BalancingTransform)> {
        let mut warnings = Vec::new();
        let tf = self.root.bases(target, &mut warnings)?;
        let r = tf.t.nrows();
        let g = &self.gram;
        let rom = ReducedOrderModel {
            g: &tf.t * &g.a * &tf.ti,
            c: DMatrix::identity(r, r),
            b: &tf.t * &g.b,
            l: &g.l * &tf.ti,
            error_bound: self.root.hsv.tail_bound(r),
            hsv: self.root.hsv.clone(),
            ports: self.ports.clone(),
            kind: self.kind,
            provenance: Provenance {
                method: Method::Dense,
                warnings,
                eksm: None,
            },
        };
        Ok((rom, tf))
    }
}

/// Square-root balanced truncation from dense Gramians.
pub fn balance_truncate_dense(
    sys: &DescriptorSystem,
    target: Target,
    cap: usize,
) -> Result<(ReducedOrderModel, BalancingTransform)> {
    DenseBalancing::new(sys, cap)?.truncate(target)
}
