//! Extended Krylov subspace solver for large Lyapunov equations with
//! low-rank right-hand sides.

mod operator;

pub use operator::*;

use nalgebra::DMatrix;

use crate::bt_dense::solve_lyapunov_dense;
use crate::dense::sorted_svd;
use crate::error::{MorError, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAXITER: usize = 100;
/// A new direction is dropped when orthogonalization shrinks it below this
/// fraction of its original norm.
pub const DEFLATION_TOL: f64 = 1e-10;
/// Singular values of the projected solution below this fraction of the
/// largest are discarded when forming `Z`.
pub const SVD_CUT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EksmOptions {
    pub tol: f64,
    pub maxiter: usize,
}

impl Default for EksmOptions {
    fn default() -> Self {
        EksmOptions {
            tol: DEFAULT_TOL,
            maxiter: DEFAULT_MAXITER,
        }
    }
}

/// One line of progress: iteration, basis size and relative residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EksmProgress {
    pub side: Side,
    pub iteration: usize,
    pub basis_size: usize,
    pub residual: f64,
}

/// Orthonormal extended Krylov basis and its projections.
#[derive(Debug, Clone)]
pub struct EksState {
    k: DMatrix<f64>,
    /// `G_C K`, kept so the forward half of the next block costs nothing.
    gk: DMatrix<f64>,
    a_proj: DMatrix<f64>,
    r_proj: DMatrix<f64>,
    j: usize,
    /// Column ranges of the latest block: forward part then inverse part.
    last_forward: (usize, usize),
    last_inverse: (usize, usize),
    deflated: usize,
    residuals: Vec<f64>,
}

impl EksState {
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.k
    }

    pub fn iteration(&self) -> usize {
        self.j
    }

    pub fn basis_size(&self) -> usize {
        self.k.ncols()
    }

    pub fn projected_matrix(&self) -> &DMatrix<f64> {
        &self.a_proj
    }

    pub fn projected_rhs(&self) -> &DMatrix<f64> {
        &self.r_proj
    }

    pub fn deflated(&self) -> usize {
        self.deflated
    }

    pub fn residual_history(&self) -> &[f64] {
        &self.residuals
    }
}

/// Orthogonalizes `v` against `k` (two passes), then column by column
/// against the accepted new columns (two passes each). Returns the accepted
/// columns and, per input column, whether it survived.
fn orthonormalize(k: &DMatrix<f64>, mut v: DMatrix<f64>) -> (DMatrix<f64>, Vec<bool>) {
    let pre: Vec<f64> = v.column_iter().map(|c| c.norm()).collect();
    if k.ncols() > 0 {
        for _ in 0..2 {
            let coef = k.tr_mul(&v);
            v -= k * coef;
        }
    }
    let n = v.nrows();
    let mut accepted: Vec<nalgebra::DVector<f64>> = Vec::new();
    let mut kept = Vec::with_capacity(v.ncols());
    for (j, col) in v.column_iter().enumerate() {
        let mut w = col.into_owned();
        for _ in 0..2 {
            for q in &accepted {
                let d = q.dot(&w);
                w.axpy(-d, q, 1.0);
            }
        }
        let norm = w.norm();
        if pre[j] > 0.0 && norm >= DEFLATION_TOL * pre[j] && norm.is_finite() {
            accepted.push(w / norm);
            kept.push(true);
        } else {
            kept.push(false);
        }
    }
    let out = DMatrix::from_fn(n, accepted.len(), |i, c| accepted[c][i]);
    (out, kept)
}

/// `K = orth([B_C, G_C⁻¹ B_C])` with deflation.
pub fn initialize_basis(op: &OperatorPair) -> Result<EksState> {
    let rhs = op.rhs();
    let n = op.order();
    let scale = rhs.amax();
    if !(scale > 0.0) || !rhs.iter().all(|v| v.is_finite()) {
        return Err(MorError::NoExcitation);
    }
    let inv = op.apply_inv(rhs);
    let p = rhs.ncols();
    let mut v = DMatrix::zeros(n, 2 * p);
    v.columns_mut(0, p).copy_from(rhs);
    v.columns_mut(p, p).copy_from(&inv);
    let empty = DMatrix::zeros(n, 0);
    let (k, kept) = orthonormalize(&empty, v);
    let n_fwd = kept[..p].iter().filter(|&&b| b).count();
    if n_fwd == 0 {
        return Err(MorError::NoExcitation);
    }
    let n_inv = kept[p..].iter().filter(|&&b| b).count();
    let gk = op.apply(&k);
    let a_proj = k.tr_mul(&gk);
    let r_proj = k.tr_mul(rhs);
    Ok(EksState {
        deflated: 2 * p - k.ncols(),
        k,
        gk,
        a_proj,
        r_proj,
        j: 1,
        last_forward: (0, n_fwd),
        last_inverse: (n_fwd, n_fwd + n_inv),
        residuals: Vec::new(),
    })
}

/// Outcome of one basis extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extension {
    /// `n` new columns were appended.
    Extended(usize),
    /// Every candidate direction deflated; the subspace is invariant to
    /// working precision.
    Stagnated,
}

/// Appends `[G_C K_fwd, G_C⁻¹ K_inv]` built from the latest block.
pub fn extend_basis(state: &mut EksState, op: &OperatorPair) -> Result<Extension> {
    let n = op.order();
    let (f0, f1) = state.last_forward;
    let (i0, i1) = state.last_inverse;
    let fwd = state.gk.columns(f0, f1 - f0).into_owned();
    let inv = op.apply_inv(&state.k.columns(i0, i1 - i0).into_owned());
    let nf = fwd.ncols();
    let mut v = DMatrix::zeros(n, nf + inv.ncols());
    v.columns_mut(0, nf).copy_from(&fwd);
    v.columns_mut(nf, inv.ncols()).copy_from(&inv);
    let total = v.ncols();
    let (new, kept) = orthonormalize(&state.k, v);
    state.deflated += total - new.ncols();
    if new.ncols() == 0 {
        return Ok(Extension::Stagnated);
    }
    let new_fwd = kept[..nf].iter().filter(|&&b| b).count();
    let old = state.k.ncols();
    let added = new.ncols();
    let g_new = op.apply(&new);

    // Grow A = Kᵀ G_C K by its new border blocks.
    let mut a = DMatrix::zeros(old + added, old + added);
    a.view_mut((0, 0), (old, old)).copy_from(&state.a_proj);
    a.view_mut((0, old), (old, added)).copy_from(&state.k.tr_mul(&g_new));
    a.view_mut((old, 0), (added, old)).copy_from(&new.tr_mul(&state.gk));
    a.view_mut((old, old), (added, added)).copy_from(&new.tr_mul(&g_new));
    let mut r = DMatrix::zeros(old + added, op.rhs().ncols());
    r.rows_mut(0, old).copy_from(&state.r_proj);
    r.rows_mut(old, added).copy_from(&new.tr_mul(op.rhs()));

    state.k = concat_columns(&state.k, &new);
    state.gk = concat_columns(&state.gk, &g_new);
    state.a_proj = a;
    state.r_proj = r;
    state.j += 1;
    state.last_forward = (old, old + new_fwd);
    state.last_inverse = (old + new_fwd, old + added);
    Ok(Extension::Extended(added))
}

fn concat_columns(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    out.columns_mut(0, a.ncols()).copy_from(a);
    out.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    out
}

/// Solves `A X + X Aᵀ + R Rᵀ = 0` for the projected pair.
pub fn project_and_solve(state: &EksState) -> Result<DMatrix<f64>> {
    solve_lyapunov_dense(&state.a_proj, &state.r_proj).map_err(|e| match e {
        MorError::Unstable(detail) => MorError::ProjectedUnstable {
            iteration: state.j,
            detail,
        },
        other => other,
    })
}

/// `‖G_C K X Kᵀ + K X Kᵀ G_Cᵀ + B_C B_Cᵀ‖_F / ‖B_C B_Cᵀ‖_F` without
/// forming an `N x N` matrix.
///
/// With `G_C K = K A' + W` and `B_C = K R' + b`, where `W` and `b` are
/// orthogonal to `K`, the residual splits into orthogonal blocks
/// `K M Kᵀ + D Kᵀ + K Dᵀ + b bᵀ` with `M = A'X + XA'ᵀ + R'R'ᵀ` and
/// `D = W X + b R'ᵀ`, so its squared norm is
/// `‖M‖² + 2‖D‖² + ‖bᵀb‖²`.
pub fn residual_norm(state: &EksState, x: &DMatrix<f64>, op: &OperatorPair) -> f64 {
    let k = &state.k;
    let rhs = op.rhs();
    let mut w = &state.gk - k * &state.a_proj;
    let delta = k.tr_mul(&w);
    w -= k * &delta;
    let a = &state.a_proj + delta;
    let mut b = rhs - k * &state.r_proj;
    let rdelta = k.tr_mul(&b);
    b -= k * &rdelta;
    let r = &state.r_proj + rdelta;

    let ax = &a * x;
    let m = &ax + ax.transpose() + &r * r.transpose();
    let d = &w * x + &b * r.transpose();
    let btb = b.tr_mul(&b);
    let num = (m.norm_squared() + 2.0 * d.norm_squared() + btb.norm_squared()).sqrt();
    num / rhs.tr_mul(rhs).norm()
}

/// Low-rank factor `Z` with `Z Zᵀ` approximating a Gramian.
#[derive(Debug, Clone)]
pub struct LowRankFactor {
    /// `N x k`, in the coordinates of the descriptor system.
    pub z: DMatrix<f64>,
    /// Retained singular values of the projected solution.
    pub singular_values: Vec<f64>,
    pub side: Side,
    pub converged: bool,
    pub iterations: usize,
    pub residual: f64,
    pub residual_history: Vec<f64>,
    pub basis_size: usize,
    pub deflated: usize,
}

impl LowRankFactor {
    pub fn rank(&self) -> usize {
        self.z.ncols()
    }
}

fn factor_from(state: &EksState, x: &DMatrix<f64>, op: &OperatorPair) -> (DMatrix<f64>, Vec<f64>) {
    // The basis only grows, so the first `x.nrows()` columns are the basis
    // that produced `x`.
    let basis = state.k.columns(0, x.nrows());
    let (u, s, _) = sorted_svd(x);
    let cut = SVD_CUT * s.first().copied().unwrap_or(0.0);
    let k = s.iter().take_while(|&&v| v > cut).count();
    let mut us = u.columns(0, k).into_owned();
    for c in 0..k {
        us.column_mut(c).scale_mut(s[c].sqrt());
    }
    let z_hat = basis * us;
    (op.to_original(&z_hat), s[..k].to_vec())
}

pub fn eksm_solve(op: &OperatorPair, options: &EksmOptions) -> Result<LowRankFactor> {
    eksm_solve_with_progress(op, options, &|_| {})
}

/// Runs the iteration, reporting every residual evaluation. On
/// non-convergence the iterate with the smallest residual is returned with
/// `converged == false`.
pub fn eksm_solve_with_progress(
    op: &OperatorPair,
    options: &EksmOptions,
    progress: &(dyn Fn(&EksmProgress) + Sync),
) -> Result<LowRankFactor> {
    if !(options.tol > 0.0) {
        return Err(MorError::InvalidArgument(format!("tolerance {} must be positive", options.tol)));
    }
    if options.maxiter == 0 {
        return Err(MorError::InvalidArgument("maxiter must be at least 1".into()));
    }
    let mut state = initialize_basis(op)?;
    let mut best: Option<(f64, DMatrix<f64>)> = None;
    let converged = loop {
        let x = project_and_solve(&state)?;
        let res = residual_norm(&state, &x, op);
        state.residuals.push(res);
        progress(&EksmProgress {
            side: op.side(),
            iteration: state.j,
            basis_size: state.k.ncols(),
            residual: res,
        });
        if best.as_ref().is_none_or(|b| res < b.0) || res <= options.tol {
            best = Some((res, x));
        }
        if res <= options.tol {
            break true;
        }
        if state.j >= options.maxiter {
            break false;
        }
        match extend_basis(&mut state, op)? {
            Extension::Extended(_) => {}
            Extension::Stagnated => break false,
        }
    };
    let (residual, x) = best.expect("at least one iterate");
    let basis_size = x.nrows();
    let (z, singular_values) = factor_from(&state, &x, op);
    Ok(LowRankFactor {
        z,
        singular_values,
        side: op.side(),
        converged,
        iterations: state.j,
        residual,
        residual_history: state.residuals,
        basis_size,
        deflated: state.deflated,
    })
}
