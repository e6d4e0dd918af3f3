use nalgebra::DMatrix;

use crate::dense::{solve_small, symmetrize, RealSchur};
use crate::error::{MorError, Result};

/// Eigenvalues with `Re(λ) >= -STABILITY_MARGIN * ‖A‖_F` count as unstable.
pub const STABILITY_MARGIN: f64 = 1e-13;

/// Solves `A X + X Aᵀ + W Wᵀ = 0` by Bartels–Stewart on the real Schur
/// form of `A`. `A` must be stable.
pub fn solve_lyapunov_dense(a: &DMatrix<f64>, w: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(MorError::DimensionMismatch(format!("A is {}x{}", n, a.ncols())));
    }
    if w.nrows() != n {
        return Err(MorError::DimensionMismatch(format!(
            "W has {} rows, A is {n}x{n}",
            w.nrows()
        )));
    }
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let schur = RealSchur::new(a)?;
    let margin = STABILITY_MARGIN * a.norm();
    let alpha = schur.spectral_abscissa();
    if !(alpha < -margin) {
        return Err(MorError::Unstable(format!(
            "eigenvalue with real part {alpha:.6e} (threshold {:.3e})",
            -margin
        )));
    }
    let uw = schur.u.tr_mul(w);
    let f = -(&uw * uw.transpose());
    let y = solve_quasi_triangular(&schur.t, &schur.blocks, &f)?;
    let mut x = &schur.u * y * schur.u.transpose();
    symmetrize(&mut x);
    Ok(x)
}

/// Solves `T Y + Y Tᵀ = F` for quasi-upper-triangular `T`, sweeping block
/// columns and block rows from the bottom-right corner.
fn solve_quasi_triangular(t: &DMatrix<f64>, blocks: &[(usize, usize)], f: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = t.nrows();
    let mut y = DMatrix::<f64>::zeros(n, n);
    for &(k0, sk) in blocks.iter().rev() {
        let k_end = k0 + sk;
        // Contribution of the already solved block columns: Y[:, k+] T[k, k+]ᵀ.
        let z = if k_end < n {
            y.columns(k_end, n - k_end) * t.view((k0, k_end), (sk, n - k_end)).transpose()
        } else {
            DMatrix::zeros(n, sk)
        };
        for &(i0, si) in blocks.iter().rev() {
            let i_end = i0 + si;
            let mut rhs = f.view((i0, k0), (si, sk)) - z.rows(i0, si);
            if i_end < n {
                rhs -= t.view((i0, i_end), (si, n - i_end)) * y.view((i_end, k0), (n - i_end, sk));
            }
            // (I ⊗ T_ii + T_kk ⊗ I) vec(Y_ik) = vec(rhs), column-major vec.
            let dim = si * sk;
            let mut mat = [0.0; 16];
            let mut vec = [0.0; 4];
            for c in 0..sk {
                for r in 0..si {
                    let row = c * si + r;
                    vec[row] = rhs[(r, c)];
                    for c2 in 0..sk {
                        for r2 in 0..si {
                            let col = c2 * si + r2;
                            let mut v = 0.0;
                            if c == c2 {
                                v += t[(i0 + r, i0 + r2)];
                            }
                            if r == r2 {
                                v += t[(k0 + c, k0 + c2)];
                            }
                            mat[row * dim + col] = v;
                        }
                    }
                }
            }
            if !solve_small(&mut mat[..dim * dim], &mut vec[..dim], dim) {
                return Err(MorError::Unstable(
                    "eigenvalues sum to zero; Lyapunov operator is singular".into(),
                ));
            }
            for c in 0..sk {
                for r in 0..si {
                    y[(i0 + r, k0 + c)] = vec[c * si + r];
                }
            }
        }
    }
    Ok(y)
}

/// `‖A X + X Aᵀ + W Wᵀ‖_F / ‖W Wᵀ‖_F`.
pub fn lyapunov_residual(a: &DMatrix<f64>, x: &DMatrix<f64>, w: &DMatrix<f64>) -> f64 {
    let ax = a * x;
    let wwt = w * w.transpose();
    (&ax + ax.transpose() + &wwt).norm() / wwt.norm()
}
