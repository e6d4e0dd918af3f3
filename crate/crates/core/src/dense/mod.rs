//! Small dense helpers shared by the solvers.

mod schur;

pub use schur::real_schur;

use nalgebra::DMatrix;

use crate::error::{MorError, Result};

/// Relative pivot threshold below which a dense LU factor is called singular.
pub const SINGULAR_PIVOT: f64 = 1e-14;

/// Thin SVD with singular values in descending order: `m = U diag(s) Vᵀ`.
pub fn sorted_svd(m: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("U requested");
    let vt = svd.v_t.expect("Vᵀ requested");
    let s: Vec<f64> = svd.singular_values.iter().copied().collect();
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
    let u = DMatrix::from_fn(u.nrows(), order.len(), |i, k| u[(i, order[k])]);
    let vt = DMatrix::from_fn(order.len(), vt.ncols(), |k, j| vt[(order[k], j)]);
    let s = order.iter().map(|&k| s[k]).collect();
    (u, s, vt)
}

/// LU factorization that refuses numerically singular matrices.
pub fn checked_lu(m: &DMatrix<f64>, name: &str) -> Result<nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>> {
    let scale = m.amax();
    let lu = m.clone().lu();
    let u = lu.u();
    for k in 0..u.nrows() {
        let p = u[(k, k)].abs();
        if !(p > SINGULAR_PIVOT * scale) {
            return Err(MorError::Singular {
                name: name.to_string(),
                step: k,
                pivot: p,
            });
        }
    }
    Ok(lu)
}

/// Solves `m X = rhs`, failing on a singular `m`.
pub fn solve(m: &DMatrix<f64>, rhs: &DMatrix<f64>, name: &str) -> Result<DMatrix<f64>> {
    let lu = checked_lu(m, name)?;
    Ok(lu.solve(rhs).expect("nonsingular by construction"))
}

pub fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for j in 0..n {
        for i in j + 1..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Real Schur form `A = U T Uᵀ` with the diagonal block partition of `T`.
pub struct RealSchur {
    pub u: DMatrix<f64>,
    pub t: DMatrix<f64>,
    /// `(start, size)` of each 1x1 or 2x2 diagonal block.
    pub blocks: Vec<(usize, usize)>,
}

impl RealSchur {
    pub fn new(a: &DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        if !a.iter().all(|v| v.is_finite()) {
            return Err(MorError::InvalidArgument("matrix has non-finite entries".into()));
        }
        let (u, t) = real_schur(a).ok_or(MorError::SchurNonConvergence(n))?;
        let mut blocks = Vec::new();
        let mut i = 0;
        while i < n {
            if i + 1 < n && t[(i + 1, i)] != 0.0 {
                if i + 2 < n && t[(i + 2, i + 1)] != 0.0 {
                    return Err(MorError::SchurNonConvergence(n));
                }
                blocks.push((i, 2));
                i += 2;
            } else {
                blocks.push((i, 1));
                i += 1;
            }
        }
        Ok(RealSchur { u, t, blocks })
    }

    /// Largest real part over the eigenvalues.
    pub fn spectral_abscissa(&self) -> f64 {
        self.blocks
            .iter()
            .map(|&(s, size)| {
                if size == 1 {
                    self.t[(s, s)]
                } else {
                    let (a, b, c, d) = (
                        self.t[(s, s)],
                        self.t[(s, s + 1)],
                        self.t[(s + 1, s)],
                        self.t[(s + 1, s + 1)],
                    );
                    let half = 0.5 * (a - d);
                    let disc = half * half + b * c;
                    0.5 * (a + d) + disc.max(0.0).sqrt()
                }
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Gaussian elimination with partial pivoting on a tiny system, in place.
/// Returns `false` when a zero pivot is met.
pub(crate) fn solve_small(a: &mut [f64], b: &mut [f64], n: usize) -> bool {
    for k in 0..n {
        let mut p = k;
        for i in k + 1..n {
            if a[i * n + k].abs() > a[p * n + k].abs() {
                p = i;
            }
        }
        if a[p * n + k] == 0.0 {
            return false;
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            b.swap(k, p);
        }
        for i in k + 1..n {
            let f = a[i * n + k] / a[k * n + k];
            if f != 0.0 {
                for j in k..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
                b[i] -= f * b[k];
            }
        }
    }
    for k in (0..n).rev() {
        let mut s = b[k];
        for j in k + 1..n {
            s -= a[k * n + j] * b[j];
        }
        b[k] = s / a[k * n + k];
    }
    true
}
