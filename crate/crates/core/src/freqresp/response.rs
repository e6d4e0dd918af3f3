use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dense::checked_lu;
use crate::error::{MorError, Result};
use crate::freqresp::FrequencyGrid;
use crate::model::{DescriptorSystem, ParameterKind};
use crate::rom::ReducedOrderModel;
use crate::sparse::{minimum_degree, CscMatrix, SparseLu};

pub type CMatrix = DMatrix<Complex64>;

/// Anything with a transfer function `H(jω)`.
pub trait FrequencyModel: Sync {
    fn inputs(&self) -> usize;
    fn outputs(&self) -> usize;
    fn kind(&self) -> ParameterKind;
    /// `H(jω)` at each requested angular frequency, in order.
    fn evaluate(&self, omegas: &[f64]) -> Result<Vec<CMatrix>>;
}

/// `H(jω) = L (jωC − G)⁻¹ B` sampled on a set of angular frequencies.
#[derive(Debug, Clone)]
pub struct TransferFunctionSamples {
    pub omegas: Vec<f64>,
    pub values: Vec<CMatrix>,
    pub kind: ParameterKind,
}

impl TransferFunctionSamples {
    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }
}

pub fn transfer_function(model: &dyn FrequencyModel, grid: &FrequencyGrid) -> Result<TransferFunctionSamples> {
    transfer_function_at(model, &grid.omegas())
}

/// Evaluates at arbitrary angular frequencies (zero and negative allowed).
pub fn transfer_function_at(model: &dyn FrequencyModel, omegas: &[f64]) -> Result<TransferFunctionSamples> {
    let values = model.evaluate(omegas)?;
    for (w, h) in omegas.iter().zip(&values) {
        if !h.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(MorError::SingularPencil { omega: *w });
        }
    }
    Ok(TransferFunctionSamples {
        omegas: omegas.to_vec(),
        values,
        kind: model.kind(),
    })
}

impl FrequencyModel for DescriptorSystem {
    fn inputs(&self) -> usize {
        DescriptorSystem::inputs(self)
    }

    fn outputs(&self) -> usize {
        DescriptorSystem::outputs(self)
    }

    fn kind(&self) -> ParameterKind {
        DescriptorSystem::kind(self)
    }

    /// One sparse complex LU of `jωC − G` per point, sharing a fill-reducing
    /// ordering computed once on the union pattern.
    fn evaluate(&self, omegas: &[f64]) -> Result<Vec<CMatrix>> {
        let n = self.order();
        let pattern: Vec<(usize, usize, f64)> = self
            .c()
            .triplets()
            .chain(self.g().triplets())
            .map(|(i, j, _)| (i, j, 1.0))
            .collect();
        let order = minimum_degree(&CscMatrix::from_triplets(n, n, &pattern));
        let b = self.b().to_dense();
        let l = self.l();
        let results = crate::par::map_slice(omegas, |&w| -> Result<CMatrix> {
            let trip: Vec<(usize, usize, Complex64)> = self
                .c()
                .triplets()
                .map(|(i, j, v)| (i, j, Complex64::new(0.0, w * v)))
                .chain(self.g().triplets().map(|(i, j, v)| (i, j, Complex64::new(-v, 0.0))))
                .collect();
            let pencil = CscMatrix::from_triplets(n, n, &trip);
            let lu = SparseLu::factor_ordered(&pencil, &order, "jwC - G").map_err(|_| MorError::SingularPencil { omega: w })?;
            let p = b.ncols();
            let mut h = CMatrix::zeros(l.nrows(), p);
            for k in 0..p {
                let mut x: Vec<Complex64> = b.column(k).iter().map(|&v| Complex64::new(v, 0.0)).collect();
                lu.solve_in_place(&mut x);
                let y = l.mul_vec_complex(&x);
                for (i, yi) in y.into_iter().enumerate() {
                    h[(i, k)] = yi;
                }
            }
            Ok(h)
        });
        results.into_iter().collect()
    }
}

/// Dense model reduced once to Hessenberg form `A = Q H Qᵀ`, so that each
/// frequency needs only an `O(r²)` Hessenberg solve.
pub struct HessenbergModel {
    h: DMatrix<f64>,
    b: DMatrix<f64>,
    l: DMatrix<f64>,
    kind: ParameterKind,
}

impl HessenbergModel {
    pub fn new(g: &DMatrix<f64>, c: &DMatrix<f64>, b: &DMatrix<f64>, l: &DMatrix<f64>, kind: ParameterKind) -> Result<Self> {
        let r = g.nrows();
        let (a, bc) = if c == &DMatrix::identity(r, r) {
            (g.clone(), b.clone())
        } else {
            let lu = checked_lu(c, "C")?;
            (lu.solve(g).expect("checked"), lu.solve(b).expect("checked"))
        };
        let (q, h) = nalgebra::linalg::Hessenberg::new(a).unpack();
        Ok(HessenbergModel {
            b: q.tr_mul(&bc),
            l: l * &q,
            h,
            kind,
        })
    }

    fn solve_at(&self, w: f64) -> Result<CMatrix> {
        let r = self.h.nrows();
        let p = self.b.ncols();
        // M = jωI − H, upper Hessenberg; elimination with adjacent-row pivoting.
        let mut m = CMatrix::from_fn(r, r, |i, j| {
            let v = Complex64::new(-self.h[(i, j)], 0.0);
            if i == j {
                v + Complex64::new(0.0, w)
            } else {
                v
            }
        });
        let mut x = CMatrix::from_fn(r, p, |i, j| Complex64::new(self.b[(i, j)], 0.0));
        let scale = m.iter().fold(0.0f64, |a, z| a.max(z.norm()));
        for k in 0..r.saturating_sub(1) {
            if m[(k + 1, k)].norm() > m[(k, k)].norm() {
                m.swap_rows(k, k + 1);
                x.swap_rows(k, k + 1);
            }
            let piv = m[(k, k)];
            if piv.norm() <= 1e-14 * scale {
                return Err(MorError::SingularPencil { omega: w });
            }
            let f = m[(k + 1, k)] / piv;
            if f != Complex64::new(0.0, 0.0) {
                for j in k..r {
                    let t = m[(k, j)];
                    m[(k + 1, j)] -= f * t;
                }
                for j in 0..p {
                    let t = x[(k, j)];
                    x[(k + 1, j)] -= f * t;
                }
            }
        }
        if r > 0 && m[(r - 1, r - 1)].norm() <= 1e-14 * scale {
            return Err(MorError::SingularPencil { omega: w });
        }
        for j in 0..p {
            for i in (0..r).rev() {
                let mut s = x[(i, j)];
                for c in i + 1..r {
                    s -= m[(i, c)] * x[(c, j)];
                }
                x[(i, j)] = s / m[(i, i)];
            }
        }
        let lc = self.l.map(|v| Complex64::new(v, 0.0));
        Ok(lc * x)
    }
}

impl FrequencyModel for HessenbergModel {
    fn inputs(&self) -> usize {
        self.b.ncols()
    }

    fn outputs(&self) -> usize {
        self.l.nrows()
    }

    fn kind(&self) -> ParameterKind {
        self.kind
    }

    fn evaluate(&self, omegas: &[f64]) -> Result<Vec<CMatrix>> {
        crate::par::map_slice(omegas, |&w| self.solve_at(w)).into_iter().collect()
    }
}

impl FrequencyModel for ReducedOrderModel {
    fn inputs(&self) -> usize {
        self.b.ncols()
    }

    fn outputs(&self) -> usize {
        self.l.nrows()
    }

    fn kind(&self) -> ParameterKind {
        self.kind
    }

    fn evaluate(&self, omegas: &[f64]) -> Result<Vec<CMatrix>> {
        HessenbergModel::new(&self.g, &self.c, &self.b, &self.l, self.kind)?.evaluate(omegas)
    }
}
