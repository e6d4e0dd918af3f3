use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{MorError, Result};
use crate::model::DescriptorSystem;
use crate::sparse::{CscMatrix, SparseCholesky, SparseLu};

/// Which Gramian an operator belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `A P + P Aᵀ + B_C B_Cᵀ = 0`.
    Controllability,
    /// `Aᵀ Q + Q A + Lᵀ L = 0`.
    Observability,
}

/// Coordinates in which the Krylov projection is carried out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Formulation {
    /// With `C = R Rᵀ`, iterate on `R⁻¹ G R⁻ᵀ`. For RLC models this
    /// operator has a negative semidefinite symmetric part, so every
    /// orthogonal projection of it is stable.
    #[default]
    Symmetrized,
    /// Iterate on `C⁻¹ G` (and `Gᵀ C⁻ᵀ`) directly.
    Descriptor,
}

impl Formulation {
    pub fn name(self) -> &'static str {
        match self {
            Formulation::Symmetrized => "symmetrized",
            Formulation::Descriptor => "descriptor",
        }
    }
}

impl std::str::FromStr for Formulation {
    type Err = MorError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "symmetrized" => Ok(Formulation::Symmetrized),
            "descriptor" => Ok(Formulation::Descriptor),
            other => Err(MorError::InvalidArgument(format!("unknown formulation '{other}'"))),
        }
    }
}

/// Factorizations of `G` and `C`, computed once and shared read-only by
/// both sides.
pub struct SystemFactors {
    g: CscMatrix,
    gt: CscMatrix,
    g_lu: SparseLu<f64>,
    c: CscMatrix,
    c_chol: SparseCholesky,
    b: CscMatrix,
    l: CscMatrix,
    formulation: Formulation,
}

impl SystemFactors {
    pub fn new(sys: &DescriptorSystem, formulation: Formulation) -> Result<Self> {
        let c_chol = SparseCholesky::factor(sys.c(), "C")?;
        let g_lu = SparseLu::factor(sys.g(), "G")?;
        Ok(SystemFactors {
            g: sys.g().clone(),
            gt: sys.g().transpose(),
            g_lu,
            c: sys.c().clone(),
            c_chol,
            b: sys.b().clone(),
            l: sys.l().clone(),
            formulation,
        })
    }

    pub fn formulation(&self) -> Formulation {
        self.formulation
    }

    pub fn order(&self) -> usize {
        self.g.nrows()
    }

    /// `C⁻¹ X`.
    pub fn solve_c(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        map_columns(x, |v| self.c_chol.solve(v))
    }

    pub fn g_matrix(&self) -> &CscMatrix {
        &self.g
    }
}

fn map_columns<F>(x: &DMatrix<f64>, f: F) -> DMatrix<f64>
where
    F: Fn(&[f64]) -> Vec<f64> + Sync + Send,
{
    let n = x.nrows();
    let cols = crate::par::map_indexed(x.ncols(), |j| f(x.column(j).as_slice()));
    let m = cols.first().map_or(n, Vec::len);
    DMatrix::from_fn(m, x.ncols(), |i, j| cols[j][i])
}

/// `G_C`, its inverse and the right-hand side block for one Gramian.
#[derive(Clone)]
pub struct OperatorPair {
    factors: Arc<SystemFactors>,
    side: Side,
    rhs: DMatrix<f64>,
}

/// Factorizes `sys` and returns the operator for `side`.
pub fn build_operator(sys: &DescriptorSystem, side: Side, formulation: Formulation) -> Result<OperatorPair> {
    let factors = Arc::new(SystemFactors::new(sys, formulation)?);
    Ok(OperatorPair::new(factors, side))
}

impl OperatorPair {
    pub fn new(factors: Arc<SystemFactors>, side: Side) -> Self {
        let f = &factors;
        let rhs = match (f.formulation, side) {
            (Formulation::Descriptor, Side::Controllability) => f.solve_c(&f.b.to_dense()),
            (Formulation::Descriptor, Side::Observability) => f.l.transpose().to_dense(),
            (Formulation::Symmetrized, Side::Controllability) => {
                map_columns(&f.b.to_dense(), |v| f.c_chol.solve_r(v))
            }
            (Formulation::Symmetrized, Side::Observability) => {
                map_columns(&f.l.transpose().to_dense(), |v| f.c_chol.solve_r(v))
            }
        };
        OperatorPair { factors, side, rhs }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn formulation(&self) -> Formulation {
        self.factors.formulation
    }

    pub fn factors(&self) -> &Arc<SystemFactors> {
        &self.factors
    }

    pub fn order(&self) -> usize {
        self.factors.order()
    }

    pub fn rhs(&self) -> &DMatrix<f64> {
        &self.rhs
    }

    fn apply_vec(&self, v: &[f64]) -> Vec<f64> {
        let f = &*self.factors;
        match (f.formulation, self.side) {
            (Formulation::Descriptor, Side::Controllability) => f.c_chol.solve(&f.g.mul_vec(v)),
            (Formulation::Descriptor, Side::Observability) => f.gt.mul_vec(&f.c_chol.solve(v)),
            (Formulation::Symmetrized, Side::Controllability) => {
                f.c_chol.solve_r(&f.g.mul_vec(&f.c_chol.solve_rt(v)))
            }
            (Formulation::Symmetrized, Side::Observability) => {
                f.c_chol.solve_r(&f.gt.mul_vec(&f.c_chol.solve_rt(v)))
            }
        }
    }

    fn apply_inv_vec(&self, v: &[f64]) -> Vec<f64> {
        let f = &*self.factors;
        match (f.formulation, self.side) {
            (Formulation::Descriptor, Side::Controllability) => f.g_lu.solve(&f.c.mul_vec(v)),
            (Formulation::Descriptor, Side::Observability) => f.c.mul_vec(&f.g_lu.solve_transpose(v)),
            (Formulation::Symmetrized, Side::Controllability) => {
                f.c_chol.mul_rt(&f.g_lu.solve(&f.c_chol.mul_r(v)))
            }
            (Formulation::Symmetrized, Side::Observability) => {
                f.c_chol.mul_rt(&f.g_lu.solve_transpose(&f.c_chol.mul_r(v)))
            }
        }
    }

    /// `G_C V`, column-parallel.
    pub fn apply(&self, v: &DMatrix<f64>) -> DMatrix<f64> {
        map_columns(v, |c| self.apply_vec(c))
    }

    /// `G_C⁻¹ V` through the cached factorizations.
    pub fn apply_inv(&self, v: &DMatrix<f64>) -> DMatrix<f64> {
        map_columns(v, |c| self.apply_inv_vec(c))
    }

    /// Maps a factor computed in operator coordinates back to the
    /// coordinates of the descriptor system.
    pub fn to_original(&self, z: &DMatrix<f64>) -> DMatrix<f64> {
        let f = &*self.factors;
        match (f.formulation, self.side) {
            (Formulation::Descriptor, _) => z.clone(),
            (Formulation::Symmetrized, Side::Controllability) => map_columns(z, |v| f.c_chol.solve_rt(v)),
            (Formulation::Symmetrized, Side::Observability) => map_columns(z, |v| f.c_chol.mul_r(v)),
        }
    }

    /// Dense `G_C`, for small-scale checks.
    pub fn to_dense(&self) -> DMatrix<f64> {
        self.apply(&DMatrix::identity(self.order(), self.order()))
    }
}
