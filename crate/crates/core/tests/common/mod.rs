//! Helpers shared by the integration tests: small systems, ladders and
//! dense oracles that do not go through the library's solvers.

#![allow(dead_code)]

use mor_core::model::{assemble_mna, AssemblyOptions, DescriptorSystem, ParameterKind};
use mor_core::synth::{rlc_ladder, LadderSpec};
use nalgebra::{dmatrix, DMatrix};
use num_complex::Complex64;

pub use mor_core::freqresp::CMatrix;

/// `C x' = G x + B u`, `y = L x` with scalar entries.
pub fn scalar(g: f64, c: f64, b: f64, l: f64) -> DescriptorSystem {
    DescriptorSystem::from_dense(&dmatrix![g], &dmatrix![c], &dmatrix![b], &dmatrix![l], ParameterKind::Impedance).unwrap()
}

pub fn ladder(lines: usize, sections: usize, seed: u64) -> DescriptorSystem {
    let spec = LadderSpec { lines, sections, seed, ..Default::default() };
    assemble_mna(&rlc_ladder(&spec), &AssemblyOptions::default()).unwrap()
}

/// RC-only ladder: series resistors, shunt capacitors, port at the near end.
pub fn rc_ladder(sections: usize) -> DescriptorSystem {
    let mut text = String::from("* rc ladder\n");
    for s in 0..sections {
        text += &format!("R{s} {} {} {}\n", s + 1, s + 2, 10.0 + s as f64);
        text += &format!("C{s} {} 0 {}p\n", s + 2, 1.0 + 0.1 * s as f64);
    }
    text += "Cin 1 0 0.5p\nRin 1 0 1k\nP1 1\n";
    let list = mor_core::model::parse_netlist(&text).unwrap();
    assemble_mna(&list, &AssemblyOptions::default()).unwrap()
}

/// `L (jωC − G)⁻¹ B` through a dense complex LU.
pub fn dense_h(sys: &DescriptorSystem, omega: f64) -> CMatrix {
    dense_h_parts(&sys.g().to_dense(), &sys.c().to_dense(), &sys.b().to_dense(), &sys.l().to_dense(), omega)
}

pub fn dense_h_parts(g: &DMatrix<f64>, c: &DMatrix<f64>, b: &DMatrix<f64>, l: &DMatrix<f64>, omega: f64) -> CMatrix {
    let n = g.nrows();
    let m = CMatrix::from_fn(n, n, |i, j| Complex64::new(-g[(i, j)], omega * c[(i, j)]));
    let bc = b.map(|v| Complex64::new(v, 0.0));
    let x = m.lu().solve(&bc).expect("nonsingular pencil");
    l.map(|v| Complex64::new(v, 0.0)) * x
}

/// Largest singular value of a complex matrix.
pub fn norm2(m: &CMatrix) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}

/// Dense state matrices `A = C⁻¹G`, `B_C = C⁻¹B`.
pub fn state_space(sys: &DescriptorSystem) -> (DMatrix<f64>, DMatrix<f64>) {
    let lu = sys.c().to_dense().lu();
    (lu.solve(&sys.g().to_dense()).unwrap(), lu.solve(&sys.b().to_dense()).unwrap())
}

/// Solves `A X + X Aᵀ + W Wᵀ = 0` through the Kronecker form
/// `(I ⊗ A + A ⊗ I) vec X = −vec(W Wᵀ)`. Only for small `A`.
pub fn lyapunov_kron(a: &DMatrix<f64>, w: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let i = DMatrix::<f64>::identity(n, n);
    let k = i.kronecker(a) + a.kronecker(&i);
    let rhs = -(w * w.transpose());
    let vec = DMatrix::from_column_slice(n * n, 1, rhs.as_slice());
    let x = k.lu().solve(&vec).unwrap();
    DMatrix::from_column_slice(n, n, x.as_slice())
}

pub fn lyapunov_residual(a: &DMatrix<f64>, w: &DMatrix<f64>, x: &DMatrix<f64>) -> f64 {
    let wwt = w * w.transpose();
    (a * x + x * a.transpose() + &wwt).norm() / wwt.norm()
}

/// `n` log-spaced angular frequencies in `[lo, hi]`.
pub fn log_omegas(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64))
        .collect()
}

/// `‖KᵀK − I‖_max`.
pub fn orthonormality_error(k: &DMatrix<f64>) -> f64 {
    (k.tr_mul(k) - DMatrix::identity(k.ncols(), k.ncols())).amax()
}
