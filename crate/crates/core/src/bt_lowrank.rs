//! Square-root balanced truncation from low-rank Gramian factors.

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::eksm::{LowRankFactor, Side, SystemFactors};
use crate::error::{MorError, Result};
use crate::model::{write_dense_mtx, DescriptorSystem, MatrixFiles, ParameterKind};
use crate::rom::{BalancingTransform, SquareRoot, EksmSummary, Method, Provenance, ReducedOrderModel, Target};

/// Builds the reduced model `G̃ = T C⁻¹G Ti`, `C̃ = I`, `B̃ = T C⁻¹B`,
/// `L̃ = L Ti` from factors of `P` and `Q`.
pub fn square_root_bt(
    zp: &LowRankFactor,
    zq: &LowRankFactor,
    sys: &DescriptorSystem,
    factors: &SystemFactors,
    target: Target,
) -> Result<(ReducedOrderModel, BalancingTransform)> {
    if zp.side != Side::Controllability || zq.side != Side::Observability {
        return Err(MorError::InvalidArgument(
            "expected a controllability factor and an observability factor".into(),
        ));
    }
    let n = sys.order();
    if zp.z.nrows() != n || zq.z.nrows() != n || factors.order() != n {
        return Err(MorError::DimensionMismatch(format!(
            "factors have {} and {} rows, system order is {n}",
            zp.z.nrows(),
            zq.z.nrows()
        )));
    }
    let mut warnings = Vec::new();
    for (name, f) in [("P", zp), ("Q", zq)] {
        if !f.converged {
            warnings.push(format!(
                "{name} factor did not converge (residual {:.3e} after {} iterations); error bound is approximate",
                f.residual, f.iterations
            ));
        }
    }
    let root = SquareRoot::new(&zp.z, &zq.z);
    let tf = root.bases(target, &mut warnings)?;
    let hsv = root.hsv;
    let r = tf.t.nrows();
    let g_ti = sys.g().mul_dense(&tf.ti);
    let g = &tf.t * factors.solve_c(&g_ti);
    let b = &tf.t * factors.solve_c(&sys.b().to_dense());
    let l = sys.l().mul_dense(&tf.ti);
    let rom = ReducedOrderModel {
        g,
        c: DMatrix::identity(r, r),
        b,
        l,
        error_bound: hsv.tail_bound(r),
        hsv,
        ports: sys.ports().to_vec(),
        kind: sys.kind(),
        provenance: Provenance {
            method: Method::Eksm,
            warnings,
            eksm: None,
        },
    };
    Ok((rom, tf))
}

#[derive(Serialize)]
struct RomManifest<'a> {
    order: usize,
    ports: &'a [String],
    files: MatrixFiles,
    kind: ParameterKind,
    hsv: &'a [f64],
    error_bound: f64,
    method: Method,
    eksm: Option<&'a EksmSummary>,
    warnings: &'a [String],
}

/// Writes the reduced matrices as full coordinate listings plus
/// `manifest.json`. Output depends only on the model, so identical models
/// give byte-identical directories.
pub fn export_rom(rom: &ReducedOrderModel, dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| MorError::io(dir, e))?;
    let files = MatrixFiles::default();
    write_dense_mtx(&dir.join(&files.g), &rom.g)?;
    write_dense_mtx(&dir.join(&files.c), &rom.c)?;
    write_dense_mtx(&dir.join(&files.b), &rom.b)?;
    write_dense_mtx(&dir.join(&files.l), &rom.l)?;
    let manifest = RomManifest {
        order: rom.order(),
        ports: &rom.ports,
        files,
        kind: rom.kind,
        hsv: rom.hsv.values(),
        error_bound: rom.error_bound,
        method: rom.provenance.method,
        eksm: rom.provenance.eksm.as_ref(),
        warnings: &rom.provenance.warnings,
    };
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&path, text + "\n").map_err(|e| MorError::io(&path, e))?;
    Ok(path)
}
