use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{MorError, Result};
use crate::model::mtx::{read_mtx, write_mtx};
use crate::model::system::{DescriptorSystem, ParameterKind, Structure};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFiles {
    #[serde(rename = "G")]
    pub g: String,
    #[serde(rename = "C")]
    pub c: String,
    #[serde(rename = "B")]
    pub b: String,
    #[serde(rename = "L")]
    pub l: String,
}

impl Default for MatrixFiles {
    fn default() -> Self {
        MatrixFiles {
            g: "G.mtx".into(),
            c: "C.mtx".into(),
            b: "B.mtx".into(),
            l: "L.mtx".into(),
        }
    }
}

/// JSON side-car describing a system stored as four matrix files. Paths
/// are relative to the manifest's directory. Unknown keys are ignored, so
/// reduced-model manifests load through the same type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemManifest {
    pub files: MatrixFiles,
    pub ports: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branches: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<ParameterKind>,
}

/// Paths of the four matrices of a system.
#[derive(Debug, Clone)]
pub struct MatrixPaths {
    pub g: PathBuf,
    pub c: PathBuf,
    pub b: PathBuf,
    pub l: PathBuf,
}

/// Loads `G, C, B, L` from MatrixMarket files. Without an explicit kind the
/// system is treated as an impedance model when `L = Bᵀ`.
pub fn load_matrices(
    paths: &MatrixPaths,
    structure: Structure,
    ports: Option<Vec<String>>,
    kind: Option<ParameterKind>,
) -> Result<DescriptorSystem> {
    let g = read_mtx(&paths.g)?;
    let c = read_mtx(&paths.c)?;
    let b = read_mtx(&paths.b)?;
    let l = read_mtx(&paths.l)?;
    let ports = ports.unwrap_or_else(|| (1..=b.ncols()).map(|i| format!("P{i}")).collect());
    let kind = kind.unwrap_or_else(|| {
        if l == b.transpose() {
            ParameterKind::Impedance
        } else {
            ParameterKind::Generic
        }
    });
    DescriptorSystem::new(g, c, b, l, structure, ports, kind)
}

pub fn read_manifest(path: &Path) -> Result<SystemManifest> {
    let text = std::fs::read_to_string(path).map_err(|e| MorError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| MorError::format(path, e.to_string()))
}

pub fn load_manifest(path: &Path) -> Result<DescriptorSystem> {
    let manifest = read_manifest(path)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let structure = match (manifest.nodes, manifest.branches) {
        (Some(nodes), Some(branches)) => Structure::Mna { nodes, branches },
        (None, None) => Structure::General,
        _ => {
            return Err(MorError::format(
                path,
                "'nodes' and 'branches' must be given together",
            ))
        }
    };
    let paths = MatrixPaths {
        g: dir.join(&manifest.files.g),
        c: dir.join(&manifest.files.c),
        b: dir.join(&manifest.files.b),
        l: dir.join(&manifest.files.l),
    };
    load_matrices(&paths, structure, Some(manifest.ports), manifest.kind)
}

/// Writes `G.mtx`, `C.mtx` (symmetric storage), `B.mtx`, `L.mtx` and
/// `manifest.json` into `dir`, returning the manifest path.
pub fn save_system(sys: &DescriptorSystem, dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| MorError::io(dir, e))?;
    let files = MatrixFiles::default();
    write_mtx(&dir.join(&files.g), sys.g(), false)?;
    write_mtx(&dir.join(&files.c), sys.c(), true)?;
    write_mtx(&dir.join(&files.b), sys.b(), false)?;
    write_mtx(&dir.join(&files.l), sys.l(), false)?;
    let (nodes, branches) = match sys.structure() {
        Structure::Mna { nodes, branches } => (Some(nodes), Some(branches)),
        Structure::General => (None, None),
    };
    let manifest = SystemManifest {
        files,
        ports: sys.ports().to_vec(),
        nodes,
        branches,
        kind: Some(sys.kind()),
    };
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&path, text).map_err(|e| MorError::io(&path, e))?;
    Ok(path)
}
