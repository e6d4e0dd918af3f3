use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{MorError, Result};
use crate::sparse::{CscMatrix, SparseCholesky};

/// What the port transfer function represents. Current-driven ports
/// observed through node voltages give an impedance matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParameterKind {
    Impedance,
    Admittance,
    Generic,
}

/// Block layout of the state vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Structure {
    /// Node voltages followed by inductor branch currents.
    Mna { nodes: usize, branches: usize },
    /// No known block layout.
    General,
}

/// Tolerance factor for the symmetry check on `C`, relative to its
/// Frobenius norm.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// `C x' = G x + B u`, `y = L x`.
#[derive(Debug, Clone, PartialEq)]
pub struct DescriptorSystem {
    g: CscMatrix,
    c: CscMatrix,
    b: CscMatrix,
    l: CscMatrix,
    structure: Structure,
    ports: Vec<String>,
    kind: ParameterKind,
}

impl DescriptorSystem {
    /// Builds a system after checking dimensions, finiteness and symmetry
    /// of `C`.
    pub fn new(
        g: CscMatrix,
        c: CscMatrix,
        b: CscMatrix,
        l: CscMatrix,
        structure: Structure,
        ports: Vec<String>,
        kind: ParameterKind,
    ) -> Result<Self> {
        let n = g.nrows();
        let dim = |what: String| Err(MorError::DimensionMismatch(what));
        if g.ncols() != n {
            return dim(format!("G is {}x{}", g.nrows(), g.ncols()));
        }
        if c.nrows() != n || c.ncols() != n {
            return dim(format!("C is {}x{}, G is {n}x{n}", c.nrows(), c.ncols()));
        }
        if b.nrows() != n {
            return dim(format!("B has {} rows, expected {n}", b.nrows()));
        }
        if l.ncols() != n {
            return dim(format!("L has {} columns, expected {n}", l.ncols()));
        }
        if n == 0 || b.ncols() == 0 || l.nrows() == 0 {
            return Err(MorError::InvalidSystem("empty state, input or output dimension".into()));
        }
        if ports.len() != b.ncols() {
            return dim(format!("{} port names for {} inputs", ports.len(), b.ncols()));
        }
        if let Structure::Mna { nodes, branches } = structure {
            if nodes + branches != n {
                return dim(format!("{nodes} nodes + {branches} branches != {n}"));
            }
        }
        for (name, m) in [("G", &g), ("C", &c), ("B", &b), ("L", &l)] {
            if !m.is_finite() {
                return Err(MorError::InvalidSystem(format!("{name} has non-finite entries")));
            }
        }
        let asym = c.max_asymmetry();
        let allowed = SYMMETRY_TOLERANCE * c.norm_fro();
        if asym > allowed {
            return Err(MorError::NotSymmetric {
                name: "C".into(),
                asymmetry: asym,
                allowed,
            });
        }
        Ok(DescriptorSystem {
            g,
            c,
            b,
            l,
            structure,
            ports,
            kind,
        })
    }

    /// Dense convenience constructor for small or reduced models.
    pub fn from_dense(
        g: &DMatrix<f64>,
        c: &DMatrix<f64>,
        b: &DMatrix<f64>,
        l: &DMatrix<f64>,
        kind: ParameterKind,
    ) -> Result<Self> {
        let ports = (1..=b.ncols()).map(|i| format!("P{i}")).collect();
        Self::new(
            CscMatrix::from_dense(g),
            CscMatrix::from_dense(c),
            CscMatrix::from_dense(b),
            CscMatrix::from_dense(l),
            Structure::General,
            ports,
            kind,
        )
    }

    pub fn order(&self) -> usize {
        self.g.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.b.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.l.nrows()
    }

    pub fn g(&self) -> &CscMatrix {
        &self.g
    }

    pub fn c(&self) -> &CscMatrix {
        &self.c
    }

    pub fn b(&self) -> &CscMatrix {
        &self.b
    }

    pub fn l(&self) -> &CscMatrix {
        &self.l
    }

    pub fn structure(&self) -> Structure {
        self.structure
    }

    pub fn ports(&self) -> &[String] {
        &self.ports
    }

    pub fn kind(&self) -> ParameterKind {
        self.kind
    }

    pub fn with_kind(mut self, kind: ParameterKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn with_ports(mut self, ports: Vec<String>) -> Result<Self> {
        if ports.len() != self.b.ncols() {
            return Err(MorError::DimensionMismatch(format!(
                "{} port names for {} inputs",
                ports.len(),
                self.b.ncols()
            )));
        }
        self.ports = ports;
        Ok(self)
    }

    /// Node capacitance block `Cn` (the whole of `C` for general systems).
    pub fn c_nodal(&self) -> CscMatrix {
        match self.structure {
            Structure::Mna { nodes, .. } => self.c.leading_block(nodes),
            Structure::General => self.c.clone(),
        }
    }

    /// Branch inductance block `M` (empty for general systems).
    pub fn inductance(&self) -> DMatrix<f64> {
        match self.structure {
            Structure::Mna { nodes, branches } => self.c.block(nodes, branches, nodes, branches).to_dense(),
            Structure::General => DMatrix::zeros(0, 0),
        }
    }

    /// Runs the structural and definiteness checks. The eigenvalue-based
    /// stability check is only attempted when `order() <= dense_cap`.
    pub fn validate(&self, dense_cap: usize) -> ValidationReport {
        let mut report = ValidationReport::default();
        let n = self.order();
        report.push(
            "dimensions",
            true,
            format!("N = {n}, inputs = {}, outputs = {}", self.inputs(), self.outputs()),
        );
        report.push(
            "C symmetric",
            true,
            format!("max asymmetry {:.3e}", self.c.max_asymmetry()),
        );

        match self.structure {
            Structure::Mna { nodes, branches } => {
                let cn = self.c.leading_block(nodes);
                let cn_ok = SparseCholesky::factor(&cn, "Cn");
                report.push(
                    "Cn positive definite",
                    cn_ok.is_ok(),
                    cn_ok.err().map_or_else(|| "sparse Cholesky succeeded".into(), |e| e.to_string()),
                );
                let off = self.c.block(0, nodes, nodes, branches).max_abs();
                report.push("C block diagonal", off == 0.0, format!("max coupling entry {off:.3e}"));
                let m = self.inductance();
                let m_ok = branches == 0 || m.clone().cholesky().is_some();
                report.push(
                    "M positive definite",
                    m_ok,
                    format!("{branches} inductor branches"),
                );

                let gn = self.g.leading_block(nodes).scale(-1.0);
                let e = self.g.block(0, nodes, nodes, branches).scale(-1.0);
                let et = self.g.block(nodes, branches, 0, nodes);
                let zero = self.g.block(nodes, branches, nodes, branches).max_abs();
                let skew = e.transpose().add(&et.scale(-1.0)).max_abs();
                report.push(
                    "G block structure",
                    zero == 0.0 && skew <= 1e-15 * e.max_abs().max(1.0),
                    format!("branch block max {zero:.3e}, incidence mismatch {skew:.3e}"),
                );
                let gn_asym = gn.max_asymmetry();
                report.push(
                    "Gn symmetric",
                    gn_asym <= SYMMETRY_TOLERANCE * gn.norm_fro(),
                    format!("max asymmetry {gn_asym:.3e}"),
                );
                // Gn + tau I is positive definite iff lambda_min(Gn) > -tau.
                let tau = 1e-12 * gn.max_abs().max(f64::MIN_POSITIVE);
                let shifted = gn.add(&CscMatrix::identity(nodes).scale(tau));
                let psd = SparseCholesky::factor(&shifted, "Gn").is_ok();
                report.push("Gn positive semidefinite", psd, format!("shift {tau:.3e}"));
            }
            Structure::General => {
                let ok = SparseCholesky::factor(&self.c, "C");
                report.push(
                    "C positive definite",
                    ok.is_ok(),
                    ok.err().map_or_else(|| "sparse Cholesky succeeded".into(), |e| e.to_string()),
                );
            }
        }

        if n <= dense_cap {
            match crate::bt_dense::spectral_abscissa(self) {
                Ok((alpha, margin)) => report.push(
                    "stable",
                    alpha < -margin,
                    format!("max Re(lambda) = {alpha:.6e}"),
                ),
                Err(e) => report.push("stable", false, e.to_string()),
            }
        } else {
            report.push_skipped("stable", format!("N = {n} exceeds dense cap {dense_cap}"));
        }
        report
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// `None` when the check was skipped.
    pub passed: Option<bool>,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    fn push(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check {
            name: name.into(),
            passed: Some(passed),
            detail,
        });
    }

    fn push_skipped(&mut self, name: &str, detail: String) {
        self.checks.push(Check {
            name: name.into(),
            passed: None,
            detail,
        });
    }

    pub fn is_ok(&self) -> bool {
        self.checks.iter().all(|c| c.passed != Some(false))
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.passed == Some(false))
    }
}
