use std::collections::HashMap;

use crate::error::{MorError, Result};
use crate::model::netlist::{CouplingValue, ElementList, GROUND};
use crate::model::system::{DescriptorSystem, ParameterKind, Structure};
use crate::sparse::CscMatrix;

/// Default capacitance added from otherwise floating nodes to ground.
pub const DEFAULT_GROUNDING_CAPACITANCE: f64 = 1e-18;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssemblyOptions {
    /// Capacitance stamped from each node that has no capacitive path to
    /// ground. `None` turns such nodes into an error.
    pub grounding_capacitance: Option<f64>,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        AssemblyOptions {
            grounding_capacitance: Some(DEFAULT_GROUNDING_CAPACITANCE),
        }
    }
}

/// Unknown ordering: nodes in order of first appearance (ground excluded),
/// inductor branches in declaration order.
#[derive(Debug, Clone, PartialEq)]
pub struct Numbering {
    pub nodes: Vec<String>,
    pub branches: Vec<String>,
}

impl Numbering {
    pub fn from_elements(list: &ElementList) -> Self {
        let mut nodes = Vec::new();
        let mut seen = HashMap::new();
        for e in &list.elements {
            for n in e.nodes() {
                if n != GROUND && !seen.contains_key(n) {
                    seen.insert(n.to_string(), ());
                    nodes.push(n.to_string());
                }
            }
        }
        let branches = list.inductors().map(|l| l.name.clone()).collect();
        Numbering { nodes, branches }
    }

    fn node_index(&self) -> HashMap<&str, usize> {
        self.nodes.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect()
    }
}

/// Raw element stamps before any grounding or definiteness checks.
/// Stamping is linear: the stamps of a union of element sets are the sums
/// of the individual stamps under a shared numbering.
#[derive(Debug, Clone, PartialEq)]
pub struct MnaStamps {
    pub gn: CscMatrix,
    pub cn: CscMatrix,
    pub e: CscMatrix,
    pub m: CscMatrix,
    pub b: CscMatrix,
    pub ports: Vec<String>,
}

pub fn stamp(list: &ElementList, numbering: &Numbering) -> Result<MnaStamps> {
    let idx = numbering.node_index();
    let n = numbering.nodes.len();
    let m = numbering.branches.len();
    let lookup = |node: &str| -> Result<Option<usize>> {
        if node == GROUND {
            return Ok(None);
        }
        idx.get(node)
            .copied()
            .map(Some)
            .ok_or_else(|| MorError::InvalidSystem(format!("node '{node}' missing from numbering")))
    };
    let two_port = |t: &mut Vec<(usize, usize, f64)>, a: Option<usize>, b: Option<usize>, v: f64| {
        if let Some(a) = a {
            t.push((a, a, v));
        }
        if let Some(b) = b {
            t.push((b, b, v));
        }
        if let (Some(a), Some(b)) = (a, b) {
            t.push((a, b, -v));
            t.push((b, a, -v));
        }
    };

    let mut gt = Vec::new();
    for r in list.resistors() {
        two_port(&mut gt, lookup(&r.pos)?, lookup(&r.neg)?, 1.0 / r.value);
    }
    let mut ct = Vec::new();
    for c in list.capacitors() {
        two_port(&mut ct, lookup(&c.pos)?, lookup(&c.neg)?, c.value);
    }

    let branch_of: HashMap<String, usize> = numbering
        .branches
        .iter()
        .enumerate()
        .map(|(i, b)| (b.to_ascii_uppercase(), i))
        .collect();
    let mut values = vec![0.0; m];
    let mut et = Vec::new();
    for ind in list.inductors() {
        let k = *branch_of
            .get(&ind.name.to_ascii_uppercase())
            .ok_or_else(|| MorError::InvalidSystem(format!("inductor '{}' missing from numbering", ind.name)))?;
        values[k] = ind.value;
        if let Some(a) = lookup(&ind.pos)? {
            et.push((a, k, 1.0));
        }
        if let Some(b) = lookup(&ind.neg)? {
            et.push((b, k, -1.0));
        }
    }
    let mut mt: Vec<_> = list
        .inductors()
        .map(|ind| {
            let k = branch_of[&ind.name.to_ascii_uppercase()];
            (k, k, ind.value)
        })
        .collect();
    for cp in list.couplings() {
        let find = |name: &str| {
            branch_of.get(&name.to_ascii_uppercase()).copied().ok_or_else(|| MorError::UndeclaredInductor {
                coupling: cp.name.clone(),
                inductor: name.to_string(),
                span: cp.span,
            })
        };
        let (i, j) = (find(&cp.first)?, find(&cp.second)?);
        let mutual = match cp.value {
            CouplingValue::Coefficient(k) => k * (values[i] * values[j]).sqrt(),
            CouplingValue::Mutual(mv) => mv,
        };
        mt.push((i, j, mutual));
        mt.push((j, i, mutual));
    }

    let mut bt = Vec::new();
    let mut ports = Vec::new();
    for (col, p) in list.ports().enumerate() {
        if let Some(a) = lookup(&p.node)? {
            bt.push((a, col, 1.0));
        }
        if let Some(r) = lookup(&p.reference)? {
            bt.push((r, col, -1.0));
        }
        ports.push(p.name.clone());
    }
    let p = ports.len();
    Ok(MnaStamps {
        gn: CscMatrix::from_triplets(n, n, &gt),
        cn: CscMatrix::from_triplets(n, n, &ct),
        e: CscMatrix::from_triplets(n, m, &et),
        m: CscMatrix::from_triplets(m, m, &mt),
        b: CscMatrix::from_triplets(n, p, &bt),
        ports,
    })
}

/// Nodes whose capacitor-connected component does not contain ground.
fn floating_nodes(list: &ElementList, numbering: &Numbering) -> Vec<usize> {
    let idx = numbering.node_index();
    let n = numbering.nodes.len();
    // Union-find with ground as element n.
    let mut parent: Vec<usize> = (0..=n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let id = |s: &str| if s == GROUND { n } else { idx[s] };
    for c in list.capacitors() {
        let (a, b) = (find(&mut parent, id(&c.pos)), find(&mut parent, id(&c.neg)));
        if a != b {
            parent[a] = b;
        }
    }
    let g = find(&mut parent, n);
    (0..n).filter(|&i| find(&mut parent, i) != g).collect()
}

/// Assembles `G = -[[Gn, E], [-Eᵀ, 0]]`, `C = diag(Cn, M)`, `B = [B1; 0]`,
/// `L = Bᵀ` from a parsed element list.
pub fn assemble_mna(list: &ElementList, options: &AssemblyOptions) -> Result<DescriptorSystem> {
    let numbering = Numbering::from_elements(list);
    let stamps = stamp(list, &numbering)?;
    let n = numbering.nodes.len();
    let m = numbering.branches.len();
    if stamps.ports.is_empty() {
        return Err(MorError::InvalidSystem("netlist declares no ports".into()));
    }
    if n == 0 {
        return Err(MorError::InvalidSystem("netlist has no non-ground nodes".into()));
    }

    let floating = floating_nodes(list, &numbering);
    let mut cn = stamps.cn.clone();
    if !floating.is_empty() {
        match options.grounding_capacitance {
            Some(cmin) if cmin > 0.0 && cmin.is_finite() => {
                let t: Vec<_> = floating.iter().map(|&i| (i, i, cmin)).collect();
                cn = cn.add(&CscMatrix::from_triplets(n, n, &t));
            }
            _ => {
                return Err(MorError::SingularCapacitance {
                    nodes: floating.iter().map(|&i| numbering.nodes[i].clone()).collect(),
                })
            }
        }
    }

    if m > 0 {
        let dense = stamps.m.to_dense();
        if dense.clone().cholesky().is_none() {
            let mut detail = String::from("check coupling coefficients");
            for cp in list.couplings() {
                if let CouplingValue::Coefficient(k) = cp.value {
                    if k.abs() >= 1.0 {
                        detail = format!("coupling '{}' at {} has |k| = 1", cp.name, cp.span);
                        break;
                    }
                }
            }
            return Err(MorError::InductanceNotPositiveDefinite(detail));
        }
    }

    let nn = n + m;
    let mut gt: Vec<(usize, usize, f64)> = stamps.gn.triplets().map(|(i, j, v)| (i, j, -v)).collect();
    for (i, k, v) in stamps.e.triplets() {
        gt.push((i, n + k, -v));
        gt.push((n + k, i, v));
    }
    let mut ct: Vec<_> = cn.triplets().collect();
    ct.extend(stamps.m.triplets().map(|(i, j, v)| (n + i, n + j, v)));
    let bt: Vec<_> = stamps.b.triplets().collect();
    let b = CscMatrix::from_triplets(nn, stamps.ports.len(), &bt);
    let l = b.transpose();
    DescriptorSystem::new(
        CscMatrix::from_triplets(nn, nn, &gt),
        CscMatrix::from_triplets(nn, nn, &ct),
        b,
        l,
        Structure::Mna { nodes: n, branches: m },
        stamps.ports,
        ParameterKind::Impedance,
    )
}
