//! Randomized test circuits: coupled RLC transmission-line ladders, RLC
//! meshes and dissipative state-space models.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::model::{CouplingValue, DescriptorSystem, ElementList, ParameterKind};

/// `lines` parallel ladders of `sections` R-L sections with shunt and
/// line-to-line capacitance plus inductive coupling. One port per line at
/// its near end.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderSpec {
    pub lines: usize,
    pub sections: usize,
    pub r: f64,
    pub l: f64,
    pub c: f64,
    /// Each value is drawn uniformly from `base * (1 ± variation)`.
    pub variation: f64,
    /// Coupling coefficient between lines `i` and `j` in the same section is
    /// `line_coupling / |i - j|`.
    pub line_coupling: f64,
    /// Coupling coefficient between consecutive sections of one line.
    pub section_coupling: f64,
    /// Line-to-line capacitance as a fraction of `c`.
    pub coupling_cap: f64,
    pub far_end: f64,
    pub port_shunt: f64,
    /// When set, each port drives its line through a series resistor from
    /// an extra node with its own shunt capacitance.
    pub port_series: Option<f64>,
    pub seed: u64,
}

impl Default for LadderSpec {
    fn default() -> Self {
        LadderSpec {
            lines: 1,
            sections: 10,
            r: 100.0,
            l: 1e-12,
            c: 1e-15,
            variation: 0.5,
            line_coupling: 0.3,
            section_coupling: 0.1,
            coupling_cap: 0.2,
            far_end: 50.0,
            port_shunt: 1e3,
            port_series: None,
            seed: 0,
        }
    }
}

impl LadderSpec {
    /// Number of MNA unknowns the ladder assembles to.
    pub fn state_dim(&self) -> usize {
        self.lines * (3 * self.sections + 1 + usize::from(self.port_series.is_some()))
    }

    /// Largest section count whose ladder stays within `n` unknowns.
    pub fn sections_for(lines: usize, n: usize) -> usize {
        (n / lines).saturating_sub(1) / 3
    }
}

fn vary(rng: &mut ChaCha8Rng, base: f64, variation: f64) -> f64 {
    base * (1.0 + variation * rng.gen_range(-1.0..1.0))
}

pub fn rlc_ladder(spec: &LadderSpec) -> ElementList {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut list = ElementList::new();
    let a = |l: usize, s: usize| format!("a{l}_{s}");
    let b = |l: usize, s: usize| format!("b{l}_{s}");
    for l in 0..spec.lines {
        for s in 0..spec.sections {
            let r = vary(&mut rng, spec.r, spec.variation);
            list.push_resistor(&format!("R{l}_{s}"), &a(l, s), &b(l, s), r);
            let ind = vary(&mut rng, spec.l, spec.variation);
            list.push_inductor(&format!("L{l}_{s}"), &b(l, s), &a(l, s + 1), ind);
            let c1 = vary(&mut rng, spec.c, spec.variation);
            list.push_capacitor(&format!("Cb{l}_{s}"), &b(l, s), "0", c1);
            let c2 = vary(&mut rng, spec.c, spec.variation);
            list.push_capacitor(&format!("Ca{l}_{s}"), &a(l, s + 1), "0", c2);
            if l > 0 && spec.coupling_cap > 0.0 {
                let cc = vary(&mut rng, spec.coupling_cap * spec.c, spec.variation);
                list.push_capacitor(&format!("Cx{l}_{s}"), &a(l, s + 1), &a(l - 1, s + 1), cc);
            }
        }
        let c0 = vary(&mut rng, spec.c, spec.variation);
        list.push_capacitor(&format!("Cp{l}"), &a(l, 0), "0", c0);
        let rt = vary(&mut rng, spec.far_end, spec.variation);
        list.push_resistor(&format!("Rt{l}"), &a(l, spec.sections), "0", rt);
        let rs = vary(&mut rng, spec.port_shunt, spec.variation);
        list.push_resistor(&format!("Rs{l}"), &a(l, 0), "0", rs);
    }
    for s in 0..spec.sections {
        for l1 in 0..spec.lines {
            for l2 in l1 + 1..spec.lines {
                let k = spec.line_coupling / (l2 - l1) as f64;
                if k != 0.0 {
                    list.push_coupling(
                        &format!("K{l1}_{l2}_{s}"),
                        &format!("L{l1}_{s}"),
                        &format!("L{l2}_{s}"),
                        CouplingValue::Coefficient(k),
                    );
                }
            }
            if s + 1 < spec.sections && spec.section_coupling != 0.0 {
                list.push_coupling(
                    &format!("Ks{l1}_{s}"),
                    &format!("L{l1}_{s}"),
                    &format!("L{l1}_{}", s + 1),
                    CouplingValue::Coefficient(spec.section_coupling),
                );
            }
        }
    }
    for l in 0..spec.lines {
        match spec.port_series {
            Some(rs) => {
                let s = format!("s{l}");
                list.push_resistor(&format!("Rin{l}"), &s, &a(l, 0), vary(&mut rng, rs, spec.variation));
                list.push_capacitor(&format!("Cin{l}"), &s, "0", vary(&mut rng, spec.c, spec.variation));
                list.push_port(&format!("P{}", l + 1), &s);
            }
            None => list.push_port(&format!("P{}", l + 1), &a(l, 0)),
        }
    }
    list
}

/// Rectangular grid of nodes joined by series R-L edges, with capacitance
/// to ground at every node. Ports sit on the first row.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshSpec {
    pub rows: usize,
    pub cols: usize,
    pub ports: usize,
    pub r: f64,
    pub l: f64,
    pub c: f64,
    pub variation: f64,
    pub termination: f64,
    pub seed: u64,
}

impl Default for MeshSpec {
    fn default() -> Self {
        MeshSpec {
            rows: 4,
            cols: 4,
            ports: 1,
            r: 100.0,
            l: 1e-12,
            c: 1e-15,
            variation: 0.5,
            termination: 50.0,
            seed: 0,
        }
    }
}

impl MeshSpec {
    pub fn state_dim(&self) -> usize {
        let nodes = self.rows * self.cols;
        let edges = self.rows * (self.cols - 1) + self.cols * (self.rows - 1);
        nodes + 2 * edges
    }
}

pub fn rlc_mesh(spec: &MeshSpec) -> ElementList {
    assert!(spec.rows >= 2 && spec.cols >= 2 && spec.ports >= 1 && spec.ports <= spec.cols);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut list = ElementList::new();
    let node = |i: usize, j: usize| format!("n{i}_{j}");
    let mut edge = 0;
    let mut add_edge = |list: &mut ElementList, rng: &mut ChaCha8Rng, from: String, to: String| {
        let mid = format!("m{edge}");
        list.push_resistor(&format!("R{edge}"), &from, &mid, vary(rng, spec.r, spec.variation));
        list.push_inductor(&format!("L{edge}"), &mid, &to, vary(rng, spec.l, spec.variation));
        list.push_capacitor(&format!("Cm{edge}"), &mid, "0", vary(rng, spec.c, spec.variation));
        edge += 1;
    };
    for i in 0..spec.rows {
        for j in 0..spec.cols {
            list.push_capacitor(&format!("C{i}_{j}"), &node(i, j), "0", vary(&mut rng, spec.c, spec.variation));
            if j + 1 < spec.cols {
                add_edge(&mut list, &mut rng, node(i, j), node(i, j + 1));
            }
            if i + 1 < spec.rows {
                add_edge(&mut list, &mut rng, node(i, j), node(i + 1, j));
            }
        }
    }
    for j in 0..spec.cols {
        let t = vary(&mut rng, spec.termination, spec.variation);
        list.push_resistor(&format!("Rt{j}"), &node(spec.rows - 1, j), "0", t);
    }
    let stride = spec.cols / spec.ports;
    for k in 0..spec.ports {
        let n = node(0, k * stride);
        list.push_resistor(&format!("Rp{k}"), &n, "0", vary(&mut rng, 1e3, spec.variation));
        list.push_port(&format!("P{}", k + 1), &n);
    }
    list
}

/// Random `C x' = G x + B u`, `y = Bᵀ x` with symmetric positive definite
/// `C` and `G + Gᵀ` negative definite, in unit scaling.
pub fn random_dissipative_system(n: usize, p: usize, seed: u64) -> Result<DescriptorSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gen = |r: usize, c: usize| DMatrix::from_fn(r, c, |_, _| rng.gen_range(-1.0..1.0));
    let s = gen(n, n) / (n as f64).sqrt();
    let k = gen(n, n) / (n as f64).sqrt();
    let t = gen(n, n) / (n as f64).sqrt();
    let b = gen(n, p);
    let g = -(&s * s.transpose() + DMatrix::identity(n, n) * 0.1) + (&k - k.transpose());
    let c = &t * t.transpose() + DMatrix::identity(n, n) * 0.5;
    let l = b.transpose();
    DescriptorSystem::from_dense(&g, &c, &b, &l, ParameterKind::Impedance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{assemble_mna, AssemblyOptions};

    #[test]
    fn ladder_dimensions() {
        for (lines, sections, port_series) in [(1, 5, None), (2, 7, Some(10.0)), (4, 3, None)] {
            let spec = LadderSpec { lines, sections, port_series, ..Default::default() };
            let sys = assemble_mna(&rlc_ladder(&spec), &AssemblyOptions::default()).unwrap();
            assert_eq!(sys.order(), spec.state_dim());
            assert_eq!(sys.inputs(), lines);
            assert!(sys.validate(0).is_ok(), "{:?}", sys.validate(0));
        }
    }

    #[test]
    fn mesh_dimensions() {
        let spec = MeshSpec { rows: 3, cols: 4, ports: 2, ..Default::default() };
        let sys = assemble_mna(&rlc_mesh(&spec), &AssemblyOptions::default()).unwrap();
        assert_eq!(sys.order(), spec.state_dim());
        assert!(sys.validate(usize::MAX).is_ok());
    }

    #[test]
    fn seeds_are_reproducible() {
        let spec = LadderSpec { lines: 2, sections: 4, seed: 9, ..Default::default() };
        assert_eq!(rlc_ladder(&spec), rlc_ladder(&spec));
    }
}
