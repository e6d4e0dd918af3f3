use std::fmt::Write as _;
use std::path::Path;

use crate::error::{MorError, Result};
use crate::freqresp::SParamSet;

/// CSV with header `freq_hz,S11_re,S11_im,S12_re,...`, entries row-major.
pub fn format_csv(set: &SParamSet) -> String {
    let p = set.ports();
    let mut s = String::from("freq_hz");
    for i in 1..=p {
        for j in 1..=p {
            let _ = write!(s, ",S{i}{j}_re,S{i}{j}_im");
        }
    }
    s.push('\n');
    for (f, m) in set.hertz().iter().zip(&set.values) {
        let _ = write!(s, "{f:e}");
        for i in 0..p {
            for j in 0..p {
                let _ = write!(s, ",{:e},{:e}", m[(i, j)].re, m[(i, j)].im);
            }
        }
        s.push('\n');
    }
    s
}

/// Touchstone version 1 text: `# HZ S RI R <z0>`, one record per
/// frequency. Two-port records use the `S11 S21 S12 S22` order; larger
/// networks are written row by row with at most four pairs per line.
pub fn format_touchstone(set: &SParamSet) -> String {
    let p = set.ports();
    let mut s = String::new();
    let _ = writeln!(s, "! {p}-port scattering parameters");
    let _ = writeln!(s, "# HZ S RI R {}", set.z0);
    for (f, m) in set.hertz().iter().zip(&set.values) {
        let pair = |i: usize, j: usize| format!("{:e} {:e}", m[(i, j)].re, m[(i, j)].im);
        match p {
            1 => {
                let _ = writeln!(s, "{f:e} {}", pair(0, 0));
            }
            2 => {
                let _ = writeln!(s, "{f:e} {} {} {} {}", pair(0, 0), pair(1, 0), pair(0, 1), pair(1, 1));
            }
            _ => {
                for i in 0..p {
                    for (chunk_idx, chunk) in (0..p).collect::<Vec<_>>().chunks(4).enumerate() {
                        if i == 0 && chunk_idx == 0 {
                            let _ = write!(s, "{f:e}");
                        } else {
                            s.push(' ');
                        }
                        for &j in chunk {
                            let _ = write!(s, " {}", pair(i, j));
                        }
                        s.push('\n');
                    }
                }
            }
        }
    }
    s
}

pub fn write_csv(set: &SParamSet, path: &Path) -> Result<()> {
    std::fs::write(path, format_csv(set)).map_err(|e| MorError::io(path, e))
}

pub fn write_touchstone(set: &SParamSet, path: &Path) -> Result<()> {
    std::fs::write(path, format_touchstone(set)).map_err(|e| MorError::io(path, e))
}

/// Conventional file name `<stem>.s<p>p`.
pub fn touchstone_name(stem: &str, ports: usize) -> String {
    format!("{stem}.s{ports}p")
}
