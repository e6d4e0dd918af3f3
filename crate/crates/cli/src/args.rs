use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Balanced-truncation model order reduction for RLC interconnect models.
///
/// Settings are layered: built-in defaults, then the `--config` file
/// (`key = value` lines), then `MOR_<KEY>` environment variables, then
/// flags.
#[derive(Debug, Parser)]
#[command(name = "mor", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reduce a netlist or matrix manifest and write the reduced model.
    Reduce {
        /// Netlist, or a `.json` matrix manifest.
        input: PathBuf,
    },
    /// Compare two models on a frequency grid and write both S-parameter
    /// sets plus error metrics.
    Compare { original: PathBuf, reduced: PathBuf },
    /// Check the structural and definiteness invariants of a model.
    Validate { input: PathBuf },
    /// Sweep one model and write its S-parameters.
    Freqresp { input: PathBuf },
}

#[derive(Debug, Args)]
pub struct Options {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// `eksm` or `dense-oracle`.
    #[arg(long, global = true)]
    pub mode: Option<String>,

    /// EKSM relative residual tolerance.
    #[arg(long, global = true)]
    pub tol: Option<String>,

    #[arg(long, global = true)]
    pub maxiter: Option<String>,

    /// Reduced order.
    #[arg(long, global = true, value_name = "R")]
    pub order: Option<String>,

    /// Absolute bound on the transfer-function error; picks the smallest order meeting it.
    #[arg(long, global = true)]
    pub eps: Option<String>,

    /// `start:stop:count:log|lin`, frequencies in hertz.
    #[arg(long, global = true)]
    pub grid: Option<String>,

    /// Reference impedance in ohms.
    #[arg(long, global = true)]
    pub z0: Option<String>,

    #[arg(long, global = true)]
    pub threads: Option<String>,

    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// `symmetrized` or `descriptor`.
    #[arg(long, global = true)]
    pub formulation: Option<String>,

    /// Capacitance to ground for nodes without one, or `off`.
    #[arg(long = "c-min", global = true)]
    pub c_min: Option<String>,

    /// Largest order for dense computations.
    #[arg(long = "dense-cap", global = true)]
    pub dense_cap: Option<String>,

    /// Repeat for more detail.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

impl Options {
    /// Flags that were given, as `(key, value)` pairs.
    pub fn pairs(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        let mut add = |key, v: &Option<String>| {
            if let Some(v) = v {
                out.push((key, v.clone()));
            }
        };
        add("mode", &self.mode);
        add("tol", &self.tol);
        add("maxiter", &self.maxiter);
        add("order", &self.order);
        add("eps", &self.eps);
        add("grid", &self.grid);
        add("z0", &self.z0);
        add("threads", &self.threads);
        add("formulation", &self.formulation);
        add("c_min", &self.c_min);
        add("dense_cap", &self.dense_cap);
        if let Some(out_dir) = &self.out {
            out.push(("out", out_dir.display().to_string()));
        }
        if self.verbose > 0 {
            out.push(("verbose", self.verbose.to_string()));
        }
        out
    }
}
