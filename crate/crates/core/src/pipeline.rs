//! End-to-end reduction: Gramian factors, square-root truncation and the
//! provenance record.

use std::sync::Arc;

use crate::bt_dense::{balance_truncate_dense, DEFAULT_DENSE_CAP};
use crate::bt_lowrank::square_root_bt;
use crate::eksm::{eksm_solve_with_progress, EksmOptions, EksmProgress, Formulation, LowRankFactor, OperatorPair, Side, SystemFactors};
use crate::error::Result;
use crate::model::DescriptorSystem;
use crate::rom::{BalancingTransform, EksmSummary, ReducedOrderModel, Target};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Eksm,
    DenseOracle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReduceOptions {
    pub mode: Mode,
    pub eksm: EksmOptions,
    pub formulation: Formulation,
    pub target: Target,
    pub dense_cap: usize,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        ReduceOptions {
            mode: Mode::Eksm,
            eksm: EksmOptions::default(),
            formulation: Formulation::default(),
            target: Target::Default,
            dense_cap: DEFAULT_DENSE_CAP,
        }
    }
}

pub struct Reduction {
    pub rom: ReducedOrderModel,
    pub transform: BalancingTransform,
    /// Controllability and observability factors (EKSM mode only).
    pub factors: Option<(LowRankFactor, LowRankFactor)>,
}

impl Reduction {
    /// False when either Gramian factor stopped before reaching tolerance.
    pub fn converged(&self) -> bool {
        self.factors.as_ref().is_none_or(|(p, q)| p.converged && q.converged)
    }
}

/// Runs both side solves (concurrently with the `parallel` feature) and
/// returns the factors.
pub fn gramian_factors(
    factors: &Arc<SystemFactors>,
    options: &EksmOptions,
    progress: &(dyn Fn(&EksmProgress) + Sync),
) -> Result<(LowRankFactor, LowRankFactor)> {
    let op_p = OperatorPair::new(factors.clone(), Side::Controllability);
    let op_q = OperatorPair::new(factors.clone(), Side::Observability);
    let (zp, zq) = crate::par::join(
        || eksm_solve_with_progress(&op_p, options, progress),
        || eksm_solve_with_progress(&op_q, options, progress),
    );
    Ok((zp?, zq?))
}

pub fn reduce(
    sys: &DescriptorSystem,
    options: &ReduceOptions,
    progress: &(dyn Fn(&EksmProgress) + Sync),
) -> Result<Reduction> {
    match options.mode {
        Mode::DenseOracle => {
            let (rom, transform) = balance_truncate_dense(sys, options.target, options.dense_cap)?;
            Ok(Reduction {
                rom,
                transform,
                factors: None,
            })
        }
        Mode::Eksm => {
            let factors = Arc::new(SystemFactors::new(sys, options.formulation)?);
            let (zp, zq) = gramian_factors(&factors, &options.eksm, progress)?;
            let (mut rom, transform) = square_root_bt(&zp, &zq, sys, &factors, options.target)?;
            rom.provenance.eksm = Some(EksmSummary {
                tol: options.eksm.tol,
                formulation: options.formulation.name().to_string(),
                iterations_p: zp.iterations,
                iterations_q: zq.iterations,
                residual_p: zp.residual,
                residual_q: zq.residual,
                converged_p: zp.converged,
                converged_q: zq.converged,
                rank_p: zp.rank(),
                rank_q: zq.rank(),
            });
            Ok(Reduction {
                rom,
                transform,
                factors: Some((zp, zq)),
            })
        }
    }
}
