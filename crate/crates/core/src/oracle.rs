//! Dense boundary-sweep stability decision.
//!
//! The sweep is a semi-decision at fixed grid resolution: a Stable verdict
//! carries a margin and a grid-continuity diagnostic rather than a proof. The
//! certified proof path lives in [`crate::certify`]; this module is its
//! independent cross-check and the ground truth for counterexamples.

use rayon::prelude::*;
use thiserror::Error;

use crate::linalg::{eig_general, LinalgError};
use crate::model::{f_region, NdRoesserModel, RegionDescriptor, RoesserModel};
use crate::transfer::{boundary_samples, m_delta, nd_m_delta, BoundaryPoint, TransferError};

/// Sweep resolution and thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Boundary samples per dimension (at least 16).
    pub samples_per_dim: usize,
    /// Margin below which a nonpositive indicator is too close to call.
    pub margin_tol: f64,
    /// Include the symbolic infinity sample on derivative boundaries.
    pub include_infinity: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            samples_per_dim: 2048,
            margin_tol: 1e-9,
            include_infinity: true,
        }
    }
}

impl SweepConfig {
    pub fn with_samples(samples_per_dim: usize) -> Self {
        SweepConfig {
            samples_per_dim,
            ..SweepConfig::default()
        }
    }

    fn validate(&self) {
        assert!(self.samples_per_dim >= 16, "need at least 16 samples per dimension");
        assert!(self.margin_tol >= 0.0);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleStatus {
    Stable,
    Unstable,
    Indeterminate,
}

/// Outcome of a sweep (or of the eliminated-block spectral check).
///
/// `worst_value` is the maximum of the region indicator over everything
/// checked; `Unstable` means it reached zero, `Stable` that it stayed below
/// `-margin_tol` everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleVerdict {
    pub status: OracleStatus,
    /// Boundary point(s) attaining the worst indicator (one per swept
    /// dimension; empty for the eliminated-block check).
    pub worst_point: Vec<BoundaryPoint>,
    pub worst_value: f64,
    pub samples_checked: usize,
    /// Largest indicator change between adjacent samples; a grid-trust
    /// diagnostic for 2D sweeps.
    pub max_step_jump: f64,
    pub note: Option<String>,
}

impl OracleVerdict {
    fn indeterminate(note: String, samples: usize) -> Self {
        OracleVerdict {
            status: OracleStatus::Indeterminate,
            worst_point: Vec::new(),
            worst_value: f64::NAN,
            samples_checked: samples,
            max_step_jump: 0.0,
            note: Some(note),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("sweep grid of {points} points exceeds the cap of {cap}")]
    ConfigTooLarge { points: u128, cap: u128 },
}

/// Grid-size cap for nD sweeps.
pub const ND_GRID_CAP: u128 = 10_000_000;

fn status_from(worst: f64, tol: f64) -> OracleStatus {
    if worst >= 0.0 {
        OracleStatus::Unstable
    } else if worst < -tol {
        OracleStatus::Stable
    } else {
        OracleStatus::Indeterminate
    }
}

/// Spectral check of the eliminated block against its own region: every
/// eigenvalue of `A22` must satisfy `f(R2, lambda) < -tol`.
pub fn check_a22(m: &RoesserModel, tol: f64) -> OracleVerdict {
    let r2 = m.kind2.region();
    let eigs = match eig_general(m.a22()) {
        Ok(e) => e,
        Err(e) => {
            return OracleVerdict::indeterminate(format!("eigenvalue solver failed on A22: {e}"), 0)
        }
    };
    let mut worst = f64::NEG_INFINITY;
    let mut worst_lambda = eigs[0];
    for lam in &eigs {
        let f = f_region(&r2, *lam, false);
        if f > worst {
            worst = f;
            worst_lambda = *lam;
        }
    }
    OracleVerdict {
        status: status_from(worst, tol),
        worst_point: Vec::new(),
        worst_value: worst,
        samples_checked: eigs.len(),
        max_step_jump: 0.0,
        note: Some(format!("worst A22 eigenvalue {worst_lambda}")),
    }
}

/// Region indicator of a transfer matrix sample: the largest `f(R1, lambda)`
/// over its spectrum.
fn indicator(r1: &RegionDescriptor, m_val: &crate::linalg::ComplexMatrix) -> Result<f64, LinalgError> {
    let eigs = eig_general(m_val)?;
    Ok(eigs
        .iter()
        .map(|lam| f_region(r1, *lam, false))
        .fold(f64::NEG_INFINITY, f64::max))
}

enum SampleOutcome {
    Value(f64),
    Pole(TransferError),
    EigFailure(LinalgError),
}

fn reduce_sweep(
    outcomes: Vec<SampleOutcome>,
    points: impl Fn(usize) -> Vec<BoundaryPoint>,
    tol: f64,
) -> OracleVerdict {
    let total = outcomes.len();
    let mut worst = f64::NEG_INFINITY;
    let mut worst_idx = 0usize;
    let mut prev: Option<f64> = None;
    let mut max_jump = 0.0f64;
    for (i, o) in outcomes.into_iter().enumerate() {
        match o {
            SampleOutcome::Value(v) => {
                if v > worst {
                    worst = v;
                    worst_idx = i;
                }
                if let Some(p) = prev {
                    max_jump = max_jump.max((v - p).abs());
                }
                prev = Some(v);
            }
            SampleOutcome::Pole(e) => {
                return OracleVerdict::indeterminate(
                    format!("precondition violated at sample {i}: {e}"),
                    total,
                )
            }
            SampleOutcome::EigFailure(e) => {
                return OracleVerdict::indeterminate(
                    format!("eigenvalue solver failed at sample {i}: {e}"),
                    total,
                )
            }
        }
    }
    OracleVerdict {
        status: status_from(worst, tol),
        worst_point: points(worst_idx),
        worst_value: worst,
        samples_checked: total,
        max_step_jump: max_jump,
        note: None,
    }
}

/// Sweeps the boundary of the second region and checks the spectrum of the
/// transfer matrix at every sample.
///
/// Callers are expected to have verified [`check_a22`] first; a pole on the
/// boundary is reported as Indeterminate, not as a verdict.
pub fn sweep_2d(m: &RoesserModel, cfg: &SweepConfig) -> OracleVerdict {
    cfg.validate();
    let r1 = m.kind1.region();
    let samples = boundary_samples(m.kind2, cfg.samples_per_dim, cfg.include_infinity);
    let outcomes: Vec<SampleOutcome> = samples
        .par_iter()
        .map(|p| match m_delta(m, p) {
            Ok(mat) => match indicator(&r1, &mat) {
                Ok(v) => SampleOutcome::Value(v),
                Err(e) => SampleOutcome::EigFailure(e),
            },
            Err(e) => SampleOutcome::Pole(e),
        })
        .collect();
    reduce_sweep(outcomes, |i| vec![samples[i]], cfg.margin_tol)
}

/// Composed 2D decision: eliminated-block check first, then the boundary
/// sweep; the reported worst value is the larger of the two stages.
pub fn check_model_2d(m: &RoesserModel, cfg: &SweepConfig) -> OracleVerdict {
    let a22 = check_a22(m, cfg.margin_tol);
    if a22.status != OracleStatus::Stable {
        return a22;
    }
    let mut sweep = sweep_2d(m, cfg);
    if sweep.status != OracleStatus::Indeterminate && a22.worst_value > sweep.worst_value {
        sweep.worst_value = a22.worst_value;
        sweep.worst_point = Vec::new();
        sweep.note = a22.note.clone();
    }
    sweep.samples_checked += a22.samples_checked;
    sweep
}

/// Full grid sweep over the product of the trailing boundaries of an nD
/// model. Grid size is capped at [`ND_GRID_CAP`] points.
pub fn sweep_nd(m: &NdRoesserModel, cfg: &SweepConfig) -> Result<OracleVerdict, OracleError> {
    cfg.validate();
    let n = m.n();
    let axes: Vec<Vec<BoundaryPoint>> = (1..n)
        .map(|i| boundary_samples(m.kind(i), cfg.samples_per_dim, cfg.include_infinity))
        .collect();
    let mut total: u128 = 1;
    for ax in &axes {
        total = total.saturating_mul(ax.len() as u128);
    }
    if total > ND_GRID_CAP {
        return Err(OracleError::ConfigTooLarge {
            points: total,
            cap: ND_GRID_CAP,
        });
    }
    let total = total as usize;
    let r1 = m.kind(0).region();
    let decode = |mut idx: usize| -> Vec<BoundaryPoint> {
        let mut pts = Vec::with_capacity(axes.len());
        for ax in &axes {
            pts.push(ax[idx % ax.len()]);
            idx /= ax.len();
        }
        pts
    };
    let outcomes: Vec<SampleOutcome> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let pts = decode(idx);
            match nd_m_delta(m, &pts) {
                Ok(mat) => match indicator(&r1, &mat) {
                    Ok(v) => SampleOutcome::Value(v),
                    Err(e) => SampleOutcome::EigFailure(e),
                },
                Err(e) => SampleOutcome::Pole(e),
            }
        })
        .collect();
    Ok(reduce_sweep(outcomes, decode, cfg.margin_tol))
}
