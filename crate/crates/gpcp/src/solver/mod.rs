//! Solvers for GPCP instances: semismooth Newton on the min-map over the
//! orthant, homotopy path-following on `H(x,t) = t x + (1-t) Phi(x)`, and
//! deterministic multistart.

mod homotopy;
mod multistart;
mod newton;

pub use homotopy::{homotopy_map, homotopy_solve};
pub use multistart::{multistart_solve, SampleBox};
pub use newton::newton_minmap;

use crate::error::{GpcpError, Result};

/// Points closer than this collapse to one solution in a
/// [`crate::SolutionSetEstimate`].
pub const DEDUPE_RADIUS: f64 = 1e-6;

/// Tuning knobs shared by the solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveConfig {
    /// Residual tolerance declaring a point solved.
    pub tol: f64,
    /// Newton iteration cap, per start and per homotopy correction.
    pub max_iters: usize,
    /// Number of multistart initial points.
    pub starts: usize,
    /// Seed for all randomized choices.
    pub seed: u64,
    /// Backtracking shrink factor for the line search.
    pub damping_factor: f64,
    /// Armijo sufficient-decrease constant.
    pub sufficient_decrease: f64,
    /// Iterate norm beyond which the homotopy flags a suspected exceptional
    /// family. A heuristic flag, not a certificate.
    pub blowup_norm: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iters: 200,
            starts: 64,
            seed: 42,
            damping_factor: 0.5,
            sufficient_decrease: 1e-4,
            blowup_norm: 1e6,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(GpcpError::Validation(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(GpcpError::Validation("max_iters must be at least 1".into()));
        }
        if self.starts == 0 {
            return Err(GpcpError::Validation("starts must be at least 1".into()));
        }
        if !(self.damping_factor > 0.0 && self.damping_factor < 1.0) {
            return Err(GpcpError::Validation(format!(
                "damping factor must lie in (0, 1), got {}",
                self.damping_factor
            )));
        }
        if !(self.sufficient_decrease > 0.0 && self.sufficient_decrease < 0.5) {
            return Err(GpcpError::Validation(format!(
                "sufficient decrease must lie in (0, 0.5), got {}",
                self.sufficient_decrease
            )));
        }
        if !(self.blowup_norm > 0.0) {
            return Err(GpcpError::Validation("blowup norm must be positive".into()));
        }
        Ok(())
    }
}

/// Newton run result.
#[derive(Debug, Clone, PartialEq)]
pub enum NewtonOutcome {
    Solved { x: Vec<f64>, residual: f64, iters: usize },
    Failed(FailReason),
}

impl NewtonOutcome {
    pub fn solved(&self) -> Option<(&[f64], f64)> {
        match self {
            NewtonOutcome::Solved { x, residual, .. } => Some((x, *residual)),
            NewtonOutcome::Failed(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailReason {
    /// A linear solve hit a pivot below the floor; degeneracy is reported,
    /// not regularized away.
    Singular,
    MaxIters,
    /// Backtracking could not produce any decrease.
    LineSearchStalled,
    /// Iterates left the trust region (norm above the blow-up threshold) or
    /// turned non-finite.
    Diverged,
}

impl std::fmt::Display for FailReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            FailReason::Singular => "singular generalized Jacobian",
            FailReason::MaxIters => "iteration limit reached",
            FailReason::LineSearchStalled => "line search stalled",
            FailReason::Diverged => "iterates diverged",
        };
        f.write_str(s)
    }
}

/// One recorded point along a homotopy path.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PathSample {
    pub t: f64,
    pub x: Vec<f64>,
    pub norm_x: f64,
    /// `||Phi(x)||`; on the orthant this equals the natural residual.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub enum PathOutcome {
    Converged(Vec<f64>),
    /// The path norm blew past the threshold while `t` was still positive;
    /// the dichotomy behind the homotopy construction points at an
    /// exceptional family of elements for the pair.
    ExceptionalFamilySuspected,
    Stalled,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PathTrace {
    pub samples: Vec<PathSample>,
    pub outcome: PathOutcome,
}

impl PathTrace {
    pub fn converged_point(&self) -> Option<&[f64]> {
        match &self.outcome {
            PathOutcome::Converged(x) => Some(x),
            _ => None,
        }
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
