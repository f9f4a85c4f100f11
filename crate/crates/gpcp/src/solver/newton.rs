//! Semismooth Newton on the componentwise min of `F` and `G` over the
//! orthant.
//!
//! Row `j` of the generalized Jacobian comes from the branch attaining the
//! min; exact ties take the F branch. Any element of the B-subdifferential
//! is admissible, and the fixed rule keeps runs deterministic.

use crate::error::Result;
use crate::linalg::{self, Mat};
use crate::problem::GpcpProblem;
use crate::solver::{norm, FailReason, NewtonOutcome, SolveConfig};

const MAX_BACKTRACKS: usize = 60;

pub fn newton_minmap(p: &GpcpProblem, x0: &[f64], cfg: &SolveConfig) -> Result<NewtonOutcome> {
    cfg.validate()?;
    let n = p.dim();
    let mut x = x0.to_vec();
    let mut r = p.min_map(&x)?;
    let mut r_norm = norm(&r);

    for iter in 0..cfg.max_iters {
        if r_norm <= cfg.tol {
            return Ok(NewtonOutcome::Solved { x, residual: r_norm, iters: iter });
        }
        if !r_norm.is_finite() || norm(&x) > cfg.blowup_norm {
            return Ok(NewtonOutcome::Failed(FailReason::Diverged));
        }

        let jac = min_map_jacobian(p, &x)?;
        let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let step = match linalg::solve(jac, rhs) {
            Ok(d) => d,
            Err(_) => return Ok(NewtonOutcome::Failed(FailReason::Singular)),
        };

        // Backtracking on the merit 0.5 r^2: along the Newton direction the
        // directional derivative is -2 phi, so accept when
        // phi(x + a d) <= (1 - 2 sigma a) phi(x).
        let phi = 0.5 * r_norm * r_norm;
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_BACKTRACKS {
            let trial: Vec<f64> = (0..n).map(|i| x[i] + alpha * step[i]).collect();
            let r_trial = p.min_map(&trial)?;
            let rn_trial = norm(&r_trial);
            let phi_trial = 0.5 * rn_trial * rn_trial;
            if phi_trial.is_finite()
                && phi_trial <= (1.0 - 2.0 * cfg.sufficient_decrease * alpha) * phi
            {
                x = trial;
                r = r_trial;
                r_norm = rn_trial;
                accepted = true;
                break;
            }
            alpha *= cfg.damping_factor;
        }
        if !accepted {
            return Ok(NewtonOutcome::Failed(FailReason::LineSearchStalled));
        }
    }

    if r_norm <= cfg.tol {
        return Ok(NewtonOutcome::Solved { x, residual: r_norm, iters: cfg.max_iters });
    }
    Ok(NewtonOutcome::Failed(FailReason::MaxIters))
}

/// Generalized Jacobian of `x -> min{F(x), G(x)}` with the F-branch tie rule.
pub(crate) fn min_map_jacobian(p: &GpcpProblem, x: &[f64]) -> Result<Mat> {
    let fx = p.f().evaluate(x)?;
    let gx = p.g().evaluate(x)?;
    let jf = p.f().jacobian(x)?;
    let jg = p.g().jacobian(x)?;
    let n = x.len();
    let mut jac = Mat::zeros(n);
    for j in 0..n {
        if fx[j] <= gx[j] {
            jac.copy_row_from(j, &jf, j);
        } else {
            jac.copy_row_from(j, &jg, j);
        }
    }
    Ok(jac)
}
