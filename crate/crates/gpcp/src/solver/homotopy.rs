//! Homotopy path-following between the identity and the normal map.
//!
//! `H(x, t) = t x + (1 - t) Phi(x)` with `Phi(x) = F(x) - P_K(F(x) - G(x))`.
//! At `t = 1` the root is `x = 0`; zeros of `H(., 0) = Phi` are exactly the
//! GPCP solutions. The driver decreases `t` on a fixed schedule and corrects
//! `x` at each level by damped semismooth Newton. A path norm passing the
//! blow-up threshold while `t` is still positive is flagged as a suspected
//! exceptional family: the alternative to solvability in the underlying
//! existence dichotomy.

use crate::cone::Cone;
use crate::error::Result;
use crate::linalg::{self, Mat};
use crate::problem::GpcpProblem;
use crate::solver::{norm, PathOutcome, PathSample, PathTrace, SolveConfig};

const T_FLOOR: f64 = 1e-8;
const T_LINEAR_DECREMENT: f64 = 0.05;
const T_GEOMETRIC_FACTOR: f64 = 0.9;
const FD_STEP: f64 = 1e-7;
const MAX_BACKTRACKS: usize = 60;

/// `H(x, t) = t x + (1 - t) Phi(x)`.
pub fn homotopy_map(p: &GpcpProblem, x: &[f64], t: f64) -> Result<Vec<f64>> {
    let phi = p.normal_map(x)?;
    Ok(x.iter().zip(&phi).map(|(xi, pi)| t * xi + (1.0 - t) * pi).collect())
}

enum Correction {
    Converged(Vec<f64>),
    BlewUp(Vec<f64>),
    Failed(Vec<f64>),
}

pub fn homotopy_solve(p: &GpcpProblem, cfg: &SolveConfig) -> Result<PathTrace> {
    cfg.validate()?;
    let n = p.dim();
    let mut samples = Vec::new();

    // At t = 1, H(x, 1) = x: the corrector accepts x = 0 immediately.
    let mut x = vec![0.0; n];
    let mut t = 1.0;
    samples.push(sample(p, &x, t)?);

    loop {
        let t_next = (t - T_LINEAR_DECREMENT).max(t * T_GEOMETRIC_FACTOR);
        let at_end = t_next <= T_FLOOR;
        let t_target = if at_end { 0.0 } else { t_next };

        match correct(p, &x, t_target, cfg)? {
            Correction::Converged(corrected) => {
                x = corrected;
                samples.push(sample(p, &x, t_target)?);
                if norm(&x) > cfg.blowup_norm {
                    let outcome = if t_target > T_FLOOR {
                        PathOutcome::ExceptionalFamilySuspected
                    } else {
                        PathOutcome::Stalled
                    };
                    return Ok(PathTrace { samples, outcome });
                }
            }
            Correction::BlewUp(last) => {
                samples.push(sample(p, &last, t_target)?);
                let outcome = if t_target > T_FLOOR {
                    PathOutcome::ExceptionalFamilySuspected
                } else {
                    PathOutcome::Stalled
                };
                return Ok(PathTrace { samples, outcome });
            }
            Correction::Failed(last) => {
                samples.push(sample(p, &last, t_target)?);
                return Ok(PathTrace { samples, outcome: PathOutcome::Stalled });
            }
        }

        if at_end {
            let outcome = if p.is_solution(&x, 10.0 * cfg.tol)?.satisfied {
                PathOutcome::Converged(x)
            } else {
                PathOutcome::Stalled
            };
            return Ok(PathTrace { samples, outcome });
        }
        t = t_target;
    }
}

fn sample(p: &GpcpProblem, x: &[f64], t: f64) -> Result<PathSample> {
    let phi = p.normal_map(x)?;
    Ok(PathSample { t, x: x.to_vec(), norm_x: norm(x), residual: norm(&phi) })
}

/// Damped semismooth Newton on `x -> H(x, t)`.
fn correct(p: &GpcpProblem, x0: &[f64], t: f64, cfg: &SolveConfig) -> Result<Correction> {
    let n = p.dim();
    let mut x = x0.to_vec();
    let mut h = homotopy_map(p, &x, t)?;
    let mut h_norm = norm(&h);

    for _ in 0..cfg.max_iters {
        if h_norm <= cfg.tol {
            return Ok(Correction::Converged(x));
        }
        if norm(&x) > cfg.blowup_norm {
            return Ok(Correction::BlewUp(x));
        }
        if !h_norm.is_finite() {
            return Ok(Correction::Failed(x));
        }

        let jac = homotopy_jacobian(p, &x, t)?;
        let rhs: Vec<f64> = h.iter().map(|v| -v).collect();
        let step = match linalg::solve(jac, rhs) {
            Ok(d) => d,
            Err(_) => return Ok(Correction::Failed(x)),
        };

        let psi = 0.5 * h_norm * h_norm;
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_BACKTRACKS {
            let trial: Vec<f64> = (0..n).map(|i| x[i] + alpha * step[i]).collect();
            let h_trial = homotopy_map(p, &trial, t)?;
            let hn_trial = norm(&h_trial);
            let psi_trial = 0.5 * hn_trial * hn_trial;
            if psi_trial.is_finite()
                && psi_trial <= (1.0 - 2.0 * cfg.sufficient_decrease * alpha) * psi
            {
                x = trial;
                h = h_trial;
                h_norm = hn_trial;
                accepted = true;
                break;
            }
            alpha *= cfg.damping_factor;
        }
        if !accepted {
            return Ok(Correction::Failed(x));
        }
    }
    if h_norm <= cfg.tol {
        return Ok(Correction::Converged(x));
    }
    Ok(Correction::Failed(x))
}

/// Generalized Jacobian of `H(., t)`.
///
/// On the orthant `Phi` is piecewise smooth with rows switching between the
/// F and G branches at kinks of the projection; ties take the F branch, the
/// same rule as the min-map solver. Other projectable cones fall back to
/// central finite differences.
fn homotopy_jacobian(p: &GpcpProblem, x: &[f64], t: f64) -> Result<Mat> {
    let n = x.len();
    let mut jac = match p.cone() {
        Cone::NonnegativeOrthant { .. } => {
            let fx = p.f().evaluate(x)?;
            let gx = p.g().evaluate(x)?;
            let jf = p.f().jacobian(x)?;
            let jg = p.g().jacobian(x)?;
            let mut m = Mat::zeros(n);
            for j in 0..n {
                // (F - G)_j > 0 projects to the G branch, otherwise F.
                if fx[j] - gx[j] > 0.0 {
                    m.copy_row_from(j, &jg, j);
                } else {
                    m.copy_row_from(j, &jf, j);
                }
            }
            m
        }
        _ => {
            let mut m = Mat::zeros(n);
            for i in 0..n {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[i] += FD_STEP;
                xm[i] -= FD_STEP;
                let fp = p.normal_map(&xp)?;
                let fm = p.normal_map(&xm)?;
                for j in 0..n {
                    m.set(j, i, (fp[j] - fm[j]) / (2.0 * FD_STEP));
                }
            }
            m
        }
    };
    for i in 0..n {
        for j in 0..n {
            let v = (1.0 - t) * jac.get(i, j) + if i == j { t } else { 0.0 };
            jac.set(i, j, v);
        }
    }
    Ok(jac)
}
