//! Empirical probes for the residual-based error bound machinery.
//!
//! `error_bound_scan` estimates the constant in `dist(x, S) <= c r(x)` by
//! sampling, measuring distances against a computed solution estimate (an
//! upper bound on the true distance, so the constant is conservative).
//! `falsify_pairwise_growth` hunts for point pairs breaking uniform growth
//! conditions on the pair `(F, G)`. `probe_solution_rate` inspects the
//! componentwise residual rate along directions into a solution, and
//! `probe_ray_growth` follows diverging rays and checks that whenever both
//! maps stay asymptotically feasible, some residual component grows.
//!
//! Limits and limsups are replaced by fixed finite schedules with last-window
//! averaging; the thresholds are documented constants.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{GpcpError, Result};
use crate::problem::{GpcpProblem, SolutionSetEstimate};
use crate::solver::SampleBox;

/// Samples with residual at or below this guard are excluded from ratios.
pub const RESIDUAL_GUARD: f64 = 1e-14;
/// The log-log exponent fit is restricted to residuals in this window.
pub const FIT_WINDOW: (f64, f64) = (1e-12, 1.0);
/// Within the window, only the fraction of samples with the smallest
/// residuals enters the exponent fit. The exponent is an `r -> 0` property;
/// samples far from the solution set, where residual growth saturates
/// against distance, would otherwise dominate the least squares and bias the
/// slope away from the near-solution value. On an affine instance the fit is
/// exactly 1 under any restriction.
pub const FIT_QUANTILE: f64 = 0.25;
/// Last-window average below this accepts the asymptotic feasibility premise
/// along a ray.
pub const PREMISE_TOL: f64 = 1e-3;
/// A stabilized component ratio of at least this magnitude counts as a
/// nonzero limit.
pub const NONZERO_LIMIT_FLOOR: f64 = 0.01;
/// Limsup estimates above this count as positive residual growth.
pub const LIMSUP_POS_TOL: f64 = 1e-9;
/// Ray evaluation stops before any map component exceeds this magnitude.
pub const OVERFLOW_GUARD: f64 = 1e300;

const LAST_WINDOW: usize = 5;

/// One sampled point with its distance, residual, and ratio.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioSample {
    pub x: Vec<f64>,
    pub dist: f64,
    pub residual: f64,
    pub ratio: f64,
}

/// Result of the sampling scan for the Lipschitz constant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorBoundReport {
    pub omega_hat: SolutionSetEstimate,
    pub sample_count: usize,
    pub box_lo: Vec<f64>,
    pub box_hi: Vec<f64>,
    pub ratios: Vec<RatioSample>,
    /// Max ratio over retained samples; conservative because distances are
    /// measured against the estimate, which can only overestimate.
    pub c_estimate: f64,
    /// Slope of log dist against log residual over the lowest-residual
    /// quantile of the fit window; close to 1 for a Lipschitzian bound.
    pub tau_fit: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GrowthVariant {
    /// `max_j [F_j(x)-F_j(y)][G_j(x)-G_j(y)] > rho ||x-y||^2`.
    MaxProduct,
    /// `[F(x)-F(y)]^T [G(x)-G(y)] > mu ||x-y||^2`.
    InnerProduct,
}

/// Violation or consistency carrier shared by the probes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ProbeOutcome<W, E> {
    ViolationFound(W),
    ConsistentWithinBudget(E),
}

impl<W, E> ProbeOutcome<W, E> {
    pub fn violation(&self) -> Option<&W> {
        match self {
            ProbeOutcome::ViolationFound(w) => Some(w),
            ProbeOutcome::ConsistentWithinBudget(_) => None,
        }
    }
}

/// A pair `(x, y)` whose growth product fails to exceed `rho ||x-y||^2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairWitness {
    pub rho: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Attained max product or inner product.
    pub value: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthEvidence {
    pub pairs_checked: usize,
    /// Smallest observed `value - rho ||x-y||^2` and the grid value it
    /// occurred at.
    pub smallest_slack: f64,
    pub at_rho: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthProbeResult {
    pub variant: GrowthVariant,
    pub outcome: ProbeOutcome<PairWitness, GrowthEvidence>,
}

/// Per-direction rate finding near a solution: the component whose ratio
/// sequence stabilizes farthest from zero, with its estimate and curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionFinding {
    pub direction: Vec<f64>,
    pub component: usize,
    pub limit_estimate: f64,
    pub ratios: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateProbeResult {
    pub outcome: ProbeOutcome<DirectionFinding, Vec<DirectionFinding>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum RayStatus {
    /// The asymptotic feasibility premise failed; the conditional claim is
    /// vacuous along this ray and the direction is skipped.
    PremiseNotMet { f_ratio: f64, g_ratio: f64 },
    /// Some component's residual ratio has positive limsup.
    Witnessed { component: usize, limsup_estimate: f64 },
    /// Premise met but every component's limsup is nonpositive: a violation.
    AllComponentsVanish { max_limsup: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RayFinding {
    pub direction: Vec<f64>,
    pub status: RayStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RayProbeResult {
    pub outcome: ProbeOutcome<RayFinding, Vec<RayFinding>>,
}

/// Samples uniformly in the box and reports `dist(x, omega_hat) / r(x)`
/// statistics together with the log-log exponent fit.
pub fn error_bound_scan(
    p: &GpcpProblem,
    omega_hat: &SolutionSetEstimate,
    sample_box: &SampleBox,
    sample_count: usize,
    seed: u64,
) -> Result<ErrorBoundReport> {
    if omega_hat.is_empty() {
        return Err(GpcpError::EmptySolutionEstimate);
    }
    if sample_box.dim() != p.dim() {
        return Err(GpcpError::Dimension {
            context: "scan sample box",
            expected: p.dim(),
            found: sample_box.dim(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ratios = Vec::new();
    for _ in 0..sample_count {
        let x = sample_box.sample(&mut rng);
        let residual = p.natural_residual(&x)?;
        if residual <= RESIDUAL_GUARD {
            continue;
        }
        let dist = omega_hat.distance_to(&x);
        ratios.push(RatioSample { x, dist, residual, ratio: dist / residual });
    }

    let c_estimate = ratios.iter().map(|r| r.ratio).fold(0.0_f64, f64::max);

    // exponent fit: window the residuals, then keep the lowest-residual
    // quantile so the near-solution regime sets the slope
    let mut fit_pts: Vec<(f64, f64)> = ratios
        .iter()
        .filter(|r| r.residual > FIT_WINDOW.0 && r.residual <= FIT_WINDOW.1 && r.dist > 0.0)
        .map(|r| (r.residual, r.dist))
        .collect();
    fit_pts.sort_by(|a, b| a.partial_cmp(b).expect("finite residuals"));
    let keep = ((fit_pts.len() as f64 * FIT_QUANTILE).ceil() as usize).max(2);
    fit_pts.truncate(keep);
    let tau_fit = fit_loglog_slope(fit_pts.into_iter().map(|(r, d)| (r.ln(), d.ln())));

    Ok(ErrorBoundReport {
        omega_hat: omega_hat.clone(),
        sample_count,
        box_lo: sample_box.lo().to_vec(),
        box_hi: sample_box.hi().to_vec(),
        ratios,
        c_estimate,
        tau_fit,
    })
}

fn fit_loglog_slope(points: impl Iterator<Item = (f64, f64)>) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mean_x = pts.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y = pts.iter().map(|(_, y)| y).sum::<f64>() / n;
    let cov: f64 = pts.iter().map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let var: f64 = pts.iter().map(|(x, _)| (x - mean_x).powi(2)).sum();
    if var <= 0.0 {
        return None;
    }
    Some(cov / var)
}

/// Structured epsilon ladder for the two-dimensional pair family
/// `x = (eps, eps/2)`, `y = (eps, eps)`.
const STRUCTURED_EPS: [f64; 7] = [1.0, 0.5, 0.1, 0.05, 0.01, 0.005, 0.001];

/// For each grid value, scans candidate pairs (the structured family first,
/// then seeded random pairs) for `value <= rho ||x-y||^2`; the first hit is
/// reported with its attained product.
pub fn falsify_pairwise_growth(
    p: &GpcpProblem,
    variant: GrowthVariant,
    rho_grid: &[f64],
    pair_budget: usize,
    seed: u64,
) -> Result<GrowthProbeResult> {
    let n = p.dim();
    let mut candidates: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    if n == 2 {
        for eps in STRUCTURED_EPS {
            candidates.push((vec![eps, eps / 2.0], vec![eps, eps]));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..pair_budget {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        candidates.push((x, y));
    }

    let mut smallest_slack = f64::INFINITY;
    let mut at_rho = f64::NAN;
    let mut pairs_checked = 0;
    for &rho in rho_grid {
        for (x, y) in &candidates {
            let dist_sq: f64 = x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum();
            if dist_sq == 0.0 {
                continue;
            }
            pairs_checked += 1;
            let fx = p.f().evaluate(x)?;
            let fy = p.f().evaluate(y)?;
            let gx = p.g().evaluate(x)?;
            let gy = p.g().evaluate(y)?;
            let products =
                (0..n).map(|j| (fx[j] - fy[j]) * (gx[j] - gy[j]));
            let value = match variant {
                GrowthVariant::MaxProduct => products.fold(f64::NEG_INFINITY, f64::max),
                GrowthVariant::InnerProduct => products.sum(),
            };
            let bound = rho * dist_sq;
            if value <= bound {
                return Ok(GrowthProbeResult {
                    variant,
                    outcome: ProbeOutcome::ViolationFound(PairWitness {
                        rho,
                        x: x.clone(),
                        y: y.clone(),
                        value,
                        bound,
                    }),
                });
            }
            if value - bound < smallest_slack {
                smallest_slack = value - bound;
                at_rho = rho;
            }
        }
    }
    Ok(GrowthProbeResult {
        variant,
        outcome: ProbeOutcome::ConsistentWithinBudget(GrowthEvidence {
            pairs_checked,
            smallest_slack,
            at_rho,
        }),
    })
}

/// Radii `2^-1 .. 2^-30` for the solution-rate probe.
pub fn default_radii() -> Vec<f64> {
    (1..=30).map(|k| 2f64.powi(-k)).collect()
}

/// Scales `2^1 .. 2^40` for the ray probe.
pub fn default_scales() -> Vec<f64> {
    (1..=40).map(|k| 2f64.powi(k)).collect()
}

/// Seeded unit directions for probes that need a direction set.
pub fn random_unit_directions(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| loop {
            let d: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let norm: f64 = d.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 1e-9 {
                break d.iter().map(|v| v / norm).collect();
            }
        })
        .collect()
}

/// For each direction `d` and shrinking radius `r`, tracks the per-component
/// ratio `min{F_j, G_j}(xbar + r d) / r` and reports, per direction, the
/// component stabilizing farthest from zero. Consistent when every direction
/// has a stabilized nonzero limit; otherwise the bad direction is returned.
pub fn probe_solution_rate(
    p: &GpcpProblem,
    xbar: &[f64],
    directions: &[Vec<f64>],
    radii: &[f64],
) -> Result<RateProbeResult> {
    let check = p.is_solution(xbar, 1e-8)?;
    if !check.satisfied {
        let residual = p.natural_residual(xbar)?;
        return Err(GpcpError::NotASolution { residual, tol: 1e-8 });
    }
    let n = p.dim();
    if radii.is_empty() {
        return Err(GpcpError::Validation("radius schedule is empty".into()));
    }

    let mut findings = Vec::new();
    let mut bad: Option<DirectionFinding> = None;
    for d in directions {
        let dir = normalized(d)?;
        // ratios[j][k]
        let mut ratios = vec![Vec::with_capacity(radii.len()); n];
        for &r in radii {
            let y: Vec<f64> = xbar.iter().zip(&dir).map(|(c, di)| c + r * di).collect();
            let m = p.min_map(&y)?;
            for j in 0..n {
                ratios[j].push(m[j] / r);
            }
        }
        let estimates: Vec<f64> = ratios.iter().map(|seq| last_window_mean(seq)).collect();
        let component = argmax_abs(&estimates);
        let finding = DirectionFinding {
            direction: dir,
            component,
            limit_estimate: estimates[component],
            ratios: ratios[component].clone(),
        };
        if finding.limit_estimate.abs() < NONZERO_LIMIT_FLOOR && bad.is_none() {
            bad = Some(finding.clone());
        }
        findings.push(finding);
    }

    let outcome = match bad {
        Some(f) => ProbeOutcome::ViolationFound(f),
        None => ProbeOutcome::ConsistentWithinBudget(findings),
    };
    Ok(RateProbeResult { outcome })
}

/// Follows each ray `s d` for growing `s`. When both negative-part ratios
/// vanish (asymptotic feasibility premise), some component's residual ratio
/// must show positive limsup; a ray where every component's limsup is
/// nonpositive is a violation. Rays failing the premise are skipped with the
/// measured ratios as evidence. Evaluation truncates at the largest scale
/// free of overflow.
pub fn probe_ray_growth(
    p: &GpcpProblem,
    ray_directions: &[Vec<f64>],
    scales: &[f64],
) -> Result<RayProbeResult> {
    match p.cone() {
        crate::cone::Cone::NonnegativeOrthant { .. } => {}
        _ => return Err(GpcpError::UnsupportedCone),
    }
    let n = p.dim();

    let mut findings = Vec::new();
    let mut violation: Option<RayFinding> = None;
    for d in ray_directions {
        let dir = normalized(d)?;
        let mut f_ratios = Vec::new();
        let mut g_ratios = Vec::new();
        let mut min_ratios = vec![Vec::new(); n];
        for &s in scales {
            let x: Vec<f64> = dir.iter().map(|di| s * di).collect();
            let fx = p.f().evaluate(&x)?;
            let gx = p.g().evaluate(&x)?;
            if fx.iter().chain(&gx).any(|v| v.abs() > OVERFLOW_GUARD) {
                break;
            }
            f_ratios.push(neg_part_norm(&fx) / s);
            g_ratios.push(neg_part_norm(&gx) / s);
            for j in 0..n {
                min_ratios[j].push(fx[j].min(gx[j]) / s);
            }
        }

        let status = if f_ratios.len() < LAST_WINDOW {
            RayStatus::PremiseNotMet {
                f_ratio: last_window_mean(&f_ratios),
                g_ratio: last_window_mean(&g_ratios),
            }
        } else {
            let f_ratio = last_window_mean(&f_ratios);
            let g_ratio = last_window_mean(&g_ratios);
            if f_ratio >= PREMISE_TOL || g_ratio >= PREMISE_TOL {
                RayStatus::PremiseNotMet { f_ratio, g_ratio }
            } else {
                let limsups: Vec<f64> =
                    min_ratios.iter().map(|seq| last_window_max(seq)).collect();
                let j0 = argmax(&limsups);
                if limsups[j0] > LIMSUP_POS_TOL {
                    RayStatus::Witnessed { component: j0, limsup_estimate: limsups[j0] }
                } else {
                    RayStatus::AllComponentsVanish { max_limsup: limsups[j0] }
                }
            }
        };
        let finding = RayFinding { direction: dir, status };
        if matches!(finding.status, RayStatus::AllComponentsVanish { .. }) && violation.is_none()
        {
            violation = Some(finding.clone());
        }
        findings.push(finding);
    }

    let outcome = match violation {
        Some(f) => ProbeOutcome::ViolationFound(f),
        None => ProbeOutcome::ConsistentWithinBudget(findings),
    };
    Ok(RayProbeResult { outcome })
}

fn neg_part_norm(v: &[f64]) -> f64 {
    v.iter().map(|&c| (-c).max(0.0).powi(2)).sum::<f64>().sqrt()
}

fn last_window_mean(seq: &[f64]) -> f64 {
    if seq.is_empty() {
        return f64::NAN;
    }
    let w = seq.len().min(LAST_WINDOW);
    seq[seq.len() - w..].iter().sum::<f64>() / w as f64
}

fn last_window_max(seq: &[f64]) -> f64 {
    let w = seq.len().min(LAST_WINDOW);
    seq[seq.len() - w..].iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

fn argmax_abs(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, val) in v.iter().enumerate() {
        if val.abs() > v[best].abs() {
            best = i;
        }
    }
    best
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, val) in v.iter().enumerate() {
        if *val > v[best] {
            best = i;
        }
    }
    best
}

fn normalized(d: &[f64]) -> Result<Vec<f64>> {
    let norm: f64 = d.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 1e-12 && norm.is_finite()) {
        return Err(GpcpError::Validation("direction must be a nonzero vector".into()));
    }
    Ok(d.iter().map(|v| v / norm).collect())
}
