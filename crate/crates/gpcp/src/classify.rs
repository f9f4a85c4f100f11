//! Counterexample search for structured tensor-pair classes.
//!
//! Each query asks whether a feasibility system over the unit sphere (plus
//! nonnegative slacks where applicable) admits a nonzero point. The searches
//! are multistart projected minimizations of a merit function: a vanishing
//! merit exhibits a counterexample, while exhaustion of the budget yields a
//! "no counterexample" verdict that is explicitly budget-qualified, never a
//! proof of emptiness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::cone::{Cone, DEFAULT_MEMBERSHIP_TOL};
use crate::error::{GpcpError, Result};
use crate::problem::GpcpProblem;
use crate::tensor::DenseTensor;

/// Merit below this exhibits a counterexample for the pair queries.
pub const MERIT_COUNTEREXAMPLE_TOL: f64 = 1e-16;
/// Objective value at or below this exhibits a counterexample for the
/// definiteness queries.
pub const VALUE_COUNTEREXAMPLE_TOL: f64 = 1e-10;
/// Slack variables are searched in `[0, SLACK_CAP]` with log-uniform starts;
/// a heuristic cap, since unbounded slacks only help the feasibility terms
/// while the orthogonality term dominates.
pub const SLACK_CAP: f64 = 100.0;

const FD_STEP: f64 = 1e-7;
const HARD_STOP_MERIT: f64 = 1e-18;
const MAX_BACKTRACKS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClassifyQuery {
    ErPair,
    R0Pair,
    PositiveDefinite,
    StrictlyCopositive,
    StrictlyKPositive,
    SMapsConeIntoCone,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchBudget {
    pub starts: usize,
    pub iters_per_start: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { starts: 500, iters_per_start: 500 }
    }
}

impl SearchBudget {
    pub fn with_starts(starts: usize) -> Self {
        Self { starts, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Witness {
    /// `(x, v, t)` with the attained merit.
    ErTriple { x: Vec<f64>, v: f64, t: f64, merit: f64 },
    R0Direction { x: Vec<f64>, merit: f64 },
    /// Unit vector with the attained homogeneous-form value.
    SpherePoint { x: Vec<f64>, value: f64 },
    /// Sampled cone point whose image leaves the cone.
    ConePoint { x: Vec<f64>, violation: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum VerdictOutcome {
    CounterexampleFound(Witness),
    /// No counterexample within the search budget. `best_value` is the
    /// smallest merit (pair queries) or objective value (definiteness
    /// queries) seen.
    NoCounterexampleFound { starts: usize, iters_per_start: usize, best_value: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationVerdict {
    pub query: ClassifyQuery,
    pub outcome: VerdictOutcome,
}

impl ClassificationVerdict {
    pub fn counterexample(&self) -> Option<&Witness> {
        match &self.outcome {
            VerdictOutcome::CounterexampleFound(w) => Some(w),
            VerdictOutcome::NoCounterexampleFound { .. } => None,
        }
    }
}

impl std::fmt::Display for ClassificationVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.outcome {
            VerdictOutcome::CounterexampleFound(w) => match w {
                Witness::ErTriple { x, v, t, merit } => write!(
                    f,
                    "CounterexampleFound: x = {x:?}, v = {v:.6e}, t = {t:.6e} (merit {merit:.3e})"
                ),
                Witness::R0Direction { x, merit } => {
                    write!(f, "CounterexampleFound: x = {x:?} (merit {merit:.3e})")
                }
                Witness::SpherePoint { x, value } => {
                    write!(f, "CounterexampleFound: x = {x:?} (value {value:.6e})")
                }
                Witness::ConePoint { x, violation } => {
                    write!(f, "CounterexampleFound: x = {x:?} (violation {violation:.6e})")
                }
            },
            VerdictOutcome::NoCounterexampleFound { starts, best_value, .. } => write!(
                f,
                "NoCounterexampleFound (budget {starts} starts); best value {best_value:.6e} \
                 within search budget, not a proof"
            ),
        }
    }
}

/// Merit of the augmented complementarity system at `(x, v, t)`:
/// squared cone violation of `A x^{m-1} + v x`, squared dual violation of
/// `B x^{l-1} + t x`, and squared pairing.
pub fn er_merit(
    a: &DenseTensor,
    b: &DenseTensor,
    cone: &Cone,
    x: &[f64],
    v: f64,
    t: f64,
) -> Result<f64> {
    er_merit_with_dual(a, b, cone, &cone.dual(), x, v, t)
}

fn er_merit_with_dual(
    a: &DenseTensor,
    b: &DenseTensor,
    cone: &Cone,
    dual: &Cone,
    x: &[f64],
    v: f64,
    t: f64,
) -> Result<f64> {
    let mut u = a.contract_to_vector(x)?;
    for (ui, xi) in u.iter_mut().zip(x) {
        *ui += v * xi;
    }
    let mut w = b.contract_to_vector(x)?;
    for (wi, xi) in w.iter_mut().zip(x) {
        *wi += t * xi;
    }
    let du = cone.membership_violation(&u)?;
    let dw = dual.membership_violation(&w)?;
    let ip: f64 = u.iter().zip(&w).map(|(p, q)| p * q).sum();
    Ok(du * du + dw * dw + ip * ip)
}

/// Searches for `(x, v, t)` with unit `x` and nonnegative slacks making the
/// augmented system feasible. Gradients are central finite differences: the
/// merit composes projections, so kinks rule out an analytic form.
pub fn find_er_counterexample(
    a: &DenseTensor,
    b: &DenseTensor,
    cone: &Cone,
    budget: SearchBudget,
    seed: u64,
) -> Result<ClassificationVerdict> {
    check_pair(a, b, cone)?;
    let n = cone.dim();
    let dual = cone.dual();
    let objective =
        |z: &[f64]| er_merit_with_dual(a, b, cone, &dual, &z[..n], z[n], z[n + 1]).unwrap();
    let project = |z: &mut [f64]| {
        normalize_or_reset(&mut z[..n]);
        z[n] = z[n].clamp(0.0, SLACK_CAP);
        z[n + 1] = z[n + 1].clamp(0.0, SLACK_CAP);
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for _ in 0..budget.starts {
        let mut z = random_unit(&mut rng, n);
        z.push(log_uniform_slack(&mut rng));
        z.push(log_uniform_slack(&mut rng));
        let (zf, val) = minimize(z, budget.iters_per_start, &objective, &project);
        replace_if_better(&mut best, zf, val);
    }
    let (z, merit) = best.expect("at least one start");
    let outcome = if merit < MERIT_COUNTEREXAMPLE_TOL {
        VerdictOutcome::CounterexampleFound(Witness::ErTriple {
            x: z[..n].to_vec(),
            v: z[n],
            t: z[n + 1],
            merit,
        })
    } else {
        VerdictOutcome::NoCounterexampleFound {
            starts: budget.starts,
            iters_per_start: budget.iters_per_start,
            best_value: merit,
        }
    };
    Ok(ClassificationVerdict { query: ClassifyQuery::ErPair, outcome })
}

/// The slack-free variant: searches unit `x` with `v = t = 0`.
pub fn find_r0_counterexample(
    a: &DenseTensor,
    b: &DenseTensor,
    cone: &Cone,
    budget: SearchBudget,
    seed: u64,
) -> Result<ClassificationVerdict> {
    check_pair(a, b, cone)?;
    let n = cone.dim();
    let dual = cone.dual();
    let objective = |z: &[f64]| er_merit_with_dual(a, b, cone, &dual, z, 0.0, 0.0).unwrap();
    let project = |z: &mut [f64]| normalize_or_reset(z);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for _ in 0..budget.starts {
        let z = random_unit(&mut rng, n);
        let (zf, val) = minimize(z, budget.iters_per_start, &objective, &project);
        replace_if_better(&mut best, zf, val);
    }
    let (x, merit) = best.expect("at least one start");
    let outcome = if merit < MERIT_COUNTEREXAMPLE_TOL {
        VerdictOutcome::CounterexampleFound(Witness::R0Direction { x, merit })
    } else {
        VerdictOutcome::NoCounterexampleFound {
            starts: budget.starts,
            iters_per_start: budget.iters_per_start,
            best_value: merit,
        }
    };
    Ok(ClassificationVerdict { query: ClassifyQuery::R0Pair, outcome })
}

/// Minimizes `A x^m` over the unit sphere. Odd orders are rejected: the form
/// is odd under `x -> -x`, so it cannot be positive definite.
pub fn check_positive_definite(
    a: &DenseTensor,
    budget: SearchBudget,
    seed: u64,
) -> Result<ClassificationVerdict> {
    if a.order() % 2 != 0 {
        return Err(GpcpError::OddOrder { order: a.order() });
    }
    let outcome = minimize_form_over(
        a,
        |z: &mut [f64]| normalize_or_reset(z),
        budget,
        seed,
    )?;
    Ok(ClassificationVerdict { query: ClassifyQuery::PositiveDefinite, outcome })
}

/// Minimizes `A x^m` over the nonnegative part of the unit sphere.
pub fn check_strictly_copositive(
    a: &DenseTensor,
    budget: SearchBudget,
    seed: u64,
) -> Result<ClassificationVerdict> {
    let verdict = check_strictly_k_positive(a, &Cone::orthant(a.dim()), budget, seed)?;
    Ok(ClassificationVerdict { query: ClassifyQuery::StrictlyCopositive, outcome: verdict.outcome })
}

/// Minimizes `A x^m` over unit vectors of a cone with projection; strict
/// positivity of the form on the cone fails exactly when a counterexample
/// value at or below the threshold exists.
pub fn check_strictly_k_positive(
    a: &DenseTensor,
    cone: &Cone,
    budget: SearchBudget,
    seed: u64,
) -> Result<ClassificationVerdict> {
    if !cone.supports_projection() {
        return Err(GpcpError::ProjectionUnsupported);
    }
    if cone.dim() != a.dim() {
        return Err(GpcpError::Dimension {
            context: "classification cone",
            expected: a.dim(),
            found: cone.dim(),
        });
    }
    let fallback = cone_unit_point(cone);
    let project = |z: &mut [f64]| {
        let p = cone.project(z).expect("projection support checked");
        z.copy_from_slice(&p);
        if !normalize(z) {
            z.copy_from_slice(&fallback);
        }
    };
    let outcome = minimize_form_over(a, project, budget, seed)?;
    Ok(ClassificationVerdict { query: ClassifyQuery::StrictlyKPositive, outcome })
}

fn minimize_form_over(
    a: &DenseTensor,
    project: impl Fn(&mut [f64]),
    budget: SearchBudget,
    seed: u64,
) -> Result<VerdictOutcome> {
    let n = a.dim();
    let objective = |z: &[f64]| a.contract_to_scalar(z).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for _ in 0..budget.starts {
        let z = random_unit(&mut rng, n);
        let (zf, val) = minimize_value(z, budget.iters_per_start, &objective, &project);
        replace_if_better(&mut best, zf, val);
    }
    let (x, value) = best.expect("at least one start");
    if value <= VALUE_COUNTEREXAMPLE_TOL {
        Ok(VerdictOutcome::CounterexampleFound(Witness::SpherePoint { x, value }))
    } else {
        Ok(VerdictOutcome::NoCounterexampleFound {
            starts: budget.starts,
            iters_per_start: budget.iters_per_start,
            best_value: value,
        })
    }
}

/// Samples cone points over several magnitudes and checks that
/// `S(x) = x - F(x)` stays in the cone.
pub fn check_s_map_invariance(
    p: &GpcpProblem,
    samples: usize,
    seed: u64,
) -> Result<ClassificationVerdict> {
    const SCALES: [f64; 5] = [0.01, 0.1, 1.0, 10.0, 100.0];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for i in 0..samples {
        let scale = SCALES[i % SCALES.len()];
        let x = sample_cone_point(&mut rng, p.cone(), scale);
        let fx = p.f().evaluate(&x)?;
        let s: Vec<f64> = x.iter().zip(&fx).map(|(xi, fi)| xi - fi).collect();
        let violation = p.cone().membership_violation(&s)?;
        if violation > DEFAULT_MEMBERSHIP_TOL {
            return Ok(ClassificationVerdict {
                query: ClassifyQuery::SMapsConeIntoCone,
                outcome: VerdictOutcome::CounterexampleFound(Witness::ConePoint {
                    x,
                    violation,
                }),
            });
        }
        worst = worst.max(violation);
    }
    Ok(ClassificationVerdict {
        query: ClassifyQuery::SMapsConeIntoCone,
        outcome: VerdictOutcome::NoCounterexampleFound {
            starts: samples,
            iters_per_start: 1,
            best_value: worst,
        },
    })
}

fn check_pair(a: &DenseTensor, b: &DenseTensor, cone: &Cone) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(GpcpError::Dimension {
            context: "tensor pair",
            expected: a.dim(),
            found: b.dim(),
        });
    }
    if cone.dim() != a.dim() {
        return Err(GpcpError::Dimension {
            context: "classification cone",
            expected: a.dim(),
            found: cone.dim(),
        });
    }
    Ok(())
}

/// Projected descent with central-difference gradients; returns the final
/// point and value. Stops early below the hard merit floor or when no
/// descent step is found.
fn minimize(
    start: Vec<f64>,
    iters: usize,
    objective: &impl Fn(&[f64]) -> f64,
    project: &impl Fn(&mut [f64]),
) -> (Vec<f64>, f64) {
    descend(start, iters, objective, project, Some(HARD_STOP_MERIT))
}

fn minimize_value(
    start: Vec<f64>,
    iters: usize,
    objective: &impl Fn(&[f64]) -> f64,
    project: &impl Fn(&mut [f64]),
) -> (Vec<f64>, f64) {
    descend(start, iters, objective, project, None)
}

fn descend(
    mut z: Vec<f64>,
    iters: usize,
    objective: &impl Fn(&[f64]) -> f64,
    project: &impl Fn(&mut [f64]),
    stop_below: Option<f64>,
) -> (Vec<f64>, f64) {
    project(&mut z);
    let mut val = objective(&z);
    let dim = z.len();
    let mut grad = vec![0.0; dim];
    for _ in 0..iters {
        if let Some(floor) = stop_below {
            if val < floor {
                break;
            }
        }
        for i in 0..dim {
            let saved = z[i];
            z[i] = saved + FD_STEP;
            let up = objective(&z);
            z[i] = saved - FD_STEP;
            let down = objective(&z);
            z[i] = saved;
            grad[i] = (up - down) / (2.0 * FD_STEP);
        }
        let gnorm: f64 = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gnorm < 1e-14 {
            break;
        }

        let mut alpha = 1.0 / gnorm.max(1.0);
        let mut accepted = false;
        for _ in 0..MAX_BACKTRACKS {
            let mut trial: Vec<f64> =
                z.iter().zip(&grad).map(|(zi, gi)| zi - alpha * gi).collect();
            project(&mut trial);
            let tv = objective(&trial);
            if tv < val {
                z = trial;
                val = tv;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (z, val)
}

fn replace_if_better(best: &mut Option<(Vec<f64>, f64)>, cand: Vec<f64>, val: f64) {
    let take = match best {
        None => true,
        Some((bz, bv)) => {
            // strict improvement, lexicographic point order on exact ties
            val < *bv || (val == *bv && lex_less(&cand, bz))
        }
    };
    if take {
        *best = Some((cand, val));
    }
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

fn normalize(z: &mut [f64]) -> bool {
    let norm: f64 = z.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm < 1e-12 || !norm.is_finite() {
        return false;
    }
    z.iter_mut().for_each(|v| *v /= norm);
    true
}

fn normalize_or_reset(z: &mut [f64]) {
    if !normalize(z) {
        z.iter_mut().for_each(|v| *v = 0.0);
        z[0] = 1.0;
    }
}

fn cone_unit_point(cone: &Cone) -> Vec<f64> {
    match cone {
        Cone::NonnegativeOrthant { dim } => {
            let mut e = vec![0.0; *dim];
            e[0] = 1.0;
            e
        }
        Cone::FinitelyGenerated { generators } => {
            let mut g = generators[0].clone();
            normalize_or_reset(&mut g);
            g
        }
        Cone::DualOfFinitelyGenerated { .. } => unreachable!("projection support checked"),
    }
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    normalize_or_reset(&mut x);
    x
}

fn log_uniform_slack(rng: &mut ChaCha8Rng) -> f64 {
    let exp = rng.gen_range(-6.0..2.0);
    10f64.powf(exp)
}

fn sample_cone_point(rng: &mut ChaCha8Rng, cone: &Cone, scale: f64) -> Vec<f64> {
    match cone {
        Cone::NonnegativeOrthant { dim } => (0..*dim)
            .map(|_| {
                let g: f64 = rng.sample(StandardNormal);
                scale * g.abs()
            })
            .collect(),
        Cone::FinitelyGenerated { generators } => {
            let n = generators[0].len();
            let mut out = vec![0.0; n];
            for g in generators {
                let w: f64 = rng.sample(StandardNormal);
                let w = scale * w.abs();
                for (o, gi) in out.iter_mut().zip(g) {
                    *o += w * gi;
                }
            }
            out
        }
        // membership of the halfspace representation is decidable, but there
        // is no generator list to sample; fall back to the dual's generators
        // filtered through the membership test
        Cone::DualOfFinitelyGenerated { .. } => {
            let n = cone.dim();
            loop {
                let cand: Vec<f64> = (0..n)
                    .map(|_| {
                        let g: f64 = rng.sample(StandardNormal);
                        scale * g
                    })
                    .collect();
                if cone.contains(&cand, 0.0).unwrap_or(false) {
                    return cand;
                }
            }
        }
    }
}
