//! Deterministic multistart driver over the Newton backend.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GpcpError, Result};
use crate::problem::{GpcpProblem, SolutionSetEstimate};
use crate::solver::{newton_minmap, NewtonOutcome, SolveConfig, DEDUPE_RADIUS};

/// An axis-aligned sampling box for start points.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl SampleBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(GpcpError::Dimension {
                context: "sample box bounds",
                expected: lo.len(),
                found: hi.len(),
            });
        }
        for (l, h) in lo.iter().zip(&hi) {
            if !(l.is_finite() && h.is_finite() && l <= h) {
                return Err(GpcpError::Validation(format!(
                    "sample box bounds must be finite with lo <= hi, got [{l}, {h}]"
                )));
            }
        }
        Ok(Self { lo, hi })
    }

    /// The cube `[lo, hi]^n`.
    pub fn cube(n: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; n], vec![hi; n])
    }

    /// Default start region `[0, 2 (1 + ||a|| + ||b||)]^n`: instances give no
    /// initialization guidance, so scale the box by the constant terms.
    pub fn default_for(p: &GpcpProblem) -> Self {
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let hi = 2.0 * (1.0 + norm(p.f().constant()) + norm(p.g().constant()));
        Self::cube(p.dim(), 0.0, hi).expect("default box is valid")
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub(crate) fn sample(&self, rng: &mut impl Rng) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(&l, &h)| {
                let u: f64 = rng.gen();
                l + u * (h - l)
            })
            .collect()
    }
}

/// Runs the Newton backend from `cfg.starts` seeded uniform draws in the box,
/// collects solved points, deduplicates within [`DEDUPE_RADIUS`], and sorts
/// lexicographically so identical inputs reproduce identical estimates.
pub fn multistart_solve(
    p: &GpcpProblem,
    cfg: &SolveConfig,
    sample_box: &SampleBox,
) -> Result<SolutionSetEstimate> {
    cfg.validate()?;
    if sample_box.dim() != p.dim() {
        return Err(GpcpError::Dimension {
            context: "multistart sample box",
            expected: p.dim(),
            found: sample_box.dim(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let starts: Vec<Vec<f64>> = (0..cfg.starts).map(|_| sample_box.sample(&mut rng)).collect();

    let mut solved: Vec<(Vec<f64>, f64)> = Vec::new();
    for x0 in &starts {
        if let NewtonOutcome::Solved { x, residual, .. } = newton_minmap(p, x0, cfg)? {
            solved.push((x, residual));
        }
    }

    solved.sort_by(|(xa, ra), (xb, rb)| {
        lex_cmp(xa, xb).then(ra.partial_cmp(rb).expect("finite residuals"))
    });

    let mut points: Vec<Vec<f64>> = Vec::new();
    let mut residuals: Vec<f64> = Vec::new();
    for (x, r) in solved {
        let is_new = points.iter().all(|kept| {
            kept.iter()
                .zip(&x)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt()
                > DEDUPE_RADIUS
        });
        if is_new {
            points.push(x);
            residuals.push(r);
        }
    }

    Ok(SolutionSetEstimate::from_parts(points, residuals, DEDUPE_RADIUS))
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y).expect("finite coordinates") {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    std::cmp::Ordering::Equal
}
