//! Closed convex cones: membership, projection, dual, and point-to-cone
//! distance.
//!
//! The nonnegative orthant gets exact componentwise projection. Finitely
//! generated cones are projected iteratively at desk scale. A cone given only
//! through dual (halfspace) constraints supports membership but not
//! projection.

use crate::error::{GpcpError, Result};

/// Default tolerance for membership decisions.
pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-8;

const PROJECTION_STEP_TOL: f64 = 1e-10;
const PROJECTION_MAX_ITERS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub enum Cone {
    NonnegativeOrthant { dim: usize },
    /// Conic hull of finitely many nonzero generators of common length.
    FinitelyGenerated { generators: Vec<Vec<f64>> },
    /// `{ y : <g, y> >= 0 for every generator g }`.
    DualOfFinitelyGenerated { generators: Vec<Vec<f64>> },
}

impl Cone {
    pub fn orthant(dim: usize) -> Self {
        Cone::NonnegativeOrthant { dim }
    }

    /// Validates generators: nonempty, nonzero, finite, common length.
    pub fn generated(generators: Vec<Vec<f64>>) -> Result<Self> {
        Self::check_generators(&generators)?;
        Ok(Cone::FinitelyGenerated { generators })
    }

    fn check_generators(generators: &[Vec<f64>]) -> Result<()> {
        if generators.is_empty() {
            return Err(GpcpError::Validation("cone needs at least one generator".into()));
        }
        let n = generators[0].len();
        if n == 0 {
            return Err(GpcpError::Validation("generators must be nonempty vectors".into()));
        }
        for (i, g) in generators.iter().enumerate() {
            if g.len() != n {
                return Err(GpcpError::Dimension {
                    context: "cone generator length",
                    expected: n,
                    found: g.len(),
                });
            }
            if g.iter().any(|v| !v.is_finite()) {
                return Err(GpcpError::Validation(format!("generator {i} has non-finite entries")));
            }
            if g.iter().all(|&v| v == 0.0) {
                return Err(GpcpError::Validation(format!("generator {i} is the zero vector")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            Cone::NonnegativeOrthant { dim } => *dim,
            Cone::FinitelyGenerated { generators }
            | Cone::DualOfFinitelyGenerated { generators } => generators[0].len(),
        }
    }

    /// The dual cone. The orthant is self-dual; generated cones swap between
    /// the generator and halfspace representations (bipolar closure).
    pub fn dual(&self) -> Cone {
        match self {
            Cone::NonnegativeOrthant { dim } => Cone::NonnegativeOrthant { dim: *dim },
            Cone::FinitelyGenerated { generators } => {
                Cone::DualOfFinitelyGenerated { generators: generators.clone() }
            }
            Cone::DualOfFinitelyGenerated { generators } => {
                Cone::FinitelyGenerated { generators: generators.clone() }
            }
        }
    }

    pub fn supports_projection(&self) -> bool {
        !matches!(self, Cone::DualOfFinitelyGenerated { .. })
    }

    /// Nearest point of the cone.
    ///
    /// Orthant: componentwise positive part, exact. Finitely generated:
    /// `G lambda*` with `lambda* >= 0` found by projected gradient at fixed
    /// step `1/L`, `L` a row-sum bound on the top eigenvalue of `G^T G`.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        match self {
            Cone::NonnegativeOrthant { .. } => Ok(x.iter().map(|&v| v.max(0.0)).collect()),
            Cone::FinitelyGenerated { generators } => Ok(project_generated(generators, x)),
            Cone::DualOfFinitelyGenerated { .. } => Err(GpcpError::ProjectionUnsupported),
        }
    }

    /// `inf_{u in K} ||x - u||`, via projection.
    pub fn distance(&self, x: &[f64]) -> Result<f64> {
        let p = self.project(x)?;
        Ok(norm_of_diff(x, &p))
    }

    /// Violation measure that is zero exactly on members: Euclidean distance
    /// where projection is available, worst generator slack
    /// `max(0, max_g -<g, y>)` for the halfspace representation.
    pub fn membership_violation(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        match self {
            Cone::NonnegativeOrthant { .. } => {
                Ok(x.iter().map(|&v| v.min(0.0).powi(2)).sum::<f64>().sqrt())
            }
            Cone::FinitelyGenerated { .. } => self.distance(x),
            Cone::DualOfFinitelyGenerated { generators } => {
                let worst = generators
                    .iter()
                    .map(|g| -dot(g, x))
                    .fold(0.0_f64, f64::max);
                Ok(worst)
            }
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        Ok(self.membership_violation(x)? <= tol)
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(GpcpError::Dimension {
                context: "cone point",
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm_of_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn project_generated(generators: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    let k = generators.len();
    let n = x.len();

    // Gram matrix and linear term of 0.5*||G l - x||^2.
    let mut gram = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            gram[i * k + j] = dot(&generators[i], &generators[j]);
        }
    }
    let gtx: Vec<f64> = generators.iter().map(|g| dot(g, x)).collect();

    // Row-sum (infinity norm) bound on the largest eigenvalue of G^T G.
    let lip = (0..k)
        .map(|i| (0..k).map(|j| gram[i * k + j].abs()).sum::<f64>())
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);

    let mut lambda = vec![0.0; k];
    let mut grad = vec![0.0; k];
    for _ in 0..PROJECTION_MAX_ITERS {
        for i in 0..k {
            grad[i] = (0..k).map(|j| gram[i * k + j] * lambda[j]).sum::<f64>() - gtx[i];
        }
        let mut change_sq = 0.0;
        for i in 0..k {
            let next = (lambda[i] - grad[i] / lip).max(0.0);
            change_sq += (next - lambda[i]).powi(2);
            lambda[i] = next;
        }
        if change_sq.sqrt() < PROJECTION_STEP_TOL {
            break;
        }
    }

    let mut out = vec![0.0; n];
    for (l, g) in lambda.iter().zip(generators) {
        for (o, gi) in out.iter_mut().zip(g) {
            *o += l * gi;
        }
    }
    out
}
