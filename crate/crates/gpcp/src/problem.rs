//! GPCP instances: a pair of polynomial maps over a cone, with the natural
//! residual, the normal map, and solution testing.
//!
//! An instance asks for `x` with `F(x) in K`, `G(x) in K*`, and
//! `<F(x), G(x)> = 0`. On the nonnegative orthant the componentwise min of
//! `F` and `G` vanishes exactly at solutions, which gives the natural
//! residual `r(x) = ||min{F(x), G(x)}||`.

use crate::cone::Cone;
use crate::error::{GpcpError, Result};
use crate::polymap::PolyMap;

#[derive(Debug, Clone, PartialEq)]
pub struct GpcpProblem {
    f: PolyMap,
    g: PolyMap,
    cone: Cone,
    name: Option<String>,
}

/// Slack diagnostics from a solution test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionCheck {
    pub satisfied: bool,
    /// Membership violation of `F(x)` against the cone.
    pub feas_f: f64,
    /// Membership violation of `G(x)` against the dual cone.
    pub feas_g: f64,
    /// `|<F(x), G(x)>|`, unscaled.
    pub gap: f64,
}

impl GpcpProblem {
    /// Both maps must share the cone's dimension and have degree at least one.
    pub fn new(f: PolyMap, g: PolyMap, cone: Cone, name: Option<String>) -> Result<Self> {
        let n = cone.dim();
        if f.dim() != n {
            return Err(GpcpError::Dimension { context: "map F", expected: n, found: f.dim() });
        }
        if g.dim() != n {
            return Err(GpcpError::Dimension { context: "map G", expected: n, found: g.dim() });
        }
        Ok(Self { f, g, cone, name })
    }

    pub fn f(&self) -> &PolyMap {
        &self.f
    }

    pub fn g(&self) -> &PolyMap {
        &self.g
    }

    pub fn cone(&self) -> &Cone {
        &self.cone
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.cone.dim()
    }

    fn require_orthant(&self) -> Result<()> {
        match self.cone {
            Cone::NonnegativeOrthant { .. } => Ok(()),
            _ => Err(GpcpError::UnsupportedCone),
        }
    }

    /// Componentwise `min{F(x), G(x)}`; defined on the orthant only.
    pub fn min_map(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.require_orthant()?;
        let fx = self.f.evaluate(x)?;
        let gx = self.g.evaluate(x)?;
        Ok(fx.iter().zip(&gx).map(|(a, b)| a.min(*b)).collect())
    }

    /// Natural residual `||min{F(x), G(x)}||`; zero exactly at solutions.
    pub fn natural_residual(&self, x: &[f64]) -> Result<f64> {
        let m = self.min_map(x)?;
        Ok(m.iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    /// Normal map `F(x) - P_K(F(x) - G(x))`; its zeros are the solutions.
    pub fn normal_map(&self, x: &[f64]) -> Result<Vec<f64>> {
        let fx = self.f.evaluate(x)?;
        let gx = self.g.evaluate(x)?;
        let diff: Vec<f64> = fx.iter().zip(&gx).map(|(a, b)| a - b).collect();
        let proj = self.cone.project(&diff)?;
        Ok(fx.iter().zip(&proj).map(|(a, p)| a - p).collect())
    }

    /// Complementarity test with slack diagnostics. The gap test is scaled by
    /// `1 + ||F|| ||G||` so the tolerance stays meaningful across instance
    /// scales.
    pub fn is_solution(&self, x: &[f64], tol: f64) -> Result<SolutionCheck> {
        let fx = self.f.evaluate(x)?;
        let gx = self.g.evaluate(x)?;
        let feas_f = self.cone.membership_violation(&fx)?;
        let feas_g = self.cone.dual().membership_violation(&gx)?;
        let gap = fx.iter().zip(&gx).map(|(a, b)| a * b).sum::<f64>().abs();
        let f_norm = fx.iter().map(|v| v * v).sum::<f64>().sqrt();
        let g_norm = gx.iter().map(|v| v * v).sum::<f64>().sqrt();
        let satisfied =
            feas_f <= tol && feas_g <= tol && gap <= tol * (1.0 + f_norm * g_norm);
        Ok(SolutionCheck { satisfied, feas_f, feas_g, gap })
    }
}

/// A deduplicated set of numerical solutions with matching residuals.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SolutionSetEstimate {
    points: Vec<Vec<f64>>,
    residuals: Vec<f64>,
    dedupe_radius: f64,
}

impl SolutionSetEstimate {
    /// Caller guarantees points are pairwise farther apart than the radius
    /// and already residual-screened; see `multistart_solve`.
    pub(crate) fn from_parts(
        points: Vec<Vec<f64>>,
        residuals: Vec<f64>,
        dedupe_radius: f64,
    ) -> Self {
        debug_assert_eq!(points.len(), residuals.len());
        Self { points, residuals, dedupe_radius }
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    pub fn dedupe_radius(&self) -> f64 {
        self.dedupe_radius
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Distance from `x` to the nearest stored point; infinity when empty.
    pub fn distance_to(&self, x: &[f64]) -> f64 {
        self.points
            .iter()
            .map(|p| {
                p.iter()
                    .zip(x)
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// A copy with one extra point appended; used to check that enlarging the
    /// estimate can only shrink distances.
    pub fn with_extra_point(&self, x: Vec<f64>, residual: f64) -> Self {
        let mut out = self.clone();
        out.points.push(x);
        out.residuals.push(residual);
        out
    }
}
