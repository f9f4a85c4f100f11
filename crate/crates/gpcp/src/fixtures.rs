//! Bundled demo instances used by the CLI `demo` subcommand and the test
//! suites.

use crate::cone::Cone;
use crate::polymap::PolyMap;
use crate::problem::GpcpProblem;
use crate::tensor::DenseTensor;

/// The order-4, dim-2 tensor pair behind `example_2_1_pair.json`: each side
/// has three unit-magnitude entries and the pair admits no nonzero
/// complementarity direction over the orthant.
pub fn example_2_1_pair() -> (DenseTensor, DenseTensor) {
    let a = DenseTensor::from_sparse(
        4,
        2,
        &[(&[0, 0, 0, 0], 1.0), (&[1, 0, 0, 0], -1.0), (&[1, 1, 1, 1], 1.0)],
    )
    .expect("tensor A fixture");
    let b = DenseTensor::from_sparse(
        4,
        2,
        &[(&[0, 0, 0, 0], 1.0), (&[1, 0, 1, 1], -1.0), (&[1, 1, 1, 1], 1.0)],
    )
    .expect("tensor B fixture");
    (a, b)
}

/// The cubic instance behind `example_5_1.json`: `F = A x^3 + (-1, 0)` and
/// `G = B x^3 + (1, 0)` over the orthant, with unique solution `(1, 1)`.
pub fn example_5_1() -> GpcpProblem {
    let (a, b) = example_2_1_pair();
    let f = PolyMap::from_leading(a, vec![-1.0, 0.0]).expect("map F fixture");
    let g = PolyMap::from_leading(b, vec![1.0, 0.0]).expect("map G fixture");
    GpcpProblem::new(f, g, Cone::orthant(2), Some("example_5_1".into()))
        .expect("fixture problem")
}

/// Unit-tensor demo: `F = I x^3 + (-1, -1)`, `G(x) = x`; the componentwise
/// condition `min{x^3 - 1, x} = 0` forces the solution `(1, 1)`.
pub fn tcp_unit_demo() -> GpcpProblem {
    let f = PolyMap::from_leading(DenseTensor::unit(4, 2), vec![-1.0, -1.0])
        .expect("unit-tensor map");
    GpcpProblem::new(f, PolyMap::identity(2), Cone::orthant(2), Some("tcp_unit_demo".into()))
        .expect("fixture problem")
}

/// Linear demo: `F(x) = x + (-1, -2)`, `G(x) = x`; unique solution `(1, 2)`.
pub fn lcp_demo() -> GpcpProblem {
    let f = PolyMap::from_leading(DenseTensor::unit(2, 2), vec![-1.0, -2.0])
        .expect("linear map");
    GpcpProblem::new(f, PolyMap::identity(2), Cone::orthant(2), Some("lcp_demo".into()))
        .expect("fixture problem")
}

/// A linear instance with no solution: `F(x) = -x + (-1, -1)` is negative on
/// the whole orthant, so `min{F, G}` never vanishes.
pub fn infeasible_demo() -> GpcpProblem {
    let neg = DenseTensor::unit(2, 2).scaled(-1.0).expect("negated identity");
    let f = PolyMap::from_leading(neg, vec![-1.0, -1.0]).expect("infeasible map");
    GpcpProblem::new(f, PolyMap::identity(2), Cone::orthant(2), Some("infeasible_demo".into()))
        .expect("fixture problem")
}
