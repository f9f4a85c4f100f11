//! Polynomial maps defined by a tensor tuple and a constant vector.
//!
//! A map of degree `m-1` is `F(x) = sum_k A(k) x^{m-k} + a` where `A(k)` has
//! order `m-k+1`, so the tuple runs from the leading order-`m` tensor down to
//! a matrix. Missing intermediate degrees are stored as explicit zero tensors
//! so degree arithmetic stays uniform.

use crate::error::{GpcpError, Result};
use crate::linalg::Mat;
use crate::tensor::DenseTensor;

/// An ordered tuple of tensors with strictly descending orders `m, m-1, .., 2`
/// sharing one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorTuple {
    tensors: Vec<DenseTensor>,
}

impl TensorTuple {
    /// Validates descending orders (no gaps, ending at a matrix) and a
    /// common dimension.
    pub fn new(tensors: Vec<DenseTensor>) -> Result<Self> {
        if tensors.is_empty() {
            return Err(GpcpError::Validation(
                "tensor tuple must contain at least a matrix term".into(),
            ));
        }
        let m = tensors[0].order();
        if m < 2 {
            return Err(GpcpError::Validation(format!(
                "leading tensor order must be at least 2, got {m}"
            )));
        }
        if tensors.len() != m - 1 {
            return Err(GpcpError::Validation(format!(
                "tuple with leading order {m} must hold {} tensors, got {}",
                m - 1,
                tensors.len()
            )));
        }
        let dim = tensors[0].dim();
        for (k, t) in tensors.iter().enumerate() {
            let want_order = m - k;
            if t.order() != want_order {
                return Err(GpcpError::Validation(format!(
                    "tuple slot {k} must have order {want_order}, got {}",
                    t.order()
                )));
            }
            if t.dim() != dim {
                return Err(GpcpError::Dimension {
                    context: "tensor tuple dimension",
                    expected: dim,
                    found: t.dim(),
                });
            }
        }
        Ok(Self { tensors })
    }

    /// A tuple holding only the given leading tensor; lower-order slots are
    /// zero tensors.
    pub fn from_leading(leading: DenseTensor) -> Result<Self> {
        let m = leading.order();
        let dim = leading.dim();
        if m < 2 {
            return Err(GpcpError::Validation(format!(
                "leading tensor order must be at least 2, got {m}"
            )));
        }
        let mut tensors = vec![leading];
        for order in (2..m).rev() {
            tensors.push(DenseTensor::zeros(order, dim));
        }
        Self::new(tensors)
    }

    /// `m`: one plus the polynomial degree of the map this tuple defines.
    pub fn degree_plus_one(&self) -> usize {
        self.tensors[0].order()
    }

    pub fn dim(&self) -> usize {
        self.tensors[0].dim()
    }

    pub fn tensors(&self) -> &[DenseTensor] {
        &self.tensors
    }
}

/// A polynomial map `F(x) = sum_k A(k) x^{m-k} + a`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMap {
    tuple: TensorTuple,
    constant: Vec<f64>,
}

impl PolyMap {
    pub fn new(tuple: TensorTuple, constant: Vec<f64>) -> Result<Self> {
        if constant.len() != tuple.dim() {
            return Err(GpcpError::Dimension {
                context: "polynomial map constant term",
                expected: tuple.dim(),
                found: constant.len(),
            });
        }
        if let Some((index, &value)) =
            constant.iter().enumerate().find(|(_, v)| !v.is_finite())
        {
            return Err(GpcpError::NonFinite { index, value });
        }
        Ok(Self { tuple, constant })
    }

    /// The map defined by a single leading tensor and a constant.
    pub fn from_leading(leading: DenseTensor, constant: Vec<f64>) -> Result<Self> {
        Self::new(TensorTuple::from_leading(leading)?, constant)
    }

    /// The identity map `x -> x` in dimension `n`.
    pub fn identity(n: usize) -> Self {
        Self::new(
            TensorTuple::new(vec![DenseTensor::unit(2, n)]).expect("identity tuple"),
            vec![0.0; n],
        )
        .expect("identity map")
    }

    pub fn dim(&self) -> usize {
        self.tuple.dim()
    }

    /// `m`: one plus the degree.
    pub fn degree_plus_one(&self) -> usize {
        self.tuple.degree_plus_one()
    }

    pub fn tuple(&self) -> &TensorTuple {
        &self.tuple
    }

    pub fn constant(&self) -> &[f64] {
        &self.constant
    }

    /// The leading tensor `A(1)`, which governs behavior at infinity.
    pub fn leading_tensor(&self) -> &DenseTensor {
        &self.tuple.tensors[0]
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let mut out = self.constant.clone();
        for t in &self.tuple.tensors {
            let v = t.contract_to_vector(x)?;
            for (o, vi) in out.iter_mut().zip(v) {
                *o += vi;
            }
        }
        Ok(out)
    }

    /// Analytic Jacobian: entry `(j, i)` is the partial derivative of
    /// component `j` with respect to `x[i]`, assembled by summing, per
    /// tensor and per variable slot, the contraction with `x` in all other
    /// slots.
    pub fn jacobian(&self, x: &[f64]) -> Result<Mat> {
        self.check_dim(x)?;
        let n = self.dim();
        let mut jac = Mat::zeros(n);
        let mut idx: Vec<usize> = Vec::new();
        for t in &self.tuple.tensors {
            let p = t.order();
            idx.clear();
            idx.resize(p, 0);
            for (flat, &v) in t.entries().iter().enumerate() {
                // decode the row-major multi-index
                if v != 0.0 {
                    let mut rem = flat;
                    for slot in (0..p).rev() {
                        idx[slot] = rem % n;
                        rem /= n;
                    }
                    for s in 1..p {
                        let mut coeff = v;
                        for t2 in 1..p {
                            if t2 != s {
                                coeff *= x[idx[t2]];
                            }
                        }
                        jac.add_to(idx[0], idx[s], coeff);
                    }
                }
            }
        }
        Ok(jac)
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(GpcpError::Dimension {
                context: "polynomial map argument",
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tensor_a() -> DenseTensor {
        DenseTensor::from_sparse(
            4,
            2,
            &[(&[0, 0, 0, 0], 1.0), (&[1, 0, 0, 0], -1.0), (&[1, 1, 1, 1], 1.0)],
        )
        .unwrap()
    }

    fn tensor_b() -> DenseTensor {
        DenseTensor::from_sparse(
            4,
            2,
            &[(&[0, 0, 0, 0], 1.0), (&[1, 0, 1, 1], -1.0), (&[1, 1, 1, 1], 1.0)],
        )
        .unwrap()
    }

    /// F from the bundled cubic demo: A x^3 + (-1, 0).
    fn map_f() -> PolyMap {
        PolyMap::from_leading(tensor_a(), vec![-1.0, 0.0]).unwrap()
    }

    fn map_g() -> PolyMap {
        PolyMap::from_leading(tensor_b(), vec![1.0, 0.0]).unwrap()
    }

    /// Central finite differences, step 1e-6.
    fn fd_jacobian(p: &PolyMap, x: &[f64]) -> Mat {
        let n = p.dim();
        let h = 1e-6;
        let mut jac = Mat::zeros(n);
        for i in 0..n {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += h;
            xm[i] -= h;
            let fp = p.evaluate(&xp).unwrap();
            let fm = p.evaluate(&xm).unwrap();
            for j in 0..n {
                jac.set(j, i, (fp[j] - fm[j]) / (2.0 * h));
            }
        }
        jac
    }

    fn random_polymap(rng: &mut ChaCha8Rng, n: usize, m: usize) -> PolyMap {
        let mut tensors = Vec::new();
        for order in (2..=m).rev() {
            let entries: Vec<f64> =
                (0..n.pow(order as u32)).map(|_| rng.gen_range(-1.0..1.0)).collect();
            tensors.push(DenseTensor::new(order, n, entries).unwrap());
        }
        let constant: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        PolyMap::new(TensorTuple::new(tensors).unwrap(), constant).unwrap()
    }

    #[test]
    fn fixture_values_are_exact() {
        let f = map_f();
        let g = map_g();
        assert_eq!(f.evaluate(&[1.0, 1.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(g.evaluate(&[1.0, 1.0]).unwrap(), vec![2.0, 0.0]);
        assert_eq!(f.evaluate(&[0.0, 0.0]).unwrap(), vec![-1.0, 0.0]);
        assert_eq!(g.evaluate(&[0.0, 0.0]).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn evaluate_at_zero_returns_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n: usize = rng.gen_range(1..=4);
            let m: usize = rng.gen_range(2..=4);
            let p = random_polymap(&mut rng, n, m);
            assert_eq!(p.evaluate(&vec![0.0; n]).unwrap(), p.constant());
        }
    }

    #[test]
    fn hand_computed_jacobian() {
        // F = (x1^3 - 1, x2^3 - x1^3) so dF at (1,1) is [[3,0],[-3,3]].
        let jac = map_f().jacobian(&[1.0, 1.0]).unwrap();
        assert_eq!(jac.row(0), &[3.0, 0.0]);
        assert_eq!(jac.row(1), &[-3.0, 3.0]);
    }

    #[test]
    fn linear_map_jacobian_is_its_matrix() {
        let m = DenseTensor::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let p = PolyMap::from_leading(m.clone(), vec![5.0, 6.0]).unwrap();
        for x in [[0.0, 0.0], [1.5, -2.0], [10.0, 3.0]] {
            let jac = p.jacobian(&x).unwrap();
            assert_eq!(jac.row(0), &[1.0, 2.0]);
            assert_eq!(jac.row(1), &[3.0, 4.0]);
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let n: usize = rng.gen_range(1..=4);
            let m: usize = rng.gen_range(2..=4);
            let p = random_polymap(&mut rng, n, m);
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
            let analytic = p.jacobian(&x).unwrap();
            let numeric = fd_jacobian(&p, &x);
            for i in 0..n {
                for j in 0..n {
                    assert!(
                        (analytic.get(i, j) - numeric.get(i, j)).abs() <= 1e-5,
                        "n={n} m={m} entry ({i},{j}): {} vs {}",
                        analytic.get(i, j),
                        numeric.get(i, j)
                    );
                }
            }
        }
    }

    #[test]
    fn leading_tensor_round_trips() {
        assert_eq!(map_f().leading_tensor(), &tensor_a());
        let m = DenseTensor::new(2, 2, vec![1.0, 0.0, 0.0, 2.0]).unwrap();
        let p = PolyMap::from_leading(m.clone(), vec![0.0, 0.0]).unwrap();
        assert_eq!(p.leading_tensor(), &m);
    }

    #[test]
    fn leading_term_dominates_at_scale() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let n: usize = rng.gen_range(1..=3);
            let m: usize = rng.gen_range(2..=4);
            let p = random_polymap(&mut rng, n, m);
            let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < 1e-6 {
                continue;
            }
            x.iter_mut().for_each(|v| *v /= norm);

            let lead = p.leading_tensor().contract_to_vector(&x).unwrap();
            let mut errs = Vec::new();
            for lambda in [1e2, 1e3, 1e4] {
                let xs: Vec<f64> = x.iter().map(|v| lambda * v).collect();
                let v = p.evaluate(&xs).unwrap();
                let scale = lambda.powi(m as i32 - 1);
                let err: f64 = v
                    .iter()
                    .zip(&lead)
                    .map(|(a, b)| (a / scale - b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                errs.push(err);
            }
            assert!(errs[1] <= errs[0] + 1e-12, "{errs:?}");
            assert!(errs[2] <= errs[1] + 1e-12, "{errs:?}");
            let lead_norm: f64 = lead.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(errs[2] <= 1e-3 * lead_norm.max(1.0), "{errs:?}");
        }
    }

    #[test]
    fn tuple_validation_rejects_bad_shapes() {
        // gap in orders
        let bad = TensorTuple::new(vec![DenseTensor::zeros(4, 2), DenseTensor::zeros(2, 2)]);
        assert!(bad.is_err());
        // mismatched dims
        let bad = TensorTuple::new(vec![
            DenseTensor::zeros(3, 2),
            DenseTensor::zeros(2, 3),
        ]);
        assert!(bad.is_err());
        // constant length
        let tuple = TensorTuple::from_leading(DenseTensor::zeros(3, 2)).unwrap();
        assert!(PolyMap::new(tuple, vec![0.0; 3]).is_err());
    }
}
