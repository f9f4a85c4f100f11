//! Problem-file ingestion and serialization.
//!
//! Instances live in hand-editable JSON: tensors as sparse lists of
//! `[1-based index list, value]` pairs (unlisted entries are zero, missing
//! orders become zero tensors), cone either `"orthant"` or
//! `{"generated": [...]}`. Indices are 1-based in files to match subscript
//! conventions and converted to 0-based in memory.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cone::Cone;
use crate::error::{GpcpError, Result};
use crate::polymap::{PolyMap, TensorTuple};
use crate::problem::GpcpProblem;
use crate::tensor::DenseTensor;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub n: usize,
    pub m: usize,
    pub l: usize,
    #[serde(rename = "F")]
    pub f: MapSpec,
    #[serde(rename = "G")]
    pub g: MapSpec,
    pub cone: ConeSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapSpec {
    pub tensors: Vec<TensorSpec>,
    pub constant: Vec<f64>,
}

/// Sparse tensor: entries are `[indices, value]` with 1-based indices of
/// length `order`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorSpec {
    pub order: usize,
    pub entries: Vec<(Vec<usize>, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConeSpec {
    Named(String),
    Generated { generated: Vec<Vec<f64>> },
}

pub fn load_problem(path: impl AsRef<Path>) -> Result<GpcpProblem> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| {
        GpcpError::Parse(format!("cannot read {}: {e}", path.display()))
    })?;
    let spec: ProblemFile = serde_json::from_str(&text).map_err(|e| {
        GpcpError::Parse(format!(
            "{}: line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })?;
    let fallback_name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "unnamed".into());
    problem_from_spec(&spec, Some(fallback_name))
}

pub fn save_problem(p: &GpcpProblem, path: impl AsRef<Path>) -> Result<()> {
    let spec = problem_to_spec(p);
    let mut text = serde_json::to_string_pretty(&spec)
        .map_err(|e| GpcpError::Validation(format!("cannot serialize problem: {e}")))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn problem_from_spec(spec: &ProblemFile, fallback_name: Option<String>) -> Result<GpcpProblem> {
    if spec.schema_version != SCHEMA_VERSION {
        return Err(GpcpError::Validation(format!(
            "unsupported schema_version {}, expected {SCHEMA_VERSION}",
            spec.schema_version
        )));
    }
    if spec.n < 1 {
        return Err(GpcpError::Validation("n must be at least 1".into()));
    }
    if spec.m < 2 || spec.l < 2 {
        return Err(GpcpError::Validation(format!(
            "map degrees require m, l >= 2, got m = {}, l = {}",
            spec.m, spec.l
        )));
    }

    let f = build_map("F", &spec.f, spec.m, spec.n)?;
    let g = build_map("G", &spec.g, spec.l, spec.n)?;
    let cone = build_cone(&spec.cone, spec.n)?;
    let name = spec.name.clone().or(fallback_name);
    GpcpProblem::new(f, g, cone, name)
}

fn build_map(label: &str, spec: &MapSpec, degree_plus_one: usize, n: usize) -> Result<PolyMap> {
    if spec.constant.len() != n {
        return Err(GpcpError::Validation(format!(
            "{label}: constant has length {}, expected {n}",
            spec.constant.len()
        )));
    }

    // dense zero tensors for every order m..2; listed tensors fill them in
    let mut dense: Vec<DenseTensor> =
        (2..=degree_plus_one).rev().map(|order| DenseTensor::zeros(order, n)).collect();
    let mut seen = vec![false; dense.len()];
    for (ti, tensor) in spec.tensors.iter().enumerate() {
        if tensor.order < 2 || tensor.order > degree_plus_one {
            return Err(GpcpError::Validation(format!(
                "{label} tensor #{}: order {} outside 2..={degree_plus_one}",
                ti + 1,
                tensor.order
            )));
        }
        let slot = degree_plus_one - tensor.order;
        if seen[slot] {
            return Err(GpcpError::Validation(format!(
                "{label} tensor #{}: duplicate order {}",
                ti + 1,
                tensor.order
            )));
        }
        seen[slot] = true;

        let mut zero_based: Vec<(Vec<usize>, f64)> = Vec::with_capacity(tensor.entries.len());
        for (ei, (indices, value)) in tensor.entries.iter().enumerate() {
            if indices.len() != tensor.order {
                return Err(GpcpError::Validation(format!(
                    "{label} tensor #{} (order {}) entry #{}: index list {indices:?} has \
                     length {}, expected {}",
                    ti + 1,
                    tensor.order,
                    ei + 1,
                    indices.len(),
                    tensor.order
                )));
            }
            for &ix in indices {
                if ix < 1 || ix > n {
                    return Err(GpcpError::Validation(format!(
                        "{label} tensor #{} (order {}) entry #{}: index {ix} outside 1..={n} \
                         in {indices:?}",
                        ti + 1,
                        tensor.order,
                        ei + 1
                    )));
                }
            }
            if !value.is_finite() {
                return Err(GpcpError::Validation(format!(
                    "{label} tensor #{} entry #{}: non-finite value {value}",
                    ti + 1,
                    ei + 1
                )));
            }
            zero_based.push((indices.iter().map(|&ix| ix - 1).collect(), *value));
        }
        let refs: Vec<(&[usize], f64)> =
            zero_based.iter().map(|(ix, v)| (ix.as_slice(), *v)).collect();
        dense[slot] = DenseTensor::from_sparse(tensor.order, n, &refs)?;
    }

    PolyMap::new(TensorTuple::new(dense)?, spec.constant.clone())
}

fn build_cone(spec: &ConeSpec, n: usize) -> Result<Cone> {
    match spec {
        ConeSpec::Named(name) if name == "orthant" => Ok(Cone::orthant(n)),
        ConeSpec::Named(name) => Err(GpcpError::Validation(format!(
            "unknown cone name {name:?}; use \"orthant\" or {{\"generated\": [...]}}"
        ))),
        ConeSpec::Generated { generated } => {
            let cone = Cone::generated(generated.clone())?;
            if cone.dim() != n {
                return Err(GpcpError::Dimension {
                    context: "cone generators",
                    expected: n,
                    found: cone.dim(),
                });
            }
            Ok(cone)
        }
    }
}

pub fn problem_to_spec(p: &GpcpProblem) -> ProblemFile {
    ProblemFile {
        schema_version: SCHEMA_VERSION,
        name: p.name().map(str::to_owned),
        n: p.dim(),
        m: p.f().degree_plus_one(),
        l: p.g().degree_plus_one(),
        f: map_to_spec(p.f()),
        g: map_to_spec(p.g()),
        cone: match p.cone() {
            Cone::NonnegativeOrthant { .. } => ConeSpec::Named("orthant".into()),
            Cone::FinitelyGenerated { generators } => {
                ConeSpec::Generated { generated: generators.clone() }
            }
            // no file representation distinguishes the dual form; emit the
            // generators (loading yields the generated cone)
            Cone::DualOfFinitelyGenerated { generators } => {
                ConeSpec::Generated { generated: generators.clone() }
            }
        },
    }
}

fn map_to_spec(p: &PolyMap) -> MapSpec {
    let mut tensors = Vec::new();
    for t in p.tuple().tensors() {
        let entries = sparse_entries(t);
        if !entries.is_empty() {
            tensors.push(TensorSpec { order: t.order(), entries });
        }
    }
    MapSpec { tensors, constant: p.constant().to_vec() }
}

/// Nonzero entries in row-major order with 1-based indices: the canonical
/// sparse form, so save/load round-trips bitwise.
fn sparse_entries(t: &DenseTensor) -> Vec<(Vec<usize>, f64)> {
    let n = t.dim();
    let order = t.order();
    let mut out = Vec::new();
    for (flat, &v) in t.entries().iter().enumerate() {
        if v != 0.0 {
            let mut idx = vec![0usize; order];
            let mut rem = flat;
            for slot in (0..order).rev() {
                idx[slot] = rem % n + 1;
                rem /= n;
            }
            out.push((idx, v));
        }
    }
    out
}
