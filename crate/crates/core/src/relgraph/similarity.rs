use crate::error::{PsiError, Result};
use crate::optim::PermutationMatrix;

use super::{EdgeWeights, ObjectGraph};

/// Norm below which a vector is treated as zero.
pub const ZERO_NORM: f64 = 1e-12;

/// Cosine of the angle between `a` and `b`; zero if either vector has
/// (near) zero norm.
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(PsiError::DimensionMismatch(format!(
            "cosine of {}- and {}-dimensional vectors",
            a.len(),
            b.len()
        )));
    }
    Ok(cosine_unchecked(a, b))
}

pub(crate) fn cosine_unchecked(a: &[f64], b: &[f64]) -> f64 {
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    let (na, nb) = (na.sqrt(), nb.sqrt());
    if na < ZERO_NORM || nb < ZERO_NORM {
        return 0.0;
    }
    (dot / (na * nb)).clamp(-1.0, 1.0)
}

fn check_mapping(schema: &ObjectGraph, exemplar: &ObjectGraph, mapping: &PermutationMatrix) -> Result<()> {
    if mapping.rows() != schema.node_count() || mapping.cols() != exemplar.node_count() {
        return Err(PsiError::DimensionMismatch(format!(
            "{}×{} mapping between {}- and {}-node graphs",
            mapping.rows(),
            mapping.cols(),
            schema.node_count(),
            exemplar.node_count()
        )));
    }
    if schema.dim() != exemplar.dim() {
        return Err(PsiError::DimensionMismatch(format!(
            "node dimensions {} and {}",
            schema.dim(),
            exemplar.dim()
        )));
    }
    Ok(())
}

/// Mean cosine similarity over mapped node pairs (rows are schema nodes).
pub fn node_similarity(schema: &ObjectGraph, exemplar: &ObjectGraph, mapping: &PermutationMatrix) -> Result<f64> {
    check_mapping(schema, exemplar, mapping)?;
    let mut total = 0.0;
    let mut count = 0usize;
    for (k, j) in mapping.pairs() {
        total += cosine_unchecked(schema.node(k), exemplar.node(j));
        count += 1;
    }
    if count == 0 {
        return Err(PsiError::EmptyAlignment("node"));
    }
    Ok(total / count as f64)
}

/// Mean cosine similarity over aligned directed edges. Schema edge `(a, b)`
/// aligns with exemplar edge `(c, d)` exactly when `a → c` and `b → d` are
/// both mapped. Exemplar edges are reweighted by `w`; schema edges are
/// compared as stored.
pub fn edge_similarity(
    schema: &ObjectGraph,
    exemplar: &ObjectGraph,
    mapping: &PermutationMatrix,
    w: &EdgeWeights,
) -> Result<f64> {
    check_mapping(schema, exemplar, mapping)?;
    if !schema.has_edges() || !exemplar.has_edges() {
        return Err(PsiError::EmptyAlignment("edge"));
    }
    let mut total = 0.0;
    let mut count = 0usize;
    for ((a, b), schema_edge) in schema.edges() {
        let (Some(c), Some(d)) = (mapping.col_of(a), mapping.col_of(b)) else {
            continue;
        };
        let Some(exemplar_edge) = exemplar.edge(c, d) else {
            continue;
        };
        total += cosine_unchecked(schema_edge.values(), &w.apply(exemplar_edge));
        count += 1;
    }
    if count == 0 {
        return Err(PsiError::EmptyAlignment("edge"));
    }
    Ok(total / count as f64)
}

/// `alpha · nodes + (1 − alpha) · edges`.
pub fn graph_similarity(alpha: f64, g_nodes: f64, g_edges: f64) -> f64 {
    alpha * g_nodes + (1.0 - alpha) * g_edges
}
