//! Hand-built object–relation graphs: node, edge and combined similarity
//! under different mappings, and schema averaging of misordered exemplars.
//!
//! ```bash
//! cargo run --example graph_similarity
//! ```

use psi::optim::PermutationMatrix;
use psi::psi::compute_schema;
use psi::relgraph::{edge_similarity, graph_similarity, node_similarity};
use psi::{EdgeWeights, ObjectGraph, Relation, RelationVector};

fn main() -> psi::Result<()> {
    // A big square containing a small triangle: node features are
    // [size, corners], the triangle-inside-square edge carries `inside`.
    let square = vec![1.0, 4.0];
    let triangle = vec![0.2, 3.0];
    let inside = RelationVector::zeros().with(Relation::Inside, 1.0).with(Relation::NormalizedDistance, 0.1);
    let apart = RelationVector::zeros().with(Relation::NormalizedDistance, 0.1);
    // Dense edges in (0,1), (1,0) order.
    let a = ObjectGraph::from_dense(vec![square.clone(), triangle.clone()], vec![apart, inside])?;
    // The same scene with the objects listed in the other order.
    let b = ObjectGraph::from_dense(vec![triangle, square], vec![inside, apart])?;

    let w = EdgeWeights::uniform();
    for (name, map) in [("identity", PermutationMatrix::identity(2)), ("swap", PermutationMatrix::from_order(&[1, 0])?)] {
        let gn = node_similarity(&a, &b, &map)?;
        let ge = edge_similarity(&a, &b, &map, &w)?;
        println!("{name:<8}: G_nodes {gn:.3}  G_edges {ge:.3}  G(alpha=0.5) {:.3}", graph_similarity(0.5, gn, ge));
    }

    // Averaging without alignment blurs `inside` over both edges; the
    // aligned schema keeps it on one.
    let naive = compute_schema(&[a.clone(), b.clone()], &[PermutationMatrix::identity(2), PermutationMatrix::identity(2)], &w)?;
    let aligned = compute_schema(&[a, b], &[PermutationMatrix::identity(2), PermutationMatrix::from_order(&[1, 0])?], &w)?;
    for (name, s) in [("unaligned", naive), ("aligned", aligned)] {
        let shown: Vec<String> =
            s.edges().map(|((x, y), e)| format!("{x}->{y} inside {:.3}", e.get(Relation::Inside))).collect();
        println!("{name:<9} schema: {}", shown.join(", "));
    }
    Ok(())
}
