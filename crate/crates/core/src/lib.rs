//! Probabilistic schema induction over object–relation graphs.
//!
//! A few-shot episode gives a handful of positive and negative example scenes.
//! Each scene becomes a directed graph (objects as nodes, seven pairwise
//! relations on every directed edge). For each class a prototype graph, the
//! *schema*, is formed by averaging exemplars after aligning their nodes with
//! one-to-one mappings. The mappings, the node/edge mixing weight `alpha` and a
//! softmax attention over relations are all optimized jointly with AdamW, with
//! straight-through gradients through a Hungarian projection. Targets are
//! classified by the schema they are most similar to.
//!
//! Layout:
//!
//! - [`relgraph`]: graph data model and similarity functions
//! - [`geometry`]: polygon primitives used by the scene generator
//! - [`scenegen`]: synthetic first-order relational problems and ground-truth relations
//! - [`features`]: node/scene descriptors and scene → graph conversion
//! - [`optim`]: assignment, reverse-mode gradients of the loss, AdamW, gradient checks
//! - [`psi`]: schema computation, induction, classification and control models
//! - [`harness`]: experiment sweeps, CSV records, aggregation, plots and self-checks

pub mod error;
pub mod features;
pub mod geometry;
pub mod harness;
pub mod optim;
pub mod psi;
pub mod relgraph;
pub mod scenegen;

pub use error::{PsiError, Result};
pub use relgraph::{EdgeWeights, Episode, Label, ObjectGraph, Relation, RelationVector};
