//! Rooted, locally finite trees declared by degree rules and materialized to
//! a finite depth.

mod descent;
mod level;
mod spec;

pub use descent::{DescendantMap, Piece};
pub use level::{
    deserialize_big, materialize, materialize_with, serialize_big, serialize_big_vec, LevelTree, MaterializeOptions,
    RunEntry, VertexId, DEFAULT_VERTEX_CAP,
};
pub use spec::{seq_term, Budget, DegreeRule, Run, SequenceTail, SpecKind, TreeSpec};
