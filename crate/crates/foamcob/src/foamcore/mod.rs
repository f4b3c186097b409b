//! Abstract decorated 0-foams and 1-foams, strong cuts, `f_B` assembly and
//! braid-like foam words.

mod braid;
mod cut;
mod foam;
mod graph;
pub mod random;
mod zero;

use thiserror::Error;

use crate::exactalg::ExactError;

pub use braid::{braid_close, closure_k1, markov_stabilize, BraidFoamWord, Generator};
pub use cut::{
    abstract_invariant, assemble_fb, canonical_strong_cut, BlockAssembler, CutLocation, FBAssembly,
    StrongCut,
};
pub use foam::{
    boundary_delta, validate_abstract, AbstractFoam, Circle, Edge, FoamDiagnostic, OpenEnd, Port,
    Side, Slot, Vertex, VertexKind,
};
pub use graph::FineGraph;
pub use zero::{gamma0, ZeroFoam, ZeroPoint};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FoamError {
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("invalid foam: {}", join_diags(.0))]
    Invalid(Vec<FoamDiagnostic>),
    #[error("foam has open ends")]
    NotClosed,
    #[error("cut is not strong: {0}")]
    NotStrong(String),
    #[error("rank mismatch: {0}")]
    RankMismatch(String),
    #[error("json: {0}")]
    Json(String),
    #[error("word has no strands")]
    Empty,
    #[error("malformed: {0}")]
    Malformed(String),
}

fn join_diags(d: &[FoamDiagnostic]) -> String {
    d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type FoamResult<T> = Result<T, FoamError>;
