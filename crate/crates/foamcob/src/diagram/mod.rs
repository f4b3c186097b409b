//! Planar foams as sliced diagrams: the text DSL, JSON, validation, `τ′`,
//! the planar invariant, the forgetful map and `γ̄`.

mod dsl;
mod invariant;
mod json;
mod ops;
mod types;

use std::fmt;

use thiserror::Error;

use crate::exactalg::ExactError;
use crate::foamcore::FoamError;

pub use dsl::{parse_diagram, serialize_diagram};
pub use invariant::{
    fb_assembly, fine_graph, forget, forget_with_tiles, gamma_bar, planar_invariant, tau_prime, FineDiagram,
};
pub use json::{diagram_from_json, diagram_to_json};
pub use ops::{braid_closure_diagram, disjoint_union, expand_crosses, reflect_reverse};
pub use types::{Dir, Placed, Slice, SlicedDiagram, Strand, Tile};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("semantic error in slice {slice}: {msg}")]
    Semantic { slice: usize, msg: String },
    #[error("invalid diagram: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
    #[error("diagram is not closed")]
    NotClosed,
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Foam(#[from] FoamError),
    #[error("json: {0}")]
    Json(String),
}

pub type DiagramResult<T> = Result<T, DiagramError>;

/// One validation finding; `slice` is `None` for whole-diagram problems.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub slice: Option<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.slice {
            Some(k) => write!(f, "slice {k}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

/// Empty iff every slice fits its input state and every matrix is an
/// invertible square of the right size over the diagram's ring.
pub fn validate_diagram(d: &SlicedDiagram) -> Vec<Diagnostic> {
    let mut out = vec![];
    if let Err(e) = d.ring.validate() {
        out.push(Diagnostic { slice: None, message: e.to_string() });
        return out;
    }
    for (k, s) in d.slices.iter().enumerate() {
        for pl in &s.tiles {
            let (m, n) = match &pl.tile {
                Tile::Gate { rank, m, .. } => (m, *rank),
                Tile::Join { r1, r2, iso, .. } | Tile::Fork { r1, r2, iso, .. } => (iso, r1 + r2),
                _ => continue,
            };
            let what = format!("{} at {}", pl.tile.name(), pl.pos + 1);
            if m.ring() != d.ring {
                out.push(Diagnostic { slice: Some(k), message: format!("{what}: matrix over ring {}", m.ring()) });
            } else if m.rows() != n || m.cols() != n {
                out.push(Diagnostic {
                    slice: Some(k),
                    message: format!("{what}: matrix is {}x{}, expected {n}x{n}", m.rows(), m.cols()),
                });
            } else if !m.is_invertible() {
                out.push(Diagnostic { slice: Some(k), message: format!("{what}: matrix is not invertible") });
            }
        }
    }
    if let Err((k, msg)) = d.states() {
        out.push(Diagnostic { slice: Some(k), message: msg });
    }
    out
}

pub(crate) fn ensure_valid(d: &SlicedDiagram) -> DiagramResult<()> {
    let v = validate_diagram(d);
    if v.is_empty() {
        Ok(())
    } else {
        Err(DiagramError::Invalid(v))
    }
}
