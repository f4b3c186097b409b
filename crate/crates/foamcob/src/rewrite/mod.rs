//! Registered cobordism moves on sliced diagrams, normalization to a single
//! clockwise circle, and hash-chained move certificates.

mod cert;
mod moves;
mod normalize;
pub mod random;
pub mod relations;

use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value as Json};
use thiserror::Error;

use crate::diagram::{planar_invariant, DiagramError, SlicedDiagram};
use crate::exactalg::{Matrix, RingSpec};

pub use cert::{canonical_digest, check_certificate, CertStep, CheckReport, MoveCertificate};
pub use moves::{enumerate_kind, enumerate_moves, enumerate_moves_bounded, DEFAULT_RANK_BOUND};
pub use normalize::{normalize, NormalizeOutput};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveId {
    IsotopySlide,
    IsotopyZigzag,
    SingCap,
    SingCup,
    SingSaddle,
    VertexSlide,
    VertexAssoc,
    CircleBirth,
    CircleDeath,
    Saddle,
    R1,
    R2A,
    R2B,
    R3A,
    R3B,
    R4A,
    R4B,
    SplitMonodromy,
    CircleAcrossEdge,
    CircleMerge,
    CircleReverse,
    MarkovStab,
}

impl MoveId {
    pub const ALL: [MoveId; 22] = [
        MoveId::IsotopySlide,
        MoveId::IsotopyZigzag,
        MoveId::SingCap,
        MoveId::SingCup,
        MoveId::SingSaddle,
        MoveId::VertexSlide,
        MoveId::VertexAssoc,
        MoveId::CircleBirth,
        MoveId::CircleDeath,
        MoveId::Saddle,
        MoveId::R1,
        MoveId::R2A,
        MoveId::R2B,
        MoveId::R3A,
        MoveId::R3B,
        MoveId::R4A,
        MoveId::R4B,
        MoveId::SplitMonodromy,
        MoveId::CircleAcrossEdge,
        MoveId::CircleMerge,
        MoveId::CircleReverse,
        MoveId::MarkovStab,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MoveId::IsotopySlide => "ISOTOPY_SLIDE",
            MoveId::IsotopyZigzag => "ISOTOPY_ZIGZAG",
            MoveId::SingCap => "SING_CAP",
            MoveId::SingCup => "SING_CUP",
            MoveId::SingSaddle => "SING_SADDLE",
            MoveId::VertexSlide => "VERTEX_SLIDE",
            MoveId::VertexAssoc => "VERTEX_ASSOC",
            MoveId::CircleBirth => "CIRCLE_BIRTH",
            MoveId::CircleDeath => "CIRCLE_DEATH",
            MoveId::Saddle => "SADDLE",
            MoveId::R1 => "R1",
            MoveId::R2A => "R2A",
            MoveId::R2B => "R2B",
            MoveId::R3A => "R3A",
            MoveId::R3B => "R3B",
            MoveId::R4A => "R4A",
            MoveId::R4B => "R4B",
            MoveId::SplitMonodromy => "SPLIT_MONODROMY",
            MoveId::CircleAcrossEdge => "CIRCLE_ACROSS_EDGE",
            MoveId::CircleMerge => "CIRCLE_MERGE",
            MoveId::CircleReverse => "CIRCLE_REVERSE",
            MoveId::MarkovStab => "MARKOV_STAB",
        }
    }
}

impl fmt::Display for MoveId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MoveId {
    type Err = RewriteError;

    fn from_str(s: &str) -> Result<MoveId, RewriteError> {
        MoveId::ALL.iter().copied().find(|m| m.name() == s).ok_or_else(|| RewriteError::Json(format!("unknown move `{s}`")))
    }
}

/// Move parameters. `mode` picks the variant (for example `insert` or
/// `remove`); ranks and matrices are only used by variants that create
/// structure.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Params {
    pub mode: String,
    pub ranks: Vec<usize>,
    pub matrices: Vec<Matrix>,
}

impl Params {
    pub fn mode(mode: &str) -> Params {
        Params { mode: mode.into(), ..Params::default() }
    }

    pub fn with_ranks(mut self, ranks: &[usize]) -> Params {
        self.ranks = ranks.to_vec();
        self
    }

    pub fn with_matrices(mut self, ms: Vec<Matrix>) -> Params {
        self.matrices = ms;
        self
    }
}

/// A move at `(slice, pos)`. For patterns, `slice` is the lowest slice of
/// the pattern and `pos` its leftmost strand; for insertions, `slice` is the
/// boundary the new slices go in at and `pos` the strand index there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Move {
    pub id: MoveId,
    pub slice: usize,
    pub pos: usize,
    pub params: Params,
}

impl Move {
    pub fn new(id: MoveId, slice: usize, pos: usize, params: Params) -> Move {
        Move { id, slice, pos, params }
    }

    pub fn to_json(&self) -> Json {
        json!({
            "move": self.id.name(),
            "location": {"slice": self.slice, "pos": self.pos},
            "params": {
                "mode": self.params.mode,
                "ranks": self.params.ranks,
                "matrices": self.params.matrices.iter().map(Matrix::to_json).collect::<Vec<_>>(),
            },
        })
    }

    pub fn from_json(ring: RingSpec, v: &Json) -> RewriteResult<Move> {
        let bad = |m: &str| RewriteError::Json(format!("move: {m}"));
        let id: MoveId = v.get("move").and_then(Json::as_str).ok_or_else(|| bad("missing `move`"))?.parse()?;
        let loc = v.get("location").ok_or_else(|| bad("missing `location`"))?;
        let num = |o: &Json, k: &str| o.get(k).and_then(Json::as_u64).map(|x| x as usize).ok_or_else(|| bad(k));
        let p = v.get("params").ok_or_else(|| bad("missing `params`"))?;
        let mode = p.get("mode").and_then(Json::as_str).ok_or_else(|| bad("mode"))?.to_string();
        let ranks = p
            .get("ranks")
            .and_then(Json::as_array)
            .ok_or_else(|| bad("ranks"))?
            .iter()
            .map(|r| r.as_u64().map(|x| x as usize).ok_or_else(|| bad("rank")))
            .collect::<RewriteResult<Vec<_>>>()?;
        let matrices = p
            .get("matrices")
            .and_then(Json::as_array)
            .ok_or_else(|| bad("matrices"))?
            .iter()
            .map(|m| Matrix::from_json(ring, m).map_err(|e| RewriteError::Json(e.to_string())))
            .collect::<RewriteResult<Vec<_>>>()?;
        Ok(Move { id, slice: num(loc, "slice")?, pos: num(loc, "pos")?, params: Params { mode, ranks, matrices } })
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id)?;
        if !self.params.mode.is_empty() {
            write!(f, "[{}]", self.params.mode)?;
        }
        write!(f, " at slice {}, pos {}", self.slice, self.pos)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RewriteError {
    #[error("{mv}: precondition failed: {reason}")]
    PreconditionFailed { mv: String, reason: String },
    #[error("{mv}: invariant changed from {before} to {after}")]
    InvariantViolated { mv: String, before: String, after: String },
    #[error("normalization stopped after {0} steps without reaching a circle")]
    NonTermination(usize),
    #[error("json: {0}")]
    Json(String),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

pub type RewriteResult<T> = Result<T, RewriteError>;

/// Applies `m`. With `verify`, closed diagrams must keep their planar
/// invariant exactly.
pub fn apply_move(d: &SlicedDiagram, m: &Move, verify: bool) -> RewriteResult<SlicedDiagram> {
    let out = moves::apply(d, m)
        .map_err(|reason| RewriteError::PreconditionFailed { mv: m.to_string(), reason })?;
    if verify && d.is_closed() && out.is_closed() {
        let before = planar_invariant(d)?;
        let after = planar_invariant(&out)?;
        if before != after {
            return Err(RewriteError::InvariantViolated {
                mv: m.to_string(),
                before: before.to_string(),
                after: after.to_string(),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
