//! Ring-decorated 1-foams: exact K₀/K₁ invariants, planar diagrams and
//! certified cobordism rewriting.

pub mod exactalg;
pub mod foamcore;
pub mod diagram;
pub mod rewrite;
pub mod selftest;

/// The guide, compiled so that its snippets run as doctests.
pub mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/rings.md")]
    pub mod rings {}
    #[doc = include_str!("../../../book/src/foams.md")]
    pub mod foams {}
    #[doc = include_str!("../../../book/src/diagrams.md")]
    pub mod diagrams {}
    #[doc = include_str!("../../../book/src/rewriting.md")]
    pub mod rewriting {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
