//! The defining relations of the cobordism group, each realized as a
//! certified sequence of moves between two closed diagrams.

use super::{Move, MoveCertificate, MoveId, Params, RewriteError, RewriteResult};
use crate::diagram::{disjoint_union, gamma_bar, SlicedDiagram};
use crate::exactalg::Matrix;

/// Endpoints of a relation and the certificate joining them.
#[derive(Clone, Debug)]
pub struct Relation {
    pub name: &'static str,
    pub start: SlicedDiagram,
    pub end: SlicedDiagram,
    pub cert: MoveCertificate,
}

struct Trace {
    cur: SlicedDiagram,
    cert: MoveCertificate,
}

impl Trace {
    fn new(d: SlicedDiagram) -> Trace {
        Trace { cert: MoveCertificate::new(&d), cur: d }
    }

    fn go(&mut self, id: MoveId, slice: usize, pos: usize, params: Params) -> RewriteResult<&mut Trace> {
        self.cur = self.cert.step(&self.cur, Move::new(id, slice, pos, params))?;
        Ok(self)
    }

    fn slide(&mut self, slice: usize, pos: usize, mode: &str) -> RewriteResult<&mut Trace> {
        self.go(MoveId::IsotopySlide, slice, pos, Params::mode(mode))
    }

    fn unfuse(&mut self, slice: usize, lo: Matrix, hi: Matrix) -> RewriteResult<&mut Trace> {
        self.go(MoveId::IsotopySlide, slice, 0, Params::mode("unfuse").with_matrices(vec![lo, hi]))
    }

    fn finish(self, name: &'static str, start: SlicedDiagram, end: SlicedDiagram) -> RewriteResult<Relation> {
        if self.cur != end {
            return Err(RewriteError::PreconditionFailed { mv: name.into(), reason: "trace missed its target".into() });
        }
        Ok(Relation { name, start, end, cert: self.cert })
    }
}

fn mul(a: &Matrix, b: &Matrix) -> RewriteResult<Matrix> {
    a.mul(b).map_err(|e| RewriteError::Json(e.to_string()))
}

fn inv(a: &Matrix) -> RewriteResult<Matrix> {
    a.inverse().map_err(|e| RewriteError::Json(e.to_string()))
}

fn circle(m: &Matrix) -> RewriteResult<SlicedDiagram> {
    Ok(gamma_bar(m)?)
}

/// Pants: the circle with monodromy `βα` splits into circles with `α`
/// and `β`.
pub fn pants(alpha: &Matrix, beta: &Matrix) -> RewriteResult<Relation> {
    let start = circle(&mul(beta, alpha)?)?;
    let end = disjoint_union(&circle(alpha)?, &circle(beta)?)?;
    let mut t = Trace::new(start.clone());
    t.unfuse(1, alpha.clone(), beta.clone())?;
    t.go(MoveId::SplitMonodromy, 2, 0, Params::mode("gate"))?;
    t.go(MoveId::CircleAcrossEdge, 2, 1, Params::mode("right"))?;
    for k in [4, 3, 2] {
        t.slide(k, 2, "swap")?;
    }
    t.finish("pants", start, end)
}

/// Tube: a circle carrying `α` and then `α⁻¹` is null-cobordant.
pub fn tube(alpha: &Matrix) -> RewriteResult<Relation> {
    let n = alpha.rows();
    let start = circle(&Matrix::identity(alpha.ring(), n))?;
    let mut t = Trace::new(start.clone());
    t.unfuse(1, alpha.clone(), inv(alpha)?)?;
    let start = t.cur.clone();
    let mut t = Trace::new(start.clone());
    t.slide(1, 0, "fuse")?;
    t.go(MoveId::CircleDeath, 0, 0, Params::default())?;
    t.finish("tube", start, SlicedDiagram::new(alpha.ring()))
}

/// Commutator: the circle with monodromy `αβα⁻¹β⁻¹` is null-cobordant.
pub fn commutator(alpha: &Matrix, beta: &Matrix) -> RewriteResult<Relation> {
    let (ai, bi) = (inv(alpha)?, inv(beta)?);
    // Along the upward leg the gates read β⁻¹, α⁻¹, β, α.
    let top = mul(alpha, beta)?;
    let bottom = mul(&ai, &bi)?;
    let start = circle(&mul(&top, &bottom)?)?;
    let mut t = Trace::new(start.clone());
    t.unfuse(1, bottom, top)?;
    t.unfuse(1, bi.clone(), ai.clone())?;
    t.unfuse(3, beta.clone(), alpha.clone())?;
    t.go(MoveId::SplitMonodromy, 3, 0, Params::mode("gate"))?;
    for k in [2, 3, 4] {
        t.slide(k, 0, "swap")?;
    }
    t.go(MoveId::SplitMonodromy, 2, 0, Params::mode("absorb_gate"))?;
    t.slide(1, 0, "fuse")?;
    t.slide(2, 0, "fuse")?;
    t.slide(1, 0, "fuse")?;
    t.go(MoveId::CircleDeath, 0, 0, Params::default())?;
    t.finish("commutator", start, SlicedDiagram::new(alpha.ring()))
}

/// Circular tripod for a split exact sequence: circles with `α₁` and `α₃`
/// merge into one circle with `α₁ ⊕ α₃`.
pub fn tripod(a1: &Matrix, a3: &Matrix) -> RewriteResult<Relation> {
    let start = disjoint_union(&circle(a1)?, &circle(a3)?)?;
    let sum = a1.block_direct_sum(a3).map_err(|e| RewriteError::Json(e.to_string()))?;
    let end = circle(&sum)?;
    let mut t = Trace::new(start.clone());
    t.go(MoveId::CircleMerge, 0, 0, Params::default())?;
    t.finish("circular tripod", start, end)
}
