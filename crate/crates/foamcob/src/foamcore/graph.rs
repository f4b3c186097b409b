use super::cut::BlockAssembler;
use super::foam::{AbstractFoam, Port, Side, Slot, VertexKind};
use super::{FoamError, FoamResult};
use crate::exactalg::{Matrix, RingSpec, SparseMatrix};

#[derive(Clone, Debug)]
enum Link {
    Interval { to: usize, t: Matrix },
    Enter { vertex: usize, slot: Slot },
}

#[derive(Clone, Debug)]
struct FineVertex {
    kind: VertexKind,
    iso: Matrix,
    thin0: usize,
    thin1: usize,
    thick: usize,
}

/// A foam refined by many marked points, each with one incoming and one
/// outgoing piece. Pieces are transport intervals and trivalent vertices.
/// Contracting the chains yields an [`AbstractFoam`]; taking every point as
/// a cut point yields `f_B` directly.
#[derive(Clone, Debug)]
pub struct FineGraph {
    ring: RingSpec,
    ranks: Vec<usize>,
    next: Vec<Option<Link>>,
    has_in: Vec<bool>,
    vertices: Vec<FineVertex>,
    open: Vec<(usize, Side, bool)>,
}

impl FineGraph {
    pub fn new(ring: RingSpec) -> FineGraph {
        FineGraph { ring, ranks: vec![], next: vec![], has_in: vec![], vertices: vec![], open: vec![] }
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn add_point(&mut self, rank: usize) -> usize {
        self.ranks.push(rank);
        self.next.push(None);
        self.has_in.push(false);
        self.ranks.len() - 1
    }

    pub fn point_count(&self) -> usize {
        self.ranks.len()
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    fn set_next(&mut self, p: usize, l: Link) -> FoamResult<()> {
        if self.next[p].is_some() {
            return Err(FoamError::Malformed(format!("point {p} has two outgoing pieces")));
        }
        self.next[p] = Some(l);
        Ok(())
    }

    fn set_in(&mut self, p: usize) -> FoamResult<()> {
        if self.has_in[p] {
            return Err(FoamError::Malformed(format!("point {p} has two incoming pieces")));
        }
        self.has_in[p] = true;
        Ok(())
    }

    /// Transport `t` from `from` to `to`.
    pub fn add_interval(&mut self, from: usize, to: usize, t: Matrix) -> FoamResult<()> {
        self.set_next(from, Link::Interval { to, t })?;
        self.set_in(to)
    }

    pub fn add_vertex(&mut self, kind: VertexKind, iso: Matrix, thin0: usize, thin1: usize, thick: usize) -> FoamResult<usize> {
        let v = self.vertices.len();
        match kind {
            VertexKind::In => {
                self.set_next(thin0, Link::Enter { vertex: v, slot: Slot::Thin0 })?;
                self.set_next(thin1, Link::Enter { vertex: v, slot: Slot::Thin1 })?;
                self.set_in(thick)?;
            }
            VertexKind::Out => {
                self.set_next(thick, Link::Enter { vertex: v, slot: Slot::Thick })?;
                self.set_in(thin0)?;
                self.set_in(thin1)?;
            }
        }
        self.vertices.push(FineVertex { kind, iso, thin0, thin1, thick });
        Ok(v)
    }

    /// Marks a boundary point. `source` means the flow enters the foam here.
    pub fn mark_open(&mut self, p: usize, side: Side, source: bool) {
        self.open.push((p, side, source));
    }

    fn walk(&self, start: usize, seen: &mut [bool]) -> FoamResult<(Port, Matrix)> {
        let mut t = Matrix::identity(self.ring, self.ranks[start]);
        let mut p = start;
        loop {
            seen[p] = true;
            match &self.next[p] {
                Some(Link::Interval { to, t: m }) => {
                    t = m.mul(&t)?;
                    p = *to;
                    if p == start {
                        return Err(FoamError::Malformed("edge walk closed on itself".into()));
                    }
                }
                Some(Link::Enter { vertex, slot }) => return Ok((Port::Vertex { vertex: *vertex, slot: *slot }, t)),
                None => {
                    let open = self
                        .open
                        .iter()
                        .position(|&(q, _, src)| q == p && !src)
                        .ok_or_else(|| FoamError::Malformed(format!("point {p} has no outgoing piece")))?;
                    return Ok((Port::Open { open }, t));
                }
            }
        }
    }

    /// Contracts chains of intervals into edges and leftover cycles into
    /// circles. Vertex `i` of the result is the `i`-th added vertex; circle
    /// monodromies are based at their lowest-numbered point.
    pub fn contract(&self) -> FoamResult<AbstractFoam> {
        let mut f = AbstractFoam::new(self.ring);
        for v in &self.vertices {
            f.add_vertex(v.kind, v.iso.clone());
        }
        for &(_, side, _) in &self.open {
            f.add_open(side);
        }
        let mut seen = vec![false; self.ranks.len()];
        for (i, v) in self.vertices.iter().enumerate() {
            let outs: Vec<(Slot, usize)> = match v.kind {
                VertexKind::In => vec![(Slot::Thick, v.thick)],
                VertexKind::Out => vec![(Slot::Thin0, v.thin0), (Slot::Thin1, v.thin1)],
            };
            for (slot, p) in outs {
                let (target, t) = self.walk(p, &mut seen)?;
                f.add_edge(Port::Vertex { vertex: i, slot }, target, t);
            }
        }
        for (i, &(p, _, src)) in self.open.iter().enumerate() {
            if src {
                let (target, t) = self.walk(p, &mut seen)?;
                f.add_edge(Port::Open { open: i }, target, t);
            }
        }
        for start in 0..self.ranks.len() {
            if seen[start] {
                continue;
            }
            let mut t = Matrix::identity(self.ring, self.ranks[start]);
            let mut p = start;
            loop {
                seen[p] = true;
                match &self.next[p] {
                    Some(Link::Interval { to, t: m }) => {
                        t = m.mul(&t)?;
                        p = *to;
                        if p == start {
                            break;
                        }
                    }
                    _ => return Err(FoamError::Malformed(format!("point {p} is not on an edge or circle"))),
                }
            }
            f.add_circle(t);
        }
        Ok(f)
    }

    /// `f_B` with every point of the graph as a cut point, in point order.
    pub fn assemble(&self) -> FoamResult<SparseMatrix> {
        if !self.open.is_empty() {
            return Err(FoamError::NotClosed);
        }
        let mut a = BlockAssembler::new(self.ring, &self.ranks);
        for (p, l) in self.next.iter().enumerate() {
            match l {
                Some(Link::Interval { to, t }) => a.add(&[*to], &[p], t),
                Some(Link::Enter { .. }) => {}
                None => return Err(FoamError::Malformed(format!("point {p} has no outgoing piece"))),
            }
        }
        for v in &self.vertices {
            match v.kind {
                VertexKind::In => a.add(&[v.thick], &[v.thin0, v.thin1], &v.iso),
                VertexKind::Out => a.add(&[v.thin0, v.thin1], &[v.thick], &v.iso.inverse()?),
            }
        }
        Ok(a.finish())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: RingSpec = RingSpec::Rationals;

    #[test]
    fn loop_of_intervals_is_a_circle() {
        let mut g = FineGraph::new(Q);
        let a = g.add_point(1);
        let b = g.add_point(1);
        g.add_interval(a, b, Matrix::from_i64(Q, &[&[3]])).unwrap();
        g.add_interval(b, a, Matrix::from_i64(Q, &[&[2]])).unwrap();
        let f = g.contract().unwrap();
        assert_eq!(f.circles.len(), 1);
        assert_eq!(f.circles[0].monodromy, Matrix::from_i64(Q, &[&[6]]));
        assert_eq!(g.assemble().unwrap().det().unwrap().to_string(), "-6");
    }

    #[test]
    fn double_outgoing_rejected() {
        let mut g = FineGraph::new(Q);
        let a = g.add_point(1);
        g.add_interval(a, a, Matrix::identity(Q, 1)).unwrap();
        assert!(g.add_interval(a, a, Matrix::identity(Q, 1)).is_err());
    }
}
