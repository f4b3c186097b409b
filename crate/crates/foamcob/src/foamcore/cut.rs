use super::foam::{validate_abstract, AbstractFoam, Port, Slot, VertexKind};
use super::{FoamError, FoamResult};
use crate::exactalg::{k1_project_quotient, K1Class, K1QuotClass, Matrix, RingSpec, Scalar, SparseMatrix};

/// Places component maps into a block matrix on `⊕ P_b`.
pub struct BlockAssembler {
    ranks: Vec<usize>,
    offsets: Vec<usize>,
    m: SparseMatrix,
}

impl BlockAssembler {
    pub fn new(ring: RingSpec, ranks: &[usize]) -> BlockAssembler {
        let mut offsets = Vec::with_capacity(ranks.len());
        let mut total = 0;
        for &r in ranks {
            offsets.push(total);
            total += r;
        }
        BlockAssembler { ranks: ranks.to_vec(), offsets, m: SparseMatrix::new(ring, total) }
    }

    /// Adds a component map from `⊕ ins` to `⊕ outs`, both in the given order.
    pub fn add(&mut self, outs: &[usize], ins: &[usize], m: &Matrix) {
        let mut r0 = 0;
        for &o in outs {
            let mut c0 = 0;
            for &i in ins {
                for a in 0..self.ranks[o] {
                    for b in 0..self.ranks[i] {
                        self.m.add_entry(self.offsets[o] + a, self.offsets[i] + b, m.get(r0 + a, c0 + b));
                    }
                }
                c0 += self.ranks[i];
            }
            r0 += self.ranks[o];
        }
    }

    pub fn finish(self) -> SparseMatrix {
        self.m
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CutLocation {
    /// The `index`-th point along an edge, counted from its source.
    Edge { edge: usize, index: usize },
    Circle { circle: usize, index: usize },
    /// A strand point of a sliced diagram at a slice boundary.
    Strand { boundary: usize, index: usize },
    /// The interior point of a crossing tile.
    Crossing { slice: usize, pos: usize },
}

/// Point counts per edge and per vertexless circle. Every count must be at
/// least one, which makes every complement component an interval or tripod.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrongCut {
    pub edge_points: Vec<usize>,
    pub circle_points: Vec<usize>,
}

impl StrongCut {
    pub fn refine_edge(&mut self, e: usize) {
        self.edge_points[e] += 1;
    }

    pub fn refine_circle(&mut self, c: usize) {
        self.circle_points[c] += 1;
    }
}

#[derive(Clone, Debug)]
pub struct FBAssembly {
    pub cut_points: Vec<(CutLocation, usize)>,
    pub total_rank: usize,
    pub sparse: SparseMatrix,
}

impl FBAssembly {
    pub fn matrix(&self) -> Matrix {
        self.sparse.to_dense()
    }

    pub fn det(&self) -> FoamResult<Scalar> {
        Ok(self.sparse.det()?)
    }
}

/// One midpoint per edge and one point per vertexless circle.
pub fn canonical_strong_cut(f: &AbstractFoam) -> StrongCut {
    StrongCut { edge_points: vec![1; f.edges.len()], circle_points: vec![1; f.circles.len()] }
}

/// `f_B` for a strong cut. On an edge the segment from the source to the
/// first point carries the edge transport and later segments carry the
/// identity; on a circle the segment from the last point back to the first
/// carries the monodromy.
pub fn assemble_fb(f: &AbstractFoam, cut: &StrongCut) -> FoamResult<FBAssembly> {
    if !f.is_closed() {
        return Err(FoamError::NotClosed);
    }
    let diags = validate_abstract(f);
    if !diags.is_empty() {
        return Err(FoamError::Invalid(diags));
    }
    if cut.edge_points.len() != f.edges.len() || cut.circle_points.len() != f.circles.len() {
        return Err(FoamError::NotStrong("cut does not match the foam".into()));
    }
    if let Some(e) = cut.edge_points.iter().position(|&n| n == 0) {
        return Err(FoamError::NotStrong(format!("edge {e} has no cut point")));
    }
    if let Some(c) = cut.circle_points.iter().position(|&n| n == 0) {
        return Err(FoamError::NotStrong(format!("circle {c} has no cut point")));
    }
    let ring = f.ring;
    let mut cut_points = vec![];
    let mut edge_first = vec![];
    for (e, edge) in f.edges.iter().enumerate() {
        edge_first.push(cut_points.len());
        for index in 0..cut.edge_points[e] {
            cut_points.push((CutLocation::Edge { edge: e, index }, edge.rank));
        }
    }
    let mut circle_first = vec![];
    for (c, circle) in f.circles.iter().enumerate() {
        circle_first.push(cut_points.len());
        for index in 0..cut.circle_points[c] {
            cut_points.push((CutLocation::Circle { circle: c, index }, circle.rank));
        }
    }
    let ranks: Vec<usize> = cut_points.iter().map(|c| c.1).collect();
    let mut a = BlockAssembler::new(ring, &ranks);
    for (e, edge) in f.edges.iter().enumerate() {
        let first = edge_first[e];
        for k in 1..cut.edge_points[e] {
            a.add(&[first + k], &[first + k - 1], &Matrix::identity(ring, edge.rank));
        }
    }
    for (c, circle) in f.circles.iter().enumerate() {
        let first = circle_first[c];
        let n = cut.circle_points[c];
        for k in 1..n {
            a.add(&[first + k], &[first + k - 1], &Matrix::identity(ring, circle.rank));
        }
        a.add(&[first], &[first + n - 1], &circle.monodromy);
    }
    let inc = f.incidence();
    let first_of = |e: usize| edge_first[e];
    let last_of = |e: usize| edge_first[e] + cut.edge_points[e] - 1;
    for (v, vertex) in f.vertices.iter().enumerate() {
        let at = |slot| inc[&Port::Vertex { vertex: v, slot }];
        let (e0, e1, e2) = (at(Slot::Thin0), at(Slot::Thin1), at(Slot::Thick));
        match vertex.kind {
            VertexKind::In => {
                let m = f.edges[e2].transport.mul(&vertex.iso)?;
                a.add(&[first_of(e2)], &[last_of(e0), last_of(e1)], &m);
            }
            VertexKind::Out => {
                let legs = f.edges[e0].transport.block_direct_sum(&f.edges[e1].transport)?;
                let m = legs.mul(&vertex.iso.inverse()?)?;
                a.add(&[first_of(e0), first_of(e1)], &[last_of(e2)], &m);
            }
        }
    }
    let total_rank = ranks.iter().sum();
    Ok(FBAssembly { cut_points, total_rank, sparse: a.finish() })
}

/// Class of `det f_B` modulo `{±1}` for the canonical cut.
pub fn abstract_invariant(f: &AbstractFoam) -> FoamResult<K1QuotClass> {
    let fb = assemble_fb(f, &canonical_strong_cut(f))?;
    let k = K1Class::new(fb.det()?)?;
    Ok(k1_project_quotient(&k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::tau;
    use crate::foamcore::foam::Side;

    const Q: RingSpec = RingSpec::Rationals;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_i64(Q, rows)
    }

    #[test]
    fn circle_one_and_two_points() {
        let a = m(&[&[1, 2], &[3, 5]]);
        let f = AbstractFoam::circle(Q, a.clone());
        let mut cut = canonical_strong_cut(&f);
        assert_eq!(assemble_fb(&f, &cut).unwrap().matrix(), a);
        cut.refine_circle(0);
        let two = assemble_fb(&f, &cut).unwrap().matrix();
        let expect = Matrix::zeros(Q, 2, 2)
            .block_direct_sum(&Matrix::zeros(Q, 2, 2))
            .map(|mut z| {
                z.paste(0, 2, &a);
                z.paste(2, 0, &Matrix::identity(Q, 2));
                z
            })
            .unwrap();
        assert_eq!(two, expect);
    }

    #[test]
    fn open_foam_rejected() {
        let mut f = AbstractFoam::new(Q);
        let b = f.add_open(Side::Bottom);
        let t = f.add_open(Side::Top);
        f.add_edge(Port::Open { open: b }, Port::Open { open: t }, Matrix::identity(Q, 1));
        assert_eq!(assemble_fb(&f, &canonical_strong_cut(&f)).unwrap_err(), FoamError::NotClosed);
    }

    #[test]
    fn refinement_scales_by_tau() {
        let f = AbstractFoam::circle(Q, m(&[&[7]]));
        let mut cut = canonical_strong_cut(&f);
        let d0 = assemble_fb(&f, &cut).unwrap().det().unwrap();
        cut.refine_circle(0);
        let d1 = assemble_fb(&f, &cut).unwrap().det().unwrap();
        assert_eq!(d1, d0.mul(tau(1, Q).unit()));
    }
}
