use super::types::{Dir, SlicedDiagram, Tile};
use super::{ensure_valid, DiagramError, DiagramResult};
use crate::exactalg::{k1_mul, tau, K1Class, Matrix, RingSpec};
use crate::foamcore::{AbstractFoam, CutLocation, FBAssembly, FineGraph, Side, VertexKind};

/// A diagram turned into a fine graph with one point per strand per slice
/// boundary, plus one interior point per crossing.
#[derive(Clone, Debug)]
pub struct FineDiagram {
    pub graph: FineGraph,
    /// `points[k][i]` is strand `i` at boundary `k`.
    pub points: Vec<Vec<usize>>,
    /// Cut location of every graph point, in point order.
    pub locations: Vec<CutLocation>,
    /// `(slice, tile index)` of each graph vertex, in vertex order. A crossing
    /// owns two consecutive vertices.
    pub vertex_tiles: Vec<(usize, usize)>,
}

fn interval(g: &mut FineGraph, lo: usize, up: usize, dir: Dir, m: Matrix) -> DiagramResult<()> {
    match dir {
        Dir::Up => g.add_interval(lo, up, m)?,
        Dir::Down => g.add_interval(up, lo, m)?,
    }
    Ok(())
}

/// A join-shaped vertex with thins below and thick above, oriented by `dir`.
fn merge_below(g: &mut FineGraph, dir: Dir, iso: Matrix, a: usize, b: usize, thick: usize) -> DiagramResult<usize> {
    let kind = if dir == Dir::Up { VertexKind::In } else { VertexKind::Out };
    Ok(g.add_vertex(kind, iso, a, b, thick)?)
}

/// A fork-shaped vertex with thick below and thins above.
fn split_above(g: &mut FineGraph, dir: Dir, iso: Matrix, thick: usize, a: usize, b: usize) -> DiagramResult<usize> {
    let kind = if dir == Dir::Up { VertexKind::Out } else { VertexKind::In };
    Ok(g.add_vertex(kind, iso, a, b, thick)?)
}

/// Builds the fine graph of a valid diagram, open or closed.
pub fn fine_graph(d: &SlicedDiagram) -> DiagramResult<FineDiagram> {
    ensure_valid(d)?;
    let states = d.states().expect("validated");
    let ring = d.ring;
    let mut g = FineGraph::new(ring);
    let mut locations = vec![];
    let mut points = vec![];
    for (k, st) in states.iter().enumerate() {
        let row: Vec<usize> = st
            .iter()
            .enumerate()
            .map(|(i, s)| {
                locations.push(CutLocation::Strand { boundary: k, index: i });
                g.add_point(s.rank)
            })
            .collect();
        points.push(row);
    }
    let mut vertex_tiles = vec![];
    let id = |n| Matrix::identity(ring, n);
    for (k, slice) in d.slices.iter().enumerate() {
        let (lower, upper) = (&points[k], &points[k + 1]);
        let st = &states[k];
        let (mut i, mut j) = (0, 0);
        let pass = |g: &mut FineGraph, i: usize, j: usize| interval(g, lower[i], upper[j], st[i].dir, id(st[i].rank));
        for (t, pl) in slice.tiles.iter().enumerate() {
            while i < pl.pos {
                pass(&mut g, i, j)?;
                i += 1;
                j += 1;
            }
            let l = |o: usize| lower[i + o];
            let u = |o: usize| upper[j + o];
            match &pl.tile {
                Tile::Id { rank, dir } => interval(&mut g, l(0), u(0), *dir, id(*rank))?,
                Tile::Gate { dir, m, .. } => interval(&mut g, l(0), u(0), *dir, m.clone())?,
                Tile::CupW { rank } => g.add_interval(u(1), u(0), id(*rank))?,
                Tile::CupE { rank } => g.add_interval(u(0), u(1), id(*rank))?,
                Tile::CapW { rank } => g.add_interval(l(0), l(1), id(*rank))?,
                Tile::CapE { rank } => g.add_interval(l(1), l(0), id(*rank))?,
                Tile::Join { dir, iso, .. } => {
                    merge_below(&mut g, *dir, iso.clone(), l(0), l(1), u(0))?;
                    vertex_tiles.push((k, t));
                }
                Tile::Fork { dir, iso, .. } => {
                    split_above(&mut g, *dir, iso.clone(), l(0), u(0), u(1))?;
                    vertex_tiles.push((k, t));
                }
                Tile::Cross { r1, r2, dir } => {
                    let mid = g.add_point(r1 + r2);
                    locations.push(CutLocation::Crossing { slice: k, pos: pl.pos });
                    merge_below(&mut g, *dir, id(r1 + r2), l(0), l(1), mid)?;
                    split_above(&mut g, *dir, Matrix::block_swap(ring, *r2, *r1), mid, u(0), u(1))?;
                    vertex_tiles.push((k, t));
                    vertex_tiles.push((k, t));
                }
            }
            i += pl.tile.n_in();
            j += pl.tile.n_out();
        }
        while i < st.len() {
            pass(&mut g, i, j)?;
            i += 1;
            j += 1;
        }
    }
    let last = states.len() - 1;
    for (i, s) in d.bottom.iter().enumerate() {
        g.mark_open(points[0][i], Side::Bottom, s.dir == Dir::Up);
    }
    for (i, s) in states[last].iter().enumerate() {
        g.mark_open(points[last][i], Side::Top, s.dir == Dir::Down);
    }
    Ok(FineDiagram { graph: g, points, locations, vertex_tiles })
}

/// The underlying abstract foam, with each vertex's `(slice, tile index)`.
pub fn forget_with_tiles(d: &SlicedDiagram) -> DiagramResult<(AbstractFoam, Vec<(usize, usize)>)> {
    let fd = fine_graph(d)?;
    Ok((fd.graph.contract()?, fd.vertex_tiles))
}

/// Forgets the embedding. Works on open diagrams too; open ends become
/// boundary points.
pub fn forget(d: &SlicedDiagram) -> DiagramResult<AbstractFoam> {
    Ok(forget_with_tiles(d)?.0)
}

/// `f_B` for the cut at every slice-boundary strand point and crossing.
pub fn fb_assembly(d: &SlicedDiagram) -> DiagramResult<FBAssembly> {
    if !d.is_closed() {
        ensure_valid(d)?;
        return Err(DiagramError::NotClosed);
    }
    let fd = fine_graph(d)?;
    let sparse = fd.graph.assemble()?;
    let ranks = fd.graph.ranks();
    let cut_points = fd.locations.iter().copied().zip(ranks.iter().copied()).collect();
    Ok(FBAssembly { cut_points, total_rank: ranks.iter().sum(), sparse })
}

fn table(t: &Tile, ring: RingSpec) -> Option<K1Class> {
    match *t {
        Tile::CapW { rank } | Tile::CupE { rank } => Some(tau(rank, ring)),
        _ => None,
    }
}

/// Product of the cup and cap contributions.
pub fn tau_prime(d: &SlicedDiagram) -> DiagramResult<K1Class> {
    ensure_valid(d)?;
    if !d.is_closed() {
        return Err(DiagramError::NotClosed);
    }
    let mut acc = K1Class::identity(d.ring);
    for pl in d.slices.iter().flat_map(|s| &s.tiles) {
        if let Some(c) = table(&pl.tile, d.ring) {
            acc = k1_mul(&acc, &c)?;
        }
    }
    Ok(acc)
}

/// `det f_B · τ(total cut rank) · τ′`.
pub fn planar_invariant(d: &SlicedDiagram) -> DiagramResult<K1Class> {
    let fb = fb_assembly(d)?;
    let det = K1Class::new(fb.det()?)?;
    let t = tau(fb.total_rank, d.ring);
    Ok(k1_mul(&k1_mul(&det, &t)?, &tau_prime(d)?)?)
}

/// A clockwise circle carrying `a`: cup, gate, cap.
pub fn gamma_bar(a: &Matrix) -> DiagramResult<SlicedDiagram> {
    if !a.is_square() {
        return Err(crate::exactalg::ExactError::NotSquare { rows: a.rows(), cols: a.cols() }.into());
    }
    if !a.is_invertible() {
        return Err(crate::exactalg::ExactError::NotInvertible.into());
    }
    let r = a.rows();
    let mut d = SlicedDiagram::new(a.ring());
    d.push(0, Tile::CupW { rank: r });
    d.push(0, Tile::Gate { rank: r, dir: Dir::Up, m: a.clone() });
    d.push(0, Tile::CapW { rank: r });
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_diagram;
    use crate::foamcore::{abstract_invariant, validate_abstract};

    const Q: RingSpec = RingSpec::Rationals;

    fn inv(text: &str) -> String {
        planar_invariant(&parse_diagram(text).unwrap()).unwrap().to_string()
    }

    #[test]
    fn gamma_bar_values() {
        for (a, want) in [(Matrix::from_i64(Q, &[&[1]]), "1"), (Matrix::from_i64(Q, &[&[5]]), "5")] {
            assert_eq!(planar_invariant(&gamma_bar(&a).unwrap()).unwrap().to_string(), want);
        }
        let s = Matrix::block_swap(Q, 1, 1);
        let k = planar_invariant(&gamma_bar(&s).unwrap()).unwrap();
        assert_eq!(k, tau(1, Q));
        assert!(gamma_bar(&Matrix::from_i64(Q, &[&[0]])).is_err());
    }

    #[test]
    fn gamma_bar_forgets_to_circle() {
        let a = Matrix::from_i64(Q, &[&[2, 1], &[1, 1]]);
        let f = forget(&gamma_bar(&a).unwrap()).unwrap();
        assert!(f.vertices.is_empty() && f.edges.is_empty());
        assert_eq!(f.circles.len(), 1);
        assert_eq!(f.circles[0].monodromy.det().unwrap(), a.det().unwrap());
    }

    #[test]
    fn hand_assembled_circle() {
        // Four points of rank 1 on a 4-cycle: f_B is a cyclic permutation
        // with one entry 5, det -5; τ(4) = 1 and τ′ = τ(1) = -1.
        let d = gamma_bar(&Matrix::from_i64(Q, &[&[5]])).unwrap();
        let fb = fb_assembly(&d).unwrap();
        assert_eq!(fb.total_rank, 4);
        assert_eq!(fb.det().unwrap().to_string(), "-5");
        assert_eq!(tau_prime(&d).unwrap(), tau(1, Q));
    }

    #[test]
    fn circle_orientations() {
        for r in 0..=5 {
            let cw = format!("ring Q\ncup_w {r}@1\ncap_w {r}@1\n");
            assert_eq!(tau_prime(&parse_diagram(&cw).unwrap()).unwrap(), tau(r, Q));
            let ccw = format!("ring Q\ncup_e {r}@1\ncap_e {r}@1\n");
            assert_eq!(tau_prime(&parse_diagram(&ccw).unwrap()).unwrap(), tau(r, Q));
            assert_eq!(inv(&cw), "1");
            assert_eq!(inv(&ccw), "1");
        }
        // Orientation does not matter, only the monodromy along the flow.
        assert_eq!(inv("ring Q\ncup_e 1@1\ngate 1 u [3]@2\ncap_e 1@1\n"), "3");
        assert_eq!(inv("ring Q\ncup_e 1@1\ngate 1 v [3]@1\ncap_e 1@1\n"), "3");
    }

    #[test]
    fn zigzag_keeps_invariant() {
        let plain = "ring Q\ncup_w 1@1\ngate 1 u [7]@1\ncap_w 1@1\n";
        let right = "ring Q\ncup_w 1@1\ngate 1 u [7]@1\ncup_e 1@2\ncap_w 1@1\ncap_w 1@1\n";
        let left = "ring Q\ncup_w 1@1\ngate 1 u [7]@1\ncup_w 1@1\ncap_e 1@2\ncap_w 1@1\n";
        for t in [plain, right, left] {
            assert_eq!(inv(t), "7", "{t}");
        }
    }

    #[test]
    fn theta_forgets_to_theta() {
        let text = "ring Q\ncup_w 2@1\nfork 1 1 u [1,2;0,1]@1\njoin 1 1 u@1\ncap_w 2@1\n";
        let d = parse_diagram(text).unwrap();
        let f = forget(&d).unwrap();
        assert!(validate_abstract(&f).is_empty());
        assert_eq!(f.vertices.len(), 2);
        assert_eq!(f.edges.len(), 3);
        let k = planar_invariant(&d).unwrap();
        assert_eq!(crate::exactalg::k1_project_quotient(&k), abstract_invariant(&f).unwrap());
    }

    #[test]
    fn open_diagrams_have_no_invariant() {
        let d = parse_diagram("ring Q\nbottom 1 u\nid 1 u@1\n").unwrap();
        assert!(matches!(planar_invariant(&d), Err(DiagramError::NotClosed)));
        let f = forget(&d).unwrap();
        assert_eq!(f.open_ends.len(), 2);
    }

    #[test]
    fn crossing_forgets_to_vertex_pair() {
        let d = parse_diagram("ring Q\ncup_w 1@1\ncup_w 1@2\ncross 1 1 u@1\ncap_w 1@2\ncap_w 1@1\n").unwrap();
        let f = forget(&d).unwrap();
        assert_eq!(f.vertices.len(), 2);
        assert_eq!(f.vertices[0].kind, VertexKind::In);
        assert_eq!(f.vertices[1].kind, VertexKind::Out);
        let k = planar_invariant(&d).unwrap();
        assert_eq!(crate::exactalg::k1_project_quotient(&k), abstract_invariant(&f).unwrap());
    }
}
