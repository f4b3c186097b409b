use super::types::{Dir, Placed, Slice, SlicedDiagram, Strand, Tile};
use super::{ensure_valid, DiagramError, DiagramResult};
use crate::exactalg::{ExactError, Matrix};
use crate::foamcore::{BraidFoamWord, Generator};

fn mirror_tile(t: &Tile) -> DiagramResult<Tile> {
    let ring = t.matrix().map(|m| m.ring());
    let swap = |a: usize, b: usize| Matrix::block_swap(ring.expect("vertex has a matrix"), a, b);
    Ok(match t {
        Tile::Id { rank, dir } => Tile::Id { rank: *rank, dir: dir.flip() },
        Tile::Gate { rank, dir, m } => Tile::Gate { rank: *rank, dir: dir.flip(), m: m.inverse()? },
        Tile::CupE { .. } | Tile::CupW { .. } | Tile::CapE { .. } | Tile::CapW { .. } => t.clone(),
        Tile::Join { r1, r2, dir, iso } => {
            Tile::Join { r1: *r2, r2: *r1, dir: dir.flip(), iso: iso.mul(&swap(*r2, *r1))? }
        }
        Tile::Fork { r1, r2, dir, iso } => {
            Tile::Fork { r1: *r2, r2: *r1, dir: dir.flip(), iso: iso.mul(&swap(*r2, *r1))? }
        }
        Tile::Cross { r1, r2, dir } => Tile::Cross { r1: *r2, r2: *r1, dir: dir.flip() },
    })
}

/// The mirror image with every orientation reversed. For a closed diagram
/// its invariant is the inverse of the original's.
pub fn reflect_reverse(d: &SlicedDiagram) -> DiagramResult<SlicedDiagram> {
    ensure_valid(d)?;
    let states = d.states().expect("validated");
    let mut out = SlicedDiagram::new(d.ring);
    out.bottom = d.bottom.iter().rev().map(|s| Strand::new(s.rank, s.dir.flip())).collect();
    for (k, s) in d.slices.iter().enumerate() {
        let n = states[k].len();
        let mut tiles = s
            .tiles
            .iter()
            .rev()
            .map(|pl| Ok(Placed::new(n - pl.pos - pl.tile.n_in(), mirror_tile(&pl.tile)?)))
            .collect::<DiagramResult<Vec<_>>>()?;
        tiles.sort_by_key(|p| p.pos);
        out.slices.extend(split_runs(tiles));
    }
    Ok(out)
}

/// Splits a sorted tile row wherever two tiles share a position, which
/// happens when a cup lands just left of another tile. Later runs are
/// shifted by the strands the earlier runs add or remove.
fn split_runs(tiles: Vec<Placed>) -> Vec<Slice> {
    let mut runs: Vec<Slice> = vec![];
    let mut cur: Vec<Placed> = vec![];
    let mut shift = 0isize;
    let mut pending = 0isize;
    let mut last: Option<usize> = None;
    for pl in tiles {
        if last == Some(pl.pos) {
            runs.push(Slice { tiles: std::mem::take(&mut cur) });
            shift += pending;
            pending = 0;
        }
        last = Some(pl.pos);
        pending += pl.tile.n_out() as isize - pl.tile.n_in() as isize;
        cur.push(Placed::new((pl.pos as isize + shift) as usize, pl.tile));
    }
    runs.push(Slice { tiles: cur });
    runs
}

/// `d1` to the left of `d2`. The slices of `d1` run first, then those of
/// `d2`, shifted past the top of `d1`.
pub fn disjoint_union(d1: &SlicedDiagram, d2: &SlicedDiagram) -> DiagramResult<SlicedDiagram> {
    if d1.ring != d2.ring {
        return Err(ExactError::RingMismatch(d1.ring, d2.ring).into());
    }
    ensure_valid(d1)?;
    ensure_valid(d2)?;
    let shift = d1.top().expect("validated").len();
    let mut out = d1.clone();
    out.bottom.extend(d2.bottom.iter().copied());
    for s in &d2.slices {
        let tiles = s.tiles.iter().map(|pl| Placed::new(pl.pos + shift, pl.tile.clone())).collect();
        out.slices.push(Slice { tiles });
    }
    Ok(out)
}

/// Replaces each crossing by its join/fork pair, splitting slices as needed.
pub fn expand_crosses(d: &SlicedDiagram) -> DiagramResult<SlicedDiagram> {
    ensure_valid(d)?;
    let mut out = SlicedDiagram { ring: d.ring, bottom: d.bottom.clone(), slices: vec![] };
    for s in &d.slices {
        if !s.tiles.iter().any(|p| matches!(p.tile, Tile::Cross { .. })) {
            out.slices.push(s.clone());
            continue;
        }
        let mut first = Slice::default();
        let mut second = Slice::default();
        let mut shift: isize = 0;
        for pl in &s.tiles {
            let at = (pl.pos as isize + shift) as usize;
            match pl.tile {
                Tile::Cross { r1, r2, dir } => {
                    let id = Matrix::identity(d.ring, r1 + r2);
                    first.tiles.push(Placed::new(pl.pos, Tile::Join { r1, r2, dir, iso: id }));
                    let iso = Matrix::block_swap(d.ring, r2, r1);
                    second.tiles.push(Placed::new(at, Tile::Fork { r1: r2, r2: r1, dir, iso }));
                    shift -= 1;
                }
                _ => {
                    first.tiles.push(pl.clone());
                    shift += pl.tile.n_out() as isize - pl.tile.n_in() as isize;
                }
            }
        }
        out.slices.push(first);
        out.slices.push(second);
    }
    Ok(out)
}

/// The standard planar closure of an upward word: nested clockwise arcs on
/// the right carry each strand back from top to bottom, with the matching
/// gates at the bottom.
pub fn braid_closure_diagram(w: &BraidFoamWord, matchings: &[Matrix]) -> DiagramResult<SlicedDiagram> {
    w.validate()?;
    let ring = w.ring;
    let bottom = &w.bottom_ranks;
    if matchings.len() != bottom.len() {
        return Err(DiagramError::Foam(crate::foamcore::FoamError::RankMismatch(format!(
            "{} matchings for {} strands",
            matchings.len(),
            bottom.len()
        ))));
    }
    let levels = w.levels()?;
    if levels.last() != Some(bottom) {
        return Err(DiagramError::Foam(crate::foamcore::FoamError::RankMismatch(
            "top ranks differ from bottom ranks".into(),
        )));
    }
    let mut d = SlicedDiagram::new(ring);
    for (j, &r) in bottom.iter().enumerate() {
        d.push(j, Tile::CupW { rank: r });
    }
    for (j, (m, &r)) in matchings.iter().zip(bottom).enumerate() {
        if !m.is_identity() {
            d.push(j, Tile::Gate { rank: r, dir: Dir::Up, m: m.clone() });
        }
    }
    for (g, ranks) in w.generators.iter().zip(&levels) {
        let (pos, tile) = match g {
            Generator::Join { i, iso } => {
                (*i, Tile::Join { r1: ranks[*i], r2: ranks[i + 1], dir: Dir::Up, iso: iso.clone() })
            }
            Generator::Fork { i, left, iso } => {
                (*i, Tile::Fork { r1: *left, r2: ranks[*i] - left, dir: Dir::Up, iso: iso.clone() })
            }
            Generator::Gate { i, m } => (*i, Tile::Gate { rank: ranks[*i], dir: Dir::Up, m: m.clone() }),
            Generator::Swap { i } => (*i, Tile::Cross { r1: ranks[*i], r2: ranks[i + 1], dir: Dir::Up }),
        };
        d.push(pos, tile);
    }
    for (j, &r) in bottom.iter().enumerate().rev() {
        d.push(j, Tile::CapW { rank: r });
    }
    ensure_valid(&d)?;
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{parse_diagram, planar_invariant, serialize_diagram};
    use crate::exactalg::{k1_mul, tau, K1Class, RingSpec};
    use crate::foamcore::closure_k1;

    const Q: RingSpec = RingSpec::Rationals;

    const THETA: &str = "ring Q\ncup_w 2@1\nfork 1 1 u [1,2;3,4]@1\ngate 1 u [5]@2\njoin 1 1 u@1\ncap_w 2@1\n";

    #[test]
    fn reflection_inverts() {
        let d = parse_diagram(THETA).unwrap();
        let r = reflect_reverse(&d).unwrap();
        let u = disjoint_union(&d, &r).unwrap();
        assert!(planar_invariant(&u).unwrap().is_identity());
        assert_eq!(reflect_reverse(&r).unwrap(), d);
    }

    #[test]
    fn union_multiplies_and_empty_is_neutral() {
        let a = parse_diagram(THETA).unwrap();
        let b = parse_diagram("ring Q\ncup_e 1@1\ngate 1 v [3]@1\ncap_e 1@1\n").unwrap();
        let u = disjoint_union(&a, &b).unwrap();
        let want = k1_mul(&planar_invariant(&a).unwrap(), &planar_invariant(&b).unwrap()).unwrap();
        assert_eq!(planar_invariant(&u).unwrap(), want);
        let e = SlicedDiagram::new(Q);
        assert_eq!(disjoint_union(&a, &e).unwrap(), a);
        assert_eq!(disjoint_union(&e, &a).unwrap(), a);
    }

    #[test]
    fn crosses_expand_without_changing_invariant() {
        let d = parse_diagram("ring Q\ncup_w 2@1\ncup_w 1@2\ncross 2 1 u@1; gate 1 v [3]@3\ncross 1 2 u@1\ncap_w 1@2\ncap_w 2@1\n").unwrap();
        let e = expand_crosses(&d).unwrap();
        assert_eq!(e.slices.len(), d.slices.len() + 2);
        assert_eq!(planar_invariant(&d).unwrap(), planar_invariant(&e).unwrap());
        assert!(serialize_diagram(&e).contains("join 2 1 u@1; gate 1 v [3]@3\nfork 1 2 u [0,1,0;0,0,1;1,0,0]@1\n"));
    }

    #[test]
    fn closure_matches_closure_k1() {
        let mut w = BraidFoamWord::new(Q, vec![1, 2]);
        w.push(Generator::Swap { i: 0 }).unwrap();
        w.push(Generator::Gate { i: 0, m: Matrix::from_i64(Q, &[&[1, 1], &[0, 3]]) }).unwrap();
        w.push(Generator::Swap { i: 0 }).unwrap();
        let ms = [Matrix::from_i64(Q, &[&[2]]), Matrix::from_i64(Q, &[&[1, 0], &[4, 5]])];
        let d = braid_closure_diagram(&w, &ms).unwrap();
        assert_eq!(planar_invariant(&d).unwrap(), closure_k1(&w, &ms).unwrap());
        let one = K1Class::identity(Q);
        assert_eq!(k1_mul(&one, &tau(2, Q)).unwrap(), one);
    }
}
