//! Pattern matching and rewriting for every registered move.
//!
//! All rewrites keep single-tile slices single. Patterns are matched on
//! slices that hold exactly one tile, except for the `lift`, `strip` and
//! `combine` slides, which exist to reach that shape.

use super::{Move, MoveId, Params};
use crate::diagram::{validate_diagram, Dir, Placed, Slice, SlicedDiagram, Strand, Tile};
use crate::exactalg::{Matrix, RingSpec};

pub(crate) type R<T> = Result<T, String>;

/// Ranks up to this bound are offered by `enumerate_moves` for moves that
/// create new strands.
pub const DEFAULT_RANK_BOUND: usize = 2;

pub(crate) struct View<'a> {
    d: &'a SlicedDiagram,
    states: Vec<Vec<Strand>>,
}

impl<'a> View<'a> {
    fn new(d: &'a SlicedDiagram) -> R<View<'a>> {
        let diags = validate_diagram(d);
        if let Some(e) = diags.first() {
            return Err(format!("input diagram is invalid: {e}"));
        }
        Ok(View { d, states: d.states().expect("validated") })
    }

    fn ring(&self) -> RingSpec {
        self.d.ring
    }

    fn one(&self, k: usize) -> R<&'a Placed> {
        self.d.single(k).ok_or_else(|| format!("slice {k} does not hold exactly one tile"))
    }

    fn state(&self, k: usize) -> R<&[Strand]> {
        self.states.get(k).map(|s| s.as_slice()).ok_or_else(|| format!("no boundary {k}"))
    }

    fn strand(&self, k: usize, x: usize) -> R<Strand> {
        self.state(k)?.get(x).copied().ok_or_else(|| format!("no strand {x} at boundary {k}"))
    }

    fn slices(&self, k: usize, n: usize) -> R<&'a [Slice]> {
        self.d.slices.get(k..k + n).ok_or_else(|| format!("need {n} slices from {k}"))
    }

    /// Replaces `remove` slices from `k` with `new`.
    fn splice(&self, k: usize, remove: usize, new: Vec<Slice>) -> SlicedDiagram {
        let mut out = self.d.clone();
        out.slices.splice(k..k + remove, new);
        out
    }
}

fn s1(pos: usize, tile: Tile) -> Slice {
    Slice::single(pos, tile)
}

fn ensure(cond: bool, msg: &str) -> R<()> {
    if cond {
        Ok(())
    } else {
        Err(msg.to_string())
    }
}

fn id(ring: RingSpec, n: usize) -> Matrix {
    Matrix::identity(ring, n)
}

fn swap(ring: RingSpec, a: usize, b: usize) -> Matrix {
    Matrix::block_swap(ring, a, b)
}

fn mul(a: &Matrix, b: &Matrix) -> R<Matrix> {
    a.mul(b).map_err(|e| e.to_string())
}

fn inv(a: &Matrix) -> R<Matrix> {
    a.inverse().map_err(|e| e.to_string())
}

fn dsum(a: &Matrix, b: &Matrix) -> R<Matrix> {
    a.block_direct_sum(b).map_err(|e| e.to_string())
}

fn param_matrix(p: &Params, i: usize, ring: RingSpec, n: usize) -> R<Matrix> {
    match p.matrices.get(i) {
        None => Ok(id(ring, n)),
        Some(m) => {
            ensure(m.ring() == ring, "parameter matrix over the wrong ring")?;
            ensure(m.rows() == n && m.cols() == n, "parameter matrix has the wrong size")?;
            ensure(m.is_invertible(), "parameter matrix is not invertible")?;
            Ok(m.clone())
        }
    }
}

fn finish(out: SlicedDiagram) -> R<SlicedDiagram> {
    match validate_diagram(&out).first() {
        Some(e) => Err(format!("rewrite does not fit here: {e}")),
        None => Ok(out),
    }
}

pub(crate) fn apply(d: &SlicedDiagram, m: &Move) -> R<SlicedDiagram> {
    let v = View::new(d)?;
    finish(apply_view(&v, m)?)
}

fn apply_view(v: &View, m: &Move) -> R<SlicedDiagram> {
    Ok(match m.id {
        MoveId::IsotopySlide => slide(v, m)?,
        MoveId::IsotopyZigzag => zigzag(v, m)?,
        MoveId::SingCap => sing_cap(v, m)?,
        MoveId::SingCup => sing_cup(v, m)?,
        MoveId::SingSaddle => sing_saddle(v, m)?,
        MoveId::VertexSlide => vertex_slide(v, m)?,
        MoveId::VertexAssoc => vertex_assoc(v, m)?,
        MoveId::CircleBirth => circle_birth(v, m)?,
        MoveId::CircleDeath => circle_death(v, m)?,
        MoveId::Saddle => saddle(v, m)?,
        MoveId::R1 => r1(v, m)?,
        MoveId::R2A => r2a(v, m)?,
        MoveId::R2B => r2b(v, m)?,
        MoveId::R3A => r3a(v, m)?,
        MoveId::R3B => r3b(v, m)?,
        MoveId::R4A => r4(v, m, Dir::Up)?,
        MoveId::R4B => r4(v, m, Dir::Down)?,
        MoveId::SplitMonodromy => split_monodromy(v, m)?,
        MoveId::CircleAcrossEdge => across_edge(v, m)?,
        MoveId::CircleMerge => circle_merge(v, m)?,
        MoveId::CircleReverse => circle_reverse(v, m)?,
        MoveId::MarkovStab => markov(v, m)?,
    })
}

fn bad_mode(m: &Move) -> String {
    format!("unknown mode `{}`", m.params.mode)
}

// ---------------------------------------------------------------- isotopy

fn slide(v: &View, m: &Move) -> R<SlicedDiagram> {
    let k = m.slice;
    let ring = v.ring();
    let at = |p: usize| ensure(p == m.pos, "no such tile at that position");
    if matches!(m.params.mode.as_str(), "combine" | "drop" | "pad" | "strip") {
        ensure(m.pos == 0, "this slide acts on a whole slice; its position is 0")?;
    }
    match m.params.mode.as_str() {
        "lift" => {
            let s = v.slices(k, 1)?[0].clone();
            ensure(s.tiles.len() >= 2, "lift needs a slice with two or more tiles")?;
            let i = s.tiles.iter().position(|p| p.pos == m.pos).ok_or("no tile at that position")?;
            let shift: isize = s.tiles[..i].iter().map(|p| p.tile.n_out() as isize - p.tile.n_in() as isize).sum();
            let mut lower = s.clone();
            let t = lower.tiles.remove(i);
            let upper = s1((t.pos as isize + shift) as usize, t.tile);
            Ok(v.splice(k, 1, vec![lower, upper]))
        }
        "combine" => {
            let s = v.slices(k, 1)?[0].clone();
            let u = v.one(k + 1)?;
            let (b, in_u) = (u.pos, u.tile.n_in());
            let mut shift: isize = 0;
            for t in &s.tiles {
                let start = t.pos as isize + shift;
                let end = start + t.tile.n_out() as isize;
                let (b, e) = (b as isize, (b + in_u) as isize);
                let overlap = if in_u == 0 { b > start && b < end } else { b < end && e > start };
                ensure(!overlap, "the upper tile touches an output of the lower slice")?;
                if end <= b {
                    shift += t.tile.n_out() as isize - t.tile.n_in() as isize;
                }
            }
            let nb = b as isize - shift;
            ensure(nb >= 0, "position underflow")?;
            let mut merged = s.clone();
            merged.tiles.push(Placed::new(nb as usize, u.tile.clone()));
            merged.tiles.sort_by_key(|p| p.pos);
            let got = merged.apply(v.state(k)?)?;
            ensure(got.as_slice() == v.state(k + 2)?, "combined slice does not match")?;
            Ok(v.splice(k, 2, vec![merged]))
        }
        "drop" => {
            let s = &v.slices(k, 1)?[0];
            ensure(s.is_trivial(), "drop needs a slice of identities")?;
            let next_trivial = v.d.slices.get(k + 1).is_some_and(|n| n.is_trivial());
            ensure(!next_trivial, "drop the topmost identity slice of a run")?;
            Ok(v.splice(k, 1, vec![]))
        }
        "pad" => {
            ensure(k <= v.d.slices.len(), "pad index out of range")?;
            let triv = |j: Option<usize>| j.and_then(|j| v.d.slices.get(j)).is_some_and(|s| s.is_trivial());
            ensure(!triv(k.checked_sub(1)) && !triv(Some(k)), "pad only between non-identity slices")?;
            Ok(v.splice(k, 0, vec![Slice::default()]))
        }
        "strip" => {
            let s = &v.slices(k, 1)?[0];
            ensure(s.tiles.iter().any(|p| matches!(p.tile, Tile::Id { .. })), "no explicit identity tile")?;
            let tiles = s.tiles.iter().filter(|p| !matches!(p.tile, Tile::Id { .. })).cloned().collect();
            Ok(v.splice(k, 1, vec![Slice { tiles }]))
        }
        "unfold" => {
            let p = v.one(k)?;
            let Tile::Cross { r1, r2, dir } = p.tile else { return Err("unfold needs a crossing".into()) };
            let x = p.pos;
            at(x)?;
            Ok(v.splice(
                k,
                1,
                vec![
                    s1(x, Tile::Join { r1, r2, dir, iso: id(ring, r1 + r2) }),
                    s1(x, Tile::Fork { r1: r2, r2: r1, dir, iso: swap(ring, r2, r1) }),
                ],
            ))
        }
        "fold" => {
            let (l, u) = (v.one(k)?, v.one(k + 1)?);
            let (Tile::Join { r1, r2, dir, iso: j }, Tile::Fork { r1: f1, r2: f2, dir: fd, iso: f }) = (&l.tile, &u.tile)
            else {
                return Err("fold needs a join under a fork".into());
            };
            ensure(l.pos == u.pos && dir == fd && *f1 == *r2 && *f2 == *r1, "not a crossing shape")?;
            at(l.pos)?;
            ensure(j.is_identity() && *f == swap(ring, *r2, *r1), "isos are not those of a crossing")?;
            Ok(v.splice(k, 2, vec![s1(l.pos, Tile::Cross { r1: *r1, r2: *r2, dir: *dir })]))
        }
        "swap" => {
            let (l, u) = (v.one(k)?, v.one(k + 1)?);
            let (a, b) = (l.pos, u.pos);
            at(a)?;
            let (lo, hi) = if b + u.tile.n_in() <= a {
                (s1(b, u.tile.clone()), s1(a + u.tile.n_out() - u.tile.n_in(), l.tile.clone()))
            } else if b >= a + l.tile.n_out() {
                (s1(b + l.tile.n_in() - l.tile.n_out(), u.tile.clone()), s1(a, l.tile.clone()))
            } else {
                return Err("the tiles share a strand".into());
            };
            Ok(v.splice(k, 2, vec![lo, hi]))
        }
        "fuse" => {
            let (l, u) = (v.one(k)?, v.one(k + 1)?);
            let (Tile::Gate { rank, dir, m: a }, Tile::Gate { rank: r2, dir: d2, m: b }) = (&l.tile, &u.tile) else {
                return Err("fuse needs two stacked gates".into());
            };
            ensure(l.pos == u.pos && rank == r2 && dir == d2, "gates are not on one strand")?;
            at(l.pos)?;
            let m = if *dir == Dir::Up { mul(b, a)? } else { mul(a, b)? };
            Ok(v.splice(k, 2, vec![s1(l.pos, Tile::Gate { rank: *rank, dir: *dir, m })]))
        }
        "unfuse" => {
            let p = v.one(k)?;
            let Tile::Gate { rank, dir, m: g } = &p.tile else { return Err("unfuse needs a gate".into()) };
            at(p.pos)?;
            ensure(m.params.matrices.len() == 2, "unfuse takes two matrices, lower then upper")?;
            let lo = param_matrix(&m.params, 0, ring, *rank)?;
            let hi = param_matrix(&m.params, 1, ring, *rank)?;
            let prod = if *dir == Dir::Up { mul(&hi, &lo)? } else { mul(&lo, &hi)? };
            ensure(&prod == g, "the factors do not compose to the gate")?;
            let t = |m: Matrix| s1(p.pos, Tile::Gate { rank: *rank, dir: *dir, m });
            Ok(v.splice(k, 1, vec![t(lo), t(hi)]))
        }
        "rotate" => {
            at(v.one(k)?.pos)?;
            rotate(v, k)
        }
        _ => Err(bad_mode(m)),
    }
}

/// A vertex turned through an adjacent extremum: a join under a cap that
/// takes its thick edge, or a fork above a cup that feeds it. The vertex
/// keeps its flow, so merges stay merges and splits stay splits.
fn rotate(v: &View, k: usize) -> R<SlicedDiagram> {
    let ring = v.ring();
    let (l, u) = (v.one(k)?, v.one(k + 1)?);
    let x = l.pos;
    match (&l.tile, &u.tile) {
        (Tile::Join { r1: a, r2: b, dir, iso: j }, cap) if cap.is_cap() => {
            let (a, b, dir) = (*a, *b, *dir);
            let f = Tile::Fork { r1: b, r2: a, dir: dir.flip(), iso: mul(j, &swap(ring, b, a))? };
            // Caps whose left input agrees with the join output.
            let (outer, west) = match (cap, dir) {
                (Tile::CapW { rank }, Dir::Up) | (Tile::CapE { rank }, Dir::Down) => (*rank, true),
                (Tile::CapE { rank }, Dir::Up) | (Tile::CapW { rank }, Dir::Down) => (*rank, false),
                _ => unreachable!(),
            };
            let c = |r: usize| match cap {
                Tile::CapW { .. } => Tile::CapW { rank: r },
                _ => Tile::CapE { rank: r },
            };
            ensure(outer == a + b, "cap does not consume the join output")?;
            if west && u.pos == x {
                Ok(v.splice(k, 2, vec![s1(x + 2, f), s1(x + 1, c(b)), s1(x, c(a))]))
            } else if !west && u.pos + 1 == x {
                Ok(v.splice(k, 2, vec![s1(x - 1, f), s1(x, c(a)), s1(x - 1, c(b))]))
            } else {
                Err("cap does not consume the join output".into())
            }
        }
        (cup, Tile::Fork { r1: t1, r2: t2, dir, iso: f }) if cup.is_cup() => {
            let (t1, t2, dir) = (*t1, *t2, *dir);
            let j = Tile::Join { r1: t2, r2: t1, dir: dir.flip(), iso: mul(f, &swap(ring, t2, t1))? };
            // Cups whose left arm agrees with the fork input.
            let (outer, east) = match (cup, dir) {
                (Tile::CupE { rank }, Dir::Down) | (Tile::CupW { rank }, Dir::Up) => (*rank, true),
                (Tile::CupW { rank }, Dir::Down) | (Tile::CupE { rank }, Dir::Up) => (*rank, false),
                _ => unreachable!(),
            };
            let c = |r: usize| match cup {
                Tile::CupW { .. } => Tile::CupW { rank: r },
                _ => Tile::CupE { rank: r },
            };
            ensure(outer == t1 + t2, "fork does not consume the cup output")?;
            if east && u.pos == x {
                Ok(v.splice(k, 2, vec![s1(x, c(t1)), s1(x + 1, c(t2)), s1(x + 2, j)]))
            } else if !east && u.pos == x + 1 {
                Ok(v.splice(k, 2, vec![s1(x, c(t2)), s1(x + 1, c(t1)), s1(x, j)]))
            } else {
                Err("fork does not consume the cup output".into())
            }
        }
        _ => Err("no join under a cap or fork above a cup".into()),
    }
}

pub(crate) fn zigzag_slices(s: Strand, x: usize, right: bool) -> Vec<Slice> {
    let r = s.rank;
    if right {
        vec![s1(x + 1, Tile::cup(r, s.dir.flip())), s1(x, Tile::cap(r, s.dir))]
    } else {
        vec![s1(x, Tile::cup(r, s.dir)), s1(x + 1, Tile::cap(r, s.dir.flip()))]
    }
}

fn zigzag(v: &View, m: &Move) -> R<SlicedDiagram> {
    let (k, x) = (m.slice, m.pos);
    match m.params.mode.as_str() {
        "insert_right" | "insert_left" => {
            let s = v.strand(k, x)?;
            Ok(v.splice(k, 0, zigzag_slices(s, x, m.params.mode == "insert_right")))
        }
        "remove" => {
            let s = v.strand(k, x)?;
            let got = v.slices(k, 2)?;
            ensure(
                got == zigzag_slices(s, x, true).as_slice() || got == zigzag_slices(s, x, false).as_slice(),
                "no zigzag on that strand",
            )?;
            Ok(v.splice(k, 2, vec![]))
        }
        _ => Err(bad_mode(m)),
    }
}

// ---------------------------------------------------------------- vertices

fn sing_cap(v: &View, m: &Move) -> R<SlicedDiagram> {
    let (l, u) = (v.one(m.slice)?, v.one(m.slice + 1)?);
    match (&l.tile, &u.tile) {
        (Tile::Fork { r1, r2, dir, iso: f }, Tile::Join { r1: a, r2: b, dir: d2, iso: j })
            if l.pos == m.pos && u.pos == m.pos && (r1, r2, dir) == (a, b, d2) =>
        {
            ensure(f == j, "the two isos differ, so the bubble is not trivial")?;
            Ok(v.splice(m.slice, 2, vec![]))
        }
        _ => Err("no fork followed by a matching join".into()),
    }
}

fn sing_cup(v: &View, m: &Move) -> R<SlicedDiagram> {
    let s = v.strand(m.slice, m.pos)?;
    let (a, b) = match m.params.ranks.as_slice() {
        [] => (s.rank / 2, s.rank - s.rank / 2),
        [a, b] => (*a, *b),
        _ => return Err("SING_CUP takes two ranks".into()),
    };
    ensure(a + b == s.rank, "ranks must add up to the strand rank")?;
    let f = param_matrix(&m.params, 0, v.ring(), s.rank)?;
    let x = m.pos;
    Ok(v.splice(
        m.slice,
        0,
        vec![
            s1(x, Tile::Fork { r1: a, r2: b, dir: s.dir, iso: f.clone() }),
            s1(x, Tile::Join { r1: a, r2: b, dir: s.dir, iso: f }),
        ],
    ))
}

fn sing_saddle(v: &View, m: &Move) -> R<SlicedDiagram> {
    let (k, x) = (m.slice, m.pos);
    match m.params.mode.as_str() {
        "remove" => {
            let (l, u) = (v.one(k)?, v.one(k + 1)?);
            match (&l.tile, &u.tile) {
                (Tile::Join { r1, r2, dir, iso: j }, Tile::Fork { r1: a, r2: b, dir: d2, iso: f })
                    if l.pos == x && u.pos == x && (r1, r2, dir) == (a, b, d2) =>
                {
                    ensure(f == j, "the two isos differ")?;
                    Ok(v.splice(k, 2, vec![]))
                }
                _ => Err("no join followed by a matching fork".into()),
            }
        }
        "insert" => {
            let (s, t) = (v.strand(k, x)?, v.strand(k, x + 1)?);
            ensure(s.dir == t.dir, "strands point different ways")?;
            let j = param_matrix(&m.params, 0, v.ring(), s.rank + t.rank)?;
            let (r1, r2, dir) = (s.rank, t.rank, s.dir);
            Ok(v.splice(
                k,
                0,
                vec![s1(x, Tile::Join { r1, r2, dir, iso: j.clone() }), s1(x, Tile::Fork { r1, r2, dir, iso: j })],
            ))
        }
        _ => Err(bad_mode(m)),
    }
}

fn vertex_slide(v: &View, m: &Move) -> R<SlicedDiagram> {
    let (k, p) = (m.slice, m.pos);
    let ring = v.ring();
    let (l, u) = (v.one(k)?, v.one(k + 1)?);
    let all_id = l.tile.matrix().is_some_and(|x| x.is_identity()) && u.tile.matrix().is_some_and(|x| x.is_identity());
    ensure(all_id, "VERTEX_SLIDE needs identity isos")?;
    let j = |r1: usize, r2: usize, dir: Dir| Tile::Join { r1, r2, dir, iso: id(ring, r1 + r2) };
    let f = |r1: usize, r2: usize, dir: Dir| Tile::Fork { r1, r2, dir, iso: id(ring, r1 + r2) };
    match m.params.mode.as_str() {
        "forward" => {
            let (Tile::Join { r1: a, r2: b, dir, .. }, Tile::Fork { r1: c, r2: e, dir: d2, .. }) = (&l.tile, &u.tile)
            else {
                return Err("needs a join under a fork".into());
            };
            let (a, b, c, e, dir) = (*a, *b, *c, *e, *dir);
            ensure(l.pos == p && u.pos == p && dir == *d2, "join and fork are not stacked")?;
            if a > c {
                Ok(v.splice(k, 2, vec![s1(p, f(c, a - c, dir)), s1(p + 1, j(a - c, b, dir))]))
            } else if a < c {
                Ok(v.splice(k, 2, vec![s1(p + 1, f(c - a, e, dir)), s1(p, j(a, c - a, dir))]))
            } else {
                Err("thin ranks agree; use SING_SADDLE".into())
            }
        }
        "reverse" => {
            let (Tile::Fork { r1: c, r2: e, dir, .. }, Tile::Join { r1: a, r2: b, dir: d2, .. }) = (&l.tile, &u.tile)
            else {
                return Err("needs a fork under a join".into());
            };
            let (a, b, c, e, dir) = (*a, *b, *c, *e, *dir);
            ensure(dir == *d2, "directions differ")?;
            if l.pos == p && u.pos == p + 1 && e == a {
                Ok(v.splice(k, 2, vec![s1(p, j(c + e, b, dir)), s1(p, f(c, e + b, dir))]))
            } else if l.pos == p + 1 && u.pos == p && c == b {
                Ok(v.splice(k, 2, vec![s1(p, j(a, c + e, dir)), s1(p, f(a + c, e, dir))]))
            } else {
                Err("fork and join do not share a thin strand".into())
            }
        }
        _ => Err(bad_mode(m)),
    }
}

fn vertex_assoc(v: &View, m: &Move) -> R<SlicedDiagram> {
    let (k, p) = (m.slice, m.pos);
    let ring = v.ring();
    let (l, u) = (v.one(k)?, v.one(k + 1)?);
    match (m.params.mode.as_str(), &l.tile, &u.tile) {
        (
            "join_left",
            Tile::Join { r1: a, r2: b, dir, iso: j1 },
            Tile::Join { r1: ab, r2: c, dir: d2, iso: j2 },
        ) if l.pos == p && u.pos == p && *ab == a + b && dir == d2 => {
            let (a, b, c, dir) = (*a, *b, *c, *dir);
            let iso = mul(j2, &dsum(j1, &id(ring, c))?)?;
            Ok(v.splice(
                k,
                2,
                vec![
                    s1(p + 1, Tile::Join { r1: b, r2: c, dir, iso: id(ring, b + c) }),
                    s1(p, Tile::Join { r1: a, r2: b + c, dir, iso }),
                ],
            ))
        }
        (
            "join_right",
            Tile::Join { r1: b, r2: c, dir, iso: k1 },
            Tile::Join { r1: a, r2: bc, dir: d2, iso: k2 },
        ) if l.pos == p + 1 && u.pos == p && *bc == b + c && dir == d2 => {
            let (a, b, c, dir) = (*a, *b, *c, *dir);
            let iso = mul(k2, &dsum(&id(ring, a), k1)?)?;
            Ok(v.splice(
                k,
                2,
                vec![
                    s1(p, Tile::Join { r1: a, r2: b, dir, iso: id(ring, a + b) }),
                    s1(p, Tile::Join { r1: a + b, r2: c, dir, iso }),
                ],
            ))
        }
        (
            "fork_left",
            Tile::Fork { r1: ab, r2: c, dir, iso: f2 },
            Tile::Fork { r1: a, r2: b, dir: d2, iso: f1 },
        ) if l.pos == p && u.pos == p && *ab == a + b && dir == d2 => {
            let (a, b, c, dir) = (*a, *b, *c, *dir);
            let iso = mul(f2, &dsum(f1, &id(ring, c))?)?;
            Ok(v.splice(
                k,
                2,
                vec![
                    s1(p, Tile::Fork { r1: a, r2: b + c, dir, iso }),
                    s1(p + 1, Tile::Fork { r1: b, r2: c, dir, iso: id(ring, b + c) }),
                ],
            ))
        }
        (
            "fork_right",
            Tile::Fork { r1: a, r2: bc, dir, iso: g2 },
            Tile::Fork { r1: b, r2: c, dir: d2, iso: g1 },
        ) if l.pos == p && u.pos == p + 1 && *bc == b + c && dir == d2 => {
            let (a, b, c, dir) = (*a, *b, *c, *dir);
            let iso = mul(g2, &dsum(&id(ring, a), g1)?)?;
            Ok(v.splice(
                k,
                2,
                vec![
                    s1(p, Tile::Fork { r1: a + b, r2: c, dir, iso }),
                    s1(p, Tile::Fork { r1: a, r2: b, dir, iso: id(ring, a + b) }),
                ],
            ))
        }
        ("join_left" | "join_right" | "fork_left" | "fork_right", _, _) => Err("no associativity pattern here".into()),
        _ => Err(bad_mode(m)),
    }
}

// ---------------------------------------------------------------- circles

/// A clockwise circle in standard form at insertion `y`: `cup_w`, an
/// optional upward gate on its left leg, `cap_w`. Returns (slices, rank,
/// monodromy).
pub(crate) fn cw_circle(d: &SlicedDiagram, k: usize, y: usize) -> Option<(usize, usize, Matrix)> {
    let cup = d.single(k)?;
    let Tile::CupW { rank } = cup.tile else { return None };
    if cup.pos != y {
        return None;
    }
    let next = d.single(k + 1)?;
    match &next.tile {
        Tile::CapW { rank: r } if *r == rank && next.pos == y => Some((2, rank, Matrix::identity(d.ring, rank))),
        Tile::Gate { rank: r, dir: Dir::Up, m } if *r == rank && next.pos == y => {
            let cap = d.single(k + 2)?;
            match cap.tile {
                Tile::CapW { rank: r } if r == rank && cap.pos == y => Some((3, rank, m.clone())),
                _ => None,
            }
        }
        _ => None,
    }
}

pub(crate) fn cw_slices(r: usize, y: usize, a: Option<Matrix>) -> Vec<Slice> {
    let mut out = vec![s1(y, Tile::CupW { rank: r })];
    if let Some(a) = a {
        out.push(s1(y, Tile::Gate { rank: r, dir: Dir::Up, m: a }));
    }
    out.push(s1(y, Tile::CapW { rank: r }));
    out
}

/// A circle of either chirality at insertion `y`, with at most one gate on
/// either leg. Returns the number of slices and the gate, if any.
fn tight_circle(d: &SlicedDiagram, k: usize, y: usize) -> Option<(usize, Option<&Tile>)> {
    let cup = d.single(k)?;
    if !cup.tile.is_cup() || cup.pos != y {
        return None;
    }
    let next = d.single(k + 1)?;
    if next.tile.is_cap() {
        return (next.pos == y).then_some((2, None));
    }
    if !matches!(next.tile, Tile::Gate { .. }) || (next.pos != y && next.pos != y + 1) {
        return None;
    }
    let cap = d.single(k + 2)?;
    (cap.tile.is_cap() && cap.pos == y).then_some((3, Some(&next.tile)))
}

fn circle_birth(v: &View, m: &Move) -> R<SlicedDiagram> {
    let (k, y) = (m.slice, m.pos);
    ensure(y <= v.state(k)?.len(), "insertion point out of range")?;
    let &[r] = m.params.ranks.as_slice() else { return Err("CIRCLE_BIRTH takes one rank".into()) };
    let left = match m.params.mode.as_str() {
        "cw" => Dir::Up,
        "ccw" => Dir::Down,
        _ => return Err(bad_mode(m)),
    };
    Ok(v.splice(k, 0, vec![s1(y, Tile::cup(r, left)), s1(y, Tile::cap(r, left))]))
}

fn circle_death(v: &View, m: &Move) -> R<SlicedDiagram> {
    let (n, gate) = tight_circle(v.d, m.slice, m.pos).ok_or("no tight circle here")?;
    if let Some(g) = gate {
        ensure(g.matrix().is_some_and(|x| x.is_identity()), "the circle carries a nontrivial monodromy")?;
    }
    Ok(v.splice(m.slice, n, vec![]))
}

fn saddle(v: &View, m: &Move) -> R<SlicedDiagram> {
    let (k, x) = (m.slice, m.pos);
    match m.params.mode.as_str() {
        "insert" => {
            let (s, t) = (v.strand(k, x)?, v.strand(k, x + 1)?);
            ensure(s.rank == t.rank && s.dir != t.dir, "needs two opposite strands of equal rank")?;
            Ok(v.splice(k, 0, vec![s1(x, Tile::cap(s.rank, s.dir)), s1(x, Tile::cup(s.rank, s.dir))]))
        }
        "remove" => {
            let (l, u) = (v.one(k)?, v.one(k + 1)?);
            let ok = l.pos == x
                && u.pos == x
                && matches!(
                    (&l.tile, &u.tile),
                    (Tile::CapW { rank: a }, Tile::CupW { rank: b }) | (Tile::CapE { rank: a }, Tile::CupE { rank: b }) if a == b
                );
            ensure(ok, "no cap followed by a matching cup")?;
            Ok(v.splice(k, 2, vec![]))
        }
        _ => Err(bad_mode(m)),
    }
}

fn circle_merge(v: &View, m: &Move) -> R<SlicedDiagram> {
    let (k, y) = (m.slice, m.pos);
    let (n1, r1, a) = cw_circle(v.d, k, y).ok_or("no clockwise circle here")?;
    let (n2, r2, b) = cw_circle(v.d, k + n1, y).ok_or("no second clockwise circle above")?;
    let g = dsum(&a, &b)?;
    Ok(v.splice(k, n1 + n2, cw_slices(r1 + r2, y, Some(g))))
}

fn circle_reverse(v: &View, m: &Move) -> R<SlicedDiagram> {
    let (k, y) = (m.slice, m.pos);
    match m.params.mode.as_str() {
        "to_ccw" => {
            let (n, r, a) = cw_circle(v.d, k, y).ok_or("no clockwise circle here")?;
            let mut s = vec![s1(y, Tile::CupE { rank: r })];
            if n == 3 {
                s.push(s1(y + 1, Tile::Gate { rank: r, dir: Dir::Up, m: a }));
            }
            s.push(s1(y, Tile::CapE { rank: r }));
            Ok(v.splice(k, n, s))
        }
        "to_cw" => {
            let cup = v.one(k)?;
            let Tile::CupE { rank: r } = cup.tile else { return Err("no counterclockwise circle here".into()) };
            ensure(cup.pos == y, "no counterclockwise circle here")?;
            let next = v.one(k + 1)?;
            let (n, a) = match &next.tile {
                Tile::CapE { rank } if *rank == r && next.pos == y => (2, None),
                Tile::Gate { rank, dir: Dir::Up, m: a } if *rank == r && next.pos == y + 1 => {
                    let cap = v.one(k + 2)?;
                    ensure(cap.tile == Tile::CapE { rank: r } && cap.pos == y, "circle is not closed by cap_e")?;
                    (3, Some(a.clone()))
                }
                _ => return Err("circle is not in standard form".into()),
            };
            Ok(v.splice(k, n, cw_slices(r, y, a)))
        }
        _ => Err(bad_mode(m)),
    }
}

fn across_edge(v: &View, m: &Move) -> R<SlicedDiagram> {
    let (k, y) = (m.slice, m.pos);
    let (n, _) = tight_circle(v.d, k, y).ok_or("no tight circle here")?;
    let ny = match m.params.mode.as_str() {
        "left" => y.checked_sub(1).ok_or("no strand on the left")?,
        "right" => {
            ensure(y < v.state(k)?.len(), "no strand on the right")?;
            y + 1
        }
        _ => return Err(bad_mode(m)),
    };
    let moved = v.slices(k, n)?
        .iter()
        .map(|s| {
            let p = &s.tiles[0];
            s1(p.pos + ny - y, p.tile.clone())
        })
        .collect();
    Ok(v.splice(k, n, moved))
}

/// Gate a vertex iso leaves behind on a split-off circle.
fn vertex_circle_gate(t: &Tile) -> R<(Matrix, usize)> {
    match t {
        Tile::Join { r1, r2, dir: Dir::Up, iso } | Tile::Fork { r1, r2, dir: Dir::Down, iso } => Ok((iso.clone(), r1 + r2)),
        Tile::Join { r1, r2, dir: Dir::Down, iso } | Tile::Fork { r1, r2, dir: Dir::Up, iso } => Ok((inv(iso)?, r1 + r2)),
        _ => Err("not a vertex".into()),
    }
}

fn with_iso(t: &Tile, m: Matrix) -> Tile {
    match t.clone() {
        Tile::Join { r1, r2, dir, .. } => Tile::Join { r1, r2, dir, iso: m },
        Tile::Fork { r1, r2, dir, .. } => Tile::Fork { r1, r2, dir, iso: m },
        other => other,
    }
}

fn split_monodromy(v: &View, m: &Move) -> R<SlicedDiagram> {
    let (k, x) = (m.slice, m.pos);
    let ring = v.ring();
    match m.params.mode.as_str() {
        "gate" => {
            let p = v.one(k)?;
            let Tile::Gate { rank, m: a, .. } = &p.tile else { return Err("no gate here".into()) };
            ensure(p.pos == x, "no gate here")?;
            Ok(v.splice(k, 1, cw_slices(*rank, x + 1, Some(a.clone()))))
        }
        "vertex" => {
            let p = v.one(k)?;
            ensure(p.tile.is_vertex() && p.pos == x, "no vertex here")?;
            let (g, r) = vertex_circle_gate(&p.tile)?;
            let mut new = cw_slices(r, x + p.tile.n_in(), Some(g));
            new.push(s1(x, with_iso(&p.tile, id(ring, r))));
            Ok(v.splice(k, 1, new))
        }
        "absorb_gate" => {
            let s = v.strand(k, x)?;
            let (n, r, a) = cw_circle(v.d, k, x + 1).ok_or("no clockwise circle right of the strand")?;
            ensure(r == s.rank, "circle and strand ranks differ")?;
            Ok(v.splice(k, n, vec![s1(x, Tile::Gate { rank: r, dir: s.dir, m: a })]))
        }
        "absorb_vertex" => {
            let found = [2, 3].into_iter().find_map(|n| {
                let p = v.d.single(k + n).filter(|p| p.tile.is_vertex() && p.pos == x)?;
                let c = cw_circle(v.d, k, x + p.tile.n_in()).filter(|c| c.0 == n)?;
                Some((p, c))
            });
            let (p, (n, r, a)) = found.ok_or("no clockwise circle beside the inputs of a vertex")?;
            ensure(p.tile.matrix().is_some_and(|i| i.is_identity()), "vertex iso is not the identity")?;
            let (_, vr) = vertex_circle_gate(&p.tile)?;
            ensure(vr == r, "circle rank differs from the thick rank")?;
            let iso = match p.tile {
                Tile::Join { dir: Dir::Up, .. } | Tile::Fork { dir: Dir::Down, .. } => a,
                _ => inv(&a)?,
            };
            Ok(v.splice(k, n + 1, vec![s1(x, with_iso(&p.tile, iso))]))
        }
        _ => Err(bad_mode(m)),
    }
}

// ---------------------------------------------------------------- crossings

pub(crate) fn kink_slices(s: Strand, x: usize, right: bool) -> Vec<Slice> {
    let r = s.rank;
    let c = Tile::Cross { r1: r, r2: r, dir: s.dir };
    if right {
        vec![s1(x + 1, Tile::cup(r, s.dir)), s1(x, c), s1(x + 1, Tile::cap(r, s.dir))]
    } else {
        let o = s.dir.flip();
        vec![s1(x, Tile::cup(r, o)), s1(x + 1, c), s1(x, Tile::cap(r, o))]
    }
}

/// The circle a kink trades for: rank `2r`, monodromy the block swap.
pub(crate) fn kink_circle(ring: RingSpec, r: usize, x: usize) -> Vec<Slice> {
    cw_slices(2 * r, x, Some(swap(ring, r, r)))
}

fn r1(v: &View, m: &Move) -> R<SlicedDiagram> {
    let (k, x) = (m.slice, m.pos);
    let ring = v.ring();
    let s = v.strand(k, x)?;
    match m.params.mode.as_str() {
        "insert_right" | "insert_left" => {
            let mut new = kink_circle(ring, s.rank, x);
            new.extend(kink_slices(s, x, m.params.mode == "insert_right"));
            Ok(v.splice(k, 0, new))
        }
        "remove" => {
            let got = v.slices(k, 3)?;
            ensure(
                got == kink_slices(s, x, true).as_slice() || got == kink_slices(s, x, false).as_slice(),
                "no kink on that strand",
            )?;
            Ok(v.splice(k, 3, kink_circle(ring, s.rank, x)))
        }
        _ => Err(bad_mode(m)),
    }
}

fn markov(v: &View, m: &Move) -> R<SlicedDiagram> {
    let s = v.strand(m.slice, m.pos)?;
    ensure(s.dir == Dir::Up, "stabilization acts on an upward strand")?;
    let mut new = kink_circle(v.ring(), s.rank, m.pos);
    new.extend(kink_slices(s, m.pos, true));
    Ok(v.splice(m.slice, 0, new))
}

fn r2a(v: &View, m: &Move) -> R<SlicedDiagram> {
    let (k, x) = (m.slice, m.pos);
    match m.params.mode.as_str() {
        "insert" => {
            let (s, t) = (v.strand(k, x)?, v.strand(k, x + 1)?);
            ensure(s.dir == t.dir, "strands point different ways")?;
            let (a, b, dir) = (s.rank, t.rank, s.dir);
            Ok(v.splice(k, 0, vec![s1(x, Tile::Cross { r1: a, r2: b, dir }), s1(x, Tile::Cross { r1: b, r2: a, dir })]))
        }
        "remove" => {
            let (l, u) = (v.one(k)?, v.one(k + 1)?);
            let ok = l.pos == x
                && u.pos == x
                && matches!((&l.tile, &u.tile), (Tile::Cross { r1: a, r2: b, dir }, Tile::Cross { r1: c, r2: e, dir: d2 }) if a == e && b == c && dir == d2);
            ensure(ok, "no pair of inverse crossings")?;
            Ok(v.splice(k, 2, vec![]))
        }
        _ => Err(bad_mode(m)),
    }
}

/// Mixed crossing taking `(↑a, ↓b)` at `x` to `(↓b, ↑a)`.
pub(crate) fn x_slices(a: usize, b: usize, x: usize) -> Vec<Slice> {
    vec![
        s1(x, Tile::CupE { rank: b }),
        s1(x + 1, Tile::Cross { r1: b, r2: a, dir: Dir::Up }),
        s1(x + 2, Tile::CapW { rank: b }),
    ]
}

/// Mixed crossing taking `(↓b, ↑a)` at `x` to `(↑a, ↓b)`.
pub(crate) fn y_slices(b: usize, a: usize, x: usize) -> Vec<Slice> {
    vec![
        s1(x + 2, Tile::CupW { rank: b }),
        s1(x + 1, Tile::Cross { r1: a, r2: b, dir: Dir::Up }),
        s1(x, Tile::CapE { rank: b }),
    ]
}

fn r2b_slices(s: Strand, t: Strand, x: usize) -> R<Vec<Slice>> {
    ensure(s.dir != t.dir, "R2B needs opposite strands")?;
    let mut out = vec![];
    if s.dir == Dir::Up {
        out.extend(x_slices(s.rank, t.rank, x));
        out.extend(y_slices(t.rank, s.rank, x));
    } else {
        out.extend(y_slices(s.rank, t.rank, x));
        out.extend(x_slices(t.rank, s.rank, x));
    }
    Ok(out)
}

fn r2b(v: &View, m: &Move) -> R<SlicedDiagram> {
    let (k, x) = (m.slice, m.pos);
    let (s, t) = (v.strand(k, x)?, v.strand(k, x + 1)?);
    let pat = r2b_slices(s, t, x)?;
    match m.params.mode.as_str() {
        "insert" => Ok(v.splice(k, 0, pat)),
        "remove" => {
            ensure(v.slices(k, 6)? == pat.as_slice(), "no mixed crossing pair here")?;
            Ok(v.splice(k, 6, vec![]))
        }
        _ => Err(bad_mode(m)),
    }
}

pub(crate) fn r3a_slices(a: usize, b: usize, c: usize, dir: Dir, x: usize, forward: bool) -> Vec<Slice> {
    let cr = |r1, r2| Tile::Cross { r1, r2, dir };
    if forward {
        vec![s1(x, cr(a, b)), s1(x + 1, cr(a, c)), s1(x, cr(b, c))]
    } else {
        vec![s1(x + 1, cr(b, c)), s1(x, cr(a, c)), s1(x + 1, cr(a, b))]
    }
}

fn r3a(v: &View, m: &Move) -> R<SlicedDiagram> {
    let (k, x) = (m.slice, m.pos);
    let st = v.state(k)?;
    ensure(x + 3 <= st.len(), "needs three strands")?;
    let (a, b, c) = (st[x], st[x + 1], st[x + 2]);
    ensure(a.dir == b.dir && b.dir == c.dir, "strands point different ways")?;
    let forward = match m.params.mode.as_str() {
        "forward" => true,
        "backward" => false,
        _ => return Err(bad_mode(m)),
    };
    let from = r3a_slices(a.rank, b.rank, c.rank, a.dir, x, forward);
    ensure(v.slices(k, 3)? == from.as_slice(), "no triangle of crossings here")?;
    Ok(v.splice(k, 3, r3a_slices(a.rank, b.rank, c.rank, a.dir, x, !forward)))
}

pub(crate) fn r3b_slices(a: usize, b: usize, c: usize, x: usize, forward: bool) -> Vec<Slice> {
    let mut out = vec![];
    if forward {
        out.extend(x_slices(a, b, x));
        out.push(s1(x + 1, Tile::Cross { r1: a, r2: c, dir: Dir::Up }));
        out.extend(y_slices(b, c, x));
    } else {
        out.extend(y_slices(b, c, x + 1));
        out.push(s1(x, Tile::Cross { r1: a, r2: c, dir: Dir::Up }));
        out.extend(x_slices(a, b, x + 1));
    }
    out
}

fn r3b(v: &View, m: &Move) -> R<SlicedDiagram> {
    let (k, x) = (m.slice, m.pos);
    let st = v.state(k)?;
    ensure(x + 3 <= st.len(), "needs three strands")?;
    let (a, b, c) = (st[x], st[x + 1], st[x + 2]);
    ensure(a.dir == Dir::Up && b.dir == Dir::Down && c.dir == Dir::Up, "needs strands (up, down, up)")?;
    let forward = match m.params.mode.as_str() {
        "forward" => true,
        "backward" => false,
        _ => return Err(bad_mode(m)),
    };
    let from = r3b_slices(a.rank, b.rank, c.rank, x, forward);
    ensure(v.slices(k, 7)? == from.as_slice(), "no mixed triangle here")?;
    Ok(v.splice(k, 7, r3b_slices(a.rank, b.rank, c.rank, x, !forward)))
}

fn r4(v: &View, m: &Move, dir: Dir) -> R<SlicedDiagram> {
    let (k, x) = (m.slice, m.pos);
    match m.params.mode.as_str() {
        "forward" => {
            let (l, u) = (v.one(k)?, v.one(k + 1)?);
            let (Tile::Cross { r1: c, r2: ab, dir: d1 }, Tile::Fork { r1: a, r2: b, dir: d2, iso }) = (&l.tile, &u.tile)
            else {
                return Err("needs a crossing under a fork".into());
            };
            ensure(*d1 == dir && *d2 == dir && *ab == a + b && l.pos == x && u.pos == x, "no crossing into a fork here")?;
            let (a, b, c) = (*a, *b, *c);
            Ok(v.splice(
                k,
                2,
                vec![
                    s1(x + 1, Tile::Fork { r1: a, r2: b, dir, iso: iso.clone() }),
                    s1(x, Tile::Cross { r1: c, r2: a, dir }),
                    s1(x + 1, Tile::Cross { r1: c, r2: b, dir }),
                ],
            ))
        }
        "backward" => {
            let (f, c1, c2) = (v.one(k)?, v.one(k + 1)?, v.one(k + 2)?);
            let Tile::Fork { r1: a, r2: b, dir: d1, iso } = &f.tile else { return Err("needs a fork first".into()) };
            let (a, b) = (*a, *b);
            let c = v.strand(k, x)?.rank;
            ensure(
                *d1 == dir
                    && f.pos == x + 1
                    && c1.pos == x
                    && c2.pos == x + 1
                    && c1.tile == Tile::Cross { r1: c, r2: a, dir }
                    && c2.tile == Tile::Cross { r1: c, r2: b, dir },
                "no fork passing under two crossings here",
            )?;
            Ok(v.splice(
                k,
                3,
                vec![
                    s1(x, Tile::Cross { r1: c, r2: a + b, dir }),
                    s1(x, Tile::Fork { r1: a, r2: b, dir, iso: iso.clone() }),
                ],
            ))
        }
        _ => Err(bad_mode(m)),
    }
}

// ---------------------------------------------------------------- enumeration

pub(crate) fn modes(id: MoveId) -> &'static [&'static str] {
    match id {
        MoveId::IsotopySlide => {
            &["combine", "drop", "fold", "fuse", "lift", "pad", "rotate", "strip", "swap", "unfold", "unfuse"]
        }
        MoveId::IsotopyZigzag => &["insert_left", "insert_right", "remove"],
        MoveId::SingSaddle | MoveId::Saddle | MoveId::R2A | MoveId::R2B => &["insert", "remove"],
        MoveId::VertexSlide => &["forward", "reverse"],
        MoveId::VertexAssoc => &["fork_left", "fork_right", "join_left", "join_right"],
        MoveId::CircleBirth => &["ccw", "cw"],
        MoveId::R1 => &["insert_left", "insert_right", "remove"],
        MoveId::R3A | MoveId::R3B | MoveId::R4A | MoveId::R4B => &["backward", "forward"],
        MoveId::SplitMonodromy => &["absorb_gate", "absorb_vertex", "gate", "vertex"],
        MoveId::CircleAcrossEdge => &["left", "right"],
        MoveId::CircleReverse => &["to_ccw", "to_cw"],
        MoveId::SingCap | MoveId::SingCup | MoveId::CircleDeath | MoveId::CircleMerge | MoveId::MarkovStab => &[""],
    }
}

/// Every applicable move with the given id, ordered by (slice, pos, mode).
pub(crate) fn enumerate_id(v: &View, id: MoveId, max_rank: usize) -> Vec<Move> {
    let width = v.states.iter().map(|s| s.len()).max().unwrap_or(0);
    let mut out = vec![];
    for k in 0..=v.d.slices.len() {
        for pos in 0..=width {
            for mode in modes(id) {
                let ranks: Vec<Vec<usize>> = match id {
                    MoveId::CircleBirth => (0..=max_rank).map(|r| vec![r]).collect(),
                    _ => vec![vec![]],
                };
                for rs in ranks {
                    let m = Move::new(id, k, pos, Params::mode(mode).with_ranks(&rs));
                    if apply_view(v, &m).and_then(finish).is_ok() {
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}

/// Every applicable move, ordered by (id, slice, pos, mode). Circle births
/// are offered for ranks `0..=max_rank`; other new structure uses identity
/// isos and the even split of a strand.
pub fn enumerate_moves_bounded(d: &SlicedDiagram, max_rank: usize) -> Vec<Move> {
    let Ok(v) = View::new(d) else { return vec![] };
    MoveId::ALL.iter().flat_map(|&id| enumerate_id(&v, id, max_rank)).collect()
}

/// Applicable moves of one kind.
pub fn enumerate_kind(d: &SlicedDiagram, id: MoveId) -> Vec<Move> {
    View::new(d).map(|v| enumerate_id(&v, id, DEFAULT_RANK_BOUND)).unwrap_or_default()
}

/// [`enumerate_moves_bounded`] with [`DEFAULT_RANK_BOUND`].
pub fn enumerate_moves(d: &SlicedDiagram) -> Vec<Move> {
    enumerate_moves_bounded(d, DEFAULT_RANK_BOUND)
}
