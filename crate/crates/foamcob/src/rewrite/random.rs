//! Seeded closed diagrams, and random closed diagrams paired with an
//! applicable move of a chosen kind.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::moves::{cw_slices, modes, r3a_slices, r3b_slices};
use super::{apply_move, enumerate_kind, Move, MoveId, Params};
use crate::diagram::{disjoint_union, reflect_reverse, Dir, Placed, Slice, SlicedDiagram, Strand, Tile};
use crate::exactalg::{Matrix, RingSpec};
use crate::foamcore::random::random_invertible;

/// Size limits for [`random_diagram`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub max_slices: usize,
    pub max_rank: usize,
    pub max_strands: usize,
}

impl Default for Bounds {
    fn default() -> Bounds {
        Bounds { max_slices: 15, max_rank: 3, max_strands: 6 }
    }
}

/// A valid closed diagram determined by `seed`, within `bounds`.
pub fn random_diagram(seed: u64, bounds: &Bounds, ring: RingSpec) -> SlicedDiagram {
    random_diagram_with(&mut ChaCha8Rng::seed_from_u64(seed), bounds, ring)
}

fn dir<R: Rng>(rng: &mut R) -> Dir {
    if rng.gen_bool(0.5) {
        Dir::Up
    } else {
        Dir::Down
    }
}

/// One random tile that fits `st`, or `None` if the pick does not fit.
fn random_tile<R: Rng>(rng: &mut R, st: &[Strand], b: &Bounds, ring: RingSpec) -> Option<Placed> {
    let n = st.len();
    let pair = |rng: &mut R| (n >= 2).then(|| rng.gen_range(0..n - 1));
    match rng.gen_range(0..100) {
        0..=21 if n + 2 <= b.max_strands => {
            let r = if rng.gen_bool(0.05) { 0 } else { rng.gen_range(1..=b.max_rank.max(1)).max(rng.gen_range(1..=b.max_rank.max(1))) };
            Some(Placed::new(rng.gen_range(0..=n), Tile::cup(r, dir(rng))))
        }
        22..=29 => {
            let i = pair(rng)?;
            let (s, t) = (st[i], st[i + 1]);
            (s.rank == t.rank && s.dir != t.dir).then(|| Placed::new(i, Tile::cap(s.rank, s.dir)))
        }
        30..=41 if n > 0 => {
            let i = rng.gen_range(0..n);
            let m = random_invertible(rng, ring, st[i].rank);
            Some(Placed::new(i, Tile::Gate { rank: st[i].rank, dir: st[i].dir, m }))
        }
        42..=61 => {
            let i = pair(rng)?;
            let (s, t) = (st[i], st[i + 1]);
            let ok = s.dir == t.dir && s.rank > 0 && t.rank > 0 && s.rank + t.rank <= b.max_rank;
            ok.then(|| {
                let iso = random_invertible(rng, ring, s.rank + t.rank);
                Placed::new(i, Tile::Join { r1: s.rank, r2: t.rank, dir: s.dir, iso })
            })
        }
        62..=79 if n > 0 && n < b.max_strands => {
            let i = rng.gen_range(0..n);
            let s = st[i];
            (s.rank >= 2).then(|| {
                let a = rng.gen_range(1..s.rank);
                let iso = random_invertible(rng, ring, s.rank);
                Placed::new(i, Tile::Fork { r1: a, r2: s.rank - a, dir: s.dir, iso })
            })
        }
        81..=93 => {
            let i = pair(rng)?;
            let (s, t) = (st[i], st[i + 1]);
            (s.dir == t.dir).then(|| Placed::new(i, Tile::Cross { r1: s.rank, r2: t.rank, dir: s.dir }))
        }
        94..=96 if n > 0 => {
            let i = rng.gen_range(0..n);
            Some(Placed::new(i, Tile::Id { rank: st[i].rank, dir: st[i].dir }))
        }
        _ => None,
    }
}

/// Tiles that close off `st`: caps on matching neighbours, joins on equal
/// directions, and a fork to make neighbouring ranks agree otherwise.
fn closing_tile(st: &[Strand], ring: RingSpec) -> Placed {
    for i in 0..st.len() - 1 {
        let (s, t) = (st[i], st[i + 1]);
        if s.rank == t.rank && s.dir != t.dir {
            return Placed::new(i, Tile::cap(s.rank, s.dir));
        }
    }
    for i in 0..st.len() - 1 {
        let (s, t) = (st[i], st[i + 1]);
        if s.dir == t.dir {
            let iso = Matrix::identity(ring, s.rank + t.rank);
            return Placed::new(i, Tile::Join { r1: s.rank, r2: t.rank, dir: s.dir, iso });
        }
    }
    let (s, t) = (st[0], st[1]);
    if s.rank > t.rank {
        let iso = Matrix::identity(ring, s.rank);
        Placed::new(0, Tile::Fork { r1: s.rank - t.rank, r2: t.rank, dir: s.dir, iso })
    } else {
        let iso = Matrix::identity(ring, t.rank);
        Placed::new(1, Tile::Fork { r1: s.rank, r2: t.rank - s.rank, dir: t.dir, iso })
    }
}

fn attempt<R: Rng>(rng: &mut R, b: &Bounds, ring: RingSpec) -> Option<SlicedDiagram> {
    let mut d = SlicedDiagram::new(ring);
    let mut st: Vec<Strand> = vec![];
    let budget = rng.gen_range(b.max_slices / 2..=b.max_slices.saturating_sub(2).max(b.max_slices / 2));
    while d.slices.len() < budget {
        if rng.gen_bool(0.03) {
            d.slices.push(Slice::default());
            continue;
        }
        if let Some(p) = random_tile(rng, &st, b, ring) {
            st = Slice::single(p.pos, p.tile.clone()).apply(&st).expect("tile fits");
            d.slices.push(Slice { tiles: vec![p] });
        }
    }
    while !st.is_empty() {
        if st.len() == 1 {
            return None;
        }
        let p = closing_tile(&st, ring);
        st = Slice::single(p.pos, p.tile.clone()).apply(&st).ok()?;
        d.slices.push(Slice { tiles: vec![p] });
        if d.slices.len() > 4 * b.max_slices + 8 {
            return None;
        }
    }
    if rng.gen_bool(0.5) {
        let k = rng.gen_range(0..d.slices.len().max(1));
        if let Some(c) = try_combine(&d, k) {
            d = c;
        }
    }
    (d.slices.len() <= b.max_slices).then_some(d)
}

fn try_combine(d: &SlicedDiagram, k: usize) -> Option<SlicedDiagram> {
    apply_move(d, &Move::new(MoveId::IsotopySlide, k, 0, Params::mode("combine")), false).ok()
}

/// [`random_diagram`] drawing from a caller-supplied generator.
pub fn random_diagram_with<R: Rng>(rng: &mut R, bounds: &Bounds, ring: RingSpec) -> SlicedDiagram {
    if bounds.max_slices < 2 || bounds.max_strands < 2 || bounds.max_rank == 0 {
        return SlicedDiagram::new(ring);
    }
    for _ in 0..1000 {
        if let Some(d) = attempt(rng, bounds, ring) {
            return d;
        }
    }
    SlicedDiagram::new(ring)
}

/// Closes an open diagram `p`: nested cups create its bottom, `p` runs
/// beside its mirror image, and nested caps end it. `p` keeps its slice
/// offsets shifted by the returned amount and its positions unchanged.
pub fn embed(p: &SlicedDiagram) -> (SlicedDiagram, usize) {
    let mut out = SlicedDiagram::new(p.ring);
    for (j, s) in p.bottom.iter().enumerate() {
        out.push(j, Tile::cup(s.rank, s.dir));
    }
    let pair = disjoint_union(p, &reflect_reverse(p).expect("valid pattern")).expect("same ring");
    out.slices.extend(pair.slices);
    let top = p.top().expect("valid pattern");
    for (j, s) in top.iter().enumerate().rev() {
        out.push(j, Tile::cap(s.rank, s.dir));
    }
    (out, p.bottom.len())
}

fn rank<R: Rng>(rng: &mut R) -> usize {
    if rng.gen_bool(0.1) {
        0
    } else {
        rng.gen_range(1..=2)
    }
}

fn pos_rank<R: Rng>(rng: &mut R) -> usize {
    rng.gen_range(1..=2)
}

struct Pattern {
    d: SlicedDiagram,
    m: Move,
}

fn open(ring: RingSpec, bottom: Vec<Strand>, slices: Vec<Slice>) -> SlicedDiagram {
    SlicedDiagram { ring, bottom, slices }
}

fn s1(pos: usize, tile: Tile) -> Slice {
    Slice::single(pos, tile)
}

fn strands<R: Rng>(rng: &mut R, n: usize) -> Vec<Strand> {
    (0..n).map(|_| Strand::new(rank(rng), dir(rng))).collect()
}

fn gate_on(rng: &mut impl Rng, ring: RingSpec, s: Strand, pos: usize) -> Slice {
    s1(pos, Tile::Gate { rank: s.rank, dir: s.dir, m: random_invertible(rng, ring, s.rank) })
}

fn mv(id: MoveId, slice: usize, pos: usize, mode: &str) -> Move {
    Move::new(id, slice, pos, Params::mode(mode))
}

/// An open diagram holding an instance of `id` in `mode`, with the move.
fn pattern<R: Rng>(rng: &mut R, ring: RingSpec, id: MoveId, mode: &str) -> Pattern {
    let inv = |rng: &mut R, n: usize| random_invertible(rng, ring, n);
    let id_m = |n: usize| Matrix::identity(ring, n);
    let here = |d: SlicedDiagram, slice: usize, pos: usize| Pattern { d, m: mv(id, slice, pos, mode) };
    let d0 = dir(rng);
    match (id, mode) {
        (MoveId::IsotopySlide, "lift" | "combine" | "strip" | "drop" | "pad" | "swap") => {
            let b = strands(rng, 3);
            let (g0, g2) = (gate_on(rng, ring, b[0], 0), gate_on(rng, ring, b[2], 2));
            match mode {
                "lift" => {
                    let both = Slice { tiles: vec![g0.tiles[0].clone(), g2.tiles[0].clone()] };
                    here(open(ring, b, vec![both]), 0, if rng.gen_bool(0.5) { 0 } else { 2 })
                }
                "combine" | "swap" => here(open(ring, b, vec![g0, g2]), 0, 0),
                "strip" => {
                    let idt = Placed::new(1, Tile::Id { rank: b[1].rank, dir: b[1].dir });
                    let mixed = Slice { tiles: vec![g0.tiles[0].clone(), idt] };
                    here(open(ring, b, vec![mixed]), 0, 0)
                }
                "drop" => {
                    let idt = Slice::single(1, Tile::Id { rank: b[1].rank, dir: b[1].dir });
                    here(open(ring, b, vec![idt, g2]), 0, 0)
                }
                _ => here(open(ring, b, vec![g0, g2]), 1, 0),
            }
        }
        (MoveId::IsotopySlide, "unfold") => {
            let (a, b) = (rank(rng), rank(rng));
            let bottom = vec![Strand::new(a, d0), Strand::new(b, d0)];
            here(open(ring, bottom, vec![s1(0, Tile::Cross { r1: a, r2: b, dir: d0 })]), 0, 0)
        }
        (MoveId::IsotopySlide, "fold") => {
            let p = pattern(rng, ring, id, "unfold");
            let d = apply_move(&p.d, &p.m, false).expect("unfold applies");
            here(d, 0, 0)
        }
        (MoveId::IsotopySlide, "fuse" | "unfuse") => {
            let st = Strand::new(rank(rng), d0);
            let (lo, hi) = (inv(rng, st.rank), inv(rng, st.rank));
            if mode == "fuse" {
                let g = |m: Matrix| s1(0, Tile::Gate { rank: st.rank, dir: st.dir, m });
                return here(open(ring, vec![st], vec![g(lo), g(hi)]), 0, 0);
            }
            let m = if d0 == Dir::Up { hi.mul(&lo) } else { lo.mul(&hi) }.expect("square");
            let g = s1(0, Tile::Gate { rank: st.rank, dir: st.dir, m });
            Pattern { d: open(ring, vec![st], vec![g]), m: Move::new(id, 0, 0, Params::mode(mode).with_matrices(vec![lo, hi])) }
        }
        (MoveId::IsotopySlide, _) => {
            let (a, b) = (rank(rng), rank(rng));
            let ab = a + b;
            let (u, w) = (d0, d0.flip());
            let iso = inv(rng, ab);
            // `u` is the flow of the legs; cap and cup chirality follow it.
            let (cap, cup) = match (u, rng.gen_bool(0.5)) {
                (Dir::Up, true) | (Dir::Down, false) => (Tile::CapW { rank: ab }, Tile::CupE { rank: ab }),
                _ => (Tile::CapE { rank: ab }, Tile::CupW { rank: ab }),
            };
            let west = matches!((&cap, u), (Tile::CapW { .. }, Dir::Up) | (Tile::CapE { .. }, Dir::Down));
            if rng.gen_bool(0.5) {
                let j = Tile::Join { r1: a, r2: b, dir: u, iso };
                if west {
                    let bottom = vec![Strand::new(a, u), Strand::new(b, u), Strand::new(ab, w)];
                    here(open(ring, bottom, vec![s1(0, j), s1(0, cap)]), 0, 0)
                } else {
                    let bottom = vec![Strand::new(ab, w), Strand::new(a, u), Strand::new(b, u)];
                    here(open(ring, bottom, vec![s1(1, j), s1(0, cap)]), 0, 1)
                }
            } else {
                let f = Tile::Fork { r1: a, r2: b, dir: w, iso };
                let east = matches!((&cup, w), (Tile::CupE { .. }, Dir::Down) | (Tile::CupW { .. }, Dir::Up));
                here(open(ring, vec![], vec![s1(0, cup), s1(if east { 0 } else { 1 }, f)]), 0, 0)
            }
        }
        (MoveId::IsotopyZigzag, "remove") => {
            let mode = if rng.gen_bool(0.5) { "insert_left" } else { "insert_right" };
            let p = pattern(rng, ring, id, mode);
            let d = apply_move(&p.d, &p.m, false).expect("zigzag inserts");
            here(d, 0, 0)
        }
        (MoveId::SingCap, _) => {
            let s = Strand::new(rank(rng), d0);
            let a = rng.gen_range(0..=s.rank);
            let m = Move::new(MoveId::SingCup, 0, 0, Params::default().with_ranks(&[a, s.rank - a]).with_matrices(vec![inv(rng, s.rank)]));
            let d = apply_move(&open(ring, vec![s], vec![]), &m, false).expect("bubble inserts");
            here(d, 0, 0)
        }
        (MoveId::SingCup, _) => {
            let s = Strand::new(rank(rng), d0);
            let a = rng.gen_range(0..=s.rank);
            let m = Move::new(id, 0, 0, Params::default().with_ranks(&[a, s.rank - a]).with_matrices(vec![inv(rng, s.rank)]));
            Pattern { d: open(ring, vec![s], vec![]), m }
        }
        (MoveId::SingSaddle, "insert") => {
            let b = vec![Strand::new(rank(rng), d0), Strand::new(rank(rng), d0)];
            let n = b[0].rank + b[1].rank;
            Pattern { d: open(ring, b, vec![]), m: Move::new(id, 0, 0, Params::mode("insert").with_matrices(vec![inv(rng, n)])) }
        }
        (MoveId::SingSaddle, _) => {
            let p = pattern(rng, ring, id, "insert");
            let d = apply_move(&p.d, &p.m, false).expect("saddle inserts");
            here(d, 0, 0)
        }
        (MoveId::VertexSlide, "forward") => {
            let (mut a, b) = (pos_rank(rng), pos_rank(rng));
            if a + b == 2 {
                a = 2;
            }
            let c = loop {
                let c = rng.gen_range(1..a + b);
                if c != a {
                    break c;
                }
            };
            let bottom = vec![Strand::new(a, d0), Strand::new(b, d0)];
            let j = Tile::Join { r1: a, r2: b, dir: d0, iso: id_m(a + b) };
            let f = Tile::Fork { r1: c, r2: a + b - c, dir: d0, iso: id_m(a + b) };
            here(open(ring, bottom, vec![s1(0, j), s1(0, f)]), 0, 0)
        }
        (MoveId::VertexSlide, _) => {
            let (x, m, y) = (pos_rank(rng), pos_rank(rng), pos_rank(rng));
            if rng.gen_bool(0.5) {
                let bottom = vec![Strand::new(x + m, d0), Strand::new(y, d0)];
                let f = Tile::Fork { r1: x, r2: m, dir: d0, iso: id_m(x + m) };
                let j = Tile::Join { r1: m, r2: y, dir: d0, iso: id_m(m + y) };
                here(open(ring, bottom, vec![s1(0, f), s1(1, j)]), 0, 0)
            } else {
                let bottom = vec![Strand::new(x, d0), Strand::new(m + y, d0)];
                let f = Tile::Fork { r1: m, r2: y, dir: d0, iso: id_m(m + y) };
                let j = Tile::Join { r1: x, r2: m, dir: d0, iso: id_m(x + m) };
                here(open(ring, bottom, vec![s1(1, f), s1(0, j)]), 0, 0)
            }
        }
        (MoveId::IsotopyZigzag, _) => here(open(ring, strands(rng, 1), vec![]), 0, 0),
        (MoveId::VertexAssoc, _) => {
            let (a, b, c) = (rank(rng), rank(rng), rank(rng));
            let j = |r1: usize, r2: usize, iso: Matrix| Tile::Join { r1, r2, dir: d0, iso };
            let f = |r1: usize, r2: usize, iso: Matrix| Tile::Fork { r1, r2, dir: d0, iso };
            let (m1, m2) = match mode {
                "join_left" => (inv(rng, a + b), inv(rng, a + b + c)),
                "join_right" => (inv(rng, b + c), inv(rng, a + b + c)),
                "fork_left" => (inv(rng, a + b + c), inv(rng, a + b)),
                _ => (inv(rng, a + b + c), inv(rng, b + c)),
            };
            let st = |rs: &[usize]| rs.iter().map(|&r| Strand::new(r, d0)).collect::<Vec<_>>();
            let (bottom, slices) = match mode {
                "join_left" => (st(&[a, b, c]), vec![s1(0, j(a, b, m1)), s1(0, j(a + b, c, m2))]),
                "join_right" => (st(&[a, b, c]), vec![s1(1, j(b, c, m1)), s1(0, j(a, b + c, m2))]),
                "fork_left" => (st(&[a + b + c]), vec![s1(0, f(a + b, c, m1)), s1(0, f(a, b, m2))]),
                _ => (st(&[a + b + c]), vec![s1(0, f(a, b + c, m1)), s1(1, f(b, c, m2))]),
            };
            here(open(ring, bottom, slices), 0, 0)
        }
        (MoveId::CircleBirth, _) => {
            let n = rng.gen_range(0..=2);
            let y = rng.gen_range(0..=n);
            let r = rank(rng);
            Pattern { d: open(ring, strands(rng, n), vec![]), m: Move::new(id, 0, y, Params::mode(mode).with_ranks(&[r])) }
        }
        (MoveId::CircleDeath, _) => {
            let n = rng.gen_range(0..=2);
            let y = rng.gen_range(0..=n);
            let (r, left) = (rank(rng), dir(rng));
            let mut c = vec![s1(y, Tile::cup(r, left))];
            match rng.gen_range(0..3) {
                0 => c.push(s1(y, Tile::Gate { rank: r, dir: left, m: id_m(r) })),
                1 => c.push(s1(y + 1, Tile::Gate { rank: r, dir: left.flip(), m: id_m(r) })),
                _ => {}
            }
            c.push(s1(y, Tile::cap(r, left)));
            here(open(ring, strands(rng, n), c), 0, y)
        }
        (MoveId::Saddle, "insert") => {
            let s = Strand::new(rank(rng), d0);
            here(open(ring, vec![s, Strand::new(s.rank, s.dir.flip())], vec![]), 0, 0)
        }
        (MoveId::R1 | MoveId::MarkovStab, "insert_left" | "insert_right" | "") => {
            let d = if id == MoveId::MarkovStab { Dir::Up } else { d0 };
            here(open(ring, vec![Strand::new(rank(rng), d)], vec![]), 0, 0)
        }
        (MoveId::R1, _) => {
            let mode = if rng.gen_bool(0.5) { "insert_left" } else { "insert_right" };
            let p = pattern(rng, ring, id, mode);
            here(apply_move(&p.d, &p.m, false).expect("kink inserts"), 3, 0)
        }
        (MoveId::R2A, "insert") => {
            here(open(ring, vec![Strand::new(rank(rng), d0), Strand::new(rank(rng), d0)], vec![]), 0, 0)
        }
        (MoveId::R2B, "insert") => {
            here(open(ring, vec![Strand::new(rank(rng), d0), Strand::new(rank(rng), d0.flip())], vec![]), 0, 0)
        }
        (MoveId::Saddle | MoveId::R2A | MoveId::R2B, _) => {
            let p = pattern(rng, ring, id, "insert");
            here(apply_move(&p.d, &p.m, false).expect("pattern inserts"), 0, 0)
        }
        (MoveId::R3A, _) => {
            let (a, b, c) = (rank(rng), rank(rng), rank(rng));
            let bottom = vec![Strand::new(a, d0), Strand::new(b, d0), Strand::new(c, d0)];
            here(open(ring, bottom, r3a_slices(a, b, c, d0, 0, mode == "forward")), 0, 0)
        }
        (MoveId::R3B, _) => {
            let (a, b, c) = (rank(rng), rank(rng), rank(rng));
            let bottom = vec![Strand::new(a, Dir::Up), Strand::new(b, Dir::Down), Strand::new(c, Dir::Up)];
            here(open(ring, bottom, r3b_slices(a, b, c, 0, mode == "forward")), 0, 0)
        }
        (MoveId::R4A | MoveId::R4B, _) => {
            let d = if id == MoveId::R4A { Dir::Up } else { Dir::Down };
            let (a, b, c) = (rank(rng), rank(rng), rank(rng));
            let bottom = vec![Strand::new(c, d), Strand::new(a + b, d)];
            let f = Tile::Fork { r1: a, r2: b, dir: d, iso: inv(rng, a + b) };
            let slices = if mode == "forward" {
                vec![s1(0, Tile::Cross { r1: c, r2: a + b, dir: d }), s1(0, f)]
            } else {
                vec![s1(1, f), s1(0, Tile::Cross { r1: c, r2: a, dir: d }), s1(1, Tile::Cross { r1: c, r2: b, dir: d })]
            };
            here(open(ring, bottom, slices), 0, 0)
        }
        (MoveId::SplitMonodromy, "gate") => {
            let s = strands(rng, 1);
            let g = gate_on(rng, ring, s[0], 0);
            here(open(ring, s, vec![g]), 0, 0)
        }
        (MoveId::SplitMonodromy, "vertex") => {
            let (a, b) = (rank(rng), rank(rng));
            if rng.gen_bool(0.5) {
                let bottom = vec![Strand::new(a, d0), Strand::new(b, d0)];
                here(open(ring, bottom, vec![s1(0, Tile::Join { r1: a, r2: b, dir: d0, iso: inv(rng, a + b) })]), 0, 0)
            } else {
                let bottom = vec![Strand::new(a + b, d0)];
                here(open(ring, bottom, vec![s1(0, Tile::Fork { r1: a, r2: b, dir: d0, iso: inv(rng, a + b) })]), 0, 0)
            }
        }
        (MoveId::SplitMonodromy, _) => {
            let p = pattern(rng, ring, id, if mode == "absorb_gate" { "gate" } else { "vertex" });
            here(apply_move(&p.d, &p.m, false).expect("split applies"), 0, 0)
        }
        (MoveId::CircleAcrossEdge, _) => {
            let y = if mode == "left" { 1 } else { 0 };
            let (r, left) = (rank(rng), dir(rng));
            let leg = rng.gen_range(0..2);
            let gd = if leg == 0 { left } else { left.flip() };
            let c = vec![
                s1(y, Tile::cup(r, left)),
                s1(y + leg, Tile::Gate { rank: r, dir: gd, m: inv(rng, r) }),
                s1(y, Tile::cap(r, left)),
            ];
            here(open(ring, strands(rng, 1), c), 0, y)
        }
        (MoveId::CircleMerge, _) => {
            let n = rng.gen_range(0..=2);
            let y = rng.gen_range(0..=n);
            let (r1, r2) = (rank(rng), rank(rng));
            let g1 = rng.gen_bool(0.8).then(|| inv(rng, r1));
            let g2 = rng.gen_bool(0.8).then(|| inv(rng, r2));
            let mut c = cw_slices(r1, y, g1);
            c.extend(cw_slices(r2, y, g2));
            here(open(ring, strands(rng, n), c), 0, y)
        }
        (MoveId::CircleReverse, _) => {
            let n = rng.gen_range(0..=2);
            let y = rng.gen_range(0..=n);
            let r = rank(rng);
            let g = rng.gen_bool(0.8).then(|| inv(rng, r));
            let c = if mode == "to_ccw" {
                cw_slices(r, y, g)
            } else {
                let mut c = vec![s1(y, Tile::CupE { rank: r })];
                if let Some(g) = g {
                    c.push(s1(y + 1, Tile::Gate { rank: r, dir: Dir::Up, m: g }));
                }
                c.push(s1(y, Tile::CapE { rank: r }));
                c
            };
            here(open(ring, strands(rng, n), c), 0, y)
        }
        (MoveId::MarkovStab, _) => unreachable!("handled with R1 insertion"),
    }
}

/// A random closed diagram together with an applicable move of kind `id`.
/// The pattern is closed off by [`embed`], then placed beside a random
/// closed context.
pub fn random_instance<R: Rng>(rng: &mut R, ring: RingSpec, id: MoveId) -> (SlicedDiagram, Move) {
    let mode = *modes(id).choose(rng).expect("every move has a mode");
    let mut p = pattern(rng, ring, id, mode);
    let noise = rng.gen_range(0..=2).min(p.d.bottom.len());
    for i in 0..noise {
        let g = gate_on(rng, ring, p.d.bottom[i], i);
        p.d.slices.insert(0, g);
        p.m.slice += 1;
    }
    let (closed, off) = embed(&p.d);
    let ctx = random_diagram_with(rng, &Bounds { max_slices: 8, max_rank: 2, max_strands: 4 }, ring);
    let mut m = p.m;
    let d = if rng.gen_bool(0.5) {
        m.slice += off + ctx.slices.len();
        disjoint_union(&ctx, &closed).expect("same ring")
    } else {
        m.slice += off;
        disjoint_union(&closed, &ctx).expect("same ring")
    };
    (d, m)
}

/// Picks a move of kind `id` from those applicable to `d`.
pub fn random_applicable<R: Rng>(rng: &mut R, d: &SlicedDiagram, id: MoveId) -> Option<Move> {
    enumerate_kind(d, id).choose(rng).cloned()
}
