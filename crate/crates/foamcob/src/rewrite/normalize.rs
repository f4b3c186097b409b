//! Reduction of a closed diagram to one clockwise circle.
//!
//! After a preparation pass every slice holds one tile and crossings are
//! unfolded into vertex pairs. The main loop then repeats, by priority:
//!
//! 1. move the lowest free gate onto a circle of its own, carry that circle
//!    to the bottom left and merge it into the accumulator circle there;
//! 2. cancel a merge sitting directly under a split on the same strand, or
//!    a split and a merge joined by a leg of rank zero;
//! 3. push one merge along its thick edge towards the split it feeds.
//!
//! Step 2 lowers (number of merges, total thick rank of merges) and step 3
//! lowers (turns, slices) along the pushed edge. Legs of rank zero break
//! this: a merge whose thick edge runs back into its own leg feeds no split.
//! For those the loop falls back on clearing turns, moving the end of the
//! leg onto a neighbouring strand, pushing the merge round its loop, and a
//! bounded beam search. When two loops with facing sides of opposite flow
//! are joined only by such a leg none of these apply and normalization
//! reports `NonTermination`. The remaining cups and caps are cleared by
//! zigzag removals and circle deaths.

use std::collections::HashSet;

use super::moves::{apply, cw_circle};
use super::{canonical_digest, Move, MoveCertificate, MoveId, Params, RewriteError, RewriteResult};
use crate::diagram::{validate_diagram, Dir, SlicedDiagram, Tile};
use crate::exactalg::Matrix;

/// Step budget before normalization gives up.
const MAX_STEPS: usize = 200_000;
/// Beam width and depth of the search that shortens rank-zero legs.
const BEAM: usize = 24;
const DEPTH: usize = 48;

#[derive(Clone, Debug)]
pub struct NormalizeOutput {
    /// Monodromy of the final circle; 0×0 when nothing is left.
    pub monodromy: Matrix,
    /// The final diagram: one clockwise circle, or empty.
    pub target: SlicedDiagram,
    pub cert: MoveCertificate,
}

struct Run {
    cur: SlicedDiagram,
    cert: MoveCertificate,
    steps: usize,
}

impl Run {
    fn go(&mut self, id: MoveId, slice: usize, pos: usize, mode: &str) -> RewriteResult<()> {
        self.steps += 1;
        if self.steps > MAX_STEPS {
            return Err(RewriteError::NonTermination(MAX_STEPS));
        }
        let next = self.cert.step(&self.cur, Move::new(id, slice, pos, Params::mode(mode)))?;
        self.cur = next;
        Ok(())
    }

    fn slide(&mut self, slice: usize, pos: usize, mode: &str) -> RewriteResult<()> {
        self.go(MoveId::IsotopySlide, slice, pos, mode)
    }

    fn tile(&self, k: usize) -> Option<(usize, &Tile)> {
        self.cur.single(k).map(|p| (p.pos, &p.tile))
    }

    fn has_acc(&self) -> bool {
        matches!(cw_circle(&self.cur, 0, 0), Some((3, _, _)))
    }

    fn prepare(&mut self) -> RewriteResult<()> {
        let mut k = 0;
        while k < self.cur.slices.len() {
            let s = &self.cur.slices[k];
            if s.tiles.iter().any(|p| matches!(p.tile, Tile::Id { .. })) {
                self.slide(k, 0, "strip")?;
            } else if s.tiles.len() >= 2 {
                let last = s.tiles.last().unwrap().pos;
                self.slide(k, last, "lift")?;
            } else {
                k += 1;
            }
        }
        for k in (0..self.cur.slices.len()).rev() {
            if self.cur.slices[k].tiles.is_empty() {
                self.slide(k, 0, "drop")?;
            }
        }
        let mut k = 0;
        while k < self.cur.slices.len() {
            if let Some((p, Tile::Cross { .. })) = self.tile(k) {
                self.slide(k, p, "unfold")?;
            }
            k += 1;
        }
        Ok(())
    }

    /// Extracts or transports the lowest gate outside the accumulator.
    fn gates(&mut self) -> RewriteResult<bool> {
        let acc = self.has_acc();
        let found = (0..self.cur.slices.len())
            .find(|&k| !(acc && k == 1) && matches!(self.tile(k), Some((_, Tile::Gate { .. }))));
        let Some(k) = found else { return Ok(false) };
        let (x, t) = self.tile(k).unwrap();
        let boxed = k >= 1 && matches!(cw_circle(&self.cur, k - 1, x), Some((3, _, _)));
        if !boxed {
            self.go(MoveId::SplitMonodromy, k, x, "gate")?;
            return Ok(true);
        }
        let (c, y) = (k - 1, x);
        if t.matrix().is_some_and(Matrix::is_identity) {
            self.go(MoveId::CircleDeath, c, y, "")?;
        } else if y > 0 {
            self.go(MoveId::CircleAcrossEdge, c, y, "left")?;
        } else if c > if acc { 3 } else { 0 } {
            for j in c - 1..c + 2 {
                let low = self.tile(j).map_or(0, |t| t.0);
                self.slide(j, low, "swap")?;
            }
        } else if acc {
            self.go(MoveId::CircleMerge, 0, 0, "")?;
        } else {
            return Ok(false);
        }
        Ok(true)
    }

    /// Cancels a vertex pair on one strand, extracting isos first.
    fn pairs(&mut self) -> RewriteResult<bool> {
        for k in 0..self.cur.slices.len().saturating_sub(1) {
            let (Some((p, lo)), Some((q, hi))) = (self.tile(k), self.tile(k + 1)) else { continue };
            let (lo, hi) = (lo.clone(), hi.clone());
            if p != q {
                // A fork feeding a join through a thin leg of rank zero.
                let Tile::Fork { r1: c, r2: e, dir, iso: f } = &lo else { continue };
                let Tile::Join { r1: a, r2: b, dir: d2, iso: j } = &hi else { continue };
                let at = if q == p + 1 && *e == 0 && *a == 0 {
                    p
                } else if p == q + 1 && *c == 0 && *b == 0 {
                    q
                } else {
                    continue;
                };
                if dir != d2 {
                    continue;
                } else if !f.is_identity() {
                    self.go(MoveId::SplitMonodromy, k, p, "vertex")?;
                } else if !j.is_identity() {
                    self.go(MoveId::SplitMonodromy, k + 1, q, "vertex")?;
                } else {
                    self.go(MoveId::VertexSlide, k, at, "reverse")?;
                }
                return Ok(true);
            }
            match (&lo, &hi) {
                (Tile::Join { r1, r2, dir, iso: j }, Tile::Fork { r1: c, dir: d2, iso: f, .. }) if dir == d2 => {
                    if !j.is_identity() {
                        self.go(MoveId::SplitMonodromy, k, p, "vertex")?;
                    } else if !f.is_identity() {
                        self.go(MoveId::SplitMonodromy, k + 1, p, "vertex")?;
                    } else if r1 == c {
                        self.go(MoveId::SingSaddle, k, p, "remove")?;
                    } else if *r1 + *r2 > 0 {
                        self.go(MoveId::VertexSlide, k, p, "forward")?;
                    } else {
                        continue;
                    }
                    return Ok(true);
                }
                (Tile::Fork { dir, iso: f, .. }, Tile::Join { dir: d2, iso: j, .. }) if dir == d2 => {
                    if f == j {
                        self.go(MoveId::SingCap, k, p, "")?;
                    } else if !f.is_identity() {
                        self.go(MoveId::SplitMonodromy, k, p, "vertex")?;
                    } else {
                        self.go(MoveId::SplitMonodromy, k + 1, p, "vertex")?;
                    }
                    return Ok(true);
                }
                _ => {}
            }
        }
        Ok(false)
    }

    fn walk(&self, b: usize, i: usize, up: bool) -> Option<(usize, bool)> {
        walk(&self.cur, b, i, up).map(|(s, below, _)| (s, below))
    }

    /// Start of the thick edge leaving a merge at slice `k`.
    fn merge_start(&self, k: usize) -> Option<(usize, usize, bool)> {
        match self.tile(k)? {
            (p, Tile::Join { dir: Dir::Up, .. }) => Some((k + 1, p, true)),
            (p, Tile::Fork { dir: Dir::Down, .. }) => Some((k, p, false)),
            _ => None,
        }
    }

    fn feeds_split(&self, k: usize) -> bool {
        let Some((b, i, up)) = self.merge_start(k) else { return false };
        match self.walk(b, i, up) {
            Some((s, true)) => matches!(self.tile(s), Some((_, Tile::Fork { dir: Dir::Up, .. }))),
            Some((s, false)) => matches!(self.tile(s), Some((_, Tile::Join { dir: Dir::Down, .. }))),
            None => false,
        }
    }

    /// One push of the merge at `k`. Returns its new slice, or `None` when
    /// the push met something other than a free tile or a turn.
    fn push(&mut self, k: usize) -> RewriteResult<Option<usize>> {
        let Some((m, next)) = push_move(&self.cur, k) else { return Ok(None) };
        self.replay(vec![m])?;
        Ok(Some(next))
    }

    fn replay(&mut self, path: Vec<Move>) -> RewriteResult<()> {
        for m in path {
            self.steps += 1;
            if self.steps > MAX_STEPS {
                return Err(RewriteError::NonTermination(MAX_STEPS));
            }
            self.cur = self.cert.step(&self.cur, m)?;
        }
        Ok(())
    }

    /// Brings the two ends of a leg of rank zero together when no merge
    /// feeds a split: first by clearing turns, then by pushing a merge
    /// round its own loop, then by a beam search over local isotopies.
    fn untangle(&mut self) -> RewriteResult<bool> {
        if stick(&self.cur) == usize::MAX {
            return Ok(false);
        }
        let found = tidy(&self.cur)
            .map(|(_, path)| path)
            .or_else(|| hop(&self.cur))
            .or_else(|| circulate(&self.cur))
            .or_else(|| beam(&self.cur));
        let Some(path) = found else { return Ok(false) };
        self.replay(path)?;
        Ok(true)
    }

    /// Removes the lowest cap outside the accumulator together with the
    /// cup below it.
    fn loops(&mut self) -> RewriteResult<bool> {
        let from = if self.has_acc() { 3 } else { 0 };
        let found = (from..self.cur.slices.len()).find(|&k| matches!(self.tile(k), Some((_, t)) if t.is_cap()));
        let Some(mut k) = found else { return Ok(false) };
        loop {
            let (q, _) = self.tile(k).unwrap();
            let (a, t) = self.tile(k - 1).expect("a cap has a cup below it");
            if !t.is_cup() {
                return Err(RewriteError::NonTermination(self.steps));
            }
            if a == q {
                return self.go(MoveId::CircleDeath, k - 1, q, "").map(|_| true);
            } else if a == q + 1 {
                return self.go(MoveId::IsotopyZigzag, k - 1, q, "remove").map(|_| true);
            } else if a + 1 == q {
                return self.go(MoveId::IsotopyZigzag, k - 1, a, "remove").map(|_| true);
            }
            self.slide(k - 1, a, "swap")?;
            k -= 1;
        }
    }
}

/// The push of the merge at `k` and the merge's slice afterwards.
fn push_move(d: &SlicedDiagram, k: usize) -> Option<(Move, usize)> {
    let slide = |k, p, mode| Move::new(MoveId::IsotopySlide, k, p, Params::mode(mode));
    let (p, m) = tile(d, k)?;
    if matches!(m, Tile::Join { .. }) {
        let (b, t) = tile(d, k + 1)?;
        match t {
            Tile::CapW { .. } if b == p => Some((slide(k, p, "rotate"), k)),
            Tile::CapE { .. } if b + 1 == p => Some((slide(k, p, "rotate"), k)),
            _ if b <= p && p < b + t.n_in() => None,
            _ => Some((slide(k, p, "swap"), k + 1)),
        }
    } else {
        let j = k.checked_sub(1)?;
        let (a, t) = tile(d, j)?;
        match t {
            Tile::CupE { .. } if a == p => Some((slide(j, a, "rotate"), k + 1)),
            Tile::CupW { .. } if a + 1 == p => Some((slide(j, a, "rotate"), k + 1)),
            _ if a <= p && p < a + t.n_out() => None,
            _ => Some((slide(j, a, "swap"), j)),
        }
    }
}

/// Completes `path`, which led to `d`, when the main loop can go on from
/// there.
fn goal(d: &SlicedDiagram, mut path: Vec<Move>) -> Option<Vec<Move>> {
    if progress(d) {
        return Some(path);
    }
    path.extend(hop(d)?);
    Some(path)
}

/// Moves the end of a leg of rank zero onto a neighbouring strand: a
/// saddle of vertices is inserted beside the leg and its near vertex
/// cancels against the old end. Accepted when a merge then feeds a split
/// or a vertex is gone.
fn hop(d: &SlicedDiagram) -> Option<Vec<Move>> {
    let vertices = |d: &SlicedDiagram| d.slices.iter().filter(|s| s.tiles.iter().any(|p| p.tile.is_vertex())).count();
    let before = vertices(d);
    for k in first_free(d)..d.slices.len() {
        let (b, p, r1, r2) = match tile(d, k) {
            Some((p, Tile::Fork { r1, r2, .. })) => (k + 1, p, *r1, *r2),
            Some((p, Tile::Join { r1, r2, .. })) => (k, p, *r1, *r2),
            _ => continue,
        };
        let mut at = vec![];
        if r1 == 0 && p > 0 {
            at.push(p - 1);
        }
        if r2 == 0 {
            at.push(p + 1);
        }
        for x in at {
            let m = Move::new(MoveId::SingSaddle, b, x, Params::mode("insert"));
            let Ok(e) = apply(d, &m) else { continue };
            let mut probe = Run { cur: e.clone(), cert: MoveCertificate::new(&e), steps: 0 };
            for _ in 0..16 {
                if !probe.pairs().unwrap_or(false) {
                    break;
                }
            }
            let feeds = (0..probe.cur.slices.len()).any(|k| probe.feeds_split(k));
            if feeds || vertices(&probe.cur) < before {
                let mut path = vec![m];
                path.extend(probe.cert.steps.into_iter().map(|s| s.mv));
                return Some(path);
            }
        }
    }
    None
}

/// Some step of the main loop applies to `d`.
fn progress(d: &SlicedDiagram) -> bool {
    let mut probe = Run { cur: d.clone(), cert: MoveCertificate::new(&SlicedDiagram::new(d.ring)), steps: 0 };
    (0..d.slices.len()).any(|k| probe.feeds_split(k)) || probe.pairs().unwrap_or(false)
}

fn first_free(d: &SlicedDiagram) -> usize {
    if matches!(cw_circle(d, 0, 0), Some((3, _, _))) {
        3
    } else {
        0
    }
}

/// Slides one cap down, or one cup up, through tiles it does not touch
/// until it meets its partner, and removes the pair.
fn tidy(d: &SlicedDiagram) -> Option<(SlicedDiagram, Vec<Move>)> {
    let from = first_free(d);
    let death = |k, x| Move::new(MoveId::CircleDeath, k, x, Params::default());
    let zigzag = |k, x| Move::new(MoveId::IsotopyZigzag, k, x, Params::mode("remove"));
    let swap = |k, x| Move::new(MoveId::IsotopySlide, k, x, Params::mode("swap"));
    for start in from..d.slices.len() {
        let Some((_, t)) = tile(d, start) else { continue };
        let down = t.is_cap();
        if !down && !t.is_cup() {
            continue;
        }
        let (mut e, mut k, mut path) = (d.clone(), start, vec![]);
        loop {
            // `lo` is the cup side, `hi` the cap side of the next step.
            let (lo, hi) = if down { (k.checked_sub(1), k) } else { (Some(k), k + 1) };
            let Some(lo) = lo.filter(|&j| j >= from) else { break };
            let (Some((a, t)), Some((q, u))) = (tile(&e, lo), tile(&e, hi)) else { break };
            let pair = t.is_cup() && u.is_cap();
            let m = if pair && a == q {
                death(lo, q)
            } else if pair && a == q + 1 {
                zigzag(lo, q)
            } else if pair && a + 1 == q {
                zigzag(lo, a)
            } else {
                swap(lo, a)
            };
            let done = m.id != MoveId::IsotopySlide;
            let Ok(next) = apply(&e, &m) else { break };
            path.push(m);
            e = next;
            if done {
                return Some((e, path));
            }
            k = if down { k - 1 } else { k + 1 };
        }
    }
    None
}

/// Tidies `d` until nothing more can be removed.
fn tidy_all(mut d: SlicedDiagram, mut path: Vec<Move>) -> (SlicedDiagram, Vec<Move>) {
    while let Some((e, more)) = tidy(&d) {
        d = e;
        path.extend(more);
    }
    (d, path)
}

/// Pushes some merge with a leg of rank zero along its own loop, tidying
/// after every push, until the main loop can continue.
fn circulate(d: &SlicedDiagram) -> Option<Vec<Move>> {
    let merges = (0..d.slices.len()).filter(|&k| {
        matches!(tile(d, k), Some((_, Tile::Join { r1, r2, dir: Dir::Up, .. } | Tile::Fork { r1, r2, dir: Dir::Down, .. })) if *r1 == 0 || *r2 == 0)
    });
    for start in merges.collect::<Vec<_>>() {
        let (mut e, mut k, mut path) = (d.clone(), start, vec![]);
        for _ in 0..4 * (d.slices.len() + 2) {
            let Some((m, next)) = push_move(&e, k) else { break };
            let Ok(f) = apply(&e, &m) else { break };
            path.push(m);
            (e, k) = (f, next);
            let (t, p) = tidy_all(e.clone(), path.clone());
            if let Some(p) = goal(&t, p) {
                return Some(p);
            }
        }
    }
    None
}

/// Beam search over local isotopies, guided by the shortest leg of rank
/// zero.
fn beam(d: &SlicedDiagram) -> Option<Vec<Move>> {
    let mut seen = HashSet::from([canonical_digest(d)]);
    let mut beam = vec![(d.clone(), Vec::<Move>::new())];
    for _ in 0..DEPTH {
        let mut next = vec![];
        for (d, path) in &beam {
            for m in candidates(d) {
                let Ok(e) = apply(d, &m) else { continue };
                if !seen.insert(canonical_digest(&e)) {
                    continue;
                }
                let mut path = path.clone();
                path.push(m);
                let (e, path) = tidy_all(e, path);
                if let Some(path) = goal(&e, path.clone()) {
                    return Some(path);
                }
                next.push((stick(&e), e, path));
            }
        }
        if next.is_empty() {
            break;
        }
        next.sort_by_key(|(phi, d, path)| (*phi, d.slices.len(), path.len()));
        next.truncate(BEAM);
        beam = next.into_iter().map(|(_, d, path)| (d, path)).collect();
    }
    None
}

/// Length of the shortest leg of rank zero running into a merge.
fn stick(d: &SlicedDiagram) -> usize {
    let mut best = usize::MAX;
    for k in 0..d.slices.len() {
        let ends = match tile(d, k) {
            Some((p, Tile::Join { r1, r2, dir: Dir::Up, .. })) => [(*r1, k, p, false), (*r2, k, p + 1, false)],
            Some((p, Tile::Fork { r1, r2, dir: Dir::Down, .. })) => [(*r1, k + 1, p, true), (*r2, k + 1, p + 1, true)],
            _ => continue,
        };
        for (r, b, i, up) in ends {
            if r == 0 {
                if let Some((s, _, steps)) = walk(d, b, i, up) {
                    if tile(d, s).is_some_and(|(_, t)| t.is_vertex()) {
                        best = best.min(steps);
                    }
                }
            }
        }
    }
    best
}

/// Swaps, rotations and removals of turns at every slice above the
/// accumulator.
fn candidates(d: &SlicedDiagram) -> Vec<Move> {
    let from = first_free(d);
    let mut out = vec![];
    let slide = |k, p, mode| Move::new(MoveId::IsotopySlide, k, p, Params::mode(mode));
    for k in from..d.slices.len() {
        let Some((p, t)) = tile(d, k) else { continue };
        if k + 1 < d.slices.len() {
            out.push(slide(k, p, "swap"));
        }
        out.push(slide(k, p, "rotate"));
        if t.is_cup() {
            out.push(Move::new(MoveId::CircleDeath, k, p, Params::default()));
            out.push(Move::new(MoveId::IsotopyZigzag, k, p, Params::mode("remove")));
            if p > 0 {
                out.push(Move::new(MoveId::IsotopyZigzag, k, p - 1, Params::mode("remove")));
            }
        }
    }
    out
}

fn tile(d: &SlicedDiagram, k: usize) -> Option<(usize, &Tile)> {
    d.single(k).map(|p| (p.pos, &p.tile))
}

/// Follows a strand from boundary `b`, index `i`, until it enters a tile
/// that is not a cup or cap. Returns that slice, whether the strand entered
/// from below, and the number of slices and turns passed on the way.
fn walk(d: &SlicedDiagram, mut b: usize, mut i: usize, mut up: bool) -> Option<(usize, bool, usize)> {
    let n = d.slices.len();
    for steps in 0..4 * (n + 1) * (n + 1) {
        if up {
            let (p, t) = tile(d, b)?;
            if i >= p && i < p + t.n_in() {
                if !t.is_cap() {
                    return Some((b, true, steps));
                }
                i = p + (1 - (i - p));
                up = false;
            } else {
                if p + t.n_in() <= i {
                    i = i + t.n_out() - t.n_in();
                }
                b += 1;
            }
        } else {
            let (p, t) = tile(d, b.checked_sub(1)?)?;
            if i >= p && i < p + t.n_out() {
                if !t.is_cup() {
                    return Some((b - 1, false, steps));
                }
                i = p + (1 - (i - p));
                up = true;
            } else {
                if p + t.n_out() <= i {
                    i = i + t.n_in() - t.n_out();
                }
                b -= 1;
            }
        }
    }
    None
}

/// Reduces a closed diagram to a single clockwise circle whose monodromy
/// has the diagram's invariant as determinant.
pub fn normalize(d: &SlicedDiagram) -> RewriteResult<NormalizeOutput> {
    if let Some(e) = validate_diagram(d).into_iter().next() {
        return Err(RewriteError::PreconditionFailed { mv: "normalize".into(), reason: e.to_string() });
    }
    if !d.is_closed() {
        return Err(RewriteError::PreconditionFailed { mv: "normalize".into(), reason: "diagram is not closed".into() });
    }
    let mut run = Run { cur: d.clone(), cert: MoveCertificate::new(d), steps: 0 };
    run.prepare()?;
    let mut tracked: Option<usize> = None;
    loop {
        if run.gates()? || run.pairs()? {
            tracked = None;
            continue;
        }
        let k = match tracked.filter(|&k| run.merge_start(k).is_some()) {
            Some(k) => k,
            None => match (0..run.cur.slices.len()).find(|&k| run.feeds_split(k)) {
                Some(k) => k,
                None if run.untangle()? => continue,
                None => break,
            },
        };
        tracked = run.push(k)?;
        if tracked.is_none() {
            return Err(RewriteError::NonTermination(run.steps));
        }
    }
    if run.cur.slices.iter().any(|s| s.tiles.iter().any(|p| p.tile.is_vertex())) {
        return Err(RewriteError::NonTermination(run.steps));
    }
    while run.loops()? {}
    let monodromy = match cw_circle(&run.cur, 0, 0) {
        Some((_, _, m)) if run.cur.slices.len() <= 3 => m,
        _ if run.cur.slices.is_empty() => Matrix::identity(d.ring, 0),
        _ => return Err(RewriteError::NonTermination(run.steps)),
    };
    Ok(NormalizeOutput { monodromy, target: run.cur, cert: run.cert })
}
