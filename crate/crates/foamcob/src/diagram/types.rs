use std::fmt;

use crate::exactalg::{Matrix, RingSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    Up,
    Down,
}

impl Dir {
    pub fn flip(self) -> Dir {
        match self {
            Dir::Up => Dir::Down,
            Dir::Down => Dir::Up,
        }
    }

    pub fn letter(self) -> &'static str {
        match self {
            Dir::Up => "u",
            Dir::Down => "v",
        }
    }

    pub fn from_letter(s: &str) -> Option<Dir> {
        match s {
            "u" => Some(Dir::Up),
            "v" => Some(Dir::Down),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Strand {
    pub rank: usize,
    pub dir: Dir,
}

impl Strand {
    pub fn new(rank: usize, dir: Dir) -> Strand {
        Strand { rank, dir }
    }
}

impl fmt::Display for Strand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.rank, self.dir.letter())
    }
}

/// One elementary piece. Cups and caps are named so that `cup_w` followed by
/// `cap_w` is a clockwise circle: `cup_w` makes `(Up, Down)` and `cap_w`
/// consumes `(Up, Down)`; the `e` variants use `(Down, Up)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tile {
    Id { rank: usize, dir: Dir },
    /// `m` is the transport along the flow direction.
    Gate { rank: usize, dir: Dir, m: Matrix },
    CupE { rank: usize },
    CupW { rank: usize },
    CapE { rank: usize },
    CapW { rank: usize },
    /// Two strands into one; `iso` maps `R^{r1} ⊕ R^{r2}` (left first) onto
    /// the thick strand.
    Join { r1: usize, r2: usize, dir: Dir, iso: Matrix },
    /// One strand into two; same iso convention as `Join`.
    Fork { r1: usize, r2: usize, dir: Dir, iso: Matrix },
    /// Macro for a join with identity iso and a fork with the block swap.
    Cross { r1: usize, r2: usize, dir: Dir },
}

impl Tile {
    pub fn name(&self) -> &'static str {
        match self {
            Tile::Id { .. } => "id",
            Tile::Gate { .. } => "gate",
            Tile::CupE { .. } => "cup_e",
            Tile::CupW { .. } => "cup_w",
            Tile::CapE { .. } => "cap_e",
            Tile::CapW { .. } => "cap_w",
            Tile::Join { .. } => "join",
            Tile::Fork { .. } => "fork",
            Tile::Cross { .. } => "cross",
        }
    }

    pub fn inputs(&self) -> Vec<Strand> {
        use Dir::*;
        let s = Strand::new;
        match *self {
            Tile::Id { rank, dir } | Tile::Gate { rank, dir, .. } => vec![s(rank, dir)],
            Tile::CupE { .. } | Tile::CupW { .. } => vec![],
            Tile::CapW { rank } => vec![s(rank, Up), s(rank, Down)],
            Tile::CapE { rank } => vec![s(rank, Down), s(rank, Up)],
            Tile::Join { r1, r2, dir, .. } | Tile::Cross { r1, r2, dir } => vec![s(r1, dir), s(r2, dir)],
            Tile::Fork { r1, r2, dir, .. } => vec![s(r1 + r2, dir)],
        }
    }

    pub fn outputs(&self) -> Vec<Strand> {
        use Dir::*;
        let s = Strand::new;
        match *self {
            Tile::Id { rank, dir } | Tile::Gate { rank, dir, .. } => vec![s(rank, dir)],
            Tile::CapE { .. } | Tile::CapW { .. } => vec![],
            Tile::CupW { rank } => vec![s(rank, Up), s(rank, Down)],
            Tile::CupE { rank } => vec![s(rank, Down), s(rank, Up)],
            Tile::Join { r1, r2, dir, .. } => vec![s(r1 + r2, dir)],
            Tile::Fork { r1, r2, dir, .. } => vec![s(r1, dir), s(r2, dir)],
            Tile::Cross { r1, r2, dir } => vec![s(r2, dir), s(r1, dir)],
        }
    }

    pub fn n_in(&self) -> usize {
        match self {
            Tile::CupE { .. } | Tile::CupW { .. } => 0,
            Tile::Id { .. } | Tile::Gate { .. } | Tile::Fork { .. } => 1,
            _ => 2,
        }
    }

    pub fn n_out(&self) -> usize {
        match self {
            Tile::CapE { .. } | Tile::CapW { .. } => 0,
            Tile::Id { .. } | Tile::Gate { .. } | Tile::Join { .. } => 1,
            _ => 2,
        }
    }

    pub fn is_cup(&self) -> bool {
        matches!(self, Tile::CupE { .. } | Tile::CupW { .. })
    }

    pub fn is_cap(&self) -> bool {
        matches!(self, Tile::CapE { .. } | Tile::CapW { .. })
    }

    pub fn is_vertex(&self) -> bool {
        matches!(self, Tile::Join { .. } | Tile::Fork { .. })
    }

    /// The matrix carried by a gate or vertex, if any.
    pub fn matrix(&self) -> Option<&Matrix> {
        match self {
            Tile::Gate { m, .. } => Some(m),
            Tile::Join { iso, .. } | Tile::Fork { iso, .. } => Some(iso),
            _ => None,
        }
    }

    pub fn cup(rank: usize, left: Dir) -> Tile {
        match left {
            Dir::Up => Tile::CupW { rank },
            Dir::Down => Tile::CupE { rank },
        }
    }

    pub fn cap(rank: usize, left: Dir) -> Tile {
        match left {
            Dir::Up => Tile::CapW { rank },
            Dir::Down => Tile::CapE { rank },
        }
    }
}

/// A tile at `pos`, the 0-based index of its leftmost input strand. A cup's
/// `pos` is the index it is inserted before.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Placed {
    pub pos: usize,
    pub tile: Tile,
}

impl Placed {
    pub fn new(pos: usize, tile: Tile) -> Placed {
        Placed { pos, tile }
    }
}

/// Tiles of one slice, ordered by strictly increasing `pos` and not
/// overlapping. Strands no tile consumes continue as identities.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Slice {
    pub tiles: Vec<Placed>,
}

impl Slice {
    pub fn single(pos: usize, tile: Tile) -> Slice {
        Slice { tiles: vec![Placed::new(pos, tile)] }
    }

    /// True when every tile is an identity.
    pub fn is_trivial(&self) -> bool {
        self.tiles.iter().all(|t| matches!(t.tile, Tile::Id { .. }))
    }

    /// Applies the slice to a state, or describes the mismatch.
    pub fn apply(&self, state: &[Strand]) -> Result<Vec<Strand>, String> {
        let mut out = vec![];
        let mut i = 0;
        let mut prev: Option<usize> = None;
        for pl in &self.tiles {
            if let Some(p) = prev {
                if pl.pos <= p {
                    return Err(format!("tile positions must increase ({} after {})", pl.pos + 1, p + 1));
                }
            }
            prev = Some(pl.pos);
            if pl.pos < i {
                return Err(format!("{} at {} overlaps the previous tile", pl.tile.name(), pl.pos + 1));
            }
            if pl.pos > state.len() || (pl.tile.n_in() > 0 && pl.pos + pl.tile.n_in() > state.len()) {
                return Err(format!("{} at {} runs past the {} strands", pl.tile.name(), pl.pos + 1, state.len()));
            }
            out.extend_from_slice(&state[i..pl.pos]);
            let ins = pl.tile.inputs();
            let got = &state[pl.pos..pl.pos + ins.len()];
            if got != ins.as_slice() {
                let fmt = |v: &[Strand]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", ");
                return Err(format!(
                    "{} at {} expects [{}] but finds [{}]",
                    pl.tile.name(),
                    pl.pos + 1,
                    fmt(&ins),
                    fmt(got)
                ));
            }
            out.extend(pl.tile.outputs());
            i = pl.pos + ins.len();
        }
        out.extend_from_slice(&state[i..]);
        Ok(out)
    }
}

/// A planar foam as a bottom-to-top sequence of slices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlicedDiagram {
    pub ring: RingSpec,
    pub bottom: Vec<Strand>,
    pub slices: Vec<Slice>,
}

impl SlicedDiagram {
    pub fn new(ring: RingSpec) -> SlicedDiagram {
        SlicedDiagram { ring, bottom: vec![], slices: vec![] }
    }

    pub fn push(&mut self, pos: usize, tile: Tile) {
        self.slices.push(Slice::single(pos, tile));
    }

    /// States at every slice boundary; `states()[k]` is the input of slice `k`.
    pub fn states(&self) -> Result<Vec<Vec<Strand>>, (usize, String)> {
        let mut out = vec![self.bottom.clone()];
        for (k, s) in self.slices.iter().enumerate() {
            let next = s.apply(out.last().unwrap()).map_err(|e| (k, e))?;
            out.push(next);
        }
        Ok(out)
    }

    pub fn top(&self) -> Result<Vec<Strand>, (usize, String)> {
        Ok(self.states()?.pop().unwrap())
    }

    pub fn is_closed(&self) -> bool {
        self.bottom.is_empty() && matches!(self.top(), Ok(t) if t.is_empty())
    }

    /// The only tile of slice `k`, when the slice has exactly one.
    pub fn single(&self, k: usize) -> Option<&Placed> {
        match self.slices.get(k) {
            Some(s) if s.tiles.len() == 1 => Some(&s.tiles[0]),
            _ => None,
        }
    }

    pub fn tile_count(&self) -> usize {
        self.slices.iter().map(|s| s.tiles.len()).sum()
    }
}
