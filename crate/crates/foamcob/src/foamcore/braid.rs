use serde_json::{json, Value as Json};

use super::foam::{AbstractFoam, VertexKind};
use super::graph::FineGraph;
use super::{FoamError, FoamResult};
use crate::exactalg::{K1Class, Matrix, RingSpec};

/// A braid-like generator acting at strand position `i` (0-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generator {
    /// Merges strands `i` and `i + 1`.
    Join { i: usize, iso: Matrix },
    /// Splits strand `i` into ranks `left` and `rank - left`.
    Fork { i: usize, left: usize, iso: Matrix },
    Gate { i: usize, m: Matrix },
    /// The crossing macro: a join with identity iso, then a fork with the
    /// block-swap iso.
    Swap { i: usize },
}

/// An upward braid-like foam: no cups or caps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BraidFoamWord {
    pub ring: RingSpec,
    pub bottom_ranks: Vec<usize>,
    pub generators: Vec<Generator>,
}

fn rank_err(msg: String) -> FoamError {
    FoamError::RankMismatch(msg)
}

fn check_iso(m: &Matrix, n: usize, what: &str) -> FoamResult<()> {
    if m.rows() != n || m.cols() != n || !m.is_invertible() {
        return Err(rank_err(format!("{what}: need an invertible {n}x{n} matrix")));
    }
    Ok(())
}

impl BraidFoamWord {
    pub fn new(ring: RingSpec, bottom_ranks: Vec<usize>) -> BraidFoamWord {
        BraidFoamWord { ring, bottom_ranks, generators: vec![] }
    }

    pub fn push(&mut self, g: Generator) -> FoamResult<()> {
        let ranks = self.top_ranks()?;
        Self::step(&ranks, &g)?;
        self.generators.push(g);
        Ok(())
    }

    fn step(ranks: &[usize], g: &Generator) -> FoamResult<Vec<usize>> {
        let mut r = ranks.to_vec();
        let need = |k: usize| {
            if k >= ranks.len() {
                Err(rank_err(format!("strand {k} does not exist")))
            } else {
                Ok(())
            }
        };
        match g {
            Generator::Join { i, iso } => {
                need(i + 1)?;
                check_iso(iso, r[*i] + r[i + 1], "join iso")?;
                let s = r[*i] + r[i + 1];
                r.splice(*i..i + 2, [s]);
            }
            Generator::Fork { i, left, iso } => {
                need(*i)?;
                if *left > r[*i] {
                    return Err(rank_err(format!("fork of rank {} cannot split off {left}", r[*i])));
                }
                check_iso(iso, r[*i], "fork iso")?;
                let total = r[*i];
                r.splice(*i..i + 1, [*left, total - left]);
            }
            Generator::Gate { i, m } => {
                need(*i)?;
                check_iso(m, r[*i], "gate")?;
            }
            Generator::Swap { i } => {
                need(i + 1)?;
                r.swap(*i, i + 1);
            }
        }
        Ok(r)
    }

    /// Ranks after every generator; entry 0 is the bottom.
    pub fn levels(&self) -> FoamResult<Vec<Vec<usize>>> {
        let mut out = vec![self.bottom_ranks.clone()];
        for g in &self.generators {
            let next = Self::step(out.last().unwrap(), g)?;
            out.push(next);
        }
        Ok(out)
    }

    pub fn top_ranks(&self) -> FoamResult<Vec<usize>> {
        Ok(self.levels()?.pop().unwrap())
    }

    pub fn validate(&self) -> FoamResult<()> {
        self.ring.validate()?;
        self.levels().map(|_| ())
    }

    /// Total transport from the bottom fibers to the top fibers.
    pub fn braid_map(&self) -> FoamResult<Matrix> {
        let levels = self.levels()?;
        let ring = self.ring;
        let total: usize = self.bottom_ranks.iter().sum();
        let mut acc = Matrix::identity(ring, total);
        for (k, g) in self.generators.iter().enumerate() {
            let r = &levels[k];
            let (i, width, local) = match g {
                Generator::Join { i, iso } => (*i, 2, iso.clone()),
                Generator::Fork { i, iso, .. } => (*i, 1, iso.inverse()?),
                Generator::Gate { i, m } => (*i, 1, m.clone()),
                Generator::Swap { i } => (*i, 2, Matrix::block_swap(ring, r[*i], r[i + 1])),
            };
            let before: usize = r[..i].iter().sum();
            let mid: usize = r[i..i + width].iter().sum();
            let step = Matrix::identity(ring, before)
                .block_direct_sum(&local)?
                .block_direct_sum(&Matrix::identity(ring, total - before - mid))?;
            acc = step.mul(&acc)?;
        }
        Ok(acc)
    }

    /// Fine graph of the word with top strand `j` joined to bottom strand `j`
    /// through `matchings[j]`.
    pub fn closure_graph(&self, matchings: &[Matrix]) -> FoamResult<FineGraph> {
        let levels = self.levels()?;
        let top = levels.last().unwrap();
        if top != &self.bottom_ranks {
            return Err(rank_err(format!("top ranks {top:?} differ from bottom ranks {:?}", self.bottom_ranks)));
        }
        if matchings.len() != top.len() {
            return Err(rank_err(format!("{} matchings for {} strands", matchings.len(), top.len())));
        }
        for (j, m) in matchings.iter().enumerate() {
            check_iso(m, top[j], &format!("matching {j}"))?;
        }
        let ring = self.ring;
        let mut g = FineGraph::new(ring);
        let mut cur: Vec<usize> = levels[0].iter().map(|&r| g.add_point(r)).collect();
        let bottom = cur.clone();
        for (k, gen) in self.generators.iter().enumerate() {
            let next_ranks = &levels[k + 1];
            let mut next = cur.clone();
            match gen {
                Generator::Join { i, iso } => {
                    let p = g.add_point(next_ranks[*i]);
                    g.add_vertex(VertexKind::In, iso.clone(), cur[*i], cur[i + 1], p)?;
                    next.splice(*i..i + 2, [p]);
                }
                Generator::Fork { i, iso, .. } => {
                    let a = g.add_point(next_ranks[*i]);
                    let b = g.add_point(next_ranks[i + 1]);
                    g.add_vertex(VertexKind::Out, iso.clone(), a, b, cur[*i])?;
                    next.splice(*i..i + 1, [a, b]);
                }
                Generator::Gate { i, m } => {
                    let p = g.add_point(next_ranks[*i]);
                    g.add_interval(cur[*i], p, m.clone())?;
                    next[*i] = p;
                }
                Generator::Swap { i } => {
                    let (ra, rb) = (levels[k][*i], levels[k][i + 1]);
                    let mid = g.add_point(ra + rb);
                    g.add_vertex(VertexKind::In, Matrix::identity(ring, ra + rb), cur[*i], cur[i + 1], mid)?;
                    let a = g.add_point(rb);
                    let b = g.add_point(ra);
                    g.add_vertex(VertexKind::Out, Matrix::block_swap(ring, rb, ra), a, b, mid)?;
                    next[*i] = a;
                    next[i + 1] = b;
                }
            }
            cur = next;
        }
        for (j, m) in matchings.iter().enumerate() {
            g.add_interval(cur[j], bottom[j], m.clone())?;
        }
        Ok(g)
    }

    pub fn to_json(&self) -> Json {
        let gens: Vec<Json> = self
            .generators
            .iter()
            .map(|g| match g {
                Generator::Join { i, iso } => json!({"op": "join", "i": i, "iso": iso.to_json()}),
                Generator::Fork { i, left, iso } => json!({"op": "fork", "i": i, "left": left, "iso": iso.to_json()}),
                Generator::Gate { i, m } => json!({"op": "gate", "i": i, "matrix": m.to_json()}),
                Generator::Swap { i } => json!({"op": "swap", "i": i}),
            })
            .collect();
        json!({"ring": self.ring.to_string(), "bottom_ranks": self.bottom_ranks, "generators": gens})
    }

    pub fn from_json(v: &Json) -> FoamResult<BraidFoamWord> {
        let bad = |s: &str| FoamError::Json(s.to_string());
        let ring: RingSpec = v["ring"].as_str().ok_or_else(|| bad("missing ring"))?.parse()?;
        let bottom_ranks: Vec<usize> =
            serde_json::from_value(v["bottom_ranks"].clone()).map_err(|e| FoamError::Json(e.to_string()))?;
        let mut w = BraidFoamWord::new(ring, bottom_ranks);
        for g in v["generators"].as_array().ok_or_else(|| bad("missing generators"))? {
            let i = g["i"].as_u64().ok_or_else(|| bad("generator needs i"))? as usize;
            let gen = match g["op"].as_str() {
                Some("join") => Generator::Join { i, iso: Matrix::from_json(ring, &g["iso"])? },
                Some("fork") => Generator::Fork {
                    i,
                    left: g["left"].as_u64().ok_or_else(|| bad("fork needs left"))? as usize,
                    iso: Matrix::from_json(ring, &g["iso"])?,
                },
                Some("gate") => Generator::Gate { i, m: Matrix::from_json(ring, &g["matrix"])? },
                Some("swap") => Generator::Swap { i },
                _ => return Err(bad("unknown generator op")),
            };
            w.push(gen)?;
        }
        Ok(w)
    }
}

/// Closes a braid-like word into a closed abstract foam.
pub fn braid_close(w: &BraidFoamWord, matchings: &[Matrix]) -> FoamResult<AbstractFoam> {
    w.closure_graph(matchings)?.contract()
}

/// Full K₁ value of the standard planar closure: `det(⊕ matchings · braid map)`.
pub fn closure_k1(w: &BraidFoamWord, matchings: &[Matrix]) -> FoamResult<K1Class> {
    w.closure_graph(matchings)?;
    let mut m = Matrix::identity(w.ring, 0);
    for x in matchings {
        m = m.block_direct_sum(x)?;
    }
    Ok(K1Class::new(m.mul(&w.braid_map()?)?.det()?)?)
}

/// Adds a strand of the last strand's rank and a crossing between the two
/// last strands. Close it with an identity matching on the new strand.
pub fn markov_stabilize(w: &BraidFoamWord) -> FoamResult<BraidFoamWord> {
    let n = w.bottom_ranks.len();
    if n == 0 {
        return Err(FoamError::Empty);
    }
    let mut out = w.clone();
    out.bottom_ranks.push(w.bottom_ranks[n - 1]);
    out.generators.push(Generator::Swap { i: n - 1 });
    out.validate()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foamcore::foam::{Port, Slot};

    const Q: RingSpec = RingSpec::Rationals;

    #[test]
    fn empty_word_closes_to_circle() {
        let a = Matrix::from_i64(Q, &[&[2, 1], &[1, 1]]);
        let w = BraidFoamWord::new(Q, vec![2]);
        assert_eq!(braid_close(&w, &[a.clone()]).unwrap(), AbstractFoam::circle(Q, a));
    }

    #[test]
    fn gate_word_closes_to_circle() {
        let a = Matrix::from_i64(Q, &[&[3]]);
        let mut w = BraidFoamWord::new(Q, vec![1]);
        w.push(Generator::Gate { i: 0, m: a.clone() }).unwrap();
        assert_eq!(braid_close(&w, &[Matrix::identity(Q, 1)]).unwrap(), AbstractFoam::circle(Q, a));
    }

    #[test]
    fn fork_join_closes_to_theta() {
        let mut w = BraidFoamWord::new(Q, vec![2]);
        w.push(Generator::Fork { i: 0, left: 1, iso: Matrix::identity(Q, 2) }).unwrap();
        w.push(Generator::Join { i: 0, iso: Matrix::identity(Q, 2) }).unwrap();
        let f = braid_close(&w, &[Matrix::identity(Q, 2)]).unwrap();
        let vp = |vertex, slot| Port::Vertex { vertex, slot };
        let mut theta = AbstractFoam::new(Q);
        theta.add_vertex(VertexKind::Out, Matrix::identity(Q, 2));
        theta.add_vertex(VertexKind::In, Matrix::identity(Q, 2));
        theta.add_edge(vp(0, Slot::Thin0), vp(1, Slot::Thin0), Matrix::identity(Q, 1));
        theta.add_edge(vp(0, Slot::Thin1), vp(1, Slot::Thin1), Matrix::identity(Q, 1));
        theta.add_edge(vp(1, Slot::Thick), vp(0, Slot::Thick), Matrix::identity(Q, 2));
        assert_eq!(f, theta);
    }

    #[test]
    fn rank_errors() {
        let mut w = BraidFoamWord::new(Q, vec![1, 2]);
        assert!(w.push(Generator::Join { i: 0, iso: Matrix::identity(Q, 2) }).is_err());
        w.push(Generator::Swap { i: 0 }).unwrap();
        assert!(braid_close(&w, &[Matrix::identity(Q, 1), Matrix::identity(Q, 2)]).is_err());
        assert!(markov_stabilize(&BraidFoamWord::new(Q, vec![])).is_err());
    }

    #[test]
    fn json_round_trip() {
        let mut w = BraidFoamWord::new(Q, vec![1, 2]);
        w.push(Generator::Swap { i: 0 }).unwrap();
        w.push(Generator::Fork { i: 0, left: 1, iso: Matrix::block_swap(Q, 1, 1) }).unwrap();
        w.push(Generator::Gate { i: 2, m: Matrix::from_i64(Q, &[&[5]]) }).unwrap();
        assert_eq!(BraidFoamWord::from_json(&w.to_json()).unwrap(), w);
    }
}
