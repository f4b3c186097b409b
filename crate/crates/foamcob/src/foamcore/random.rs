//! Seeded generators for matrices, braid words and closed abstract foams.

use rand::seq::SliceRandom;
use rand::Rng;

use super::braid::{braid_close, BraidFoamWord, Generator};
use super::foam::AbstractFoam;
use crate::exactalg::{Matrix, RingSpec, Scalar};

/// A small nonzero-or-zero element of the ring.
pub fn random_scalar<R: Rng>(rng: &mut R, ring: RingSpec) -> Scalar {
    match ring {
        RingSpec::Rationals if rng.gen_bool(0.2) => {
            let n = rng.gen_range(-4i64..=4);
            let d = rng.gen_range(1i64..=3);
            Scalar::parse(ring, &format!("{n}/{d}")).expect("valid fraction")
        }
        RingSpec::PrimeField(p) | RingSpec::IntegersMod(p) => Scalar::from_i64(ring, rng.gen_range(0..p) as i64),
        _ => Scalar::from_i64(ring, rng.gen_range(-3i64..=3)),
    }
}

/// A random unit of the ring.
pub fn random_unit<R: Rng>(rng: &mut R, ring: RingSpec) -> Scalar {
    loop {
        let s = match ring {
            RingSpec::Integers => Scalar::from_i64(ring, if rng.gen_bool(0.5) { 1 } else { -1 }),
            _ => random_scalar(rng, ring),
        };
        if s.is_unit() {
            return s;
        }
    }
}

/// A random invertible `n × n` matrix: a diagonal of units mixed by
/// elementary row operations and a row permutation.
pub fn random_invertible<R: Rng>(rng: &mut R, ring: RingSpec, n: usize) -> Matrix {
    let mut m = Matrix::zeros(ring, n, n);
    for i in 0..n {
        m.set(i, i, random_unit(rng, ring));
    }
    if n < 2 {
        return m;
    }
    for _ in 0..2 * n {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a == b {
            continue;
        }
        let c = random_scalar(rng, ring);
        for j in 0..n {
            let v = m.get(a, j).add(&c.mul(m.get(b, j)));
            m.set(a, j, v);
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut out = Matrix::zeros(ring, n, n);
    for (i, &p) in perm.iter().enumerate() {
        for j in 0..n {
            out.set(i, j, m.get(p, j).clone());
        }
    }
    out
}

/// A random braid-like word whose top ranks equal its bottom ranks, with at
/// most `max_vertices` vertices (a swap counts as two).
pub fn random_braid_word<R: Rng>(
    rng: &mut R,
    ring: RingSpec,
    max_strands: usize,
    max_rank: usize,
    max_vertices: usize,
) -> BraidFoamWord {
    let n = rng.gen_range(1..=max_strands.max(1));
    let bottom: Vec<usize> = (0..n).map(|_| rng.gen_range(0..=max_rank)).collect();
    let mut w = BraidFoamWord::new(ring, bottom.clone());
    let mut used = 0;
    let mut ranks = bottom.clone();
    // Folding the top back onto the bottom costs (top strands - 1) joins and
    // (n - 1) forks, so every step keeps room for it.
    let fits = |used: usize, strands: usize| used + strands - 1 + n - 1 <= max_vertices;
    for _ in 0..rng.gen_range(0..=6) {
        let i = rng.gen_range(0..ranks.len());
        let choice = rng.gen_range(0..4);
        let g = match choice {
            0 if fits(used + 1, ranks.len() + 1) => {
                let left = rng.gen_range(0..=ranks[i]);
                Generator::Fork { i, left, iso: random_invertible(rng, ring, ranks[i]) }
            }
            1 if i + 1 < ranks.len() && fits(used + 1, ranks.len() - 1) => {
                Generator::Join { i, iso: random_invertible(rng, ring, ranks[i] + ranks[i + 1]) }
            }
            2 if i + 1 < ranks.len() && fits(used + 2, ranks.len()) => Generator::Swap { i },
            _ => Generator::Gate { i, m: random_invertible(rng, ring, ranks[i]) },
        };
        used += match g {
            Generator::Fork { .. } | Generator::Join { .. } => 1,
            Generator::Swap { .. } => 2,
            Generator::Gate { .. } => 0,
        };
        w.push(g).expect("generator fits");
        ranks = w.top_ranks().expect("valid word");
    }
    if ranks != bottom {
        while ranks.len() > 1 {
            let s = ranks[0] + ranks[1];
            w.push(Generator::Join { i: 0, iso: random_invertible(rng, ring, s) }).expect("join fits");
            ranks = w.top_ranks().expect("valid word");
        }
        for (k, &r) in bottom.iter().enumerate().take(n - 1) {
            let total = ranks[k];
            w.push(Generator::Fork { i: k, left: r, iso: random_invertible(rng, ring, total) }).expect("fork fits");
            ranks = w.top_ranks().expect("valid word");
        }
    }
    w
}

/// A closed valid abstract foam: a random braid closure plus up to two
/// extra circles.
pub fn random_abstract_foam<R: Rng>(rng: &mut R, ring: RingSpec, max_vertices: usize, max_rank: usize) -> AbstractFoam {
    let w = random_braid_word(rng, ring, 3, max_rank, max_vertices);
    let matchings: Vec<Matrix> = w.bottom_ranks.iter().map(|&r| random_invertible(rng, ring, r)).collect();
    let mut f = braid_close(&w, &matchings).expect("closable word");
    for _ in 0..rng.gen_range(0..=2) {
        let r = rng.gen_range(0..=max_rank);
        f.add_circle(random_invertible(rng, ring, r));
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foamcore::validate_abstract;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_objects_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for ring in [RingSpec::Rationals, RingSpec::PrimeField(7), RingSpec::Integers, RingSpec::IntegersMod(12)] {
            for _ in 0..40 {
                let n = rng.gen_range(0..5);
                assert!(random_invertible(&mut rng, ring, n).is_invertible());
                let f = random_abstract_foam(&mut rng, ring, 6, 3);
                assert!(validate_abstract(&f).is_empty());
                assert!(f.vertices.len() <= 6);
            }
        }
    }
}
