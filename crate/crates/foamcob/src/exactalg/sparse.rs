use std::collections::{BTreeMap, BTreeSet};

use super::ring::RingSpec;
use super::scalar::Scalar;
use super::ExactResult;
use super::{ExactError, Matrix};

/// Square matrix stored by rows of nonzero entries, for block-sparse
/// automorphisms such as `f_B`.
#[derive(Clone, Debug)]
pub struct SparseMatrix {
    ring: RingSpec,
    n: usize,
    rows: Vec<BTreeMap<usize, Scalar>>,
}

impl SparseMatrix {
    pub fn new(ring: RingSpec, n: usize) -> SparseMatrix {
        SparseMatrix { ring, n, rows: vec![BTreeMap::new(); n] }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    /// Adds `m` into the block with top-left corner `(r, c)`.
    pub fn add_block(&mut self, r: usize, c: usize, m: &Matrix) {
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                self.add_entry(r + i, c + j, m.get(i, j));
            }
        }
    }

    pub fn add_entry(&mut self, r: usize, c: usize, v: &Scalar) {
        if v.is_zero() {
            return;
        }
        let slot = self.rows[r].entry(c).or_insert_with(|| Scalar::zero(self.ring));
        *slot = slot.add(v);
        if slot.is_zero() {
            self.rows[r].remove(&c);
        }
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.ring, self.n, self.n);
        for (i, row) in self.rows.iter().enumerate() {
            for (&j, v) in row {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    /// Exact determinant by sparse elimination with a fewest-entries pivot
    /// rule. Q, Z and Z/n are eliminated over Q (the integer lift has the
    /// same determinant); F_p is eliminated over F_p.
    pub fn det(&self) -> ExactResult<Scalar> {
        let work = match self.ring {
            RingSpec::PrimeField(_) | RingSpec::Rationals => self.ring,
            _ => RingSpec::Rationals,
        };
        let mut rows: Vec<BTreeMap<usize, Scalar>> = self
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|(&j, v)| (j, if work == self.ring { v.clone() } else { to_q(v) }))
                    .collect()
            })
            .collect();
        let mut cols: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); self.n];
        for (i, r) in rows.iter().enumerate() {
            for &j in r.keys() {
                cols[j].insert(i);
            }
        }
        let mut col_alive = vec![true; self.n];
        let mut det = Scalar::one(work);
        let mut perm = vec![0usize; self.n];
        for _ in 0..self.n {
            let c = (0..self.n)
                .filter(|&c| col_alive[c])
                .min_by_key(|&c| cols[c].len())
                .expect("live column");
            let Some(&r) = cols[c].iter().min_by_key(|&&r| rows[r].len()) else {
                return Ok(Scalar::zero(self.ring));
            };
            let piv = rows[r][&c].clone();
            det = det.mul(&piv);
            perm[r] = c;
            let pinv = piv.inv().expect("nonzero pivot");
            let prow = std::mem::take(&mut rows[r]);
            for &j in prow.keys() {
                cols[j].remove(&r);
            }
            let others: Vec<usize> = cols[c].iter().copied().collect();
            for r2 in others {
                let f = rows[r2][&c].mul(&pinv);
                for (&j, v) in &prow {
                    let slot = rows[r2].entry(j).or_insert_with(|| Scalar::zero(work));
                    let was_zero = slot.is_zero();
                    *slot = slot.sub(&f.mul(v));
                    if slot.is_zero() {
                        rows[r2].remove(&j);
                        cols[j].remove(&r2);
                    } else if was_zero {
                        cols[j].insert(r2);
                    }
                }
            }
            col_alive[c] = false;
        }
        if permutation_is_odd(&perm) {
            det = det.neg();
        }
        from_work(self.ring, &det)
    }
}

fn to_q(v: &Scalar) -> Scalar {
    Scalar::from_rational(RingSpec::Rationals, &v.to_rational()).expect("rational lift")
}

fn from_work(ring: RingSpec, d: &Scalar) -> ExactResult<Scalar> {
    if d.ring() == ring {
        return Ok(d.clone());
    }
    Scalar::from_rational(ring, &d.to_rational()).map_err(|_| ExactError::NotInvertible)
}

fn permutation_is_odd(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    let mut odd = false;
    for s in 0..p.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut i = s;
        while !seen[i] {
            seen[i] = true;
            i = p[i];
            len += 1;
        }
        if len % 2 == 0 {
            odd = !odd;
        }
    }
    odd
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_dense_on_permutation_blocks() {
        let q = RingSpec::Rationals;
        let mut s = SparseMatrix::new(q, 4);
        s.add_block(2, 0, &Matrix::from_i64(q, &[&[5]]));
        s.add_block(0, 1, &Matrix::identity(q, 1));
        s.add_block(3, 2, &Matrix::identity(q, 1));
        s.add_block(1, 3, &Matrix::identity(q, 1));
        assert_eq!(s.det().unwrap(), s.to_dense().det().unwrap());
    }

    #[test]
    fn singular_is_zero() {
        let q = RingSpec::Rationals;
        let mut s = SparseMatrix::new(q, 2);
        s.add_block(0, 0, &Matrix::from_i64(q, &[&[1, 2], &[2, 4]]));
        assert!(s.det().unwrap().is_zero());
    }
}
