use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Value as Json};

use super::ring::RingSpec;
use super::scalar::Scalar;
use super::{ExactError, ExactResult};

/// Dense row-major matrix over one ring. Zero-sized shapes are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    ring: RingSpec,
    rows: usize,
    cols: usize,
    entries: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(ring: RingSpec, rows: usize, cols: usize) -> Matrix {
        Matrix { ring, rows, cols, entries: vec![Scalar::zero(ring); rows * cols] }
    }

    pub fn identity(ring: RingSpec, n: usize) -> Matrix {
        let mut m = Matrix::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one(ring));
        }
        m
    }

    pub fn from_rows(ring: RingSpec, rows: Vec<Vec<Scalar>>) -> ExactResult<Matrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(ExactError::Shape("ragged rows".into()));
            }
            for s in row {
                if s.ring() != ring {
                    return Err(ExactError::RingMismatch(ring, s.ring()));
                }
                entries.push(s);
            }
        }
        Ok(Matrix { ring, rows: r, cols: c, entries })
    }

    pub fn from_i64(ring: RingSpec, rows: &[&[i64]]) -> Matrix {
        let rows = rows
            .iter()
            .map(|row| row.iter().map(|&v| Scalar::from_i64(ring, v)).collect())
            .collect();
        Matrix::from_rows(ring, rows).expect("rectangular literal")
    }

    /// 1×1 matrix.
    pub fn scalar(s: Scalar) -> Matrix {
        Matrix { ring: s.ring(), rows: 1, cols: 1, entries: vec![s] }
    }

    /// Permutation matrix of `R^a ⊕ R^b → R^b ⊕ R^a`, `(x, y) ↦ (y, x)`.
    pub fn block_swap(ring: RingSpec, a: usize, b: usize) -> Matrix {
        let mut m = Matrix::zeros(ring, a + b, a + b);
        for i in 0..a {
            m.set(b + i, i, Scalar::one(ring));
        }
        for j in 0..b {
            m.set(j, a + j, Scalar::one(ring));
        }
        m
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        debug_assert_eq!(v.ring(), self.ring);
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = self.get(i, j);
                    if i == j { e.is_one() } else { e.is_zero() }
                })
            })
    }

    pub fn mul(&self, o: &Matrix) -> ExactResult<Matrix> {
        self.same_ring(o)?;
        if self.cols != o.rows {
            return Err(ExactError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let mut out = Matrix::zeros(self.ring, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j).add(&a.mul(b));
                        out.set(i, j, v);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Block-diagonal assembly `a ⊕ b`.
    pub fn block_direct_sum(&self, b: &Matrix) -> ExactResult<Matrix> {
        self.same_ring(b)?;
        let mut out = Matrix::zeros(self.ring, self.rows + b.rows, self.cols + b.cols);
        out.paste(0, 0, self);
        out.paste(self.rows, self.cols, b);
        Ok(out)
    }

    /// Copies `m` into `self` with its top-left corner at `(r, c)`.
    pub fn paste(&mut self, r: usize, c: usize, m: &Matrix) {
        for i in 0..m.rows {
            for j in 0..m.cols {
                self.set(r + i, c + j, m.get(i, j).clone());
            }
        }
    }

    pub fn block(&self, r: usize, c: usize, rows: usize, cols: usize) -> Matrix {
        let mut out = Matrix::zeros(self.ring, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out.set(i, j, self.get(r + i, c + j).clone());
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.ring, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    fn same_ring(&self, o: &Matrix) -> ExactResult<()> {
        if self.ring != o.ring {
            return Err(ExactError::RingMismatch(self.ring, o.ring));
        }
        Ok(())
    }

    fn require_square(&self) -> ExactResult<()> {
        if !self.is_square() {
            return Err(ExactError::NotSquare { rows: self.rows, cols: self.cols });
        }
        Ok(())
    }

    /// Exact determinant. Fields use Gaussian elimination, Z uses Bareiss,
    /// Z/n runs Bareiss on the canonical integer lift and reduces.
    pub fn det(&self) -> ExactResult<Scalar> {
        self.require_square()?;
        match self.ring {
            RingSpec::Rationals | RingSpec::PrimeField(_) => Ok(field_det(self)),
            RingSpec::Integers | RingSpec::IntegersMod(_) => {
                let lifted: Vec<BigInt> =
                    self.entries.iter().map(|s| s.to_bigint().expect("integral entry")).collect();
                Ok(Scalar::from_bigint(self.ring, &bareiss(self.rows, lifted)))
            }
        }
    }

    /// Exact two-sided inverse; fails unless the determinant is a unit.
    pub fn inverse(&self) -> ExactResult<Matrix> {
        self.require_square()?;
        let d = self.det()?;
        let dinv = d.inv().ok_or(ExactError::NotInvertible)?;
        match self.ring {
            RingSpec::Rationals | RingSpec::PrimeField(_) => gauss_jordan(self),
            RingSpec::Integers | RingSpec::IntegersMod(_) => {
                // adj(A) = det_Z(A) · A⁻¹ is integral; compute it over Q.
                let q = self.lift_to_q();
                let qinv = gauss_jordan(&q)?;
                let detz = q.det()?;
                let mut out = Matrix::zeros(self.ring, self.rows, self.cols);
                for i in 0..self.rows {
                    for j in 0..self.cols {
                        let adj = qinv.get(i, j).mul(&detz).to_rational();
                        let adj = Scalar::from_rational(self.ring, &adj)?;
                        out.set(i, j, adj.mul(&dinv));
                    }
                }
                Ok(out)
            }
        }
    }

    /// Same entries read as rationals (canonical integer lift for residues).
    pub fn lift_to_q(&self) -> Matrix {
        Matrix {
            ring: RingSpec::Rationals,
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .map(|s| Scalar::from_rational(RingSpec::Rationals, &s.to_rational()).unwrap())
                .collect(),
        }
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.det().map(|d| d.is_unit()).unwrap_or(false)
    }

    /// DSL literal `[a,b;c,d]`. The 0×0 matrix is `[]`.
    pub fn to_literal(&self) -> String {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| self.row(i).iter().map(|s| s.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        format!("[{}]", rows.join(";"))
    }

    /// Parses a literal written by [`Matrix::to_literal`].
    pub fn parse_literal(ring: RingSpec, s: &str) -> ExactResult<Matrix> {
        let t = s.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|x| x.strip_suffix(']'))
            .ok_or_else(|| ExactError::Parse(format!("matrix literal `{t}` needs brackets")))?;
        if inner.trim().is_empty() {
            return Ok(Matrix::zeros(ring, 0, 0));
        }
        let rows = inner
            .split(';')
            .map(|row| row.split(',').map(|e| Scalar::parse(ring, e)).collect())
            .collect::<ExactResult<Vec<Vec<Scalar>>>>()?;
        Matrix::from_rows(ring, rows)
    }

    pub fn to_json(&self) -> Json {
        let entries: Vec<Vec<String>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(|s| s.to_string()).collect())
            .collect();
        json!({ "rows": self.rows, "cols": self.cols, "entries": entries })
    }

    pub fn from_json(ring: RingSpec, v: &Json) -> ExactResult<Matrix> {
        let bad = |m: &str| ExactError::Parse(format!("matrix json: {m}"));
        let rows = v.get("rows").and_then(Json::as_u64).ok_or_else(|| bad("rows"))? as usize;
        let cols = v.get("cols").and_then(Json::as_u64).ok_or_else(|| bad("cols"))? as usize;
        let ents = v.get("entries").and_then(Json::as_array).ok_or_else(|| bad("entries"))?;
        if ents.len() != rows {
            return Err(bad("row count"));
        }
        let mut m = Matrix::zeros(ring, rows, cols);
        for (i, row) in ents.iter().enumerate() {
            let row = row.as_array().ok_or_else(|| bad("row"))?;
            if row.len() != cols {
                return Err(bad("column count"));
            }
            for (j, e) in row.iter().enumerate() {
                let s = match e {
                    Json::String(s) => Scalar::parse(ring, s)?,
                    Json::Number(n) => Scalar::parse(ring, &n.to_string())?,
                    _ => return Err(bad("entry")),
                };
                m.set(i, j, s);
            }
        }
        Ok(m)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_literal())
    }
}

fn field_det(m: &Matrix) -> Scalar {
    let n = m.rows;
    let mut a = m.entries.clone();
    let mut det = Scalar::one(m.ring);
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r * n + col].is_zero()) else {
            return Scalar::zero(m.ring);
        };
        if p != col {
            for j in 0..n {
                a.swap(p * n + j, col * n + j);
            }
            det = det.neg();
        }
        let piv = a[col * n + col].clone();
        det = det.mul(&piv);
        let pinv = piv.inv().expect("nonzero pivot in a field");
        for r in col + 1..n {
            if a[r * n + col].is_zero() {
                continue;
            }
            let f = a[r * n + col].mul(&pinv);
            for j in col..n {
                if !a[col * n + j].is_zero() {
                    a[r * n + j] = a[r * n + j].sub(&f.mul(&a[col * n + j]));
                }
            }
        }
    }
    det
}

/// Fraction-free Bareiss elimination over Z.
pub(crate) fn bareiss(n: usize, mut a: Vec<BigInt>) -> BigInt {
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k * n + k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !a[r * n + k].is_zero()) else {
                return BigInt::zero();
            };
            for j in 0..n {
                a.swap(p * n + j, k * n + j);
            }
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                a[i * n + j] = v / &prev;
            }
        }
        prev = a[k * n + k].clone();
    }
    sign * &a[(n - 1) * n + (n - 1)]
}

fn gauss_jordan(m: &Matrix) -> ExactResult<Matrix> {
    let n = m.rows;
    let ring = m.ring;
    let mut a = m.clone();
    let mut inv = Matrix::identity(ring, n);
    for col in 0..n {
        let p = (col..n).find(|&r| !a.get(r, col).is_zero()).ok_or(ExactError::NotInvertible)?;
        if p != col {
            for j in 0..n {
                a.entries.swap(p * n + j, col * n + j);
                inv.entries.swap(p * n + j, col * n + j);
            }
        }
        let pinv = a.get(col, col).inv().ok_or(ExactError::NotInvertible)?;
        for j in 0..n {
            a.set(col, j, a.get(col, j).mul(&pinv));
            inv.set(col, j, inv.get(col, j).mul(&pinv));
        }
        for r in 0..n {
            if r == col || a.get(r, col).is_zero() {
                continue;
            }
            let f = a.get(r, col).clone();
            for j in 0..n {
                let va = a.get(r, j).sub(&f.mul(a.get(col, j)));
                a.set(r, j, va);
                let vi = inv.get(r, j).sub(&f.mul(inv.get(col, j)));
                inv.set(r, j, vi);
            }
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: RingSpec = RingSpec::Rationals;

    #[test]
    fn det_examples() {
        assert_eq!(Matrix::from_i64(Q, &[&[2]]).det().unwrap().to_string(), "2");
        assert_eq!(Matrix::from_i64(Q, &[&[1, 1], &[0, 1]]).det().unwrap().to_string(), "1");
        assert!(Matrix::zeros(Q, 0, 0).det().unwrap().is_one());
        assert!(Matrix::zeros(Q, 2, 3).det().is_err());
        let z = RingSpec::Integers;
        assert_eq!(Matrix::from_i64(z, &[&[0, 1], &[1, 0]]).det().unwrap().to_string(), "-1");
        let z6 = RingSpec::IntegersMod(6);
        // over Z the determinant is 2·3 − 0 = 6 ≡ 0
        assert!(Matrix::from_i64(z6, &[&[2, 0], &[0, 3]]).det().unwrap().is_zero());
    }

    #[test]
    fn inverse_examples() {
        let m = Matrix::from_i64(Q, &[&[2]]).inverse().unwrap();
        assert_eq!(m.to_literal(), "[1/2]");
        let shear = Matrix::from_i64(Q, &[&[1, 1], &[0, 1]]);
        assert_eq!(shear.inverse().unwrap(), Matrix::from_i64(Q, &[&[1, -1], &[0, 1]]));
        assert_eq!(Matrix::identity(Q, 3).inverse().unwrap(), Matrix::identity(Q, 3));
        assert!(Matrix::from_i64(RingSpec::Integers, &[&[2]]).inverse().is_err());
        let z12 = RingSpec::IntegersMod(12);
        let a = Matrix::from_i64(z12, &[&[5, 2], &[0, 7]]);
        let ai = a.inverse().unwrap();
        assert!(a.mul(&ai).unwrap().is_identity());
        assert!(ai.mul(&a).unwrap().is_identity());
    }

    #[test]
    fn direct_sum_examples() {
        let a = Matrix::from_i64(Q, &[&[2]]);
        let b = Matrix::from_i64(Q, &[&[3]]);
        assert_eq!(a.block_direct_sum(&b).unwrap(), Matrix::from_i64(Q, &[&[2, 0], &[0, 3]]));
        assert_eq!(Matrix::zeros(Q, 0, 0).block_direct_sum(&a).unwrap(), a);
        let i5 = Matrix::identity(Q, 2).block_direct_sum(&Matrix::identity(Q, 3)).unwrap();
        assert_eq!(i5, Matrix::identity(Q, 5));
        let f7 = Matrix::identity(RingSpec::PrimeField(7), 1);
        assert!(a.block_direct_sum(&f7).is_err());
    }

    #[test]
    fn literal_and_json_round_trip() {
        let m = Matrix::parse_literal(Q, "[1/2,-3;0,4]").unwrap();
        assert_eq!(m.to_literal(), "[1/2,-3;0,4]");
        assert_eq!(Matrix::from_json(Q, &m.to_json()).unwrap(), m);
        assert_eq!(Matrix::parse_literal(Q, "[]").unwrap(), Matrix::zeros(Q, 0, 0));
        assert!(Matrix::parse_literal(Q, "[1,2;3]").is_err());
    }

    #[test]
    fn block_swap_shape() {
        let s = Matrix::block_swap(Q, 1, 2);
        // (x, y1, y2) ↦ (y1, y2, x)
        assert_eq!(s, Matrix::from_i64(Q, &[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]));
    }
}
