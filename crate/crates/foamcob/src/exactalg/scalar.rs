use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ring::{inv_mod, mul_mod, RingSpec};
use super::{ExactError, ExactResult};

/// Canonical element representation, chosen by the ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Rational(BigRational),
    Integer(BigInt),
    Residue(u64),
}

/// An exact ring element tagged with its ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scalar {
    ring: RingSpec,
    value: Value,
}

impl Scalar {
    pub fn zero(ring: RingSpec) -> Scalar {
        Scalar::from_i64(ring, 0)
    }

    pub fn one(ring: RingSpec) -> Scalar {
        Scalar::from_i64(ring, 1)
    }

    pub fn from_i64(ring: RingSpec, v: i64) -> Scalar {
        Scalar::from_bigint(ring, &BigInt::from(v))
    }

    pub fn from_bigint(ring: RingSpec, v: &BigInt) -> Scalar {
        let value = match ring {
            RingSpec::Rationals => Value::Rational(BigRational::from_integer(v.clone())),
            RingSpec::Integers => Value::Integer(v.clone()),
            RingSpec::PrimeField(m) | RingSpec::IntegersMod(m) => Value::Residue(reduce(v, m)),
        };
        Scalar { ring, value }
    }

    /// Maps a rational into the ring. Fails for non-integral values outside Q,
    /// or for denominators that are not units modulo n.
    pub fn from_rational(ring: RingSpec, q: &BigRational) -> ExactResult<Scalar> {
        match ring {
            RingSpec::Rationals => Ok(Scalar { ring, value: Value::Rational(q.clone()) }),
            RingSpec::Integers => {
                if !q.is_integer() {
                    return Err(ExactError::Parse(format!("{q} is not an integer")));
                }
                Ok(Scalar { ring, value: Value::Integer(q.to_integer()) })
            }
            RingSpec::PrimeField(m) | RingSpec::IntegersMod(m) => {
                let num = reduce(q.numer(), m);
                let den = reduce(q.denom(), m);
                let inv = inv_mod(den, m).ok_or(ExactError::NotInvertible)?;
                Ok(Scalar { ring, value: Value::Residue(mul_mod(num, inv, m)) })
            }
        }
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn value(&self) -> &Value {
        &self.value
    }

    /// Integer or rational lift used by algorithms that work over Q.
    pub fn to_rational(&self) -> BigRational {
        match &self.value {
            Value::Rational(q) => q.clone(),
            Value::Integer(z) => BigRational::from_integer(z.clone()),
            Value::Residue(r) => BigRational::from_integer(BigInt::from(*r)),
        }
    }

    pub fn to_bigint(&self) -> Option<BigInt> {
        match &self.value {
            Value::Rational(q) if q.is_integer() => Some(q.to_integer()),
            Value::Rational(_) => None,
            Value::Integer(z) => Some(z.clone()),
            Value::Residue(r) => Some(BigInt::from(*r)),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.value {
            Value::Rational(q) => q.is_zero(),
            Value::Integer(z) => z.is_zero(),
            Value::Residue(r) => *r == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        *self == Scalar::one(self.ring)
    }

    pub fn is_unit(&self) -> bool {
        self.inv().is_some()
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        debug_assert_eq!(self.ring, o.ring);
        let value = match (&self.value, &o.value) {
            (Value::Rational(a), Value::Rational(b)) => Value::Rational(a + b),
            (Value::Integer(a), Value::Integer(b)) => Value::Integer(a + b),
            (Value::Residue(a), Value::Residue(b)) => {
                let m = self.ring.modulus().unwrap_or(1);
                Value::Residue(((*a as u128 + *b as u128) % m as u128) as u64)
            }
            _ => unreachable!("mixed scalar representations"),
        };
        Scalar { ring: self.ring, value }
    }

    pub fn neg(&self) -> Scalar {
        let value = match &self.value {
            Value::Rational(a) => Value::Rational(-a),
            Value::Integer(a) => Value::Integer(-a),
            Value::Residue(a) => {
                let m = self.ring.modulus().unwrap_or(1);
                Value::Residue(if *a == 0 { 0 } else { m - a })
            }
        };
        Scalar { ring: self.ring, value }
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        debug_assert_eq!(self.ring, o.ring);
        let value = match (&self.value, &o.value) {
            (Value::Rational(a), Value::Rational(b)) => Value::Rational(a * b),
            (Value::Integer(a), Value::Integer(b)) => Value::Integer(a * b),
            (Value::Residue(a), Value::Residue(b)) => {
                Value::Residue(mul_mod(*a, *b, self.ring.modulus().unwrap_or(1)))
            }
            _ => unreachable!("mixed scalar representations"),
        };
        Scalar { ring: self.ring, value }
    }

    /// Multiplicative inverse, `None` for non-units.
    pub fn inv(&self) -> Option<Scalar> {
        let value = match &self.value {
            Value::Rational(a) => {
                if a.is_zero() {
                    return None;
                }
                Value::Rational(a.recip())
            }
            Value::Integer(a) => {
                if a.abs().is_one() {
                    Value::Integer(a.clone())
                } else {
                    return None;
                }
            }
            Value::Residue(a) => Value::Residue(inv_mod(*a, self.ring.modulus()?)?),
        };
        Some(Scalar { ring: self.ring, value })
    }

    pub fn pow(&self, e: u64) -> Scalar {
        let mut r = Scalar::one(self.ring);
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Parses the canonical string form for `ring`. Residues accept any
    /// integer and reduce it; rationals accept `p/q` and integers.
    pub fn parse(ring: RingSpec, s: &str) -> ExactResult<Scalar> {
        let t = s.trim();
        let bad = || ExactError::Parse(format!("bad scalar `{t}` for ring {ring}"));
        let q: BigRational = if let Some((n, d)) = t.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            BigRational::new(n, d)
        } else {
            BigRational::from_integer(t.parse().map_err(|_| bad())?)
        };
        Scalar::from_rational(ring, &q).map_err(|_| bad())
    }

    /// Key of the documented total order used to pick coset representatives:
    /// for Q and Z compare `(|v|, v < 0)`, for residues compare the residue.
    pub fn order_key(&self) -> (BigRational, bool) {
        match &self.value {
            Value::Residue(r) => (BigRational::from_integer(BigInt::from(*r)), false),
            _ => {
                let q = self.to_rational();
                (q.abs(), q.is_negative())
            }
        }
    }

    pub fn to_i64(&self) -> Option<i64> {
        self.to_bigint()?.to_i64()
    }
}

fn reduce(v: &BigInt, m: u64) -> u64 {
    v.mod_floor(&BigInt::from(m)).to_u64().unwrap_or(0)
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            Value::Rational(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Value::Integer(z) => write!(f, "{z}"),
            Value::Residue(r) => write!(f, "{r}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Scalar {
        Scalar::parse(RingSpec::Rationals, s).unwrap()
    }

    #[test]
    fn canonical_strings() {
        assert_eq!(q("4/6").to_string(), "2/3");
        assert_eq!(q("3/-6").to_string(), "-1/2");
        assert_eq!(q("-8/4").to_string(), "-2");
        let f7 = RingSpec::PrimeField(7);
        assert_eq!(Scalar::parse(f7, "-1").unwrap().to_string(), "6");
        assert_eq!(Scalar::parse(f7, "1/2").unwrap().to_string(), "4");
        assert!(Scalar::parse(RingSpec::Integers, "1/2").is_err());
        assert!(Scalar::parse(RingSpec::IntegersMod(12), "1/2").is_err());
        assert!(Scalar::parse(RingSpec::Rationals, "1/0").is_err());
        assert!(Scalar::parse(RingSpec::Rationals, "x").is_err());
    }

    #[test]
    fn units() {
        assert_eq!(Scalar::from_i64(RingSpec::PrimeField(7), 5).inv().unwrap().to_string(), "3");
        assert!(Scalar::from_i64(RingSpec::Integers, 2).inv().is_none());
        assert!(Scalar::from_i64(RingSpec::Integers, -1).is_unit());
        assert!(!Scalar::from_i64(RingSpec::IntegersMod(12), 4).is_unit());
        assert!(Scalar::from_i64(RingSpec::IntegersMod(12), 5).is_unit());
        assert!(!q("0").is_unit());
    }

    #[test]
    fn arithmetic() {
        assert_eq!(q("1/2").add(&q("1/3")), q("5/6"));
        assert_eq!(q("1/2").mul(&q("2/3")), q("1/3"));
        assert_eq!(q("1/2").sub(&q("1/2")), q("0"));
        let z12 = RingSpec::IntegersMod(12);
        let a = Scalar::from_i64(z12, 7);
        assert_eq!(a.add(&a).to_string(), "2");
        assert_eq!(a.neg().to_string(), "5");
        assert_eq!(a.mul(&a).to_string(), "1");
    }
}
