use std::fmt;

use super::ring::RingSpec;
use super::scalar::Scalar;
use super::{ExactError, ExactResult};

/// A K₁ value, identified with a unit of R through the determinant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct K1Class {
    unit: Scalar,
}

/// A K₀ value, identified with a signed rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct K0Class(pub i64);

/// A unit modulo `{±1}`, stored by its canonical representative.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct K1QuotClass {
    rep: Scalar,
}

impl K1Class {
    pub fn new(unit: Scalar) -> ExactResult<K1Class> {
        if !unit.is_unit() {
            return Err(ExactError::NotInvertible);
        }
        Ok(K1Class { unit })
    }

    pub fn identity(ring: RingSpec) -> K1Class {
        K1Class { unit: Scalar::one(ring) }
    }

    pub fn ring(&self) -> RingSpec {
        self.unit.ring()
    }

    pub fn unit(&self) -> &Scalar {
        &self.unit
    }

    pub fn is_identity(&self) -> bool {
        self.unit.is_one()
    }

    pub fn mul(&self, o: &K1Class) -> ExactResult<K1Class> {
        check(self.ring(), o.ring())?;
        Ok(K1Class { unit: self.unit.mul(&o.unit) })
    }

    pub fn inv(&self) -> K1Class {
        K1Class { unit: self.unit.inv().expect("K1 values are units") }
    }

    pub fn eq_checked(&self, o: &K1Class) -> ExactResult<bool> {
        check(self.ring(), o.ring())?;
        Ok(self == o)
    }
}

fn check(a: RingSpec, b: RingSpec) -> ExactResult<()> {
    if a != b {
        return Err(ExactError::RingMismatch(a, b));
    }
    Ok(())
}

/// `τ(r)`: the class of the block swap on `R^r ⊕ R^r`, which is `(−1)^r`.
pub fn tau(rank: usize, ring: RingSpec) -> K1Class {
    let unit = if rank % 2 == 0 { Scalar::one(ring) } else { Scalar::one(ring).neg() };
    K1Class { unit }
}

pub fn k1_mul(a: &K1Class, b: &K1Class) -> ExactResult<K1Class> {
    a.mul(b)
}

pub fn k1_inv(a: &K1Class) -> K1Class {
    a.inv()
}

pub fn k1_eq(a: &K1Class, b: &K1Class) -> ExactResult<bool> {
    a.eq_checked(b)
}

/// Quotient by `τ(K₀) = {±1}`. The representative is the smaller of
/// `u, −u` under [`Scalar::order_key`].
pub fn k1_project_quotient(a: &K1Class) -> K1QuotClass {
    let u = a.unit.clone();
    let v = u.neg();
    let rep = if v.order_key() < u.order_key() { v } else { u };
    K1QuotClass { rep }
}

impl K1QuotClass {
    pub fn ring(&self) -> RingSpec {
        self.rep.ring()
    }

    pub fn representative(&self) -> &Scalar {
        &self.rep
    }

    pub fn is_identity(&self) -> bool {
        self.rep.is_one()
    }

    pub fn mul(&self, o: &K1QuotClass) -> ExactResult<K1QuotClass> {
        check(self.ring(), o.ring())?;
        Ok(k1_project_quotient(&K1Class { unit: self.rep.mul(&o.rep) }))
    }
}

impl fmt::Display for K1Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.unit)
    }
}

impl fmt::Display for K1QuotClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "±{}", self.rep)
    }
}

impl fmt::Display for K0Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: RingSpec = RingSpec::Rationals;

    fn k1(ring: RingSpec, v: i64) -> K1Class {
        K1Class::new(Scalar::from_i64(ring, v)).unwrap()
    }

    #[test]
    fn group_examples() {
        assert_eq!(k1_mul(&k1(Q, 2), &k1(Q, 3)).unwrap(), k1(Q, 6));
        let f7 = RingSpec::PrimeField(7);
        assert_eq!(k1_inv(&k1(f7, 5)), k1(f7, 3));
        let z = RingSpec::Integers;
        assert!(k1_eq(&k1(z, -1), &k1(z, -1)).unwrap());
        assert!(k1_mul(&k1(Q, 2), &k1(f7, 3)).is_err());
        assert!(K1Class::new(Scalar::from_i64(z, 2)).is_err());
    }

    #[test]
    fn quotient_examples() {
        assert!(k1_project_quotient(&k1(Q, -1)).is_identity());
        let six = k1_project_quotient(&k1(Q, 6));
        assert_eq!(six.representative().to_string(), "6");
        assert_eq!(k1_project_quotient(&k1(Q, -6)), six);
        assert!(k1_project_quotient(&k1(RingSpec::Integers, 1)).is_identity());
        let f7 = RingSpec::PrimeField(7);
        assert_eq!(k1_project_quotient(&k1(f7, 6)).representative().to_string(), "1");
        assert_eq!(k1_project_quotient(&k1(f7, 4)).representative().to_string(), "3");
    }

    #[test]
    fn tau_small_ranks() {
        assert_eq!(tau(0, Q), k1(Q, 1));
        assert_eq!(tau(1, Q), k1(Q, -1));
        assert_eq!(tau(2, Q), k1(Q, 1));
    }
}
