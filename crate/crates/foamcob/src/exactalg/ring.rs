use std::fmt;
use std::str::FromStr;

use super::{ExactError, ExactResult};

/// Coefficient ring shared by every scalar of one computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RingSpec {
    Rationals,
    PrimeField(u64),
    Integers,
    IntegersMod(u64),
}

impl RingSpec {
    /// Checked constructor for `Fp:p`.
    pub fn prime_field(p: u64) -> ExactResult<RingSpec> {
        if !is_prime(p) {
            return Err(ExactError::InvalidRing(format!("{p} is not prime")));
        }
        Ok(RingSpec::PrimeField(p))
    }

    /// Checked constructor for `Zmod:n`.
    pub fn integers_mod(n: u64) -> ExactResult<RingSpec> {
        if n < 2 {
            return Err(ExactError::InvalidRing(format!("modulus {n} is below 2")));
        }
        Ok(RingSpec::IntegersMod(n))
    }

    pub fn is_field(self) -> bool {
        matches!(self, RingSpec::Rationals | RingSpec::PrimeField(_))
    }

    /// Modulus for residue rings, `None` for Q and Z.
    pub fn modulus(self) -> Option<u64> {
        match self {
            RingSpec::PrimeField(p) => Some(p),
            RingSpec::IntegersMod(n) => Some(n),
            _ => None,
        }
    }

    pub fn validate(self) -> ExactResult<()> {
        match self {
            RingSpec::PrimeField(p) => RingSpec::prime_field(p).map(|_| ()),
            RingSpec::IntegersMod(n) => RingSpec::integers_mod(n).map(|_| ()),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingSpec::Rationals => write!(f, "Q"),
            RingSpec::PrimeField(p) => write!(f, "Fp:{p}"),
            RingSpec::Integers => write!(f, "Z"),
            RingSpec::IntegersMod(n) => write!(f, "Zmod:{n}"),
        }
    }
}

impl FromStr for RingSpec {
    type Err = ExactError;

    fn from_str(s: &str) -> ExactResult<RingSpec> {
        let s = s.trim();
        let bad = || ExactError::InvalidRing(s.to_string());
        match s {
            "Q" => Ok(RingSpec::Rationals),
            "Z" => Ok(RingSpec::Integers),
            _ => {
                if let Some(p) = s.strip_prefix("Fp:") {
                    RingSpec::prime_field(p.parse().map_err(|_| bad())?)
                } else if let Some(n) = s.strip_prefix("Zmod:") {
                    RingSpec::integers_mod(n.parse().map_err(|_| bad())?)
                } else {
                    Err(bad())
                }
            }
        }
    }
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub(crate) fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_strings_round_trip() {
        for s in ["Q", "Z", "Fp:7", "Zmod:12"] {
            assert_eq!(s.parse::<RingSpec>().unwrap().to_string(), s);
        }
        assert!("Fp:8".parse::<RingSpec>().is_err());
        assert!("Zmod:1".parse::<RingSpec>().is_err());
        assert!("R".parse::<RingSpec>().is_err());
    }

    #[test]
    fn primality_matches_trial_division() {
        for n in 0..2000u64 {
            let naive = n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
            assert_eq!(is_prime(n), naive, "{n}");
        }
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1_000_000_007 * 3));
    }

    #[test]
    fn modular_inverse() {
        assert_eq!(inv_mod(5, 7), Some(3));
        assert_eq!(inv_mod(4, 12), None);
        for a in 1..12 {
            if let Some(b) = inv_mod(a, 12) {
                assert_eq!(a * b % 12, 1);
            }
        }
    }
}
