use serde::{Deserialize, Serialize};

use super::{FoamError, FoamResult};
use crate::exactalg::K0Class;

/// A signed point decorated by a free module of the given rank.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroPoint {
    pub sign: i8,
    pub rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroFoam {
    pub points: Vec<ZeroPoint>,
}

impl ZeroFoam {
    pub fn new(points: &[(i8, usize)]) -> ZeroFoam {
        ZeroFoam {
            points: points.iter().map(|&(sign, rank)| ZeroPoint { sign, rank, label: None }).collect(),
        }
    }

    pub fn union(&self, o: &ZeroFoam) -> ZeroFoam {
        let mut points = self.points.clone();
        points.extend(o.points.iter().cloned());
        ZeroFoam { points }
    }

    /// Reverses every orientation.
    pub fn negate(&self) -> ZeroFoam {
        ZeroFoam {
            points: self.points.iter().map(|p| ZeroPoint { sign: -p.sign, ..p.clone() }).collect(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("zero foam serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> FoamResult<ZeroFoam> {
        let z: ZeroFoam = serde_json::from_value(v.clone()).map_err(|e| FoamError::Json(e.to_string()))?;
        if z.points.iter().any(|p| p.sign != 1 && p.sign != -1) {
            return Err(FoamError::Json("point sign must be +1 or -1".into()));
        }
        Ok(z)
    }
}

/// Signed rank sum `Σ s(b)·rank(P_b)`.
pub fn gamma0(z: &ZeroFoam) -> K0Class {
    K0Class(z.points.iter().map(|p| p.sign as i64 * p.rank as i64).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(gamma0(&ZeroFoam::new(&[(1, 2), (-1, 2)])), K0Class(0));
        assert_eq!(gamma0(&ZeroFoam::new(&[(1, 1), (1, 3)])), K0Class(4));
        assert_eq!(gamma0(&ZeroFoam::default()), K0Class(0));
    }

    #[test]
    fn json_round_trip() {
        let mut z = ZeroFoam::new(&[(1, 2), (-1, 5)]);
        z.points[0].label = Some("a".into());
        let back = ZeroFoam::from_json(&z.to_json()).unwrap();
        assert_eq!(back, z);
        assert!(ZeroFoam::from_json(&serde_json::json!({"points":[{"sign":2,"rank":1}]})).is_err());
    }
}
