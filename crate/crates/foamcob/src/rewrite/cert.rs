use serde_json::{json, Value as Json};
use sha2::{Digest, Sha256};

use super::{apply_move, Move, RewriteError, RewriteResult};
use crate::diagram::{planar_invariant, serialize_diagram, SlicedDiagram};
use crate::exactalg::RingSpec;

/// Lowercase hex SHA-256 of the canonical text serialization.
pub fn canonical_digest(d: &SlicedDiagram) -> String {
    hex::encode(Sha256::digest(serialize_diagram(d).as_bytes()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertStep {
    pub mv: Move,
    pub pre: String,
    pub post: String,
}

/// A chain of moves from the diagram hashing to `start` to the one
/// hashing to `end`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoveCertificate {
    pub ring: RingSpec,
    pub start: String,
    pub end: String,
    pub steps: Vec<CertStep>,
}

impl MoveCertificate {
    pub fn new(start: &SlicedDiagram) -> MoveCertificate {
        let h = canonical_digest(start);
        MoveCertificate { ring: start.ring, start: h.clone(), end: h, steps: vec![] }
    }

    /// Records `m` taking `cur` to `next`.
    pub fn record(&mut self, cur: &SlicedDiagram, m: Move, next: &SlicedDiagram) {
        let post = canonical_digest(next);
        self.steps.push(CertStep { mv: m, pre: canonical_digest(cur), post: post.clone() });
        self.end = post;
    }

    /// Applies `m` to `cur`, records it and returns the result.
    pub fn step(&mut self, cur: &SlicedDiagram, m: Move) -> RewriteResult<SlicedDiagram> {
        let next = apply_move(cur, &m, false)?;
        self.record(cur, m, &next);
        Ok(next)
    }

    pub fn to_json(&self) -> Json {
        json!({
            "ring": self.ring.to_string(),
            "start": self.start,
            "end": self.end,
            "steps": self.steps.iter().map(|s| {
                let mut v = s.mv.to_json();
                v["pre"] = json!(s.pre);
                v["post"] = json!(s.post);
                v
            }).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Json) -> RewriteResult<MoveCertificate> {
        let bad = |m: &str| RewriteError::Json(format!("certificate: {m}"));
        let s = |k: &str| v.get(k).and_then(Json::as_str).map(str::to_string).ok_or_else(|| bad(k));
        let ring: RingSpec = s("ring")?.parse().map_err(|e: crate::exactalg::ExactError| bad(&e.to_string()))?;
        let steps = v
            .get("steps")
            .and_then(Json::as_array)
            .ok_or_else(|| bad("steps"))?
            .iter()
            .map(|st| {
                let d = |k: &str| st.get(k).and_then(Json::as_str).map(str::to_string).ok_or_else(|| bad(k));
                Ok(CertStep { mv: Move::from_json(ring, st)?, pre: d("pre")?, post: d("post")? })
            })
            .collect::<RewriteResult<Vec<_>>>()?;
        Ok(MoveCertificate { ring, start: s("start")?, end: s("end")?, steps })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub ok: bool,
    /// Index of the first rejected step, if a step was at fault.
    pub failed_step: Option<usize>,
    pub diagnostics: Vec<String>,
}

impl CheckReport {
    fn reject(step: Option<usize>, msg: String) -> CheckReport {
        CheckReport { ok: false, failed_step: step, diagnostics: vec![msg] }
    }
}

/// Replays `cert` from `d0` and confirms it ends at `d1`, with each step's
/// digests matching and equal invariants at the two ends.
pub fn check_certificate(d0: &SlicedDiagram, d1: &SlicedDiagram, cert: &MoveCertificate) -> CheckReport {
    if d0.ring != cert.ring || d1.ring != cert.ring {
        return CheckReport::reject(None, format!("certificate ring {} differs from the diagrams", cert.ring));
    }
    let (h0, h1) = (canonical_digest(d0), canonical_digest(d1));
    if cert.start != h0 {
        return CheckReport::reject(None, "start digest does not match the first diagram".into());
    }
    if cert.end != h1 {
        return CheckReport::reject(None, "end digest does not match the second diagram".into());
    }
    if cert.steps.is_empty() && h0 != h1 {
        return CheckReport::reject(None, "empty certificate between different diagrams".into());
    }
    let mut cur = d0.clone();
    let mut h = h0;
    for (i, st) in cert.steps.iter().enumerate() {
        if st.pre != h {
            return CheckReport::reject(Some(i), format!("step {i}: pre digest breaks the chain"));
        }
        cur = match apply_move(&cur, &st.mv, false) {
            Ok(n) => n,
            Err(e) => return CheckReport::reject(Some(i), format!("step {i}: {e}")),
        };
        h = canonical_digest(&cur);
        if st.post != h {
            return CheckReport::reject(Some(i), format!("step {i}: post digest does not match the result"));
        }
    }
    if h != h1 {
        return CheckReport::reject(None, "replay does not end at the second diagram".into());
    }
    if d0.is_closed() && d1.is_closed() {
        match (planar_invariant(d0), planar_invariant(d1)) {
            (Ok(a), Ok(b)) if a == b => {}
            (Ok(a), Ok(b)) => return CheckReport::reject(None, format!("endpoint invariants differ: {a} vs {b}")),
            (Err(e), _) | (_, Err(e)) => return CheckReport::reject(None, format!("invariant: {e}")),
        }
    }
    CheckReport { ok: true, failed_step: None, diagnostics: vec![] }
}
