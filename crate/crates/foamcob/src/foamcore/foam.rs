use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

use super::zero::{gamma0, ZeroFoam, ZeroPoint};
use super::{FoamError, FoamResult};
use crate::exactalg::{K0Class, Matrix, RingSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexKind {
    /// Two thin edges flow in, the thick edge flows out.
    In,
    /// The thick edge flows in, two thin edges flow out.
    Out,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    Thin0,
    Thin1,
    Thick,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Bottom,
    Top,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Port {
    Vertex { vertex: usize, slot: Slot },
    Open { open: usize },
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Port::Vertex { vertex, slot } => write!(f, "vertex {vertex}.{slot:?}"),
            Port::Open { open } => write!(f, "open end {open}"),
        }
    }
}

/// `iso` is the matrix of `R^{r1} ⊕ R^{r3} → R^{r2}`, thin0 first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub kind: VertexKind,
    pub iso: Matrix,
}

/// `transport` maps the fiber at the source to the fiber at the target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub rank: usize,
    pub source: Port,
    pub target: Port,
    pub transport: Matrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circle {
    pub rank: usize,
    pub monodromy: Matrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpenEnd {
    pub side: Side,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbstractFoam {
    pub ring: RingSpec,
    pub circles: Vec<Circle>,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub open_ends: Vec<OpenEnd>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FoamDiagnostic {
    InvalidRing(String),
    RankMismatch { vertex: usize, thin0: usize, thin1: usize, thick: usize },
    BadShape { location: String, expected: usize, rows: usize, cols: usize },
    NotInvertible { location: String },
    RingMismatch { location: String },
    BadReference { edge: usize, port: Port },
    WrongDirection { edge: usize, port: Port },
    PortReused { port: Port },
    PortUnused { port: Port },
}

impl fmt::Display for FoamDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use FoamDiagnostic::*;
        match self {
            InvalidRing(s) => write!(f, "invalid ring: {s}"),
            RankMismatch { vertex, thin0, thin1, thick } => {
                write!(f, "RankMismatch at vertex {vertex}: {thin0} + {thin1} != {thick}")
            }
            BadShape { location, expected, rows, cols } => {
                write!(f, "{location}: matrix is {rows}x{cols}, expected {expected}x{expected}")
            }
            NotInvertible { location } => write!(f, "NotInvertible: {location}"),
            RingMismatch { location } => write!(f, "{location}: matrix over a different ring"),
            BadReference { edge, port } => write!(f, "edge {edge} refers to missing {port}"),
            WrongDirection { edge, port } => write!(f, "edge {edge} meets {port} against its orientation"),
            PortReused { port } => write!(f, "{port} is used more than once"),
            PortUnused { port } => write!(f, "{port} is not attached"),
        }
    }
}

impl AbstractFoam {
    pub fn new(ring: RingSpec) -> AbstractFoam {
        AbstractFoam { ring, circles: vec![], vertices: vec![], edges: vec![], open_ends: vec![] }
    }

    pub fn circle(ring: RingSpec, monodromy: Matrix) -> AbstractFoam {
        let mut f = AbstractFoam::new(ring);
        f.add_circle(monodromy);
        f
    }

    pub fn add_circle(&mut self, monodromy: Matrix) -> usize {
        self.circles.push(Circle { rank: monodromy.rows(), monodromy });
        self.circles.len() - 1
    }

    pub fn add_vertex(&mut self, kind: VertexKind, iso: Matrix) -> usize {
        self.vertices.push(Vertex { kind, iso });
        self.vertices.len() - 1
    }

    pub fn add_open(&mut self, side: Side) -> usize {
        self.open_ends.push(OpenEnd { side });
        self.open_ends.len() - 1
    }

    pub fn add_edge(&mut self, source: Port, target: Port, transport: Matrix) -> usize {
        self.edges.push(Edge { rank: transport.rows(), source, target, transport });
        self.edges.len() - 1
    }

    pub fn is_closed(&self) -> bool {
        self.open_ends.is_empty()
    }

    /// Edge index attached to every port, in port order.
    pub fn incidence(&self) -> BTreeMap<Port, usize> {
        let mut m = BTreeMap::new();
        for (i, e) in self.edges.iter().enumerate() {
            m.insert(e.source, i);
            m.insert(e.target, i);
        }
        m
    }

    /// `(r1, r3, r2)` read from the attached edges.
    pub fn vertex_ranks(&self, v: usize) -> Option<(usize, usize, usize)> {
        let inc = self.incidence();
        let r = |slot| inc.get(&Port::Vertex { vertex: v, slot }).map(|&e| self.edges[e].rank);
        Some((r(Slot::Thin0)?, r(Slot::Thin1)?, r(Slot::Thick)?))
    }

    pub fn disjoint_union(&self, o: &AbstractFoam) -> FoamResult<AbstractFoam> {
        if self.ring != o.ring {
            return Err(FoamError::Exact(crate::exactalg::ExactError::RingMismatch(self.ring, o.ring)));
        }
        let mut f = self.clone();
        let (nv, no) = (self.vertices.len(), self.open_ends.len());
        let shift = |p: Port| match p {
            Port::Vertex { vertex, slot } => Port::Vertex { vertex: vertex + nv, slot },
            Port::Open { open } => Port::Open { open: open + no },
        };
        f.circles.extend(o.circles.iter().cloned());
        f.vertices.extend(o.vertices.iter().cloned());
        f.open_ends.extend(o.open_ends.iter().cloned());
        for e in &o.edges {
            f.edges.push(Edge { source: shift(e.source), target: shift(e.target), ..e.clone() });
        }
        Ok(f)
    }

    /// The 0-foam on one side of an open foam. A point is positive when the
    /// edge leaves the foam through the top or enters it through the bottom.
    pub fn boundary(&self, side: Side) -> ZeroFoam {
        let mut points = vec![];
        for (i, o) in self.open_ends.iter().enumerate() {
            if o.side != side {
                continue;
            }
            let port = Port::Open { open: i };
            let Some(e) = self.edges.iter().find(|e| e.source == port || e.target == port) else {
                continue;
            };
            let outward = e.target == port;
            let sign = match (side, outward) {
                (Side::Top, true) | (Side::Bottom, false) => 1,
                _ => -1,
            };
            points.push(ZeroPoint { sign, rank: e.rank, label: Some(format!("open{i}")) });
        }
        ZeroFoam { points }
    }

    pub fn to_json(&self) -> Json {
        let circles: Vec<Json> = self
            .circles
            .iter()
            .enumerate()
            .map(|(i, c)| serde_json::json!({"id": i, "rank": c.rank, "monodromy": c.monodromy.to_json()}))
            .collect();
        let vertices: Vec<Json> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| serde_json::json!({"id": i, "kind": v.kind, "iso": v.iso.to_json()}))
            .collect();
        let edges: Vec<Json> = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| {
                serde_json::json!({"id": i, "rank": e.rank, "source": e.source, "target": e.target,
                    "transport": e.transport.to_json()})
            })
            .collect();
        let open: Vec<Json> = self
            .open_ends
            .iter()
            .enumerate()
            .map(|(i, o)| serde_json::json!({"id": i, "side": o.side}))
            .collect();
        serde_json::json!({
            "ring": self.ring.to_string(),
            "circles": circles,
            "vertices": vertices,
            "edges": edges,
            "open_ends": open,
        })
    }

    /// Accepts entries in any order; ids must be `0..n` within each list.
    pub fn from_json(v: &Json) -> FoamResult<AbstractFoam> {
        let raw: RawFoam = serde_json::from_value(v.clone()).map_err(|e| FoamError::Json(e.to_string()))?;
        let ring: RingSpec = raw.ring.parse()?;
        let mut f = AbstractFoam::new(ring);
        for c in sorted(raw.circles, |c| c.id, "circle")? {
            let m = Matrix::from_json(ring, &c.monodromy)?;
            check_rank(c.rank, &m, "circle")?;
            f.circles.push(Circle { rank: c.rank, monodromy: m });
        }
        for x in sorted(raw.vertices, |x| x.id, "vertex")? {
            f.vertices.push(Vertex { kind: x.kind, iso: Matrix::from_json(ring, &x.iso)? });
        }
        for e in sorted(raw.edges, |e| e.id, "edge")? {
            let m = Matrix::from_json(ring, &e.transport)?;
            check_rank(e.rank, &m, "edge")?;
            f.edges.push(Edge { rank: e.rank, source: e.source, target: e.target, transport: m });
        }
        for o in sorted(raw.open_ends, |o| o.id, "open end")? {
            f.open_ends.push(OpenEnd { side: o.side });
        }
        Ok(f)
    }
}

fn check_rank(rank: usize, m: &Matrix, what: &str) -> FoamResult<()> {
    if m.rows() != rank || m.cols() != rank {
        return Err(FoamError::Json(format!("{what} rank {rank} but matrix is {}x{}", m.rows(), m.cols())));
    }
    Ok(())
}

fn sorted<T>(mut v: Vec<T>, id: impl Fn(&T) -> usize, what: &str) -> FoamResult<Vec<T>> {
    v.sort_by_key(|x| id(x));
    for (i, x) in v.iter().enumerate() {
        if id(x) != i {
            return Err(FoamError::Json(format!("{what} ids must be 0..{}", v.len())));
        }
    }
    Ok(v)
}

#[derive(Deserialize)]
struct RawFoam {
    ring: String,
    #[serde(default)]
    circles: Vec<RawCircle>,
    #[serde(default)]
    vertices: Vec<RawVertex>,
    #[serde(default)]
    edges: Vec<RawEdge>,
    #[serde(default)]
    open_ends: Vec<RawOpen>,
}

#[derive(Deserialize)]
struct RawCircle {
    id: usize,
    rank: usize,
    monodromy: Json,
}

#[derive(Deserialize)]
struct RawVertex {
    id: usize,
    kind: VertexKind,
    iso: Json,
}

#[derive(Deserialize)]
struct RawEdge {
    id: usize,
    rank: usize,
    source: Port,
    target: Port,
    transport: Json,
}

#[derive(Deserialize)]
struct RawOpen {
    id: usize,
    side: Side,
}

fn check_square(m: &Matrix, n: usize, ring: RingSpec, loc: String, out: &mut Vec<FoamDiagnostic>) {
    if m.ring() != ring {
        out.push(FoamDiagnostic::RingMismatch { location: loc });
    } else if m.rows() != n || m.cols() != n {
        out.push(FoamDiagnostic::BadShape { location: loc, expected: n, rows: m.rows(), cols: m.cols() });
    } else if !m.is_invertible() {
        out.push(FoamDiagnostic::NotInvertible { location: loc });
    }
}

/// Checks every structural invariant; an empty result means valid.
pub fn validate_abstract(f: &AbstractFoam) -> Vec<FoamDiagnostic> {
    let mut out = vec![];
    if let Err(e) = f.ring.validate() {
        out.push(FoamDiagnostic::InvalidRing(e.to_string()));
        return out;
    }
    for (i, c) in f.circles.iter().enumerate() {
        check_square(&c.monodromy, c.rank, f.ring, format!("circle {i} monodromy"), &mut out);
    }
    let mut used: BTreeMap<Port, usize> = BTreeMap::new();
    for (i, e) in f.edges.iter().enumerate() {
        check_square(&e.transport, e.rank, f.ring, format!("edge {i} transport"), &mut out);
        for (port, is_source) in [(e.source, true), (e.target, false)] {
            match port {
                Port::Vertex { vertex, slot } => {
                    let Some(v) = f.vertices.get(vertex) else {
                        out.push(FoamDiagnostic::BadReference { edge: i, port });
                        continue;
                    };
                    let outgoing = matches!(
                        (v.kind, slot),
                        (VertexKind::In, Slot::Thick) | (VertexKind::Out, Slot::Thin0 | Slot::Thin1)
                    );
                    if outgoing != is_source {
                        out.push(FoamDiagnostic::WrongDirection { edge: i, port });
                    }
                }
                Port::Open { open } => {
                    if open >= f.open_ends.len() {
                        out.push(FoamDiagnostic::BadReference { edge: i, port });
                        continue;
                    }
                }
            }
            *used.entry(port).or_default() += 1;
        }
    }
    for (port, &n) in &used {
        if n > 1 {
            out.push(FoamDiagnostic::PortReused { port: *port });
        }
    }
    let mut expected: Vec<Port> = (0..f.open_ends.len()).map(|open| Port::Open { open }).collect();
    for vertex in 0..f.vertices.len() {
        for slot in [Slot::Thin0, Slot::Thin1, Slot::Thick] {
            expected.push(Port::Vertex { vertex, slot });
        }
    }
    for port in expected {
        if !used.contains_key(&port) {
            out.push(FoamDiagnostic::PortUnused { port });
        }
    }
    for (i, v) in f.vertices.iter().enumerate() {
        if let Some((r1, r3, r2)) = f.vertex_ranks(i) {
            if r1 + r3 != r2 {
                out.push(FoamDiagnostic::RankMismatch { vertex: i, thin0: r1, thin1: r3, thick: r2 });
            } else {
                check_square(&v.iso, r2, f.ring, format!("vertex {i} iso"), &mut out);
            }
        }
    }
    out
}

/// `γ₀(top) − γ₀(bottom)`; zero for every valid foam.
pub fn boundary_delta(f: &AbstractFoam) -> FoamResult<K0Class> {
    let diags = validate_abstract(f);
    if !diags.is_empty() {
        return Err(FoamError::Invalid(diags));
    }
    Ok(K0Class(gamma0(&f.boundary(Side::Top)).0 - gamma0(&f.boundary(Side::Bottom)).0))
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: RingSpec = RingSpec::Rationals;

    fn vp(vertex: usize, slot: Slot) -> Port {
        Port::Vertex { vertex, slot }
    }

    pub(crate) fn theta(r1: usize, r2: usize) -> AbstractFoam {
        let mut f = AbstractFoam::new(Q);
        let out = f.add_vertex(VertexKind::Out, Matrix::identity(Q, r1 + r2));
        let inn = f.add_vertex(VertexKind::In, Matrix::identity(Q, r1 + r2));
        f.add_edge(vp(out, Slot::Thin0), vp(inn, Slot::Thin0), Matrix::identity(Q, r1));
        f.add_edge(vp(out, Slot::Thin1), vp(inn, Slot::Thin1), Matrix::identity(Q, r2));
        f.add_edge(vp(inn, Slot::Thick), vp(out, Slot::Thick), Matrix::identity(Q, r1 + r2));
        f
    }

    #[test]
    fn theta_is_valid() {
        assert!(validate_abstract(&theta(1, 1)).is_empty());
    }

    #[test]
    fn rank_mismatch_reported() {
        let mut f = theta(1, 1);
        f.edges[2] = Edge { rank: 3, transport: Matrix::identity(Q, 3), ..f.edges[2].clone() };
        let d = validate_abstract(&f);
        assert!(d.iter().any(|x| matches!(x, FoamDiagnostic::RankMismatch { .. })), "{d:?}");
    }

    #[test]
    fn singular_circle_reported() {
        let f = AbstractFoam::circle(Q, Matrix::from_i64(Q, &[&[1, 2], &[2, 4]]));
        let d = validate_abstract(&f);
        assert!(matches!(d[..], [FoamDiagnostic::NotInvertible { .. }]), "{d:?}");
    }

    #[test]
    fn unattached_and_reused_ports() {
        let mut f = theta(1, 1);
        f.edges[0].target = vp(1, Slot::Thin1);
        let d = validate_abstract(&f);
        assert!(d.iter().any(|x| matches!(x, FoamDiagnostic::PortReused { .. })));
        assert!(d.iter().any(|x| matches!(x, FoamDiagnostic::PortUnused { .. })));
    }

    #[test]
    fn interval_and_cup_boundaries() {
        let mut f = AbstractFoam::new(Q);
        let b = f.add_open(Side::Bottom);
        let t = f.add_open(Side::Top);
        f.add_edge(Port::Open { open: b }, Port::Open { open: t }, Matrix::identity(Q, 3));
        assert_eq!(boundary_delta(&f).unwrap(), K0Class(0));
        assert_eq!(gamma0(&f.boundary(Side::Top)), K0Class(3));

        let mut cup = AbstractFoam::new(Q);
        let a = cup.add_open(Side::Top);
        let b = cup.add_open(Side::Top);
        cup.add_edge(Port::Open { open: a }, Port::Open { open: b }, Matrix::identity(Q, 2));
        assert_eq!(boundary_delta(&cup).unwrap(), K0Class(0));
        assert_eq!(cup.boundary(Side::Top).points.len(), 2);
    }

    #[test]
    fn json_round_trip() {
        let f = theta(2, 1);
        let j = f.to_json();
        assert_eq!(AbstractFoam::from_json(&j).unwrap(), f);
        let mut shuffled = j.clone();
        shuffled["edges"].as_array_mut().unwrap().reverse();
        assert_eq!(AbstractFoam::from_json(&shuffled).unwrap(), f);
    }
}
