//! The acceptance suites, shared by the `acceptance` test target and the
//! `selftest` command. Every check is exact; each suite also has a time
//! limit.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value as Json};

use crate::diagram::{
    braid_closure_diagram, forget, gamma_bar, planar_invariant, tau_prime, Dir, Slice, SlicedDiagram, Strand,
};
use crate::exactalg::{k1_of, k1_project_quotient, tau, K0Class, K1Class, Matrix, RingSpec, Scalar};
use crate::foamcore::random::{random_abstract_foam, random_braid_word, random_invertible};
use crate::foamcore::{
    abstract_invariant, assemble_fb, boundary_delta, braid_close, canonical_strong_cut, closure_k1, gamma0,
    markov_stabilize, Side, ZeroFoam,
};
use crate::rewrite::random::{random_diagram, random_instance, Bounds};
use crate::rewrite::{apply_move, check_certificate, normalize, relations, MoveCertificate, MoveId};

pub const SUITES: usize = 8;

/// Outcome of one suite.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub id: usize,
    pub name: &'static str,
    pub rings: Vec<RingSpec>,
    pub count: usize,
    pub elapsed: Duration,
    pub limit: Duration,
    pub failure: Option<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none() && self.elapsed <= self.limit
    }

    /// One line: verdict, id, checks run, time against the limit.
    pub fn line(&self) -> String {
        let rings: Vec<String> = self.rings.iter().map(|r| r.to_string()).collect();
        let mut s = format!(
            "{} criterion {}: {} [{}] checks={} time={:.2}s limit={}s",
            if self.passed() { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            rings.join(","),
            self.count,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs()
        );
        if let Some(f) = &self.failure {
            s.push_str(&format!(" error: {f}"));
        } else if self.elapsed > self.limit {
            s.push_str(" error: time limit exceeded");
        }
        s
    }

    pub fn to_json(&self) -> Json {
        json!({
            "criterion": self.id,
            "name": self.name,
            "rings": self.rings.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
            "pass": self.passed(),
            "checks": self.count,
            "seconds": self.elapsed.as_secs_f64(),
            "limit_seconds": self.limit.as_secs(),
            "error": self.failure,
        })
    }
}

const Q: RingSpec = RingSpec::Rationals;
const F7: RingSpec = RingSpec::PrimeField(7);

fn info(id: usize) -> (&'static str, u64, Vec<RingSpec>) {
    match id {
        1 => ("K0 section map", 5, vec![Q, F7, RingSpec::Integers]),
        2 => ("f_B automorphism and cut refinement", 30, vec![Q, F7]),
        3 => ("move soundness", 120, vec![Q, F7]),
        4 => ("circle section", 10, vec![Q, F7]),
        5 => ("normalization oracle", 300, vec![Q, F7]),
        6 => ("quotient square and Markov", 60, vec![Q, F7]),
        7 => ("defining relations", 10, vec![Q, F7]),
        _ => ("circle sign and zigzags", 5, vec![Q, F7]),
    }
}

/// Runs suite `id` (1..=8). `ring` replaces the suite's default rings.
pub fn run_suite(id: usize, seed: u64, ring: Option<RingSpec>) -> SuiteReport {
    let (name, limit, default) = info(id);
    let rings = ring.map_or(default, |r| vec![r]);
    let start = Instant::now();
    let mut count = 0;
    let mut failure = None;
    for &r in &rings {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (id as u64) << 32);
        let res = match id {
            1 => k0_section(&mut rng, r),
            2 => cut_refinement(&mut rng, r),
            3 => soundness(&mut rng, r),
            4 => circle_section(&mut rng, r),
            5 => normalization(&mut rng, r, seed),
            6 => quotient_square(&mut rng, r, seed),
            7 => defining_relations(&mut rng, r),
            _ => circle_sign(&mut rng, r),
        };
        match res {
            Ok(n) => count += n,
            Err(e) => {
                failure = Some(format!("{r}: {e}"));
                break;
            }
        }
    }
    SuiteReport { id, name, rings, count, elapsed: start.elapsed(), limit: Duration::from_secs(limit), failure }
}

type Check = Result<usize, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Independent signed rank count of a row of strands.
fn signed_rank(st: &[Strand]) -> K0Class {
    K0Class(st.iter().map(|x| if x.dir == Dir::Up { x.rank as i64 } else { -(x.rank as i64) }).sum())
}

fn window(d: &SlicedDiagram, states: &[Vec<Strand>], a: usize, b: usize) -> SlicedDiagram {
    let slices: Vec<Slice> = d.slices[a..b].to_vec();
    SlicedDiagram { ring: d.ring, bottom: states[a].clone(), slices }
}

fn k0_section(rng: &mut ChaCha8Rng, ring: RingSpec) -> Check {
    // The caption equality: four points below and one above agree in K₀.
    for _ in 0..50 {
        let (r0, r1, r2) = (rng.gen_range(0..6), rng.gen_range(0..6), rng.gen_range(0..6));
        let bottom = ZeroFoam::new(&[(1, r0), (-1, r0), (1, r1 + r2), (-1, r2)]);
        let top = ZeroFoam::new(&[(1, r1)]);
        ensure(gamma0(&bottom) == gamma0(&top), || format!("caption equality fails for {r0},{r1},{r2}"))?;
        ensure(gamma0(&bottom.union(&bottom.negate())) == K0Class(0), || "negation".into())?;
    }
    let cap = ZeroFoam::new(&[(1, 3), (-1, 3), (1, 5), (-1, 2)]);
    ensure(gamma0(&cap) == K0Class(3), || "caption example".into())?;

    let bounds = Bounds { max_slices: 12, ..Bounds::default() };
    let mut n = 0;
    while n < 500 {
        let d = random_diagram(rng.gen(), &bounds, ring);
        let states = d.states().map_err(|e| e.1)?;
        let len = d.slices.len();
        let mut cuts = [rng.gen_range(0..=len), rng.gen_range(0..=len), rng.gen_range(0..=len)];
        cuts.sort();
        let [a, b, c] = cuts;
        let (lo, hi, whole) = (window(&d, &states, a, b), window(&d, &states, b, c), window(&d, &states, a, c));
        let (flo, fhi, fw) = (forget(&lo).map_err(s)?, forget(&hi).map_err(s)?, forget(&whole).map_err(s)?);
        for f in [&flo, &fhi, &fw] {
            ensure(boundary_delta(f).map_err(s)? == K0Class(0), || "boundary_delta is nonzero".into())?;
        }
        let mid = signed_rank(&states[b]);
        ensure(gamma0(&flo.boundary(Side::Top)) == mid, || "top of the lower piece".into())?;
        ensure(gamma0(&fhi.boundary(Side::Bottom)) == mid, || "bottom of the upper piece".into())?;
        ensure(gamma0(&fw.boundary(Side::Bottom)) == signed_rank(&states[a]), || "composite bottom".into())?;
        ensure(gamma0(&fw.boundary(Side::Top)) == signed_rank(&states[c]), || "composite top".into())?;
        n += 1;
    }
    Ok(n + 50)
}

fn cut_refinement(rng: &mut ChaCha8Rng, ring: RingSpec) -> Check {
    for i in 0..300 {
        let f = random_abstract_foam(rng, ring, 6, 3);
        let mut cut = canonical_strong_cut(&f);
        let det0 = assemble_fb(&f, &cut).map_err(s)?.det().map_err(s)?;
        ensure(det0.is_unit(), || format!("foam {i}: det f_B is not a unit"))?;
        let mut expect = K1Class::new(det0).map_err(s)?;
        let sites = f.edges.len() + f.circles.len();
        if sites == 0 {
            continue;
        }
        for _ in 0..rng.gen_range(1..=4) {
            let j = rng.gen_range(0..sites);
            let r = if j < f.edges.len() {
                cut.refine_edge(j);
                f.edges[j].rank
            } else {
                cut.refine_circle(j - f.edges.len());
                f.circles[j - f.edges.len()].rank
            };
            expect = expect.mul(&tau(r, ring)).map_err(s)?;
        }
        let det1 = assemble_fb(&f, &cut).map_err(s)?.det().map_err(s)?;
        ensure(K1Class::new(det1).map_err(s)? == expect, || format!("foam {i}: refinement factor is wrong"))?;
    }
    Ok(300)
}

fn soundness(rng: &mut ChaCha8Rng, ring: RingSpec) -> Check {
    let mut n = 0;
    for id in MoveId::ALL {
        for i in 0..100 {
            let (d, m) = random_instance(rng, ring, id);
            let before = planar_invariant(&d).map_err(s)?;
            let after = apply_move(&d, &m, false).map_err(|e| format!("{id} instance {i}: {e}"))?;
            let after = planar_invariant(&after).map_err(s)?;
            ensure(before == after, || format!("{id} instance {i}: {before} became {after}"))?;
            n += 1;
        }
    }
    Ok(n)
}

/// Leibniz expansion, kept apart from the elimination used by the library.
fn leibniz(m: &Matrix) -> Scalar {
    fn go(m: &Matrix, row: usize, used: &mut Vec<bool>) -> Scalar {
        let n = m.rows();
        if row == n {
            return Scalar::one(m.ring());
        }
        let mut acc = Scalar::zero(m.ring());
        let mut sign = true;
        for c in 0..n {
            if used[c] {
                continue;
            }
            used[c] = true;
            let t = m.get(row, c).mul(&go(m, row + 1, used));
            used[c] = false;
            acc = if sign { acc.add(&t) } else { acc.sub(&t) };
            sign = !sign;
        }
        acc
    }
    go(m, 0, &mut vec![false; m.rows()])
}

fn circle_section(rng: &mut ChaCha8Rng, ring: RingSpec) -> Check {
    for i in 0..100 {
        let n = rng.gen_range(0..=4);
        let a = random_invertible(rng, ring, n);
        let d = gamma_bar(&a).map_err(s)?;
        let got = planar_invariant(&d).map_err(s)?;
        let want = K1Class::new(leibniz(&a)).map_err(s)?;
        ensure(got == want, || format!("matrix {i}: {got} but det is {want}"))?;
    }
    Ok(100)
}

fn corpus(ring: RingSpec, seed: u64) -> Vec<SlicedDiagram> {
    (0..200).map(|i| random_diagram(seed.wrapping_mul(1000).wrapping_add(i), &Bounds::default(), ring)).collect()
}

fn flip_hex(h: &mut String, at: usize) {
    let i = at % h.len();
    let c = h.as_bytes()[i];
    let n = if c == b'0' { '1' } else { '0' };
    h.replace_range(i..i + 1, &n.to_string());
}

fn mutate(cert: &MoveCertificate, kind: usize, rng: &mut ChaCha8Rng) -> MoveCertificate {
    let mut c = cert.clone();
    let i = rng.gen_range(0..c.steps.len());
    let st = &mut c.steps[i];
    match kind % 4 {
        0 if rng.gen_bool(0.5) => flip_hex(&mut st.pre, rng.gen()),
        0 => flip_hex(&mut st.post, rng.gen()),
        1 => st.mv.slice += 1,
        2 => st.mv.pos += 1,
        _ => {
            let ids = MoveId::ALL;
            let j = ids.iter().position(|&x| x == st.mv.id).unwrap_or(0);
            st.mv.id = ids[(j + 1 + rng.gen_range(0..ids.len() - 1)) % ids.len()];
        }
    }
    c
}

fn normalization(rng: &mut ChaCha8Rng, ring: RingSpec, seed: u64) -> Check {
    let mut kept = vec![];
    for (i, d) in corpus(ring, seed).into_iter().enumerate() {
        ensure(d.slices.len() <= 15, || format!("diagram {i} has {} slices", d.slices.len()))?;
        let out = normalize(&d).map_err(|e| format!("diagram {i}: {e}"))?;
        let want = planar_invariant(&d).map_err(s)?;
        let got = k1_of(&out.monodromy).map_err(s)?;
        ensure(got == want, || format!("diagram {i}: normal form gives {got}, invariant is {want}"))?;
        let rep = check_certificate(&d, &out.target, &out.cert);
        ensure(rep.ok, || format!("diagram {i}: certificate rejected: {:?}", rep.diagnostics))?;
        if !out.cert.steps.is_empty() {
            kept.push((d, out));
        }
    }
    ensure(!kept.is_empty(), || "no certificate has steps".into())?;
    for k in 0..100 {
        let (d, out) = &kept[k % kept.len()];
        let bad = mutate(&out.cert, k, rng);
        ensure(!check_certificate(d, &out.target, &bad).ok, || format!("mutation {k} was accepted"))?;
    }
    Ok(300)
}

fn quotient_square(rng: &mut ChaCha8Rng, ring: RingSpec, seed: u64) -> Check {
    for (i, d) in corpus(ring, seed).iter().enumerate() {
        let planar = k1_project_quotient(&planar_invariant(d).map_err(s)?);
        let abs = abstract_invariant(&forget(d).map_err(s)?).map_err(s)?;
        ensure(planar == abs, || format!("diagram {i}: square does not commute"))?;
    }
    for i in 0..100 {
        let w = random_braid_word(rng, ring, 3, 3, 6);
        let m: Vec<Matrix> = w.bottom_ranks.iter().map(|&r| random_invertible(rng, ring, r)).collect();
        let base = closure_k1(&w, &m).map_err(s)?;
        let planar = planar_invariant(&braid_closure_diagram(&w, &m).map_err(s)?).map_err(s)?;
        ensure(planar == base, || format!("word {i}: planar closure gives {planar}, expected {base}"))?;
        let st = markov_stabilize(&w).map_err(s)?;
        let rn = *w.bottom_ranks.last().expect("nonempty word");
        let mut ms = m.clone();
        ms.push(Matrix::identity(ring, rn));
        let full = closure_k1(&st, &ms).map_err(s)?;
        let want = base.mul(&tau(rn, ring)).map_err(s)?;
        ensure(full == want, || format!("word {i}: stabilized closure gives {full}, expected {want}"))?;
        let planar = planar_invariant(&braid_closure_diagram(&st, &ms).map_err(s)?).map_err(s)?;
        ensure(planar == want, || format!("word {i}: stabilized planar closure gives {planar}"))?;
        let q0 = abstract_invariant(&braid_close(&w, &m).map_err(s)?).map_err(s)?;
        let q1 = abstract_invariant(&braid_close(&st, &ms).map_err(s)?).map_err(s)?;
        ensure(q0 == q1, || format!("word {i}: stabilization changes the quotient"))?;
    }
    Ok(300)
}

fn defining_relations(rng: &mut ChaCha8Rng, ring: RingSpec) -> Check {
    let mut n = 0;
    for _ in 0..10 {
        let r = rng.gen_range(1..=3);
        let (a, b) = (random_invertible(rng, ring, r), random_invertible(rng, ring, r));
        let rc = rng.gen_range(0..=3);
        let c = random_invertible(rng, ring, rc);
        let rels = [
            relations::pants(&a, &b),
            relations::tube(&a),
            relations::commutator(&a, &b),
            relations::tripod(&a, &c),
        ];
        for rel in rels {
            let rel = rel.map_err(s)?;
            let rep = check_certificate(&rel.start, &rel.end, &rel.cert);
            ensure(rep.ok, || format!("{}: {:?}", rel.name, rep.diagnostics))?;
            let (x, y) = (planar_invariant(&rel.start).map_err(s)?, planar_invariant(&rel.end).map_err(s)?);
            ensure(x == y, || format!("{}: {x} vs {y}", rel.name))?;
            n += 1;
        }
    }
    Ok(n)
}

fn circle_sign(rng: &mut ChaCha8Rng, ring: RingSpec) -> Check {
    for r in 0..=5 {
        let d = gamma_bar(&Matrix::identity(ring, r)).map_err(s)?;
        let t = tau_prime(&d).map_err(s)?;
        ensure(t == tau(r, ring), || format!("rank {r}: tau' is {t}"))?;
    }
    for i in 0..50 {
        let (d, m) = random_instance(rng, ring, MoveId::IsotopyZigzag);
        let e = apply_move(&d, &m, false).map_err(|e| format!("zigzag {i}: {e}"))?;
        let (x, y) = (planar_invariant(&d).map_err(s)?, planar_invariant(&e).map_err(s)?);
        ensure(x == y, || format!("zigzag {i} ({}): {x} vs {y}", m.params.mode))?;
    }
    Ok(56)
}
