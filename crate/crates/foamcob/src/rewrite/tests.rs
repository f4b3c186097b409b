use super::*;
use crate::diagram::{gamma_bar, parse_diagram, planar_invariant, serialize_diagram, validate_diagram, Dir, Tile};
use crate::exactalg::{k1_of, Matrix, RingSpec};
use random::{random_diagram, Bounds};

const Q: RingSpec = RingSpec::Rationals;

fn q(rows: &[&[i64]]) -> Matrix {
    Matrix::from_i64(Q, rows)
}

fn kinds(d: &SlicedDiagram) -> Vec<(MoveId, String)> {
    enumerate_moves(d).into_iter().map(|m| (m.id, m.params.mode)).collect()
}

fn run(src: &str, m: Move) -> String {
    let d = parse_diagram(src).unwrap();
    serialize_diagram(&apply_move(&d, &m, true).unwrap())
}

#[test]
fn death_is_offered_only_for_trivial_monodromy() {
    let id = gamma_bar(&Matrix::identity(Q, 2)).unwrap();
    assert!(kinds(&id).contains(&(MoveId::CircleDeath, String::new())));
    let five = gamma_bar(&q(&[&[5]])).unwrap();
    assert!(!kinds(&five).iter().any(|k| k.0 == MoveId::CircleDeath));
}

#[test]
fn saddle_pair_is_offered() {
    let d = parse_diagram("ring Q\ncup_w 2@1\nfork 1 1 u@1\njoin 1 1 u@1\nfork 1 1 u@1\njoin 1 1 u@1\ncap_w 2@1\n").unwrap();
    let ks = kinds(&d);
    assert!(ks.contains(&(MoveId::SingSaddle, "remove".into())));
    assert!(ks.contains(&(MoveId::SingCap, String::new())));
}

#[test]
fn births_on_the_empty_diagram() {
    let e = SlicedDiagram::new(Q);
    let births: Vec<_> = enumerate_moves(&e).into_iter().filter(|m| m.id == MoveId::CircleBirth).collect();
    assert_eq!(births.len(), 2 * (DEFAULT_RANK_BOUND + 1));
    let low = enumerate_moves_bounded(&e, 0);
    assert_eq!(low.iter().filter(|m| m.id == MoveId::CircleBirth).count(), 2);
}

#[test]
fn enumeration_is_sorted_and_applicable() {
    let d = random_diagram(3, &Bounds::default(), Q);
    let ms = enumerate_moves(&d);
    assert!(!ms.is_empty());
    for w in ms.windows(2) {
        assert!((w[0].id, w[0].slice, w[0].pos) <= (w[1].id, w[1].slice, w[1].pos));
    }
    for m in &ms {
        apply_move(&d, m, true).unwrap();
    }
}

#[test]
fn kink_becomes_swap_circle() {
    let src = "ring Q\ncup_w 1@1\ncup_w 1@2\ncross 1 1 u@1\ncap_w 1@2\ncap_w 1@1\n";
    let out = run(src, Move::new(MoveId::R1, 1, 0, Params::mode("remove")));
    assert_eq!(out, "ring Q\ncup_w 1@1\ncup_w 2@1\ngate 2 u [0,1;1,0]@1\ncap_w 2@1\ncap_w 1@1\n");
}

#[test]
fn bubble_collapses() {
    let src = "ring Q\ncup_w 2@1\nfork 1 1 u [1,1;0,1]@1\njoin 1 1 u [1,1;0,1]@1\ncap_w 2@1\n";
    let out = run(src, Move::new(MoveId::SingCap, 1, 0, Params::default()));
    assert_eq!(out, "ring Q\ncup_w 2@1\ncap_w 2@1\n");
    let bad = parse_diagram("ring Q\ncup_w 2@1\nfork 1 1 u [1,1;0,1]@1\njoin 1 1 u@1\ncap_w 2@1\n").unwrap();
    let err = apply_move(&bad, &Move::new(MoveId::SingCap, 1, 0, Params::default()), true).unwrap_err();
    assert!(matches!(err, RewriteError::PreconditionFailed { .. }));
}

#[test]
fn circles_merge_with_block_sum() {
    let src = "ring Q\ncup_w 1@1\ngate 1 u [2]@1\ncap_w 1@1\ncup_w 1@1\ngate 1 u [3]@1\ncap_w 1@1\n";
    let out = run(src, Move::new(MoveId::CircleMerge, 0, 0, Params::default()));
    assert_eq!(out, "ring Q\ncup_w 2@1\ngate 2 u [2,0;0,3]@1\ncap_w 2@1\n");
}

#[test]
fn saddle_reconnects() {
    let src = "ring Q\ncup_w 2@1\ncup_w 2@3\ncap_e 2@2\ncap_w 2@1\n";
    let d = parse_diagram(src).unwrap();
    let out = apply_move(&d, &Move::new(MoveId::Saddle, 2, 1, Params::mode("insert")), true).unwrap();
    assert_eq!(out.slices.len(), 6);
    let back = apply_move(&out, &Move::new(MoveId::Saddle, 2, 1, Params::mode("remove")), true).unwrap();
    assert_eq!(back, d);
}

#[test]
fn reversal_keeps_the_monodromy() {
    let src = "ring Q\ncup_w 1@1\ngate 1 u [7]@1\ncap_w 1@1\n";
    let out = run(src, Move::new(MoveId::CircleReverse, 0, 0, Params::mode("to_ccw")));
    assert_eq!(out, "ring Q\ncup_e 1@1\ngate 1 u [7]@2\ncap_e 1@1\n");
}

#[test]
fn split_and_transport_round_trip() {
    let src = "ring Q\ncup_w 1@1\ncup_w 2@3\ngate 1 u [4]@1\ncap_w 2@3\ncap_w 1@1\n";
    let d = parse_diagram(src).unwrap();
    let split = apply_move(&d, &Move::new(MoveId::SplitMonodromy, 2, 0, Params::mode("gate")), true).unwrap();
    let moved = apply_move(&split, &Move::new(MoveId::CircleAcrossEdge, 2, 1, Params::mode("right")), true).unwrap();
    let back = apply_move(&moved, &Move::new(MoveId::CircleAcrossEdge, 2, 2, Params::mode("left")), true).unwrap();
    let home = apply_move(&back, &Move::new(MoveId::SplitMonodromy, 2, 0, Params::mode("absorb_gate")), true).unwrap();
    assert_eq!(home, d);
}

#[test]
fn bad_locations_fail_cleanly() {
    let d = gamma_bar(&q(&[&[5]])).unwrap();
    for id in MoveId::ALL {
        let err = apply_move(&d, &Move::new(id, 7, 9, Params::mode("remove")), true).unwrap_err();
        assert!(matches!(err, RewriteError::PreconditionFailed { .. }), "{id}");
    }
}

#[test]
fn move_json_round_trips() {
    let m = Move::new(MoveId::SingCup, 3, 1, Params::default().with_ranks(&[1, 2]).with_matrices(vec![q(&[&[1, 0, 0], &[0, 2, 0], &[0, 0, 1]])]));
    assert_eq!(Move::from_json(Q, &m.to_json()).unwrap(), m);
    assert_eq!("R3B".parse::<MoveId>().unwrap(), MoveId::R3B);
    assert!("R9".parse::<MoveId>().is_err());
}

#[test]
fn normalize_examples() {
    for a in [q(&[&[2, 1], &[1, 1]]), q(&[&[0, 3], &[1, 0]])] {
        let d = gamma_bar(&a).unwrap();
        let out = normalize(&d).unwrap();
        assert_eq!(k1_of(&out.monodromy).unwrap(), k1_of(&a).unwrap());
    }
    let theta = parse_diagram("ring Q\ncup_w 2@1\nfork 1 1 u [1,2;3,4]@1\ngate 1 u [5]@2\njoin 1 1 u@1\ncap_w 2@1\n").unwrap();
    let out = normalize(&theta).unwrap();
    assert_eq!(k1_of(&out.monodromy).unwrap(), planar_invariant(&theta).unwrap());
    assert!(check_certificate(&theta, &out.target, &out.cert).ok);
    let e = normalize(&SlicedDiagram::new(Q)).unwrap();
    assert_eq!((e.monodromy.rows(), e.cert.steps.len()), (0, 0));
    let open = parse_diagram("ring Q\nbottom 1 u\ngate 1 u [2]@1\n").unwrap();
    assert!(normalize(&open).is_err());
}

#[test]
fn normalize_legs_of_rank_zero() {
    // Seeds whose diagrams end with loops joined by legs of rank zero.
    for (seed, ring) in [(689, Q), (1272, Q), (1339, RingSpec::Integers), (2200, RingSpec::PrimeField(7))] {
        let d = random_diagram(seed, &Bounds::default(), ring);
        let out = normalize(&d).unwrap();
        assert_eq!(k1_of(&out.monodromy).unwrap(), planar_invariant(&d).unwrap());
        assert!(check_certificate(&d, &out.target, &out.cert).ok);
    }
}

#[test]
fn rank_zero_pair_cancels() {
    let d = parse_diagram("ring Q\ncup_w 2@1\ncup_e 1@1\nfork 0 2 u@3\njoin 1 0 u@2\ncap_e 1@1\ncap_w 2@1\n").unwrap();
    let out = normalize(&d).unwrap();
    assert_eq!(k1_of(&out.monodromy).unwrap(), planar_invariant(&d).unwrap());
    assert!(out.cert.steps.iter().any(|s| s.mv.id == MoveId::VertexSlide && s.mv.params.mode == "reverse"));
}

#[test]
fn splits_rotate() {
    let d = parse_diagram("ring Q\nbottom 2 v; 1 v; 3 u\njoin 2 1 v [0,1,0;0,0,1;1,0,0]@1\ncap_e 3@1\n").unwrap();
    let m = Move::new(MoveId::IsotopySlide, 0, 0, Params::mode("rotate"));
    let e = apply_move(&d, &m, false).unwrap();
    assert!(matches!(e.slices[0].tiles[0].tile, Tile::Fork { r1: 1, r2: 2, dir: Dir::Up, .. }));
    assert_eq!(e.slices.len(), 3);
}

#[test]
fn certificates_reject_tampering() {
    let d = random_diagram(5, &Bounds::default(), Q);
    let out = normalize(&d).unwrap();
    let cert = MoveCertificate::from_json(&out.cert.to_json()).unwrap();
    assert_eq!(cert, out.cert);
    assert!(check_certificate(&d, &out.target, &cert).ok);
    let i = cert.steps.len() / 2;
    let mut bad = cert.clone();
    bad.steps[i].mv.slice += 1;
    let rep = check_certificate(&d, &out.target, &bad);
    assert_eq!((rep.ok, rep.failed_step), (false, Some(i)));
    let mut bad = cert.clone();
    let h = &mut bad.steps[i].post;
    let c = if h.ends_with('0') { '1' } else { '0' };
    h.pop();
    h.push(c);
    assert_eq!(check_certificate(&d, &out.target, &bad).failed_step, Some(i));
}

#[test]
fn certificates_need_equal_invariants() {
    let a = gamma_bar(&q(&[&[2]])).unwrap();
    let b = gamma_bar(&q(&[&[3]])).unwrap();
    let mut cert = MoveCertificate::new(&a);
    cert.end = canonical_digest(&b);
    assert!(!check_certificate(&a, &b, &cert).ok);
    let empty = MoveCertificate::new(&a);
    assert!(check_certificate(&a, &a, &empty).ok);
}

#[test]
fn random_diagrams_are_seeded_and_bounded() {
    let b = Bounds { max_slices: 10, max_rank: 2, max_strands: 4 };
    for seed in 0..50 {
        let d = random_diagram(seed, &b, Q);
        assert_eq!(d, random_diagram(seed, &b, Q));
        assert!(d.slices.len() <= 10);
        assert!(validate_diagram(&d).is_empty());
        assert!(d.is_closed());
        let states = d.states().unwrap();
        assert!(states.iter().all(|s| s.len() <= 4 && s.iter().all(|x| x.rank <= 2)));
    }
}

#[test]
fn relations_are_certified() {
    let a = q(&[&[1, 2], &[3, 5]]);
    let b = q(&[&[0, 1], &[-1, 4]]);
    let rels = [
        relations::pants(&a, &b).unwrap(),
        relations::tube(&a).unwrap(),
        relations::commutator(&a, &b).unwrap(),
        relations::tripod(&a, &q(&[&[7]])).unwrap(),
    ];
    for r in &rels {
        let rep = check_certificate(&r.start, &r.end, &r.cert);
        assert!(rep.ok, "{}: {:?}", r.name, rep.diagnostics);
        assert_eq!(planar_invariant(&r.start).unwrap(), planar_invariant(&r.end).unwrap());
    }
}
