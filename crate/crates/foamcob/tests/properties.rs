use foamcob::diagram::{
    diagram_from_json, diagram_to_json, disjoint_union, forget, gamma_bar, parse_diagram, planar_invariant,
    reflect_reverse, serialize_diagram, validate_diagram, Slice,
};
use foamcob::exactalg::{det, inverse, k1_mul, k1_of, k1_project_quotient, tau, Matrix, RingSpec, Scalar};
use foamcob::foamcore::random::{random_abstract_foam, random_invertible, random_scalar};
use foamcob::foamcore::{
    abstract_invariant, assemble_fb, boundary_delta, canonical_strong_cut, gamma0, AbstractFoam, ZeroFoam,
};
use foamcob::rewrite::random::{random_diagram, random_instance, Bounds};
use foamcob::rewrite::{apply_move, check_certificate, normalize, MoveId, RewriteError};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ring() -> impl Strategy<Value = RingSpec> {
    prop_oneof![
        Just(RingSpec::Rationals),
        Just(RingSpec::PrimeField(2)),
        Just(RingSpec::PrimeField(7)),
        Just(RingSpec::Integers),
        Just(RingSpec::IntegersMod(12)),
    ]
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn any_matrix(r: &mut ChaCha8Rng, ring: RingSpec, n: usize) -> Matrix {
    let rows = (0..n).map(|_| (0..n).map(|_| random_scalar(r, ring)).collect()).collect();
    Matrix::from_rows(ring, rows).unwrap()
}

fn small() -> Bounds {
    Bounds { max_slices: 10, max_rank: 2, max_strands: 5 }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn det_is_multiplicative(ring in ring(), n in 0usize..=5, seed: u64) {
        let mut r = rng(seed);
        let a = any_matrix(&mut r, ring, n);
        let b = any_matrix(&mut r, ring, n);
        prop_assert_eq!(det(&a.mul(&b).unwrap()).unwrap(), det(&a).unwrap().mul(&det(&b).unwrap()));
    }

    #[test]
    fn inverse_is_two_sided(ring in ring(), n in 0usize..=5, seed: u64) {
        let a = random_invertible(&mut rng(seed), ring, n);
        let ai = inverse(&a).unwrap();
        prop_assert!(ai.mul(&a).unwrap().is_identity());
        prop_assert!(a.mul(&ai).unwrap().is_identity());
    }

    #[test]
    fn tau_is_an_involution_and_a_block_swap(ring in ring(), r in 0usize..=6) {
        let t = tau(r, ring);
        prop_assert!(k1_mul(&t, &t).unwrap().is_identity());
        prop_assert_eq!(t.unit(), &det(&Matrix::block_swap(ring, r, r)).unwrap());
    }

    #[test]
    fn quotient_is_a_homomorphism_with_kernel_pm1(ring in ring(), seed: u64) {
        let mut r = rng(seed);
        let a = k1_of(&random_invertible(&mut r, ring, 2)).unwrap();
        let b = k1_of(&random_invertible(&mut r, ring, 3)).unwrap();
        let q = k1_project_quotient(&k1_mul(&a, &b).unwrap());
        prop_assert_eq!(q, k1_project_quotient(&a).mul(&k1_project_quotient(&b)).unwrap());
        let minus = k1_of(&Matrix::scalar(Scalar::from_i64(ring, -1))).unwrap();
        prop_assert!(k1_project_quotient(&minus).is_identity());
        let trivial = k1_project_quotient(&a).is_identity();
        let pm1 = a.unit().is_one() || a.unit().neg().is_one();
        prop_assert_eq!(trivial, pm1);
    }

    #[test]
    fn f_b_is_invertible_and_refinement_costs_tau(ring in ring(), seed: u64) {
        let mut r = rng(seed);
        let f = random_abstract_foam(&mut r, ring, 4, 2);
        let cut = canonical_strong_cut(&f);
        let d0 = assemble_fb(&f, &cut).unwrap().det().unwrap();
        prop_assert!(d0.is_unit());
        if !f.edges.is_empty() {
            let e = r.gen_range(0..f.edges.len());
            let mut fine = cut.clone();
            fine.refine_edge(e);
            let d1 = assemble_fb(&f, &fine).unwrap().det().unwrap();
            prop_assert_eq!(d1, d0.mul(tau(f.edges[e].rank, ring).unit()));
        }
        if !f.circles.is_empty() {
            let c = r.gen_range(0..f.circles.len());
            let mut fine = cut.clone();
            fine.refine_circle(c);
            let d1 = assemble_fb(&f, &fine).unwrap().det().unwrap();
            prop_assert_eq!(d1, d0.mul(tau(f.circles[c].rank, ring).unit()));
        }
    }

    #[test]
    fn abstract_invariant_respects_union_and_tripods(ring in ring(), seed: u64) {
        let mut r = rng(seed);
        let f = random_abstract_foam(&mut r, ring, 3, 2);
        let g = random_abstract_foam(&mut r, ring, 3, 2);
        let fg = f.disjoint_union(&g).unwrap();
        let (qf, qg) = (abstract_invariant(&f).unwrap(), abstract_invariant(&g).unwrap());
        prop_assert_eq!(abstract_invariant(&fg).unwrap(), qf.mul(&qg).unwrap());
        prop_assert_eq!(boundary_delta(&f).unwrap().0, 0);

        let (a1, a3) = (random_invertible(&mut r, ring, 2), random_invertible(&mut r, ring, 1));
        let two = AbstractFoam::circle(ring, a1.clone()).disjoint_union(&AbstractFoam::circle(ring, a3.clone())).unwrap();
        let one = AbstractFoam::circle(ring, a1.block_direct_sum(&a3).unwrap());
        prop_assert_eq!(abstract_invariant(&two).unwrap(), abstract_invariant(&one).unwrap());
    }

    #[test]
    fn gamma0_is_additive_and_odd(points in prop::collection::vec((prop::bool::ANY, 0usize..6), 0..8),
                                  more in prop::collection::vec((prop::bool::ANY, 0usize..6), 0..8)) {
        let z = |ps: &[(bool, usize)]| ZeroFoam::new(&ps.iter().map(|&(s, r)| (if s { 1 } else { -1 }, r)).collect::<Vec<_>>());
        let (a, b) = (z(&points), z(&more));
        prop_assert_eq!(gamma0(&a.union(&b)).0, gamma0(&a).0 + gamma0(&b).0);
        prop_assert_eq!(gamma0(&a.negate()).0, -gamma0(&a).0);
    }

    #[test]
    fn gamma_bar_realizes_det(ring in ring(), n in 0usize..=4, seed: u64) {
        let a = random_invertible(&mut rng(seed), ring, n);
        prop_assert_eq!(planar_invariant(&gamma_bar(&a).unwrap()).unwrap(), k1_of(&a).unwrap());
    }

    #[test]
    fn planar_invariant_under_diagram_operations(ring in ring(), s1: u64, s2: u64, at in 0usize..32) {
        let d1 = random_diagram(s1, &small(), ring);
        let d2 = random_diagram(s2, &small(), ring);
        let (i1, i2) = (planar_invariant(&d1).unwrap(), planar_invariant(&d2).unwrap());
        prop_assert_eq!(planar_invariant(&disjoint_union(&d1, &d2).unwrap()).unwrap(), k1_mul(&i1, &i2).unwrap());
        prop_assert_eq!(k1_mul(&planar_invariant(&reflect_reverse(&d1).unwrap()).unwrap(), &i1).unwrap().is_identity(), true);

        let mut padded = d1.clone();
        padded.slices.insert(at % (d1.slices.len() + 1), Slice { tiles: vec![] });
        prop_assert_eq!(planar_invariant(&padded).unwrap(), i1.clone());

        let abs = abstract_invariant(&forget(&d1).unwrap()).unwrap();
        prop_assert_eq!(k1_project_quotient(&i1), abs);
    }

    #[test]
    fn text_and_json_round_trip(ring in ring(), seed: u64) {
        let d = random_diagram(seed, &Bounds::default(), ring);
        prop_assert!(validate_diagram(&d).is_empty());
        prop_assert_eq!(&parse_diagram(&serialize_diagram(&d)).unwrap(), &d);
        prop_assert_eq!(&diagram_from_json(&diagram_to_json(&d)).unwrap(), &d);
    }

    #[test]
    fn random_diagrams_are_deterministic(ring in ring(), seed: u64) {
        prop_assert_eq!(random_diagram(seed, &Bounds::default(), ring), random_diagram(seed, &Bounds::default(), ring));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn moves_keep_the_invariant(ring in ring(), seed: u64, k in 0usize..MoveId::ALL.len()) {
        let id = MoveId::ALL[k];
        let (d, m) = random_instance(&mut rng(seed), ring, id);
        let out = apply_move(&d, &m, true);
        prop_assert!(out.is_ok(), "{}: {:?}", id, out.err());
        prop_assert!(validate_diagram(&out.unwrap()).is_empty());
    }

    #[test]
    fn normalize_is_certified(ring in ring(), seed: u64) {
        let d = random_diagram(seed, &small(), ring);
        match normalize(&d) {
            Ok(out) => {
                prop_assert_eq!(k1_of(&out.monodromy).unwrap(), planar_invariant(&d).unwrap());
                let rep = check_certificate(&d, &out.target, &out.cert);
                prop_assert!(rep.ok, "{:?}", rep.diagnostics);
                if !out.cert.steps.is_empty() {
                    let i = (seed as usize) % out.cert.steps.len();
                    let mut bad = out.cert.clone();
                    let mut post: Vec<u8> = bad.steps[i].post.clone().into_bytes();
                    let j = (seed as usize / 7) % post.len();
                    post[j] ^= 1;
                    bad.steps[i].post = String::from_utf8(post).unwrap();
                    prop_assert!(!check_certificate(&d, &out.target, &bad).ok);
                }
            }
            Err(e) => prop_assert!(matches!(e, RewriteError::NonTermination(_)), "{}", e),
        }
    }
}

#[test]
fn mirror_of_a_cup_beside_a_fork() {
    let d = parse_diagram(
        "ring Fp:2\ncup_w 2@1\nfork 1 1 u [0,1;1,1]@1; cup_w 2@2\ncap_w 2@3\njoin 1 1 u@1\ncap_w 2@1\n",
    )
    .unwrap();
    let m = reflect_reverse(&d).unwrap();
    assert!(validate_diagram(&m).is_empty());
    let both = k1_mul(&planar_invariant(&d).unwrap(), &planar_invariant(&m).unwrap()).unwrap();
    assert!(both.is_identity());
}
