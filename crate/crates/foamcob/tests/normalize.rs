use foamcob::diagram::{parse_diagram, planar_invariant};
use foamcob::exactalg::{k1_of, RingSpec};
use foamcob::rewrite::random::{random_diagram, Bounds};
use foamcob::rewrite::{check_certificate, normalize};

fn agrees(src: &str) {
    let d = parse_diagram(src).unwrap();
    let out = normalize(&d).unwrap();
    assert_eq!(k1_of(&out.monodromy).unwrap(), planar_invariant(&d).unwrap());
    let rep = check_certificate(&d, &out.target, &out.cert);
    assert!(rep.ok, "{:?}", rep.diagnostics);
}

#[test]
fn theta_and_circles() {
    agrees("ring Q\ncup_w 2@1\nfork 1 1 u [1,2;3,4]@1\ngate 1 u [5]@2\njoin 1 1 u@1\ncap_w 2@1\n");
    agrees("ring Q\ncup_e 1@1\ngate 1 v [3]@1\ncap_e 1@1\n");
    agrees("ring Q\n");
}

#[test]
fn random_corpus() {
    for ring in [RingSpec::Rationals, RingSpec::PrimeField(7)] {
        for seed in 0..200 {
            let d = random_diagram(seed, &Bounds::default(), ring);
            let out = normalize(&d).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
            assert_eq!(k1_of(&out.monodromy).unwrap(), planar_invariant(&d).unwrap(), "seed {seed}");
            let rep = check_certificate(&d, &out.target, &out.cert);
            assert!(rep.ok, "seed {seed}: {:?}", rep.diagnostics);
        }
    }
}
