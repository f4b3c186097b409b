use foamcob::diagram::validate_diagram;
use foamcob::exactalg::RingSpec;
use foamcob::rewrite::random::random_instance;
use foamcob::rewrite::{apply_move, MoveId};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn soundness(ring: RingSpec, per_move: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut failures = vec![];
    for id in MoveId::ALL {
        for _ in 0..per_move {
            let (d, m) = random_instance(&mut rng, ring, id);
            assert!(validate_diagram(&d).is_empty(), "{id}: instance is invalid");
            assert!(d.is_closed());
            if let Err(e) = apply_move(&d, &m, true) {
                failures.push(format!("{e}"));
                break;
            }
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn every_move_keeps_the_invariant_over_q() {
    soundness(RingSpec::Rationals, 40);
}

#[test]
fn every_move_keeps_the_invariant_over_f7() {
    soundness(RingSpec::PrimeField(7), 20);
}
