mod common;

use common::*;
use quivertilt_core::*;

#[test]
fn oracle_agrees_on_normal_forms() {
    for m in 1..=3 {
        for p in grid(m) {
            let q = build_normal_form(&p, m).unwrap();
            assert_eq!(oracle_phi(&q), Some(compute_phi(&q).unwrap()), "{p} m={m}");
        }
    }
}

#[test]
fn oracle_agrees_on_random_gentle_quivers() {
    for seed in 0..400 {
        let q = random_gentle(seed, 9, 2);
        assert_eq!(
            oracle_phi(&q),
            Some(compute_phi(&q).unwrap()),
            "seed {seed}\n{}",
            serialize_quiver(&q)
        );
    }
}
