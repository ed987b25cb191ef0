mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use surfcert_core::cover::{lift_orbits, subgroup_lemma61, subgroup_lemma63};
use surfcert_core::geometry::FuchsianRep;
use surfcert_core::intersect::*;

use common::brute_force_crossings;
use surfcert_core::{Letter, SurfaceGroup, Word};

fn w(s: &str) -> Word {
    s.parse().unwrap()
}

fn bolza() -> FuchsianRep {
    FuchsianRep::regular_polygon(2).unwrap()
}

#[test]
fn calibration_values() {
    let rep = bolza();
    assert_eq!(intersection_number(&rep, &w("a1"), &w("a2")).unwrap(), 1);
    assert_eq!(intersection_number(&rep, &w("a1"), &w("a3")).unwrap(), 0);
    assert_eq!(self_intersection_number(&rep, &w("a1")).unwrap(), 0);
    assert_eq!(
        self_intersection_number(&rep, &w("a1 a2 A1 A2")).unwrap(),
        0
    );
    assert_eq!(intersection_number(&rep, &w("a1"), &w("a1")).unwrap(), 0);
}

#[test]
fn matches_brute_force_at_doubled_cutoff() {
    let rep = bolza();
    let pairs = [
        ("a1", "a2"),
        ("a1", "a3"),
        ("a1", "a1"),
        ("a1 a2 A1 A2", "a1 a2 A1 A2"),
        ("a1 a1 a2", "a1 a1 a2"),
        ("a1 a2 A1 A2", "a1"),
        ("a1 a3", "a2 a4"),
    ];
    let mut oracle = IntersectionOracle::new(&rep).unwrap();
    for (a, b) in pairs {
        let n = oracle.intersection(&w(a), &w(b)).unwrap();
        let short = brute_force_crossings(&rep, &w(a), &w(b), 7);
        let long = brute_force_crossings(&rep, &w(a), &w(b), 14);
        assert_eq!(short, long, "brute force not yet stable for {} / {}", a, b);
        assert_eq!(n, long, "{} / {}", a, b);
    }
    let si = oracle.self_intersection(&w("a1 a1 a2")).unwrap();
    assert_eq!(
        2 * si,
        brute_force_crossings(&rep, &w("a1 a1 a2"), &w("a1 a1 a2"), 14)
    );
    assert_eq!(si, 0);
    let si = oracle.self_intersection(&w("a1 a2 A1 a2")).unwrap();
    assert_eq!(
        2 * si,
        brute_force_crossings(&rep, &w("a1 a2 A1 a2"), &w("a1 a2 A1 a2"), 14)
    );
    assert_eq!(si, 1);
}

#[test]
fn long_curves_have_even_self_crossings() {
    let rep = bolza();
    let mut oracle = IntersectionOracle::new(&rep).unwrap();
    for c in ["a1 a3 A1 A3", "a1 a2 a3 A1 A2 A3", "a1 a1 a2 a2"] {
        let data = oracle.crossings(&w(c), &w(c)).unwrap();
        assert_eq!(data.count() % 2, 0, "{}", c);
    }
    // the count is a class function even when axes pass far from i
    let base = oracle
        .crossings(&w("a1 a3 A1 A3"), &w("a1 a3 A1 A3"))
        .unwrap()
        .count();
    for c in [
        "a3 A1 A3 a1",
        "A1 A3 a1 a3",
        "A3 a1 a3 A1",
        "a2 a1 a3 A1 A3 A2",
    ] {
        assert_eq!(
            oracle.crossings(&w(c), &w(c)).unwrap().count(),
            base,
            "{}",
            c
        );
    }
}

#[test]
fn crossing_words_realize_their_translates() {
    let rep = bolza();
    let mut oracle = IntersectionOracle::new(&rep).unwrap();
    let data = oracle.crossings(&w("a1 a1 a2"), &w("a2 a3")).unwrap();
    assert!(data.count() > 0);
    let ax1 = rep.axis(&data.first).unwrap();
    let g2 = rep.holonomy(&data.second).unwrap();
    for x in &data.crossings {
        let u = rep.holonomy(&x.word).unwrap();
        let (t, _) = ax1.crossing_of(&u.mul(&g2).mul(&u.inverse())).unwrap();
        assert!((t - x.t).abs() < 1e-6, "{} {} {}", t, x.t, x.word);
    }
}

#[test]
fn symmetric_and_conjugation_invariant() {
    let rep = bolza();
    let g = SurfaceGroup::new(2).unwrap();
    let mut oracle = IntersectionOracle::new(&rep).unwrap();
    let curves = [
        "a1",
        "a2",
        "a1 a2",
        "a1 a1 a2",
        "a1 a2 A1 A2",
        "a2 a4",
        "a1 A3",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for a in curves {
        for b in curves {
            let n = oracle.intersection(&w(a), &w(b)).unwrap();
            assert_eq!(n, oracle.intersection(&w(b), &w(a)).unwrap(), "{} {}", a, b);
            let len = rng.gen_range(1..5);
            let u = Word::from_letters(
                (0..len).map(|_| Letter::new(rng.gen_range(0..4), rng.gen_bool(0.5))),
            );
            let conj = g.dehn_reduce(&w(b).conjugate_by(&u));
            assert_eq!(
                n,
                oracle.intersection(&w(a), &conj).unwrap(),
                "{} {} by {}",
                a,
                b,
                u
            );
        }
    }
}

#[test]
fn proper_powers_are_rejected() {
    let rep = bolza();
    assert!(self_intersection_number(&rep, &w("a1 a1")).is_err());
    assert!(self_intersection_number(&rep, &Word::identity()).is_err());
}

#[test]
fn lifts_partition_the_crossings() {
    let rep = bolza();
    let g = SurfaceGroup::new(2).unwrap();
    let mut oracle = IntersectionOracle::new(&rep).unwrap();
    for cover in [
        subgroup_lemma61(&g, 1).unwrap(),
        subgroup_lemma63(&g, 2, 1).unwrap(),
    ] {
        for (a, b) in [
            ("a1", "a2"),
            ("a1 a1 a2", "a1 a1 a2"),
            ("a1 a3", "a2"),
            ("a1 a2 A1 A2", "a1"),
        ] {
            let (a, b) = (w(a), w(b));
            let down = oracle.crossings(&a, &b).unwrap().count();
            let mut total = 0;
            for o1 in lift_orbits(&cover, &a) {
                for o2 in lift_orbits(&cover, &b) {
                    let data = oracle.crossings(&a, &b).unwrap();
                    total += data.cover_count(&cover, o1[0], o2[0]);
                }
            }
            assert_eq!(total, cover.index * down, "{} {}", a, b);
        }
        // lifts of a simple curve are simple and pairwise disjoint
        let orbits = lift_orbits(&cover, &w("a2"));
        for o1 in &orbits {
            for o2 in &orbits {
                assert_eq!(
                    oracle
                        .cover_intersection(&cover, &w("a2"), o1[0], &w("a2"), o2[0])
                        .unwrap(),
                    0
                );
            }
        }
    }
}
