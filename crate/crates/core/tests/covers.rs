use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use surfcert_core::cover::*;
use surfcert_core::geometry::FuchsianRep;
use surfcert_core::{Letter, SurfaceGroup, Word};

fn g2() -> SurfaceGroup {
    SurfaceGroup::new(2).unwrap()
}

fn w(s: &str) -> Word {
    s.parse().unwrap()
}

fn random_word(rng: &mut ChaCha8Rng, rank: usize, len: usize) -> Word {
    Word::from_letters((0..len).map(|_| Letter::new(rng.gen_range(0..rank), rng.gen_bool(0.5))))
}

#[test]
fn lemma61_index_and_members() {
    let g = g2();
    let c = subgroup_lemma61(&g, 1).unwrap();
    assert_eq!(c.index, 2);
    assert!(c.contains(&w("a1 a2 A1 A2")));
    assert!(!c.contains(&w("a1")));
    assert!(!c.contains(&w("a3")));
    assert_eq!(c.walk(&w("a1"), 0), 1);
    assert!(subgroup_lemma61(&g, 0).is_err());
    assert!(subgroup_lemma61(&g, 2).is_err());
}

#[test]
fn walks_respect_relator_and_concatenation() {
    let g = g2();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for spec in [
        SubgroupSpec::Lemma61 { m: 1 },
        SubgroupSpec::Lemma63 { n1: 2, n2: 3 },
    ] {
        let c = FiniteCover::build(&g, &spec).unwrap();
        for k in 0..c.index {
            assert_eq!(c.walk(&g.relator(), k), k);
            assert_eq!(c.walk(&Word::identity(), k), k);
        }
        for _ in 0..200 {
            let u = random_word(&mut rng, 4, 9);
            let v = random_word(&mut rng, 4, 9);
            let s = rng.gen_range(0..c.index);
            assert_eq!(c.walk(&u.mul(&v), s), c.walk(&v, c.walk(&u, s)));
        }
    }
}

#[test]
fn membership_matches_exponent_sums() {
    let g = g2();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let specs = [
        SubgroupSpec::Lemma61 { m: 1 },
        SubgroupSpec::Lemma63 { n1: 1, n2: 1 },
        SubgroupSpec::Lemma63 { n1: 2, n2: 3 },
    ];
    for spec in &specs {
        let c = FiniteCover::build(&g, spec).unwrap();
        for _ in 0..1000 {
            let n = rng.gen_range(0..20);
            let x = random_word(&mut rng, 4, n);
            assert_eq!(
                Some(c.contains(&x)),
                spec.exponent_condition(&g, &x),
                "{}",
                x
            );
        }
    }
}

#[test]
fn normality_under_conjugation() {
    let g = g2();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let c = subgroup_lemma61(&g, 1).unwrap();
    let mut tested = 0;
    while tested < 200 {
        let x = random_word(&mut rng, 4, 8);
        if !c.contains(&x) {
            continue;
        }
        let u = random_word(&mut rng, 4, 7);
        assert!(c.contains(&x.conjugate_by(&u)));
        tested += 1;
    }
}

#[test]
fn lemma63_indices_and_powers() {
    let g = g2();
    for (n1, n2) in [(1, 1), (2, 1), (2, 3)] {
        let c = subgroup_lemma63(&g, n1, n2).unwrap();
        assert_eq!(c.index as i64, 2 * n1 * n2);
        for m in 1..2 * n1 {
            assert!(!c.contains(&Word::gen(0).pow(m)));
            assert!(!c.contains(&Word::gen(0).pow(-m)));
        }
        for m in 1..2 * n2 {
            assert!(!c.contains(&Word::gen(1).pow(m)));
        }
        assert!(c.contains(&Word::gen(0).pow(2 * n1)));
    }
    assert!(subgroup_lemma63(&g, 0, 1).is_err());
}

#[test]
fn schreier_counts_and_rank() {
    let g = g2();
    let c = subgroup_lemma61(&g, 1).unwrap();
    let h = c.homology(&g).unwrap();
    assert_eq!(h.schreier_count(), c.index * 4 - (c.index - 1));
    assert_eq!(h.cover_genus, 3);
    assert_eq!(h.rank, 6);
    for (n1, n2) in [(1, 1), (2, 1), (2, 3)] {
        let c = subgroup_lemma63(&g, n1, n2).unwrap();
        let h = c.homology(&g).unwrap();
        assert_eq!(h.rank, 2 + 2 * c.index);
    }
}

#[test]
fn identity_cover_homology_is_abelianization() {
    let g = g2();
    let c = FiniteCover::build(&g, &SubgroupSpec::trivial()).unwrap();
    assert_eq!(c.index, 1);
    let h = c.homology(&g).unwrap();
    assert_eq!(h.rank, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let x = random_word(&mut rng, 4, 12);
        let l = lift_curve(&c, &h, &x.mul(&Word::gen(0)), 0).unwrap();
        // one Schreier generator per base generator
        assert_eq!(
            h.project(&l.lift_homology),
            g.abelianize(&x.mul(&Word::gen(0)))
        );
    }
}

#[test]
fn lifts_of_examples() {
    let g = g2();
    let c = subgroup_lemma61(&g, 1).unwrap();
    let h = c.homology(&g).unwrap();
    let comm = lift_curve(&c, &h, &w("a1 a2 A1 A2"), 0).unwrap();
    assert_eq!(comm.degree, 1);
    assert!(!comm.lift_homology.is_zero());
    let a1 = lift_curve(&c, &h, &w("a1"), 0).unwrap();
    assert_eq!(a1.degree, 2);
    let rep = FuchsianRep::regular_polygon(2).unwrap();
    let base = rep.translation_length(&w("a1")).unwrap();
    assert!((cover_length(base, &a1) - 2.0 * base).abs() < 1e-9);
}

#[test]
fn lift_homology_projects_to_base() {
    let g = g2();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let rep = FuchsianRep::regular_polygon(2).unwrap();
    for spec in [
        SubgroupSpec::Lemma61 { m: 1 },
        SubgroupSpec::Lemma63 { n1: 2, n2: 1 },
    ] {
        let c = FiniteCover::build(&g, &spec).unwrap();
        let h = c.homology(&g).unwrap();
        let words = h.schreier_words(&c);
        for _ in 0..100 {
            let x = g.dehn_reduce(&random_word(&mut rng, 4, 7));
            if x.is_empty() {
                continue;
            }
            let start = rng.gen_range(0..c.index);
            let l = lift_curve(&c, &h, &x, start).unwrap();
            assert_eq!(c.index % l.degree, 0);
            let power = x.pow(l.degree as i64);
            assert_eq!(h.project(&l.lift_homology), g.abelianize(&power));
            // the Schreier word expands to the conjugate T x^d T^-1
            let back = expand_schreier_word(&words, &l.lift_word);
            let t = &c.transversal[start];
            assert!(g.equal(&back, &power.conjugate_by(t)));
            if let Ok(base) = rep.translation_length(&x) {
                let up = rep.translation_length(&back).unwrap();
                assert!((up - cover_length(base, &l)).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn json_round_trip() {
    let g = g2();
    let c = subgroup_lemma63(&g, 2, 3).unwrap();
    let text = c.to_json();
    let back = FiniteCover::from_json(&g, &text).unwrap();
    assert_eq!(back, c);
    assert_eq!(back.to_json(), text);
    let mut broken: serde_json::Value = serde_json::from_str(&text).unwrap();
    broken["permutations"][0][0] = serde_json::json!(1);
    broken["permutations"][0][1] = serde_json::json!(1);
    assert!(FiniteCover::from_json(&g, &broken.to_string()).is_err());
}

#[test]
fn intersections_and_extensions() {
    let g = g2();
    let both = SubgroupSpec::Intersection {
        parts: vec![
            SubgroupSpec::Lemma61 { m: 1 },
            SubgroupSpec::Lemma63 { n1: 1, n2: 1 },
        ],
    };
    let c = FiniteCover::build(&g, &both).unwrap();
    assert_eq!(c.index, 4);
    let base = subgroup_lemma61(&g, 1).unwrap();
    let hb = base.homology(&g).unwrap();
    // parity of the first cover coordinate
    let mut f = vec![0; hb.rank];
    f[0] = 1;
    let ext = SubgroupSpec::Extension {
        base: Box::new(SubgroupSpec::Lemma61 { m: 1 }),
        moduli: vec![2],
        functionals: vec![f],
        subgroup: vec![],
        description: "test".into(),
    };
    let e = FiniteCover::build(&g, &ext).unwrap();
    assert_eq!(e.index, 4);
    let he = e.homology(&g).unwrap();
    assert_eq!(he.rank, 2 + 2 * 4);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..300 {
        let x = random_word(&mut rng, 4, 10);
        let inside = base.contains(&x) && hb.path_class(&base, &x, 0)[0].rem_euclid(2) == 0;
        assert_eq!(e.contains(&x), inside, "{}", x);
    }
}
