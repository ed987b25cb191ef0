use surfcert_core::certify::*;
use surfcert_core::checker::check_certificate;
use surfcert_core::cover::SubgroupSpec;
use surfcert_core::geometry::FuchsianRep;
use surfcert_core::intersect::IntersectionOracle;
use surfcert_core::{SurfaceGroup, Word};

fn w(s: &str) -> Word {
    s.parse().unwrap()
}

#[test]
fn input_checks() {
    let rep = FuchsianRep::regular_polygon(2).unwrap();
    let mut oracle = IntersectionOracle::new(&rep).unwrap();
    assert!(check_input(&mut oracle, &w("a1")).unwrap().simple);
    assert!(check_input(&mut oracle, &Word::identity()).is_err());
    assert!(check_input(&mut oracle, &w("a1 a1")).is_err());
    assert!(check_input(&mut oracle, &w("a1 a2 A1 a2")).is_err());
}

#[test]
fn trivial_homology_stage() {
    let rep = FuchsianRep::regular_polygon(2).unwrap();
    let g = SurfaceGroup::new(2).unwrap();
    let mut oracle = IntersectionOracle::new(&rep).unwrap();
    let comm = check_input(&mut oracle, &w("a1 a2 A1 A2")).unwrap();
    let cover = stage_trivial_homology(&g, &comm).unwrap().unwrap();
    assert_eq!(cover.index, 2);
    assert_eq!(cover.spec, SubgroupSpec::Lemma61 { m: 1 });
    let hom = cover.homology(&g).unwrap();
    assert!(!hom.path_class(&cover, comm.form(), 0).is_zero());
    let a1 = check_input(&mut oracle, &w("a1")).unwrap();
    assert!(stage_trivial_homology(&g, &a1).unwrap().is_none());
}

#[test]
fn generator_has_trivial_tower() {
    let rep = FuchsianRep::regular_polygon(2).unwrap();
    let mut oracle = IntersectionOracle::new(&rep).unwrap();
    let cert = certify(&mut oracle, &w("a1"), &CertifyOptions::default()).unwrap();
    assert_eq!(cert.verdict, Verdict::Certified);
    assert!(cert.tower.stages.is_empty());
    assert_eq!(cert.tower.total_index, 1);
    assert!(cert.competitors.partitions.is_empty());
    assert!(check_certificate(&rep, &cert).unwrap().passed());
}

#[test]
fn commutator_tower_breaks_every_competitor() {
    let rep = FuchsianRep::regular_polygon(2).unwrap();
    let g = SurfaceGroup::new(2).unwrap();
    let mut oracle = IntersectionOracle::new(&rep).unwrap();
    let l = w("a1 a2 A1 A2");
    let cert = certify(&mut oracle, &l, &CertifyOptions::default()).unwrap();
    assert_eq!(cert.verdict, Verdict::Certified);
    let first = &cert.tower.stages[0];
    assert_eq!(first.rationale, Rationale::TrivialHomology);
    assert_eq!(first.stage_index, 2);
    let product: usize = cert.tower.stages.iter().map(|s| s.stage_index).product();
    assert_eq!(product, cert.tower.total_index);
    assert!(!cert.lift.homology.is_zero());
    assert!(cert.competitors.partitions.is_empty());

    // the double cover alone leaves shorter partitions, among them the two
    // lifts of a2 with opposite orientations
    let level = Level::new(&g, &first.spec, &l).unwrap();
    let second = &cert.tower.stages[1];
    assert!(!second.broken.is_empty());
    assert!(second
        .broken
        .iter()
        .any(|p| p.entries.len() == 2 && p.total_length < 6.2));
    let top = Level::new(&g, &cert.tower.final_spec(), &l).unwrap();
    for p in &second.broken {
        assert!(p.total_length < cert.lift.length);
        assert_eq!(p.homology, level.target);
        assert!(!projects_onto(&top, &level.cover, p));
    }
    for s in &cert.tower.stages {
        let lv = Level::new(&g, &s.spec, &l).unwrap();
        assert_eq!(lv.cover.degree(&l, 0), 1);
        assert_eq!(
            oracle.cover_intersection(&lv.cover, &l, 0, &l, 0).unwrap(),
            0
        );
    }

    let report = check_certificate(&rep, &cert).unwrap();
    assert!(
        report.passed(),
        "{:?}",
        report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .collect::<Vec<_>>()
    );

    // json round trip is exact
    let text = serde_json::to_string(&cert).unwrap();
    let back: Certificate = serde_json::from_str(&text).unwrap();
    assert_eq!(back, cert);
    assert_eq!(serde_json::to_string(&back).unwrap(), text);

    // tampering is caught
    let mut short = cert.clone();
    short.tower.stages.pop();
    short.tower.total_index = 2;
    assert!(!check_certificate(&rep, &short).unwrap().passed());
    let mut wrong = cert.clone();
    wrong.lift.length *= 0.5;
    assert!(!check_certificate(&rep, &wrong).unwrap().passed());
    let mut fake = cert.clone();
    fake.tower.stages[1].broken[0].total_length = 1.0;
    fake.tower.stages[1].broken[0].entries[0].curve.coset ^= 1;
    assert!(!check_certificate(&rep, &fake).unwrap().passed());
}

#[test]
fn stage_count_limit_gives_inconclusive() {
    let rep = FuchsianRep::regular_polygon(2).unwrap();
    let mut oracle = IntersectionOracle::new(&rep).unwrap();
    let opts = CertifyOptions {
        max_stages: 1,
        ..CertifyOptions::default()
    };
    let cert = certify(&mut oracle, &w("a1 a2 A1 A2"), &opts).unwrap();
    assert_eq!(cert.verdict, Verdict::Inconclusive);
    assert!(!cert.competitors.partitions.is_empty());
    assert!(check_certificate(&rep, &cert).unwrap().passed());
}
