//! Covering towers on which the lift of a simple closed geodesic is a
//! shortest disjoint partition of its homology class.
//!
//! The tower starts with a double cover making the lift homologically
//! nontrivial when the curve is separating. After that, every shorter
//! partition of the lift's class found on the current cover is a
//! competitor, and a stage is added that breaks competitors: a cyclic
//! extension `Z/q` of the current cover through a functional `φ` on its
//! first homology with `φ(lift) = 0`, so the lift stays closed of the same
//! length while a component `x` of a competitor only lifts with degree
//! `ord(φ(x))`. The loop ends when the search on the composite cover comes
//! back empty.

use serde::{Deserialize, Serialize};

use crate::cover::{lift_orbits, CoverHomology, FiniteCover, SubgroupSpec, MAX_INDEX};
use crate::geometry::{
    enumerate_short_classes, Completeness, GeodesicClass, MetricId, DEFAULT_NODE_LIMIT,
};
use crate::group::{SurfaceGroup, Word};
use crate::homology::HomologyVector;
use crate::intersect::IntersectionOracle;
use crate::partition::{cover_partitions_below, CoverPartition, CurveClass};
use crate::{round_real, SurfcertError};

#[derive(Clone, Debug)]
pub struct CertifyOptions {
    pub node_limit: usize,
    pub max_stages: usize,
    pub max_index: usize,
    /// Largest number of competitors kept per search.
    pub max_competitors: usize,
    /// Moduli tried for break stages, in order of preference.
    pub moduli: Vec<i64>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            node_limit: DEFAULT_NODE_LIMIT,
            max_stages: 12,
            max_index: 1024,
            max_competitors: 5000,
            moduli: vec![2, 3, 5, 7],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rationale {
    TrivialHomology,
    BreakHomologous,
    BreakPartition,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TowerStage {
    pub rationale: Rationale,
    pub description: String,
    /// Index over the previous composite cover.
    pub stage_index: usize,
    pub composite_index: usize,
    /// The composite subgroup after this stage.
    pub spec: SubgroupSpec,
    /// Competitors on the previous composite cover that no partition on
    /// this stage projects onto.
    pub broken: Vec<CoverPartition>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverTower {
    pub stages: Vec<TowerStage>,
    pub total_index: usize,
}

impl CoverTower {
    pub fn final_spec(&self) -> SubgroupSpec {
        self.stages
            .last()
            .map_or_else(SubgroupSpec::trivial, |s| s.spec.clone())
    }
}

/// The lift of the input curve from the base coset of the composite cover.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifiedLift {
    pub word: Word,
    pub degree: usize,
    pub length: f64,
    /// Coordinates in the first homology of the composite cover.
    pub homology: HomologyVector,
    pub simple: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompetitorReport {
    /// Partitions strictly shorter than this were searched for.
    pub cutoff: f64,
    /// Primitive base classes below the cutoff.
    pub base_classes: usize,
    pub partitions: Vec<CoverPartition>,
    pub truncated: bool,
    pub completeness: Completeness,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateFlags {
    pub completeness: Completeness,
    pub intersection_method: String,
    pub notes: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Certified,
    Refuted,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub input: CurveClass,
    pub metric: MetricId,
    pub genus: usize,
    pub tower: CoverTower,
    pub lift: CertifiedLift,
    pub competitors: CompetitorReport,
    pub flags: CertificateFlags,
    pub verdict: Verdict,
}

pub const INDEX_NOTE: &str = "the power-parity subgroup (n1 | chi_1, n2 | chi_2, chi_1/n1 + chi_2/n2 even) has \
    index 2*n1*n2 by coset enumeration, not eps1*eps2 - 2; the pipeline does not rely on that index";
pub const BREAK_NOTE: &str =
    "competitors are broken by cyclic extensions of the composite cover through its \
    first homology, verified by exhaustive lifting of every broken competitor";

/// Validates the input curve: nontrivial, primitive and simple.
pub fn check_input(oracle: &mut IntersectionOracle, w: &Word) -> Result<CurveClass, SurfcertError> {
    let class = GeodesicClass::new(oracle.rep(), oracle.group(), w)?;
    let c = CurveClass::from_class(oracle, class)?;
    if !c.simple {
        return Err(SurfcertError::InvalidParameter(format!(
            "{} has {} self-intersections; only simple curves are certified",
            w,
            oracle.self_intersection(&c.class.form)?
        )));
    }
    Ok(c)
}

/// For a homologically trivial curve, the first double cover, among the
/// parity covers of `χ_{2m-1} + χ_{2m+1}`, on which its lift is closed and
/// homologically nontrivial.
pub fn stage_trivial_homology(
    group: &SurfaceGroup,
    l: &CurveClass,
) -> Result<Option<FiniteCover>, SurfcertError> {
    if !l.class.homology.is_zero() {
        return Ok(None);
    }
    for m in 1..group.genus() {
        let cover = FiniteCover::build(group, &SubgroupSpec::Lemma61 { m })?;
        let odd = |t: usize| !cover.contains(&Word::gen(t));
        if !odd(2 * m - 2) || !odd(2 * m) || !cover.contains(&l.class.form) {
            continue;
        }
        let hom = cover.homology(group)?;
        if !hom.path_class(&cover, &l.class.form, 0).is_zero() {
            return Ok(Some(cover));
        }
    }
    Err(SurfcertError::InvalidParameter(format!(
        "no parity double cover makes a lift of {} homologically nontrivial",
        l.class.form
    )))
}

/// A cover with its homology and the lift of the input from coset 0.
pub struct Level {
    pub cover: FiniteCover,
    pub hom: CoverHomology,
    pub target: HomologyVector,
}

impl Level {
    pub fn new(
        group: &SurfaceGroup,
        spec: &SubgroupSpec,
        l: &Word,
    ) -> Result<Level, SurfcertError> {
        let cover = FiniteCover::build(group, spec)?;
        if !cover.contains(l) {
            return Err(SurfcertError::Inconsistent(format!(
                "{} does not lift closed to {}",
                l,
                spec.label()
            )));
        }
        let hom = cover.homology(group)?;
        let target = hom.path_class(&cover, l, 0);
        Ok(Level { cover, hom, target })
    }
}

/// Whether some partition of the lift's class on `upper` projects onto the
/// competitor `p` of `lower`. Lifts of disjoint simple curves are disjoint
/// and simple, so only multiplicities and homology need matching.
pub fn projects_onto(upper: &Level, lower: &FiniteCover, p: &CoverPartition) -> bool {
    let down: Vec<usize> = upper
        .cover
        .transversal
        .iter()
        .map(|t| lower.walk(t, 0))
        .collect();
    // per entry: (homology, ratio) of every lift
    let mut options: Vec<Vec<(HomologyVector, u32)>> = Vec::new();
    for e in &p.entries {
        let base_orbit: Vec<usize> = {
            let mut o = vec![e.curve.coset];
            let mut c = lower.walk(&e.curve.form, e.curve.coset);
            while c != e.curve.coset {
                o.push(c);
                c = lower.walk(&e.curve.form, c);
            }
            o
        };
        let lifts = lift_orbits(&upper.cover, &e.curve.form)
            .into_iter()
            .filter(|o| base_orbit.contains(&down[o[0]]))
            .map(|o| {
                let h = upper
                    .hom
                    .path_class(&upper.cover, &e.curve.form.pow(o.len() as i64), o[0]);
                (h, (o.len() / e.curve.degree) as u32)
            })
            .collect();
        options.push(lifts);
    }
    fn go(
        options: &[Vec<(HomologyVector, u32)>],
        mults: &[u32],
        k: usize,
        j: usize,
        left: u32,
        acc: HomologyVector,
        target: &HomologyVector,
    ) -> bool {
        if k == options.len() {
            return &acc == target;
        }
        if left == 0 {
            return go(
                options,
                mults,
                k + 1,
                0,
                mults.get(k + 1).copied().unwrap_or(0),
                acc,
                target,
            );
        }
        if j == options[k].len() {
            return false;
        }
        let (h, ratio) = &options[k][j];
        let mut used = 0;
        let mut acc = acc;
        loop {
            if go(
                options,
                mults,
                k,
                j + 1,
                left - used * ratio,
                acc.clone(),
                target,
            ) {
                return true;
            }
            used += 1;
            if used * ratio > left {
                return false;
            }
            acc += h;
        }
    }
    let mults: Vec<u32> = p.entries.iter().map(|e| e.multiplicity).collect();
    let dim = upper.target.dim();
    go(
        &options,
        &mults,
        0,
        0,
        mults.first().copied().unwrap_or(0),
        HomologyVector::zero(dim),
        &upper.target,
    )
}

/// Solutions of `rows · φ = rhs (mod p)`, or `None` when inconsistent.
fn solve_mod(rows: &[Vec<i64>], rhs: &[i64], p: i64) -> Option<Vec<i64>> {
    let n = rows.first().map_or(0, |r| r.len());
    let mut a: Vec<Vec<i64>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, &b)| {
            r.iter()
                .chain(std::iter::once(&b))
                .map(|x| x.rem_euclid(p))
                .collect()
        })
        .collect();
    let inv = |x: i64| (1..p).find(|y| (x * y) % p == 1).expect("p is prime");
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(i) = (r..a.len()).find(|&i| a[i][col] != 0) else {
            continue;
        };
        a.swap(r, i);
        let f = inv(a[r][col]);
        for x in a[r].iter_mut() {
            *x = (*x * f) % p;
        }
        for i in 0..a.len() {
            if i != r && a[i][col] != 0 {
                let f = a[i][col];
                for j in 0..=n {
                    a[i][j] = (a[i][j] - f * a[r][j]).rem_euclid(p);
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if a[r..].iter().any(|row| row[n] != 0) {
        return None;
    }
    let mut x = vec![0; n];
    for (i, &col) in pivots.iter().enumerate() {
        x[col] = a[i][n];
    }
    Some(x)
}

/// A proposed break stage.
struct Candidate {
    modulus: i64,
    functional: Vec<i64>,
}

/// Functionals vanishing on the lift that give the components of many
/// competitors a degree not dividing their multiplicity.
fn candidates(level: &Level, competitors: &[CoverPartition], moduli: &[i64]) -> Vec<Candidate> {
    let mut out = Vec::new();
    for &q in moduli {
        // greedily from each of the shortest competitors
        for first in 0..competitors.len().min(6) {
            let mut rows = vec![level.target.as_slice().to_vec()];
            let mut rhs = vec![0];
            let order =
                std::iter::once(first).chain((0..competitors.len()).filter(|&i| i != first));
            for i in order {
                for e in &competitors[i].entries {
                    if e.multiplicity as i64 % q == 0 {
                        continue;
                    }
                    rows.push(e.curve.homology.as_slice().to_vec());
                    rhs.push(1);
                    if solve_mod(&rows, &rhs, q).is_some() {
                        break;
                    }
                    rows.pop();
                    rhs.pop();
                }
            }
            if let Some(f) = solve_mod(&rows, &rhs, q) {
                if f.iter().any(|&x| x != 0)
                    && !out
                        .iter()
                        .any(|c: &Candidate| c.modulus == q && c.functional == f)
                {
                    out.push(Candidate {
                        modulus: q,
                        functional: f,
                    });
                }
            }
        }
    }
    out
}

fn extension(base: &SubgroupSpec, q: i64, f: &[i64], index: usize) -> SubgroupSpec {
    let coeffs: Vec<String> = f.iter().map(|x| x.to_string()).collect();
    SubgroupSpec::Extension {
        base: Box::new(base.clone()),
        moduli: vec![q],
        functionals: vec![f.to_vec()],
        subgroup: vec![],
        description: format!(
            "Z/{} extension of the index-{} cover by ({}) on its first homology",
            q,
            index,
            coeffs.join(",")
        ),
    }
}

/// A stage breaking some of `competitors` (shortest first) on top of
/// `spec`, with the indices of the competitors it breaks.
pub fn break_stage(
    group: &SurfaceGroup,
    l: &Word,
    spec: &SubgroupSpec,
    level: &Level,
    competitors: &[CoverPartition],
    opts: &CertifyOptions,
) -> Result<Option<(SubgroupSpec, Level, Vec<usize>)>, SurfcertError> {
    let mut best: Option<(SubgroupSpec, Level, Vec<usize>)> = None;
    for cand in candidates(level, competitors, &opts.moduli) {
        if level.cover.index * cand.modulus as usize > opts.max_index.min(MAX_INDEX) {
            continue;
        }
        let next = extension(spec, cand.modulus, &cand.functional, level.cover.index);
        let upper = Level::new(group, &next, l)?;
        let broken: Vec<usize> = (0..competitors.len())
            .filter(|&i| !projects_onto(&upper, &level.cover, &competitors[i]))
            .collect();
        if broken.is_empty() {
            continue;
        }
        // prefer breaking the shortest competitor, then the most, then the
        // smallest cover
        let better = match &best {
            None => true,
            Some((_, u, b)) => {
                (
                    broken[0],
                    std::cmp::Reverse(broken.len()),
                    upper.cover.index,
                ) < (b[0], std::cmp::Reverse(b.len()), u.cover.index)
            }
        };
        if better {
            best = Some((next, upper, broken));
        }
    }
    Ok(best)
}

/// Break stage aimed at a single curve homologous to the lift.
pub fn stage_break_homologous(
    group: &SurfaceGroup,
    l: &Word,
    spec: &SubgroupSpec,
    competitor: &CoverPartition,
    opts: &CertifyOptions,
) -> Result<Option<SubgroupSpec>, SurfcertError> {
    let level = Level::new(group, spec, l)?;
    Ok(break_stage(
        group,
        l,
        spec,
        &level,
        std::slice::from_ref(competitor),
        opts,
    )?
    .map(|(s, _, _)| s))
}

/// Break stage aimed at a partition with several entries.
pub fn stage_break_partition(
    group: &SurfaceGroup,
    l: &Word,
    spec: &SubgroupSpec,
    competitor: &CoverPartition,
    opts: &CertifyOptions,
) -> Result<Option<SubgroupSpec>, SurfcertError> {
    stage_break_homologous(group, l, spec, competitor, opts)
}

fn round_partition(p: &CoverPartition) -> CoverPartition {
    let mut p = p.clone();
    p.total_length = round_real(p.total_length);
    for e in &mut p.entries {
        e.curve.length = round_real(e.curve.length);
        e.curve.base_length = round_real(e.curve.base_length);
    }
    p
}

/// Primitive base classes strictly shorter than `cutoff`.
pub fn base_classes(
    oracle: &IntersectionOracle,
    cutoff: f64,
    node_limit: usize,
) -> Result<(Vec<GeodesicClass>, Completeness), SurfcertError> {
    let short = enumerate_short_classes(oracle.rep(), oracle.group(), cutoff, node_limit)?;
    let classes = short
        .classes
        .into_iter()
        .filter(|c| c.primitive && c.length < cutoff)
        .collect();
    Ok((classes, short.completeness))
}

pub fn certify(
    oracle: &mut IntersectionOracle,
    w: &Word,
    opts: &CertifyOptions,
) -> Result<Certificate, SurfcertError> {
    let group = oracle.group().clone();
    let input = check_input(oracle, w)?;
    let l = input.class.form.clone();
    let cutoff = input.class.length;
    let (classes, enum_completeness) = base_classes(oracle, cutoff, opts.node_limit)?;
    let mut stages = Vec::new();
    let mut spec = SubgroupSpec::trivial();
    if let Some(cover) = stage_trivial_homology(&group, &input)? {
        spec = cover.spec.clone();
        stages.push(TowerStage {
            rationale: Rationale::TrivialHomology,
            description: format!("double cover of {}", cover.spec.label()),
            stage_index: cover.index,
            composite_index: cover.index,
            spec: spec.clone(),
            broken: vec![],
        });
    }
    let mut level = Level::new(&group, &spec, &l)?;
    let mut completeness = enum_completeness;
    let mut stuck = false;
    let search = loop {
        if oracle.cover_intersection(&level.cover, &l, 0, &l, 0)? != 0 {
            return Err(SurfcertError::Inconsistent(format!(
                "the lift of {} is not simple",
                l
            )));
        }
        let search = cover_partitions_below(
            oracle,
            &classes,
            enum_completeness,
            &level.cover,
            &level.hom,
            &level.target,
            cutoff,
            opts.max_competitors,
        )?;
        completeness = completeness.combine(search.completeness);
        if search.partitions.is_empty() || stages.len() >= opts.max_stages {
            break search;
        }
        match break_stage(&group, &l, &spec, &level, &search.partitions, opts)? {
            None => {
                stuck = true;
                break search;
            }
            Some((next, upper, broken)) => {
                let first = &search.partitions[broken[0]];
                let rationale = if first.entries.len() == 1 && first.entries[0].multiplicity == 1 {
                    Rationale::BreakHomologous
                } else {
                    Rationale::BreakPartition
                };
                let description = next.label();
                stages.push(TowerStage {
                    rationale,
                    description,
                    stage_index: upper.cover.index / level.cover.index,
                    composite_index: upper.cover.index,
                    spec: next.clone(),
                    broken: broken
                        .iter()
                        .map(|&i| round_partition(&search.partitions[i]))
                        .collect(),
                });
                spec = next;
                level = upper;
            }
        }
    };
    let verdict = if !search.partitions.is_empty() || completeness == Completeness::Incomplete {
        Verdict::Inconclusive
    } else {
        Verdict::Certified
    };
    let mut notes = vec![INDEX_NOTE.to_string(), BREAK_NOTE.to_string()];
    if stuck {
        notes.push(
            "no cyclic extension within the index bound breaks the remaining competitors".into(),
        );
    } else if !search.partitions.is_empty() {
        notes.push(format!("stopped after {} stages", stages.len()));
    }
    if search.truncated {
        notes.push(format!(
            "competitor list truncated at {}",
            opts.max_competitors
        ));
    }
    let mut input = input;
    input.class.length = round_real(input.class.length);
    input.class.trace = round_real(input.class.trace);
    Ok(Certificate {
        metric: oracle.rep().metric().clone(),
        genus: group.genus(),
        tower: CoverTower {
            total_index: level.cover.index,
            stages,
        },
        lift: CertifiedLift {
            word: l.clone(),
            degree: level.cover.degree(&l, 0),
            length: round_real(cutoff * level.cover.degree(&l, 0) as f64),
            homology: level.target.clone(),
            simple: true,
        },
        competitors: CompetitorReport {
            cutoff: round_real(cutoff),
            base_classes: classes.len(),
            partitions: search.partitions.iter().map(round_partition).collect(),
            truncated: search.truncated,
            completeness,
        },
        flags: CertificateFlags {
            completeness,
            intersection_method: "crossings of axis translates through tiles along both axes"
                .into(),
            notes,
        },
        verdict,
        input,
    })
}
