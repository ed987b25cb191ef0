//! Simple closed geodesics, disjoint partitions of homology classes and
//! the search for short partitions, on the surface and on finite covers.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::cover::{lift_orbits, CoverHomology, FiniteCover};
use crate::geometry::{enumerate_short_classes, Completeness, GeodesicClass, DEFAULT_NODE_LIMIT};
use crate::group::{SurfaceGroup, Word};
use crate::homology::HomologyVector;
use crate::intersect::IntersectionOracle;
use crate::SurfcertError;

/// A closed geodesic together with its simplicity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveClass {
    #[serde(flatten)]
    pub class: GeodesicClass,
    pub simple: bool,
}

impl CurveClass {
    /// Fails for trivial words and proper powers.
    pub fn new(oracle: &mut IntersectionOracle, w: &Word) -> Result<CurveClass, SurfcertError> {
        let class = GeodesicClass::new(oracle.rep(), oracle.group(), w)?;
        Self::from_class(oracle, class)
    }

    pub fn from_class(
        oracle: &mut IntersectionOracle,
        class: GeodesicClass,
    ) -> Result<CurveClass, SurfcertError> {
        if !class.primitive {
            return Err(SurfcertError::InvalidParameter(format!(
                "{} is a proper power",
                class.form
            )));
        }
        let simple = oracle.is_simple(&class.form)?;
        Ok(CurveClass { class, simple })
    }

    pub fn form(&self) -> &Word {
        &self.class.form
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionEntry {
    #[serde(flatten)]
    pub curve: CurveClass,
    pub multiplicity: u32,
}

/// Pairwise disjoint simple closed geodesics with multiplicities. Entries
/// are pairwise non-conjugate and sorted by length, then form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisjointPartition {
    pub entries: Vec<PartitionEntry>,
    pub homology: HomologyVector,
    pub total_length: f64,
}

impl DisjointPartition {
    /// Assembles the partition and its totals; no disjointness check.
    pub fn new(dim: usize, mut entries: Vec<PartitionEntry>) -> DisjointPartition {
        entries.sort_by(|a, b| {
            a.curve
                .class
                .length
                .total_cmp(&b.curve.class.length)
                .then_with(|| a.curve.class.form.cmp(&b.curve.class.form))
        });
        let mut homology = HomologyVector::zero(dim);
        let mut total_length = 0.0;
        for e in &entries {
            homology += &e.curve.class.homology.scale(e.multiplicity as i64);
            total_length += e.multiplicity as f64 * e.curve.class.length;
        }
        DisjointPartition {
            entries,
            homology,
            total_length,
        }
    }

    pub fn key(&self) -> Vec<(Word, u32)> {
        let mut k: Vec<(Word, u32)> = self
            .entries
            .iter()
            .map(|e| (e.curve.class.form.clone(), e.multiplicity))
            .collect();
        k.sort();
        k
    }

    /// Rechecks the homology sum, the total length, simplicity and pairwise
    /// disjointness from scratch.
    pub fn validate(&self, oracle: &mut IntersectionOracle) -> Result<(), SurfcertError> {
        let group = oracle.group().clone();
        let mut h = HomologyVector::zero(self.homology.dim());
        let mut total = 0.0;
        for e in &self.entries {
            if e.multiplicity == 0 {
                return Err(SurfcertError::Inconsistent("zero multiplicity".into()));
            }
            let form = &e.curve.class.form;
            h += &group.abelianize(form).scale(e.multiplicity as i64);
            total += e.multiplicity as f64 * oracle.rep().translation_length(form)?;
            if oracle.self_intersection(form)? != 0 {
                return Err(SurfcertError::Inconsistent(format!(
                    "{} is not simple",
                    form
                )));
            }
        }
        if h != self.homology {
            return Err(SurfcertError::Inconsistent(format!(
                "entries sum to {} but the partition records {}",
                h, self.homology
            )));
        }
        if (total - self.total_length).abs() > 1e-9 {
            return Err(SurfcertError::Inconsistent(format!(
                "total length {} differs from recorded {}",
                total, self.total_length
            )));
        }
        for (i, a) in self.entries.iter().enumerate() {
            for b in &self.entries[i + 1..] {
                if group.are_conjugate(a.curve.form(), b.curve.form()) {
                    return Err(SurfcertError::Inconsistent(format!(
                        "{} appears twice",
                        a.curve.form()
                    )));
                }
                if oracle.intersection(a.curve.form(), b.curve.form())? != 0 {
                    return Err(SurfcertError::Inconsistent(format!(
                        "{} and {} intersect",
                        a.curve.form(),
                        b.curve.form()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Partitions with the same entries up to free homotopy and the same
/// multiplicities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionEquivClass {
    pub representative: DisjointPartition,
    pub min_total_length: f64,
}

impl PartitionEquivClass {
    pub fn of(p: &DisjointPartition) -> PartitionEquivClass {
        PartitionEquivClass {
            representative: p.clone(),
            min_total_length: p.total_length,
        }
    }
}

/// Entries are stored in canonical conjugacy form, so equivalence is
/// equality of the entry multisets.
pub fn partitions_equivalent(a: &DisjointPartition, b: &DisjointPartition) -> bool {
    a.entries.len() == b.entries.len() && a.key() == b.key()
}

#[derive(Clone, Debug)]
pub struct PartitionSearch {
    pub cutoff: f64,
    pub partitions: Vec<DisjointPartition>,
    pub completeness: Completeness,
}

/// A building block for the combination search.
struct Piece {
    homology: HomologyVector,
    length: f64,
    /// Pieces sharing a key are the same curve with opposite orientations.
    geom: usize,
}

fn direction(v: &HomologyVector) -> (Vec<i64>, i64) {
    let g = v.as_slice().iter().fold(0i64, |a, &x| gcd(a, x.abs()));
    if g == 0 {
        return (v.as_slice().to_vec(), 0);
    }
    (v.as_slice().iter().map(|x| x / g).collect(), g)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Multisets of pieces with multiplicities whose homology sums to `target`
/// and whose total length is below `limit`. Pieces must be sorted by
/// length. `emit` may stop the search by returning `false`.
fn search_combinations(
    pieces: &[Piece],
    target: &HomologyVector,
    limit: f64,
    emit: &mut dyn FnMut(&[(usize, u32)]) -> Result<bool, SurfcertError>,
) -> Result<(), SurfcertError> {
    let mut by_direction: HashMap<Vec<i64>, Vec<(usize, i64)>> = HashMap::new();
    for (i, p) in pieces.iter().enumerate() {
        let (d, g) = direction(&p.homology);
        if g > 0 {
            by_direction.entry(d).or_default().push((i, g));
        }
    }
    struct State<'a> {
        pieces: &'a [Piece],
        by_direction: HashMap<Vec<i64>, Vec<(usize, i64)>>,
        limit: f64,
        chosen: Vec<(usize, u32)>,
        used: HashSet<usize>,
    }
    fn dfs(
        s: &mut State,
        start: usize,
        rest: HomologyVector,
        length: f64,
        emit: &mut dyn FnMut(&[(usize, u32)]) -> Result<bool, SurfcertError>,
    ) -> Result<bool, SurfcertError> {
        if rest.is_zero() {
            if !s.chosen.is_empty() && !emit(&s.chosen)? {
                return Ok(false);
            }
        } else {
            // the last nonzero piece is looked up by direction
            let (d, g) = direction(&rest);
            if let Some(list) = s.by_direction.get(&d) {
                for &(i, k) in list {
                    let p = &s.pieces[i];
                    if i < start || g % k != 0 || s.used.contains(&p.geom) {
                        continue;
                    }
                    let m = g / k;
                    if length + m as f64 * p.length < s.limit {
                        s.chosen.push((i, m as u32));
                        let go = emit(&s.chosen)?;
                        s.chosen.pop();
                        if !go {
                            return Ok(false);
                        }
                    }
                }
            }
        }
        for i in start..s.pieces.len() {
            let (plen, geom) = (s.pieces[i].length, s.pieces[i].geom);
            if length + plen >= s.limit {
                break;
            }
            if s.used.contains(&geom) {
                continue;
            }
            let h = s.pieces[i].homology.clone();
            let mut m = 1u32;
            loop {
                let next_len = length + m as f64 * plen;
                if next_len >= s.limit {
                    break;
                }
                let next = &rest - &h.scale(m as i64);
                if !next.is_zero() || h.is_zero() {
                    s.chosen.push((i, m));
                    s.used.insert(geom);
                    let go = dfs(s, i + 1, next, next_len, emit)?;
                    s.used.remove(&geom);
                    s.chosen.pop();
                    if !go {
                        return Ok(false);
                    }
                }
                m += 1;
            }
        }
        Ok(true)
    }
    let mut state = State {
        pieces,
        by_direction,
        limit,
        chosen: Vec::new(),
        used: HashSet::new(),
    };
    dfs(&mut state, 0, target.clone(), 0.0, emit)?;
    Ok(())
}

/// Keys pairing each class with its reverse.
fn orientation_keys(group: &SurfaceGroup, classes: &[GeodesicClass]) -> Vec<usize> {
    let index: HashMap<&Word, usize> = classes
        .iter()
        .enumerate()
        .map(|(i, c)| (&c.form, i))
        .collect();
    classes
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let rev = group.conjugacy_form(&c.form.inverse());
            index.get(&rev).map_or(i, |&j| i.min(j))
        })
        .collect()
}

/// Every disjoint partition of `h` with total length at most `cutoff`,
/// one per equivalence class. Homologically trivial entries are allowed.
pub fn enumerate_partitions_below(
    oracle: &mut IntersectionOracle,
    h: &HomologyVector,
    cutoff: f64,
) -> Result<PartitionSearch, SurfcertError> {
    let group = oracle.group().clone();
    if h.dim() != group.rank() {
        return Err(SurfcertError::InvalidParameter(format!(
            "homology vector has {} coordinates, expected {}",
            h.dim(),
            group.rank()
        )));
    }
    let short = enumerate_short_classes(oracle.rep(), &group, cutoff, DEFAULT_NODE_LIMIT)?;
    let classes: Vec<GeodesicClass> = short.classes.into_iter().filter(|c| c.primitive).collect();
    let keys = orientation_keys(&group, &classes);
    let pieces: Vec<Piece> = classes
        .iter()
        .zip(&keys)
        .map(|(c, &k)| Piece {
            homology: c.homology.clone(),
            length: c.length,
            geom: k,
        })
        .collect();
    let mut found = Vec::new();
    let mut err = None;
    search_combinations(&pieces, h, cutoff + 1e-9, &mut |combo| {
        match assemble(oracle, &classes, combo) {
            Ok(Some(p)) => found.push(p),
            Ok(None) => {}
            Err(e) => {
                err = Some(e);
                return Ok(false);
            }
        }
        Ok(true)
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    found.sort_by(compare_partitions_by_length);
    Ok(PartitionSearch {
        cutoff,
        partitions: found,
        completeness: short.completeness,
    })
}

fn assemble(
    oracle: &mut IntersectionOracle,
    classes: &[GeodesicClass],
    combo: &[(usize, u32)],
) -> Result<Option<DisjointPartition>, SurfcertError> {
    for &(i, _) in combo {
        if !oracle.is_simple(&classes[i].form)? {
            return Ok(None);
        }
    }
    for (a, &(i, _)) in combo.iter().enumerate() {
        for &(j, _) in &combo[a + 1..] {
            if oracle.intersection(&classes[i].form, &classes[j].form)? != 0 {
                return Ok(None);
            }
        }
    }
    let entries = combo
        .iter()
        .map(|&(i, m)| PartitionEntry {
            curve: CurveClass {
                class: classes[i].clone(),
                simple: true,
            },
            multiplicity: m,
        })
        .collect();
    Ok(Some(DisjointPartition::new(oracle.group().rank(), entries)))
}

/// Total length, then entry count, then the canonical forms.
pub fn compare_partitions_by_length(
    a: &DisjointPartition,
    b: &DisjointPartition,
) -> std::cmp::Ordering {
    a.total_length
        .total_cmp(&b.total_length)
        .then(a.entries.len().cmp(&b.entries.len()))
        .then_with(|| a.key().cmp(&b.key()))
}

/// The shortest disjoint partition of `h`, searching below `hint` and
/// doubling up to `max_cutoff`.
pub fn minimal_disjoint_partition(
    oracle: &mut IntersectionOracle,
    h: &HomologyVector,
    hint: f64,
    max_cutoff: f64,
) -> Result<Option<(DisjointPartition, PartitionSearch)>, SurfcertError> {
    if !(hint > 0.0) {
        return Err(SurfcertError::InvalidParameter(format!(
            "length hint {} must be positive",
            hint
        )));
    }
    let mut cutoff = hint.min(max_cutoff);
    loop {
        let search = enumerate_partitions_below(oracle, h, cutoff)?;
        if let Some(best) = search.partitions.first() {
            return Ok(Some((best.clone(), search)));
        }
        if cutoff >= max_cutoff {
            return Ok(None);
        }
        cutoff = (2.0 * cutoff).min(max_cutoff);
    }
}

/// A closed geodesic on a cover: the lift of the primitive class `form`
/// through the orbit of `coset`, closing after `degree` turns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverCurve {
    pub form: Word,
    /// Least coset of the orbit.
    pub coset: usize,
    pub degree: usize,
    pub base_length: f64,
    pub length: f64,
    pub homology: HomologyVector,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverEntry {
    #[serde(flatten)]
    pub curve: CoverCurve,
    pub multiplicity: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverPartition {
    pub entries: Vec<CoverEntry>,
    pub homology: HomologyVector,
    pub total_length: f64,
}

/// Short partitions found on a cover.
#[derive(Clone, Debug)]
pub struct CoverSearch {
    pub cutoff: f64,
    pub partitions: Vec<CoverPartition>,
    /// The result list was cut at its maximum size.
    pub truncated: bool,
    pub completeness: Completeness,
}

/// All closed geodesics of the cover of length below `cutoff`, from the
/// primitive base classes.
pub fn cover_curves_below(
    classes: &[GeodesicClass],
    cover: &FiniteCover,
    hom: &CoverHomology,
    cutoff: f64,
) -> Vec<CoverCurve> {
    let mut out = Vec::new();
    for c in classes.iter().filter(|c| c.primitive && c.length < cutoff) {
        for orbit in lift_orbits(cover, &c.form) {
            let degree = orbit.len();
            let length = degree as f64 * c.length;
            if length >= cutoff {
                continue;
            }
            let coset = orbit[0];
            out.push(CoverCurve {
                form: c.form.clone(),
                coset,
                degree,
                base_length: c.length,
                length,
                homology: hom.path_class(cover, &c.form.pow(degree as i64), coset),
            });
        }
    }
    out.sort_by(|a, b| {
        a.length
            .total_cmp(&b.length)
            .then_with(|| a.form.cmp(&b.form))
            .then(a.coset.cmp(&b.coset))
    });
    out
}

/// Disjoint partitions of `target` on the cover, strictly shorter than
/// `cutoff`, without homologically trivial entries. Dropping trivial
/// entries only shortens a partition, so the search is empty iff there is
/// no shorter partition at all. `classes` must contain every primitive
/// base class below `cutoff`.
pub fn cover_partitions_below(
    oracle: &mut IntersectionOracle,
    classes: &[GeodesicClass],
    completeness: Completeness,
    cover: &FiniteCover,
    hom: &CoverHomology,
    target: &HomologyVector,
    cutoff: f64,
    max_results: usize,
) -> Result<CoverSearch, SurfcertError> {
    let group = oracle.group().clone();
    let curves: Vec<CoverCurve> = cover_curves_below(classes, cover, hom, cutoff)
        .into_iter()
        .filter(|c| !c.homology.is_zero())
        .collect();
    let base_keys = orientation_keys(&group, classes);
    let class_index: HashMap<&Word, usize> = classes
        .iter()
        .enumerate()
        .map(|(i, c)| (&c.form, i))
        .collect();
    let mut geom_ids: HashMap<(usize, usize), usize> = HashMap::new();
    let pieces: Vec<Piece> = curves
        .iter()
        .map(|c| {
            let k = base_keys[class_index[&c.form]];
            let n = geom_ids.len();
            Piece {
                homology: c.homology.clone(),
                length: c.length,
                geom: *geom_ids.entry((k, c.coset)).or_insert(n),
            }
        })
        .collect();
    let mut simple_base: HashMap<Word, bool> = HashMap::new();
    let mut found = Vec::new();
    let mut truncated = false;
    let mut err = None;
    search_combinations(&pieces, target, cutoff - 1e-9, &mut |combo| {
        match cover_combo_disjoint(oracle, &mut simple_base, cover, &curves, combo) {
            Ok(true) => {
                let entries: Vec<CoverEntry> = combo
                    .iter()
                    .map(|&(i, m)| CoverEntry {
                        curve: curves[i].clone(),
                        multiplicity: m,
                    })
                    .collect();
                let total_length = entries
                    .iter()
                    .map(|e| e.multiplicity as f64 * e.curve.length)
                    .sum();
                found.push(CoverPartition {
                    entries,
                    homology: target.clone(),
                    total_length,
                });
                if found.len() >= max_results {
                    truncated = true;
                    return Ok(false);
                }
            }
            Ok(false) => {}
            Err(e) => {
                err = Some(e);
                return Ok(false);
            }
        }
        Ok(true)
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    found.sort_by(|a, b| a.total_length.total_cmp(&b.total_length));
    Ok(CoverSearch {
        cutoff,
        partitions: found,
        truncated,
        completeness,
    })
}

fn cover_combo_disjoint(
    oracle: &mut IntersectionOracle,
    simple_base: &mut HashMap<Word, bool>,
    cover: &FiniteCover,
    curves: &[CoverCurve],
    combo: &[(usize, u32)],
) -> Result<bool, SurfcertError> {
    let mut base_simple =
        |oracle: &mut IntersectionOracle, w: &Word| -> Result<bool, SurfcertError> {
            if let Some(&s) = simple_base.get(w) {
                return Ok(s);
            }
            let s = oracle.is_simple(w)?;
            simple_base.insert(w.clone(), s);
            Ok(s)
        };
    for &(i, _) in combo {
        let c = &curves[i];
        // lifts of simple curves are simple
        if !base_simple(oracle, &c.form)?
            && oracle.cover_intersection(cover, &c.form, c.coset, &c.form, c.coset)? != 0
        {
            return Ok(false);
        }
    }
    for (a, &(i, _)) in combo.iter().enumerate() {
        for &(j, _) in &combo[a + 1..] {
            let (x, y) = (&curves[i], &curves[j]);
            let same_base =
                x.form == y.form || oracle.group().conjugacy_form(&x.form.inverse()) == y.form;
            // distinct lifts of one simple curve are disjoint
            if same_base && base_simple(oracle, &x.form)? {
                continue;
            }
            if oracle.cover_intersection(cover, &x.form, x.coset, &y.form, y.coset)? != 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
