//! Finite covers given by finite permutation actions of the surface group.
//!
//! Every subgroup used here is the stabilizer of a base point in a finite
//! set on which the group acts through exponent-sum data: a finite abelian
//! quotient (optionally modulo a subgroup), a product of such actions, or a
//! voltage extension of an existing cover through its first homology.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::group::{Letter, SurfaceGroup, Word};
use crate::homology::{smith_normal_form, HomologyVector, IntMatrix};
use crate::SurfcertError;

/// Largest cover index the constructions will build.
pub const MAX_INDEX: usize = 4096;

/// Description of a finite-index subgroup.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SubgroupSpec {
    /// Words with `χ_{2m-1} + χ_{2m+1}` even (`m` is 1-based).
    Lemma61 {
        m: usize,
    },
    /// Words with `n1 | χ_1`, `n2 | χ_2` and `χ_1/n1 + χ_2/n2` even.
    Lemma63 {
        n1: i64,
        n2: i64,
    },
    /// Preimage of the subgroup generated by `subgroup` under the map sending
    /// generator `t` to `images[t]` in the product of cyclic groups `moduli`.
    Custom {
        moduli: Vec<i64>,
        images: Vec<Vec<i64>>,
        #[serde(default)]
        subgroup: Vec<Vec<i64>>,
        #[serde(default)]
        description: String,
    },
    Intersection {
        parts: Vec<SubgroupSpec>,
    },
    /// Subgroup of the `base` cover: words whose lifts from the base coset
    /// have first homology sent by `functionals` into the subgroup generated
    /// by `subgroup` of the product of cyclic groups `moduli`.
    Extension {
        base: Box<SubgroupSpec>,
        moduli: Vec<i64>,
        functionals: Vec<Vec<i64>>,
        #[serde(default)]
        subgroup: Vec<Vec<i64>>,
        #[serde(default)]
        description: String,
    },
}

impl SubgroupSpec {
    pub fn trivial() -> SubgroupSpec {
        SubgroupSpec::Custom {
            moduli: vec![],
            images: vec![],
            subgroup: vec![],
            description: "whole group".into(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            SubgroupSpec::Lemma61 { m } => {
                format!("parity of chi_{} + chi_{}", 2 * m - 1, 2 * m + 1)
            }
            SubgroupSpec::Lemma63 { n1, n2 } => {
                format!("chi_1 in {}Z, chi_2 in {}Z, even quotient sum", n1, n2)
            }
            SubgroupSpec::Custom { description, .. } => description.clone(),
            SubgroupSpec::Intersection { parts } => parts
                .iter()
                .map(|p| p.label())
                .collect::<Vec<_>>()
                .join(" & "),
            SubgroupSpec::Extension { description, .. } => description.clone(),
        }
    }

    /// The defining exponent-sum condition, for specs that have one.
    pub fn exponent_condition(&self, group: &SurfaceGroup, w: &Word) -> Option<bool> {
        let h = group.abelianize(w);
        match self {
            SubgroupSpec::Lemma61 { m } => Some((h[2 * m - 2] + h[2 * m]).rem_euclid(2) == 0),
            SubgroupSpec::Lemma63 { n1, n2 } => {
                let (c1, c2) = (h[0], h[1]);
                Some(c1 % n1 == 0 && c2 % n2 == 0 && (c1 / n1 + c2 / n2).rem_euclid(2) == 0)
            }
            SubgroupSpec::Intersection { parts } => parts
                .iter()
                .map(|p| p.exponent_condition(group, w))
                .try_fold(true, |acc, x| x.map(|b| acc && b)),
            _ => None,
        }
    }

    fn validate(&self, group: &SurfaceGroup) -> Result<(), SurfcertError> {
        let g = group.genus();
        match self {
            SubgroupSpec::Lemma61 { m } if *m < 1 || *m >= g => {
                Err(SurfcertError::InvalidParameter(format!(
                    "lemma61 requires 1 <= m < g, got m = {} with g = {}",
                    m, g
                )))
            }
            SubgroupSpec::Lemma63 { n1, n2 } if *n1 < 1 || *n2 < 1 => {
                Err(SurfcertError::InvalidParameter(format!(
                    "lemma63 requires positive n1, n2, got ({}, {})",
                    n1, n2
                )))
            }
            SubgroupSpec::Custom {
                moduli,
                images,
                subgroup,
                ..
            } => {
                if moduli.iter().any(|&m| m < 1) {
                    return Err(SurfcertError::InvalidParameter(
                        "moduli must be positive".into(),
                    ));
                }
                if !moduli.is_empty() && images.len() != group.rank() {
                    return Err(SurfcertError::InvalidParameter(format!(
                        "expected {} generator images, got {}",
                        group.rank(),
                        images.len()
                    )));
                }
                if images
                    .iter()
                    .chain(subgroup)
                    .any(|v| v.len() != moduli.len())
                {
                    return Err(SurfcertError::InvalidParameter(
                        "image length differs from moduli".into(),
                    ));
                }
                Ok(())
            }
            SubgroupSpec::Intersection { parts } => {
                parts.iter().try_for_each(|p| p.validate(group))
            }
            SubgroupSpec::Extension {
                base,
                moduli,
                functionals,
                subgroup,
                ..
            } => {
                base.validate(group)?;
                if moduli.iter().any(|&m| m < 1) || functionals.len() != moduli.len() {
                    return Err(SurfcertError::InvalidParameter(
                        "one positive modulus per functional".into(),
                    ));
                }
                if subgroup.iter().any(|v| v.len() != moduli.len()) {
                    return Err(SurfcertError::InvalidParameter(
                        "subgroup element length differs from moduli".into(),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Finite abelian group `⊕ Z/moduli` modulo a subgroup, with canonical
/// coset representatives.
#[derive(Clone, Debug)]
struct AbelianQuotient {
    moduli: Vec<i64>,
    subgroup: Vec<Vec<i64>>,
}

impl AbelianQuotient {
    fn new(moduli: &[i64], gens: &[Vec<i64>]) -> AbelianQuotient {
        let moduli = moduli.to_vec();
        let reduce = |v: &[i64]| -> Vec<i64> {
            v.iter()
                .zip(&moduli)
                .map(|(x, m)| x.rem_euclid(*m))
                .collect()
        };
        let zero = vec![0; moduli.len()];
        let mut elems = vec![zero.clone()];
        let mut seen: std::collections::BTreeSet<Vec<i64>> = [zero].into_iter().collect();
        let mut i = 0;
        while i < elems.len() {
            for g in gens {
                let s: Vec<i64> = elems[i].iter().zip(g).map(|(a, b)| a + b).collect();
                let s = reduce(&s);
                if seen.insert(s.clone()) {
                    elems.push(s);
                }
            }
            i += 1;
        }
        AbelianQuotient {
            moduli,
            subgroup: elems,
        }
    }

    fn canon(&self, v: &[i64]) -> Vec<i64> {
        self.subgroup
            .iter()
            .map(|s| {
                v.iter()
                    .zip(s)
                    .zip(&self.moduli)
                    .map(|((a, b), m)| (a + b).rem_euclid(*m))
                    .collect::<Vec<i64>>()
            })
            .min()
            .unwrap_or_default()
    }
}

/// A finite permutation action with a base point, from which the coset
/// table is read off.
enum Action {
    Abelian {
        quotient: AbelianQuotient,
        images: Vec<Vec<i64>>,
    },
    Product(Vec<FiniteCover>),
    Voltage {
        base: FiniteCover,
        quotient: AbelianQuotient,
        /// `values[c][t]`: image of the homology of edge `(c, a_t)`.
        values: Vec<Vec<Vec<i64>>>,
    },
}

impl Action {
    fn start(&self) -> Vec<i64> {
        match self {
            Action::Abelian { quotient, .. } => vec![0; quotient.moduli.len()],
            Action::Product(parts) => vec![0; parts.len()],
            Action::Voltage { quotient, .. } => vec![0; quotient.moduli.len() + 1],
        }
    }

    fn act(&self, s: &[i64], l: Letter) -> Vec<i64> {
        let t = l.generator();
        let sign = l.sign();
        match self {
            Action::Abelian { quotient, images } => {
                let v: Vec<i64> = s
                    .iter()
                    .zip(&images[t])
                    .map(|(a, b)| a + sign * b)
                    .collect();
                quotient.canon(&v)
            }
            Action::Product(parts) => s
                .iter()
                .zip(parts)
                .map(|(&c, p)| p.act(c as usize, l) as i64)
                .collect(),
            Action::Voltage {
                base,
                quotient,
                values,
            } => {
                let c = s[0] as usize;
                let (next, edge_from) = if l.is_inverse() {
                    let d = base.act(c, l);
                    (d, d)
                } else {
                    (base.act(c, l), c)
                };
                let val = &values[edge_from][t];
                let v: Vec<i64> = s[1..].iter().zip(val).map(|(a, b)| a + sign * b).collect();
                let mut out = vec![next as i64];
                out.extend(quotient.canon(&v));
                out
            }
        }
    }
}

/// Coset table of a finite-index subgroup.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteCover {
    pub genus: usize,
    pub spec: SubgroupSpec,
    pub index: usize,
    /// `permutations[t][c]`: coset reached from `c` along `a_{t+1}`.
    pub permutations: Vec<Vec<u32>>,
    /// BFS representative of each coset.
    pub transversal: Vec<Word>,
    #[serde(skip)]
    inverse_permutations: Vec<Vec<u32>>,
}

impl FiniteCover {
    pub fn build(group: &SurfaceGroup, spec: &SubgroupSpec) -> Result<FiniteCover, SurfcertError> {
        spec.validate(group)?;
        let rank = group.rank();
        let action = match spec {
            SubgroupSpec::Lemma61 { m } => {
                let images = (0..rank)
                    .map(|t| vec![i64::from(t == 2 * m - 2 || t == 2 * m)])
                    .collect();
                Action::Abelian {
                    quotient: AbelianQuotient::new(&[2], &[]),
                    images,
                }
            }
            SubgroupSpec::Lemma63 { n1, n2 } => {
                let images = (0..rank)
                    .map(|t| vec![i64::from(t == 0), i64::from(t == 1)])
                    .collect();
                Action::Abelian {
                    quotient: AbelianQuotient::new(&[2 * n1, 2 * n2], &[vec![*n1, *n2]]),
                    images,
                }
            }
            SubgroupSpec::Custom {
                moduli,
                images,
                subgroup,
                ..
            } => {
                let images = if moduli.is_empty() {
                    vec![vec![]; rank]
                } else {
                    images.clone()
                };
                Action::Abelian {
                    quotient: AbelianQuotient::new(moduli, subgroup),
                    images,
                }
            }
            SubgroupSpec::Intersection { parts } => Action::Product(
                parts
                    .iter()
                    .map(|p| FiniteCover::build(group, p))
                    .collect::<Result<_, _>>()?,
            ),
            SubgroupSpec::Extension {
                base,
                moduli,
                functionals,
                subgroup,
                ..
            } => {
                let base = FiniteCover::build(group, base)?;
                let hom = base.homology(group)?;
                if functionals.iter().any(|f| f.len() != hom.rank) {
                    return Err(SurfcertError::InvalidParameter(format!(
                        "functionals must have length {} (cover homology rank)",
                        hom.rank
                    )));
                }
                let values = (0..base.index)
                    .map(|c| {
                        (0..rank)
                            .map(|t| {
                                let v = hom.edge_class(c, t);
                                functionals.iter().map(|f| v.dot(f)).collect()
                            })
                            .collect()
                    })
                    .collect();
                Action::Voltage {
                    base,
                    quotient: AbelianQuotient::new(moduli, subgroup),
                    values,
                }
            }
        };
        Self::from_action(group, spec.clone(), &action)
    }

    fn from_action(
        group: &SurfaceGroup,
        spec: SubgroupSpec,
        action: &Action,
    ) -> Result<FiniteCover, SurfcertError> {
        let rank = group.rank();
        let start = action.start();
        let mut ids: HashMap<Vec<i64>, u32> = HashMap::new();
        let mut states = vec![start.clone()];
        let mut transversal = vec![Word::identity()];
        ids.insert(start, 0);
        let mut queue = VecDeque::from([0usize]);
        let mut edges: Vec<Vec<(u32, u32)>> = Vec::new();
        while let Some(c) = queue.pop_front() {
            let mut row = Vec::with_capacity(2 * rank);
            for code in 0..2 * rank {
                let l = Letter::new(code / 2, code % 2 == 1);
                let s = action.act(&states[c], l);
                let id = match ids.get(&s) {
                    Some(&id) => id,
                    None => {
                        let id = states.len() as u32;
                        if states.len() >= MAX_INDEX {
                            return Err(SurfcertError::IndexTooLarge(MAX_INDEX));
                        }
                        ids.insert(s.clone(), id);
                        states.push(s);
                        transversal.push(transversal[c].mul(&Word::letter(l)));
                        queue.push_back(id as usize);
                        id
                    }
                };
                row.push((code as u32, id));
            }
            edges.push(row);
        }
        let k = states.len();
        let mut permutations = vec![vec![0u32; k]; rank];
        for (c, row) in edges.iter().enumerate() {
            for &(code, id) in row {
                if code % 2 == 0 {
                    permutations[code as usize / 2][c] = id;
                }
            }
        }
        let mut cover = FiniteCover {
            genus: group.genus(),
            spec,
            index: k,
            permutations,
            transversal,
            inverse_permutations: Vec::new(),
        };
        cover.finish()?;
        Ok(cover)
    }

    /// Recomputes derived tables and checks that every generator acts by a
    /// bijection. Needed after deserialization.
    pub fn finish(&mut self) -> Result<(), SurfcertError> {
        let k = self.index;
        if self.permutations.len() != 2 * self.genus || self.transversal.len() != k {
            return Err(SurfcertError::InvalidCover(
                "table dimensions disagree with index".into(),
            ));
        }
        self.inverse_permutations = Vec::with_capacity(self.permutations.len());
        for p in &self.permutations {
            let mut inv = vec![u32::MAX; k];
            if p.len() != k {
                return Err(SurfcertError::InvalidCover(
                    "permutation length differs from index".into(),
                ));
            }
            for (c, &d) in p.iter().enumerate() {
                if d as usize >= k || inv[d as usize] != u32::MAX {
                    return Err(SurfcertError::InvalidCover(
                        "generator action is not a bijection".into(),
                    ));
                }
                inv[d as usize] = c as u32;
            }
            self.inverse_permutations.push(inv);
        }
        for (c, t) in self.transversal.iter().enumerate() {
            if self.walk(t, 0) != c {
                return Err(SurfcertError::InvalidCover(format!(
                    "transversal word {} does not reach coset {}",
                    t, c
                )));
            }
        }
        Ok(())
    }

    pub fn from_json(group: &SurfaceGroup, text: &str) -> Result<FiniteCover, SurfcertError> {
        let mut c: FiniteCover =
            serde_json::from_str(text).map_err(|e| SurfcertError::Json(e.to_string()))?;
        if c.genus != group.genus() {
            return Err(SurfcertError::InvalidCover("genus mismatch".into()));
        }
        c.finish()?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("cover serializes")
    }

    #[inline]
    pub fn act(&self, c: usize, l: Letter) -> usize {
        let t = l.generator();
        if l.is_inverse() {
            self.inverse_permutations[t][c] as usize
        } else {
            self.permutations[t][c] as usize
        }
    }

    /// End coset of the lift of `w` starting at coset `start`.
    pub fn walk(&self, w: &Word, start: usize) -> usize {
        w.letters().iter().fold(start, |c, &l| self.act(c, l))
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.walk(w, 0) == 0
    }

    /// Permutation of cosets induced by `w`.
    pub fn permutation_of(&self, w: &Word) -> Vec<u32> {
        (0..self.index).map(|c| self.walk(w, c) as u32).collect()
    }

    /// Orbit length of `start` under repeated walks along `w`.
    pub fn degree(&self, w: &Word, start: usize) -> usize {
        let mut c = self.walk(w, start);
        let mut d = 1;
        while c != start {
            c = self.walk(w, c);
            d += 1;
        }
        d
    }

    /// Schreier data, relation matrix and integer homology of the cover.
    pub fn homology(&self, group: &SurfaceGroup) -> Result<CoverHomology, SurfcertError> {
        CoverHomology::compute(self, group)
    }
}

/// Reidemeister–Schreier presentation data and first homology of a cover.
#[derive(Clone, Debug)]
pub struct CoverHomology {
    pub index: usize,
    pub base_genus: usize,
    pub cover_genus: usize,
    pub rank: usize,
    /// Non-tree edges `(coset, generator)`; each is a Schreier generator.
    pub schreier: Vec<(usize, usize)>,
    /// `edge_generator[c][t]`: Schreier generator of edge `(c, a_t)`.
    edge_generator: Vec<Vec<Option<usize>>>,
    /// One rewritten relator per coset, abelianized.
    pub relations: IntMatrix,
    /// Sends Schreier exponent vectors to homology coordinates.
    pub abelianization: IntMatrix,
    /// Sends cover homology coordinates to base homology.
    pub projection: IntMatrix,
    pub invariants: Vec<i64>,
}

impl CoverHomology {
    fn compute(cover: &FiniteCover, group: &SurfaceGroup) -> Result<CoverHomology, SurfcertError> {
        let k = cover.index;
        let rank = group.rank();
        // tree edges: the BFS parent edges of the transversal
        let mut tree = vec![vec![false; rank]; k];
        for c in 1..k {
            let t = &cover.transversal[c];
            let l = *t
                .letters()
                .last()
                .expect("non-base cosets have nonempty representatives");
            let prefix = Word::from_letters(t.letters()[..t.len() - 1].iter().copied());
            let p = cover.walk(&prefix, 0);
            if l.is_inverse() {
                tree[c][l.generator()] = true;
            } else {
                tree[p][l.generator()] = true;
            }
        }
        let mut schreier = Vec::new();
        let mut edge_generator = vec![vec![None; rank]; k];
        for c in 0..k {
            for t in 0..rank {
                if !tree[c][t] {
                    edge_generator[c][t] = Some(schreier.len());
                    schreier.push((c, t));
                }
            }
        }
        let n = schreier.len();
        let mut rows = Vec::with_capacity(k);
        let rel = group.relator();
        for c in 0..k {
            rows.push(rewrite_counts(cover, &edge_generator, &rel, c, n));
        }
        let relations = IntMatrix::from_rows(&rows, n);
        let snf = smith_normal_form(&relations)?;
        let torsion = snf.torsion();
        if !torsion.is_empty() {
            return Err(SurfcertError::TorsionInHomology(torsion));
        }
        let r = snf.rank();
        let h_rank = n - r;
        let cover_genus = 1 + k * (group.genus() - 1);
        if h_rank != 2 * cover_genus {
            return Err(SurfcertError::Inconsistent(format!(
                "cover homology has rank {} but Euler characteristic predicts {}",
                h_rank,
                2 * cover_genus
            )));
        }
        let abelianization = snf.v.columns_from(r);
        let mut base_images = IntMatrix::zeros(n, rank);
        // T_c a_t T_d^-1 abelianizes to e_t + [T_c] - [T_d]
        let tab: Vec<HomologyVector> = cover
            .transversal
            .iter()
            .map(|w| group.abelianize(w))
            .collect();
        for (i, &(c, t)) in schreier.iter().enumerate() {
            let d = cover.act(c, Letter::pos(t));
            let img = &(&tab[c] - &tab[d]) + &HomologyVector::unit(rank, t);
            for (j, &x) in img.as_slice().iter().enumerate() {
                base_images.set(i, j, x);
            }
        }
        let projection = snf.v_inv.rows_from(r).matmul(&base_images);
        Ok(CoverHomology {
            index: k,
            base_genus: group.genus(),
            cover_genus,
            rank: h_rank,
            schreier,
            edge_generator,
            relations,
            abelianization,
            projection,
            invariants: snf.invariants,
        })
    }

    pub fn schreier_count(&self) -> usize {
        self.schreier.len()
    }

    /// Schreier generator words `T_c a_t T_{c a_t}^{-1}`.
    pub fn schreier_words(&self, cover: &FiniteCover) -> Vec<Word> {
        self.schreier
            .iter()
            .map(|&(c, t)| {
                let d = cover.act(c, Letter::pos(t));
                cover.transversal[c]
                    .mul(&Word::gen(t))
                    .mul(&cover.transversal[d].inverse())
            })
            .collect()
    }

    /// Homology class of the edge `(c, a_t)` (zero on tree edges).
    pub fn edge_class(&self, c: usize, t: usize) -> HomologyVector {
        match self.edge_generator[c][t] {
            Some(i) => HomologyVector::new(self.abelianization.row(i).to_vec()),
            None => HomologyVector::zero(self.rank),
        }
    }

    /// Schreier rewriting of `w` read from coset `start`, as a word whose
    /// letter indices are Schreier generator numbers.
    pub fn rewrite(&self, cover: &FiniteCover, w: &Word, start: usize) -> Word {
        let mut out = Vec::new();
        let mut c = start;
        for &l in w.letters() {
            let t = l.generator();
            if l.is_inverse() {
                let d = cover.act(c, l);
                if let Some(i) = self.edge_generator[d][t] {
                    out.push(Letter::neg(i));
                }
                c = d;
            } else {
                if let Some(i) = self.edge_generator[c][t] {
                    out.push(Letter::pos(i));
                }
                c = cover.act(c, l);
            }
        }
        Word::from_letters(out)
    }

    /// Homology of the path lifting `w` from `start` (closed or not).
    pub fn path_class(&self, cover: &FiniteCover, w: &Word, start: usize) -> HomologyVector {
        let mut acc = HomologyVector::zero(self.rank);
        let mut c = start;
        for &l in w.letters() {
            let t = l.generator();
            if l.is_inverse() {
                let d = cover.act(c, l);
                acc = &acc - &self.edge_class(d, t);
                c = d;
            } else {
                acc += &self.edge_class(c, t);
                c = cover.act(c, l);
            }
        }
        acc
    }

    pub fn schreier_word_class(&self, w: &Word) -> HomologyVector {
        let mut v = vec![0i64; self.schreier.len()];
        for l in w.letters() {
            v[l.generator()] += l.sign();
        }
        &HomologyVector::new(v) * &self.abelianization
    }

    /// Image of a cover homology class in the base.
    pub fn project(&self, h: &HomologyVector) -> HomologyVector {
        h * &self.projection
    }
}

fn rewrite_counts(
    cover: &FiniteCover,
    edge_generator: &[Vec<Option<usize>>],
    w: &Word,
    start: usize,
    n: usize,
) -> Vec<i64> {
    let mut v = vec![0i64; n];
    let mut c = start;
    for &l in w.letters() {
        let t = l.generator();
        if l.is_inverse() {
            let d = cover.act(c, l);
            if let Some(i) = edge_generator[d][t] {
                v[i] -= 1;
            }
            c = d;
        } else {
            if let Some(i) = edge_generator[c][t] {
                v[i] += 1;
            }
            c = cover.act(c, l);
        }
    }
    v
}

/// A closed lift of a base curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftedCurve {
    pub base_word: Word,
    pub start_coset: usize,
    pub degree: usize,
    /// Word in the Schreier generators of the cover.
    pub lift_word: Word,
    pub lift_homology: HomologyVector,
}

pub fn lift_curve(
    cover: &FiniteCover,
    hom: &CoverHomology,
    w: &Word,
    start: usize,
) -> Result<LiftedCurve, SurfcertError> {
    if w.is_empty() {
        return Err(SurfcertError::TrivialCurve);
    }
    if start >= cover.index {
        return Err(SurfcertError::InvalidParameter(format!(
            "coset {} out of range",
            start
        )));
    }
    let degree = cover.degree(w, start);
    let closed = w.pow(degree as i64);
    let lift_word = hom.rewrite(cover, &closed, start);
    let lift_homology = hom.schreier_word_class(&lift_word);
    Ok(LiftedCurve {
        base_word: w.clone(),
        start_coset: start,
        degree,
        lift_word,
        lift_homology,
    })
}

/// Orbits of the cosets under the walk along `w`; each orbit is one closed
/// lift. Orbits are listed by their least coset.
pub fn lift_orbits(cover: &FiniteCover, w: &Word) -> Vec<Vec<usize>> {
    let perm = cover.permutation_of(w);
    let mut seen = vec![false; cover.index];
    let mut out = Vec::new();
    for c in 0..cover.index {
        if seen[c] {
            continue;
        }
        let mut orbit = vec![c];
        seen[c] = true;
        let mut d = perm[c] as usize;
        while d != c {
            seen[d] = true;
            orbit.push(d);
            d = perm[d] as usize;
        }
        out.push(orbit);
    }
    out
}

/// Base word represented by a Schreier-generator word.
pub fn expand_schreier_word(words: &[Word], w: &Word) -> Word {
    let mut out = Word::identity();
    for &l in w.letters() {
        let s = &words[l.generator()];
        out = out.mul(&if l.is_inverse() {
            s.inverse()
        } else {
            s.clone()
        });
    }
    out
}

/// Length of a closed lift: the covering map is a local isometry.
pub fn cover_length(base_length: f64, lifted: &LiftedCurve) -> f64 {
    lifted.degree as f64 * base_length
}

/// The double cover cut out by the parity of `χ_{2m-1} + χ_{2m+1}`.
pub fn subgroup_lemma61(group: &SurfaceGroup, m: usize) -> Result<FiniteCover, SurfcertError> {
    FiniteCover::build(group, &SubgroupSpec::Lemma61 { m })
}

/// The power-parity cover of index `2 n1 n2`.
pub fn subgroup_lemma63(
    group: &SurfaceGroup,
    n1: i64,
    n2: i64,
) -> Result<FiniteCover, SurfcertError> {
    FiniteCover::build(group, &SubgroupSpec::Lemma63 { n1, n2 })
}
