//! Geometric intersection numbers of closed geodesics.
//!
//! The crossings of two closed geodesics `c1`, `c2` correspond to the
//! translates `u·axis(c2)` that cross a fundamental segment of `axis(c1)`,
//! where `u` runs over `⟨c1⟩\G/⟨c2⟩`. A crossing point lies in some tile
//! `h1 F` meeting the segment of `axis(c1)`, and after sliding along
//! `axis(c2)` its preimage lies in a tile `h2 F` meeting the segment of
//! `axis(c2)`; so `u h2 F` touches `h1 F` and `u = h1 n h2^-1` with `n F`
//! touching `F`. All such `n` move `i` by at most twice the tile radius.

use std::collections::HashMap;
use std::rc::Rc;

use crate::cover::FiniteCover;
use crate::geometry::{
    Axis, Completeness, FuchsianRep, Isometry, Point, TileSet, DEFAULT_NODE_LIMIT,
};
use crate::group::{SurfaceGroup, Word};
use crate::SurfcertError;

/// A translate `word · axis(second)` crossing the fundamental segment of
/// `axis(first)` centred at the foot of `i`, at parameter `t`.
#[derive(Clone, Debug)]
pub struct Crossing {
    pub t: f64,
    /// Angle coordinate of the crossing geodesic (see `Axis::crossing_of`).
    pub angle: f64,
    pub word: Word,
}

#[derive(Clone, Debug)]
pub struct CrossingData {
    pub first: Word,
    pub second: Word,
    pub crossings: Vec<Crossing>,
    pub completeness: Completeness,
}

impl CrossingData {
    pub fn count(&self) -> usize {
        self.crossings.len()
    }

    /// Crossings between the lift of `first` from coset `s1` and the lift
    /// of `second` from coset `s2`. When both are the same lift every self
    /// crossing is counted twice.
    pub fn cover_count(&self, cover: &FiniteCover, s1: usize, s2: usize) -> usize {
        let mut in_orbit = vec![false; cover.index];
        let mut c = s2;
        loop {
            in_orbit[c] = true;
            c = cover.walk(&self.second, c);
            if c == s2 {
                break;
            }
        }
        let mut starts = vec![s1];
        let mut c = cover.walk(&self.first, s1);
        while c != s1 {
            starts.push(c);
            c = cover.walk(&self.first, c);
        }
        self.crossings
            .iter()
            .map(|x| {
                starts
                    .iter()
                    .filter(|&&s| in_orbit[cover.walk(&x.word, s)])
                    .count()
            })
            .sum()
    }
}

struct Tube {
    axis: Axis,
    /// Start of the fundamental segment, centred at the foot of `i`.
    start: f64,
    /// Inverse elements with their words.
    inverse: Vec<(Isometry, Word)>,
    direct: Vec<(Isometry, Word)>,
    complete: bool,
}

/// Crossing computations with cached tile searches.
pub struct IntersectionOracle<'a> {
    rep: &'a FuchsianRep,
    group: SurfaceGroup,
    near: Vec<(Isometry, Word)>,
    near_complete: bool,
    node_limit: usize,
    tubes: HashMap<Word, Rc<Tube>>,
    pairs: HashMap<(Word, Word), Rc<CrossingData>>,
    simple: HashMap<Word, bool>,
}

impl<'a> IntersectionOracle<'a> {
    pub fn new(rep: &'a FuchsianRep) -> Result<IntersectionOracle<'a>, SurfcertError> {
        Self::with_node_limit(rep, DEFAULT_NODE_LIMIT)
    }

    pub fn with_node_limit(
        rep: &'a FuchsianRep,
        node_limit: usize,
    ) -> Result<IntersectionOracle<'a>, SurfcertError> {
        let group = SurfaceGroup::new(rep.genus())?;
        let ball = rep.ball(2.0 * rep.tiling().radius + 1e-7, node_limit);
        let near = Self::holonomies(rep, &ball)?;
        Ok(IntersectionOracle {
            rep,
            group,
            near,
            near_complete: ball.complete,
            node_limit,
            tubes: HashMap::new(),
            pairs: HashMap::new(),
            simple: HashMap::new(),
        })
    }

    /// Tile elements recomputed from their words: products accumulated
    /// along the search drift, and crossings at small angles are sensitive.
    fn holonomies(
        rep: &FuchsianRep,
        set: &TileSet,
    ) -> Result<Vec<(Isometry, Word)>, SurfcertError> {
        (0..set.len())
            .map(|i| {
                let w = rep.path_word(&set.path(i));
                Ok((rep.holonomy(&w)?, w))
            })
            .collect()
    }

    fn exact_elements(&self, set: &TileSet) -> Result<Vec<(Isometry, Word)>, SurfcertError> {
        Self::holonomies(self.rep, set)
    }

    pub fn rep(&self) -> &FuchsianRep {
        self.rep
    }

    pub fn group(&self) -> &SurfaceGroup {
        &self.group
    }

    fn tube(&mut self, c: &Word) -> Result<Rc<Tube>, SurfcertError> {
        if let Some(t) = self.tubes.get(c) {
            return Ok(t.clone());
        }
        if c.is_empty() {
            return Err(SurfcertError::TrivialCurve);
        }
        if let Some((root, k)) = self.group.proper_power(c) {
            return Err(SurfcertError::InvalidParameter(format!(
                "{} is the {}-th power of {}",
                c, k, root
            )));
        }
        let axis = self.rep.axis(c)?;
        let start = axis.project(Point::ORIGIN).0 - axis.length / 2.0;
        let set = self
            .rep
            .tube(&axis, start, start + axis.length, self.node_limit);
        let direct = self.exact_elements(&set)?;
        let inverse = direct
            .iter()
            .map(|(m, w)| (m.inverse(), w.inverse()))
            .collect();
        let tube = Rc::new(Tube {
            axis,
            start,
            inverse,
            direct,
            complete: set.complete,
        });
        self.tubes.insert(c.clone(), tube.clone());
        Ok(tube)
    }

    /// Crossing translates of `axis(c2)` along the fundamental segment of
    /// `axis(c1)`. Both words must be primitive and nontrivial. A translate
    /// equal to `axis(c1)` (up to orientation) is not a crossing. Words whose
    /// axes pass far from `i` lose precision; conjugacy forms are safe.
    pub fn crossings(&mut self, c1: &Word, c2: &Word) -> Result<Rc<CrossingData>, SurfcertError> {
        let key = (c1.clone(), c2.clone());
        if let Some(d) = self.pairs.get(&key) {
            return Ok(d.clone());
        }
        let t1 = self.tube(c1)?;
        let t2 = self.tube(c2)?;
        let ax1 = t1.axis;
        let ax2 = t2.axis;
        let g2 = self.rep.holonomy(c2)?;
        let len = ax1.length;
        let start = t1.start;
        let norm = ax1.normalizer;
        let norm_inv = norm.inverse();
        let c1_inv = c1.inverse();
        let mut found: Vec<Crossing> = Vec::new();
        for (h1, w1) in &t1.direct {
            for (n, wn) in &self.near {
                let a = h1.mul(n);
                for (h2i, w2i) in &t2.inverse {
                    let u = a.mul(h2i);
                    // lenient screen; candidates are confirmed below
                    let m = norm.mul(&u).mul(&g2).mul(&u.inverse()).mul(&norm_inv);
                    let ratio = m.b / m.c;
                    if !(ratio > -1e-4) || m.b.abs().max(m.c.abs()) < 1e-7 * (m.a.abs() + m.d.abs())
                    {
                        continue;
                    }
                    // a crossing in the segment is also seen from the tile
                    // containing it, so far-away candidates can be dropped
                    let t = 0.5 * ratio.abs().ln();
                    if !(t > start - 1.0 && t < start + len + 1.0) {
                        continue;
                    }
                    let k = ((t - start) / len).floor();
                    let word = self
                        .group
                        .greedy_dehn(&c1_inv.pow(k as i64).mul(w1).mul(wn).mul(w2i));
                    // recompute from the reduced word, which avoids the long
                    // excursion of the tile product
                    let translate = word.mul(c2).mul(&word.inverse());
                    if !self.rep.axes_cross(c1, &translate)? {
                        continue;
                    }
                    let Some((t, angle)) = self.rep.crossing_on(&ax1, &translate)? else {
                        continue;
                    };
                    let shift = ((t - start) / len).floor();
                    let (word, t0) = if shift == 0.0 {
                        (word, t)
                    } else {
                        (c1_inv.pow(shift as i64).mul(&word), t - shift * len)
                    };
                    let dup = found.iter().any(|x| {
                        let dt = (x.t - t0).abs();
                        if dt.min(len - dt) > 1e-3 || (x.angle - angle).abs() > 1e-3 {
                            return false;
                        }
                        if dt.min(len - dt) < 1e-9 && (x.angle - angle).abs() < 1e-9 {
                            return true;
                        }
                        self.same_translate(c1, c2, &ax2, &x.word, &word, x.t)
                    });
                    if dup {
                        continue;
                    }
                    found.push(Crossing { t: t0, angle, word });
                }
            }
        }
        found.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.angle.total_cmp(&b.angle)));
        let searched = t1.complete && t2.complete && self.near_complete;
        let completeness = if searched {
            self.rep.completeness()
        } else {
            Completeness::Incomplete
        };
        let data = Rc::new(CrossingData {
            first: c1.clone(),
            second: c2.clone(),
            crossings: found,
            completeness,
        });
        self.pairs.insert(key, data.clone());
        Ok(data)
    }

    /// Whether `v` lies in `⟨c1⟩ u ⟨c2⟩`, decided in the group. Used when two
    /// crossings agree to within what long axes can resolve numerically.
    fn same_translate(&self, c1: &Word, c2: &Word, ax2: &Axis, u: &Word, v: &Word, t: f64) -> bool {
        let ax1 = self.rep.axis(c1);
        let (Ok(ax1), Ok(hu), Ok(hv)) = (ax1, self.rep.holonomy(u), self.rep.holonomy(v)) else {
            return false;
        };
        let p = ax1.point_at(t);
        let tau_u = ax2.project(hu.inverse().apply(p)).0;
        let tau_v = ax2.project(hv.inverse().apply(p)).0;
        let m0 = ((tau_u - tau_v) / ax2.length).round() as i64;
        for j in -1..=1 {
            for m in m0 - 1..=m0 + 1 {
                let w = c1.pow(j).mul(u).mul(&c2.pow(m));
                if self.group.equal(v, &w) {
                    return true;
                }
            }
        }
        false
    }

    fn require_complete(data: &CrossingData) -> Result<(), SurfcertError> {
        if data.completeness == Completeness::Incomplete {
            return Err(SurfcertError::SearchIncomplete(format!(
                "tile search for {} and {} hit the node limit",
                data.first, data.second
            )));
        }
        Ok(())
    }

    pub fn self_intersection(&mut self, c: &Word) -> Result<usize, SurfcertError> {
        let c = &self.group.conjugacy_form(c);
        let data = self.crossings(c, c)?;
        Self::require_complete(&data)?;
        let n = data.count();
        if n % 2 == 1 {
            return Err(SurfcertError::Inconsistent(format!(
                "odd self-crossing count {} for {}",
                n, c
            )));
        }
        Ok(n / 2)
    }

    pub fn is_simple(&mut self, c: &Word) -> Result<bool, SurfcertError> {
        let c = &self.group.conjugacy_form(c);
        if let Some(&s) = self.simple.get(c) {
            return Ok(s);
        }
        let s = self.self_intersection(c)? == 0;
        self.simple.insert(c.clone(), s);
        Ok(s)
    }

    /// Number of transverse crossings of the two geodesics. For conjugate
    /// curves this counts crossings between distinct branches, which is
    /// twice the self-intersection number.
    pub fn intersection(&mut self, c1: &Word, c2: &Word) -> Result<usize, SurfcertError> {
        let (c1, c2) = (
            &self.group.conjugacy_form(c1),
            &self.group.conjugacy_form(c2),
        );
        let data = self.crossings(c1, c2)?;
        Self::require_complete(&data)?;
        Ok(data.count())
    }

    /// Crossings between the lift of `c1` from coset `s1` and the lift of
    /// `c2` from coset `s2`; self crossings of a single lift are counted
    /// once. The words are used as given, so pass conjugacy forms.
    pub fn cover_intersection(
        &mut self,
        cover: &FiniteCover,
        c1: &Word,
        s1: usize,
        c2: &Word,
        s2: usize,
    ) -> Result<usize, SurfcertError> {
        let data = self.crossings(c1, c2)?;
        Self::require_complete(&data)?;
        let n = data.cover_count(cover, s1, s2);
        let same_lift = c1 == c2 && {
            let mut c = s1;
            let mut hit = false;
            loop {
                hit |= c == s2;
                c = cover.walk(c1, c);
                if c == s1 {
                    break;
                }
            }
            hit
        };
        if same_lift {
            if n % 2 == 1 {
                return Err(SurfcertError::Inconsistent(format!(
                    "odd self-crossing count on a lift of {}",
                    c1
                )));
            }
            Ok(n / 2)
        } else {
            Ok(n)
        }
    }
}

/// Self-intersection number of the closed geodesic of a primitive word.
pub fn self_intersection_number(rep: &FuchsianRep, c: &Word) -> Result<usize, SurfcertError> {
    IntersectionOracle::new(rep)?.self_intersection(c)
}

/// Geometric intersection number of the closed geodesics of two primitive
/// words.
pub fn intersection_number(
    rep: &FuchsianRep,
    c1: &Word,
    c2: &Word,
) -> Result<usize, SurfcertError> {
    IntersectionOracle::new(rep)?.intersection(c1, c2)
}
