//! Words in the fundamental group of a closed orientable genus-g surface,
//! presented as `< a1..a2g | [a1,a2]...[a(2g-1),a2g] >`.
//!
//! Generators are 0-based in the API (`a1` is generator 0) and 1-based in the
//! text syntax. Words are always stored freely reduced; the identity is the
//! empty word.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::homology::HomologyVector;
use crate::SurfcertError;

/// Orbit cap for the half-relator swap closure used by geodesic and
/// conjugacy normal forms.
const MAX_SWAP_ORBIT: usize = 4096;

/// A signed generator. Encoded as `2 * generator + inverse`, which makes the
/// derived ordering `a1 < A1 < a2 < A2 < ...`.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(u16);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Letter {
        Letter((generator as u16) << 1 | inverse as u16)
    }

    pub fn pos(generator: usize) -> Letter {
        Letter::new(generator, false)
    }

    pub fn neg(generator: usize) -> Letter {
        Letter::new(generator, true)
    }

    #[inline]
    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    #[inline]
    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub fn sign(self) -> i64 {
        if self.is_inverse() {
            -1
        } else {
            1
        }
    }

    #[inline]
    pub fn inverse(self) -> Letter {
        Letter(self.0 ^ 1)
    }

    /// Dense index in `0..4g`, usable for lookup tables.
    #[inline]
    pub fn code(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = if self.is_inverse() { 'A' } else { 'a' };
        write!(f, "{}{}", c, self.generator() + 1)
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A freely reduced word.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Word {
        Word(Vec::new())
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Word {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn letter(l: Letter) -> Word {
        Word(vec![l])
    }

    /// The generator `a_{generator+1}` as a one-letter word.
    pub fn gen(generator: usize) -> Word {
        Word(vec![Letter::pos(generator)])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn mul(&self, other: &Word) -> Word {
        Word::from_letters(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    pub fn conjugate_by(&self, u: &Word) -> Word {
        u.mul(self).mul(&u.inverse())
    }

    pub fn commutator(a: &Word, b: &Word) -> Word {
        a.mul(b).mul(&a.inverse()).mul(&b.inverse())
    }

    /// Largest generator index used, plus one.
    pub fn rank_used(&self) -> usize {
        self.0.iter().map(|l| l.generator() + 1).max().unwrap_or(0)
    }

    /// Strips matching first/last letters so the word is cyclically reduced.
    pub fn cyclically_reduced(&self) -> Word {
        let s = &self.0;
        let mut i = 0;
        let mut j = s.len();
        while j - i >= 2 && s[i] == s[j - 1].inverse() {
            i += 1;
            j -= 1;
        }
        Word(s[i..j].to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", l)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({})", self)
    }
}

impl FromStr for Word {
    type Err = SurfcertError;

    /// Parses whitespace-separated `a<k>` / `A<k>` tokens; `e` or an empty
    /// string is the identity. Input is freely reduced.
    fn from_str(s: &str) -> Result<Word, SurfcertError> {
        let trimmed = s.trim();
        if trimmed.is_empty() || trimmed == "e" {
            return Ok(Word::identity());
        }
        let mut letters = Vec::new();
        for (pos, tok) in trimmed.split_whitespace().enumerate() {
            let bad = || SurfcertError::WordSyntax {
                token: tok.to_string(),
                position: pos,
            };
            let mut chars = tok.chars();
            let inverse = match chars.next() {
                Some('a') => false,
                Some('A') => true,
                _ => return Err(bad()),
            };
            let digits = chars.as_str();
            if digits.is_empty()
                || !digits.bytes().all(|b| b.is_ascii_digit())
                || digits.starts_with('0')
            {
                return Err(bad());
            }
            let k: usize = digits.parse().map_err(|_| bad())?;
            letters.push(Letter::new(k - 1, inverse));
        }
        Ok(Word::from_letters(letters))
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Word, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The genus-g surface group with its standard one-relator presentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceGroup {
    genus: usize,
    relator: Vec<Letter>,
    /// All rotations of the relator and of its inverse, indexed by first letter code.
    rotations_by_first: Vec<Vec<Vec<Letter>>>,
}

impl SurfaceGroup {
    pub fn new(genus: usize) -> Result<SurfaceGroup, SurfcertError> {
        if genus < 2 {
            return Err(SurfcertError::GenusTooSmall(genus));
        }
        let mut relator = Vec::with_capacity(4 * genus);
        for i in 0..genus {
            let a = 2 * i;
            let b = 2 * i + 1;
            relator.extend([
                Letter::pos(a),
                Letter::pos(b),
                Letter::neg(a),
                Letter::neg(b),
            ]);
        }
        let inv: Vec<Letter> = relator.iter().rev().map(|l| l.inverse()).collect();
        let n = relator.len();
        let mut rotations_by_first = vec![Vec::new(); 4 * genus];
        for cyc in [&relator, &inv] {
            for i in 0..n {
                let rot: Vec<Letter> = cyc[i..].iter().chain(cyc[..i].iter()).copied().collect();
                rotations_by_first[rot[0].code()].push(rot);
            }
        }
        Ok(SurfaceGroup {
            genus,
            relator,
            rotations_by_first,
        })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn rank(&self) -> usize {
        2 * self.genus
    }

    pub fn relator(&self) -> Word {
        Word(self.relator.clone())
    }

    /// Ensures every letter of `w` names one of this group's generators.
    pub fn check(&self, w: &Word) -> Result<(), SurfcertError> {
        match w.letters().iter().find(|l| l.generator() >= self.rank()) {
            Some(l) => Err(SurfcertError::GeneratorOutOfRange {
                index: l.generator() + 1,
                rank: self.rank(),
            }),
            None => Ok(()),
        }
    }

    pub fn parse_word(&self, s: &str) -> Result<Word, SurfcertError> {
        let w: Word = s.parse()?;
        self.check(&w)?;
        Ok(w)
    }

    /// Signed exponent sum of generator `t` (0-based) in `w`.
    pub fn chi(&self, w: &Word, t: usize) -> Result<i64, SurfcertError> {
        if t >= self.rank() {
            return Err(SurfcertError::GeneratorOutOfRange {
                index: t + 1,
                rank: self.rank(),
            });
        }
        Ok(w.letters()
            .iter()
            .filter(|l| l.generator() == t)
            .map(|l| l.sign())
            .sum())
    }

    pub fn abelianize(&self, w: &Word) -> HomologyVector {
        let mut v = vec![0i64; self.rank()];
        for l in w.letters() {
            v[l.generator()] += l.sign();
        }
        HomologyVector::new(v)
    }

    /// Longest prefix of `s` that is a prefix of some cyclic relator
    /// rotation, together with that rotation.
    fn longest_relator_prefix<'a>(
        &'a self,
        s: &[Letter],
        limit: usize,
    ) -> Option<(usize, &'a [Letter])> {
        let first = *s.first()?;
        let mut best: Option<(usize, &[Letter])> = None;
        for rot in &self.rotations_by_first[first.code()] {
            let m = s
                .iter()
                .zip(rot.iter())
                .take(limit)
                .take_while(|(a, b)| a == b)
                .count();
            if best.is_none_or(|(bm, _)| m > bm) {
                best = Some((m, rot));
            }
        }
        best
    }

    /// Greedy Dehn reduction: replaces any subword that is more than half of
    /// a cyclic relator by the shorter complement, until none remain.
    pub fn greedy_dehn(&self, w: &Word) -> Word {
        let half = 2 * self.genus;
        let mut cur = w.clone();
        'outer: loop {
            let s = cur.letters();
            for i in 0..s.len() {
                if let Some((m, rot)) = self.longest_relator_prefix(&s[i..], usize::MAX) {
                    if m > half {
                        let replacement = rot[m..].iter().rev().map(|l| l.inverse());
                        let next: Vec<Letter> = s[..i]
                            .iter()
                            .copied()
                            .chain(replacement)
                            .chain(s[i + m..].iter().copied())
                            .collect();
                        cur = Word::from_letters(next);
                        continue 'outer;
                    }
                }
            }
            return cur;
        }
    }

    /// Words obtained from `w` by replacing one subword that is a relator
    /// piece of length at least `2g - 1` (at least `2g` unless `grow`) by
    /// its complement.
    fn linear_moves(&self, s: &[Letter], grow: bool) -> Vec<Vec<Letter>> {
        let half = 2 * self.genus;
        let lo = if grow { half - 1 } else { half };
        let mut out = Vec::new();
        for i in 0..s.len() {
            for rot in &self.rotations_by_first[s[i].code()] {
                let m = s[i..]
                    .iter()
                    .zip(rot.iter())
                    .take_while(|(a, b)| a == b)
                    .count();
                for k in lo..=m {
                    let next = s[..i]
                        .iter()
                        .copied()
                        .chain(rot[k..].iter().rev().map(|l| l.inverse()))
                        .chain(s[i + k..].iter().copied());
                    out.push(Word::from_letters(next).0);
                }
            }
        }
        out
    }

    /// Cyclic analogue of `linear_moves`; results are cyclically reduced.
    fn cyclic_moves(&self, c: &[Letter], grow: bool) -> Vec<Vec<Letter>> {
        let half = 2 * self.genus;
        let lo = if grow { half - 1 } else { half };
        let n = c.len();
        let mut out = Vec::new();
        for i in 0..n {
            let rot: Vec<Letter> = c[i..].iter().chain(c[..i].iter()).copied().collect();
            for r in &self.rotations_by_first[rot[0].code()] {
                let m = rot.iter().zip(r.iter()).take_while(|(a, b)| a == b).count();
                for k in lo..=m {
                    let next = r[k..]
                        .iter()
                        .rev()
                        .map(|l| l.inverse())
                        .chain(rot[k..].iter().copied());
                    out.push(Word::from_letters(next).cyclically_reduced().0);
                }
            }
        }
        out
    }

    /// Breadth-first closure under relator moves, allowing intermediate
    /// words two letters longer than the best length found. Restarts
    /// whenever a shorter word appears. Returns the words of minimal length.
    fn minimal_orbit<F, N>(&self, start: Vec<Letter>, moves: F, normal: N) -> BTreeSet<Word>
    where
        F: Fn(&[Letter], bool) -> Vec<Vec<Letter>>,
        N: Fn(Vec<Letter>) -> Vec<Letter>,
    {
        let mut cur = normal(start);
        'restart: loop {
            let n = cur.len();
            let mut seen: BTreeSet<Vec<Letter>> = BTreeSet::new();
            let mut queue = VecDeque::new();
            seen.insert(cur.clone());
            queue.push_back(cur.clone());
            while let Some(x) = queue.pop_front() {
                for y in moves(&x, x.len() <= n) {
                    if y.len() < n {
                        cur = normal(y);
                        continue 'restart;
                    }
                    if y.len() > n + 2 {
                        continue;
                    }
                    let y = normal(y);
                    if seen.len() < MAX_SWAP_ORBIT && !seen.contains(&y) {
                        seen.insert(y.clone());
                        queue.push_back(y);
                    }
                }
            }
            return seen
                .into_iter()
                .filter(|x| x.len() == n)
                .map(Word)
                .collect();
        }
    }

    /// Dehn's algorithm followed by a bounded search over relator moves.
    /// The result is the lexicographically least word of minimal length
    /// found; it is empty iff `w` is trivial.
    pub fn dehn_reduce(&self, w: &Word) -> Word {
        let start = self.greedy_dehn(w).0;
        self.minimal_orbit(start, |s, g| self.linear_moves(s, g), |s| s)
            .into_iter()
            .next()
            .unwrap_or_default()
    }

    pub fn is_trivial(&self, w: &Word) -> bool {
        self.greedy_dehn(w).is_empty()
    }

    pub fn equal(&self, u: &Word, v: &Word) -> bool {
        self.is_trivial(&u.mul(&v.inverse()))
    }

    /// Cyclic Dehn reduction: free cyclic reduction plus removal of
    /// long relator pieces anywhere on the cyclic word.
    fn cyclic_dehn(&self, w: &Word) -> Vec<Letter> {
        let half = 2 * self.genus;
        let mut cur = w.cyclically_reduced().0;
        'outer: loop {
            let n = cur.len();
            for i in 0..n {
                let rot: Vec<Letter> = cur[i..].iter().chain(cur[..i].iter()).copied().collect();
                if let Some((m, r)) = self.longest_relator_prefix(&rot, n) {
                    if m > half {
                        let next: Vec<Letter> = r[m..]
                            .iter()
                            .rev()
                            .map(|l| l.inverse())
                            .chain(rot[m..].iter().copied())
                            .collect();
                        cur = Word::from_letters(next).cyclically_reduced().0;
                        continue 'outer;
                    }
                }
            }
            return cur;
        }
    }

    /// Minimal-length cyclic words reachable from `w` by relator moves, each
    /// stored as its least rotation. All members represent the conjugacy
    /// class of `w`.
    pub fn conjugacy_orbit(&self, w: &Word) -> BTreeSet<Word> {
        let start = self.cyclic_dehn(w);
        self.minimal_orbit(
            start,
            |c, g| self.cyclic_moves(c, g),
            |c| least_rotation(&c),
        )
    }

    /// Canonical representative of the conjugacy class (free homotopy class)
    /// of `w`.
    pub fn conjugacy_form(&self, w: &Word) -> Word {
        self.conjugacy_orbit(w)
            .into_iter()
            .next()
            .unwrap_or_default()
    }

    pub fn are_conjugate(&self, u: &Word, v: &Word) -> bool {
        self.conjugacy_form(u) == self.conjugacy_form(v)
    }

    /// `Some((root, k))` with `k >= 2` when `w` is conjugate to `root^k`.
    pub fn proper_power(&self, w: &Word) -> Option<(Word, usize)> {
        self.conjugacy_orbit(w).into_iter().find_map(|c| {
            let p = smallest_period(c.letters());
            let n = c.len();
            (p < n).then(|| (Word(c.letters()[..p].to_vec()), n / p))
        })
    }
}

fn least_rotation(c: &[Letter]) -> Vec<Letter> {
    let n = c.len();
    (0..n)
        .map(|i| {
            c[i..]
                .iter()
                .chain(c[..i].iter())
                .copied()
                .collect::<Vec<_>>()
        })
        .min()
        .unwrap_or_default()
}

fn smallest_period(c: &[Letter]) -> usize {
    let n = c.len();
    (1..=n)
        .find(|&p| n.is_multiple_of(p) && (0..n).all(|i| c[i] == c[(i + p) % n]))
        .unwrap_or(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g2() -> SurfaceGroup {
        SurfaceGroup::new(2).unwrap()
    }

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn free_reduction_examples() {
        assert_eq!(w("a1 A1"), Word::identity());
        assert_eq!(w("a1 a2 A2 a1"), w("a1 a1"));
        let r = g2().relator();
        assert_eq!(r.len(), 8);
        assert_eq!(Word::from_letters(r.letters().iter().copied()), r);
    }

    #[test]
    fn relator_has_4g_letters() {
        for g in 2..6 {
            let grp = SurfaceGroup::new(g).unwrap();
            assert_eq!(grp.relator().len(), 4 * g);
        }
        assert!(SurfaceGroup::new(1).is_err());
    }

    #[test]
    fn chi_examples() {
        let g = g2();
        let x = w("a1 a3 a1");
        assert_eq!(g.chi(&x, 0).unwrap(), 2);
        assert_eq!(g.chi(&x, 2).unwrap(), 1);
        for t in 0..4 {
            assert_eq!(g.chi(&g.relator(), t).unwrap(), 0);
        }
        assert_eq!(g.chi(&w("a1 a2 A1 A2"), 0).unwrap(), 0);
        assert!(g.chi(&x, 4).is_err());
    }

    #[test]
    fn abelianize_examples() {
        let g = g2();
        assert!(g.abelianize(&Word::identity()).is_zero());
        assert_eq!(g.abelianize(&w("a1 a1 A4")).as_slice(), &[2, 0, 0, -1]);
        assert!(g.abelianize(&w("a1 a2 A1 A2")).is_zero());
    }

    #[test]
    fn dehn_examples() {
        let g = g2();
        assert_eq!(g.dehn_reduce(&g.relator()), Word::identity());
        assert_eq!(g.dehn_reduce(&g.relator().mul(&w("a1"))), w("a1"));
        assert_eq!(g.dehn_reduce(&w("a1 a2 A1 A2")).len(), 4);
        // five letters of the relator collapse to the three-letter complement
        let x = g.dehn_reduce(&w("a1 a2 A1 A2 a3"));
        assert_eq!(x.len(), 3);
        assert!(g.equal(&x, &w("a4 a3 A4")));
    }

    #[test]
    fn conjugacy_examples() {
        let g = g2();
        assert_eq!(g.conjugacy_form(&w("a2 a1 A2")), g.conjugacy_form(&w("a1")));
        assert_ne!(g.conjugacy_form(&w("a1")), g.conjugacy_form(&w("a2")));
        assert_eq!(g.conjugacy_form(&w("a1 a2")), g.conjugacy_form(&w("a2 a1")));
        assert_eq!(g.conjugacy_form(&g.relator()), Word::identity());
    }

    #[test]
    fn proper_powers() {
        let g = g2();
        assert_eq!(g.proper_power(&w("a1 a1")), Some((w("a1"), 2)));
        assert_eq!(g.proper_power(&w("a2 a1 a1 A2")), Some((w("a1"), 2)));
        assert_eq!(g.proper_power(&w("a1")), None);
        assert_eq!(g.proper_power(&w("a1 a1 a2")), None);
    }

    #[test]
    fn text_syntax() {
        assert_eq!(w("a1 a2 A1 A2").to_string(), "a1 a2 A1 A2");
        assert_eq!(Word::identity().to_string(), "e");
        assert!("b1".parse::<Word>().is_err());
        assert!("a0".parse::<Word>().is_err());
        assert!("a".parse::<Word>().is_err());
        assert!(g2().parse_word("a5").is_err());
    }
}
