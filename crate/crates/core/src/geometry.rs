//! Fuchsian realizations of surface groups in the upper half-plane.
//!
//! The regular model glues opposite sides of the regular hyperbolic
//! 4g-gon with interior angles 2π/4g centred at `i` (the Bolza surface when
//! g = 2). Its side pairings do not satisfy the standard product of
//! commutators directly, so a handle-extraction normalization rewrites them
//! into a standard generating set `a_1, ..., a_{2g}`. The polygon is kept as
//! a Dirichlet domain, which makes orbit enumeration exact up to rounding.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::group::{Letter, SurfaceGroup, Word};
use crate::homology::HomologyVector;
use crate::SurfcertError;

/// Traces this close to ±2 are treated as a broken representation.
pub const PARABOLIC_GUARD: f64 = 1e-6;

/// Point of the upper half-plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 1.0 };
}

pub fn hyperbolic_distance(p: Point, q: Point) -> f64 {
    let e = ((p.x - q.x).powi(2) + (p.y - q.y).powi(2)).sqrt();
    2.0 * (e / (2.0 * (p.y * q.y).sqrt())).asinh()
}

/// Element of SL(2,R) acting by Möbius transformations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Isometry {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Isometry {
    pub const IDENTITY: Isometry = Isometry {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Isometry {
        Isometry { a, b, c, d }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn mul(&self, o: &Isometry) -> Isometry {
        Isometry {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn inverse(&self) -> Isometry {
        Isometry {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn apply(&self, p: Point) -> Point {
        // (a z + b) / (c z + d) with z = x + iy
        let (nr, ni) = (self.a * p.x + self.b, self.a * p.y);
        let (dr, di) = (self.c * p.x + self.d, self.c * p.y);
        let den = dr * dr + di * di;
        Point {
            x: (nr * dr + ni * di) / den,
            y: (ni * dr - nr * di) / den,
        }
    }

    /// Action on a boundary point given in homogeneous coordinates.
    pub fn apply_projective(&self, v: [f64; 2]) -> [f64; 2] {
        [self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1]]
    }

    /// Hyperbolic distance from `i` to its image.
    pub fn displacement(&self) -> f64 {
        let s = (self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d) / 2.0;
        s.max(1.0).acosh()
    }

    /// Entrywise distance to `±o`, taking the better sign.
    pub fn distance_pm(&self, o: &Isometry) -> f64 {
        let plus = (self.a - o.a)
            .abs()
            .max((self.b - o.b).abs())
            .max((self.c - o.c).abs())
            .max((self.d - o.d).abs());
        let minus = (self.a + o.a)
            .abs()
            .max((self.b + o.b).abs())
            .max((self.c + o.c).abs())
            .max((self.d + o.d).abs());
        plus.min(minus)
    }

    /// Translation length, or `None` for elements that are not clearly
    /// hyperbolic.
    pub fn translation_length(&self) -> Option<f64> {
        let t = self.trace().abs();
        (t > 2.0 + PARABOLIC_GUARD).then(|| 2.0 * (t / 2.0).acosh())
    }

    /// Rotation about `i` by angle `theta`.
    pub fn rotation(theta: f64) -> Isometry {
        let (s, c) = (theta / 2.0).sin_cos();
        Isometry::new(c, s, -s, c)
    }

    /// Translation by `dist` along the imaginary axis, towards infinity.
    pub fn translation(dist: f64) -> Isometry {
        let e = (dist / 2.0).exp();
        Isometry::new(e, 0.0, 0.0, 1.0 / e)
    }

    /// Axis data for a hyperbolic element.
    pub fn axis(&self) -> Option<Axis> {
        let length = self.translation_length()?;
        let m = if self.trace() < 0.0 {
            self.scale(-1.0)
        } else {
            *self
        };
        let t = m.trace();
        let lam = (t + (t * t - 4.0).sqrt()) / 2.0;
        let mu = 1.0 / lam;
        let eig = |l: f64| -> [f64; 2] {
            let v1 = [m.b, l - m.a];
            let v2 = [l - m.d, m.c];
            let n1 = v1[0].hypot(v1[1]);
            let n2 = v2[0].hypot(v2[1]);
            if n1 >= n2 {
                [v1[0] / n1, v1[1] / n1]
            } else {
                [v2[0] / n2, v2[1] / n2]
            }
        };
        let attracting = eig(lam);
        let mut repelling = eig(mu);
        let mut det = attracting[0] * repelling[1] - repelling[0] * attracting[1];
        if det < 0.0 {
            repelling = [-repelling[0], -repelling[1]];
            det = -det;
        }
        let s = det.sqrt();
        let p = Isometry::new(
            attracting[0] / s,
            repelling[0] / s,
            attracting[1] / s,
            repelling[1] / s,
        );
        Some(Axis {
            attracting,
            repelling,
            normalizer: p.inverse(),
            length,
        })
    }

    fn scale(&self, k: f64) -> Isometry {
        Isometry::new(self.a * k, self.b * k, self.c * k, self.d * k)
    }
}

/// Oriented axis of a hyperbolic isometry.
#[derive(Clone, Copy, Debug)]
pub struct Axis {
    /// Homogeneous boundary coordinates of the attracting fixed point.
    pub attracting: [f64; 2],
    pub repelling: [f64; 2],
    /// Sends the repelling point to 0 and the attracting point to infinity.
    pub normalizer: Isometry,
    pub length: f64,
}

impl Axis {
    pub fn endpoints(&self) -> (f64, f64) {
        (
            self.repelling[0] / self.repelling[1],
            self.attracting[0] / self.attracting[1],
        )
    }

    /// Signed position along the axis of the foot of `p` (with `0` at height
    /// 1 in normalized coordinates), together with the distance from `p` to
    /// the axis.
    pub fn project(&self, p: Point) -> (f64, f64) {
        let w = self.normalizer.apply(p);
        let r = w.x.hypot(w.y);
        (r.ln(), (w.x.abs() / w.y).asinh())
    }

    /// Point of the axis at the given parameter (with `0` at height 1 in
    /// normalized coordinates).
    pub fn point_at(&self, t: f64) -> Point {
        self.normalizer
            .inverse()
            .apply(Point { x: 0.0, y: t.exp() })
    }

    /// Distance from `p` to the segment `[t0, t1]` of the axis.
    pub fn segment_distance(&self, p: Point, t0: f64, t1: f64) -> f64 {
        let w = self.normalizer.apply(p);
        let t = w.x.hypot(w.y).ln();
        if t >= t0 && t <= t1 {
            (w.x.abs() / w.y).asinh()
        } else {
            let te = if t < t0 { t0 } else { t1 };
            hyperbolic_distance(
                w,
                Point {
                    x: 0.0,
                    y: te.exp(),
                },
            )
        }
    }

    /// Crossing of the axis of the hyperbolic element `g` with this axis:
    /// the parameter of the crossing point and an angle coordinate in
    /// `(-π/2, π/2)` that is invariant under sliding along this axis and
    /// under reversing `g`. Both are read from the entries of `g` conjugated
    /// into the normalized frame, which stays accurate when the endpoints of
    /// the two axes are close. Near-coincident axes do not cross.
    pub fn crossing_of(&self, g: &Isometry) -> Option<(f64, f64)> {
        let m = self.normalizer.mul(g).mul(&self.normalizer.inverse());
        if m.b / m.c > 0.0 {
            self.crossing_params(g)
        } else {
            None
        }
    }

    /// Parameter and angle of the crossing of the axis of `g`, for a `g`
    /// already known to cross. No sign test, so rounding near a shared
    /// endpoint cannot lose a crossing.
    pub fn crossing_params(&self, g: &Isometry) -> Option<(f64, f64)> {
        let m = self.normalizer.mul(g).mul(&self.normalizer.inverse());
        if m.b.abs().max(m.c.abs()) < 1e-9 * (m.a.abs() + m.d.abs()) {
            return None;
        }
        // fixed points solve c z^2 + (d - a) z - b = 0; their product is -b/c
        let ratio = (m.b / m.c).abs();
        if !ratio.is_finite() || ratio == 0.0 {
            return None;
        }
        let y = ratio.sqrt();
        let s = (m.a - m.d) / (m.c * y);
        if !s.is_finite() || s.abs() > 1e8 {
            return None;
        }
        Some((y.ln(), s.atan()))
    }
}

/// Which hyperbolic structure a representation realizes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum MetricId {
    RegularPolygon,
    MatrixFile { path: String },
}

impl MetricId {
    pub fn label(&self) -> String {
        match self {
            MetricId::RegularPolygon => "regular-polygon".to_string(),
            MetricId::MatrixFile { path } => format!("matrix-file:{}", path),
        }
    }
}

/// How far an orbit enumeration can be trusted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Completeness {
    /// Every element within the stated bound was visited (Dirichlet domain).
    Exhausted,
    /// Enumeration used a calibrated radius without a fundamental domain.
    Heuristic,
    /// A node budget was hit before the bound was reached.
    Incomplete,
}

impl Completeness {
    pub fn combine(self, o: Completeness) -> Completeness {
        self.max(o)
    }
}

type Dd = [TwoFloat; 4];

fn dd_mul(x: &Dd, y: &Dd) -> Dd {
    [
        x[0] * y[0] + x[1] * y[2],
        x[0] * y[1] + x[1] * y[3],
        x[2] * y[0] + x[3] * y[2],
        x[2] * y[1] + x[3] * y[3],
    ]
}

/// The side pairings of the regular 4g-gon, `R(θ) T(2r) R(-θ)` with
/// `θ = 2πk/4g` and `cosh r = cot(π/4g)`.
fn dd_side_pairings(genus: usize) -> Vec<Dd> {
    let n = TwoFloat::from((4 * genus) as f64);
    let (s, c) = (twofloat::consts::PI / n).sin_cos();
    let cot = c / s;
    let e = cot + (cot * cot - 1.0).sqrt();
    let ei = TwoFloat::from(1.0) / e;
    let zero = TwoFloat::from(0.0);
    (0..2 * genus)
        .map(|k| {
            let (s, c) = (twofloat::consts::PI * TwoFloat::from(k as f64) / n).sin_cos();
            dd_mul(
                &dd_mul(&[c, s, -s, c], &[e, zero, zero, ei]),
                &[c, -s, s, c],
            )
        })
        .collect()
}

fn dd_word(sides: &[Dd], w: &Word) -> Isometry {
    let (one, zero) = (TwoFloat::from(1.0), TwoFloat::from(0.0));
    let m = w.letters().iter().fold([one, zero, zero, one], |acc, l| {
        let m = sides[l.generator()];
        let m = if l.is_inverse() {
            [m[3], -m[1], -m[2], m[0]]
        } else {
            m
        };
        dd_mul(&acc, &m)
    });
    Isometry::new(m[0].into(), m[1].into(), m[2].into(), m[3].into())
}

/// Neighbour structure used for orbit searches: the tiles adjacent to the
/// base tile and a radius bounding the tile from its centre `i`.
#[derive(Clone, Debug)]
pub struct Tiling {
    pub neighbors: Vec<Isometry>,
    /// Each neighbour as a word in the standard generators.
    pub neighbor_words: Vec<Word>,
    pub radius: f64,
    pub inradius: f64,
    pub rigorous: bool,
}

#[derive(Clone, Debug)]
pub struct FuchsianRep {
    genus: usize,
    generators: Vec<Isometry>,
    inverses: Vec<Isometry>,
    metric: MetricId,
    tiling: Tiling,
}

impl FuchsianRep {
    /// The regular 4g-gon structure with angles 2π/4g.
    pub fn regular_polygon(genus: usize) -> Result<FuchsianRep, SurfcertError> {
        if genus < 2 {
            return Err(SurfcertError::GenusTooSmall(genus));
        }
        let n = 4 * genus;
        let cot = 1.0 / (PI / n as f64).tan();
        let inradius = cot.acosh();
        let radius = (cot * cot).acosh();
        let sides: Vec<Isometry> = (0..2 * genus)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / n as f64;
                Isometry::rotation(th)
                    .mul(&Isometry::translation(2.0 * inradius))
                    .mul(&Isometry::rotation(-th))
            })
            .collect();
        let basis = standard_basis(genus);
        // side words can be long, so the products are formed in double-double
        let dd_sides = dd_side_pairings(genus);
        let generators: Vec<Isometry> = basis
            .generators
            .iter()
            .map(|w| dd_word(&dd_sides, w))
            .collect();
        let mut neighbors = sides.clone();
        neighbors.extend(sides.iter().map(|m| m.inverse()));
        let mut neighbor_words = basis.sides.clone();
        neighbor_words.extend(basis.sides.iter().map(|w| w.inverse()));
        let rep = FuchsianRep {
            genus,
            inverses: generators.iter().map(|m| m.inverse()).collect(),
            generators,
            metric: MetricId::RegularPolygon,
            tiling: Tiling {
                neighbors,
                neighbor_words,
                radius,
                inradius,
                rigorous: true,
            },
        };
        rep.validate()?;
        Ok(rep)
    }

    /// A representation from explicit generator matrices. Orbit searches
    /// use the generators themselves as neighbours, so enumeration results
    /// are flagged heuristic.
    pub fn from_matrices(
        genus: usize,
        generators: Vec<Isometry>,
        metric: MetricId,
    ) -> Result<FuchsianRep, SurfcertError> {
        if genus < 2 {
            return Err(SurfcertError::GenusTooSmall(genus));
        }
        if generators.len() != 2 * genus {
            return Err(SurfcertError::MatrixFile {
                line: 0,
                message: format!(
                    "expected {} matrices, found {}",
                    2 * genus,
                    generators.len()
                ),
            });
        }
        let radius = generators
            .iter()
            .map(|m| m.displacement())
            .fold(0.0, f64::max);
        let inradius = radius / 2.0;
        let mut neighbors = generators.clone();
        neighbors.extend(generators.iter().map(|m| m.inverse()));
        let mut neighbor_words: Vec<Word> = (0..2 * genus).map(Word::gen).collect();
        neighbor_words.extend((0..2 * genus).map(|k| Word::letter(Letter::neg(k))));
        let rep = FuchsianRep {
            genus,
            inverses: generators.iter().map(|m| m.inverse()).collect(),
            generators,
            metric,
            tiling: Tiling {
                neighbors,
                neighbor_words,
                radius,
                inradius,
                rigorous: false,
            },
        };
        rep.validate()?;
        Ok(rep)
    }

    /// Parses the matrix-list format: one matrix per line, four numbers in
    /// row-major order. Blank lines and `#` comments are ignored.
    pub fn parse_matrix_text(
        genus: usize,
        text: &str,
        metric: MetricId,
    ) -> Result<FuchsianRep, SurfcertError> {
        let mut mats = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let nums: Result<Vec<f64>, _> =
                line.split_whitespace().map(str::parse::<f64>).collect();
            let nums = nums.map_err(|e| SurfcertError::MatrixFile {
                line: i + 1,
                message: e.to_string(),
            })?;
            if nums.len() != 4 {
                return Err(SurfcertError::MatrixFile {
                    line: i + 1,
                    message: format!("expected 4 numbers, found {}", nums.len()),
                });
            }
            let m = Isometry::new(nums[0], nums[1], nums[2], nums[3]);
            let det = m.det();
            if (det - 1.0).abs() > 1e-6 {
                return Err(SurfcertError::MatrixFile {
                    line: i + 1,
                    message: format!("determinant {} is not 1", det),
                });
            }
            // decimal input rarely has det exactly 1
            mats.push(m.scale(1.0 / det.sqrt()));
        }
        FuchsianRep::from_matrices(genus, mats, metric)
    }

    pub fn to_matrix_text(&self) -> String {
        let mut s = String::new();
        for m in &self.generators {
            let _ = writeln!(s, "{:e} {:e} {:e} {:e}", m.a, m.b, m.c, m.d);
        }
        s
    }

    fn validate(&self) -> Result<(), SurfcertError> {
        for (k, m) in self.generators.iter().enumerate() {
            // relative to the size of the products that are cancelled
            if (m.det() - 1.0).abs() > 1e-12 * (m.a * m.d).abs().max(1.0) {
                return Err(SurfcertError::NotHyperbolic(format!(
                    "generator a{} has determinant {}",
                    k + 1,
                    m.det()
                )));
            }
            if m.trace().abs() <= 2.0 + PARABOLIC_GUARD {
                return Err(SurfcertError::NotHyperbolic(format!(
                    "generator a{} has trace {}",
                    k + 1,
                    m.trace()
                )));
            }
        }
        let group = SurfaceGroup::new(self.genus)?;
        let r = self.holonomy(&group.relator())?;
        let residual = r.distance_pm(&Isometry::IDENTITY);
        if residual > 1e-9 {
            return Err(SurfcertError::RelatorResidual(residual));
        }
        Ok(())
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn generators(&self) -> &[Isometry] {
        &self.generators
    }

    pub fn metric(&self) -> &MetricId {
        &self.metric
    }

    pub fn tiling(&self) -> &Tiling {
        &self.tiling
    }

    pub fn completeness(&self) -> Completeness {
        if self.tiling.rigorous {
            Completeness::Exhausted
        } else {
            Completeness::Heuristic
        }
    }

    pub fn letter_matrix(&self, l: Letter) -> Isometry {
        if l.is_inverse() {
            self.inverses[l.generator()]
        } else {
            self.generators[l.generator()]
        }
    }

    pub fn holonomy(&self, w: &Word) -> Result<Isometry, SurfcertError> {
        if let Some(l) = w.letters().iter().find(|l| l.generator() >= 2 * self.genus) {
            return Err(SurfcertError::GeneratorOutOfRange {
                index: l.generator() + 1,
                rank: 2 * self.genus,
            });
        }
        Ok(self.holonomy_unchecked(w))
    }

    /// Products are accumulated in double-double and rounded once, so long
    /// words lose no more than the generators' own rounding.
    fn holonomy_unchecked(&self, w: &Word) -> Isometry {
        let m = self.holonomy_dd(w);
        Isometry::new(m[0].into(), m[1].into(), m[2].into(), m[3].into())
    }

    fn holonomy_dd(&self, w: &Word) -> Dd {
        let (one, zero) = (TwoFloat::from(1.0), TwoFloat::from(0.0));
        w.letters().iter().fold([one, zero, zero, one], |acc, &l| {
            let g = self.letter_matrix(l);
            dd_mul(&acc, &[g.a.into(), g.b.into(), g.c.into(), g.d.into()])
        })
    }

    /// Whether the axes of `w1` and `w2` cross transversally, decided from
    /// the sign of the resultant of their fixed-point quadratics in
    /// double-double. Endpoints of two axes separate each other on the
    /// boundary exactly when that resultant is negative, and the sign is
    /// unchanged by Möbius maps, so endpoints at infinity need no special
    /// case. Axes sharing an endpoint do not cross.
    pub fn axes_cross(&self, w1: &Word, w2: &Word) -> Result<bool, SurfcertError> {
        self.holonomy(w1)?;
        self.holonomy(w2)?;
        let q = |m: Dd| [m[2], m[3] - m[0], -m[1]];
        let (p, r) = (q(self.holonomy_dd(w1)), q(self.holonomy_dd(w2)));
        let res = (p[0] * r[2] - r[0] * p[2]) * (p[0] * r[2] - r[0] * p[2])
            - (p[0] * r[1] - r[0] * p[1]) * (p[1] * r[2] - r[1] * p[2]);
        let size = |c: &[TwoFloat; 3]| c.iter().map(|x| f64::from(*x).abs()).fold(0.0, f64::max);
        let scale = (size(&p) * size(&r)).powi(2);
        Ok(f64::from(res) < -1e-24 * scale)
    }

    /// Parameter along `axis` and angle coordinate of the crossing with the
    /// axis of `w`, as in [`Axis::crossing_params`] but with the conjugation
    /// into the normalized frame done in double-double. Translates whose
    /// endpoints nearly meet those of `axis` need this.
    pub fn crossing_on(&self, axis: &Axis, w: &Word) -> Result<Option<(f64, f64)>, SurfcertError> {
        self.holonomy(w)?;
        let n = axis.normalizer;
        let ni = n.inverse();
        let dd = |m: &Isometry| -> Dd { [m.a.into(), m.b.into(), m.c.into(), m.d.into()] };
        let m = dd_mul(&dd_mul(&dd(&n), &self.holonomy_dd(w)), &dd(&ni));
        if f64::from(m[2]) == 0.0 {
            return Ok(None);
        }
        // the fixed points have product -b/c and sum (a - d)/c
        let ratio = f64::from(m[1] / m[2]).abs();
        let sum = f64::from((m[0] - m[3]) / m[2]);
        if !ratio.is_finite() || ratio == 0.0 {
            return Ok(None);
        }
        let y = ratio.sqrt();
        Ok(Some((y.ln(), (sum / y).atan())))
    }

    /// Length of the closed geodesic freely homotopic to `w`.
    pub fn translation_length(&self, w: &Word) -> Result<f64, SurfcertError> {
        self.holonomy(w)?;
        if w.is_empty() {
            return Err(SurfcertError::TrivialCurve);
        }
        // the trace is taken before rounding: conjugates by long words have
        // huge entries but the same trace
        let m = self.holonomy_dd(w);
        let t: f64 = (m[0] + m[3]).into();
        if t.abs() <= 2.0 + PARABOLIC_GUARD {
            return Err(SurfcertError::NotHyperbolic(format!(
                "{} has trace {}",
                w, t
            )));
        }
        Ok(2.0 * (t.abs() / 2.0).acosh())
    }

    /// Repelling and attracting fixed points of the holonomy of `w`.
    pub fn axis_endpoints(&self, w: &Word) -> Result<(f64, f64), SurfcertError> {
        Ok(self.axis(w)?.endpoints())
    }

    pub fn axis(&self, w: &Word) -> Result<Axis, SurfcertError> {
        let m = self.holonomy(w)?;
        m.axis()
            .ok_or_else(|| SurfcertError::NotHyperbolic(format!("{} has trace {}", w, m.trace())))
    }

    /// Tile containing `p`, found by greedy descent towards the centre. The
    /// returned path lists neighbour indices from the base tile.
    pub fn locate(&self, p: Point) -> (Isometry, Vec<u8>) {
        let mut h = Isometry::IDENTITY;
        let mut path = Vec::new();
        for _ in 0..10_000 {
            let q = h.inverse().apply(p);
            let here = hyperbolic_distance(q, Point::ORIGIN);
            let best = self
                .tiling
                .neighbors
                .iter()
                .enumerate()
                .map(|(j, n)| (j, hyperbolic_distance(q, n.apply(Point::ORIGIN))))
                .min_by(|a, b| a.1.total_cmp(&b.1));
            match best {
                Some((j, d)) if d < here - 1e-12 => {
                    h = h.mul(&self.tiling.neighbors[j]);
                    path.push(j as u8);
                }
                _ => break,
            }
        }
        (h, path)
    }

    /// Breadth-first search over tiles adjacent through sides, starting at
    /// `start` and expanding only tiles whose element satisfies `keep`.
    pub fn explore<F: Fn(&Isometry) -> bool>(
        &self,
        start: (Isometry, Vec<u8>),
        keep: F,
        node_limit: usize,
    ) -> TileSet {
        let mut set = TileSet {
            root_path: start.1,
            nodes: Vec::new(),
            members: Vec::new(),
            complete: true,
        };
        if !keep(&start.0) {
            return set;
        }
        let mut index = OrbitIndex::default();
        set.nodes.push(TileNode {
            element: start.0,
            parent: u32::MAX,
            step: 0,
        });
        set.members.push(0);
        index.insert(start.0.apply(Point::ORIGIN), 0);
        let mut queue = VecDeque::from([0u32]);
        while let Some(i) = queue.pop_front() {
            let h = set.nodes[i as usize].element;
            for (j, n) in self.tiling.neighbors.iter().enumerate() {
                let g = h.mul(n);
                let p = g.apply(Point::ORIGIN);
                if index.find(p, &set.nodes).is_some() || !keep(&g) {
                    continue;
                }
                if set.nodes.len() >= node_limit {
                    set.complete = false;
                    return set;
                }
                let id = set.nodes.len() as u32;
                set.nodes.push(TileNode {
                    element: g,
                    parent: i,
                    step: j as u8,
                });
                set.members.push(id);
                index.insert(p, id);
                queue.push_back(id);
            }
        }
        set
    }

    /// All group elements moving `i` by at most `radius`.
    pub fn ball(&self, radius: f64, node_limit: usize) -> TileSet {
        // tiles along the segment to a target stay within radius + R
        let bound = radius + self.tiling.radius + 1e-9;
        let mut set = self.explore(
            (Isometry::IDENTITY, Vec::new()),
            |g| g.displacement() <= bound,
            node_limit,
        );
        set.retain(|g| g.displacement() <= radius + 1e-9);
        set
    }

    /// Tiles meeting the segment `[t0, t1]` of `axis`.
    pub fn tube(&self, axis: &Axis, t0: f64, t1: f64, node_limit: usize) -> TileSet {
        let start = self.locate(axis.point_at(t0));
        let bound = self.tiling.radius + 1e-9;
        self.explore(
            start,
            |g| axis.segment_distance(g.apply(Point::ORIGIN), t0, t1) <= bound,
            node_limit,
        )
    }

    /// Word in the standard generators for a neighbour-index path.
    pub fn path_word(&self, path: &[u8]) -> Word {
        Word::from_letters(path.iter().flat_map(|&j| {
            self.tiling.neighbor_words[j as usize]
                .letters()
                .iter()
                .copied()
        }))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TileNode {
    pub element: Isometry,
    parent: u32,
    step: u8,
}

/// Result of a tile search. Paths are stored as parent links over every
/// explored node; `members` selects the reported ones.
#[derive(Clone, Debug)]
pub struct TileSet {
    root_path: Vec<u8>,
    nodes: Vec<TileNode>,
    members: Vec<u32>,
    pub complete: bool,
}

impl TileSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn element(&self, i: usize) -> Isometry {
        self.nodes[self.members[i] as usize].element
    }

    pub fn elements(&self) -> impl Iterator<Item = &Isometry> {
        self.members
            .iter()
            .map(|&k| &self.nodes[k as usize].element)
    }

    /// Neighbour-index path from the identity to member `i`.
    pub fn path(&self, i: usize) -> Vec<u8> {
        let mut steps = Vec::new();
        let mut k = self.members[i] as usize;
        while self.nodes[k].parent != u32::MAX {
            steps.push(self.nodes[k].step);
            k = self.nodes[k].parent as usize;
        }
        steps.reverse();
        let mut out = self.root_path.clone();
        out.extend(steps);
        out
    }

    fn retain<F: Fn(&Isometry) -> bool>(&mut self, pred: F) {
        let nodes = &self.nodes;
        self.members.retain(|&k| pred(&nodes[k as usize].element));
    }
}

/// Spatial hash of orbit points of `i`, used to identify group elements.
#[derive(Default)]
struct OrbitIndex {
    cells: HashMap<(i32, i64), Vec<u32>>,
}

impl OrbitIndex {
    const SAME: f64 = 1e-3;

    fn key(p: Point, dy: i32) -> (i32, f64) {
        let iy = p.y.ln().floor() as i32 + dy;
        (iy, (iy as f64).exp())
    }

    fn insert(&mut self, p: Point, id: u32) {
        let (iy, w) = Self::key(p, 0);
        self.cells
            .entry((iy, (p.x / w).floor() as i64))
            .or_default()
            .push(id);
    }

    fn find(&self, p: Point, nodes: &[TileNode]) -> Option<u32> {
        for dy in -1..=1 {
            let (iy, w) = Self::key(p, dy);
            let jx = (p.x / w).floor() as i64;
            for dx in -1..=1 {
                if let Some(ids) = self.cells.get(&(iy, jx + dx)) {
                    for &id in ids {
                        let q = nodes[id as usize].element.apply(Point::ORIGIN);
                        if hyperbolic_distance(p, q) < Self::SAME {
                            return Some(id);
                        }
                    }
                }
            }
        }
        None
    }
}

/// Standard generators written in the side pairings, and the side pairings
/// written back in the standard generators.
#[derive(Clone, Debug)]
pub struct StandardBasis {
    pub generators: Vec<Word>,
    pub sides: Vec<Word>,
}

#[derive(Clone)]
struct Normalization {
    relator: Vec<Letter>,
    images: BTreeMap<usize, Word>,
    inverse: Vec<Word>,
    next: usize,
    done: Vec<usize>,
}

fn substitute<F: Fn(usize) -> Option<Word>>(w: &Word, f: F) -> Word {
    let mut out = Vec::new();
    for &l in w.letters() {
        match f(l.generator()) {
            Some(img) => {
                let img = if l.is_inverse() { img.inverse() } else { img };
                out.extend_from_slice(img.letters());
            }
            None => out.push(l),
        }
    }
    Word::from_letters(out)
}

impl Normalization {
    fn expand(&self, w: &[Letter]) -> Word {
        substitute(&Word::from_letters(w.iter().copied()), |k| {
            self.images.get(&k).cloned()
        })
    }

    /// Children of this state: one per interlinked pair `a ... b ... A ... B`.
    fn children(&self) -> Vec<Normalization> {
        let r = &self.relator;
        let n = r.len();
        let mut out = Vec::new();
        for i in 0..n {
            let a = r[i];
            if a.is_inverse() || self.done.contains(&a.generator()) {
                continue;
            }
            let rot: Vec<Letter> = r[i..].iter().chain(r[..i].iter()).copied().collect();
            let j = rot
                .iter()
                .position(|&l| l == a.inverse())
                .expect("relator letter pairs");
            for t in 1..j {
                let b = rot[t];
                if b.is_inverse() || self.done.contains(&b.generator()) {
                    continue;
                }
                let jb = rot
                    .iter()
                    .position(|&l| l == b.inverse())
                    .expect("relator letter pairs");
                if jb < j {
                    continue;
                }
                let x = &rot[1..t];
                let y = &rot[t + 1..j];
                let z = &rot[j + 1..jb];
                let w = &rot[jb + 1..];
                let inv =
                    |s: &[Letter]| -> Vec<Letter> { s.iter().rev().map(|l| l.inverse()).collect() };
                let (e, d) = (self.next, self.next + 1);
                let mut e_word = inv(x);
                e_word.extend(inv(y));
                e_word.extend(inv(z));
                e_word.push(a);
                e_word.extend_from_slice(x);
                let mut d_word = vec![b];
                d_word.extend_from_slice(y);
                d_word.extend_from_slice(x);
                let mut child = self.clone();
                child.images.insert(e, self.expand(&e_word));
                child.images.insert(d, self.expand(&d_word));
                // old letters in terms of the new ones
                let mut a_new: Vec<Letter> = z.to_vec();
                a_new.extend_from_slice(y);
                a_new.extend_from_slice(x);
                a_new.push(Letter::pos(e));
                a_new.extend(inv(x));
                let mut b_new = vec![Letter::pos(d)];
                b_new.extend(inv(x));
                b_new.extend(inv(y));
                let (a_new, b_new) = (Word::from_letters(a_new), Word::from_letters(b_new));
                let (ga, gb) = (a.generator(), b.generator());
                child.inverse = self
                    .inverse
                    .iter()
                    .map(|v| {
                        substitute(v, |k| {
                            if k == ga {
                                Some(a_new.clone())
                            } else if k == gb {
                                Some(b_new.clone())
                            } else {
                                None
                            }
                        })
                    })
                    .collect();
                let mut rel = vec![
                    Letter::pos(e),
                    Letter::pos(d),
                    Letter::neg(e),
                    Letter::neg(d),
                ];
                rel.extend_from_slice(w);
                rel.extend_from_slice(z);
                rel.extend_from_slice(y);
                rel.extend_from_slice(x);
                child.relator = rel;
                child.next += 2;
                child.done.extend([e, d]);
                out.push(child);
            }
        }
        out
    }

    /// Reads off the basis once the relator is a product of commutators.
    fn finish(&self, genus: usize) -> Option<StandardBasis> {
        let r = &self.relator;
        let n = r.len();
        for i in 0..n {
            let w: Vec<Letter> = r[i..].iter().chain(r[..i].iter()).copied().collect();
            let blocks = (0..genus).all(|b| {
                let (p, q) = (w[4 * b], w[4 * b + 1]);
                !p.is_inverse()
                    && !q.is_inverse()
                    && w[4 * b + 2] == p.inverse()
                    && w[4 * b + 3] == q.inverse()
            });
            if !blocks {
                continue;
            }
            let mut index = BTreeMap::new();
            let mut generators = Vec::new();
            for b in 0..genus {
                for k in 0..2 {
                    let l = w[4 * b + k];
                    index.insert(l.generator(), 2 * b + k);
                    generators.push(self.images[&l.generator()].clone());
                }
            }
            let sides = self
                .inverse
                .iter()
                .map(|v| {
                    Word::from_letters(
                        v.letters()
                            .iter()
                            .map(|l| Letter::new(index[&l.generator()], l.is_inverse())),
                    )
                })
                .collect();
            return Some(StandardBasis { generators, sides });
        }
        None
    }
}

/// Relator of the opposite-side pairing of the regular 4g-gon:
/// `A_0 A_1^-1 ... A_{2g-1}^-1 A_0^-1 A_1 ... A_{2g-1}`.
pub fn side_relator(genus: usize) -> Word {
    let first: Vec<Letter> = (0..2 * genus).map(|k| Letter::new(k, k % 2 == 1)).collect();
    let second: Vec<Letter> = first.iter().map(|l| l.inverse()).collect();
    Word::from_letters(first.into_iter().chain(second))
}

const BASIS_SEARCH_LEAVES: usize = 512;

/// Handle extraction applied to the side relator. Among the bases reached
/// (up to a fixed search budget) the one with the smallest maximal generator
/// trace, then the shortest total word length, is kept.
pub fn standard_basis(genus: usize) -> StandardBasis {
    let n = 4 * genus;
    let cot = 1.0 / (PI / n as f64).tan();
    let r = cot.acosh();
    let sides: Vec<Isometry> = (0..2 * genus)
        .map(|k| {
            let th = 2.0 * PI * k as f64 / n as f64;
            Isometry::rotation(th)
                .mul(&Isometry::translation(2.0 * r))
                .mul(&Isometry::rotation(-th))
        })
        .collect();
    let score = |b: &StandardBasis| -> (i64, i64, usize) {
        let mats: Vec<Isometry> = b
            .generators
            .iter()
            .map(|w| {
                w.letters().iter().fold(Isometry::IDENTITY, |acc, l| {
                    let m = sides[l.generator()];
                    acc.mul(&if l.is_inverse() { m.inverse() } else { m })
                })
            })
            .collect();
        let tmax = mats.iter().map(|m| m.trace().abs()).fold(0.0, f64::max);
        let dmax = mats.iter().map(|m| m.displacement()).fold(0.0, f64::max);
        (
            (tmax * 1e6).round() as i64,
            (dmax * 1e6).round() as i64,
            b.generators.iter().map(Word::len).sum(),
        )
    };
    let root = Normalization {
        relator: side_relator(genus).letters().to_vec(),
        images: (0..2 * genus).map(|k| (k, Word::gen(k))).collect(),
        inverse: (0..2 * genus).map(Word::gen).collect(),
        next: 2 * genus,
        done: Vec::new(),
    };
    let mut best: Option<((i64, i64, usize), StandardBasis)> = None;
    let mut leaves = 0;
    let mut stack = vec![root];
    while let Some(state) = stack.pop() {
        if leaves >= BASIS_SEARCH_LEAVES {
            break;
        }
        let children = state.children();
        if children.is_empty() {
            leaves += 1;
            if let Some(b) = state.finish(genus) {
                let s = score(&b);
                if best.as_ref().is_none_or(|(bs, _)| s < *bs) {
                    best = Some((s, b));
                }
            }
        } else {
            stack.extend(children.into_iter().rev());
        }
    }
    best.expect("handle extraction always terminates in standard form")
        .1
}

/// A closed geodesic, identified by the canonical form of its conjugacy
/// class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicClass {
    pub form: Word,
    pub length: f64,
    pub trace: f64,
    pub homology: HomologyVector,
    pub primitive: bool,
}

impl GeodesicClass {
    pub fn new(
        rep: &FuchsianRep,
        group: &SurfaceGroup,
        w: &Word,
    ) -> Result<GeodesicClass, SurfcertError> {
        group.check(w)?;
        let form = group.conjugacy_form(w);
        if form.is_empty() {
            return Err(SurfcertError::TrivialCurve);
        }
        let m = rep.holonomy(&form)?;
        let length = rep.translation_length(&form)?;
        Ok(GeodesicClass {
            homology: group.abelianize(&form),
            primitive: group.proper_power(&form).is_none(),
            trace: m.trace().abs(),
            length,
            form,
        })
    }
}

/// Short conjugacy classes with the parameters of the search.
#[derive(Clone, Debug)]
pub struct ShortClasses {
    pub cutoff: f64,
    pub classes: Vec<GeodesicClass>,
    pub completeness: Completeness,
    /// Orbit radius searched around `i`.
    pub search_radius: f64,
    pub nodes: usize,
}

pub const DEFAULT_NODE_LIMIT: usize = 20_000_000;

/// Every conjugacy class of translation length at most `cutoff`.
///
/// Each closed geodesic has a lift whose axis passes within the tile
/// radius `R` of `i`; the corresponding element moves `i` by at most
/// `2 asinh(cosh R sinh(L/2))`, so a ball of that radius contains a
/// representative of every class.
pub fn enumerate_short_classes(
    rep: &FuchsianRep,
    group: &SurfaceGroup,
    cutoff: f64,
    node_limit: usize,
) -> Result<ShortClasses, SurfcertError> {
    if !(cutoff > 0.0) {
        return Err(SurfcertError::InvalidParameter(format!(
            "length cutoff {} must be positive",
            cutoff
        )));
    }
    let big_r = rep.tiling().radius;
    let radius = 2.0 * (big_r.cosh() * (cutoff / 2.0).sinh()).asinh();
    let ball = rep.ball(radius, node_limit);
    let mut found: BTreeMap<Word, GeodesicClass> = BTreeMap::new();
    for i in 0..ball.len() {
        let g = ball.element(i);
        let disp = g.displacement();
        if disp < 1e-6 {
            continue;
        }
        let Some(len) = g.translation_length() else {
            return Err(SurfcertError::NotHyperbolic(format!(
                "orbit element with trace {}",
                g.trace()
            )));
        };
        if len > cutoff + 1e-9 {
            continue;
        }
        // distance from i to the axis
        let cosh_delta = ((disp / 2.0).sinh() / (len / 2.0).sinh()).max(1.0);
        if cosh_delta.acosh() > big_r + 1e-7 {
            continue;
        }
        let word = rep.path_word(&ball.path(i));
        let form = group.conjugacy_form(&word);
        if found.contains_key(&form) {
            continue;
        }
        let class = GeodesicClass::new(rep, group, &form)?;
        if (class.length - len).abs() > 1e-6 {
            return Err(SurfcertError::Inconsistent(format!(
                "symbolic form {} has length {} but its orbit element has {}",
                form, class.length, len
            )));
        }
        found.insert(form, class);
    }
    let mut classes: Vec<GeodesicClass> = found.into_values().collect();
    classes.sort_by(|a, b| {
        a.length
            .total_cmp(&b.length)
            .then_with(|| a.form.cmp(&b.form))
    });
    let completeness = if !ball.complete {
        Completeness::Incomplete
    } else {
        rep.completeness()
    };
    Ok(ShortClasses {
        cutoff,
        classes,
        completeness,
        search_radius: radius,
        nodes: ball.len(),
    })
}

/// CSV listing with one homology column per generator.
pub fn lengths_csv(classes: &[GeodesicClass], genus: usize) -> String {
    let mut s = String::from("form,length");
    for k in 1..=2 * genus {
        let _ = write!(s, ",h{}", k);
    }
    s.push('\n');
    for c in classes {
        let _ = write!(s, "{},{}", c.form, crate::format_real(c.length));
        for x in c.homology.as_slice() {
            let _ = write!(s, ",{}", x);
        }
        s.push('\n');
    }
    s
}
