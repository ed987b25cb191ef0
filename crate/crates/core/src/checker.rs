//! Independent re-verification of a certificate from its serialized data.
//!
//! Everything is rebuilt from the stage specs and the input word with a
//! fresh intersection oracle. The competitor search is redone by plain
//! recursion over all multisets of cover curves, without the direction
//! index used by the main search.

use serde::{Deserialize, Serialize};

use crate::certify::{projects_onto, Certificate, Level, Rationale, Verdict};
use crate::cover::SubgroupSpec;
use crate::geometry::{enumerate_short_classes, Completeness, FuchsianRep, GeodesicClass};
use crate::homology::HomologyVector;
use crate::intersect::IntersectionOracle;
use crate::partition::{cover_curves_below, CoverCurve};
use crate::SurfcertError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub checks: Vec<Check>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(1.0)
}

pub fn check_certificate(
    rep: &FuchsianRep,
    cert: &Certificate,
) -> Result<CheckReport, SurfcertError> {
    let mut report = CheckReport { checks: Vec::new() };
    let mut oracle = IntersectionOracle::new(rep)?;
    let group = oracle.group().clone();
    report.push(
        "genus",
        cert.genus == rep.genus(),
        format!("{} vs {}", cert.genus, rep.genus()),
    );
    report.push("metric", &cert.metric == rep.metric(), cert.metric.label());

    // input curve
    let l = cert.input.class.form.clone();
    let class = GeodesicClass::new(rep, &group, &l)?;
    report.push("input-form", class.form == l, format!("{}", class.form));
    report.push(
        "input-length",
        close(class.length, cert.input.class.length),
        format!("{} vs {}", class.length, cert.input.class.length),
    );
    report.push(
        "input-homology",
        class.homology == cert.input.class.homology,
        format!("{}", class.homology),
    );
    let si = oracle.self_intersection(&l)?;
    report.push(
        "input-simple",
        class.primitive && si == 0 && cert.input.simple,
        format!("{} crossings", si),
    );

    // tower
    let stages = &cert.tower.stages;
    let mut specs = vec![SubgroupSpec::trivial()];
    let mut levels = vec![Level::new(&group, &specs[0], &l)?];
    for (k, s) in stages.iter().enumerate() {
        let nested = match (&s.spec, s.rationale) {
            (SubgroupSpec::Lemma61 { .. }, Rationale::TrivialHomology) => {
                k == 0 && class.homology.is_zero()
            }
            (
                SubgroupSpec::Extension { base, .. },
                Rationale::BreakHomologous | Rationale::BreakPartition,
            ) => **base == specs[k],
            _ => false,
        };
        report.push(&format!("stage-{}-shape", k + 1), nested, s.spec.label());
        let level = Level::new(&group, &s.spec, &l)?;
        let prev = levels[k].cover.index;
        report.push(
            &format!("stage-{}-index", k + 1),
            level.cover.index == s.composite_index && prev * s.stage_index == s.composite_index,
            format!("{} = {} x {}", level.cover.index, prev, s.stage_index),
        );
        specs.push(s.spec.clone());
        levels.push(level);
    }
    let top = levels.last().expect("at least the base level");
    let product: usize = stages.iter().map(|s| s.stage_index).product();
    report.push(
        "total-index",
        top.cover.index == cert.tower.total_index && product == cert.tower.total_index,
        format!("{}", top.cover.index),
    );

    // lift
    let degree = top.cover.degree(&l, 0);
    report.push(
        "lift-degree",
        degree == cert.lift.degree && degree == 1,
        format!("{}", degree),
    );
    report.push(
        "lift-length",
        close(cert.lift.length, degree as f64 * class.length),
        format!("{}", cert.lift.length),
    );
    report.push(
        "lift-homology",
        top.target == cert.lift.homology && !top.target.is_zero(),
        format!("{}", top.target),
    );
    for (k, level) in levels.iter().enumerate() {
        let n = oracle.cover_intersection(&level.cover, &l, 0, &l, 0)?;
        report.push(
            &format!("lift-simple-{}", k),
            n == 0 && level.cover.contains(&l),
            format!("{} crossings", n),
        );
    }

    // broken competitors stay broken, and were real competitors
    let cutoff = class.length;
    for (k, s) in stages.iter().enumerate() {
        let lower = &levels[k];
        for (j, p) in s.broken.iter().enumerate() {
            let valid = competitor_is_valid(
                &mut oracle,
                lower,
                cutoff,
                &p.entries
                    .iter()
                    .map(|e| (e.curve.clone(), e.multiplicity))
                    .collect::<Vec<_>>(),
            )?;
            let here = !projects_onto(&levels[k + 1], &lower.cover, p);
            let at_top = !projects_onto(top, &lower.cover, p);
            report.push(
                &format!("stage-{}-broken-{}", k + 1, j),
                valid && here && at_top,
                format!(
                    "valid {} broken at stage {} and at the top {}",
                    valid, here, at_top
                ),
            );
        }
    }

    // fresh competitor search on the composite cover
    let short = enumerate_short_classes(rep, &group, cutoff, crate::geometry::DEFAULT_NODE_LIMIT)?;
    let classes: Vec<GeodesicClass> = short
        .classes
        .into_iter()
        .filter(|c| c.primitive && c.length < cutoff)
        .collect();
    let found = naive_competitors(&mut oracle, &classes, top, cutoff)?;
    report.push(
        "competitor-count",
        found == cert.competitors.partitions.len() || cert.competitors.truncated,
        format!(
            "{} found, {} recorded",
            found,
            cert.competitors.partitions.len()
        ),
    );
    for (j, p) in cert.competitors.partitions.iter().enumerate() {
        let valid = competitor_is_valid(
            &mut oracle,
            top,
            cutoff,
            &p.entries
                .iter()
                .map(|e| (e.curve.clone(), e.multiplicity))
                .collect::<Vec<_>>(),
        )?;
        report.push(
            &format!("competitor-{}", j),
            valid,
            format!("{:.6}", p.total_length),
        );
    }
    let completeness = short.completeness;
    report.push(
        "completeness",
        completeness <= cert.flags.completeness,
        format!("{:?} recorded {:?}", completeness, cert.flags.completeness),
    );
    let consistent = match cert.verdict {
        Verdict::Certified => {
            found == 0
                && cert.competitors.partitions.is_empty()
                && cert.flags.completeness != Completeness::Incomplete
        }
        Verdict::Inconclusive => found > 0 || cert.flags.completeness == Completeness::Incomplete,
        Verdict::Refuted => false,
    };
    report.push("verdict", consistent, format!("{:?}", cert.verdict));
    Ok(report)
}

/// Recomputes a recorded cover partition: its curves, homology sum,
/// length bound, simplicity and disjointness.
fn competitor_is_valid(
    oracle: &mut IntersectionOracle,
    level: &Level,
    cutoff: f64,
    entries: &[(CoverCurve, u32)],
) -> Result<bool, SurfcertError> {
    let group = oracle.group().clone();
    let (cover, hom, target) = (&level.cover, &level.hom, &level.target);
    let mut sum = HomologyVector::zero(target.dim());
    let mut total = 0.0;
    for (c, m) in entries {
        let base = oracle.rep().translation_length(&c.form)?;
        let degree = cover.degree(&c.form, c.coset);
        let orbit_min = (0..degree).fold((c.coset, c.coset), |(cur, best), _| {
            let n = cover.walk(&c.form, cur);
            (n, best.min(n))
        });
        if degree != c.degree || orbit_min.1 != c.coset || group.conjugacy_form(&c.form) != c.form {
            return Ok(false);
        }
        sum += &hom
            .path_class(cover, &c.form.pow(degree as i64), c.coset)
            .scale(*m as i64);
        total += *m as f64 * degree as f64 * base;
        if oracle.cover_intersection(cover, &c.form, c.coset, &c.form, c.coset)? != 0 {
            return Ok(false);
        }
    }
    for (i, (x, _)) in entries.iter().enumerate() {
        for (y, _) in &entries[i + 1..] {
            if oracle.cover_intersection(cover, &x.form, x.coset, &y.form, y.coset)? != 0 {
                return Ok(false);
            }
        }
    }
    Ok(&sum == target && total < cutoff - 1e-9)
}

/// Counts shorter partitions of the lift's class by plain recursion.
fn naive_competitors(
    oracle: &mut IntersectionOracle,
    classes: &[GeodesicClass],
    level: &Level,
    cutoff: f64,
) -> Result<usize, SurfcertError> {
    let curves: Vec<CoverCurve> = cover_curves_below(classes, &level.cover, &level.hom, cutoff)
        .into_iter()
        .filter(|c| !c.homology.is_zero())
        .collect();
    let group = oracle.group().clone();
    let geom: Vec<(crate::Word, usize)> = curves
        .iter()
        .map(|c| {
            let r = group.conjugacy_form(&c.form.inverse());
            (if r < c.form { r } else { c.form.clone() }, c.coset)
        })
        .collect();
    let mut count = 0;
    let mut chosen: Vec<(usize, u32)> = Vec::new();
    fn rec(
        i: usize,
        len: f64,
        sum: HomologyVector,
        ctx: &mut (
            &mut IntersectionOracle,
            &Level,
            &[CoverCurve],
            &[(crate::Word, usize)],
            &HomologyVector,
            f64,
        ),
        chosen: &mut Vec<(usize, u32)>,
        count: &mut usize,
    ) -> Result<(), SurfcertError> {
        if !chosen.is_empty() && &sum == ctx.4 {
            let entries: Vec<(CoverCurve, u32)> =
                chosen.iter().map(|&(k, m)| (ctx.2[k].clone(), m)).collect();
            let orientations_ok = chosen
                .iter()
                .enumerate()
                .all(|(a, &(x, _))| chosen[a + 1..].iter().all(|&(y, _)| ctx.3[x] != ctx.3[y]));
            if orientations_ok && competitor_is_valid(ctx.0, ctx.1, ctx.5, &entries)? {
                *count += 1;
            }
        }
        // curves are sorted by length
        for j in i..ctx.2.len() {
            let (clen, ch) = (ctx.2[j].length, ctx.2[j].homology.clone());
            if len + clen >= ctx.5 - 1e-9 {
                break;
            }
            let mut m = 1u32;
            let mut s = sum.clone();
            while len + m as f64 * clen < ctx.5 - 1e-9 {
                s = &s + &ch;
                chosen.push((j, m));
                rec(j + 1, len + m as f64 * clen, s.clone(), ctx, chosen, count)?;
                chosen.pop();
                m += 1;
            }
        }
        Ok(())
    }
    let mut ctx = (oracle, level, &curves[..], &geom[..], &level.target, cutoff);
    rec(
        0,
        0.0,
        HomologyVector::zero(level.target.dim()),
        &mut ctx,
        &mut chosen,
        &mut count,
    )?;
    Ok(count)
}
