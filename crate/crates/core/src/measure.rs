//! Invariant probability measures of the geodesic flow supported on finitely
//! many closed geodesics, for the Lagrangian `L(x, v) = |v|^2`.
//!
//! A measure here runs entry `i` of its support at constant speed `a_i`
//! and gives it mass `λ_i`. A closed curve of length `|l|` traversed at
//! speed `a` takes time `|l|/a` and drifts by `[l]`, so its rotation
//! vector is `a [l] / |l|` and its action is `a^2`.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::homology::HomologyVector;
use crate::partition::{CurveClass, DisjointPartition, PartitionEntry};
use crate::SurfcertError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicMeasure {
    #[serde(rename = "partition")]
    pub support: DisjointPartition,
    /// Time over which the measure realizes the homology of its support.
    pub period: f64,
    pub speeds: Vec<f64>,
    pub weights: Vec<f64>,
    pub rotation: Vec<f64>,
    pub action: f64,
}

impl PeriodicMeasure {
    /// Measure with the given speeds and weights on the entries of `support`.
    pub fn new(
        support: DisjointPartition,
        period: f64,
        speeds: Vec<f64>,
        weights: Vec<f64>,
    ) -> Result<PeriodicMeasure, SurfcertError> {
        positive("period", period)?;
        let n = support.entries.len();
        if n == 0 || speeds.len() != n || weights.len() != n {
            return Err(SurfcertError::InvalidParameter(format!(
                "{} entries need as many speeds and weights, got {} and {}",
                n,
                speeds.len(),
                weights.len()
            )));
        }
        for &a in &speeds {
            positive("speed", a)?;
        }
        if weights.iter().any(|&w| !(w >= 0.0)) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-12
        {
            return Err(SurfcertError::InvalidParameter(
                "weights must be a probability vector".into(),
            ));
        }
        let dim = support.homology.dim();
        let mut rotation = vec![0.0; dim];
        let mut action = 0.0;
        for ((e, &a), &w) in support.entries.iter().zip(&speeds).zip(&weights) {
            let len = e.curve.class.length;
            for (r, &h) in rotation.iter_mut().zip(e.curve.class.homology.as_slice()) {
                *r += w * a * h as f64 / len;
            }
            action += w * a * a;
        }
        Ok(PeriodicMeasure {
            support,
            period,
            speeds,
            weights,
            rotation,
            action,
        })
    }
}

fn positive(name: &str, x: f64) -> Result<(), SurfcertError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(SurfcertError::InvalidParameter(format!(
            "{} must be positive, got {}",
            name, x
        )))
    }
}

/// The evenly distributed measure on `c` traversed once in time `period`.
pub fn periodic_measure_of_curve(
    c: &CurveClass,
    period: f64,
) -> Result<PeriodicMeasure, SurfcertError> {
    positive("period", period)?;
    let support = DisjointPartition::new(
        c.class.homology.dim(),
        vec![PartitionEntry {
            curve: c.clone(),
            multiplicity: 1,
        }],
    );
    PeriodicMeasure::new(support, period, vec![c.class.length / period], vec![1.0])
}

/// All velocities scaled by `a`.
pub fn shift_measure(mu: &PeriodicMeasure, a: f64) -> Result<PeriodicMeasure, SurfcertError> {
    positive("shift", a)?;
    Ok(PeriodicMeasure {
        support: mu.support.clone(),
        period: mu.period / a,
        speeds: mu.speeds.iter().map(|s| s * a).collect(),
        weights: mu.weights.clone(),
        rotation: mu.rotation.iter().map(|r| r * a).collect(),
        action: mu.action * a * a,
    })
}

/// The least-action measure on `partition` with rotation vector `h/period`.
///
/// Rotation `h/T` forces `λ_i a_i = n_i |l_i| / T`, and then
/// `Σ λ_i a_i^2 ≥ (Σ λ_i a_i)^2 = (|A|/T)^2` with equality iff all speeds
/// equal `|A|/T`.
pub fn min_action_on_partition(
    partition: &DisjointPartition,
    h: &HomologyVector,
    period: f64,
) -> Result<PeriodicMeasure, SurfcertError> {
    positive("period", period)?;
    if &partition.homology != h {
        return Err(SurfcertError::InvalidParameter(format!(
            "partition has homology {} but {} was requested",
            partition.homology, h
        )));
    }
    let total = partition.total_length;
    let speed = total / period;
    let weights: Vec<f64> = partition
        .entries
        .iter()
        .map(|e| e.multiplicity as f64 * e.curve.class.length / total)
        .collect();
    let n = weights.len();
    PeriodicMeasure::new(partition.clone(), period, vec![speed; n], weights)
}

/// Orders two partitions of `h` by the action of their least-action
/// measures; ties within `1e-12` relative are equal.
pub fn compare_partitions(
    a: &DisjointPartition,
    b: &DisjointPartition,
    h: &HomologyVector,
    period: f64,
) -> Result<Ordering, SurfcertError> {
    let x = min_action_on_partition(a, h, period)?.action;
    let y = min_action_on_partition(b, h, period)?.action;
    if (x - y).abs() <= 1e-12 * x.max(y) {
        Ok(Ordering::Equal)
    } else {
        Ok(x.total_cmp(&y))
    }
}
