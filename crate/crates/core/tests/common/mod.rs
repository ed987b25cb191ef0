//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use surfcert_core::geometry::{FuchsianRep, Isometry, Point};
use surfcert_core::{Letter, SurfaceGroup, Word};

pub fn random_word(rng: &mut ChaCha8Rng, rank: usize, len: usize) -> Word {
    Word::from_letters((0..len).map(|_| Letter::new(rng.gen_range(0..rank), rng.gen_bool(0.5))))
}

/// Counts crossing translates by running over Dehn-reduced words up to
/// `max_len`, independently of the tiling. Every crossing has a translate
/// `u` moving `i` by at most `bound`; prefixes of longer excursions are
/// pruned.
pub fn brute_force_crossings(rep: &FuchsianRep, c1: &Word, c2: &Word, max_len: usize) -> usize {
    let group = SurfaceGroup::new(rep.genus()).unwrap();
    let ax1 = rep.axis(c1).unwrap();
    let ax2 = rep.axis(c2).unwrap();
    let g2 = rep.holonomy(c2).unwrap();
    let len = ax1.length;
    let origin = Point::ORIGIN;
    // crossing points within half a period of the feet of i on both axes
    let bound =
        ax1.project(origin).1 + ax2.project(origin).1 + (ax1.length + ax2.length) / 2.0 + 0.1;
    let mut keys: Vec<(f64, f64)> = Vec::new();
    let mut stack: Vec<(Isometry, Vec<Letter>)> = vec![(Isometry::IDENTITY, Vec::new())];
    while let Some((u, word)) = stack.pop() {
        let depth = word.len();
        let disp = u.displacement();
        if disp <= bound {
            if let Some((t, angle)) = ax1.crossing_of(&u.mul(&g2).mul(&u.inverse())) {
                let t0 = t.rem_euclid(len);
                let seen = keys.iter().any(|&(s, a)| {
                    let d = (s - t0).abs();
                    d.min(len - d) < 1e-6 && (a - angle).abs() < 1e-6
                });
                if !seen {
                    keys.push((t0, angle));
                }
            }
        }
        if depth == max_len || disp > bound + 6.0 {
            continue;
        }
        for code in 0..2 * rep.genus() * 2 {
            let l = Letter::new(code / 2, code % 2 == 1);
            if word.last() == Some(&l.inverse()) {
                continue;
            }
            let mut next = word.clone();
            next.push(l);
            if group
                .greedy_dehn(&Word::from_letters(next.iter().copied()))
                .len()
                < next.len()
            {
                continue;
            }
            stack.push((u.mul(&rep.letter_matrix(l)), next));
        }
    }
    keys.len()
}

/// Least `Σ λ_i a_i^2` subject to `λ_i a_i = n_i |l_i| / T` and `Σ λ_i = 1`,
/// by repeatedly refined grids over the simplex of weights.
pub fn grid_min_action(parts: &[(f64, u32)], period: f64) -> f64 {
    let c: Vec<f64> = parts
        .iter()
        .map(|&(len, n)| n as f64 * len / period)
        .collect();
    let action = |lambda: &[f64]| -> f64 { c.iter().zip(lambda).map(|(ci, l)| ci * ci / l).sum() };
    match c.len() {
        1 => action(&[1.0]),
        2 => {
            let (mut lo, mut hi) = (1e-9, 1.0 - 1e-9);
            let mut best = f64::INFINITY;
            for _ in 0..8 {
                let n = 1000;
                let mut arg = lo;
                for k in 0..=n {
                    let x = lo + (hi - lo) * k as f64 / n as f64;
                    let a = action(&[x, 1.0 - x]);
                    if a < best {
                        best = a;
                        arg = x;
                    }
                }
                let step = (hi - lo) / n as f64;
                lo = (arg - 2.0 * step).max(1e-12);
                hi = (arg + 2.0 * step).min(1.0 - 1e-12);
            }
            best
        }
        3 => {
            let (mut lo, mut hi) = ([1e-9; 2], [1.0 - 1e-9; 2]);
            let mut best = f64::INFINITY;
            for _ in 0..8 {
                let n = 200;
                let mut arg = lo;
                for i in 0..=n {
                    for j in 0..=n {
                        let x = lo[0] + (hi[0] - lo[0]) * i as f64 / n as f64;
                        let y = lo[1] + (hi[1] - lo[1]) * j as f64 / n as f64;
                        if x + y >= 1.0 {
                            continue;
                        }
                        let a = action(&[x, y, 1.0 - x - y]);
                        if a < best {
                            best = a;
                            arg = [x, y];
                        }
                    }
                }
                for d in 0..2 {
                    let step = (hi[d] - lo[d]) / n as f64;
                    lo[d] = (arg[d] - 2.0 * step).max(1e-12);
                    hi[d] = (arg[d] + 2.0 * step).min(1.0 - 1e-12);
                }
            }
            best
        }
        _ => unreachable!(),
    }
}
