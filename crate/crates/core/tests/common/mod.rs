#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use uniform_textures::analysis::{RatingRecord, StimulusKey};
use uniform_textures::reparam::{paper_params, sigmoid_inverse};

/// Perceived position of a density under the planted perception function.
pub fn planted_perception(d: f64) -> f64 {
    sigmoid_inverse(&paper_params("stipple").unwrap(), d).unwrap()
}

/// Point of the planted perceptual curve: a quarter circle traversed at unit
/// speed in the perceived position `s`.
pub fn planted_curve(s: f64) -> [f64; 2] {
    let angle = s * std::f64::consts::FRAC_PI_2;
    [angle.cos(), angle.sin()]
}

pub fn series_keys(texture: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| StimulusKey::index(texture, i).0).collect()
}

/// Ratings of every pair by `participants` simulated people. Dissimilarity is
/// the planted distance scaled to the 1..9 range plus Gaussian noise, with a
/// per-participant stretch of the two planted axes. Participant
/// `random_participant` answers uniformly at random instead.
pub fn simulate_ratings(
    keys: &[String],
    positions: &[[f64; 2]],
    participants: usize,
    noise: f64,
    random_participant: Option<usize>,
    seed: u64,
) -> Vec<RatingRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, noise.max(1e-12)).unwrap();
    let n = keys.len();
    let mut records = Vec::new();
    for p in 0..participants {
        let w = [rng.random_range(0.8..1.25), rng.random_range(0.8..1.25)];
        let dist = |i: usize, j: usize| {
            let (a, b) = (positions[i], positions[j]);
            (w[0] * (a[0] - b[0]).powi(2) + w[1] * (a[1] - b[1]).powi(2)).sqrt()
        };
        let max = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| dist(i, j)).fold(0.0, f64::max);
        for i in 0..n {
            for j in i..n {
                let rating = if Some(p) == random_participant {
                    rng.random_range(1..=9u8)
                } else {
                    let v = 1.0 + 8.0 * dist(i, j) / max + normal.sample(&mut rng);
                    v.round().clamp(1.0, 9.0) as u8
                };
                let (a, b) = if rng.random_bool(0.5) { (i, j) } else { (j, i) };
                records.push(RatingRecord::new(format!("p{p:02}"), keys[a].clone(), keys[b].clone(), rating).unwrap());
            }
        }
    }
    records
}

/// Planted positions of 21 stimuli at densities `0, 0.05, ..., 1`.
pub fn planted_series() -> (Vec<f64>, Vec<[f64; 2]>) {
    let d: Vec<f64> = (0..21).map(|i| i as f64 * 0.05).collect();
    let pos = d.iter().map(|&d| planted_curve(planted_perception(d))).collect();
    (d, pos)
}

/// Densities at `n` equal arc-length steps of the planted curve, found by
/// densely sampling density, accumulating arc length and inverting.
pub fn brute_force_levels(n: usize) -> Vec<f64> {
    let m = 200_000;
    let d: Vec<f64> = (0..=m).map(|i| i as f64 / m as f64).collect();
    let pts: Vec<[f64; 2]> = d.iter().map(|&d| planted_curve(planted_perception(d))).collect();
    let mut arc = vec![0.0];
    for w in pts.windows(2) {
        let l = ((w[1][0] - w[0][0]).powi(2) + (w[1][1] - w[0][1]).powi(2)).sqrt();
        arc.push(arc.last().unwrap() + l);
    }
    let total = *arc.last().unwrap();
    (1..=n)
        .map(|k| {
            let t = total * k as f64 / (n + 1) as f64;
            let i = arc.partition_point(|&a| a < t);
            d[i.min(m)]
        })
        .collect()
}

pub fn write_csv(path: &std::path::Path, records: &[RatingRecord]) {
    let f = std::fs::File::create(path).unwrap();
    uniform_textures::analysis::write_ratings_csv(f, records).unwrap();
}
