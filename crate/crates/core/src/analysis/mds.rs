//! Metric multidimensional scaling by stress majorization (SMACOF).

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::matrix::euclid;
use super::DissimilarityMatrix;
use crate::error::{invalid, Result};

/// An MDS configuration and its fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Embedding {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub stress1: f64,
    /// Per-participant dimension weights (INDSCAL only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Vec<f64>>>,
    pub iterations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    /// Physical density of each stimulus, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub densities: Option<Vec<f64>>,
    /// Raw stress after initialization and after every iteration.
    #[serde(skip)]
    pub stress_history: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MdsInit {
    /// Torgerson's classical solution.
    Classical,
    /// Seeded uniform random start.
    Random(u64),
}

#[derive(Clone, Copy, Debug)]
pub struct MdsOptions {
    pub init: MdsInit,
    pub max_iters: usize,
    /// Stop when raw stress, normalized by the sum of squared
    /// dissimilarities, changes by less than this.
    pub tol: f64,
}

impl Default for MdsOptions {
    fn default() -> Self {
        Self { init: MdsInit::Classical, max_iters: 1000, tol: 1e-9 }
    }
}

/// Kruskal's stress-1 between configuration distances and ratio-scaled
/// dissimilarities: `sqrt(sum (d - s*delta)^2 / sum d^2)` with the optimal `s`.
pub fn kruskal_stress1(points: &[Vec<f64>], delta: &DissimilarityMatrix) -> f64 {
    stress1_parts(points, delta, euclid).map_or(0.0, |(num, den)| (num / den).sqrt())
}

/// Numerator and denominator of stress-1; `None` when all distances vanish.
pub(crate) fn stress1_parts(
    points: &[Vec<f64>],
    delta: &DissimilarityMatrix,
    dist: impl Fn(&[f64], &[f64]) -> f64,
) -> Option<(f64, f64)> {
    let n = delta.n;
    let mut d = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    let (mut sdd, mut sd_delta, mut sdelta2) = (0.0, 0.0, 0.0);
    for i in 0..n {
        for j in i + 1..n {
            let dij = dist(&points[i], &points[j]);
            let t = delta.get(i, j);
            sdd += dij * dij;
            sd_delta += dij * t;
            sdelta2 += t * t;
            d.push((dij, t));
        }
    }
    if sdd == 0.0 {
        return None;
    }
    let s = if sdelta2 > 0.0 { sd_delta / sdelta2 } else { 0.0 };
    let num = d.iter().map(|(dij, t)| (dij - s * t).powi(2)).sum();
    Some((num, sdd))
}

pub(crate) fn raw_stress(points: &[Vec<f64>], delta: &DissimilarityMatrix) -> f64 {
    let n = delta.n;
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let r = euclid(&points[i], &points[j]) - delta.get(i, j);
            s += r * r;
        }
    }
    s
}

/// Torgerson scaling: top eigenvectors of the double-centered squared
/// dissimilarities, scaled by the square roots of their (non-negative) eigenvalues.
pub fn classical_mds(delta: &DissimilarityMatrix, dim: usize) -> Vec<Vec<f64>> {
    let n = delta.n;
    let d2 = DMatrix::from_fn(n, n, |i, j| delta.get(i, j).powi(2));
    let row_mean: Vec<f64> = (0..n).map(|i| d2.row(i).sum() / n as f64).collect();
    let total = row_mean.iter().sum::<f64>() / n as f64;
    let b = DMatrix::from_fn(n, n, |i, j| -0.5 * (d2[(i, j)] - row_mean[i] - row_mean[j] + total));
    let eig = SymmetricEigen::new(b);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &c| eig.eigenvalues[c].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&c)));
    let mut points = vec![vec![0.0; dim]; n];
    for (a, &k) in order.iter().take(dim).enumerate() {
        let lambda = eig.eigenvalues[k].max(0.0).sqrt();
        let v = eig.eigenvectors.column(k);
        // fix the eigenvector sign so the largest-magnitude entry is positive
        let pivot = (0..n).max_by(|&i, &j| v[i].abs().total_cmp(&v[j].abs()).then(j.cmp(&i))).unwrap_or(0);
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            points[i][a] = sign * lambda * v[i];
        }
    }
    points
}

pub(crate) fn center(points: &mut [Vec<f64>]) {
    let n = points.len() as f64;
    if points.is_empty() {
        return;
    }
    for a in 0..points[0].len() {
        let m = points.iter().map(|p| p[a]).sum::<f64>() / n;
        for p in points.iter_mut() {
            p[a] -= m;
        }
    }
}

/// One Guttman transform `X <- B(X) X / n` against target dissimilarities.
pub(crate) fn guttman(points: &[Vec<f64>], target: impl Fn(usize, usize) -> f64, dist: impl Fn(usize, usize) -> f64) -> Vec<Vec<f64>> {
    let n = points.len();
    let dim = points.first().map_or(0, Vec::len);
    let mut out = vec![vec![0.0; dim]; n];
    for i in 0..n {
        let mut diag = 0.0;
        #[allow(clippy::needless_range_loop)]
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = dist(i, j);
            let bij = if d > 0.0 { -target(i, j) / d } else { 0.0 };
            diag -= bij;
            for a in 0..dim {
                out[i][a] += bij * points[j][a];
            }
        }
        for a in 0..dim {
            out[i][a] += diag * points[i][a];
            out[i][a] /= n as f64;
        }
    }
    out
}

pub fn mds(delta: &DissimilarityMatrix, dim: usize) -> Result<Embedding> {
    mds_with(delta, dim, MdsOptions::default())
}

/// Minimizes raw stress `sum (d_ij - delta_ij)^2` by majorization; the stress
/// sequence is non-increasing.
pub fn mds_with(delta: &DissimilarityMatrix, dim: usize, opts: MdsOptions) -> Result<Embedding> {
    if dim == 0 {
        return Err(invalid("embedding dimension must be at least 1"));
    }
    let n = delta.n;
    let eta2: f64 = delta.upper().iter().map(|v| v * v).sum();
    if eta2 == 0.0 {
        return Ok(Embedding {
            dim,
            points: vec![vec![0.0; dim]; n],
            stress1: 0.0,
            weights: None,
            iterations: 0,
            labels: None,
            densities: None,
            stress_history: vec![0.0],
            warnings: vec!["all dissimilarities are zero; every point coincides".to_owned()],
        });
    }

    let mut x = match opts.init {
        MdsInit::Classical => classical_mds(delta, dim),
        MdsInit::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let scale = (eta2 / (n * n) as f64).sqrt().max(1e-12);
            (0..n).map(|_| (0..dim).map(|_| rng.random_range(-scale..scale)).collect()).collect()
        }
    };
    center(&mut x);
    let mut stress = raw_stress(&x, delta);
    let mut history = vec![stress];
    let mut iterations = 0;
    while iterations < opts.max_iters {
        let next = guttman(&x, |i, j| delta.get(i, j), |i, j| euclid(&x[i], &x[j]));
        let next_stress = raw_stress(&next, delta);
        iterations += 1;
        let change = (stress - next_stress) / eta2;
        if next_stress <= stress {
            x = next;
            stress = next_stress;
        }
        history.push(stress);
        if change < opts.tol {
            break;
        }
    }

    Ok(Embedding {
        dim,
        stress1: kruskal_stress1(&x, delta),
        points: x,
        weights: None,
        iterations,
        labels: None,
        densities: None,
        stress_history: history,
        warnings: Vec::new(),
    })
}

/// Stress-1 for every dimension `1..=max_dim`, each run independently.
pub fn scree(delta: &DissimilarityMatrix, max_dim: usize) -> Result<Vec<f64>> {
    if max_dim == 0 {
        return Err(invalid("max_dim must be at least 1"));
    }
    (1..=max_dim).map(|d| mds(delta, d).map(|e| e.stress1)).collect()
}
