//! INDSCAL: one group configuration `X` plus non-negative per-participant
//! dimension weights, fitted to each participant's own dissimilarities.
//!
//! Participant `k` sees `Z_k = X C_k` with diagonal `C_k`, so
//! `d_ij(k) = sqrt(sum_a w_ka (x_ia - x_ja)^2)` where `w_ka = c_ka^2`.
//! Each sweep majorizes the total raw stress at the current `Z_k` (Guttman
//! targets `Y_k`), then lowers `sum_k |X C_k - Y_k|^2` exactly in `X` and
//! then in `C` (projected onto `c >= 0`). Both updates shrink the majorizer,
//! so total stress never increases.

use super::matrix::euclid;
use super::mds::{center, classical_mds, guttman, stress1_parts};
use super::{mds, DissimilarityMatrix, Embedding};
use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug)]
pub struct IndscalOptions {
    pub max_sweeps: usize,
    /// Stop when total raw stress, normalized by the total sum of squared
    /// dissimilarities, changes by less than this.
    pub tol: f64,
}

impl Default for IndscalOptions {
    fn default() -> Self {
        Self { max_sweeps: 1000, tol: 1e-9 }
    }
}

fn scaled(x: &[Vec<f64>], c: &[f64]) -> Vec<Vec<f64>> {
    x.iter().map(|p| p.iter().zip(c).map(|(v, s)| v * s).collect()).collect()
}

fn total_stress(x: &[Vec<f64>], c: &[Vec<f64>], deltas: &[DissimilarityMatrix]) -> f64 {
    deltas.iter().zip(c).map(|(d, ck)| super::mds::raw_stress(&scaled(x, ck), d)).sum()
}

pub fn indscal(deltas: &[DissimilarityMatrix], dim: usize, opts: IndscalOptions) -> Result<Embedding> {
    if dim == 0 {
        return Err(invalid("embedding dimension must be at least 1"));
    }
    let first = deltas.first().ok_or_else(|| invalid("INDSCAL needs at least one participant"))?;
    let n = first.n;
    if deltas.iter().any(|d| d.n != n) {
        return Err(invalid("participants rated different stimulus counts"));
    }
    if deltas.len() == 1 {
        let mut e = mds(first, dim)?;
        e.weights = Some(vec![vec![1.0; dim]]);
        e.warnings.push("single participant: fell back to plain MDS".to_owned());
        return Ok(e);
    }

    let k = deltas.len();
    let eta2: f64 = deltas.iter().map(|d| d.upper().iter().map(|v| v * v).sum::<f64>()).sum();
    if eta2 == 0.0 {
        let mut e = mds(first, dim)?;
        e.weights = Some(vec![vec![1.0; dim]; k]);
        return Ok(e);
    }

    let mean = DissimilarityMatrix::mean(deltas)?;
    let mut x = classical_mds(&mean, dim);
    center(&mut x);
    let mut c = vec![vec![1.0; dim]; k];
    let mut stress = total_stress(&x, &c, deltas);
    let mut history = vec![stress];
    let mut sweeps = 0;

    while sweeps < opts.max_sweeps {
        let targets: Vec<Vec<Vec<f64>>> = deltas
            .iter()
            .zip(&c)
            .map(|(d, ck)| {
                let z = scaled(&x, ck);
                guttman(&z, |i, j| d.get(i, j), |i, j| euclid(&z[i], &z[j]))
            })
            .collect();

        let mut nx = x.clone();
        for a in 0..dim {
            let den: f64 = c.iter().map(|ck| ck[a] * ck[a]).sum();
            if den > 0.0 {
                for i in 0..n {
                    nx[i][a] = c.iter().zip(&targets).map(|(ck, y)| ck[a] * y[i][a]).sum::<f64>() / den;
                }
            }
        }
        let mut nc = c.clone();
        for a in 0..dim {
            let xx: f64 = nx.iter().map(|p| p[a] * p[a]).sum();
            if xx > 0.0 {
                for (ck, y) in nc.iter_mut().zip(&targets) {
                    let xy: f64 = nx.iter().zip(y).map(|(p, q)| p[a] * q[a]).sum();
                    ck[a] = (xy / xx).max(0.0);
                }
            }
        }
        // identify the scale: mean squared weight per dimension is one
        for a in 0..dim {
            let s = (nc.iter().map(|ck| ck[a] * ck[a]).sum::<f64>() / k as f64).sqrt();
            if s > 0.0 {
                for ck in nc.iter_mut() {
                    ck[a] /= s;
                }
                for p in nx.iter_mut() {
                    p[a] *= s;
                }
            }
        }

        let next = total_stress(&nx, &nc, deltas);
        sweeps += 1;
        let change = (stress - next) / eta2;
        if next <= stress {
            x = nx;
            c = nc;
            stress = next;
        }
        history.push(stress);
        if change < opts.tol {
            break;
        }
    }

    let (mut num, mut den) = (0.0, 0.0);
    for (d, ck) in deltas.iter().zip(&c) {
        if let Some((a, b)) = stress1_parts(&scaled(&x, ck), d, euclid) {
            num += a;
            den += b;
        }
    }
    Ok(Embedding {
        dim,
        points: x,
        stress1: if den > 0.0 { (num / den).sqrt() } else { 0.0 },
        weights: Some(c.iter().map(|ck| ck.iter().map(|v| v * v).collect()).collect()),
        iterations: sweeps,
        labels: None,
        densities: None,
        stress_history: history,
        warnings: Vec::new(),
    })
}
