use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Symmetric, zero-diagonal, non-negative dissimilarities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DissimilarityMatrix {
    pub n: usize,
    /// Row-major `n * n` values.
    pub values: Vec<f64>,
    /// Participant id, or `"aggregate"`.
    pub source: String,
}

impl DissimilarityMatrix {
    pub fn new(n: usize, values: Vec<f64>, source: impl Into<String>) -> Result<Self> {
        if n == 0 || values.len() != n * n {
            return Err(invalid(format!("expected {n}x{n} dissimilarities, got {} values", values.len())));
        }
        let m = Self { n, values, source: source.into() };
        for i in 0..n {
            if m.get(i, i) != 0.0 {
                return Err(invalid(format!("diagonal entry {i} is {}", m.get(i, i))));
            }
            for j in 0..n {
                let v = m.get(i, j);
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(invalid(format!("entry ({i},{j}) = {v} is not a non-negative number")));
                }
                if (v - m.get(j, i)).abs() > 1e-12 {
                    return Err(invalid(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
            }
        }
        Ok(m)
    }

    /// Builds the matrix from a function on `i < j`.
    pub fn from_fn(n: usize, source: impl Into<String>, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        Self::new(n, values, source)
    }

    /// Euclidean distances between the rows of `points`.
    pub fn from_points(points: &[Vec<f64>], source: impl Into<String>) -> Result<Self> {
        Self::from_fn(points.len(), source, |i, j| euclid(&points[i], &points[j]))
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    /// Element-wise mean of equally sized matrices.
    pub fn mean(matrices: &[DissimilarityMatrix]) -> Result<Self> {
        let first = matrices.first().ok_or_else(|| invalid("no matrices to average"))?;
        if matrices.iter().any(|m| m.n != first.n) {
            return Err(invalid("matrices differ in size"));
        }
        let k = matrices.len() as f64;
        let values = (0..first.values.len()).map(|i| matrices.iter().map(|m| m.values[i]).sum::<f64>() / k).collect();
        Self::new(first.n, values, "aggregate")
    }

    /// Upper-triangle entries in row order.
    pub fn upper(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n * (self.n - 1) / 2);
        for i in 0..self.n {
            for j in i + 1..self.n {
                out.push(self.get(i, j));
            }
        }
        out
    }
}

pub(crate) fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
