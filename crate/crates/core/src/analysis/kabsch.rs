//! Optimal superposition of corresponded point sets (Kabsch).

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{invalid, Result};

/// Maps `a` onto `b` as `R a + t`.
#[derive(Clone, Debug, Serialize)]
pub struct Alignment {
    pub rotation: Vec<Vec<f64>>,
    pub translation: Vec<f64>,
    pub rmsd: f64,
    /// Whether the returned transform is a reflection (det = -1).
    pub reflected: bool,
}

impl Alignment {
    pub fn apply(&self, p: &[f64]) -> Vec<f64> {
        self.rotation
            .iter()
            .zip(&self.translation)
            .map(|(row, t)| row.iter().zip(p).map(|(r, v)| r * v).sum::<f64>() + t)
            .collect()
    }
}

fn to_matrix(points: &[Vec<f64>], dim: usize) -> DMatrix<f64> {
    DMatrix::from_fn(points.len(), dim, |i, a| points[i][a])
}

/// Rotation (or, with `allow_reflection`, any orthogonal map) and translation
/// minimizing the RMSD between `R a_i + t` and `b_i`.
pub fn kabsch_align(a: &[Vec<f64>], b: &[Vec<f64>], allow_reflection: bool) -> Result<Alignment> {
    if a.len() != b.len() {
        return Err(invalid(format!("point counts differ: {} vs {}", a.len(), b.len())));
    }
    if a.len() < 2 {
        return Err(invalid("alignment needs at least two points"));
    }
    let dim = a[0].len();
    if dim == 0 || a.iter().chain(b).any(|p| p.len() != dim) {
        return Err(invalid("points must share one positive dimension"));
    }
    let n = a.len();
    let (pa, pb) = (to_matrix(a, dim), to_matrix(b, dim));
    let ca = DVector::from_fn(dim, |k, _| pa.column(k).mean());
    let cb = DVector::from_fn(dim, |k, _| pb.column(k).mean());
    let qa = DMatrix::from_fn(n, dim, |i, k| pa[(i, k)] - ca[k]);
    let qb = DMatrix::from_fn(n, dim, |i, k| pb[(i, k)] - cb[k]);

    let h = qa.transpose() * &qb;
    let svd = h.svd(true, true);
    let u = svd.u.expect("requested U");
    let v = svd.v_t.expect("requested V^T").transpose();
    let mut r = &v * u.transpose();
    let mut reflected = r.determinant() < 0.0;
    if reflected && !allow_reflection {
        // flip the axis of the smallest singular value
        let smallest = (0..dim).min_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j])).unwrap();
        let mut d = DMatrix::<f64>::identity(dim, dim);
        d[(smallest, smallest)] = -1.0;
        r = &v * d * u.transpose();
        reflected = false;
    }
    let t = &cb - &r * &ca;

    let mut sq = 0.0;
    for i in 0..n {
        let mapped = &r * pa.row(i).transpose() + &t;
        sq += (mapped - pb.row(i).transpose()).norm_squared();
    }
    Ok(Alignment {
        rotation: (0..dim).map(|i| (0..dim).map(|j| r[(i, j)]).collect()).collect(),
        translation: t.iter().copied().collect(),
        rmsd: (sq / n as f64).sqrt(),
        reflected,
    })
}
