//! Savitzky-Golay smoothing of 2D point sequences.

use nalgebra::DMatrix;

use crate::error::{invalid, Result};

/// How windows that would reach past either end are handled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EdgeMode {
    /// Reflect about the end sample without repeating it (`x[-k] = x[k]`).
    #[default]
    Mirror,
    /// Fit one polynomial to the first (last) full window and evaluate it at
    /// the edge samples. Reproduces polynomials up to `degree` everywhere.
    Interp,
}

fn check(len: usize, window: usize, degree: usize) -> Result<()> {
    if window.is_multiple_of(2) {
        return Err(invalid(format!("window {window} must be odd")));
    }
    if degree >= window {
        return Err(invalid(format!("degree {degree} must be below window {window}")));
    }
    if window > len {
        return Err(invalid(format!("window {window} exceeds the {len} samples")));
    }
    Ok(())
}

/// Least-squares projector: row `p` maps window samples (at integer offsets
/// `-half..=half`) to the coefficient of `offset^p`.
fn projector(window: usize, degree: usize) -> DMatrix<f64> {
    let half = (window / 2) as f64;
    let a = DMatrix::from_fn(window, degree + 1, |j, p| (j as f64 - half).powi(p as i32));
    a.pseudo_inverse(1e-13).expect("Vandermonde pseudo-inverse")
}

/// Convolution weights that evaluate the local fit at `offset` from the
/// window center (`offset = 0` gives the classic smoothing coefficients).
pub fn savgol_coefficients(window: usize, degree: usize, offset: f64) -> Result<Vec<f64>> {
    check(window, window, degree)?;
    let proj = projector(window, degree);
    Ok((0..window).map(|j| (0..=degree).map(|p| offset.powi(p as i32) * proj[(p, j)]).sum()).collect())
}

/// A local polynomial per channel, expanded about sample index `center`.
#[derive(Clone, Debug)]
pub(crate) struct LocalPoly {
    pub center: f64,
    pub coef: [Vec<f64>; 2],
}

impl LocalPoly {
    pub fn eval(&self, u: f64) -> [f64; 2] {
        let o = u - self.center;
        let ev = |c: &[f64]| c.iter().rev().fold(0.0, |acc, v| acc * o + v);
        [ev(&self.coef[0]), ev(&self.coef[1])]
    }
}

/// The local least-squares polynomial governing each sample.
pub(crate) fn local_polys(points: &[[f64; 2]], window: usize, degree: usize, edge: EdgeMode) -> Result<Vec<LocalPoly>> {
    let n = points.len();
    check(n, window, degree)?;
    let proj = projector(window, degree);
    let half = window / 2;
    let fit = |samples: &dyn Fn(usize) -> [f64; 2], center: f64| {
        let mut coef = [vec![0.0; degree + 1], vec![0.0; degree + 1]];
        for p in 0..=degree {
            for j in 0..window {
                let s = samples(j);
                coef[0][p] += proj[(p, j)] * s[0];
                coef[1][p] += proj[(p, j)] * s[1];
            }
        }
        LocalPoly { center, coef }
    };
    let mirror = |i: isize| -> usize {
        let last = n as isize - 1;
        let r = if i < 0 { -i } else if i > last { 2 * last - i } else { i };
        r as usize
    };

    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let poly = match edge {
            EdgeMode::Interp if i < half => fit(&|j| points[j], half as f64),
            EdgeMode::Interp if i + half >= n => fit(&|j| points[n - window + j], (n - 1 - half) as f64),
            _ => fit(&|j| points[mirror(i as isize + j as isize - half as isize)], i as f64),
        };
        out.push(poly);
    }
    Ok(out)
}

/// Smooths each coordinate channel with the Savitzky-Golay filter.
pub fn savgol_smooth(points: &[[f64; 2]], window: usize, degree: usize) -> Result<Vec<[f64; 2]>> {
    savgol_smooth_with(points, window, degree, EdgeMode::Mirror)
}

pub fn savgol_smooth_with(points: &[[f64; 2]], window: usize, degree: usize, edge: EdgeMode) -> Result<Vec<[f64; 2]>> {
    let polys = local_polys(points, window, degree, edge)?;
    Ok(polys.iter().enumerate().map(|(i, p)| p.eval(i as f64)).collect())
}
