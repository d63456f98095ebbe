//! Smoothed perceptual curves, arc-length sampling and density lookup.

use serde::{Deserialize, Serialize};

use super::savgol::{local_polys, EdgeMode};
use crate::error::{invalid, Error, Result};

/// Ordered MDS coordinates of density levels and the densities themselves.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledEmbedding {
    pub points: Vec<[f64; 2]>,
    pub densities: Vec<f64>,
}

impl LabeledEmbedding {
    pub fn new(points: Vec<[f64; 2]>, densities: Vec<f64>) -> Result<Self> {
        if points.len() != densities.len() {
            return Err(invalid(format!("{} points but {} densities", points.len(), densities.len())));
        }
        if points.len() < 3 {
            return Err(invalid("a perceptual curve needs at least 3 points"));
        }
        if densities.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("densities must be strictly increasing"));
        }
        Ok(Self { points, densities })
    }
}

/// Where an input point lands on the curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    /// Arc-length parameter of the nearest curve point.
    pub t: f64,
    pub density: f64,
    pub point: [f64; 2],
    pub dist2: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PerceptualCurve {
    pub polyline: Vec<[f64; 2]>,
    /// Cumulative arc length at each polyline vertex, starting at 0.
    pub arclen: Vec<f64>,
    pub length: f64,
    pub projections: Vec<Projection>,
}

#[derive(Clone, Copy, Debug)]
pub struct FitOptions {
    /// Minimum number of polyline segments.
    pub segments: usize,
    pub edge: EdgeMode,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { segments: 4096, edge: EdgeMode::Interp }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveFit {
    pub curve: PerceptualCurve,
    pub window: usize,
    pub degree: usize,
    /// Sum of squared distances from the points to their projections.
    pub sse: f64,
    /// `(window, sse)` for every window evaluated; `None` marks a window whose
    /// projections were out of order.
    pub window_errors: Vec<(usize, Option<f64>)>,
    /// Windows whose error ties the chosen one.
    pub ties: Vec<usize>,
}

fn lerp(a: [f64; 2], b: [f64; 2], s: f64) -> [f64; 2] {
    [a[0] + (b[0] - a[0]) * s, a[1] + (b[1] - a[1]) * s]
}

fn d2(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

/// Dense polyline through the smoothed curve. Between samples `i` and `i+1`
/// the curve blends the two local fits linearly, so it passes through every
/// smoothed sample and is exactly polynomial wherever the data are.
fn densify(points: &[[f64; 2]], window: usize, degree: usize, opts: FitOptions) -> Result<Vec<[f64; 2]>> {
    let polys = local_polys(points, window, degree, opts.edge)?;
    let n = points.len();
    let sub = opts.segments.div_ceil(n - 1).max(1);
    let mut line: Vec<[f64; 2]> = Vec::with_capacity((n - 1) * sub + 1);
    for i in 0..n - 1 {
        for k in 0..sub {
            let s = k as f64 / sub as f64;
            let u = i as f64 + s;
            let p = lerp(polys[i].eval(u), polys[i + 1].eval(u), s);
            if line.last().is_none_or(|&q| d2(p, q) > 0.0) {
                line.push(p);
            }
        }
    }
    let end = polys[n - 1].eval((n - 1) as f64);
    if line.last().is_none_or(|&q| d2(end, q) > 0.0) {
        line.push(end);
    }
    Ok(line)
}

fn arclen_table(line: &[[f64; 2]]) -> Vec<f64> {
    let mut acc = Vec::with_capacity(line.len());
    let mut s = 0.0;
    acc.push(0.0);
    for w in line.windows(2) {
        s += d2(w[0], w[1]).sqrt();
        acc.push(s);
    }
    acc
}

fn project(line: &[[f64; 2]], arclen: &[f64], q: [f64; 2]) -> (f64, [f64; 2], f64) {
    if line.len() == 1 {
        return (0.0, line[0], d2(line[0], q));
    }
    let mut best = (0.0, line[0], f64::INFINITY);
    for (k, w) in line.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        let ab = [b[0] - a[0], b[1] - a[1]];
        let len2 = ab[0] * ab[0] + ab[1] * ab[1];
        let s = (((q[0] - a[0]) * ab[0] + (q[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0);
        let p = lerp(a, b, s);
        let dist = d2(p, q);
        if dist < best.2 {
            best = (arclen[k] + s * (arclen[k + 1] - arclen[k]), p, dist);
        }
    }
    best
}

fn build(emb: &LabeledEmbedding, window: usize, degree: usize, opts: FitOptions) -> Result<(PerceptualCurve, f64)> {
    let polyline = densify(&emb.points, window, degree, opts)?;
    let arclen = arclen_table(&polyline);
    let length = *arclen.last().unwrap();
    let projections: Vec<Projection> = emb
        .points
        .iter()
        .zip(&emb.densities)
        .map(|(&q, &density)| {
            let (t, point, dist2) = project(&polyline, &arclen, q);
            Projection { t, density, point, dist2 }
        })
        .collect();
    let sse = projections.iter().map(|p| p.dist2).sum();
    Ok((PerceptualCurve { polyline, arclen, length, projections }, sse))
}

fn out_of_order(curve: &PerceptualCurve) -> Vec<usize> {
    curve.projections.windows(2).enumerate().filter(|(_, w)| w[1].t < w[0].t).map(|(i, _)| i + 1).collect()
}

/// Fits a Savitzky-Golay curve to the embedding. Without a `window`, every
/// odd window in `(degree, n]` is tried and the smallest error wins (ties go
/// to the smaller window).
pub fn fit_curve(emb: &LabeledEmbedding, degree: usize, window: Option<usize>) -> Result<CurveFit> {
    fit_curve_with(emb, degree, window, FitOptions::default())
}

pub fn fit_curve_with(emb: &LabeledEmbedding, degree: usize, window: Option<usize>, opts: FitOptions) -> Result<CurveFit> {
    let n = emb.points.len();
    let candidates: Vec<usize> = match window {
        Some(w) => vec![w],
        None => (degree + 1..=n).filter(|w| w % 2 == 1).collect(),
    };
    if candidates.is_empty() {
        return Err(invalid(format!("no odd window in ({degree}, {n}]")));
    }

    let mut window_errors = Vec::new();
    let mut best: Option<(usize, PerceptualCurve, f64)> = None;
    let mut last_failure = None;
    for &w in &candidates {
        let (curve, sse) = build(emb, w, degree, opts)?;
        let bad = out_of_order(&curve);
        if !bad.is_empty() {
            window_errors.push((w, None));
            last_failure = Some(Error::FitFailure(format!(
                "window {w}: projections out of order at input indices {bad:?}"
            )));
            continue;
        }
        window_errors.push((w, Some(sse)));
        if best.as_ref().is_none_or(|b| sse < b.2 && !same_error(sse, b.2)) {
            best = Some((w, curve, sse));
        }
    }
    let Some((window, curve, sse)) = best else {
        return Err(last_failure.unwrap_or_else(|| Error::FitFailure("no window produced a curve".into())));
    };
    let ties = window_errors
        .iter()
        .filter_map(|&(w, e)| e.filter(|&e| w != window && same_error(e, sse)).map(|_| w))
        .collect();
    Ok(CurveFit { curve, window, degree, sse, window_errors, ties })
}

fn same_error(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 + 1e-9 * a.abs().max(b.abs())
}

impl PerceptualCurve {
    /// Curve point at arc length `t` (clamped to `[0, length]`).
    pub fn point_at(&self, t: f64) -> [f64; 2] {
        let t = t.clamp(0.0, self.length);
        let k = self.arclen.partition_point(|&s| s <= t).clamp(1, self.arclen.len().max(2) - 1);
        if self.polyline.len() == 1 {
            return self.polyline[0];
        }
        let (s0, s1) = (self.arclen[k - 1], self.arclen[k]);
        let s = if s1 > s0 { (t - s0) / (s1 - s0) } else { 0.0 };
        lerp(self.polyline[k - 1], self.polyline[k], s)
    }
}

/// `n + 1` curve points at equal arc spacing `L / n`.
pub fn uniform_sample(curve: &PerceptualCurve, n: usize) -> Result<Vec<(f64, [f64; 2])>> {
    if n == 0 {
        return Err(invalid("uniform sampling needs n >= 1"));
    }
    Ok((0..=n)
        .map(|i| {
            let t = if i == n { curve.length } else { curve.length * i as f64 / n as f64 };
            (t, curve.point_at(t))
        })
        .collect())
}

/// Density at arc length `t`, interpolated between the neighbouring projected
/// input points as `lambda * d(t_l) + (1 - lambda) * d(t_r)` with
/// `lambda = (t_r - t) / (t_r - t_l)`. Clamps outside the projected range.
pub fn density_at(curve: &PerceptualCurve, t: f64) -> f64 {
    let p = &curve.projections;
    let first = p.first().expect("curve has projections");
    let last = p.last().expect("curve has projections");
    if t <= first.t {
        return first.density;
    }
    if t >= last.t {
        return last.density;
    }
    let r = p.partition_point(|q| q.t < t).max(1);
    let (l, r) = (&p[r - 1], &p[r]);
    if r.t <= l.t {
        return l.density;
    }
    let lambda = (r.t - t) / (r.t - l.t);
    lambda * l.density + (1.0 - lambda) * r.density
}

/// `n_interior` densities at equal perceptual spacing, excluding the two
/// curve endpoints.
pub fn uniform_levels(curve: &PerceptualCurve, n_interior: usize) -> Result<Vec<f64>> {
    if n_interior == 0 {
        return Err(invalid("need at least one interior level"));
    }
    let samples = uniform_sample(curve, n_interior + 1)?;
    let levels: Vec<f64> = samples[1..=n_interior].iter().map(|&(t, _)| density_at(curve, t)).collect();
    if levels.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::FitFailure(format!("levels are not strictly increasing: {levels:?}")));
    }
    Ok(levels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn straight(n: usize) -> LabeledEmbedding {
        LabeledEmbedding::new(
            (0..n).map(|i| [i as f64, 0.5 * i as f64]).collect(),
            (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
        )
        .unwrap()
    }

    #[test]
    fn labeled_embedding_checks() {
        assert!(LabeledEmbedding::new(vec![[0.0, 0.0]; 2], vec![0.0, 1.0]).is_err());
        assert!(LabeledEmbedding::new(vec![[0.0, 0.0]; 3], vec![0.0, 0.5, 0.5]).is_err());
    }

    #[test]
    fn straight_line_fits_itself() {
        let emb = straight(9);
        for w in [3, 5, 7, 9] {
            let fit = fit_curve(&emb, 2, Some(w)).unwrap();
            assert!(fit.sse < 1e-12);
        }
        let fit = fit_curve(&emb, 2, None).unwrap();
        assert_eq!(fit.window, 3, "all windows tie; the smallest wins");
        assert_eq!(fit.ties, vec![5, 7, 9]);
    }

    #[test]
    fn printed_lambda_formula() {
        let curve = PerceptualCurve {
            polyline: vec![[0.0, 0.0], [1.0, 0.0]],
            arclen: vec![0.0, 1.0],
            length: 1.0,
            projections: vec![
                Projection { t: 0.2, density: 0.1, point: [0.2, 0.0], dist2: 0.0 },
                Projection { t: 0.6, density: 0.5, point: [0.6, 0.0], dist2: 0.0 },
            ],
        };
        assert!((density_at(&curve, 0.3) - 0.2).abs() < 1e-12);
        assert_eq!(density_at(&curve, 0.2), 0.1);
        assert_eq!(density_at(&curve, 0.0), 0.1);
        assert_eq!(density_at(&curve, 0.9), 0.5);
    }

    #[test]
    fn straight_sampling_and_levels() {
        let curve = PerceptualCurve {
            polyline: vec![[0.0, 0.0], [10.0, 0.0]],
            arclen: vec![0.0, 10.0],
            length: 10.0,
            projections: vec![
                Projection { t: 0.0, density: 0.0, point: [0.0, 0.0], dist2: 0.0 },
                Projection { t: 10.0, density: 1.0, point: [10.0, 0.0], dist2: 0.0 },
            ],
        };
        let ts: Vec<f64> = uniform_sample(&curve, 5).unwrap().iter().map(|s| s.0).collect();
        assert_eq!(ts, vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0]);
        assert_eq!(uniform_sample(&curve, 1).unwrap().len(), 2);
        let levels = uniform_levels(&curve, 4).unwrap();
        for (l, e) in levels.iter().zip([0.2, 0.4, 0.6, 0.8]) {
            assert!((l - e).abs() < 1e-12);
        }
        assert!((uniform_levels(&curve, 1).unwrap()[0] - 0.5).abs() < 1e-12);
        assert!(uniform_sample(&curve, 0).is_err());
    }

    #[test]
    fn folded_points_fail() {
        let emb = LabeledEmbedding::new(
            vec![[0.0, 0.0], [2.0, 0.0], [1.0, 0.0], [3.0, 0.0]],
            vec![0.0, 0.3, 0.6, 1.0],
        )
        .unwrap();
        assert!(matches!(fit_curve(&emb, 1, Some(3)), Err(Error::FitFailure(_))));
    }
}
