//! Perceptually uniform reparameterization of a density-level embedding.

mod curve;
mod savgol;
mod sigmoid;

use serde::Serialize;

use crate::error::Result;

pub use curve::{
    density_at, fit_curve, fit_curve_with, uniform_levels, uniform_sample, CurveFit, FitOptions, LabeledEmbedding,
    PerceptualCurve, Projection,
};
pub use savgol::{savgol_coefficients, savgol_smooth, savgol_smooth_with, EdgeMode};
pub use sigmoid::{fit_sigmoid, paper_levels, paper_params, sigmoid_eval, sigmoid_inverse, PaperTexture, SigmoidParams};

/// Samples `count` points uniformly along the curve's arc length and pairs
/// each arc fraction (perceived position) with its density.
pub fn perceived_samples(curve: &PerceptualCurve, count: usize) -> Vec<(f64, f64)> {
    (0..count)
        .map(|i| {
            let x = (i as f64 + 0.5) / count as f64;
            (x, density_at(curve, x * curve.length))
        })
        .collect()
}

/// Curve samples fitted with the sigmoid.
pub const SIGMOID_SAMPLES: usize = 1000;

/// Uniform levels and the sigmoid fitted to one embedding.
#[derive(Clone, Debug, Serialize)]
pub struct LevelsReport {
    pub window: usize,
    pub degree: usize,
    pub sse: f64,
    /// Other windows whose error ties the chosen one.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub ties: Vec<usize>,
    pub levels: Vec<f64>,
    pub sigmoid: SigmoidParams,
}

/// Fits the curve, then takes `n` interior levels either straight from the
/// arc-length reparameterization or from the fitted sigmoid at `k / (n + 1)`.
pub fn levels_from_embedding(
    emb: &LabeledEmbedding,
    degree: usize,
    window: Option<usize>,
    n: usize,
    via_sigmoid: bool,
) -> Result<LevelsReport> {
    let fit = fit_curve(emb, degree, window)?;
    let sigmoid = fit_sigmoid(&perceived_samples(&fit.curve, SIGMOID_SAMPLES))?;
    let levels = if via_sigmoid { sigmoid_levels(&sigmoid, n)? } else { uniform_levels(&fit.curve, n)? };
    Ok(LevelsReport { window: fit.window, degree, sse: fit.sse, ties: fit.ties, levels, sigmoid })
}

/// `sigmoid_eval` at the interior positions `k / (n + 1)`, `k = 1..=n`.
pub fn sigmoid_levels(p: &SigmoidParams, n: usize) -> Result<Vec<f64>> {
    (1..=n).map(|k| sigmoid_eval(p, k as f64 / (n + 1) as f64)).collect()
}
