//! The two-parameter sigmoid mapping perceived position to density:
//! `f(x) = 1 / (1 + (1/a - 1) (1/x - 1)^b)`, with `f(0.5) = a`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Inputs are clamped to `[EPS, 1 - EPS]` away from the exact endpoints.
pub const EPS: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmoidParams {
    pub a: f64,
    pub b: f64,
    pub rmse: f64,
}

impl SigmoidParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        let p = Self { a, b, rmse: 0.0 };
        p.validate()?;
        Ok(p)
    }

    pub fn identity() -> Self {
        Self { a: 0.5, b: 1.0, rmse: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a < 1.0) {
            return Err(invalid(format!("sigmoid a = {} must lie in (0, 1)", self.a)));
        }
        if !(self.b > 0.0 && self.b.is_finite()) {
            return Err(invalid(format!("sigmoid b = {} must be positive", self.b)));
        }
        Ok(())
    }

    #[inline]
    fn eval_unchecked(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        let x = x.clamp(EPS, 1.0 - EPS);
        1.0 / (1.0 + (1.0 / self.a - 1.0) * (1.0 / x - 1.0).powf(self.b))
    }

    #[inline]
    fn inverse_unchecked(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        if y >= 1.0 {
            return 1.0;
        }
        let y = y.clamp(EPS, 1.0 - EPS);
        1.0 / (1.0 + (self.a * (y - 1.0) / (y * (self.a - 1.0))).powf(1.0 / self.b))
    }
}

/// Density for a perceived position in `[0, 1]`.
pub fn sigmoid_eval(p: &SigmoidParams, x: f64) -> Result<f64> {
    p.validate()?;
    Ok(p.eval_unchecked(x))
}

/// Perceived position for a density in `[0, 1]`.
pub fn sigmoid_inverse(p: &SigmoidParams, y: f64) -> Result<f64> {
    p.validate()?;
    Ok(p.inverse_unchecked(y))
}

/// Least-squares sigmoid through `(x, y)` samples. Samples on or outside
/// the endpoints are dropped. The fit starts from the linear regression
/// `ln(1/y - 1) = ln(1/a - 1) + b ln(1/x - 1)` and is then refined with
/// Levenberg-Marquardt on the raw residuals.
pub fn fit_sigmoid(samples: &[(f64, f64)]) -> Result<SigmoidParams> {
    let pts: Vec<(f64, f64)> =
        samples.iter().copied().filter(|&(x, y)| x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0).collect();
    if pts.len() < 3 {
        return Err(invalid(format!("need at least 3 interior samples, got {}", pts.len())));
    }

    // alpha = ln(1/a - 1), so f = 1 / (1 + e^alpha u^b) with u = 1/x - 1
    let lin: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| ((1.0 / x - 1.0).ln(), (1.0 / y - 1.0).ln())).collect();
    let n = lin.len() as f64;
    let (mx, my) = (lin.iter().map(|p| p.0).sum::<f64>() / n, lin.iter().map(|p| p.1).sum::<f64>() / n);
    let sxx: f64 = lin.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = lin.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let mut b = if sxx > 0.0 { sxy / sxx } else { 1.0 };
    if !(b > 0.0) {
        b = 1.0;
    }
    let mut alpha = my - b * mx;

    let sse = |alpha: f64, b: f64| -> f64 {
        pts.iter()
            .map(|&(x, y)| {
                let u = 1.0 / x - 1.0;
                (1.0 / (1.0 + alpha.exp() * u.powf(b)) - y).powi(2)
            })
            .sum()
    };
    let mut cost = sse(alpha, b);
    let mut damping = 1e-3;
    for _ in 0..200 {
        let (mut jtj, mut jtr) = ([[0.0f64; 2]; 2], [0.0f64; 2]);
        for &(x, y) in &pts {
            let u = 1.0 / x - 1.0;
            let g = alpha.exp() * u.powf(b);
            let f = 1.0 / (1.0 + g);
            let r = f - y;
            let common = -g / ((1.0 + g) * (1.0 + g));
            let j = [common, common * u.ln()];
            for a in 0..2 {
                jtr[a] += j[a] * r;
                for c in 0..2 {
                    jtj[a][c] += j[a] * j[c];
                }
            }
        }
        let mut improved = false;
        while damping < 1e12 {
            let m = [[jtj[0][0] * (1.0 + damping), jtj[0][1]], [jtj[1][0], jtj[1][1] * (1.0 + damping)]];
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            if det.abs() < 1e-300 {
                damping *= 10.0;
                continue;
            }
            let da = -(m[1][1] * jtr[0] - m[0][1] * jtr[1]) / det;
            let db = -(m[0][0] * jtr[1] - m[1][0] * jtr[0]) / det;
            let (na, nb) = (alpha + da, b + db);
            let nc = if nb > 0.0 { sse(na, nb) } else { f64::INFINITY };
            if nc <= cost {
                let done = (cost - nc) <= 1e-15 * cost.max(1e-300) || (da.abs() + db.abs()) < 1e-14;
                alpha = na;
                b = nb;
                cost = nc;
                damping = (damping / 10.0).max(1e-12);
                improved = !done;
                break;
            }
            damping *= 10.0;
        }
        if !improved {
            break;
        }
    }

    let a = 1.0 / (1.0 + alpha.exp());
    let p = SigmoidParams { a, b, rmse: (cost / n).sqrt() };
    p.validate()?;
    Ok(p)
}

/// Texture families with published sigmoid constants and level tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PaperTexture {
    Stipple,
    Hatch,
    Triangle,
}

impl std::str::FromStr for PaperTexture {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "stipple" | "stippling" => Ok(Self::Stipple),
            "hatch" | "hatching" | "hatch_h" | "hatch_v" => Ok(Self::Hatch),
            "triangle" | "triangles" => Ok(Self::Triangle),
            other => Err(invalid(format!("no published constants for texture type {other:?}"))),
        }
    }
}

/// Best-fit sigmoid constants from the rating studies.
pub fn paper_params(texture: &str) -> Result<SigmoidParams> {
    Ok(match texture.parse::<PaperTexture>()? {
        PaperTexture::Stipple => SigmoidParams { a: 0.5644, b: 1.7361, rmse: 0.0233 },
        PaperTexture::Hatch => SigmoidParams { a: 0.4753, b: 1.5918, rmse: 0.0225 },
        PaperTexture::Triangle => SigmoidParams { a: 0.5859, b: 1.8120, rmse: 0.0089 },
    })
}

/// The five published perceptually uniform density levels.
pub fn paper_levels(texture: &str) -> Result<[f64; 5]> {
    Ok(match texture.parse::<PaperTexture>()? {
        PaperTexture::Stipple => [0.083, 0.298, 0.523, 0.852, 0.966],
        PaperTexture::Hatch => [0.096, 0.191, 0.477, 0.768, 0.894],
        PaperTexture::Triangle => [0.061, 0.290, 0.576, 0.836, 0.950],
    })
}
