//! Pipeline configuration shared by the command line and the examples.
//!
//! A config file is JSON mirroring [`PipelineConfig`]; any field left out
//! keeps its default, and command-line flags override both.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::ScreeningThresholds;
use crate::error::{invalid, Error, Result};
use crate::synth::{TextureSpec, TextureType};

/// Savitzky-Golay setting for one texture family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveSetting {
    pub degree: usize,
    /// `None` searches every admissible window.
    pub window: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct WindowPolicy {
    pub stipple: CurveSetting,
    pub triangle: CurveSetting,
    pub hatch: CurveSetting,
}

impl Default for WindowPolicy {
    fn default() -> Self {
        Self {
            stipple: CurveSetting { degree: 3, window: Some(7) },
            // windows 3 and 5 tie; 5 gives the smoother curve
            triangle: CurveSetting { degree: 3, window: Some(5) },
            hatch: CurveSetting { degree: 2, window: Some(5) },
        }
    }
}

impl WindowPolicy {
    pub fn for_texture(&self, t: TextureType) -> CurveSetting {
        match t {
            TextureType::Stipple => self.stipple,
            TextureType::Triangle => self.triangle,
            TextureType::HatchH | TextureType::HatchV | TextureType::Crosshatch => self.hatch,
        }
    }
}

/// Allowed |measured - target| per texture family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub stipple: f64,
    pub hatch: f64,
    pub triangle: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { stipple: 0.01, hatch: 0.01, triangle: 0.02 }
    }
}

impl Tolerances {
    pub fn for_texture(&self, t: TextureType) -> f64 {
        match t {
            TextureType::Stipple => self.stipple,
            TextureType::Triangle => self.triangle,
            TextureType::HatchH | TextureType::HatchV | TextureType::Crosshatch => self.hatch,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    /// Texture parameters; `texture.seed` seeds generation.
    pub texture: TextureSpec,
    /// Density step of single-orientation series.
    pub series_step: f64,
    /// Density step per axis of the crosshatch grid.
    pub grid_step: f64,
    /// Seeds the presentation order of study sessions.
    pub study_seed: u64,
    pub mds_dim: usize,
    pub scree_max_dim: usize,
    pub windows: WindowPolicy,
    pub levels: usize,
    pub output_dir: PathBuf,
    pub tolerances: Tolerances,
    pub screening: ScreeningThresholdsConfig,
}

/// Serializable mirror of [`ScreeningThresholds`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScreeningThresholdsConfig {
    pub max_self_pair: f64,
    pub min_correlation: f64,
}

impl Default for ScreeningThresholdsConfig {
    fn default() -> Self {
        let t = ScreeningThresholds::default();
        Self { max_self_pair: t.max_self_pair, min_correlation: t.min_correlation }
    }
}

impl From<ScreeningThresholdsConfig> for ScreeningThresholds {
    fn from(c: ScreeningThresholdsConfig) -> Self {
        Self { max_self_pair: c.max_self_pair, min_correlation: c.min_correlation }
    }
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            texture: TextureSpec::default(),
            series_step: 0.05,
            grid_step: 0.2,
            study_seed: 0,
            mds_dim: 2,
            scree_max_dim: 4,
            windows: WindowPolicy::default(),
            levels: 5,
            output_dir: PathBuf::from("out"),
            tolerances: Tolerances::default(),
            screening: ScreeningThresholdsConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| invalid(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_owned(), source })?;
        Self::from_json(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        self.texture.validate()?;
        for (name, step) in [("series_step", self.series_step), ("grid_step", self.grid_step)] {
            if !(step > 0.0 && step <= 1.0) {
                return Err(invalid(format!("{name} must lie in (0, 1], got {step}")));
            }
        }
        if self.mds_dim == 0 || self.scree_max_dim == 0 {
            return Err(invalid("embedding dimensions must be at least 1"));
        }
        if self.levels == 0 {
            return Err(invalid("levels must be at least 1"));
        }
        for s in [self.windows.stipple, self.windows.triangle, self.windows.hatch] {
            if let Some(w) = s.window {
                if w % 2 == 0 || w <= s.degree {
                    return Err(invalid(format!("window {w} must be odd and exceed degree {}", s.degree)));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = PipelineConfig::default();
        assert_eq!((c.texture.width, c.texture.height), (512, 512));
        assert_eq!((c.series_step, c.grid_step, c.mds_dim, c.levels), (0.05, 0.2, 2, 5));
        assert_eq!(c.windows.stipple.window, Some(7));
        assert_eq!(c.windows.triangle.window, Some(5));
        assert_eq!(c.windows.hatch, CurveSetting { degree: 2, window: Some(5) });
        c.validate().unwrap();
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let c = PipelineConfig::from_json(r#"{"levels": 7, "texture": {"seed": 9}}"#).unwrap();
        assert_eq!(c.levels, 7);
        assert_eq!(c.texture.seed, 9);
        assert_eq!(c.texture.width, 512);
        assert_eq!(c.series_step, 0.05);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(PipelineConfig::from_json(r#"{"levels": 0}"#).is_err());
        assert!(PipelineConfig::from_json(r#"{"windows": {"hatch": {"degree": 2, "window": 4}}}"#).is_err());
        assert!(PipelineConfig::from_json("{").is_err());
    }

    #[test]
    fn round_trip() {
        let c = PipelineConfig::default();
        let back = PipelineConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }
}
