//! Texture generators that hit a target ink density.
//!
//! Every generator is deterministic in its [`TextureSpec`]: the same spec,
//! seed and target produce a bit-identical raster and primitive list.

mod continuous;
mod hatch;
mod lbg;
mod points;

pub use continuous::{continuous_map, BlockReport, ContinuousMap, PerceptualMapping};
pub use hatch::{gen_hatch, hatch_goodness, HatchLine, Orientation};
pub use lbg::{lbg_stipple, LbgOptions};
pub use points::{gen_stipple, gen_triangle_texture, triangle_floor};

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::StimulusKey;
use crate::error::{invalid, Error, Result};
use crate::geometry::Point;
use crate::raster::{write_image, Primitive, Raster};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TextureType {
    Stipple,
    Triangle,
    HatchH,
    HatchV,
    Crosshatch,
}

impl TextureType {
    pub fn as_str(self) -> &'static str {
        match self {
            TextureType::Stipple => "stipple",
            TextureType::Triangle => "triangle",
            TextureType::HatchH => "hatch_h",
            TextureType::HatchV => "hatch_v",
            TextureType::Crosshatch => "crosshatch",
        }
    }

    /// Prefix used in stimulus keys (`hatch:0.2x0.4`, `stipple:07`).
    pub fn key_prefix(self) -> &'static str {
        match self {
            TextureType::HatchH | TextureType::HatchV | TextureType::Crosshatch => "hatch",
            other => other.as_str(),
        }
    }
}

impl std::fmt::Display for TextureType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for TextureType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "stipple" | "stippling" => Ok(Self::Stipple),
            "triangle" | "triangles" => Ok(Self::Triangle),
            "hatch" | "hatch_h" | "horizontal" => Ok(Self::HatchH),
            "hatch_v" | "vertical" => Ok(Self::HatchV),
            "crosshatch" => Ok(Self::Crosshatch),
            other => Err(invalid(format!(
                "unknown texture type {other:?} (expected stipple, triangle, hatch_h, hatch_v or crosshatch)"
            ))),
        }
    }
}

/// Generation parameters. Serialized field names double as config keys.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TextureSpec {
    pub texture_type: TextureType,
    pub width: usize,
    pub height: usize,
    pub stipple_diameter: f64,
    pub stroke_width: f64,
    /// Hatch line length as a fraction of the image extent along the line.
    pub hatch_length_range: [f64; 2],
    pub candidates_per_line: usize,
    pub seed: u64,
    pub lloyd_max_iters: usize,
    pub lloyd_move_tol: f64,
    /// Lloyd steps run after each batch of inserted points.
    pub relax_iters_per_batch: usize,
    pub lbg: LbgOptions,
    /// Side of the square blocks on which spatially varying targets are met.
    pub block_size: usize,
}

impl Default for TextureSpec {
    fn default() -> Self {
        Self {
            texture_type: TextureType::Stipple,
            width: 512,
            height: 512,
            stipple_diameter: 8.0,
            stroke_width: 3.0,
            hatch_length_range: [0.3, 1.0],
            candidates_per_line: 64,
            seed: 0,
            lloyd_max_iters: 64,
            lloyd_move_tol: 0.25,
            relax_iters_per_batch: 12,
            lbg: LbgOptions::default(),
            block_size: 32,
        }
    }
}

impl TextureSpec {
    pub fn new(texture_type: TextureType, seed: u64) -> Self {
        Self { texture_type, seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(invalid(format!("texture size must be positive, got {}x{}", self.width, self.height)));
        }
        if !(self.stipple_diameter > 0.0 && self.stipple_diameter.is_finite()) {
            return Err(invalid(format!("stipple diameter must be positive, got {}", self.stipple_diameter)));
        }
        if !(self.stroke_width > 0.0 && self.stroke_width.is_finite()) {
            return Err(invalid(format!("stroke width must be positive, got {}", self.stroke_width)));
        }
        let [lo, hi] = self.hatch_length_range;
        if !(lo > 0.0 && lo <= hi && hi <= 1.0) {
            return Err(invalid(format!("hatch length range [{lo}, {hi}] must satisfy 0 < min <= max <= 1")));
        }
        if self.candidates_per_line == 0 {
            return Err(invalid("candidates_per_line must be at least 1"));
        }
        if self.lloyd_max_iters == 0 || self.relax_iters_per_batch == 0 {
            return Err(invalid("Lloyd iteration counts must be at least 1"));
        }
        if !(self.lloyd_move_tol >= 0.0) {
            return Err(invalid(format!("lloyd_move_tol must be non-negative, got {}", self.lloyd_move_tol)));
        }
        if self.block_size == 0 {
            return Err(invalid("block_size must be at least 1"));
        }
        self.lbg.validate()
    }

    fn blank(&self) -> Result<Raster> {
        Raster::new(self.width, self.height)
    }
}

pub(crate) fn check_target(target: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&target) {
        return Err(invalid(format!("target density {target} outside [0, 1]")));
    }
    Ok(())
}

/// Component targets and measurements of a crosshatched texture.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrosshatchParts {
    pub d_h: f64,
    pub d_v: f64,
    pub measured_h: f64,
    pub measured_v: f64,
}

/// One generated texture.
#[derive(Clone, Debug)]
pub struct TextureInstance {
    pub spec: TextureSpec,
    pub primitives: Vec<Primitive>,
    pub raster: Raster,
    pub measured_density: f64,
    pub target_density: f64,
    pub crosshatch: Option<CrosshatchParts>,
    /// Non-fatal problems, e.g. a target below what the texture can reach.
    pub warnings: Vec<String>,
}

impl TextureInstance {
    pub(crate) fn new(spec: &TextureSpec, target: f64, primitives: Vec<Primitive>, raster: Raster) -> Self {
        Self {
            spec: spec.clone(),
            primitives,
            measured_density: raster.density(),
            raster,
            target_density: target,
            crosshatch: None,
            warnings: Vec::new(),
        }
    }

    pub fn has_warnings(&self) -> bool {
        !self.warnings.is_empty()
    }

    /// `{type}_{density:.3}_{seed}`, or `crosshatch_{dh:.3}x{dv:.3}_{seed}`.
    pub fn file_stem(&self) -> String {
        match self.crosshatch {
            Some(c) => format!("crosshatch_{:.3}x{:.3}_{}", c.d_h, c.d_v, self.spec.seed),
            None => format!("{}_{:.3}_{}", self.spec.texture_type, self.target_density, self.spec.seed),
        }
    }

    pub fn sidecar(&self, key: Option<&StimulusKey>, image: Option<&str>) -> Sidecar {
        Sidecar {
            texture_type: self.spec.texture_type,
            target_density: self.target_density,
            measured_density: self.measured_density,
            seed: self.spec.seed,
            primitive_count: self.primitives.len(),
            spec: self.spec.clone(),
            crosshatch: self.crosshatch,
            warnings: self.warnings.clone(),
            key: key.map(|k| k.0.clone()),
            image: image.map(str::to_owned),
        }
    }

    /// Writes `{stem}.png` and `{stem}.json` into `dir` and returns the image path.
    pub fn write_to(&self, dir: impl AsRef<Path>, key: Option<&StimulusKey>) -> Result<std::path::PathBuf> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.to_owned(), source: e })?;
        let stem = self.file_stem();
        let image = dir.join(format!("{stem}.png"));
        write_image(&self.raster, &image)?;
        let json = dir.join(format!("{stem}.json"));
        let body = serde_json::to_string_pretty(&self.sidecar(key, Some(&format!("{stem}.png"))))
            .expect("sidecar serializes");
        std::fs::write(&json, body).map_err(|e| Error::Io { path: json.clone(), source: e })?;
        Ok(image)
    }
}

/// The JSON written next to every generated image.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub texture_type: TextureType,
    pub target_density: f64,
    pub measured_density: f64,
    pub seed: u64,
    pub primitive_count: usize,
    pub spec: TextureSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crosshatch: Option<CrosshatchParts>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image: Option<String>,
}

/// Pixel count of one disc of the given diameter centred on a pixel corner.
pub fn disc_pixel_area(diameter: f64) -> usize {
    let side = diameter.ceil() as usize + 4;
    let c = (side / 2) as f64;
    let mut r = Raster::new(side, side).expect("positive side");
    r.draw(&Primitive::disc(Point::new(c, c), diameter))
}

/// Generates one texture of `spec.texture_type`. Crosshatch uses `target`
/// for both orientations.
pub fn generate(target: f64, spec: &TextureSpec) -> Result<TextureInstance> {
    match spec.texture_type {
        TextureType::Stipple => gen_stipple(target, spec),
        TextureType::Triangle => gen_triangle_texture(target, spec),
        TextureType::HatchH => gen_hatch(target, Orientation::Horizontal, spec),
        TextureType::HatchV => gen_hatch(target, Orientation::Vertical, spec),
        TextureType::Crosshatch => gen_crosshatch(target, target, spec),
    }
}

/// Seed of the vertical layer of a crosshatch; the horizontal layer uses
/// the spec seed so `d_v = 0` reproduces plain horizontal hatching.
fn vertical_seed(seed: u64) -> u64 {
    seed ^ 0x9e37_79b9_7f4a_7c15
}

/// Overlays independent horizontal (`d_h`) and vertical (`d_v`) hatching.
pub fn gen_crosshatch(d_h: f64, d_v: f64, spec: &TextureSpec) -> Result<TextureInstance> {
    check_target(d_h)?;
    check_target(d_v)?;
    let h = gen_hatch(d_h, Orientation::Horizontal, spec)?;
    let v_spec = TextureSpec { seed: vertical_seed(spec.seed), ..spec.clone() };
    let v = gen_hatch(d_v, Orientation::Vertical, &v_spec)?;
    Ok(combine_crosshatch(spec, &h, &v))
}

fn combine_crosshatch(spec: &TextureSpec, h: &TextureInstance, v: &TextureInstance) -> TextureInstance {
    let mut raster = h.raster.clone();
    raster.union_with(&v.raster).expect("layers share the spec size");
    let primitives = h.primitives.iter().chain(&v.primitives).copied().collect();
    let spec = TextureSpec { texture_type: TextureType::Crosshatch, ..spec.clone() };
    let mut out = TextureInstance::new(&spec, raster.density(), primitives, raster);
    out.target_density = h.target_density.max(v.target_density);
    out.crosshatch = Some(CrosshatchParts {
        d_h: h.target_density,
        d_v: v.target_density,
        measured_h: h.measured_density,
        measured_v: v.measured_density,
    });
    out.warnings = h.warnings.iter().chain(&v.warnings).cloned().collect();
    out
}

/// Target levels `0, step, 2 step, ...` up to 1.
pub fn series_levels(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(invalid(format!("step {step} must lie in (0, 1]")));
    }
    let n = (1.0 / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| ((k as f64 * step) * 1e9).round() / 1e9).map(|v| v.min(1.0)).collect())
}

/// A stimulus and the key under which it is rated.
#[derive(Clone, Debug)]
pub struct Stimulus {
    pub key: StimulusKey,
    pub texture: TextureInstance,
}

/// The stimulus set of one study: a density series for stipple, triangle and
/// single-orientation hatching, or the deduplicated `(d_h, d_v)` grid for
/// crosshatching (all pairs with a saturated layer collapse to `1.0x1.0`).
pub fn gen_stimulus_set(spec: &TextureSpec, step: f64) -> Result<Vec<Stimulus>> {
    spec.validate()?;
    let levels = series_levels(step)?;
    if spec.texture_type != TextureType::Crosshatch {
        let prefix = spec.texture_type.key_prefix();
        return levels
            .par_iter()
            .enumerate()
            .map(|(i, &d)| Ok(Stimulus { key: StimulusKey::index(prefix, i), texture: generate(d, spec)? }))
            .collect();
    }

    let v_spec = TextureSpec { seed: vertical_seed(spec.seed), ..spec.clone() };
    let layers: Vec<(TextureInstance, TextureInstance)> = levels
        .par_iter()
        .map(|&d| Ok((gen_hatch(d, Orientation::Horizontal, spec)?, gen_hatch(d, Orientation::Vertical, &v_spec)?)))
        .collect::<Result<_>>()?;
    let top = levels.len() - 1;
    let saturated = |i: usize| levels[i] >= 1.0;
    let mut out = Vec::new();
    for i in 0..levels.len() {
        for j in 0..levels.len() {
            let (i2, j2) = if saturated(i) || saturated(j) { (top, top) } else { (i, j) };
            if (i2, j2) != (i, j) {
                continue;
            }
            let texture = combine_crosshatch(spec, &layers[i].0, &layers[j].1);
            out.push(Stimulus { key: StimulusKey::crosshatch(levels[i], levels[j]), texture });
        }
    }
    Ok(out)
}
