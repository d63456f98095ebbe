//! Axis-aligned hatching chosen stroke by stroke from random candidates.
//!
//! A candidate's goodness is the ink it adds to every sufficiently fine
//! level of the texture's mean pyramid, divided by its length. At level `k`
//! the stroke is drawn at that level's resolution with the full stroke
//! width, so coarse levels see a line as thick and reward candidates far from
//! existing lines. Drawing at the level's own resolution is what makes the
//! pyramid matter: adding the stroke at full resolution and pooling would
//! change every level's mean by the same amount.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_target, TextureInstance, TextureSpec};
use crate::error::Result;
use crate::geometry::Point;
use crate::raster::{Primitive, Pyramid, Raster};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// A hatch line on pixel row (or column) `line`, covering `len` pixel centres
/// from `start` along the line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HatchLine {
    pub orientation: Orientation,
    pub line: usize,
    pub start: usize,
    pub len: usize,
}

impl HatchLine {
    /// Endpoints run through the centres of the first and last pixel.
    pub fn endpoints(&self) -> (Point, Point) {
        let across = self.line as f64 + 0.5;
        let a = self.start as f64 + 0.5;
        let b = (self.start + self.len) as f64 - 0.5;
        match self.orientation {
            Orientation::Horizontal => (Point::new(a, across), Point::new(b, across)),
            Orientation::Vertical => (Point::new(across, a), Point::new(across, b)),
        }
    }

    pub fn primitive(&self, width: f64) -> Primitive {
        let (p0, p1) = self.endpoints();
        Primitive::segment(p0, p1, width)
    }

    /// The stroke in the coordinates of pyramid level `k`.
    fn at_level(&self, k: usize, width: f64) -> Primitive {
        let (p0, p1) = self.endpoints();
        let s = 1.0 / (1u64 << k) as f64;
        Primitive::segment(Point::new(p0.x * s, p0.y * s), Point::new(p1.x * s, p1.y * s), width)
    }
}

/// Number of pyramid levels scored: those whose shorter side still spans at
/// least eight stroke widths. Coarser levels are covered almost entirely by
/// any stroke and would only reward short lines.
pub(crate) fn scored_levels(pyr: &Pyramid, stroke_width: f64) -> usize {
    let min_side = 8.0 * stroke_width;
    let n = pyr
        .levels()
        .iter()
        .take_while(|l| l.width().min(l.height()) as f64 >= min_side)
        .count();
    n.max(1)
}

fn score(levels: &[Raster], cand: &HatchLine, width: f64) -> f64 {
    let mut total = 0.0;
    for (k, level) in levels.iter().enumerate() {
        let (w, h) = level.dims();
        let mut added = 0.0;
        cand.at_level(k, width).for_each_pixel(w, h, |x, y| added += 1.0 - level.get(x, y));
        total += added / (w * h) as f64;
    }
    total / cand.len as f64
}

/// Goodness of `cand` on `texture`, building the pyramid from scratch.
pub fn hatch_goodness(texture: &Raster, cand: &HatchLine, stroke_width: f64) -> f64 {
    let pyr = Pyramid::build(texture);
    let n = scored_levels(&pyr, stroke_width);
    score(&pyr.levels()[..n], cand, stroke_width)
}

pub(crate) fn random_candidate(
    rng: &mut ChaCha8Rng,
    spec: &TextureSpec,
    orientation: Orientation,
) -> HatchLine {
    let (along, across) = match orientation {
        Orientation::Horizontal => (spec.width, spec.height),
        Orientation::Vertical => (spec.height, spec.width),
    };
    let line = rng.random_range(0..across);
    let [lo, hi] = spec.hatch_length_range;
    let frac = rng.random_range(lo..=hi);
    let len = ((frac * along as f64).round() as usize).clamp(1, along);
    let start = rng.random_range(0..=along - len);
    HatchLine { orientation, line, start, len }
}

/// The texture being built, with its pyramid kept current.
pub(crate) struct HatchCanvas {
    pub raster: Raster,
    pub pyramid: Pyramid,
    pub levels: usize,
    pub width: f64,
}

impl HatchCanvas {
    pub fn new(raster: Raster, stroke_width: f64) -> Self {
        let pyramid = Pyramid::build(&raster);
        let levels = scored_levels(&pyramid, stroke_width);
        Self { raster, pyramid, levels, width: stroke_width }
    }

    pub fn score(&self, cand: &HatchLine) -> f64 {
        score(&self.pyramid.levels()[..self.levels], cand, self.width)
    }

    /// Pixels `cand` would newly cover at full resolution.
    pub fn new_pixels(&self, cand: &HatchLine) -> usize {
        let (w, h) = self.raster.dims();
        let mut n = 0;
        cand.primitive(self.width).for_each_pixel(w, h, |x, y| {
            if self.raster.get(x, y) < 1.0 {
                n += 1;
            }
        });
        n
    }

    /// Draws `cand` and refreshes the pyramid over its bounding box.
    pub fn commit(&mut self, cand: &HatchLine) -> usize {
        let prim = cand.primitive(self.width);
        let added = self.raster.draw(&prim);
        let (p0, p1) = cand.endpoints();
        let r = self.width / 2.0 + 1.0;
        let (w, h) = self.raster.dims();
        let x0 = (p0.x.min(p1.x) - r).floor().max(0.0) as usize;
        let y0 = (p0.y.min(p1.y) - r).floor().max(0.0) as usize;
        let x1 = ((p0.x.max(p1.x) + r).ceil() as usize).min(w);
        let y1 = ((p0.y.max(p1.y) + r).ceil() as usize).min(h);
        self.pyramid.update_region(&self.raster, x0, y0, x1, y1);
        added
    }

    /// A full-length line through the first uncovered pixel in scan order
    /// along `orientation`, or `None` when everything is covered.
    pub fn gap_line(&self, orientation: Orientation) -> Option<HatchLine> {
        let (w, h) = self.raster.dims();
        match orientation {
            Orientation::Horizontal => (0..h)
                .find(|&y| (0..w).any(|x| self.raster.get(x, y) < 1.0))
                .map(|y| HatchLine { orientation, line: y, start: 0, len: w }),
            Orientation::Vertical => (0..w)
                .find(|&x| (0..h).any(|y| self.raster.get(x, y) < 1.0))
                .map(|x| HatchLine { orientation, line: x, start: 0, len: h }),
        }
    }
}

/// Best of `candidates_per_line` random candidates (first on ties). When the
/// best adds no pixel at full resolution a gap line is used instead, so every
/// committed line makes progress.
pub(crate) fn pick_line(
    canvas: &HatchCanvas,
    rng: &mut ChaCha8Rng,
    spec: &TextureSpec,
    orientation: Orientation,
) -> Option<HatchLine> {
    let mut best: Option<(f64, HatchLine)> = None;
    for _ in 0..spec.candidates_per_line {
        let cand = random_candidate(rng, spec, orientation);
        let g = canvas.score(&cand);
        if best.is_none_or(|(bg, _)| g > bg) {
            best = Some((g, cand));
        }
    }
    let (_, line) = best?;
    if canvas.new_pixels(&line) > 0 {
        Some(line)
    } else {
        canvas.gap_line(orientation)
    }
}

/// Hatching of one orientation at `target` density. Lines are added until
/// the density reaches the target; the closer of the last two states wins.
pub fn gen_hatch(target: f64, orientation: Orientation, spec: &TextureSpec) -> Result<TextureInstance> {
    check_target(target)?;
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut canvas = HatchCanvas::new(spec.blank()?, spec.stroke_width);
    let mut lines: Vec<HatchLine> = Vec::new();
    let total = (spec.width * spec.height) as f64;
    let mut covered = 0usize;
    let mut prev = 0usize;
    while (covered as f64) < target * total {
        let Some(line) = pick_line(&canvas, &mut rng, spec, orientation) else {
            break;
        };
        prev = covered;
        covered += canvas.commit(&line);
        lines.push(line);
    }
    let (d_now, d_prev) = (covered as f64 / total, prev as f64 / total);
    if !lines.is_empty() && (d_prev - target).abs() <= (d_now - target).abs() {
        lines.pop();
    }
    let mut raster = spec.blank()?;
    let primitives: Vec<Primitive> = lines.iter().map(|l| l.primitive(spec.stroke_width)).collect();
    for p in &primitives {
        raster.draw(p);
    }
    Ok(TextureInstance::new(spec, target, primitives, raster))
}
