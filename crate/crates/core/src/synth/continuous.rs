//! Texture maps whose local density follows a scalar field.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::hatch::{random_candidate, HatchCanvas, HatchLine, Orientation};
use super::lbg::{block_means, upsample};
use super::{lbg_stipple, TextureSpec, TextureType};
use crate::error::{invalid, Result};
use crate::geometry::{delaunay, lloyd_relax, Point, PointSet};
use crate::raster::{Primitive, Raster};
use crate::reparam::{paper_params, SigmoidParams};

/// Mesh refinement rounds after the first triangle map.
const TRIANGLE_ROUNDS: usize = 4;

/// Maps a normalized field value (a perceived position) to a density.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PerceptualMapping {
    Identity,
    Sigmoid(SigmoidParams),
}

impl PerceptualMapping {
    /// The published sigmoid for `texture`.
    pub fn paper(texture: &str) -> Result<Self> {
        Ok(Self::Sigmoid(paper_params(texture)?))
    }

    pub fn density(&self, x: f64) -> Result<f64> {
        let x = x.clamp(0.0, 1.0);
        match self {
            Self::Identity => Ok(x),
            Self::Sigmoid(p) => crate::reparam::sigmoid_eval(p, x),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    pub bx: usize,
    pub by: usize,
    pub target: f64,
    pub measured: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

#[derive(Clone, Debug)]
pub struct ContinuousMap {
    pub texture_type: TextureType,
    /// Target density per pixel after the perceptual mapping.
    pub target: Raster,
    pub raster: Raster,
    pub primitives: Vec<Primitive>,
    pub blocks: Vec<BlockReport>,
    pub warnings: Vec<String>,
}

impl ContinuousMap {
    pub fn measured_density(&self) -> f64 {
        self.raster.density()
    }

    /// Mean absolute block error over blocks with a target of at least `min_target`.
    pub fn block_mae(&self, min_target: f64) -> f64 {
        let errs: Vec<f64> =
            self.blocks.iter().filter(|b| b.target >= min_target).map(|b| (b.measured - b.target).abs()).collect();
        if errs.is_empty() {
            0.0
        } else {
            errs.iter().sum::<f64>() / errs.len() as f64
        }
    }
}

/// Turns `field` (values in `[0, 1]`, read as perceived positions) into a
/// texture whose local density follows `mapping(field)`.
///
/// Stipples come from weighted Linde-Buzo-Gray stippling. Hatching runs the
/// candidate loop restricted to blocks still short of their target. Triangles
/// use weighted Lloyd relaxation; blocks whose target is below one stroke
/// across the block, or that miss by more than 0.05, are reported.
pub fn continuous_map(
    field: &Raster,
    mapping: &PerceptualMapping,
    texture_type: TextureType,
    spec: &TextureSpec,
) -> Result<ContinuousMap> {
    let spec = TextureSpec { width: field.width(), height: field.height(), texture_type, ..spec.clone() };
    spec.validate()?;
    let mut mapped = Vec::with_capacity(field.len());
    for &v in field.values() {
        mapped.push(mapping.density(v)?);
    }
    let target = Raster::from_vec(spec.width, spec.height, mapped)?;

    let (primitives, raster) = match texture_type {
        TextureType::Stipple => {
            let (_, tex) = lbg_stipple(&target, &spec)?;
            (tex.primitives, tex.raster)
        }
        TextureType::HatchH => hatch_map(&target, &spec, Orientation::Horizontal)?,
        TextureType::HatchV => hatch_map(&target, &spec, Orientation::Vertical)?,
        TextureType::Triangle => triangle_map(&target, &spec)?,
        TextureType::Crosshatch => {
            return Err(invalid("continuous maps support stipple, triangle, hatch_h and hatch_v"));
        }
    };

    let block = spec.block_size;
    let (bw, _, targets) = block_means(&target, block);
    let (_, _, measured) = block_means(&raster, block);
    let stroke_floor = spec.stroke_width / block as f64;
    let mut blocks = Vec::with_capacity(targets.len());
    let mut flagged = 0;
    for (i, (&t, &m)) in targets.iter().zip(&measured).enumerate() {
        let mut warning = None;
        if texture_type == TextureType::Triangle && t > 0.0 && t < stroke_floor {
            warning = Some(format!("target {t:.3} below one stroke across the block ({stroke_floor:.3})"));
        } else if texture_type == TextureType::Triangle && (m - t).abs() > 0.05 {
            warning = Some(format!("measured {m:.3} misses target {t:.3} by more than 0.05"));
        }
        flagged += warning.is_some() as usize;
        blocks.push(BlockReport { bx: i % bw, by: i / bw, target: t, measured: m, warning });
    }
    let mut warnings = Vec::new();
    if flagged > 0 {
        warnings.push(format!("{flagged} of {} blocks cannot reach their triangle density", blocks.len()));
    }
    Ok(ContinuousMap { texture_type, target, raster, primitives, blocks, warnings })
}

struct BlockGrid {
    size: usize,
    bw: usize,
    bh: usize,
    targets: Vec<f64>,
    current: Vec<f64>,
    /// A block needs ink while it is short by more than half of one line across it.
    slack: f64,
}

impl BlockGrid {
    fn needy(&self, b: usize) -> bool {
        self.targets[b] - self.current[b] > self.slack
    }

    fn refresh(&mut self, raster: &Raster, x0: usize, y0: usize, x1: usize, y1: usize) {
        let s = self.size;
        for by in y0 / s..=((y1.max(1) - 1) / s).min(self.bh - 1) {
            for bx in x0 / s..=((x1.max(1) - 1) / s).min(self.bw - 1) {
                self.current[by * self.bw + bx] = raster.region_density(bx * s, by * s, (bx + 1) * s, (by + 1) * s);
            }
        }
    }
}

fn hatch_map(target: &Raster, spec: &TextureSpec, orientation: Orientation) -> Result<(Vec<Primitive>, Raster)> {
    let s = spec.block_size;
    let (bw, bh, targets) = block_means(target, s);
    let mut grid = BlockGrid { size: s, bw, bh, current: vec![0.0; targets.len()], targets, slack: spec.stroke_width / (2.0 * s as f64) };
    let mut canvas = HatchCanvas::new(spec.blank()?, spec.stroke_width);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut lines = Vec::new();
    let along = match orientation {
        Orientation::Horizontal => spec.width,
        Orientation::Vertical => spec.height,
    };
    let block_of = |line: &HatchLine, pos: usize| match orientation {
        Orientation::Horizontal => (line.line / s) * bw + pos / s,
        Orientation::Vertical => (pos / s) * bw + line.line / s,
    };
    let max_lines = spec.width * spec.height;
    while lines.len() < max_lines {
        let needy: Vec<usize> = (0..grid.targets.len()).filter(|&b| grid.needy(b)).collect();
        if needy.is_empty() {
            break;
        }
        let mut best: Option<(f64, HatchLine)> = None;
        for _ in 0..spec.candidates_per_line {
            let b = needy[rng.random_range(0..needy.len())];
            let (bx, by) = (b % bw, b / bw);
            let ((a0, a1), (c0, c1)) = match orientation {
                Orientation::Horizontal => ((bx * s, ((bx + 1) * s).min(spec.width)), (by * s, ((by + 1) * s).min(spec.height))),
                Orientation::Vertical => ((by * s, ((by + 1) * s).min(spec.height)), (bx * s, ((bx + 1) * s).min(spec.width))),
            };
            let mut cand = random_candidate(&mut rng, spec, orientation);
            cand.line = rng.random_range(c0..c1);
            let lo = (a0 + 1).saturating_sub(cand.len);
            let hi = (a1 - 1).min(along - cand.len);
            cand.start = if lo <= hi { rng.random_range(lo..=hi) } else { hi };
            // trim to the run of needy blocks around the chosen one
            let (mut r0, mut r1) = (a0, a1);
            while r0 > cand.start && grid.needy(block_of(&cand, r0 - 1)) {
                r0 -= s;
            }
            while r1 < cand.start + cand.len && grid.needy(block_of(&cand, r1)) {
                r1 = (r1 + s).min(along);
            }
            let start = cand.start.max(r0);
            let end = (cand.start + cand.len).min(r1);
            if end <= start {
                continue;
            }
            cand.start = start;
            cand.len = end - start;
            let g = canvas.score(&cand);
            if best.is_none_or(|(bg, _)| g > bg) {
                best = Some((g, cand));
            }
        }
        let line = match best {
            Some((_, l)) if canvas.new_pixels(&l) > 0 => l,
            _ => match gap_in_block(&canvas.raster, needy[0], &grid, orientation) {
                Some(l) => l,
                None => break,
            },
        };
        canvas.commit(&line);
        let (p0, p1) = line.endpoints();
        let r = spec.stroke_width;
        let x0 = (p0.x.min(p1.x) - r).max(0.0) as usize;
        let y0 = (p0.y.min(p1.y) - r).max(0.0) as usize;
        let x1 = ((p0.x.max(p1.x) + r).ceil() as usize).min(spec.width);
        let y1 = ((p0.y.max(p1.y) + r).ceil() as usize).min(spec.height);
        grid.refresh(&canvas.raster, x0, y0, x1, y1);
        lines.push(line);
    }
    let prims = lines.iter().map(|l| l.primitive(spec.stroke_width)).collect();
    Ok((prims, canvas.raster))
}

/// A line through the first uncovered pixel of block `b`, spanning the block.
fn gap_in_block(raster: &Raster, b: usize, grid: &BlockGrid, orientation: Orientation) -> Option<HatchLine> {
    let s = grid.size;
    let (bx, by) = (b % grid.bw, b / grid.bw);
    let (w, h) = raster.dims();
    let (x0, x1, y0, y1) = (bx * s, ((bx + 1) * s).min(w), by * s, ((by + 1) * s).min(h));
    match orientation {
        Orientation::Horizontal => (y0..y1)
            .find(|&y| (x0..x1).any(|x| raster.get(x, y) < 1.0))
            .map(|y| HatchLine { orientation, line: y, start: x0, len: x1 - x0 }),
        Orientation::Vertical => (x0..x1)
            .find(|&x| (y0..y1).any(|y| raster.get(x, y) < 1.0))
            .map(|x| HatchLine { orientation, line: x, start: y0, len: y1 - y0 }),
    }
}

fn triangle_map(target: &Raster, spec: &TextureSpec) -> Result<(Vec<Primitive>, Raster)> {
    let peak = target.values().iter().cloned().fold(0.0f64, f64::max);
    let goal = target.density();
    if peak == 0.0 {
        return Ok((Vec::new(), spec.blank()?));
    }
    let (w, h) = (spec.width, spec.height);
    let block = spec.block_size;
    let (bw, bh, targets) = block_means(target, block);
    let render = |n: usize, gain: &[f64]| -> Result<(Vec<Primitive>, Raster)> {
        // Lloyd point density follows the square root of the weight and
        // triangle ink the square root of point density, so weight ~ d^4
        let values: Vec<f64> = (0..h)
            .flat_map(|y| (0..w).map(move |x| (x, y)))
            .map(|(x, y)| (target.get(x, y) / peak).powi(4) * upsample(gain, bw, bh, block, x, y))
            .collect();
        let top = values.iter().cloned().fold(0.0f64, f64::max);
        let weight = Raster::from_vec(w, h, values.iter().map(|v| v / top).collect())?;
        let dist = WeightedIndex::new(weight.values().iter().map(|v| v.max(1e-12)))
            .map_err(|e| invalid(format!("cannot sample the density map: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let pts: Vec<Point> = (0..n)
            .map(|_| {
                let i = dist.sample(&mut rng);
                Point::new((i % w) as f64 + rng.random::<f64>(), (i / w) as f64 + rng.random::<f64>())
            })
            .collect();
        let relaxed = lloyd_relax(&PointSet::new(w, h, pts)?, Some(&weight), spec.lloyd_max_iters, spec.lloyd_move_tol)?;
        let tri = delaunay(&relaxed.points)?;
        let p = &relaxed.points.points;
        let prims: Vec<Primitive> = tri
            .triangles
            .iter()
            .map(|t| Primitive::TriangleEdges { vertices: [p[t[0]], p[t[1]], p[t[2]]], width: spec.stroke_width })
            .collect();
        let mut raster = spec.blank()?;
        for q in &prims {
            raster.draw(q);
        }
        Ok((prims, raster))
    };
    let error = |r: &Raster| {
        let (_, _, m) = block_means(r, block);
        m.iter().zip(&targets).map(|(a, b)| (a - b).abs()).sum::<f64>() / m.len() as f64
    };

    // an even mesh of n points inks roughly 3.2 * stroke * sqrt(n / area)
    let area = (w * h) as f64;
    let mut n = ((area * (goal / (3.2 * spec.stroke_width)).powi(2)).round() as usize).max(3);
    let mut gain = vec![1.0; bw * bh];
    let first = render(n, &gain)?;
    let mut best = (error(&first.1), first.clone());
    let mut last = first;
    for _ in 0..TRIANGLE_ROUNDS {
        let d = last.1.density();
        let (_, _, measured) = block_means(&last.1, block);
        for i in 0..gain.len() {
            let ratio = if measured[i] > 0.0 { targets[i] / measured[i] } else { 2.0 };
            gain[i] = (gain[i] * ratio.clamp(0.5, 2.0).powi(4)).clamp(1.0 / 64.0, 64.0);
        }
        let ratio = if d > 0.0 { (goal / d).powi(2) } else { 4.0 };
        n = ((n as f64 * ratio.clamp(0.25, 4.0)).round() as usize).max(3);
        last = render(n, &gain)?;
        let e = error(&last.1);
        if e < best.0 {
            best = (e, last.clone());
        }
    }
    Ok(best.1)
}
