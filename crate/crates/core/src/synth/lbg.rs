//! Weighted Linde-Buzo-Gray stippling of a density map.

use serde::{Deserialize, Serialize};

use super::{disc_pixel_area, TextureInstance, TextureSpec};
use crate::error::{invalid, Result};
use crate::geometry::{voronoi_labels, CellStats, Point, PointSet};
use crate::raster::{Primitive, Raster};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LbgOptions {
    /// A cell holding more than `split` stipples' worth of ink splits.
    pub split: f64,
    /// A cell holding less than `remove` stipples' worth of ink is dropped.
    pub remove: f64,
    pub max_iters: usize,
    /// Rounds of per-block gain correction after the first pass.
    pub correction_rounds: usize,
    /// The split/remove band starts at this fraction of its full width and
    /// widens linearly over the first half of the iterations, so early rounds
    /// settle counts closely and later ones are guaranteed to stop.
    pub narrow_to: f64,
}

impl Default for LbgOptions {
    fn default() -> Self {
        Self { split: 1.5, remove: 0.5, max_iters: 100, correction_rounds: 5, narrow_to: 0.2 }
    }
}

impl LbgOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.remove >= 0.0 && self.remove < 1.0 && self.split > 1.0 && self.split.is_finite()) {
            return Err(invalid(format!(
                "LBG factors need 0 <= remove < 1 < split, got remove {} split {}",
                self.remove, self.split
            )));
        }
        if !(self.narrow_to > 0.0 && self.narrow_to <= 1.0) {
            return Err(invalid(format!("LBG narrow_to must lie in (0, 1], got {}", self.narrow_to)));
        }
        if self.max_iters == 0 {
            return Err(invalid("LBG max_iters must be at least 1"));
        }
        Ok(())
    }
}

fn split_pair(c: Point, cell: &CellStats) -> [Point; 2] {
    let (cxx, cyy, cxy) = cell.covariance().unwrap_or((1.0, 0.0, 0.0));
    let half = (cxx + cyy) / 2.0;
    let lambda = half + (((cxx - cyy) / 2.0).powi(2) + cxy * cxy).sqrt();
    let (mut vx, mut vy) = if cxy.abs() > 1e-12 { (cxy, lambda - cxx) } else if cxx >= cyy { (1.0, 0.0) } else { (0.0, 1.0) };
    let norm = (vx * vx + vy * vy).sqrt();
    vx /= norm;
    vy /= norm;
    let off = 0.5 * lambda.max(0.25).sqrt();
    [Point::new(c.x - off * vx, c.y - off * vy), Point::new(c.x + off * vx, c.y + off * vy)]
}

/// Runs the split/remove/move loop. `weight` is target ink per pixel (scaled
/// so it fits in `[0, 1]`) and `mass` is one stipple's ink on the same scale.
fn lbg_sites(weight: &Raster, mass: f64, opts: &LbgOptions) -> Result<Vec<Point>> {
    let (w, h) = weight.dims();
    let total: f64 = weight.values().iter().sum();
    if total < opts.remove * mass || total == 0.0 {
        return Ok(Vec::new());
    }
    let all = voronoi_labels(&PointSet::new(w, h, vec![Point::new(w as f64 / 2.0, h as f64 / 2.0)])?, Some(weight))?;
    let mut sites = PointSet::new(w, h, vec![all.cells[0].centroid().expect("positive total ink")])?;
    let ramp = (opts.max_iters / 2).max(1) as f64;
    for it in 0..opts.max_iters {
        let band = opts.narrow_to + (1.0 - opts.narrow_to) * (it as f64 / ramp).min(1.0);
        let split = 1.0 + (opts.split - 1.0) * band;
        let remove = 1.0 - (1.0 - opts.remove) * band;
        if sites.is_empty() {
            break;
        }
        let labels = voronoi_labels(&sites, Some(weight))?;
        // dropping every light cell at once can wipe out a region whose cells
        // all just split, so only the lighter half of them go per iteration
        let mut light: Vec<usize> = (0..sites.len()).filter(|&i| labels.cells[i].mass < remove * mass).collect();
        light.sort_by(|&a, &b| labels.cells[a].mass.total_cmp(&labels.cells[b].mass).then(a.cmp(&b)));
        let mut dropped = vec![false; sites.len()];
        for &i in &light[..light.len().div_ceil(2)] {
            dropped[i] = true;
        }
        let mut next = Vec::with_capacity(sites.len() + 16);
        let mut changed = !light.is_empty();
        for (i, (p, cell)) in sites.points.iter().zip(&labels.cells).enumerate() {
            if dropped[i] {
                continue;
            }
            let c = cell.centroid().unwrap_or(*p);
            if cell.mass > split * mass {
                next.extend(split_pair(c, cell));
                changed = true;
            } else {
                next.push(c);
            }
        }
        sites.points = next;
        sites.clamp();
        if !changed {
            break;
        }
    }
    Ok(sites.points)
}

/// Per-block mean of `r` on a `block`-sized grid.
pub(crate) fn block_means(r: &Raster, block: usize) -> (usize, usize, Vec<f64>) {
    let (w, h) = r.dims();
    let (bw, bh) = (w.div_ceil(block), h.div_ceil(block));
    let mut out = Vec::with_capacity(bw * bh);
    for by in 0..bh {
        for bx in 0..bw {
            out.push(r.region_density(bx * block, by * block, (bx + 1) * block, (by + 1) * block));
        }
    }
    (bw, bh, out)
}

/// Bilinear interpolation of per-block values sampled at block centres.
pub(crate) fn upsample(values: &[f64], bw: usize, bh: usize, block: usize, x: usize, y: usize) -> f64 {
    let fx = ((x as f64 + 0.5) / block as f64 - 0.5).clamp(0.0, (bw - 1) as f64);
    let fy = ((y as f64 + 0.5) / block as f64 - 0.5).clamp(0.0, (bh - 1) as f64);
    let (x0, y0) = (fx.floor() as usize, fy.floor() as usize);
    let (x1, y1) = ((x0 + 1).min(bw - 1), (y0 + 1).min(bh - 1));
    let (tx, ty) = (fx - x0 as f64, fy - y0 as f64);
    let v = |bx: usize, by: usize| values[by * bw + bx];
    (1.0 - ty) * ((1.0 - tx) * v(x0, y0) + tx * v(x1, y0)) + ty * ((1.0 - tx) * v(x0, y1) + tx * v(x1, y1))
}

fn render(spec: &TextureSpec, sites: &[Point]) -> Result<(Vec<Primitive>, Raster)> {
    let mut raster = spec.blank()?;
    let prims: Vec<Primitive> = sites.iter().map(|&p| Primitive::disc(p, spec.stipple_diameter)).collect();
    for p in &prims {
        raster.draw(p);
    }
    Ok((prims, raster))
}

/// Stipples whose local ink matches `density_map`: each Voronoi cell should
/// hold one stipple's worth of target ink. Overlap and the split/remove
/// hysteresis bias the result, so up to `correction_rounds` further passes
/// rescale the map per block by target over measured density. The round with
/// the smallest worst-block error is kept.
pub fn lbg_stipple(density_map: &Raster, spec: &TextureSpec) -> Result<(PointSet, TextureInstance)> {
    spec.validate()?;
    if density_map.dims() != (spec.width, spec.height) {
        return Err(invalid(format!(
            "density map {}x{} does not match texture size {}x{}",
            density_map.width(),
            density_map.height(),
            spec.width,
            spec.height
        )));
    }
    let mass = disc_pixel_area(spec.stipple_diameter) as f64;
    let block = spec.block_size;
    let (bw, bh, targets) = block_means(density_map, block);
    // below one stipple per block the target cannot be met locally
    let floor = mass / (block * block) as f64;
    let mut gain = vec![1.0; bw * bh];
    let worst_error = |raster: &Raster| {
        let (_, _, measured) = block_means(raster, block);
        let worst = (0..measured.len())
            .filter(|&i| targets[i] >= floor)
            .map(|i| (measured[i] - targets[i]).abs())
            .fold(0.0f64, f64::max);
        (worst, measured)
    };
    let sites = lbg_sites(density_map, mass, &spec.lbg)?;
    let (prims, raster) = render(spec, &sites)?;
    let (mut worst, mut measured) = worst_error(&raster);
    let mut best = (worst, sites, prims, raster);

    for _ in 0..spec.lbg.correction_rounds {
        if best.1.is_empty() || worst < 0.01 {
            break;
        }
        for i in 0..gain.len() {
            if targets[i] >= floor {
                let ratio = if measured[i] > 0.0 { targets[i] / measured[i] } else { 2.0 };
                gain[i] = (gain[i] * ratio.clamp(0.5, 2.0)).clamp(0.25, 4.0);
            }
        }
        let scaled: Vec<f64> = (0..spec.height)
            .flat_map(|y| (0..spec.width).map(move |x| (x, y)))
            .map(|(x, y)| density_map.get(x, y) * upsample(&gain, bw, bh, block, x, y))
            .collect();
        let peak = scaled.iter().cloned().fold(0.0f64, f64::max).max(1.0);
        let weight = Raster::from_vec(spec.width, spec.height, scaled.iter().map(|v| v / peak).collect())?;
        let sites = lbg_sites(&weight, mass / peak, &spec.lbg)?;
        let (prims, raster) = render(spec, &sites)?;
        (worst, measured) = worst_error(&raster);
        if worst < best.0 {
            best = (worst, sites, prims, raster);
        }
    }

    let (_, sites, prims, raster) = best;
    let target = density_map.density();
    let points = PointSet::new(spec.width, spec.height, sites)?;
    Ok((points, TextureInstance::new(spec, target, prims, raster)))
}
