//! Discrete Voronoi cells over pixel centers, and (weighted) Lloyd relaxation.

use rayon::prelude::*;

use super::{Point, PointSet};
use crate::error::{invalid, Result};
use crate::raster::Raster;

/// Mass-weighted moments of one discrete Voronoi cell.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CellStats {
    pub pixels: usize,
    /// Sum of weights over the cell (pixel count when unweighted).
    pub mass: f64,
    pub sum_x: f64,
    pub sum_y: f64,
    pub sum_xx: f64,
    pub sum_yy: f64,
    pub sum_xy: f64,
}

impl CellStats {
    pub fn centroid(&self) -> Option<Point> {
        (self.mass > 0.0).then(|| Point::new(self.sum_x / self.mass, self.sum_y / self.mass))
    }

    /// Weighted covariance entries `(cxx, cyy, cxy)` about the centroid.
    pub fn covariance(&self) -> Option<(f64, f64, f64)> {
        let c = self.centroid()?;
        let m = self.mass;
        Some((
            self.sum_xx / m - c.x * c.x,
            self.sum_yy / m - c.y * c.y,
            self.sum_xy / m - c.x * c.y,
        ))
    }
}

#[derive(Clone, Debug)]
pub struct VoronoiLabels {
    pub width: usize,
    pub height: usize,
    /// Row-major nearest-site index per pixel.
    pub labels: Vec<u32>,
    pub cells: Vec<CellStats>,
}

impl VoronoiLabels {
    pub fn label(&self, x: usize, y: usize) -> usize {
        self.labels[y * self.width + x] as usize
    }
}

/// Uniform bucket grid for nearest-site queries.
struct SiteGrid<'a> {
    sites: &'a [Point],
    cell: f64,
    cols: usize,
    rows: usize,
    start: Vec<usize>,
    items: Vec<u32>,
}

impl<'a> SiteGrid<'a> {
    fn new(sites: &'a [Point], width: usize, height: usize) -> Self {
        let area = (width * height) as f64;
        let cell = (2.0 * area / sites.len() as f64).sqrt().max(1.0);
        let cols = ((width as f64 / cell).ceil() as usize).max(1);
        let rows = ((height as f64 / cell).ceil() as usize).max(1);
        let bucket = |p: &Point| {
            let cx = ((p.x / cell) as usize).min(cols - 1);
            let cy = ((p.y / cell) as usize).min(rows - 1);
            cy * cols + cx
        };
        let mut counts = vec![0usize; cols * rows + 1];
        for p in sites {
            counts[bucket(p) + 1] += 1;
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let mut fill = counts.clone();
        let mut items = vec![0u32; sites.len()];
        for (i, p) in sites.iter().enumerate() {
            let b = bucket(p);
            items[fill[b]] = i as u32;
            fill[b] += 1;
        }
        Self { sites, cell, cols, rows, start: counts, items }
    }

    /// Nearest site to `q`; ties go to the lowest index.
    fn nearest(&self, q: Point) -> u32 {
        let cx = ((q.x / self.cell) as usize).min(self.cols - 1) as isize;
        let cy = ((q.y / self.cell) as usize).min(self.rows - 1) as isize;
        // distance from q to the boundary of its own bucket
        let inner = {
            let (x0, y0) = (cx as f64 * self.cell, cy as f64 * self.cell);
            (q.x - x0).min(x0 + self.cell - q.x).min(q.y - y0).min(y0 + self.cell - q.y).max(0.0)
        };
        let mut best = (f64::INFINITY, u32::MAX);
        let max_ring = self.cols.max(self.rows) as isize;
        for ring in 0..=max_ring {
            if ring > 0 {
                let lb = (ring - 1) as f64 * self.cell + inner;
                if lb * lb > best.0 {
                    break;
                }
            }
            for gy in cy - ring..=cy + ring {
                if gy < 0 || gy >= self.rows as isize {
                    continue;
                }
                let edge_row = gy == cy - ring || gy == cy + ring;
                let step = if edge_row { 1 } else { (2 * ring).max(1) };
                let mut gx = cx - ring;
                while gx <= cx + ring {
                    if gx >= 0 && gx < self.cols as isize {
                        let b = gy as usize * self.cols + gx as usize;
                        for &i in &self.items[self.start[b]..self.start[b + 1]] {
                            let d = self.sites[i as usize].dist2(q);
                            if d < best.0 || (d == best.0 && i < best.1) {
                                best = (d, i);
                            }
                        }
                    }
                    gx += step;
                }
            }
        }
        best.1
    }
}

fn check_weight(points: &PointSet, weight: Option<&Raster>) -> Result<()> {
    if let Some(w) = weight {
        if w.dims() != (points.width, points.height) {
            return Err(invalid(format!(
                "weight raster {}x{} does not match domain {}x{}",
                w.width(),
                w.height(),
                points.width,
                points.height
            )));
        }
    }
    Ok(())
}

/// Labels every pixel center with its nearest site and accumulates per-cell moments.
pub fn voronoi_labels(points: &PointSet, weight: Option<&Raster>) -> Result<VoronoiLabels> {
    if points.is_empty() {
        return Err(invalid("voronoi labelling needs at least one site"));
    }
    check_weight(points, weight)?;
    let (w, h) = (points.width, points.height);
    let grid = SiteGrid::new(&points.points, w, h);
    let mut labels = vec![0u32; w * h];
    labels.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        let py = y as f64 + 0.5;
        for (x, l) in row.iter_mut().enumerate() {
            *l = grid.nearest(Point::new(x as f64 + 0.5, py));
        }
    });

    let mut cells = vec![CellStats::default(); points.len()];
    for y in 0..h {
        let py = y as f64 + 0.5;
        for x in 0..w {
            let c = &mut cells[labels[y * w + x] as usize];
            let m = weight.map_or(1.0, |r| r.get(x, y));
            let px = x as f64 + 0.5;
            c.pixels += 1;
            c.mass += m;
            c.sum_x += m * px;
            c.sum_y += m * py;
            c.sum_xx += m * px * px;
            c.sum_yy += m * py * py;
            c.sum_xy += m * px * py;
        }
    }
    Ok(VoronoiLabels { width: w, height: h, labels, cells })
}

/// `sum_p w(p) * |p - site(p)|^2` over pixel centers.
pub fn quantization_energy(points: &PointSet, weight: Option<&Raster>) -> Result<f64> {
    let labels = voronoi_labels(points, weight)?;
    let mut e = 0.0;
    for y in 0..labels.height {
        for x in 0..labels.width {
            let s = points.points[labels.label(x, y)];
            let m = weight.map_or(1.0, |r| r.get(x, y));
            e += m * s.dist2(Point::new(x as f64 + 0.5, y as f64 + 0.5));
        }
    }
    Ok(e)
}

fn step_with_movement(points: &PointSet, weight: Option<&Raster>) -> Result<(PointSet, f64)> {
    let labels = voronoi_labels(points, weight)?;
    let mut next = points.clone();
    let mut moved = 0.0f64;
    for (p, cell) in next.points.iter_mut().zip(&labels.cells) {
        if let Some(c) = cell.centroid() {
            moved = moved.max(p.dist(c));
            *p = c;
        }
    }
    next.clamp();
    Ok((next, moved))
}

/// Moves each site to the (weighted) centroid of its cell; sites of empty or
/// massless cells stay put.
pub fn lloyd_step(points: &PointSet, weight: Option<&Raster>) -> Result<PointSet> {
    step_with_movement(points, weight).map(|(p, _)| p)
}

#[derive(Clone, Debug)]
pub struct RelaxOutcome {
    pub points: PointSet,
    pub iterations: usize,
    /// Largest site displacement in the final step.
    pub last_movement: f64,
}

/// Repeats [`lloyd_step`] until the largest displacement drops below
/// `move_tol` or `max_iters` steps have run.
pub fn lloyd_relax(points: &PointSet, weight: Option<&Raster>, max_iters: usize, move_tol: f64) -> Result<RelaxOutcome> {
    if max_iters == 0 {
        return Err(invalid("max_iters must be at least 1"));
    }
    if !(move_tol >= 0.0) {
        return Err(invalid(format!("move_tol must be non-negative, got {move_tol}")));
    }
    let mut current = points.clone();
    let mut last_movement = f64::INFINITY;
    let mut iterations = 0;
    while iterations < max_iters {
        let (next, moved) = step_with_movement(&current, weight)?;
        current = next;
        last_movement = moved;
        iterations += 1;
        if moved < move_tol {
            break;
        }
    }
    Ok(RelaxOutcome { points: current, iterations, last_movement })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_site_owns_everything() {
        let pts = PointSet::new(20, 10, vec![Point::new(3.0, 7.0)]).unwrap();
        let l = voronoi_labels(&pts, None).unwrap();
        assert!(l.labels.iter().all(|&v| v == 0));
        assert_eq!(l.cells[0].centroid().unwrap(), Point::new(10.0, 5.0));
        let moved = lloyd_step(&pts, None).unwrap();
        assert_eq!(moved.points[0], Point::new(10.0, 5.0));
    }

    #[test]
    fn mirrored_pair_splits_evenly() {
        // the midline x = 10 passes between pixel columns, so no ties at all
        let pts = PointSet::new(20, 6, vec![Point::new(5.0, 3.0), Point::new(15.0, 3.0)]).unwrap();
        let l = voronoi_labels(&pts, None).unwrap();
        assert_eq!(l.cells[0].pixels, l.cells[1].pixels);
        // odd width: the center column is equidistant and goes to index 0
        let pts = PointSet::new(21, 6, vec![Point::new(5.5, 3.0), Point::new(15.5, 3.0)]).unwrap();
        let l = voronoi_labels(&pts, None).unwrap();
        assert_eq!(l.cells[0].pixels, l.cells[1].pixels + 6);
        assert!((0..6).all(|y| l.label(10, y) == 0));
    }

    #[test]
    fn empty_set_is_rejected() {
        let pts = PointSet::new(4, 4, vec![]).unwrap();
        assert!(voronoi_labels(&pts, None).is_err());
    }

    #[test]
    fn weight_shape_is_checked() {
        let pts = PointSet::new(4, 4, vec![Point::new(1.0, 1.0)]).unwrap();
        let w = Raster::new(5, 4).unwrap();
        assert!(voronoi_labels(&pts, Some(&w)).is_err());
    }

    #[test]
    fn converged_input_stops_after_one_step() {
        let pts = PointSet::new(20, 10, vec![Point::new(10.0, 5.0)]).unwrap();
        let out = lloyd_relax(&pts, None, 64, 0.25).unwrap();
        assert_eq!(out.iterations, 1);
        assert!(out.last_movement < 0.25);
    }

    #[test]
    fn massless_cells_keep_their_site() {
        let w = Raster::from_fn(20, 10, |x, _| if x < 10 { 1.0 } else { 0.0 }).unwrap();
        let pts = PointSet::new(20, 10, vec![Point::new(2.0, 5.0), Point::new(19.0, 5.0)]).unwrap();
        let next = lloyd_step(&pts, Some(&w)).unwrap();
        // the right cell spans x >= 10.5 where the weight is zero
        assert_eq!(next.points[1], Point::new(19.0, 5.0));
    }
}
