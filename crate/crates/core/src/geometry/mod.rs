//! Point-set machinery on the raster domain.

mod delaunay;
mod voronoi;

pub use delaunay::{delaunay, in_circle, Triangulation};
pub use voronoi::{lloyd_relax, lloyd_step, quantization_energy, voronoi_labels, CellStats, RelaxOutcome, VoronoiLabels};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist2(self, other: Point) -> f64 {
        let (dx, dy) = (self.x - other.x, self.y - other.y);
        dx * dx + dy * dy
    }

    pub fn dist(self, other: Point) -> f64 {
        self.dist2(other).sqrt()
    }
}

/// Sites inside the pixel domain `[0, width] x [0, height]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    pub points: Vec<Point>,
    pub width: usize,
    pub height: usize,
}

impl PointSet {
    pub fn new(width: usize, height: usize, points: Vec<Point>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(invalid(format!("domain must be positive, got {width}x{height}")));
        }
        let mut set = Self { points, width, height };
        set.clamp();
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn clamp(&mut self) {
        let (w, h) = (self.width as f64, self.height as f64);
        for p in &mut self.points {
            p.x = p.x.clamp(0.0, w);
            p.y = p.y.clamp(0.0, h);
        }
    }
}
