//! Coverage grids and the primitives drawn onto them.
//!
//! A pixel `(x, y)` has its center at `(x + 0.5, y + 0.5)` in continuous pixel
//! coordinates. A primitive covers a pixel iff that center lies inside the
//! primitive's inked region; there is no anti-aliasing, so freshly drawn
//! rasters are strictly binary and density is an exact pixel count.

mod io;
mod pyramid;

pub use io::{read_image, write_image};
pub use pyramid::Pyramid;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::Point;

/// Per-pixel coverage in `[0, 1]`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Raster {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Raster {
    /// An empty (all-white) raster.
    pub fn new(width: usize, height: usize) -> Result<Self> {
        Self::filled(width, height, 0.0)
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(invalid(format!("raster size must be positive, got {width}x{height}")));
        }
        if !(0.0..=1.0).contains(&value) {
            return Err(invalid(format!("coverage {value} outside [0, 1]")));
        }
        Ok(Self { width, height, data: vec![value; width * height] })
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(invalid(format!("raster size must be positive, got {width}x{height}")));
        }
        if data.len() != width * height {
            return Err(invalid(format!(
                "expected {} coverage values for {width}x{height}, got {}",
                width * height,
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(invalid(format!("coverage {v} outside [0, 1]")));
        }
        Ok(Self { width, height, data })
    }

    /// Builds a raster from a per-pixel function; values are clamped to `[0, 1]`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut r = Self::new(width, height)?;
        for y in 0..height {
            for x in 0..width {
                r.data[y * width + x] = f(x, y).clamp(0.0, 1.0);
            }
        }
        Ok(r)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        self.data[y * self.width + x] = value.clamp(0.0, 1.0);
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    /// Number of pixels with coverage exactly 1.
    pub fn covered_count(&self) -> usize {
        self.data.iter().filter(|&&v| v >= 1.0).count()
    }

    /// Mean coverage, i.e. the fraction of the texture covered by ink.
    pub fn density(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    /// Mean coverage inside the pixel rectangle `[x0, x1) x [y0, y1)`, clipped to bounds.
    pub fn region_density(&self, x0: usize, y0: usize, x1: usize, y1: usize) -> f64 {
        let (x1, y1) = (x1.min(self.width), y1.min(self.height));
        if x0 >= x1 || y0 >= y1 {
            return 0.0;
        }
        let mut sum = 0.0;
        for y in y0..y1 {
            sum += self.data[y * self.width + x0..y * self.width + x1].iter().sum::<f64>();
        }
        sum / ((x1 - x0) * (y1 - y0)) as f64
    }

    /// Draws `prim` with OR compositing and returns how many pixels became covered.
    pub fn draw(&mut self, prim: &Primitive) -> usize {
        let mut added = 0;
        let w = self.width;
        prim.for_each_pixel(self.width, self.height, |x, y| {
            let v = &mut self.data[y * w + x];
            if *v < 1.0 {
                *v = 1.0;
                added += 1;
            }
        });
        added
    }

    /// Per-pixel maximum with `other` in place.
    pub fn union_with(&mut self, other: &Raster) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(invalid(format!(
                "dimension mismatch: {}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )));
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = a.max(*b);
        }
        Ok(())
    }
}

/// An inked shape in continuous pixel coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Primitive {
    Disc { center: Point, diameter: f64 },
    /// A stroke of the given width with rounded caps of radius `width / 2`.
    Segment { p0: Point, p1: Point, width: f64 },
    /// The three edges of a triangle, each stroked like a [`Primitive::Segment`].
    TriangleEdges { vertices: [Point; 3], width: f64 },
}

impl Primitive {
    pub fn disc(center: Point, diameter: f64) -> Self {
        Primitive::Disc { center, diameter }
    }

    pub fn segment(p0: Point, p1: Point, width: f64) -> Self {
        Primitive::Segment { p0, p1, width }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |p: &Point| p.x.is_finite() && p.y.is_finite();
        match self {
            Primitive::Disc { center, diameter } => {
                if !(*diameter > 0.0 && diameter.is_finite()) || !finite(center) {
                    return Err(invalid(format!("disc needs a positive diameter, got {diameter}")));
                }
            }
            Primitive::Segment { p0, p1, width } => {
                if !(*width > 0.0 && width.is_finite()) || !finite(p0) || !finite(p1) {
                    return Err(invalid(format!("segment needs a positive width, got {width}")));
                }
            }
            Primitive::TriangleEdges { vertices, width } => {
                if !(*width > 0.0 && width.is_finite()) || !vertices.iter().all(finite) {
                    return Err(invalid(format!("triangle needs a positive width, got {width}")));
                }
            }
        }
        Ok(())
    }

    /// Calls `f(x, y)` for every in-bounds pixel whose center lies inside the
    /// primitive. Triangle edges may report shared pixels more than once.
    pub fn for_each_pixel(&self, width: usize, height: usize, mut f: impl FnMut(usize, usize)) {
        match *self {
            Primitive::Disc { center, diameter } => {
                let r = diameter / 2.0;
                let r2 = r * r;
                let Some((x0, x1, y0, y1)) =
                    pixel_span(center.x - r, center.x + r, center.y - r, center.y + r, width, height)
                else {
                    return;
                };
                for y in y0..=y1 {
                    let dy = y as f64 + 0.5 - center.y;
                    for x in x0..=x1 {
                        let dx = x as f64 + 0.5 - center.x;
                        if dx * dx + dy * dy <= r2 {
                            f(x, y);
                        }
                    }
                }
            }
            Primitive::Segment { p0, p1, width: w } => stroke_pixels(p0, p1, w, width, height, &mut f),
            Primitive::TriangleEdges { vertices: [a, b, c], width: w } => {
                stroke_pixels(a, b, w, width, height, &mut f);
                stroke_pixels(b, c, w, width, height, &mut f);
                stroke_pixels(c, a, w, width, height, &mut f);
            }
        }
    }
}

/// Pixel index range whose centers can fall in `[xmin, xmax] x [ymin, ymax]`.
fn pixel_span(
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
    width: usize,
    height: usize,
) -> Option<(usize, usize, usize, usize)> {
    let lo = |v: f64| (v - 0.5).ceil().max(0.0);
    let hi = |v: f64, n: usize| (v - 0.5).floor().min(n as f64 - 1.0);
    let (x0, x1) = (lo(xmin), hi(xmax, width));
    let (y0, y1) = (lo(ymin), hi(ymax, height));
    if x0 > x1 || y0 > y1 {
        return None;
    }
    Some((x0 as usize, x1 as usize, y0 as usize, y1 as usize))
}

/// Squared distance from `p` to the segment `a`-`b`.
#[inline]
pub(crate) fn dist2_to_segment(p: Point, a: Point, b: Point) -> f64 {
    let (abx, aby) = (b.x - a.x, b.y - a.y);
    let (apx, apy) = (p.x - a.x, p.y - a.y);
    let len2 = abx * abx + aby * aby;
    let t = if len2 > 0.0 { ((apx * abx + apy * aby) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let (dx, dy) = (apx - t * abx, apy - t * aby);
    dx * dx + dy * dy
}

fn stroke_pixels(a: Point, b: Point, w: f64, width: usize, height: usize, f: &mut impl FnMut(usize, usize)) {
    let r = w / 2.0;
    let r2 = r * r;
    let Some((x0, x1, y0, y1)) = pixel_span(
        a.x.min(b.x) - r,
        a.x.max(b.x) + r,
        a.y.min(b.y) - r,
        a.y.max(b.y) + r,
        width,
        height,
    ) else {
        return;
    };
    for y in y0..=y1 {
        let py = y as f64 + 0.5;
        for x in x0..=x1 {
            if dist2_to_segment(Point::new(x as f64 + 0.5, py), a, b) <= r2 {
                f(x, y);
            }
        }
    }
}

/// Returns a copy of `raster` with `prim` drawn onto it.
pub fn rasterize(raster: &Raster, prim: &Primitive) -> Result<Raster> {
    prim.validate()?;
    let mut out = raster.clone();
    out.draw(prim);
    Ok(out)
}

/// Fraction of the raster covered by ink: sum of coverage over pixel count.
pub fn measure_density(raster: &Raster) -> f64 {
    raster.density()
}

pub fn build_pyramid(raster: &Raster) -> Pyramid {
    Pyramid::build(raster)
}

/// Union of two equally sized rasters (per-pixel maximum).
pub fn overlay(a: &Raster, b: &Raster) -> Result<Raster> {
    let mut out = a.clone();
    out.union_with(b)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn zero_size_is_rejected() {
        assert!(Raster::new(0, 4).is_err());
        assert!(Raster::new(4, 0).is_err());
    }

    #[test]
    fn disc_matches_point_in_disc_scan() {
        let empty = Raster::new(512, 512).unwrap();
        let r = rasterize(&empty, &Primitive::disc(p(256.0, 256.0), 8.0)).unwrap();
        let mut expected = 0;
        for y in 0..512 {
            for x in 0..512 {
                let (dx, dy) = (x as f64 + 0.5 - 256.0, y as f64 + 0.5 - 256.0);
                if (dx * dx + dy * dy).sqrt() <= 4.0 {
                    expected += 1;
                }
            }
        }
        assert_eq!(r.covered_count(), expected);
        let d = measure_density(&r);
        assert!((d - expected as f64 / 262144.0).abs() < 1e-15);
        assert!((d - std::f64::consts::PI * 16.0 / 262144.0).abs() < 0.2 * d);
    }

    #[test]
    fn tiny_disc_between_centers_covers_nothing() {
        let empty = Raster::new(16, 16).unwrap();
        let r = rasterize(&empty, &Primitive::disc(p(4.0, 4.0), 0.5)).unwrap();
        assert_eq!(r, empty);
        assert_eq!(measure_density(&r), 0.0);
    }

    #[test]
    fn segment_matches_distance_scan() {
        let empty = Raster::new(8, 8).unwrap();
        let (a, b) = (p(0.0, 4.0), p(8.0, 4.0));
        let r = rasterize(&empty, &Primitive::segment(a, b, 3.0)).unwrap();
        for y in 0..8 {
            for x in 0..8 {
                let c = p(x as f64 + 0.5, y as f64 + 0.5);
                let inside = dist2_to_segment(c, a, b).sqrt() <= 1.5;
                assert_eq!(r.get(x, y) == 1.0, inside, "pixel ({x},{y})");
            }
        }
        // rows 3 and 4 sit 0.5 away; rows 2 and 5 sit exactly on the 1.5 boundary
        assert_eq!(r.covered_count(), 4 * 8);
    }

    #[test]
    fn primitives_outside_are_clipped() {
        let mut r = Raster::new(10, 10).unwrap();
        assert_eq!(r.draw(&Primitive::disc(p(-20.0, -20.0), 8.0)), 0);
        assert!(r.draw(&Primitive::disc(p(0.0, 0.0), 8.0)) > 0);
    }

    #[test]
    fn invalid_primitives_are_rejected() {
        let r = Raster::new(4, 4).unwrap();
        assert!(rasterize(&r, &Primitive::disc(p(1.0, 1.0), 0.0)).is_err());
        assert!(rasterize(&r, &Primitive::segment(p(0.0, 0.0), p(1.0, 1.0), -1.0)).is_err());
    }

    #[test]
    fn density_extremes() {
        assert_eq!(measure_density(&Raster::new(7, 3).unwrap()), 0.0);
        assert_eq!(measure_density(&Raster::filled(7, 3, 1.0).unwrap()), 1.0);
    }

    #[test]
    fn overlay_identity_and_mismatch() {
        let mut x = Raster::new(32, 32).unwrap();
        x.draw(&Primitive::segment(p(2.0, 10.5), p(30.0, 10.5), 3.0));
        let empty = Raster::new(32, 32).unwrap();
        assert_eq!(overlay(&x, &empty).unwrap(), x);
        assert_eq!(overlay(&x, &x).unwrap(), x);
        assert!(overlay(&x, &Raster::new(16, 32).unwrap()).is_err());
    }
}
