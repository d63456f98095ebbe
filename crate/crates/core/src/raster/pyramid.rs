use super::Raster;

/// Mean-pooled image pyramid. Level 0 is the source; every further level
/// halves each dimension (rounding up) until a single pixel remains.
///
/// A cell's value is the mean coverage of the source pixels it spans, so edge
/// cells at odd sizes only average their in-bounds pixels and the 1x1 top
/// equals the source density.
#[derive(Clone, Debug)]
pub struct Pyramid {
    levels: Vec<Raster>,
}

impl Pyramid {
    pub fn build(source: &Raster) -> Self {
        let mut levels = vec![source.clone()];
        while levels.last().map(|l| l.dims() != (1, 1)).unwrap_or(false) {
            let k = levels.len();
            let prev = &levels[k - 1];
            let (w, h) = (prev.width().div_ceil(2), prev.height().div_ceil(2));
            let mut next = Raster::new(w, h).expect("non-zero level size");
            for y in 0..h {
                for x in 0..w {
                    next.data[y * w + x] = pooled(source.dims(), prev, k, x, y);
                }
            }
            levels.push(next);
        }
        Self { levels }
    }

    pub fn levels(&self) -> &[Raster] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn level(&self, k: usize) -> &Raster {
        &self.levels[k]
    }

    pub fn top(&self) -> f64 {
        self.levels.last().expect("pyramid has a source level").get(0, 0)
    }

    /// Re-pools every level over the source rectangle `[x0, x1) x [y0, y1)`
    /// after `source` changed there.
    pub fn update_region(&mut self, source: &Raster, x0: usize, y0: usize, x1: usize, y1: usize) {
        let (w0, h0) = source.dims();
        let (x1, y1) = (x1.min(w0), y1.min(h0));
        if x0 >= x1 || y0 >= y1 {
            return;
        }
        for y in y0..y1 {
            let row = y * w0;
            self.levels[0].data[row + x0..row + x1].copy_from_slice(&source.data[row + x0..row + x1]);
        }
        for k in 1..self.levels.len() {
            let (cx0, cy0) = (x0 >> k, y0 >> k);
            let (cx1, cy1) = ((x1 - 1) >> k, (y1 - 1) >> k);
            let (prev_levels, rest) = self.levels.split_at_mut(k);
            let prev = &prev_levels[k - 1];
            let cur = &mut rest[0];
            let w = cur.width();
            for y in cy0..=cy1 {
                for x in cx0..=cx1 {
                    cur.data[y * w + x] = pooled((w0, h0), prev, k, x, y);
                }
            }
        }
    }
}

/// Number of source pixels spanned by cell `(x, y)` at level `k`.
#[inline]
pub(crate) fn cell_area(source: (usize, usize), k: usize, x: usize, y: usize) -> usize {
    let side = 1usize << k;
    let cw = source.0.saturating_sub(x * side).min(side);
    let ch = source.1.saturating_sub(y * side).min(side);
    cw * ch
}

/// Area-weighted mean of the (up to four) children of cell `(x, y)` at level `k`.
fn pooled(source: (usize, usize), prev: &Raster, k: usize, x: usize, y: usize) -> f64 {
    let mut sum = 0.0;
    let mut area = 0usize;
    for cy in 2 * y..(2 * y + 2).min(prev.height()) {
        for cx in 2 * x..(2 * x + 2).min(prev.width()) {
            let a = cell_area(source, k - 1, cx, cy);
            sum += prev.get(cx, cy) * a as f64;
            area += a;
        }
    }
    sum / area as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::raster::Primitive;

    #[test]
    fn constant_image_levels() {
        let p = Pyramid::build(&Raster::filled(4, 4, 1.0).unwrap());
        let dims: Vec<_> = p.levels().iter().map(|l| l.dims()).collect();
        assert_eq!(dims, vec![(4, 4), (2, 2), (1, 1)]);
        assert!(p.levels().iter().all(|l| l.values().iter().all(|&v| v == 1.0)));
    }

    #[test]
    fn block_mean() {
        let r = Raster::from_vec(2, 2, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let p = Pyramid::build(&r);
        assert_eq!(p.len(), 2);
        assert_eq!(p.top(), 0.25);
    }

    #[test]
    fn odd_sizes_keep_density_at_top() {
        for (w, h) in [(3, 3), (5, 2), (7, 13), (1, 9), (33, 17)] {
            let r = Raster::from_fn(w, h, |x, y| ((x * 7 + y * 3) % 5) as f64 / 4.0).unwrap();
            let p = Pyramid::build(&r);
            assert!((p.top() - r.density()).abs() < 1e-12, "{w}x{h}");
            for pair in p.levels().windows(2) {
                assert_eq!(pair[1].width(), pair[0].width().div_ceil(2));
                assert_eq!(pair[1].height(), pair[0].height().div_ceil(2));
            }
        }
    }

    #[test]
    fn region_update_matches_rebuild() {
        let mut r = Raster::new(37, 20).unwrap();
        let mut p = Pyramid::build(&r);
        let prim = Primitive::segment(Point::new(3.0, 7.5), Point::new(30.0, 7.5), 3.0);
        r.draw(&prim);
        p.update_region(&r, 1, 5, 33, 10);
        let fresh = Pyramid::build(&r);
        for (a, b) in p.levels().iter().zip(fresh.levels()) {
            for (u, v) in a.values().iter().zip(b.values()) {
                assert!((u - v).abs() < 1e-12);
            }
        }
    }
}
