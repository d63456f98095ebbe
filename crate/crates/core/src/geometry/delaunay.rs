//! Incremental Bowyer-Watson triangulation.
//!
//! Coordinates are normalized to the bounding-box diagonal before any
//! predicate is evaluated; a point counts as inside a circumcircle only when
//! the in-circle determinant exceeds [`IN_CIRCLE_EPS`]. Cocircular ties thus
//! keep the triangle that already exists, so the result depends only on the
//! insertion order, which is the input order.

use super::{Point, PointSet};
use crate::error::{Error, Result};

pub const IN_CIRCLE_EPS: f64 = 1e-9;

const NONE: usize = usize::MAX;
const SUPER_SCALE: f64 = 100.0;

#[derive(Clone, Debug, PartialEq)]
pub struct Triangulation {
    pub vertices: PointSet,
    /// Counter-clockwise index triples into `vertices.points`.
    pub triangles: Vec<[usize; 3]>,
}

impl Triangulation {
    /// Unique undirected edges, each as `(lo, hi)`, in first-seen order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                let e = (a.min(b), a.max(b));
                if seen.insert(e) {
                    out.push(e);
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy)]
struct Tri {
    v: [usize; 3],
    /// `n[i]` is the neighbour across the edge opposite `v[i]`.
    n: [usize; 3],
    alive: bool,
}

#[inline]
fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// In-circle determinant: positive when `p` lies inside the circumcircle of
/// the counter-clockwise triangle `a, b, c`.
pub fn in_circle(a: Point, b: Point, c: Point, p: Point) -> f64 {
    let (adx, ady) = (a.x - p.x, a.y - p.y);
    let (bdx, bdy) = (b.x - p.x, b.y - p.y);
    let (cdx, cdy) = (c.x - p.x, c.y - p.y);
    let ad = adx * adx + ady * ady;
    let bd = bdx * bdx + bdy * bdy;
    let cd = cdx * cdx + cdy * cdy;
    adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx)
}

struct Builder {
    pts: Vec<Point>,
    tris: Vec<Tri>,
    free: Vec<usize>,
    mark: Vec<u32>,
    stamp: u32,
    last: usize,
}

impl Builder {
    fn alloc(&mut self, t: Tri) -> usize {
        if let Some(i) = self.free.pop() {
            self.tris[i] = t;
            i
        } else {
            self.tris.push(t);
            self.mark.push(0);
            self.tris.len() - 1
        }
    }

    fn locate(&self, p: Point) -> usize {
        let mut t = self.last;
        let mut steps = 0usize;
        'walk: loop {
            let tri = &self.tris[t];
            for k in 0..3 {
                let e = (k + steps) % 3;
                let a = self.pts[tri.v[(e + 1) % 3]];
                let b = self.pts[tri.v[(e + 2) % 3]];
                if orient(a, b, p) < 0.0 && tri.n[e] != NONE {
                    t = tri.n[e];
                    steps += 1;
                    if steps > 4 * self.tris.len() {
                        break 'walk;
                    }
                    continue 'walk;
                }
            }
            return t;
        }
        // walking cycled on a degenerate configuration; fall back to a scan
        (0..self.tris.len())
            .find(|&i| {
                let tri = &self.tris[i];
                tri.alive
                    && (0..3).all(|e| orient(self.pts[tri.v[(e + 1) % 3]], self.pts[tri.v[(e + 2) % 3]], p) >= 0.0)
            })
            .unwrap_or(self.last)
    }

    fn circle_contains(&self, t: usize, p: Point) -> bool {
        let [a, b, c] = self.tris[t].v;
        in_circle(self.pts[a], self.pts[b], self.pts[c], p) > IN_CIRCLE_EPS
    }

    fn insert(&mut self, vi: usize) {
        let p = self.pts[vi];
        let start = self.locate(p);
        if self.tris[start].v.iter().any(|&v| self.pts[v].dist2(p) < 1e-24) {
            return;
        }

        self.stamp += 1;
        let stamp = self.stamp;
        let mut cavity = vec![start];
        self.mark[start] = stamp;
        let mut i = 0;
        while i < cavity.len() {
            let t = cavity[i];
            i += 1;
            for e in 0..3 {
                let nb = self.tris[t].n[e];
                if nb != NONE && self.mark[nb] != stamp && self.circle_contains(nb, p) {
                    self.mark[nb] = stamp;
                    cavity.push(nb);
                }
            }
        }

        // (a, b, outside neighbour, old cavity triangle)
        let mut boundary = Vec::new();
        for &t in &cavity {
            let tri = self.tris[t];
            for e in 0..3 {
                let nb = tri.n[e];
                if nb == NONE || self.mark[nb] != stamp {
                    boundary.push((tri.v[(e + 1) % 3], tri.v[(e + 2) % 3], nb, t));
                }
            }
        }
        for &t in &cavity {
            self.tris[t].alive = false;
        }

        let mut created = Vec::with_capacity(boundary.len());
        for &(a, b, nb, old) in &boundary {
            let id = self.alloc(Tri { v: [a, b, vi], n: [NONE, NONE, nb], alive: true });
            if nb != NONE {
                let slot = self.tris[nb].n.iter().position(|&x| x == old).expect("adjacency is symmetric");
                self.tris[nb].n[slot] = id;
            }
            created.push(id);
        }
        for &t in &created {
            let [a, b, _] = self.tris[t].v;
            let after = created.iter().copied().find(|&u| self.tris[u].v[0] == b).expect("closed fan");
            let before = created.iter().copied().find(|&u| self.tris[u].v[1] == a).expect("closed fan");
            self.tris[t].n[0] = after;
            self.tris[t].n[1] = before;
        }
        // released only now so no slot is reused while neighbours still name it
        self.free.extend_from_slice(&cavity);
        self.last = created[0];
    }
}

/// Delaunay triangulation of `points`, covering their convex hull.
pub fn delaunay(points: &PointSet) -> Result<Triangulation> {
    let n = points.points.len();
    if n < 3 {
        return Err(Error::DegenerateInput(format!("need at least 3 points, got {n}")));
    }
    let (mut minx, mut miny, mut maxx, mut maxy) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for p in &points.points {
        minx = minx.min(p.x);
        miny = miny.min(p.y);
        maxx = maxx.max(p.x);
        maxy = maxy.max(p.y);
    }
    let scale = ((maxx - minx).powi(2) + (maxy - miny).powi(2)).sqrt();
    if !(scale > 0.0) {
        return Err(Error::DegenerateInput("all points coincide".into()));
    }
    let mut pts: Vec<Point> =
        points.points.iter().map(|p| Point::new((p.x - minx) / scale, (p.y - miny) / scale)).collect();

    let anchor = pts[0];
    let far = pts.iter().copied().max_by(|a, b| a.dist2(anchor).total_cmp(&b.dist2(anchor))).unwrap();
    if pts.iter().all(|&q| orient(anchor, far, q).abs() <= IN_CIRCLE_EPS) {
        return Err(Error::DegenerateInput("all points are collinear".into()));
    }

    let m = SUPER_SCALE;
    pts.push(Point::new(-m, -m));
    pts.push(Point::new(m, -m));
    pts.push(Point::new(0.0, m));
    let mut b = Builder {
        pts,
        tris: vec![Tri { v: [n, n + 1, n + 2], n: [NONE; 3], alive: true }],
        free: Vec::new(),
        mark: vec![0],
        stamp: 0,
        last: 0,
    };
    for vi in 0..n {
        b.insert(vi);
    }

    let triangles: Vec<[usize; 3]> =
        b.tris.iter().filter(|t| t.alive && t.v.iter().all(|&v| v < n)).map(|t| t.v).collect();
    if triangles.is_empty() {
        return Err(Error::DegenerateInput("no triangle survived; input is degenerate".into()));
    }
    Ok(Triangulation { vertices: points.clone(), triangles })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(pts: &[(f64, f64)]) -> PointSet {
        PointSet::new(100, 100, pts.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap()
    }

    #[test]
    fn three_points_one_triangle() {
        let t = delaunay(&set(&[(1.0, 1.0), (5.0, 1.0), (2.0, 4.0)])).unwrap();
        assert_eq!(t.triangles.len(), 1);
        let [a, b, c] = t.triangles[0];
        let p = &t.vertices.points;
        assert!(orient(p[a], p[b], p[c]) > 0.0);
    }

    #[test]
    fn square_splits_into_two() {
        let pts = set(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        let t = delaunay(&pts).unwrap();
        assert_eq!(t.triangles.len(), 2);
        let again = delaunay(&pts).unwrap();
        assert_eq!(t.triangles, again.triangles);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(delaunay(&set(&[(0.0, 0.0), (1.0, 1.0)])), Err(Error::DegenerateInput(_))));
        assert!(matches!(
            delaunay(&set(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0), (3.0, 3.0)])),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn duplicates_are_skipped() {
        let t = delaunay(&set(&[(0.0, 0.0), (4.0, 0.0), (0.0, 4.0), (4.0, 0.0)])).unwrap();
        assert_eq!(t.triangles.len(), 1);
    }
}
