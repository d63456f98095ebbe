//! Point-based textures: Lloyd-relaxed stipples and Delaunay triangle meshes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_target, disc_pixel_area, TextureInstance, TextureSpec};
use crate::error::Result;
use crate::geometry::{delaunay, lloyd_relax, Point, PointSet};
use crate::raster::{Primitive, Raster};

/// Upper bound on insert-and-relax rounds before gap filling takes over.
const MAX_ROUNDS: usize = 120;

/// Overshoot accepted without retrying the batch at half size.
const OVERSHOOT_SLACK: f64 = 0.002;

struct State {
    points: PointSet,
    primitives: Vec<Primitive>,
    raster: Raster,
}

impl State {
    fn density(&self) -> f64 {
        self.raster.density()
    }
}

trait PointTexture {
    /// Density grows roughly like `count^(1/EXPONENT)`.
    const EXPONENT: f64;
    const MIN_POINTS: usize;
    fn render(&self, points: &PointSet) -> Result<(Vec<Primitive>, Raster)>;
}

struct Stipples<'a>(&'a TextureSpec);

impl PointTexture for Stipples<'_> {
    const EXPONENT: f64 = 1.0;
    const MIN_POINTS: usize = 0;

    fn render(&self, points: &PointSet) -> Result<(Vec<Primitive>, Raster)> {
        let mut raster = self.0.blank()?;
        let prims: Vec<Primitive> =
            points.points.iter().map(|&p| Primitive::disc(p, self.0.stipple_diameter)).collect();
        for p in &prims {
            raster.draw(p);
        }
        Ok((prims, raster))
    }
}

struct Triangles<'a>(&'a TextureSpec);

impl PointTexture for Triangles<'_> {
    const EXPONENT: f64 = 2.0;
    const MIN_POINTS: usize = 3;

    fn render(&self, points: &PointSet) -> Result<(Vec<Primitive>, Raster)> {
        let mut raster = self.0.blank()?;
        let tri = delaunay(points)?;
        let prims: Vec<Primitive> = tri
            .triangles
            .iter()
            .map(|t| Primitive::TriangleEdges {
                vertices: [points.points[t[0]], points.points[t[1]], points.points[t[2]]],
                width: self.0.stroke_width,
            })
            .collect();
        for p in &prims {
            raster.draw(p);
        }
        Ok((prims, raster))
    }
}

fn random_point(rng: &mut ChaCha8Rng, spec: &TextureSpec) -> Point {
    Point::new(rng.random_range(0.0..spec.width as f64), rng.random_range(0.0..spec.height as f64))
}

fn relaxed_state<T: PointTexture>(tex: &T, spec: &TextureSpec, points: PointSet, iters: usize) -> Result<State> {
    let points = if points.is_empty() {
        points
    } else {
        lloyd_relax(&points, None, iters, spec.lloyd_move_tol)?.points
    };
    let (primitives, raster) = tex.render(&points)?;
    Ok(State { points, primitives, raster })
}

/// Inserts random points in batches, relaxing after each batch, until the
/// density reaches `target`. Returns the states just below and at/above it.
fn approach<T: PointTexture>(tex: &T, spec: &TextureSpec, target: f64, start: State) -> Result<(State, Option<State>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let area = (spec.width * spec.height) as f64;
    let mut below = start;
    // density per point when nothing is known yet
    let unit = match T::EXPONENT {
        1.0 => disc_pixel_area(spec.stipple_diameter) as f64 / area,
        _ => 0.0,
    };
    let mut cap = usize::MAX;
    for _ in 0..MAX_ROUNDS {
        let (n, d) = (below.points.len(), below.density());
        if d >= target {
            return Ok((below, None));
        }
        let wanted = if n > 0 && d > 0.0 {
            n as f64 * (target / d).powf(T::EXPONENT)
        } else if unit > 0.0 {
            target / unit
        } else {
            (n.max(T::MIN_POINTS).max(1) * 2) as f64
        };
        let batch = (((wanted - n as f64) * 0.8).floor() as usize).clamp(1, cap);
        let mut pts = below.points.clone();
        pts.points.extend((0..batch).map(|_| random_point(&mut rng, spec)));
        let next = relaxed_state(tex, spec, pts, spec.relax_iters_per_batch)?;
        if next.density() >= target {
            // overshooting by more than the slack is retried with a smaller batch
            if batch > 1 && next.density() - target > OVERSHOOT_SLACK {
                cap = batch / 2;
                continue;
            }
            return Ok((below, Some(next)));
        }
        cap = usize::MAX;
        below = next;
    }
    Ok((below, None))
}

/// Adds discs centred on uncovered pixels (scan order) until `target` is met.
fn gap_fill(spec: &TextureSpec, mut state: State, target: f64) -> State {
    let (w, h) = state.raster.dims();
    let total = (w * h) as f64;
    let mut covered = state.raster.values().iter().sum::<f64>();
    'scan: for y in 0..h {
        for x in 0..w {
            if covered / total >= target {
                break 'scan;
            }
            if state.raster.get(x, y) < 1.0 {
                let c = Point::new(x as f64 + 0.5, y as f64 + 0.5);
                let prim = Primitive::disc(c, spec.stipple_diameter);
                covered += state.raster.draw(&prim) as f64;
                state.points.points.push(c);
                state.primitives.push(prim);
            }
        }
    }
    state
}

fn closer(target: f64, a: State, b: State) -> State {
    if (b.density() - target).abs() < (a.density() - target).abs() {
        b
    } else {
        a
    }
}

fn finish(spec: &TextureSpec, target: f64, state: State) -> TextureInstance {
    TextureInstance::new(spec, target, state.primitives, state.raster)
}

/// Stipples of `spec.stipple_diameter` added at random and spread by Lloyd
/// relaxation until the covered fraction reaches `target`. The closer of the
/// last state below and the first state at or above the target is returned.
pub fn gen_stipple(target: f64, spec: &TextureSpec) -> Result<TextureInstance> {
    check_target(target)?;
    spec.validate()?;
    let tex = Stipples(spec);
    let empty = relaxed_state(&tex, spec, PointSet::new(spec.width, spec.height, Vec::new())?, 1)?;
    if target == 0.0 {
        return Ok(finish(spec, target, empty));
    }
    let state = match approach(&tex, spec, target, empty)? {
        (below, Some(above)) => closer(target, below, above),
        (below, None) if below.density() >= target => below,
        // saturation: relaxed stipples stalled short of the target
        (below, None) => {
            let before = below.density();
            let filled = gap_fill(spec, below, target);
            log::debug!("stipple gap fill from {before:.4} to {:.4}", filled.density());
            filled
        }
    };
    Ok(finish(spec, target, state))
}

fn three_point_state(spec: &TextureSpec) -> Result<State> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let pts = PointSet::new(spec.width, spec.height, (0..3).map(|_| random_point(&mut rng, spec)).collect())?;
    relaxed_state(&Triangles(spec), spec, pts, spec.lloyd_max_iters)
}

/// Density of the relaxed three-point triangulation, the lowest density a
/// triangle texture can have without being empty.
pub fn triangle_floor(spec: &TextureSpec) -> Result<f64> {
    spec.validate()?;
    Ok(three_point_state(spec)?.density())
}

/// Relaxed points joined by their Delaunay triangulation, edges stroked at
/// `spec.stroke_width`. Targets below [`triangle_floor`] return the closer of
/// the empty and the three-point texture with a warning.
pub fn gen_triangle_texture(target: f64, spec: &TextureSpec) -> Result<TextureInstance> {
    check_target(target)?;
    spec.validate()?;
    let tex = Triangles(spec);
    let empty = State {
        points: PointSet::new(spec.width, spec.height, Vec::new())?,
        primitives: Vec::new(),
        raster: spec.blank()?,
    };
    if target == 0.0 {
        return Ok(finish(spec, target, empty));
    }
    let floor = three_point_state(spec)?;
    if target < floor.density() {
        let floor_density = floor.density();
        let mut out = finish(spec, target, closer(target, empty, floor));
        out.warnings.push(format!(
            "target {target:.3} lies below the three-point triangulation density {floor_density:.3}"
        ));
        return Ok(out);
    }
    let state = match approach(&tex, spec, target, floor)? {
        (below, Some(above)) => closer(target, below, above),
        (below, None) => below,
    };
    let mut out = finish(spec, target, state);
    if (out.measured_density - target).abs() > 0.02 {
        out.warnings.push(format!(
            "measured density {:.3} misses target {target:.3} by more than 0.02",
            out.measured_density
        ));
    }
    Ok(out)
}
