//! Lloyd relaxation of random sites and the Delaunay mesh over them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use uniform_textures::geometry::{delaunay, lloyd_relax, quantization_energy, Point, PointSet};

fn main() -> uniform_textures::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let pts = (0..200).map(|_| Point::new(rng.random_range(0.0..256.0), rng.random_range(0.0..256.0))).collect();
    let start = PointSet::new(256, 256, pts)?;
    let out = lloyd_relax(&start, None, 100, 0.05)?;
    println!(
        "energy {:.1} -> {:.1} in {} steps (last move {:.3} px)",
        quantization_energy(&start, None)?,
        quantization_energy(&out.points, None)?,
        out.iterations,
        out.last_movement
    );
    let tri = delaunay(&out.points)?;
    let edges = tri.edges();
    let mean: f64 = edges.iter().map(|&(a, b)| out.points.points[a].dist(out.points.points[b])).sum::<f64>() / edges.len() as f64;
    println!("{} triangles, {} edges, mean edge {mean:.2} px", tri.triangles.len(), edges.len());
    Ok(())
}
