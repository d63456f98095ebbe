//! Stippling a radial gradient with weighted Linde-Buzo-Gray.

use uniform_textures::raster::{write_image, Raster};
use uniform_textures::synth::{lbg_stipple, TextureSpec, TextureType};

fn main() -> uniform_textures::Result<()> {
    let n = 256;
    let c = n as f64 / 2.0;
    let target = Raster::from_fn(n, n, |x, y| {
        let r = ((x as f64 + 0.5 - c).hypot(y as f64 + 0.5 - c)) / c;
        (0.7 * (1.0 - r)).clamp(0.0, 1.0)
    })?;
    let spec = TextureSpec { width: n, height: n, ..TextureSpec::new(TextureType::Stipple, 0) };
    let (sites, tex) = lbg_stipple(&target, &spec)?;
    println!("{} stipples, target {:.4}, measured {:.4}", sites.len(), target.density(), tex.measured_density);
    for (x0, x1) in [(0, 32), (64, 96), (112, 144)] {
        println!(
            "  band x {x0}..{x1}: target {:.3} measured {:.3}",
            target.region_density(x0, 112, x1, 144),
            tex.raster.region_density(x0, 112, x1, 144)
        );
    }
    std::fs::create_dir_all("out").ok();
    write_image(&tex.raster, "out/lbg_gradient.png")
}
