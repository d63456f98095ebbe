//! Crosshatching from independent horizontal and vertical layers.
//!
//! The union always sits between the darker layer and the sum of both.

use uniform_textures::synth::{gen_crosshatch, gen_stimulus_set, TextureSpec, TextureType};

fn main() -> uniform_textures::Result<()> {
    let spec = TextureSpec { width: 128, height: 128, ..TextureSpec::new(TextureType::Crosshatch, 3) };
    let one = gen_crosshatch(0.3, 0.5, &spec)?;
    let p = one.crosshatch.expect("crosshatch parts");
    println!(
        "0.3 x 0.5: h {:.3}, v {:.3}, union {:.3} (bounds {:.3}..{:.3})",
        p.measured_h,
        p.measured_v,
        one.measured_density,
        p.measured_h.max(p.measured_v),
        (p.measured_h + p.measured_v).min(1.0)
    );

    let grid = gen_stimulus_set(&spec, 0.2)?;
    println!("grid at step 0.2: {} stimuli", grid.len());
    for s in grid.iter().step_by(5) {
        println!("  {:<14} {:.3}", s.key.0, s.texture.measured_density);
    }
    Ok(())
}
