//! A stimulus series 0, 0.05, ..., 1 and how close each member lands.

use uniform_textures::synth::{gen_stimulus_set, TextureSpec, TextureType};

fn main() -> uniform_textures::Result<()> {
    let spec = TextureSpec { width: 128, height: 128, ..TextureSpec::new(TextureType::Stipple, 7) };
    let set = gen_stimulus_set(&spec, 0.05)?;
    let mut worst = 0.0f64;
    for s in &set {
        let err = s.texture.measured_density - s.texture.target_density;
        worst = worst.max(err.abs());
        println!("{}  target {:.2}  measured {:.4}  error {err:+.4}", s.key.0, s.texture.target_density, s.texture.measured_density);
    }
    println!("{} stimuli, worst |error| {worst:.4}", set.len());
    Ok(())
}
