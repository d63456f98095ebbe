//! One texture of each single-layer type at a chosen density.
//!
//! cargo run --release --example generate_texture -- 0.35 out

use uniform_textures::synth::{generate, TextureSpec, TextureType};

fn main() -> uniform_textures::Result<()> {
    let mut args = std::env::args().skip(1);
    let target: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.35);
    let dir = args.next().unwrap_or_else(|| "out".into());

    for t in [TextureType::Stipple, TextureType::HatchH, TextureType::HatchV, TextureType::Triangle] {
        let spec = TextureSpec { width: 256, height: 256, ..TextureSpec::new(t, 1) };
        let tex = generate(target, &spec)?;
        let path = tex.write_to(&dir, None)?;
        println!(
            "{:<9} target {target:.3} measured {:.4} ({} primitives) -> {}",
            t.as_str(),
            tex.measured_density,
            tex.primitives.len(),
            path.display()
        );
        for w in &tex.warnings {
            println!("  warning: {w}");
        }
    }
    Ok(())
}
