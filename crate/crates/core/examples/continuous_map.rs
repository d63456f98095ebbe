//! A left-to-right ramp of perceived darkness rendered with each texture.

use uniform_textures::raster::Raster;
use uniform_textures::synth::{continuous_map, PerceptualMapping, TextureSpec, TextureType};

fn main() -> uniform_textures::Result<()> {
    let field = Raster::from_fn(192, 96, |x, _| x as f64 / 191.0)?;
    for t in [TextureType::Stipple, TextureType::HatchH, TextureType::Triangle] {
        let mapping = PerceptualMapping::paper(t.as_str())?;
        let map = continuous_map(&field, &mapping, t, &TextureSpec::new(t, 2))?;
        println!("{:<9} block mae {:.4} over {} blocks", t.as_str(), map.block_mae(0.0), map.blocks.len());
        let row: Vec<String> = map.blocks.iter().filter(|b| b.by == 0).map(|b| format!("{:.2}/{:.2}", b.target, b.measured)).collect();
        println!("  target/measured by column: {}", row.join(" "));
        for w in &map.warnings {
            println!("  warning: {w}");
        }
    }
    Ok(())
}
