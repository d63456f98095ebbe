//! From an embedding to perceptually uniform density levels.

use uniform_textures::reparam::{
    fit_curve, levels_from_embedding, paper_levels, paper_params, sigmoid_inverse, LabeledEmbedding,
};

fn main() -> uniform_textures::Result<()> {
    // 21 levels placed along an arc by the stipple response curve
    let p = paper_params("stipple")?;
    let densities: Vec<f64> = (0..21).map(|i| i as f64 * 0.05).collect();
    let points: Vec<[f64; 2]> = densities
        .iter()
        .map(|&d| {
            let s = sigmoid_inverse(&p, d).unwrap() * std::f64::consts::FRAC_PI_2;
            [s.cos(), s.sin()]
        })
        .collect();
    let emb = LabeledEmbedding::new(points, densities)?;

    let searched = fit_curve(&emb, 3, None)?;
    println!("window search: {:?}", searched.window_errors);
    println!("chosen window {} (sse {:.2e}), curve length {:.4}", searched.window, searched.sse, searched.curve.length);

    let r = levels_from_embedding(&emb, 3, Some(7), 5, false)?;
    println!("arc-length levels  {:.3?}", r.levels);
    println!("fitted sigmoid     a {:.4} b {:.4} (rmse {:.4})", r.sigmoid.a, r.sigmoid.b, r.sigmoid.rmse);
    println!("published levels   {:?}", paper_levels("stipple")?);
    Ok(())
}
