//! Ratings from simulated participants, screened and scaled with INDSCAL.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use uniform_textures::analysis::{
    indscal, ingest_ratings, scree, screen_participants, DissimilarityMatrix, IndscalOptions, RatingRecord,
    ScreeningThresholds, StimulusKey,
};

fn main() -> uniform_textures::Result<()> {
    let n = 11;
    let keys: Vec<String> = (0..n).map(|i| StimulusKey::index("stipple", i).0).collect();
    // a bent line: perceived darkness grows fast, then flattens
    let truth: Vec<[f64; 2]> = (0..n).map(|i| {
        let s = (i as f64 / (n - 1) as f64).sqrt();
        [s, 0.3 * (s * 3.0).sin()]
    }).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut records = Vec::new();
    for p in 0..8 {
        for i in 0..n {
            for j in i..n {
                let d = ((truth[i][0] - truth[j][0]).powi(2) + (truth[i][1] - truth[j][1]).powi(2)).sqrt();
                let r = if p == 7 { rng.random_range(1..=9) } else { (1.0 + 8.0 * d / 1.05 + rng.random_range(-0.5..0.5)).round().clamp(1.0, 9.0) as u8 };
                records.push(RatingRecord::new(format!("p{p}"), keys[i].clone(), keys[j].clone(), r)?);
            }
        }
    }

    let data = ingest_ratings(&records, &keys)?;
    let report = screen_participants(&data, ScreeningThresholds::default());
    for e in &report.entries {
        println!("{}  self-pair {:.2}  r {:?}  flagged {}", e.participant, e.self_pair_statistic, e.correlation.map(|c| (c * 100.0).round() / 100.0), e.flagged);
    }
    let kept: Vec<DissimilarityMatrix> =
        data.participants.iter().filter(|p| !report.flagged().contains(&p.id.as_str())).map(|p| p.matrix.clone()).collect();

    println!("scree {:?}", scree(&DissimilarityMatrix::mean(&kept)?, 3)?);
    let emb = indscal(&kept, 2, IndscalOptions::default())?;
    println!("INDSCAL stress-1 {:.4} after {} sweeps", emb.stress1, emb.iterations);
    for (k, p) in keys.iter().zip(&emb.points) {
        println!("  {k}  ({:+.3}, {:+.3})", p[0], p[1]);
    }
    Ok(())
}
