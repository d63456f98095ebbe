//! A rating session driven in-process, exported as CSV and read back.

use uniform_textures::analysis::{ingest_ratings, read_ratings_csv, study_plan_total};
use uniform_textures::study::StudySession;

fn main() -> uniform_textures::Result<()> {
    let keys: Vec<String> = (0..21).map(|i| format!("triangle:{i:02}")).collect();
    let mut s = StudySession::new("demo", "someone", keys.clone(), 42)?;
    println!("{} pairs; the three studies together: {} tasks for 20 people", s.pair_count(), study_plan_total(20, &[21, 26, 21]));
    while let Some(task) = s.next_task() {
        let (a, b) = (task.left[9..].parse::<i32>().unwrap(), task.right[9..].parse::<i32>().unwrap());
        let rating = (1 + (a - b).abs() * 8 / 20) as u8;
        s.submit(task.pair_index, rating).expect("in order");
    }
    let csv = s.export_csv()?;
    println!("{}", csv.lines().take(4).collect::<Vec<_>>().join("\n"));
    let data = ingest_ratings(&read_ratings_csv(csv.as_bytes())?, &keys)?;
    println!("ingested {} ratings, d(00, 20) = {}", data.accepted_records, data.participants[0].matrix.get(0, 20));
    Ok(())
}
