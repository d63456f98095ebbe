//! Study design and rating ingestion.
//!
//! Ratings use a 1 (very similar) to 9 (very different) scale and become
//! dissimilarities `rating - 1`. Each participant rates every unordered pair
//! of stimuli, self-pairs included, so `n(n-1)/2 + n` tasks per person.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::DissimilarityMatrix;
use crate::error::{invalid, Error, Result};

pub fn pair_count(n: usize) -> usize {
    n * (n - 1) / 2 + n
}

/// All unordered pairs `(i, j)` including self-pairs, in a seeded shuffled
/// presentation order with left/right sides randomized.
pub fn enumerate_pairs(n: usize, seed: u64) -> Result<Vec<(usize, usize)>> {
    if n == 0 {
        return Err(invalid("a study needs at least one stimulus"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(pair_count(n));
    for i in 0..n {
        for j in i..n {
            pairs.push((i, j));
        }
    }
    pairs.shuffle(&mut rng);
    for p in &mut pairs {
        if rng.random_bool(0.5) {
            *p = (p.1, p.0);
        }
    }
    Ok(pairs)
}

/// A stimulus key of the form `type:index` (`stipple:07`) or
/// `type:dhxdv` (`hatch:0.2x0.4`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StimulusKey(pub String);

impl StimulusKey {
    pub fn parse(s: &str) -> Result<Self> {
        let (kind, label) = s.split_once(':').ok_or_else(|| invalid(format!("stimulus key {s:?} lacks a ':'")))?;
        if kind.is_empty() || label.is_empty() {
            return Err(invalid(format!("malformed stimulus key {s:?}")));
        }
        let key = Self(s.to_owned());
        key.numbers().ok_or_else(|| invalid(format!("stimulus key {s:?} has a non-numeric label")))?;
        Ok(key)
    }

    pub fn texture(&self) -> &str {
        self.0.split_once(':').map_or("", |(k, _)| k)
    }

    /// Numeric label parts: one for an index, two for a crosshatch pair.
    pub fn numbers(&self) -> Option<Vec<f64>> {
        let (_, label) = self.0.split_once(':')?;
        label.split('x').map(|p| p.parse::<f64>().ok()).collect()
    }

    pub fn index(texture: &str, i: usize) -> Self {
        Self(format!("{texture}:{i:02}"))
    }

    pub fn crosshatch(dh: f64, dv: f64) -> Self {
        Self(format!("hatch:{dh:.1}x{dv:.1}"))
    }

    /// Sorted distinct keys, ordered by texture then numerically by label.
    pub fn sorted_unique<'a>(keys: impl IntoIterator<Item = &'a str>) -> Result<Vec<StimulusKey>> {
        let mut out: Vec<StimulusKey> = Vec::new();
        for k in keys {
            let key = Self::parse(k)?;
            if !out.contains(&key) {
                out.push(key);
            }
        }
        out.sort_by(|a, b| {
            a.texture().cmp(b.texture()).then_with(|| {
                let (x, y) = (a.numbers().unwrap_or_default(), b.numbers().unwrap_or_default());
                x.partial_cmp(&y).unwrap_or(std::cmp::Ordering::Equal)
            })
        });
        Ok(out)
    }
}

impl std::fmt::Display for StimulusKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatingRecord {
    pub participant: String,
    pub stim_a: String,
    pub stim_b: String,
    pub rating: u8,
    #[serde(skip)]
    pub timestamp: Option<String>,
}

impl RatingRecord {
    pub fn new(participant: impl Into<String>, stim_a: impl Into<String>, stim_b: impl Into<String>, rating: u8) -> Result<Self> {
        if !(1..=9).contains(&rating) {
            return Err(invalid(format!("rating {rating} outside 1..9")));
        }
        Ok(Self { participant: participant.into(), stim_a: stim_a.into(), stim_b: stim_b.into(), rating, timestamp: None })
    }
}

#[derive(Deserialize)]
struct CsvRow {
    participant: String,
    stim_a: String,
    stim_b: String,
    rating: String,
}

/// Parses a `participant,stim_a,stim_b,rating` CSV. Every malformed row is
/// reported with its line number.
pub fn read_ratings_csv<R: Read>(reader: R) -> Result<Vec<RatingRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::Validation(format!("cannot read header: {e}")))?.clone();
    let expected = ["participant", "stim_a", "stim_b", "rating"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(Error::Validation(format!(
            "line 1: header must be `{}`, got `{}`",
            expected.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut records = Vec::new();
    let mut problems = Vec::new();
    for (i, row) in rdr.deserialize::<CsvRow>().enumerate() {
        let line = i + 2;
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                problems.push(format!("line {line}: {e}"));
                continue;
            }
        };
        let rating = match row.rating.parse::<u8>() {
            Ok(v) if (1..=9).contains(&v) => v,
            _ => {
                problems.push(format!("line {line}: rating {:?} outside 1..9", row.rating));
                continue;
            }
        };
        for key in [&row.stim_a, &row.stim_b] {
            if let Err(e) = StimulusKey::parse(key) {
                problems.push(format!("line {line}: {e}"));
            }
        }
        if row.participant.is_empty() {
            problems.push(format!("line {line}: empty participant id"));
        }
        records.push(RatingRecord::new(row.participant, row.stim_a, row.stim_b, rating)?);
    }
    if !problems.is_empty() {
        return Err(Error::Validation(problems.join("\n")));
    }
    if records.is_empty() {
        return Err(Error::Validation("no rating rows".into()));
    }
    Ok(records)
}

pub fn read_ratings_file(path: impl AsRef<Path>) -> Result<Vec<RatingRecord>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::Io { path: path.to_owned(), source: e })?;
    read_ratings_csv(file)
}

pub fn write_ratings_csv<W: Write>(writer: W, records: &[RatingRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| Error::Validation(format!("csv write failed: {e}"));
    w.write_record(["participant", "stim_a", "stim_b", "rating"]).map_err(io)?;
    for r in records {
        w.write_record([r.participant.as_str(), &r.stim_a, &r.stim_b, &r.rating.to_string()]).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Validation(format!("csv write failed: {e}")))?;
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct ParticipantData {
    pub id: String,
    /// `rating - 1`, averaged over repeats, zero diagonal.
    pub matrix: DissimilarityMatrix,
    /// Mean raw rating (1..9) each stimulus received against itself.
    pub self_ratings: Vec<f64>,
    /// Pairs rated more than once (aggregated by the mean).
    pub duplicates: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Ingested {
    pub stimuli: Vec<String>,
    pub participants: Vec<ParticipantData>,
    pub accepted_records: usize,
}

impl Ingested {
    pub fn matrices(&self) -> Vec<DissimilarityMatrix> {
        self.participants.iter().map(|p| p.matrix.clone()).collect()
    }
}

/// Groups ratings by participant and turns each complete design into a
/// dissimilarity matrix. Missing pairs are fatal and listed per participant.
pub fn ingest_ratings(records: &[RatingRecord], stimuli: &[String]) -> Result<Ingested> {
    let n = stimuli.len();
    if n == 0 {
        return Err(invalid("empty stimulus set"));
    }
    let index: HashMap<&str, usize> = stimuli.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let mut problems = Vec::new();
    let mut order: Vec<&str> = Vec::new();
    let mut sums: HashMap<&str, (Vec<f64>, Vec<u32>)> = HashMap::new();

    for (row, r) in records.iter().enumerate() {
        if !(1..=9).contains(&r.rating) {
            problems.push(format!("record {row}: rating {} outside 1..9", r.rating));
            continue;
        }
        let (Some(&a), Some(&b)) = (index.get(r.stim_a.as_str()), index.get(r.stim_b.as_str())) else {
            problems.push(format!("record {row}: unknown stimulus in ({}, {})", r.stim_a, r.stim_b));
            continue;
        };
        let entry = sums.entry(r.participant.as_str()).or_insert_with(|| {
            order.push(r.participant.as_str());
            (vec![0.0; n * n], vec![0; n * n])
        });
        let (i, j) = (a.min(b), a.max(b));
        entry.0[i * n + j] += r.rating as f64;
        entry.1[i * n + j] += 1;
    }

    let mut participants = Vec::new();
    for id in order {
        let (sum, count) = &sums[id];
        let mut missing = Vec::new();
        let mut duplicates = Vec::new();
        for i in 0..n {
            for j in i..n {
                match count[i * n + j] {
                    0 => missing.push(format!("({}, {})", stimuli[i], stimuli[j])),
                    1 => {}
                    _ => duplicates.push((i, j)),
                }
            }
        }
        if !missing.is_empty() {
            problems.push(format!("participant {id}: {} missing pairs: {}", missing.len(), missing.join(" ")));
            continue;
        }
        let mean = |i: usize, j: usize| sum[i * n + j] / count[i * n + j] as f64;
        let self_ratings = (0..n).map(|i| mean(i, i)).collect();
        let matrix = DissimilarityMatrix::from_fn(n, id, |i, j| mean(i, j) - 1.0)?;
        participants.push(ParticipantData { id: id.to_owned(), matrix, self_ratings, duplicates });
    }

    if !problems.is_empty() {
        return Err(Error::Validation(problems.join("\n")));
    }
    if participants.is_empty() {
        return Err(Error::Validation("no ratings".into()));
    }
    Ok(Ingested { stimuli: stimuli.to_vec(), participants, accepted_records: records.len() })
}
