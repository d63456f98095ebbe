//! Flags participants whose answers look random.
//!
//! Two signals: identical stimuli should be rated as very similar, and a
//! participant's dissimilarities should correlate with everyone else's.
//! Flagging never excludes anyone; that stays a caller decision.

use serde::Serialize;

use super::Ingested;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScreeningThresholds {
    /// Flag when the mean self-pair rating minus one exceeds this.
    pub max_self_pair: f64,
    /// Flag when the correlation with the rest of the group falls below this.
    pub min_correlation: f64,
}

impl Default for ScreeningThresholds {
    fn default() -> Self {
        Self { max_self_pair: 2.0, min_correlation: 0.2 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScreeningEntry {
    pub participant: String,
    /// Mean self-pair rating minus one (0 = every self-pair rated "very similar").
    pub self_pair_statistic: f64,
    /// Pearson correlation of off-diagonal dissimilarities with the mean of
    /// the other participants; `None` when undefined.
    pub correlation: Option<f64>,
    pub flagged: bool,
    pub reasons: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScreeningReport {
    pub thresholds: ScreeningThresholds,
    pub entries: Vec<ScreeningEntry>,
    pub notes: Vec<String>,
}

impl ScreeningReport {
    pub fn flagged(&self) -> Vec<&str> {
        self.entries.iter().filter(|e| e.flagged).map(|e| e.participant.as_str()).collect()
    }
}

pub(crate) fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len() as f64;
    if a.len() != b.len() || a.len() < 2 {
        return None;
    }
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    (saa > 0.0 && sbb > 0.0).then(|| sab / (saa * sbb).sqrt())
}

pub fn screen_participants(data: &Ingested, thresholds: ScreeningThresholds) -> ScreeningReport {
    let uppers: Vec<Vec<f64>> = data.participants.iter().map(|p| p.matrix.upper()).collect();
    let k = uppers.len();
    let mut notes = Vec::new();
    if k < 2 {
        notes.push("fewer than two participants: correlation criterion not applied".to_owned());
    }
    let totals: Vec<f64> = if k > 0 {
        (0..uppers[0].len()).map(|i| uppers.iter().map(|u| u[i]).sum()).collect()
    } else {
        Vec::new()
    };

    let entries = data
        .participants
        .iter()
        .zip(&uppers)
        .map(|(p, upper)| {
            let self_pair_statistic = p.self_ratings.iter().sum::<f64>() / p.self_ratings.len() as f64 - 1.0;
            let correlation = (k >= 2)
                .then(|| {
                    let others: Vec<f64> =
                        totals.iter().zip(upper).map(|(t, v)| (t - v) / (k - 1) as f64).collect();
                    pearson(upper, &others)
                })
                .flatten();
            let mut reasons = Vec::new();
            if self_pair_statistic > thresholds.max_self_pair {
                reasons.push(format!(
                    "self-pair statistic {self_pair_statistic:.3} > {}",
                    thresholds.max_self_pair
                ));
            }
            match correlation {
                Some(r) if r < thresholds.min_correlation => {
                    reasons.push(format!("group correlation {r:.3} < {}", thresholds.min_correlation))
                }
                None if k >= 2 => reasons.push("group correlation undefined (constant ratings)".to_owned()),
                _ => {}
            }
            ScreeningEntry {
                participant: p.id.clone(),
                self_pair_statistic,
                correlation,
                flagged: !reasons.is_empty(),
                reasons,
            }
        })
        .collect();
    ScreeningReport { thresholds, entries, notes }
}
