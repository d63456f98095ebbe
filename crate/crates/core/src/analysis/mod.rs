//! From pairwise similarity ratings to perceptual spaces.

mod indscal;
mod kabsch;
mod matrix;
mod mds;
mod ratings;
mod screening;

pub use indscal::{indscal, IndscalOptions};
pub use kabsch::{kabsch_align, Alignment};
pub use matrix::DissimilarityMatrix;
pub use mds::{classical_mds, kruskal_stress1, mds, mds_with, scree, Embedding, MdsInit, MdsOptions};
pub use ratings::{
    enumerate_pairs, ingest_ratings, pair_count, read_ratings_csv, read_ratings_file, write_ratings_csv, Ingested, ParticipantData,
    RatingRecord, StimulusKey,
};
pub use screening::{screen_participants, ScreeningEntry, ScreeningReport, ScreeningThresholds};

/// Total rating tasks over several studies that each enrol `participants`
/// people, given every study's stimulus count.
pub fn study_plan_total(participants: usize, stimulus_counts: &[usize]) -> usize {
    stimulus_counts.iter().map(|&n| participants * pair_count(n)).sum()
}
