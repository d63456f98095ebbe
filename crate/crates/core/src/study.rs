//! Rating sessions: one participant working through every stimulus pair in
//! a seeded order, plus an append-only journal from which sessions are
//! rebuilt after a restart.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{enumerate_pairs, write_ratings_csv, RatingRecord, StimulusKey};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SubmitError {
    #[error("rating {0} outside 1..9")]
    InvalidRating(u8),
    #[error("expected a rating for pair {expected}, got pair {got}")]
    OutOfOrder { expected: usize, got: usize },
    #[error("session is already complete")]
    Complete,
}

/// The pair currently shown to a participant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Task {
    pub pair_index: usize,
    pub left: String,
    pub right: String,
}

#[derive(Clone, Debug)]
pub struct StudySession {
    pub id: String,
    pub participant: String,
    pub seed: u64,
    pub stimuli: Vec<String>,
    pairs: Vec<(usize, usize)>,
    records: Vec<RatingRecord>,
}

impl StudySession {
    pub fn new(id: impl Into<String>, participant: impl Into<String>, stimuli: Vec<String>, seed: u64) -> Result<Self> {
        for s in &stimuli {
            StimulusKey::parse(s)?;
        }
        let pairs = enumerate_pairs(stimuli.len(), seed)?;
        let participant = participant.into();
        if participant.is_empty() {
            return Err(invalid("participant id must not be empty"));
        }
        Ok(Self { id: id.into(), participant, seed, stimuli, pairs, records: Vec::new() })
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    /// Index of the next pair to rate.
    pub fn cursor(&self) -> usize {
        self.records.len()
    }

    pub fn is_complete(&self) -> bool {
        self.cursor() == self.pairs.len()
    }

    pub fn task(&self, pair_index: usize) -> Option<Task> {
        let &(a, b) = self.pairs.get(pair_index)?;
        Some(Task { pair_index, left: self.stimuli[a].clone(), right: self.stimuli[b].clone() })
    }

    pub fn next_task(&self) -> Option<Task> {
        self.task(self.cursor())
    }

    /// Accepts the rating for the pair under the cursor only.
    pub fn submit(&mut self, pair_index: usize, rating: u8) -> std::result::Result<(), SubmitError> {
        if !(1..=9).contains(&rating) {
            return Err(SubmitError::InvalidRating(rating));
        }
        if self.is_complete() {
            return Err(SubmitError::Complete);
        }
        if pair_index != self.cursor() {
            return Err(SubmitError::OutOfOrder { expected: self.cursor(), got: pair_index });
        }
        let task = self.task(pair_index).expect("cursor within the design");
        let record = RatingRecord::new(&self.participant, task.left, task.right, rating).expect("rating checked");
        self.records.push(record);
        Ok(())
    }

    pub fn records(&self) -> &[RatingRecord] {
        &self.records
    }

    pub fn export_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        write_ratings_csv(&mut buf, &self.records)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

/// One line of a session journal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum JournalEvent {
    Create { id: String, participant: String, seed: u64, stimuli: Vec<String> },
    Rating { pair_index: usize, rating: u8 },
}

/// Append-only JSONL file per session, named `{id}.jsonl`.
#[derive(Clone, Debug)]
pub struct Journal {
    dir: PathBuf,
}

impl Journal {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(|source| Error::Io { path: dir.clone(), source })?;
        Ok(Self { dir })
    }

    fn path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.jsonl"))
    }

    pub fn append(&self, id: &str, event: &JournalEvent) -> Result<()> {
        let path = self.path(id);
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|source| Error::Io { path: path.clone(), source })?;
        let line = serde_json::to_string(event).expect("journal events serialize");
        writeln!(f, "{line}").map_err(|source| Error::Io { path, source })
    }

    /// Rebuilds every journalled session. A truncated last line (a crash
    /// mid-write) is ignored; anything else malformed is an error.
    pub fn replay(&self) -> Result<Vec<StudySession>> {
        let mut paths: Vec<PathBuf> = std::fs::read_dir(&self.dir)
            .map_err(|source| Error::Io { path: self.dir.clone(), source })?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
            .collect();
        paths.sort();
        paths.iter().map(|p| replay_file(p)).collect()
    }
}

fn replay_file(path: &Path) -> Result<StudySession> {
    let file = File::open(path).map_err(|source| Error::Io { path: path.to_owned(), source })?;
    let lines: Vec<String> = BufReader::new(file)
        .lines()
        .collect::<std::io::Result<_>>()
        .map_err(|source| Error::Io { path: path.to_owned(), source })?;
    let bad = |line: usize, msg: String| invalid(format!("{} line {line}: {msg}", path.display()));
    let mut session: Option<StudySession> = None;
    for (i, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let event: JournalEvent = match serde_json::from_str(line) {
            Ok(e) => e,
            Err(_) if i + 1 == lines.len() => break,
            Err(e) => return Err(bad(i + 1, e.to_string())),
        };
        match (event, session.as_mut()) {
            (JournalEvent::Create { id, participant, seed, stimuli }, None) => {
                session = Some(StudySession::new(id, participant, stimuli, seed)?);
            }
            (JournalEvent::Rating { pair_index, rating }, Some(s)) => {
                s.submit(pair_index, rating).map_err(|e| bad(i + 1, e.to_string()))?;
            }
            (JournalEvent::Create { .. }, Some(_)) => return Err(bad(i + 1, "second create event".into())),
            (JournalEvent::Rating { .. }, None) => return Err(bad(i + 1, "rating before create".into())),
        }
    }
    session.ok_or_else(|| invalid(format!("{}: empty journal", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn keys(n: usize) -> Vec<String> {
        (0..n).map(|i| StimulusKey::index("stipple", i).0).collect()
    }

    #[test]
    fn full_session() {
        let mut s = StudySession::new("a", "p1", keys(21), 4).unwrap();
        assert_eq!(s.pair_count(), 231);
        while let Some(t) = s.next_task() {
            s.submit(t.pair_index, 1 + (t.pair_index % 9) as u8).unwrap();
        }
        assert!(s.is_complete());
        assert_eq!(s.submit(231, 3), Err(SubmitError::Complete));
        let csv = s.export_csv().unwrap();
        assert_eq!(csv.lines().count(), 232);
        let back = crate::analysis::read_ratings_csv(csv.as_bytes()).unwrap();
        crate::analysis::ingest_ratings(&back, &keys(21)).unwrap();
    }

    #[test]
    fn rejects_bad_submissions() {
        let mut s = StudySession::new("a", "p1", keys(3), 0).unwrap();
        assert_eq!(s.submit(0, 0), Err(SubmitError::InvalidRating(0)));
        assert_eq!(s.submit(0, 10), Err(SubmitError::InvalidRating(10)));
        assert_eq!(s.submit(2, 5), Err(SubmitError::OutOfOrder { expected: 0, got: 2 }));
        s.submit(0, 5).unwrap();
        assert_eq!(s.submit(0, 5), Err(SubmitError::OutOfOrder { expected: 1, got: 0 }));
        assert_eq!(s.cursor(), 1);
    }

    #[test]
    fn same_seed_same_order() {
        let a = StudySession::new("a", "p", keys(8), 11).unwrap();
        let b = StudySession::new("b", "q", keys(8), 11).unwrap();
        let order = |s: &StudySession| (0..s.pair_count()).map(|i| s.task(i).unwrap()).map(|t| (t.left, t.right)).collect::<Vec<_>>();
        assert_eq!(order(&a), order(&b));
    }

    #[test]
    fn journal_replay() {
        let dir = tempfile::tempdir().unwrap();
        let j = Journal::new(dir.path()).unwrap();
        let mut s = StudySession::new("s1", "p", keys(4), 2).unwrap();
        j.append("s1", &JournalEvent::Create { id: "s1".into(), participant: "p".into(), seed: 2, stimuli: keys(4) })
            .unwrap();
        for r in [3, 4, 5] {
            let i = s.cursor();
            s.submit(i, r).unwrap();
            j.append("s1", &JournalEvent::Rating { pair_index: i, rating: r }).unwrap();
        }
        // a torn final write is dropped
        let path = dir.path().join("s1.jsonl");
        let mut f = OpenOptions::new().append(true).open(&path).unwrap();
        write!(f, "{{\"event\":\"rat").unwrap();
        let back = j.replay().unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0].records(), s.records());
        assert_eq!(back[0].cursor(), 3);
    }
}
