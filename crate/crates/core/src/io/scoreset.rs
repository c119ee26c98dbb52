use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::io::{Gender, Label, MetadataRecord, ScoreRecord};
use crate::metrics::BinaryScores;

/// A score joined with the attributes of its utterance.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredUtt {
    pub utt_id: String,
    pub score: f64,
    pub label: Label,
    pub gender: Gender,
    pub codec_id: String,
    pub attack_id: Option<String>,
}

impl ScoredUtt {
    pub fn attack_group(&self) -> &str {
        self.attack_id.as_deref().unwrap_or("bonafide")
    }
}

/// Scores joined with metadata; the input of every CM metric.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoreSet {
    pub entries: Vec<ScoredUtt>,
    /// Metadata rows that had no score.
    pub unscored: usize,
}

impl ScoreSet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn bonafide(&self) -> impl Iterator<Item = &ScoredUtt> {
        self.entries.iter().filter(|e| e.label == Label::Bonafide)
    }

    pub fn spoof(&self) -> impl Iterator<Item = &ScoredUtt> {
        self.entries.iter().filter(|e| e.label == Label::Spoof)
    }

    /// Bonafide scores as positives, spoof scores as negatives.
    pub fn binary(&self) -> Result<BinaryScores> {
        BinaryScores::new(self.bonafide().map(|e| e.score).collect(), self.spoof().map(|e| e.score).collect())
    }
}

/// Joins scores with metadata by utterance id, keeping score order.
///
/// Every scored id must have a metadata row; unscored metadata rows are only
/// counted.
pub fn join_scores_metadata(scores: &[ScoreRecord], meta: &[MetadataRecord]) -> Result<ScoreSet> {
    let index: HashMap<&str, &MetadataRecord> = meta.iter().map(|m| (m.utt_id.as_str(), m)).collect();
    let mut missing = Vec::new();
    let mut entries = Vec::with_capacity(scores.len());
    for s in scores {
        match index.get(s.utt_id.as_str()) {
            Some(m) => entries.push(ScoredUtt {
                utt_id: s.utt_id.clone(),
                score: s.score,
                label: m.label,
                gender: m.gender,
                codec_id: m.codec_id.clone(),
                attack_id: m.attack_id.clone(),
            }),
            None => missing.push(s.utt_id.clone()),
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingMetadata { ids: missing });
    }
    let unscored = meta.len() - entries.len();
    Ok(ScoreSet { entries, unscored })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_metadata;

    fn meta() -> Vec<MetadataRecord> {
        parse_metadata("u1\tM\t-\t-\tbonafide\nu2\tF\tC01\tA01\tspoof\n").unwrap()
    }

    #[test]
    fn joins_all() {
        let scores = vec![ScoreRecord::new("u1", 1.0), ScoreRecord::new("u2", -1.0)];
        let set = join_scores_metadata(&scores, &meta()).unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.unscored, 0);
        assert_eq!(set.entries[1].attack_group(), "A01");
        let b = set.binary().unwrap();
        assert_eq!((b.pos(), b.neg()), (&[1.0][..], &[-1.0][..]));
    }

    #[test]
    fn missing_metadata_names_the_id() {
        let err = join_scores_metadata(&[ScoreRecord::new("u1", 0.0)], &[]).unwrap_err();
        match err {
            Error::MissingMetadata { ids } => assert_eq!(ids, vec!["u1".to_string()]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unscored_metadata_is_counted() {
        let m = parse_metadata("u1\tM\t-\t-\tbonafide\n").unwrap();
        let set = join_scores_metadata(&[], &m).unwrap();
        assert!(set.is_empty());
        assert_eq!(set.unscored, 1);
    }
}
