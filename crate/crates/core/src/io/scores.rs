use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::io::{content_lines, parse_real};

/// One line of a score file: an utterance (or trial key) and its score.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRecord {
    pub utt_id: String,
    pub score: f64,
}

impl ScoreRecord {
    pub fn new(utt_id: impl Into<String>, score: f64) -> Self {
        Self { utt_id: utt_id.into(), score }
    }
}

/// Parses a whitespace-separated `utt_id score` file.
///
/// Fields past the second are ignored. Duplicate ids are rejected.
pub fn parse_cm_scores(text: &str) -> Result<Vec<ScoreRecord>> {
    let mut seen: HashMap<&str, usize> = HashMap::new();
    let mut records = Vec::new();
    for (line, content) in content_lines(text) {
        let mut fields = content.split_whitespace();
        let (Some(id), Some(score)) = (fields.next(), fields.next()) else {
            return Err(Error::parse(line, "expected `utt_id score`"));
        };
        let score = parse_real(score, line, "score")?;
        if seen.insert(id, line).is_some() {
            return Err(Error::Duplicate { line, id: id.to_string() });
        }
        records.push(ScoreRecord::new(id, score));
    }
    Ok(records)
}

/// Writes records in the score-file format. Reals use the shortest
/// representation that parses back to the same value.
pub fn write_cm_scores(records: &[ScoreRecord]) -> String {
    let mut out = String::with_capacity(records.len() * 24);
    for r in records {
        let _ = writeln!(out, "{} {}", r.utt_id, r.score);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_in_file_order() {
        let recs = parse_cm_scores("utt1 0.35\nutt2 -0.10\n").unwrap();
        assert_eq!(recs, vec![ScoreRecord::new("utt1", 0.35), ScoreRecord::new("utt2", -0.10)]);
    }

    #[test]
    fn empty_input_is_empty() {
        assert!(parse_cm_scores("").unwrap().is_empty());
        assert!(parse_cm_scores("# only a comment\n\n").unwrap().is_empty());
    }

    #[test]
    fn non_numeric_score_reports_line() {
        let err = parse_cm_scores("utt1 abc").unwrap_err();
        assert_eq!(err.line(), Some(1));
        let err = parse_cm_scores("# c\nutt1 1\nutt2\n").unwrap_err();
        assert_eq!(err.line(), Some(3));
    }

    #[test]
    fn duplicate_id_is_an_error() {
        let err = parse_cm_scores("a 1\nb 2\na 3\n").unwrap_err();
        assert!(matches!(err, Error::Duplicate { line: 3, ref id } if id == "a"));
    }

    #[test]
    fn writes_lf_and_round_trips() {
        let recs = parse_cm_scores("x 0.1\r\ny -3e-7\r\n").unwrap();
        let text = write_cm_scores(&recs);
        assert_eq!(text, "x 0.1\ny -0.0000003\n");
        assert_eq!(parse_cm_scores(&text).unwrap(), recs);
    }
}
