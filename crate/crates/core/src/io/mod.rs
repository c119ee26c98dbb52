//! Readers and writers for the toolkit's file formats.
//!
//! All text formats are UTF-8, line oriented, accept LF or CRLF line endings
//! and skip blank lines and lines whose first non-blank character is `#`.
//! Writers always emit LF.
//!
//! | format          | columns                                                      |
//! |-----------------|--------------------------------------------------------------|
//! | score file      | `utt_id score` (whitespace separated)                        |
//! | metadata        | `utt_id\tgender\tcodec_id\tattack_id\tlabel`                  |
//! | SASV trials     | `enroll_id\ttest_utt\tclass[\tasv_score[\tcm_score]]`         |
//! | embeddings      | `utt_id v1 v2 ... vD` (whitespace separated)                 |
//!
//! Official protocol files vary between challenge editions; project them into
//! the metadata schema above before use (see the README for a column mapping).

mod embeddings;
mod metadata;
mod report;
mod scores;
mod scoreset;
mod trials;
mod wav;

use std::path::Path;

use crate::error::{Error, Result};

pub use embeddings::{parse_embeddings, write_embeddings};
pub use metadata::{parse_metadata, write_metadata, Gender, Label, MetadataRecord};
pub use report::{format_real, round_sig, write_report, Real, Report, ReportFormat};
pub use scores::{parse_cm_scores, write_cm_scores, ScoreRecord};
pub use scoreset::{join_scores_metadata, ScoreSet, ScoredUtt};
pub use trials::{parse_sasv_trials, trial_key, write_sasv_trials, SasvTrialRecord, SasvTrialSet, TrialClass};
pub use wav::{read_wav, read_wav_from, write_wav_i16, AudioBuffer};

/// Reads a whole text file, attaching the path to any IO error.
pub fn read_text(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    std::fs::read_to_string(path).map_err(|source| Error::File { path: path.to_path_buf(), source })
}

/// Iterates over the meaningful lines of a text stream as `(line_number, line)`,
/// one-based, with any trailing `\r` removed.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.split('\n').enumerate().filter_map(|(i, raw)| {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            None
        } else {
            Some((i + 1, line))
        }
    })
}

pub(crate) fn parse_real(token: &str, line: usize, what: &str) -> Result<f64> {
    let value: f64 = token.parse().map_err(|_| Error::parse(line, format!("{what} `{token}` is not a number")))?;
    if !value.is_finite() {
        return Err(Error::parse(line, format!("{what} `{token}` is not finite")));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skips_comments_blank_lines_and_crlf() {
        let text = "# header\r\n\r\na 1\r\n   \n  # indented comment\nb 2";
        let lines: Vec<_> = content_lines(text).collect();
        assert_eq!(lines, vec![(3, "a 1"), (6, "b 2")]);
    }

    #[test]
    fn rejects_non_finite_reals() {
        assert!(parse_real("inf", 4, "score").is_err());
        assert!(parse_real("NaN", 4, "score").is_err());
        assert_eq!(parse_real("-0.25", 4, "score").unwrap(), -0.25);
    }
}
