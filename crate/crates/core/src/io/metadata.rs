use std::collections::HashSet;
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::io::content_lines;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gender {
    Male,
    Female,
    Unknown,
}

impl Gender {
    pub fn token(self) -> &'static str {
        match self {
            Gender::Male => "M",
            Gender::Female => "F",
            Gender::Unknown => "-",
        }
    }

    fn parse(token: &str) -> Option<Self> {
        match token.to_ascii_lowercase().as_str() {
            "m" | "male" => Some(Gender::Male),
            "f" | "female" => Some(Gender::Female),
            "-" | "u" | "unknown" => Some(Gender::Unknown),
            _ => None,
        }
    }
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Bonafide,
    Spoof,
}

impl Label {
    pub fn token(self) -> &'static str {
        match self {
            Label::Bonafide => "bonafide",
            Label::Spoof => "spoof",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Per-utterance protocol entry.
///
/// `attack_id` is `None` exactly when the utterance is bonafide; both `-` and
/// `bonafide` are accepted as the bonafide marker on input. `codec_id` keeps
/// the raw token, `-` meaning no codec applied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetadataRecord {
    pub utt_id: String,
    pub gender: Gender,
    pub codec_id: String,
    pub attack_id: Option<String>,
    pub label: Label,
}

impl MetadataRecord {
    /// Group name used in attack-wise reports: the attack id, or `bonafide`.
    pub fn attack_group(&self) -> &str {
        self.attack_id.as_deref().unwrap_or("bonafide")
    }
}

fn is_bonafide_marker(token: &str) -> bool {
    token == "-" || token.eq_ignore_ascii_case("bonafide")
}

/// Parses the five-column tab-separated metadata table.
pub fn parse_metadata(text: &str) -> Result<Vec<MetadataRecord>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (line, content) in content_lines(text) {
        let fields: Vec<&str> = content.split('\t').map(str::trim).collect();
        if fields.len() != 5 {
            return Err(Error::parse(line, format!("expected 5 tab-separated columns, found {}", fields.len())));
        }
        let utt_id = fields[0];
        if utt_id.is_empty() {
            return Err(Error::parse(line, "empty utt_id"));
        }
        let gender =
            Gender::parse(fields[1]).ok_or_else(|| Error::parse(line, format!("unknown gender `{}`", fields[1])))?;
        let label = match fields[4].to_ascii_lowercase().as_str() {
            "bonafide" => Label::Bonafide,
            "spoof" => Label::Spoof,
            other => return Err(Error::parse(line, format!("unknown label `{other}`"))),
        };
        let attack = fields[3];
        let attack_id = match (label, is_bonafide_marker(attack)) {
            (Label::Bonafide, true) => None,
            (Label::Spoof, false) => Some(attack.to_string()),
            (Label::Bonafide, false) => {
                return Err(Error::validation(line, format!("bonafide utterance carries attack `{attack}`")))
            }
            (Label::Spoof, true) => return Err(Error::validation(line, "spoof utterance without attack id")),
        };
        if !seen.insert(utt_id) {
            return Err(Error::Duplicate { line, id: utt_id.to_string() });
        }
        out.push(MetadataRecord {
            utt_id: utt_id.to_string(),
            gender,
            codec_id: fields[2].to_string(),
            attack_id,
            label,
        });
    }
    Ok(out)
}

pub fn write_metadata(records: &[MetadataRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            r.utt_id,
            r.gender,
            r.codec_id,
            r.attack_id.as_deref().unwrap_or("-"),
            r.label
        );
    }
    out
}
