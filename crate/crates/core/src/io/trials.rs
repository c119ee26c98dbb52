use std::collections::HashSet;
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::fusion::{lse_fuse, LsePolicy};
use crate::io::{content_lines, parse_real};
use crate::metrics::{BinaryScores, PairedSasvScores, SasvScores, TandemScore};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TrialClass {
    Target,
    Nontarget,
    Spoof,
}

impl TrialClass {
    pub fn token(self) -> &'static str {
        match self {
            TrialClass::Target => "target",
            TrialClass::Nontarget => "nontarget",
            TrialClass::Spoof => "spoof",
        }
    }

    fn parse(token: &str) -> Option<Self> {
        match token.to_ascii_lowercase().as_str() {
            "target" => Some(TrialClass::Target),
            "nontarget" | "non-target" => Some(TrialClass::Nontarget),
            "spoof" => Some(TrialClass::Spoof),
            _ => None,
        }
    }
}

impl fmt::Display for TrialClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// One SASV trial. Scores are optional so the same format carries unscored
/// trial lists, single-system scores, and paired ASV/CM scores.
#[derive(Debug, Clone, PartialEq)]
pub struct SasvTrialRecord {
    pub enroll_id: String,
    pub test_utt: String,
    pub trial_class: TrialClass,
    pub asv_score: Option<f64>,
    pub cm_score: Option<f64>,
}

impl SasvTrialRecord {
    pub fn key(&self) -> String {
        trial_key(&self.enroll_id, &self.test_utt)
    }
}

/// Key used for trial-level score files: `enroll_id*test_utt`.
pub fn trial_key(enroll_id: &str, test_utt: &str) -> String {
    format!("{enroll_id}*{test_utt}")
}

fn optional_score(token: Option<&&str>, line: usize, what: &str) -> Result<Option<f64>> {
    match token {
        None => Ok(None),
        Some(t) if *t == "-" || t.is_empty() => Ok(None),
        Some(t) => parse_real(t, line, what).map(Some),
    }
}

/// Parses `enroll_id\ttest_utt\tclass[\tasv_score[\tcm_score]]`.
///
/// `-` in a score column marks the score as absent.
pub fn parse_sasv_trials(text: &str) -> Result<Vec<SasvTrialRecord>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (line, content) in content_lines(text) {
        let fields: Vec<&str> = content.split('\t').map(str::trim).collect();
        if !(3..=5).contains(&fields.len()) {
            return Err(Error::parse(line, format!("expected 3 to 5 tab-separated columns, found {}", fields.len())));
        }
        if fields[0].is_empty() || fields[1].is_empty() {
            return Err(Error::parse(line, "empty enroll_id or test_utt"));
        }
        let trial_class = TrialClass::parse(fields[2])
            .ok_or_else(|| Error::parse(line, format!("unknown trial class `{}`", fields[2])))?;
        let asv_score = optional_score(fields.get(3), line, "asv score")?;
        let cm_score = optional_score(fields.get(4), line, "cm score")?;
        if !seen.insert((fields[0], fields[1])) {
            return Err(Error::Duplicate { line, id: trial_key(fields[0], fields[1]) });
        }
        out.push(SasvTrialRecord {
            enroll_id: fields[0].to_string(),
            test_utt: fields[1].to_string(),
            trial_class,
            asv_score,
            cm_score,
        });
    }
    Ok(out)
}

pub fn write_sasv_trials(records: &[SasvTrialRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let _ = write!(out, "{}\t{}\t{}", r.enroll_id, r.test_utt, r.trial_class);
        match (r.asv_score, r.cm_score) {
            (None, None) => {}
            (Some(a), None) => {
                let _ = write!(out, "\t{a}");
            }
            (a, Some(c)) => {
                let a = a.map_or_else(|| "-".to_string(), |a| a.to_string());
                let _ = write!(out, "\t{a}\t{c}");
            }
        }
        out.push('\n');
    }
    out
}

/// A parsed trial list with helpers that project it onto metric inputs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SasvTrialSet {
    pub trials: Vec<SasvTrialRecord>,
}

impl SasvTrialSet {
    pub fn new(trials: Vec<SasvTrialRecord>) -> Self {
        Self { trials }
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse_sasv_trials(text).map(Self::new)
    }

    pub fn len(&self) -> usize {
        self.trials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trials.is_empty()
    }

    pub fn has_paired_scores(&self) -> bool {
        !self.trials.is_empty() && self.trials.iter().all(|t| t.asv_score.is_some() && t.cm_score.is_some())
    }

    pub fn class_count(&self, class: TrialClass) -> usize {
        self.trials.iter().filter(|t| t.trial_class == class).count()
    }

    /// Paired (asv, cm) scores split by class; every trial must carry both.
    pub fn paired(&self) -> Result<PairedSasvScores> {
        let mut out = PairedSasvScores::default();
        for t in &self.trials {
            let (Some(asv), Some(cm)) = (t.asv_score, t.cm_score) else {
                return Err(Error::invalid(format!("trial {} lacks a paired asv/cm score", t.key())));
            };
            out.class_mut(t.trial_class).push(TandemScore { asv, cm });
        }
        out.validate()?;
        Ok(out)
    }

    /// Single-score view for files with one score column filled: the ASV
    /// column if every trial has it, otherwise the CM column.
    pub fn single_scores(&self) -> Result<SasvScores> {
        let pick: fn(&SasvTrialRecord) -> Option<f64> = if self.trials.iter().all(|t| t.asv_score.is_some()) {
            |t| t.asv_score
        } else if self.trials.iter().all(|t| t.cm_score.is_some()) {
            |t| t.cm_score
        } else {
            return Err(Error::invalid("trials do not share a fully populated score column"));
        };
        self.collect(pick)
    }

    /// Per-trial weighted negative-LSE fusion of the paired LLRs.
    pub fn fused(&self, policy: LsePolicy) -> Result<SasvScores> {
        let paired = self.paired()?;
        Ok(paired.map(|s| lse_fuse(s.cm, s.asv, policy)))
    }

    /// ASV calibration view: target vs nontarget trials, ASV column.
    pub fn asv_binary(&self) -> Result<BinaryScores> {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for t in &self.trials {
            let Some(s) = t.asv_score else { continue };
            match t.trial_class {
                TrialClass::Target => pos.push(s),
                TrialClass::Nontarget => neg.push(s),
                TrialClass::Spoof => {}
            }
        }
        BinaryScores::new(pos, neg)
    }

    /// CM view: bonafide (target and nontarget) vs spoof trials, CM column.
    pub fn cm_binary(&self) -> Result<BinaryScores> {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for t in &self.trials {
            let Some(s) = t.cm_score else { continue };
            match t.trial_class {
                TrialClass::Spoof => neg.push(s),
                _ => pos.push(s),
            }
        }
        BinaryScores::new(pos, neg)
    }

    fn collect(&self, pick: impl Fn(&SasvTrialRecord) -> Option<f64>) -> Result<SasvScores> {
        let mut out = SasvScores::default();
        for t in &self.trials {
            if let Some(s) = pick(t) {
                out.class_mut(t.trial_class).push(s);
            }
        }
        out.validate()?;
        Ok(out)
    }
}
