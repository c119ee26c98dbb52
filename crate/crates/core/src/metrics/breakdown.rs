//! Metric tables broken down by attack and codec condition.
//!
//! Rows are attacks, columns are codec conditions, with a final `Pooled`
//! column and row. A cell compares the spoof scores of its attack and codec
//! against the bonafide scores of the same codec; pooled cells drop the
//! corresponding restriction.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::{format_real, Label, MetadataRecord, Real, Report, SasvTrialSet, ScoreSet, TrialClass};
use crate::metrics::{a_dcf, act_dcf, cllr, eer, min_dcf, BinaryScores, CostModel, SasvScores};

pub const POOLED: &str = "Pooled";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupBy {
    Attack,
    Codec,
    AttackCodec,
}

impl FromStr for GroupBy {
    type Err = Error;

    /// Accepts `attack`, `codec`, or both as a comma list.
    fn from_str(s: &str) -> Result<Self> {
        let mut attack = false;
        let mut codec = false;
        for part in s.split(',').map(str::trim) {
            match part {
                "attack" => attack = true,
                "codec" => codec = true,
                other => return Err(Error::invalid(format!("unknown grouping `{other}`"))),
            }
        }
        match (attack, codec) {
            (true, true) => Ok(GroupBy::AttackCodec),
            (true, false) => Ok(GroupBy::Attack),
            (false, true) => Ok(GroupBy::Codec),
            (false, false) => Err(Error::invalid("empty grouping")),
        }
    }
}

/// Two-class metric evaluated in each cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmMetric {
    Eer,
    MinDcf,
    ActDcf,
    Cllr,
}

impl CmMetric {
    pub fn name(self) -> &'static str {
        match self {
            CmMetric::Eer => "eer",
            CmMetric::MinDcf => "min_dcf",
            CmMetric::ActDcf => "act_dcf",
            CmMetric::Cllr => "cllr",
        }
    }

    pub fn evaluate(self, s: &BinaryScores, cm: &CostModel) -> Result<f64> {
        match self {
            CmMetric::Eer => Ok(eer(s)),
            CmMetric::MinDcf => min_dcf(s, cm).map(|m| m.value),
            CmMetric::ActDcf => act_dcf(s, cm),
            CmMetric::Cllr => Ok(cllr(s)),
        }
    }
}

impl FromStr for CmMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eer" => Ok(CmMetric::Eer),
            "min_dcf" | "mindcf" => Ok(CmMetric::MinDcf),
            "act_dcf" | "actdcf" => Ok(CmMetric::ActDcf),
            "cllr" => Ok(CmMetric::Cllr),
            other => Err(Error::invalid(format!("unknown metric `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BreakdownRow {
    pub id: String,
    /// One cell per column; `None` when the cell lacks one of the classes.
    pub cells: Vec<Option<Real>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BreakdownTable {
    pub metric: String,
    pub columns: Vec<String>,
    pub rows: Vec<BreakdownRow>,
}

impl BreakdownTable {
    pub fn empty(metric: &str) -> Self {
        Self { metric: metric.to_string(), columns: vec![POOLED.to_string()], rows: Vec::new() }
    }

    pub fn cell(&self, row: &str, column: &str) -> Option<f64> {
        let c = self.columns.iter().position(|x| x == column)?;
        self.rows.iter().find(|r| r.id == row)?.cells[c].map(|r| r.0)
    }
}

impl Report for BreakdownTable {
    const KIND: &'static str = "breakdown table";

    fn to_csv(&self) -> Option<String> {
        let mut out = String::from("attack");
        for c in &self.columns {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.id);
            for cell in &row.cells {
                let _ = write!(out, ",{}", cell.map(|r| format_real(r.0)).unwrap_or_default());
            }
            out.push('\n');
        }
        Some(out)
    }
}

/// Cell key: `None` stands for the pooled attack or codec.
type CellKey = (Option<String>, Option<String>);

fn layout(
    group_by: GroupBy,
    attacks: BTreeSet<String>,
    codecs: BTreeSet<String>,
) -> (Vec<Option<String>>, Vec<Option<String>>) {
    let mut rows: Vec<Option<String>> = match group_by {
        GroupBy::Codec => Vec::new(),
        _ => attacks.into_iter().map(Some).collect(),
    };
    rows.push(None);
    let mut cols: Vec<Option<String>> = match group_by {
        GroupBy::Attack => Vec::new(),
        _ => codecs.into_iter().map(Some).collect(),
    };
    cols.push(None);
    (rows, cols)
}

fn assemble(
    metric: &str,
    rows: &[Option<String>],
    cols: &[Option<String>],
    values: Vec<Option<f64>>,
) -> BreakdownTable {
    let name = |k: &Option<String>| k.clone().unwrap_or_else(|| POOLED.to_string());
    let mut it = values.into_iter();
    BreakdownTable {
        metric: metric.to_string(),
        columns: cols.iter().map(name).collect(),
        rows: rows
            .iter()
            .map(|r| BreakdownRow { id: name(r), cells: cols.iter().map(|_| it.next().flatten().map(Real)).collect() })
            .collect(),
    }
}

fn matches(key: &Option<String>, value: &str) -> bool {
    key.as_deref().is_none_or(|k| k == value)
}

/// Per-attack / per-codec CM metric table.
pub fn grouped_eval(ss: &ScoreSet, group_by: GroupBy, metric: CmMetric, cm: &CostModel) -> Result<BreakdownTable> {
    let attacks: BTreeSet<String> = ss.spoof().filter_map(|e| e.attack_id.clone()).collect();
    let codecs: BTreeSet<String> = ss.entries.iter().map(|e| e.codec_id.clone()).collect();
    let (rows, cols) = layout(group_by, attacks, codecs);
    let keys: Vec<CellKey> = rows.iter().flat_map(|r| cols.iter().map(move |c| (r.clone(), c.clone()))).collect();

    let values = keys
        .par_iter()
        .map(|(attack, codec)| {
            let pos: Vec<f64> = ss.bonafide().filter(|e| matches(codec, &e.codec_id)).map(|e| e.score).collect();
            let neg: Vec<f64> = ss
                .spoof()
                .filter(|e| matches(codec, &e.codec_id) && matches(attack, e.attack_group()))
                .map(|e| e.score)
                .collect();
            if pos.is_empty() || neg.is_empty() {
                return Ok(None);
            }
            metric.evaluate(&BinaryScores::new(pos, neg)?, cm).map(Some)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(metric.name(), &rows, &cols, values))
}

/// Per-attack / per-codec min a-DCF table for SASV trials.
///
/// `scores` holds one fused score per trial, aligned with `trials`. Attack
/// and codec attributes come from the metadata row of each test utterance.
/// A cell uses the target and nontarget trials of its codec and the spoof
/// trials of its attack and codec.
pub fn grouped_eval_sasv(
    trials: &SasvTrialSet,
    scores: &[f64],
    meta: &[MetadataRecord],
    group_by: GroupBy,
    cm: &CostModel,
) -> Result<BreakdownTable> {
    if scores.len() != trials.len() {
        return Err(Error::invalid(format!("{} scores for {} trials", scores.len(), trials.len())));
    }
    let index: HashMap<&str, &MetadataRecord> = meta.iter().map(|m| (m.utt_id.as_str(), m)).collect();
    let mut joined = Vec::with_capacity(trials.len());
    let mut missing = Vec::new();
    for (t, &s) in trials.trials.iter().zip(scores) {
        match index.get(t.test_utt.as_str()) {
            Some(m) => joined.push((t.trial_class, *m, s)),
            None => missing.push(t.test_utt.clone()),
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingMetadata { ids: missing });
    }
    let attacks: BTreeSet<String> = joined
        .iter()
        .filter(|(c, m, _)| *c == TrialClass::Spoof && m.label == Label::Spoof)
        .filter_map(|(_, m, _)| m.attack_id.clone())
        .collect();
    let codecs: BTreeSet<String> = joined.iter().map(|(_, m, _)| m.codec_id.clone()).collect();
    let (rows, cols) = layout(group_by, attacks, codecs);
    let keys: Vec<CellKey> = rows.iter().flat_map(|r| cols.iter().map(move |c| (r.clone(), c.clone()))).collect();

    let values = keys
        .par_iter()
        .map(|(attack, codec)| {
            let mut cell = SasvScores::default();
            for (class, m, s) in &joined {
                if !matches(codec, &m.codec_id) {
                    continue;
                }
                if *class == TrialClass::Spoof && !matches(attack, m.attack_group()) {
                    continue;
                }
                cell.class_mut(*class).push(*s);
            }
            if cell.target.is_empty() || cell.nontarget.is_empty() || cell.spoof.is_empty() {
                return Ok(None);
            }
            a_dcf(&cell, cm).map(|m| Some(m.value))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble("min_a_dcf", &rows, &cols, values))
}
