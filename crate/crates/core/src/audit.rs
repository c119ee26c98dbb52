//! Dataset auditing: class, attack and gender balance, utterance durations,
//! speech-onset delay from an energy VAD, and quality-score distributions.
//!
//! Histograms are grouped by attack id (`bonafide` for genuine speech) with
//! an extra pooled `spoof` group.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::{
    format_real, join_scores_metadata, read_wav, AudioBuffer, Label, MetadataRecord, Real, Report, ScoreRecord,
};

/// Name of the pooled spoof histogram group.
pub const POOLED_SPOOF: &str = "spoof";

/// Frame-energy VAD parameters (times in seconds).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VadConfig {
    pub frame_len: f64,
    pub hop: f64,
    /// Activity threshold relative to the loudest frame, in dB.
    pub threshold_db: f64,
    /// Consecutive active frames required to declare speech.
    pub hangover_frames: usize,
}

impl Default for VadConfig {
    fn default() -> Self {
        Self { frame_len: 0.025, hop: 0.010, threshold_db: -35.0, hangover_frames: 5 }
    }
}

impl VadConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.hop > 0.0 && self.frame_len >= self.hop && self.frame_len.is_finite()) {
            return Err(Error::invalid("VAD needs frame_len >= hop > 0"));
        }
        if self.threshold_db.is_nan() || self.threshold_db >= 0.0 {
            return Err(Error::invalid("VAD threshold_db must be negative"));
        }
        if self.hangover_frames == 0 {
            return Err(Error::invalid("VAD hangover_frames must be at least 1"));
        }
        Ok(())
    }
}

/// Equal-width bins over `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinSpec {
    pub width: f64,
    pub lo: f64,
    pub hi: f64,
}

impl BinSpec {
    pub const fn new(width: f64, lo: f64, hi: f64) -> Self {
        Self { width, lo, hi }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditBins {
    pub duration: BinSpec,
    pub delay: BinSpec,
    pub quality: BinSpec,
}

impl Default for AuditBins {
    fn default() -> Self {
        Self {
            duration: BinSpec::new(1.0, 0.0, 25.0),
            delay: BinSpec::new(0.1, 0.0, 5.0),
            quality: BinSpec::new(0.1, 1.0, 5.0),
        }
    }
}

/// Counts per left-closed, right-open bin. The last edge is `hi`, so the final
/// bin may be narrower than the others.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub underflow: u64,
    pub overflow: u64,
}

impl Histogram {
    pub fn empty(bins: &BinSpec) -> Result<Self> {
        let BinSpec { width, lo, hi } = *bins;
        if !(width > 0.0 && width.is_finite() && lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::invalid("histogram needs width > 0 and lo < hi"));
        }
        let n = (((hi - lo) / width) - 1e-9).ceil().max(1.0) as usize;
        let mut bin_edges: Vec<f64> = (0..n).map(|k| ((lo + k as f64 * width) * 1e12).round() / 1e12).collect();
        bin_edges.push(hi);
        Ok(Self { bin_edges, counts: vec![0; n], underflow: 0, overflow: 0 })
    }

    pub fn add(&mut self, v: f64) -> Result<()> {
        if v.is_nan() {
            return Err(Error::NonFinite("NaN histogram value".into()));
        }
        let (lo, hi) = (self.bin_edges[0], self.bin_edges[self.bin_edges.len() - 1]);
        if v < lo {
            self.underflow += 1;
        } else if v >= hi {
            self.overflow += 1;
        } else {
            let k = self.bin_edges.partition_point(|&e| e <= v) - 1;
            self.counts[k] += 1;
        }
        Ok(())
    }

    pub fn total(&self) -> u64 {
        self.underflow + self.overflow + self.counts.iter().sum::<u64>()
    }
}

pub fn histogram(values: &[f64], bin_width: f64, lo: f64, hi: f64) -> Result<Histogram> {
    let mut h = Histogram::empty(&BinSpec::new(bin_width, lo, hi))?;
    for &v in values {
        h.add(v)?;
    }
    Ok(h)
}

pub fn duration_seconds(audio: &AudioBuffer) -> f64 {
    audio.len() as f64 / audio.sample_rate as f64
}

/// Time of the first speech run, or `None` when no frame clears the
/// threshold (including all-zero audio).
///
/// A frame is active when its mean-square energy in dB exceeds the peak
/// frame energy plus `threshold_db`. The onset is the first sample, within
/// the opening frame of the first run of `hangover_frames` active frames,
/// whose own energy reaches that threshold.
pub fn speech_onset_delay(audio: &AudioBuffer, cfg: &VadConfig) -> Result<Option<f64>> {
    cfg.validate()?;
    let sr = audio.sample_rate as f64;
    let x = &audio.samples;
    if x.is_empty() {
        return Ok(None);
    }
    let frame = ((cfg.frame_len * sr).round() as usize).max(1);
    let hop = ((cfg.hop * sr).round() as usize).max(1);
    let n_frames = if x.len() <= frame { 1 } else { 1 + (x.len() - frame) / hop };
    let energy: Vec<f64> = (0..n_frames)
        .map(|k| {
            let seg = &x[k * hop..(k * hop + frame).min(x.len())];
            seg.iter().map(|&v| f64::from(v) * f64::from(v)).sum::<f64>() / seg.len() as f64
        })
        .collect();
    let peak = energy.iter().copied().fold(0.0, f64::max);
    if peak <= 0.0 {
        return Ok(None);
    }
    let floor = 10f64.powf((10.0 * peak.log10() + cfg.threshold_db) / 10.0);
    let need = cfg.hangover_frames.min(n_frames);
    let mut run = 0;
    for (k, &e) in energy.iter().enumerate() {
        run = if e > floor { run + 1 } else { 0 };
        if run == need {
            let start = (k + 1 - need) * hop;
            let end = (start + frame).min(x.len());
            let onset = (start..end).find(|&i| f64::from(x[i]) * f64::from(x[i]) >= floor).unwrap_or(start);
            return Ok(Some(onset as f64 / sr));
        }
    }
    Ok(None)
}

/// Utterance counts by label, attack and gender.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BalanceCounts {
    pub total: usize,
    pub by_label: BTreeMap<String, usize>,
    /// Spoofed utterances only.
    pub by_attack: BTreeMap<String, usize>,
    pub by_gender: BTreeMap<String, usize>,
}

impl BalanceCounts {
    /// `count` as a percentage of all utterances; 0 for an empty dataset.
    pub fn percent(&self, count: usize) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            100.0 * count as f64 / self.total as f64
        }
    }
}

pub fn balance_report(meta: &[MetadataRecord]) -> BalanceCounts {
    let mut b = BalanceCounts { total: meta.len(), ..Default::default() };
    for m in meta {
        *b.by_label.entry(m.label.token().to_string()).or_default() += 1;
        *b.by_gender.entry(m.gender.token().to_string()).or_default() += 1;
        if let Some(a) = &m.attack_id {
            *b.by_attack.entry(a.clone()).or_default() += 1;
        }
    }
    b
}

/// Per-file audio facts.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioFacts {
    pub utt_id: String,
    pub duration: f64,
    pub delay: Option<f64>,
}

pub fn audit_audio(utt_id: &str, audio: &AudioBuffer, cfg: &VadConfig) -> Result<AudioFacts> {
    Ok(AudioFacts {
        utt_id: utt_id.to_string(),
        duration: duration_seconds(audio),
        delay: speech_onset_delay(audio, cfg)?,
    })
}

/// Audits `<dir>/<utt_id>.wav` for every metadata row, in metadata order.
/// Rows without a file are skipped and returned as the second element.
pub fn audit_audio_dir(dir: &Path, meta: &[MetadataRecord], cfg: &VadConfig) -> Result<(Vec<AudioFacts>, Vec<String>)> {
    cfg.validate()?;
    let results: Vec<Result<Option<AudioFacts>>> = meta
        .par_iter()
        .map(|m| {
            let path = dir.join(format!("{}.wav", m.utt_id));
            if !path.is_file() {
                return Ok(None);
            }
            let audio = read_wav(&path)?;
            audit_audio(&m.utt_id, &audio, cfg).map(Some)
        })
        .collect();
    let mut facts = Vec::new();
    let mut missing = Vec::new();
    for (m, r) in meta.iter().zip(results) {
        match r? {
            Some(f) => facts.push(f),
            None => missing.push(m.utt_id.clone()),
        }
    }
    Ok((facts, missing))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DurationStats {
    pub count: usize,
    pub mean: Real,
    /// Sample standard deviation (n - 1 denominator); null below 2 files.
    pub std: Real,
    pub missing_audio: usize,
    pub histograms: BTreeMap<String, Histogram>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DelayStats {
    pub count: usize,
    /// Files where the VAD found no speech.
    pub no_speech: usize,
    pub mean: Real,
    pub histograms: BTreeMap<String, Histogram>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QualityStats {
    pub count: usize,
    pub histograms: BTreeMap<String, Histogram>,
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = v.iter().sum::<f64>() / n;
    let std =
        if v.len() < 2 { f64::NAN } else { (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() };
    (mean, std)
}

/// Histograms of `(group, is_spoof, value)` per group plus the pooled spoof group.
fn grouped_histograms<'a>(
    items: impl IntoIterator<Item = (&'a str, bool, f64)>,
    bins: &BinSpec,
) -> Result<BTreeMap<String, Histogram>> {
    let template = Histogram::empty(bins)?;
    let mut out: BTreeMap<String, Histogram> = BTreeMap::new();
    for (group, spoof, v) in items {
        out.entry(group.to_string()).or_insert_with(|| template.clone()).add(v)?;
        if spoof {
            out.entry(POOLED_SPOOF.to_string()).or_insert_with(|| template.clone()).add(v)?;
        }
    }
    Ok(out)
}

fn meta_index(meta: &[MetadataRecord]) -> std::collections::HashMap<&str, &MetadataRecord> {
    meta.iter().map(|m| (m.utt_id.as_str(), m)).collect()
}

fn facts_items<'a>(
    facts: &'a [AudioFacts],
    meta: &'a [MetadataRecord],
    value: impl Fn(&AudioFacts) -> Option<f64> + 'a,
) -> Result<Vec<(&'a str, bool, f64)>> {
    let index = meta_index(meta);
    let mut missing = Vec::new();
    let mut items = Vec::new();
    for f in facts {
        match index.get(f.utt_id.as_str()) {
            Some(m) => {
                if let Some(v) = value(f) {
                    items.push((m.attack_group(), m.label == Label::Spoof, v));
                }
            }
            None => missing.push(f.utt_id.clone()),
        }
    }
    if missing.is_empty() {
        Ok(items)
    } else {
        Err(Error::MissingMetadata { ids: missing })
    }
}

pub fn duration_summary(
    facts: &[AudioFacts],
    meta: &[MetadataRecord],
    missing_audio: usize,
    bins: &BinSpec,
) -> Result<DurationStats> {
    let items = facts_items(facts, meta, |f| Some(f.duration))?;
    let values: Vec<f64> = items.iter().map(|i| i.2).collect();
    let (mean, std) = mean_std(&values);
    Ok(DurationStats {
        count: values.len(),
        mean: Real(mean),
        std: Real(std),
        missing_audio,
        histograms: grouped_histograms(items, bins)?,
    })
}

pub fn delay_summary(facts: &[AudioFacts], meta: &[MetadataRecord], bins: &BinSpec) -> Result<DelayStats> {
    let items = facts_items(facts, meta, |f| f.delay)?;
    let values: Vec<f64> = items.iter().map(|i| i.2).collect();
    Ok(DelayStats {
        count: values.len(),
        no_speech: facts.len() - values.len(),
        mean: Real(mean_std(&values).0),
        histograms: grouped_histograms(items, bins)?,
    })
}

/// Quality histograms per attack group plus pooled spoof. Every scored
/// utterance needs metadata.
pub fn quality_summary(quality: &[ScoreRecord], meta: &[MetadataRecord], bins: &BinSpec) -> Result<QualityStats> {
    let set = join_scores_metadata(quality, meta)?;
    let items = set.entries.iter().map(|e| (e.attack_group(), e.label == Label::Spoof, e.score));
    Ok(QualityStats { count: set.len(), histograms: grouped_histograms(items, bins)? })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub total: usize,
    pub counts_by_label: BTreeMap<String, usize>,
    pub counts_by_attack: BTreeMap<String, usize>,
    pub counts_by_gender: BTreeMap<String, usize>,
    pub percent_by_label: BTreeMap<String, Real>,
    pub percent_by_attack: BTreeMap<String, Real>,
    pub percent_by_gender: BTreeMap<String, Real>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration_stats: Option<DurationStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delay_stats: Option<DelayStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quality_stats: Option<QualityStats>,
}

impl AuditReport {
    /// Balance-only report.
    pub fn from_metadata(meta: &[MetadataRecord]) -> Self {
        let b = balance_report(meta);
        let pct = |m: &BTreeMap<String, usize>| m.iter().map(|(k, &c)| (k.clone(), Real(b.percent(c)))).collect();
        Self {
            total: b.total,
            percent_by_label: pct(&b.by_label),
            percent_by_attack: pct(&b.by_attack),
            percent_by_gender: pct(&b.by_gender),
            counts_by_label: b.by_label,
            counts_by_attack: b.by_attack,
            counts_by_gender: b.by_gender,
            duration_stats: None,
            delay_stats: None,
            quality_stats: None,
        }
    }

    pub fn with_audio(
        mut self,
        facts: &[AudioFacts],
        meta: &[MetadataRecord],
        missing_audio: usize,
        bins: &AuditBins,
    ) -> Result<Self> {
        self.duration_stats = Some(duration_summary(facts, meta, missing_audio, &bins.duration)?);
        self.delay_stats = Some(delay_summary(facts, meta, &bins.delay)?);
        Ok(self)
    }

    pub fn with_quality(mut self, quality: &[ScoreRecord], meta: &[MetadataRecord], bins: &AuditBins) -> Result<Self> {
        self.quality_stats = Some(quality_summary(quality, meta, &bins.quality)?);
        Ok(self)
    }
}

fn csv_histograms(out: &mut String, section: &str, hists: &BTreeMap<String, Histogram>) {
    for (group, h) in hists {
        let first = h.bin_edges[0];
        let last = *h.bin_edges.last().unwrap_or(&first);
        out.push_str(&format!("{section},{group},underflow,,{},{}\n", format_real(first), h.underflow));
        for (k, c) in h.counts.iter().enumerate() {
            out.push_str(&format!(
                "{section},{group},bin,{},{},{c}\n",
                format_real(h.bin_edges[k]),
                format_real(h.bin_edges[k + 1])
            ));
        }
        out.push_str(&format!("{section},{group},overflow,{},,{}\n", format_real(last), h.overflow));
    }
}

impl Report for AuditReport {
    const KIND: &'static str = "audit report";

    /// Long form: `section,group,key,lo,hi,value`.
    fn to_csv(&self) -> Option<String> {
        let mut out = String::from("section,group,key,lo,hi,value\n");
        out.push_str(&format!("count,total,total,,,{}\n", self.total));
        for (dim, counts, pcts) in [
            ("label", &self.counts_by_label, &self.percent_by_label),
            ("attack", &self.counts_by_attack, &self.percent_by_attack),
            ("gender", &self.counts_by_gender, &self.percent_by_gender),
        ] {
            for (k, c) in counts {
                out.push_str(&format!("count,{dim},{k},,,{c}\n"));
            }
            for (k, p) in pcts {
                out.push_str(&format!("percent,{dim},{k},,,{}\n", format_real(p.0)));
            }
        }
        if let Some(d) = &self.duration_stats {
            out.push_str(&format!("duration,all,count,,,{}\n", d.count));
            out.push_str(&format!("duration,all,mean,,,{}\n", format_real(d.mean.0)));
            out.push_str(&format!("duration,all,std,,,{}\n", format_real(d.std.0)));
            out.push_str(&format!("duration,all,missing_audio,,,{}\n", d.missing_audio));
            csv_histograms(&mut out, "duration", &d.histograms);
        }
        if let Some(d) = &self.delay_stats {
            out.push_str(&format!("delay,all,count,,,{}\n", d.count));
            out.push_str(&format!("delay,all,no_speech,,,{}\n", d.no_speech));
            out.push_str(&format!("delay,all,mean,,,{}\n", format_real(d.mean.0)));
            csv_histograms(&mut out, "delay", &d.histograms);
        }
        if let Some(q) = &self.quality_stats {
            out.push_str(&format!("quality,all,count,,,{}\n", q.count));
            csv_histograms(&mut out, "quality", &q.histograms);
        }
        Some(out)
    }
}
