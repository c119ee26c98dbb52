//! Seeded Gaussian fixtures: CM score files with metadata, SASV trial files,
//! and a manifest recording the closed-form separability.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal as StdNormal};

use crate::error::{Error, Result};
use crate::io::{Gender, Label, MetadataRecord, Real, Report, SasvTrialRecord, ScoreRecord, TrialClass};

pub const SYNTH_ATTACKS: [&str; 4] = ["A01", "A02", "A03", "A04"];
pub const SYNTH_CODECS: [&str; 3] = ["-", "C01", "C02"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    /// Samples per class.
    pub n: usize,
    pub mu_pos: f64,
    pub mu_neg: f64,
    pub sigma: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self { seed: 0, n: 1000, mu_pos: 1.0, mu_neg: -1.0, sigma: 1.0 }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("synth needs at least one sample per class"));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::invalid(format!("sigma must be positive and finite, got {}", self.sigma)));
        }
        if !self.mu_pos.is_finite() || !self.mu_neg.is_finite() {
            return Err(Error::invalid("class means must be finite"));
        }
        Ok(())
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    fn normals(&self) -> (Normal<f64>, Normal<f64>) {
        // validated: sigma > 0 and finite
        let make = |mu| Normal::new(mu, self.sigma).expect("valid normal");
        (make(self.mu_pos), make(self.mu_neg))
    }

    /// EER of the two equal-variance Gaussians, `1 - Phi((mu_pos - mu_neg) / (2 sigma))`.
    pub fn closed_form_eer(&self) -> f64 {
        let z = (self.mu_pos - self.mu_neg) / (2.0 * self.sigma);
        1.0 - StdNormal::standard().cdf(z)
    }

    /// Exact LLR of a score under the generating model.
    pub fn true_llr(&self, s: f64) -> f64 {
        let d = self.mu_pos - self.mu_neg;
        d / (self.sigma * self.sigma) * (s - 0.5 * (self.mu_pos + self.mu_neg))
    }
}

/// Raw positive and negative score samples (`n` each).
pub fn gaussian_scores(cfg: &SynthConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    cfg.validate()?;
    let (pos, neg) = cfg.normals();
    let mut rng = cfg.rng(1);
    let p = (0..cfg.n).map(|_| pos.sample(&mut rng)).collect();
    let q = (0..cfg.n).map(|_| neg.sample(&mut rng)).collect();
    Ok((p, q))
}

/// Bonafide scores from the positive class, spoof from the negative one.
/// Bonafide rows cycle through the codecs; spoof rows cycle through every
/// attack-codec pair.
pub fn synth_cm(cfg: &SynthConfig) -> Result<(Vec<ScoreRecord>, Vec<MetadataRecord>)> {
    let (pos, neg) = gaussian_scores(cfg)?;
    let mut gender_rng = cfg.rng(2);
    let mut scores = Vec::with_capacity(2 * cfg.n);
    let mut meta = Vec::with_capacity(2 * cfg.n);
    let mut push = |id: String, s: f64, codec: &str, attack: Option<&str>, rng: &mut ChaCha8Rng| {
        let gender = if rng.random_bool(0.5) { Gender::Male } else { Gender::Female };
        scores.push(ScoreRecord::new(id.clone(), s));
        meta.push(MetadataRecord {
            utt_id: id,
            gender,
            codec_id: codec.to_string(),
            attack_id: attack.map(str::to_string),
            label: if attack.is_some() { Label::Spoof } else { Label::Bonafide },
        });
    };
    for (i, &s) in pos.iter().enumerate() {
        push(format!("bon_{i:07}"), s, SYNTH_CODECS[i % SYNTH_CODECS.len()], None, &mut gender_rng);
    }
    let cells = SYNTH_ATTACKS.len() * SYNTH_CODECS.len();
    for (i, &s) in neg.iter().enumerate() {
        let c = i % cells;
        let (attack, codec) = (SYNTH_ATTACKS[c / SYNTH_CODECS.len()], SYNTH_CODECS[c % SYNTH_CODECS.len()]);
        push(format!("spf_{i:07}"), s, codec, Some(attack), &mut gender_rng);
    }
    Ok((scores, meta))
}

/// SASV trials with paired scores: ASV is positive-class for targets and
/// negative otherwise; CM is positive-class for bona fide trials (target and
/// nontarget) and negative for spoof.
pub fn synth_sasv(cfg: &SynthConfig) -> Result<Vec<SasvTrialRecord>> {
    cfg.validate()?;
    let (pos, neg) = cfg.normals();
    let mut rng = cfg.rng(3);
    let mut trials = Vec::with_capacity(3 * cfg.n);
    for (class, tag) in [(TrialClass::Target, "tar"), (TrialClass::Nontarget, "non"), (TrialClass::Spoof, "spf")] {
        for i in 0..cfg.n {
            let asv = if class == TrialClass::Target { pos.sample(&mut rng) } else { neg.sample(&mut rng) };
            let cm = if class == TrialClass::Spoof { neg.sample(&mut rng) } else { pos.sample(&mut rng) };
            trials.push(SasvTrialRecord {
                enroll_id: format!("spk{:03}", i % 100),
                test_utt: format!("{tag}_{i:07}"),
                trial_class: class,
                asv_score: Some(asv),
                cm_score: Some(cm),
            });
        }
    }
    Ok(trials)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthManifest {
    pub seed: u64,
    pub n_per_class: usize,
    pub mu_pos: f64,
    pub mu_neg: f64,
    pub sigma: f64,
    pub closed_form_eer: Real,
    pub attacks: Vec<String>,
    pub codecs: Vec<String>,
    pub files: Vec<String>,
}

impl SynthManifest {
    pub fn new(cfg: &SynthConfig, files: Vec<String>) -> Self {
        Self {
            seed: cfg.seed,
            n_per_class: cfg.n,
            mu_pos: cfg.mu_pos,
            mu_neg: cfg.mu_neg,
            sigma: cfg.sigma,
            closed_form_eer: Real(cfg.closed_form_eer()),
            attacks: SYNTH_ATTACKS.iter().map(|s| s.to_string()).collect(),
            codecs: SYNTH_CODECS.iter().map(|s| s.to_string()).collect(),
            files,
        }
    }
}

impl Report for SynthManifest {
    const KIND: &'static str = "synth manifest";

    fn to_csv(&self) -> Option<String> {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form() {
        let c = SynthConfig { mu_pos: 0.3, mu_neg: 0.3, ..SynthConfig::default() };
        assert_eq!(c.closed_form_eer(), 0.5);
        let c = SynthConfig::default();
        assert!((c.closed_form_eer() - 0.158_655_253_931_457).abs() < 1e-9);
    }

    #[test]
    fn true_llr_matches_density_ratio() {
        let c = SynthConfig { mu_pos: 2.0, mu_neg: -0.5, sigma: 1.5, ..SynthConfig::default() };
        let s = 0.7;
        let ln_pdf = |mu: f64| -0.5 * ((s - mu) / c.sigma).powi(2);
        assert!((c.true_llr(s) - (ln_pdf(c.mu_pos) - ln_pdf(c.mu_neg))).abs() < 1e-12);
    }

    #[test]
    fn deterministic_per_seed() {
        let c = SynthConfig { n: 50, ..SynthConfig::default() };
        assert_eq!(synth_cm(&c).unwrap(), synth_cm(&c).unwrap());
        assert_eq!(synth_sasv(&c).unwrap(), synth_sasv(&c).unwrap());
        let d = SynthConfig { seed: 1, ..c };
        assert_ne!(synth_cm(&c).unwrap().0, synth_cm(&d).unwrap().0);
    }

    #[test]
    fn cm_fixture_covers_every_cell() {
        let (scores, meta) = synth_cm(&SynthConfig { n: 24, ..SynthConfig::default() }).unwrap();
        assert_eq!(scores.len(), 48);
        let mut cells = std::collections::BTreeSet::new();
        for m in meta.iter().filter(|m| m.label == Label::Spoof) {
            cells.insert((m.attack_id.clone().unwrap(), m.codec_id.clone()));
        }
        assert_eq!(cells.len(), 12);
    }

    #[test]
    fn invalid_parameters() {
        assert!(SynthConfig { sigma: 0.0, ..SynthConfig::default() }.validate().is_err());
        assert!(SynthConfig { n: 0, ..SynthConfig::default() }.validate().is_err());
        assert!(SynthConfig { mu_pos: f64::NAN, ..SynthConfig::default() }.validate().is_err());
    }
}
