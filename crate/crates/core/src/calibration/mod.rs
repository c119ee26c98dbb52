//! Monotone raw-score to LLR calibration.
//!
//! Two parametric calibrators are provided, both with a non-negative slope:
//!
//! * logistic regression, `llr = w * s + b`;
//! * univariate beta calibration, `llr = a * ln(s' / (1 - s')) + c`, where
//!   `s'` is the raw score mapped into `(0, 1)` by a [`ScoreScaling`]. It is
//!   trained as a logistic regression on the log-odds feature.
//!
//! [`PavCalibrator`] gives the optimal monotone step calibrator on a sample
//! and serves as a reference when testing the parametric ones.

mod logreg;
mod pav;

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{Error, Result};

pub use logreg::{fit_logreg_traced, LogRegFit, TrainConfig};
pub use pav::{pav_llr, PavCalibrator, PAV_EPSILON};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalingKind {
    /// `(s + 1) / 2`, for cosine scores in `[-1, 1]`.
    CosineAffine,
    /// Logistic sigmoid, for unbounded scores.
    Logistic,
    /// Scores already in `[0, 1]`.
    Identity,
}

impl ScalingKind {
    pub fn name(self) -> &'static str {
        match self {
            ScalingKind::CosineAffine => "cosine_affine",
            ScalingKind::Logistic => "logistic",
            ScalingKind::Identity => "identity",
        }
    }
}

impl FromStr for ScalingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cosine_affine" | "cosine" => Ok(ScalingKind::CosineAffine),
            "logistic" => Ok(ScalingKind::Logistic),
            "identity" => Ok(ScalingKind::Identity),
            other => Err(Error::invalid(format!("unknown scaling `{other}`"))),
        }
    }
}

/// Maps raw scores into `[epsilon, 1 - epsilon]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreScaling {
    pub kind: ScalingKind,
    pub epsilon: f64,
}

impl Default for ScoreScaling {
    fn default() -> Self {
        Self { kind: ScalingKind::CosineAffine, epsilon: 1e-6 }
    }
}

impl ScoreScaling {
    pub fn new(kind: ScalingKind, epsilon: f64) -> Result<Self> {
        let s = Self { kind, epsilon };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(Error::invalid("scaling epsilon must lie in (0, 0.5)"));
        }
        Ok(())
    }

    /// Log-odds feature `ln(s' / (1 - s'))` used by beta calibration.
    pub fn log_odds(&self, s: f64) -> f64 {
        let u = scale_to_unit(s, self);
        (u / (1.0 - u)).ln()
    }
}

/// Maps a raw score into `[epsilon, 1 - epsilon]`. Out-of-range inputs are
/// clamped.
pub fn scale_to_unit(s: f64, scaling: &ScoreScaling) -> f64 {
    let u = match scaling.kind {
        ScalingKind::CosineAffine => (s + 1.0) / 2.0,
        ScalingKind::Logistic => {
            if s >= 0.0 {
                1.0 / (1.0 + (-s).exp())
            } else {
                let e = s.exp();
                e / (1.0 + e)
            }
        }
        ScalingKind::Identity => s,
    };
    u.clamp(scaling.epsilon, 1.0 - scaling.epsilon)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CalibrationModel {
    LogReg { slope: f64, offset: f64 },
    Beta { scaling: ScoreScaling, slope: f64, offset: f64 },
}

impl CalibrationModel {
    pub fn logreg(slope: f64, offset: f64) -> Result<Self> {
        let m = CalibrationModel::LogReg { slope, offset };
        m.validate()?;
        Ok(m)
    }

    pub fn beta(scaling: ScoreScaling, slope: f64, offset: f64) -> Result<Self> {
        let m = CalibrationModel::Beta { scaling, slope, offset };
        m.validate()?;
        Ok(m)
    }

    pub fn slope(&self) -> f64 {
        match *self {
            CalibrationModel::LogReg { slope, .. } | CalibrationModel::Beta { slope, .. } => slope,
        }
    }

    pub fn offset(&self) -> f64 {
        match *self {
            CalibrationModel::LogReg { offset, .. } | CalibrationModel::Beta { offset, .. } => offset,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            CalibrationModel::LogReg { .. } => "logreg",
            CalibrationModel::Beta { .. } => "beta",
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.slope().is_finite() || self.slope() < 0.0 {
            return Err(Error::invalid("calibration slope must be finite and non-negative"));
        }
        if !self.offset().is_finite() {
            return Err(Error::invalid("calibration offset must be finite"));
        }
        if let CalibrationModel::Beta { scaling, .. } = self {
            scaling.validate()?;
        }
        Ok(())
    }

    /// LLR of one raw score.
    pub fn apply(&self, s: f64) -> f64 {
        match *self {
            CalibrationModel::LogReg { slope, offset } => slope * s + offset,
            CalibrationModel::Beta { scaling, slope, offset } => slope * scaling.log_odds(s) + offset,
        }
    }

    /// JSON with 17-significant-digit reals; reloads to the identical model.
    pub fn to_json(&self) -> String {
        let mut out = String::from("{\n");
        let _ = writeln!(out, "  \"kind\": \"{}\",", self.kind_name());
        match self {
            CalibrationModel::LogReg { .. } => out.push_str("  \"scaling\": null,\n"),
            CalibrationModel::Beta { scaling, .. } => {
                let _ = writeln!(
                    out,
                    "  \"scaling\": {{\"kind\": \"{}\", \"epsilon\": {}}},",
                    scaling.kind.name(),
                    real17(scaling.epsilon)
                );
            }
        }
        let _ = writeln!(out, "  \"slope\": {},", real17(self.slope()));
        let _ = writeln!(out, "  \"offset\": {}", real17(self.offset()));
        out.push_str("}\n");
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct ScalingFile {
            kind: String,
            epsilon: f64,
        }
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct ModelFile {
            kind: String,
            scaling: Option<ScalingFile>,
            slope: f64,
            offset: f64,
        }
        let file: ModelFile = serde_json::from_str(text)?;
        match (file.kind.as_str(), file.scaling) {
            ("logreg", _) => Self::logreg(file.slope, file.offset),
            ("beta", Some(sc)) => Self::beta(ScoreScaling::new(sc.kind.parse()?, sc.epsilon)?, file.slope, file.offset),
            ("beta", None) => Err(Error::invalid("beta model without scaling")),
            (other, _) => Err(Error::invalid(format!("unknown model kind `{other}`"))),
        }
    }
}

fn real17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Fits a logistic-regression calibrator.
pub fn fit_logreg(pos: &[f64], neg: &[f64], tc: &TrainConfig) -> Result<CalibrationModel> {
    let fit = fit_logreg_traced(pos, neg, tc)?;
    CalibrationModel::logreg(fit.slope, fit.offset)
}

/// Fits a univariate beta calibrator: logistic regression on the log-odds
/// of the scaled scores.
pub fn fit_beta(pos: &[f64], neg: &[f64], scaling: ScoreScaling, tc: &TrainConfig) -> Result<CalibrationModel> {
    scaling.validate()?;
    let feature = |v: &[f64]| v.iter().map(|&s| scaling.log_odds(s)).collect::<Vec<_>>();
    let fit = fit_logreg_traced(&feature(pos), &feature(neg), tc)?;
    CalibrationModel::beta(scaling, fit.slope, fit.offset)
}

pub fn apply_calibration(m: &CalibrationModel, scores: &[f64]) -> Vec<f64> {
    scores.iter().map(|&s| m.apply(s)).collect()
}
