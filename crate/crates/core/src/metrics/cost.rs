use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const PRIOR_SUM_TOLERANCE: f64 = 1e-9;

/// Costs and priors for the DCF family.
///
/// Binary metrics use `c_miss`, `c_fa` and the conditional target prior
/// `pi_target / (pi_target + pi_nontarget)`. SASV metrics use all fields and
/// require the three priors to sum to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostModel {
    pub c_miss: f64,
    pub c_fa: f64,
    #[serde(default)]
    pub c_fa_spoof: f64,
    pub pi_target: f64,
    pub pi_nontarget: f64,
    #[serde(default)]
    pub pi_spoof: f64,
}

impl CostModel {
    /// Example profile: all costs one, all priors equal. Not a challenge
    /// evaluation-plan value.
    pub fn uniform() -> Self {
        Self {
            c_miss: 1.0,
            c_fa: 1.0,
            c_fa_spoof: 1.0,
            pi_target: 1.0 / 3.0,
            pi_nontarget: 1.0 / 3.0,
            pi_spoof: 1.0 / 3.0,
        }
    }

    /// Example profile: `c_miss = 1`, `c_fa = 10`, target prior 0.95. Not a
    /// challenge evaluation-plan value.
    pub fn binary_default() -> Self {
        Self { c_miss: 1.0, c_fa: 10.0, c_fa_spoof: 10.0, pi_target: 0.95, pi_nontarget: 0.05, pi_spoof: 0.0 }
    }

    /// Binary model with target prior `p_target`.
    pub fn binary(c_miss: f64, c_fa: f64, p_target: f64) -> Self {
        Self { c_miss, c_fa, c_fa_spoof: 0.0, pi_target: p_target, pi_nontarget: 1.0 - p_target, pi_spoof: 0.0 }
    }

    pub fn sasv(c_miss: f64, c_fa: f64, c_fa_spoof: f64, pi_target: f64, pi_nontarget: f64, pi_spoof: f64) -> Self {
        Self { c_miss, c_fa, c_fa_spoof, pi_target, pi_nontarget, pi_spoof }
    }

    /// Built-in example profiles by name.
    pub fn profile(name: &str) -> Option<Self> {
        match name {
            "uniform" => Some(Self::uniform()),
            "binary-default" => Some(Self::binary_default()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let costs = [self.c_miss, self.c_fa, self.c_fa_spoof];
        let priors = [self.pi_target, self.pi_nontarget, self.pi_spoof];
        if costs.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::invalid("costs must be finite and non-negative"));
        }
        if costs.iter().all(|c| *c == 0.0) {
            return Err(Error::invalid("at least one cost must be positive"));
        }
        if priors.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::invalid("priors must lie in [0, 1]"));
        }
        Ok(())
    }

    /// Target prior of the two-class problem.
    pub fn binary_prior(&self) -> Result<f64> {
        self.validate()?;
        let total = self.pi_target + self.pi_nontarget;
        if total <= 0.0 {
            return Err(Error::invalid("pi_target + pi_nontarget must be positive for binary metrics"));
        }
        Ok(self.pi_target / total)
    }

    pub(crate) fn check_sasv(&self) -> Result<()> {
        self.validate()?;
        let sum = self.pi_target + self.pi_nontarget + self.pi_spoof;
        if (sum - 1.0).abs() > PRIOR_SUM_TOLERANCE {
            return Err(Error::invalid(format!("SASV priors sum to {sum}, expected 1")));
        }
        Ok(())
    }
}

/// Named cost profiles, as stored in a profile file:
/// `{"profiles": {"name": {"c_miss": .., "c_fa": .., ...}}}`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ProfileSet {
    pub profiles: BTreeMap<String, CostModel>,
}

impl ProfileSet {
    pub fn builtin() -> Self {
        let profiles = [("binary-default", CostModel::binary_default()), ("uniform", CostModel::uniform())]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        Self { profiles }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let set: Self = serde_json::from_str(text)?;
        for model in set.profiles.values() {
            model.validate()?;
        }
        Ok(set)
    }

    pub fn get(&self, name: &str) -> Option<CostModel> {
        self.profiles.get(name).copied()
    }
}
