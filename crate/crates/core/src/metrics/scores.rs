use crate::error::{Error, Result};
use crate::io::TrialClass;

/// Two-class scores: `pos` are bonafide (CM) or target (ASV) trials.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryScores {
    pos: Vec<f64>,
    neg: Vec<f64>,
}

impl BinaryScores {
    pub fn new(pos: Vec<f64>, neg: Vec<f64>) -> Result<Self> {
        if pos.is_empty() {
            return Err(Error::EmptyClass("positive".into()));
        }
        if neg.is_empty() {
            return Err(Error::EmptyClass("negative".into()));
        }
        if pos.iter().chain(&neg).any(|s| !s.is_finite()) {
            return Err(Error::NonFinite("score".into()));
        }
        Ok(Self { pos, neg })
    }

    pub fn pos(&self) -> &[f64] {
        &self.pos
    }

    pub fn neg(&self) -> &[f64] {
        &self.neg
    }

    /// Applies `f` to every score. `f` must keep scores finite.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.pos.iter().map(|&s| f(s)).collect(), self.neg.iter().map(|&s| f(s)).collect())
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<f64>) {
        (self.pos, self.neg)
    }
}

/// One score per SASV trial, split by class.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SasvScores {
    pub target: Vec<f64>,
    pub nontarget: Vec<f64>,
    pub spoof: Vec<f64>,
}

impl SasvScores {
    pub fn new(target: Vec<f64>, nontarget: Vec<f64>, spoof: Vec<f64>) -> Result<Self> {
        let s = Self { target, nontarget, spoof };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("target", &self.target), ("nontarget", &self.nontarget), ("spoof", &self.spoof)] {
            if v.is_empty() {
                return Err(Error::EmptyClass(name.into()));
            }
            if v.iter().any(|s| !s.is_finite()) {
                return Err(Error::NonFinite(format!("{name} score")));
            }
        }
        Ok(())
    }

    pub fn class_mut(&mut self, class: TrialClass) -> &mut Vec<f64> {
        match class {
            TrialClass::Target => &mut self.target,
            TrialClass::Nontarget => &mut self.nontarget,
            TrialClass::Spoof => &mut self.spoof,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TandemScore {
    pub asv: f64,
    pub cm: f64,
}

/// Paired ASV and CM scores per trial, split by class.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PairedSasvScores {
    pub target: Vec<TandemScore>,
    pub nontarget: Vec<TandemScore>,
    pub spoof: Vec<TandemScore>,
}

impl PairedSasvScores {
    pub fn new(target: Vec<TandemScore>, nontarget: Vec<TandemScore>, spoof: Vec<TandemScore>) -> Result<Self> {
        let s = Self { target, nontarget, spoof };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("target", &self.target), ("nontarget", &self.nontarget), ("spoof", &self.spoof)] {
            if v.is_empty() {
                return Err(Error::EmptyClass(name.into()));
            }
            if v.iter().any(|s| !s.asv.is_finite() || !s.cm.is_finite()) {
                return Err(Error::NonFinite(format!("{name} score")));
            }
        }
        Ok(())
    }

    pub fn class_mut(&mut self, class: TrialClass) -> &mut Vec<TandemScore> {
        match class {
            TrialClass::Target => &mut self.target,
            TrialClass::Nontarget => &mut self.nontarget,
            TrialClass::Spoof => &mut self.spoof,
        }
    }

    /// Collapses each pair to a single score.
    pub fn map(&self, f: impl Fn(TandemScore) -> f64) -> SasvScores {
        SasvScores {
            target: self.target.iter().map(|&s| f(s)).collect(),
            nontarget: self.nontarget.iter().map(|&s| f(s)).collect(),
            spoof: self.spoof.iter().map(|&s| f(s)).collect(),
        }
    }

    /// ASV target vs nontarget scores.
    pub fn asv_binary(&self) -> Result<BinaryScores> {
        BinaryScores::new(self.target.iter().map(|s| s.asv).collect(), self.nontarget.iter().map(|s| s.asv).collect())
    }
}
