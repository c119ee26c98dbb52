//! Score fusion: enrollment averaging and cosine scoring for the ASV side,
//! linear fusion of subsystem scores, and weighted negative-LogSumExp fusion
//! of calibrated ASV and CM LLRs with a grid-searched weight.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::{format_real, Real, Report};
use crate::metrics::{a_dcf, CostModel, PairedSasvScores};

/// Speaker embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding(Vec<f64>);

impl Embedding {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("embedding has no dimensions"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("embedding value".into()));
        }
        Ok(Self(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Componentwise mean of the enrollment embeddings.
pub fn enroll_average(embs: &[Embedding]) -> Result<Embedding> {
    let first = embs.first().ok_or_else(|| Error::invalid("no enrollment embeddings"))?;
    let dim = first.dim();
    if let Some(bad) = embs.iter().find(|e| e.dim() != dim) {
        return Err(Error::invalid(format!("embedding dimension {} differs from {dim}", bad.dim())));
    }
    let n = embs.len() as f64;
    let mean = (0..dim).map(|i| embs.iter().map(|e| e.0[i]).sum::<f64>() / n).collect();
    Ok(Embedding(mean))
}

/// Cosine similarity, clamped into `[-1, 1]`.
pub fn cosine_score(a: &Embedding, b: &Embedding) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::invalid(format!("dimension mismatch: {} vs {}", a.dim(), b.dim())));
    }
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Err(Error::invalid("zero-norm embedding"));
    }
    let dot: f64 = a.0.iter().zip(&b.0).map(|(x, y)| x * y).sum();
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

/// Weights for a linear combination of subsystem scores.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFusionSpec {
    weights: Vec<f64>,
}

impl LinearFusionSpec {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite("fusion weight".into()));
        }
        if weights.iter().all(|&w| w == 0.0) {
            return Err(Error::invalid("at least one fusion weight must be non-zero"));
        }
        Ok(Self { weights })
    }

    /// Equal weights summing to one.
    pub fn equal(n: usize) -> Result<Self> {
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

pub fn linear_fuse(scores: &[f64], spec: &LinearFusionSpec) -> Result<f64> {
    if scores.len() != spec.weights.len() {
        return Err(Error::invalid(format!("{} scores for {} weights", scores.len(), spec.weights.len())));
    }
    Ok(scores.iter().zip(&spec.weights).map(|(s, w)| s * w).sum())
}

/// ASV weight `p` of the LSE fusion; the CM term gets `1 - p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LsePolicy {
    p: f64,
}

impl LsePolicy {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(format!("LSE weight {p} outside [0, 1]")));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// `-ln(p * exp(-llr_asv) + (1 - p) * exp(-llr_cm))`: a smooth minimum of
/// the two LLRs.
///
/// Evaluated relative to the smaller LLR, so every exponent is `<= 0`.
pub fn lse_fuse(llr_cm: f64, llr_asv: f64, pol: LsePolicy) -> f64 {
    let p = pol.p;
    if p == 1.0 {
        return llr_asv;
    }
    if p == 0.0 || llr_asv == llr_cm {
        return llr_cm;
    }
    let q = 1.0 - p;
    let m = llr_asv.min(llr_cm);
    let sum = (p * (m - llr_asv).exp() + q * (m - llr_cm).exp()).min(1.0);
    let fused = m - sum.ln();
    // the exact value never exceeds either single-term bound
    fused.min(llr_asv - p.ln()).min(llr_cm - q.ln())
}

/// Evenly spaced weights `start, start + step, ..., <= stop`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Default for WeightGrid {
    fn default() -> Self {
        Self { start: 0.0, stop: 1.0, step: 0.05 }
    }
}

impl WeightGrid {
    /// Parses `start:stop:step`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| Error::invalid(format!("bad grid value `{s}`")));
        match parts.as_slice() {
            [a, b, c] => Ok(Self { start: num(a)?, stop: num(b)?, step: num(c)? }),
            [a] => {
                let v = num(a)?;
                Ok(Self { start: v, stop: v, step: 1.0 })
            }
            _ => Err(Error::invalid(format!("grid `{text}` is not start:stop:step"))),
        }
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        let ok = |x: f64| (0.0..=1.0).contains(&x);
        if !ok(self.start) || !ok(self.stop) || self.step.is_nan() || self.step <= 0.0 || self.stop < self.start {
            return Err(Error::invalid("grid must satisfy 0 <= start <= stop <= 1 and step > 0"));
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        // round to 12 decimals so 0.05-steps land on their decimal values
        Ok((0..=n).map(|i| ((self.start + i as f64 * self.step) * 1e12).round() / 1e12).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub best_p: f64,
    pub best_value: f64,
    /// `(p, objective)` in increasing `p`.
    pub table: Vec<(f64, f64)>,
}

/// Minimizes `objective(p)` over `points`. Ties go to the smallest `p`; the
/// result does not depend on the order of `points`.
pub fn grid_search_by(points: &[f64], objective: impl Fn(f64) -> Result<f64>) -> Result<SweepResult> {
    let mut ps = points.to_vec();
    if ps.is_empty() {
        return Err(Error::invalid("empty weight grid"));
    }
    if ps.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::invalid("grid weights must lie in [0, 1]"));
    }
    ps.sort_by(f64::total_cmp);
    ps.dedup();
    let table = ps.iter().map(|&p| objective(p).map(|v| (p, v))).collect::<Result<Vec<_>>>()?;
    let (best_p, best_value) =
        table.iter().copied().fold((f64::NAN, f64::INFINITY), |best, (p, v)| if v < best.1 { (p, v) } else { best });
    if best_p.is_nan() {
        return Err(Error::invalid("objective is not finite on the grid"));
    }
    Ok(SweepResult { best_p, best_value, table })
}

/// Grid search of the LSE weight minimizing min a-DCF of the fused scores.
pub fn grid_search_weight(paired_llrs: &PairedSasvScores, cm: &CostModel, points: &[f64]) -> Result<SweepResult> {
    paired_llrs.validate()?;
    grid_search_by(points, |p| {
        let pol = LsePolicy::new(p)?;
        a_dcf(&paired_llrs.map(|s| lse_fuse(s.cm, s.asv, pol)), cm).map(|m| m.value)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub p: Real,
    pub value: Real,
}

/// Serializable grid-search outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub objective: String,
    pub best_p: Real,
    pub best_value: Real,
    /// `best_p > 0.5`: the optimum weights the ASV LLR above the CM LLR.
    pub favours_asv: bool,
    pub grid: Vec<SweepRow>,
}

impl SweepReport {
    pub fn new(objective: &str, r: &SweepResult) -> Self {
        Self {
            objective: objective.to_string(),
            best_p: Real(r.best_p),
            best_value: Real(r.best_value),
            favours_asv: r.best_p > 0.5,
            grid: r.table.iter().map(|&(p, v)| SweepRow { p: Real(p), value: Real(v) }).collect(),
        }
    }
}

impl Report for SweepReport {
    const KIND: &'static str = "sweep report";

    fn to_csv(&self) -> Option<String> {
        let mut out = format!("p,{}\n", self.objective);
        for row in &self.grid {
            out.push_str(&format!("{},{}\n", format_real(row.p.0), format_real(row.value.0)));
        }
        Some(out)
    }
}
