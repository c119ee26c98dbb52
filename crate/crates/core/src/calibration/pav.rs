use crate::error::{Error, Result};

/// Posterior clamp used when converting PAV blocks to LLRs.
pub const PAV_EPSILON: f64 = 1e-6;

/// Monotone step calibrator from pool-adjacent-violators.
///
/// Step `i` covers `[start_i, start_{i+1})`; scores below the first start map
/// to the first step.
#[derive(Debug, Clone, PartialEq)]
pub struct PavCalibrator {
    starts: Vec<f64>,
    llrs: Vec<f64>,
}

#[derive(Clone, Copy)]
struct Block {
    start: f64,
    /// Weighted positive mass and total mass.
    pos: f64,
    total: f64,
}

impl Block {
    /// `self.mean() >= other.mean()` without division.
    fn violates(&self, next: &Block) -> bool {
        self.pos * next.total >= next.pos * self.total
    }
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

impl PavCalibrator {
    /// Isotonic fit of the target posterior with equal class weighting, so
    /// the posterior log-odds are LLRs.
    pub fn fit(pos: &[f64], neg: &[f64]) -> Result<Self> {
        if pos.is_empty() {
            return Err(Error::EmptyClass("positive".into()));
        }
        if neg.is_empty() {
            return Err(Error::EmptyClass("negative".into()));
        }
        if pos.iter().chain(neg).any(|s| !s.is_finite()) {
            return Err(Error::NonFinite("training score".into()));
        }
        let w_pos = 0.5 / pos.len() as f64;
        let w_neg = 0.5 / neg.len() as f64;
        let mut points: Vec<(f64, bool)> =
            pos.iter().map(|&s| (s, true)).chain(neg.iter().map(|&s| (s, false))).collect();
        points.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut blocks: Vec<Block> = Vec::new();
        let mut i = 0;
        while i < points.len() {
            let start = points[i].0;
            let mut block = Block { start, pos: 0.0, total: 0.0 };
            while i < points.len() && points[i].0 == start {
                let w = if points[i].1 { w_pos } else { w_neg };
                if points[i].1 {
                    block.pos += w;
                }
                block.total += w;
                i += 1;
            }
            while let Some(prev) = blocks.last() {
                if !prev.violates(&block) {
                    break;
                }
                let prev = blocks.pop().expect("non-empty");
                block = Block { start: prev.start, pos: prev.pos + block.pos, total: prev.total + block.total };
            }
            blocks.push(block);
        }

        let starts = blocks.iter().map(|b| b.start).collect();
        let llrs = blocks.iter().map(|b| logit((b.pos / b.total).clamp(PAV_EPSILON, 1.0 - PAV_EPSILON))).collect();
        Ok(Self { starts, llrs })
    }

    pub fn apply(&self, score: f64) -> f64 {
        let k = self.starts.partition_point(|&s| s <= score);
        self.llrs[k.saturating_sub(1)]
    }

    pub fn apply_all(&self, scores: &[f64]) -> Vec<f64> {
        scores.iter().map(|&s| self.apply(s)).collect()
    }

    /// `(start, llr)` of every step, in increasing order.
    pub fn steps(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.starts.iter().copied().zip(self.llrs.iter().copied())
    }
}

/// Fits the PAV calibrator; shorthand for [`PavCalibrator::fit`].
pub fn pav_llr(pos: &[f64], neg: &[f64]) -> Result<PavCalibrator> {
    PavCalibrator::fit(pos, neg)
}
