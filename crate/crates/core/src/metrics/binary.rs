//! Two-class detection metrics.
//!
//! Every metric uses the decision rule "accept iff score >= threshold".

use crate::error::{Error, Result};
use crate::metrics::{BinaryScores, CostModel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetPoint {
    pub threshold: f64,
    pub p_miss: f64,
    pub p_fa: f64,
}

/// A candidate threshold together with the smallest score it accepts.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Cut {
    pub threshold: f64,
    pub accept_from: f64,
}

pub(crate) fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// `-inf`, the midpoints between adjacent distinct values, `+inf`.
pub(crate) fn candidate_cuts<'a>(groups: impl IntoIterator<Item = &'a [f64]>) -> Vec<Cut> {
    let mut pooled: Vec<f64> = groups.into_iter().flatten().copied().collect();
    pooled.sort_by(f64::total_cmp);
    pooled.dedup();
    let mut cuts = Vec::with_capacity(pooled.len() + 1);
    cuts.push(Cut { threshold: f64::NEG_INFINITY, accept_from: f64::NEG_INFINITY });
    for w in pooled.windows(2) {
        cuts.push(Cut { threshold: midpoint(w[0], w[1]), accept_from: w[1] });
    }
    cuts.push(Cut { threshold: f64::INFINITY, accept_from: f64::INFINITY });
    cuts
}

fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = lo / 2.0 + hi / 2.0;
    // adjacent floats: the midpoint may round down onto `lo`
    if mid > lo {
        mid
    } else {
        hi
    }
}

/// Number of sorted values strictly below `cut`.
pub(crate) fn count_below(sorted: &[f64], cut: f64) -> usize {
    sorted.partition_point(|&x| x < cut)
}

pub(crate) fn rate(count: usize, total: usize) -> f64 {
    count as f64 / total as f64
}

/// DET curve in increasing threshold order. `p_miss` is non-decreasing and
/// `p_fa` non-increasing; the endpoints are `(0, 1)` and `(1, 0)`.
pub fn det_curve(s: &BinaryScores) -> Vec<DetPoint> {
    let pos = sorted(s.pos());
    let neg = sorted(s.neg());
    candidate_cuts([pos.as_slice(), neg.as_slice()])
        .into_iter()
        .map(|c| DetPoint {
            threshold: c.threshold,
            p_miss: rate(count_below(&pos, c.accept_from), pos.len()),
            p_fa: rate(neg.len() - count_below(&neg, c.accept_from), neg.len()),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EerPoint {
    pub eer: f64,
    /// Threshold of the DET point closest to the crossing.
    pub threshold: f64,
}

/// Equal error rate on the linearly interpolated DET curve.
pub fn eer(s: &BinaryScores) -> f64 {
    eer_point(s).eer
}

pub fn eer_point(s: &BinaryScores) -> EerPoint {
    eer_from_curve(&det_curve(s))
}

pub(crate) fn eer_from_curve(curve: &[DetPoint]) -> EerPoint {
    // the final point is always (1, 0), so a crossing exists
    let k = curve.iter().position(|p| p.p_miss >= p.p_fa).unwrap_or(curve.len() - 1);
    let hi = curve[k];
    if k == 0 || hi.p_miss == hi.p_fa {
        return EerPoint { eer: hi.p_miss.max(hi.p_fa), threshold: hi.threshold };
    }
    let lo = curve[k - 1];
    let d_lo = lo.p_fa - lo.p_miss;
    let d_hi = hi.p_miss - hi.p_fa;
    let t = d_lo / (d_lo + d_hi);
    let eer = lo.p_miss + t * (hi.p_miss - lo.p_miss);
    let threshold = if d_lo < d_hi { lo.threshold } else { hi.threshold };
    EerPoint { eer: eer.clamp(0.0, 1.0), threshold }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcfMinimum {
    pub value: f64,
    pub threshold: f64,
}

struct BinaryCost {
    c_miss: f64,
    c_fa: f64,
    prior: f64,
    norm: f64,
}

impl BinaryCost {
    fn new(cm: &CostModel) -> Result<Self> {
        let prior = cm.binary_prior()?;
        let norm = (cm.c_miss * prior).min(cm.c_fa * (1.0 - prior));
        if norm <= 0.0 {
            return Err(Error::invalid("DCF normalizer min(c_miss*pi, c_fa*(1-pi)) is zero"));
        }
        Ok(Self { c_miss: cm.c_miss, c_fa: cm.c_fa, prior, norm })
    }

    fn normalized(&self, p_miss: f64, p_fa: f64) -> f64 {
        (self.c_miss * self.prior * p_miss + self.c_fa * (1.0 - self.prior) * p_fa) / self.norm
    }
}

/// Minimum normalized DCF over the DET thresholds; ties go to the smallest
/// threshold.
pub fn min_dcf(s: &BinaryScores, cm: &CostModel) -> Result<DcfMinimum> {
    let cost = BinaryCost::new(cm)?;
    let mut best = DcfMinimum { value: f64::INFINITY, threshold: f64::NAN };
    for p in det_curve(s) {
        let value = cost.normalized(p.p_miss, p.p_fa);
        if value < best.value {
            best = DcfMinimum { value, threshold: p.threshold };
        }
    }
    Ok(best)
}

/// Bayes decision threshold on natural-log LLRs.
pub fn bayes_threshold(cm: &CostModel) -> Result<f64> {
    let prior = cm.binary_prior()?;
    Ok((cm.c_fa * (1.0 - prior)).ln() - (cm.c_miss * prior).ln())
}

/// Normalized DCF of hard decisions taken at the Bayes threshold.
pub fn act_dcf(llrs: &BinaryScores, cm: &CostModel) -> Result<f64> {
    let cost = BinaryCost::new(cm)?;
    let tau = bayes_threshold(cm)?;
    let misses = llrs.pos().iter().filter(|&&s| s < tau).count();
    let fas = llrs.neg().iter().filter(|&&s| s >= tau).count();
    Ok(cost.normalized(rate(misses, llrs.pos().len()), rate(fas, llrs.neg().len())))
}

/// `ln(1 + e^x)` without overflow.
pub fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// Cost of log-likelihood ratios, in bits.
pub fn cllr(llrs: &BinaryScores) -> f64 {
    let mean = |v: &[f64], sign: f64| v.iter().map(|&l| softplus(sign * l)).sum::<f64>() / v.len() as f64;
    0.5 * (mean(llrs.pos(), -1.0) + mean(llrs.neg(), 1.0)) / std::f64::consts::LN_2
}
