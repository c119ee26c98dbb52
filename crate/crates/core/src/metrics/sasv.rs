//! Three-class metrics for spoofing-aware verification: a-DCF on single
//! fused scores, t-DCF and concurrent t-EER on gated ASV/CM pairs.

use crate::error::{Error, Result};
use crate::metrics::binary::{candidate_cuts, count_below, eer_point, rate, sorted};
use crate::metrics::{CostModel, DcfMinimum, PairedSasvScores, SasvScores, TandemScore};

struct SasvCost {
    w_miss: f64,
    w_fa_non: f64,
    w_fa_spoof: f64,
    norm: f64,
}

impl SasvCost {
    fn new(cm: &CostModel) -> Result<Self> {
        cm.check_sasv()?;
        let w_miss = cm.c_miss * cm.pi_target;
        let w_fa_non = cm.c_fa * cm.pi_nontarget;
        let w_fa_spoof = cm.c_fa_spoof * cm.pi_spoof;
        let norm = w_miss.min(w_fa_non + w_fa_spoof);
        if norm <= 0.0 {
            return Err(Error::invalid("a-DCF normalizer is zero"));
        }
        Ok(Self { w_miss, w_fa_non, w_fa_spoof, norm })
    }

    fn normalized(&self, p_miss: f64, p_fa_non: f64, p_fa_spoof: f64) -> f64 {
        (self.w_miss * p_miss + self.w_fa_non * p_fa_non + self.w_fa_spoof * p_fa_spoof) / self.norm
    }
}

/// Minimum normalized a-DCF over thresholds drawn from the pooled scores.
pub fn a_dcf(s: &SasvScores, cm: &CostModel) -> Result<DcfMinimum> {
    s.validate()?;
    let cost = SasvCost::new(cm)?;
    let tar = sorted(&s.target);
    let non = sorted(&s.nontarget);
    let spf = sorted(&s.spoof);
    let mut best = DcfMinimum { value: f64::INFINITY, threshold: f64::NAN };
    for c in candidate_cuts([tar.as_slice(), non.as_slice(), spf.as_slice()]) {
        let p_miss = rate(count_below(&tar, c.accept_from), tar.len());
        let p_fa_non = rate(non.len() - count_below(&non, c.accept_from), non.len());
        let p_fa_spf = rate(spf.len() - count_below(&spf, c.accept_from), spf.len());
        let value = cost.normalized(p_miss, p_fa_non, p_fa_spf);
        if value < best.value {
            best = DcfMinimum { value, threshold: c.threshold };
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TandemDcf {
    pub value: f64,
    pub asv_threshold: f64,
    pub cm_threshold: f64,
}

/// ASV operating point used by [`t_dcf`] when none is given: the threshold of
/// the ASV target-vs-nontarget EER.
pub fn default_asv_threshold(s: &PairedSasvScores) -> Result<f64> {
    Ok(eer_point(&s.asv_binary()?).threshold)
}

/// Minimum tandem DCF over the CM threshold with the ASV threshold fixed.
/// A trial is accepted iff `asv >= asv_threshold` and `cm >= cm_threshold`.
pub fn t_dcf(s: &PairedSasvScores, asv_threshold: f64, cm: &CostModel) -> Result<TandemDcf> {
    s.validate()?;
    if asv_threshold.is_nan() {
        return Err(Error::invalid("ASV threshold is NaN"));
    }
    let cost = SasvCost::new(cm)?;
    let gate =
        |v: &[TandemScore]| sorted(&v.iter().filter(|p| p.asv >= asv_threshold).map(|p| p.cm).collect::<Vec<_>>());
    let (tar, non, spf) = (gate(&s.target), gate(&s.nontarget), gate(&s.spoof));
    let all_cm: Vec<f64> = s.target.iter().chain(&s.nontarget).chain(&s.spoof).map(|p| p.cm).collect();
    let (n_tar, n_non, n_spf) = (s.target.len(), s.nontarget.len(), s.spoof.len());

    let mut best = TandemDcf { value: f64::INFINITY, asv_threshold, cm_threshold: f64::NAN };
    for c in candidate_cuts([all_cm.as_slice()]) {
        let accepted_tar = tar.len() - count_below(&tar, c.accept_from);
        let p_miss = rate(n_tar - accepted_tar, n_tar);
        let p_fa_non = rate(non.len() - count_below(&non, c.accept_from), n_non);
        let p_fa_spf = rate(spf.len() - count_below(&spf, c.accept_from), n_spf);
        let value = cost.normalized(p_miss, p_fa_non, p_fa_spf);
        if value < best.value {
            best.value = value;
            best.cm_threshold = c.threshold;
        }
    }
    Ok(best)
}

/// Resolution of the ASV-threshold grid searched by [`t_eer`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TeerGrid {
    /// Number of coarse grid points over the sorted distinct ASV scores.
    pub points: usize,
}

impl Default for TeerGrid {
    fn default() -> Self {
        Self { points: 101 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TandemEer {
    pub rate: f64,
    /// ASV threshold at the refined bracket end where the CM-side EER was
    /// taken.
    pub asv_threshold: f64,
}

/// Tandem operating state at one ASV threshold after solving
/// `p_miss = p_fa_nontarget` in the CM threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Crossing {
    /// Rate at the crossing and the spoof false-alarm rate there.
    At { rate: f64, spoof: f64 },
    /// The ASV gate alone already misses more targets than it passes
    /// nontargets; no CM threshold equalizes the two.
    Infeasible,
}

impl Crossing {
    /// `true` when the spoof rate is at or above the equal rate, or the
    /// point is infeasible (which happens only for high ASV thresholds).
    fn upper(self) -> bool {
        match self {
            Crossing::At { rate, spoof } => spoof >= rate,
            Crossing::Infeasible => true,
        }
    }
}

struct TandemSweep {
    target: Vec<TandemScore>,
    nontarget: Vec<TandemScore>,
    spoof: Vec<TandemScore>,
    asv_levels: Vec<f64>,
}

impl TandemSweep {
    fn new(s: &PairedSasvScores) -> Self {
        let by_cm = |v: &[TandemScore]| {
            let mut v = v.to_vec();
            v.sort_by(|a, b| a.cm.total_cmp(&b.cm));
            v
        };
        let mut asv_levels: Vec<f64> = s.target.iter().chain(&s.nontarget).chain(&s.spoof).map(|p| p.asv).collect();
        asv_levels.sort_by(f64::total_cmp);
        asv_levels.dedup();
        asv_levels.push(f64::INFINITY);
        Self { target: by_cm(&s.target), nontarget: by_cm(&s.nontarget), spoof: by_cm(&s.spoof), asv_levels }
    }

    fn gate(v: &[TandemScore], asv_threshold: f64) -> Vec<f64> {
        v.iter().filter(|p| p.asv >= asv_threshold).map(|p| p.cm).collect()
    }

    fn crossing(&self, level: usize) -> Crossing {
        let tau = self.asv_levels[level];
        let tar = Self::gate(&self.target, tau);
        let non = Self::gate(&self.nontarget, tau);
        let spf = Self::gate(&self.spoof, tau);
        let (n_tar, n_non, n_spf) = (self.target.len(), self.nontarget.len(), self.spoof.len());
        let cuts = candidate_cuts([tar.as_slice(), non.as_slice(), spf.as_slice()]);
        let rates = |k: usize| {
            let cut = cuts[k].accept_from;
            let p_miss = rate(n_tar - (tar.len() - count_below(&tar, cut)), n_tar);
            let p_fa = rate(non.len() - count_below(&non, cut), n_non);
            let p_spf = rate(spf.len() - count_below(&spf, cut), n_spf);
            (p_miss, p_fa, p_spf)
        };
        // first cut with p_miss >= p_fa; p_miss rises and p_fa falls with k
        let (mut lo, mut hi) = (0, cuts.len() - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            let (m, f, _) = rates(mid);
            if m >= f {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let k = lo;
        let (m1, f1, s1) = rates(k);
        if m1 == f1 {
            // equal rates hold on a run of cuts along which only the spoof
            // rate falls; report the spoof rate nearest the equal rate
            let (mut lo, mut hi) = (k, cuts.len());
            while lo < hi {
                let mid = (lo + hi) / 2;
                let (m, f, _) = rates(mid);
                if m > f {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            let s_lo = rates(lo - 1).2;
            return Crossing::At { rate: m1, spoof: m1.clamp(s_lo, s1) };
        }
        if k == 0 {
            return Crossing::Infeasible;
        }
        let (m0, f0, s0) = rates(k - 1);
        let d0 = f0 - m0;
        let d1 = m1 - f1;
        let t = d0 / (d0 + d1);
        Crossing::At { rate: m0 + t * (m1 - m0), spoof: s0 + t * (s1 - s0) }
    }
}

/// Concurrent tandem EER: the rate at which target miss, nontarget false
/// alarm and spoof false alarm coincide.
///
/// For each ASV threshold the CM threshold equalizing miss and nontarget
/// false-alarm rates is solved on the interpolated curve. A sign change of
/// `p_fa_spoof - rate` is located on a coarse grid of observed ASV scores,
/// refined by bisection down to adjacent observed scores, and the rate is
/// interpolated across that last bracket.
pub fn t_eer(s: &PairedSasvScores, grid: TeerGrid) -> Result<TandemEer> {
    s.validate()?;
    if grid.points < 2 {
        return Err(Error::invalid("t-EER grid needs at least 2 points"));
    }
    let sweep = TandemSweep::new(s);
    let last = sweep.asv_levels.len() - 1;
    let mut indices: Vec<usize> =
        (0..grid.points).map(|i| ((i as f64) * last as f64 / (grid.points - 1) as f64).round() as usize).collect();
    indices.dedup();

    let mut prev: Option<(usize, Crossing)> = None;
    let mut bracket = None;
    for &i in &indices {
        let c = sweep.crossing(i);
        if let Crossing::At { rate, spoof } = c {
            if rate == spoof {
                return Ok(TandemEer { rate, asv_threshold: sweep.asv_levels[i] });
            }
        }
        if let Some((j, pc)) = prev {
            if pc.upper() != c.upper() {
                bracket = Some(((j, pc), (i, c)));
                break;
            }
        }
        prev = Some((i, c));
    }
    let Some((mut lo, mut hi)) = bracket else {
        return Err(Error::NoConcurrentPoint);
    };

    while hi.0 - lo.0 > 1 {
        let mid = (lo.0 + hi.0) / 2;
        let c = sweep.crossing(mid);
        if let Crossing::At { rate, spoof } = c {
            if rate == spoof {
                return Ok(TandemEer { rate, asv_threshold: sweep.asv_levels[mid] });
            }
        }
        if c.upper() == lo.1.upper() {
            lo = (mid, c);
        } else {
            hi = (mid, c);
        }
    }

    let (rate, level) = match (lo.1, hi.1) {
        (Crossing::At { rate: r0, spoof: s0 }, Crossing::At { rate: r1, spoof: s1 }) => {
            let g0 = s0 - r0;
            let g1 = s1 - r1;
            let t = g0 / (g0 - g1);
            (r0 + t * (r1 - r0), if t < 0.5 { lo.0 } else { hi.0 })
        }
        (Crossing::At { rate, .. }, Crossing::Infeasible) => (rate, lo.0),
        (Crossing::Infeasible, Crossing::At { rate, .. }) => (rate, hi.0),
        (Crossing::Infeasible, Crossing::Infeasible) => return Err(Error::NoConcurrentPoint),
    };
    Ok(TandemEer { rate: rate.clamp(0.0, 1.0), asv_threshold: sweep.asv_levels[level] })
}
