//! Brute-force reference implementations shared by the integration tests.
//!
//! Every oracle enumerates thresholds `-inf`, each distinct observed score and
//! `+inf`, and counts decisions with a linear scan. Cost arithmetic is written
//! out from the cost model fields so minima agree bit for bit.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use sasv_kit::metrics::{CostModel, TandemScore};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, mu: f64, sigma: f64, n: usize) -> Vec<f64> {
    let d = Normal::new(mu, sigma).unwrap();
    (0..n).map(|_| d.sample(rng)).collect()
}

/// Small integer-valued scores, so ties are common.
pub fn coarse(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| f64::from(rng.random_range(-4i32..=4)) * 0.5).collect()
}

fn thresholds<'a>(groups: impl IntoIterator<Item = &'a [f64]>) -> Vec<f64> {
    let mut t: Vec<f64> = groups.into_iter().flatten().copied().collect();
    t.push(f64::NEG_INFINITY);
    t.push(f64::INFINITY);
    t.sort_by(f64::total_cmp);
    t.dedup();
    t
}

fn accepted(v: &[f64], tau: f64) -> usize {
    v.iter().filter(|&&s| s >= tau).count()
}

fn frac(k: usize, n: usize) -> f64 {
    k as f64 / n as f64
}

pub fn oracle_min_dcf(pos: &[f64], neg: &[f64], cm: &CostModel) -> f64 {
    let prior = cm.pi_target / (cm.pi_target + cm.pi_nontarget);
    let norm = (cm.c_miss * prior).min(cm.c_fa * (1.0 - prior));
    thresholds([pos, neg])
        .into_iter()
        .map(|tau| {
            let p_miss = frac(pos.len() - accepted(pos, tau), pos.len());
            let p_fa = frac(accepted(neg, tau), neg.len());
            (cm.c_miss * prior * p_miss + cm.c_fa * (1.0 - prior) * p_fa) / norm
        })
        .fold(f64::INFINITY, f64::min)
}

/// EER by scanning every threshold for the smallest `max(p_miss, p_fa)`; an
/// upper bound on the interpolated EER, equal to it when the curves cross
/// at an observed threshold.
pub fn oracle_eer_bound(pos: &[f64], neg: &[f64]) -> f64 {
    thresholds([pos, neg])
        .into_iter()
        .map(|tau| {
            let p_miss = frac(pos.len() - accepted(pos, tau), pos.len());
            let p_fa = frac(accepted(neg, tau), neg.len());
            p_miss.max(p_fa)
        })
        .fold(f64::INFINITY, f64::min)
}

fn sasv_weights(cm: &CostModel) -> (f64, f64, f64, f64) {
    let w_miss = cm.c_miss * cm.pi_target;
    let w_non = cm.c_fa * cm.pi_nontarget;
    let w_spf = cm.c_fa_spoof * cm.pi_spoof;
    (w_miss, w_non, w_spf, w_miss.min(w_non + w_spf))
}

pub fn oracle_a_dcf(tar: &[f64], non: &[f64], spf: &[f64], cm: &CostModel) -> f64 {
    let (w_miss, w_non, w_spf, norm) = sasv_weights(cm);
    thresholds([tar, non, spf])
        .into_iter()
        .map(|tau| {
            let p_miss = frac(tar.len() - accepted(tar, tau), tar.len());
            let p_non = frac(accepted(non, tau), non.len());
            let p_spf = frac(accepted(spf, tau), spf.len());
            (w_miss * p_miss + w_non * p_non + w_spf * p_spf) / norm
        })
        .fold(f64::INFINITY, f64::min)
}

fn tandem_accepted(v: &[TandemScore], asv_tau: f64, cm_tau: f64) -> usize {
    v.iter().filter(|p| p.asv >= asv_tau && p.cm >= cm_tau).count()
}

pub fn oracle_t_dcf(
    tar: &[TandemScore],
    non: &[TandemScore],
    spf: &[TandemScore],
    asv_tau: f64,
    cm: &CostModel,
) -> f64 {
    let (w_miss, w_non, w_spf, norm) = sasv_weights(cm);
    let cms: Vec<f64> = tar.iter().chain(non).chain(spf).map(|p| p.cm).collect();
    thresholds([cms.as_slice()])
        .into_iter()
        .map(|cm_tau| {
            let p_miss = frac(tar.len() - tandem_accepted(tar, asv_tau, cm_tau), tar.len());
            let p_non = frac(tandem_accepted(non, asv_tau, cm_tau), non.len());
            let p_spf = frac(tandem_accepted(spf, asv_tau, cm_tau), spf.len());
            (w_miss * p_miss + w_non * p_non + w_spf * p_spf) / norm
        })
        .fold(f64::INFINITY, f64::min)
}

/// Coarse 2-D search for the tandem operating point where the three error
/// rates are closest: `levels` ASV quantile thresholds by every CM
/// threshold. Returns the mean of the three rates at the best point.
pub fn oracle_t_eer(tar: &[TandemScore], non: &[TandemScore], spf: &[TandemScore], levels: usize) -> f64 {
    let mut asv: Vec<f64> = tar.iter().chain(non).chain(spf).map(|p| p.asv).collect();
    asv.sort_by(f64::total_cmp);
    let mut cms: Vec<f64> = tar.iter().chain(non).chain(spf).map(|p| p.cm).collect();
    cms.sort_by(f64::total_cmp);
    cms.dedup();
    let mut best = (f64::INFINITY, f64::NAN);
    for i in 0..=levels {
        let asv_tau = asv[(i * (asv.len() - 1)) / levels];
        // sorted gated CM scores per class; rates are counts above each cut
        let gated = |v: &[TandemScore]| {
            let mut g: Vec<f64> = v.iter().filter(|p| p.asv >= asv_tau).map(|p| p.cm).collect();
            g.sort_by(f64::total_cmp);
            g
        };
        let (gt, gn, gs) = (gated(tar), gated(non), gated(spf));
        let above = |g: &[f64], tau: f64| g.len() - g.partition_point(|&x| x < tau);
        for &cm_tau in std::iter::once(&f64::NEG_INFINITY).chain(&cms) {
            let m = 1.0 - frac(above(&gt, cm_tau), tar.len());
            let n = frac(above(&gn, cm_tau), non.len());
            let s = frac(above(&gs, cm_tau), spf.len());
            let spread = (m - n).abs().max((m - s).abs()).max((n - s).abs());
            if spread < best.0 {
                best = (spread, (m + n + s) / 3.0);
            }
        }
    }
    best.1
}

pub fn pairs(asv: &[f64], cm: &[f64]) -> Vec<TandemScore> {
    asv.iter().zip(cm).map(|(&asv, &cm)| TandemScore { asv, cm }).collect()
}
