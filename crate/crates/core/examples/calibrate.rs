//! Logistic, beta and PAV calibration of badly scaled scores.
//!
//! `cargo run --example calibrate`

use sasv_kit::calibration::{apply_calibration, fit_beta, fit_logreg, pav_llr, ScoreScaling, TrainConfig};
use sasv_kit::metrics::{cllr, eer, BinaryScores};
use sasv_kit::synth::{gaussian_scores, SynthConfig};

fn main() -> sasv_kit::Result<()> {
    let (pos, neg) = gaussian_scores(&SynthConfig { n: 2000, seed: 3, ..SynthConfig::default() })?;
    let stretch = |v: &[f64]| v.iter().map(|s| 4.0 * s + 2.5).collect::<Vec<_>>();
    let (pos, neg) = (stretch(&pos), stretch(&neg));
    let raw = BinaryScores::new(pos.clone(), neg.clone())?;
    println!("raw        cllr {:.4}  eer {:.4}", cllr(&raw), eer(&raw));

    let tc = TrainConfig::default();
    let lr = fit_logreg(&pos, &neg, &tc)?;
    let cal = BinaryScores::new(apply_calibration(&lr, &pos), apply_calibration(&lr, &neg))?;
    println!("logreg     cllr {:.4}  eer {:.4}  model {}", cllr(&cal), eer(&cal), lr.to_json());

    // beta calibration wants bounded scores; squash into (-1, 1) first
    let squash = |v: &[f64]| v.iter().map(|s| (s / 8.0).tanh()).collect::<Vec<_>>();
    let (bp, bn) = (squash(&pos), squash(&neg));
    let beta = fit_beta(&bp, &bn, ScoreScaling::default(), &tc)?;
    let cal = BinaryScores::new(apply_calibration(&beta, &bp), apply_calibration(&beta, &bn))?;
    println!("beta       cllr {:.4}", cllr(&cal));

    let pav = pav_llr(&pos, &neg)?;
    let cal = BinaryScores::new(pav.apply_all(&pos), pav.apply_all(&neg))?;
    println!("PAV (bound) cllr {:.4} over {} steps", cllr(&cal), pav.steps().count());
    Ok(())
}
