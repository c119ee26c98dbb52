//! EER, minDCF, actDCF and Cllr of synthetic countermeasure scores.
//!
//! `cargo run --example evaluate_cm`

use sasv_kit::metrics::BinaryScores;
use sasv_kit::metrics::{det_curve, eer_point, CostModel, MetricReport};
use sasv_kit::synth::{gaussian_scores, SynthConfig};

fn main() -> sasv_kit::Result<()> {
    let cfg = SynthConfig { n: 5000, ..SynthConfig::default() };
    let (bonafide, spoof) = gaussian_scores(&cfg)?;

    // the Gaussian fixture's scores become LLRs under a known affine map
    let llrs = BinaryScores::new(bonafide, spoof)?.map(|s| cfg.true_llr(s))?;
    let report = MetricReport::binary(&llrs, &CostModel::binary_default())?;
    println!("{}", report.summary());

    let e = eer_point(&llrs);
    println!("closed-form EER {:.4}, measured {:.4} at threshold {:.3}", cfg.closed_form_eer(), e.eer, e.threshold);
    println!("DET curve has {} operating points", det_curve(&llrs).len());
    Ok(())
}
