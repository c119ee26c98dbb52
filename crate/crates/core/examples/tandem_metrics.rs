//! a-DCF, t-DCF and t-EER of paired ASV and CM scores.
//!
//! `cargo run --example tandem_metrics`

use sasv_kit::fusion::{lse_fuse, LsePolicy};
use sasv_kit::metrics::{
    a_dcf, default_asv_threshold, t_dcf, t_eer, CostModel, PairedSasvScores, TandemScore, TeerGrid,
};
use sasv_kit::synth::{synth_sasv, SynthConfig};

fn main() -> sasv_kit::Result<()> {
    let trials = synth_sasv(&SynthConfig { n: 2000, mu_pos: 1.5, mu_neg: -1.5, ..SynthConfig::default() })?;
    let mut paired = PairedSasvScores::default();
    for t in &trials {
        let s = TandemScore { asv: t.asv_score.unwrap(), cm: t.cm_score.unwrap() };
        paired.class_mut(t.trial_class).push(s);
    }
    let cost = CostModel::uniform();

    let pol = LsePolicy::new(0.5)?;
    let fused = paired.map(|s| lse_fuse(s.cm, s.asv, pol));
    let a = a_dcf(&fused, &cost)?;
    println!("min a-DCF {:.4} at fused threshold {:.3}", a.value, a.threshold);

    let tau = default_asv_threshold(&paired)?;
    let t = t_dcf(&paired, tau, &cost)?;
    println!("min t-DCF {:.4} with ASV fixed at {:.3}, CM threshold {:.3}", t.value, t.asv_threshold, t.cm_threshold);

    match t_eer(&paired, TeerGrid::default()) {
        Ok(r) => println!("t-EER {:.4} at ASV threshold {:.3}", r.rate, r.asv_threshold),
        Err(e) => println!("t-EER unavailable: {e}"),
    }
    Ok(())
}
