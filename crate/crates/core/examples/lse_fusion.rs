//! Soft-minimum fusion of ASV and CM LLRs and a grid search over its weight.
//!
//! `cargo run --example lse_fusion`

use sasv_kit::fusion::{grid_search_weight, lse_fuse, LsePolicy, WeightGrid};
use sasv_kit::io::write_sasv_trials;
use sasv_kit::metrics::{CostModel, PairedSasvScores, TandemScore};
use sasv_kit::synth::{synth_sasv, SynthConfig};

fn main() -> sasv_kit::Result<()> {
    let pol = LsePolicy::new(0.5)?;
    for (cm, asv) in [(3.0, 3.0), (-4.0, 5.0), (5.0, -4.0), (700.0, -700.0)] {
        println!("cm {cm:>6} asv {asv:>6} -> fused {:.4}", lse_fuse(cm, asv, pol));
    }

    let trials = synth_sasv(&SynthConfig { n: 600, ..SynthConfig::default() })?;
    println!("{}", write_sasv_trials(&trials[..3]).trim_end());
    let mut paired = PairedSasvScores::default();
    for t in &trials {
        let (asv, cm) = (t.asv_score.unwrap(), t.cm_score.unwrap());
        paired.class_mut(t.trial_class).push(TandemScore { asv, cm });
    }
    let sweep = grid_search_weight(&paired, &CostModel::uniform(), &WeightGrid::default().points()?)?;
    println!("best p {} with min a-DCF {:.4}", sweep.best_p, sweep.best_value);
    Ok(())
}
