//! Per attack x codec EER table with pooled row and column.
//!
//! `cargo run --example breakdown`

use sasv_kit::io::{join_scores_metadata, write_report, ReportFormat};
use sasv_kit::metrics::{grouped_eval, CmMetric, CostModel};
use sasv_kit::synth::{synth_cm, SynthConfig};

fn main() -> sasv_kit::Result<()> {
    let (scores, meta) = synth_cm(&SynthConfig { n: 1200, ..SynthConfig::default() })?;
    let set = join_scores_metadata(&scores, &meta)?;
    let table = grouped_eval(&set, "attack,codec".parse()?, CmMetric::Eer, &CostModel::binary_default())?;
    print!("{}", String::from_utf8(write_report(&table, ReportFormat::Csv)?).unwrap());
    Ok(())
}
