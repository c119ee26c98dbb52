//! Balance counts plus duration and speech-onset histograms over a small
//! directory of generated WAV files.
//!
//! `cargo run --example audit_dataset`

use sasv_kit::audit::{audit_audio_dir, AuditBins, AuditReport, VadConfig};
use sasv_kit::io::{parse_metadata, write_report, write_wav_i16, AudioBuffer, ReportFormat};

fn tone(lead_s: f64, total_s: f64) -> sasv_kit::Result<AudioBuffer> {
    let sr = 16_000;
    let lead = (lead_s * f64::from(sr)) as usize;
    let samples = (0..(total_s * f64::from(sr)) as usize)
        .map(|i| if i < lead { 0.0 } else { 0.3 * (i as f32 * 0.11).sin() })
        .collect();
    AudioBuffer::new(samples, sr)
}

fn main() -> sasv_kit::Result<()> {
    let dir = std::env::temp_dir().join(format!("sasvkit-audit-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let meta = parse_metadata(
        "b1\tF\t-\t-\tbonafide\nb2\tM\tC01\t-\tbonafide\ns1\tM\t-\tA01\tspoof\ns2\tF\tC01\tA02\tspoof\n",
    )?;
    for (id, lead, len) in [("b1", 0.2, 3.0), ("b2", 0.4, 4.5), ("s1", 0.05, 2.0)] {
        write_wav_i16(dir.join(format!("{id}.wav")), &tone(lead, len)?)?;
    }

    let (facts, missing) = audit_audio_dir(&dir, &meta, &VadConfig::default())?;
    for f in &facts {
        println!("{}: {:.2} s, onset {:?}", f.utt_id, f.duration, f.delay);
    }
    println!("missing audio: {missing:?}");

    let report = AuditReport::from_metadata(&meta).with_audio(&facts, &meta, missing.len(), &AuditBins::default())?;
    println!("{}", String::from_utf8(write_report(&report, ReportFormat::Json)?).unwrap());
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
