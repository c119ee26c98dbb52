//! Speaker enrollment by embedding averaging, then cosine scoring.
//!
//! `cargo run --example enroll_cosine`

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use sasv_kit::fusion::{cosine_score, enroll_average, Embedding};
use sasv_kit::metrics::{eer, BinaryScores};

const DIM: usize = 32;

fn main() -> sasv_kit::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let noise = Normal::new(0.0, 1.0).unwrap();
    let speakers: Vec<Vec<f64>> = (0..20).map(|_| (0..DIM).map(|_| noise.sample(&mut rng) * 0.5).collect()).collect();
    let mut utter = |spk: &[f64]| Embedding::new(spk.iter().map(|x| x + noise.sample(&mut rng)).collect());

    let mut target = Vec::new();
    let mut nontarget = Vec::new();
    for (i, spk) in speakers.iter().enumerate() {
        let model = enroll_average(&[utter(spk)?, utter(spk)?, utter(spk)?])?;
        for _ in 0..10 {
            target.push(cosine_score(&model, &utter(spk)?)?);
            let other = &speakers[(i + 1) % speakers.len()];
            nontarget.push(cosine_score(&model, &utter(other)?)?);
        }
    }
    let s = BinaryScores::new(target, nontarget)?;
    println!("cosine ASV EER over {} + {} trials: {:.4}", s.pos().len(), s.neg().len(), eer(&s));
    Ok(())
}
