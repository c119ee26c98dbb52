//! Score-domain toolkit for spoofing-aware speaker verification.
//!
//! * [`io`]: score, metadata, trial, embedding and WAV formats plus report
//!   serialization.
//! * [`audit`]: dataset balance, duration, speech-onset delay and quality
//!   distributions.
//! * [`metrics`]: EER, minDCF, actDCF, Cllr, a-DCF, t-DCF and t-EER, with
//!   per-attack and per-codec breakdowns.
//! * [`calibration`]: logistic-regression, beta and PAV score-to-LLR maps.
//! * [`fusion`]: cosine scoring, linear fusion and weighted LSE fusion.
//! * [`synth`]: seeded Gaussian fixtures.
//! * [`cli`]: the `sasvkit` command line.
//!
//! Every threshold decision accepts a trial when `score >= threshold`.

pub mod audit;
pub mod calibration;
pub mod cli;
pub mod error;
pub mod fusion;
pub mod io;
pub mod metrics;
pub mod synth;

pub use error::{Error, Result};
