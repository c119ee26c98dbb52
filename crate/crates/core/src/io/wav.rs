use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use crate::error::{Error, Result};

/// Mono audio normalized to `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    pub samples: Vec<f32>,
    pub sample_rate: u32,
}

impl AudioBuffer {
    pub fn new(samples: Vec<f32>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::invalid("sample rate must be positive"));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::NonFinite("audio sample".into()));
        }
        Ok(Self { samples, sample_rate })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioBuffer> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::File { path: path.to_path_buf(), source })?;
    read_wav_from(BufReader::new(file))
}

/// Reads a mono RIFF/WAVE stream holding 16-bit integer PCM or 32-bit float
/// samples. Integer samples map to `v / 32768`.
pub fn read_wav_from<R: Read>(reader: R) -> Result<AudioBuffer> {
    let mut wav = WavReader::new(reader).map_err(header_error)?;
    let spec = wav.spec();
    if spec.channels != 1 {
        return Err(Error::UnsupportedAudio(format!("{} channels, only mono is supported", spec.channels)));
    }
    let declared = wav.len();
    let samples: Vec<f32> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Int, 16) => collect(wav.samples::<i16>(), declared, |v| f32::from(v) / 32768.0)?,
        (SampleFormat::Float, 32) => collect(wav.samples::<f32>(), declared, |v| v.clamp(-1.0, 1.0))?,
        (format, bits) => {
            return Err(Error::UnsupportedAudio(format!("{bits}-bit {format:?} samples")));
        }
    };
    AudioBuffer::new(samples, spec.sample_rate)
}

fn collect<T, I, F>(iter: I, declared: u32, map: F) -> Result<Vec<f32>>
where
    I: Iterator<Item = hound::Result<T>>,
    F: Fn(T) -> f32,
{
    let mut out = Vec::with_capacity(declared as usize);
    for sample in iter {
        match sample {
            Ok(v) => out.push(map(v)),
            // hound reports a short sample read as an `Other` io error
            Err(hound::Error::IoError(_)) => {
                return Err(Error::TruncatedAudio { declared, found: out.len() as u32 });
            }
            Err(e) => return Err(Error::Audio(e.to_string())),
        }
    }
    if out.len() < declared as usize {
        return Err(Error::TruncatedAudio { declared, found: out.len() as u32 });
    }
    Ok(out)
}

fn header_error(e: hound::Error) -> Error {
    match e {
        hound::Error::Unsupported => Error::UnsupportedAudio("codec other than PCM or IEEE float".into()),
        hound::Error::IoError(io) if io.kind() == std::io::ErrorKind::UnexpectedEof => {
            Error::Audio("truncated header".into())
        }
        other => Error::Audio(other.to_string()),
    }
}

/// Writes a 16-bit mono PCM file; samples are scaled by 32768 and saturated.
pub fn write_wav_i16(path: impl AsRef<Path>, audio: &AudioBuffer) -> Result<()> {
    let spec =
        WavSpec { channels: 1, sample_rate: audio.sample_rate, bits_per_sample: 16, sample_format: SampleFormat::Int };
    let mut writer = WavWriter::create(path, spec).map_err(|e| Error::Audio(e.to_string()))?;
    for &s in &audio.samples {
        let v = (f64::from(s) * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        writer.write_sample(v).map_err(|e| Error::Audio(e.to_string()))?;
    }
    writer.finalize().map_err(|e| Error::Audio(e.to_string()))
}
