//! Minimal PCM audio toolkit for the fixed corpus format: 16-bit mono WAV
//! at 16 kHz. Samples are held as floats in [-1, 1) internally; quantization
//! back to int16 rounds half away from zero with no dithering.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use thiserror::Error;

/// The only sample rate this toolkit accepts or emits.
pub const SAMPLE_RATE: u32 = 16_000;

/// Largest representable positive float after int16 quantization (32767/32768).
pub const MAX_SAMPLE: f32 = 32_767.0 / 32_768.0;

/// Samples with |x| at or below this are treated as silence by [`speech_rms`].
pub const SILENCE_FLOOR: f32 = 1e-4;

#[derive(Debug, Error)]
pub enum AudioError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("{path}: not a RIFF/WAVE file")]
    NotWav { path: String },
    #[error("{path}: missing {chunk} chunk")]
    MissingChunk { path: String, chunk: &'static str },
    #[error("{path}: {property} {actual} != {expected}")]
    Format {
        path: String,
        property: &'static str,
        actual: u32,
        expected: u32,
    },
    #[error("empty sample range")]
    EmptyRange,
    #[error("gain must be positive, got {0}")]
    NonPositiveGain(f32),
    #[error("crossfade {xfade} exceeds shorter buffer length {shorter}")]
    CrossfadeTooLong { xfade: usize, shorter: usize },
}

/// Mono 16 kHz audio held as floats in [-1, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    pub samples: Vec<f32>,
}

impl AudioBuffer {
    pub fn new(samples: Vec<f32>) -> Self {
        Self { samples }
    }

    pub fn from_i16(samples: &[i16]) -> Self {
        Self {
            samples: samples.iter().map(|&s| s as f32 / 32_768.0).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / SAMPLE_RATE as f64
    }

    /// Quantize to int16: round half away from zero, clamp to [-32768, 32767].
    pub fn to_i16(&self) -> Vec<i16> {
        self.samples.iter().map(|&x| quantize(x)).collect()
    }
}

pub fn quantize(x: f32) -> i16 {
    // f32::round rounds half away from zero.
    let v = (x * 32_768.0).round();
    v.clamp(-32_768.0, 32_767.0) as i16
}

fn io_err(path: &Path, source: io::Error) -> AudioError {
    AudioError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Read a 16-bit mono 16 kHz PCM WAV file. Any other format is rejected
/// with an error naming the offending property; nothing is resampled.
pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioBuffer, AudioError> {
    let path = path.as_ref();
    let mut raw = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut raw))
        .map_err(|e| io_err(path, e))?;

    let p = || path.display().to_string();
    if raw.len() < 12 || &raw[0..4] != b"RIFF" || &raw[8..12] != b"WAVE" {
        return Err(AudioError::NotWav { path: p() });
    }

    let mut fmt: Option<(u16, u16, u32, u16)> = None; // (audio_format, channels, sample_rate, bits)
    let mut data: Option<&[u8]> = None;
    let mut pos = 12;
    while pos + 8 <= raw.len() {
        let id = &raw[pos..pos + 4];
        let size = u32::from_le_bytes(raw[pos + 4..pos + 8].try_into().unwrap()) as usize;
        let body_end = (pos + 8 + size).min(raw.len());
        let body = &raw[pos + 8..body_end];
        match id {
            b"fmt " if body.len() >= 16 => {
                fmt = Some((
                    u16::from_le_bytes(body[0..2].try_into().unwrap()),
                    u16::from_le_bytes(body[2..4].try_into().unwrap()),
                    u32::from_le_bytes(body[4..8].try_into().unwrap()),
                    u16::from_le_bytes(body[14..16].try_into().unwrap()),
                ));
            }
            b"data" => data = Some(body),
            _ => {}
        }
        // Chunks are word-aligned.
        pos = pos + 8 + size + (size & 1);
    }

    let (audio_format, channels, sample_rate, bits) = fmt.ok_or(AudioError::MissingChunk {
        path: p(),
        chunk: "fmt ",
    })?;
    let data = data.ok_or(AudioError::MissingChunk {
        path: p(),
        chunk: "data",
    })?;

    let check = |property, actual: u32, expected: u32| {
        if actual != expected {
            Err(AudioError::Format {
                path: p(),
                property,
                actual,
                expected,
            })
        } else {
            Ok(())
        }
    };
    check("audio_format", audio_format as u32, 1)?;
    check("channels", channels as u32, 1)?;
    check("sample_rate", sample_rate, SAMPLE_RATE)?;
    check("bits_per_sample", bits as u32, 16)?;

    let samples: Vec<f32> = data
        .chunks_exact(2)
        .map(|b| i16::from_le_bytes([b[0], b[1]]) as f32 / 32_768.0)
        .collect();
    Ok(AudioBuffer { samples })
}

/// Write a canonical 44-byte-header mono 16 kHz 16-bit PCM WAV file.
pub fn write_wav(buffer: &AudioBuffer, path: impl AsRef<Path>) -> Result<(), AudioError> {
    let path = path.as_ref();
    let bytes = wav_bytes(buffer);
    File::create(path)
        .and_then(|mut f| f.write_all(&bytes))
        .map_err(|e| io_err(path, e))
}

/// Serialize to WAV bytes (canonical 44-byte header + PCM data).
pub fn wav_bytes(buffer: &AudioBuffer) -> Vec<u8> {
    let pcm = buffer.to_i16();
    let data_size = (pcm.len() * 2) as u32;
    let byte_rate = SAMPLE_RATE * 2;
    let mut out = Vec::with_capacity(44 + data_size as usize);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_size).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes()); // PCM
    out.extend_from_slice(&1u16.to_le_bytes()); // mono
    out.extend_from_slice(&SAMPLE_RATE.to_le_bytes());
    out.extend_from_slice(&byte_rate.to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes()); // block align
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_size.to_le_bytes());
    for s in pcm {
        out.extend_from_slice(&s.to_le_bytes());
    }
    out
}

/// RMS over a sample range, all samples included.
pub fn rms(buffer: &AudioBuffer, range: std::ops::Range<usize>) -> Result<f32, AudioError> {
    if range.is_empty() || range.end > buffer.len() {
        return Err(AudioError::EmptyRange);
    }
    let n = range.len();
    let sum: f64 = buffer.samples[range].iter().map(|&x| (x as f64) * (x as f64)).sum();
    Ok((sum / n as f64).sqrt() as f32)
}

/// RMS over the non-silent samples of a range (|x| > `SILENCE_FLOOR`).
/// An all-silent range yields 0.0.
pub fn speech_rms(buffer: &AudioBuffer, range: std::ops::Range<usize>) -> Result<f32, AudioError> {
    if range.is_empty() || range.end > buffer.len() {
        return Err(AudioError::EmptyRange);
    }
    let mut sum = 0f64;
    let mut n = 0usize;
    for &x in &buffer.samples[range] {
        if x.abs() > SILENCE_FLOOR {
            sum += (x as f64) * (x as f64);
            n += 1;
        }
    }
    if n == 0 {
        return Ok(0.0);
    }
    Ok((sum / n as f64).sqrt() as f32)
}

/// Multiply every sample by `g`, clamping to [-1, 1). Returns the scaled
/// buffer and the number of clamped samples.
pub fn apply_gain(buffer: &AudioBuffer, g: f32) -> Result<(AudioBuffer, usize), AudioError> {
    if g <= 0.0 || !g.is_finite() {
        return Err(AudioError::NonPositiveGain(g));
    }
    let mut clips = 0usize;
    let samples = buffer
        .samples
        .iter()
        .map(|&x| {
            let y = x * g;
            if y > MAX_SAMPLE {
                clips += 1;
                MAX_SAMPLE
            } else if y < -1.0 {
                clips += 1;
                -1.0
            } else {
                y
            }
        })
        .collect();
    Ok((AudioBuffer { samples }, clips))
}

/// Concatenate `a` and `b` with a linear crossfade of `xfade` samples.
///
/// Output length is |a| + |b| - xfade. Samples outside the overlap are
/// bit-identical to their sources; inside it,
/// out[i] = a_tail[i] + w(i) * (b_head[i] - a_tail[i]) with
/// w(i) = (i+1)/(xfade+1), so crossfading a constant with itself is exact.
pub fn crossfade_concat(
    a: &AudioBuffer,
    b: &AudioBuffer,
    xfade: usize,
) -> Result<AudioBuffer, AudioError> {
    let shorter = a.len().min(b.len());
    if xfade > shorter {
        return Err(AudioError::CrossfadeTooLong { xfade, shorter });
    }
    let mut samples = Vec::with_capacity(a.len() + b.len() - xfade);
    samples.extend_from_slice(&a.samples[..a.len() - xfade]);
    let a_tail = &a.samples[a.len() - xfade..];
    let b_head = &b.samples[..xfade];
    for i in 0..xfade {
        let w = (i + 1) as f32 / (xfade + 1) as f32;
        samples.push(a_tail[i] + w * (b_head[i] - a_tail[i]));
    }
    samples.extend_from_slice(&b.samples[xfade..]);
    Ok(AudioBuffer { samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sine(amp: f32, freq_hz: f32, n: usize) -> AudioBuffer {
        AudioBuffer::new(
            (0..n)
                .map(|i| amp * (2.0 * std::f32::consts::PI * freq_hz * i as f32 / SAMPLE_RATE as f32).sin())
                .collect(),
        )
    }

    #[test]
    fn wav_round_trip_one_second() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.wav");
        let buf = sine(0.5, 440.0, 16_000);
        write_wav(&buf, &path).unwrap();
        let back = read_wav(&path).unwrap();
        assert_eq!(back.len(), 16_000);
        assert_eq!(back.to_i16(), buf.to_i16());
    }

    #[test]
    fn wav_all_zero() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("z.wav");
        write_wav(&AudioBuffer::new(vec![0.0; 123]), &path).unwrap();
        let back = read_wav(&path).unwrap();
        assert_eq!(back.samples, vec![0.0; 123]);
    }

    #[test]
    fn wav_rejects_wrong_rate() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.wav");
        let mut bytes = wav_bytes(&AudioBuffer::new(vec![0.0; 10]));
        bytes[24..28].copy_from_slice(&44_100u32.to_le_bytes());
        std::fs::write(&path, &bytes).unwrap();
        let err = read_wav(&path).unwrap_err();
        match err {
            AudioError::Format { property, actual, expected, .. } => {
                assert_eq!(property, "sample_rate");
                assert_eq!(actual, 44_100);
                assert_eq!(expected, 16_000);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn quantize_clamps_full_scale() {
        assert_eq!(quantize(1.0), 32_767);
        assert_eq!(quantize(-1.0), -32_768);
        assert_eq!(quantize(0.0), 0);
    }

    #[test]
    fn rms_constant_and_silence() {
        let buf = AudioBuffer::new(vec![0.5; 1000]);
        assert!((rms(&buf, 0..1000).unwrap() - 0.5).abs() < 1e-6);
        let silent = AudioBuffer::new(vec![0.0; 1000]);
        assert_eq!(rms(&silent, 0..1000).unwrap(), 0.0);
        assert_eq!(speech_rms(&silent, 0..1000).unwrap(), 0.0);
        assert!(rms(&buf, 5..5).is_err());
    }

    #[test]
    fn rms_sine_closed_form() {
        // 100 Hz over one second = 100 full periods.
        let buf = sine(0.8, 100.0, 16_000);
        let got = rms(&buf, 0..buf.len()).unwrap();
        assert!((got - 0.8 / 2f32.sqrt()).abs() < 1e-3, "got {got}");
    }

    #[test]
    fn gain_identity_and_scale() {
        let buf = AudioBuffer::new(vec![0.4; 100]);
        let (same, clips) = apply_gain(&buf, 1.0).unwrap();
        assert_eq!(same.samples, buf.samples);
        assert_eq!(clips, 0);
        let (scaled, clips) = apply_gain(&buf, 2.0).unwrap();
        assert!(scaled.samples.iter().all(|&x| (x - 0.8).abs() < 1e-6));
        assert_eq!(clips, 0);
    }

    #[test]
    fn gain_clamps_and_counts() {
        let buf = AudioBuffer::new(vec![0.9; 64]);
        let (clamped, clips) = apply_gain(&buf, 2.0).unwrap();
        assert!(clamped.samples.iter().all(|&x| x == MAX_SAMPLE));
        assert_eq!(clips, 64);
        assert!(apply_gain(&buf, 0.0).is_err());
        assert!(apply_gain(&buf, -1.0).is_err());
    }

    #[test]
    fn crossfade_lengths() {
        let a = AudioBuffer::new(vec![0.1; 1000]);
        let b = AudioBuffer::new(vec![0.2; 500]);
        assert_eq!(crossfade_concat(&a, &b, 100).unwrap().len(), 1400);
        assert_eq!(crossfade_concat(&a, &b, 0).unwrap().len(), 1500);
        assert!(crossfade_concat(&a, &b, 501).is_err());
    }

    #[test]
    fn crossfade_constant_identity() {
        let a = AudioBuffer::new(vec![0.37; 400]);
        let b = AudioBuffer::new(vec![0.37; 300]);
        let out = crossfade_concat(&a, &b, 160).unwrap();
        assert!(out.samples.iter().all(|&x| x == 0.37));
    }

    proptest! {
        #[test]
        fn wav_round_trip_is_lossless(samples in proptest::collection::vec(-1.0f32..1.0, 1..400)) {
            let buf = AudioBuffer::new(samples);
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("p.wav");
            write_wav(&buf, &path).unwrap();
            let back = read_wav(&path).unwrap();
            prop_assert_eq!(back.to_i16(), buf.to_i16());
        }

        #[test]
        fn crossfade_length_law(
            a_len in 1usize..600,
            b_len in 1usize..600,
            xfade_frac in 0.0f64..=1.0,
        ) {
            let xfade = (xfade_frac * a_len.min(b_len) as f64) as usize;
            let a = AudioBuffer::new(vec![0.1; a_len]);
            let b = AudioBuffer::new(vec![-0.2; b_len]);
            let out = crossfade_concat(&a, &b, xfade).unwrap();
            prop_assert_eq!(out.len(), a_len + b_len - xfade);
            // Outside the overlap both sides are bit-identical to their sources.
            prop_assert_eq!(&out.samples[..a_len - xfade], &a.samples[..a_len - xfade]);
            prop_assert_eq!(&out.samples[a_len..], &b.samples[xfade..]);
        }
    }
}
