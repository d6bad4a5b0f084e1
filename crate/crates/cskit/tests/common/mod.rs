//! Shared synthetic fixtures: sine-burst "words" with programmatically
//! generated alignments, plus on-disk corpora (WAV + CTM + audio index).

#![allow(dead_code)]

use std::path::{Path, PathBuf};

use cskit::audio::{self, AudioBuffer};
use cskit::corpus::{time_to_sample, AlignedUtterance, LanguageTag, WordAlignment};

pub const AR_WORDS: &[&str] = &["كتاب", "يوم", "محمد", "جديد", "كانت", "ليلى", "ابنة", "فاضل"];
pub const EN_WORDS: &[&str] = &["hello", "world", "the", "students", "read", "visits", "clinic"];

#[derive(Clone, Copy, PartialEq)]
pub enum Waveform {
    Sine,
    Constant,
}

/// Build an utterance of `words` sine-burst (or constant) words of
/// `word_s` seconds each, separated and padded by `gap_s` of silence.
pub fn synth_utterance(
    id: &str,
    language: LanguageTag,
    words: &[&str],
    word_s: f64,
    gap_s: f64,
    amp: f32,
    waveform: Waveform,
) -> (AlignedUtterance, AudioBuffer) {
    let sr = audio::SAMPLE_RATE as f64;
    let mut samples = Vec::new();
    let mut aligned = Vec::new();
    let mut t = gap_s;
    samples.resize(time_to_sample(t), 0.0);
    for (i, w) in words.iter().enumerate() {
        let start = t;
        let end = t + word_s;
        let n = time_to_sample(end) - time_to_sample(start);
        let freq = 180.0 + 35.0 * (i % 8) as f64;
        for j in 0..n {
            let v = match waveform {
                Waveform::Sine => {
                    amp * (2.0 * std::f64::consts::PI * freq * j as f64 / sr).sin() as f32
                }
                Waveform::Constant => amp,
            };
            samples.push(v);
        }
        samples.resize(time_to_sample(end + gap_s), 0.0);
        aligned.push(WordAlignment {
            word: w.to_string(),
            start_s: start,
            end_s: end,
        });
        t = end + gap_s;
    }
    let duration_s = samples.len() as f64 / sr;
    (
        AlignedUtterance {
            utterance_id: id.into(),
            audio_path: format!("{id}.wav"),
            language,
            duration_s,
            words: aligned,
            speaker_id: None,
        },
        AudioBuffer::new(samples),
    )
}

/// A small varied in-memory pool.
pub fn synth_pool(prefix: &str, language: LanguageTag, n: usize) -> cskit::splicer::Pool {
    let vocab = match language {
        LanguageTag::Arabic => AR_WORDS,
        _ => EN_WORDS,
    };
    let items = (0..n)
        .map(|i| {
            let n_words = 3 + i % 4;
            let words: Vec<&str> = (0..n_words).map(|j| vocab[(i + j) % vocab.len()]).collect();
            let amp = 0.2 + 0.05 * (i % 5) as f32;
            synth_utterance(
                &format!("{prefix}{i}"),
                language,
                &words,
                0.20 + 0.02 * (i % 3) as f64,
                0.10,
                amp,
                Waveform::Sine,
            )
        })
        .collect();
    cskit::splicer::Pool::new(items)
}

pub struct DiskCorpus {
    pub index_path: PathBuf,
    pub ctm_path: PathBuf,
}

/// Write a pool to disk as WAV files plus CTM and audio-index sidecars,
/// the layout `cskit splice` ingests.
pub fn write_corpus(
    dir: &Path,
    prefix: &str,
    language: LanguageTag,
    n: usize,
) -> DiskCorpus {
    let pool = synth_pool(prefix, language, n);
    let mut ctm = String::new();
    let mut index = String::new();
    for (utt, buf) in &pool.items {
        let wav_path = dir.join(format!("{}.wav", utt.utterance_id));
        audio::write_wav(buf, &wav_path).unwrap();
        for w in &utt.words {
            ctm.push_str(&format!(
                "{} 1 {:.3} {:.3} {}\n",
                utt.utterance_id,
                w.start_s,
                w.end_s - w.start_s,
                w.word
            ));
        }
        index.push_str(&format!(
            "{}\n",
            serde_json::json!({
                "utterance_id": utt.utterance_id,
                "audio_path": wav_path.display().to_string(),
                "language": language.to_string(),
                "duration_s": utt.duration_s,
            })
        ));
    }
    let ctm_path = dir.join(format!("{prefix}.ctm"));
    let index_path = dir.join(format!("{prefix}_index.jsonl"));
    std::fs::write(&ctm_path, ctm).unwrap();
    std::fs::write(&index_path, index).unwrap();
    DiskCorpus { index_path, ctm_path }
}
