//! Code-switched utterance generation by audio splicing.
//!
//! A 2-4 word fragment is cut from a donor utterance of one language and
//! inserted into a base utterance of the other, at the sentence start, the
//! sentence end, or a between-word gap midpoint. The fragment is gain-matched
//! to the base by RMS and both junctions are crossfaded; base samples away
//! from the junctions stay bit-identical to the source.
//!
//! Generation is counter-seeded: output `k` is a pure function of
//! (pools, config, master_seed, k), so batches parallelize freely without
//! changing a single sample.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::audio::{self, AudioBuffer};
use crate::corpus::{
    time_to_sample, AlignedUtterance, LanguageTag, ManifestRecord, SpliceProvenance,
};

#[derive(Debug, Error)]
pub enum SpliceError {
    #[error("utterance {0} has {1} words, need at least 2 for a fragment")]
    TooFewWords(String, usize),
    #[error("insertion index {index} out of range [0, {max}]")]
    InsertionOutOfRange { index: usize, max: usize },
    #[error("base {0} and fragment {1} share language {2}")]
    SameLanguage(String, String, LanguageTag),
    #[error("fragment span of {0} is silent, cannot volume-match")]
    SilentFragment(String),
    #[error("base speech region of {0} is silent, cannot volume-match")]
    SilentBase(String),
    #[error("crossfade {xfade} infeasible: fragment {fragment} samples, base segments {pre}/{post}")]
    CrossfadeInfeasible {
        xfade: usize,
        fragment: usize,
        pre: usize,
        post: usize,
    },
    #[error("span {span:?} outside audio of {len} samples")]
    SpanOutOfBounds { span: (usize, usize), len: usize },
    #[error("no viable splice after {attempts} attempts at output index {index}")]
    AttemptsExhausted { index: u64, attempts: u32 },
    #[error("pool {0} is empty")]
    EmptyPool(&'static str),
    #[error(transparent)]
    Audio(#[from] audio::AudioError),
    #[error(transparent)]
    Corpus(#[from] crate::corpus::CorpusError),
}

/// A 2-4 word span cut from a donor utterance.
#[derive(Debug, Clone, PartialEq)]
pub struct FragmentSpan {
    pub source_id: String,
    /// Half-open word index range [i, j).
    pub word_range: (usize, usize),
    /// Half-open sample range in the donor audio.
    pub audio_range: (usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InsertionPoint {
    /// 0 = sentence start, n = sentence end, otherwise before word `word_index`.
    pub word_index: usize,
    pub time_sample: usize,
}

/// Full deterministic recipe for one spliced utterance.
#[derive(Debug, Clone, PartialEq)]
pub struct SpliceSpec {
    pub base_id: String,
    pub fragment: FragmentSpan,
    pub insertion: InsertionPoint,
    pub gain: f32,
    pub xfade: usize,
    pub seed_path: (u64, u64),
}

#[derive(Debug, Clone)]
pub struct SpliceResult {
    pub audio: AudioBuffer,
    pub transcript: Vec<String>,
    pub language: LanguageTag,
    pub provenance: SpliceProvenance,
}

#[derive(Debug, Clone)]
pub struct SpliceConfig {
    /// Probability that the base is Arabic (fragment English).
    pub direction_prob_ar_base: f64,
    /// Crossfade length in samples at each junction.
    pub xfade: usize,
    pub span_min: usize,
    pub span_max: usize,
    pub gain_clamp: (f32, f32),
    /// Redraw budget per output index before giving up.
    pub max_attempts: u32,
}

impl Default for SpliceConfig {
    fn default() -> Self {
        Self {
            direction_prob_ar_base: 0.5,
            xfade: 160, // 10 ms at 16 kHz
            span_min: 2,
            span_max: 4,
            gain_clamp: (0.1, 10.0),
            max_attempts: 100,
        }
    }
}

/// One language's source material, audio preloaded.
pub struct Pool {
    pub items: Vec<(AlignedUtterance, AudioBuffer)>,
}

impl Pool {
    pub fn new(items: Vec<(AlignedUtterance, AudioBuffer)>) -> Self {
        Self { items }
    }
}

// ---------------------------------------------------------------------------
// Selection
// ---------------------------------------------------------------------------

/// Draw a fragment span: length uniform over the feasible subset of
/// {span_min..=span_max}, then start uniform over valid positions.
pub fn select_fragment(
    utt: &AlignedUtterance,
    cfg: &SpliceConfig,
    rng: &mut impl Rng,
) -> Result<FragmentSpan, SpliceError> {
    let n = utt.words.len();
    if n < cfg.span_min {
        return Err(SpliceError::TooFewWords(utt.utterance_id.clone(), n));
    }
    let max_len = cfg.span_max.min(n);
    let len = rng.gen_range(cfg.span_min..=max_len);
    let start = rng.gen_range(0..=n - len);
    let first = &utt.words[start];
    let last = &utt.words[start + len - 1];
    Ok(FragmentSpan {
        source_id: utt.utterance_id.clone(),
        word_range: (start, start + len),
        audio_range: (time_to_sample(first.start_s), time_to_sample(last.end_s)),
    })
}

/// Draw an insertion point: word index uniform over [0, n]; the audio time is
/// 0 at the start, end-of-audio at the end, and the gap midpoint between words.
pub fn select_insertion_point(base: &AlignedUtterance, rng: &mut impl Rng) -> InsertionPoint {
    let n = base.words.len();
    let word_index = rng.gen_range(0..=n);
    InsertionPoint {
        word_index,
        time_sample: insertion_time_sample(base, word_index),
    }
}

fn insertion_time_sample(base: &AlignedUtterance, word_index: usize) -> usize {
    let n = base.words.len();
    if word_index == 0 {
        0
    } else if word_index == n {
        time_to_sample(base.duration_s)
    } else {
        let gap_start = base.words[word_index - 1].end_s;
        let gap_end = base.words[word_index].start_s;
        time_to_sample((gap_start + gap_end) / 2.0)
    }
}

/// Insert fragment tokens into the base token sequence at `word_index`.
pub fn compose_transcript(
    base_tokens: &[String],
    fragment_tokens: &[String],
    word_index: usize,
) -> Result<Vec<String>, SpliceError> {
    if word_index > base_tokens.len() {
        return Err(SpliceError::InsertionOutOfRange {
            index: word_index,
            max: base_tokens.len(),
        });
    }
    let mut out = Vec::with_capacity(base_tokens.len() + fragment_tokens.len());
    out.extend_from_slice(&base_tokens[..word_index]);
    out.extend_from_slice(fragment_tokens);
    out.extend_from_slice(&base_tokens[word_index..]);
    Ok(out)
}

// ---------------------------------------------------------------------------
// Splicing
// ---------------------------------------------------------------------------

/// Execute one splice: volume-match the fragment to the base speech region,
/// crossfade it in at the insertion point, and compose the transcript.
#[allow(clippy::too_many_arguments)]
pub fn splice(
    base: &AlignedUtterance,
    base_buf: &AudioBuffer,
    fragment_src: &AlignedUtterance,
    fragment_buf: &AudioBuffer,
    span: &FragmentSpan,
    insertion: &InsertionPoint,
    cfg: &SpliceConfig,
    seed_path: (u64, u64),
) -> Result<SpliceResult, SpliceError> {
    if base.language == fragment_src.language {
        return Err(SpliceError::SameLanguage(
            base.utterance_id.clone(),
            fragment_src.utterance_id.clone(),
            base.language,
        ));
    }
    let (s0, s1) = span.audio_range;
    if s0 >= s1 || s1 > fragment_buf.len() {
        return Err(SpliceError::SpanOutOfBounds {
            span: span.audio_range,
            len: fragment_buf.len(),
        });
    }

    // Volume matching: fragment RMS is brought to the base's speech-region
    // RMS; the base itself is never touched.
    let speech_start = time_to_sample(base.words[0].start_s).min(base_buf.len());
    let speech_end = time_to_sample(base.words.last().unwrap().end_s).min(base_buf.len());
    let base_rms = audio::speech_rms(base_buf, speech_start..speech_end)?;
    if base_rms == 0.0 {
        return Err(SpliceError::SilentBase(base.utterance_id.clone()));
    }
    let frag_rms = audio::speech_rms(fragment_buf, s0..s1)?;
    if frag_rms == 0.0 {
        return Err(SpliceError::SilentFragment(span.source_id.clone()));
    }
    let (lo, hi) = cfg.gain_clamp;
    let gain = (base_rms / frag_rms).clamp(lo, hi);
    let fragment = AudioBuffer::new(fragment_buf.samples[s0..s1].to_vec());
    let (fragment, clip_count) = audio::apply_gain(&fragment, gain)?;

    let n = base.words.len();
    let t = insertion.time_sample.min(base_buf.len());
    let xfade = cfg.xfade;
    let (pre_len, post_len) = match insertion.word_index {
        0 => (0, base_buf.len()),
        i if i == n => (base_buf.len(), 0),
        _ => (t, base_buf.len() - t),
    };
    let feasible = if insertion.word_index == 0 || insertion.word_index == n {
        xfade <= fragment.len() && xfade <= pre_len.max(post_len)
    } else {
        2 * xfade <= fragment.len() && xfade <= pre_len && xfade <= post_len
    };
    if !feasible {
        return Err(SpliceError::CrossfadeInfeasible {
            xfade,
            fragment: fragment.len(),
            pre: pre_len,
            post: post_len,
        });
    }

    let audio_out = if insertion.word_index == 0 {
        audio::crossfade_concat(&fragment, base_buf, xfade)?
    } else if insertion.word_index == n {
        audio::crossfade_concat(base_buf, &fragment, xfade)?
    } else {
        let pre = AudioBuffer::new(base_buf.samples[..t].to_vec());
        let post = AudioBuffer::new(base_buf.samples[t..].to_vec());
        let joined = audio::crossfade_concat(&pre, &fragment, xfade)?;
        audio::crossfade_concat(&joined, &post, xfade)?
    };

    let fragment_tokens: Vec<String> = fragment_src.words[span.word_range.0..span.word_range.1]
        .iter()
        .map(|w| w.word.clone())
        .collect();
    let transcript = compose_transcript(&base.tokens(), &fragment_tokens, insertion.word_index)?;

    Ok(SpliceResult {
        audio: audio_out,
        transcript,
        language: LanguageTag::CodeSwitched,
        provenance: SpliceProvenance {
            base_id: base.utterance_id.clone(),
            fragment_id: span.source_id.clone(),
            fragment_word_range: span.word_range,
            insertion_word_index: insertion.word_index,
            gain,
            xfade_samples: xfade,
            clip_count,
            seed_index: seed_path.1,
        },
    })
}

// ---------------------------------------------------------------------------
// Dataset generation
// ---------------------------------------------------------------------------

/// splitmix64; decorrelates the per-output seed from the master seed.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master_seed: u64, index: u64) -> u64 {
    mix64(master_seed ^ mix64(index.wrapping_add(1)))
}

/// Generate the spliced utterance for one output index. Pure in
/// (pools, cfg, master_seed, index); infeasible draws are retried from the
/// same per-index RNG stream.
pub fn generate_one(
    ar_pool: &Pool,
    en_pool: &Pool,
    cfg: &SpliceConfig,
    master_seed: u64,
    index: u64,
) -> Result<SpliceResult, SpliceError> {
    if ar_pool.items.is_empty() {
        return Err(SpliceError::EmptyPool("ar"));
    }
    if en_pool.items.is_empty() {
        return Err(SpliceError::EmptyPool("en"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(master_seed, index));
    for _ in 0..cfg.max_attempts {
        let ar_base = rng.gen_bool(cfg.direction_prob_ar_base);
        let (base_pool, frag_pool) = if ar_base {
            (ar_pool, en_pool)
        } else {
            (en_pool, ar_pool)
        };
        let (base, base_buf) = &base_pool.items[rng.gen_range(0..base_pool.items.len())];
        let (frag, frag_buf) = &frag_pool.items[rng.gen_range(0..frag_pool.items.len())];
        if base.words.is_empty() || frag.words.len() < cfg.span_min {
            continue;
        }
        let span = match select_fragment(frag, cfg, &mut rng) {
            Ok(s) => s,
            Err(_) => continue,
        };
        let insertion = select_insertion_point(base, &mut rng);
        match splice(
            base,
            base_buf,
            frag,
            frag_buf,
            &span,
            &insertion,
            cfg,
            (master_seed, index),
        ) {
            Ok(result) => return Ok(result),
            Err(_) => continue,
        }
    }
    Err(SpliceError::AttemptsExhausted {
        index,
        attempts: cfg.max_attempts,
    })
}

/// Generate spliced utterances until the accumulated duration first reaches
/// `target_hours`. WAV files land in `out_dir` as `cs_<index>.wav`; the
/// returned records are in output-index order. Output is identical for any
/// worker count.
pub fn generate_dataset(
    ar_pool: &Pool,
    en_pool: &Pool,
    target_hours: f64,
    cfg: &SpliceConfig,
    master_seed: u64,
    workers: usize,
    out_dir: &Path,
) -> Result<Vec<ManifestRecord>, SpliceError> {
    let thread_pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool");
    std::fs::create_dir_all(out_dir).map_err(|e| {
        SpliceError::Audio(audio::AudioError::Io {
            path: out_dir.display().to_string(),
            source: e,
        })
    })?;

    let target_s = target_hours * 3600.0;
    let batch = (workers.max(1) * 16).max(32) as u64;
    let mut records = Vec::new();
    let mut total_s = 0.0f64;
    let mut next_index = 0u64;

    while total_s < target_s {
        let indices: Vec<u64> = (next_index..next_index + batch).collect();
        next_index += batch;
        let results: Vec<(u64, Result<SpliceResult, SpliceError>)> = thread_pool.install(|| {
            indices
                .par_iter()
                .map(|&k| (k, generate_one(ar_pool, en_pool, cfg, master_seed, k)))
                .collect()
        });
        let mut accepted: Vec<(u64, SpliceResult)> = Vec::new();
        for (k, res) in results {
            if total_s >= target_s {
                break;
            }
            match res {
                Ok(result) => {
                    total_s += result.audio.duration_s();
                    accepted.push((k, result));
                }
                // Deterministic per-index failure; skip the index on every
                // run so output k never depends on other indices.
                Err(SpliceError::AttemptsExhausted { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        let written: Result<Vec<ManifestRecord>, SpliceError> = thread_pool.install(|| {
            accepted
                .par_iter()
                .map(|(k, result)| {
                    let id = format!("cs_{k:08}");
                    let wav_name = format!("{id}.wav");
                    audio::write_wav(&result.audio, out_dir.join(&wav_name))?;
                    // Paths are stored relative to the manifest so runs in
                    // different directories yield identical manifests.
                    Ok(ManifestRecord {
                        utterance_id: id,
                        audio_path: wav_name,
                        duration_s: result.audio.duration_s(),
                        transcript: result.transcript.join(" "),
                        language: LanguageTag::CodeSwitched,
                        provenance: Some(result.provenance.clone()),
                    })
                })
                .collect()
        });
        records.extend(written?);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::WordAlignment;
    use rand::SeedableRng;

    /// Synthetic utterance: `n_words` sine-burst words of `word_s` seconds
    /// separated by `gap_s` of silence.
    pub(crate) fn synth_utterance(
        id: &str,
        language: LanguageTag,
        n_words: usize,
        word_s: f64,
        gap_s: f64,
        amp: f32,
    ) -> (AlignedUtterance, AudioBuffer) {
        let sr = audio::SAMPLE_RATE as f64;
        let mut samples = Vec::new();
        let mut words = Vec::new();
        let mut t = gap_s;
        samples.resize(time_to_sample(t), 0.0);
        for i in 0..n_words {
            let start = t;
            let end = t + word_s;
            let n = time_to_sample(end) - time_to_sample(start);
            let freq = 200.0 + 40.0 * i as f64;
            for j in 0..n {
                samples
                    .push(amp * (2.0 * std::f64::consts::PI * freq * j as f64 / sr).sin() as f32);
            }
            samples.resize(time_to_sample(end + gap_s), 0.0);
            words.push(WordAlignment {
                word: format!("{id}w{i}"),
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
                words,
                speaker_id: None,
            },
            AudioBuffer::new(samples),
        )
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn fragment_two_word_utterance_forced() {
        let (utt, _) = synth_utterance("u", LanguageTag::English, 2, 0.3, 0.1, 0.5);
        let cfg = SpliceConfig::default();
        let span = select_fragment(&utt, &cfg, &mut rng(1)).unwrap();
        assert_eq!(span.word_range, (0, 2));
    }

    #[test]
    fn fragment_rejects_single_word() {
        let (utt, _) = synth_utterance("u", LanguageTag::English, 1, 0.3, 0.1, 0.5);
        assert!(select_fragment(&utt, &SpliceConfig::default(), &mut rng(1)).is_err());
    }

    #[test]
    fn fragment_deterministic() {
        let (utt, _) = synth_utterance("u", LanguageTag::English, 10, 0.3, 0.1, 0.5);
        let cfg = SpliceConfig::default();
        let a = select_fragment(&utt, &cfg, &mut rng(42)).unwrap();
        let b = select_fragment(&utt, &cfg, &mut rng(42)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fragment_distribution_uniform_within_length() {
        // 10-word utterance: lengths 2,3,4 each with 9,8,7 feasible starts.
        let (utt, _) = synth_utterance("u", LanguageTag::English, 10, 0.3, 0.1, 0.5);
        let cfg = SpliceConfig::default();
        let mut r = rng(7);
        let mut counts = std::collections::HashMap::new();
        let draws = 30_000usize;
        for _ in 0..draws {
            let s = select_fragment(&utt, &cfg, &mut r).unwrap();
            *counts.entry(s.word_range).or_insert(0usize) += 1;
        }
        for len in 2usize..=4 {
            let starts = 10 - len + 1;
            let p = (1.0 / 3.0) * (1.0 / starts as f64);
            let expect = draws as f64 * p;
            let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
            for start in 0..starts {
                let c = *counts.get(&(start, start + len)).unwrap_or(&0) as f64;
                assert!(
                    (c - expect).abs() < 3.0 * sigma + 1.0,
                    "pair ({start},{len}): count {c}, expect {expect}"
                );
            }
        }
    }

    #[test]
    fn insertion_point_cases() {
        let (mut base, _) = synth_utterance("b", LanguageTag::Arabic, 1, 0.3, 0.1, 0.5);
        let mut r = rng(3);
        for _ in 0..50 {
            let p = select_insertion_point(&base, &mut r);
            assert!(p.word_index <= 1);
            if p.word_index == 0 {
                assert_eq!(p.time_sample, 0);
            }
        }
        // Midpoint arithmetic on a hand-built gap.
        base.words = vec![
            WordAlignment { word: "a".into(), start_s: 0.0, end_s: 0.5 },
            WordAlignment { word: "b".into(), start_s: 0.7, end_s: 1.0 },
        ];
        assert_eq!(super::insertion_time_sample(&base, 1), 9600);
    }

    #[test]
    fn transcript_composition() {
        let base: Vec<String> = ["w0", "w1", "w2"].iter().map(|s| s.to_string()).collect();
        let frag: Vec<String> = ["f0", "f1"].iter().map(|s| s.to_string()).collect();
        assert_eq!(
            compose_transcript(&base, &frag, 1).unwrap(),
            ["w0", "f0", "f1", "w1", "w2"]
        );
        assert_eq!(
            compose_transcript(&base, &frag, 0).unwrap(),
            ["f0", "f1", "w0", "w1", "w2"]
        );
        assert!(compose_transcript(&base, &frag, 4).is_err());
    }

    #[test]
    fn transcript_matches_worked_example() {
        let base: Vec<String> = ["كانت", "ليلى", "ابنة", "فاضل", "الصبية"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let frag: Vec<String> = ["the", "students"].iter().map(|s| s.to_string()).collect();
        assert_eq!(
            compose_transcript(&base, &frag, 4).unwrap(),
            ["كانت", "ليلى", "ابنة", "فاضل", "the", "students", "الصبية"]
        );
    }

    fn mid_insertion(base: &AlignedUtterance, idx: usize) -> InsertionPoint {
        InsertionPoint {
            word_index: idx,
            time_sample: super::insertion_time_sample(base, idx),
        }
    }

    #[test]
    fn splice_length_formula() {
        let (base, base_buf) = synth_utterance("b", LanguageTag::Arabic, 4, 0.25, 0.1, 0.5);
        let (frag, frag_buf) = synth_utterance("f", LanguageTag::English, 4, 0.25, 0.1, 0.25);
        let cfg = SpliceConfig::default();
        let span = FragmentSpan {
            source_id: frag.utterance_id.clone(),
            word_range: (0, 2),
            audio_range: (
                time_to_sample(frag.words[0].start_s),
                time_to_sample(frag.words[1].end_s),
            ),
        };
        let frag_len = span.audio_range.1 - span.audio_range.0;

        // Two junctions mid-sentence.
        let ins = mid_insertion(&base, 2);
        let out = splice(&base, &base_buf, &frag, &frag_buf, &span, &ins, &cfg, (0, 0)).unwrap();
        assert_eq!(out.audio.len(), base_buf.len() + frag_len - 2 * cfg.xfade);

        // One junction at the end.
        let ins = mid_insertion(&base, base.words.len());
        let out = splice(&base, &base_buf, &frag, &frag_buf, &span, &ins, &cfg, (0, 0)).unwrap();
        assert_eq!(out.audio.len(), base_buf.len() + frag_len - cfg.xfade);
    }

    #[test]
    fn splice_volume_match_constant_fixture() {
        // Constant amplitudes: base 0.5, fragment 0.25; fragment region RMS
        // must land on 0.5 after gain.
        let (base, mut base_buf) = synth_utterance("b", LanguageTag::Arabic, 3, 0.3, 0.1, 0.5);
        let (frag, mut frag_buf) = synth_utterance("f", LanguageTag::English, 3, 0.3, 0.1, 0.25);
        for s in &mut base_buf.samples {
            *s = if s.abs() > 0.0 { 0.5 } else { 0.0 };
        }
        for s in &mut frag_buf.samples {
            *s = if s.abs() > 0.0 { 0.25 } else { 0.0 };
        }
        let cfg = SpliceConfig::default();
        let span = FragmentSpan {
            source_id: frag.utterance_id.clone(),
            word_range: (0, 2),
            audio_range: (
                time_to_sample(frag.words[0].start_s),
                time_to_sample(frag.words[1].end_s),
            ),
        };
        let ins = mid_insertion(&base, base.words.len());
        let out = splice(&base, &base_buf, &frag, &frag_buf, &span, &ins, &cfg, (0, 0)).unwrap();
        let frag_start = base_buf.len(); // end insertion: fragment begins after base minus xfade
        let region = frag_start..out.audio.len();
        let got = audio::speech_rms(&out.audio, region).unwrap();
        assert!((got - 0.5).abs() / 0.5 < 1e-3, "rms {got}");
        assert!((out.provenance.gain - 2.0).abs() < 1e-3);
    }

    #[test]
    fn splice_rejects_same_language_and_silent_fragment() {
        let (base, base_buf) = synth_utterance("b", LanguageTag::Arabic, 3, 0.3, 0.1, 0.5);
        let (frag, frag_buf) = synth_utterance("f", LanguageTag::Arabic, 3, 0.3, 0.1, 0.25);
        let cfg = SpliceConfig::default();
        let span = FragmentSpan {
            source_id: frag.utterance_id.clone(),
            word_range: (0, 2),
            audio_range: (0, 4000),
        };
        let ins = mid_insertion(&base, 0);
        let err = splice(&base, &base_buf, &frag, &frag_buf, &span, &ins, &cfg, (0, 0)).unwrap_err();
        assert!(matches!(err, SpliceError::SameLanguage(..)));

        let (frag_en, mut silent_buf) = synth_utterance("f2", LanguageTag::English, 3, 0.3, 0.1, 0.25);
        silent_buf.samples.iter_mut().for_each(|s| *s = 0.0);
        let err =
            splice(&base, &base_buf, &frag_en, &silent_buf, &span, &ins, &cfg, (0, 0)).unwrap_err();
        assert!(matches!(err, SpliceError::SilentFragment(..)));
    }

    #[test]
    fn generate_deterministic_and_cross_language() {
        let ar = Pool::new(vec![
            synth_utterance("ar0", LanguageTag::Arabic, 4, 0.25, 0.12, 0.5),
            synth_utterance("ar1", LanguageTag::Arabic, 6, 0.2, 0.1, 0.4),
        ]);
        let en = Pool::new(vec![
            synth_utterance("en0", LanguageTag::English, 5, 0.25, 0.12, 0.3),
            synth_utterance("en1", LanguageTag::English, 3, 0.3, 0.1, 0.6),
        ]);
        let cfg = SpliceConfig::default();
        for k in 0..20 {
            let a = generate_one(&ar, &en, &cfg, 99, k).unwrap();
            let b = generate_one(&ar, &en, &cfg, 99, k).unwrap();
            assert_eq!(a.audio.samples, b.audio.samples);
            assert_eq!(a.transcript, b.transcript);
            let p = &a.provenance;
            let base_is_ar = p.base_id.starts_with("ar");
            let frag_is_ar = p.fragment_id.starts_with("ar");
            assert_ne!(base_is_ar, frag_is_ar);
            assert_eq!(a.language, LanguageTag::CodeSwitched);
        }
    }

    #[test]
    fn generate_dataset_stopping_rule() {
        let ar = Pool::new(vec![synth_utterance("ar0", LanguageTag::Arabic, 4, 0.25, 0.12, 0.5)]);
        let en = Pool::new(vec![synth_utterance("en0", LanguageTag::English, 5, 0.25, 0.12, 0.3)]);
        let dir = tempfile::tempdir().unwrap();
        let cfg = SpliceConfig::default();
        let target_hours = 0.01;
        let records =
            generate_dataset(&ar, &en, target_hours, &cfg, 5, 1, dir.path()).unwrap();
        let total_s: f64 = records.iter().map(|r| r.duration_s).sum();
        let max_dur = records.iter().map(|r| r.duration_s).fold(0.0, f64::max);
        assert!(total_s >= target_hours * 3600.0);
        assert!(total_s < target_hours * 3600.0 + max_dur);
    }
}
