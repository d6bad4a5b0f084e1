//! Corpus ingestion and bookkeeping: CTM alignment files, the sidecar
//! audio index, and JSONL manifests.
//!
//! Validation of aligned utterances is per-utterance and non-fatal: one
//! bad alignment is reported and skipped instead of aborting a large ingest.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SAMPLE_RATE: u32 = crate::audio::SAMPLE_RATE;

/// Convert a time in seconds to a sample position.
pub fn time_to_sample(t: f64) -> usize {
    (t * SAMPLE_RATE as f64).round() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LanguageTag {
    #[serde(rename = "ar")]
    Arabic,
    #[serde(rename = "en")]
    English,
    #[serde(rename = "cs")]
    CodeSwitched,
}

impl fmt::Display for LanguageTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LanguageTag::Arabic => "ar",
            LanguageTag::English => "en",
            LanguageTag::CodeSwitched => "cs",
        })
    }
}

/// One word with its time boundaries, as ingested from a CTM line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordAlignment {
    pub word: String,
    pub start_s: f64,
    pub end_s: f64,
}

/// One audio file plus its word-level alignment; the splicer's raw material.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignedUtterance {
    pub utterance_id: String,
    pub audio_path: String,
    pub language: LanguageTag,
    pub duration_s: f64,
    pub words: Vec<WordAlignment>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub speaker_id: Option<String>,
}

impl AlignedUtterance {
    pub fn tokens(&self) -> Vec<String> {
        self.words.iter().map(|w| w.word.clone()).collect()
    }
}

/// Full recipe echo for one spliced utterance, written into the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpliceProvenance {
    pub base_id: String,
    pub fragment_id: String,
    pub fragment_word_range: (usize, usize),
    pub insertion_word_index: usize,
    pub gain: f32,
    pub xfade_samples: usize,
    pub clip_count: usize,
    pub seed_index: u64,
}

/// One line of a corpus manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub utterance_id: String,
    pub audio_path: String,
    pub duration_s: f64,
    /// Space-joined normalized tokens.
    pub transcript: String,
    pub language: LanguageTag,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub provenance: Option<SpliceProvenance>,
}

/// One line of the sidecar audio index carrying per-utterance metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AudioIndexEntry {
    pub utterance_id: String,
    pub audio_path: String,
    pub language: LanguageTag,
    pub duration_s: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub speaker_id: Option<String>,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: expected 5 fields `<utt_id> <channel> <start> <dur> <word>`, got {got}")]
    CtmFieldCount { line: usize, got: usize },
    #[error("line {line}: non-numeric time field `{field}`")]
    CtmBadTime { line: usize, field: String },
    #[error("line {line}: non-positive duration {dur}")]
    CtmBadDuration { line: usize, dur: f64 },
    #[error("line {line}: malformed JSON: {source}")]
    BadJsonLine {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("duplicate utterance ids: {0:?}")]
    DuplicateIds(Vec<String>),
}

/// Per-utterance rejection reason from [`build_utterances`].
#[derive(Debug, Clone, PartialEq)]
pub enum UtteranceIssue {
    MissingFromIndex,
    /// Words at these indices overlap or are out of order.
    Disordered(usize, usize),
    /// Word at this index has start >= end or start < 0.
    BadBounds(usize),
    /// Last word ends at this time, past the audio duration.
    ExceedsAudio(f64),
    EmptyWordList,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RejectedUtterance {
    pub utterance_id: String,
    pub issue: UtteranceIssue,
}

fn io_error(path: &Path, source: io::Error) -> CorpusError {
    CorpusError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Parse CTM lines `<utt_id> <channel> <start_s> <dur_s> <word>`.
/// `#`-prefixed lines are comments; blank lines are skipped.
/// Line order is preserved; grouping by id is `build_utterances`' job.
pub fn parse_ctm(reader: impl BufRead) -> Result<Vec<(String, WordAlignment)>, CorpusError> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| CorpusError::Io {
            path: "<stream>".into(),
            source: e,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(CorpusError::CtmFieldCount {
                line: line_no,
                got: fields.len(),
            });
        }
        let parse_time = |s: &str| -> Result<f64, CorpusError> {
            s.parse::<f64>().map_err(|_| CorpusError::CtmBadTime {
                line: line_no,
                field: s.to_string(),
            })
        };
        let start_s = parse_time(fields[2])?;
        let dur_s = parse_time(fields[3])?;
        if dur_s <= 0.0 || !dur_s.is_finite() || !start_s.is_finite() || start_s < 0.0 {
            return Err(CorpusError::CtmBadDuration {
                line: line_no,
                dur: dur_s,
            });
        }
        out.push((
            fields[0].to_string(),
            WordAlignment {
                word: fields[4].to_string(),
                start_s,
                end_s: start_s + dur_s,
            },
        ));
    }
    Ok(out)
}

pub fn parse_ctm_file(path: impl AsRef<Path>) -> Result<Vec<(String, WordAlignment)>, CorpusError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| io_error(path, e))?;
    parse_ctm(BufReader::new(file))
}

/// Serialize alignments back to CTM text with millisecond precision.
pub fn serialize_ctm(alignments: &[(String, WordAlignment)]) -> String {
    let mut out = String::new();
    for (id, w) in alignments {
        out.push_str(&format!(
            "{} 1 {:.3} {:.3} {}\n",
            id,
            w.start_s,
            w.end_s - w.start_s,
            w.word
        ));
    }
    out
}

/// Group parsed alignments by utterance id and join them with audio-index
/// metadata. Utterances violating ordering or bounds are rejected
/// individually, never fatally.
pub fn build_utterances(
    alignments: &[(String, WordAlignment)],
    audio_index: &HashMap<String, AudioIndexEntry>,
) -> (Vec<AlignedUtterance>, Vec<RejectedUtterance>) {
    let mut grouped: Vec<(String, Vec<WordAlignment>)> = Vec::new();
    let mut positions: HashMap<&str, usize> = HashMap::new();
    for (id, w) in alignments {
        match positions.get(id.as_str()) {
            Some(&i) => grouped[i].1.push(w.clone()),
            None => {
                grouped.push((id.clone(), vec![w.clone()]));
                // Index keys borrow from `alignments`, which outlives the loop.
                positions.insert(id.as_str(), grouped.len() - 1);
            }
        }
    }

    let mut ok = Vec::new();
    let mut rejected = Vec::new();
    for (id, words) in grouped {
        let reject = |issue| RejectedUtterance {
            utterance_id: id.clone(),
            issue,
        };
        let entry = match audio_index.get(&id) {
            Some(e) => e,
            None => {
                rejected.push(reject(UtteranceIssue::MissingFromIndex));
                continue;
            }
        };
        if words.is_empty() {
            rejected.push(reject(UtteranceIssue::EmptyWordList));
            continue;
        }
        let mut issue = None;
        for (i, w) in words.iter().enumerate() {
            if !(w.start_s >= 0.0 && w.start_s < w.end_s) {
                issue = Some(UtteranceIssue::BadBounds(i));
                break;
            }
            if i + 1 < words.len() && w.end_s > words[i + 1].start_s {
                issue = Some(UtteranceIssue::Disordered(i, i + 1));
                break;
            }
        }
        if issue.is_none() {
            let last_end = words.last().unwrap().end_s;
            if last_end > entry.duration_s {
                issue = Some(UtteranceIssue::ExceedsAudio(last_end));
            }
        }
        match issue {
            Some(issue) => rejected.push(reject(issue)),
            None => ok.push(AlignedUtterance {
                utterance_id: id,
                audio_path: entry.audio_path.clone(),
                language: entry.language,
                duration_s: entry.duration_s,
                words,
                speaker_id: entry.speaker_id.clone(),
            }),
        }
    }
    (ok, rejected)
}

fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, CorpusError> {
    let file = File::open(path).map_err(|e| io_error(path, e))?;
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| io_error(path, e))?;
        let trimmed = line.trim();
        // `#` lines carry run-config provenance headers.
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let rec = serde_json::from_str(trimmed).map_err(|e| CorpusError::BadJsonLine {
            line: idx + 1,
            source: e,
        })?;
        out.push(rec);
    }
    Ok(out)
}

pub fn read_audio_index(
    path: impl AsRef<Path>,
) -> Result<HashMap<String, AudioIndexEntry>, CorpusError> {
    let entries: Vec<AudioIndexEntry> = read_jsonl(path.as_ref())?;
    let mut seen = HashSet::new();
    let dups: Vec<String> = entries
        .iter()
        .filter(|e| !seen.insert(e.utterance_id.clone()))
        .map(|e| e.utterance_id.clone())
        .collect();
    if !dups.is_empty() {
        return Err(CorpusError::DuplicateIds(dups));
    }
    Ok(entries
        .into_iter()
        .map(|e| (e.utterance_id.clone(), e))
        .collect())
}

/// Read a JSONL manifest, rejecting duplicate utterance ids.
pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestRecord>, CorpusError> {
    let records: Vec<ManifestRecord> = read_jsonl(path.as_ref())?;
    let mut seen = HashSet::new();
    let dups: Vec<String> = records
        .iter()
        .filter(|r| !seen.insert(r.utterance_id.clone()))
        .map(|r| r.utterance_id.clone())
        .collect();
    if !dups.is_empty() {
        return Err(CorpusError::DuplicateIds(dups));
    }
    Ok(records)
}

/// Write a JSONL manifest atomically (temp file + rename), with an optional
/// `#`-prefixed header line.
pub fn write_manifest(
    records: &[ManifestRecord],
    path: impl AsRef<Path>,
    header: Option<&str>,
) -> Result<(), CorpusError> {
    let path = path.as_ref();
    let tmp = path.with_extension("tmp");
    {
        let mut f = File::create(&tmp).map_err(|e| io_error(&tmp, e))?;
        if let Some(h) = header {
            writeln!(f, "# {h}").map_err(|e| io_error(&tmp, e))?;
        }
        for rec in records {
            let line = serde_json::to_string(rec).expect("manifest record serializes");
            writeln!(f, "{line}").map_err(|e| io_error(&tmp, e))?;
        }
    }
    std::fs::rename(&tmp, path).map_err(|e| io_error(path, e))
}
