//! WER scoring with an S/D/I breakdown, script-based utterance
//! categorization, and corpus statistics.
//!
//! Per-category WER is micro-averaged: error and reference-word counts are
//! pooled per category, so the category counts sum exactly to the overall
//! counts.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::corpus::ManifestRecord;
use crate::textnorm::{classify_token, Script};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("empty reference")]
    EmptyReference,
    #[error("reference token `{0}` has no script (digits or symbols left unnormalized)")]
    UnscriptedToken(String),
    #[error(transparent)]
    TextNorm(#[from] crate::textnorm::TextNormError),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct WerReport {
    pub substitutions: usize,
    pub deletions: usize,
    pub insertions: usize,
    pub ref_words: usize,
    pub wer: f64,
}

impl WerReport {
    pub fn errors(&self) -> usize {
        self.substitutions + self.deletions + self.insertions
    }

    fn from_counts(substitutions: usize, deletions: usize, insertions: usize, ref_words: usize) -> Self {
        let wer = if ref_words == 0 {
            0.0
        } else {
            (substitutions + deletions + insertions) as f64 / ref_words as f64
        };
        Self {
            substitutions,
            deletions,
            insertions,
            ref_words,
            wer,
        }
    }

    fn accumulate(&mut self, other: &WerReport) {
        *self = Self::from_counts(
            self.substitutions + other.substitutions,
            self.deletions + other.deletions,
            self.insertions + other.insertions,
            self.ref_words + other.ref_words,
        );
    }
}

/// Minimal-edit alignment with unit costs. The minimal total is unique; the
/// S/D/I split is made reproducible by preferring substitution over
/// insertion over deletion during backtrace.
pub fn wer<T: AsRef<str>>(ref_tokens: &[T], hyp_tokens: &[T]) -> Result<WerReport, EvalError> {
    if ref_tokens.is_empty() {
        return Err(EvalError::EmptyReference);
    }
    let m = ref_tokens.len();
    let n = hyp_tokens.len();
    let mut d = vec![vec![0usize; n + 1]; m + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=m {
        for j in 1..=n {
            let sub_cost = usize::from(ref_tokens[i - 1].as_ref() != hyp_tokens[j - 1].as_ref());
            d[i][j] = (d[i - 1][j - 1] + sub_cost)
                .min(d[i][j - 1] + 1)
                .min(d[i - 1][j] + 1);
        }
    }

    let (mut i, mut j) = (m, n);
    let (mut subs, mut dels, mut ins) = (0usize, 0usize, 0usize);
    while i > 0 || j > 0 {
        if i > 0 && j > 0 && ref_tokens[i - 1].as_ref() == hyp_tokens[j - 1].as_ref() && d[i][j] == d[i - 1][j - 1]
        {
            i -= 1;
            j -= 1;
        } else if i > 0 && j > 0 && d[i][j] == d[i - 1][j - 1] + 1 {
            subs += 1;
            i -= 1;
            j -= 1;
        } else if j > 0 && d[i][j] == d[i][j - 1] + 1 {
            ins += 1;
            j -= 1;
        } else {
            dels += 1;
            i -= 1;
        }
    }
    Ok(WerReport::from_counts(subs, dels, ins, m))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum UtteranceCategory {
    #[serde(rename = "ar")]
    ArOnly,
    #[serde(rename = "en")]
    EnOnly,
    #[serde(rename = "cs")]
    CodeSwitched,
}

/// Categorize an utterance by its reference-token scripts.
pub fn classify_utterance<T: AsRef<str>>(ref_tokens: &[T]) -> Result<UtteranceCategory, EvalError> {
    if ref_tokens.is_empty() {
        return Err(EvalError::EmptyReference);
    }
    let mut saw_ar = false;
    let mut saw_en = false;
    for t in ref_tokens {
        match classify_token(t.as_ref())? {
            Script::Arabic => saw_ar = true,
            Script::Latin => saw_en = true,
            Script::Mixed | Script::Other => {
                return Err(EvalError::UnscriptedToken(t.as_ref().to_string()))
            }
        }
    }
    Ok(match (saw_ar, saw_en) {
        (true, true) => UtteranceCategory::CodeSwitched,
        (true, false) => UtteranceCategory::ArOnly,
        _ => UtteranceCategory::EnOnly,
    })
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CategoryWerReport {
    pub overall: WerReport,
    pub per_category: HashMap<UtteranceCategory, WerReport>,
}

/// Score a set of (reference, hypothesis) pairs, pooling counts per
/// reference-script category.
pub fn category_wer<T: AsRef<str>>(
    pairs: &[(Vec<T>, Vec<T>)],
) -> Result<CategoryWerReport, EvalError> {
    let mut report = CategoryWerReport::default();
    for (ref_tokens, hyp_tokens) in pairs {
        let category = classify_utterance(ref_tokens)?;
        let pair_report = wer(ref_tokens, hyp_tokens)?;
        report.overall.accumulate(&pair_report);
        report
            .per_category
            .entry(category)
            .or_default()
            .accumulate(&pair_report);
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct CorpusStats {
    pub hours: f64,
    pub utterances: usize,
    pub tokens: usize,
    pub arabic_token_pct: f64,
    pub english_token_pct: f64,
    pub category_histogram: HashMap<UtteranceCategory, usize>,
}

/// Duration, token, and script statistics over a manifest.
pub fn corpus_stats(records: &[ManifestRecord]) -> Result<CorpusStats, EvalError> {
    let mut total_s = 0.0;
    let mut tokens = 0usize;
    let mut arabic = 0usize;
    let mut english = 0usize;
    let mut histogram = HashMap::new();
    for rec in records {
        total_s += rec.duration_s;
        let toks: Vec<&str> = rec.transcript.split_whitespace().collect();
        for t in &toks {
            tokens += 1;
            match classify_token(t)? {
                Script::Arabic => arabic += 1,
                Script::Latin => english += 1,
                _ => {}
            }
        }
        if !toks.is_empty() {
            *histogram.entry(classify_utterance(&toks)?).or_insert(0) += 1;
        }
    }
    let pct = |c: usize| {
        if tokens == 0 {
            0.0
        } else {
            100.0 * c as f64 / tokens as f64
        }
    };
    Ok(CorpusStats {
        hours: total_s / 3600.0,
        utterances: records.len(),
        tokens,
        arabic_token_pct: pct(arabic),
        english_token_pct: pct(english),
        category_histogram: histogram,
    })
}
