//! English and Arabic text normalization plus per-token script
//! classification.
//!
//! English output is confined to the 26 lowercase letters plus apostrophe.
//! Arabic output is confined to a 36-codepoint set: the 28 basic letters,
//! ta marbuta, alif maqsura, and the 6 hamza forms. Diacritics and tatweel
//! are stripped; presentation-form codepoints are folded to their base
//! codepoints via NFKC. Digit-bearing tokens are verbalized on the English
//! side and flagged as unverbalizable on the Arabic side.

use std::collections::HashMap;
use std::path::Path;

use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

#[derive(Debug, Error)]
pub enum TextNormError {
    #[error("empty token")]
    EmptyToken,
    #[error("number {0} out of verbalizable range [0, 10^9)")]
    NumberOutOfRange(u64),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: expected `acronym<TAB>expansion`")]
    BadAcronymLine { path: String, line: usize },
}

/// Script of a normalized (clean) token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenScript {
    Arabic,
    Latin,
}

/// Script classification of an arbitrary token.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Script {
    Arabic,
    Latin,
    Mixed,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedToken {
    pub text: String,
    pub script: TokenScript,
}

impl NormalizedToken {
    fn new(text: String, script: TokenScript) -> Self {
        Self { text, script }
    }
}

/// Tokens plus the raw tokens that could not be normalized (digits in
/// Arabic context, mixed-script runs, unverbalizable numbers).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NormalizeOutcome {
    pub tokens: Vec<NormalizedToken>,
    pub flagged: Vec<String>,
}

impl NormalizeOutcome {
    pub fn is_clean(&self) -> bool {
        self.flagged.is_empty()
    }

    pub fn joined(&self) -> String {
        self.tokens
            .iter()
            .map(|t| t.text.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Language hint for digit routing in [`normalize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LanguageHint {
    Arabic,
    English,
}

// ---------------------------------------------------------------------------
// Character sets
// ---------------------------------------------------------------------------

/// The retained Arabic letters: hamza forms U+0621..U+0626, alif U+0627,
/// the consonant run U+0628..U+063A (incl. ta marbuta U+0629), and
/// U+0641..U+064A (incl. alif maqsura U+0649). 36 codepoints.
pub fn is_arabic_letter(c: char) -> bool {
    matches!(c, '\u{0621}'..='\u{063A}' | '\u{0641}'..='\u{064A}')
}

pub fn arabic_charset() -> Vec<char> {
    ('\u{0621}'..='\u{063A}').chain('\u{0641}'..='\u{064A}').collect()
}

pub fn is_latin_letter(c: char) -> bool {
    c.is_ascii_lowercase() || c == '\''
}

/// The 26 lowercase letters plus apostrophe.
pub fn english_charset() -> Vec<char> {
    ('a'..='z').chain(std::iter::once('\'')).collect()
}

fn is_ascii_digit(c: char) -> bool {
    c.is_ascii_digit()
}

fn is_arabic_digit(c: char) -> bool {
    matches!(c, '\u{0660}'..='\u{0669}' | '\u{06F0}'..='\u{06F9}')
}

/// Stripped in-place without creating a token boundary.
#[derive(Debug, Clone)]
pub struct DiacriticPolicy {
    /// Inclusive codepoint ranges to drop.
    pub drop_ranges: Vec<(char, char)>,
}

impl Default for DiacriticPolicy {
    fn default() -> Self {
        Self {
            drop_ranges: vec![
                ('\u{064B}', '\u{0652}'), // fathatan..sukun
                ('\u{0640}', '\u{0640}'), // tatweel
                ('\u{0670}', '\u{0670}'), // superscript alef
            ],
        }
    }
}

impl DiacriticPolicy {
    fn drops(&self, c: char) -> bool {
        self.drop_ranges.iter().any(|&(lo, hi)| c >= lo && c <= hi)
    }
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

/// Classify a token by the scripts of its characters.
pub fn classify_token(token: &str) -> Result<Script, TextNormError> {
    if token.is_empty() {
        return Err(TextNormError::EmptyToken);
    }
    let mut arabic = false;
    let mut latin = false;
    let mut other = false;
    for c in token.chars() {
        if is_arabic_letter(c) {
            arabic = true;
        } else if is_latin_letter(c) {
            latin = true;
        } else {
            other = true;
        }
    }
    Ok(match (arabic, latin, other) {
        (true, true, _) => Script::Mixed,
        (true, false, false) => Script::Arabic,
        (false, true, false) => Script::Latin,
        _ => Script::Other,
    })
}

// ---------------------------------------------------------------------------
// Tokenization
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    English,
    Arabic,
    Any,
}

/// Split NFKC-folded text into raw tokens. Letters (per mode) and digits
/// are token characters, diacritics vanish, everything else is a boundary.
fn raw_tokens(text: &str, mode: Mode, diacritics: &DiacriticPolicy) -> Vec<String> {
    let folded: String = text.nfkc().collect();
    let mut tokens = Vec::new();
    let mut cur = String::new();
    for c in folded.chars() {
        let keep = match mode {
            Mode::English => {
                c.is_ascii_alphabetic() || c == '\'' || is_ascii_digit(c)
            }
            Mode::Arabic => is_arabic_letter(c) || is_ascii_digit(c) || is_arabic_digit(c),
            Mode::Any => {
                c.is_ascii_alphabetic()
                    || c == '\''
                    || is_arabic_letter(c)
                    || is_ascii_digit(c)
                    || is_arabic_digit(c)
            }
        };
        if keep {
            cur.push(c.to_ascii_lowercase());
        } else if diacritics.drops(c) {
            // stripped, no boundary
        } else if !cur.is_empty() {
            tokens.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    tokens
}

fn route_token(token: String, hint: Option<LanguageHint>, out: &mut NormalizeOutcome) {
    let has_digit = token.chars().any(|c| is_ascii_digit(c) || is_arabic_digit(c));
    if has_digit {
        let pure_ascii_number = token.chars().all(is_ascii_digit);
        if pure_ascii_number && hint != Some(LanguageHint::Arabic) {
            match token.parse::<u64>().ok().and_then(|n| verbalize_number_en(n).ok()) {
                Some(words) => out.tokens.extend(words),
                None => out.flagged.push(token),
            }
        } else {
            // Arabic-Indic digits and digits in Arabic context have no
            // verbalization rule; flag and drop.
            out.flagged.push(token);
        }
        return;
    }
    match classify_token(&token) {
        Ok(Script::Arabic) => out.tokens.push(NormalizedToken::new(token, TokenScript::Arabic)),
        Ok(Script::Latin) => out.tokens.push(NormalizedToken::new(token, TokenScript::Latin)),
        _ => out.flagged.push(token),
    }
}

// ---------------------------------------------------------------------------
// Public normalizers
// ---------------------------------------------------------------------------

/// Lowercase and confine to {a..z, '}; anything else is a token boundary.
/// Digit runs are verbalized as English cardinals or flagged.
pub fn normalize_english(text: &str) -> NormalizeOutcome {
    let mut out = NormalizeOutcome::default();
    for tok in raw_tokens(text, Mode::English, &DiacriticPolicy::default()) {
        route_token(tok, Some(LanguageHint::English), &mut out);
    }
    out
}

/// Strip diacritics and tatweel, fold presentation forms, confine to the
/// 36-codepoint Arabic set. Digit-bearing tokens are flagged.
pub fn normalize_arabic(text: &str) -> NormalizeOutcome {
    normalize_arabic_with(text, &DiacriticPolicy::default())
}

pub fn normalize_arabic_with(text: &str, diacritics: &DiacriticPolicy) -> NormalizeOutcome {
    let mut out = NormalizeOutcome::default();
    for tok in raw_tokens(text, Mode::Arabic, diacritics) {
        route_token(tok, Some(LanguageHint::Arabic), &mut out);
    }
    out
}

/// Dispatcher: tokens are split on whitespace/punctuation and routed per
/// script; the hint only decides how bare digit runs are handled.
pub fn normalize(text: &str, hint: Option<LanguageHint>) -> NormalizeOutcome {
    let mut out = NormalizeOutcome::default();
    for tok in raw_tokens(text, Mode::Any, &DiacriticPolicy::default()) {
        route_token(tok, hint, &mut out);
    }
    out
}

/// Normalize with an acronym expansion pass applied first.
pub fn normalize_with_acronyms(
    text: &str,
    hint: Option<LanguageHint>,
    table: &AcronymTable,
) -> NormalizeOutcome {
    normalize(&table.expand(text), hint)
}

// ---------------------------------------------------------------------------
// Number verbalization (English)
// ---------------------------------------------------------------------------

const UNITS: [&str; 20] = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
    "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen",
    "nineteen",
];
const TENS: [&str; 10] = [
    "", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety",
];

fn push_under_1000(n: u64, out: &mut Vec<NormalizedToken>) {
    debug_assert!(n > 0 && n < 1000);
    let latin = |s: &str| NormalizedToken::new(s.to_string(), TokenScript::Latin);
    if n >= 100 {
        out.push(latin(UNITS[(n / 100) as usize]));
        out.push(latin("hundred"));
    }
    let rem = n % 100;
    if rem == 0 {
    } else if rem < 20 {
        out.push(latin(UNITS[rem as usize]));
    } else {
        out.push(latin(TENS[(rem / 10) as usize]));
        if !rem.is_multiple_of(10) {
            out.push(latin(UNITS[(rem % 10) as usize]));
        }
    }
}

/// English cardinal words for 0 <= n < 10^9, as separate hyphen-free tokens.
pub fn verbalize_number_en(n: u64) -> Result<Vec<NormalizedToken>, TextNormError> {
    if n >= 1_000_000_000 {
        return Err(TextNormError::NumberOutOfRange(n));
    }
    if n == 0 {
        return Ok(vec![NormalizedToken::new("zero".into(), TokenScript::Latin)]);
    }
    let mut out = Vec::new();
    let latin = |s: &str| NormalizedToken::new(s.to_string(), TokenScript::Latin);
    let (millions, thousands, rest) = (n / 1_000_000, (n / 1000) % 1000, n % 1000);
    if millions > 0 {
        push_under_1000(millions, &mut out);
        out.push(latin("million"));
    }
    if thousands > 0 {
        push_under_1000(thousands, &mut out);
        out.push(latin("thousand"));
    }
    if rest > 0 {
        push_under_1000(rest, &mut out);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Acronym table
// ---------------------------------------------------------------------------

/// User-supplied acronym expansions, applied to whitespace-delimited words
/// before normalization. Empty by default.
#[derive(Debug, Clone, Default)]
pub struct AcronymTable {
    map: HashMap<String, String>,
}

impl AcronymTable {
    pub fn from_tsv(path: impl AsRef<Path>) -> Result<Self, TextNormError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| TextNormError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let mut map = HashMap::new();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (acronym, expansion) =
                line.split_once('\t').ok_or_else(|| TextNormError::BadAcronymLine {
                    path: path.display().to_string(),
                    line: idx + 1,
                })?;
            map.insert(acronym.trim().to_string(), expansion.trim().to_string());
        }
        Ok(Self { map })
    }

    pub fn expand(&self, text: &str) -> String {
        if self.map.is_empty() {
            return text.to_string();
        }
        text.split_whitespace()
            .map(|w| self.map.get(w).map(String::as_str).unwrap_or(w))
            .collect::<Vec<_>>()
            .join(" ")
    }
}
