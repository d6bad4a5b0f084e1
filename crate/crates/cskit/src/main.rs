//! `cskit` — corpus toolkit CLI: validate alignments, normalize text,
//! generate spliced code-switched data, compose training mixtures, and
//! score hypotheses.
//!
//! Data goes to files or stdout; logs go to stderr. Exit codes: 0 success,
//! 1 validation/runtime error, 2 usage error.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use cskit::audio;
use cskit::corpus::{self, LanguageTag, ManifestRecord};
use cskit::eval;
use cskit::sampler::{self, PoolBudget};
use cskit::splicer::{self, Pool, SpliceConfig};
use cskit::textnorm::{self, AcronymTable, LanguageHint};

#[derive(Parser)]
#[command(name = "cskit", version, about = "Code-switched speech corpus toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a CTM alignment file against an audio index
    Validate {
        /// JSONL audio index (utterance_id, audio_path, language, duration_s)
        #[arg(long)]
        audio_index: PathBuf,
        /// CTM file with word-level timings
        #[arg(long)]
        ctm: PathBuf,
    },
    /// Normalize text from a file or stdin, one utterance per line
    Normalize {
        /// Language hint for digit handling: ar or en
        #[arg(long)]
        lang: Option<String>,
        /// Input text file; defaults to stdin
        #[arg(long)]
        input: Option<PathBuf>,
        /// Two-column TSV of acronym expansions
        #[arg(long)]
        acronyms: Option<PathBuf>,
    },
    /// Generate spliced code-switched audio and its manifest
    Splice(SpliceArgs),
    /// Compose a budgeted training mixture from manifest pools
    Mix {
        /// JSONL budgets file: {pool_name, manifest_path, budget_hours}
        #[arg(long)]
        budgets: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output manifest path
        #[arg(long)]
        output: PathBuf,
    },
    /// Score hypotheses against a reference manifest
    Wer {
        /// Reference manifest (JSONL)
        #[arg(long = "ref", value_name = "REF")]
        reference: PathBuf,
        /// Hypotheses (JSONL: {utterance_id, transcript})
        #[arg(long)]
        hyp: PathBuf,
        /// Break the report down by Ar/En/CS utterance category
        #[arg(long)]
        dissect: bool,
        /// Emit the report as JSON instead of a table
        #[arg(long)]
        json: bool,
    },
    /// Corpus statistics for a manifest
    Stats {
        #[arg(long)]
        manifest: PathBuf,
    },
}

#[derive(Args)]
struct SpliceArgs {
    /// Arabic pool: audio index and CTM
    #[arg(long)]
    ar_index: PathBuf,
    #[arg(long)]
    ar_ctm: PathBuf,
    /// English pool: audio index and CTM
    #[arg(long)]
    en_index: PathBuf,
    #[arg(long)]
    en_ctm: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    /// Target hours of generated audio
    #[arg(long)]
    hours: f64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Probability that the base utterance is Arabic
    #[arg(long)]
    direction_prob: Option<f64>,
    #[arg(long)]
    xfade_ms: Option<f64>,
    #[arg(long)]
    span_min: Option<usize>,
    #[arg(long)]
    span_max: Option<usize>,
    #[arg(long)]
    gain_min: Option<f32>,
    #[arg(long)]
    gain_max: Option<f32>,
    /// JSON config file; flags override it, it overrides defaults
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Resolved splice run configuration, echoed into the manifest header.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct RunConfig {
    master_seed: u64,
    // Not serialized into the manifest header: worker count never changes
    // the output, and the header must not either.
    #[serde(skip_serializing)]
    workers: usize,
    direction_prob: f64,
    xfade_ms: f64,
    span_min: usize,
    span_max: usize,
    gain_min: f32,
    gain_max: f32,
}

#[derive(Debug, Default, Deserialize)]
struct FileConfig {
    master_seed: Option<u64>,
    workers: Option<usize>,
    direction_prob: Option<f64>,
    xfade_ms: Option<f64>,
    span_min: Option<usize>,
    span_max: Option<usize>,
    gain_min: Option<f32>,
    gain_max: Option<f32>,
}

impl RunConfig {
    fn resolve(args: &SpliceArgs) -> Result<Self> {
        let file: FileConfig = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                serde_json::from_str(&text)
                    .with_context(|| format!("parsing config {}", path.display()))?
            }
            None => FileConfig::default(),
        };
        let cfg = Self {
            master_seed: args.seed.or(file.master_seed).unwrap_or(0),
            workers: args.workers.or(file.workers).unwrap_or(1),
            direction_prob: args.direction_prob.or(file.direction_prob).unwrap_or(0.5),
            xfade_ms: args.xfade_ms.or(file.xfade_ms).unwrap_or(10.0),
            span_min: args.span_min.or(file.span_min).unwrap_or(2),
            span_max: args.span_max.or(file.span_max).unwrap_or(4),
            gain_min: args.gain_min.or(file.gain_min).unwrap_or(0.1),
            gain_max: args.gain_max.or(file.gain_max).unwrap_or(10.0),
        };
        if cfg.workers < 1 {
            bail!("workers must be >= 1");
        }
        if !(0.0..=1.0).contains(&cfg.direction_prob) {
            bail!("direction_prob must be in [0, 1]");
        }
        if !(0.0..=50.0).contains(&cfg.xfade_ms) {
            bail!("xfade_ms must be in [0, 50]");
        }
        if cfg.span_min < 1 || cfg.span_min > cfg.span_max {
            bail!("span range must satisfy 1 <= span_min <= span_max");
        }
        if !(cfg.gain_min > 0.0 && cfg.gain_min <= cfg.gain_max) {
            bail!("gain clamp must satisfy 0 < gain_min <= gain_max");
        }
        Ok(cfg)
    }

    fn splice_config(&self) -> SpliceConfig {
        SpliceConfig {
            direction_prob_ar_base: self.direction_prob,
            xfade: (self.xfade_ms / 1000.0 * audio::SAMPLE_RATE as f64).round() as usize,
            span_min: self.span_min,
            span_max: self.span_max,
            gain_clamp: (self.gain_min, self.gain_max),
            max_attempts: 100,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Validate { audio_index, ctm } => cmd_validate(&audio_index, &ctm),
        Command::Normalize { lang, input, acronyms } => cmd_normalize(lang, input, acronyms),
        Command::Splice(args) => cmd_splice(&args),
        Command::Mix { budgets, seed, output } => cmd_mix(&budgets, seed, &output),
        Command::Wer { reference, hyp, dissect, json } => cmd_wer(&reference, &hyp, dissect, json),
        Command::Stats { manifest } => cmd_stats(&manifest),
    }
}

fn cmd_validate(audio_index: &Path, ctm: &Path) -> Result<ExitCode> {
    let index = corpus::read_audio_index(audio_index)?;
    let alignments = corpus::parse_ctm_file(ctm)?;
    let (ok, rejected) = corpus::build_utterances(&alignments, &index);
    for r in &rejected {
        eprintln!("rejected {}: {:?}", r.utterance_id, r.issue);
    }
    println!(
        "{}",
        serde_json::json!({
            "valid_utterances": ok.len(),
            "rejected_utterances": rejected.len(),
            "alignment_lines": alignments.len(),
        })
    );
    Ok(if rejected.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_normalize(
    lang: Option<String>,
    input: Option<PathBuf>,
    acronyms: Option<PathBuf>,
) -> Result<ExitCode> {
    let hint = match lang.as_deref() {
        Some("ar") => Some(LanguageHint::Arabic),
        Some("en") => Some(LanguageHint::English),
        None => None,
        Some(other) => bail!("unknown language {other:?}, expected ar or en"),
    };
    let table = match acronyms {
        Some(path) => AcronymTable::from_tsv(path)?,
        None => AcronymTable::default(),
    };
    let mut text = String::new();
    match input {
        Some(path) => {
            File::open(&path)
                .with_context(|| format!("opening {}", path.display()))?
                .read_to_string(&mut text)?;
        }
        None => {
            std::io::stdin().read_to_string(&mut text)?;
        }
    }
    for line in text.lines() {
        let out = textnorm::normalize_with_acronyms(line, hint, &table);
        for flagged in &out.flagged {
            eprintln!("unverbalizable token: {flagged}");
        }
        println!("{}", out.joined());
    }
    Ok(ExitCode::SUCCESS)
}

fn load_pool(index_path: &Path, ctm_path: &Path, expect: LanguageTag) -> Result<Pool> {
    let index = corpus::read_audio_index(index_path)?;
    let alignments = corpus::parse_ctm_file(ctm_path)?;
    let (utterances, rejected) = corpus::build_utterances(&alignments, &index);
    for r in &rejected {
        eprintln!("skipping {}: {:?}", r.utterance_id, r.issue);
    }
    let mut items = Vec::new();
    for utt in utterances {
        if utt.language != expect {
            eprintln!(
                "skipping {}: language {} does not match pool {}",
                utt.utterance_id, utt.language, expect
            );
            continue;
        }
        // Pool entries must be clean: normalized tokens, no flagged content.
        let hint = match expect {
            LanguageTag::Arabic => Some(LanguageHint::Arabic),
            _ => Some(LanguageHint::English),
        };
        let joined = utt.tokens().join(" ");
        let normed = textnorm::normalize(&joined, hint);
        if !normed.is_clean() || normed.joined() != joined {
            eprintln!("skipping {}: transcript not normalized", utt.utterance_id);
            continue;
        }
        let buf = audio::read_wav(&utt.audio_path)?;
        items.push((utt, buf));
    }
    if items.is_empty() {
        bail!("pool from {} is empty after filtering", index_path.display());
    }
    Ok(Pool::new(items))
}

fn cmd_splice(args: &SpliceArgs) -> Result<ExitCode> {
    let run_cfg = RunConfig::resolve(args)?;
    let splice_cfg = run_cfg.splice_config();
    let ar_pool = load_pool(&args.ar_index, &args.ar_ctm, LanguageTag::Arabic)?;
    let en_pool = load_pool(&args.en_index, &args.en_ctm, LanguageTag::English)?;
    eprintln!(
        "pools loaded: {} ar, {} en; generating {} h with seed {}",
        ar_pool.items.len(),
        en_pool.items.len(),
        args.hours,
        run_cfg.master_seed
    );
    let records = splicer::generate_dataset(
        &ar_pool,
        &en_pool,
        args.hours,
        &splice_cfg,
        run_cfg.master_seed,
        run_cfg.workers,
        &args.out_dir,
    )?;
    let header = format!("config: {}", serde_json::to_string(&run_cfg)?);
    let manifest_path = args.out_dir.join("manifest.jsonl");
    corpus::write_manifest(&records, &manifest_path, Some(&header))?;
    let total_s: f64 = records.iter().map(|r| r.duration_s).sum();
    eprintln!(
        "wrote {} utterances ({:.3} h) to {}",
        records.len(),
        total_s / 3600.0,
        manifest_path.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_mix(budgets_path: &Path, seed: u64, output: &Path) -> Result<ExitCode> {
    let file = File::open(budgets_path)
        .with_context(|| format!("opening {}", budgets_path.display()))?;
    let mut budgets = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let b: PoolBudget = serde_json::from_str(&line)
            .with_context(|| format!("{}:{}", budgets_path.display(), idx + 1))?;
        budgets.push(b);
    }
    let plan = sampler::plan_mixture(&budgets, seed)?;
    sampler::emit_mixture(&plan, output)?;
    for sel in &plan.per_pool {
        eprintln!(
            "pool {}: {} utterances, {:.3} h",
            sel.pool_name,
            sel.utterance_ids.len(),
            sel.achieved_hours
        );
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Debug, Deserialize)]
struct HypRecord {
    utterance_id: String,
    transcript: String,
}

fn cmd_wer(reference: &Path, hyp: &Path, dissect: bool, json: bool) -> Result<ExitCode> {
    let refs = corpus::read_manifest(reference)?;
    let file = File::open(hyp).with_context(|| format!("opening {}", hyp.display()))?;
    let mut hyps: HashMap<String, String> = HashMap::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let rec: HypRecord = serde_json::from_str(&line)
            .with_context(|| format!("{}:{}", hyp.display(), idx + 1))?;
        hyps.insert(rec.utterance_id, rec.transcript);
    }

    let mut pairs = Vec::new();
    for rec in &refs {
        let ref_tokens: Vec<String> =
            rec.transcript.split_whitespace().map(String::from).collect();
        let hyp_tokens: Vec<String> = hyps
            .get(&rec.utterance_id)
            .map(|t| t.split_whitespace().map(String::from).collect())
            .unwrap_or_default();
        pairs.push((ref_tokens, hyp_tokens));
    }
    let report = eval::category_wer(&pairs)?;

    if json {
        println!("{}", serde_json::to_string_pretty(&report)?);
        return Ok(ExitCode::SUCCESS);
    }
    let line = |name: &str, r: &eval::WerReport| {
        println!(
            "{:<8} {:>8.2}%  S={:<6} D={:<6} I={:<6} ref_words={}",
            name,
            r.wer * 100.0,
            r.substitutions,
            r.deletions,
            r.insertions,
            r.ref_words
        );
    };
    line("overall", &report.overall);
    if dissect {
        use eval::UtteranceCategory::*;
        for (name, cat) in [("ar", ArOnly), ("en", EnOnly), ("cs", CodeSwitched)] {
            if let Some(r) = report.per_category.get(&cat) {
                line(name, r);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_stats(manifest: &Path) -> Result<ExitCode> {
    let records: Vec<ManifestRecord> = corpus::read_manifest(manifest)?;
    let stats = eval::corpus_stats(&records)?;
    println!("{}", serde_json::to_string_pretty(&stats)?);
    Ok(ExitCode::SUCCESS)
}
