//! Toolkit for building Arabic-English code-switched speech corpora.
//!
//! The pipeline has three legs:
//!
//! 1. **Generation** — [`splicer`] cuts a 2-4 word fragment out of one
//!    language and splices it into a base utterance of the other, with
//!    volume matching and crossfaded junctions. Word timings come from
//!    CTM files ingested by [`corpus`].
//! 2. **Mixing** — [`sampler`] composes replay-style training mixtures
//!    from named manifest pools under per-pool hour budgets.
//! 3. **Scoring** — [`eval`] computes WER with an S/D/I breakdown,
//!    dissected by Arabic-only / English-only / code-switched utterances.
//!
//! All randomness is seeded and generation is deterministic regardless of
//! worker count.

pub mod audio;
pub mod corpus;
pub mod eval;
pub mod sampler;
pub mod splicer;
pub mod textnorm;
