//! Replay-style mixture planning: draw utterances from named manifest pools
//! under per-pool hour budgets and emit one shuffled training manifest.
//!
//! Selection is uniform without replacement within a pool and stops at the
//! first crossing of the budget, so a pool overshoots by at most one
//! utterance. Everything is a pure function of (pools, budgets, seed).

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{self, CorpusError, ManifestRecord};

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error("pool {pool}: budget {budget_hours}h exceeds available {available_hours:.4}h")]
    InfeasibleBudget {
        pool: String,
        budget_hours: f64,
        available_hours: f64,
    },
    #[error("pool {pool}: budget must be positive, got {budget_hours}")]
    NonPositiveBudget { pool: String, budget_hours: f64 },
    #[error("duplicate pool name {0}")]
    DuplicatePool(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
}

/// One line of the budgets file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolBudget {
    pub pool_name: String,
    pub manifest_path: String,
    pub budget_hours: f64,
}

/// A manifest record annotated with the pool it was drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureRecord {
    pub pool_name: String,
    #[serde(flatten)]
    pub record: ManifestRecord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoolSelection {
    pub pool_name: String,
    pub utterance_ids: Vec<String>,
    pub achieved_hours: f64,
}

/// The resolved mixture: per-pool selections plus the global shuffled order.
#[derive(Debug, Clone)]
pub struct MixturePlan {
    pub seed: u64,
    pub per_pool: Vec<PoolSelection>,
    pub output: Vec<MixtureRecord>,
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Plan a mixture over named pools. Each pool's records come from its
/// manifest; selection per pool is a seeded shuffle consumed until the
/// cumulative duration first reaches the budget.
pub fn plan_mixture(budgets: &[PoolBudget], seed: u64) -> Result<MixturePlan, SamplerError> {
    let mut pools = Vec::new();
    for b in budgets {
        let records = corpus::read_manifest(&b.manifest_path)?;
        pools.push((b.clone(), records));
    }
    plan_mixture_from_records(&pools, seed)
}

pub fn plan_mixture_from_records(
    pools: &[(PoolBudget, Vec<ManifestRecord>)],
    seed: u64,
) -> Result<MixturePlan, SamplerError> {
    let mut seen = std::collections::HashSet::new();
    let mut per_pool = Vec::new();
    let mut output = Vec::new();

    for (budget, records) in pools {
        if !seen.insert(budget.pool_name.clone()) {
            return Err(SamplerError::DuplicatePool(budget.pool_name.clone()));
        }
        if budget.budget_hours <= 0.0 {
            return Err(SamplerError::NonPositiveBudget {
                pool: budget.pool_name.clone(),
                budget_hours: budget.budget_hours,
            });
        }
        let available_hours: f64 = records.iter().map(|r| r.duration_s).sum::<f64>() / 3600.0;
        if available_hours < budget.budget_hours {
            return Err(SamplerError::InfeasibleBudget {
                pool: budget.pool_name.clone(),
                budget_hours: budget.budget_hours,
                available_hours,
            });
        }

        // Per-pool RNG keyed by (seed, pool name) so adding a pool does not
        // reshuffle the others.
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(budget.pool_name.as_bytes()));
        let mut order: Vec<usize> = (0..records.len()).collect();
        order.shuffle(&mut rng);

        let mut achieved_s = 0.0;
        let mut ids = Vec::new();
        for idx in order {
            if achieved_s >= budget.budget_hours * 3600.0 {
                break;
            }
            let rec = &records[idx];
            achieved_s += rec.duration_s;
            ids.push(rec.utterance_id.clone());
            output.push(MixtureRecord {
                pool_name: budget.pool_name.clone(),
                record: rec.clone(),
            });
        }
        per_pool.push(PoolSelection {
            pool_name: budget.pool_name.clone(),
            utterance_ids: ids,
            achieved_hours: achieved_s / 3600.0,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    output.shuffle(&mut rng);
    Ok(MixturePlan {
        seed,
        per_pool,
        output,
    })
}

/// Write the combined manifest (JSONL, atomic) in the plan's shuffle order.
pub fn emit_mixture(plan: &MixturePlan, path: impl AsRef<Path>) -> Result<(), SamplerError> {
    let path = path.as_ref();
    let tmp = path.with_extension("tmp");
    let io_err = |p: &Path, e: io::Error| SamplerError::Io {
        path: p.display().to_string(),
        source: e,
    };
    {
        let mut f = File::create(&tmp).map_err(|e| io_err(&tmp, e))?;
        for rec in &plan.output {
            let line = serde_json::to_string(rec).expect("mixture record serializes");
            writeln!(f, "{line}").map_err(|e| io_err(&tmp, e))?;
        }
    }
    std::fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}
