//! Cache orchestration shared by the CLI and the test suites: load the
//! operator table if the on-disk cache covers the request, otherwise compute
//! it (when allowed) and persist it under the lock.

use crate::cache;
use crate::config::Config;
use crate::error::{Error, Result};
use crate::theta::operators::{required_primes, required_t_entries, OperatorTable};
use crate::theta::validate::bootstrap_validated_bounded;
use std::path::Path;

/// Does the table cover the `m` and `t` entries the given truncation and
/// Hecke primes require?
pub fn covers(table: &OperatorTable, w: usize, hecke_primes: &[i64]) -> bool {
    let mut need_m = required_primes(w as i64);
    for &p in hecke_primes {
        match p.rem_euclid(3) {
            1 => {
                if let Ok(v) = crate::eisenstein::split_prime(p) {
                    need_m.push(v);
                    need_m.push(crate::eisenstein::canonical_prime(&v.conj()));
                }
            }
            2 => need_m.push(crate::eisenstein::Eis::new(p, 0)),
            _ => {}
        }
    }
    need_m.iter().all(|p| table.m_prime.contains_key(p))
        && required_t_entries(w, hecke_primes)
            .iter()
            .all(|k| table.t_mats.contains_key(k))
}

/// Load-or-compute policy.
pub enum EnsureMode {
    /// Fail with a missing-table error when the cache does not cover the request.
    LoadOnly,
    /// Compute and persist missing tables.
    Compute,
    /// Recompute everything, report a diff against the previous content.
    Refresh,
}

pub struct EnsureOutcome {
    pub table: OperatorTable,
    pub recomputed: bool,
    pub diff: Option<String>,
}

pub fn ensure_table(
    cfg: &Config,
    w: usize,
    hecke_primes: &[i64],
    mode: EnsureMode,
    lock_wait_ms: u64,
) -> Result<EnsureOutcome> {
    let path: &Path = &cfg.cache_path;
    let existing = if path.exists() {
        Some(cache::load(path)?)
    } else {
        None
    };
    if let Some(t) = &existing {
        let meta_matches = t.meta.precision == cfg.precision_bits
            && t.meta.denom_bound == cfg.denominator_bound;
        match mode {
            EnsureMode::Refresh => {}
            _ if !meta_matches => {
                return Err(Error::CacheFormat(format!(
                    "cache at {} was computed with precision {} and bound {}; refusing to mix \
                     with the requested precision {} and bound {} (use refresh to recompute)",
                    path.display(),
                    t.meta.precision,
                    t.meta.denom_bound,
                    cfg.precision_bits,
                    cfg.denominator_bound
                )));
            }
            _ if covers(t, w, hecke_primes) => {
                return Ok(EnsureOutcome {
                    table: existing.unwrap(),
                    recomputed: false,
                    diff: None,
                });
            }
            EnsureMode::LoadOnly => {
                return Err(Error::MissingOperatorTable(format!(
                    "cache at {} does not cover order {w} with Hecke primes {hecke_primes:?}",
                    path.display()
                )));
            }
            EnsureMode::Compute => {}
        }
    } else if matches!(mode, EnsureMode::LoadOnly) {
        return Err(Error::MissingOperatorTable(format!(
            "no cache at {}",
            path.display()
        )));
    }
    let (_model, table, report) =
        bootstrap_validated_bounded(cfg.precision_bits, &cfg.denominator_bound, w, hecke_primes)?;
    if !report.passed() {
        let (name, _, detail) = report.first_failure().unwrap();
        return Err(Error::ValidationFailed(format!("{name}: {detail}")));
    }
    let diff = existing.map(|old| cache::diff_summary(&old, &table));
    cache::save(&table, path, lock_wait_ms)?;
    Ok(EnsureOutcome {
        table,
        recomputed: true,
        diff,
    })
}
