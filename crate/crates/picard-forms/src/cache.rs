//! The operator cache: a versioned, line-oriented text file holding the
//! exact `m` images and `t` matrices, written and refreshed under an
//! advisory lock.  The cache is the system of record: loading validates the
//! header against the requested parameters instead of silently recomputing.

use crate::eisenstein::Eis;
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::sections::Section;
use crate::textio::{parse_cyc, parse_eis, parse_section};
use crate::theta::operators::{OperatorTable, TableMeta};
use num_bigint::BigInt;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const FORMAT_VERSION: &str = "v1";

/// Serialize a table to the cache text format.
pub fn to_text(table: &OperatorTable) -> String {
    let mut out = String::new();
    out.push_str(&format!("picard-operator-cache {FORMAT_VERSION}\n"));
    out.push_str(&format!("precision {}\n", table.meta.precision));
    out.push_str(&format!("denominator-bound {}\n", table.meta.denom_bound));
    out.push_str(&format!(
        "orientation {}\n",
        if table.meta.orientation_conj { "conj" } else { "std" }
    ));
    for (alpha, img) in &table.m_prime {
        for (gen, s) in ["X", "Y", "Z"].iter().zip(img.iter()) {
            out.push_str(&format!("m {alpha} {gen} {s}\n"));
        }
    }
    for ((alpha, n), mat) in &table.t_mats {
        for r in 0..mat.rows {
            for c in 0..mat.cols {
                out.push_str(&format!("t {alpha} {n} {r} {c} {}\n", mat.at(r, c)));
            }
        }
    }
    out.push_str("end\n");
    out
}

/// Parse the cache text format (panic-free; suitable for fuzzing).
pub fn from_text(text: &str) -> Result<OperatorTable> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::CacheFormat("empty cache".into()))?;
    if header != format!("picard-operator-cache {FORMAT_VERSION}") {
        return Err(Error::CacheFormat(format!("bad header {header:?}")));
    }
    let mut precision: Option<usize> = None;
    let mut bound: Option<BigInt> = None;
    let mut orientation: Option<bool> = None;
    let mut m_prime: BTreeMap<Eis, [Section; 3]> = BTreeMap::new();
    let mut pending_m: BTreeMap<Eis, BTreeMap<usize, Section>> = BTreeMap::new();
    let mut t_mats: BTreeMap<(Eis, usize), Mat> = BTreeMap::new();
    let mut t_counts: BTreeMap<(Eis, usize), usize> = BTreeMap::new();
    let mut saw_end = false;
    for line in lines {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        if saw_end {
            return Err(Error::CacheFormat("content after end marker".into()));
        }
        let mut it = line.splitn(2, ' ');
        let tag = it.next().unwrap_or("");
        let rest = it.next().unwrap_or("");
        match tag {
            "precision" => {
                precision = Some(
                    rest.parse()
                        .map_err(|_| Error::CacheFormat("bad precision".into()))?,
                );
            }
            "denominator-bound" => {
                bound = Some(
                    rest.parse()
                        .map_err(|_| Error::CacheFormat("bad denominator bound".into()))?,
                );
            }
            "orientation" => {
                orientation = Some(match rest {
                    "std" => false,
                    "conj" => true,
                    _ => return Err(Error::CacheFormat("bad orientation".into())),
                });
            }
            "m" => {
                let mut parts = rest.splitn(3, ' ');
                let alpha = parse_eis(parts.next().unwrap_or(""))?;
                let gen = match parts.next() {
                    Some("X") => 0usize,
                    Some("Y") => 1,
                    Some("Z") => 2,
                    _ => return Err(Error::CacheFormat("bad generator tag".into())),
                };
                let sec = parse_section(parts.next().unwrap_or(""))?;
                let expect = alpha.norm();
                if expect <= 0 || sec.degree != expect as usize && !sec.is_zero() {
                    return Err(Error::CacheFormat(format!(
                        "degree mismatch for m {alpha}"
                    )));
                }
                pending_m.entry(alpha).or_default().insert(gen, sec);
            }
            "t" => {
                let parts: Vec<&str> = rest.splitn(5, ' ').collect();
                if parts.len() != 5 {
                    return Err(Error::CacheFormat("bad t entry".into()));
                }
                let alpha = parse_eis(parts[0])?;
                let n: usize = parts[1]
                    .parse()
                    .map_err(|_| Error::CacheFormat("bad t degree".into()))?;
                if n == 0 || n > 4096 || alpha.norm() <= 1 {
                    return Err(Error::CacheFormat("inconsistent t dimensions".into()));
                }
                let rows = 3 * n;
                let cols = 3 * n * alpha.norm() as usize;
                let r: usize = parts[2]
                    .parse()
                    .map_err(|_| Error::CacheFormat("bad row".into()))?;
                let c: usize = parts[3]
                    .parse()
                    .map_err(|_| Error::CacheFormat("bad col".into()))?;
                if r >= rows || c >= cols {
                    return Err(Error::CacheFormat("entry out of bounds".into()));
                }
                let mat = t_mats
                    .entry((alpha, n))
                    .or_insert_with(|| Mat::zero(rows, cols));
                mat.set(r, c, parse_cyc(parts[4])?);
                *t_counts.entry((alpha, n)).or_insert(0) += 1;
            }
            "end" => {
                saw_end = true;
            }
            _ => return Err(Error::CacheFormat(format!("unknown tag {tag:?}"))),
        }
    }
    if !saw_end {
        return Err(Error::CacheFormat("missing end marker".into()));
    }
    for (key, mat) in &t_mats {
        let have = t_counts.get(key).copied().unwrap_or(0);
        if have != mat.rows * mat.cols {
            return Err(Error::CacheFormat(format!(
                "t block for ({}, {}) has {have} of {} entries",
                key.0,
                key.1,
                mat.rows * mat.cols
            )));
        }
    }
    for (alpha, parts) in pending_m {
        let (Some(x), Some(y), Some(z)) = (parts.get(&0), parts.get(&1), parts.get(&2)) else {
            return Err(Error::CacheFormat(format!("incomplete m triple for {alpha}")));
        };
        m_prime.insert(alpha, [x.clone(), y.clone(), z.clone()]);
    }
    let meta = TableMeta::new(
        precision.ok_or_else(|| Error::CacheFormat("missing precision".into()))?,
        bound.ok_or_else(|| Error::CacheFormat("missing denominator bound".into()))?,
        orientation.ok_or_else(|| Error::CacheFormat("missing orientation".into()))?,
    );
    let mut table = OperatorTable::empty(meta);
    table.m_prime = m_prime;
    table.t_mats = t_mats;
    Ok(table)
}

/// RAII advisory lock: `<path>.lock` created exclusively, removed on drop.
pub struct CacheLock {
    lock_path: PathBuf,
}

impl CacheLock {
    /// Acquire the lock, retrying for up to `wait_ms` milliseconds.
    pub fn acquire(cache_path: &Path, wait_ms: u64) -> Result<CacheLock> {
        let lock_path = lock_path_for(cache_path);
        let deadline = std::time::Instant::now() + std::time::Duration::from_millis(wait_ms);
        loop {
            match std::fs::OpenOptions::new()
                .write(true)
                .create_new(true)
                .open(&lock_path)
            {
                Ok(mut f) => {
                    let _ = writeln!(f, "{}", std::process::id());
                    return Ok(CacheLock { lock_path });
                }
                Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                    if std::time::Instant::now() >= deadline {
                        return Err(Error::LockHeld(lock_path.display().to_string()));
                    }
                    std::thread::sleep(std::time::Duration::from_millis(50));
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
}

impl Drop for CacheLock {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.lock_path);
    }
}

fn lock_path_for(cache_path: &Path) -> PathBuf {
    let mut p = cache_path.as_os_str().to_owned();
    p.push(".lock");
    PathBuf::from(p)
}

/// Write a table under the lock (atomic rename).
pub fn save(table: &OperatorTable, path: &Path, wait_ms: u64) -> Result<()> {
    let _lock = CacheLock::acquire(path, wait_ms)?;
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, to_text(table))?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Load a table from disk.
pub fn load(path: &Path) -> Result<OperatorTable> {
    let text = std::fs::read_to_string(path)?;
    from_text(&text)
}

/// Differences between two tables (used by `--refresh` reporting).
pub fn diff_summary(old: &OperatorTable, new: &OperatorTable) -> String {
    let mut changed = 0usize;
    let mut added = 0usize;
    for (k, v) in &new.m_prime {
        match old.m_prime.get(k) {
            None => added += 1,
            Some(o) if o != v => changed += 1,
            _ => {}
        }
    }
    for (k, v) in &new.t_mats {
        match old.t_mats.get(k) {
            None => added += 1,
            Some(o) if o != v => changed += 1,
            _ => {}
        }
    }
    format!("{added} entries added, {changed} entries changed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::Cyc;

    fn tiny_table() -> OperatorTable {
        let meta = TableMeta::new(256, TableMeta::default_bound(), false);
        let mut t = OperatorTable::empty(meta);
        let mut sx = Section::zero(3);
        sx.add_term((1, 1, 1), Cyc::sqrt_m3());
        let mut sy = Section::zero(3);
        sy.add_term((0, 0, 3), Cyc::from_pair(1, 1));
        sy.add_term((0, 3, 0), Cyc::from_pair(0, -1));
        let sz = crate::sections::CuspAction::unit(&Eis::new(1, 1))[1]
            .substitute(&[sx.clone(), sy.clone(), sy.clone()]);
        let _ = sz;
        let mut szz = Section::zero(3);
        szz.add_term((0, 3, 0), Cyc::from_pair(1, 1));
        szz.add_term((0, 0, 3), Cyc::from_pair(0, -1));
        t.m_prime.insert(Eis::SQRT_M3, [sx, sy, szz]);
        let mut mat = Mat::zero(3, 12);
        mat.set(1, 5, Cyc::from_ratio(-7, 3));
        t.t_mats.insert((Eis::new(-2, 0), 1), mat);
        t
    }

    #[test]
    fn text_round_trip_is_bit_exact() {
        let t = tiny_table();
        let text = to_text(&t);
        let back = from_text(&text).unwrap();
        assert_eq!(to_text(&back), text);
        assert_eq!(back.m_prime, t.m_prime);
        assert_eq!(back.t_mats, t.t_mats);
        assert_eq!(back.meta, t.meta);
    }

    #[test]
    fn lock_excludes_and_releases() {
        let dir = std::env::temp_dir().join(format!("picard-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cache.txt");
        let l1 = CacheLock::acquire(&path, 10).unwrap();
        assert!(matches!(
            CacheLock::acquire(&path, 10),
            Err(Error::LockHeld(_))
        ));
        drop(l1);
        let _l2 = CacheLock::acquire(&path, 10).unwrap();
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn rejects_malformed_cache() {
        assert!(from_text("").is_err());
        assert!(from_text("picard-operator-cache v0\nend\n").is_err());
        let t = tiny_table();
        let mut text = to_text(&t);
        text = text.replace("end\n", "");
        assert!(from_text(&text).is_err());
    }
}
