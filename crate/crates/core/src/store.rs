//! Rank tables and the persistent cache: a CSV of `D,r3` rows plus a sidecar
//! JSON manifest declaring which closed D-intervals the file covers.
//!
//! Files are canonical byte-for-byte (ASCII decimal, LF endings, ascending D)
//! so reproducibility checks can diff them directly.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::arith::{self, FundamentalDiscriminant};
use crate::error::{Error, Result};

const FORMAT_VERSION: u32 = 1;
const CSV_HEADER: &str = "D,r3";

/// One row of a rank table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankRecord {
    pub d: FundamentalDiscriminant,
    pub r3: u8,
}

/// A complete map `D -> r3(D)` over a set of closed discriminant intervals.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RankTable {
    entries: Vec<(i64, u8)>,
    coverage: Vec<(i64, i64)>,
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    intervals: Vec<(i64, i64)>,
    format: u32,
}

/// Normalize closed intervals: sort, reject overlap, merge adjacent.
fn normalize_intervals(mut iv: Vec<(i64, i64)>) -> Result<Vec<(i64, i64)>> {
    iv.retain(|&(lo, hi)| lo <= hi);
    iv.sort_unstable();
    let mut out: Vec<(i64, i64)> = Vec::with_capacity(iv.len());
    for (lo, hi) in iv {
        if let Some(last) = out.last_mut() {
            if lo <= last.1 {
                // overlap is fine as long as we only ever union; just extend
                last.1 = last.1.max(hi);
                continue;
            }
            if lo == last.1 + 1 {
                last.1 = hi;
                continue;
            }
        }
        out.push((lo, hi));
    }
    Ok(out)
}

impl RankTable {
    pub fn new(mut entries: Vec<(i64, u8)>, coverage: Vec<(i64, i64)>) -> Result<Self> {
        entries.sort_unstable();
        entries.dedup();
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::CacheConflict { d: w[0].0, left: w[0].1, right: w[1].1 });
            }
        }
        let coverage = normalize_intervals(coverage)?;
        let table = RankTable { entries, coverage };
        for &(d, _) in &table.entries {
            if !table.covers(d) {
                return Err(Error::MalformedCache(format!(
                    "entry D = {d} lies outside the declared coverage"
                )));
            }
        }
        Ok(table)
    }

    pub fn entries(&self) -> &[(i64, u8)] {
        &self.entries
    }

    pub fn records(&self) -> impl Iterator<Item = RankRecord> + '_ {
        self.entries.iter().map(|&(d, r3)| RankRecord {
            d: FundamentalDiscriminant::new_unchecked(d),
            r3,
        })
    }

    pub fn coverage(&self) -> &[(i64, i64)] {
        &self.coverage
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn covers(&self, d: i64) -> bool {
        self.coverage.iter().any(|&(lo, hi)| lo <= d && d <= hi)
    }

    pub fn covers_interval(&self, lo: i64, hi: i64) -> bool {
        lo > hi || self.coverage.iter().any(|&(a, b)| a <= lo && hi <= b)
    }

    pub fn lookup(&self, d: i64) -> Option<u8> {
        self.entries
            .binary_search_by_key(&d, |&(k, _)| k)
            .ok()
            .map(|i| self.entries[i].1)
    }

    /// Rank of a covered discriminant; a gap is an error, not a silent miss.
    pub fn rank_of(&self, d: i64) -> Result<u8> {
        match self.lookup(d) {
            Some(r) => Ok(r),
            None if self.covers(d) && !arith::is_fundamental(d) => Err(Error::NotFundamental(d)),
            None => Err(Error::CoverageGap(d)),
        }
    }

    /// Every fundamental D inside the declared coverage must have an entry.
    pub fn validate_complete(&self) -> Result<()> {
        for &(lo, hi) in &self.coverage {
            for d in lo..=hi {
                if arith::is_fundamental(d) && self.lookup(d).is_none() {
                    return Err(Error::MalformedCache(format!(
                        "coverage [{lo}, {hi}] declared but D = {d} has no entry"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut s = String::with_capacity(self.entries.len() * 10 + 8);
        s.push_str(CSV_HEADER);
        s.push('\n');
        for &(d, r) in &self.entries {
            s.push_str(&d.to_string());
            s.push(',');
            s.push_str(&r.to_string());
            s.push('\n');
        }
        s
    }

    pub fn from_csv_str(csv: &str, coverage: Vec<(i64, i64)>) -> Result<Self> {
        let mut lines = csv.lines();
        match lines.next() {
            Some(h) if h == CSV_HEADER => {}
            other => {
                return Err(Error::MalformedCache(format!(
                    "bad header {other:?}, expected {CSV_HEADER:?}"
                )))
            }
        }
        let mut entries = Vec::new();
        for (i, line) in lines.enumerate() {
            let (d, r) = line
                .split_once(',')
                .ok_or_else(|| Error::MalformedCache(format!("row {}: no comma", i + 2)))?;
            let d: i64 = d
                .parse()
                .map_err(|e| Error::MalformedCache(format!("row {}: {e}", i + 2)))?;
            let r: u8 = r
                .parse()
                .map_err(|e| Error::MalformedCache(format!("row {}: {e}", i + 2)))?;
            entries.push((d, r));
        }
        if !entries.windows(2).all(|w| w[0].0 < w[1].0) {
            return Err(Error::MalformedCache("rows not in ascending D order".into()));
        }
        RankTable::new(entries, coverage)
    }

    /// Union of two tables; conflicting ranks for the same D are an error.
    pub fn merge(&self, other: &RankTable) -> Result<RankTable> {
        let mut entries = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() || j < other.entries.len() {
            let next = match (self.entries.get(i), other.entries.get(j)) {
                (Some(&a), Some(&b)) if a.0 == b.0 => {
                    if a.1 != b.1 {
                        return Err(Error::CacheConflict { d: a.0, left: a.1, right: b.1 });
                    }
                    i += 1;
                    j += 1;
                    a
                }
                (Some(&a), Some(&b)) if a.0 < b.0 => {
                    i += 1;
                    a
                }
                (Some(_), Some(&b)) => {
                    j += 1;
                    b
                }
                (Some(&a), None) => {
                    i += 1;
                    a
                }
                (None, Some(&b)) => {
                    j += 1;
                    b
                }
                (None, None) => unreachable!(),
            };
            entries.push(next);
        }
        let mut coverage = self.coverage.clone();
        coverage.extend_from_slice(&other.coverage);
        RankTable::new(entries, coverage)
    }
}

fn manifest_path(csv_path: &Path) -> PathBuf {
    let mut name = csv_path.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    csv_path.with_file_name(name)
}

/// Parse and fully validate a cache file (CSV + sidecar manifest).
pub fn cache_load(path: &Path) -> Result<RankTable> {
    let csv = std::fs::read_to_string(path)?;
    let manifest: Manifest = serde_json::from_str(&std::fs::read_to_string(manifest_path(path))?)?;
    if manifest.format != FORMAT_VERSION {
        return Err(Error::MalformedCache(format!(
            "unsupported format {} (expected {FORMAT_VERSION})",
            manifest.format
        )));
    }
    let table = RankTable::from_csv_str(&csv, manifest.intervals)?;
    table.validate_complete()?;
    Ok(table)
}

/// Write the canonical CSV and its manifest.
pub fn cache_store(table: &RankTable, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, table.to_csv_string())?;
    let manifest = Manifest {
        intervals: table.coverage.clone(),
        format: FORMAT_VERSION,
    };
    let mut json = serde_json::to_string(&manifest)?;
    json.push('\n');
    std::fs::write(manifest_path(path), json)?;
    Ok(())
}

/// Alias for [`RankTable::merge`] matching the cache vocabulary.
pub fn cache_merge(a: &RankTable, b: &RankTable) -> Result<RankTable> {
    a.merge(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_table() -> RankTable {
        RankTable::new(
            vec![
                (-24, 0),
                (-23, 1),
                (-20, 0),
                (-19, 0),
                (-15, 0),
                (-11, 0),
                (-8, 0),
                (-7, 0),
                (-4, 0),
                (-3, 0),
            ],
            vec![(-25, -1)],
        )
        .unwrap()
    }

    #[test]
    fn roundtrip_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("ranks.csv");
        let t = small_table();
        cache_store(&t, &p).unwrap();
        let bytes = std::fs::read(&p).unwrap();
        let loaded = cache_load(&p).unwrap();
        assert_eq!(loaded, t);
        cache_store(&loaded, &p).unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), bytes);
    }

    #[test]
    fn csv_shape_is_pinned() {
        let t = RankTable::new(vec![(-23, 1), (5, 0)], vec![(-23, -23), (5, 5)]).unwrap();
        assert_eq!(t.to_csv_string(), "D,r3\n-23,1\n5,0\n");
    }

    #[test]
    fn merge_disjoint_and_conflicting() {
        let neg = RankTable::new(vec![(-23, 1), (-20, 0)], vec![(-23, -20)]).unwrap();
        let pos = RankTable::new(vec![(5, 0), (8, 0)], vec![(5, 8)]).unwrap();
        let merged = cache_merge(&neg, &pos).unwrap();
        assert_eq!(merged.len(), 4);
        assert_eq!(merged.coverage(), &[(-23, -20), (5, 8)]);

        let bad = RankTable::new(vec![(-23, 2)], vec![(-23, -23)]).unwrap();
        assert!(matches!(
            cache_merge(&neg, &bad),
            Err(Error::CacheConflict { d: -23, .. })
        ));
    }

    #[test]
    fn merge_unions_adjacent_coverage() {
        let a = RankTable::new(vec![(-8, 0), (-7, 0), (-4, 0), (-3, 0)], vec![(-1000, 0)]).unwrap();
        let b = RankTable::new(vec![(5, 0), (8, 0)], vec![(1, 1000)]).unwrap();
        let m = a.merge(&b).unwrap();
        assert_eq!(m.coverage(), &[(-1000, 1000)]);
    }

    #[test]
    fn completeness_is_enforced_on_load() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("ranks.csv");
        std::fs::write(&p, "D,r3\n-23,1\n").unwrap();
        std::fs::write(
            manifest_path(&p),
            r#"{"intervals":[[-25,-1]],"format":1}"#,
        )
        .unwrap();
        // -24, -20, ... are fundamental but missing
        assert!(cache_load(&p).is_err());
    }

    #[test]
    fn lookup_and_gaps() {
        let t = small_table();
        assert_eq!(t.lookup(-23), Some(1));
        assert_eq!(t.lookup(5), None); // outside coverage
        assert!(matches!(t.rank_of(-100), Err(Error::CoverageGap(-100))));
        assert!(matches!(t.rank_of(-9), Err(Error::NotFundamental(-9))));
        assert!(t.covers_interval(-25, -1));
        assert!(!t.covers_interval(-25, 0));
    }
}
