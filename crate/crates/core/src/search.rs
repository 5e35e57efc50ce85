//! Exhaustive enumeration of Prym data up to symmetry.
//!
//! A candidate is a multiset of `s` nonzero columns in `(Z/N)^m` summing to
//! zero, generated as a non-decreasing sequence of column codes; the column
//! code is the mixed-radix value of the column with the first row most
//! significant, so code order is lexicographic column order. The last column
//! is forced by the zero-sum condition. At the FULL level a candidate is kept
//! iff it equals its canonical form, which yields one matrix per orbit.
//!
//! Work is cut into shards `(s, code of the first column)`; shards are
//! independent and run on a thread pool feeding a single consumer.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{mpsc, Arc};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{analyze_cover, AnalysisOptions};
use crate::canonical::{canonical_form, canonical_single_row, fingerprint, matrix_key, CanonicalKey, SymmetryLevel};
use crate::catalog::CatalogRecord;
use crate::certify::BoundMode;
use crate::cover::{CoverData, CoverMatrix};
use crate::error::{Error, Result};
use crate::prym::validate_datum;
use crate::residue::ResidueVector;

pub const MAX_MODULUS: u32 = 16;
pub const MAX_ROWS: usize = 4;
pub const MIN_COLS: usize = 4;
pub const MAX_COLS: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchSpec {
    pub modulus: u32,
    pub rows: usize,
    pub cols_min: usize,
    pub cols_max: usize,
    pub strict_etale: bool,
    pub mode: BoundMode,
    pub workers: usize,
    pub symmetry: SymmetryLevel,
}

impl SearchSpec {
    /// Lax, unitary-only, FULL symmetry, one worker.
    pub fn new(modulus: u32, rows: usize, cols_min: usize, cols_max: usize) -> Self {
        SearchSpec {
            modulus,
            rows,
            cols_min,
            cols_max,
            strict_etale: false,
            mode: BoundMode::UnitaryOnly,
            workers: 1,
            symmetry: SymmetryLevel::Full,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=MAX_MODULUS).contains(&self.modulus) {
            return Err(Error::SpecOutOfRange(format!("modulus {} not in [2, {MAX_MODULUS}]", self.modulus)));
        }
        if !(1..=MAX_ROWS).contains(&self.rows) {
            return Err(Error::SpecOutOfRange(format!("rows {} not in [1, {MAX_ROWS}]", self.rows)));
        }
        if self.cols_min < MIN_COLS || self.cols_max > MAX_COLS || self.cols_min > self.cols_max {
            return Err(Error::SpecOutOfRange(format!(
                "columns [{}, {}] not within [{MIN_COLS}, {MAX_COLS}]",
                self.cols_min, self.cols_max
            )));
        }
        if self.workers == 0 {
            return Err(Error::SpecOutOfRange("at least one worker is required".into()));
        }
        Ok(())
    }

    pub fn options(&self) -> AnalysisOptions {
        AnalysisOptions { strict_etale: self.strict_etale, mode: self.mode, symmetry: self.symmetry }
    }

    fn codes(&self) -> u32 {
        self.modulus.pow(self.rows as u32)
    }
}

/// All candidates with `cols` columns whose smallest column has code `first`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Shard {
    pub cols: usize,
    pub first: u32,
}

impl Shard {
    /// Stable file-name stem.
    pub fn name(&self) -> String {
        format!("s{:02}-c{:05}", self.cols, self.first)
    }
}

pub fn shards(spec: &SearchSpec) -> Vec<Shard> {
    (spec.cols_min..=spec.cols_max)
        .flat_map(|cols| (1..spec.codes()).map(move |first| Shard { cols, first }))
        .collect()
}

/// One orbit representative and its records.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverEntry {
    pub key: String,
    pub matrix: Vec<u32>,
    pub records: Vec<CatalogRecord>,
}

/// Involutions of the Galois group, ascending; with `strict_etale`, only
/// those outside every inertia group.
pub fn enumerate_sigmas(cover: &CoverData, strict_etale: bool) -> Vec<ResidueVector> {
    cover
        .group()
        .involutions()
        .into_iter()
        .filter(|s| !strict_etale || validate_datum(cover, s, true).is_ok())
        .collect()
}

struct Candidates {
    modulus: u32,
    rows: usize,
    cols: usize,
    digits: Vec<Vec<u32>>,
}

impl Candidates {
    fn new(modulus: u32, rows: usize, cols: usize) -> Self {
        let total = modulus.pow(rows as u32);
        let digits = (0..total)
            .map(|code| {
                let mut d = vec![0; rows];
                let mut c = code;
                for slot in d.iter_mut().rev() {
                    *slot = c % modulus;
                    c /= modulus;
                }
                d
            })
            .collect();
        Candidates { modulus, rows, cols, digits }
    }

    fn code_of(&self, column: &[u32]) -> u32 {
        column.iter().fold(0, |acc, &e| acc * self.modulus + e)
    }

    fn for_each(&self, first: u32, f: &mut dyn FnMut(&[u32]) -> Result<()>) -> Result<()> {
        let mut codes = Vec::with_capacity(self.cols);
        let mut sums = vec![0u32; self.rows];
        self.extend(first, &mut codes, &mut sums, f)
    }

    fn extend(&self, first: u32, codes: &mut Vec<u32>, sums: &mut [u32], f: &mut dyn FnMut(&[u32]) -> Result<()>) -> Result<()> {
        let n = self.modulus;
        if codes.len() == self.cols - 1 {
            let last: Vec<u32> = sums.iter().map(|&x| (n - x) % n).collect();
            let code = self.code_of(&last);
            if code != 0 && code >= *codes.last().expect("at least three columns precede") {
                codes.push(code);
                f(codes)?;
                codes.pop();
            }
            return Ok(());
        }
        let (lo, hi) = match codes.last() {
            None => (first, first),
            Some(&prev) => (prev, self.digits.len() as u32 - 1),
        };
        for code in lo..=hi {
            for (s, &d) in sums.iter_mut().zip(&self.digits[code as usize]) {
                *s = (*s + d) % n;
            }
            codes.push(code);
            self.extend(first, codes, sums, f)?;
            codes.pop();
            for (s, &d) in sums.iter_mut().zip(&self.digits[code as usize]) {
                *s = (*s + n - d) % n;
            }
        }
        Ok(())
    }

    fn matrix(&self, codes: &[u32]) -> CoverMatrix {
        let s = self.cols;
        let mut entries = vec![0; self.rows * s];
        for (j, &c) in codes.iter().enumerate() {
            for (i, &d) in self.digits[c as usize].iter().enumerate() {
                entries[i * s + j] = d;
            }
        }
        CoverMatrix::new(self.modulus, self.rows, s, entries).expect("candidates are valid")
    }
}

/// Orbit representatives of one shard, with their records when
/// `with_records` is set.
pub fn process_shard(spec: &SearchSpec, shard: Shard, with_records: bool) -> Result<Vec<CoverEntry>> {
    let candidates = Candidates::new(spec.modulus, spec.rows, shard.cols);
    let options = spec.options();
    let mut out = Vec::new();
    let mut by_fingerprint: BTreeMap<CanonicalKey, CoverData> = BTreeMap::new();
    candidates.for_each(shard.first, &mut |codes| {
        let matrix = candidates.matrix(codes);
        match spec.symmetry {
            SymmetryLevel::Full if spec.rows == 1 => {
                if canonical_single_row(&matrix) != matrix {
                    return Ok(());
                }
                let cover = CoverData::new(matrix)?;
                let sigmas = if with_records { enumerate_sigmas(&cover, spec.strict_etale) } else { Vec::new() };
                out.push(entry(cover, matrix_key, &sigmas, options)?);
            }
            SymmetryLevel::Full => {
                let cover = CoverData::new(matrix)?;
                let form = canonical_form(&cover);
                if &form.matrix != cover.matrix() {
                    return Ok(());
                }
                let sigmas: Vec<ResidueVector> = if with_records {
                    enumerate_sigmas(&cover, spec.strict_etale)
                        .into_iter()
                        .filter(|s| &form.canonical_sigma(s) == s)
                        .collect()
                } else {
                    Vec::new()
                };
                out.push(entry(cover, matrix_key, &sigmas, options)?);
            }
            SymmetryLevel::InvariantHash => {
                let cover = CoverData::new(matrix)?;
                let key = fingerprint(&cover);
                match by_fingerprint.get(&key) {
                    Some(kept) if kept.matrix().entries() <= cover.matrix().entries() => {}
                    _ => {
                        by_fingerprint.insert(key, cover);
                    }
                }
            }
        }
        Ok(())
    })?;
    for (_, cover) in by_fingerprint {
        let sigmas = if with_records { enumerate_sigmas(&cover, spec.strict_etale) } else { Vec::new() };
        out.push(entry(cover, |c| fingerprint_of(c), &sigmas, options)?);
    }
    Ok(out)
}

fn fingerprint_of(matrix: &CoverMatrix) -> CanonicalKey {
    fingerprint(&CoverData::new(matrix.clone()).expect("representatives are valid"))
}

fn entry(
    cover: CoverData,
    key_of: impl Fn(&CoverMatrix) -> CanonicalKey,
    sigmas: &[ResidueVector],
    options: AnalysisOptions,
) -> Result<CoverEntry> {
    let key = key_of(cover.matrix());
    let cover = Arc::new(cover);
    let records = sigmas
        .iter()
        .map(|s| analyze_cover(cover.clone(), s, options, key.clone()).map(|a| CatalogRecord::from_analysis(&a)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CoverEntry { key: key.to_hex(), matrix: cover.matrix().entries().to_vec(), records })
}

/// Runs `shards` on `spec.workers` threads, handing each finished shard to
/// `consumer` on the calling thread. Stops early on the first error.
pub fn run_shards<F>(spec: &SearchSpec, shards: &[Shard], with_records: bool, mut consumer: F) -> Result<()>
where
    F: FnMut(Shard, Vec<CoverEntry>) -> Result<()>,
{
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers)
        .build()
        .map_err(|e| Error::internal("INTERNAL_THREAD_POOL", e.to_string()))?;
    let cancel = AtomicBool::new(false);
    let (tx, rx) = mpsc::channel();
    let mut failure = None;
    std::thread::scope(|scope| {
        let cancel = &cancel;
        let pool = &pool;
        scope.spawn(move || {
            pool.install(|| {
                shards.par_iter().for_each_with(tx, |tx, &shard| {
                    if cancel.load(Ordering::Relaxed) {
                        return;
                    }
                    let result = process_shard(spec, shard, with_records);
                    if result.is_err() {
                        cancel.store(true, Ordering::Relaxed);
                    }
                    let _ = tx.send((shard, result));
                });
            });
        });
        for (shard, result) in rx {
            if failure.is_some() {
                continue;
            }
            if let Err(e) = result.and_then(|entries| consumer(shard, entries)) {
                cancel.store(true, Ordering::Relaxed);
                failure = Some(e);
            }
        }
    });
    failure.map_or(Ok(()), Err)
}

/// Merges shard outputs into the final, sorted list of representatives.
/// At the hash level, colliding fingerprints keep the least matrix.
pub fn merge(mut entries: Vec<CoverEntry>) -> Vec<CoverEntry> {
    entries.sort_by(|x, y| (&x.key, &x.matrix).cmp(&(&y.key, &y.matrix)));
    entries.dedup_by(|later, first| later.key == first.key);
    for e in &mut entries {
        e.records.sort_by(|x, y| x.sigma.cmp(&y.sigma));
    }
    entries
}

/// Every representative of the search space with its records, sorted by key.
///
/// ```
/// use prymscope::search::{run_search, SearchSpec};
///
/// let entries = run_search(&SearchSpec::new(4, 1, 6, 6)).unwrap();
/// let wanted = [1, 1, 1, 3, 3, 3];
/// assert!(entries.iter().any(|e| e.matrix == wanted && e.records.len() == 1));
/// ```
pub fn run_search(spec: &SearchSpec) -> Result<Vec<CoverEntry>> {
    collect(spec, true)
}

/// One matrix per orbit, sorted by canonical key.
pub fn enumerate_covers(spec: &SearchSpec) -> Result<Vec<CoverMatrix>> {
    collect(spec, false)?
        .into_iter()
        .map(|e| {
            let s = e.matrix.len() / spec.rows;
            CoverMatrix::new(spec.modulus, spec.rows, s, e.matrix)
        })
        .collect()
}

fn collect(spec: &SearchSpec, with_records: bool) -> Result<Vec<CoverEntry>> {
    let mut all = Vec::new();
    run_shards(spec, &shards(spec), with_records, |_, entries| {
        all.extend(entries);
        Ok(())
    })?;
    Ok(merge(all))
}

/// Records of a merged search, in catalog order.
pub fn records(entries: &[CoverEntry]) -> impl Iterator<Item = &CatalogRecord> {
    entries.iter().flat_map(|e| e.records.iter())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prym::Ramification;
    use std::collections::BTreeSet;

    #[test]
    fn caps_are_enforced() {
        let base = SearchSpec::new(4, 1, 6, 6);
        for bad in [
            SearchSpec { modulus: 17, ..base.clone() },
            SearchSpec { modulus: 1, ..base.clone() },
            SearchSpec { rows: 5, ..base.clone() },
            SearchSpec { rows: 0, ..base.clone() },
            SearchSpec { cols_min: 3, ..base.clone() },
            SearchSpec { cols_max: 17, ..base.clone() },
            SearchSpec { cols_min: 7, ..base.clone() },
        ] {
            assert_eq!(enumerate_covers(&bad).unwrap_err().code(), "SPEC_OUT_OF_RANGE");
        }
    }

    #[test]
    fn small_cover_counts() {
        assert_eq!(enumerate_covers(&SearchSpec::new(2, 1, 4, 4)).unwrap().len(), 1);
        let z3 = enumerate_covers(&SearchSpec::new(3, 1, 4, 4)).unwrap();
        assert_eq!(z3.len(), 1);
        assert_eq!(z3[0].entries(), &[1, 1, 2, 2]);
        assert!(enumerate_covers(&SearchSpec::new(2, 1, 5, 5)).unwrap().is_empty());
    }

    #[test]
    fn candidates_cover_every_sorted_multiset() {
        let c = Candidates::new(3, 2, 4);
        let mut seen = BTreeSet::new();
        for first in 1..9 {
            c.for_each(first, &mut |codes| {
                assert!(codes.windows(2).all(|w| w[0] <= w[1]));
                assert!(seen.insert(codes.to_vec()));
                Ok(())
            })
            .unwrap();
        }
        // brute force over all sorted 4-tuples of nonzero codes summing to zero
        let mut expected = 0;
        for a in 1..9u32 {
            for b in a..9 {
                for x in b..9 {
                    for y in x..9 {
                        let ok = (0..2).all(|i| [a, b, x, y].iter().map(|&k| c.digits[k as usize][i]).sum::<u32>() % 3 == 0);
                        expected += ok as usize;
                    }
                }
            }
        }
        assert_eq!(seen.len(), expected);
    }

    #[test]
    fn sigma_lists() {
        let cover = CoverData::new(CoverMatrix::from_rows(4, &[vec![1, 1, 1, 3, 3, 3]]).unwrap()).unwrap();
        assert_eq!(enumerate_sigmas(&cover, false), vec![ResidueVector::new(4, vec![2]).unwrap()]);
        assert!(enumerate_sigmas(&cover, true).is_empty());
        let (x, y, z) = (vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 1]);
        let m = CoverMatrix::from_columns(2, &[x.clone(), x, y.clone(), y, z.clone(), z]).unwrap();
        let strict = enumerate_sigmas(&CoverData::new(m).unwrap(), true);
        assert_eq!(strict.len(), 4);
        let z7 = CoverData::new(CoverMatrix::from_rows(7, &[vec![1; 7]]).unwrap()).unwrap();
        assert!(enumerate_sigmas(&z7, false).is_empty());
    }

    #[test]
    fn worked_search_records() {
        let entries = run_search(&SearchSpec::new(4, 1, 6, 6)).unwrap();
        let record = records(&entries).find(|r| r.matrix == [1, 1, 1, 3, 3, 3]).expect("present");
        assert_eq!(record.verdict, crate::certify::Verdict::NotSpecial);

        let z2 = run_search(&SearchSpec::new(2, 1, 4, 4)).unwrap();
        assert_eq!(z2.len(), 1);
        let lax: Vec<_> = records(&z2).collect();
        assert_eq!(lax.len(), 1);
        assert_eq!(lax[0].fixed_points, 4);
        assert_eq!(lax[0].ramification, Ramification::RamifiedOther);
        let strict = run_search(&SearchSpec { strict_etale: true, ..SearchSpec::new(2, 1, 4, 4) }).unwrap();
        assert_eq!(records(&strict).count(), 0);

        assert_eq!(records(&run_search(&SearchSpec::new(7, 1, 4, 8)).unwrap()).count(), 0);
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let spec = SearchSpec::new(2, 3, 4, 7);
        let one = run_search(&spec).unwrap();
        let many = run_search(&SearchSpec { workers: 4, ..spec }).unwrap();
        assert_eq!(one, many);
    }

    #[test]
    fn sigma_orbits_are_reduced() {
        let (x, y, z) = (vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 1]);
        let m = CoverMatrix::from_columns(2, &[x.clone(), x, y.clone(), y, z.clone(), z]).unwrap();
        let cover = CoverData::new(m).unwrap();
        let canonical = canonical_form(&cover).matrix;
        let entries = run_search(&SearchSpec { strict_etale: true, ..SearchSpec::new(2, 3, 6, 6) }).unwrap();
        let e = entries.iter().find(|e| e.matrix == canonical.entries()).expect("orbit present");
        // four strict involutions fall into two orbits under the symmetries
        assert_eq!(e.records.len(), 2);
    }

    #[test]
    fn hash_level_is_coarser() {
        let spec = SearchSpec::new(6, 1, 4, 6);
        let full = enumerate_covers(&spec).unwrap().len();
        let hashed = enumerate_covers(&SearchSpec { symmetry: SymmetryLevel::InvariantHash, ..spec }).unwrap().len();
        assert!(hashed <= full && hashed > 0);
    }
}
