//! The catalog file: newline-delimited JSON records in a fixed key order,
//! closed by a footer carrying the run parameters, totals and a SHA-256 of
//! every data line.
//!
//! During a run with an output path, finished shards are kept under
//! `PATH.progress/`: one `NAME.jsonl` file per shard, then an empty
//! `NAME.done` marker, plus a `manifest.json` with the run parameters. A
//! resumed run skips every shard with a marker. The directory is removed
//! once the catalog is complete.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::Analysis;
use crate::canonical::SymmetryLevel;
use crate::certify::{BoundMode, Verdict};
use crate::error::{Error, Result};
use crate::prym::{EigenType, Ramification};
use crate::search::{merge, run_shards, shards, CoverEntry, SearchSpec, Shard};

pub const SCHEMA_VERSION: u32 = 1;

/// One `(A, sigma)` datum with everything computed for it. Field order is
/// the serialized key order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogRecord {
    pub schema_version: u32,
    pub modulus: u32,
    pub rows: usize,
    pub cols: usize,
    /// Row-major.
    pub matrix: Vec<u32>,
    pub sigma: Vec<u32>,
    pub group_order: usize,
    pub genus: u64,
    pub ramification: Ramification,
    pub fixed_points: u64,
    pub prym_dim: u64,
    pub quotient_genus: u64,
    pub minus_types: Vec<EigenType>,
    pub bound_unitary: u64,
    pub bound_with_symplectic: u64,
    pub family_dim: u64,
    pub verdict: Verdict,
    /// Trichotomy branch, or `NOT_APPLICABLE`.
    pub prop_trichotomy: String,
    pub prop_sums_applicable: bool,
    pub thm_abelian_applicable: bool,
    /// Lower-case hex.
    pub canonical_key: String,
}

impl CatalogRecord {
    pub fn from_analysis(a: &Analysis) -> Self {
        let m = a.cover.matrix();
        let dec = &a.decomposition;
        let cert = &a.certificate;
        CatalogRecord {
            schema_version: SCHEMA_VERSION,
            modulus: m.modulus(),
            rows: m.rows(),
            cols: m.cols(),
            matrix: m.entries().to_vec(),
            sigma: dec.datum.sigma.entries().to_vec(),
            group_order: a.cover.degree(),
            genus: a.cover.genus(),
            ramification: dec.datum.ramification,
            fixed_points: dec.datum.fixed_points,
            prym_dim: dec.prym_dim,
            quotient_genus: dec.quotient_genus,
            minus_types: dec.types.clone(),
            bound_unitary: cert.bound_unitary,
            bound_with_symplectic: cert.bound_with_symplectic,
            family_dim: cert.family_dim,
            verdict: cert.verdict,
            prop_trichotomy: a.trichotomy.branch.map_or("NOT_APPLICABLE", |b| b.as_str()).to_string(),
            prop_sums_applicable: a.cyclic_sums.applicable,
            thm_abelian_applicable: a.abelian.applicable,
            canonical_key: a.key.to_hex(),
        }
    }

    /// Checks the identities every serialized record satisfies.
    pub fn check(&self, mode: BoundMode) -> Result<()> {
        let fail = |what: &str| Err(Error::internal("INTERNAL_RECORD", format!("{what}: {}", self.to_line())));
        if self.matrix.len() != self.rows * self.cols || self.sigma.len() != self.rows {
            return fail("shape");
        }
        if self.family_dim + 3 != self.cols as u64 {
            return fail("family dimension");
        }
        if self.prym_dim + self.quotient_genus != self.genus
            || 2 * self.genus + 2 != 4 * self.quotient_genus + self.fixed_points
        {
            return fail("genus split");
        }
        let bound = match mode {
            BoundMode::UnitaryOnly => self.bound_unitary,
            BoundMode::WithSymplectic => self.bound_with_symplectic,
        };
        if (self.verdict == Verdict::NotSpecial) != (bound > self.family_dim) {
            return fail("verdict");
        }
        let pairs: usize = self.minus_types.iter().map(|t| if t.self_dual { 1 } else { 2 } * t.multiplicity).sum();
        if 2 * pairs != self.group_order {
            return fail("minus character count");
        }
        Ok(())
    }

    /// The record as one line of JSON, without the newline.
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }

    pub fn from_line(line: &str) -> Result<Self> {
        serde_json::from_str(line).map_err(|e| Error::Syntax(format!("bad record: {e}")))
    }
}

/// Parameters of an enumeration run, as stored in the manifest and footer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunParams {
    pub schema_version: u32,
    pub modulus: u32,
    pub rows: usize,
    pub cols_min: usize,
    pub cols_max: usize,
    pub strict_etale: bool,
    pub mode: BoundMode,
    pub symmetry: SymmetryLevel,
}

impl RunParams {
    pub fn of(spec: &SearchSpec) -> Self {
        RunParams {
            schema_version: SCHEMA_VERSION,
            modulus: spec.modulus,
            rows: spec.rows,
            cols_min: spec.cols_min,
            cols_max: spec.cols_max,
            strict_etale: spec.strict_etale,
            mode: spec.mode,
            symmetry: spec.symmetry,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Footer {
    #[serde(flatten)]
    pub params: RunParams,
    /// Orbit representatives, including those without any involution.
    pub covers: usize,
    pub records: usize,
    /// SHA-256 of the data lines, each with its newline.
    pub sha256: String,
}

#[derive(Serialize, Deserialize)]
struct FooterLine {
    footer: Footer,
}

/// Writes the merged entries as a catalog.
pub fn write_catalog<W: Write>(out: W, params: &RunParams, entries: &[CoverEntry]) -> Result<Footer> {
    let mut out = BufWriter::new(out);
    let mut hasher = Sha256::new();
    let mut records = 0;
    for r in entries.iter().flat_map(|e| &e.records) {
        let mut line = r.to_line();
        line.push('\n');
        hasher.update(line.as_bytes());
        out.write_all(line.as_bytes())?;
        records += 1;
    }
    let footer = Footer {
        params: params.clone(),
        covers: entries.len(),
        records,
        sha256: hex::encode(hasher.finalize()),
    };
    let line = serde_json::to_string(&FooterLine { footer: footer.clone() }).expect("footer serializes");
    out.write_all(line.as_bytes())?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(footer)
}

/// Parses a catalog and checks its footer.
pub fn read_catalog(text: &str) -> Result<(Vec<CatalogRecord>, Footer)> {
    let mut lines: Vec<&str> = text.split_inclusive('\n').collect();
    let last = lines.pop().ok_or_else(|| Error::Syntax("empty catalog".into()))?;
    let footer = serde_json::from_str::<FooterLine>(last.trim_end_matches('\n'))
        .map_err(|e| Error::Syntax(format!("bad footer: {e}")))?
        .footer;
    let mut hasher = Sha256::new();
    let mut records = Vec::with_capacity(lines.len());
    for line in lines {
        hasher.update(line.as_bytes());
        records.push(CatalogRecord::from_line(line.trim_end_matches('\n'))?);
    }
    if hex::encode(hasher.finalize()) != footer.sha256 {
        return Err(Error::Syntax("checksum does not match the data lines".into()));
    }
    if records.len() != footer.records {
        return Err(Error::Syntax(format!("footer counts {} records, found {}", footer.records, records.len())));
    }
    Ok((records, footer))
}

/// Per-shard results of an interrupted or running enumeration.
pub struct Progress {
    dir: PathBuf,
}

const MANIFEST: &str = "manifest.json";

impl Progress {
    pub fn dir_for(out: &Path) -> PathBuf {
        let mut name = out.as_os_str().to_owned();
        name.push(".progress");
        PathBuf::from(name)
    }

    /// Opens the progress directory for `out`. Without `resume` any previous
    /// state is discarded. With it, the stored parameters must match.
    pub fn open(out: &Path, params: &RunParams, resume: bool) -> Result<Self> {
        let dir = Self::dir_for(out);
        let manifest = dir.join(MANIFEST);
        if resume && manifest.exists() {
            let text = fs::read_to_string(&manifest)?;
            let stored: RunParams = serde_json::from_str(&text)
                .map_err(|e| Error::ResumeMismatch(format!("unreadable manifest: {e}")))?;
            if &stored != params {
                return Err(Error::ResumeMismatch(format!(
                    "stored run {} differs from requested {}",
                    serde_json::to_string(&stored).expect("params serialize"),
                    serde_json::to_string(params).expect("params serialize"),
                )));
            }
            return Ok(Progress { dir });
        }
        if dir.exists() {
            fs::remove_dir_all(&dir)?;
        }
        fs::create_dir_all(&dir)?;
        let tmp = dir.join("manifest.tmp");
        fs::write(&tmp, serde_json::to_string(params).expect("params serialize") + "\n")?;
        fs::rename(tmp, manifest)?;
        Ok(Progress { dir })
    }

    pub fn is_done(&self, shard: Shard) -> bool {
        self.dir.join(format!("{}.done", shard.name())).exists()
    }

    pub fn load(&self, shard: Shard) -> Result<Vec<CoverEntry>> {
        let text = fs::read_to_string(self.dir.join(format!("{}.jsonl", shard.name())))?;
        text.lines()
            .map(|l| serde_json::from_str(l).map_err(|e| Error::ResumeMismatch(format!("shard {}: {e}", shard.name()))))
            .collect()
    }

    /// Stores a finished shard; the marker is written last.
    pub fn store(&self, shard: Shard, entries: &[CoverEntry]) -> Result<()> {
        let name = shard.name();
        let tmp = self.dir.join(format!("{name}.tmp"));
        let mut w = BufWriter::new(fs::File::create(&tmp)?);
        for e in entries {
            w.write_all(serde_json::to_string(e).expect("entries serialize").as_bytes())?;
            w.write_all(b"\n")?;
        }
        w.into_inner().map_err(|e| Error::Io(e.to_string()))?.sync_all()?;
        fs::rename(&tmp, self.dir.join(format!("{name}.jsonl")))?;
        fs::File::create(self.dir.join(format!("{name}.done")))?;
        Ok(())
    }

    pub fn remove(self) -> Result<()> {
        fs::remove_dir_all(&self.dir)?;
        Ok(())
    }
}

/// How an enumeration job ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JobOutcome {
    Complete(Footer),
    /// Stopped after the shard budget; progress is kept for a resume.
    Suspended { done: usize, remaining: usize },
}

/// An enumeration run producing a catalog.
#[derive(Clone, Debug)]
pub struct Job<'a> {
    pub spec: SearchSpec,
    /// Without a path the catalog goes to `stdout` and nothing is persisted.
    pub out: Option<&'a Path>,
    pub resume: bool,
    /// Stop after this many newly computed shards.
    pub shard_budget: Option<usize>,
}

impl Job<'_> {
    pub fn run<W: Write>(&self, stdout: W) -> Result<JobOutcome> {
        self.spec.validate()?;
        let params = RunParams::of(&self.spec);
        let all = shards(&self.spec);
        let Some(out) = self.out else {
            if self.resume {
                return Err(Error::Syntax("resuming requires an output path".into()));
            }
            let entries = self.compute(&all, None)?;
            return write_catalog(stdout, &params, &merge(entries)).map(JobOutcome::Complete);
        };

        let progress = Progress::open(out, &params, self.resume)?;
        let mut entries = Vec::new();
        let mut pending = Vec::new();
        for &shard in &all {
            if progress.is_done(shard) {
                entries.extend(progress.load(shard)?);
            } else {
                pending.push(shard);
            }
        }
        let budget = self.shard_budget.unwrap_or(usize::MAX).min(pending.len());
        let remaining = pending.len() - budget;
        entries.extend(self.compute(&pending[..budget], Some(&progress))?);
        if remaining > 0 {
            return Ok(JobOutcome::Suspended { done: all.len() - remaining, remaining });
        }
        let footer = write_catalog(fs::File::create(out)?, &params, &merge(entries))?;
        progress.remove()?;
        Ok(JobOutcome::Complete(footer))
    }

    fn compute(&self, shards: &[Shard], progress: Option<&Progress>) -> Result<Vec<CoverEntry>> {
        let mut found = BTreeMap::new();
        run_shards(&self.spec, shards, true, |shard, entries| {
            if let Some(p) = progress {
                p.store(shard, &entries)?;
            }
            found.insert(shard, entries);
            Ok(())
        })?;
        Ok(found.into_values().flatten().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{analyze, AnalysisOptions};
    use crate::cover::CoverMatrix;
    use crate::residue::ResidueVector;

    fn worked() -> CatalogRecord {
        let a = CoverMatrix::from_rows(4, &[vec![1, 1, 1, 3, 3, 3]]).unwrap();
        let sigma = ResidueVector::new(4, vec![2]).unwrap();
        CatalogRecord::from_analysis(&analyze(a, &sigma, AnalysisOptions::default()).unwrap())
    }

    #[test]
    fn record_key_order_is_fixed() {
        let line = worked().to_line();
        let expected = r#"{"schema_version":1,"modulus":4,"rows":1,"cols":6,"matrix":[1,1,1,3,3,3],"sigma":[2],"group_order":4,"genus":6,"ramification":"RAMIFIED_OTHER","fixed_points":6,"prym_dim":4,"quotient_genus":2,"minus_types":[{"a":2,"b":2,"self_dual":false,"zeros":0,"multiplicity":1}],"bound_unitary":4,"bound_with_symplectic":4,"family_dim":3,"verdict":"NOT_SPECIAL","prop_trichotomy":"EXPECT_NOT_SPECIAL","prop_sums_applicable":true,"thm_abelian_applicable":false,"canonical_key":"000000040000000100000006010101030303"}"#;
        assert_eq!(line, expected);
    }

    #[test]
    fn record_round_trip_and_check() {
        let r = worked();
        assert_eq!(CatalogRecord::from_line(&r.to_line()).unwrap(), r);
        r.check(BoundMode::UnitaryOnly).unwrap();
        let mut bad = r.clone();
        bad.verdict = Verdict::Inconclusive;
        assert!(bad.check(BoundMode::UnitaryOnly).unwrap_err().is_internal());
        assert!(CatalogRecord::from_line(r#"{"schema_version":1}"#).is_err());
    }

    #[test]
    fn footer_validates_content() {
        let entries = vec![CoverEntry { key: "00".into(), matrix: worked().matrix, records: vec![worked()] }];
        let params = RunParams::of(&SearchSpec::new(4, 1, 6, 6));
        let mut buf = Vec::new();
        let footer = write_catalog(&mut buf, &params, &entries).unwrap();
        assert_eq!(footer.records, 1);
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().last().unwrap().starts_with(r#"{"footer":{"schema_version":1,"modulus":4"#));
        let (records, parsed) = read_catalog(&text).unwrap();
        assert_eq!(parsed, footer);
        assert_eq!(records, vec![worked()]);
        let tampered = text.replacen("\"genus\":6", "\"genus\":7", 1);
        assert_eq!(read_catalog(&tampered).unwrap_err().code(), "SYNTAX");
    }

    #[test]
    fn empty_catalog_has_only_a_footer() {
        let job = Job { spec: SearchSpec::new(7, 1, 4, 8), out: None, resume: false, shard_budget: None };
        let mut buf = Vec::new();
        let JobOutcome::Complete(footer) = job.run(&mut buf).unwrap() else { panic!("not suspended") };
        assert_eq!(footer.records, 0);
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1);
    }
}
