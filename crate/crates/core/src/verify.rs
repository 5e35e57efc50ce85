//! Sweeps that check the non-specialness results against the certifier on
//! every datum in a range, plus a randomized identity suite.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{analyze_cover, AnalysisOptions};
use crate::canonical::{canonical_form, transform, SquareMatrix};
use crate::catalog::CatalogRecord;
use crate::certify::{BoundMode, Verdict};
use crate::cover::{eigen_dim, genus, CoverData, CoverMatrix};
use crate::error::Result;
use crate::residue::{units, ResidueVector};
use crate::search::{records, run_search, SearchSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Trichotomy,
    CyclicSums,
    AbelianThm,
    Invariants,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Trichotomy, Suite::CyclicSums, Suite::AbelianThm, Suite::Invariants];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Trichotomy => "trichotomy",
            Suite::CyclicSums => "cyclic-sums",
            Suite::AbelianThm => "abelian-thm",
            Suite::Invariants => "invariants",
        }
    }
}

/// The ranges swept by each suite.
#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub samples: usize,
    pub seed: u64,
    pub workers: usize,
    /// `(N, m)` pairs swept by the trichotomy suite, over `trichotomy_cols`.
    pub trichotomy_groups: Vec<(u32, usize)>,
    pub trichotomy_cols: (usize, usize),
    /// Moduli swept by the cyclic-sums suite; data whose group is all of
    /// `Z/N` are checked.
    pub cyclic_sums_moduli: Vec<u32>,
    pub cyclic_sums_cols: (usize, usize),
    /// `(N, m)` pairs swept by the abelian suite, over `abelian_cols`.
    pub abelian_groups: Vec<(u32, usize)>,
    pub abelian_cols: (usize, usize),
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            samples: 10_000,
            seed: 42,
            workers: 1,
            trichotomy_groups: [2, 4, 6, 8, 10, 12].iter().map(|&n| (n, 1)).collect(),
            trichotomy_cols: (4, 9),
            cyclic_sums_moduli: vec![4, 6, 8, 10, 12],
            cyclic_sums_cols: (6, 9),
            abelian_groups: vec![(4, 1), (6, 1), (8, 1), (10, 1), (12, 1), (2, 2), (2, 3)],
            abelian_cols: (14, 16),
        }
    }
}

/// Counts and failures of one suite.
#[derive(Clone, Debug, Default)]
pub struct SuiteReport {
    pub name: &'static str,
    pub swept: usize,
    pub applicable: usize,
    /// Verdicts among the applicable instances.
    pub verdicts: BTreeMap<&'static str, usize>,
    /// Suite-specific tallies.
    pub tallies: BTreeMap<String, usize>,
    pub failures: usize,
    /// The first few offending items.
    pub examples: Vec<String>,
    pub notes: Vec<String>,
}

const MAX_EXAMPLES: usize = 20;

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        SuiteReport { name, ..Default::default() }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn fail(&mut self, what: impl Into<String>) {
        self.failures += 1;
        if self.examples.len() < MAX_EXAMPLES {
            self.examples.push(what.into());
        }
    }

    fn tally(&mut self, key: impl Into<String>) {
        *self.tallies.entry(key.into()).or_default() += 1;
    }

    fn applicable_record(&mut self, r: &CatalogRecord) {
        self.applicable += 1;
        *self.verdicts.entry(verdict_name(r.verdict)).or_default() += 1;
        if r.verdict != Verdict::NotSpecial {
            self.fail(r.to_line());
        }
    }

    fn checked(&mut self, r: &CatalogRecord) {
        if let Err(e) = r.check(BoundMode::UnitaryOnly) {
            self.fail(e.to_string());
        }
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::NotSpecial => "NOT_SPECIAL",
        Verdict::Inconclusive => "INCONCLUSIVE",
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "suite {}: swept {}, applicable {}", self.name, self.swept, self.applicable)?;
        for (v, n) in &self.verdicts {
            write!(f, ", {v} {n}")?;
        }
        writeln!(f, ": {}", if self.passed() { "PASS" } else { "FAIL" })?;
        for (k, n) in &self.tallies {
            writeln!(f, "  {k}: {n}")?;
        }
        for note in &self.notes {
            writeln!(f, "  note: {note}")?;
        }
        if self.failures > 0 {
            writeln!(f, "  {} failed assertions", self.failures)?;
        }
        for e in &self.examples {
            writeln!(f, "  offending: {e}")?;
        }
        Ok(())
    }
}

pub fn run_suite(suite: Suite, config: &VerifyConfig) -> Result<SuiteReport> {
    match suite {
        Suite::Trichotomy => trichotomy(config),
        Suite::CyclicSums => cyclic_sums(config),
        Suite::AbelianThm => abelian(config),
        Suite::Invariants => invariants(config),
    }
}

fn sweep(config: &VerifyConfig, n: u32, m: usize, cols: (usize, usize)) -> Result<Vec<CatalogRecord>> {
    let spec = SearchSpec { workers: config.workers, ..SearchSpec::new(n, m, cols.0, cols.1) };
    Ok(records(&run_search(&spec)?).cloned().collect())
}

/// Every datum classified as `ExpectNotSpecial` must be certified.
fn trichotomy(config: &VerifyConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("trichotomy");
    for &(n, m) in &config.trichotomy_groups {
        for r in sweep(config, n, m, config.trichotomy_cols)? {
            report.swept += 1;
            report.checked(&r);
            if r.prop_trichotomy == "NOT_APPLICABLE" {
                continue;
            }
            report.tally(format!("{} {}", r.prop_trichotomy, verdict_name(r.verdict)));
            if r.prop_trichotomy == "EXPECT_NOT_SPECIAL" {
                report.applicable_record(&r);
            }
        }
    }
    Ok(report)
}

/// Every cyclic datum meeting both sum conditions with `s > 5` must be
/// certified.
fn cyclic_sums(config: &VerifyConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("cyclic-sums");
    let mut smaller = 0;
    for &n in &config.cyclic_sums_moduli {
        for r in sweep(config, n, 1, config.cyclic_sums_cols)? {
            report.checked(&r);
            if r.group_order != n as usize {
                smaller += 1;
                continue;
            }
            report.swept += 1;
            if r.prop_sums_applicable {
                report.applicable_record(&r);
            }
        }
    }
    report.notes.push(format!(
        "{smaller} data whose group is a proper subgroup of Z/N were skipped; they are swept at their own group order"
    ));
    Ok(report)
}

/// Every datum with two distinct qualifying minus types and `s > 13` must
/// be certified.
fn abelian(config: &VerifyConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("abelian-thm");
    for &(n, m) in &config.abelian_groups {
        if config.abelian_cols.1 < 14 {
            continue;
        }
        let cols = (config.abelian_cols.0.max(14), config.abelian_cols.1);
        for r in sweep(config, n, m, cols)? {
            report.swept += 1;
            report.checked(&r);
            if r.thm_abelian_applicable {
                report.applicable_record(&r);
            }
        }
    }
    if report.applicable == 0 {
        report.notes.push(format!("vacuous: none of the {} swept data meet the hypotheses", report.swept));
    }
    Ok(report)
}

/// A random valid matrix with `N^m <= 4096`, so the character table stays
/// small.
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R) -> CoverMatrix {
    loop {
        let n = rng.gen_range(2..=16u32);
        let rows: Vec<usize> = (1..=4).filter(|&m| n.pow(m as u32) <= 4096).collect();
        let m = *rows.choose(rng).expect("one row always fits");
        let s = rng.gen_range(4..=16usize);
        let mut entries: Vec<Vec<u32>> = (0..m).map(|_| (0..s - 1).map(|_| rng.gen_range(0..n)).collect()).collect();
        for row in &mut entries {
            let sum: u32 = row.iter().sum();
            row.push((n - sum % n) % n);
        }
        if let Ok(a) = CoverMatrix::from_rows(n, &entries) {
            return a;
        }
    }
}

fn invariant_view(r: &CatalogRecord) -> CatalogRecord {
    CatalogRecord { matrix: Vec::new(), sigma: Vec::new(), canonical_key: String::new(), ..r.clone() }
}

/// Identities on random matrices, and invariance of every certificate
/// under `A -> u U A P`, `sigma -> u U sigma`.
fn invariants(config: &VerifyConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("invariants");
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let options = AnalysisOptions::default();
    for _ in 0..config.samples {
        let a = random_matrix(&mut rng);
        report.swept += 1;
        let cover = Arc::new(CoverData::new(a.clone())?);
        let s = a.cols() as u64;

        let by_formula = genus(&a)?;
        let mut by_dims = 0u64;
        for c in cover.characters() {
            let d = eigen_dim(&c.alpha)?;
            by_dims += d as u64;
            if !c.is_trivial() {
                let dual = eigen_dim(&c.alpha.neg())? as u64;
                if d as u64 + dual + c.zeros as u64 + 2 != s {
                    report.fail(format!("duality fails for {} in {a}", c.alpha));
                }
            }
        }
        if cover.characters().len() != cover.degree() || by_dims != by_formula {
            report.fail(format!("dimension sum {by_dims} vs genus {by_formula} for {a}"));
        }

        let n = a.modulus();
        let mut u = SquareMatrix::random_invertible(n, a.rows(), &mut rng);
        let unit = *units(n).choose(&mut rng).expect("1 is a unit");
        for e in &mut u.entries {
            *e = ((*e as u64 * unit as u64) % n as u64) as u32;
        }
        let mut perm: Vec<usize> = (0..a.cols()).collect();
        perm.shuffle(&mut rng);
        let b = transform(&a, &u, &perm);
        let moved = Arc::new(CoverData::new(b.clone())?);
        if moved.genus() != cover.genus() || moved.degree() != cover.degree() {
            report.fail(format!("genus or degree changes from {a} to {b}"));
        }
        let check_keys = cover.degree() <= 64;
        let keys = check_keys.then(|| (canonical_form(&cover).key(), canonical_form(&moved).key()));
        if let Some((x, y)) = &keys {
            if x != y {
                report.fail(format!("canonical keys differ for {a} and {b}"));
            }
        }
        let key = keys.map(|k| k.0).unwrap_or_else(|| crate::canonical::matrix_key(&a));

        for sigma in cover.group().involutions() {
            report.applicable += 1;
            let before = CatalogRecord::from_analysis(&analyze_cover(cover.clone(), &sigma, options, key.clone())?);
            let image: ResidueVector = u.apply(&sigma);
            let after = CatalogRecord::from_analysis(&analyze_cover(moved.clone(), &image, options, key.clone())?);
            report.checked(&before);
            if 2 * before.quotient_genus + before.fixed_points / 2 != before.genus + 1 {
                report.fail(format!("double cover genus identity fails: {}", before.to_line()));
            }
            let minus: usize = before.minus_types.iter().map(|t| if t.self_dual { 1 } else { 2 } * t.multiplicity).sum();
            if 2 * minus != cover.degree() {
                report.fail(format!("minus count fails: {}", before.to_line()));
            }
            if invariant_view(&before) != invariant_view(&after) {
                report.fail(format!("certificate changes: {} vs {}", before.to_line(), after.to_line()));
            }
            *report.verdicts.entry(verdict_name(before.verdict)).or_default() += 1;
        }
    }
    report.notes.push(format!("seed {}, {} matrices, one random transformation each", config.seed, config.samples));
    Ok(report)
}
