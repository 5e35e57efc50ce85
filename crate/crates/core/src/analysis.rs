//! The full pipeline for a single Prym datum.

use std::sync::Arc;

use crate::canonical::{canonical_key, CanonicalKey, SymmetryLevel};
use crate::certify::{
    check_prop_cyclic_sums, check_prop_cyclic_trichotomy, check_thm_abelian, lower_bound, AbelianCheck, BoundMode,
    Certificate, CyclicSumsCheck, TrichotomyCheck,
};
use crate::cover::{CoverData, CoverMatrix};
use crate::error::Result;
use crate::prym::{decompose, validate_datum, PrymDecomposition};
use crate::residue::ResidueVector;

/// Everything computed for one `(A, sigma)`.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub cover: Arc<CoverData>,
    pub decomposition: PrymDecomposition,
    pub certificate: Certificate,
    pub trichotomy: TrichotomyCheck,
    pub cyclic_sums: CyclicSumsCheck,
    pub abelian: AbelianCheck,
    pub key: CanonicalKey,
}

/// Options shared by every datum of a run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AnalysisOptions {
    pub strict_etale: bool,
    pub mode: BoundMode,
    pub symmetry: SymmetryLevel,
}

/// Validates and analyzes `(matrix, sigma)`.
///
/// ```
/// use prymscope::{analyze, AnalysisOptions, CoverMatrix, ResidueVector, Verdict};
///
/// let a = CoverMatrix::from_rows(4, &[vec![1, 1, 1, 3, 3, 3]]).unwrap();
/// let sigma = ResidueVector::new(4, vec![2]).unwrap();
/// let report = analyze(a, &sigma, AnalysisOptions::default()).unwrap();
/// assert_eq!(report.cover.genus(), 6);
/// assert_eq!(report.certificate.verdict, Verdict::NotSpecial);
/// ```
pub fn analyze(matrix: CoverMatrix, sigma: &ResidueVector, options: AnalysisOptions) -> Result<Analysis> {
    let cover = CoverData::new(matrix)?;
    let key = canonical_key(&cover, options.symmetry);
    analyze_cover(Arc::new(cover), sigma, options, key)
}

/// As [`analyze`], for a cover whose character table and key are at hand.
pub fn analyze_cover(
    cover: Arc<CoverData>,
    sigma: &ResidueVector,
    options: AnalysisOptions,
    key: CanonicalKey,
) -> Result<Analysis> {
    let datum = validate_datum(&cover, sigma, options.strict_etale)?;
    let decomposition = decompose(&cover, &datum)?;
    let certificate = lower_bound(&decomposition, options.mode);
    let trichotomy = check_prop_cyclic_trichotomy(&cover, &decomposition);
    let cyclic_sums = check_prop_cyclic_sums(&cover, &decomposition.datum);
    let abelian = check_thm_abelian(&decomposition);
    Ok(Analysis { cover, decomposition, certificate, trichotomy, cyclic_sums, abelian, key })
}
