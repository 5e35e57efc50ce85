//! Exact character and eigenspace data for Prym families of abelian covers
//! of the projective line, with certificates of non-specialness.
//!
//! An abelian cover branched over `s` points is described by an `m x s`
//! matrix over `Z/N` whose columns are the local monodromies. Together with
//! an involution `sigma` of the Galois group it defines a family of Prym
//! varieties. This crate computes the genus, the eigenspace dimensions of
//! every character, the split into `sigma`-even and `sigma`-odd parts, and a
//! lower bound for the dimension of the smallest special subvariety
//! containing the family. It also enumerates all such data up to symmetry.
//!
//! ```
//! use prymscope::{analyze, AnalysisOptions, CoverMatrix, ResidueVector};
//!
//! let a = CoverMatrix::from_rows(4, &[vec![1, 1, 1, 3, 3, 3]]).unwrap();
//! let sigma = ResidueVector::new(4, vec![2]).unwrap();
//! let report = analyze(a, &sigma, AnalysisOptions::default()).unwrap();
//! assert_eq!(report.decomposition.prym_dim, 4);
//! assert_eq!(report.certificate.bound_unitary, 4);
//! ```

pub mod analysis;
pub mod canonical;
pub mod catalog;
pub mod certify;
pub mod cli;
pub mod cover;
pub mod error;
pub mod prym;
pub mod residue;
pub mod search;
pub mod verify;

pub use analysis::{analyze, Analysis, AnalysisOptions};
pub use canonical::{canonical_key, CanonicalKey, SymmetryLevel};
pub use catalog::CatalogRecord;
pub use certify::{BoundMode, Certificate, Verdict};
pub use cover::{CoverData, CoverMatrix};
pub use error::{Error, Result};
pub use prym::{PrymDatum, PrymDecomposition, Ramification};
pub use residue::{ResidueVector, Subgroup};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    struct Readme;
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/covers.md")]
    struct Covers;
    #[doc = include_str!("../../../book/src/prym.md")]
    struct Prym;
    #[doc = include_str!("../../../book/src/certificates.md")]
    struct Certificates;
    #[doc = include_str!("../../../book/src/enumeration.md")]
    struct Enumeration;
    #[doc = include_str!("../../../book/src/catalog.md")]
    struct Catalog;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}
