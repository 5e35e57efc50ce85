//! Lower bounds for the dimension of the smallest special subvariety
//! containing a Prym family, and instance-level checkers for the known
//! non-specialness results.
//!
//! A family over `s` branch points has dimension at most `s - 3`. Each
//! nontrivial minus eigenspace of type `{a, b}` contributes a simple factor
//! `PSU(a, b)` to the adjoint monodromy group, of symmetric-space dimension
//! `a * b`; self-dual eigenspaces contribute a symplectic factor of dimension
//! `a(a + 1)/2` instead. Distinct types give non-isomorphic factors, so the
//! sum over distinct types is a lower bound. When that bound exceeds `s - 3`
//! the family cannot be special.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cover::CoverData;
use crate::prym::{sigma_pairing, MinusOrbit, PrymDatum, PrymDecomposition, Sign, TypeKey};
use crate::residue::{element_order, ResidueVector};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundMode {
    /// Only non-self-dual eigenspaces count.
    #[default]
    #[serde(rename = "unitary")]
    UnitaryOnly,
    /// Self-dual eigenspaces add their symplectic contribution.
    #[serde(rename = "symplectic")]
    WithSymplectic,
}

impl BoundMode {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundMode::UnitaryOnly => "unitary",
            BoundMode::WithSymplectic => "symplectic",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    NotSpecial,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::NotSpecial => "NOT_SPECIAL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub branch_points: usize,
    /// `s - 3`, an upper bound for the dimension of the family's image.
    pub family_dim: u64,
    pub bound_unitary: u64,
    pub bound_with_symplectic: u64,
    /// Distinct types contributing to the bound of the active mode.
    pub witnesses: Vec<TypeKey>,
    pub verdict: Verdict,
    pub mode: BoundMode,
}

impl Certificate {
    pub fn active_bound(&self) -> u64 {
        match self.mode {
            BoundMode::UnitaryOnly => self.bound_unitary,
            BoundMode::WithSymplectic => self.bound_with_symplectic,
        }
    }
}

/// Symmetric-space dimension of the simple factor attached to a type:
/// `0` if trivial, `a * b` if unitary, `a(a + 1)/2` if self-dual.
pub fn delta_of_type(t: &TypeKey) -> u64 {
    if t.is_trivial() {
        0
    } else if t.self_dual {
        let a = t.a as u64;
        a * (a + 1) / 2
    } else {
        t.a as u64 * t.b as u64
    }
}

/// Sums `delta` over the distinct nontrivial types, each counted once.
pub fn lower_bound(dec: &PrymDecomposition, mode: BoundMode) -> Certificate {
    let keys: Vec<TypeKey> = dec.type_keys().into_iter().filter(|k| !k.is_trivial()).collect();
    let bound_unitary: u64 = keys.iter().filter(|k| !k.self_dual).map(delta_of_type).sum();
    let bound_with_symplectic: u64 = keys.iter().map(delta_of_type).sum();
    let witnesses = keys
        .into_iter()
        .filter(|k| mode == BoundMode::WithSymplectic || !k.self_dual)
        .collect();
    let family_dim = dec.branch_points as u64 - 3;
    let active = match mode {
        BoundMode::UnitaryOnly => bound_unitary,
        BoundMode::WithSymplectic => bound_with_symplectic,
    };
    Certificate {
        branch_points: dec.branch_points,
        family_dim,
        bound_unitary,
        bound_with_symplectic,
        witnesses,
        verdict: if active > family_dim { Verdict::NotSpecial } else { Verdict::Inconclusive },
        mode,
    }
}

/// Outcome of the cyclic trichotomy: either at most one minus eigenspace
/// pair is nontrivial, or all nontrivial ones share the type `{s-3, 1}`, or
/// the family is not special.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TrichotomyBranch {
    OneNontrivial,
    #[serde(rename = "ALL_SAME_1_SM3")]
    AllSame1Sm3,
    /// The unitary bound is guaranteed to exceed `s - 3`.
    ExpectNotSpecial,
    /// Two or more nontrivial pairs, but the argument needs a zero-free,
    /// non-self-dual pair that is not available.
    PremiseFails,
}

impl TrichotomyBranch {
    pub fn as_str(self) -> &'static str {
        match self {
            TrichotomyBranch::OneNontrivial => "ONE_NONTRIVIAL",
            TrichotomyBranch::AllSame1Sm3 => "ALL_SAME_1_SM3",
            TrichotomyBranch::ExpectNotSpecial => "EXPECT_NOT_SPECIAL",
            TrichotomyBranch::PremiseFails => "PREMISE_FAILS",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrichotomyCheck {
    pub applicable: bool,
    pub branch: Option<TrichotomyBranch>,
}

/// Classifies a datum with cyclic Galois group into the trichotomy.
///
/// A minus pair is *clean* when its characters have no zero entry and are
/// not self-dual; then `d + d' = s - 2` and its factor is `PSU(d, d')`. The
/// branch is `ExpectNotSpecial` exactly when the argument goes through:
/// some clean pair has both dimensions at least two (so `delta >= 2(s - 4)`),
/// or a clean nontrivial pair (`delta >= s - 3`) coexists with a nontrivial
/// non-self-dual pair of another type.
pub fn check_prop_cyclic_trichotomy(cover: &CoverData, dec: &PrymDecomposition) -> TrichotomyCheck {
    if !cover.group().is_cyclic() {
        return TrichotomyCheck { applicable: false, branch: None };
    }
    let s = dec.branch_points as u32;
    let nontrivial: Vec<&MinusOrbit> = dec.minus_orbits.iter().filter(|o| !o.eigen_type().is_trivial()).collect();
    let clean = |o: &&&MinusOrbit| o.zeros == 0 && !o.self_dual;
    let big_clean = nontrivial.iter().filter(clean).any(|o| o.eigen_type().b >= 2);
    let mixed = nontrivial.iter().filter(clean).any(|o| {
        nontrivial.iter().any(|p| !p.self_dual && p.eigen_type() != o.eigen_type())
    });
    let branch = if big_clean || mixed {
        TrichotomyBranch::ExpectNotSpecial
    } else if nontrivial.len() <= 1 {
        TrichotomyBranch::OneNontrivial
    } else if nontrivial.iter().all(|o| {
        let t = o.eigen_type();
        t.b == 1 && t.a + 3 == s
    }) {
        TrichotomyBranch::AllSame1Sm3
    } else {
        TrichotomyBranch::PremiseFails
    };
    TrichotomyCheck { applicable: true, branch: Some(branch) }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicSumsCheck {
    pub applicable: bool,
    /// Order of the Galois group when it is cyclic.
    pub group_order: Option<usize>,
    /// A faithful character meeting both sum conditions.
    pub witness: Option<ResidueVector>,
}

/// Cyclic group `Z/e` together with a presentation `(a_1, ..., a_s)` such that
/// `sum a_i > 2e` and `sum (-a_i mod e) > 2e`, and `s > 5`.
///
/// Presentations of a cyclic group correspond to its faithful characters, so
/// the hypothesis is tested for every faithful character `alpha`, with sums
/// taken in `Z/N` coordinates (`sum alpha_j > 2N` is the same inequality as
/// `sum a_j > 2e` after dividing by `N/e`). This makes the check independent
/// of the chosen generator.
pub fn check_prop_cyclic_sums(cover: &CoverData, datum: &PrymDatum) -> CyclicSumsCheck {
    let group = cover.group();
    if !group.is_cyclic() {
        return CyclicSumsCheck { applicable: false, group_order: None, witness: None };
    }
    let e = group.order();
    let n = cover.matrix().modulus() as u64;
    let s = cover.branch_points();
    let witness = if s > 5 {
        cover
            .characters()
            .iter()
            .filter(|c| element_order(&c.alpha) as usize == e)
            .find(|c| {
                let up: u64 = c.alpha.entries().iter().map(|&a| a as u64).sum();
                let down: u64 = c.alpha.entries().iter().map(|&a| (n - a as u64) % n).sum();
                up > 2 * n && down > 2 * n
            })
    } else {
        None
    };
    if let Some(c) = witness {
        debug_assert_eq!(sigma_pairing(c, &datum.sigma), Sign::Minus, "faithful characters are odd on the involution");
    }
    CyclicSumsCheck { applicable: witness.is_some(), group_order: Some(e), witness: witness.map(|c| c.alpha.clone()) }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianCheck {
    pub applicable: bool,
    pub witness_pair: Option<(MinusOrbit, MinusOrbit)>,
}

/// Two minus pairs of distinct types `(a, b)`, `(c, d)` with all four
/// dimensions at least two and fewer than `s` zero entries between them,
/// with `s > 13`.
///
/// Only non-self-dual pairs qualify: the bound `ab >= 2(a + b - 2)` is the
/// unitary one.
pub fn check_thm_abelian(dec: &PrymDecomposition) -> AbelianCheck {
    let s = dec.branch_points;
    if s <= 13 {
        return AbelianCheck { applicable: false, witness_pair: None };
    }
    let candidates: Vec<&MinusOrbit> = dec
        .minus_orbits
        .iter()
        .filter(|o| !o.self_dual && o.dims.0 >= 2 && o.dims.1 >= 2)
        .collect();
    for (i, x) in candidates.iter().enumerate() {
        for y in &candidates[i + 1..] {
            if x.eigen_type() != y.eigen_type() && x.zeros + y.zeros < s {
                return AbelianCheck { applicable: true, witness_pair: Some(((*x).clone(), (*y).clone())) };
            }
        }
    }
    AbelianCheck { applicable: false, witness_pair: None }
}
