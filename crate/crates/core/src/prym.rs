//! Involutions, the induced double cover, and the split of the character
//! table into the `sigma`-invariant and `sigma`-anti-invariant parts.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cover::{Character, CoverData};
use crate::error::{Error, Result};
use crate::residue::{cyclic_subgroup_contains, element_order, ResidueVector};

/// How the double cover `C -> C/<sigma>` ramifies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Ramification {
    Etale,
    RamifiedTwo,
    RamifiedOther,
}

impl Ramification {
    fn from_fixed_points(fixed: u64) -> Self {
        match fixed {
            0 => Ramification::Etale,
            2 => Ramification::RamifiedTwo,
            _ => Ramification::RamifiedOther,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Ramification::Etale => "ETALE",
            Ramification::RamifiedTwo => "RAMIFIED_TWO",
            Ramification::RamifiedOther => "RAMIFIED_OTHER",
        }
    }
}

impl fmt::Display for Ramification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A validated involution of the Galois group of a cover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrymDatum {
    pub sigma: ResidueVector,
    pub ramification: Ramification,
    /// Points of the cover fixed by `sigma`.
    pub fixed_points: u64,
}

/// Checks that `sigma` is an element of order two of the column span and
/// counts its fixed points.
///
/// The stabilizer of any point over the `j`-th branch point is the inertia
/// group `<T_j>`, and there are `d / ord(T_j)` such points, so `sigma` fixes
/// `sum_{j : sigma in <T_j>} d / ord(T_j)` points in total.
///
/// With `strict_etale`, data with any fixed point are rejected.
pub fn validate_datum(cover: &CoverData, sigma: &ResidueVector, strict_etale: bool) -> Result<PrymDatum> {
    let matrix = cover.matrix();
    let n = matrix.modulus();
    if sigma.modulus() != n {
        return Err(Error::MixedModulus);
    }
    if sigma.len() != matrix.rows() {
        return Err(Error::MixedLength);
    }
    if n % 2 == 1 {
        return Err(Error::OddModulus(n));
    }
    if sigma.is_zero() || sigma.entries().iter().any(|&e| e != 0 && e != n / 2) {
        return Err(Error::NotInvolution);
    }
    if !cover.group().contains(sigma) {
        return Err(Error::SigmaNotInGroup);
    }
    let d = cover.degree() as u64;
    let mut fixed_points = 0u64;
    for column in matrix.columns() {
        if cyclic_subgroup_contains(&column, sigma)? {
            fixed_points += d / element_order(&column) as u64;
        }
    }
    if fixed_points % 2 != 0 {
        return Err(Error::internal("INTERNAL_ODD_FIXED_POINTS", format!("sigma {sigma} fixes {fixed_points} points")));
    }
    if strict_etale && fixed_points > 0 {
        return Err(Error::SigmaRamified(fixed_points));
    }
    Ok(PrymDatum { sigma: sigma.clone(), ramification: Ramification::from_fixed_points(fixed_points), fixed_points })
}

/// Eigenvalue of `sigma` on a character's eigenspace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// `rep . sigma`, which lands in `{0, N/2}`: `0` gives `+1`, `N/2` gives `-1`.
///
/// This is the value of the character on `sigma`; it does not depend on the
/// representative because `sigma` lies in the column span.
pub fn sigma_pairing(character: &Character, sigma: &ResidueVector) -> Sign {
    let value = character.rep.dot(sigma).expect("sigma shares the row-vector shape");
    debug_assert!(value == 0 || 2 * value == sigma.modulus());
    if value == 0 {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

/// A pair `{alpha, -alpha}` of anti-invariant characters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinusOrbit {
    /// The smaller of `alpha` and `-alpha`.
    pub alpha: ResidueVector,
    /// `(d_alpha, d_{-alpha})`.
    pub dims: (u32, u32),
    pub zeros: usize,
    pub self_dual: bool,
}

impl MinusOrbit {
    pub fn eigen_type(&self) -> TypeKey {
        TypeKey {
            a: self.dims.0.max(self.dims.1),
            b: self.dims.0.min(self.dims.1),
            self_dual: self.self_dual,
        }
    }
}

/// The unordered type `{a, b}` of an eigenspace pair, `a >= b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TypeKey {
    pub a: u32,
    pub b: u32,
    pub self_dual: bool,
}

impl TypeKey {
    /// Type `(a, 0)`: the unitary group of the eigenspace is compact.
    pub fn is_trivial(&self) -> bool {
        self.b == 0
    }
}

impl fmt::Display for TypeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}{}", self.a, self.b, if self.self_dual { "*" } else { "" })
    }
}

/// A type together with the zero count of its characters and the number of
/// minus orbits realizing it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EigenType {
    pub a: u32,
    pub b: u32,
    pub self_dual: bool,
    pub zeros: usize,
    pub multiplicity: usize,
}

impl EigenType {
    pub fn key(&self) -> TypeKey {
        TypeKey { a: self.a, b: self.b, self_dual: self.self_dual }
    }

    pub fn is_trivial(&self) -> bool {
        self.b == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrymDecomposition {
    pub datum: PrymDatum,
    /// Number of branch points `s`.
    pub branch_points: usize,
    /// Ascending by representative `alpha`.
    pub minus_orbits: Vec<MinusOrbit>,
    /// Grouped by `(a, b, self_dual, zeros)`, ascending.
    pub types: Vec<EigenType>,
    pub minus_characters: usize,
    pub prym_dim: u64,
    pub quotient_genus: u64,
}

/// Splits the character table by the sign of `sigma` and pairs the
/// anti-invariant characters into orbits `{alpha, -alpha}`.
///
/// Checks that exactly half the characters are anti-invariant, that the two
/// halves add up to the genus, and that the genus satisfies Riemann-Hurwitz
/// for the double cover: `g = 2 g' - 1 + fixed / 2`.
pub fn decompose(cover: &CoverData, datum: &PrymDatum) -> Result<PrymDecomposition> {
    let mut minus = Vec::new();
    let mut quotient_genus = 0u64;
    for c in cover.characters() {
        match sigma_pairing(c, &datum.sigma) {
            Sign::Plus => quotient_genus += c.dim as u64,
            Sign::Minus => minus.push(c),
        }
    }
    let d = cover.degree();
    if 2 * minus.len() != d {
        return Err(Error::internal(
            "INTERNAL_MINUS_COUNT",
            format!("{} anti-invariant characters for a group of order {d}", minus.len()),
        ));
    }
    let prym_dim: u64 = minus.iter().map(|c| c.dim as u64).sum();

    let mut minus_orbits = Vec::new();
    for c in &minus {
        let dual_alpha = c.alpha.neg();
        if dual_alpha < c.alpha {
            continue;
        }
        let dual = cover
            .character(&dual_alpha)
            .ok_or_else(|| Error::internal("INTERNAL_MISSING_DUAL", format!("no character {dual_alpha}")))?;
        minus_orbits.push(MinusOrbit {
            alpha: c.alpha.clone(),
            dims: (c.dim, dual.dim),
            zeros: c.zeros,
            self_dual: dual_alpha == c.alpha,
        });
    }

    let mut grouped: BTreeMap<(TypeKey, usize), usize> = BTreeMap::new();
    for o in &minus_orbits {
        *grouped.entry((o.eigen_type(), o.zeros)).or_default() += 1;
    }
    let types = grouped
        .into_iter()
        .map(|((k, zeros), multiplicity)| EigenType { a: k.a, b: k.b, self_dual: k.self_dual, zeros, multiplicity })
        .collect();

    let genus = cover.genus();
    if prym_dim + quotient_genus != genus || 2 * genus + 2 != 4 * quotient_genus + datum.fixed_points {
        return Err(Error::internal(
            "INTERNAL_RIEMANN_HURWITZ",
            format!(
                "genus {genus}, quotient genus {quotient_genus}, prym dimension {prym_dim}, {} fixed points",
                datum.fixed_points
            ),
        ));
    }

    Ok(PrymDecomposition {
        datum: datum.clone(),
        branch_points: cover.branch_points(),
        minus_orbits,
        types,
        minus_characters: minus.len(),
        prym_dim,
        quotient_genus,
    })
}

impl PrymDecomposition {
    /// Distinct type keys among the minus orbits.
    pub fn type_keys(&self) -> Vec<TypeKey> {
        let mut keys: Vec<TypeKey> = self.types.iter().map(EigenType::key).collect();
        keys.dedup();
        keys
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::CoverMatrix;

    fn rv(n: u32, e: &[u32]) -> ResidueVector {
        ResidueVector::new(n, e.to_vec()).unwrap()
    }

    fn cyclic4() -> CoverData {
        CoverData::new(CoverMatrix::from_rows(4, &[vec![1, 1, 1, 3, 3, 3]]).unwrap()).unwrap()
    }

    fn klein() -> CoverData {
        CoverData::new(CoverMatrix::from_rows(2, &[vec![1, 1, 1, 1], vec![0, 1, 0, 1]]).unwrap()).unwrap()
    }

    fn aabbcc() -> CoverData {
        let (a, b, c) = (vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 1]);
        CoverData::new(CoverMatrix::from_columns(2, &[a.clone(), a, b.clone(), b, c.clone(), c]).unwrap()).unwrap()
    }

    #[test]
    fn validate_examples() {
        let data = cyclic4();
        let datum = validate_datum(&data, &rv(4, &[2]), false).unwrap();
        assert_eq!(datum.ramification, Ramification::RamifiedOther);
        assert_eq!(datum.fixed_points, 6);
        assert_eq!(validate_datum(&data, &rv(4, &[2]), true), Err(Error::SigmaRamified(6)));

        let datum = validate_datum(&aabbcc(), &rv(2, &[0, 0, 1]), false).unwrap();
        assert_eq!(datum.ramification, Ramification::Etale);
        assert_eq!(datum.fixed_points, 0);

        assert_eq!(validate_datum(&klein(), &rv(2, &[0, 0]), false), Err(Error::NotInvolution));
    }

    #[test]
    fn validate_errors() {
        let data = cyclic4();
        assert_eq!(validate_datum(&data, &rv(4, &[1]), false), Err(Error::NotInvolution));
        let odd = CoverData::new(CoverMatrix::from_rows(3, &[vec![1, 1, 2, 2]]).unwrap()).unwrap();
        assert_eq!(validate_datum(&odd, &rv(3, &[1]), false), Err(Error::OddModulus(3)));
        let even = CoverData::new(CoverMatrix::from_rows(4, &[vec![2, 2, 2, 2], vec![1, 1, 3, 3]]).unwrap()).unwrap();
        assert_eq!(validate_datum(&even, &rv(4, &[2, 0]), false), Err(Error::SigmaNotInGroup));
        assert_eq!(validate_datum(&data, &rv(4, &[2, 0]), false), Err(Error::MixedLength));
    }

    #[test]
    fn two_fixed_points() {
        // columns (1,0),(1,0),(0,1),(0,1) over Z/2: sigma=(1,0) lies only in
        // the first two inertia groups, each of order 2 in a group of order 4
        let data = CoverData::new(CoverMatrix::from_columns(2, &[vec![1, 0], vec![1, 0], vec![0, 1], vec![0, 1]]).unwrap()).unwrap();
        let datum = validate_datum(&data, &rv(2, &[1, 0]), false).unwrap();
        assert_eq!(datum.fixed_points, 4);
        let data = CoverData::new(
            CoverMatrix::from_columns(2, &[vec![1, 0], vec![1, 0], vec![0, 1], vec![1, 1], vec![0, 1], vec![1, 1]]).unwrap(),
        )
        .unwrap();
        let datum = validate_datum(&data, &rv(2, &[1, 0]), false).unwrap();
        assert_eq!(datum.fixed_points, 4);
        let datum = validate_datum(&data, &rv(2, &[1, 1]), false).unwrap();
        assert_eq!(datum.fixed_points, 4);
        let data4 = CoverData::new(CoverMatrix::from_columns(4, &[vec![2, 1], vec![2, 3], vec![1, 0], vec![3, 0]]).unwrap()).unwrap();
        // group Z/4 x Z/4 restricted; sigma=(0,2) lies in <(2,1)> and <(2,3)>
        let datum = validate_datum(&data4, &rv(4, &[0, 2]), false).unwrap();
        assert_eq!(data4.degree(), 16);
        assert_eq!(datum.fixed_points, 8);
    }

    #[test]
    fn pairing_examples() {
        let data = cyclic4();
        let trivial = &data.characters()[0];
        assert!(trivial.is_trivial());
        assert_eq!(sigma_pairing(trivial, &rv(4, &[2])), Sign::Plus);
        let c1 = data.characters().iter().find(|c| c.rep == rv(4, &[1])).unwrap();
        assert_eq!(sigma_pairing(c1, &rv(4, &[2])), Sign::Minus);
        let data = aabbcc();
        let c = data.characters().iter().find(|c| c.rep == rv(2, &[1, 1, 0])).unwrap();
        assert_eq!(sigma_pairing(c, &rv(2, &[0, 0, 1])), Sign::Plus);
    }

    #[test]
    fn decompose_cyclic() {
        let data = cyclic4();
        let datum = validate_datum(&data, &rv(4, &[2]), false).unwrap();
        let dec = decompose(&data, &datum).unwrap();
        assert_eq!(dec.minus_orbits.len(), 1);
        assert_eq!(dec.minus_orbits[0].dims, (2, 2));
        assert!(!dec.minus_orbits[0].self_dual);
        assert_eq!(dec.types, vec![EigenType { a: 2, b: 2, self_dual: false, zeros: 0, multiplicity: 1 }]);
        assert_eq!(dec.prym_dim, 4);
        assert_eq!(dec.quotient_genus, 2);
    }

    #[test]
    fn decompose_klein() {
        let data = klein();
        let datum = validate_datum(&data, &rv(2, &[0, 1]), false).unwrap();
        let dec = decompose(&data, &datum).unwrap();
        assert_eq!(dec.minus_orbits.len(), 2);
        assert!(dec.minus_orbits.iter().all(|o| o.self_dual && o.dims == (0, 0)));
        assert_eq!(dec.prym_dim, 0);
        assert_eq!(dec.quotient_genus, 1);
    }

    #[test]
    fn decompose_etale() {
        let data = aabbcc();
        let datum = validate_datum(&data, &rv(2, &[0, 0, 1]), false).unwrap();
        let dec = decompose(&data, &datum).unwrap();
        assert_eq!(dec.prym_dim, 2);
        assert_eq!(dec.quotient_genus, 3);
        let trivial: usize = dec.types.iter().filter(|t| t.a == 0 && t.b == 0).map(|t| t.multiplicity).sum();
        assert_eq!(trivial, 3);
        let big: Vec<_> = dec.types.iter().filter(|t| t.a == 2).collect();
        assert_eq!(big.len(), 1);
        assert!(big[0].self_dual && big[0].b == 2 && big[0].multiplicity == 1);
        assert_eq!(dec.prym_dim + 1, dec.quotient_genus);
    }

    #[test]
    fn parity_form_when_sigma_is_all_half() {
        // sigma = (N/2, ..., N/2) recovers the parity criterion on sum(n_i)
        let data = CoverData::new(CoverMatrix::from_rows(4, &[vec![1, 1, 3, 3, 2, 2], vec![2, 0, 2, 0, 2, 2]]).unwrap()).unwrap();
        let sigma = rv(4, &[2, 2]);
        if data.group().contains(&sigma) {
            for c in data.characters() {
                let parity: u32 = c.rep.entries().iter().sum();
                let expect = if parity % 2 == 1 { Sign::Minus } else { Sign::Plus };
                assert_eq!(sigma_pairing(c, &sigma), expect);
            }
        } else {
            panic!("sigma should lie in the group");
        }
    }
}
