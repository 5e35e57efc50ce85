//! Vectors over `Z/N`, subgroup closure and the unit group.
//!
//! Every residue is kept as its canonical representative in `[0, N)`, so two
//! vectors are equal exactly when their entry slices are equal.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};

/// A vector of residues modulo a shared modulus `N >= 2`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ResidueVector {
    modulus: u32,
    entries: Vec<u32>,
}

impl ResidueVector {
    /// Builds a vector from entries that are already reduced.
    pub fn new(modulus: u32, entries: Vec<u32>) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::BadModulus(modulus));
        }
        if let Some(&entry) = entries.iter().find(|&&e| e >= modulus) {
            return Err(Error::EntryOutOfRange { entry: entry as i64, modulus });
        }
        Ok(ResidueVector { modulus, entries })
    }

    /// Builds a vector by reducing arbitrary integers mod `modulus`.
    pub fn from_ints(modulus: u32, values: &[i64]) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::BadModulus(modulus));
        }
        let n = modulus as i64;
        let entries = values.iter().map(|v| v.rem_euclid(n) as u32).collect();
        Ok(ResidueVector { modulus, entries })
    }

    pub fn zero(modulus: u32, len: usize) -> Self {
        debug_assert!(modulus >= 2);
        ResidueVector { modulus, entries: vec![0; len] }
    }

    pub(crate) fn from_reduced(modulus: u32, entries: Vec<u32>) -> Self {
        debug_assert!(entries.iter().all(|&e| e < modulus));
        ResidueVector { modulus, entries }
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<u32> {
        self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    /// Number of zero coordinates.
    pub fn zero_count(&self) -> usize {
        self.entries.iter().filter(|&&e| e == 0).count()
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::MixedModulus);
        }
        if self.entries.len() != other.entries.len() {
            return Err(Error::MixedLength);
        }
        Ok(())
    }

    /// Componentwise sum. Panics on incompatible operands; use
    /// [`ResidueVector::checked_add`] for untrusted input.
    pub fn add(&self, other: &Self) -> Self {
        self.checked_add(other).expect("incompatible residue vectors")
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let n = self.modulus;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| (a + b) % n)
            .collect();
        Ok(ResidueVector { modulus: n, entries })
    }

    pub fn neg(&self) -> Self {
        let n = self.modulus;
        let entries = self.entries.iter().map(|&a| (n - a) % n).collect();
        ResidueVector { modulus: n, entries }
    }

    pub fn scale(&self, k: u64) -> Self {
        let n = self.modulus as u64;
        let k = k % n;
        let entries = self.entries.iter().map(|&a| ((a as u64 * k) % n) as u32).collect();
        ResidueVector { modulus: self.modulus, entries }
    }

    /// Dot product mod `N`.
    pub fn dot(&self, other: &Self) -> Result<u32> {
        self.check_compatible(other)?;
        Ok(dot_mod(&self.entries, &other.entries, self.modulus))
    }

    /// Least `k >= 1` with `k * self == 0`.
    pub fn order(&self) -> u32 {
        element_order(self)
    }
}

impl fmt::Display for ResidueVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

pub(crate) fn dot_mod(a: &[u32], b: &[u32], modulus: u32) -> u32 {
    let n = modulus as u64;
    (a.iter().zip(b).map(|(&x, &y)| x as u64 * y as u64).sum::<u64>() % n) as u32
}

/// A finite subgroup of `(Z/N)^m`, stored as its sorted element list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    modulus: u32,
    ambient_rank: usize,
    elements: Vec<ResidueVector>,
    rank: usize,
}

impl Subgroup {
    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Elements in ascending lexicographic order.
    pub fn elements(&self) -> &[ResidueVector] {
        &self.elements
    }

    pub fn contains(&self, v: &ResidueVector) -> bool {
        v.modulus == self.modulus && self.elements.binary_search(v).is_ok()
    }

    /// Minimal number of generators: the largest `F_p`-dimension of a
    /// `p`-torsion layer over the primes dividing `N`.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Whether the subgroup is cyclic (rank at most one).
    pub fn is_cyclic(&self) -> bool {
        self.rank() <= 1
    }

    /// All elements of order exactly two, ascending.
    pub fn involutions(&self) -> Vec<ResidueVector> {
        self.elements.iter().filter(|v| element_order(v) == 2).cloned().collect()
    }
}

/// Distinct prime divisors of `n`, ascending.
pub fn prime_divisors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rank of the subgroup formed by `elements` (which must be closed under
/// addition).
pub(crate) fn rank_of<'a>(elements: impl Iterator<Item = &'a ResidueVector> + Clone, modulus: u32) -> usize {
    prime_divisors(modulus)
        .into_iter()
        .map(|p| {
            let torsion = elements
                .clone()
                .filter(|v| v.entries.iter().all(|&e| (e as u64 * p as u64) % modulus as u64 == 0))
                .count();
            let mut dim = 0;
            let mut size = 1usize;
            while size < torsion {
                size *= p as usize;
                dim += 1;
            }
            debug_assert_eq!(size, torsion, "p-torsion of a group has p-power order");
            dim
        })
        .max()
        .unwrap_or(0)
}

/// Smallest subgroup of `(Z/N)^m` containing every generator.
///
/// Computed by breadth-first saturation: starting from zero, keep adding
/// generators until no new element appears. A finite set closed under
/// addition is automatically closed under negation.
pub fn span_closure(generators: &[ResidueVector], modulus: u32, ambient_rank: usize) -> Result<Subgroup> {
    if modulus < 2 {
        return Err(Error::BadModulus(modulus));
    }
    for g in generators {
        if g.modulus != modulus {
            return Err(Error::MixedModulus);
        }
        if g.len() != ambient_rank {
            return Err(Error::MixedLength);
        }
    }
    let elements = match dense_size(modulus, ambient_rank) {
        Some(size) => dense_closure(generators, modulus, ambient_rank, size),
        None => sparse_closure(generators, modulus, ambient_rank),
    };
    let rank = rank_of(elements.iter(), modulus);
    Ok(Subgroup { modulus, ambient_rank, elements, rank })
}

/// `N^m` when a bitmap over `(Z/N)^m` is affordable.
pub(crate) fn dense_size(modulus: u32, rank: usize) -> Option<usize> {
    const LIMIT: u64 = 1 << 20;
    let mut size = 1u64;
    for _ in 0..rank {
        size *= modulus as u64;
        if size > LIMIT {
            return None;
        }
    }
    Some(size as usize)
}

/// Inverse of the mixed-radix code with the first entry most significant;
/// code order is lexicographic order.
pub(crate) fn decode(mut code: usize, modulus: u32, len: usize) -> Vec<u32> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = (code % modulus as usize) as u32;
        code /= modulus as usize;
    }
    out
}

fn dense_closure(generators: &[ResidueVector], modulus: u32, rank: usize, size: usize) -> Vec<ResidueVector> {
    let n = modulus as usize;
    let mut place = vec![1usize; rank];
    for i in (0..rank.saturating_sub(1)).rev() {
        place[i] = place[i + 1] * n;
    }
    let mut seen = vec![false; size];
    seen[0] = true;
    let mut frontier = vec![0usize];
    while let Some(x) = frontier.pop() {
        for g in generators {
            let mut y = 0;
            for (i, &e) in g.entries.iter().enumerate() {
                let digit = (x / place[i]) % n;
                y += ((digit + e as usize) % n) * place[i];
            }
            if !seen[y] {
                seen[y] = true;
                frontier.push(y);
            }
        }
    }
    (0..size)
        .filter(|&c| seen[c])
        .map(|c| ResidueVector { modulus, entries: decode(c, modulus, rank) })
        .collect()
}

fn sparse_closure(generators: &[ResidueVector], modulus: u32, rank: usize) -> Vec<ResidueVector> {
    let zero = ResidueVector::zero(modulus, rank);
    let mut seen: BTreeSet<ResidueVector> = BTreeSet::new();
    seen.insert(zero.clone());
    let mut frontier = vec![zero];
    while let Some(x) = frontier.pop() {
        for g in generators {
            let y = x.add(g);
            if !seen.contains(&y) {
                seen.insert(y.clone());
                frontier.push(y);
            }
        }
    }
    seen.into_iter().collect()
}

/// Whether `candidate` is a multiple of `generator`.
pub fn cyclic_subgroup_contains(generator: &ResidueVector, candidate: &ResidueVector) -> Result<bool> {
    generator.check_compatible(candidate)?;
    let ord = element_order(generator) as u64;
    Ok((0..ord).any(|k| generator.scale(k) == *candidate))
}

/// `lcm` over coordinates of `N / gcd(N, e)`.
pub fn element_order(v: &ResidueVector) -> u32 {
    let n = v.modulus;
    v.entries.iter().fold(1u32, |acc, &e| acc.lcm(&(n / n.gcd(&e))))
}

/// Residues in `[1, N)` coprime to `N`.
pub fn units(modulus: u32) -> Vec<u32> {
    (1..modulus).filter(|u| u.gcd(&modulus) == 1).collect()
}
