//! Canonical forms of cover matrices under `A -> U * A * P`, where `U` is an
//! invertible `m x m` matrix over `Z/N` and `P` permutes columns.
//!
//! Left multiplication by `U` acts on the columns, so the orbit of `A` is the
//! orbit of its column multiset under `GL_m(Z/N)`. Restricted to the column
//! span `G`, the maps `U` are exactly the injective homomorphisms
//! `G -> (Z/N)^m` (`Z/N` is self-injective, so any such map extends to an
//! automorphism of the ambient module). An injective homomorphism is a tuple
//! of `m` characters of `G` (rows of the row span) whose common kernel is
//! trivial. The canonical form is the lexicographically least column-sorted
//! matrix over all such tuples, found row by row: a prefix of `k` rows is
//! admissible iff its common kernel needs at most `m - k` generators.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use rand::Rng;

use crate::cover::{CoverData, CoverMatrix};
use crate::residue::{dot_mod, rank_of, ResidueVector};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum SymmetryLevel {
    /// Exact orbit representatives.
    #[default]
    #[serde(rename = "full")]
    Full,
    /// Invariant fingerprint; distinct orbits may collide.
    #[serde(rename = "hash")]
    InvariantHash,
}

impl SymmetryLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            SymmetryLevel::Full => "full",
            SymmetryLevel::InvariantHash => "hash",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey {
    pub level: SymmetryLevel,
    pub bytes: Vec<u8>,
}

impl PartialOrd for SymmetryLevel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SymmetryLevel {
    fn cmp(&self, other: &Self) -> Ordering {
        (*self as u8).cmp(&(*other as u8))
    }
}

impl CanonicalKey {
    pub fn to_hex(&self) -> String {
        hex::encode(&self.bytes)
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

fn header(n: u32, m: usize, s: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + m * s);
    out.extend_from_slice(&n.to_be_bytes());
    out.extend_from_slice(&(m as u32).to_be_bytes());
    out.extend_from_slice(&(s as u32).to_be_bytes());
    out
}

fn push_residue(out: &mut Vec<u8>, n: u32, e: u32) {
    if n <= 256 {
        out.push(e as u8);
    } else {
        out.extend_from_slice(&e.to_be_bytes());
    }
}

/// The canonical representative of an orbit together with every
/// automorphism realizing it.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub matrix: CoverMatrix,
    /// Each optimal tuple, as the `m` row vectors `u_i` of some `U` (only
    /// their values on the column span matter).
    optimal: Vec<Vec<ResidueVector>>,
}

impl CanonicalForm {
    pub fn key(&self) -> CanonicalKey {
        matrix_key(&self.matrix)
    }

    /// Number of maps `U` restricted to the column span that realize the
    /// canonical matrix; equals the order of the automorphism group of the
    /// column multiset.
    pub fn automorphisms(&self) -> usize {
        self.optimal.len()
    }

    /// The least image of `sigma` over all maps realizing the canonical form.
    /// Two data `(A, sigma)` and `(U A P, U sigma)` get the same answer.
    pub fn canonical_sigma(&self, sigma: &ResidueVector) -> ResidueVector {
        let n = self.matrix.modulus();
        self.optimal
            .iter()
            .map(|reps| {
                ResidueVector::from_reduced(n, reps.iter().map(|u| dot_mod(u.entries(), sigma.entries(), n)).collect())
            })
            .min()
            .expect("at least one optimal map")
    }
}

/// FULL-level key bytes of a matrix taken as its own orbit representative.
pub fn matrix_key(matrix: &CoverMatrix) -> CanonicalKey {
    let n = matrix.modulus();
    let mut bytes = header(n, matrix.rows(), matrix.cols());
    for &e in matrix.entries() {
        push_residue(&mut bytes, n, e);
    }
    CanonicalKey { level: SymmetryLevel::Full, bytes }
}

/// Column-sorts the matrix with the given rows and returns it row-major.
fn sorted_rows(rows: &[&[u32]], s: usize) -> Vec<u32> {
    let mut perm: Vec<usize> = (0..s).collect();
    perm.sort_by(|&x, &y| rows.iter().map(|r| r[x]).cmp(rows.iter().map(|r| r[y])));
    rows.iter().flat_map(|r| perm.iter().map(move |&j| r[j])).collect()
}

struct Prefix {
    chars: Vec<usize>,
    kernel: Vec<usize>,
}

/// Canonical form of the cover's matrix.
pub fn canonical_form(cover: &CoverData) -> CanonicalForm {
    let matrix = cover.matrix();
    let n = matrix.modulus();
    let m = matrix.rows();
    let s = matrix.cols();
    let chars = cover.characters();
    let elements = cover.group().elements();

    let mut states = vec![Prefix { chars: Vec::new(), kernel: (0..elements.len()).collect() }];
    let mut best: Vec<u32> = Vec::new();
    for level in 0..m {
        let budget = m - level - 1;
        let mut level_best: Option<Vec<u32>> = None;
        let mut next: Vec<Prefix> = Vec::new();
        for state in &states {
            let mut rows: Vec<&[u32]> = state.chars.iter().map(|&c| chars[c].alpha.entries()).collect();
            rows.push(&[]);
            for (ci, c) in chars.iter().enumerate() {
                rows[level] = c.alpha.entries();
                let partial = sorted_rows(&rows, s);
                let ord = level_best.as_ref().map_or(Ordering::Less, |b| partial.cmp(b));
                if ord == Ordering::Greater {
                    continue;
                }
                let kernel: Vec<usize> = state
                    .kernel
                    .iter()
                    .copied()
                    .filter(|&g| dot_mod(c.rep.entries(), elements[g].entries(), n) == 0)
                    .collect();
                if rank_of(kernel.iter().map(|&g| &elements[g]), n) > budget {
                    continue;
                }
                if ord == Ordering::Less {
                    level_best = Some(partial);
                    next.clear();
                }
                let mut chosen = state.chars.clone();
                chosen.push(ci);
                next.push(Prefix { chars: chosen, kernel });
            }
        }
        states = next;
        best = level_best.expect("the identity map is always admissible");
    }
    let optimal = states
        .into_iter()
        .map(|p| p.chars.into_iter().map(|c| chars[c].rep.clone()).collect())
        .collect();
    let matrix = CoverMatrix::new(n, m, s, best).expect("orbit members are valid cover matrices");
    CanonicalForm { matrix, optimal }
}

/// Canonical form of a one-row matrix: the least sorted `u * A` over the
/// multipliers `u` that act invertibly on the column span.
///
/// Agrees with [`canonical_form`] and skips building the character table.
pub fn canonical_single_row(matrix: &CoverMatrix) -> CoverMatrix {
    assert_eq!(matrix.rows(), 1);
    let n = matrix.modulus();
    let g = matrix.entries().iter().fold(n, |g, &e| g.gcd(&e));
    let order = n / g;
    let row = matrix.entries();
    let best = (1..n)
        .filter(|u| u.gcd(&order) == 1)
        .map(|u| {
            let mut r: Vec<u32> = row.iter().map(|&e| ((e as u64 * u as u64) % n as u64) as u32).collect();
            r.sort_unstable();
            r
        })
        .min()
        .expect("1 is always a multiplier");
    CoverMatrix::new(n, 1, matrix.cols(), best).expect("orbit members are valid cover matrices")
}

/// Key at the requested level.
pub fn canonical_key(cover: &CoverData, level: SymmetryLevel) -> CanonicalKey {
    match level {
        SymmetryLevel::Full => canonical_form(cover).key(),
        SymmetryLevel::InvariantHash => fingerprint(cover),
    }
}

/// `(N, m, s, d, genus, sorted (dim, zeros) over characters)`.
pub fn fingerprint(cover: &CoverData) -> CanonicalKey {
    let matrix = cover.matrix();
    let mut bytes = header(matrix.modulus(), matrix.rows(), matrix.cols());
    bytes.extend_from_slice(&(cover.degree() as u32).to_be_bytes());
    bytes.extend_from_slice(&cover.genus().to_be_bytes());
    let mut stats: Vec<(u32, u32)> = cover.characters().iter().map(|c| (c.dim, c.zeros as u32)).collect();
    stats.sort_unstable();
    for (dim, zeros) in stats {
        bytes.extend_from_slice(&dim.to_be_bytes());
        bytes.extend_from_slice(&zeros.to_be_bytes());
    }
    CanonicalKey { level: SymmetryLevel::InvariantHash, bytes }
}

/// A square matrix over `Z/N`, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareMatrix {
    pub modulus: u32,
    pub size: usize,
    pub entries: Vec<u32>,
}

impl SquareMatrix {
    pub fn identity(modulus: u32, size: usize) -> Self {
        let mut entries = vec![0; size * size];
        for i in 0..size {
            entries[i * size + i] = 1 % modulus;
        }
        SquareMatrix { modulus, size, entries }
    }

    pub fn determinant(&self) -> u32 {
        let n = self.modulus as i64;
        fn det(m: &[i64], k: usize, n: i64) -> i64 {
            if k == 1 {
                return m[0].rem_euclid(n);
            }
            let mut total = 0i64;
            for col in 0..k {
                let minor: Vec<i64> = (1..k)
                    .flat_map(|r| (0..k).filter(move |&c| c != col).map(move |c| (r, c)))
                    .map(|(r, c)| m[r * k + c])
                    .collect();
                let sign = if col % 2 == 0 { 1 } else { -1 };
                total = (total + sign * m[col] * det(&minor, k - 1, n)).rem_euclid(n);
            }
            total
        }
        let m: Vec<i64> = self.entries.iter().map(|&e| e as i64).collect();
        det(&m, self.size, n) as u32
    }

    pub fn is_invertible(&self) -> bool {
        self.determinant().gcd(&self.modulus) == 1
    }

    pub fn apply(&self, v: &ResidueVector) -> ResidueVector {
        let k = self.size;
        let entries = (0..k).map(|i| dot_mod(&self.entries[i * k..(i + 1) * k], v.entries(), self.modulus)).collect();
        ResidueVector::from_reduced(self.modulus, entries)
    }

    /// A uniformly random invertible matrix, by rejection.
    pub fn random_invertible<R: Rng + ?Sized>(modulus: u32, size: usize, rng: &mut R) -> Self {
        loop {
            let entries = (0..size * size).map(|_| rng.gen_range(0..modulus)).collect();
            let u = SquareMatrix { modulus, size, entries };
            if u.is_invertible() {
                return u;
            }
        }
    }
}

/// `U * A * P`, where column `j` of the result is column `perm[j]` of `U * A`.
pub fn transform(matrix: &CoverMatrix, u: &SquareMatrix, perm: &[usize]) -> CoverMatrix {
    let cols: Vec<Vec<u32>> = perm.iter().map(|&j| u.apply(&matrix.column(j)).into_entries()).collect();
    CoverMatrix::from_columns(matrix.modulus(), &cols).expect("invertible maps preserve validity")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn data(n: u32, rows: &[Vec<u32>]) -> CoverData {
        CoverData::new(CoverMatrix::from_rows(n, rows).unwrap()).unwrap()
    }

    /// Every invertible matrix of the given size, for brute-force minimization.
    fn all_invertible(n: u32, m: usize) -> Vec<SquareMatrix> {
        let total = (n as usize).pow((m * m) as u32);
        (0..total)
            .filter_map(|mut code| {
                let entries = (0..m * m)
                    .map(|_| {
                        let e = (code % n as usize) as u32;
                        code /= n as usize;
                        e
                    })
                    .collect();
                let u = SquareMatrix { modulus: n, size: m, entries };
                u.is_invertible().then_some(u)
            })
            .collect()
    }

    fn brute_force_canonical(a: &CoverMatrix, group: &[SquareMatrix]) -> Vec<u32> {
        group
            .iter()
            .map(|u| {
                let cols: Vec<Vec<u32>> = a.columns().iter().map(|c| u.apply(c).into_entries()).collect();
                let rows: Vec<Vec<u32>> = (0..a.rows()).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
                let refs: Vec<&[u32]> = rows.iter().map(Vec::as_slice).collect();
                sorted_rows(&refs, a.cols())
            })
            .min()
            .unwrap()
    }

    #[test]
    fn permutation_and_scaling_examples() {
        let a = data(4, &[vec![1, 1, 1, 3, 3, 3]]);
        let b = data(4, &[vec![3, 3, 3, 1, 1, 1]]);
        let c = data(4, &[vec![3, 1, 3, 1, 3, 1]]);
        let key = canonical_key(&a, SymmetryLevel::Full);
        assert_eq!(key, canonical_key(&b, SymmetryLevel::Full));
        assert_eq!(key, canonical_key(&c, SymmetryLevel::Full));
        assert_eq!(canonical_form(&a).matrix.entries(), &[1, 1, 1, 3, 3, 3]);
        let d = data(4, &[vec![2, 2, 2, 2, 2, 2]]);
        assert_ne!(key, canonical_key(&d, SymmetryLevel::Full));
    }

    #[test]
    fn determinant_and_inverses() {
        let u = SquareMatrix { modulus: 4, size: 2, entries: vec![1, 2, 3, 1] };
        assert_eq!(u.determinant(), (1 + 4 * 4 - 6 % 4) % 4);
        assert!(u.is_invertible());
        assert_eq!(all_invertible(2, 2).len(), 6);
        assert_eq!(all_invertible(3, 2).len(), 48);
        assert_eq!(all_invertible(4, 2).len(), 96);
        assert_eq!(all_invertible(2, 3).len(), 168);
    }

    #[test]
    fn matches_brute_force_on_two_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2u32, 3, 4, 6] {
            let group = all_invertible(n, 2);
            for _ in 0..40 {
                let s = rng.gen_range(4..=7);
                let mut rows: Vec<Vec<u32>> = (0..2).map(|_| (0..s - 1).map(|_| rng.gen_range(0..n)).collect()).collect();
                for r in &mut rows {
                    let sum: u32 = r.iter().sum();
                    r.push((n - sum % n) % n);
                }
                let Ok(a) = CoverMatrix::from_rows(n, &rows) else { continue };
                let form = canonical_form(&CoverData::new(a.clone()).unwrap());
                assert_eq!(form.matrix.entries(), brute_force_canonical(&a, &group).as_slice(), "{a}");
            }
        }
    }

    #[test]
    fn matches_brute_force_on_degenerate_spans() {
        let group = all_invertible(4, 2);
        for rows in [
            vec![vec![2, 2, 2, 2], vec![0, 0, 0, 0]],
            vec![vec![1, 1, 3, 3], vec![2, 2, 2, 2]],
            vec![vec![0, 0, 0, 0, 0, 0], vec![1, 3, 2, 2, 1, 3]],
            vec![vec![2, 0, 2, 0], vec![0, 2, 0, 2]],
        ] {
            let a = CoverMatrix::from_rows(4, &rows).unwrap();
            let form = canonical_form(&CoverData::new(a.clone()).unwrap());
            assert_eq!(form.matrix.entries(), brute_force_canonical(&a, &group).as_slice(), "{a}");
        }
        let group = all_invertible(2, 3);
        let (x, y, z) = (vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 1]);
        let a = CoverMatrix::from_columns(2, &[x.clone(), x, y.clone(), y, z.clone(), z]).unwrap();
        let form = canonical_form(&CoverData::new(a.clone()).unwrap());
        assert_eq!(form.matrix.entries(), brute_force_canonical(&a, &group).as_slice());
        // permuting a, b, c is the only symmetry: |S_3| = 6
        assert_eq!(form.automorphisms(), 6);
    }

    #[test]
    fn canonical_sigma_is_orbit_invariant() {
        let (x, y, z) = (vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 1]);
        let a = CoverMatrix::from_columns(2, &[x.clone(), x, y.clone(), y, z.clone(), z]).unwrap();
        let form = canonical_form(&CoverData::new(a).unwrap());
        let rv = |e: &[u32]| ResidueVector::new(2, e.to_vec()).unwrap();
        // the strict involutions are a+b, a+c, b+c and a+b+c; the first three
        // are permuted by the symmetries, the last is fixed
        let images: Vec<_> = [rv(&[1, 1, 0]), rv(&[0, 1, 1]), rv(&[1, 0, 1]), rv(&[0, 0, 1])]
            .iter()
            .map(|s| form.canonical_sigma(s))
            .collect();
        assert_eq!(images[0], images[1]);
        assert_eq!(images[0], images[2]);
        assert_ne!(images[0], images[3]);
    }

    #[test]
    fn fingerprint_is_coarser() {
        let a = data(4, &[vec![1, 1, 1, 3, 3, 3]]);
        let b = data(4, &[vec![3, 1, 1, 1, 3, 3]]);
        assert_eq!(fingerprint(&a), fingerprint(&b));
        assert_eq!(fingerprint(&a).level, SymmetryLevel::InvariantHash);
    }

    proptest! {
        #[test]
        fn single_row_fast_path_agrees(n in 2u32..=16, free in prop::collection::vec(0u32..16, 3..12)) {
            let mut row: Vec<u32> = free.iter().map(|e| e % n).collect();
            let sum: u32 = row.iter().sum();
            row.push((n - sum % n) % n);
            if let Ok(a) = CoverMatrix::from_rows(n, &[row]) {
                let generic = canonical_form(&CoverData::new(a.clone()).unwrap()).matrix;
                prop_assert_eq!(canonical_single_row(&a), generic);
            }
        }

        #[test]
        fn key_is_invariant_under_transformations(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(2..=8u32);
            let m = rng.gen_range(1..=3usize);
            let s = rng.gen_range(4..=8usize);
            let mut rows: Vec<Vec<u32>> = (0..m).map(|_| (0..s - 1).map(|_| rng.gen_range(0..n)).collect()).collect();
            for r in &mut rows {
                let sum: u32 = r.iter().sum();
                r.push((n - sum % n) % n);
            }
            if let Ok(a) = CoverMatrix::from_rows(n, &rows) {
                let u = SquareMatrix::random_invertible(n, m, &mut rng);
                let mut perm: Vec<usize> = (0..s).collect();
                rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
                let b = transform(&a, &u, &perm);
                let fa = canonical_form(&CoverData::new(a).unwrap());
                let fb = canonical_form(&CoverData::new(b).unwrap());
                prop_assert_eq!(fa.key(), fb.key());
                prop_assert_eq!(fa.automorphisms(), fb.automorphisms());
            }
        }
    }
}
