//! Cover matrices, their Galois group, genus and character table.
//!
//! An `m x s` matrix `A` over `Z/N` describes a family of abelian covers of
//! the line branched over `s` points: column `j` is the local monodromy at
//! the `j`-th branch point, and the Galois group is the column span of `A`
//! inside `(Z/N)^m`. Characters of that group are the vectors of the row
//! span, `alpha = n * A`.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::residue::{decode, dense_size, span_closure, ResidueVector, Subgroup};

/// A validated cover matrix, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoverMatrix {
    modulus: u32,
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
}

impl CoverMatrix {
    /// Validates shape, residues, the column count, nonzero columns and zero
    /// row sums, in that order.
    pub fn new(modulus: u32, rows: usize, cols: usize, entries: Vec<u32>) -> Result<Self> {
        validate_matrix(modulus, rows, cols, entries)
    }

    /// Builds a matrix from its row vectors.
    pub fn from_rows(modulus: u32, rows: &[Vec<u32>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::RaggedMatrix);
        }
        validate_matrix(modulus, rows.len(), cols, rows.concat())
    }

    /// Builds a matrix from its column vectors.
    pub fn from_columns(modulus: u32, columns: &[Vec<u32>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::RaggedMatrix);
        }
        let cols = columns.len();
        let mut entries = vec![0; rows * cols];
        for (j, c) in columns.iter().enumerate() {
            for (i, &e) in c.iter().enumerate() {
                entries[i * cols + j] = e;
            }
        }
        validate_matrix(modulus, rows, cols, entries)
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Number of rows `m`.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns `s`, i.e. branch points.
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> ResidueVector {
        ResidueVector::from_reduced(self.modulus, self.entries[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn column(&self, j: usize) -> ResidueVector {
        ResidueVector::from_reduced(self.modulus, (0..self.rows).map(|i| self.entry(i, j)).collect())
    }

    pub fn columns(&self) -> Vec<ResidueVector> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    /// `n * A` for a row vector `n` of length `m`.
    pub fn left_multiply(&self, n: &ResidueVector) -> ResidueVector {
        assert_eq!(n.len(), self.rows);
        let modulus = self.modulus as u64;
        let entries = (0..self.cols)
            .map(|j| {
                let sum: u64 = (0..self.rows).map(|i| n.entries()[i] as u64 * self.entry(i, j) as u64).sum();
                (sum % modulus) as u32
            })
            .collect();
        ResidueVector::from_reduced(self.modulus, entries)
    }

    /// Order of ramification over the `j`-th branch point:
    /// `N / gcd(N, r_1j, ..., r_mj)`.
    pub fn ramification_order(&self, j: usize) -> Result<u32> {
        if j >= self.cols {
            return Err(Error::IndexOutOfRange { index: j, len: self.cols });
        }
        Ok(self.modulus / self.column_gcd(j))
    }

    fn column_gcd(&self, j: usize) -> u32 {
        (0..self.rows).fold(self.modulus, |g, i| g.gcd(&self.entry(i, j)))
    }

    /// Column span of `A`.
    pub fn column_span(&self) -> Subgroup {
        span_closure(&self.columns(), self.modulus, self.rows).expect("columns share shape")
    }
}

impl fmt::Display for CoverMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ";")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.entry(i, j))?;
            }
        }
        Ok(())
    }
}

/// Validates a row-major matrix as a cover matrix.
pub fn validate_matrix(modulus: u32, rows: usize, cols: usize, entries: Vec<u32>) -> Result<CoverMatrix> {
    if modulus < 2 {
        return Err(Error::BadModulus(modulus));
    }
    if entries.len() != rows * cols {
        return Err(Error::ShapeMismatch { expected: rows * cols, actual: entries.len() });
    }
    if let Some(&entry) = entries.iter().find(|&&e| e >= modulus) {
        return Err(Error::EntryOutOfRange { entry: entry as i64, modulus });
    }
    if cols < 4 {
        return Err(Error::TooFewColumns(cols));
    }
    let m = CoverMatrix { modulus, rows, cols, entries };
    if let Some(j) = (0..cols).find(|&j| (0..rows).all(|i| m.entry(i, j) == 0)) {
        return Err(Error::ZeroColumn(j));
    }
    if let Some(i) = (0..rows).find(|&i| m.row(i).entries().iter().map(|&e| e as u64).sum::<u64>() % modulus as u64 != 0) {
        return Err(Error::RowSumNonzero(i));
    }
    Ok(m)
}

/// Genus of the cover by Riemann-Hurwitz:
/// `g = 1 + d((s - 2)/2 - (1/2N) * sum_j gcd(N, column j))`.
///
/// Evaluated in exact rationals; a non-integral or negative result is an
/// invariant violation.
pub fn genus(matrix: &CoverMatrix) -> Result<u64> {
    let degree = matrix.column_span().order();
    genus_with_degree(matrix, degree)
}

fn genus_with_degree(matrix: &CoverMatrix, degree: usize) -> Result<u64> {
    let d = Ratio::from_integer(degree as i64);
    let s = matrix.cols as i64;
    let n = matrix.modulus as i64;
    let gcd_sum: i64 = (0..matrix.cols).map(|j| matrix.column_gcd(j) as i64).sum();
    let g = Ratio::from_integer(1) + d * (Ratio::new(s - 2, 2) - Ratio::new(gcd_sum, 2 * n));
    if !g.is_integer() || *g.numer() < 0 {
        return Err(Error::internal("INTERNAL_NONINTEGRAL_GENUS", format!("genus evaluated to {g} for {matrix}")));
    }
    Ok(g.to_integer() as u64)
}

/// Dimension of the eigenspace of holomorphic differentials for the
/// character `alpha`: `-1 + sum_j <-alpha_j / N>`, and `0` for the trivial
/// character.
pub fn eigen_dim(alpha: &ResidueVector) -> Result<u32> {
    if alpha.is_zero() {
        return Ok(0);
    }
    let n = alpha.modulus() as u64;
    let total: u64 = alpha.entries().iter().map(|&e| e as u64).sum();
    if total % n != 0 {
        return Err(Error::SumNotZero);
    }
    let frac = Ratio::new(
        alpha.entries().iter().filter(|&&e| e != 0).map(|&e| (n - e as u64) as i64).sum::<i64>(),
        n as i64,
    );
    let dim = frac - 1;
    if !dim.is_integer() || *dim.numer() < 0 {
        return Err(Error::internal("INTERNAL_NONINTEGRAL_DIM", format!("eigenspace dimension {dim} for {alpha}")));
    }
    Ok(dim.to_integer() as u32)
}

/// A character of the Galois group, keyed by its row-span vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character {
    /// `rep * A`, one value per branch point.
    pub alpha: ResidueVector,
    /// One row vector `n` with `n * A = alpha`.
    pub rep: ResidueVector,
    /// Dimension of the eigenspace of holomorphic differentials.
    pub dim: u32,
    /// Zero entries of `alpha`.
    pub zeros: usize,
}

impl Character {
    pub fn is_trivial(&self) -> bool {
        self.alpha.is_zero()
    }
}

/// Everything computed from a cover matrix alone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverData {
    matrix: CoverMatrix,
    group: Subgroup,
    genus: u64,
    characters: Vec<Character>,
}

impl CoverData {
    pub fn new(matrix: CoverMatrix) -> Result<Self> {
        character_table(matrix)
    }

    pub fn matrix(&self) -> &CoverMatrix {
        &self.matrix
    }

    /// Column span of the matrix, the Galois group.
    pub fn group(&self) -> &Subgroup {
        &self.group
    }

    pub fn degree(&self) -> usize {
        self.group.order()
    }

    pub fn genus(&self) -> u64 {
        self.genus
    }

    /// Characters sorted by `alpha`.
    pub fn characters(&self) -> &[Character] {
        &self.characters
    }

    pub fn character(&self, alpha: &ResidueVector) -> Option<&Character> {
        self.characters.binary_search_by(|c| c.alpha.cmp(alpha)).ok().map(|i| &self.characters[i])
    }

    pub fn branch_points(&self) -> usize {
        self.matrix.cols
    }
}

/// Row span as sorted `(alpha, n)` pairs, by evaluating `n * A` for every
/// `n` and keeping the least `n` per value.
fn dense_row_span(matrix: &CoverMatrix, size: usize) -> Vec<(ResidueVector, ResidueVector)> {
    let (n, m, s) = (matrix.modulus, matrix.rows, matrix.cols);
    let mut alphas = vec![0u32; size * s];
    for code in 0..size {
        let digits = decode(code, n, m);
        let alpha = &mut alphas[code * s..(code + 1) * s];
        for (i, &d) in digits.iter().enumerate() {
            if d == 0 {
                continue;
            }
            for (a, &e) in alpha.iter_mut().zip(&matrix.entries[i * s..(i + 1) * s]) {
                *a = ((*a as u64 + d as u64 * e as u64) % n as u64) as u32;
            }
        }
    }
    let row = |c: usize| &alphas[c * s..(c + 1) * s];
    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by(|&x, &y| row(x).cmp(row(y)).then(x.cmp(&y)));
    order.dedup_by(|later, first| row(*later) == row(*first));
    order
        .into_iter()
        .map(|c| (ResidueVector::from_reduced(n, row(c).to_vec()), ResidueVector::from_reduced(n, decode(c, n, m))))
        .collect()
}

/// Row span by saturation from zero, for large ambient groups.
fn sparse_row_span(matrix: &CoverMatrix) -> Vec<(ResidueVector, ResidueVector)> {
    let n = matrix.modulus;
    let m = matrix.rows;
    let row_gens: Vec<(ResidueVector, ResidueVector)> = (0..m)
        .map(|i| {
            let mut e = vec![0; m];
            e[i] = 1;
            (matrix.row(i), ResidueVector::from_reduced(n, e))
        })
        .collect();
    let mut span: BTreeMap<ResidueVector, ResidueVector> = BTreeMap::new();
    let zero_alpha = ResidueVector::zero(n, matrix.cols);
    span.insert(zero_alpha.clone(), ResidueVector::zero(n, m));
    let mut frontier = vec![zero_alpha];
    while let Some(alpha) = frontier.pop() {
        let rep = span[&alpha].clone();
        for (row, unit) in &row_gens {
            let next = alpha.add(row);
            if !span.contains_key(&next) {
                span.insert(next.clone(), rep.add(unit));
                frontier.push(next);
            }
        }
    }
    span.into_iter().collect()
}

/// Enumerates the row span of `A` with one representative per vector and
/// each eigenspace dimension, then cross-checks the count against the group
/// order and the dimension sum against the genus.
pub fn character_table(matrix: CoverMatrix) -> Result<CoverData> {
    let group = matrix.column_span();
    let genus = genus_with_degree(&matrix, group.order())?;

    let span = match dense_size(matrix.modulus, matrix.rows) {
        Some(size) => dense_row_span(&matrix, size),
        None => sparse_row_span(&matrix),
    };
    if span.len() != group.order() {
        return Err(Error::internal(
            "INTERNAL_CHARACTER_COUNT",
            format!("row span has {} elements but the column span has {}", span.len(), group.order()),
        ));
    }
    let characters = span
        .into_iter()
        .map(|(alpha, rep)| {
            let dim = eigen_dim(&alpha)?;
            let zeros = alpha.zero_count();
            Ok(Character { alpha, rep, dim, zeros })
        })
        .collect::<Result<Vec<_>>>()?;
    let total: u64 = characters.iter().map(|c| c.dim as u64).sum();
    if total != genus {
        return Err(Error::internal(
            "INTERNAL_GENUS_MISMATCH",
            format!("eigenspace dimensions sum to {total} but Riemann-Hurwitz gives {genus} for {matrix}"),
        ));
    }
    Ok(CoverData { matrix, group, genus, characters })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m1(n: u32, row: &[u32]) -> CoverMatrix {
        CoverMatrix::from_rows(n, &[row.to_vec()]).unwrap()
    }

    pub(crate) fn aabbcc() -> CoverMatrix {
        let (a, b, c) = (vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 1]);
        CoverMatrix::from_columns(2, &[a.clone(), a, b.clone(), b, c.clone(), c]).unwrap()
    }

    #[test]
    fn validation_examples() {
        assert!(CoverMatrix::from_rows(4, &[vec![1, 1, 1, 3, 3, 3]]).is_ok());
        assert_eq!(CoverMatrix::from_rows(2, &[vec![1; 5]]), Err(Error::RowSumNonzero(0)));
        assert!(CoverMatrix::from_rows(2, &[vec![1, 1, 1, 1], vec![0, 1, 0, 1]]).is_ok());
    }

    #[test]
    fn validation_error_order() {
        assert_eq!(CoverMatrix::from_rows(1, &[vec![0; 4]]), Err(Error::BadModulus(1)));
        assert_eq!(CoverMatrix::from_rows(4, &[vec![1, 1, 1]]), Err(Error::TooFewColumns(3)));
        assert_eq!(CoverMatrix::from_rows(4, &[vec![1, 0, 3, 0]]), Err(Error::ZeroColumn(1)));
        assert_eq!(CoverMatrix::from_rows(4, &[vec![1, 5, 3, 0]]), Err(Error::EntryOutOfRange { entry: 5, modulus: 4 }));
        assert_eq!(CoverMatrix::from_rows(4, &[vec![1, 1, 1, 1], vec![1]]), Err(Error::RaggedMatrix));
        assert_eq!(CoverMatrix::new(4, 1, 4, vec![1, 1]), Err(Error::ShapeMismatch { expected: 4, actual: 2 }));
        assert_eq!(CoverMatrix::new(4, 0, 4, vec![]), Err(Error::ZeroColumn(0)));
    }

    #[test]
    fn ramification_examples() {
        let a = m1(4, &[2, 2, 1, 3]);
        assert_eq!(a.ramification_order(0).unwrap(), 2);
        assert_eq!(a.ramification_order(2).unwrap(), 4);
        assert_eq!(a.ramification_order(4), Err(Error::IndexOutOfRange { index: 4, len: 4 }));
        let b = CoverMatrix::from_rows(4, &[vec![1, 1, 1, 1], vec![2, 0, 2, 0]]).unwrap();
        let c = CoverMatrix::from_columns(4, &[vec![0, 2], vec![1, 0], vec![3, 0], vec![0, 2]]).unwrap();
        assert_eq!(b.ramification_order(1).unwrap(), 4);
        assert_eq!(c.ramification_order(0).unwrap(), 2);
    }

    #[test]
    fn genus_examples() {
        assert_eq!(genus(&m1(2, &[1, 1, 1, 1])).unwrap(), 1);
        assert_eq!(genus(&m1(4, &[1, 1, 1, 3, 3, 3])).unwrap(), 6);
        assert_eq!(genus(&aabbcc()).unwrap(), 5);
    }

    #[test]
    fn eigen_dim_examples() {
        let rv = |n, e: &[u32]| ResidueVector::new(n, e.to_vec()).unwrap();
        assert_eq!(eigen_dim(&rv(4, &[0, 0, 0, 0])).unwrap(), 0);
        assert_eq!(eigen_dim(&rv(4, &[1, 1, 1, 3, 3, 3])).unwrap(), 2);
        assert_eq!(eigen_dim(&rv(7, &[1, 1, 2, 3])).unwrap(), 2);
        assert_eq!(eigen_dim(&rv(4, &[1, 1, 1])), Err(Error::SumNotZero));
    }

    fn dims(data: &CoverData) -> Vec<u32> {
        data.characters().iter().map(|c| c.dim).collect()
    }

    #[test]
    fn character_table_examples() {
        let data = CoverData::new(m1(4, &[1, 1, 1, 3, 3, 3])).unwrap();
        assert_eq!(data.degree(), 4);
        assert_eq!(data.genus(), 6);
        assert_eq!(dims(&data), vec![0, 2, 2, 2]);

        let data = CoverData::new(CoverMatrix::from_rows(2, &[vec![1, 1, 1, 1], vec![0, 1, 0, 1]]).unwrap()).unwrap();
        assert_eq!(data.genus(), 1);
        let mut d = dims(&data);
        d.sort();
        assert_eq!(d, vec![0, 0, 0, 1]);
        // alpha order: 0000, 0101, 1010, 1111
        assert_eq!(dims(&data), vec![0, 0, 0, 1]);

        let data = CoverData::new(aabbcc()).unwrap();
        assert_eq!(data.degree(), 8);
        assert_eq!(data.genus(), 5);
        // hand computation: (n1,n2,n3) = 000..111 give dims 0,0,1,0,1,0,1,2
        let by_rep: Vec<(Vec<u32>, u32)> = {
            let mut v: Vec<_> = data.characters().iter().map(|c| (c.rep.entries().to_vec(), c.dim)).collect();
            v.sort();
            v
        };
        let expected = [0, 0, 1, 0, 1, 0, 1, 2];
        assert_eq!(by_rep.iter().map(|x| x.1).collect::<Vec<_>>(), expected);
    }

    #[test]
    fn representatives_reproduce_alpha() {
        let data = CoverData::new(CoverMatrix::from_rows(6, &[vec![1, 2, 3, 0], vec![2, 4, 0, 0], vec![0, 0, 3, 3]]).unwrap()).unwrap();
        for c in data.characters() {
            assert_eq!(data.matrix().left_multiply(&c.rep), c.alpha);
        }
    }

    fn arb_matrix() -> impl Strategy<Value = CoverMatrix> {
        (2u32..=9, 1usize..=3, 4usize..=8)
            .prop_flat_map(|(n, m, s)| (Just(n), Just(m), Just(s), prop::collection::vec(0..n, m * (s - 1))))
            .prop_filter_map("zero column", |(n, m, s, free)| {
                let mut rows: Vec<Vec<u32>> = free.chunks(s - 1).map(<[u32]>::to_vec).collect();
                for r in &mut rows {
                    let sum: u32 = r.iter().sum();
                    r.push((n - sum % n) % n);
                }
                let _ = m;
                CoverMatrix::from_rows(n, &rows).ok()
            })
    }

    proptest! {
        #[test]
        fn dense_and_sparse_row_spans_agree(a in arb_matrix()) {
            let size = dense_size(a.modulus(), a.rows()).unwrap();
            prop_assert_eq!(dense_row_span(&a, size).into_iter().map(|x| x.0).collect::<Vec<_>>(),
                sparse_row_span(&a).into_iter().map(|x| x.0).collect::<Vec<_>>());
        }

        #[test]
        fn dimension_sum_and_duality(a in arb_matrix()) {
            let data = CoverData::new(a).unwrap();
            prop_assert_eq!(data.characters().len(), data.degree());
            let total: u64 = data.characters().iter().map(|c| c.dim as u64).sum();
            prop_assert_eq!(total, data.genus());
            let s = data.branch_points();
            for c in data.characters().iter().filter(|c| !c.is_trivial()) {
                let dual = data.character(&c.alpha.neg()).unwrap();
                prop_assert_eq!((c.dim + dual.dim) as usize, s - c.zeros - 2);
            }
        }

        #[test]
        fn genus_invariant_under_permutation_and_scaling(a in arb_matrix(), rot in 0usize..8, u in 0usize..8) {
            let n = a.modulus();
            let units = crate::residue::units(n);
            let u = units[u % units.len()];
            let cols = a.columns();
            let k = rot % cols.len();
            let moved: Vec<Vec<u32>> = cols[k..].iter().chain(&cols[..k]).map(|c| c.scale(u as u64).into_entries()).collect();
            let b = CoverMatrix::from_columns(n, &moved).unwrap();
            prop_assert_eq!(genus(&a).unwrap(), genus(&b).unwrap());
        }
    }
}
