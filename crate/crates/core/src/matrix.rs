//! Sparse parity-check matrices and binary words.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A word over GF(2), one byte (0 or 1) per bit.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BinaryWord(Vec<u8>);

impl BinaryWord {
    /// Builds a word from bytes; any nonzero byte is read as 1.
    pub fn new(bits: Vec<u8>) -> Self {
        BinaryWord(bits.into_iter().map(|b| (b != 0) as u8).collect())
    }

    pub fn zeros(len: usize) -> Self {
        BinaryWord(vec![0; len])
    }

    /// Hard decision from bipolar values: `d > 0` maps to 1.
    pub fn from_bipolar(d: &[i8]) -> Self {
        BinaryWord(d.iter().map(|&x| (x > 0) as u8).collect())
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&b| b == 0)
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b != 0).count()
    }

    pub fn xor(&self, other: &BinaryWord) -> Result<BinaryWord> {
        Error::check_len(self.len(), other.len())?;
        Ok(BinaryWord(
            self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect(),
        ))
    }

    pub fn xor_assign(&mut self, other: &BinaryWord) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a ^= b;
        }
    }

    /// Number of positions where the two words differ.
    pub fn distance(&self, other: &BinaryWord) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }

    /// BPSK symbols `2c - 1`.
    pub fn to_bipolar(&self) -> Vec<f64> {
        self.0.iter().map(|&b| 2.0 * b as f64 - 1.0).collect()
    }
}

impl std::fmt::Display for BinaryWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &b in &self.0 {
            f.write_str(if b != 0 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl From<Vec<u8>> for BinaryWord {
    fn from(bits: Vec<u8>) -> Self {
        BinaryWord::new(bits)
    }
}

/// Sparse M x N binary matrix whose rows are XOR clauses over N variables.
///
/// Stored twice, as sorted row and column adjacency lists. Immutable once
/// built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityCheckMatrix {
    n: usize,
    rows: Vec<Vec<usize>>,
    cols: Vec<Vec<usize>>,
}

impl ParityCheckMatrix {
    /// Builds a matrix from per-row column indices. Rows are sorted; empty
    /// rows, duplicate entries and out-of-range indices are rejected.
    pub fn from_rows(n: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 || rows.is_empty() {
            return Err(Error::invalid(
                "matrix must have at least one row and column",
            ));
        }
        let mut cols = vec![Vec::new(); n];
        let mut sorted = Vec::with_capacity(rows.len());
        for (i, mut row) in rows.into_iter().enumerate() {
            if row.is_empty() {
                return Err(Error::invalid(format!("row {i} is empty")));
            }
            row.sort_unstable();
            if row.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid(format!("row {i} has a duplicate entry")));
            }
            if let Some(&j) = row.last() {
                if j >= n {
                    return Err(Error::invalid(format!(
                        "row {i} references column {j} but n = {n}"
                    )));
                }
            }
            for &j in &row {
                cols[j].push(i);
            }
            sorted.push(row);
        }
        Ok(ParityCheckMatrix {
            n,
            rows: sorted,
            cols,
        })
    }

    /// Builds a matrix from a dense 0/1 array (row-major).
    pub fn from_dense(dense: &[Vec<u8>]) -> Result<Self> {
        let n = dense.first().map_or(0, Vec::len);
        let mut rows = Vec::with_capacity(dense.len());
        for row in dense {
            Error::check_len(n, row.len())?;
            rows.push(
                row.iter()
                    .enumerate()
                    .filter(|(_, &b)| b != 0)
                    .map(|(j, _)| j)
                    .collect(),
            );
        }
        Self::from_rows(n, rows)
    }

    /// The 3-bit majority (repetition) code: clauses u1^u2 and u2^u3.
    pub fn majority() -> Self {
        Self::from_rows(3, vec![vec![0, 1], vec![1, 2]]).expect("valid builtin")
    }

    /// Hamming(7,4) in its standard form with a weight-3 column.
    pub fn hamming74() -> Self {
        Self::from_rows(
            7,
            vec![vec![0, 1, 3, 4], vec![0, 2, 3, 5], vec![1, 2, 3, 6]],
        )
        .expect("valid builtin")
    }

    /// Random (col_degree, row_degree)-regular matrix by socket permutation.
    ///
    /// Permutations that place two edges between the same row and column are
    /// rejected and redrawn. Deterministic for a fixed seed.
    pub fn random_regular(m: usize, n: usize, col_degree: usize, seed: u64) -> Result<Self> {
        if m == 0 || n == 0 || col_degree == 0 {
            return Err(Error::invalid("m, n and col_degree must be positive"));
        }
        let sockets = n * col_degree;
        if !sockets.is_multiple_of(m) {
            return Err(Error::invalid(format!(
                "{n} columns of degree {col_degree} cannot be split evenly over {m} rows"
            )));
        }
        let row_degree = sockets / m;
        if row_degree > n || col_degree > m {
            return Err(Error::invalid("degree exceeds matrix dimension"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut perm: Vec<usize> = (0..sockets).map(|s| s / col_degree).collect();
        const MAX_ATTEMPTS: usize = 100_000;
        for _ in 0..MAX_ATTEMPTS {
            perm.shuffle(&mut rng);
            let rows: Vec<Vec<usize>> = perm.chunks(row_degree).map(<[usize]>::to_vec).collect();
            if let Ok(h) = Self::from_rows(n, rows) {
                return Ok(h);
            }
        }
        Err(Error::invalid(
            "could not draw a regular matrix without repeated edges",
        ))
    }

    /// Looks up one of the embedded codes by name.
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "majority" => Some(Self::majority()),
            "hamming74" | "ham74" => Some(Self::hamming74()),
            "reg32" => Some(Self::random_regular(24, 32, 3, 7).expect("feasible")),
            _ => None,
        }
    }

    pub const BUILTIN_NAMES: &'static [&'static str] = &["majority", "hamming74", "reg32"];

    /// Number of clauses (M).
    pub fn m(&self) -> usize {
        self.rows.len()
    }

    /// Number of variables (N).
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn cols(&self) -> &[Vec<usize>] {
        &self.cols
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.rows[i]
    }

    pub fn col(&self, j: usize) -> &[usize] {
        &self.cols[j]
    }

    pub fn edges(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row_degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().map(Vec::len)
    }

    pub fn col_degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.cols.iter().map(Vec::len)
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let mut dense = vec![vec![0u8; self.n]; self.m()];
        for (i, row) in self.rows.iter().enumerate() {
            for &j in row {
                dense[i][j] = 1;
            }
        }
        dense
    }

    /// Clause parities `H u` over GF(2).
    pub fn syndrome(&self, u: &BinaryWord) -> Result<BinaryWord> {
        Error::check_len(self.n, u.len())?;
        let bits = u.bits();
        Ok(BinaryWord(
            self.rows
                .iter()
                .map(|row| row.iter().fold(0u8, |acc, &j| acc ^ bits[j]))
                .collect(),
        ))
    }

    pub fn is_codeword(&self, u: &BinaryWord) -> Result<bool> {
        Error::check_len(self.n, u.len())?;
        let bits = u.bits();
        Ok(self
            .rows
            .iter()
            .all(|row| row.iter().fold(0u8, |acc, &j| acc ^ bits[j]) == 0))
    }

    /// Number of unsatisfied clauses for a bipolar assignment.
    pub(crate) fn unsatisfied_bipolar(&self, d: &[i8]) -> usize {
        self.rows
            .iter()
            .filter(|row| row.iter().filter(|&&j| d[j] < 0).count() % 2 == 1)
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn dense_syndrome(dense: &[Vec<u8>], u: &[u8]) -> Vec<u8> {
        dense
            .iter()
            .map(|row| {
                (row.iter()
                    .zip(u)
                    .map(|(&h, &b)| (h * b) as u32)
                    .sum::<u32>()
                    % 2) as u8
            })
            .collect()
    }

    #[test]
    fn majority_syndromes() {
        let h = ParityCheckMatrix::majority();
        assert!(h.syndrome(&BinaryWord::zeros(3)).unwrap().is_zero());
        assert!(h
            .syndrome(&BinaryWord::new(vec![1, 1, 1]))
            .unwrap()
            .is_zero());
        assert!(h.is_codeword(&BinaryWord::new(vec![1, 1, 1])).unwrap());
        assert!(!h.is_codeword(&BinaryWord::new(vec![1, 0, 0])).unwrap());
    }

    #[test]
    fn syndrome_matches_dense_oracle() {
        let h = ParityCheckMatrix::random_regular(10, 20, 3, 11).unwrap();
        let dense = h.to_dense();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let u: Vec<u8> = (0..20).map(|_| rng.random_range(0..2)).collect();
            let s = h.syndrome(&BinaryWord::new(u.clone())).unwrap();
            assert_eq!(s.bits(), dense_syndrome(&dense, &u).as_slice());
        }
    }

    #[test]
    fn hamming_codewords_by_enumeration() {
        let h = ParityCheckMatrix::hamming74();
        let dense = h.to_dense();
        let mut valid = 0;
        for w in 0u32..128 {
            let u: Vec<u8> = (0..7).map(|b| ((w >> b) & 1) as u8).collect();
            let oracle = dense_syndrome(&dense, &u).iter().all(|&s| s == 0);
            assert_eq!(h.is_codeword(&BinaryWord::new(u)).unwrap(), oracle);
            valid += oracle as usize;
        }
        assert_eq!(valid, 16);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let h = ParityCheckMatrix::majority();
        assert!(matches!(
            h.syndrome(&BinaryWord::zeros(4)),
            Err(Error::Dimension {
                expected: 3,
                found: 4
            })
        ));
    }

    #[test]
    fn construction_rejects_bad_rows() {
        assert!(ParityCheckMatrix::from_rows(3, vec![vec![0, 1], vec![]]).is_err());
        assert!(ParityCheckMatrix::from_rows(3, vec![vec![0, 0]]).is_err());
        assert!(ParityCheckMatrix::from_rows(3, vec![vec![0, 3]]).is_err());
    }

    #[test]
    fn regular_shape_and_determinism() {
        let h = ParityCheckMatrix::random_regular(24, 32, 3, 7).unwrap();
        assert_eq!((h.m(), h.n()), (24, 32));
        assert!(h.col_degrees().all(|d| d == 3));
        assert!(h.row_degrees().all(|d| d == 4));
        assert_eq!(h, ParityCheckMatrix::random_regular(24, 32, 3, 7).unwrap());
        assert!(ParityCheckMatrix::random_regular(2, 3, 1, 0).is_err());
    }

    fn transpose_consistent(h: &ParityCheckMatrix) -> bool {
        let rows_ok = h
            .rows()
            .iter()
            .enumerate()
            .all(|(i, row)| row.iter().all(|&j| h.col(j).binary_search(&i).is_ok()));
        let cols_ok = h
            .cols()
            .iter()
            .enumerate()
            .all(|(j, col)| col.iter().all(|&i| h.row(i).binary_search(&j).is_ok()));
        let sorted = h.cols().iter().all(|c| c.windows(2).all(|w| w[0] < w[1]));
        rows_ok && cols_ok && sorted
    }

    proptest! {
        #[test]
        fn regular_matrices_are_transpose_consistent(seed in any::<u64>(), m in 2usize..12) {
            let n = 2 * m;
            let h = ParityCheckMatrix::random_regular(m, n, 2, seed).unwrap();
            prop_assert!(transpose_consistent(&h));
        }

        #[test]
        fn dense_matrices_are_transpose_consistent(
            dense in prop::collection::vec(prop::collection::vec(0u8..2, 9), 1..8)
        ) {
            if let Ok(h) = ParityCheckMatrix::from_dense(&dense) {
                prop_assert!(transpose_consistent(&h));
                prop_assert_eq!(h.to_dense(), dense);
            } else {
                prop_assert!(dense.iter().any(|r| r.iter().all(|&b| b == 0)));
            }
        }

        #[test]
        fn syndrome_is_linear(a in prop::collection::vec(0u8..2, 32), b in prop::collection::vec(0u8..2, 32)) {
            let h = ParityCheckMatrix::random_regular(24, 32, 3, 7).unwrap();
            let a = BinaryWord::new(a);
            let b = BinaryWord::new(b);
            let lhs = h.syndrome(&a.xor(&b).unwrap()).unwrap();
            let rhs = h.syndrome(&a).unwrap().xor(&h.syndrome(&b).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
