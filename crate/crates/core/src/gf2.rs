//! Dense GF(2) elimination: rank and a generator basis for the code space.

use crate::matrix::{BinaryWord, ParityCheckMatrix};

/// Bit-packed dense row.
#[derive(Clone, Debug)]
struct BitRow(Vec<u64>);

impl BitRow {
    fn zeros(len: usize) -> Self {
        BitRow(vec![0; len.div_ceil(64)])
    }

    fn get(&self, j: usize) -> bool {
        self.0[j / 64] >> (j % 64) & 1 == 1
    }

    fn set(&mut self, j: usize) {
        self.0[j / 64] |= 1 << (j % 64);
    }

    fn xor_with(&mut self, other: &BitRow) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a ^= b;
        }
    }
}

/// Generator basis for the null space of H.
#[derive(Clone, Debug)]
pub struct Generator {
    rows: Vec<BinaryWord>,
    rank: usize,
    n: usize,
}

impl Generator {
    /// k x N basis; every row is a codeword.
    pub fn rows(&self) -> &[BinaryWord] {
        &self.rows
    }

    /// Code dimension k = N - rank(H).
    pub fn k(&self) -> usize {
        self.rows.len()
    }

    /// GF(2) rank of the parity-check matrix.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n as f64
    }

    /// Sum of the basis rows selected by the low bits of `message`
    /// (row r included iff `message[r] != 0`).
    pub fn encode(&self, message: &[u8]) -> BinaryWord {
        let mut word = BinaryWord::zeros(self.n);
        for (row, &bit) in self.rows.iter().zip(message) {
            if bit != 0 {
                word.xor_assign(row);
            }
        }
        word
    }
}

/// Reduces H to row-echelon form and returns the pivot columns together
/// with the reduced rows.
fn reduce(h: &ParityCheckMatrix) -> (Vec<BitRow>, Vec<usize>) {
    let n = h.n();
    let mut rows: Vec<BitRow> = h
        .rows()
        .iter()
        .map(|r| {
            let mut b = BitRow::zeros(n);
            for &j in r {
                b.set(j);
            }
            b
        })
        .collect();
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..n {
        if next == rows.len() {
            break;
        }
        let Some(p) = (next..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(next, p);
        let pivot = rows[next].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != next && row.get(col) {
                row.xor_with(&pivot);
            }
        }
        pivots.push(col);
        next += 1;
    }
    rows.truncate(next);
    (rows, pivots)
}

pub fn rank(h: &ParityCheckMatrix) -> usize {
    reduce(h).1.len()
}

/// Generator basis from the reduced row-echelon form of H.
///
/// Each free (non-pivot) column contributes one basis vector: the free bit
/// set, the other free bits clear, and each pivot bit equal to that row's
/// entry in the free column. Rank-deficient matrices simply give larger k.
pub fn gaussian_generator(h: &ParityCheckMatrix) -> Generator {
    let n = h.n();
    let (reduced, pivots) = reduce(h);
    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let rows = (0..n)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut bits = vec![0u8; n];
            bits[f] = 1;
            for (row, &p) in reduced.iter().zip(&pivots) {
                if row.get(f) {
                    bits[p] = 1;
                }
            }
            BinaryWord::new(bits)
        })
        .collect();
    Generator {
        rows,
        rank: pivots.len(),
        n,
    }
}
