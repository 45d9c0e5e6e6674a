//! Dense bit-packed linear algebra over GF(2).
//!
//! Vectors pack 64 coordinates per `u64` word; rank computation is plain
//! Gaussian elimination on rows. Dimensions in this crate stay small (a few
//! hundred at most), so no effort is spent on blocking or transposition tricks.

/// Bit vector of fixed length over GF(2).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    #[must_use]
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    /// All-ones vector of the given length.
    #[must_use]
    pub fn ones(len: usize) -> Self {
        let mut v = Self::zeros(len);
        for i in 0..len {
            v.set(i, true);
        }
        v
    }

    #[must_use]
    pub fn from_indices(len: usize, indices: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in indices {
            v.set(i, true);
        }
        v
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.len
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[must_use]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w ^= o;
        }
    }

    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Index of the lowest set bit, if any.
    #[must_use]
    pub fn leading_bit(&self) -> Option<usize> {
        for (k, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(k * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    /// Indices of set bits, ascending.
    #[must_use]
    pub fn support(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.get(i)).collect()
    }

    #[must_use]
    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Concatenation, `self` in the low coordinates.
    #[must_use]
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut v = BitVec::zeros(self.len + other.len);
        for i in 0..self.len {
            v.set(i, self.get(i));
        }
        for i in 0..other.len {
            v.set(self.len + i, other.get(i));
        }
        v
    }

    /// Dot product over GF(2).
    #[must_use]
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot");
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }
}

/// Row-major matrix over GF(2). Rows are the images of domain basis vectors,
/// so `rank()` is the rank of the linear map the rows describe.
#[derive(Clone, Debug)]
pub struct BitMatrix {
    ncols: usize,
    rows: Vec<BitVec>,
}

impl BitMatrix {
    #[must_use]
    pub fn new(ncols: usize) -> Self {
        BitMatrix {
            ncols,
            rows: Vec::new(),
        }
    }

    #[must_use]
    pub fn from_rows(ncols: usize, rows: Vec<BitVec>) -> Self {
        for r in &rows {
            assert_eq!(r.len(), ncols, "row length mismatch");
        }
        BitMatrix { ncols, rows }
    }

    pub fn push_row(&mut self, row: BitVec) {
        assert_eq!(row.len(), self.ncols, "row length mismatch");
        self.rows.push(row);
    }

    #[must_use]
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    #[must_use]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[must_use]
    pub fn row(&self, i: usize) -> &BitVec {
        &self.rows[i]
    }

    /// Matrix with rows and columns swapped.
    #[must_use]
    pub fn transpose(&self) -> BitMatrix {
        let mut rows = vec![BitVec::zeros(self.nrows()); self.ncols];
        for (i, r) in self.rows.iter().enumerate() {
            for j in r.support() {
                rows[j].set(i, true);
            }
        }
        BitMatrix {
            ncols: self.nrows(),
            rows,
        }
    }

    /// Image of `v` under the map whose rows are the images of basis vectors;
    /// equivalently the vector-matrix product `v * self`.
    #[must_use]
    pub fn apply(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.nrows(), "domain dimension mismatch");
        let mut out = BitVec::zeros(self.ncols);
        for i in 0..self.nrows() {
            if v.get(i) {
                out.xor_assign(&self.rows[i]);
            }
        }
        out
    }

    /// Rank by Gaussian elimination on a working copy.
    #[must_use]
    pub fn rank(&self) -> usize {
        let mut work: Vec<BitVec> = self.rows.clone();
        let mut rank = 0;
        for col in 0..self.ncols {
            let Some(p) = (rank..work.len()).find(|&r| work[r].get(col)) else {
                continue;
            };
            work.swap(rank, p);
            let pivot = work[rank].clone();
            for (r, row) in work.iter_mut().enumerate() {
                if r != rank && row.get(col) {
                    row.xor_assign(&pivot);
                }
            }
            rank += 1;
            if rank == work.len() {
                break;
            }
        }
        rank
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitvec_basics() {
        let mut v = BitVec::zeros(130);
        assert!(v.is_zero());
        v.set(0, true);
        v.set(64, true);
        v.set(129, true);
        assert_eq!(v.count_ones(), 3);
        assert_eq!(v.leading_bit(), Some(0));
        assert_eq!(v.support(), vec![0, 64, 129]);
        v.set(0, false);
        assert_eq!(v.leading_bit(), Some(64));
    }

    #[test]
    fn xor_and_dot() {
        let a = BitVec::from_indices(5, &[0, 2, 4]);
        let b = BitVec::from_indices(5, &[2, 3]);
        let mut c = a.clone();
        c.xor_assign(&b);
        assert_eq!(c.support(), vec![0, 3, 4]);
        assert!(a.dot(&b)); // overlap {2}, odd
        assert!(a.dot(&a)); // support has odd size
        assert!(!b.dot(&b)); // support has even size
    }

    #[test]
    fn rank_of_small_matrices() {
        // identity 3x3
        let id = BitMatrix::from_rows(3, (0..3).map(|i| BitVec::from_indices(3, &[i])).collect());
        assert_eq!(id.rank(), 3);

        // rows (1,1,0), (0,1,1), (1,0,1): third = sum of first two
        let m = BitMatrix::from_rows(
            3,
            vec![
                BitVec::from_indices(3, &[0, 1]),
                BitVec::from_indices(3, &[1, 2]),
                BitVec::from_indices(3, &[0, 2]),
            ],
        );
        assert_eq!(m.rank(), 2);
        assert_eq!(m.transpose().rank(), 2);
    }

    #[test]
    fn apply_matches_row_combination() {
        let m = BitMatrix::from_rows(
            4,
            vec![
                BitVec::from_indices(4, &[0, 1]),
                BitVec::from_indices(4, &[1, 2]),
                BitVec::from_indices(4, &[2, 3]),
            ],
        );
        let v = BitVec::from_indices(3, &[0, 2]);
        assert_eq!(m.apply(&v).support(), vec![0, 1, 2, 3]);
    }
}
