//! Bit-packed GF(2) elimination. Rows are `u64` word slices, addition is XOR.

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

#[inline]
pub fn words_for(cols: usize) -> usize {
    cols.div_ceil(64)
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = words_for(cols);
        BitMatrix {
            rows,
            cols,
            words,
            data: vec![0; rows * words],
        }
    }

    pub fn from_bits<'a>(cols: usize, rows: impl IntoIterator<Item = &'a [u8]>) -> Self {
        let words = words_for(cols);
        let mut data = Vec::new();
        let mut n = 0;
        for row in rows {
            data.extend(pack(row, words));
            n += 1;
        }
        BitMatrix {
            rows: n,
            cols,
            words,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.words..(i + 1) * self.words]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        let w = &mut self.data[i * self.words + j / 64];
        if v {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    pub fn unpack_row(&self, i: usize) -> Vec<u8> {
        (0..self.cols).map(|j| self.get(i, j) as u8).collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.words {
            self.data.swap(a * self.words + w, b * self.words + w);
        }
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        for w in 0..self.words {
            let v = self.data[src * self.words + w];
            self.data[dst * self.words + w] ^= v;
        }
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(src) = (r..self.rows).find(|&i| self.get(i, c)) else {
                continue;
            };
            self.swap_rows(src, r);
            for i in 0..self.rows {
                if i != r && self.get(i, c) {
                    self.xor_row_into(r, i);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }
}

pub fn pack(row: &[u8], words: usize) -> Vec<u64> {
    let mut out = vec![0u64; words];
    for (j, &b) in row.iter().enumerate() {
        if b & 1 == 1 {
            out[j / 64] |= 1 << (j % 64);
        }
    }
    out
}

#[inline]
pub fn first_set(row: &[u64]) -> Option<usize> {
    row.iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

#[inline]
pub fn bit(row: &[u64], j: usize) -> bool {
    row[j / 64] >> (j % 64) & 1 == 1
}

/// Semi-echelon accumulator: rows are reduced against earlier rows on insert.
#[derive(Clone, Debug)]
pub struct Gf2Echelon {
    cols: usize,
    words: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl Gf2Echelon {
    pub fn new(cols: usize) -> Self {
        Gf2Echelon {
            cols,
            words: words_for(cols),
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn words(&self) -> usize {
        self.words
    }

    pub fn reduce(&self, row: &mut [u64]) {
        for (stored, &p) in self.rows.iter().zip(&self.pivots) {
            if bit(row, p) {
                for (a, b) in row.iter_mut().zip(stored) {
                    *a ^= b;
                }
            }
        }
    }

    /// Returns true when the row was independent of the stored rows.
    pub fn insert_packed(&mut self, mut row: Vec<u64>) -> bool {
        self.reduce(&mut row);
        match first_set(&row) {
            Some(p) => {
                self.rows.push(row);
                self.pivots.push(p);
                true
            }
            None => false,
        }
    }

    pub fn into_matrix(self) -> BitMatrix {
        let mut data = Vec::with_capacity(self.rows.len() * self.words);
        for r in &self.rows {
            data.extend_from_slice(r);
        }
        BitMatrix {
            rows: self.rows.len(),
            cols: self.cols,
            words: self.words,
            data,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_small() {
        let rows: Vec<Vec<u8>> = vec![vec![1, 1, 0], vec![1, 1, 0], vec![0, 1, 1]];
        let mut m = BitMatrix::from_bits(3, rows.iter().map(|r| r.as_slice()));
        let piv = m.rref();
        assert_eq!(piv, vec![0, 1]);
        assert_eq!(m.unpack_row(0), vec![1, 0, 1]);
        assert_eq!(m.unpack_row(1), vec![0, 1, 1]);
        assert_eq!(m.unpack_row(2), vec![0, 0, 0]);
    }

    #[test]
    fn wide_rows_cross_word_boundary() {
        let cols = 130;
        let mut a = vec![0u8; cols];
        a[0] = 1;
        a[129] = 1;
        let mut b = vec![0u8; cols];
        b[64] = 1;
        b[129] = 1;
        let mut e = Gf2Echelon::new(cols);
        assert!(e.insert_packed(pack(&a, e.words())));
        assert!(e.insert_packed(pack(&b, e.words())));
        let sum: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
        assert!(!e.insert_packed(pack(&sum, e.words())));
        assert_eq!(e.rank(), 2);
    }
}
