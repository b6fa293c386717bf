//! Row-major Boolean matrices with rows padded to 8, 16, 32 or a multiple of 64 bits.

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BoolMatrix {
    rows: usize,
    cols: usize,
    row_bytes: usize,
    data: Vec<u8>,
}

/// Bytes per row for `cols` columns.
pub fn padded_row_bytes(cols: usize) -> usize {
    match cols {
        0..=8 => 1,
        9..=16 => 2,
        17..=32 => 4,
        _ => cols.div_ceil(64) * 8,
    }
}

/// `dst |= src` over equally sized rows, a machine word at a time when the
/// rows are at least one word wide.
#[inline]
pub fn or_row(dst: &mut [u8], src: &[u8]) {
    debug_assert_eq!(dst.len(), src.len());
    match src.len() {
        1 => dst[0] |= src[0],
        2 => {
            let v = u16::from_ne_bytes([dst[0], dst[1]]) | u16::from_ne_bytes([src[0], src[1]]);
            dst.copy_from_slice(&v.to_ne_bytes());
        }
        4 => {
            let v = u32::from_ne_bytes(dst[..4].try_into().unwrap()) | u32::from_ne_bytes(src[..4].try_into().unwrap());
            dst.copy_from_slice(&v.to_ne_bytes());
        }
        _ => {
            for (d, s) in dst.chunks_exact_mut(8).zip(src.chunks_exact(8)) {
                let v = u64::from_ne_bytes(d.try_into().unwrap()) | u64::from_ne_bytes(s.try_into().unwrap());
                d.copy_from_slice(&v.to_ne_bytes());
            }
        }
    }
}

impl BoolMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let row_bytes = padded_row_bytes(cols);
        BoolMatrix { rows, cols, row_bytes, data: vec![0; rows * row_bytes] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if f(r, c) {
                    m.set(r, c);
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row_bytes(&self) -> usize {
        self.row_bytes
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.row_bytes + c / 8] >> (c % 8) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize) {
        assert!(r < self.rows && c < self.cols);
        self.data[r * self.row_bytes + c / 8] |= 1 << (c % 8);
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u8] {
        &self.data[r * self.row_bytes..(r + 1) * self.row_bytes]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [u8] {
        &mut self.data[r * self.row_bytes..(r + 1) * self.row_bytes]
    }

    /// Column indices set in row `r`, ascending.
    pub fn row_ones(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        row_ones(self.row(r))
    }

    /// Boolean product: each set bit `(r, k)` of `self` ORs row `k` of
    /// `other` into row `r` of the result.
    pub fn multiply(&self, other: &BoolMatrix) -> Result<BoolMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { left_cols: self.cols, right_rows: other.rows });
        }
        let mut out = BoolMatrix::zeros(self.rows, other.cols);
        let rb = out.row_bytes;
        for r in 0..self.rows {
            let dst = &mut out.data[r * rb..(r + 1) * rb];
            for k in row_ones(&self.data[r * self.row_bytes..(r + 1) * self.row_bytes]) {
                or_row(dst, other.row(k));
            }
        }
        Ok(out)
    }

    pub(crate) fn rows_split(&mut self, at: usize) -> (&mut [u8], &[u8]) {
        let (a, b) = self.data.split_at_mut(at);
        (a, b)
    }

    /// Heap bytes held by the matrix.
    pub fn bytes(&self) -> usize {
        self.data.len()
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(|b| b.count_ones() as usize).sum()
    }
}

pub fn row_ones(row: &[u8]) -> impl Iterator<Item = usize> + '_ {
    row.iter().enumerate().flat_map(|(i, &b)| {
        let mut b = b;
        std::iter::from_fn(move || {
            if b == 0 {
                return None;
            }
            let t = b.trailing_zeros() as usize;
            b &= b - 1;
            Some(i * 8 + t)
        })
    })
}

/// A borrowed row-major matrix with the same row padding as [`BoolMatrix`].
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct MatrixRef<'m> {
    rows: usize,
    cols: usize,
    row_bytes: usize,
    data: &'m [u8],
}

impl<'m> MatrixRef<'m> {
    pub fn new(rows: usize, cols: usize, data: &'m [u8]) -> Self {
        let row_bytes = padded_row_bytes(cols);
        assert_eq!(data.len(), rows * row_bytes);
        MatrixRef { rows, cols, row_bytes, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row_bytes(&self) -> usize {
        self.row_bytes
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.row_bytes + c / 8] >> (c % 8) & 1 == 1
    }

    #[inline]
    pub fn row(&self, r: usize) -> &'m [u8] {
        &self.data[r * self.row_bytes..(r + 1) * self.row_bytes]
    }

    pub fn to_matrix(&self) -> BoolMatrix {
        BoolMatrix { rows: self.rows, cols: self.cols, row_bytes: self.row_bytes, data: self.data.to_vec() }
    }
}

impl BoolMatrix {
    pub fn as_ref(&self) -> MatrixRef<'_> {
        MatrixRef { rows: self.rows, cols: self.cols, row_bytes: self.row_bytes, data: &self.data }
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }
}

impl std::fmt::Debug for MatrixRef<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.to_matrix().fmt(f)
    }
}

impl std::fmt::Debug for BoolMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BoolMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let line: String = (0..self.cols).map(|c| if self.get(r, c) { '1' } else { '.' }).collect();
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

/// Free-function form of [`BoolMatrix::multiply`].
pub fn bool_matrix_multiply(a: &BoolMatrix, b: &BoolMatrix) -> Result<BoolMatrix> {
    a.multiply(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn padding_widths() {
        assert_eq!(padded_row_bytes(1), 1);
        assert_eq!(padded_row_bytes(9), 2);
        assert_eq!(padded_row_bytes(32), 4);
        assert_eq!(padded_row_bytes(33), 8);
        assert_eq!(padded_row_bytes(65), 16);
    }

    #[test]
    fn identity_and_zero() {
        let a = BoolMatrix::from_fn(5, 7, |r, c| (r * 3 + c) % 4 == 0);
        assert_eq!(a.multiply(&BoolMatrix::identity(7)).unwrap(), a);
        let z = BoolMatrix::zeros(3, 5);
        assert_eq!(z.multiply(&a).unwrap(), BoolMatrix::zeros(3, 7));
        assert_eq!(a.multiply(&a), Err(Error::DimensionMismatch { left_cols: 7, right_rows: 5 }));
    }
}
