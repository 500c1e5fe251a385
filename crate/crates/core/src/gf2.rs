//! Dense GF(2) vectors and matrices with bit-packed rows.
//!
//! Row `i` of an operator matrix is the parity held by qubit `i`. All public
//! operations are value-semantic unless their name says otherwise
//! (`add_row`, `swap_rows`, `set`, ...).

use std::fmt;
use std::str::FromStr;

use crate::error::{parse_err, Error, Result};

const WORD: usize = 64;

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

#[inline]
pub(crate) fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= *s;
    }
}

#[inline]
pub(crate) fn weight_of(words: &[u64]) -> u32 {
    words.iter().map(|w| w.count_ones()).sum()
}

/// Hamming weight of `a ^ b` without materializing the sum.
#[inline]
pub(crate) fn xor_weight(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x ^ y).count_ones()).sum()
}

#[inline]
pub(crate) fn get_bit(words: &[u64], i: usize) -> bool {
    (words[i / WORD] >> (i % WORD)) & 1 == 1
}

#[inline]
pub(crate) fn flip_bit(words: &mut [u64], i: usize) {
    words[i / WORD] ^= 1 << (i % WORD);
}

/// Iterates the indices of the set bits of a packed word slice.
pub(crate) fn ones_of(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(wi, &w)| {
        let mut rest = w;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD + b)
            }
        })
    })
}

/// A GF(2) vector of fixed length.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// The canonical vector `e_i`.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_indices(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.flip(i);
        }
        v
    }

    pub(crate) fn from_words(len: usize, words: &[u64]) -> Self {
        debug_assert_eq!(words.len(), words_for(len));
        Self {
            len,
            words: words.to_vec(),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        get_bit(&self.words, i)
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        if get_bit(&self.words, i) != value {
            flip_bit(&mut self.words, i);
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        flip_bit(&mut self.words, i);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "length mismatch");
        xor_into(&mut self.words, &other.words);
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        weight_of(&self.words) as usize
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        ones_of(&self.words)
    }

    /// First `len` bits of `self`.
    pub fn truncated(&self, len: usize) -> BitVec {
        assert!(len <= self.len);
        let mut out = BitVec::zeros(len);
        let full = len / WORD;
        out.words[..full].copy_from_slice(&self.words[..full]);
        if !len.is_multiple_of(WORD) {
            out.words[full] = self.words[full] & ((1u64 << (len % WORD)) - 1);
        }
        out
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if get_bit(&self.words, i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitVec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut v = BitVec::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                other => return Err(parse_err(1, format!("unexpected character {other:?}"))),
            }
        }
        Ok(v)
    }
}

/// Dense GF(2) matrix, row-major with bit-packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    n_rows: usize,
    n_cols: usize,
    stride: usize,
    data: Vec<u64>,
}

/// Factors of a row-pivoted LU decomposition.
///
/// `permutation_matrix(&perm) * lower * upper` reproduces the factored input,
/// i.e. row `i` of the input equals row `perm[i]` of `lower * upper`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PluFactors {
    pub perm: Vec<usize>,
    pub lower: BitMatrix,
    pub upper: BitMatrix,
}

impl PluFactors {
    pub fn recompose(&self) -> BitMatrix {
        self.lower.mul(&self.upper).expect("square factors").permute_rows(&self.perm)
    }
}

impl BitMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        let stride = words_for(n_cols);
        Self {
            n_rows,
            n_cols,
            stride,
            data: vec![0; n_rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Square matrix with `m[i][perm[i]] = 1`, so `(P * A)[i] = A[perm[i]]`.
    pub fn permutation(perm: &[usize]) -> Self {
        let mut m = Self::zeros(perm.len(), perm.len());
        for (i, &p) in perm.iter().enumerate() {
            m.set(i, p, true);
        }
        m
    }

    pub fn from_rows(rows: &[BitVec]) -> Result<Self> {
        let n_cols = rows.first().map_or(0, BitVec::len);
        let mut m = Self::zeros(rows.len(), n_cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n_cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} bits, expected {n_cols}",
                    r.len()
                )));
            }
            m.row_mut(i).copy_from_slice(r.words());
        }
        Ok(m)
    }

    pub fn from_fn(n_rows: usize, n_cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(n_rows, n_cols);
        for i in 0..n_rows {
            for j in 0..n_cols {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.n_rows && j < self.n_cols);
        get_bit(self.row(i), j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.n_rows && j < self.n_cols, "index ({i},{j}) out of range");
        if self.get(i, j) != value {
            flip_bit(self.row_mut(i), j);
        }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.stride..(i + 1) * self.stride]
    }

    pub fn row_vec(&self, i: usize) -> BitVec {
        BitVec::from_words(self.n_cols, self.row(i))
    }

    pub fn rows(&self) -> Vec<BitVec> {
        (0..self.n_rows).map(|i| self.row_vec(i)).collect()
    }

    /// In place: `row[target] ^= row[control]`, the action of `CNOT(control, target)`.
    pub fn add_row(&mut self, target: usize, control: usize) {
        assert_ne!(target, control);
        let s = self.stride;
        let (t, c) = (target * s, control * s);
        if t < c {
            let (lo, hi) = self.data.split_at_mut(c);
            xor_into(&mut lo[t..t + s], &hi[..s]);
        } else {
            let (lo, hi) = self.data.split_at_mut(t);
            xor_into(&mut hi[..s], &lo[c..c + s]);
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let s = self.stride;
        let (lo, hi) = (a.min(b), a.max(b));
        let (x, y) = self.data.split_at_mut(hi * s);
        x[lo * s..lo * s + s].swap_with_slice(&mut y[..s]);
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.n_cols, self.n_rows);
        for i in 0..self.n_rows {
            for j in ones_of(self.row(i)) {
                flip_bit(t.row_mut(j), i);
            }
        }
        t
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.n_cols != other.n_rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.n_rows, self.n_cols, other.n_rows, other.n_cols
            )));
        }
        let mut out = BitMatrix::zeros(self.n_rows, other.n_cols);
        for i in 0..self.n_rows {
            let (row_start, stride) = (i * out.stride, out.stride);
            for k in ones_of(self.row(i)) {
                xor_into(&mut out.data[row_start..row_start + stride], other.row(k));
            }
        }
        Ok(out)
    }

    /// `result[i] = self[perm[i]]`, i.e. `permutation(perm) * self`.
    pub fn permute_rows(&self, perm: &[usize]) -> BitMatrix {
        assert_eq!(perm.len(), self.n_rows);
        let mut out = BitMatrix::zeros(self.n_rows, self.n_cols);
        for (i, &p) in perm.iter().enumerate() {
            out.row_mut(i).copy_from_slice(self.row(p));
        }
        out
    }

    /// Simultaneous row and column reordering: `result[i][j] = self[order[i]][order[j]]`.
    pub fn reorder(&self, order: &[usize]) -> BitMatrix {
        assert!(self.is_square() && order.len() == self.n_rows);
        BitMatrix::from_fn(self.n_rows, self.n_cols, |i, j| self.get(order[i], order[j]))
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> BitMatrix {
        let (r0, c0) = (rows.start, cols.start);
        BitMatrix::from_fn(rows.len(), cols.len(), |i, j| self.get(r0 + i, c0 + j))
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && (0..self.n_rows).all(|i| ones_of(self.row(i)).eq(std::iter::once(i)))
    }

    pub fn is_unit_lower_triangular(&self) -> bool {
        self.is_square()
            && (0..self.n_rows).all(|i| self.get(i, i) && ones_of(self.row(i)).all(|j| j <= i))
    }

    pub fn is_unit_upper_triangular(&self) -> bool {
        self.is_square()
            && (0..self.n_rows).all(|i| self.get(i, i) && ones_of(self.row(i)).all(|j| j >= i))
    }

    /// GF(2) rank; the input is left untouched.
    pub fn rank(&self) -> usize {
        let mut work = self.clone();
        let mut rank = 0;
        for col in 0..self.n_cols {
            let Some(pivot) = (rank..self.n_rows).find(|&r| work.get(r, col)) else {
                continue;
            };
            work.swap_rows(rank, pivot);
            for r in rank + 1..self.n_rows {
                if work.get(r, col) {
                    work.add_row(r, rank);
                }
            }
            rank += 1;
            if rank == self.n_rows {
                break;
            }
        }
        rank
    }

    pub fn inverse(&self) -> Result<BitMatrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "inverse of a {}x{} matrix",
                self.n_rows, self.n_cols
            )));
        }
        let n = self.n_rows;
        let mut work = self.clone();
        let mut inv = BitMatrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| work.get(r, col)).ok_or(Error::SingularMatrix)?;
            work.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            for r in 0..n {
                if r != col && work.get(r, col) {
                    work.add_row(r, col);
                    inv.add_row(r, col);
                }
            }
        }
        Ok(inv)
    }

    /// LU decomposition with row pivoting. The pivot of column `j` is the first
    /// row at or below `j` holding a one in that column.
    pub fn plu_decompose(&self) -> Result<PluFactors> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("plu of a non-square matrix".into()));
        }
        let n = self.n_rows;
        let mut upper = self.clone();
        let mut lower = BitMatrix::zeros(n, n);
        // rows[i] = index of the input row currently at position i
        let mut rows: Vec<usize> = (0..n).collect();
        for j in 0..n {
            let pivot = (j..n).find(|&r| upper.get(r, j)).ok_or(Error::SingularMatrix)?;
            if pivot != j {
                upper.swap_rows(j, pivot);
                lower.swap_rows(j, pivot);
                rows.swap(j, pivot);
            }
            for r in j + 1..n {
                if upper.get(r, j) {
                    upper.add_row(r, j);
                    lower.set(r, j, true);
                }
            }
        }
        for i in 0..n {
            lower.set(i, i, true);
        }
        let mut perm = vec![0; n];
        for (pos, &orig) in rows.iter().enumerate() {
            perm[orig] = pos;
        }
        Ok(PluFactors { perm, lower, upper })
    }

    /// Whether the leading `k x k` block is invertible.
    pub fn leading_minor_invertible(&self, k: usize) -> bool {
        assert!(k >= 1 && k <= self.n_rows.min(self.n_cols), "minor order {k} out of range");
        self.submatrix(0..k, 0..k).rank() == k
    }

    /// Text form: a `"n m"` header, then one line of `0`/`1` characters per row.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n_rows, self.n_cols);
        for i in 0..self.n_rows {
            s.push_str(&self.row_vec(i).to_string());
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<BitMatrix> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
        let dims: Vec<&str> = header.split_whitespace().collect();
        let parse_dim = |s: &str| s.parse::<usize>().map_err(|_| parse_err(1, format!("bad dimension {s:?}")));
        let (n_rows, n_cols) = match dims.as_slice() {
            [r, c] => (parse_dim(r)?, parse_dim(c)?),
            _ => return Err(parse_err(1, "header must be \"n m\"")),
        };
        let mut m = BitMatrix::zeros(n_rows, n_cols);
        for i in 0..n_rows {
            let (lineno, line) = lines
                .next()
                .ok_or_else(|| parse_err(i + 2, format!("expected {n_rows} rows, found {i}")))?;
            let line = line.trim();
            if line.len() != n_cols {
                return Err(parse_err(
                    lineno + 1,
                    format!("row has {} entries, expected {n_cols}", line.len()),
                ));
            }
            for (j, c) in line.chars().enumerate() {
                match c {
                    '0' => {}
                    '1' => m.set(i, j, true),
                    other => return Err(parse_err(lineno + 1, format!("unexpected character {other:?}"))),
                }
            }
        }
        if let Some((lineno, _)) = lines.next() {
            return Err(parse_err(lineno + 1, "trailing data after matrix rows"));
        }
        Ok(m)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.n_rows, self.n_cols)?;
        for i in 0..self.n_rows {
            writeln!(f, "  {}", self.row_vec(i))?;
        }
        write!(f, "]")
    }
}

impl FromStr for BitMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BitMatrix::from_text(s)
    }
}
