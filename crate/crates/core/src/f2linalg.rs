//! Dense linear algebra over GF(2) with rows packed into `u64` words.
//!
//! Matrices represent maps on column vectors: a map `F2^n -> F2^m` is an
//! `m x n` matrix and `apply` computes `A x`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const WORD: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinAlgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// A vector in `F2^len`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { len, words: vec![0; words_for(len)] }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_indices(len: usize, ones: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in ones {
            v.flip(i);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Parses a string of `0`/`1` characters; other characters are ignored.
    pub fn parse(s: &str) -> Self {
        let bits: Vec<bool> = s.chars().filter(|c| *c == '0' || *c == '1').map(|c| c == '1').collect();
        Self::from_bools(&bits)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn add_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "adding vectors of different length");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn add(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "dot of vectors of different length");
        let mut acc = 0u32;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= (a & b).count_ones() & 1;
        }
        acc == 1
    }

    pub fn first_one(&self) -> Option<usize> {
        for (wi, w) in self.words.iter().enumerate() {
            if *w != 0 {
                return Some(wi * WORD + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD + t)
                }
            })
        })
    }

    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.len + other.len);
        for i in self.ones() {
            out.set(i, true);
        }
        for i in other.ones() {
            out.set(self.len + i, true);
        }
        out
    }

    pub fn slice(&self, start: usize, end: usize) -> BitVec {
        let mut out = BitVec::zeros(end - start);
        for i in self.ones().filter(|&i| i >= start && i < end) {
            out.set(i - start, true);
        }
        out
    }

    fn words(&self) -> &[u64] {
        &self.words
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
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A dense `rows x cols` matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        BitMatrix { rows, cols, stride, data: vec![0; rows * stride] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(cols: usize, rows: &[BitVec]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (r, v) in rows.iter().enumerate() {
            assert_eq!(v.len(), cols, "row length mismatch");
            m.row_words_mut(r).copy_from_slice(v.words());
        }
        m
    }

    pub fn from_cols(rows: usize, cols: &[BitVec]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (c, v) in cols.iter().enumerate() {
            assert_eq!(v.len(), rows, "column length mismatch");
            for r in v.ones() {
                m.set(r, c, true);
            }
        }
        m
    }

    /// Parses rows such as `["101", "011"]`.
    pub fn parse(cols: usize, rows: &[&str]) -> Self {
        let vs: Vec<BitVec> = rows.iter().map(|r| BitVec::parse(r)).collect();
        Self::from_rows(cols, &vs)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        (self.data[r * self.stride + c / WORD] >> (c % WORD)) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        let mask = 1u64 << (c % WORD);
        let w = &mut self.data[r * self.stride + c / WORD];
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        if src == dst {
            return;
        }
        let s = self.stride;
        let (a, b) = if src < dst {
            let (lo, hi) = self.data.split_at_mut(dst * s);
            (&lo[src * s..src * s + s], &mut hi[..s])
        } else {
            let (lo, hi) = self.data.split_at_mut(src * s);
            (&hi[..s], &mut lo[dst * s..dst * s + s])
        };
        for (d, x) in b.iter_mut().zip(a) {
            *d ^= *x;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.data.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    pub fn row(&self, r: usize) -> BitVec {
        BitVec { len: self.cols, words: self.row_words(r).to_vec() }
    }

    pub fn col(&self, c: usize) -> BitVec {
        let mut v = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, c) {
                v.set(r, true);
            }
        }
        v
    }

    pub fn row_vectors(&self) -> Vec<BitVec> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn col_vectors(&self) -> Vec<BitVec> {
        (0..self.cols).map(|c| self.col(c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|w| *w == 0)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.row(r).ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    /// `A x` for a column vector `x` of length `cols`.
    pub fn apply(&self, x: &BitVec) -> BitVec {
        assert_eq!(x.len(), self.cols, "apply: vector length {} vs {} columns", x.len(), self.cols);
        let mut out = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            let mut acc = 0u32;
            for (a, b) in self.row_words(r).iter().zip(x.words()) {
                acc ^= (a & b).count_ones() & 1;
            }
            if acc == 1 {
                out.set(r, true);
            }
        }
        out
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, rhs.rows, "mul: inner dimensions {} and {}", self.cols, rhs.rows);
        let mut out = BitMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in self.row(r).ones() {
                let dst = out.row_words_mut(r);
                for (d, s) in dst.iter_mut().zip(rhs.row_words(k)) {
                    *d ^= *s;
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &BitMatrix) -> BitMatrix {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols, "add: shape mismatch");
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a ^= *b;
        }
        out
    }

    pub fn vstack(&self, below: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, below.cols, "vstack: column mismatch");
        let mut out = self.clone();
        out.rows += below.rows;
        out.data.extend_from_slice(&below.data);
        out
    }

    pub fn hstack(&self, right: &BitMatrix) -> BitMatrix {
        assert_eq!(self.rows, right.rows, "hstack: row mismatch");
        let rows: Vec<BitVec> = (0..self.rows).map(|r| self.row(r).concat(&right.row(r))).collect();
        BitMatrix::from_rows(self.cols + right.cols, &rows)
    }

    /// Reduced row echelon form and the pivot column of each nonzero row.
    pub fn rref_with_pivots(&self) -> (BitMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| m.get(r, col)) else { continue };
            m.swap_rows(p, row);
            for r in 0..m.rows {
                if r != row && m.get(r, col) {
                    m.xor_row_into(row, r);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rref(&self) -> (BitMatrix, usize) {
        let (m, p) = self.rref_with_pivots();
        (m, p.len())
    }

    pub fn rank(&self) -> usize {
        self.rref().1
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Option<BitMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(BitMatrix::zeros(0, 0));
        }
        let (r, pivots) = self.hstack(&BitMatrix::identity(n)).rref_with_pivots();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        let rows: Vec<BitVec> = (0..n).map(|i| r.row(i).slice(n, 2 * n)).collect();
        Some(BitMatrix::from_rows(n, &rows))
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {}", self.row(r))?;
        }
        write!(f, "]")
    }
}

/// One solution of `A x = b`, or `None` when the system is inconsistent.
pub fn solve(a: &BitMatrix, b: &BitVec) -> Result<Option<BitVec>, LinAlgError> {
    if b.len() != a.rows() {
        return Err(LinAlgError::DimensionMismatch { expected: a.rows(), found: b.len() });
    }
    let aug = a.hstack(&BitMatrix::from_cols(a.rows(), std::slice::from_ref(b)));
    let (r, pivots) = aug.rref_with_pivots();
    let n = a.cols();
    if pivots.last() == Some(&n) {
        return Ok(None);
    }
    let mut x = BitVec::zeros(n);
    for (i, &p) in pivots.iter().enumerate() {
        if r.get(i, n) {
            x.set(p, true);
        }
    }
    Ok(Some(x))
}

/// Coordinates of `v` in terms of the given vectors, if `v` lies in their span.
pub fn coordinates(vectors: &[BitVec], v: &BitVec) -> Option<BitVec> {
    let a = BitMatrix::from_cols(v.len(), vectors);
    solve(&a, v).expect("lengths agree by construction")
}

/// Kernel of `A`, as a subspace of `F2^cols`.
pub fn kernel(a: &BitMatrix) -> Subspace {
    let (r, pivots) = a.rref_with_pivots();
    let mut is_pivot = vec![false; a.cols()];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for f in (0..a.cols()).filter(|&c| !is_pivot[c]) {
        let mut v = BitVec::unit(a.cols(), f);
        for (i, &p) in pivots.iter().enumerate() {
            if r.get(i, f) {
                v.set(p, true);
            }
        }
        basis.push(v);
    }
    Subspace::from_spanning(a.cols(), &basis)
}

/// Column space of `A`, as a subspace of `F2^rows`.
pub fn image(a: &BitMatrix) -> Subspace {
    Subspace::from_spanning(a.rows(), &a.col_vectors())
}

/// `{x : A x in s}`.
pub fn preimage(a: &BitMatrix, s: &Subspace) -> Subspace {
    assert_eq!(a.rows(), s.ambient(), "preimage: target mismatch");
    let ann = s.annihilator();
    let p = BitMatrix::from_rows(s.ambient(), ann.basis());
    kernel(&p.mul(a))
}

pub fn intersect(a: &Subspace, b: &Subspace) -> Subspace {
    a.intersect(b)
}

/// A complement of `inner` inside `ambient`, chosen greedily from the
/// reduced basis of `ambient`.
pub fn complement(inner: &Subspace, ambient: &Subspace) -> Subspace {
    Subspace::from_spanning(inner.ambient(), &complement_vectors(inner, ambient.basis()))
}

/// The vectors of `candidates`, in order, that are independent of `inner`
/// and of the previously chosen candidates.
pub fn complement_vectors(inner: &Subspace, candidates: &[BitVec]) -> Vec<BitVec> {
    let mut ech = Echelon::new(inner.ambient());
    for v in inner.basis() {
        ech.insert(v.clone());
    }
    candidates.iter().filter(|v| ech.insert((*v).clone())).cloned().collect()
}

/// Incremental echelon basis used for independence tests.
#[derive(Clone, Debug)]
pub struct Echelon {
    ambient: usize,
    rows: Vec<(usize, BitVec)>,
}

impl Echelon {
    pub fn new(ambient: usize) -> Self {
        Echelon { ambient, rows: Vec::new() }
    }

    pub fn reduce(&self, v: &BitVec) -> BitVec {
        let mut v = v.clone();
        for (p, r) in &self.rows {
            if v.get(*p) {
                v.add_assign(r);
            }
        }
        v
    }

    /// Inserts `v`, returning whether it was independent.
    pub fn insert(&mut self, v: BitVec) -> bool {
        assert_eq!(v.len(), self.ambient, "echelon: ambient mismatch");
        let v = self.reduce(&v);
        match v.first_one() {
            None => false,
            Some(p) => {
                for (_, r) in self.rows.iter_mut() {
                    if r.get(p) {
                        r.add_assign(&v);
                    }
                }
                self.rows.push((p, v));
                true
            }
        }
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).is_zero()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduced rows with their pivot columns, in insertion order.
    pub fn pivot_rows(&self) -> &[(usize, BitVec)] {
        &self.rows
    }
}

/// A linear subspace of `F2^ambient`, stored by its reduced row echelon basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<BitVec>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Self::from_spanning(ambient, &(0..ambient).map(|i| BitVec::unit(ambient, i)).collect::<Vec<_>>())
    }

    pub fn from_spanning(ambient: usize, vectors: &[BitVec]) -> Self {
        if vectors.is_empty() {
            return Self::zero(ambient);
        }
        let (r, pivots) = BitMatrix::from_rows(ambient, vectors).rref_with_pivots();
        let basis = (0..pivots.len()).map(|i| r.row(i)).collect();
        Subspace { ambient, basis, pivots }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BitVec] {
        &self.basis
    }

    /// Reduces `v` against the basis; the result is zero iff `v` is in the subspace.
    pub fn reduce(&self, v: &BitVec) -> BitVec {
        let mut v = v.clone();
        for (b, &p) in self.basis.iter().zip(&self.pivots) {
            if v.get(p) {
                v.add_assign(b);
            }
        }
        v
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).is_zero()
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.iter().all(|b| other.contains(b))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut all = self.basis.clone();
        all.extend_from_slice(&other.basis);
        Subspace::from_spanning(self.ambient, &all)
    }

    /// Vectors orthogonal to every basis vector.
    pub fn annihilator(&self) -> Subspace {
        kernel(&BitMatrix::from_rows(self.ambient, &self.basis))
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        let mut rows = self.annihilator().basis;
        rows.extend(other.annihilator().basis);
        kernel(&BitMatrix::from_rows(self.ambient, &rows))
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in {}: ", self.dim(), self.ambient)?;
        f.debug_list().entries(self.basis.iter().map(|b| b.to_string())).finish()?;
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_of_small_matrix() {
        let m = BitMatrix::parse(3, &["110", "011", "101"]);
        let (r, rank) = m.rref();
        assert_eq!(rank, 2);
        assert_eq!(r.row(0), BitVec::parse("101"));
        assert_eq!(r.row(1), BitVec::parse("011"));
        assert!(r.row(2).is_zero());
    }

    #[test]
    fn kernel_of_rank_two() {
        let m = BitMatrix::parse(3, &["110", "011"]);
        let k = kernel(&m);
        assert_eq!(k.dim(), 1);
        assert!(k.contains(&BitVec::parse("111")));
    }

    #[test]
    fn solve_consistent_and_not() {
        let m = BitMatrix::parse(2, &["10", "10"]);
        assert!(solve(&m, &BitVec::parse("11")).unwrap().is_some());
        assert!(solve(&m, &BitVec::parse("10")).unwrap().is_none());
        assert!(solve(&m, &BitVec::parse("1")).is_err());
    }

    #[test]
    fn words_span_boundaries() {
        let n = 130;
        let mut m = BitMatrix::identity(n);
        m.set(0, 129, true);
        assert_eq!(m.rank(), n);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), BitMatrix::identity(n));
        let v = BitVec::from_indices(n, &[64, 128]);
        assert_eq!(v.ones().collect::<Vec<_>>(), vec![64, 128]);
        assert_eq!(v.concat(&v).weight(), 4);
    }

    #[test]
    fn complement_and_intersection() {
        let a = Subspace::from_spanning(3, &[BitVec::parse("110")]);
        let b = Subspace::from_spanning(3, &[BitVec::parse("011"), BitVec::parse("110")]);
        assert_eq!(a.intersect(&b).dim(), 1);
        let c = complement(&a, &Subspace::full(3));
        assert_eq!(c.dim(), 2);
        assert_eq!(a.sum(&c).dim(), 3);
    }

    #[test]
    fn preimage_of_line() {
        let a = BitMatrix::parse(2, &["10", "01", "11"]);
        let s = Subspace::from_spanning(3, &[BitVec::parse("101")]);
        let p = preimage(&a, &s);
        assert_eq!(p.dim(), 1);
        assert!(p.contains(&BitVec::parse("10")));
    }
}
