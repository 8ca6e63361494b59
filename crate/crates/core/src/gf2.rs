//! Bit-packed linear algebra over F₂.
//!
//! Public indices are 1-based: bit `1` of a vector is its first bit, and
//! entry `(1, 1)` is the top-left entry of a matrix. Bit `i` lives in word
//! `(i - 1) / 64` at position `(i - 1) % 64`; bits past `len` are always zero.
//!
//! Vectors order lexicographically by their bit strings (shorter first when
//! lengths differ), so maps keyed by [`BitVector`] iterate in a canonical,
//! platform-independent order.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{LabError, Result};

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A vector over F₂.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; words_for(len)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self {
            words: vec![u64::MAX; words_for(len)],
            len,
        };
        v.clear_tail();
        v
    }

    /// The `i`-th standard basis vector `e_i` (1-based).
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for bit in bits {
            if len % WORD == 0 {
                words.push(0);
            }
            if bit {
                words[len / WORD] |= 1 << (len % WORD);
            }
            len += 1;
        }
        Self { words, len }
    }

    /// Builds a vector of length `len` whose bit `i` is bit `i - 1` of
    /// `value` (least significant bit first). Enumerating `value` over
    /// `0..2^len` enumerates `{0,1}^len`.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= WORD, "from_u64 supports at most 64 bits, got {len}");
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = value;
            v.clear_tail();
        }
        v
    }

    /// Inverse of [`BitVector::from_u64`]; `None` when longer than 64 bits.
    pub fn to_u64(&self) -> Option<u64> {
        match self.len {
            0 => Some(0),
            l if l <= WORD => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Bit `i`, 1-based.
    pub fn get(&self, i: usize) -> bool {
        assert!(
            (1..=self.len).contains(&i),
            "bit index {i} out of range 1..={}",
            self.len
        );
        let k = i - 1;
        (self.words[k / WORD] >> (k % WORD)) & 1 == 1
    }

    /// Sets bit `i`, 1-based.
    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(
            (1..=self.len).contains(&i),
            "bit index {i} out of range 1..={}",
            self.len
        );
        let k = i - 1;
        let mask = 1u64 << (k % WORD);
        if bit {
            self.words[k / WORD] |= mask;
        } else {
            self.words[k / WORD] &= !mask;
        }
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(WORD) {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len, bit);
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |k| (self.words[k / WORD] >> (k % WORD)) & 1 == 1)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Bits `first..=last` (1-based, inclusive). `last == first - 1` yields
    /// an empty vector.
    pub fn range(&self, first: usize, last: usize) -> BitVector {
        assert!(first >= 1 && last + 1 >= first && last <= self.len);
        BitVector::from_bits((first..=last).map(|i| self.get(i)))
    }

    pub fn concat(&self, other: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.extend(other);
        out
    }

    pub fn extend(&mut self, other: &BitVector) {
        if self.len.is_multiple_of(WORD) {
            self.words.extend_from_slice(&other.words);
            self.len += other.len;
            return;
        }
        for bit in other.iter() {
            self.push(bit);
        }
    }

    pub fn xor(&self, other: &BitVector) -> Result<BitVector> {
        self.check_len(other)?;
        Ok(BitVector {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a ^ b)
                .collect(),
            len: self.len,
        })
    }

    pub(crate) fn xor_assign_unchecked(&mut self, other: &BitVector) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Canonical byte encoding: bits packed most-significant-bit first, one
    /// byte per eight bits, the final byte zero-padded on the right.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len.div_ceil(8)];
        for (k, bit) in self.iter().enumerate() {
            if bit {
                out[k / 8] |= 0x80 >> (k % 8);
            }
        }
        out
    }

    pub fn to_bit_string(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }

    fn check_len(&self, other: &BitVector) -> Result<()> {
        if self.len != other.len {
            return Err(LabError::dim(format!(
                "vector lengths {} and {} differ",
                self.len, other.len
            )));
        }
        Ok(())
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl Ord for BitVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len.cmp(&other.len).then_with(|| {
            for (a, b) in self.words.iter().zip(&other.words) {
                let diff = a ^ b;
                if diff != 0 {
                    let first = diff.trailing_zeros();
                    return ((a >> first) & 1).cmp(&((b >> first) & 1));
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for BitVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({})", self.to_bit_string())
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_string())
    }
}

impl FromStr for BitVector {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(LabError::Parse(format!("unexpected character {other:?} in bit string"))),
            })
            .collect::<Result<Vec<bool>>>()
            .map(BitVector::from_bits)
    }
}

impl Serialize for BitVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_bit_string())
    }
}

impl<'de> Deserialize<'de> for BitVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Mod-2 inner product.
pub fn dot(a: &BitVector, b: &BitVector) -> Result<bool> {
    a.check_len(b)?;
    Ok(dot_unchecked(a, b))
}

pub(crate) fn dot_unchecked(a: &BitVector, b: &BitVector) -> bool {
    let ones: u32 = a
        .words
        .iter()
        .zip(&b.words)
        .map(|(x, y)| (x & y).count_ones())
        .sum();
    ones & 1 == 1
}

/// A dense matrix over F₂ stored as packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: Vec<BitVector>,
    cols: usize,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows: vec![BitVector::zeros(cols); rows],
            cols,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: (1..=n).map(|i| BitVector::unit(n, i)).collect(),
            cols: n,
        }
    }

    /// Builds a matrix from rows of equal length. An empty row list needs
    /// the column count, so use [`BitMatrix::zeros`] for `0 × c`.
    pub fn from_rows(rows: Vec<BitVector>) -> Result<Self> {
        let cols = rows.first().map_or(0, BitVector::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(LabError::dim(format!(
                "row of length {} in a matrix with {cols} columns",
                bad.len()
            )));
        }
        Ok(Self { rows, cols })
    }

    pub fn from_rows_with_cols(rows: Vec<BitVector>, cols: usize) -> Result<Self> {
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LabError::dim(format!("rows must all have length {cols}")));
        }
        Ok(Self { rows, cols })
    }

    /// Parses `"101;011"`-style shorthand: rows separated by `;`.
    pub fn from_row_strings(rows: &[&str]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|r| r.parse())
            .collect::<Result<Vec<BitVector>>>()?;
        Self::from_rows(parsed)
    }

    /// Reshapes a row-major bit string into `rows × cols`.
    pub fn from_row_major(bits: &BitVector, rows: usize, cols: usize) -> Result<Self> {
        if bits.len() != rows * cols {
            return Err(LabError::dim(format!(
                "{} bits cannot fill a {rows}x{cols} matrix",
                bits.len()
            )));
        }
        let rows_vec = (0..rows)
            .map(|r| BitVector::from_bits((1..=cols).map(|c| bits.get(r * cols + c))))
            .collect();
        Ok(Self {
            rows: rows_vec,
            cols,
        })
    }

    pub fn to_row_major(&self) -> BitVector {
        let mut out = BitVector::zeros(0);
        for row in &self.rows {
            out.extend(row);
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry `(i, j)`, 1-based.
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i - 1].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, bit: bool) {
        self.rows[i - 1].set(j, bit);
    }

    /// Row `i`, 1-based.
    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i - 1]
    }

    pub fn row_vectors(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<BitVector> {
        self.rows
    }

    /// Column `j`, 1-based.
    pub fn column(&self, j: usize) -> BitVector {
        BitVector::from_bits(self.rows.iter().map(|r| r.get(j)))
    }

    pub fn transpose(&self) -> BitMatrix {
        BitMatrix {
            rows: (1..=self.cols).map(|j| self.column(j)).collect(),
            cols: self.rows.len(),
        }
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.rows() != other.rows() {
            return Err(LabError::dim(format!(
                "cannot place {} rows beside {} rows",
                self.rows(),
                other.rows()
            )));
        }
        Ok(BitMatrix {
            rows: self
                .rows
                .iter()
                .zip(&other.rows)
                .map(|(a, b)| a.concat(b))
                .collect(),
            cols: self.cols + other.cols,
        })
    }

    /// Matrix product over F₂.
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows() {
            return Err(LabError::dim(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows(),
                self.cols,
                other.rows(),
                other.cols
            )));
        }
        let rows = self
            .rows
            .iter()
            .map(|r| vec_mat_mul_unchecked(r, other))
            .collect();
        Ok(BitMatrix {
            rows,
            cols: other.cols,
        })
    }

    /// Rank over F₂ by forward elimination.
    pub fn rank(&self) -> usize {
        rank(self)
    }

    /// Text fixture format: a `rows cols` header line followed by one line
    /// of `0`/`1` characters per row.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.rows(), self.cols);
        for row in &self.rows {
            out.push_str(&row.to_bit_string());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| LabError::Parse("empty matrix text".into()))?;
        let mut dims = header.split_whitespace().map(|t| {
            t.parse::<usize>()
                .map_err(|e| LabError::Parse(format!("bad dimension {t:?}: {e}")))
        });
        let (rows, cols) = match (dims.next(), dims.next(), dims.next()) {
            (Some(r), Some(c), None) => (r?, c?),
            _ => return Err(LabError::Parse(format!("bad matrix header {header:?}"))),
        };
        let mut parsed = Vec::with_capacity(rows);
        for _ in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| LabError::Parse(format!("expected {rows} rows")))?;
            let row: BitVector = line.trim_end().parse()?;
            if row.len() != cols {
                return Err(LabError::Parse(format!(
                    "row {:?} has {} bits, expected {cols}",
                    line,
                    row.len()
                )));
            }
            parsed.push(row);
        }
        if lines.any(|l| !l.trim().is_empty()) {
            return Err(LabError::Parse("trailing content after matrix rows".into()));
        }
        Ok(BitMatrix { rows: parsed, cols })
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMatrix {}x{} [", self.rows(), self.cols)?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            f.write_str(&r.to_bit_string())?;
        }
        f.write_str("]")
    }
}

impl Serialize for BitMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("BitMatrix", 3)?;
        s.serialize_field("rows", &self.rows())?;
        s.serialize_field("cols", &self.cols)?;
        s.serialize_field("data", &self.rows)?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for BitMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            rows: usize,
            cols: usize,
            data: Vec<BitVector>,
        }
        let raw = Raw::deserialize(deserializer)?;
        if raw.data.len() != raw.rows {
            return Err(serde::de::Error::custom("row count does not match data"));
        }
        BitMatrix::from_rows_with_cols(raw.data, raw.cols).map_err(serde::de::Error::custom)
    }
}

/// `xᵀM`: the combination of `M`'s rows selected by `x`.
pub fn vec_mat_mul(x: &BitVector, m: &BitMatrix) -> Result<BitVector> {
    if x.len() != m.rows() {
        return Err(LabError::dim(format!(
            "vector of length {} against a {}x{} matrix",
            x.len(),
            m.rows(),
            m.cols()
        )));
    }
    Ok(vec_mat_mul_unchecked(x, m))
}

fn vec_mat_mul_unchecked(x: &BitVector, m: &BitMatrix) -> BitVector {
    let mut acc = BitVector::zeros(m.cols());
    for (bit, row) in x.iter().zip(&m.rows) {
        if bit {
            acc.xor_assign_unchecked(row);
        }
    }
    acc
}

/// Dimension of the row space of `m`.
pub fn rank(m: &BitMatrix) -> usize {
    let mut rows: Vec<Vec<u64>> = m.rows.iter().map(|r| r.words.clone()).collect();
    let mut rank = 0;
    for col in 0..m.cols() {
        let (w, mask) = (col / WORD, 1u64 << (col % WORD));
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][w] & mask != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let (done, rest) = rows.split_at_mut(rank + 1);
        let pivot_row = &done[rank];
        for row in rest.iter_mut().filter(|r| r[w] & mask != 0) {
            for (a, b) in row.iter_mut().zip(pivot_row).skip(w) {
                *a ^= b;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

pub fn is_full_rank(m: &BitMatrix) -> Result<bool> {
    if m.rows() != m.cols() {
        return Err(LabError::dim(format!(
            "full rank is defined for square matrices, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(rank(m) == m.rows())
}

/// Probability that a uniform `n × n` matrix over F₂ is invertible:
/// `∏_{i=1}^{n} (1 − 2^{−i})`. The empty product gives 1 at `n = 0`.
pub fn full_rank_probability(n: usize) -> f64 {
    (1..=n).map(|i| 1.0 - 0.5f64.powi(i as i32)).product()
}

/// Probability that a uniform `n × n` matrix over F₂ has rank exactly
/// `n − s`: `2^{−s²} · ∏_{i=s+1}^{n} (1 − 2^{−i})² / ∏_{i=1}^{n−s} (1 − 2^{−i})`.
pub fn rank_defect_probability(n: usize, s: usize) -> f64 {
    if s > n {
        return 0.0;
    }
    let f = |i: usize| 1.0 - 0.5f64.powi(i as i32);
    let num: f64 = (s + 1..=n).map(|i| f(i) * f(i)).product();
    let den: f64 = (1..=n - s).map(f).product();
    2f64.powf(-((s * s) as f64)) * num / den
}

pub const DEFAULT_TRUNCATION: usize = 128;

/// Limit, as the dimension grows, of the probability that a uniform square
/// matrix over F₂ has rank defect exactly `s`:
///
/// `Q_s = 2^{−s²} · ∏_{i>s} (1 − 2^{−i}) / ∏_{i≤s} (1 − 2^{−i})`,
///
/// with the infinite product cut at index `truncation`.
pub fn rank_defect_probability_limit(s: usize, truncation: usize) -> f64 {
    let tail: f64 = (s + 1..=truncation)
        .map(|i| 1.0 - 0.5f64.powi(i as i32))
        .product();
    let head: f64 = (1..=s).map(|i| 1.0 - 0.5f64.powi(i as i32)).product();
    let scale = 2f64.powf(-((s * s) as f64));
    scale * tail / head
}

/// Uniform matrix; every bit independent and fair.
pub fn random_bitmatrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> BitMatrix {
    BitMatrix {
        rows: (0..rows).map(|_| random_bitvector(cols, rng)).collect(),
        cols,
    }
}

pub fn random_bitvector<R: Rng + ?Sized>(len: usize, rng: &mut R) -> BitVector {
    let mut v = BitVector {
        words: (0..words_for(len)).map(|_| rng.random::<u64>()).collect(),
        len,
    };
    v.clear_tail();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    #[test]
    fn finite_rank_distribution_matches_enumeration() {
        for n in 1..=3usize {
            let mut counts = vec![0usize; n + 1];
            for v in 0..1u64 << (n * n) {
                let m = BitMatrix::from_row_major(&BitVector::from_u64(v, n * n), n, n).unwrap();
                counts[n - rank(&m)] += 1;
            }
            for (s, &c) in counts.iter().enumerate() {
                let expect = c as f64 / (1u64 << (n * n)) as f64;
                assert!((rank_defect_probability(n, s) - expect).abs() < 1e-15, "n={n} s={s}");
            }
        }
        assert_eq!(rank_defect_probability(4, 0), full_rank_probability(4));
        assert!((rank_defect_probability(40, 1) - rank_defect_probability_limit(1, DEFAULT_TRUNCATION)).abs() < 1e-9);
    }

    fn naive_product(x: &BitVector, m: &BitMatrix) -> BitVector {
        BitVector::from_bits((1..=m.cols()).map(|j| {
            (1..=m.rows()).fold(false, |acc, i| acc ^ (x.get(i) & m.get(i, j)))
        }))
    }

    #[test]
    fn dot_examples() {
        assert!(!dot(&bv("101"), &bv("111")).unwrap());
        assert!(!dot(&bv("000"), &bv("111")).unwrap());
        assert!(dot(&bv("110"), &bv("100")).unwrap());
        assert!(matches!(dot(&bv("1"), &bv("11")), Err(LabError::Dimension(_))));
    }

    #[test]
    fn vec_mat_mul_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_bitmatrix(5, 7, &mut rng);
        assert_eq!(vec_mat_mul(&BitVector::unit(5, 1), &m).unwrap(), *m.row(1));
        assert_eq!(vec_mat_mul(&BitVector::zeros(5), &m).unwrap(), BitVector::zeros(7));

        let m = BitMatrix::from_row_strings(&["11", "01"]).unwrap();
        let got = vec_mat_mul(&bv("10"), &m).unwrap();
        assert_eq!(got, bv("11"));
        assert_eq!(got, naive_product(&bv("10"), &m));
        assert!(vec_mat_mul(&bv("1"), &m).is_err());
    }

    #[test]
    fn vec_mat_mul_matches_naive_product_across_word_boundaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (r, c) in [(1, 1), (3, 70), (65, 130), (64, 64)] {
            let m = random_bitmatrix(r, c, &mut rng);
            let x = random_bitvector(r, &mut rng);
            assert_eq!(vec_mat_mul(&x, &m).unwrap(), naive_product(&x, &m));
        }
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&BitMatrix::identity(3)), 3);
        assert_eq!(rank(&BitMatrix::zeros(4, 4)), 0);
        assert_eq!(rank(&BitMatrix::from_row_strings(&["10", "10"]).unwrap()), 1);
        assert_eq!(rank(&BitMatrix::zeros(0, 5)), 0);
        assert_eq!(rank(&BitMatrix::zeros(5, 0)), 0);
    }

    #[test]
    fn full_rank_examples() {
        assert!(is_full_rank(&BitMatrix::identity(5)).unwrap());
        let mut m = BitMatrix::identity(5);
        m.set(3, 3, false);
        assert!(!is_full_rank(&m).unwrap());
        assert!(!is_full_rank(&BitMatrix::from_row_strings(&["11", "11"]).unwrap()).unwrap());
        assert!(matches!(
            is_full_rank(&BitMatrix::zeros(2, 3)),
            Err(LabError::Dimension(_))
        ));
    }

    #[test]
    fn full_rank_probability_small_cases() {
        assert_eq!(full_rank_probability(0), 1.0);
        assert_eq!(full_rank_probability(1), 0.5);
        // Enumerate all 16 2x2 matrices.
        let invertible = (0u64..16)
            .filter(|&v| {
                let m = BitMatrix::from_row_major(&BitVector::from_u64(v, 4), 2, 2).unwrap();
                is_full_rank(&m).unwrap()
            })
            .count();
        assert_eq!(invertible, 6);
        assert!((full_rank_probability(2) - 0.375).abs() < 1e-15);
        assert!((full_rank_probability(40) - 0.2887880950866).abs() < 1e-10);
        for n in 1..30 {
            assert!(full_rank_probability(n + 1) < full_rank_probability(n));
        }
    }

    #[test]
    fn rank_defect_limits() {
        let q0 = rank_defect_probability_limit(0, DEFAULT_TRUNCATION);
        assert!((q0 - 0.2887880950866).abs() < 1e-9);
        let total: f64 = (0..=8)
            .map(|s| rank_defect_probability_limit(s, DEFAULT_TRUNCATION))
            .sum();
        assert!((total - 1.0).abs() < 1e-6);
        let q1 = rank_defect_probability_limit(1, DEFAULT_TRUNCATION);
        assert!((q1 - 2.0 * q0).abs() < 1e-12);
    }

    #[test]
    fn rank_defect_one_matches_monte_carlo() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let trials = 100_000;
        let hits = (0..trials)
            .filter(|_| rank(&random_bitmatrix(24, 24, &mut rng)) == 23)
            .count();
        let freq = hits as f64 / trials as f64;
        let q1 = rank_defect_probability_limit(1, DEFAULT_TRUNCATION);
        assert!((freq - q1).abs() < 0.01, "freq {freq} vs {q1}");
    }

    #[test]
    fn random_matrix_determinism_and_balance() {
        let a = random_bitmatrix(2, 2, &mut ChaCha8Rng::seed_from_u64(7));
        let b = random_bitmatrix(2, 2, &mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a, b);

        let empty = random_bitmatrix(0, 5, &mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!((empty.rows(), empty.cols()), (0, 5));

        let big = random_bitmatrix(1000, 1000, &mut ChaCha8Rng::seed_from_u64(8));
        let ones: usize = big.row_vectors().iter().map(BitVector::count_ones).sum();
        let mean = ones as f64 / 1e6;
        assert!((mean - 0.5).abs() < 0.01);
    }

    #[test]
    fn text_format_round_trip() {
        let m = BitMatrix::from_row_strings(&["101", "011"]).unwrap();
        let text = m.to_text();
        assert_eq!(text, "2 3\n101\n011\n");
        assert_eq!(BitMatrix::from_text(&text).unwrap(), m);

        let empty = BitMatrix::zeros(2, 0);
        assert_eq!(BitMatrix::from_text(&empty.to_text()).unwrap(), empty);

        assert!(BitMatrix::from_text("2 2\n10\n").is_err());
        assert!(BitMatrix::from_text("1 2\n1x\n").is_err());
        assert!(BitMatrix::from_text("1 2\n101\n").is_err());
    }

    #[test]
    fn ordering_is_lexicographic() {
        let mut v = [bv("110"), bv("011"), bv("100"), bv("001")];
        v.sort();
        let s: Vec<String> = v.iter().map(|x| x.to_bit_string()).collect();
        assert_eq!(s, ["001", "011", "100", "110"]);
        assert_eq!(bv("1011").to_bytes(), vec![0b1011_0000]);
    }

    #[test]
    fn u64_round_trip() {
        let v = BitVector::from_u64(0b1101, 4);
        assert_eq!(v.to_bit_string(), "1011");
        assert_eq!(v.to_u64(), Some(0b1101));
    }
}
