//! Input distributions: uniform and planted-clique directed graphs, and the
//! generator input families.
//!
//! Every sampler is a pure function of its parameters and the rng state.
//! Every distribution can also be enumerated exactly into a [`Pmf`] when
//! its support is small enough (at most 2²⁴ enumerated points). Input
//! assignments are encoded as their row-major bit strings.

mod pmf;

use itertools::Itertools;
use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::gf2::{dot, random_bitmatrix, random_bitvector, vec_mat_mul, BitMatrix, BitVector};

pub use pmf::{Pmf, MASS_TOLERANCE};

/// Most bits any exact enumeration may range over.
pub const MAX_ENUMERATION_BITS: usize = 24;

pub(crate) fn check_enumerable(what: &str, bits: usize) -> Result<()> {
    if bits > MAX_ENUMERATION_BITS {
        return Err(LabError::capacity(
            format!("exact enumeration of {what}"),
            1u128 << bits.min(127),
            1u128 << MAX_ENUMERATION_BITS,
        ));
    }
    Ok(())
}

/// The private inputs of all processors: row `i` belongs to processor `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InputAssignment {
    matrix: BitMatrix,
}

impl InputAssignment {
    pub fn new(matrix: BitMatrix) -> Self {
        Self { matrix }
    }

    pub fn from_rows(rows: Vec<BitVector>, m: usize) -> Result<Self> {
        Ok(Self::new(BitMatrix::from_rows_with_cols(rows, m)?))
    }

    pub fn from_row_major(bits: &BitVector, n: usize, m: usize) -> Result<Self> {
        Ok(Self::new(BitMatrix::from_row_major(bits, n, m)?))
    }

    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    pub fn m(&self) -> usize {
        self.matrix.cols()
    }

    /// Processor `i`'s input, 1-based.
    pub fn row(&self, i: usize) -> &BitVector {
        self.matrix.row(i)
    }

    pub fn rows(&self) -> &[BitVector] {
        self.matrix.row_vectors()
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> BitMatrix {
        self.matrix
    }

    pub fn to_row_major(&self) -> BitVector {
        self.matrix.to_row_major()
    }

    /// Appends per-processor extra bits (e.g. private coins) to every row.
    pub fn with_appended(&self, extra: &BitMatrix) -> Result<Self> {
        Ok(Self::new(self.matrix.hstack(extra)?))
    }
}

/// A vertex subset of `[n]`, 1-based and sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CliqueSpec {
    n: usize,
    members: Vec<usize>,
}

impl CliqueSpec {
    pub fn new(n: usize, mut members: Vec<usize>) -> Result<Self> {
        members.sort_unstable();
        if let Some(&bad) = members.iter().find(|&&v| v == 0 || v > n) {
            return Err(LabError::Domain(format!("clique member {bad} outside 1..={n}")));
        }
        if members.windows(2).any(|w| w[0] == w[1]) {
            return Err(LabError::Domain("clique members must be distinct".into()));
        }
        Ok(Self { n, members })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            n,
            members: Vec::new(),
        }
    }

    pub fn all(n: usize) -> Self {
        Self {
            n,
            members: (1..=n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    /// Membership indicator of length `n`.
    pub fn indicator(&self) -> BitVector {
        BitVector::from_bits((1..=self.n).map(|v| self.contains(v)))
    }

    /// All size-`k` subsets of `[n]` in lexicographic order.
    pub fn all_of_size(n: usize, k: usize) -> Vec<CliqueSpec> {
        (1..=n)
            .combinations(k)
            .map(|members| CliqueSpec { n, members })
            .collect()
    }

    /// A uniform size-`k` subset of `[n]`.
    pub fn random<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Self> {
        if k > n {
            return Err(LabError::Domain(format!("clique size {k} exceeds n = {n}")));
        }
        let members = index::sample(rng, n, k).into_iter().map(|v| v + 1).collect();
        Self::new(n, members)
    }
}

/// Random directed graph: off-diagonal entries i.i.d. fair bits, zero diagonal.
pub fn sample_a_rand<R: Rng + ?Sized>(n: usize, rng: &mut R) -> InputAssignment {
    let mut m = random_bitmatrix(n, n, rng);
    for i in 1..=n {
        m.set(i, i, false);
    }
    InputAssignment::new(m)
}

/// Random directed graph with every edge inside `clique` forced to 1 in
/// both directions.
pub fn sample_a_planted<R: Rng + ?Sized>(
    n: usize,
    clique: &CliqueSpec,
    rng: &mut R,
) -> Result<InputAssignment> {
    if clique.n() != n {
        return Err(LabError::Domain(format!(
            "clique over {} vertices used with n = {n}",
            clique.n()
        )));
    }
    let mut a = sample_a_rand(n, rng).into_matrix();
    plant(&mut a, clique);
    Ok(InputAssignment::new(a))
}

fn plant(a: &mut BitMatrix, clique: &CliqueSpec) {
    for &u in clique.members() {
        for &v in clique.members() {
            if u != v {
                a.set(u, v, true);
            }
        }
    }
}

/// Planted clique on a uniformly random `k`-subset. The hidden clique is
/// returned alongside the instance for scoring.
pub fn sample_a_k<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    rng: &mut R,
) -> Result<(InputAssignment, CliqueSpec)> {
    let clique = CliqueSpec::random(n, k, rng)?;
    let a = sample_a_planted(n, &clique, rng)?;
    Ok((a, clique))
}

/// `(x, x·b)` with `x` uniform over `{0,1}^k`.
pub fn sample_u_b<R: Rng + ?Sized>(k: usize, b: &BitVector, rng: &mut R) -> Result<BitVector> {
    if b.len() != k {
        return Err(LabError::Dimension(format!(
            "secret vector has length {}, expected {k}",
            b.len()
        )));
    }
    let mut x = random_bitvector(k, rng);
    let extra = dot(&x, b)?;
    x.push(extra);
    Ok(x)
}

/// `(x, xᵀM)` with `x` uniform over `{0,1}^k`; `M` is `k × (m − k)`.
pub fn sample_u_m<R: Rng + ?Sized>(
    k: usize,
    m: usize,
    matrix: &BitMatrix,
    rng: &mut R,
) -> Result<BitVector> {
    check_extension_shape(k, m, matrix)?;
    let x = random_bitvector(k, rng);
    let tail = vec_mat_mul(&x, matrix)?;
    Ok(x.concat(&tail))
}

fn check_extension_shape(k: usize, m: usize, matrix: &BitMatrix) -> Result<()> {
    if m < k || matrix.rows() != k || matrix.cols() != m - k {
        return Err(LabError::Dimension(format!(
            "extension matrix is {}x{}, expected {k}x{}",
            matrix.rows(),
            matrix.cols(),
            m.saturating_sub(k)
        )));
    }
    Ok(())
}

/// Uniform over `{x ∈ {0,1}^n : x_i = 1 for all i ∈ C}`; no diagonal
/// convention applies here.
pub fn sample_uniform_with_ones<R: Rng + ?Sized>(clique: &CliqueSpec, rng: &mut R) -> BitVector {
    let mut x = random_bitvector(clique.n(), rng);
    for &i in clique.members() {
        x.set(i, true);
    }
    x
}

/// One shared uniform `M ∈ {0,1}^{k×(m−k)}`, then `n` independent rows
/// drawn from `(x, xᵀM)`. Returns the rows and `M`.
pub fn sample_shared_matrix_rows<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    m: usize,
    rng: &mut R,
) -> Result<(InputAssignment, BitMatrix)> {
    if m < k {
        return Err(LabError::Parameter(format!("output length {m} below seed length {k}")));
    }
    let matrix = random_bitmatrix(k, m - k, rng);
    let rows = (0..n)
        .map(|_| sample_u_m(k, m, &matrix, rng))
        .collect::<Result<Vec<_>>>()?;
    Ok((InputAssignment::from_rows(rows, m)?, matrix))
}

/// Distribution of a single processor's input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RowDistribution {
    /// `𝒰_len`.
    Uniform { len: usize },
    /// `𝒰_[b]`: `(x, x·b)`.
    InnerProduct { b: BitVector },
    /// `𝒰_M`: `(x, xᵀM)`.
    MatrixExtension { matrix: BitMatrix },
    /// `𝒰_n^C`: uniform with ones forced on `C`.
    OnesOn { clique: CliqueSpec },
}

impl RowDistribution {
    pub fn len(&self) -> usize {
        match self {
            RowDistribution::Uniform { len } => *len,
            RowDistribution::InnerProduct { b } => b.len() + 1,
            RowDistribution::MatrixExtension { matrix } => matrix.rows() + matrix.cols(),
            RowDistribution::OnesOn { clique } => clique.n(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BitVector {
        match self {
            RowDistribution::Uniform { len } => random_bitvector(*len, rng),
            RowDistribution::InnerProduct { b } => {
                sample_u_b(b.len(), b, rng).expect("length taken from b")
            }
            RowDistribution::MatrixExtension { matrix } => {
                let k = matrix.rows();
                sample_u_m(k, k + matrix.cols(), matrix, rng).expect("shape taken from matrix")
            }
            RowDistribution::OnesOn { clique } => sample_uniform_with_ones(clique, rng),
        }
    }

    pub fn exact_pmf(&self) -> Result<Pmf> {
        match self {
            RowDistribution::Uniform { len } => Pmf::uniform_bits(*len),
            RowDistribution::InnerProduct { b } => {
                let k = b.len();
                check_enumerable("inner-product seeds", k)?;
                Ok(Pmf::uniform((0..1u64 << k).map(|v| {
                    let mut x = BitVector::from_u64(v, k);
                    let extra = dot(&x, b).expect("same length");
                    x.push(extra);
                    x
                })))
            }
            RowDistribution::MatrixExtension { matrix } => {
                let k = matrix.rows();
                check_enumerable("matrix-extension seeds", k)?;
                Ok(Pmf::uniform((0..1u64 << k).map(|v| {
                    let x = BitVector::from_u64(v, k);
                    let tail = vec_mat_mul(&x, matrix).expect("same length");
                    x.concat(&tail)
                })))
            }
            RowDistribution::OnesOn { clique } => {
                let free: Vec<usize> = (1..=clique.n()).filter(|&i| !clique.contains(i)).collect();
                check_enumerable("free coordinates", free.len())?;
                let base = clique.indicator();
                Ok(Pmf::uniform((0..1u64 << free.len()).map(|v| {
                    let mut x = base.clone();
                    for (bit, &pos) in free.iter().enumerate() {
                        x.set(pos, (v >> bit) & 1 == 1);
                    }
                    x
                })))
            }
        }
    }
}

/// Distribution of a whole [`InputAssignment`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InputDistribution {
    /// `n` independent rows from one row distribution.
    IidRows { n: usize, row: RowDistribution },
    /// `𝒜_rand`.
    RandomGraph { n: usize },
    /// `𝒜_C`.
    PlantedClique { clique: CliqueSpec },
    /// `𝒜_k`.
    RandomPlantedClique { n: usize, k: usize },
    /// Uniform shared `M`, then `n` rows from `𝒰_M`.
    SharedMatrix { n: usize, k: usize, m: usize },
}

impl InputDistribution {
    pub fn uniform(n: usize, m: usize) -> Self {
        InputDistribution::IidRows {
            n,
            row: RowDistribution::Uniform { len: m },
        }
    }

    pub fn n(&self) -> usize {
        match self {
            InputDistribution::IidRows { n, .. }
            | InputDistribution::RandomGraph { n }
            | InputDistribution::RandomPlantedClique { n, .. }
            | InputDistribution::SharedMatrix { n, .. } => *n,
            InputDistribution::PlantedClique { clique } => clique.n(),
        }
    }

    pub fn m(&self) -> usize {
        match self {
            InputDistribution::IidRows { row, .. } => row.len(),
            InputDistribution::SharedMatrix { m, .. } => *m,
            _ => self.n(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            InputDistribution::IidRows { .. } => "iid_rows",
            InputDistribution::RandomGraph { .. } => "a_rand",
            InputDistribution::PlantedClique { .. } => "a_planted",
            InputDistribution::RandomPlantedClique { .. } => "a_k",
            InputDistribution::SharedMatrix { .. } => "shared_matrix",
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<InputAssignment> {
        match self {
            InputDistribution::IidRows { n, row } => {
                let rows = (0..*n).map(|_| row.sample(rng)).collect();
                InputAssignment::from_rows(rows, row.len())
            }
            InputDistribution::RandomGraph { n } => Ok(sample_a_rand(*n, rng)),
            InputDistribution::PlantedClique { clique } => sample_a_planted(clique.n(), clique, rng),
            InputDistribution::RandomPlantedClique { n, k } => Ok(sample_a_k(*n, *k, rng)?.0),
            InputDistribution::SharedMatrix { n, k, m } => {
                Ok(sample_shared_matrix_rows(*n, *k, *m, rng)?.0)
            }
        }
    }

    /// Exact law over row-major encodings of the assignment.
    pub fn exact_pmf(&self) -> Result<Pmf> {
        match self {
            InputDistribution::IidRows { n, row } => {
                check_enumerable("input assignments", n * row.len())?;
                let row_pmf = row.exact_pmf()?;
                Ok(iid_power(&row_pmf, *n))
            }
            InputDistribution::RandomGraph { n } => planted_pmf(&CliqueSpec::empty(*n)),
            InputDistribution::PlantedClique { clique } => planted_pmf(clique),
            InputDistribution::RandomPlantedClique { n, k } => {
                if *k > *n {
                    return Err(LabError::Domain(format!("clique size {k} exceeds n = {n}")));
                }
                check_enumerable("random graphs", n * n.saturating_sub(1))?;
                let parts = CliqueSpec::all_of_size(*n, *k)
                    .iter()
                    .map(planted_pmf)
                    .collect::<Result<Vec<_>>>()?;
                Ok(Pmf::average(&parts))
            }
            InputDistribution::SharedMatrix { n, k, m } => {
                if m < k {
                    return Err(LabError::Parameter(format!(
                        "output length {m} below seed length {k}"
                    )));
                }
                let matrix_bits = k * (m - k);
                check_enumerable("shared matrices", matrix_bits)?;
                check_enumerable("seeds", n * k)?;
                check_enumerable("shared matrices and seeds", matrix_bits + n * k)?;
                let parts = (0..1u64 << matrix_bits)
                    .map(|v| {
                        let matrix =
                            BitMatrix::from_row_major(&BitVector::from_u64(v, matrix_bits), *k, m - k)?;
                        let row = RowDistribution::MatrixExtension { matrix }.exact_pmf()?;
                        Ok(iid_power(&row, *n))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Pmf::average(&parts))
            }
        }
    }
}

fn iid_power(row: &Pmf, n: usize) -> Pmf {
    (0..n).fold(Pmf::point(BitVector::zeros(0)), |acc, _| acc.product(row))
}

fn planted_pmf(clique: &CliqueSpec) -> Result<Pmf> {
    let n = clique.n();
    let mut base = BitMatrix::zeros(n, n);
    plant(&mut base, clique);
    let free: Vec<(usize, usize)> = (1..=n)
        .cartesian_product(1..=n)
        .filter(|&(i, j)| i != j && !(clique.contains(i) && clique.contains(j)))
        .collect();
    check_enumerable("free graph entries", free.len())?;
    Ok(Pmf::uniform((0..1u64 << free.len()).map(|v| {
        let mut a = base.clone();
        for (bit, &(i, j)) in free.iter().enumerate() {
            a.set(i, j, (v >> bit) & 1 == 1);
        }
        a.to_row_major()
    })))
}

/// Exact law of an input distribution; see [`InputDistribution::exact_pmf`].
pub fn exact_pmf(dist: &InputDistribution) -> Result<Pmf> {
    dist.exact_pmf()
}

/// Provenance header stored on the first line of an instance file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceHeader {
    pub n: usize,
    pub m: usize,
    pub distribution: String,
    pub params: serde_json::Value,
    pub seed: u64,
}

/// Instance file: one line of JSON header, then the matrix text format.
pub fn write_instance(header: &InstanceHeader, input: &InputAssignment) -> String {
    let mut out = serde_json::to_string(header).expect("header serializes");
    out.push('\n');
    out.push_str(&input.matrix().to_text());
    out
}

pub fn read_instance(text: &str) -> Result<(InstanceHeader, InputAssignment)> {
    let (first, rest) = text
        .split_once('\n')
        .ok_or_else(|| LabError::Parse("instance file lacks a matrix".into()))?;
    let header: InstanceHeader =
        serde_json::from_str(first).map_err(|e| LabError::Parse(e.to_string()))?;
    let matrix = BitMatrix::from_text(rest)?;
    if matrix.rows() != header.n || matrix.cols() != header.m {
        return Err(LabError::Parse(format!(
            "header says {}x{}, matrix is {}x{}",
            header.n,
            header.m,
            matrix.rows(),
            matrix.cols()
        )));
    }
    Ok((header, InputAssignment::new(matrix)))
}
