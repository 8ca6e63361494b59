//! Pseudo-random generators for BCAST(1).
//!
//! **Matrix generator.** Every processor holds a private seed `x ∈ {0,1}^k`
//! and `⌈k(m−k)/n⌉` share bits. During the sharing phase each processor
//! broadcasts one share bit per simultaneous round. The first `k(m−k)`
//! broadcast bits, read in transcript order (round, then processor), fill
//! `M ∈ {0,1}^{k×(m−k)}` row-major; any surplus bits of the last round are
//! ignored. Processor `i` then outputs `(x_i, x_iᵀM) ∈ {0,1}^m`.
//!
//! **Inner-product generator.** The single-extra-bit case: a shared secret
//! `b ∈ {0,1}^k` and output `(x_i, x_i·b)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::{sample_shared_matrix_rows, InputAssignment};
use crate::error::{LabError, Result};
use crate::gf2::{dot, random_bitmatrix, random_bitvector, vec_mat_mul, BitMatrix, BitVector};
use crate::model::{ProtocolSpec, Schedule, Transcript};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrgParams {
    /// Processors.
    pub n: usize,
    /// Private seed length.
    pub k: usize,
    /// Output length per processor.
    pub m: usize,
}

impl PrgParams {
    pub fn new(n: usize, k: usize, m: usize) -> Result<Self> {
        let p = Self { n, k, m };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(LabError::Parameter("need at least one processor".into()));
        }
        if self.k == 0 {
            return Err(LabError::Parameter("seed length k must be at least 1".into()));
        }
        if self.m < self.k {
            return Err(LabError::Parameter(format!(
                "output length m = {} is below seed length k = {}",
                self.m, self.k
            )));
        }
        Ok(())
    }

    /// Bits of the shared matrix, `k·(m−k)`.
    pub fn matrix_bits(&self) -> usize {
        self.k * (self.m - self.k)
    }

    /// Share bits per processor, `⌈k(m−k)/n⌉`; also the number of rounds
    /// of the sharing phase.
    pub fn share_len(&self) -> usize {
        self.matrix_bits().div_ceil(self.n)
    }

    /// Total random bits each processor starts with.
    pub fn seed_len(&self) -> usize {
        self.k + self.share_len()
    }

    /// Whether `m ≤ 2^{k/20}`, the regime in which the generator is proven
    /// to fool short protocols.
    pub fn within_security_regime(&self) -> bool {
        (self.m as f64).log2() <= self.k as f64 / 20.0
    }
}

/// All processors' random bits for the matrix generator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedBundle {
    pub private_seeds: Vec<BitVector>,
    pub share_bits: Vec<BitVector>,
}

impl SeedBundle {
    pub fn random<R: Rng + ?Sized>(params: &PrgParams, rng: &mut R) -> Self {
        let private_seeds = (0..params.n).map(|_| random_bitvector(params.k, rng)).collect();
        let share_bits = (0..params.n)
            .map(|_| random_bitvector(params.share_len(), rng))
            .collect();
        Self {
            private_seeds,
            share_bits,
        }
    }

    /// Share bits that make the sharing phase produce exactly `matrix`;
    /// padding bits are zero.
    pub fn from_matrix(params: &PrgParams, private_seeds: Vec<BitVector>, matrix: &BitMatrix) -> Result<Self> {
        check_matrix_shape(params, matrix)?;
        if private_seeds.len() != params.n || private_seeds.iter().any(|s| s.len() != params.k) {
            return Err(LabError::Dimension(format!(
                "need {} private seeds of length {}",
                params.n, params.k
            )));
        }
        let flat = matrix.to_row_major();
        let share_bits = (1..=params.n)
            .map(|i| {
                BitVector::from_bits((1..=params.share_len()).map(|r| {
                    let pos = (r - 1) * params.n + i;
                    pos <= flat.len() && flat.get(pos)
                }))
            })
            .collect();
        Ok(Self {
            private_seeds,
            share_bits,
        })
    }

    /// Splits full per-processor seeds (private seed then share bits).
    pub fn from_seeds(params: &PrgParams, seeds: &[BitVector]) -> Result<Self> {
        if seeds.len() != params.n || seeds.iter().any(|s| s.len() != params.seed_len()) {
            return Err(LabError::Dimension(format!(
                "need {} seeds of length {}",
                params.n,
                params.seed_len()
            )));
        }
        Ok(Self {
            private_seeds: seeds.iter().map(|s| s.range(1, params.k)).collect(),
            share_bits: seeds
                .iter()
                .map(|s| s.range(params.k + 1, params.seed_len()))
                .collect(),
        })
    }

    /// Protocol input: row `i` is `private_seed_i ‖ share_bits_i`.
    pub fn to_input(&self) -> Result<InputAssignment> {
        let m = self
            .private_seeds
            .first()
            .zip(self.share_bits.first())
            .map_or(0, |(a, b)| a.len() + b.len());
        let rows = self
            .private_seeds
            .iter()
            .zip(&self.share_bits)
            .map(|(a, b)| a.concat(b))
            .collect();
        InputAssignment::from_rows(rows, m)
    }

    /// The matrix the sharing phase will assemble.
    pub fn shared_matrix(&self, params: &PrgParams) -> Result<BitMatrix> {
        let flat = BitVector::from_bits(
            (1..=params.share_len())
                .flat_map(|r| self.share_bits.iter().map(move |s| s.get(r)))
                .take(params.matrix_bits()),
        );
        BitMatrix::from_row_major(&flat, params.k, params.m - params.k)
    }
}

fn check_matrix_shape(params: &PrgParams, matrix: &BitMatrix) -> Result<()> {
    if matrix.rows() != params.k || matrix.cols() != params.m - params.k {
        return Err(LabError::Dimension(format!(
            "shared matrix is {}x{}, expected {}x{}",
            matrix.rows(),
            matrix.cols(),
            params.k,
            params.m - params.k
        )));
    }
    Ok(())
}

/// `(seed, seed·b)` for every processor.
pub fn toy_prg_outputs(k: usize, b: &BitVector, seeds: &[BitVector]) -> Result<Vec<BitVector>> {
    if b.len() != k {
        return Err(LabError::Dimension(format!("secret has length {}, expected {k}", b.len())));
    }
    seeds
        .iter()
        .map(|s| {
            let extra = dot(s, b)?;
            let mut out = s.clone();
            out.push(extra);
            Ok(out)
        })
        .collect()
}

/// `(x, xᵀM)` for one seed.
pub fn matrix_prg_output(seed: &BitVector, matrix: &BitMatrix) -> Result<BitVector> {
    Ok(seed.concat(&vec_mat_mul(seed, matrix)?))
}

/// Outputs of the generator in its public-vectors form: `k` public vectors
/// in `{0,1}^m` (rows of `public`), each processor outputting the linear
/// combination selected by its private seed.
pub fn linear_combination_outputs(public: &BitMatrix, seeds: &[BitVector]) -> Result<Vec<BitVector>> {
    seeds.iter().map(|s| vec_mat_mul(s, public)).collect()
}

/// Direct evaluation of the matrix generator: the shared matrix and all
/// outputs, without simulating the broadcasts.
pub fn generate(params: &PrgParams, bundle: &SeedBundle) -> Result<(BitMatrix, Vec<BitVector>)> {
    let matrix = bundle.shared_matrix(params)?;
    let outputs = bundle
        .private_seeds
        .iter()
        .map(|x| matrix_prg_output(x, &matrix))
        .collect::<Result<Vec<_>>>()?;
    Ok((matrix, outputs))
}

/// Inverse of the sharing-phase encoding: rebuilds `M` from the first
/// `k(m−k)` broadcast bits.
pub fn assemble_matrix(transcript: &Transcript, params: &PrgParams) -> Result<BitMatrix> {
    let need = params.matrix_bits();
    if transcript.len() < need {
        return Err(LabError::Protocol(format!(
            "sharing phase produced {} bits, the matrix needs {need}",
            transcript.len()
        )));
    }
    let flat = if need == 0 {
        BitVector::zeros(0)
    } else {
        transcript.bits().range(1, need)
    };
    BitMatrix::from_row_major(&flat, params.k, params.m - params.k)
}

/// The sharing protocol. Inputs are `private_seed ‖ share_bits`; in round
/// `r` every processor broadcasts its `r`-th share bit, and after
/// `⌈k(m−k)/n⌉` rounds each processor outputs `(x, xᵀM)`.
pub fn build_prg_protocol(params: PrgParams) -> Result<ProtocolSpec> {
    params.validate()?;
    if !params.within_security_regime() {
        log::warn!(
            "m = {} exceeds 2^(k/20) for k = {}; outputs may be distinguishable",
            params.m,
            params.k
        );
    }
    let (n, k) = (params.n, params.k);
    let protocol = ProtocolSpec::new(
        n,
        params.seed_len(),
        Schedule::SimultaneousRounds {
            rounds: params.share_len(),
        },
        move |_, z, p| z.get(k + p.len() / n + 1),
    )
    .with_output(move |_, z, p| {
        let matrix = assemble_matrix(p, &params).expect("transcript covers the sharing phase");
        matrix_prg_output(&z.range(1, k), &matrix).expect("shapes agree")
    });
    Ok(protocol)
}

/// The pseudo-random world: one uniform shared `M`, and each processor's
/// input an independent draw of `(x, xᵀM)`.
pub fn prg_input_distribution<R: Rng + ?Sized>(params: &PrgParams, rng: &mut R) -> Result<InputAssignment> {
    Ok(prg_input_with_matrix(params, rng)?.0)
}

/// Like [`prg_input_distribution`], also returning `M`.
pub fn prg_input_with_matrix<R: Rng + ?Sized>(
    params: &PrgParams,
    rng: &mut R,
) -> Result<(InputAssignment, BitMatrix)> {
    params.validate()?;
    sample_shared_matrix_rows(params.n, params.k, params.m, rng)
}

/// Uniform random shared matrix of the right shape.
pub fn random_shared_matrix<R: Rng + ?Sized>(params: &PrgParams, rng: &mut R) -> BitMatrix {
    random_bitmatrix(params.k, params.m - params.k, rng)
}

/// Golden fixture for cross-implementation checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrgFixture {
    pub params: PrgParams,
    pub private_seeds: Vec<BitVector>,
    pub share_bits: Vec<BitVector>,
    pub matrix: BitMatrix,
    pub outputs: Vec<BitVector>,
}

impl PrgFixture {
    pub fn build(params: PrgParams, bundle: SeedBundle) -> Result<Self> {
        let (matrix, outputs) = generate(&params, &bundle)?;
        Ok(Self {
            params,
            private_seeds: bundle.private_seeds,
            share_bits: bundle.share_bits,
            matrix,
            outputs,
        })
    }

    /// Recomputes matrix and outputs and compares them with the stored ones.
    pub fn verify(&self) -> Result<bool> {
        let bundle = SeedBundle {
            private_seeds: self.private_seeds.clone(),
            share_bits: self.share_bits.clone(),
        };
        let (matrix, outputs) = generate(&self.params, &bundle)?;
        Ok(matrix == self.matrix && outputs == self.outputs)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fixture serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| LabError::Parse(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::rank;
    use crate::model::run;
    use crate::rng::stream;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    #[test]
    fn params_derived_sizes() {
        let p = PrgParams::new(3, 2, 5).unwrap();
        assert_eq!((p.matrix_bits(), p.share_len(), p.seed_len()), (6, 2, 4));
        let p = PrgParams::new(4, 3, 5).unwrap();
        assert_eq!(p.share_len(), 2);
        assert!(PrgParams::new(2, 3, 2).is_err());
        assert!(PrgParams::new(2, 0, 2).is_err());
        assert!(PrgParams::new(0, 1, 2).is_err());
        assert!(!PrgParams::new(2, 20, 21).unwrap().within_security_regime());
        assert!(PrgParams::new(2, 160, 256).unwrap().within_security_regime());
    }

    #[test]
    fn toy_prg_examples() {
        let seeds = vec![bv("101"), bv("111"), bv("011")];
        let outs = toy_prg_outputs(3, &BitVector::zeros(3), &seeds).unwrap();
        assert!(outs.iter().all(|o| !o.get(4)));
        let same = toy_prg_outputs(3, &bv("110"), &[bv("101"), bv("101")]).unwrap();
        assert_eq!(same[0], same[1]);
        let out = toy_prg_outputs(3, &bv("101"), &[bv("111")]).unwrap();
        assert_eq!(out[0], bv("1110"));
        assert_eq!(out[0].get(4), dot(&bv("111"), &bv("101")).unwrap());
        assert!(toy_prg_outputs(3, &bv("10"), &seeds).is_err());
    }

    #[test]
    fn protocol_outputs_have_length_m() {
        let params = PrgParams::new(5, 3, 9).unwrap();
        let protocol = build_prg_protocol(params).unwrap();
        let bundle = SeedBundle::random(&params, &mut stream(1, "prg", 0));
        let ex = run(&protocol, &bundle.to_input().unwrap()).unwrap();
        assert_eq!(ex.transcript.rounds(), params.share_len());
        assert!(ex.outputs.iter().all(|o| o.len() == 9));
    }

    #[test]
    fn hand_assembled_matrix_n2_k2_m4() {
        // Shares: processor 1 = 10, processor 2 = 11. Transcript order is
        // round 1 (p1, p2), round 2 (p1, p2): 1 1 0 1, so M = [[1,1],[0,1]].
        let params = PrgParams::new(2, 2, 4).unwrap();
        let bundle = SeedBundle {
            private_seeds: vec![bv("10"), bv("11")],
            share_bits: vec![bv("10"), bv("11")],
        };
        let ex = run(&build_prg_protocol(params).unwrap(), &bundle.to_input().unwrap()).unwrap();
        assert_eq!(ex.transcript.bits().to_bit_string(), "1101");
        let m = assemble_matrix(&ex.transcript, &params).unwrap();
        assert_eq!(m, BitMatrix::from_row_strings(&["11", "01"]).unwrap());
        assert_eq!(ex.outputs[0], bv("1011"));
        assert_eq!(ex.outputs[1], bv("1110"));
        for (x, out) in bundle.private_seeds.iter().zip(&ex.outputs) {
            assert_eq!(out.range(3, 4), vec_mat_mul(x, &m).unwrap());
        }
    }

    #[test]
    fn assemble_examples() {
        let params = PrgParams::new(3, 1, 4).unwrap();
        let schedule = Schedule::SimultaneousRounds { rounds: 1 };
        let zero = Transcript::from_bits(3, schedule, BitVector::zeros(3)).unwrap();
        assert_eq!(assemble_matrix(&zero, &params).unwrap(), BitMatrix::zeros(1, 3));
        // k(m−k) == n: one round, M's bits are processors 1..n in order.
        let t = Transcript::from_bits(3, schedule, bv("101")).unwrap();
        assert_eq!(assemble_matrix(&t, &params).unwrap(), BitMatrix::from_row_strings(&["101"]).unwrap());
        let short = Transcript::from_bits(3, schedule, bv("10")).unwrap();
        assert!(matches!(assemble_matrix(&short, &params), Err(LabError::Protocol(_))));
    }

    #[test]
    fn encode_then_assemble_round_trips() {
        for (t, (n, k, m)) in [(3, 2, 7), (4, 3, 10), (5, 1, 2), (2, 2, 2)].into_iter().enumerate() {
            let params = PrgParams::new(n, k, m).unwrap();
            let mut rng = stream(2, "roundtrip", t as u64);
            let matrix = random_shared_matrix(&params, &mut rng);
            let seeds = (0..n).map(|_| random_bitvector(k, &mut rng)).collect();
            let bundle = SeedBundle::from_matrix(&params, seeds, &matrix).unwrap();
            let ex = run(&build_prg_protocol(params).unwrap(), &bundle.to_input().unwrap()).unwrap();
            assert_eq!(assemble_matrix(&ex.transcript, &params).unwrap(), matrix);
            assert_eq!(bundle.shared_matrix(&params).unwrap(), matrix);
        }
    }

    #[test]
    fn stacked_outputs_have_rank_at_most_k() {
        let params = PrgParams::new(8, 3, 10).unwrap();
        let protocol = build_prg_protocol(params).unwrap();
        for t in 0..100 {
            let bundle = SeedBundle::random(&params, &mut stream(3, "rank", t));
            let ex = run(&protocol, &bundle.to_input().unwrap()).unwrap();
            let stacked = BitMatrix::from_rows(ex.outputs).unwrap();
            assert!(rank(&stacked) <= 3);
        }
    }

    #[test]
    fn input_distribution_rows_lie_on_the_code() {
        let params = PrgParams::new(6, 3, 8).unwrap();
        let (input, m) = prg_input_with_matrix(&params, &mut stream(4, "world", 0)).unwrap();
        for row in input.rows() {
            assert_eq!(row.range(4, 8), vec_mat_mul(&row.range(1, 3), &m).unwrap());
        }
        let flat = PrgParams::new(3, 4, 4).unwrap();
        let (input, m) = prg_input_with_matrix(&flat, &mut stream(4, "world", 1)).unwrap();
        assert_eq!((input.m(), m.cols()), (4, 0));
    }

    #[test]
    fn public_vector_form_is_rank_limited() {
        let mut rng = stream(5, "public", 0);
        let public = random_bitmatrix(3, 12, &mut rng);
        let seeds: Vec<BitVector> = (0..10).map(|_| random_bitvector(3, &mut rng)).collect();
        let outs = linear_combination_outputs(&public, &seeds).unwrap();
        assert!(rank(&BitMatrix::from_rows(outs).unwrap()) <= 3);
    }

    #[test]
    fn fixture_round_trip() {
        let params = PrgParams::new(3, 2, 5).unwrap();
        let bundle = SeedBundle::random(&params, &mut stream(6, "fixture", 0));
        let fx = PrgFixture::build(params, bundle).unwrap();
        let back = PrgFixture::from_json(&fx.to_json()).unwrap();
        assert_eq!(back, fx);
        assert!(back.verify().unwrap());
    }
}
