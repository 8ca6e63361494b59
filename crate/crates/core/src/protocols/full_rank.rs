//! Deciding whether the row-distributed input matrix is invertible.

use crate::gf2::{is_full_rank, BitMatrix, BitVector};
use crate::model::{ProtocolSpec, Schedule, Transcript};

/// Rebuilds the `n × n` input from `n` rounds in which processor `i`
/// broadcast `A_{i,r}` in round `r`.
pub fn reconstruct_matrix(transcript: &Transcript) -> BitMatrix {
    let n = transcript.n();
    let mut a = BitMatrix::zeros(n, n);
    for r in 1..=transcript.rounds().min(n) {
        for i in 1..=n {
            a.set(i, r, transcript.bit_at(r, i));
        }
    }
    a
}

/// Processor `i` holds row `i` of `A ∈ {0,1}^{n×n}`. In round `r` it
/// broadcasts `A_{i,r}`; after `n` rounds everyone outputs the single bit
/// `[rank A = n]`.
pub fn full_rank_protocol(n: usize) -> ProtocolSpec {
    ProtocolSpec::new(n, n, Schedule::SimultaneousRounds { rounds: n }, move |_, z, p| {
        z.get(p.len() / n + 1)
    })
    .with_output(|_, _, p| {
        let a = reconstruct_matrix(p);
        BitVector::from_bits([is_full_rank(&a).expect("square")])
    })
}
