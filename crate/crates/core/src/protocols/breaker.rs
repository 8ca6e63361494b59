//! The seed-length distinguisher: if every processor's seed has `s` bits,
//! broadcasting `s + 1` output bits each exposes the generator, since only
//! `2^{ns}` of the `2^{n(s+1)}` transcripts are reachable.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::check_enumerable;
use crate::error::{LabError, Result};
use crate::gf2::BitVector;
use crate::model::{run, ProtocolSpec, Schedule, Transcript};
use crate::prg::{generate, PrgParams, SeedBundle};
use crate::distributions::InputAssignment;

/// A distributed generator given by its seed-to-output map.
pub trait SeedPrg: Sync {
    fn n(&self) -> usize;

    /// Seed bits per processor.
    fn seed_len(&self) -> usize;

    /// Output bits per processor.
    fn output_len(&self) -> usize;

    /// Outputs of all processors from all seeds.
    fn generate(&self, seeds: &[BitVector]) -> Result<Vec<BitVector>>;
}

/// The matrix generator with the sharing phase folded in: a processor's
/// seed is its private seed followed by its share bits.
#[derive(Debug, Clone, Copy)]
pub struct MatrixPrg(pub PrgParams);

impl SeedPrg for MatrixPrg {
    fn n(&self) -> usize {
        self.0.n
    }

    fn seed_len(&self) -> usize {
        self.0.seed_len()
    }

    fn output_len(&self) -> usize {
        self.0.m
    }

    fn generate(&self, seeds: &[BitVector]) -> Result<Vec<BitVector>> {
        Ok(generate(&self.0, &SeedBundle::from_seeds(&self.0, seeds)?)?.1)
    }
}

/// Outputs equal seeds. Every transcript is reachable, so no breaker
/// can tell it from uniform.
#[derive(Debug, Clone, Copy)]
pub struct IdentityPrg {
    pub n: usize,
    pub len: usize,
}

impl SeedPrg for IdentityPrg {
    fn n(&self) -> usize {
        self.n
    }

    fn seed_len(&self) -> usize {
        self.len
    }

    fn output_len(&self) -> usize {
        self.len
    }

    fn generate(&self, seeds: &[BitVector]) -> Result<Vec<BitVector>> {
        if seeds.len() != self.n || seeds.iter().any(|s| s.len() != self.len) {
            return Err(LabError::Dimension(format!("need {} seeds of length {}", self.n, self.len)));
        }
        Ok(seeds.to_vec())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BreakerSummary {
    pub n: usize,
    pub seed_len: usize,
    pub output_len: usize,
    /// Output bits each processor broadcasts, `min(seed_len + 1, output_len)`.
    pub broadcast_len: usize,
    pub reachable: usize,
    /// `|reachable| / 2^{n·broadcast_len}`.
    pub uniform_acceptance: f64,
}

/// Precomputed distinguisher for one generator.
#[derive(Debug, Clone)]
pub struct SeedBreaker {
    n: usize,
    seed_len: usize,
    output_len: usize,
    broadcast_len: usize,
    /// Sorted packed transcripts.
    reachable: Vec<u64>,
    protocol: ProtocolSpec,
}

fn split_seeds(code: u64, n: usize, s: usize) -> Vec<BitVector> {
    (0..n)
        .map(|i| BitVector::from_bits((0..s).map(|j| code >> (i * s + j) & 1 == 1)))
        .collect()
}

/// Packs the first `n·len` transcript bits, turn `t` at bit `t − 1`.
fn pack(bits: impl Iterator<Item = bool>) -> u64 {
    bits.enumerate().fold(0, |acc, (t, b)| acc | u64::from(b) << t)
}

/// Builds the breaker by pushing all `2^{n·seed_len}` seed combinations
/// through the generator.
pub fn seed_breaker(prg: &dyn SeedPrg) -> Result<SeedBreaker> {
    let (n, s, m) = (prg.n(), prg.seed_len(), prg.output_len());
    if n == 0 || m == 0 {
        return Err(LabError::Parameter("breaker needs processors and outputs".into()));
    }
    check_enumerable("seed space", n * s)?;
    let broadcast_len = (s + 1).min(m);
    if n * broadcast_len > 64 {
        return Err(LabError::capacity("packed transcript bits", (n * broadcast_len) as u128, 64));
    }
    let mut reachable = (0u64..1 << (n * s))
        .into_par_iter()
        .map(|code| {
            let outs = prg.generate(&split_seeds(code, n, s))?;
            Ok(pack((1..=broadcast_len).flat_map(|r| outs.iter().map(move |o| o.get(r)))))
        })
        .collect::<Result<Vec<u64>>>()?;
    reachable.par_sort_unstable();
    reachable.dedup();
    let protocol = ProtocolSpec::new(n, m, Schedule::SimultaneousRounds { rounds: broadcast_len }, move |_, z, p| {
        z.get(p.len() / n + 1)
    });
    Ok(SeedBreaker {
        n,
        seed_len: s,
        output_len: m,
        broadcast_len,
        reachable,
        protocol,
    })
}

impl SeedBreaker {
    /// In round `r`, every processor broadcasts its `r`-th output bit.
    pub fn protocol(&self) -> &ProtocolSpec {
        &self.protocol
    }

    pub fn reachable_count(&self) -> usize {
        self.reachable.len()
    }

    pub fn broadcast_len(&self) -> usize {
        self.broadcast_len
    }

    pub fn accepts(&self, transcript: &Transcript) -> bool {
        let len = self.n * self.broadcast_len;
        transcript.len() >= len
            && self
                .reachable
                .binary_search(&pack(transcript.bits().iter().take(len)))
                .is_ok()
    }

    /// Exact acceptance probability on uniform outputs.
    pub fn uniform_acceptance(&self) -> f64 {
        self.reachable.len() as f64 / 2f64.powi((self.n * self.broadcast_len) as i32)
    }

    /// Exact acceptance probability on generator outputs, by simulating
    /// the broadcast protocol for every seed combination.
    pub fn prg_acceptance(&self, prg: &dyn SeedPrg) -> Result<f64> {
        let (n, s) = (self.n, self.seed_len);
        check_enumerable("seed space", n * s)?;
        let hits = (0u64..1 << (n * s))
            .into_par_iter()
            .map(|code| {
                let outs = prg.generate(&split_seeds(code, n, s))?;
                let ex = run(&self.protocol, &InputAssignment::from_rows(outs, self.output_len)?)?;
                Ok(u64::from(self.accepts(&ex.transcript)))
            })
            .try_reduce(|| 0, |a, b| Ok(a + b))?;
        Ok(hits as f64 / 2f64.powi((n * s) as i32))
    }

    pub fn summary(&self) -> BreakerSummary {
        BreakerSummary {
            n: self.n,
            seed_len: self.seed_len,
            output_len: self.output_len,
            broadcast_len: self.broadcast_len,
            reachable: self.reachable.len(),
            uniform_acceptance: self.uniform_acceptance(),
        }
    }
}
