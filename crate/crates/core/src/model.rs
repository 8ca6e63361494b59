//! Deterministic BCAST(1) simulator.
//!
//! A protocol is a family of next-bit functions `f_i(input, transcript)`
//! and output maps `o_i(input, transcript)` over `n` processors, run for a
//! fixed horizon under one of two schedules:
//!
//! * [`Schedule::SimultaneousRounds`]: in each round every processor
//!   computes its bit against the transcript as of the start of the round;
//!   the round's bits are then appended in processor order `1..=n`.
//! * [`Schedule::SequentialTurns`]: one processor speaks per turn, round
//!   robin, and sees everything broadcast before it.
//!
//! In both schedules the speaker at turn `t` is `(t − 1) mod n + 1`.
//! Randomized protocols carry their coins as extra private input bits; the
//! simulator never flips coins itself.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{check_enumerable, InputAssignment, Pmf, MAX_ENUMERATION_BITS};
use crate::error::{LabError, Result};
use crate::gf2::BitVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Schedule {
    SimultaneousRounds { rounds: usize },
    SequentialTurns { turns: usize },
}

impl Schedule {
    pub fn horizon(&self, n: usize) -> usize {
        match *self {
            Schedule::SimultaneousRounds { rounds } => rounds * n,
            Schedule::SequentialTurns { turns } => turns,
        }
    }

    /// Speaker of turn `turn` (both 1-based).
    pub fn speaker(&self, n: usize, turn: usize) -> usize {
        (turn - 1) % n + 1
    }

    /// Round containing `turn`; a round is `n` consecutive turns.
    pub fn round_of(&self, n: usize, turn: usize) -> usize {
        (turn - 1) / n + 1
    }

    /// Number of transcript bits the speaker of `turn` may condition on.
    pub fn visible_len(&self, n: usize, turn: usize) -> usize {
        match self {
            Schedule::SimultaneousRounds { .. } => (self.round_of(n, turn) - 1) * n,
            Schedule::SequentialTurns { .. } => turn - 1,
        }
    }
}

/// One broadcast.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Entry {
    pub turn: usize,
    pub speaker: usize,
    pub bit: bool,
}

/// The public record of all broadcasts so far.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Transcript {
    n: usize,
    schedule: Schedule,
    bits: BitVector,
}

impl Transcript {
    pub fn empty(n: usize, schedule: Schedule) -> Self {
        Self {
            n,
            schedule,
            bits: BitVector::zeros(0),
        }
    }

    pub fn from_bits(n: usize, schedule: Schedule, bits: BitVector) -> Result<Self> {
        if n == 0 && !bits.is_empty() {
            return Err(LabError::Protocol("broadcasts without processors".into()));
        }
        if bits.len() > schedule.horizon(n) {
            return Err(LabError::Protocol(format!(
                "{} bits exceed the horizon of {} turns",
                bits.len(),
                schedule.horizon(n)
            )));
        }
        Ok(Self { n, schedule, bits })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn schedule(&self) -> Schedule {
        self.schedule
    }

    /// Number of turns recorded.
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Bit broadcast at `turn` (1-based).
    pub fn bit(&self, turn: usize) -> bool {
        self.bits.get(turn)
    }

    /// Bit broadcast by `processor` in `round` (both 1-based).
    pub fn bit_at(&self, round: usize, processor: usize) -> bool {
        self.bits.get((round - 1) * self.n + processor)
    }

    pub fn bits(&self) -> &BitVector {
        &self.bits
    }

    /// Number of complete rounds recorded.
    pub fn rounds(&self) -> usize {
        self.len().checked_div(self.n).unwrap_or(0)
    }

    pub fn entries(&self) -> impl Iterator<Item = Entry> + '_ {
        self.bits.iter().enumerate().map(|(k, bit)| {
            let turn = k + 1;
            Entry {
                turn,
                speaker: self.schedule.speaker(self.n, turn),
                bit,
            }
        })
    }

    /// Bits broadcast by `processor`, in turn order.
    pub fn bits_of(&self, processor: usize) -> impl Iterator<Item = bool> + '_ {
        self.entries()
            .filter(move |e| e.speaker == processor)
            .map(|e| e.bit)
    }

    /// The first `len` turns.
    pub fn prefix(&self, len: usize) -> Transcript {
        Transcript {
            n: self.n,
            schedule: self.schedule,
            bits: if len == 0 {
                BitVector::zeros(0)
            } else {
                self.bits.range(1, len)
            },
        }
    }

    fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("transcript serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| LabError::Parse(e.to_string()))
    }
}

impl fmt::Debug for Transcript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Transcript(n={}, {:?}, {})", self.n, self.schedule, self.bits)
    }
}

#[derive(Serialize, Deserialize)]
struct TranscriptJson {
    n: usize,
    schedule: Schedule,
    entries: Vec<(usize, usize, u8)>,
}

impl Serialize for Transcript {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        TranscriptJson {
            n: self.n,
            schedule: self.schedule,
            entries: self
                .entries()
                .map(|e| (e.turn, e.speaker, u8::from(e.bit)))
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Transcript {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let raw = TranscriptJson::deserialize(deserializer)?;
        let mut bits = BitVector::zeros(0);
        for (k, &(turn, speaker, bit)) in raw.entries.iter().enumerate() {
            if turn != k + 1 {
                return Err(D::Error::custom(format!("expected turn {}, found {turn}", k + 1)));
            }
            if raw.n == 0 || speaker != raw.schedule.speaker(raw.n, turn) {
                return Err(D::Error::custom(format!("turn {turn} has wrong speaker {speaker}")));
            }
            if bit > 1 {
                return Err(D::Error::custom(format!("bit value {bit} at turn {turn}")));
            }
            bits.push(bit == 1);
        }
        Transcript::from_bits(raw.n, raw.schedule, bits).map_err(D::Error::custom)
    }
}

/// A BCAST(1) protocol. Implementations must be deterministic: equal
/// arguments give equal results.
pub trait Protocol: Sync {
    fn n(&self) -> usize;

    /// Input length per processor.
    fn m(&self) -> usize;

    fn schedule(&self) -> Schedule;

    /// `f_i(input, transcript)`: the bit processor `processor` (1-based)
    /// broadcasts next, given the visible transcript.
    fn next_bit(&self, processor: usize, input: &BitVector, transcript: &Transcript) -> bool;

    /// `o_i(input, transcript)`, evaluated once on the full transcript.
    fn output(&self, processor: usize, input: &BitVector, transcript: &Transcript) -> BitVector;

    fn horizon(&self) -> usize {
        self.schedule().horizon(self.n())
    }
}

type NextBitFn = dyn Fn(usize, &BitVector, &Transcript) -> bool + Send + Sync;
type OutputFn = dyn Fn(usize, &BitVector, &Transcript) -> BitVector + Send + Sync;

/// A protocol assembled from closures.
#[derive(Clone)]
pub struct ProtocolSpec {
    n: usize,
    m: usize,
    schedule: Schedule,
    next_bit: Arc<NextBitFn>,
    output_map: Arc<OutputFn>,
}

impl ProtocolSpec {
    /// The output map defaults to the empty vector.
    pub fn new<F>(n: usize, m: usize, schedule: Schedule, next_bit: F) -> Self
    where
        F: Fn(usize, &BitVector, &Transcript) -> bool + Send + Sync + 'static,
    {
        Self {
            n,
            m,
            schedule,
            next_bit: Arc::new(next_bit),
            output_map: Arc::new(|_, _, _| BitVector::zeros(0)),
        }
    }

    pub fn with_output<G>(mut self, output_map: G) -> Self
    where
        G: Fn(usize, &BitVector, &Transcript) -> BitVector + Send + Sync + 'static,
    {
        self.output_map = Arc::new(output_map);
        self
    }
}

impl fmt::Debug for ProtocolSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProtocolSpec")
            .field("n", &self.n)
            .field("m", &self.m)
            .field("schedule", &self.schedule)
            .finish_non_exhaustive()
    }
}

impl Protocol for ProtocolSpec {
    fn n(&self) -> usize {
        self.n
    }

    fn m(&self) -> usize {
        self.m
    }

    fn schedule(&self) -> Schedule {
        self.schedule
    }

    fn next_bit(&self, processor: usize, input: &BitVector, transcript: &Transcript) -> bool {
        (self.next_bit)(processor, input, transcript)
    }

    fn output(&self, processor: usize, input: &BitVector, transcript: &Transcript) -> BitVector {
        (self.output_map)(processor, input, transcript)
    }
}

/// Result of one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub transcript: Transcript,
    /// `outputs[i - 1]` is processor `i`'s output.
    pub outputs: Vec<BitVector>,
}

fn check_dims<P: Protocol + ?Sized>(protocol: &P, input: &InputAssignment) -> Result<()> {
    if input.n() != protocol.n() || input.m() != protocol.m() {
        return Err(LabError::Domain(format!(
            "protocol expects {}x{} inputs, got {}x{}",
            protocol.n(),
            protocol.m(),
            input.n(),
            input.m()
        )));
    }
    Ok(())
}

/// Runs `protocol` on `input` to its horizon.
pub fn run<P: Protocol + ?Sized>(protocol: &P, input: &InputAssignment) -> Result<Execution> {
    check_dims(protocol, input)?;
    let n = protocol.n();
    let schedule = protocol.schedule();
    let mut transcript = Transcript::empty(n, schedule);
    match schedule {
        Schedule::SimultaneousRounds { rounds } => {
            for _ in 0..rounds {
                let round_bits: Vec<bool> = (1..=n)
                    .map(|i| protocol.next_bit(i, input.row(i), &transcript))
                    .collect();
                for bit in round_bits {
                    transcript.push(bit);
                }
            }
        }
        Schedule::SequentialTurns { turns } => {
            for turn in 1..=turns {
                let i = schedule.speaker(n, turn);
                let bit = protocol.next_bit(i, input.row(i), &transcript);
                transcript.push(bit);
            }
        }
    }
    let outputs = (1..=n)
        .map(|i| protocol.output(i, input.row(i), &transcript))
        .collect();
    Ok(Execution {
        transcript,
        outputs,
    })
}

/// Exact transcript law when inputs are drawn from `input_pmf`, whose
/// outcomes are row-major input encodings. Transcripts are keyed by their
/// bit strings.
pub fn transcript_pmf<P: Protocol + ?Sized>(protocol: &P, input_pmf: &Pmf) -> Result<Pmf> {
    let limit = 1usize << MAX_ENUMERATION_BITS;
    if input_pmf.len() > limit {
        return Err(LabError::capacity(
            "transcript enumeration",
            input_pmf.len() as u128,
            limit as u128,
        ));
    }
    let (n, m) = (protocol.n(), protocol.m());
    let items: Vec<(&BitVector, &f64)> = input_pmf.iter().collect();
    let runs = items
        .par_iter()
        .map(|(encoded, &mass)| {
            let input = InputAssignment::from_row_major(encoded, n, m)?;
            Ok((run(protocol, &input)?.transcript.bits().clone(), mass))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(runs.into_iter().collect())
}

/// `D_p`: all inputs `z` of processor `processor` such that replaying its
/// next-bit function against the visible prefixes of `transcript`
/// reproduces every bit it broadcast in turns `1..=up_to_turn`.
/// Candidates are returned in increasing [`BitVector::from_u64`] order.
pub fn consistency_set<P: Protocol + ?Sized>(
    protocol: &P,
    processor: usize,
    transcript: &Transcript,
    up_to_turn: usize,
) -> Result<Vec<BitVector>> {
    let (n, m) = (protocol.n(), protocol.m());
    check_enumerable("processor inputs", m)?;
    if processor == 0 || processor > n {
        return Err(LabError::Domain(format!("processor {processor} outside 1..={n}")));
    }
    if up_to_turn > transcript.len() {
        return Err(LabError::Protocol(format!(
            "transcript has {} turns, asked for {up_to_turn}",
            transcript.len()
        )));
    }
    let schedule = protocol.schedule();
    let checks: Vec<(Transcript, bool)> = (1..=up_to_turn)
        .filter(|&t| schedule.speaker(n, t) == processor)
        .map(|t| (transcript.prefix(schedule.visible_len(n, t)), transcript.bit(t)))
        .collect();
    Ok((0..1u64 << m)
        .into_par_iter()
        .map(|v| BitVector::from_u64(v, m))
        .filter(|z| {
            checks
                .iter()
                .all(|(prefix, bit)| protocol.next_bit(processor, z, prefix) == *bit)
        })
        .collect())
}
