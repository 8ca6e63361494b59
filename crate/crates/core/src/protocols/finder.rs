//! Planted-clique recovery in `O(n·p)` rounds.
//!
//! Input of processor `i`: its adjacency row `A_{i,1..n}` followed by
//! `coin_bits` private activation coins. Rounds:
//!
//! 1. every processor announces whether it is active;
//! 2. with `N_active > 2np` everyone idles;
//! 3. for `r = 1..N_active`, each active processor broadcasts its edge bit
//!    toward the `r`-th active processor (inactive ones send 0);
//! 4. everyone computes the maximum clique `C_active` of the undirected
//!    graph on active processors (edge iff both directions are 1) and
//!    idles if it is smaller than `½·log₂² n`;
//! 5. one round of membership claims: a processor claims membership when
//!    its out-edges reach at least 9/10 of `C_active`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use super::clique::{max_clique, MAX_CLIQUE_VERTICES};
use crate::distributions::InputAssignment;
use crate::error::{LabError, Result};
use crate::gf2::{BitMatrix, BitVector};
use crate::model::{run, Protocol, Schedule, Transcript};

const CACHE_LIMIT: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CliqueFinderParams {
    pub n: usize,
    pub k: usize,
    /// Activation probability `log₂² n / k`.
    pub p: f64,
    /// Abort when more than `2np` processors activate.
    pub active_cap: f64,
    /// Abort when `C_active` has fewer than `½·log₂² n` members.
    pub clique_floor: f64,
    pub membership_fraction: f64,
    /// Activation coins appended to each input.
    pub coin_bits: usize,
}

impl CliqueFinderParams {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(LabError::Parameter(format!("clique size k = {k} must lie in 1..={n}")));
        }
        let log_sq = (n as f64).log2().powi(2);
        let p = log_sq / k as f64;
        if !(p > 0.0 && p <= 1.0) {
            return Err(LabError::Parameter(format!(
                "activation probability log2(n)^2/k = {p:.4} must lie in (0, 1]"
            )));
        }
        let coin_bits = (1.0 / p).log2().ceil() as usize + 8;
        Ok(Self {
            n,
            k,
            p,
            active_cap: 2.0 * n as f64 * p,
            clique_floor: log_sq / 2.0,
            membership_fraction: 0.9,
            coin_bits,
        })
    }

    /// Input length per processor, `n + coin_bits`.
    pub fn input_len(&self) -> usize {
        self.n + self.coin_bits
    }

    /// Coin values strictly below this integer activate the processor;
    /// the activation probability is this over `2^coin_bits`.
    pub fn activation_threshold(&self) -> u64 {
        (self.p * (1u64 << self.coin_bits) as f64).ceil() as u64
    }

    /// Exact activation probability after quantizing the coins.
    pub fn effective_p(&self) -> f64 {
        self.activation_threshold() as f64 / (1u64 << self.coin_bits) as f64
    }

    /// Rounds budget: activation, at most `min(n, ⌊2np⌋)` adjacency
    /// rounds, membership.
    pub fn rounds(&self) -> usize {
        2 + self.n.min(self.active_cap.floor() as usize)
    }

    pub fn is_active(&self, input: &BitVector) -> bool {
        let coins = input
            .range(self.n + 1, self.n + self.coin_bits)
            .iter()
            .fold(0u64, |acc, b| acc << 1 | u64::from(b));
        coins < self.activation_threshold()
    }

    fn too_many(&self, active: usize) -> bool {
        active as f64 > self.active_cap
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "members")]
pub enum FinderStatus {
    /// Sorted 1-based members of the recovered clique.
    Recovered(Vec<usize>),
    AbortedTooManyActive,
    AbortedSmallClique,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinderResult {
    #[serde(flatten)]
    pub status: FinderStatus,
    pub rounds_used: usize,
    pub active: usize,
}

impl FinderResult {
    pub fn members(&self) -> Option<&[usize]> {
        match &self.status {
            FinderStatus::Recovered(m) => Some(m),
            _ => None,
        }
    }
}

/// The finder as a [`Protocol`]. Each processor solves the same max-clique
/// instance; solutions are cached per adjacency transcript.
#[derive(Debug)]
pub struct CliqueFinder {
    params: CliqueFinderParams,
    cache: Mutex<HashMap<BitVector, Arc<Option<Vec<usize>>>>>,
}

pub fn planted_clique_finder(params: CliqueFinderParams) -> CliqueFinder {
    CliqueFinder {
        params,
        cache: Mutex::new(HashMap::new()),
    }
}

fn active_set(transcript: &Transcript) -> Vec<usize> {
    (1..=transcript.n()).filter(|&i| transcript.bit_at(1, i)).collect()
}

impl CliqueFinder {
    pub fn params(&self) -> &CliqueFinderParams {
        &self.params
    }

    /// `C_active` as original vertex labels, or `None` when the induced
    /// graph exceeds the local solver's cap. Needs rounds `1..=N_active+1`.
    fn active_clique(&self, transcript: &Transcript, active: &[usize]) -> Arc<Option<Vec<usize>>> {
        let n = self.params.n;
        let key = transcript.bits().range(1, (active.len() + 1) * n);
        if let Some(hit) = self.cache.lock().expect("cache lock").get(&key) {
            return Arc::clone(hit);
        }
        let solved = if active.len() > MAX_CLIQUE_VERTICES {
            None
        } else {
            let a = active.len();
            let mut graph = BitMatrix::zeros(a, a);
            for (x, &u) in active.iter().enumerate() {
                for (y, &v) in active.iter().enumerate() {
                    // Round 2 + y carries every active edge bit toward v.
                    if x != y && transcript.bit_at(2 + y, u) && transcript.bit_at(2 + x, v) {
                        graph.set(x + 1, y + 1, true);
                    }
                }
            }
            let local = max_clique(&graph).expect("validated square symmetric graph under the cap");
            Some(local.into_iter().map(|x| active[x - 1]).collect())
        };
        let solved = Arc::new(solved);
        let mut cache = self.cache.lock().expect("cache lock");
        if cache.len() >= CACHE_LIMIT {
            cache.clear();
        }
        cache.insert(key, Arc::clone(&solved));
        solved
    }

    fn claims(&self, processor: usize, input: &BitVector, clique: &[usize]) -> bool {
        let hits = clique
            .iter()
            .filter(|&&v| v == processor || input.get(v))
            .count();
        hits as f64 >= self.params.membership_fraction * clique.len() as f64
    }

    fn clique_large_enough(&self, clique: &[usize]) -> bool {
        clique.len() as f64 >= self.params.clique_floor
    }
}

impl Protocol for CliqueFinder {
    fn n(&self) -> usize {
        self.params.n
    }

    fn m(&self) -> usize {
        self.params.input_len()
    }

    fn schedule(&self) -> Schedule {
        Schedule::SimultaneousRounds {
            rounds: self.params.rounds(),
        }
    }

    fn next_bit(&self, processor: usize, input: &BitVector, transcript: &Transcript) -> bool {
        let round = transcript.len() / self.params.n + 1;
        if round == 1 {
            return self.params.is_active(input);
        }
        let active = active_set(transcript);
        if self.params.too_many(active.len()) {
            return false;
        }
        if round <= active.len() + 1 {
            let target = active[round - 2];
            return transcript.bit_at(1, processor) && processor != target && input.get(target);
        }
        if round == active.len() + 2 {
            return match &*self.active_clique(transcript, &active) {
                Some(c) if self.clique_large_enough(c) => self.claims(processor, input, c),
                _ => false,
            };
        }
        false
    }

    /// The membership vector read from the claims round; all zeros when
    /// the run aborted.
    fn output(&self, _: usize, _: &BitVector, transcript: &Transcript) -> BitVector {
        let n = self.params.n;
        let mut out = BitVector::zeros(n);
        if let Ok(FinderResult {
            status: FinderStatus::Recovered(members),
            ..
        }) = self.decode(transcript)
        {
            for v in members {
                out.set(v, true);
            }
        }
        out
    }
}

impl CliqueFinder {
    /// Interprets a complete transcript.
    pub fn decode(&self, transcript: &Transcript) -> Result<FinderResult> {
        if transcript.n() != self.params.n || transcript.len() != self.horizon() {
            return Err(LabError::Protocol(format!(
                "expected a complete transcript of {} bits over {} processors",
                self.horizon(),
                self.params.n
            )));
        }
        let active = active_set(transcript);
        let n_active = active.len();
        if self.params.too_many(n_active) {
            return Ok(FinderResult {
                status: FinderStatus::AbortedTooManyActive,
                rounds_used: 1,
                active: n_active,
            });
        }
        let clique = self.active_clique(transcript, &active);
        let Some(clique) = clique.as_ref() else {
            return Err(LabError::capacity(
                "active subgraph for max clique",
                n_active as u128,
                MAX_CLIQUE_VERTICES as u128,
            ));
        };
        if !self.clique_large_enough(clique) {
            return Ok(FinderResult {
                status: FinderStatus::AbortedSmallClique,
                rounds_used: 1 + n_active,
                active: n_active,
            });
        }
        let members = (1..=self.params.n)
            .filter(|&i| transcript.bit_at(n_active + 2, i))
            .collect();
        Ok(FinderResult {
            status: FinderStatus::Recovered(members),
            rounds_used: 2 + n_active,
            active: n_active,
        })
    }

    /// Runs the finder on a graph plus activation coins.
    pub fn run_on(&self, input: &InputAssignment) -> Result<FinderResult> {
        let ex = run(self, input)?;
        self.decode(&ex.transcript)
    }
}

/// Appends `coins` (an `n × coin_bits` matrix) to the adjacency rows.
pub fn finder_input(params: &CliqueFinderParams, graph: &InputAssignment, coins: &BitMatrix) -> Result<InputAssignment> {
    if graph.n() != params.n || graph.m() != params.n {
        return Err(LabError::Domain(format!(
            "expected an {0}x{0} adjacency matrix, got {1}x{2}",
            params.n,
            graph.n(),
            graph.m()
        )));
    }
    if coins.rows() != params.n || coins.cols() != params.coin_bits {
        return Err(LabError::Domain(format!(
            "expected {}x{} activation coins",
            params.n, params.coin_bits
        )));
    }
    graph.with_appended(coins)
}
