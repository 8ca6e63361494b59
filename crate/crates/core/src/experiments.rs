//! Seeded experiment runners behind the command-line tool.
//!
//! Every report carries `schema`, the crate version, the subcommand, the
//! root seed and the full configuration. Trial `t` of a run draws from
//! `stream(seed, label, t)`, so results do not depend on thread count and
//! identical configurations give byte-identical output. JSON is the
//! canonical format; CSV flattens each report's table.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{sample_a_k, sample_a_rand, CliqueSpec, InputDistribution, Pmf};
use crate::error::{LabError, Result};
use crate::gf2::{
    random_bitmatrix, rank, rank_defect_probability, rank_defect_probability_limit,
    BitMatrix, BitVector, DEFAULT_TRUNCATION,
};
use crate::model::{transcript_pmf, ProtocolSpec, Schedule, Transcript};
use crate::prg::{prg_input_distribution, PrgParams};
use crate::protocols::{
    finder_input, planted_clique_finder, seed_breaker, BreakerSummary, CliqueFinderParams, FinderStatus,
    MatrixPrg,
};
use crate::rng::stream;
use crate::stats::{
    advantage, tv_distance, validate_chain_rule, validate_entropy_fact, validate_fourier_lemma,
    validate_mixture_bound, validate_nb_concentration, validate_pinsker, AdvantageReport, BooleanFunctionTable,
    EXACT_TOLERANCE,
};

pub const SCHEMA_VERSION: u32 = 1;
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Tolerance for the chain rule, Pinsker and mixture checks.
pub const DISTANCE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(LabError::Parse(format!("unknown format '{other}', expected json or csv"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub schema: u32,
    pub version: String,
    pub subcommand: String,
    pub seed: u64,
}

impl Provenance {
    fn new(subcommand: &str, seed: u64) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            version: VERSION.to_string(),
            subcommand: subcommand.to_string(),
            seed,
        }
    }
}

/// Common surface of all reports.
pub trait Report: Serialize {
    /// Whether every check the run performed passed.
    fn passed(&self) -> bool;

    fn csv_header(&self) -> Vec<&'static str>;

    fn csv_rows(&self) -> Vec<Vec<String>>;

    fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.csv_header()).expect("in-memory write");
        for row in self.csv_rows() {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

// ---------------------------------------------------------------------------
// prg-distinguish

/// Built-in distinguishers for the matrix generator. Each broadcasts `j`
/// bits per processor and accepts on a public test of the transcript.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Acceptor {
    /// Broadcasts zeros and always accepts.
    Constant,
    /// Round `r`: bit `r`. Accepts iff the very first broadcast bit is 1.
    FirstBits,
    /// Round `r`: `z_r ⊕ z_{m−r+1}`. Accepts iff some round is all zeros.
    Parity,
    /// Round `r`: bit `m − r + 1`. Accepts iff the `n × j` matrix of
    /// broadcasts is rank deficient.
    RankProbe,
}

impl Acceptor {
    pub const NAMES: [&'static str; 4] = ["constant", "first-bits", "parity", "rank-probe"];

    pub fn protocol(self, n: usize, m: usize, rounds: usize) -> Result<ProtocolSpec> {
        if n == 0 || rounds == 0 || rounds > m {
            return Err(LabError::Parameter(format!(
                "need n ≥ 1 and 1 ≤ rounds ≤ m, got n = {n}, rounds = {rounds}, m = {m}"
            )));
        }
        let schedule = Schedule::SimultaneousRounds { rounds };
        let round = move |p: &Transcript| p.len() / n + 1;
        Ok(match self {
            Acceptor::Constant => ProtocolSpec::new(n, m, schedule, |_, _, _| false),
            Acceptor::FirstBits => ProtocolSpec::new(n, m, schedule, move |_, z, p| z.get(round(p))),
            Acceptor::Parity => ProtocolSpec::new(n, m, schedule, move |_, z, p| {
                let r = round(p);
                z.get(r) ^ z.get(m - r + 1)
            }),
            Acceptor::RankProbe => ProtocolSpec::new(n, m, schedule, move |_, z, p| z.get(m - round(p) + 1)),
        })
    }

    pub fn accepts(self, transcript: &Transcript) -> bool {
        let (n, rounds) = (transcript.n(), transcript.rounds());
        match self {
            Acceptor::Constant => true,
            Acceptor::FirstBits => transcript.bit(1),
            Acceptor::Parity => (1..=rounds).any(|r| (1..=n).all(|i| !transcript.bit_at(r, i))),
            Acceptor::RankProbe => {
                let mut a = BitMatrix::zeros(n, rounds);
                for r in 1..=rounds {
                    for i in 1..=n {
                        a.set(i, r, transcript.bit_at(r, i));
                    }
                }
                rank(&a) < n.min(rounds)
            }
        }
    }
}

impl FromStr for Acceptor {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(Acceptor::Constant),
            "first-bits" => Ok(Acceptor::FirstBits),
            "parity" => Ok(Acceptor::Parity),
            "rank-probe" => Ok(Acceptor::RankProbe),
            other => Err(LabError::Parameter(format!(
                "unknown protocol '{other}', expected one of {}",
                Acceptor::NAMES.join(", ")
            ))),
        }
    }
}

impl fmt::Display for Acceptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = match self {
            Acceptor::Constant => 0,
            Acceptor::FirstBits => 1,
            Acceptor::Parity => 2,
            Acceptor::RankProbe => 3,
        };
        f.write_str(Acceptor::NAMES[i])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrgDistinguishConfig {
    pub n: usize,
    pub m: usize,
    /// Broadcast rounds `j`.
    pub rounds: usize,
    /// Seed lengths to sweep.
    pub ks: Vec<usize>,
    pub trials: usize,
    pub protocol: Acceptor,
    /// Also compute the exact transcript distance (needs `n·m ≤ 24`).
    pub exact: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrgDistinguishRow {
    pub k: usize,
    /// Acceptance on uniform inputs.
    pub accept_uniform: f64,
    /// Acceptance on generator outputs.
    pub accept_prg: f64,
    pub advantage: f64,
    pub std_err: f64,
    pub exact_tv: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrgDistinguishReport {
    #[serde(flatten)]
    pub provenance: Provenance,
    pub config: PrgDistinguishConfig,
    pub rows: Vec<PrgDistinguishRow>,
    /// Advantage never rises by more than two combined standard errors
    /// from one swept `k` to the next.
    pub trend_ok: bool,
    pub pass: bool,
}

impl Report for PrgDistinguishReport {
    fn passed(&self) -> bool {
        self.pass
    }

    fn csv_header(&self) -> Vec<&'static str> {
        vec!["k", "accept_uniform", "accept_prg", "advantage", "std_err", "exact_tv"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.k.to_string(),
                    r.accept_uniform.to_string(),
                    r.accept_prg.to_string(),
                    r.advantage.to_string(),
                    r.std_err.to_string(),
                    opt(r.exact_tv),
                ]
            })
            .collect()
    }
}

/// Exact distance between the transcript laws under uniform and
/// generator inputs.
pub fn exact_transcript_tv(protocol: &ProtocolSpec, params: &PrgParams) -> Result<f64> {
    let (n, m) = (params.n, params.m);
    crate::distributions::check_enumerable("uniform inputs", n * m)?;
    let uniform = transcript_pmf(protocol, &InputDistribution::uniform(n, m).exact_pmf()?)?;
    let shared = InputDistribution::SharedMatrix { n, k: params.k, m }.exact_pmf()?;
    let pseudo = transcript_pmf(protocol, &shared)?;
    Ok(tv_distance(&uniform, &pseudo))
}

pub fn cmd_prg_distinguish(config: &PrgDistinguishConfig) -> Result<PrgDistinguishReport> {
    let PrgDistinguishConfig { n, m, rounds, trials, protocol: acceptor, .. } = *config;
    if config.ks.is_empty() {
        return Err(LabError::Parameter("sweep needs at least one k".into()));
    }
    if trials == 0 {
        return Err(LabError::Parameter("trials must be positive".into()));
    }
    let protocol = acceptor.protocol(n, m, rounds)?;
    let uniform = InputDistribution::uniform(n, m);
    let mut rows = Vec::with_capacity(config.ks.len());
    for &k in &config.ks {
        let params = PrgParams::new(n, k, m)?;
        let r: AdvantageReport = advantage(
            &protocol,
            |rng| uniform.sample(rng),
            |rng| prg_input_distribution(&params, rng),
            trials,
            |t, _| acceptor.accepts(t),
            config.seed,
            &format!("prg-distinguish/k={k}"),
        )?;
        let exact_tv = if config.exact {
            Some(exact_transcript_tv(&protocol, &params)?)
        } else {
            None
        };
        rows.push(PrgDistinguishRow {
            k,
            accept_uniform: r.accept_a,
            accept_prg: r.accept_b,
            advantage: r.advantage,
            std_err: r.std_err,
            exact_tv,
        });
    }
    let trend_ok = rows.windows(2).all(|w| {
        let slack = 2.0 * (w[0].std_err.powi(2) + w[1].std_err.powi(2)).sqrt();
        w[1].advantage <= w[0].advantage + slack
    });
    Ok(PrgDistinguishReport {
        provenance: Provenance::new("prg-distinguish", config.seed),
        config: config.clone(),
        rows,
        trend_ok,
        pass: trend_ok,
    })
}

// ---------------------------------------------------------------------------
// planted-clique

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CliqueWorld {
    /// Planted clique on a random `k`-subset.
    Planted,
    /// Plant-free random graph.
    Random,
}

impl FromStr for CliqueWorld {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "planted" => Ok(CliqueWorld::Planted),
            "random" => Ok(CliqueWorld::Random),
            other => Err(LabError::Parameter(format!(
                "unknown world '{other}', expected planted or random"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedCliqueConfig {
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    pub world: CliqueWorld,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedCliqueRow {
    pub trial: usize,
    /// `Recovered`, `AbortedTooManyActive` or `AbortedSmallClique`.
    pub status: String,
    pub members: Vec<usize>,
    pub rounds_used: usize,
    pub active: usize,
    /// Whether the reported set is exactly the hidden clique (planted
    /// world only).
    pub exact: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedCliqueSummary {
    pub recovery_rate: Option<f64>,
    pub mean_rounds: f64,
    pub max_rounds: usize,
    /// `2np + 3`.
    pub round_budget: f64,
    /// Trials reporting a set of at least `½·log₂² n` vertices.
    pub large_reports: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedCliqueReport {
    #[serde(flatten)]
    pub provenance: Provenance,
    pub config: PlantedCliqueConfig,
    pub params: CliqueFinderParams,
    pub rows: Vec<PlantedCliqueRow>,
    pub summary: PlantedCliqueSummary,
    pub pass: bool,
}

impl Report for PlantedCliqueReport {
    fn passed(&self) -> bool {
        self.pass
    }

    fn csv_header(&self) -> Vec<&'static str> {
        vec!["trial", "status", "size", "members", "rounds_used", "active", "exact"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.trial.to_string(),
                    r.status.clone(),
                    r.members.len().to_string(),
                    r.members.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "),
                    r.rounds_used.to_string(),
                    r.active.to_string(),
                    r.exact.map(|b| b.to_string()).unwrap_or_default(),
                ]
            })
            .collect()
    }
}

/// Minimum recovery rate for the planted world to pass.
pub const RECOVERY_THRESHOLD: f64 = 0.9;

pub fn cmd_planted_clique(config: &PlantedCliqueConfig) -> Result<PlantedCliqueReport> {
    let params = CliqueFinderParams::new(config.n, config.k)?;
    if config.trials == 0 {
        return Err(LabError::Parameter("trials must be positive".into()));
    }
    let finder = planted_clique_finder(params);
    let (n, k, world, seed) = (config.n, config.k, config.world, config.seed);
    let rows = (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream(seed, "planted-clique", t as u64);
            let (graph, hidden): (_, Option<CliqueSpec>) = match world {
                CliqueWorld::Planted => {
                    let (g, c) = sample_a_k(n, k, &mut rng)?;
                    (g, Some(c))
                }
                CliqueWorld::Random => (sample_a_rand(n, &mut rng), None),
            };
            let coins = random_bitmatrix(n, params.coin_bits, &mut rng);
            let result = finder.run_on(&finder_input(&params, &graph, &coins)?)?;
            let members = result.members().map(<[usize]>::to_vec).unwrap_or_default();
            let status = match result.status {
                FinderStatus::Recovered(_) => "Recovered",
                FinderStatus::AbortedTooManyActive => "AbortedTooManyActive",
                FinderStatus::AbortedSmallClique => "AbortedSmallClique",
            };
            Ok(PlantedCliqueRow {
                trial: t,
                status: status.to_string(),
                exact: hidden.map(|c| result.members() == Some(c.members())),
                members,
                rounds_used: result.rounds_used,
                active: result.active,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let trials = rows.len() as f64;
    let recovery_rate = match world {
        CliqueWorld::Planted => Some(rows.iter().filter(|r| r.exact == Some(true)).count() as f64 / trials),
        CliqueWorld::Random => None,
    };
    let summary = PlantedCliqueSummary {
        recovery_rate,
        mean_rounds: rows.iter().map(|r| r.rounds_used).sum::<usize>() as f64 / trials,
        max_rounds: rows.iter().map(|r| r.rounds_used).max().unwrap_or(0),
        round_budget: params.active_cap + 3.0,
        large_reports: rows
            .iter()
            .filter(|r| r.members.len() as f64 >= params.clique_floor)
            .count(),
    };
    let rounds_ok = summary.mean_rounds <= summary.round_budget;
    let pass = rounds_ok
        && match world {
            CliqueWorld::Planted => recovery_rate.is_some_and(|r| r >= RECOVERY_THRESHOLD),
            CliqueWorld::Random => summary.large_reports == 0,
        };
    Ok(PlantedCliqueReport {
        provenance: Provenance::new("planted-clique", seed),
        config: config.clone(),
        params,
        rows,
        summary,
        pass,
    })
}

// ---------------------------------------------------------------------------
// break-prg

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BreakPrgConfig {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    /// Monte Carlo trials per world; 0 skips the simulation.
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakPrgReport {
    #[serde(flatten)]
    pub provenance: Provenance,
    pub config: BreakPrgConfig,
    #[serde(flatten)]
    pub breaker: BreakerSummary,
    /// Exact acceptance on generator outputs, over all seeds.
    pub prg_acceptance: f64,
    /// `2^{−n}`, the bound on uniform acceptance when `seed_len + 1` bits
    /// are broadcast.
    pub uniform_bound: f64,
    pub bound_applies: bool,
    pub monte_carlo: Option<AdvantageReport>,
    pub pass: bool,
}

impl Report for BreakPrgReport {
    fn passed(&self) -> bool {
        self.pass
    }

    fn csv_header(&self) -> Vec<&'static str> {
        vec![
            "n",
            "seed_len",
            "output_len",
            "broadcast_len",
            "reachable",
            "uniform_acceptance",
            "prg_acceptance",
            "uniform_bound",
            "mc_accept_uniform",
            "mc_accept_prg",
        ]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let b = &self.breaker;
        vec![vec![
            b.n.to_string(),
            b.seed_len.to_string(),
            b.output_len.to_string(),
            b.broadcast_len.to_string(),
            b.reachable.to_string(),
            b.uniform_acceptance.to_string(),
            self.prg_acceptance.to_string(),
            self.uniform_bound.to_string(),
            opt(self.monte_carlo.map(|r| r.accept_a)),
            opt(self.monte_carlo.map(|r| r.accept_b)),
        ]]
    }
}

pub fn cmd_break_prg(config: &BreakPrgConfig) -> Result<BreakPrgReport> {
    let params = PrgParams::new(config.n, config.k, config.m)?;
    let prg = MatrixPrg(params);
    let breaker = seed_breaker(&prg)?;
    let summary = breaker.summary();
    let prg_acceptance = breaker.prg_acceptance(&prg)?;
    let monte_carlo = if config.trials > 0 {
        let uniform = InputDistribution::uniform(config.n, config.m);
        Some(advantage(
            breaker.protocol(),
            |rng| uniform.sample(rng),
            |rng| prg_input_distribution(&params, rng),
            config.trials,
            |t, _| breaker.accepts(t),
            config.seed,
            "break-prg",
        )?)
    } else {
        None
    };
    let uniform_bound = 2f64.powi(-(config.n as i32));
    let bound_applies = summary.broadcast_len == summary.seed_len + 1;
    let pass = prg_acceptance == 1.0
        && monte_carlo.is_none_or(|r| r.accept_b == 1.0)
        && (!bound_applies || summary.uniform_acceptance <= uniform_bound);
    Ok(BreakPrgReport {
        provenance: Provenance::new("break-prg", config.seed),
        config: config.clone(),
        breaker: summary,
        prg_acceptance,
        uniform_bound,
        bound_applies,
        monte_carlo,
        pass,
    })
}

// ---------------------------------------------------------------------------
// rank-stats

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankStatsConfig {
    pub n: usize,
    pub trials: usize,
    /// Largest rank defect tabulated.
    pub max_defect: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankStatsRow {
    pub defect: usize,
    /// Exact probability at this `n`.
    pub formula: f64,
    /// Limit as `n → ∞`.
    pub limit: f64,
    pub empirical: f64,
    /// Standard error of the empirical frequency under the formula.
    pub std_err: f64,
    pub within_3se: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankStatsReport {
    #[serde(flatten)]
    pub provenance: Provenance,
    pub config: RankStatsConfig,
    pub rows: Vec<RankStatsRow>,
    pub pass: bool,
}

impl Report for RankStatsReport {
    fn passed(&self) -> bool {
        self.pass
    }

    fn csv_header(&self) -> Vec<&'static str> {
        vec!["defect", "formula", "limit", "empirical", "std_err", "within_3se"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.defect.to_string(),
                    r.formula.to_string(),
                    r.limit.to_string(),
                    r.empirical.to_string(),
                    r.std_err.to_string(),
                    r.within_3se.to_string(),
                ]
            })
            .collect()
    }
}

/// Rank defects `n − rank` of `trials` uniform `n × n` matrices.
pub fn sample_rank_defects(n: usize, trials: usize, seed: u64) -> Vec<usize> {
    (0..trials as u64)
        .into_par_iter()
        .map(|t| n - rank(&random_bitmatrix(n, n, &mut stream(seed, "rank-stats", t))))
        .collect()
}

pub fn cmd_rank_stats(config: &RankStatsConfig) -> Result<RankStatsReport> {
    if config.trials == 0 {
        return Err(LabError::Parameter("trials must be positive".into()));
    }
    let defects = sample_rank_defects(config.n, config.trials, config.seed);
    let trials = config.trials as f64;
    let rows: Vec<RankStatsRow> = (0..=config.max_defect.min(config.n))
        .map(|s| {
            let formula = rank_defect_probability(config.n, s);
            let empirical = defects.iter().filter(|&&d| d == s).count() as f64 / trials;
            let std_err = (formula * (1.0 - formula) / trials).sqrt();
            RankStatsRow {
                defect: s,
                formula,
                limit: rank_defect_probability_limit(s, DEFAULT_TRUNCATION),
                empirical,
                std_err,
                within_3se: (empirical - formula).abs() <= 3.0 * std_err,
            }
        })
        .collect();
    let pass = rows.iter().all(|r| r.within_3se);
    Ok(RankStatsReport {
        provenance: Provenance::new("rank-stats", config.seed),
        config: config.clone(),
        rows,
        pass,
    })
}

// ---------------------------------------------------------------------------
// lemma-check

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lemma {
    Fourier,
    ChainRule,
    Pinsker,
    Entropy,
    Nb,
    Mixture,
}

impl Lemma {
    pub const ALL: [Lemma; 6] = [
        Lemma::Fourier,
        Lemma::ChainRule,
        Lemma::Pinsker,
        Lemma::Entropy,
        Lemma::Nb,
        Lemma::Mixture,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Lemma::Fourier => "fourier",
            Lemma::ChainRule => "chain-rule",
            Lemma::Pinsker => "pinsker",
            Lemma::Entropy => "entropy",
            Lemma::Nb => "nb",
            Lemma::Mixture => "mixture",
        }
    }
}

impl FromStr for Lemma {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        Lemma::ALL.into_iter().find(|l| l.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Lemma::ALL.iter().map(|l| l.name()).collect();
            LabError::Parameter(format!("unknown lemma '{s}', expected one of {}", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaCheckConfig {
    pub lemmas: Vec<Lemma>,
    /// Seed lengths for the Fourier sweep.
    pub fourier_ks: Vec<usize>,
    /// Random functions per Fourier `k`.
    pub functions: usize,
    /// Random pmf pairs for chain rule and Pinsker.
    pub pairs: usize,
    pub nb_k: usize,
    pub nb_sets: usize,
    pub seed: u64,
}

impl LemmaCheckConfig {
    pub fn default_sweep(seed: u64) -> Self {
        Self {
            lemmas: Lemma::ALL.to_vec(),
            fourier_ks: vec![4, 6, 8],
            functions: 500,
            pairs: 200,
            nb_k: 12,
            nb_sets: 50,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaRow {
    pub lemma: String,
    pub params: String,
    pub cases: usize,
    pub violations: usize,
    /// Largest `lhs − rhs` seen; negative means every case had slack.
    pub worst_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheckReport {
    #[serde(flatten)]
    pub provenance: Provenance,
    pub config: LemmaCheckConfig,
    pub rows: Vec<LemmaRow>,
    pub pass: bool,
}

impl Report for LemmaCheckReport {
    fn passed(&self) -> bool {
        self.pass
    }

    fn csv_header(&self) -> Vec<&'static str> {
        vec!["lemma", "params", "cases", "violations", "worst_gap"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.lemma.clone(),
                    r.params.clone(),
                    r.cases.to_string(),
                    r.violations.to_string(),
                    r.worst_gap.to_string(),
                ]
            })
            .collect()
    }
}

/// Tallies `(lhs, rhs)` pairs against `lhs ≤ rhs + tolerance`.
fn tally(lemma: Lemma, params: String, sides: &[(f64, f64)], tolerance: f64) -> LemmaRow {
    LemmaRow {
        lemma: lemma.name().to_string(),
        params,
        cases: sides.len(),
        violations: sides.iter().filter(|(l, r)| l > &(r + tolerance)).count(),
        worst_gap: sides.iter().map(|(l, r)| l - r).fold(f64::NEG_INFINITY, f64::max),
    }
}

/// Random function with a random bias, so sparse and dense functions are
/// both exercised.
pub fn random_biased_function<R: Rng + ?Sized>(arity: usize, rng: &mut R) -> Result<BooleanFunctionTable> {
    let bias: f64 = rng.random();
    let table = (0..1usize << arity).map(|_| rng.random_bool(bias)).collect();
    BooleanFunctionTable::new(arity, table)
}

/// Random pmf pair over `{0,1}^len` with `len ∈ 2..=5`; the second has
/// full support half the time.
pub fn random_pmf_pair<R: Rng + ?Sized>(rng: &mut R) -> Result<(Pmf, Pmf, usize)> {
    let len = rng.random_range(2..=5);
    let p = Pmf::random(len, rng.random_bool(0.5), rng)?;
    let q = Pmf::random(len, rng.random_bool(0.5), rng)?;
    Ok((p, q, len))
}

/// Random set of `size` distinct vectors in `{0,1}^{k+1}`.
pub fn random_vector_set<R: Rng + ?Sized>(k: usize, size: usize, rng: &mut R) -> Vec<BitVector> {
    rand::seq::index::sample(rng, 1 << (k + 1), size)
        .into_iter()
        .map(|v| BitVector::from_u64(v as u64, k + 1))
        .collect()
}

fn check_lemma(lemma: Lemma, config: &LemmaCheckConfig) -> Result<Vec<LemmaRow>> {
    let seed = config.seed;
    let label = format!("lemma-check/{}", lemma.name());
    Ok(match lemma {
        Lemma::Fourier => config
            .fourier_ks
            .iter()
            .map(|&k| {
                let sides = (0..config.functions as u64)
                    .into_par_iter()
                    .map(|t| {
                        let mut rng = stream(seed, &format!("{label}/k={k}"), t);
                        validate_fourier_lemma(&random_biased_function(k + 1, &mut rng)?)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(tally(lemma, format!("k={k}"), &sides, EXACT_TOLERANCE))
            })
            .collect::<Result<Vec<_>>>()?,
        Lemma::ChainRule | Lemma::Pinsker => {
            let sides = (0..config.pairs as u64)
                .map(|t| {
                    let mut rng = stream(seed, &label, t);
                    let (p, q, len) = random_pmf_pair(&mut rng)?;
                    Ok(if lemma == Lemma::Pinsker {
                        validate_pinsker(&p, &q)
                    } else {
                        validate_chain_rule(&p, &q, rng.random_range(1..len))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            vec![tally(lemma, "len=2..5".into(), &sides, DISTANCE_TOLERANCE)]
        }
        Lemma::Entropy => {
            let grid = 10_000;
            let violations = (1..grid)
                .filter(|&i| !validate_entropy_fact(i as f64 / grid as f64))
                .count();
            vec![LemmaRow {
                lemma: lemma.name().into(),
                params: format!("p=i/{grid}"),
                cases: grid - 1,
                violations,
                worst_gap: if violations == 0 { 0.0 } else { 1.0 },
            }]
        }
        Lemma::Nb => {
            let k = config.nb_k;
            let size = 1usize << (k - 1);
            let sides = (0..config.nb_sets as u64)
                .into_par_iter()
                .map(|t| {
                    let set = random_vector_set(k, size, &mut stream(seed, &label, t));
                    let r = validate_nb_concentration(k, &set)?;
                    Ok((r.fraction_bad, r.threshold))
                })
                .collect::<Result<Vec<_>>>()?;
            vec![tally(lemma, format!("k={k},|D|={size}"), &sides, 0.0)]
        }
        Lemma::Mixture => {
            let (n, k) = (4, 2);
            let parts = CliqueSpec::all_of_size(n, k)
                .into_iter()
                .map(|c| InputDistribution::PlantedClique { clique: c }.exact_pmf())
                .collect::<Result<Vec<_>>>()?;
            let mixture = InputDistribution::RandomPlantedClique { n, k }.exact_pmf()?;
            let identity = tv_distance(&mixture, &Pmf::average(&parts));
            let reference = InputDistribution::RandomGraph { n }.exact_pmf()?;
            let convexity = validate_mixture_bound(&parts, &reference);
            vec![
                tally(lemma, format!("identity n={n},k={k}"), &[(identity, 0.0)], DISTANCE_TOLERANCE),
                tally(lemma, format!("convexity n={n},k={k}"), &[convexity], DISTANCE_TOLERANCE),
            ]
        }
    })
}

pub fn cmd_lemma_check(config: &LemmaCheckConfig) -> Result<LemmaCheckReport> {
    if config.lemmas.contains(&Lemma::Nb) && !(2..=16).contains(&config.nb_k) {
        return Err(LabError::Parameter(format!("nb check needs 2 ≤ k ≤ 16, got {}", config.nb_k)));
    }
    let mut rows = Vec::new();
    for &lemma in &config.lemmas {
        rows.extend(check_lemma(lemma, config)?);
    }
    let pass = rows.iter().all(|r| r.violations == 0);
    Ok(LemmaCheckReport {
        provenance: Provenance::new("lemma-check", config.seed),
        config: config.clone(),
        rows,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_tv_matches_hand_count() {
        // Broadcast bit 3 of each row. Generator world: both bits are 0
        // with probability 1/4 + 3/4·1/4 = 7/16, every other pattern 3/16.
        let params = PrgParams::new(2, 2, 3).unwrap();
        let p = Acceptor::RankProbe.protocol(2, 3, 1).unwrap();
        let tv = exact_transcript_tv(&p, &params).unwrap();
        assert!((tv - 3.0 / 16.0).abs() < 1e-12, "{tv}");
    }

    #[test]
    fn acceptor_names_round_trip() {
        for name in Acceptor::NAMES {
            assert_eq!(name.parse::<Acceptor>().unwrap().to_string(), name);
        }
        assert!(matches!("majority".parse::<Acceptor>(), Err(LabError::Parameter(_))));
        assert_eq!(serde_json::to_string(&Acceptor::RankProbe).unwrap(), "\"rank-probe\"");
    }

    #[test]
    fn constant_protocol_has_no_advantage() {
        let r = cmd_prg_distinguish(&PrgDistinguishConfig {
            n: 4,
            m: 8,
            rounds: 2,
            ks: vec![2, 4],
            trials: 500,
            protocol: Acceptor::Constant,
            exact: false,
            seed: 1,
        })
        .unwrap();
        assert!(r.rows.iter().all(|row| row.advantage == 0.0));
        assert!(r.pass);
    }

    #[test]
    fn reports_are_reproducible() {
        let c = RankStatsConfig {
            n: 10,
            trials: 2000,
            max_defect: 2,
            seed: 7,
        };
        let a = cmd_rank_stats(&c).unwrap();
        let b = cmd_rank_stats(&c).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.to_csv(), b.to_csv());
        let v: serde_json::Value = serde_json::from_str(&a.to_json()).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["seed"], 7);
        assert_eq!(v["config"]["n"], 10);
        assert_eq!(a.to_csv().lines().count(), 4);
    }

    #[test]
    fn break_prg_small_case() {
        let r = cmd_break_prg(&BreakPrgConfig {
            n: 3,
            k: 1,
            m: 3,
            trials: 200,
            seed: 3,
        })
        .unwrap();
        assert_eq!(r.breaker.seed_len, 2);
        assert_eq!(r.prg_acceptance, 1.0);
        assert!(r.bound_applies);
        assert!(r.breaker.uniform_acceptance <= 0.125);
        assert!(r.pass);
    }

    #[test]
    fn break_prg_single_processor_is_degenerate() {
        let r = cmd_break_prg(&BreakPrgConfig {
            n: 1,
            k: 1,
            m: 3,
            trials: 50,
            seed: 3,
        })
        .unwrap();
        assert!(!r.bound_applies);
        assert_eq!(r.prg_acceptance, 1.0);
        assert!(r.pass);
    }

    #[test]
    fn lemma_check_small_sweep() {
        let mut c = LemmaCheckConfig::default_sweep(5);
        c.fourier_ks = vec![4];
        c.functions = 50;
        c.pairs = 50;
        c.nb_k = 8;
        c.nb_sets = 5;
        let r = cmd_lemma_check(&c).unwrap();
        assert!(r.pass, "{:#?}", r.rows);
        assert_eq!(r.rows.len(), 7);
    }

    #[test]
    fn planted_clique_everything_is_clique() {
        let r = cmd_planted_clique(&PlantedCliqueConfig {
            n: 16,
            k: 16,
            trials: 4,
            world: CliqueWorld::Planted,
            seed: 2,
        })
        .unwrap();
        assert_eq!(r.summary.recovery_rate, Some(1.0));
        assert!(r.pass);
    }

    #[test]
    fn planted_clique_rejects_large_p() {
        let e = cmd_planted_clique(&PlantedCliqueConfig {
            n: 64,
            k: 10,
            trials: 1,
            world: CliqueWorld::Planted,
            seed: 2,
        })
        .unwrap_err();
        assert!(e.to_string().contains("log2(n)^2/k"), "{e}");
    }
}
