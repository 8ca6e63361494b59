//! `bcc-lab`: seeded experiments on the broadcast congested clique.
//!
//!   bcc-lab rank-stats --n 24 --trials 100000
//!   bcc-lab prg-distinguish --n 8 --m 16 --rounds 2 --k 4,8,12,16 --protocol rank-probe
//!   bcc-lab planted-clique --n 200 --k 100 --trials 30
//!   bcc-lab break-prg --n 3 --k 1 --m 7
//!   bcc-lab lemma-check --lemma fourier --k 6 --functions 500
//!
//! Exit status: 0 when every check in the report passes, 1 when a check
//! fails, 2 on usage or parameter errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use bcc_lab::experiments::{
    cmd_break_prg, cmd_lemma_check, cmd_planted_clique, cmd_prg_distinguish, cmd_rank_stats, Acceptor,
    BreakPrgConfig, CliqueWorld, Format, Lemma, LemmaCheckConfig, PlantedCliqueConfig, PrgDistinguishConfig,
    RankStatsConfig, Report,
};
use bcc_lab::rng::{DEFAULT_ROOT_SEED, SEED_ENV_VAR};
use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "bcc-lab", version, about = "Experiments on the broadcast congested clique")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Root seed for every random stream.
    #[arg(long, global = true, env = SEED_ENV_VAR, default_value_t = DEFAULT_ROOT_SEED)]
    seed: u64,
    /// Output format.
    #[arg(long, global = true, default_value = "json")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Advantage of a built-in distinguisher against the matrix generator.
    PrgDistinguish {
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 16)]
        m: usize,
        /// Broadcast rounds.
        #[arg(long, default_value_t = 2)]
        rounds: usize,
        /// Seed lengths to sweep, comma separated.
        #[arg(long = "k", value_delimiter = ',', default_value = "4,8,12,16")]
        ks: Vec<usize>,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        /// constant, first-bits, parity or rank-probe.
        #[arg(long, default_value = "rank-probe")]
        protocol: Acceptor,
        /// Also compute the exact transcript distance (n·m ≤ 24).
        #[arg(long)]
        exact: bool,
    },
    /// Run the planted-clique finder.
    PlantedClique {
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        k: usize,
        #[arg(long, default_value_t = 30)]
        trials: usize,
        /// planted or random.
        #[arg(long, default_value = "planted")]
        world: CliqueWorld,
    },
    /// Seed-length breaker against the matrix generator.
    BreakPrg {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 7)]
        m: usize,
        /// Simulated trials per world; 0 for exact results only.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Rank distribution of uniform square matrices, formula against sampling.
    RankStats {
        #[arg(long, default_value_t = 24)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long, default_value_t = 3)]
        max_defect: usize,
    },
    /// Exact validators over randomized instances.
    LemmaCheck {
        /// fourier, chain-rule, pinsker, entropy, nb or mixture; all when omitted.
        #[arg(long, value_delimiter = ',')]
        lemma: Vec<Lemma>,
        /// Seed lengths for the Fourier check.
        #[arg(long = "k", value_delimiter = ',', default_value = "4,6,8")]
        ks: Vec<usize>,
        #[arg(long, default_value_t = 500)]
        functions: usize,
        #[arg(long, default_value_t = 200)]
        pairs: usize,
        #[arg(long, default_value_t = 12)]
        nb_k: usize,
        #[arg(long, default_value_t = 50)]
        nb_sets: usize,
    },
}

fn execute(cli: &Cli) -> anyhow::Result<(String, bool)> {
    let seed = cli.common.seed;
    let format = cli.common.format;
    fn emit<R: Report>(r: R, format: Format) -> (String, bool) {
        (r.render(format), r.passed())
    }
    Ok(match &cli.command {
        Command::PrgDistinguish {
            n,
            m,
            rounds,
            ks,
            trials,
            protocol,
            exact,
        } => emit(
            cmd_prg_distinguish(&PrgDistinguishConfig {
                n: *n,
                m: *m,
                rounds: *rounds,
                ks: ks.clone(),
                trials: *trials,
                protocol: *protocol,
                exact: *exact,
                seed,
            })?,
            format,
        ),
        Command::PlantedClique { n, k, trials, world } => emit(
            cmd_planted_clique(&PlantedCliqueConfig {
                n: *n,
                k: *k,
                trials: *trials,
                world: *world,
                seed,
            })?,
            format,
        ),
        Command::BreakPrg { n, k, m, trials } => emit(
            cmd_break_prg(&BreakPrgConfig {
                n: *n,
                k: *k,
                m: *m,
                trials: *trials,
                seed,
            })?,
            format,
        ),
        Command::RankStats { n, trials, max_defect } => emit(
            cmd_rank_stats(&RankStatsConfig {
                n: *n,
                trials: *trials,
                max_defect: *max_defect,
                seed,
            })?,
            format,
        ),
        Command::LemmaCheck {
            lemma,
            ks,
            functions,
            pairs,
            nb_k,
            nb_sets,
        } => emit(
            cmd_lemma_check(&LemmaCheckConfig {
                lemmas: if lemma.is_empty() { Lemma::ALL.to_vec() } else { lemma.clone() },
                fourier_ks: ks.clone(),
                functions: *functions,
                pairs: *pairs,
                nb_k: *nb_k,
                nb_sets: *nb_sets,
                seed,
            })?,
            format,
        ),
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (text, passed) = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let written = match &cli.common.out {
        Some(path) => fs::write(path, &text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
