//! Concrete BCAST(1) protocols.

mod breaker;
mod clique;
mod finder;
mod full_rank;

pub use breaker::{seed_breaker, BreakerSummary, IdentityPrg, MatrixPrg, SeedBreaker, SeedPrg};
pub use clique::{max_clique, MAX_CLIQUE_VERTICES};
pub use finder::{
    finder_input, planted_clique_finder, CliqueFinder, CliqueFinderParams, FinderResult, FinderStatus,
};
pub use full_rank::{full_rank_protocol, reconstruct_matrix};
