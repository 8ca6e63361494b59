//! A laboratory for the broadcast congested clique, BCAST(1): `n`
//! processors each hold a private input and, round after round, every
//! processor broadcasts one bit to all others.
//!
//! * [`gf2`]: packed vectors and matrices over F₂, rank, and the rank
//!   distribution of uniform matrices.
//! * [`distributions`]: random and planted-clique graphs, generator input
//!   families, and exact enumeration into [`distributions::Pmf`]s.
//! * [`model`]: the deterministic simulator, transcript laws and
//!   consistency sets.
//! * [`prg`]: the inner-product and matrix pseudo-random generators.
//! * [`protocols`]: planted-clique recovery, full-rank decision, and the
//!   seed-length breaker.
//! * [`stats`]: statistical distance, entropy, Fourier analysis and exact
//!   validators.
//! * [`experiments`]: seeded, reproducible experiment runners used by the
//!   CLI.

pub mod distributions;
pub mod error;
pub mod experiments;
pub mod gf2;
pub mod model;
pub mod prg;
pub mod protocols;
pub mod rng;
pub mod stats;

pub use error::{LabError, Result};
pub use gf2::{BitMatrix, BitVector};
