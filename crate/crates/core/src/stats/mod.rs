//! Distances between distributions, information measures, Fourier
//! analysis of boolean functions, and exact validators.
//!
//! All logarithms are base 2.

mod advantage;
mod distance;
mod fourier;
mod info;
mod validators;

pub use advantage::{advantage, AdvantageReport};
pub use distance::{empirical_tv, tv_distance, DistanceReport, EmpiricalEstimate, BOOTSTRAP_RESAMPLES};
pub use fourier::{
    fourier_coefficient, fourier_spectrum, parseval_sides, walsh_hadamard, BooleanFunctionTable,
    MAX_ARITY,
};
pub use info::{binary_entropy, entropy, kl_divergence, mutual_information, mutual_information_via_kl};
pub use validators::{
    validate_chain_rule, validate_entropy_fact, validate_fourier_lemma, validate_mixture_bound,
    validate_nb_concentration, validate_pinsker, NbConcentration, ValidatorReport, EXACT_TOLERANCE,
};
