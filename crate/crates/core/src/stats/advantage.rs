use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::InputAssignment;
use crate::error::Result;
use crate::gf2::BitVector;
use crate::model::{run, Protocol, Transcript};
use crate::rng::{stream, LabRng};

/// Acceptance rates of one distinguisher in two input worlds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdvantageReport {
    pub trials: usize,
    pub accept_a: f64,
    pub accept_b: f64,
    /// `|Pr_a[accept] − Pr_b[accept]|`.
    pub advantage: f64,
    /// Standard error of the difference of the two rates.
    pub std_err: f64,
}

impl AdvantageReport {
    pub fn from_counts(trials: usize, hits_a: usize, hits_b: usize) -> Self {
        let n = trials as f64;
        let (pa, pb) = (hits_a as f64 / n, hits_b as f64 / n);
        Self {
            trials,
            accept_a: pa,
            accept_b: pb,
            advantage: (pa - pb).abs(),
            std_err: ((pa * (1.0 - pa) + pb * (1.0 - pb)) / n).sqrt(),
        }
    }
}

/// Monte Carlo estimate of a distinguisher's advantage.
///
/// Trial `t` of world A samples from `stream(root_seed, "{label}/a", t)`
/// and world B from `"{label}/b"`.
pub fn advantage<P, A, B, F>(
    protocol: &P,
    world_a: A,
    world_b: B,
    trials: usize,
    acceptor: F,
    root_seed: u64,
    label: &str,
) -> Result<AdvantageReport>
where
    P: Protocol + ?Sized,
    A: Fn(&mut LabRng) -> Result<InputAssignment> + Sync,
    B: Fn(&mut LabRng) -> Result<InputAssignment> + Sync,
    F: Fn(&Transcript, &[BitVector]) -> bool + Sync,
{
    let count = |world: &(dyn Fn(&mut LabRng) -> Result<InputAssignment> + Sync), tag: &str| {
        let label = format!("{label}/{tag}");
        (0..trials as u64)
            .into_par_iter()
            .map(|t| {
                let input = world(&mut stream(root_seed, &label, t))?;
                let ex = run(protocol, &input)?;
                Ok(usize::from(acceptor(&ex.transcript, &ex.outputs)))
            })
            .try_reduce(|| 0, |a, b| Ok(a + b))
    };
    let hits_a = count(&world_a, "a")?;
    let hits_b = count(&world_b, "b")?;
    Ok(AdvantageReport::from_counts(trials, hits_a, hits_b))
}
