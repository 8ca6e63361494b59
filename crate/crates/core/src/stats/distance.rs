use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::Pmf;
use crate::gf2::BitVector;
use crate::rng::{stream, LabRng};

/// Number of bootstrap resamples behind an empirical standard error.
pub const BOOTSTRAP_RESAMPLES: usize = 200;

/// Statistical distance `½ Σ |p(x) − q(x)|`; outcomes missing from one
/// side count as probability 0.
pub fn tv_distance(p: &Pmf, q: &Pmf) -> f64 {
    let mut sum = 0.0;
    for (o, &pm) in p {
        sum += (pm - q.mass(o)).abs();
    }
    for (o, &qm) in q {
        if p.mass(o) == 0.0 {
            sum += qm;
        }
    }
    (0.5 * sum).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalEstimate {
    pub value: f64,
    pub std_err: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub exact: Option<f64>,
    pub empirical: Option<EmpiricalEstimate>,
}

/// Plug-in statistical distance between the empirical histograms of
/// `trials` draws from each sampler, with a bootstrap standard error.
///
/// Trial `t` of sampler A draws from `stream(root_seed, "empirical_tv/a", t)`
/// and likewise for B, so results do not depend on thread scheduling.
pub fn empirical_tv<A, B>(sampler_a: A, sampler_b: B, trials: usize, root_seed: u64) -> DistanceReport
where
    A: Fn(&mut LabRng) -> BitVector + Sync,
    B: Fn(&mut LabRng) -> BitVector + Sync,
{
    assert!(trials >= 1, "empirical_tv needs at least one trial");
    let draw = |label: &str, f: &(dyn Fn(&mut LabRng) -> BitVector + Sync)| -> Vec<BitVector> {
        (0..trials as u64)
            .into_par_iter()
            .map(|t| f(&mut stream(root_seed, label, t)))
            .collect()
    };
    let xs = draw("empirical_tv/a", &sampler_a);
    let ys = draw("empirical_tv/b", &sampler_b);

    // Dense ids in first-seen order keep the bootstrap cheap.
    let mut ids: HashMap<BitVector, usize> = HashMap::new();
    let mut intern = |v: BitVector| {
        let next = ids.len();
        *ids.entry(v).or_insert(next)
    };
    let xa: Vec<usize> = xs.into_iter().map(&mut intern).collect();
    let yb: Vec<usize> = ys.into_iter().map(&mut intern).collect();
    let k = ids.len();

    let value = plug_in(&xa, &yb, k);
    let boots: Vec<f64> = (0..BOOTSTRAP_RESAMPLES as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream(root_seed, "empirical_tv/bootstrap", r);
            let ra: Vec<usize> = (0..trials).map(|_| xa[rng.random_range(0..trials)]).collect();
            let rb: Vec<usize> = (0..trials).map(|_| yb[rng.random_range(0..trials)]).collect();
            plug_in(&ra, &rb, k)
        })
        .collect();
    let mean = boots.iter().sum::<f64>() / boots.len() as f64;
    let var = boots.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / (boots.len() - 1) as f64;

    DistanceReport {
        exact: None,
        empirical: Some(EmpiricalEstimate {
            value,
            std_err: var.sqrt(),
            samples: trials,
        }),
    }
}

fn plug_in(a: &[usize], b: &[usize], k: usize) -> f64 {
    let mut diff = vec![0i64; k];
    for &x in a {
        diff[x] += 1;
    }
    for &y in b {
        diff[y] -= 1;
    }
    // Both samples have equal size.
    let total: i64 = diff.iter().map(|d| d.abs()).sum();
    (0.5 * total as f64 / a.len() as f64).clamp(0.0, 1.0)
}
