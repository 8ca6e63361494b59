//! Exact checks of the inequalities the lab relies on. Each validator
//! returns both sides so callers can assert the inequality and report the
//! slack.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::fourier::{walsh_hadamard, BooleanFunctionTable};
use super::info::{binary_entropy, conditionals, kl_divergence};
use super::tv_distance;
use crate::distributions::Pmf;
use crate::error::{LabError, Result};
use crate::gf2::BitVector;

pub const EXACT_TOLERANCE: f64 = 1e-10;

/// One validator outcome, as emitted in reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidatorReport {
    pub lemma: String,
    pub params: serde_json::Value,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl ValidatorReport {
    /// Report for an inequality `lhs ≤ rhs + tolerance`.
    pub fn at_most(lemma: &str, params: serde_json::Value, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self {
            lemma: lemma.to_string(),
            params,
            lhs,
            rhs,
            pass: lhs <= rhs + tolerance,
        }
    }
}

/// For `f` of arity `k + 1`, returns
/// `(Σ_{b∈{0,1}^k} ‖f(𝒰_{k+1}) − f(𝒰_[b])‖², E_{x∼𝒰_{k+1}}[f(x)])`.
///
/// Splitting `f` into `g₀(x) = f(x,0)` and `g₁(x) = f(x,1)` gives
/// `E_{𝒰_[b]}[f] = E[f] + ½(ĝ₀(b) − ĝ₁(b))` for every `b`, so all the
/// conditional means come out of one Walsh–Hadamard transform of `g₀ − g₁`.
pub fn validate_fourier_lemma(f: &BooleanFunctionTable) -> Result<(f64, f64)> {
    let arity = f.arity();
    if arity == 0 {
        return Err(LabError::Domain("the lemma needs arity k + 1 ≥ 1".into()));
    }
    if arity > 17 {
        return Err(LabError::capacity("fourier lemma arity", arity as u128, 17));
    }
    let k = arity - 1;
    let half = 1usize << k;
    let mut diff: Vec<f64> = (0..half)
        .map(|x| f64::from(u8::from(f.at(x))) - f64::from(u8::from(f.at(x | half))))
        .collect();
    walsh_hadamard(&mut diff);
    let scale = 0.5 / half as f64;
    let lhs = diff.iter().map(|d| (d * scale).powi(2)).sum();
    Ok((lhs, f.mean()))
}

/// Chain rule for statistical distance over `X × Y`, where `X` is the
/// first `split` bits of each outcome. Returns
/// `(‖D − D′‖, ‖D_X − D′_X‖ + E_{a∼D_X} ‖D_{X=a} − D′_{X=a}‖)`.
///
/// A conditional at a zero-mass `a` is uniform over `Y`, taken to be every
/// suffix that occurs in either support.
pub fn validate_chain_rule(d: &Pmf, d_prime: &Pmf, split: usize) -> (f64, f64) {
    let lhs = tv_distance(d, d_prime);
    let marg = tv_distance(&d.marginal_prefix(split), &d_prime.marginal_prefix(split));

    let y_space: BTreeSet<BitVector> = d
        .iter()
        .chain(d_prime.iter())
        .map(|(o, _)| o.range(split + 1, o.len()))
        .collect();
    let uniform_y = Pmf::uniform(y_space);

    let cond = conditionals(d, split);
    let cond_prime = conditionals(d_prime, split);
    let expected: f64 = cond
        .iter()
        .map(|(a, (mass, law))| {
            let other = cond_prime.get(a).map_or(&uniform_y, |(_, l)| l);
            mass * tv_distance(law, other)
        })
        .sum();
    (lhs, marg + expected)
}

/// `(‖p − q‖, √(½·D(p‖q)))` with KL in bits; the bound is `+∞` when the
/// support of `p` is not inside that of `q`.
pub fn validate_pinsker(p: &Pmf, q: &Pmf) -> (f64, f64) {
    (tv_distance(p, q), (0.5 * kl_divergence(p, q)).sqrt())
}

/// Checks at one point that `H(p) ≥ 0.9` implies `p ∈ [0.3, 0.7]` and
/// `(1 − H(p)) / (p − ½)² ∈ [2, 3]`. The ratio clause is skipped at `p = ½`.
pub fn validate_entropy_fact(p: f64) -> bool {
    let h = binary_entropy(p);
    if h < 0.9 {
        return true;
    }
    if !(0.3..=0.7).contains(&p) {
        return false;
    }
    if p == 0.5 {
        return true;
    }
    let ratio = (1.0 - h) / (p - 0.5).powi(2);
    (2.0..=3.0).contains(&ratio)
}

/// Concentration of `N_b = |D ∩ supp(𝒰_[b])|` around `N_D / 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NbConcentration {
    pub k: usize,
    pub set_size: usize,
    /// `2^{−k/8}`.
    pub threshold: f64,
    /// Fraction of `b ∈ {0,1}^k` with `|N_b/N_D − ½| ≥ threshold`.
    pub fraction_bad: f64,
}

impl NbConcentration {
    pub fn holds(&self) -> bool {
        self.fraction_bad <= self.threshold
    }
}

/// Sweeps every `b ∈ {0,1}^k`. `set` must hold distinct vectors of length
/// `k + 1` and at least `2^{k/2}` of them.
///
/// `N_b = (N_D + W(b)) / 2` with `W(b) = Σ_{x∈D} (−1)^{x_{k+1} + x_{1..k}·b}`,
/// so all counts come from one Walsh–Hadamard transform.
pub fn validate_nb_concentration(k: usize, set: &[BitVector]) -> Result<NbConcentration> {
    if k > 16 {
        return Err(LabError::capacity("concentration sweep k", k as u128, 16));
    }
    let min_size = 2f64.powf(k as f64 / 2.0);
    if (set.len() as f64) < min_size {
        return Err(LabError::Domain(format!(
            "|D| = {} is below 2^(k/2) = {min_size:.1}",
            set.len()
        )));
    }
    let half = 1usize << k;
    let mut signs = vec![0.0f64; half];
    let mut seen = BTreeSet::new();
    for x in set {
        if x.len() != k + 1 {
            return Err(LabError::Dimension(format!(
                "set element has length {}, expected {}",
                x.len(),
                k + 1
            )));
        }
        if !seen.insert(x) {
            return Err(LabError::Domain(format!("duplicate element {x}")));
        }
        let v = x.to_u64().expect("k ≤ 16") as usize;
        let prefix = v & (half - 1);
        signs[prefix] += if v & half == 0 { 1.0 } else { -1.0 };
    }
    walsh_hadamard(&mut signs);
    let nd = set.len() as f64;
    let threshold = 2f64.powf(-(k as f64) / 8.0);
    let bad = signs
        .iter()
        .filter(|&&w| ((nd + w) / 2.0 / nd - 0.5).abs() >= threshold)
        .count();
    Ok(NbConcentration {
        k,
        set_size: set.len(),
        threshold,
        fraction_bad: bad as f64 / half as f64,
    })
}

/// `(‖avg(parts) − reference‖, avg ‖part − reference‖)`; convexity of the
/// distance makes the first never exceed the second.
pub fn validate_mixture_bound(parts: &[Pmf], reference: &Pmf) -> (f64, f64) {
    let mixture = Pmf::average(parts);
    let lhs = tv_distance(&mixture, reference);
    let rhs = parts.iter().map(|p| tv_distance(p, reference)).sum::<f64>() / parts.len() as f64;
    (lhs, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::seq::index;

    /// Conditional means by brute force over every `b` and `x`.
    fn fourier_lemma_oracle(f: &BooleanFunctionTable) -> (f64, f64) {
        let k = f.arity() - 1;
        let mean = f.mean();
        let mut lhs = 0.0;
        for b in 0..1usize << k {
            let hits = (0..1usize << k)
                .filter(|&x| {
                    let parity = (x & b).count_ones() as usize % 2;
                    f.at(x | (parity << k))
                })
                .count();
            let cond = hits as f64 / (1usize << k) as f64;
            lhs += (mean - cond).powi(2);
        }
        (lhs, mean)
    }

    fn nb_oracle(k: usize, set: &[BitVector]) -> f64 {
        let nd = set.len() as f64;
        let threshold = 2f64.powf(-(k as f64) / 8.0);
        let bad = (0..1u64 << k)
            .filter(|&b| {
                let b = BitVector::from_u64(b, k);
                let nb = set
                    .iter()
                    .filter(|x| x.get(k + 1) == crate::gf2::dot(&x.range(1, k), &b).unwrap())
                    .count() as f64;
                (nb / nd - 0.5).abs() >= threshold
            })
            .count();
        bad as f64 / (1u64 << k) as f64
    }

    #[test]
    fn fourier_lemma_examples() {
        let zero = BooleanFunctionTable::constant(4, false).unwrap();
        assert_eq!(validate_fourier_lemma(&zero).unwrap(), (0.0, 0.0));
        let one = BooleanFunctionTable::constant(4, true).unwrap();
        assert_eq!(validate_fourier_lemma(&one).unwrap(), (0.0, 1.0));
        let last = BooleanFunctionTable::from_fn(4, |x| x.get(4)).unwrap();
        let (lhs, rhs) = validate_fourier_lemma(&last).unwrap();
        assert!((lhs - 0.25).abs() < 1e-15);
        assert_eq!(rhs, 0.5);
    }

    #[test]
    fn fourier_lemma_matches_brute_force() {
        for t in 0..40 {
            let mut rng = stream(1, "fl", t);
            let f = BooleanFunctionTable::random(1 + (t as usize % 8), &mut rng).unwrap();
            let (lhs, rhs) = validate_fourier_lemma(&f).unwrap();
            let (olhs, orhs) = fourier_lemma_oracle(&f);
            assert!((lhs - olhs).abs() < 1e-12 && rhs == orhs);
            assert!(lhs <= rhs + EXACT_TOLERANCE);
        }
    }

    #[test]
    fn chain_rule_examples() {
        let d = Pmf::uniform_bits(3).unwrap();
        assert_eq!(validate_chain_rule(&d, &d, 1), (0.0, 0.0));

        // Product laws that differ only in X.
        let y = Pmf::uniform_bits(2).unwrap();
        let x1: Pmf = [("0".parse().unwrap(), 0.2), ("1".parse().unwrap(), 0.8)].into_iter().collect();
        let x2: Pmf = [("0".parse().unwrap(), 0.6), ("1".parse().unwrap(), 0.4)].into_iter().collect();
        let (lhs, rhs) = validate_chain_rule(&x1.product(&y), &x2.product(&y), 1);
        assert!((lhs - tv_distance(&x1, &x2)).abs() < 1e-15);
        assert!((rhs - lhs).abs() < 1e-15);
    }

    #[test]
    fn chain_rule_zero_mass_convention() {
        // D' has no mass on X = 1, so its conditional there is uniform on Y.
        let d: Pmf = [("10".parse().unwrap(), 1.0)].into_iter().collect();
        let dp: Pmf = [("00".parse().unwrap(), 0.5), ("01".parse().unwrap(), 0.5)]
            .into_iter()
            .collect();
        let (lhs, rhs) = validate_chain_rule(&d, &dp, 1);
        assert_eq!(lhs, 1.0);
        assert_eq!(rhs, 1.0 + 0.5);
    }

    #[test]
    fn pinsker_examples() {
        let p = Pmf::uniform_bits(2).unwrap();
        assert_eq!(validate_pinsker(&p, &p), (0.0, 0.0));
        let half: Pmf = [("0".parse().unwrap(), 0.5), ("1".parse().unwrap(), 0.5)].into_iter().collect();
        let quarter: Pmf = [("0".parse().unwrap(), 0.75), ("1".parse().unwrap(), 0.25)].into_iter().collect();
        let (tv, bound) = validate_pinsker(&half, &quarter);
        let kl = 0.5 * (0.5f64 / 0.75).log2() + 0.5 * 2f64.log2();
        assert!((tv - 0.25).abs() < 1e-15);
        assert!((bound - (0.5 * kl).sqrt()).abs() < 1e-15);
        let point = Pmf::point("0".parse().unwrap());
        assert_eq!(validate_pinsker(&half, &point).1, f64::INFINITY);
    }

    #[test]
    fn entropy_fact_examples() {
        assert!(validate_entropy_fact(0.5));
        assert!(binary_entropy(0.31) < 0.9);
        assert!((binary_entropy(0.31) - 0.8932).abs() < 1e-4);
        assert!(validate_entropy_fact(0.31));
        let h = binary_entropy(0.4);
        assert!((h - 0.971).abs() < 1e-3);
        assert!(((1.0 - h) / 0.01 - 2.9).abs() < 0.01);
        assert!(validate_entropy_fact(0.4));
    }

    #[test]
    fn entropy_fact_grid_sweep() {
        for i in 1..10_000 {
            let p = f64::from(i) * 1e-4;
            assert!(validate_entropy_fact(p), "fails at p = {p}");
        }
    }

    #[test]
    fn nb_concentration_examples() {
        let k = 4;
        let all: Vec<BitVector> = (0..1u64 << (k + 1)).map(|v| BitVector::from_u64(v, k + 1)).collect();
        let r = validate_nb_concentration(k, &all).unwrap();
        assert_eq!(r.fraction_bad, 0.0);

        // At k = 4 the threshold 2^{-1/2} exceeds any possible deviation,
        // so the planted b only registers from k = 8 on.
        let r = validate_nb_concentration(k, &support_of(k, &"1011".parse().unwrap())).unwrap();
        assert_eq!(r.fraction_bad, 0.0);

        let k = 8;
        let support = support_of(k, &"10110010".parse().unwrap());
        let r = validate_nb_concentration(k, &support).unwrap();
        assert_eq!(r.fraction_bad, 1.0 / 256.0);
        assert_eq!(nb_oracle(k, &support), 1.0 / 256.0);
    }

    fn support_of(k: usize, b0: &BitVector) -> Vec<BitVector> {
        (0..1u64 << k)
            .map(|v| {
                let mut x = BitVector::from_u64(v, k);
                x.push(crate::gf2::dot(&x, b0).unwrap());
                x
            })
            .collect()
    }

    #[test]
    fn nb_concentration_matches_direct_count() {
        let k = 8;
        for t in 0..5 {
            let mut rng = stream(2, "nb", t);
            let set: Vec<BitVector> = index::sample(&mut rng, 1 << (k + 1), 1 << (k - 1))
                .into_iter()
                .map(|v| BitVector::from_u64(v as u64, k + 1))
                .collect();
            let r = validate_nb_concentration(k, &set).unwrap();
            assert_eq!(r.fraction_bad, nb_oracle(k, &set));
        }
    }

    #[test]
    fn nb_concentration_preconditions() {
        let small = vec![BitVector::zeros(5)];
        assert!(matches!(validate_nb_concentration(4, &small), Err(LabError::Domain(_))));
        let dup = vec![BitVector::zeros(3); 4];
        assert!(validate_nb_concentration(2, &dup).is_err());
        assert!(matches!(validate_nb_concentration(17, &[]), Err(LabError::Capacity { .. })));
    }

    #[test]
    fn mixture_bound_on_planted_graphs() {
        use crate::distributions::{CliqueSpec, InputDistribution};
        let parts: Vec<Pmf> = CliqueSpec::all_of_size(3, 2)
            .into_iter()
            .map(|c| InputDistribution::PlantedClique { clique: c }.exact_pmf().unwrap())
            .collect();
        let reference = InputDistribution::RandomGraph { n: 3 }.exact_pmf().unwrap();
        let (lhs, rhs) = validate_mixture_bound(&parts, &reference);
        assert!(lhs <= rhs + 1e-12);
        assert!(lhs > 0.0);
    }
}
