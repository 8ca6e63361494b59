//! Entropy, KL divergence and mutual information, all in bits.

use std::collections::BTreeMap;

use crate::distributions::Pmf;
use crate::gf2::BitVector;

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

pub fn entropy(p: &Pmf) -> f64 {
    -p.iter().map(|(_, &m)| plogp(m)).sum::<f64>()
}

/// `H(Ber(x))`, with `H(0) = H(1) = 0`.
pub fn binary_entropy(x: f64) -> f64 {
    -(plogp(x) + plogp(1.0 - x))
}

/// `D(p ‖ q)`; `+∞` when `p` puts mass where `q` does not.
pub fn kl_divergence(p: &Pmf, q: &Pmf) -> f64 {
    let mut d = 0.0;
    for (o, &pm) in p {
        if pm <= 0.0 {
            continue;
        }
        let qm = q.mass(o);
        if qm <= 0.0 {
            return f64::INFINITY;
        }
        d += pm * (pm / qm).log2();
    }
    d.max(0.0)
}

/// `I(X;Y) = H(X) + H(Y) − H(X,Y)` for a joint law whose first `split`
/// bits are `X` and the rest `Y`.
pub fn mutual_information(joint: &Pmf, split: usize) -> f64 {
    let hx = entropy(&joint.marginal_prefix(split));
    let hy = entropy(&joint.marginal_suffix(split));
    (hx + hy - entropy(joint)).max(0.0)
}

/// `I(X;Y) = E_{x∼X} D(Y|X=x ‖ Y)`.
pub fn mutual_information_via_kl(joint: &Pmf, split: usize) -> f64 {
    let y = joint.marginal_suffix(split);
    conditionals(joint, split)
        .values()
        .map(|(px, cond)| px * kl_divergence(cond, &y))
        .sum()
}

/// For each prefix `a` with positive mass: `(P[X = a], law of Y given X = a)`.
pub(crate) fn conditionals(joint: &Pmf, split: usize) -> BTreeMap<BitVector, (f64, Pmf)> {
    let mut groups: BTreeMap<BitVector, (f64, Pmf)> = BTreeMap::new();
    for (o, &m) in joint {
        let (a, b) = (o.range(1, split), o.range(split + 1, o.len()));
        let entry = groups.entry(a).or_default();
        entry.0 += m;
        entry.1.add(b, m);
    }
    for (mass, cond) in groups.values_mut() {
        let scale = 1.0 / *mass;
        *cond = cond.iter().map(|(o, &m)| (o.clone(), m * scale)).collect();
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pmf(items: &[(&str, f64)]) -> Pmf {
        items.iter().map(|(s, m)| (s.parse().unwrap(), *m)).collect()
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(binary_entropy(0.5), 1.0);
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        let u = Pmf::uniform_bits(3).unwrap();
        assert!((entropy(&u) - 3.0).abs() < 1e-12);
        assert_eq!(entropy(&pmf(&[("0", 1.0)])), 0.0);
    }

    #[test]
    fn kl_examples() {
        let p = pmf(&[("0", 0.3), ("1", 0.7)]);
        assert_eq!(kl_divergence(&p, &p), 0.0);
        let q = pmf(&[("0", 1.0)]);
        assert_eq!(kl_divergence(&p, &q), f64::INFINITY);
        let half = pmf(&[("0", 0.5), ("1", 0.5)]);
        let quarter = pmf(&[("0", 0.75), ("1", 0.25)]);
        let expected = 0.5 * (0.5f64 / 0.75).log2() + 0.5 * (0.5f64 / 0.25).log2();
        assert!((kl_divergence(&half, &quarter) - expected).abs() < 1e-15);
    }

    #[test]
    fn mutual_information_examples() {
        let u = Pmf::uniform_bits(2).unwrap();
        assert!(mutual_information(&u, 1).abs() < 1e-15);
        assert!(mutual_information_via_kl(&u, 1).abs() < 1e-15);

        let copy = pmf(&[("00", 0.5), ("11", 0.5)]);
        assert!((mutual_information(&copy, 1) - 1.0).abs() < 1e-12);
        assert!((mutual_information_via_kl(&copy, 1) - 1.0).abs() < 1e-12);
    }
}
