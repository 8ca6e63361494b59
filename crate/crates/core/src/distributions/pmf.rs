use std::collections::btree_map::{self, BTreeMap};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::gf2::BitVector;

/// Tolerance on the total mass of a [`Pmf`].
pub const MASS_TOLERANCE: f64 = 1e-12;

/// A finite probability mass function over bit strings.
///
/// Outcomes are kept in lexicographic bit-string order, so iteration (and
/// any floating-point sum taken over it) is reproducible.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Pmf {
    outcomes: BTreeMap<BitVector, f64>,
}

impl Pmf {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn point(outcome: BitVector) -> Self {
        let mut p = Self::new();
        p.add(outcome, 1.0);
        p
    }

    /// Uniform over the given outcomes; repeated outcomes accumulate mass.
    pub fn uniform<I: IntoIterator<Item = BitVector>>(outcomes: I) -> Self {
        let items: Vec<BitVector> = outcomes.into_iter().collect();
        let w = 1.0 / items.len() as f64;
        let mut p = Self::new();
        for o in items {
            p.add(o, w);
        }
        p
    }

    /// Uniform over `{0,1}^len`.
    pub fn uniform_bits(len: usize) -> Result<Self> {
        super::check_enumerable("uniform bit strings", len)?;
        Ok(Self::uniform(
            (0..1u64 << len).map(|v| BitVector::from_u64(v, len)),
        ))
    }

    /// Random pmf over `{0,1}^len` with independent uniform weights. With
    /// `full_support` false each outcome is dropped with probability ½
    /// (at least one is always kept).
    pub fn random<R: Rng + ?Sized>(len: usize, full_support: bool, rng: &mut R) -> Result<Self> {
        super::check_enumerable("random pmf support", len)?;
        let mut weights: Vec<(BitVector, f64)> = (0..1u64 << len)
            .filter_map(|v| {
                let keep = full_support || rng.random_bool(0.5);
                let w: f64 = rng.random();
                keep.then(|| (BitVector::from_u64(v, len), w))
            })
            .collect();
        if weights.is_empty() {
            weights.push((BitVector::from_u64(rng.random_range(0..1u64 << len), len), 1.0));
        }
        let total: f64 = weights.iter().map(|(_, w)| w).sum();
        if total == 0.0 {
            return Ok(Self::uniform(weights.into_iter().map(|(o, _)| o)));
        }
        Ok(weights.into_iter().map(|(o, w)| (o, w / total)).collect())
    }

    /// Adds `mass` to `outcome`. Zero masses are not stored.
    pub fn add(&mut self, outcome: BitVector, mass: f64) {
        if mass == 0.0 {
            return;
        }
        *self.outcomes.entry(outcome).or_insert(0.0) += mass;
    }

    pub fn mass(&self, outcome: &BitVector) -> f64 {
        self.outcomes.get(outcome).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.outcomes.values().sum()
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn iter(&self) -> btree_map::Iter<'_, BitVector, f64> {
        self.outcomes.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &BitVector> {
        self.outcomes.iter().filter(|(_, &m)| m > 0.0).map(|(o, _)| o)
    }

    /// Checks non-negativity and unit total mass.
    pub fn validate(&self) -> Result<()> {
        if let Some((o, m)) = self.outcomes.iter().find(|(_, &m)| m < 0.0 || m.is_nan()) {
            return Err(LabError::Domain(format!("outcome {o} has mass {m}")));
        }
        let total = self.total();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(LabError::Domain(format!("total mass {total} is not 1")));
        }
        Ok(())
    }

    /// Pushforward through `f`.
    pub fn map<F: FnMut(&BitVector) -> BitVector>(&self, mut f: F) -> Pmf {
        let mut out = Pmf::new();
        for (o, &m) in &self.outcomes {
            out.add(f(o), m);
        }
        out
    }

    /// Weighted mixture `Σ wᵢ·pᵢ`.
    pub fn mixture<'a, I: IntoIterator<Item = (f64, &'a Pmf)>>(parts: I) -> Pmf {
        let mut out = Pmf::new();
        for (w, p) in parts {
            for (o, &m) in &p.outcomes {
                out.add(o.clone(), w * m);
            }
        }
        out
    }

    /// Equal-weight average of the given pmfs.
    pub fn average(parts: &[Pmf]) -> Pmf {
        let w = 1.0 / parts.len() as f64;
        Pmf::mixture(parts.iter().map(|p| (w, p)))
    }

    /// Distribution of `(x, y)` with `x ~ self`, `y ~ other` independent.
    pub fn product(&self, other: &Pmf) -> Pmf {
        let mut out = Pmf::new();
        for (a, &pa) in &self.outcomes {
            for (b, &pb) in &other.outcomes {
                out.add(a.concat(b), pa * pb);
            }
        }
        out
    }

    /// Marginal on the first `split` bits.
    pub fn marginal_prefix(&self, split: usize) -> Pmf {
        self.map(|o| o.range(1, split))
    }

    /// Marginal on the bits after position `split`.
    pub fn marginal_suffix(&self, split: usize) -> Pmf {
        self.map(|o| o.range(split + 1, o.len()))
    }
}

impl FromIterator<(BitVector, f64)> for Pmf {
    fn from_iter<I: IntoIterator<Item = (BitVector, f64)>>(iter: I) -> Self {
        let mut p = Pmf::new();
        for (o, m) in iter {
            p.add(o, m);
        }
        p
    }
}

impl<'a> IntoIterator for &'a Pmf {
    type Item = (&'a BitVector, &'a f64);
    type IntoIter = btree_map::Iter<'a, BitVector, f64>;

    fn into_iter(self) -> Self::IntoIter {
        self.outcomes.iter()
    }
}
