//! Boolean functions `f : {0,1}^n → {0,1}` and their Fourier coefficients
//! `f̂(S) = E_x[f(x)·(−1)^{Σ_{i∈S} x_i}]`.
//!
//! Inputs are indexed by integers: bit `i` of `x` (1-based) is bit `i − 1`
//! of the index, matching [`BitVector::from_u64`]. A subset `S ⊆ [n]` is
//! likewise a mask with bit `i − 1` set for `i ∈ S`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::gf2::BitVector;

pub const MAX_ARITY: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BooleanFunctionTable {
    arity: usize,
    table: Vec<bool>,
}

impl BooleanFunctionTable {
    pub fn new(arity: usize, table: Vec<bool>) -> Result<Self> {
        if arity > MAX_ARITY {
            return Err(LabError::capacity("boolean function arity", arity as u128, MAX_ARITY as u128));
        }
        if table.len() != 1 << arity {
            return Err(LabError::Dimension(format!(
                "truth table has {} entries, arity {arity} needs {}",
                table.len(),
                1usize << arity
            )));
        }
        Ok(Self { arity, table })
    }

    pub fn from_fn<F: FnMut(&BitVector) -> bool>(arity: usize, mut f: F) -> Result<Self> {
        if arity > MAX_ARITY {
            return Err(LabError::capacity("boolean function arity", arity as u128, MAX_ARITY as u128));
        }
        let table = (0..1u64 << arity)
            .map(|v| f(&BitVector::from_u64(v, arity)))
            .collect();
        Self::new(arity, table)
    }

    pub fn constant(arity: usize, value: bool) -> Result<Self> {
        Self::new(arity, vec![value; 1 << arity.min(MAX_ARITY + 1)])
    }

    /// Uniformly random truth table.
    pub fn random<R: Rng + ?Sized>(arity: usize, rng: &mut R) -> Result<Self> {
        if arity > MAX_ARITY {
            return Err(LabError::capacity("boolean function arity", arity as u128, MAX_ARITY as u128));
        }
        Self::new(arity, (0..1usize << arity).map(|_| rng.random()).collect())
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Value at input index `x`.
    pub fn at(&self, x: usize) -> bool {
        self.table[x]
    }

    pub fn eval(&self, x: &BitVector) -> bool {
        assert_eq!(x.len(), self.arity);
        self.table[x.to_u64().expect("arity ≤ 20") as usize]
    }

    /// `E_{x∼𝒰}[f(x)]`.
    pub fn mean(&self) -> f64 {
        self.table.iter().filter(|&&b| b).count() as f64 / self.table.len() as f64
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }
}

/// `f̂(S)` by direct summation; `subset` lists 1-based coordinates.
pub fn fourier_coefficient(f: &BooleanFunctionTable, subset: &[usize]) -> Result<f64> {
    let mut mask = 0usize;
    for &i in subset {
        if i == 0 || i > f.arity() {
            return Err(LabError::Domain(format!(
                "coordinate {i} outside 1..={}",
                f.arity()
            )));
        }
        mask |= 1 << (i - 1);
    }
    Ok(coefficient_by_mask(f, mask))
}

pub(crate) fn coefficient_by_mask(f: &BooleanFunctionTable, mask: usize) -> f64 {
    let signed: i64 = f
        .table
        .iter()
        .enumerate()
        .filter(|(_, &v)| v)
        .map(|(x, _)| if (x & mask).count_ones().is_multiple_of(2) { 1 } else { -1 })
        .sum();
    signed as f64 / f.table.len() as f64
}

/// In-place unnormalized Walsh–Hadamard transform:
/// `out[s] = Σ_x v[x]·(−1)^{popcount(x & s)}`.
pub fn walsh_hadamard(values: &mut [f64]) {
    let len = values.len();
    assert!(len.is_power_of_two() || len == 0);
    let mut h = 1;
    while h < len {
        for block in (0..len).step_by(2 * h) {
            for i in block..block + h {
                let (a, b) = (values[i], values[i + h]);
                values[i] = a + b;
                values[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// All `2^arity` coefficients, indexed by subset mask.
pub fn fourier_spectrum(f: &BooleanFunctionTable) -> Vec<f64> {
    let mut v: Vec<f64> = f.table.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
    walsh_hadamard(&mut v);
    let scale = 1.0 / v.len() as f64;
    v.iter_mut().for_each(|c| *c *= scale);
    v
}

/// `(Σ_S f̂(S)², E[f²])`; equal by Parseval.
pub fn parseval_sides(f: &BooleanFunctionTable) -> (f64, f64) {
    let energy = fourier_spectrum(f).iter().map(|c| c * c).sum();
    // f takes values in {0,1}, so f² = f.
    (energy, f.mean())
}
