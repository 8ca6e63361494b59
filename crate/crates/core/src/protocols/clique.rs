//! Exact maximum clique by branch and bound with a greedy-colouring bound.
//!
//! Among all maximum cliques the lexicographically smallest vertex set is
//! returned, so every processor that solves the same graph locally agrees
//! on the answer.

use crate::error::{LabError, Result};
use crate::gf2::BitMatrix;

/// Largest graph [`max_clique`] accepts.
pub const MAX_CLIQUE_VERTICES: usize = 160;

const SET_WORDS: usize = MAX_CLIQUE_VERTICES.div_ceil(64);

#[derive(Clone, Copy, PartialEq, Eq, Default)]
struct VertexSet([u64; SET_WORDS]);

impl VertexSet {
    fn first_n(n: usize) -> Self {
        let mut s = Self::default();
        for v in 0..n {
            s.insert(v);
        }
        s
    }

    fn insert(&mut self, v: usize) {
        self.0[v / 64] |= 1 << (v % 64);
    }

    fn remove(&mut self, v: usize) {
        self.0[v / 64] &= !(1 << (v % 64));
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn and(&self, other: &Self) -> Self {
        let mut out = *self;
        for (a, b) in out.0.iter_mut().zip(other.0) {
            *a &= b;
        }
        out
    }

    fn and_not(&self, other: &Self) -> Self {
        let mut out = *self;
        for (a, b) in out.0.iter_mut().zip(other.0) {
            *a &= !b;
        }
        out
    }

    fn above(v: usize) -> Self {
        let mut s = Self::default();
        for w in 0..SET_WORDS {
            let lo = w * 64;
            s.0[w] = if v < lo {
                u64::MAX
            } else if v + 1 >= lo + 64 {
                0
            } else {
                u64::MAX << (v + 1 - lo)
            };
        }
        s
    }

    fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..SET_WORDS).flat_map(move |w| {
            let mut word = self.0[w];
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let b = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(w * 64 + b)
            })
        })
    }
}

struct Graph {
    adj: Vec<VertexSet>,
}

impl Graph {
    /// Greedy colouring of `p`: vertices in colour-class order with the
    /// running colour count, which bounds the clique size among them.
    fn colour_order(&self, p: VertexSet) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(p.len());
        let mut uncoloured = p;
        let mut colour = 0;
        while !uncoloured.is_empty() {
            colour += 1;
            let mut q = uncoloured;
            while let Some(v) = q.first() {
                q.remove(v);
                q = q.and_not(&self.adj[v]);
                uncoloured.remove(v);
                out.push((v, colour));
            }
        }
        out
    }

    /// Searches cliques extending a clique of size `depth` by vertices of
    /// `p`, raising `best` whenever a larger one is found. Returns true
    /// once `best` reaches `stop_at`.
    fn expand(&self, depth: usize, mut p: VertexSet, best: &mut usize, stop_at: usize) -> bool {
        for &(v, colour) in self.colour_order(p).iter().rev() {
            if depth + colour <= *best {
                return false;
            }
            let next = p.and(&self.adj[v]);
            if next.is_empty() {
                if depth + 1 > *best {
                    *best = depth + 1;
                    if *best >= stop_at {
                        return true;
                    }
                }
            } else if self.expand(depth + 1, next, best, stop_at) {
                return true;
            }
            p.remove(v);
        }
        false
    }

    fn clique_number(&self, p: VertexSet) -> usize {
        let mut best = 0;
        self.expand(0, p, &mut best, usize::MAX);
        best
    }

    fn has_clique_of_size(&self, p: VertexSet, size: usize) -> bool {
        if size == 0 {
            return true;
        }
        let mut best = size - 1;
        self.expand(0, p, &mut best, size)
    }
}

/// A maximum clique of the undirected graph with the given adjacency
/// matrix, as sorted 1-based vertices; the lexicographically smallest one
/// when several exist. The matrix must be symmetric with a zero diagonal.
pub fn max_clique(adjacency: &BitMatrix) -> Result<Vec<usize>> {
    let n = adjacency.rows();
    if adjacency.cols() != n {
        return Err(LabError::Dimension(format!(
            "adjacency matrix must be square, got {}x{}",
            n,
            adjacency.cols()
        )));
    }
    if n > MAX_CLIQUE_VERTICES {
        return Err(LabError::capacity(
            "max clique graph size",
            n as u128,
            MAX_CLIQUE_VERTICES as u128,
        ));
    }
    let mut adj = vec![VertexSet::default(); n];
    for i in 1..=n {
        if adjacency.get(i, i) {
            return Err(LabError::Domain(format!("self loop at vertex {i}")));
        }
        for j in 1..=n {
            if adjacency.get(i, j) != adjacency.get(j, i) {
                return Err(LabError::Domain(format!("edge ({i},{j}) is not symmetric")));
            }
            if adjacency.get(i, j) {
                adj[i - 1].insert(j - 1);
            }
        }
    }
    let graph = Graph { adj };
    let all = VertexSet::first_n(n);
    let omega = graph.clique_number(all);

    // Fix members one at a time, always taking the smallest vertex that
    // still extends to a clique of size omega.
    let mut chosen = Vec::with_capacity(omega);
    let mut candidates = all;
    while chosen.len() < omega {
        let need = omega - chosen.len() - 1;
        let v = candidates
            .iter()
            .find(|&v| {
                let rest = candidates.and(&graph.adj[v]).and(&VertexSet::above(v));
                graph.has_clique_of_size(rest, need)
            })
            .expect("some candidate extends to a maximum clique");
        chosen.push(v + 1);
        candidates = candidates.and(&graph.adj[v]).and(&VertexSet::above(v));
    }
    Ok(chosen)
}
