//! Exhaustive max-k-cut for tiny graphs.
//!
//! Assignments are enumerated as restricted growth strings: vertex 0 sits
//! in subset 0 and every later vertex uses at most one label beyond the
//! largest seen so far. Each set partition with at most `k` blocks is thus
//! visited exactly once, and empty subsets are allowed.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::Partition;

pub const DEFAULT_MAX_N: usize = 16;
pub const DEFAULT_MAX_K: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactSolution {
    pub objective: i64,
    pub partition: Partition,
}

/// Optimum with the default guard `n <= 16`, `k <= 4`.
pub fn exact_max_kcut(g: &Graph, k: usize) -> Result<ExactSolution> {
    exact_max_kcut_guarded(g, k, DEFAULT_MAX_N, DEFAULT_MAX_K)
}

pub fn exact_max_kcut_guarded(
    g: &Graph,
    k: usize,
    max_n: usize,
    max_k: usize,
) -> Result<ExactSolution> {
    let n = g.n();
    if k < 2 {
        return Err(Error::InvalidK { k, n });
    }
    if n > max_n || k > max_k {
        return Err(Error::OracleGuard { n, k, max_n, max_k });
    }
    if n == 0 {
        return Ok(ExactSolution {
            objective: 0,
            partition: Partition::new(k, Vec::new())?,
        });
    }
    // Edges toward lower-numbered vertices, so a vertex's contribution is
    // known as soon as it is labeled.
    let lower: Vec<Vec<(usize, i64)>> = (0..n)
        .map(|v| {
            g.neighbors(v)
                .iter()
                .copied()
                .filter(|&(u, _)| u < v)
                .collect()
        })
        .collect();
    let mut search = Enumeration {
        k,
        lower: &lower,
        labels: vec![0; n],
        best: i64::MIN,
        best_labels: vec![0; n],
    };
    search.descend(1, 1, 0);
    Ok(ExactSolution {
        objective: search.best,
        partition: Partition::new(k, search.best_labels)?,
    })
}

struct Enumeration<'a> {
    k: usize,
    lower: &'a [Vec<(usize, i64)>],
    labels: Vec<usize>,
    best: i64,
    best_labels: Vec<usize>,
}

impl Enumeration<'_> {
    fn descend(&mut self, v: usize, used: usize, cut: i64) {
        if v == self.labels.len() {
            if cut > self.best {
                self.best = cut;
                self.best_labels.copy_from_slice(&self.labels);
            }
            return;
        }
        for label in 0..(used + 1).min(self.k) {
            self.labels[v] = label;
            let added: i64 = self.lower[v]
                .iter()
                .filter(|&&(u, _)| self.labels[u] != label)
                .map(|&(_, w)| w)
                .sum();
            self.descend(v + 1, used.max(label + 1), cut + added);
        }
    }
}
