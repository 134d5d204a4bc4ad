//! Candidate solutions (k-cuts), objective evaluation and initial solutions.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Assignment of every vertex to one of `k` subsets, with cached subset
/// cardinalities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    k: usize,
    assign: Vec<usize>,
    sizes: Vec<usize>,
}

impl Partition {
    /// Builds a partition from a per-vertex assignment, checking ids.
    pub fn new(k: usize, assign: Vec<usize>) -> Result<Self> {
        let mut sizes = vec![0; k];
        for (vertex, &subset) in assign.iter().enumerate() {
            if subset >= k {
                return Err(Error::SubsetOutOfRange { vertex, subset, k });
            }
            sizes[subset] += 1;
        }
        Ok(Partition { k, assign, sizes })
    }

    /// Assembles a partition from raw parts without any consistency check.
    /// Use [`validate`] on the result before trusting it.
    pub fn from_parts(k: usize, assign: Vec<usize>, sizes: Vec<usize>) -> Self {
        Partition { k, assign, sizes }
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.assign.len()
    }

    #[inline]
    pub fn subset_of(&self, v: usize) -> usize {
        self.assign[v]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assign
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn empty_subsets(&self) -> impl Iterator<Item = usize> + '_ {
        self.sizes
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == 0)
            .map(|(i, _)| i)
    }

    /// Moves `v` to subset `to`, keeping sizes consistent.
    #[inline]
    pub(crate) fn transfer(&mut self, v: usize, to: usize) {
        let from = self.assign[v];
        self.sizes[from] -= 1;
        self.sizes[to] += 1;
        self.assign[v] = to;
    }

    pub fn into_assignment(self) -> Vec<usize> {
        self.assign
    }
}

/// Random initial solution: uniform assignment, then repair so that no
/// subset is empty by moving vertices out of subsets holding two or more.
pub fn random_initial<R: Rng + ?Sized>(g: &Graph, k: usize, rng: &mut R) -> Result<Partition> {
    let n = g.n();
    if k < 2 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    let assign = (0..n).map(|_| rng.gen_range(0..k)).collect();
    let mut p = Partition::new(k, assign)?;
    for empty in 0..k {
        if p.sizes[empty] != 0 {
            continue;
        }
        // k <= n guarantees a subset with two or more vertices while one is empty.
        let v = loop {
            let v = rng.gen_range(0..n);
            if p.sizes[p.assign[v]] >= 2 {
                break v;
            }
        };
        p.transfer(v, empty);
    }
    Ok(p)
}

/// Total weight of edges whose endpoints lie in different subsets.
pub fn evaluate(g: &Graph, p: &Partition) -> i64 {
    g.edges()
        .iter()
        .filter(|e| p.assign[e.u] != p.assign[e.v])
        .map(|e| e.w)
        .sum()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    LengthMismatch {
        expected: usize,
        got: usize,
    },
    SubsetOutOfRange {
        vertex: usize,
        subset: usize,
    },
    SizesMismatch {
        subset: usize,
        recorded: usize,
        actual: usize,
    },
    EmptySubset(usize),
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::LengthMismatch { expected, got } => {
                write!(
                    f,
                    "assignment length {got} does not match vertex count {expected}"
                )
            }
            Diagnostic::SubsetOutOfRange { vertex, subset } => {
                write!(
                    f,
                    "vertex {vertex} assigned to out-of-range subset {subset}"
                )
            }
            Diagnostic::SizesMismatch {
                subset,
                recorded,
                actual,
            } => {
                write!(
                    f,
                    "sizes mismatch: subset {subset} records {recorded}, holds {actual}"
                )
            }
            Diagnostic::EmptySubset(i) => write!(f, "empty subset {i}"),
        }
    }
}

/// Result of [`validate`]: errors make the partition unusable, warnings do not.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Validation {
    pub errors: Vec<Diagnostic>,
    pub warnings: Vec<Diagnostic>,
}

impl Validation {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }
}

/// Checks assignment range and size bookkeeping. Empty subsets are legal
/// during search and are only reported as warnings.
pub fn validate(g: &Graph, p: &Partition) -> Validation {
    let mut report = Validation::default();
    if p.assign.len() != g.n() {
        report.errors.push(Diagnostic::LengthMismatch {
            expected: g.n(),
            got: p.assign.len(),
        });
    }
    let mut actual = vec![0usize; p.k];
    for (vertex, &subset) in p.assign.iter().enumerate() {
        match actual.get_mut(subset) {
            Some(c) => *c += 1,
            None => report
                .errors
                .push(Diagnostic::SubsetOutOfRange { vertex, subset }),
        }
    }
    for (subset, &count) in actual.iter().enumerate() {
        let recorded = p.sizes.get(subset).copied().unwrap_or(0);
        if recorded != count {
            report.errors.push(Diagnostic::SizesMismatch {
                subset,
                recorded,
                actual: count,
            });
        }
        if count == 0 {
            report.warnings.push(Diagnostic::EmptySubset(subset));
        }
    }
    if p.sizes.len() != p.k {
        report.errors.push(Diagnostic::SizesMismatch {
            subset: p.k,
            recorded: p.sizes.len(),
            actual: p.k,
        });
    }
    report
}
