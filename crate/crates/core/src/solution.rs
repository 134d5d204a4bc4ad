//! Solution files and the independent objective checker.
//!
//! Two formats are accepted: a JSON document
//! `{"instance": .., "k": .., "objective": .., "assign": [..]}` with
//! 0-based subset ids, and plain text with one subset id per line.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::{evaluate, validate, Diagnostic, Partition};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub instance: String,
    pub k: usize,
    pub objective: i64,
    pub assign: Vec<usize>,
}

impl SolutionFile {
    pub fn new(instance: impl Into<String>, g: &Graph, p: &Partition) -> Self {
        SolutionFile {
            instance: instance.into(),
            k: p.k(),
            objective: evaluate(g, p),
            assign: p.assignment().to_vec(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("solution serializes");
        s.push('\n');
        s
    }

    pub fn to_plain(&self) -> String {
        let mut s = String::with_capacity(self.assign.len() * 2);
        for a in &self.assign {
            s.push_str(&a.to_string());
            s.push('\n');
        }
        s
    }
}

/// A solution read back from disk. Plain-text files carry neither `k` nor
/// a claimed objective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadedSolution {
    pub instance: Option<String>,
    pub k: Option<usize>,
    pub objective: Option<i64>,
    pub assign: Vec<usize>,
}

pub fn parse_solution(text: &str) -> Result<LoadedSolution> {
    if text.trim_start().starts_with('{') {
        let file: SolutionFile =
            serde_json::from_str(text).map_err(|e| Error::Solution(e.to_string()))?;
        return Ok(LoadedSolution {
            instance: Some(file.instance),
            k: Some(file.k),
            objective: Some(file.objective),
            assign: file.assign,
        });
    }
    let assign = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim().parse::<usize>().map_err(|_| {
                Error::Solution(format!(
                    "invalid subset id '{}' at line {}",
                    l.trim(),
                    i + 1
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LoadedSolution {
        instance: None,
        k: None,
        objective: None,
        assign,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub k: usize,
    pub recomputed: i64,
    pub claimed: Option<i64>,
    pub warnings: Vec<Diagnostic>,
}

impl CheckReport {
    /// True when no objective was claimed or the claim matches.
    pub fn passed(&self) -> bool {
        self.claimed.is_none_or(|c| c == self.recomputed)
    }
}

/// Recomputes the objective of a loaded solution. `k` falls back to the
/// file's value, then to one more than the largest subset id used.
pub fn check_solution(g: &Graph, sol: &LoadedSolution, k: Option<usize>) -> Result<CheckReport> {
    if sol.assign.len() != g.n() {
        return Err(Error::LengthMismatch {
            expected: g.n(),
            got: sol.assign.len(),
        });
    }
    let k = k
        .or(sol.k)
        .unwrap_or_else(|| sol.assign.iter().max().map_or(1, |m| m + 1));
    let p = Partition::new(k, sol.assign.clone())?;
    let report = validate(g, &p);
    Ok(CheckReport {
        k,
        recomputed: evaluate(g, &p),
        claimed: sol.objective,
        warnings: report.warnings,
    })
}
