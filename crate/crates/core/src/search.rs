//! Depth-first backtracking over the engine's fixpoints.

use serde::{Deserialize, Serialize};

use crate::domains::{Domain, IntSet, Valuation, VarId};
use crate::engine::propagate_all;
use crate::error::{Error, Result};
use crate::model::Model;
use crate::propagators::Outcome;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BranchStrategy {
    /// Smallest unfixed variable: `x = min` against `x > min`.
    #[default]
    MinSplit,
    /// Smallest unfixed variable: lower half against upper half.
    Bisect,
}

/// Children of `d` on the first unfixed variable (smallest domain, ties by index).
pub fn branch(d: &Domain, strategy: BranchStrategy) -> Result<Vec<Domain>> {
    let (i, set) = d
        .sets()
        .iter()
        .enumerate()
        .filter(|(_, s)| s.len() > 1)
        .min_by_key(|(i, s)| (s.len(), *i))
        .ok_or(Error::AllFixed)?;
    let vals = set.values();
    let cut = match strategy {
        BranchStrategy::MinSplit => 1,
        BranchStrategy::Bisect => vals.len() / 2,
    };
    let (lo, hi) = vals.split_at(cut);
    let v = VarId::from(i);
    let mut left = d.clone();
    left.set(v, IntSet::from_values(lo.iter().copied()));
    let mut right = d.clone();
    right.set(v, IntSet::from_values(hi.iter().copied()));
    Ok(vec![left, right])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Limits {
    pub max_solutions: Option<u64>,
    pub max_nodes: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub failures: u64,
    pub solutions: u64,
    pub max_depth: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveResult {
    pub solutions: Vec<Valuation>,
    pub stats: SearchStats,
    /// A limit stopped the search before the tree was exhausted.
    pub truncated: bool,
}

pub fn solve(m: &Model, d: &Domain, limits: Limits) -> Result<SolveResult> {
    solve_with(m, d, limits, BranchStrategy::MinSplit)
}

pub fn solve_with(m: &Model, d: &Domain, limits: Limits, strategy: BranchStrategy) -> Result<SolveResult> {
    let mut res = SolveResult { solutions: Vec::new(), stats: SearchStats::default(), truncated: false };
    if d.has_empty() {
        return Ok(res);
    }
    let mut stack = vec![(d.clone(), 0u64)];
    while let Some((node, depth)) = stack.pop() {
        if limits.max_nodes.is_some_and(|n| res.stats.nodes >= n)
            || limits.max_solutions.is_some_and(|n| res.stats.solutions >= n)
        {
            res.truncated = true;
            break;
        }
        res.stats.nodes += 1;
        res.stats.max_depth = res.stats.max_depth.max(depth);
        let fixed = match propagate_all(m, &node)?.outcome {
            Outcome::Failure => {
                res.stats.failures += 1;
                continue;
            }
            Outcome::Fixpoint(f) => f,
        };
        if fixed.all_fixed() {
            let vals: Vec<i64> = fixed.sets().iter().map(|s| s.min().expect("fixed")).collect();
            let mut ok = true;
            for p in &m.constraints {
                let tuple: Vec<i64> = p.constraint.scope().iter().map(|v| vals[v.index()]).collect();
                if !p.constraint.eval_int(&tuple)? {
                    ok = false;
                    break;
                }
            }
            if ok {
                res.stats.solutions += 1;
                res.solutions.push(Valuation::from_ints(vals.iter().enumerate().map(|(i, &x)| (VarId::from(i), x))));
            } else {
                res.stats.failures += 1;
            }
            continue;
        }
        // Push right first so the left child is explored first.
        for child in branch(&fixed, strategy)?.into_iter().rev() {
            stack.push((child, depth + 1));
        }
    }
    Ok(res)
}
