//! Single-constraint propagators: the greatest sub-domain that is
//! consistent for a constraint under a given notion, or failure.

use serde::{Deserialize, Serialize};

use crate::checkers::{int_support, real_support, Notion, Witness};
use crate::constraints::{Constraint, LinRel};
use crate::domains::{Domain, IntSet, VarId};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Fixpoint(Domain),
    Failure,
}

impl Outcome {
    pub fn domain(&self) -> Option<&Domain> {
        match self {
            Outcome::Fixpoint(d) => Some(d),
            Outcome::Failure => None,
        }
    }

    pub fn is_failure(&self) -> bool {
        matches!(self, Outcome::Failure)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropagationResult {
    pub outcome: Outcome,
    /// Removed values per variable, in variable order; omitted on failure.
    pub pruned: Vec<(VarId, Vec<i64>)>,
}

impl PropagationResult {
    pub(crate) fn between(before: &Domain, outcome: Outcome) -> PropagationResult {
        let pruned = match &outcome {
            Outcome::Fixpoint(after) => before
                .sets()
                .iter()
                .zip(after.sets())
                .enumerate()
                .filter_map(|(i, (b, a))| {
                    let gone: Vec<i64> = b.iter().filter(|v| !a.contains(*v)).collect();
                    (!gone.is_empty()).then(|| (VarId::from(i), gone))
                })
                .collect(),
            Outcome::Failure => Vec::new(),
        };
        PropagationResult { outcome, pruned }
    }

    pub fn pruned_count(&self) -> usize {
        self.pruned.iter().map(|(_, v)| v.len()).sum()
    }
}

/// Deletion order for the closure loop. The result never depends on it;
/// it exists so that confluence can be tested.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Schedule {
    /// Scope positions in visiting order; empty means declaration order.
    pub positions: Vec<usize>,
    /// Try the upper bound (or the largest value) first.
    pub upper_first: bool,
}

/// Greatest fixpoint of `c` under `n` below `d`.
pub fn propagate(d: &Domain, c: &Constraint, n: Notion) -> Result<PropagationResult> {
    propagate_scheduled(d, c, n, &Schedule::default())
}

pub fn propagate_scheduled(d: &Domain, c: &Constraint, n: Notion, schedule: &Schedule) -> Result<PropagationResult> {
    c.validate(Some(d))?;
    if n == Notion::BoundsR && !c.has_real_semantics() {
        return Err(Error::RealSemanticsUndefined(c.kind().to_string()));
    }
    let scope = c.scope();
    let positions: Vec<usize> =
        if schedule.positions.is_empty() { (0..scope.len()).collect() } else { schedule.positions.clone() };
    let mut cur = d.clone();
    if scope.iter().any(|v| cur.get(*v).is_empty()) {
        return Ok(PropagationResult::between(d, Outcome::Failure));
    }
    loop {
        let mut changed = false;
        for &p in &positions {
            let var = scope[p];
            if n == Notion::Domain {
                let mut values = cur.get(var).values().to_vec();
                if schedule.upper_first {
                    values.reverse();
                }
                for v in values {
                    if !supported(&cur, c, &scope, n, p, v)? {
                        cur.get_mut(var).remove(v);
                        changed = true;
                    }
                }
            } else {
                loop {
                    let s = cur.get(var);
                    let (Some(lo), Some(hi)) = (s.min(), s.max()) else { break };
                    let (first, second) = if schedule.upper_first { (hi, lo) } else { (lo, hi) };
                    let victim = if !supported(&cur, c, &scope, n, p, first)? {
                        first
                    } else if second != first && !supported(&cur, c, &scope, n, p, second)? {
                        second
                    } else {
                        break;
                    };
                    cur.get_mut(var).remove(victim);
                    changed = true;
                }
            }
            if cur.get(var).is_empty() {
                return Ok(PropagationResult::between(d, Outcome::Failure));
            }
        }
        if !changed {
            break;
        }
    }
    Ok(PropagationResult::between(d, Outcome::Fixpoint(cur)))
}

fn supported(cur: &Domain, c: &Constraint, scope: &[VarId], n: Notion, pos: usize, value: i64) -> Result<bool> {
    match n {
        Notion::Domain | Notion::BoundsD => {
            let cands: Vec<&[i64]> = scope.iter().map(|v| cur.get(*v).values()).collect();
            Ok(int_support(c, &cands, pos, value)?.is_some())
        }
        Notion::BoundsZ => {
            let ranges: Vec<IntSet> = scope.iter().map(|v| IntSet::range(cur.inf(*v), cur.sup(*v))).collect();
            let cands: Vec<&[i64]> = ranges.iter().map(IntSet::values).collect();
            Ok(int_support(c, &cands, pos, value)?.is_some())
        }
        Notion::BoundsR => {
            let boxes: Vec<(i64, i64)> = scope.iter().map(|v| (cur.inf(*v), cur.sup(*v))).collect();
            Ok(!matches!(real_support(c, scope, &boxes, pos, value)?, Witness::Absent))
        }
    }
}

fn floor_div(a: i128, b: i128) -> i128 {
    a.div_euclid(b) - if b < 0 && a.rem_euclid(b) != 0 { 1 } else { 0 }
}

fn ceil_div(a: i128, b: i128) -> i128 {
    -floor_div(-a, b)
}

fn clamp64(x: i128) -> i64 {
    x.clamp(i64::MIN as i128, i64::MAX as i128) as i64
}

/// bounds(R) propagation for linear constraints by interval bound shaving.
///
/// Each pass is linear in the number of terms: the total minimum and
/// maximum of the sum are maintained incrementally and each variable's new
/// bounds come from the rest of the sum by exact division, rounded inward.
pub fn propagate_linear_br(d: &Domain, c: &Constraint) -> Result<PropagationResult> {
    c.validate(Some(d))?;
    let (terms, rhs, rel) = c.as_linear().ok_or_else(|| Error::InvalidModel(format!("{} is not linear", c.kind())))?;
    let mut cur = d.clone();
    if terms.iter().any(|t| cur.get(t.var).is_empty()) {
        return Ok(PropagationResult::between(d, Outcome::Failure));
    }
    let rhs = rhs as i128;
    let term_range = |cur: &Domain, i: usize| -> (i128, i128) {
        let a = terms[i].coeff as i128;
        let (l, u) = (cur.inf(terms[i].var) as i128, cur.sup(terms[i].var) as i128);
        if a > 0 {
            (a * l, a * u)
        } else {
            (a * u, a * l)
        }
    };
    let fail = |d: &Domain| Ok(PropagationResult::between(d, Outcome::Failure));

    loop {
        let mut changed = false;
        match rel {
            LinRel::Eq | LinRel::Le => {
                let mut ranges: Vec<(i128, i128)> = (0..terms.len()).map(|i| term_range(&cur, i)).collect();
                let mut total_min = ranges.iter().try_fold(0i128, |s, r| s.checked_add(r.0)).ok_or(Error::Overflow)?;
                let mut total_max = ranges.iter().try_fold(0i128, |s, r| s.checked_add(r.1)).ok_or(Error::Overflow)?;
                for (i, t) in terms.iter().enumerate() {
                    let a = t.coeff as i128;
                    let rest_min = total_min - ranges[i].0;
                    let rest_max = total_max - ranges[i].1;
                    // a*x lies in [rhs - rest_max, rhs - rest_min] (no lower limit for <=).
                    let hi_ax = rhs.checked_sub(rest_min).ok_or(Error::Overflow)?;
                    let lo_ax = match rel {
                        LinRel::Eq => Some(rhs.checked_sub(rest_max).ok_or(Error::Overflow)?),
                        _ => None,
                    };
                    let (mut lb, mut ub) = (cur.inf(t.var) as i128, cur.sup(t.var) as i128);
                    if a > 0 {
                        ub = ub.min(floor_div(hi_ax, a));
                        if let Some(lo_ax) = lo_ax {
                            lb = lb.max(ceil_div(lo_ax, a));
                        }
                    } else {
                        lb = lb.max(ceil_div(hi_ax, a));
                        if let Some(lo_ax) = lo_ax {
                            ub = ub.min(floor_div(lo_ax, a));
                        }
                    }
                    if lb > ub {
                        return fail(d);
                    }
                    let set = cur.get_mut(t.var);
                    if !set.restrict(clamp64(lb), clamp64(ub)).is_empty() {
                        if set.is_empty() {
                            return fail(d);
                        }
                        changed = true;
                        let nr = term_range(&cur, i);
                        total_min = total_min - ranges[i].0 + nr.0;
                        total_max = total_max - ranges[i].1 + nr.1;
                        ranges[i] = nr;
                    }
                }
            }
            LinRel::Ne => {
                let unfixed = terms.iter().filter(|t| !cur.get(t.var).is_singleton()).count();
                if unfixed >= 2 {
                    break;
                }
                for (i, t) in terms.iter().enumerate() {
                    let others_fixed = terms.iter().enumerate().all(|(j, o)| j == i || cur.get(o.var).is_singleton());
                    if !others_fixed {
                        continue;
                    }
                    let rest = terms
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .try_fold(0i128, |s, (_, o)| s.checked_add(o.coeff as i128 * cur.inf(o.var) as i128))
                        .ok_or(Error::Overflow)?;
                    let r = rhs - rest;
                    let a = t.coeff as i128;
                    if r % a != 0 {
                        continue;
                    }
                    let forbidden = r / a;
                    let (lo, hi) = (cur.inf(t.var) as i128, cur.sup(t.var) as i128);
                    if forbidden == lo || forbidden == hi {
                        let set = cur.get_mut(t.var);
                        set.remove(forbidden as i64);
                        if set.is_empty() {
                            return fail(d);
                        }
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    Ok(PropagationResult::between(d, Outcome::Fixpoint(cur)))
}
