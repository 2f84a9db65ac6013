//! Brute-force reference implementations for tests.
//!
//! Nothing here shares pruning code with `checkers` or `propagators`:
//! integer notions enumerate every tuple, bounds(R) evaluates the remaining
//! expression at every corner of the remaining box, and fixpoints come from
//! an exhaustive deletion search.

use std::collections::HashSet;

use crate::checkers::Notion;
use crate::constraints::Constraint;
use crate::domains::{Domain, IntSet};
use crate::error::{Error, Result};
use crate::rational::Rat;

/// Default cap on enumerated tuples.
pub const BUDGET: u64 = 10_000_000;

fn for_each_tuple(sets: &[Vec<i64>], budget: &mut u64, mut f: impl FnMut(&[i64])) -> Result<()> {
    if sets.iter().any(|s| s.is_empty()) {
        return Ok(());
    }
    let mut idx = vec![0usize; sets.len()];
    let mut tuple: Vec<i64> = sets.iter().map(|s| s[0]).collect();
    loop {
        if *budget == 0 {
            return Err(Error::BudgetExceeded(BUDGET));
        }
        *budget -= 1;
        f(&tuple);
        let mut k = sets.len();
        loop {
            if k == 0 {
                return Ok(());
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < sets[k].len() {
                tuple[k] = sets[k][idx[k]];
                break;
            }
            idx[k] = 0;
            tuple[k] = sets[k][0];
        }
    }
}

fn integer_consistent(d: &Domain, c: &Constraint, n: Notion, budget: &mut u64) -> Result<bool> {
    let scope = c.scope();
    let sets: Vec<Vec<i64>> = scope
        .iter()
        .map(|v| {
            let s = d.get(*v);
            match (n, s.min(), s.max()) {
                (Notion::BoundsZ, Some(l), Some(u)) => (l..=u).collect(),
                _ => s.values().to_vec(),
            }
        })
        .collect();
    let mut supported: HashSet<(usize, i64)> = HashSet::new();
    let mut err = None;
    for_each_tuple(&sets, budget, |t| match c.eval_int(t) {
        Ok(true) => {
            for (p, &x) in t.iter().enumerate() {
                supported.insert((p, x));
            }
        }
        Ok(false) => {}
        Err(e) => err = Some(e),
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    for (p, v) in scope.iter().enumerate() {
        let s = d.get(*v);
        let needed: Vec<i64> =
            if n == Notion::Domain { s.values().to_vec() } else { vec![s.min().unwrap(), s.max().unwrap()] };
        if needed.iter().any(|x| !supported.contains(&(p, *x))) {
            return Ok(false);
        }
    }
    Ok(true)
}

// Value of `lhs - rhs` (or an equivalent sign-carrying expression) at an integer point.
fn residual(c: &Constraint, t: &[i64]) -> Result<i128> {
    if let Some((terms, rhs, _)) = c.as_linear() {
        let mut acc = -(rhs as i128);
        for (term, &x) in terms.iter().zip(t) {
            acc = acc
                .checked_add((term.coeff as i128).checked_mul(x as i128).ok_or(Error::Overflow)?)
                .ok_or(Error::Overflow)?;
        }
        return Ok(acc);
    }
    match c {
        Constraint::ProductLe { .. } => Ok((t[0] as i128)
            .checked_mul(t[1] as i128)
            .and_then(|p| p.checked_sub(t[2] as i128))
            .ok_or(Error::Overflow)?),
        Constraint::MonoBij { g, .. } => Ok(g.eval_int(t[1])?.checked_sub(t[0] as i128).ok_or(Error::Overflow)?),
        _ => unreachable!(),
    }
}

fn real_bound_supported(c: &Constraint, boxes: &[(i64, i64)], pos: usize, b: i64, budget: &mut u64) -> Result<bool> {
    if let Constraint::AllDifferent { .. } = c {
        // Each interval of positive length offers k distinct candidates, enough to
        // dodge the k-1 values taken by the other variables.
        let k = boxes.len() as i128;
        let cands: Vec<Vec<Rat>> = boxes
            .iter()
            .enumerate()
            .map(|(p, &(l, u))| {
                if p == pos {
                    Ok(vec![Rat::from_int(b)])
                } else if l == u {
                    Ok(vec![Rat::from_int(l)])
                } else {
                    (0..k).map(|m| Rat::new(l as i128 * k + m * (u as i128 - l as i128), k)).collect::<Result<Vec<_>>>()
                }
            })
            .collect::<Result<_>>()?;
        let idx_sets: Vec<Vec<i64>> = cands.iter().map(|c| (0..c.len() as i64).collect()).collect();
        let mut found = false;
        for_each_tuple(&idx_sets, budget, |t| {
            let pts: Vec<Rat> = t.iter().enumerate().map(|(p, &i)| cands[p][i as usize]).collect();
            let distinct = (0..pts.len()).all(|i| (i + 1..pts.len()).all(|j| pts[i] != pts[j]));
            found |= distinct;
        })?;
        return Ok(found);
    }
    let corners: Vec<Vec<i64>> = boxes
        .iter()
        .enumerate()
        .map(|(p, &(l, u))| {
            if p == pos {
                vec![b]
            } else if l == u {
                vec![l]
            } else {
                vec![l, u]
            }
        })
        .collect();
    let mut vals = Vec::new();
    let mut err = None;
    for_each_tuple(&corners, budget, |t| match residual(c, t) {
        Ok(r) => vals.push(r),
        Err(e) => err = Some(e),
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    let (lo, hi) = (*vals.iter().min().unwrap(), *vals.iter().max().unwrap());
    Ok(match c {
        // Continuous on a connected box: zero is reached iff it lies between the extremes.
        Constraint::LinEq { .. } | Constraint::MonoBij { .. } => lo <= 0 && 0 <= hi,
        // Multilinear: the minimum sits at a corner.
        Constraint::LinLe { .. } | Constraint::ProductLe { .. } => lo <= 0,
        // Affine: constant zero iff zero at every corner.
        Constraint::LinNe { .. } => lo != 0 || hi != 0,
        _ => unreachable!(),
    })
}

fn real_consistent(d: &Domain, c: &Constraint, budget: &mut u64) -> Result<bool> {
    if !c.has_real_semantics() {
        return Err(Error::RealSemanticsUndefined(c.kind().into()));
    }
    let scope = c.scope();
    let boxes: Vec<(i64, i64)> = scope.iter().map(|v| (d.get(*v).min().unwrap(), d.get(*v).max().unwrap())).collect();
    for (p, &(l, u)) in boxes.iter().enumerate() {
        for b in [l, u] {
            if !real_bound_supported(c, &boxes, p, b, budget)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Ground-truth consistency verdict by literal expansion of the definitions.
pub fn oracle_consistent(d: &Domain, c: &Constraint, n: Notion) -> Result<bool> {
    let mut budget = BUDGET;
    consistent_with(d, c, n, &mut budget)
}

fn consistent_with(d: &Domain, c: &Constraint, n: Notion, budget: &mut u64) -> Result<bool> {
    c.validate(Some(d))?;
    if c.scope().iter().any(|v| d.get(*v).is_empty()) {
        return Ok(false);
    }
    match n {
        Notion::BoundsR => real_consistent(d, c, budget),
        _ => integer_consistent(d, c, n, budget),
    }
}

/// Greatest consistent sub-domain of `d`, or `None` for failure.
///
/// Domain consistency projects the solution set. The bounds notions search
/// every way of deleting endpoints and take the hull of the consistent
/// boxes found, which must itself be consistent.
pub fn oracle_fixpoint(d: &Domain, c: &Constraint, n: Notion) -> Result<Option<Domain>> {
    c.validate(Some(d))?;
    if n == Notion::BoundsR && !c.has_real_semantics() {
        return Err(Error::RealSemanticsUndefined(c.kind().into()));
    }
    let scope = c.scope();
    if scope.iter().any(|v| d.get(*v).is_empty()) {
        return Ok(None);
    }
    let mut budget = BUDGET;
    if n == Notion::Domain {
        let sets: Vec<Vec<i64>> = scope.iter().map(|v| d.get(*v).values().to_vec()).collect();
        let mut proj: Vec<Vec<i64>> = vec![Vec::new(); scope.len()];
        let mut err = None;
        for_each_tuple(&sets, &mut budget, |t| match c.eval_int(t) {
            Ok(true) => {
                for (p, &x) in t.iter().enumerate() {
                    proj[p].push(x);
                }
            }
            Ok(false) => {}
            Err(e) => err = Some(e),
        })?;
        if let Some(e) = err {
            return Err(e);
        }
        if proj.iter().any(|p| p.is_empty()) {
            return Ok(None);
        }
        let mut out = d.clone();
        for (v, p) in scope.iter().zip(proj) {
            out.set(*v, IntSet::from_values(p));
        }
        return Ok(Some(out));
    }
    let restrict = |bx: &[(i64, i64)]| -> Domain {
        let mut out = d.clone();
        for (v, &(l, u)) in scope.iter().zip(bx) {
            let s = d.get(*v).values().iter().copied().filter(|x| l <= *x && *x <= u);
            out.set(*v, IntSet::from_values(s));
        }
        out
    };
    let start: Vec<(i64, i64)> = scope.iter().map(|v| (d.get(*v).min().unwrap(), d.get(*v).max().unwrap())).collect();
    let mut seen: HashSet<Vec<(i64, i64)>> = HashSet::new();
    let mut stack = vec![start.clone()];
    seen.insert(start);
    let mut hull: Option<Vec<(i64, i64)>> = None;
    while let Some(bx) = stack.pop() {
        let sub = restrict(&bx);
        if consistent_with(&sub, c, n, &mut budget)? {
            hull = Some(match hull {
                None => bx,
                Some(h) => h.iter().zip(&bx).map(|(a, b)| (a.0.min(b.0), a.1.max(b.1))).collect(),
            });
            continue;
        }
        for (p, v) in scope.iter().enumerate() {
            let vals = sub.get(*v).values();
            if vals.len() < 2 {
                continue;
            }
            for (l, u) in [(vals[1], vals[vals.len() - 1]), (vals[0], vals[vals.len() - 2])] {
                let mut child = bx.clone();
                child[p] = (l, u);
                if seen.insert(child.clone()) {
                    stack.push(child);
                }
            }
        }
    }
    let Some(h) = hull else { return Ok(None) };
    let out = restrict(&h);
    assert!(consistent_with(&out, c, n, &mut budget)?, "hull of consistent boxes is not consistent");
    Ok(Some(out))
}
