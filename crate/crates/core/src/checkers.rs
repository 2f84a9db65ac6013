//! Exact decision procedures for domain, bounds(D), bounds(Z) and bounds(R)
//! consistency of a single constraint.
//!
//! The three integer notions enumerate candidate supports depth first in
//! lexicographic order over the constraint's scope, so the first support
//! found is deterministic. Linear sums and alldifferent prune partial
//! assignments that cannot be completed; the pruning never skips a
//! solution, so the enumeration stays exact.
//!
//! bounds(R) never enumerates: each bound is decided in closed form and the
//! witness is built from box corners.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constraints::{Constraint, LinRel, MonoFunc};
use crate::domains::{range_of, Domain, IntSet, Valuation, VarId};
use crate::error::{Error, Result};
use crate::rational::Rat;

/// Which consistency notion a check or propagator implements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Notion {
    Domain,
    BoundsD,
    BoundsZ,
    BoundsR,
}

impl Notion {
    /// Strongest first.
    pub const ALL: [Notion; 4] = [Notion::Domain, Notion::BoundsD, Notion::BoundsZ, Notion::BoundsR];

    pub fn name(self) -> &'static str {
        match self {
            Notion::Domain => "domain",
            Notion::BoundsD => "bounds-d",
            Notion::BoundsZ => "bounds-z",
            Notion::BoundsR => "bounds-r",
        }
    }

    /// True for the notions whose supports may come from outside `D` itself.
    pub fn is_box_based(self) -> bool {
        matches!(self, Notion::BoundsZ | Notion::BoundsR)
    }
}

impl fmt::Display for Notion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Notion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Notion> {
        Notion::ALL
            .into_iter()
            .find(|n| n.name() == s)
            .ok_or_else(|| Error::InvalidModel(format!("unknown notion `{s}`")))
    }
}

/// Certificate that the free variable `var` has a real root inside
/// `[lo, hi]` once the `fixed` bindings are applied.
///
/// Used where the supporting real value is irrational (e.g. `x1 = x2^2`
/// with `x1` fixed at 2): the constraint residual changes sign across the
/// bracket, so a root exists by continuity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootBracket {
    pub fixed: Valuation,
    pub var: VarId,
    pub lo: Rat,
    pub hi: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Witness {
    Solution(Valuation),
    Root(RootBracket),
    Absent,
}

impl Witness {
    pub fn is_absent(&self) -> bool {
        matches!(self, Witness::Absent)
    }
}

/// The support found (or not) for one value of one variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportWitness {
    pub var: VarId,
    pub value: i64,
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub consistent: bool,
    pub supports: Vec<SupportWitness>,
}

impl CheckReport {
    /// The unsupported `(var, value)` pairs.
    pub fn culprits(&self) -> impl Iterator<Item = &SupportWitness> {
        self.supports.iter().filter(|s| s.witness.is_absent())
    }

    // An empty set in the scope: nothing to support, and no solution either.
    fn from_supports_empty() -> CheckReport {
        CheckReport { consistent: false, supports: Vec::new() }
    }

    fn from_supports(supports: Vec<SupportWitness>) -> CheckReport {
        CheckReport { consistent: supports.iter().all(|s| !s.witness.is_absent()), supports }
    }
}

/// Depth-first enumeration of integer supports for one fixed scope position.
struct IntSearch<'a> {
    c: &'a Constraint,
    cands: &'a [&'a [i64]],
    pos: usize,
    order: Vec<usize>,
    vals: Vec<i64>,
    prune: Prune,
}

enum Prune {
    None,
    Linear {
        coeffs: Vec<i128>,
        rhs: i128,
        rel: LinRel,
        // suf_min[k]/suf_max[k]: range of the terms at order[k..]
        suf_min: Vec<i128>,
        suf_max: Vec<i128>,
    },
    AllDiff,
}

fn term_range(coeff: i128, cand: &[i64]) -> (i128, i128) {
    let a = coeff * cand[0] as i128;
    let b = coeff * cand[cand.len() - 1] as i128;
    (a.min(b), a.max(b))
}

impl<'a> IntSearch<'a> {
    fn new(c: &'a Constraint, cands: &'a [&'a [i64]], pos: usize, value: i64) -> Result<Self> {
        let n = cands.len();
        let order: Vec<usize> = (0..n).filter(|&p| p != pos).collect();
        let mut vals = vec![0; n];
        vals[pos] = value;
        let prune = match c.as_linear() {
            Some((terms, rhs, rel)) if rel != LinRel::Ne => {
                let coeffs: Vec<i128> = terms.iter().map(|t| t.coeff as i128).collect();
                let mut suf_min = vec![0i128; order.len() + 1];
                let mut suf_max = vec![0i128; order.len() + 1];
                for k in (0..order.len()).rev() {
                    let (lo, hi) = term_range(coeffs[order[k]], cands[order[k]]);
                    suf_min[k] = suf_min[k + 1].checked_add(lo).ok_or(Error::Overflow)?;
                    suf_max[k] = suf_max[k + 1].checked_add(hi).ok_or(Error::Overflow)?;
                }
                Prune::Linear { coeffs, rhs: rhs as i128, rel, suf_min, suf_max }
            }
            _ if matches!(c, Constraint::AllDifferent { .. }) => Prune::AllDiff,
            _ => Prune::None,
        };
        Ok(IntSearch { c, cands, pos, order, vals, prune })
    }

    fn feasible(&self, k: usize, partial: i128) -> Result<bool> {
        match &self.prune {
            Prune::Linear { rhs, rel, suf_min, suf_max, .. } => {
                let lo = partial.checked_add(suf_min[k]).ok_or(Error::Overflow)?;
                let hi = partial.checked_add(suf_max[k]).ok_or(Error::Overflow)?;
                Ok(match rel {
                    LinRel::Eq => lo <= *rhs && *rhs <= hi,
                    _ => lo <= *rhs,
                })
            }
            _ => Ok(true),
        }
    }

    fn run(&mut self) -> Result<Option<Vec<i64>>> {
        let partial = match &self.prune {
            Prune::Linear { coeffs, .. } => coeffs[self.pos] * self.vals[self.pos] as i128,
            _ => 0,
        };
        if !self.feasible(0, partial)? {
            return Ok(None);
        }
        if self.dfs(0, partial)? {
            Ok(Some(self.vals.clone()))
        } else {
            Ok(None)
        }
    }

    fn dfs(&mut self, k: usize, partial: i128) -> Result<bool> {
        if k == self.order.len() {
            return self.c.eval_int(&self.vals);
        }
        let p = self.order[k];
        for &v in self.cands[p] {
            let mut next = partial;
            match &self.prune {
                Prune::AllDiff => {
                    if self.vals[self.pos] == v || self.order[..k].iter().any(|&q| self.vals[q] == v) {
                        continue;
                    }
                }
                Prune::Linear { coeffs, .. } => {
                    next = partial.checked_add(coeffs[p] * v as i128).ok_or(Error::Overflow)?;
                    if !self.feasible(k + 1, next)? {
                        continue;
                    }
                }
                Prune::None => {}
            }
            self.vals[p] = v;
            if self.dfs(k + 1, next)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Lexicographically first integer support of `scope[pos] = value`, with
/// every other position drawn from its candidate list (sorted ascending).
pub(crate) fn int_support(c: &Constraint, cands: &[&[i64]], pos: usize, value: i64) -> Result<Option<Vec<i64>>> {
    if cands.iter().enumerate().any(|(p, s)| p != pos && s.is_empty()) {
        return Ok(None);
    }
    if let Constraint::Table { rows, .. } = c {
        let mut sorted: Vec<&Vec<i64>> = rows
            .iter()
            .filter(|r| {
                r[pos] == value && r.iter().enumerate().all(|(p, x)| p == pos || cands[p].binary_search(x).is_ok())
            })
            .collect();
        sorted.sort();
        return Ok(sorted.first().map(|r| r.to_vec()));
    }
    IntSearch::new(c, cands, pos, value)?.run()
}

fn valuation_of(scope: &[VarId], vals: &[i64]) -> Valuation {
    Valuation::from_ints(scope.iter().copied().zip(vals.iter().copied()))
}

fn check_integer(d: &Domain, c: &Constraint, source: &Domain, all_values: bool) -> Result<CheckReport> {
    c.validate(Some(d))?;
    let scope = c.scope();
    if scope.iter().any(|v| d.get(*v).is_empty()) {
        return Ok(CheckReport::from_supports_empty());
    }
    let cands: Vec<&[i64]> = scope.iter().map(|v| source.get(*v).values()).collect();
    let mut supports = Vec::new();
    for (pos, &var) in scope.iter().enumerate() {
        let values: Vec<i64> = if all_values { d.get(var).values().to_vec() } else { bound_values(d.get(var)) };
        for value in values {
            let witness = match int_support(c, &cands, pos, value)? {
                Some(vals) => Witness::Solution(valuation_of(&scope, &vals)),
                None => Witness::Absent,
            };
            supports.push(SupportWitness { var, value, witness });
        }
    }
    Ok(CheckReport::from_supports(supports))
}

fn bound_values(s: &IntSet) -> Vec<i64> {
    match (s.min(), s.max()) {
        (Some(lo), Some(hi)) if lo == hi => vec![lo],
        (Some(lo), Some(hi)) => vec![lo, hi],
        _ => vec![],
    }
}

/// Every value of every variable has an integer support inside `D`.
pub fn check_domain(d: &Domain, c: &Constraint) -> Result<CheckReport> {
    check_integer(d, c, d, true)
}

/// Every bound has an integer support drawn from the actual sets of `D`.
pub fn check_bounds_d(d: &Domain, c: &Constraint) -> Result<CheckReport> {
    check_integer(d, c, d, false)
}

/// Every bound has an integer support inside the bounding box of `D`.
pub fn check_bounds_z(d: &Domain, c: &Constraint) -> Result<CheckReport> {
    check_integer(d, c, &range_of(d), false)
}

/// Every bound has a real support inside the bounding box of `D`.
pub fn check_bounds_r(d: &Domain, c: &Constraint) -> Result<CheckReport> {
    c.validate(Some(d))?;
    if !c.has_real_semantics() {
        return Err(Error::RealSemanticsUndefined(c.kind().to_string()));
    }
    let scope = c.scope();
    if scope.iter().any(|v| d.get(*v).is_empty()) {
        return Ok(CheckReport::from_supports_empty());
    }
    let boxes: Vec<(i64, i64)> = scope.iter().map(|v| (d.inf(*v), d.sup(*v))).collect();
    let mut supports = Vec::new();
    for (pos, &var) in scope.iter().enumerate() {
        for value in bound_values(d.get(var)) {
            supports.push(SupportWitness { var, value, witness: real_support(c, &scope, &boxes, pos, value)? });
        }
    }
    Ok(CheckReport::from_supports(supports))
}

pub fn check(d: &Domain, c: &Constraint, n: Notion) -> Result<CheckReport> {
    match n {
        Notion::Domain => check_domain(d, c),
        Notion::BoundsD => check_bounds_d(d, c),
        Notion::BoundsZ => check_bounds_z(d, c),
        Notion::BoundsR => check_bounds_r(d, c),
    }
}

fn rat_valuation(scope: &[VarId], vals: Vec<Rat>) -> Valuation {
    Valuation::from_rats(scope.iter().copied().zip(vals))
}

/// Real support for `scope[pos] = value` within `boxes` (scope order).
pub(crate) fn real_support(
    c: &Constraint,
    scope: &[VarId],
    boxes: &[(i64, i64)],
    pos: usize,
    value: i64,
) -> Result<Witness> {
    if let Some((terms, rhs, rel)) = c.as_linear() {
        return linear_real_support(terms.iter().map(|t| t.coeff).collect(), rhs, rel, scope, boxes, pos, value);
    }
    match c {
        Constraint::AllDifferent { .. } => alldiff_real_support(scope, boxes, pos, value),
        Constraint::ProductLe { .. } => product_real_support(scope, boxes, pos, value),
        Constraint::MonoBij { g, .. } => monobij_real_support(*g, scope, boxes, pos, value),
        _ => Err(Error::RealSemanticsUndefined(c.kind().to_string())),
    }
}

fn linear_real_support(
    coeffs: Vec<i64>,
    rhs: i64,
    rel: LinRel,
    scope: &[VarId],
    boxes: &[(i64, i64)],
    pos: usize,
    value: i64,
) -> Result<Witness> {
    // Corners of the box of the other variables minimising / maximising the sum.
    let mut min_corner = vec![0i64; scope.len()];
    let mut max_corner = vec![0i64; scope.len()];
    let (mut rmin, mut rmax) = (0i128, 0i128);
    for (p, &a) in coeffs.iter().enumerate() {
        if p == pos {
            min_corner[p] = value;
            max_corner[p] = value;
            continue;
        }
        let (lo, hi) = boxes[p];
        let (cmin, cmax) = if a > 0 { (lo, hi) } else { (hi, lo) };
        min_corner[p] = cmin;
        max_corner[p] = cmax;
        rmin = rmin.checked_add(a as i128 * cmin as i128).ok_or(Error::Overflow)?;
        rmax = rmax.checked_add(a as i128 * cmax as i128).ok_or(Error::Overflow)?;
    }
    let r = (rhs as i128).checked_sub(coeffs[pos] as i128 * value as i128).ok_or(Error::Overflow)?;
    let ints = |vals: &[i64]| rat_valuation(scope, vals.iter().map(|&x| Rat::from_int(x)).collect());
    Ok(match rel {
        LinRel::Le if rmin <= r => Witness::Solution(ints(&min_corner)),
        LinRel::Ne if !(rmin == r && rmax == r) => {
            Witness::Solution(ints(if rmin != r { &min_corner } else { &max_corner }))
        }
        LinRel::Eq if rmin <= r && r <= rmax => {
            // Walk the segment between the two corners; the sum is affine along it.
            let lambda = if rmax == rmin { Rat::ZERO } else { Rat::new(r - rmin, rmax - rmin)? };
            let vals = min_corner
                .iter()
                .zip(&max_corner)
                .map(|(&a, &b)| Rat::from_int(a).checked_add(lambda.checked_mul_int(b as i128 - a as i128)?))
                .collect::<Result<Vec<Rat>>>()?;
            Witness::Solution(rat_valuation(scope, vals))
        }
        _ => Witness::Absent,
    })
}

fn alldiff_real_support(scope: &[VarId], boxes: &[(i64, i64)], pos: usize, value: i64) -> Result<Witness> {
    let mut used = vec![Rat::from_int(value)];
    let mut vals = vec![Rat::ZERO; scope.len()];
    vals[pos] = Rat::from_int(value);
    // Point intervals have no freedom; they must be pairwise distinct and avoid `value`.
    for (p, &(lo, hi)) in boxes.iter().enumerate() {
        if p != pos && lo == hi {
            let x = Rat::from_int(lo);
            if used.contains(&x) {
                return Ok(Witness::Absent);
            }
            used.push(x);
            vals[p] = x;
        }
    }
    // An interval of positive length holds at least `n + 2` grid points
    // `lo + m/(n+1)`, more than the values that can already be taken.
    let steps = scope.len() as i128 + 1;
    for (p, &(lo, hi)) in boxes.iter().enumerate() {
        if p == pos || lo == hi {
            continue;
        }
        let pick = (0..=steps)
            .map(|m| Rat::from_int(lo).checked_add(Rat::new(m, steps)?))
            .collect::<Result<Vec<Rat>>>()?
            .into_iter()
            .find(|x| *x <= Rat::from_int(hi) && !used.contains(x))
            .expect("positive-length interval has a free grid point");
        used.push(pick);
        vals[p] = pick;
    }
    Ok(Witness::Solution(rat_valuation(scope, vals)))
}

fn product_real_support(scope: &[VarId], boxes: &[(i64, i64)], pos: usize, value: i64) -> Result<Witness> {
    let ints =
        |vals: [i64; 3]| Witness::Solution(rat_valuation(scope, vals.iter().map(|&x| Rat::from_int(x)).collect()));
    let b = value as i128;
    match pos {
        0 | 1 => {
            // value * s <= z: minimise value * s over the other factor's interval.
            let other = 1 - pos;
            let (lo, hi) = boxes[other];
            let s = if b >= 0 { lo } else { hi };
            let z = boxes[2].1;
            if b * s as i128 <= z as i128 {
                let mut v = [0i64; 3];
                v[pos] = value;
                v[other] = s;
                v[2] = z;
                Ok(ints(v))
            } else {
                Ok(Witness::Absent)
            }
        }
        _ => {
            let (l1, u1) = boxes[0];
            let (l2, u2) = boxes[1];
            let best = [(l1, l2), (l1, u2), (u1, l2), (u1, u2)]
                .into_iter()
                .min_by_key(|&(a, s)| a as i128 * s as i128)
                .expect("four corners");
            if best.0 as i128 * best.1 as i128 <= b {
                Ok(ints([best.0, best.1, value]))
            } else {
                Ok(Witness::Absent)
            }
        }
    }
}

/// Largest `k` in `[lo, hi]` with `g(k) <= target` (for increasing `g`),
/// or `g(k) >= target` (decreasing); `None` if none.
fn monotone_floor(g: MonoFunc, lo: i64, hi: i64, target: i128) -> Result<Option<i64>> {
    let below = |k: i64| -> Result<bool> {
        let v = g.eval_int(k)?;
        Ok(if g.is_increasing() { v <= target } else { v >= target })
    };
    if !below(lo)? {
        return Ok(None);
    }
    let (mut a, mut b) = (lo, hi);
    while a < b {
        let mid = a + (b - a + 1) / 2;
        if below(mid)? {
            a = mid;
        } else {
            b = mid - 1;
        }
    }
    Ok(Some(a))
}

fn monobij_real_support(g: MonoFunc, scope: &[VarId], boxes: &[(i64, i64)], pos: usize, value: i64) -> Result<Witness> {
    let (l1, u1) = boxes[0];
    let (l2, u2) = boxes[1];
    if pos == 1 {
        let gv = g.eval_int(value)?;
        return Ok(if l1 as i128 <= gv && gv <= u1 as i128 {
            Witness::Solution(Valuation::from_ints([(scope[0], gv as i64), (scope[1], value)]))
        } else {
            Witness::Absent
        });
    }
    let b = value as i128;
    let (ga, gb) = (g.eval_int(l2)?, g.eval_int(u2)?);
    if b < ga.min(gb) || b > ga.max(gb) {
        return Ok(Witness::Absent);
    }
    if let MonoFunc::Affine { a, b: off } = g {
        let x = Rat::new(b - off as i128, a as i128)?;
        return Ok(Witness::Solution(Valuation::from_rats([(scope[0], Rat::from_int(value)), (scope[1], x)])));
    }
    let k = monotone_floor(g, l2, u2, b)?.expect("target lies within the image of the box");
    if g.eval_int(k)? == b {
        return Ok(Witness::Solution(Valuation::from_ints([(scope[0], value), (scope[1], k)])));
    }
    Ok(Witness::Root(RootBracket {
        fixed: Valuation::from_ints([(scope[0], value)]),
        var: scope[1],
        lo: Rat::from_int(k),
        hi: Rat::from_int(k + 1),
    }))
}

/// Re-verifies a witness against the membership rule of `n` and the
/// matching satisfaction test. Absent witnesses verify as `false`.
pub fn verify_witness(w: &SupportWitness, d: &Domain, c: &Constraint, n: Notion) -> Result<bool> {
    use crate::constraints::{sat_int, sat_real};
    use crate::domains::{member, member_box};
    let pinned = |theta: &Valuation| theta.get(w.var) == Some(Rat::from_int(w.value));
    match (&w.witness, n) {
        (Witness::Absent, _) => Ok(false),
        (Witness::Solution(theta), Notion::Domain | Notion::BoundsD) => {
            Ok(pinned(theta) && member(theta, d) && sat_int(c, theta)?)
        }
        (Witness::Solution(theta), Notion::BoundsZ) => {
            Ok(pinned(theta) && theta.is_integral() && member_box(theta, d) && sat_int(c, theta)?)
        }
        (Witness::Solution(theta), Notion::BoundsR) => {
            Ok(pinned(theta) && member_box(theta, d) && sat_real(c, theta)? == Some(true))
        }
        (Witness::Root(rb), Notion::BoundsR) => {
            let Constraint::MonoBij { x1, g, x2 } = c else {
                return Ok(false);
            };
            if rb.var != *x2 || rb.fixed.get(*x1) != Some(Rat::from_int(w.value)) || w.var != *x1 {
                return Ok(false);
            }
            let (lo, hi) = (Rat::from_int(d.inf(*x2)), Rat::from_int(d.sup(*x2)));
            if !(lo <= rb.lo && rb.lo <= rb.hi && rb.hi <= hi) || !member_box(&rb.fixed, d) {
                return Ok(false);
            }
            let target = Rat::from_int(w.value);
            let r_lo = g.eval_rat(rb.lo)?.checked_sub(target)?;
            let r_hi = g.eval_rat(rb.hi)?.checked_sub(target)?;
            Ok((r_lo <= Rat::ZERO && r_hi >= Rat::ZERO) || (r_lo >= Rat::ZERO && r_hi <= Rat::ZERO))
        }
        (Witness::Root(_), _) => Ok(false),
    }
}
