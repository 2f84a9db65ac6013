//! Subset-sum encoding into a single linear equation, and monotonicity
//! analysis of constraints over the real box of a domain.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::checkers::Notion;
use crate::constraints::{Constraint, MonoFunc};
use crate::domains::{Domain, IntSet, Valuation, VarId};
use crate::error::{Error, Result};
use crate::model::Model;
use crate::rational::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetSumInstance {
    pub items: Vec<i64>,
    pub target: i64,
}

impl SubsetSumInstance {
    pub fn new(items: Vec<i64>, target: i64) -> Result<SubsetSumInstance> {
        if items.is_empty() {
            return Err(Error::InvalidModel("subset sum needs at least one item".into()));
        }
        if target <= 0 || items.iter().any(|&a| a <= 0) {
            return Err(Error::InvalidModel("subset sum values must be positive".into()));
        }
        let s = SubsetSumInstance { items, target };
        s.total()?;
        Ok(s)
    }

    pub fn total(&self) -> Result<i64> {
        self.items.iter().try_fold(0i64, |acc, &a| acc.checked_add(a)).ok_or(Error::Overflow)
    }

    /// Exhaustive decision over all `2^n` subsets.
    pub fn brute_force(&self) -> bool {
        let n = self.items.len();
        assert!(n < 63, "brute force limited to n < 63");
        (0u64..1 << n).any(|mask| {
            let s: i128 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| self.items[i] as i128).sum();
            s == self.target as i128
        })
    }
}

/// `a1 x1 + ... + an xn - t x_{n+1} - (sum a) x_{n+2} = 0` over `{0,1}`.
///
/// The model's domain supports `x_{n+1} = 1` exactly when some subset of
/// the items sums to the target. Returns the model with `x_{n+1}` and `x_{n+2}`.
pub fn encode_subset_sum(s: &SubsetSumInstance) -> Result<(Model, VarId, VarId)> {
    let total = s.total()?;
    let n = s.items.len();
    let mut m = Model::new();
    let xs: Vec<VarId> = (1..=n + 2).map(|i| m.add_var(format!("x{i}"), IntSet::range(0, 1))).collect();
    let mut terms: Vec<(i64, VarId)> = s.items.iter().zip(&xs).map(|(&a, &x)| (a, x)).collect();
    terms.push((s.target.checked_neg().ok_or(Error::Overflow)?, xs[n]));
    terms.push((total.checked_neg().ok_or(Error::Overflow)?, xs[n + 1]));
    m.post("c1", Constraint::lin_eq(&terms, 0), Notion::BoundsZ);
    Ok((m, xs[n], xs[n + 1]))
}

/// The order under which a variable's real solutions are closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Monotonicity {
    /// Decreasing the variable keeps every solution a solution.
    Less,
    /// Increasing the variable keeps every solution a solution.
    Greater,
    NotMonotone,
}

impl fmt::Display for Monotonicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Monotonicity::Less => "<",
            Monotonicity::Greater => ">",
            Monotonicity::NotMonotone => "not-monotone",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotoneReport {
    pub verdicts: Vec<(VarId, Monotonicity)>,
}

impl MonotoneReport {
    pub fn all_monotone(&self) -> bool {
        self.verdicts.iter().all(|(_, m)| *m != Monotonicity::NotMonotone)
    }
}

// A rational interval with optional, possibly open, ends.
#[derive(Debug, Clone, Copy)]
struct Iv {
    lo: Option<(Rat, bool)>,
    hi: Option<(Rat, bool)>,
    void: bool,
}

impl Iv {
    fn closed(lo: i64, hi: i64) -> Iv {
        Iv { lo: Some((Rat::from_int(lo), false)), hi: Some((Rat::from_int(hi), false)), void: lo > hi }
    }

    fn raise(&mut self, v: Rat, strict: bool) {
        match self.lo {
            Some((l, s)) if l > v || (l == v && s) => {}
            _ => self.lo = Some((v, strict)),
        }
    }

    fn lower(&mut self, v: Rat, strict: bool) {
        match self.hi {
            Some((h, s)) if h < v || (h == v && s) => {}
            _ => self.hi = Some((v, strict)),
        }
    }

    // Intersect with `{s : a*s <= b}` (or `<` when strict).
    fn cut(&mut self, a: i64, b: i64, strict: bool) -> Result<()> {
        if a == 0 {
            if !(if strict { 0 < b } else { 0 <= b }) {
                self.void = true;
            }
            return Ok(());
        }
        let q = Rat::new(b as i128, a as i128)?;
        if a > 0 {
            self.lower(q, strict);
        } else {
            self.raise(q, strict);
        }
        Ok(())
    }

    fn is_empty(&self) -> bool {
        if self.void {
            return true;
        }
        match (self.lo, self.hi) {
            (Some((l, ls)), Some((h, hs))) => l > h || (l == h && (ls || hs)),
            _ => false,
        }
    }
}

// Whether `{x in [l,u] : lo <= g(x) <= hi}` has a point above `l` (or below `u`).
fn mono_has_point_beyond(g: &MonoFunc, l: i64, u: i64, lo: i64, hi: i64, above_l: bool) -> Result<bool> {
    if l >= u {
        return Ok(false);
    }
    let (gl, gu) = (g.eval_int(l)?, g.eval_int(u)?);
    let (lo, hi) = (lo as i128, hi as i128);
    // Image of (l,u] (or [l,u)) is the half-open interval between gl and gu.
    let (open_end, closed_end) = if above_l { (gl, gu) } else { (gu, gl) };
    let (imin, imin_open, imax, imax_open) =
        if open_end < closed_end { (open_end, true, closed_end, false) } else { (closed_end, false, open_end, true) };
    let below_hi = if imin_open { imin < hi } else { imin <= hi };
    let above_lo = if imax_open { imax > lo } else { imax >= lo };
    Ok(below_hi && above_lo && lo <= hi)
}

fn pick(less_refuted: bool, greater_refuted: bool) -> Monotonicity {
    if !less_refuted {
        Monotonicity::Less
    } else if !greater_refuted {
        Monotonicity::Greater
    } else {
        Monotonicity::NotMonotone
    }
}

fn sum_range(parts: impl Iterator<Item = (i64, i64, i64)>) -> Result<(i128, i128)> {
    let (mut lo, mut hi) = (0i128, 0i128);
    for (a, l, u) in parts {
        let (p, q) = ((a as i128) * (l as i128), (a as i128) * (u as i128));
        lo = lo.checked_add(p.min(q)).ok_or(Error::Overflow)?;
        hi = hi.checked_add(p.max(q)).ok_or(Error::Overflow)?;
    }
    Ok((lo, hi))
}

fn linear_verdicts(c: &Constraint, b: &[(i64, i64)]) -> Result<Vec<Monotonicity>> {
    use crate::constraints::LinRel;
    let (terms, rhs, rel) = c.as_linear().expect("linear");
    let mut out = Vec::new();
    for (i, t) in terms.iter().enumerate() {
        let (l, u) = b[i];
        if rel == LinRel::Le {
            out.push(if t.coeff > 0 { Monotonicity::Less } else { Monotonicity::Greater });
            continue;
        }
        let (rmin, rmax) =
            sum_range(terms.iter().enumerate().filter(|(j, _)| *j != i).map(|(j, s)| (s.coeff, b[j].0, b[j].1)))?;
        // Feasible interval F of x_i for the equation: a x = rhs - R, R in [rmin, rmax].
        let a = t.coeff as i128;
        let e1 = Rat::new((rhs as i128).checked_sub(rmax).ok_or(Error::Overflow)?, a)?;
        let e2 = Rat::new((rhs as i128).checked_sub(rmin).ok_or(Error::Overflow)?, a)?;
        let (flo, fhi) = (e1.min(e2), e1.max(e2));
        let (lr, ur) = (Rat::from_int(l), Rat::from_int(u));
        // F meets (l, u] / [l, u).
        let meets_above_l = l < u && fhi > lr && flo <= ur;
        let meets_below_u = l < u && flo < ur && fhi >= lr;
        out.push(match rel {
            LinRel::Eq => pick(meets_above_l, meets_below_u),
            _ => pick(meets_below_u, meets_above_l),
        });
    }
    Ok(out)
}

fn product_verdicts(b: &[(i64, i64)]) -> Result<Vec<Monotonicity>> {
    let ((l1, u1), (l2, u2), (l3, u3)) = (b[0], b[1], b[2]);
    let factor = |(la, ua): (i64, i64), (lb, ub): (i64, i64)| -> Result<Monotonicity> {
        if la >= ua {
            return Ok(Monotonicity::Less);
        }
        let neg = |x: i64| x.checked_neg().ok_or(Error::Overflow);
        // Decreasing x_a breaks a solution only through a negative co-factor s.
        let mut dec = Iv::closed(lb, ub);
        dec.cut(1, 0, true)?;
        dec.cut(ua, u3, false)?;
        dec.cut(neg(la)?, neg(l3)?, true)?;
        let mut inc = Iv::closed(lb, ub);
        inc.cut(-1, 0, true)?;
        inc.cut(la, u3, false)?;
        inc.cut(neg(ua)?, neg(l3)?, true)?;
        Ok(pick(!dec.is_empty(), !inc.is_empty()))
    };
    let corners = [l1 as i128 * l2 as i128, l1 as i128 * u2 as i128, u1 as i128 * l2 as i128, u1 as i128 * u2 as i128];
    let (pmin, pmax) = (*corners.iter().min().unwrap(), *corners.iter().max().unwrap());
    let x3_less_refuted = l3 < u3 && pmax > l3 as i128 && pmin <= u3 as i128;
    Ok(vec![factor((l1, u1), (l2, u2))?, factor((l2, u2), (l1, u1))?, pick(x3_less_refuted, false)])
}

fn mono_bij_verdicts(g: &MonoFunc, b: &[(i64, i64)]) -> Result<Vec<Monotonicity>> {
    let ((l1, u1), (l2, u2)) = (b[0], b[1]);
    let (g2l, g2u) = (g.eval_int(l2)?, g.eval_int(u2)?);
    let (gmin, gmax) = (g2l.min(g2u), g2l.max(g2u));
    // x1 ranges over [l1,u1] intersected with the image g([l2,u2]).
    let x1_above_l = l1 < u1 && gmax > l1 as i128 && gmin <= u1 as i128;
    let x1_below_u = l1 < u1 && gmin < u1 as i128 && gmax >= l1 as i128;
    let x2_above_l = mono_has_point_beyond(g, l2, u2, l1, u1, true)?;
    let x2_below_u = mono_has_point_beyond(g, l2, u2, l1, u1, false)?;
    Ok(vec![pick(x1_above_l, x1_below_u), pick(x2_above_l, x2_below_u)])
}

fn alldiff_verdicts(b: &[(i64, i64)]) -> Vec<Monotonicity> {
    let mut points: Vec<i64> = b.iter().filter(|(l, u)| l == u).map(|(l, _)| *l).collect();
    points.sort_unstable();
    if points.windows(2).any(|w| w[0] == w[1]) {
        // No real solutions at all.
        return vec![Monotonicity::Less; b.len()];
    }
    let clash = |i: usize, below: bool| -> bool {
        let (li, ui) = b[i];
        if li == ui {
            return false;
        }
        (0..b.len()).filter(|&j| j != i).any(|j| {
            let (lj, uj) = b[j];
            // Candidates for the value x_i moves onto: [l_i,u_i) (or (l_i,u_i]) meeting [l_j,u_j].
            let lo = li.max(lj);
            let hi = ui.min(uj);
            if lo > hi {
                return false;
            }
            let lo_open = !below && lo == li;
            let hi_open = below && hi == ui;
            if lo < hi {
                return true;
            }
            if lo_open || hi_open {
                return false;
            }
            let v = lo;
            !b.iter().enumerate().any(|(k, (l, u))| k != i && k != j && l == u && *l == v)
        })
    };
    (0..b.len()).map(|i| pick(clash(i, true), clash(i, false))).collect()
}

/// Per-variable monotonicity of `c` over the real box of `d`.
pub fn is_monotonic(c: &Constraint, d: &Domain) -> Result<MonotoneReport> {
    if !c.has_real_semantics() {
        return Err(Error::RealSemanticsUndefined(c.kind().into()));
    }
    c.validate(Some(d))?;
    let scope = c.scope();
    let mut b = Vec::with_capacity(scope.len());
    for v in &scope {
        let s = d.get(*v);
        match (s.min(), s.max()) {
            (Some(l), Some(u)) => b.push((l, u)),
            _ => return Err(Error::InvalidModel(format!("empty domain for {v}"))),
        }
    }
    let verdicts = match c {
        Constraint::LinEq { .. } | Constraint::LinLe { .. } | Constraint::LinNe { .. } => linear_verdicts(c, &b)?,
        Constraint::ProductLe { .. } => product_verdicts(&b)?,
        Constraint::MonoBij { g, .. } => mono_bij_verdicts(g, &b)?,
        Constraint::AllDifferent { .. } => alldiff_verdicts(&b),
        _ => unreachable!("no real semantics"),
    };
    Ok(MonotoneReport { verdicts: scope.into_iter().zip(verdicts).collect() })
}

/// A real solution `theta` and a value `t` for `var`, earlier than `theta(var)`
/// in `order`, such that moving `var` to `t` breaks `c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Refutation {
    pub theta: Valuation,
    pub var: VarId,
    pub moved_to: Rat,
}

/// Searches the half-integer grid of the box for a refutation of `order` on `var`.
/// `order` must be `Less` or `Greater`. At most `budget` evaluations are made.
pub fn grid_refute(
    c: &Constraint,
    d: &Domain,
    var: VarId,
    order: Monotonicity,
    budget: u64,
) -> Result<Option<Refutation>> {
    if !c.has_real_semantics() {
        return Err(Error::RealSemanticsUndefined(c.kind().into()));
    }
    assert!(order != Monotonicity::NotMonotone, "grid_refute needs an order");
    let scope = c.scope();
    let Some(pos) = scope.iter().position(|v| *v == var) else {
        return Ok(None);
    };
    let grids: Vec<Vec<Rat>> = scope
        .iter()
        .map(|v| {
            let s = d.get(*v);
            let (l, u) = (s.min().unwrap_or(0), s.max().unwrap_or(-1));
            (2 * l as i128..=2 * u as i128).map(|k| Rat::new(k, 2)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    if grids.iter().any(|g| g.is_empty()) {
        return Ok(None);
    }
    let mut spent = 0u64;
    let mut eval = |vals: &[Rat]| -> Result<bool> {
        spent += 1;
        if spent > budget {
            return Err(Error::BudgetExceeded(budget));
        }
        Ok(c.eval_real(vals)?.unwrap_or(false))
    };
    let mut idx = vec![0usize; scope.len()];
    loop {
        let vals: Vec<Rat> = idx.iter().zip(&grids).map(|(&k, g)| g[k]).collect();
        if eval(&vals)? {
            for &t in &grids[pos] {
                let earlier = match order {
                    Monotonicity::Less => t < vals[pos],
                    _ => t > vals[pos],
                };
                if !earlier {
                    continue;
                }
                let mut moved = vals.clone();
                moved[pos] = t;
                if !eval(&moved)? {
                    return Ok(Some(Refutation {
                        theta: Valuation::from_rats(scope.iter().copied().zip(vals)),
                        var,
                        moved_to: t,
                    }));
                }
            }
        }
        let mut k = scope.len();
        loop {
            if k == 0 {
                return Ok(None);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < grids[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}
