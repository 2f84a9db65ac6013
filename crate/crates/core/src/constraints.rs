//! The constraint catalog with exact integer and real satisfaction tests.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::domains::{Domain, Valuation, VarId};
use crate::error::{Error, Result};
use crate::rational::Rat;

/// One term `coeff * var` of a linear expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinTerm {
    pub coeff: i64,
    pub var: VarId,
}

impl LinTerm {
    pub fn new(coeff: i64, var: VarId) -> LinTerm {
        LinTerm { coeff, var }
    }
}

/// Strictly monotone bijections usable in [`Constraint::MonoBij`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MonoFunc {
    /// `a*x + b`, `a != 0`.
    Affine { a: i64, b: i64 },
    /// `a*x^k` on `x >= 0`, `a != 0`, `k >= 1`.
    PowK { a: i64, k: u32 },
    /// `1 + x + x^2 + x^3` on `x >= 0`.
    Poly1234,
}

fn pow_checked(x: i128, k: u32) -> Result<i128> {
    x.checked_pow(k).ok_or(Error::Overflow)
}

fn rat_pow(x: Rat, k: u32) -> Result<Rat> {
    let mut acc = Rat::ONE;
    for _ in 0..k {
        acc = acc.checked_mul(x)?;
    }
    Ok(acc)
}

impl MonoFunc {
    /// Smallest admissible argument, if the function is restricted.
    pub fn lower_restriction(&self) -> Option<i64> {
        match self {
            MonoFunc::Affine { .. } => None,
            MonoFunc::PowK { .. } | MonoFunc::Poly1234 => Some(0),
        }
    }

    pub fn is_increasing(&self) -> bool {
        match self {
            MonoFunc::Affine { a, .. } | MonoFunc::PowK { a, .. } => *a > 0,
            MonoFunc::Poly1234 => true,
        }
    }

    pub fn eval_int(&self, x: i64) -> Result<i128> {
        let x = x as i128;
        let r = match *self {
            MonoFunc::Affine { a, b } => (a as i128).checked_mul(x).and_then(|p| p.checked_add(b as i128)),
            MonoFunc::PowK { a, k } => (a as i128).checked_mul(pow_checked(x, k)?),
            MonoFunc::Poly1234 => {
                let x2 = pow_checked(x, 2)?;
                let x3 = pow_checked(x, 3)?;
                1i128.checked_add(x).and_then(|s| s.checked_add(x2)).and_then(|s| s.checked_add(x3))
            }
        };
        r.ok_or(Error::Overflow)
    }

    pub fn eval_rat(&self, x: Rat) -> Result<Rat> {
        match *self {
            MonoFunc::Affine { a, b } => x.checked_mul_int(a as i128)?.checked_add(Rat::from_int(b)),
            MonoFunc::PowK { a, k } => rat_pow(x, k)?.checked_mul_int(a as i128),
            MonoFunc::Poly1234 => Rat::ONE.checked_add(x)?.checked_add(rat_pow(x, 2)?)?.checked_add(rat_pow(x, 3)?),
        }
    }

    fn admits(&self, x: Rat) -> bool {
        self.lower_restriction().is_none_or(|lo| x >= Rat::from_int(lo))
    }
}

impl fmt::Display for MonoFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonoFunc::Affine { a, b } => write!(f, "affine {a} {b}"),
            MonoFunc::PowK { a, k } => write!(f, "pow {a} {k}"),
            MonoFunc::Poly1234 => write!(f, "poly1234"),
        }
    }
}

/// A single relation over a fixed list of variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Constraint {
    /// `sum(terms) = rhs`
    LinEq {
        terms: Vec<LinTerm>,
        rhs: i64,
    },
    /// `sum(terms) <= rhs`
    LinLe {
        terms: Vec<LinTerm>,
        rhs: i64,
    },
    /// `sum(terms) != rhs`
    LinNe {
        terms: Vec<LinTerm>,
        rhs: i64,
    },
    AllDifferent {
        vars: Vec<VarId>,
    },
    /// `x1 * x2 <= x3`
    ProductLe {
        x1: VarId,
        x2: VarId,
        x3: VarId,
    },
    /// `x1 = g(x2)`
    MonoBij {
        x1: VarId,
        g: MonoFunc,
        x2: VarId,
    },
    /// `x1 = x2 mod x3`, defined for `x3 >= 1` with result in `[0, x3-1]`.
    Mod {
        x1: VarId,
        x2: VarId,
        x3: VarId,
    },
    /// `b <-> sum(terms) <= rhs` with `b` over `{0,1}`.
    ReifLinLe {
        b: VarId,
        terms: Vec<LinTerm>,
        rhs: i64,
    },
    Table {
        vars: Vec<VarId>,
        rows: Vec<Vec<i64>>,
    },
}

/// Linear shape shared by the three linear relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinRel {
    Eq,
    Le,
    Ne,
}

impl Constraint {
    pub fn lin_eq(terms: &[(i64, VarId)], rhs: i64) -> Constraint {
        Constraint::LinEq { terms: terms.iter().map(|&(c, v)| LinTerm::new(c, v)).collect(), rhs }
    }

    pub fn lin_le(terms: &[(i64, VarId)], rhs: i64) -> Constraint {
        Constraint::LinLe { terms: terms.iter().map(|&(c, v)| LinTerm::new(c, v)).collect(), rhs }
    }

    pub fn lin_ne(terms: &[(i64, VarId)], rhs: i64) -> Constraint {
        Constraint::LinNe { terms: terms.iter().map(|&(c, v)| LinTerm::new(c, v)).collect(), rhs }
    }

    /// Short tag naming the constraint class.
    pub fn kind(&self) -> &'static str {
        match self {
            Constraint::LinEq { .. } => "lin_eq",
            Constraint::LinLe { .. } => "lin_le",
            Constraint::LinNe { .. } => "lin_ne",
            Constraint::AllDifferent { .. } => "all_different",
            Constraint::ProductLe { .. } => "product_le",
            Constraint::MonoBij { .. } => "mono_bij",
            Constraint::Mod { .. } => "mod",
            Constraint::ReifLinLe { .. } => "reif_lin_le",
            Constraint::Table { .. } => "table",
        }
    }

    /// The linear view `(terms, rhs, relation)` of LinEq/LinLe/LinNe.
    pub fn as_linear(&self) -> Option<(&[LinTerm], i64, LinRel)> {
        match self {
            Constraint::LinEq { terms, rhs } => Some((terms, *rhs, LinRel::Eq)),
            Constraint::LinLe { terms, rhs } => Some((terms, *rhs, LinRel::Le)),
            Constraint::LinNe { terms, rhs } => Some((terms, *rhs, LinRel::Ne)),
            _ => None,
        }
    }

    /// Variables of the constraint in declaration order.
    pub fn scope(&self) -> Vec<VarId> {
        match self {
            Constraint::LinEq { terms, .. } | Constraint::LinLe { terms, .. } | Constraint::LinNe { terms, .. } => {
                terms.iter().map(|t| t.var).collect()
            }
            Constraint::AllDifferent { vars } | Constraint::Table { vars, .. } => vars.clone(),
            Constraint::ProductLe { x1, x2, x3 } | Constraint::Mod { x1, x2, x3 } => {
                vec![*x1, *x2, *x3]
            }
            Constraint::MonoBij { x1, x2, .. } => vec![*x1, *x2],
            Constraint::ReifLinLe { b, terms, .. } => std::iter::once(*b).chain(terms.iter().map(|t| t.var)).collect(),
        }
    }

    /// Whether a real reading of the constraint exists.
    pub fn has_real_semantics(&self) -> bool {
        !matches!(self, Constraint::Mod { .. } | Constraint::ReifLinLe { .. } | Constraint::Table { .. })
    }

    /// Structural checks, plus the domain-dependent ones when `d` is given.
    pub fn validate(&self, d: Option<&Domain>) -> Result<()> {
        let scope = self.scope();
        let distinct: BTreeSet<VarId> = scope.iter().copied().collect();
        if distinct.len() != scope.len() {
            return Err(Error::InvalidModel(format!("{}: variables must be distinct", self.kind())));
        }
        match self {
            Constraint::LinEq { terms, .. }
            | Constraint::LinLe { terms, .. }
            | Constraint::LinNe { terms, .. }
            | Constraint::ReifLinLe { terms, .. } => {
                if terms.iter().any(|t| t.coeff == 0) {
                    return Err(Error::InvalidModel(format!("{}: zero coefficient", self.kind())));
                }
            }
            Constraint::Table { vars, rows } => {
                if let Some(r) = rows.iter().find(|r| r.len() != vars.len()) {
                    return Err(Error::InvalidModel(format!(
                        "table: row of arity {} over {} variables",
                        r.len(),
                        vars.len()
                    )));
                }
            }
            Constraint::MonoBij { g, .. } => match g {
                MonoFunc::Affine { a: 0, .. } | MonoFunc::PowK { a: 0, .. } => {
                    return Err(Error::InvalidModel("mono_bij: zero leading coefficient".into()))
                }
                MonoFunc::PowK { k: 0, .. } => {
                    return Err(Error::InvalidModel("mono_bij: exponent must be >= 1".into()))
                }
                _ => {}
            },
            _ => {}
        }
        if let Some(d) = d {
            if let Some(v) = scope.iter().find(|v| !d.covers(**v)) {
                return Err(Error::InvalidModel(format!("unknown variable {v}")));
            }
            match self {
                Constraint::ReifLinLe { b, .. } => {
                    if d.get(*b).iter().any(|x| x != 0 && x != 1) {
                        return Err(Error::InvalidModel("reif_lin_le: boolean domain must be within {0,1}".into()));
                    }
                }
                Constraint::MonoBij { g, x2, .. } => {
                    if let (Some(lo), Some(min)) = (g.lower_restriction(), d.get(*x2).min()) {
                        if min < lo {
                            return Err(Error::InvalidModel(format!("mono_bij: argument domain must be >= {lo}")));
                        }
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Integer satisfaction over values listed in [`Constraint::scope`] order.
    pub fn eval_int(&self, vals: &[i64]) -> Result<bool> {
        let n = self.scope().len();
        if vals.len() != n {
            return Err(Error::Arity { expected: n, got: vals.len() });
        }
        Ok(match self {
            Constraint::LinEq { terms, rhs } => lin_sum_int(terms, vals)? == *rhs as i128,
            Constraint::LinLe { terms, rhs } => lin_sum_int(terms, vals)? <= *rhs as i128,
            Constraint::LinNe { terms, rhs } => lin_sum_int(terms, vals)? != *rhs as i128,
            Constraint::AllDifferent { .. } => {
                let mut seen = vals.to_vec();
                seen.sort_unstable();
                seen.windows(2).all(|w| w[0] != w[1])
            }
            Constraint::ProductLe { .. } => (vals[0] as i128) * (vals[1] as i128) <= vals[2] as i128,
            Constraint::MonoBij { g, .. } => {
                let admissible = g.lower_restriction().is_none_or(|lo| vals[1] >= lo);
                admissible && g.eval_int(vals[1])? == vals[0] as i128
            }
            Constraint::Mod { .. } => vals[2] >= 1 && vals[0] == vals[1].rem_euclid(vals[2]),
            Constraint::ReifLinLe { terms, rhs, .. } => {
                let holds = lin_sum_int(terms, &vals[1..])? <= *rhs as i128;
                match vals[0] {
                    0 => !holds,
                    1 => holds,
                    _ => false,
                }
            }
            Constraint::Table { rows, .. } => rows.iter().any(|r| r.as_slice() == vals),
        })
    }

    /// Real satisfaction over rationals in scope order; `None` when the
    /// constraint has no real reading.
    pub fn eval_real(&self, vals: &[Rat]) -> Result<Option<bool>> {
        let n = self.scope().len();
        if vals.len() != n {
            return Err(Error::Arity { expected: n, got: vals.len() });
        }
        Ok(Some(match self {
            Constraint::LinEq { terms, rhs } => lin_sum_rat(terms, vals)? == Rat::from_int(*rhs),
            Constraint::LinLe { terms, rhs } => lin_sum_rat(terms, vals)? <= Rat::from_int(*rhs),
            Constraint::LinNe { terms, rhs } => lin_sum_rat(terms, vals)? != Rat::from_int(*rhs),
            Constraint::AllDifferent { .. } => {
                let mut seen = vals.to_vec();
                seen.sort_unstable();
                seen.windows(2).all(|w| w[0] != w[1])
            }
            Constraint::ProductLe { .. } => vals[0].checked_mul(vals[1])? <= vals[2],
            Constraint::MonoBij { g, .. } => g.admits(vals[1]) && g.eval_rat(vals[1])? == vals[0],
            Constraint::Mod { .. } | Constraint::ReifLinLe { .. } | Constraint::Table { .. } => return Ok(None),
        }))
    }
}

fn lin_sum_int(terms: &[LinTerm], vals: &[i64]) -> Result<i128> {
    terms
        .iter()
        .zip(vals)
        .try_fold(0i128, |acc, (t, &v)| acc.checked_add((t.coeff as i128) * (v as i128)).ok_or(Error::Overflow))
}

fn lin_sum_rat(terms: &[LinTerm], vals: &[Rat]) -> Result<Rat> {
    terms.iter().zip(vals).try_fold(Rat::ZERO, |acc, (t, &v)| acc.checked_add(v.checked_mul_int(t.coeff as i128)?))
}

/// Variables of `c`, duplicate-free, in declaration order.
pub fn vars_of(c: &Constraint) -> Vec<VarId> {
    c.scope()
}

fn scope_values(c: &Constraint, theta: &Valuation) -> Result<Vec<Rat>> {
    let scope = c.scope();
    if theta.len() != scope.len() {
        return Err(Error::Arity { expected: scope.len(), got: theta.len() });
    }
    scope.iter().map(|v| theta.get(*v).ok_or(Error::Arity { expected: scope.len(), got: theta.len() })).collect()
}

/// `Z |=_θ c`. `θ` must bind exactly the scope of `c` to integers.
pub fn sat_int(c: &Constraint, theta: &Valuation) -> Result<bool> {
    let scope = c.scope();
    let vals = scope_values(c, theta)?;
    let ints = vals
        .iter()
        .zip(&scope)
        .map(|(r, v)| r.to_i64().ok_or(Error::NonIntegral(v.index())))
        .collect::<Result<Vec<i64>>>()?;
    c.eval_int(&ints)
}

/// `R |=_θ c`, or `None` for constraints without a real reading.
pub fn sat_real(c: &Constraint, theta: &Valuation) -> Result<Option<bool>> {
    let vals = scope_values(c, theta)?;
    c.eval_real(&vals)
}
