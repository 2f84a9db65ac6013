//! Seeded instance generators and the fixed worked examples.
#![allow(dead_code)]

use boundslab::{Constraint, Domain, IntSet, MonoFunc, Notion, VarId};
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const X1: VarId = VarId(0);
pub const X2: VarId = VarId(1);
pub const X3: VarId = VarId(2);

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn set(v: &[i64]) -> IntSet {
    IntSet::from_values(v.iter().copied())
}

/// x1 = 3x2 + 5x3 written as x1 - 3x2 - 5x3 = 0.
pub fn c_lin() -> Constraint {
    Constraint::lin_eq(&[(1, X1), (-3, X2), (-5, X3)], 0)
}

pub fn d0() -> Domain {
    Domain::new(vec![IntSet::range(2, 7), IntSet::range(0, 2), IntSet::range(-1, 2)])
}
pub fn d1() -> Domain {
    Domain::new(vec![set(&[3, 5, 6]), set(&[0, 1, 2]), set(&[0, 1])])
}
pub fn d2() -> Domain {
    Domain::new(vec![set(&[2, 3, 4, 6, 7]), IntSet::range(0, 2), IntSet::range(0, 1)])
}
pub fn d3() -> Domain {
    Domain::new(vec![set(&[3, 4, 6]), IntSet::range(0, 2), IntSet::range(0, 1)])
}
pub fn d4() -> Domain {
    Domain::new(vec![set(&[3, 4, 6]), IntSet::range(1, 2), set(&[0])])
}
pub fn all_diff3() -> Constraint {
    Constraint::AllDifferent { vars: vec![X1, X2, X3] }
}
pub fn d5() -> Domain {
    Domain::new(vec![IntSet::range(1, 2), IntSet::range(1, 2), IntSet::range(2, 3)])
}
pub fn sum5() -> Constraint {
    Constraint::lin_eq(&[(1, X1), (1, X2), (1, X3)], 5)
}
pub fn d8() -> Domain {
    Domain::new(vec![IntSet::range(0, 3), set(&[0, 3, 4, 5]), set(&[0, 3, 4, 5])])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    LinEq,
    LinLe,
    LinNe,
    AllDiff,
    Product,
    MonoAffine,
    MonoPow,
    MonoPoly,
    Mod,
    Reif,
    Table,
}

pub const ALL_KINDS: [Kind; 11] = [
    Kind::LinEq,
    Kind::LinLe,
    Kind::LinNe,
    Kind::AllDiff,
    Kind::Product,
    Kind::MonoAffine,
    Kind::MonoPow,
    Kind::MonoPoly,
    Kind::Mod,
    Kind::Reif,
    Kind::Table,
];

impl Kind {
    pub fn is_real(self) -> bool {
        !matches!(self, Kind::Mod | Kind::Reif | Kind::Table)
    }

    pub fn notions(self) -> Vec<Notion> {
        if self.is_real() {
            Notion::ALL.to_vec()
        } else {
            vec![Notion::Domain, Notion::BoundsD, Notion::BoundsZ]
        }
    }
}

/// Size limits for generated instances.
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_vars: usize,
    pub lo: i64,
    pub hi: i64,
    /// Widest span of a single variable's set.
    pub width: i64,
}

pub const SMALL: Shape = Shape { max_vars: 4, lo: -6, hi: 6, width: 5 };

pub const MEDIUM: Shape = Shape { max_vars: 5, lo: -10, hi: 10, width: 8 };

/// A nonempty subset of a random window of `[lo, hi]`, contiguous half the time.
pub fn random_set<R: Rng>(r: &mut R, lo: i64, hi: i64, width: i64) -> IntSet {
    let w = r.random_range(0..=width.min(hi - lo));
    let a = r.random_range(lo..=hi - w);
    let b = a + w;
    if r.random_bool(0.5) {
        return IntSet::range(a, b);
    }
    let mut vals: Vec<i64> = (a..=b).filter(|_| r.random_bool(0.6)).collect();
    if vals.is_empty() {
        vals.push(r.random_range(a..=b));
    }
    IntSet::from_values(vals)
}

fn coeff<R: Rng>(r: &mut R, max: i64) -> i64 {
    let a = r.random_range(1..=max);
    if r.random_bool(0.5) {
        -a
    } else {
        a
    }
}

// A right-hand side near the value of the sum at some point of the sets.
fn plausible_rhs<R: Rng>(r: &mut R, terms: &[(i64, VarId)], sets: &[IntSet]) -> i64 {
    let s: i64 = terms
        .iter()
        .map(|(a, v)| {
            let vals = sets[v.index()].values();
            a * vals[r.random_range(0..vals.len())]
        })
        .sum();
    s + r.random_range(-2..=2)
}

fn around_image<R: Rng>(r: &mut R, g: &MonoFunc, arg: &IntSet, width: i64) -> IntSet {
    let imgs: Vec<i64> = arg.values().iter().map(|&x| g.eval_int(x).unwrap() as i64).collect();
    let (lo, hi) = (*imgs.iter().min().unwrap(), *imgs.iter().max().unwrap());
    let mut vals: Vec<i64> = imgs.into_iter().filter(|_| r.random_bool(0.5)).collect();
    let extra = r.random_range(0..=3);
    for _ in 0..extra {
        vals.push(r.random_range(lo - 2..=hi + 2));
    }
    if vals.is_empty() || r.random_bool(0.3) {
        let c = r.random_range(lo - 1..=hi + 1);
        return IntSet::range(c, c + r.random_range(0..=width));
    }
    IntSet::from_values(vals)
}

/// A domain over variables `0..k` and a constraint of `kind` on them.
pub fn random_instance<R: Rng>(r: &mut R, kind: Kind, s: Shape) -> (Domain, Constraint) {
    let vars = |k: usize| -> Vec<VarId> { (0..k).map(VarId::from).collect() };
    match kind {
        Kind::LinEq | Kind::LinLe | Kind::LinNe => {
            let k = r.random_range(1..=s.max_vars);
            let sets: Vec<IntSet> = (0..k).map(|_| random_set(r, s.lo, s.hi, s.width)).collect();
            let terms: Vec<(i64, VarId)> = vars(k).into_iter().map(|v| (coeff(r, 4), v)).collect();
            let rhs = plausible_rhs(r, &terms, &sets);
            let c = match kind {
                Kind::LinEq => Constraint::lin_eq(&terms, rhs),
                Kind::LinLe => Constraint::lin_le(&terms, rhs),
                _ => Constraint::lin_ne(&terms, rhs),
            };
            (Domain::new(sets), c)
        }
        Kind::AllDiff => {
            let k = r.random_range(2..=s.max_vars);
            let base = r.random_range(s.lo..=s.hi - k as i64);
            let sets: Vec<IntSet> = (0..k).map(|_| random_set(r, base, base + k as i64, k as i64)).collect();
            (Domain::new(sets), Constraint::AllDifferent { vars: vars(k) })
        }
        Kind::Product => {
            let lo = s.lo.max(-4);
            let hi = s.hi.min(4);
            let a = random_set(r, lo, hi, s.width);
            let b = random_set(r, lo, hi, s.width);
            let c = random_set(r, s.lo, s.hi, s.width);
            (Domain::new(vec![a, b, c]), Constraint::ProductLe { x1: X1, x2: X2, x3: X3 })
        }
        Kind::MonoAffine | Kind::MonoPow | Kind::MonoPoly => {
            let (g, arg) = match kind {
                Kind::MonoAffine => (
                    MonoFunc::Affine { a: coeff(r, 3), b: r.random_range(-3..=3) },
                    random_set(r, s.lo.max(-5), s.hi.min(5), s.width),
                ),
                Kind::MonoPow => (MonoFunc::PowK { a: coeff(r, 2), k: r.random_range(1..=3) }, random_set(r, 0, 4, 4)),
                _ => (MonoFunc::Poly1234, random_set(r, 0, 3, 3)),
            };
            let img = around_image(r, &g, &arg, s.width);
            (Domain::new(vec![img, arg]), Constraint::MonoBij { x1: X1, g, x2: X2 })
        }
        Kind::Mod => {
            let a = random_set(r, 0, 4, 4);
            let b = random_set(r, s.lo, s.hi, s.width);
            let c = random_set(r, 1, 4, 3);
            (Domain::new(vec![a, b, c]), Constraint::Mod { x1: X1, x2: X2, x3: X3 })
        }
        Kind::Reif => {
            let k = r.random_range(1..=s.max_vars - 1);
            let mut sets = vec![random_set(r, 0, 1, 1)];
            sets.extend((0..k).map(|_| random_set(r, s.lo, s.hi, s.width)));
            let terms: Vec<(i64, VarId)> = (1..=k).map(|i| (coeff(r, 3), VarId::from(i))).collect();
            let rhs = plausible_rhs(r, &terms, &sets);
            let terms = terms.iter().map(|&(a, v)| boundslab::LinTerm::new(a, v)).collect();
            (Domain::new(sets), Constraint::ReifLinLe { b: X1, terms, rhs })
        }
        Kind::Table => {
            let k = r.random_range(1..=s.max_vars.min(3));
            let sets: Vec<IntSet> = (0..k).map(|_| random_set(r, s.lo, s.hi, s.width)).collect();
            let n = r.random_range(0..=6);
            let rows = (0..n)
                .map(|_| {
                    sets.iter()
                        .map(|st| {
                            // Mostly in-domain values, sometimes just outside.
                            if r.random_bool(0.8) {
                                st.values()[r.random_range(0..st.len())]
                            } else {
                                st.max().unwrap() + 1
                            }
                        })
                        .collect()
                })
                .collect();
            (Domain::new(sets), Constraint::Table { vars: vars(k), rows })
        }
    }
}

pub fn pick<R: Rng, T: Copy>(r: &mut R, xs: &[T]) -> T {
    xs[r.random_range(0..xs.len())]
}

/// Brute-force integer solutions of all `cs` over `d`, as full tuples in lexicographic order.
pub fn brute_solutions(d: &Domain, cs: &[Constraint]) -> Vec<Vec<i64>> {
    let sets: Vec<&[i64]> = d.sets().iter().map(|s| s.values()).collect();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(sets.len());
    fn rec(sets: &[&[i64]], cs: &[Constraint], cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == sets.len() {
            let ok = cs.iter().all(|c| {
                let t: Vec<i64> = c.scope().iter().map(|v| cur[v.index()]).collect();
                c.eval_int(&t).unwrap()
            });
            if ok {
                out.push(cur.clone());
            }
            return;
        }
        for &x in sets[cur.len()] {
            cur.push(x);
            rec(sets, cs, cur, out);
            cur.pop();
        }
    }
    rec(&sets, cs, &mut cur, &mut out);
    out
}

/// `c` with variable `i` renamed to `to[i]`.
pub fn remap(c: &Constraint, to: &[VarId]) -> Constraint {
    let m = |v: &VarId| to[v.index()];
    let terms = |ts: &[boundslab::LinTerm]| ts.iter().map(|t| boundslab::LinTerm::new(t.coeff, m(&t.var))).collect();
    match c {
        Constraint::LinEq { terms: t, rhs } => Constraint::LinEq { terms: terms(t), rhs: *rhs },
        Constraint::LinLe { terms: t, rhs } => Constraint::LinLe { terms: terms(t), rhs: *rhs },
        Constraint::LinNe { terms: t, rhs } => Constraint::LinNe { terms: terms(t), rhs: *rhs },
        Constraint::AllDifferent { vars } => Constraint::AllDifferent { vars: vars.iter().map(m).collect() },
        Constraint::ProductLe { x1, x2, x3 } => Constraint::ProductLe { x1: m(x1), x2: m(x2), x3: m(x3) },
        Constraint::MonoBij { x1, g, x2 } => Constraint::MonoBij { x1: m(x1), g: *g, x2: m(x2) },
        Constraint::Mod { x1, x2, x3 } => Constraint::Mod { x1: m(x1), x2: m(x2), x3: m(x3) },
        Constraint::ReifLinLe { b, terms: t, rhs } => Constraint::ReifLinLe { b: m(b), terms: terms(t), rhs: *rhs },
        Constraint::Table { vars, rows } => {
            Constraint::Table { vars: vars.iter().map(m).collect(), rows: rows.clone() }
        }
    }
}

/// A model over up to five variables with one to three constraints of
/// random kinds and notions, at most `max_tuples` candidate tuples.
pub fn random_model<R: Rng>(r: &mut R, max_tuples: u64) -> boundslab::Model {
    use rand::seq::SliceRandom;
    loop {
        let nv = r.random_range(2..=5);
        let mut sets: Vec<IntSet> = (0..nv).map(|_| random_set(r, -4, 4, 5)).collect();
        let mut posted = Vec::new();
        for _ in 0..r.random_range(1..=3) {
            let kind = pick(r, &ALL_KINDS);
            let shape = Shape { max_vars: nv.min(4), lo: -4, hi: 4, width: 5 };
            let (d, c) = random_instance(r, kind, shape);
            let k = d.num_vars();
            if k > nv {
                continue;
            }
            let mut ids: Vec<VarId> = (0..nv).map(VarId::from).collect();
            ids.shuffle(r);
            ids.truncate(k);
            for (i, v) in ids.iter().enumerate() {
                sets[v.index()] = d.get(VarId::from(i)).clone();
            }
            posted.push((remap(&c, &ids), pick(r, &kind.notions())));
        }
        let tuples: u64 = sets.iter().map(|s| s.len() as u64).product();
        if posted.is_empty() || tuples > max_tuples {
            continue;
        }
        let mut m = boundslab::Model::new();
        for (i, s) in sets.into_iter().enumerate() {
            m.add_var(format!("v{i}"), s);
        }
        for (i, (c, n)) in posted.into_iter().enumerate() {
            m.post(format!("c{i}"), c, n);
        }
        if m.validate().is_ok() {
            return m;
        }
    }
}
