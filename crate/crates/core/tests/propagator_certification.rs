//! Propagators against the exhaustive deletion-search oracle on tiny instances.

mod common;

use boundslab::oracle::oracle_fixpoint;
use boundslab::propagators::{propagate, propagate_linear_br, propagate_scheduled, Schedule};
use boundslab::{propagate_all, Constraint, Domain, IntSet, Model, MonoFunc, Notion, Outcome, VarId};
use common::*;
use rand::seq::SliceRandom;
use rand::RngExt;

/// At most four variables, each set drawn from six consecutive values.
const TINY: Shape = Shape { max_vars: 4, lo: -5, hi: 5, width: 5 };

fn expect(d: &Domain, c: &Constraint, n: Notion) -> Option<Domain> {
    oracle_fixpoint(d, c, n).unwrap()
}

fn certify(d: &Domain, c: &Constraint, n: Notion, r: &mut rand_chacha::ChaCha8Rng) {
    let want = expect(d, c, n);
    let got = propagate(d, c, n).unwrap();
    assert_eq!(got.outcome.domain(), want.as_ref(), "{n} on {c:?} over {d:?}");
    // Confluence: any deletion order reaches the same fixpoint.
    let mut positions: Vec<usize> = (0..c.scope().len()).collect();
    for _ in 0..3 {
        positions.shuffle(r);
        let s = Schedule { positions: positions.clone(), upper_first: r.random_bool(0.5) };
        let other = propagate_scheduled(d, c, n, &s).unwrap();
        assert_eq!(other.outcome, got.outcome, "schedule {s:?} for {n} on {c:?} over {d:?}");
    }
    if n == Notion::BoundsR && c.as_linear().is_some() {
        let fast = propagate_linear_br(d, c).unwrap();
        assert_eq!(fast.outcome, got.outcome, "linear bounds-r on {c:?} over {d:?}");
    }
    // Idempotence, and the one-constraint engine agrees.
    if let Outcome::Fixpoint(f) = &got.outcome {
        assert_eq!(propagate(f, c, n).unwrap().outcome, got.outcome);
    }
    let mut m = Model::new();
    for (i, s) in d.sets().iter().enumerate() {
        m.add_var(format!("v{i}"), s.clone());
    }
    m.post("c", c.clone(), n);
    assert_eq!(propagate_all(&m, d).unwrap().outcome, got.outcome);
}

#[test]
fn random_tiny_instances_every_kind_and_notion() {
    let mut r = rng(0xce27);
    let mut failures = 0;
    let mut total = 0;
    for kind in ALL_KINDS {
        for n in kind.notions() {
            for _ in 0..60 {
                let (d, c) = random_instance(&mut r, kind, TINY);
                if d.sets().iter().any(|s| s.len() > 6) {
                    continue;
                }
                certify(&d, &c, n, &mut r);
                total += 1;
                failures += propagate(&d, &c, n).unwrap().outcome.is_failure() as usize;
            }
        }
    }
    assert!(total > 2000);
    assert!(failures > 0 && failures < total);
}

fn all_subsets(lo: i64, hi: i64) -> Vec<IntSet> {
    let vals: Vec<i64> = (lo..=hi).collect();
    (1u32..1 << vals.len())
        .map(|mask| IntSet::from_values(vals.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, v)| *v)))
        .collect()
}

// Every pair of nonempty subsets of {0..3} against a fixed set of binary constraints.
#[test]
fn exhaustive_binary_domains() {
    let (a, b) = (VarId(0), VarId(1));
    let cs = [
        Constraint::lin_eq(&[(2, a), (-1, b)], 1),
        Constraint::lin_eq(&[(1, a), (1, b)], 3),
        Constraint::lin_le(&[(3, a), (-2, b)], 0),
        Constraint::lin_ne(&[(1, a), (-1, b)], 0),
        Constraint::AllDifferent { vars: vec![a, b] },
        Constraint::MonoBij { x1: a, g: MonoFunc::Affine { a: -1, b: 3 }, x2: b },
        Constraint::MonoBij { x1: a, g: MonoFunc::PowK { a: 1, k: 2 }, x2: b },
        Constraint::Table { vars: vec![a, b], rows: vec![vec![0, 1], vec![1, 3], vec![2, 0], vec![3, 3]] },
    ];
    let subsets = all_subsets(0, 3);
    let mut r = rng(5);
    for c in &cs {
        let notions: Vec<Notion> = if c.has_real_semantics() {
            Notion::ALL.to_vec()
        } else {
            vec![Notion::Domain, Notion::BoundsD, Notion::BoundsZ]
        };
        for s1 in &subsets {
            for s2 in &subsets {
                let d = Domain::new(vec![s1.clone(), s2.clone()]);
                for &n in &notions {
                    certify(&d, c, n, &mut r);
                }
            }
        }
    }
}

// Every triple of nonempty subsets of small windows for the ternary catalog members.
#[test]
fn exhaustive_ternary_domains() {
    let (x1, x2, x3) = (X1, X2, X3);
    let cases: Vec<(Constraint, [(i64, i64); 3])> = vec![
        (Constraint::ProductLe { x1, x2, x3 }, [(-1, 1), (-1, 1), (-1, 1)]),
        (Constraint::Mod { x1, x2, x3 }, [(0, 2), (1, 3), (1, 3)]),
        (Constraint::AllDifferent { vars: vec![x1, x2, x3] }, [(0, 2), (0, 2), (0, 2)]),
        (
            Constraint::ReifLinLe {
                b: x1,
                terms: vec![boundslab::LinTerm::new(1, x2), boundslab::LinTerm::new(-1, x3)],
                rhs: 0,
            },
            [(0, 1), (0, 2), (0, 2)],
        ),
    ];
    let mut r = rng(6);
    for (c, win) in &cases {
        let pools: Vec<Vec<IntSet>> = win.iter().map(|&(l, h)| all_subsets(l, h)).collect();
        let notions: Vec<Notion> = if c.has_real_semantics() {
            Notion::ALL.to_vec()
        } else {
            vec![Notion::Domain, Notion::BoundsD, Notion::BoundsZ]
        };
        for s1 in &pools[0] {
            for s2 in &pools[1] {
                for s3 in &pools[2] {
                    let d = Domain::new(vec![s1.clone(), s2.clone(), s3.clone()]);
                    for &n in &notions {
                        certify(&d, c, n, &mut r);
                    }
                }
            }
        }
    }
}

fn shrink(r: &mut rand_chacha::ChaCha8Rng, d: &Domain) -> Domain {
    let sets = d
        .sets()
        .iter()
        .map(|s| {
            let kept: Vec<i64> = s.values().iter().copied().filter(|_| r.random_bool(0.7)).collect();
            if kept.is_empty() {
                IntSet::singleton(s.values()[r.random_range(0..s.len())])
            } else {
                IntSet::from_values(kept)
            }
        })
        .collect();
    Domain::new(sets)
}

// d below d' implies propagate(d) below propagate(d'), with failure below everything.
#[test]
fn propagation_is_monotone() {
    let mut r = rng(0x3030);
    for kind in ALL_KINDS {
        for n in kind.notions() {
            for _ in 0..40 {
                let (big, c) = random_instance(&mut r, kind, TINY);
                let small = shrink(&mut r, &big);
                let pb = propagate(&big, &c, n).unwrap().outcome;
                let ps = propagate(&small, &c, n).unwrap().outcome;
                match (ps, pb) {
                    (Outcome::Failure, _) => {}
                    (Outcome::Fixpoint(_), Outcome::Failure) => panic!("{n} on {c:?}: smaller input survived"),
                    (Outcome::Fixpoint(s), Outcome::Fixpoint(b)) => assert!(s.is_subdomain_of(&b), "{n} on {c:?}"),
                }
            }
        }
    }
}

// The propagated domain keeps every solution of the constraint.
#[test]
fn propagation_keeps_solutions() {
    let mut r = rng(0x5015);
    for kind in ALL_KINDS {
        for n in kind.notions() {
            for _ in 0..40 {
                let (d, c) = random_instance(&mut r, kind, TINY);
                let sols = brute_solutions(&d, std::slice::from_ref(&c));
                match propagate(&d, &c, n).unwrap().outcome {
                    Outcome::Failure => assert!(sols.is_empty(), "{n} failed on satisfiable {c:?}"),
                    Outcome::Fixpoint(f) => {
                        for s in sols {
                            assert!(s.iter().enumerate().all(|(i, x)| f.get(VarId::from(i)).contains(*x)));
                        }
                    }
                }
            }
        }
    }
}
