//! One PASS/FAIL line per acceptance criterion. Runs without the libtest harness.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use boundslab::checkers::{check_bounds_d, check_bounds_r, check_bounds_z, check_domain};
use boundslab::cli::subset_sum_family;
use boundslab::oracle::{oracle_consistent, oracle_fixpoint};
use boundslab::propagators::{propagate, propagate_linear_br, propagate_scheduled, Schedule};
use boundslab::search::{solve_with, BranchStrategy};
use boundslab::{
    check, encode_subset_sum, is_monotonic, range_of, Constraint, Domain, IntSet, Limits, MonoFunc, Notion, Outcome,
    SubsetSumInstance, VarId,
};
use common::*;
use rand::seq::SliceRandom;
use rand::RngExt;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn golden() -> Verdict {
    use Notion::*;
    let cases: Vec<(&str, boundslab::Domain, Constraint, Notion, bool)> = vec![
        ("D0", d0(), c_lin(), Domain, false),
        ("D1", d1(), c_lin(), Domain, true),
        ("D2", d2(), c_lin(), BoundsR, true),
        ("D2", d2(), c_lin(), BoundsZ, false),
        ("D2", d2(), c_lin(), BoundsD, false),
        ("D3", d3(), c_lin(), BoundsR, true),
        ("D3", d3(), c_lin(), BoundsZ, true),
        ("D3", d3(), c_lin(), BoundsD, false),
        ("D4", d4(), c_lin(), BoundsR, true),
        ("D4", d4(), c_lin(), BoundsZ, true),
        ("D4", d4(), c_lin(), BoundsD, true),
        ("range(D3)", range_of(&d3()), c_lin(), BoundsD, true),
        ("range(D3)", range_of(&d3()), c_lin(), BoundsZ, true),
        ("D5", d5(), all_diff3(), BoundsR, true),
        ("D5", d5(), all_diff3(), BoundsZ, false),
        ("D8", d8(), sum5(), BoundsR, true),
        ("D8", d8(), sum5(), BoundsZ, true),
        ("D8", d8(), sum5(), BoundsD, false),
    ];
    for (name, d, c, n, want) in &cases {
        let got = check(d, c, *n).map_err(|e| e.to_string())?.consistent;
        ensure(got == *want, || format!("{name} under {n}: got {got}"))?;
        let oracle = oracle_consistent(d, c, *n).map_err(|e| e.to_string())?;
        ensure(oracle == *want, || format!("{name} under {n}: oracle says {oracle}"))?;
    }
    let p = propagate(&d0(), &c_lin(), Notion::Domain).map_err(|e| e.to_string())?;
    ensure(p.outcome == Outcome::Fixpoint(d1()), || "D0 does not propagate to D1".into())?;
    Ok(format!("{} verdicts", cases.len()))
}

const CASES: usize = 500;

fn propositions() -> Verdict {
    let mut r = rng(0xacc2);
    let real: Vec<Kind> = ALL_KINDS.iter().copied().filter(|k| k.is_real()).collect();
    let (mut chain, mut p2, mut p3) = (0, 0, 0);
    for i in 0..CASES * 2 {
        let kind = ALL_KINDS[i % ALL_KINDS.len()];
        let (d, c) = random_instance(&mut r, kind, MEDIUM);
        let dom = check_domain(&d, &c).unwrap().consistent;
        let bd = check_bounds_d(&d, &c).unwrap().consistent;
        let bz = check_bounds_z(&d, &c).unwrap().consistent;
        let ok = (!dom || bd) && (!bd || bz) && (!kind.is_real() || !bz || check_bounds_r(&d, &c).unwrap().consistent);
        ensure(ok, || format!("strength chain broken on {c:?} over {d:?}"))?;
        chain += 1;
        let rd = range_of(&d);
        ensure(bz == check_bounds_d(&rd, &c).unwrap().consistent, || format!("range lemma on {c:?} over {d:?}"))?;
        p2 += 1;
        let zr = bz == check_bounds_z(&rd, &c).unwrap().consistent
            && (!kind.is_real()
                || check_bounds_r(&d, &c).unwrap().consistent == check_bounds_r(&rd, &c).unwrap().consistent);
        ensure(zr, || format!("hole invariance on {c:?} over {d:?}"))?;
        p3 += 1;
    }
    let d3r = range_of(&d3());
    ensure(
        !check_bounds_d(&d3(), &c_lin()).unwrap().consistent && check_bounds_d(&d3r, &c_lin()).unwrap().consistent,
        || "D3 does not separate bounds-d from its range".into(),
    )?;

    let mut mono = 0;
    let mut tries = 0;
    while mono < CASES {
        tries += 1;
        ensure(tries < 50_000, || "monotone corpus too sparse".into())?;
        let kind = pick(&mut r, &real);
        let (d, c) = random_instance(&mut r, kind, MEDIUM);
        if !is_monotonic(&c, &d).unwrap().all_monotone() {
            continue;
        }
        let v: Vec<bool> = Notion::ALL.iter().map(|n| check(&d, &c, *n).unwrap().consistent).collect();
        ensure(v.iter().all(|x| *x == v[0]), || format!("monotone {c:?} over {d:?}: {v:?}"))?;
        mono += 1;
    }

    let bounds_agree = |d: &Domain, c: &Constraint| {
        let bd = check_bounds_d(d, c).unwrap().consistent;
        let bz = check_bounds_z(d, c).unwrap().consistent;
        let br = check_bounds_r(d, c).unwrap().consistent;
        ensure(bd == bz && bz == br, || format!("{c:?} over {d:?}: d={bd} z={bz} r={br}"))
    };
    for _ in 0..CASES {
        let (d, c) = random_instance(&mut r, Kind::LinNe, MEDIUM);
        bounds_agree(&d, &c)?;
    }
    for i in 0..CASES {
        let (d, c) = random_instance(&mut r, [Kind::MonoAffine, Kind::MonoPow, Kind::MonoPoly][i % 3], MEDIUM);
        bounds_agree(&d, &c)?;
    }
    for _ in 0..CASES {
        let k = r.random_range(1..=5);
        let sets: Vec<IntSet> = (0..k).map(|_| random_set(&mut r, -10, 10, 8)).collect();
        let mut terms = vec![(r.random_range(1..=5) * if r.random_bool(0.5) { 1 } else { -1 }, VarId(0))];
        for i in 1..k {
            terms.push((if r.random_bool(0.5) { 1 } else { -1 }, VarId::from(i)));
        }
        let rhs = terms.iter().map(|(a, v)| a * sets[v.index()].min().unwrap()).sum::<i64>() + r.random_range(0..=6);
        let (d, c) = (Domain::new(sets), Constraint::lin_eq(&terms, rhs));
        let z = check_bounds_z(&d, &c).unwrap().consistent;
        let rr = check_bounds_r(&d, &c).unwrap().consistent;
        ensure(z == rr, || format!("unit-coefficient {c:?} over {d:?}: z={z} r={rr}"))?;
    }
    Ok(format!("chain {chain}, range {p2}, holes {p3}, monotone {mono}, lin_ne/mono_bij/unit {CASES} each"))
}

fn reduction() -> Verdict {
    let mut r = rng(0xacc3);
    let (mut yes, mut no) = (0, 0);
    for _ in 0..240 {
        let n = r.random_range(1..=12);
        let items: Vec<i64> = (0..n).map(|_| r.random_range(1..=50)).collect();
        let target = r.random_range(1..=items.iter().sum::<i64>() + 5);
        let s = SubsetSumInstance::new(items, target).map_err(|e| e.to_string())?;
        let (m, _, _) = encode_subset_sum(&s).map_err(|e| e.to_string())?;
        let got = check_bounds_z(&m.initial_domain(), &m.constraints[0].constraint).unwrap().consistent;
        let want = s.brute_force();
        ensure(got == want, || format!("{s:?}: checker {got}, brute force {want}"))?;
        if want {
            yes += 1
        } else {
            no += 1
        }
    }
    Ok(format!("240 instances ({yes} yes, {no} no)"))
}

fn all_subsets(lo: i64, hi: i64) -> Vec<IntSet> {
    let vals: Vec<i64> = (lo..=hi).collect();
    (1u32..1 << vals.len())
        .map(|mask| IntSet::from_values(vals.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, v)| *v)))
        .collect()
}

fn notions_for(c: &Constraint) -> Vec<Notion> {
    if c.has_real_semantics() {
        Notion::ALL.to_vec()
    } else {
        vec![Notion::Domain, Notion::BoundsD, Notion::BoundsZ]
    }
}

fn certify(d: &Domain, c: &Constraint, n: Notion, r: &mut rand_chacha::ChaCha8Rng) -> Result<(), String> {
    let want = oracle_fixpoint(d, c, n).map_err(|e| e.to_string())?;
    let got = propagate(d, c, n).map_err(|e| e.to_string())?.outcome;
    ensure(got.domain() == want.as_ref(), || format!("{n} on {c:?} over {d:?}: {got:?} vs {want:?}"))?;
    let mut positions: Vec<usize> = (0..c.scope().len()).collect();
    positions.shuffle(r);
    let s = Schedule { positions, upper_first: r.random_bool(0.5) };
    let other = propagate_scheduled(d, c, n, &s).map_err(|e| e.to_string())?.outcome;
    ensure(other == got, || format!("{n} on {c:?} over {d:?}: schedule {s:?} differs"))?;
    if n == Notion::BoundsR && c.as_linear().is_some() {
        let fast = propagate_linear_br(d, c).map_err(|e| e.to_string())?.outcome;
        ensure(fast == got, || format!("linear bounds-r on {c:?} over {d:?}"))?;
    }
    Ok(())
}

fn certification() -> Verdict {
    let mut r = rng(0xacc4);
    let mut count = 0;
    let (a, b) = (VarId(0), VarId(1));
    let binary = [
        Constraint::lin_eq(&[(2, a), (-1, b)], 1),
        Constraint::lin_le(&[(3, a), (-2, b)], 0),
        Constraint::lin_ne(&[(1, a), (-1, b)], 0),
        Constraint::AllDifferent { vars: vec![a, b] },
        Constraint::MonoBij { x1: a, g: MonoFunc::Affine { a: -1, b: 3 }, x2: b },
        Constraint::MonoBij { x1: a, g: MonoFunc::PowK { a: 1, k: 2 }, x2: b },
        Constraint::MonoBij { x1: b, g: MonoFunc::Poly1234, x2: a },
        Constraint::Table { vars: vec![a, b], rows: vec![vec![0, 1], vec![1, 3], vec![2, 0], vec![3, 3]] },
    ];
    let subsets = all_subsets(0, 3);
    for c in &binary {
        for s1 in &subsets {
            for s2 in &subsets {
                let d = Domain::new(vec![s1.clone(), s2.clone()]);
                for n in notions_for(c) {
                    certify(&d, c, n, &mut r)?;
                    count += 1;
                }
            }
        }
    }
    let ternary: Vec<(Constraint, [(i64, i64); 3])> = vec![
        (Constraint::ProductLe { x1: X1, x2: X2, x3: X3 }, [(-1, 1), (-1, 1), (-1, 1)]),
        (Constraint::Mod { x1: X1, x2: X2, x3: X3 }, [(0, 2), (1, 3), (1, 3)]),
        (Constraint::AllDifferent { vars: vec![X1, X2, X3] }, [(0, 2), (0, 2), (0, 2)]),
        (
            Constraint::ReifLinLe {
                b: X1,
                terms: vec![boundslab::LinTerm::new(1, X2), boundslab::LinTerm::new(-1, X3)],
                rhs: 0,
            },
            [(0, 1), (0, 2), (0, 2)],
        ),
        (Constraint::lin_eq(&[(1, X1), (1, X2), (1, X3)], 3), [(0, 2), (0, 2), (0, 2)]),
    ];
    for (c, win) in &ternary {
        let pools: Vec<Vec<IntSet>> = win.iter().map(|&(l, h)| all_subsets(l, h)).collect();
        for s1 in &pools[0] {
            for s2 in &pools[1] {
                for s3 in &pools[2] {
                    let d = Domain::new(vec![s1.clone(), s2.clone(), s3.clone()]);
                    for n in notions_for(c) {
                        certify(&d, c, n, &mut r)?;
                        count += 1;
                    }
                }
            }
        }
    }
    let tiny = Shape { max_vars: 4, lo: -5, hi: 5, width: 5 };
    for kind in ALL_KINDS {
        for n in kind.notions() {
            for _ in 0..40 {
                let (d, c) = random_instance(&mut r, kind, tiny);
                if d.sets().iter().any(|s| s.len() > 6) {
                    continue;
                }
                certify(&d, &c, n, &mut r)?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} (domain, constraint, notion) cases"))
}

/// Minimum over `rounds` of the mean time of `reps` calls.
fn timed(rounds: usize, reps: usize, mut f: impl FnMut()) -> Duration {
    (0..rounds)
        .map(|_| {
            let t = Instant::now();
            for _ in 0..reps {
                f();
            }
            t.elapsed() / reps as u32
        })
        .min()
        .unwrap()
}

fn cost_asymmetry() -> Verdict {
    let sizes = [10, 14, 18, 22];
    let mut slow = Vec::new();
    let mut fast = Vec::new();
    for s in subset_sum_family(0, &sizes) {
        let (m, _, _) = encode_subset_sum(&s).map_err(|e| e.to_string())?;
        let d = m.initial_domain();
        let c = m.constraints[0].constraint.clone();
        let n = s.items.len();
        let rounds = if n >= 22 { 1 } else { 3 };
        slow.push(timed(rounds, 1, || {
            assert!(!check_bounds_z(&d, &c).unwrap().consistent);
        }));
        fast.push(timed(25, 2000, || {
            std::hint::black_box(propagate_linear_br(std::hint::black_box(&d), &c).unwrap());
        }));
    }
    let ratios =
        |v: &[Duration]| -> Vec<f64> { v.windows(2).map(|w| w[1].as_secs_f64() / w[0].as_secs_f64()).collect() };
    let (rs, rf) = (ratios(&slow), ratios(&fast));
    let detail = format!("bounds-z {:?} (x{:.1?}), linear bounds-r {:?} (x{:.2?})", slow, rs, fast, rf);
    ensure(rs.iter().all(|x| *x >= 2.0) && rf.iter().all(|x| *x <= 1.5), || detail.clone())?;
    Ok(detail)
}

fn solver() -> Verdict {
    let mut r = rng(0xacc6);
    let mut count = 0;
    for _ in 0..400 {
        let m = random_model(&mut r, 10_000);
        let d = m.initial_domain();
        let cs: Vec<Constraint> = m.constraints.iter().map(|p| p.constraint.clone()).collect();
        let want = brute_solutions(&d, &cs);
        for strategy in [BranchStrategy::MinSplit, BranchStrategy::Bisect] {
            let res = solve_with(&m, &d, Limits::default(), strategy).map_err(|e| e.to_string())?;
            let mut got: Vec<Vec<i64>> = res
                .solutions
                .iter()
                .map(|v| (0..m.vars.len()).map(|i| v.get(VarId::from(i)).unwrap().to_i64().unwrap()).collect())
                .collect();
            got.sort();
            ensure(got == want, || format!("{strategy:?} on {m:?}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} solves"))
}

fn main() {
    let criteria: [Criterion; 6] = [
        ("golden examples", golden),
        ("proposition suites", propositions),
        ("reduction correctness", reduction),
        ("propagator certification", certification),
        ("cost asymmetry", cost_asymmetry),
        ("solver completeness", solver),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panic: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match v {
            Ok(d) => println!("PASS {} {name}: {d} [{secs:.2}s]", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL {} {name}: {e} [{secs:.2}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
