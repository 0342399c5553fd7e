//! End-to-end acceptance criteria. Each prints one PASS/FAIL line; the test
//! fails if any criterion does.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use common::*;
use ebforge_core::mathkit::*;
use ebforge_core::model::{Formula, Type};
use ebforge_core::parser::{parse_formula, render_formula, SourceFile};
use ebforge_core::pogen::{
    check_sequent_finite, emit_vc, gen_pos, Bounds, Family, Hyp, Sequent, Verdict,
};
use ebforge_core::simulate::{
    action_rng, fire, init_state, run, run_from, start, SimConfig, SimError, State, Termination,
    Trace,
};
use ebforge_core::translate::{emit_contracts, MachineProgram, Mode};
use ebforge_core::typecheck::annotate;
use ebforge_core::{build_program, load_project};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn criterion(n: usize, name: &str, limit: Option<Duration>, body: impl FnOnce() -> Check) -> bool {
    let t = Instant::now();
    let r = body();
    let elapsed = t.elapsed();
    let late = limit.is_some_and(|l| elapsed > l);
    let (ok, detail) = match r {
        Ok(d) if late => (false, format!("{d}; too slow")),
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    let budget = limit
        .map(|l| format!(" of {} s", l.as_secs()))
        .unwrap_or_default();
    println!(
        "[{}] {n}. {name}: {detail} ({:.2} s{budget})",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    ok
}

#[test]
fn acceptance() {
    let results = [
        criterion(
            1,
            "binary search fidelity",
            Some(Duration::from_secs(5)),
            binary_search_fidelity,
        ),
        criterion(2, "simultaneous assignment", None, simultaneous_assignment),
        criterion(
            3,
            "mathkit oracle suite",
            Some(Duration::from_secs(30)),
            mathkit_oracles,
        ),
        criterion(
            4,
            "PO reproduction",
            Some(Duration::from_secs(10)),
            po_reproduction,
        ),
        criterion(
            5,
            "runtime invariant preservation",
            None,
            invariant_preservation,
        ),
        criterion(6, "variant discipline", None, variant_discipline),
        criterion(7, "determinism", None, determinism),
        criterion(
            8,
            "counterexample soundness",
            None,
            counterexample_soundness,
        ),
    ];
    assert!(results.iter().all(|ok| *ok), "{results:?}");
}

// ---------------------------------------------------------------------------
// 1

fn slot_of(p: &MachineProgram, name: &str) -> usize {
    p.constants
        .iter()
        .chain(&p.variables)
        .find(|s| s.name == name)
        .unwrap_or_else(|| panic!("no symbol {name}"))
        .slot
}

/// Strictly increasing sequences of length `n` over `lo..=hi`.
fn sorted_arrays(n: usize, lo: i64, hi: i64, visit: &mut dyn FnMut(&[i64])) {
    fn go(xs: &mut Vec<i64>, n: usize, from: i64, hi: i64, visit: &mut dyn FnMut(&[i64])) {
        if xs.len() == n {
            visit(xs);
            return;
        }
        for x in from..=hi {
            xs.push(x);
            go(xs, n, x + 1, hi, visit);
            xs.pop();
        }
    }
    go(&mut Vec::with_capacity(n), n, lo, hi, visit);
}

fn search_frame(p: &MachineProgram, cfg: &SimConfig, xs: &[i64], v: i64) -> Vec<Value> {
    let mut fr = p.blank_frame(&cfg.grounding);
    fr[slot_of(p, "n")] = Value::Int(xs.len() as i64);
    fr[slot_of(p, "f")] = Value::int_rel(xs.iter().enumerate().map(|(i, x)| (i as i64 + 1, *x)));
    fr[slot_of(p, "v")] = Value::Int(v);
    fr
}

fn binary_search_fidelity() -> Check {
    let p = program(BIN, "bin_m2", Mode::Sequential);
    let cfg = SimConfig {
        mode: Mode::Sequential,
        step_limit: 64,
        ..SimConfig::default()
    };
    let mut rng = action_rng(0);
    let v_slot = slot_of(&p, "v");
    let (mut runs, mut failures) = (0u64, Vec::new());
    for n in 1..=6 {
        sorted_arrays(n, 0, 20, &mut |xs| {
            let frame = search_frame(&p, &cfg, xs, xs[0]);
            for &v in xs {
                runs += 1;
                let mut fr = frame.clone();
                fr[v_slot] = Value::Int(v);
                let found = start(&p, &cfg, fr, &mut rng).map(|st| run_from(&p, &cfg, st));
                let ok = match &found {
                    Ok(r) => {
                        r.error.is_none()
                            && r.trace.termination != Some(Termination::StepLimit)
                            && r.state
                                .as_ref()
                                .and_then(|s| s.value(&p, "r"))
                                .and_then(Value::as_int)
                                .is_some_and(|r| r >= 1 && xs.get(r as usize - 1) == Some(&v))
                    }
                    Err(_) => false,
                };
                if !ok && failures.len() < 3 {
                    failures.push(format!("f={xs:?} v={v}"));
                }
            }
        });
    }
    if failures.is_empty() {
        Ok(format!(
            "{runs} runs over n=1..6, values 0..20, all end with f(r) = v"
        ))
    } else {
        Err(format!(
            "{runs} runs, failures such as {}",
            failures.join("; ")
        ))
    }
}

// ---------------------------------------------------------------------------
// 2

const PAIRS: &str = "\
machine pairs
variables x y
invariants
  @inv1 x : INT
  @inv2 y : INT
events
  event initialisation
    then
      @act1 x, y := 0, 0
  end
  event swap
    then
      @act1 x := y
      @act2 y := x
  end
  event shift
    then
      @act1 x := y
      @act2 y := x + y
  end
end
";

fn simultaneous_assignment() -> Check {
    let t = load_project(&[SourceFile::new("pairs.ebm", PAIRS)]).map_err(|e| e.to_string())?;
    let (_, p) = build_program(&t, "pairs", Mode::Sequential).map_err(|e| e.to_string())?;
    let cfg = SimConfig::default();
    let init = init_state(&p, &cfg).map_err(|e| e.to_string())?;
    let (sx, sy) = (slot_of(&p, "x"), slot_of(&p, "y"));
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut act = action_rng(2);
    let mut deviations = 0;
    for _ in 0..1000 {
        let (x, y) = (
            rng.gen_range(-1_000_000..1_000_000),
            rng.gen_range(-1_000_000..1_000_000),
        );
        for (event, expect) in [("swap", (y, x)), ("shift", (y, x + y))] {
            let mut st = init.clone();
            st.frame[sx] = Value::Int(x);
            st.frame[sy] = Value::Int(y);
            let fired = fire(&p, event, &[], &mut st, &cfg, &mut act).map_err(|e| e.to_string())?;
            if !fired.fired
                || (st.frame[sx].clone(), st.frame[sy].clone())
                    != (Value::Int(expect.0), Value::Int(expect.1))
            {
                deviations += 1;
            }
        }
    }
    if deviations == 0 {
        Ok("1000 random states, swap and shift both match, 0 deviations".into())
    } else {
        Err(format!("{deviations} deviations"))
    }
}

// ---------------------------------------------------------------------------
// 3

type S = BTreeSet<i64>;
type R = BTreeSet<(i64, i64)>;

struct Gen(ChaCha8Rng);

impl Gen {
    fn size(&mut self) -> i64 {
        self.0.gen_range(1..=5)
    }
    fn set(&mut self, u: i64) -> S {
        (0..u).filter(|_| self.0.gen_bool(0.5)).collect()
    }
    fn rel(&mut self, u: i64, p: f64) -> R {
        let mut r = R::new();
        for x in 0..u {
            for y in 0..u {
                if self.0.gen_bool(p) {
                    r.insert((x, y));
                }
            }
        }
        r
    }
    fn elem(&mut self, u: i64) -> i64 {
        self.0.gen_range(0..u)
    }
}

fn sv(s: &S) -> Value {
    Value::int_set(s.iter().copied())
}

fn rv(r: &R) -> Value {
    Value::int_rel(r.iter().copied())
}

fn pair(a: Value, b: Value) -> Value {
    Value::pair(a, b)
}

type Case = Box<dyn Fn(&mut Gen) -> Option<String>>;

fn same(
    what: String,
    got: Result<Value, MathError>,
    want: Result<Value, MathError>,
) -> Option<String> {
    (got != want).then(|| format!("{what}: got {got:?}, want {want:?}"))
}

fn kind_member(k: RelKind, r: &R, a: &S, b: &S) -> bool {
    let in_rel = r.iter().all(|(x, y)| a.contains(x) && b.contains(y));
    let functional = r
        .iter()
        .all(|&(x, y1)| r.iter().all(|&(x2, y2)| x != x2 || y1 == y2));
    let injective = r
        .iter()
        .all(|&(x1, y)| r.iter().all(|&(x2, y2)| y != y2 || x1 == x2));
    let total = a.iter().all(|x| r.iter().any(|(x2, _)| x2 == x));
    let surjective = b.iter().all(|y| r.iter().any(|(_, y2)| y2 == y));
    let (f, i, t, s) = match k {
        RelKind::Rel => (false, false, false, false),
        RelKind::TotalRel => (false, false, true, false),
        RelKind::SurjRel => (false, false, false, true),
        RelKind::TotalSurjRel => (false, false, true, true),
        RelKind::PartialFun => (true, false, false, false),
        RelKind::TotalFun => (true, false, true, false),
        RelKind::PartialInj => (true, true, false, false),
        RelKind::TotalInj => (true, true, true, false),
        RelKind::PartialSurj => (true, false, false, true),
        RelKind::TotalSurj => (true, false, true, true),
        RelKind::TotalBij => (true, true, true, true),
    };
    in_rel && (!f || functional) && (!i || injective) && (!t || total) && (!s || surjective)
}

fn all_subsets<T: Clone + Ord>(xs: &[T]) -> Vec<BTreeSet<T>> {
    let mut out = vec![BTreeSet::new()];
    for x in xs {
        let more: Vec<BTreeSet<T>> = out
            .iter()
            .map(|s| {
                let mut s = s.clone();
                s.insert(x.clone());
                s
            })
            .collect();
        out.extend(more);
    }
    out
}

fn floor_oracle(a: i64, b: i64) -> i64 {
    (a as f64 / b as f64).floor() as i64
}

fn mathkit_cases() -> Vec<(&'static str, Case)> {
    let lim = Limits::default();
    let mut cases: Vec<(&'static str, Case)> = Vec::new();
    for (name, op) in [
        ("union", SetBinOp::Union),
        ("inter", SetBinOp::Intersection),
        ("diff", SetBinOp::Difference),
    ] {
        cases.push((
            name,
            Box::new(move |g| {
                let u = g.size();
                let (a, b) = (g.set(u), g.set(u));
                let want: S = (0..u)
                    .filter(|x| match op {
                        SetBinOp::Union => a.contains(x) || b.contains(x),
                        SetBinOp::Intersection => a.contains(x) && b.contains(x),
                        SetBinOp::Difference => a.contains(x) && !b.contains(x),
                    })
                    .collect();
                same(
                    format!("{a:?} {name} {b:?}"),
                    set_binary(op, &sv(&a), &sv(&b)),
                    Ok(sv(&want)),
                )
            }),
        ));
    }
    for (name, op) in [
        ("subset", SetPredOp::Subset),
        ("psubset", SetPredOp::ProperSubset),
        ("set-equal", SetPredOp::Equal),
    ] {
        cases.push((
            name,
            Box::new(move |g| {
                let u = g.size();
                let (a, b) = (
                    g.set(u),
                    if g.0.gen_bool(0.3) {
                        BTreeSet::new()
                    } else {
                        g.set(u)
                    },
                );
                let b = if g.0.gen_bool(0.3) {
                    a.union(&b).copied().collect()
                } else {
                    b
                };
                let sub = a.iter().all(|x| b.contains(x));
                let want = match op {
                    SetPredOp::Subset => sub,
                    SetPredOp::ProperSubset => sub && b.iter().any(|x| !a.contains(x)),
                    _ => sub && b.iter().all(|x| a.contains(x)),
                };
                let got = set_predicate(op, &sv(&a), &sv(&b));
                (got != Ok(want)).then(|| format!("{a:?} {name} {b:?}: {got:?}"))
            }),
        ));
    }
    cases.push((
        "member",
        Box::new(|g| {
            let u = g.size();
            let (s, x) = (g.set(u), g.elem(u));
            let got = set_predicate(SetPredOp::Member, &Value::Int(x), &sv(&s));
            (got != Ok(s.iter().any(|y| *y == x))).then(|| format!("{x} : {s:?}"))
        }),
    ));
    cases.push((
        "cross",
        Box::new(move |g| {
            let u = g.size();
            let (a, b) = (g.set(u), g.set(u));
            let mut want = Vec::new();
            for x in 0..u {
                for y in 0..u {
                    if a.contains(&x) && b.contains(&y) {
                        want.push(pair(Value::Int(x), Value::Int(y)));
                    }
                }
            }
            same(
                format!("{a:?} ** {b:?}"),
                cross(&sv(&a), &sv(&b), &lim),
                Ok(Value::set(want)),
            )
        }),
    ));
    cases.push((
        "pow",
        Box::new(move |g| {
            let u = g.size();
            let a = g.set(u);
            let universe: Vec<i64> = (0..u).collect();
            let want = all_subsets(&universe)
                .into_iter()
                .filter(|t| t.is_subset(&a))
                .map(|t| sv(&t));
            same(
                format!("POW({a:?})"),
                pow(&sv(&a), &lim),
                Ok(Value::set(want)),
            )
        }),
    ));
    cases.push((
        "interval",
        Box::new(move |g| {
            let (a, b) = (g.0.gen_range(-6..6), g.0.gen_range(-6..6));
            let want = (-6..6).filter(|x| a <= *x && *x <= b);
            same(
                format!("{a}..{b}"),
                interval(a, b, &lim),
                Ok(Value::int_set(want)),
            )
        }),
    ));
    for (name, op) in [
        ("dom", RelUnaryOp::Domain),
        ("ran", RelUnaryOp::Range),
        ("inverse", RelUnaryOp::Inverse),
        ("id", RelUnaryOp::IdentityOn),
    ] {
        cases.push((
            name,
            Box::new(move |g| {
                let u = g.size();
                let r = g.rel(u, 0.3);
                let s = g.set(u);
                let (arg, want) = match op {
                    RelUnaryOp::Domain => (
                        rv(&r),
                        sv(&(0..u).filter(|x| r.iter().any(|p| p.0 == *x)).collect()),
                    ),
                    RelUnaryOp::Range => (
                        rv(&r),
                        sv(&(0..u).filter(|y| r.iter().any(|p| p.1 == *y)).collect()),
                    ),
                    RelUnaryOp::Inverse => (rv(&r), rv(&r.iter().map(|&(x, y)| (y, x)).collect())),
                    RelUnaryOp::IdentityOn => (sv(&s), rv(&s.iter().map(|&x| (x, x)).collect())),
                };
                same(format!("{name}({arg})"), rel_unary(op, &arg), Ok(want))
            }),
        ));
    }
    for (name, op) in [
        ("domres", RestrictOp::DomRes),
        ("ranres", RestrictOp::RanRes),
        ("domsub", RestrictOp::DomSub),
        ("ransub", RestrictOp::RanSub),
    ] {
        cases.push((
            name,
            Box::new(move |g| {
                let u = g.size();
                let (s, r) = (g.set(u), g.rel(u, 0.3));
                let mut want = R::new();
                for x in 0..u {
                    for y in 0..u {
                        let keep = r.contains(&(x, y))
                            && match op {
                                RestrictOp::DomRes => s.contains(&x),
                                RestrictOp::RanRes => s.contains(&y),
                                RestrictOp::DomSub => !s.contains(&x),
                                RestrictOp::RanSub => !s.contains(&y),
                            };
                        if keep {
                            want.insert((x, y));
                        }
                    }
                }
                same(
                    format!("{name} {s:?} {r:?}"),
                    rel_restrict(op, &sv(&s), &rv(&r)),
                    Ok(rv(&want)),
                )
            }),
        ));
    }
    for (name, op) in [
        ("fcomp", CombineOp::FComp),
        ("bcomp", CombineOp::BComp),
        ("override", CombineOp::Override),
        ("dprod", CombineOp::DProd),
        ("pprod", CombineOp::PProd),
    ] {
        cases.push((
            name,
            Box::new(move |g| {
                let u = g.size();
                let (f, h) = (g.rel(u, 0.3), g.rel(u, 0.3));
                let compose = |a: &R, b: &R| -> R {
                    let mut out = R::new();
                    for x in 0..u {
                        for z in 0..u {
                            if (0..u).any(|y| a.contains(&(x, y)) && b.contains(&(y, z))) {
                                out.insert((x, z));
                            }
                        }
                    }
                    out
                };
                let want = match op {
                    CombineOp::FComp => rv(&compose(&f, &h)),
                    CombineOp::BComp => rv(&compose(&h, &f)),
                    CombineOp::Override => {
                        let hdom: S = h.iter().map(|p| p.0).collect();
                        rv(&f
                            .iter()
                            .filter(|p| !hdom.contains(&p.0))
                            .chain(&h)
                            .copied()
                            .collect())
                    }
                    CombineOp::DProd => {
                        let mut out = Vec::new();
                        for x in 0..u {
                            for y in 0..u {
                                for z in 0..u {
                                    if f.contains(&(x, y)) && h.contains(&(x, z)) {
                                        out.push(pair(
                                            Value::Int(x),
                                            pair(Value::Int(y), Value::Int(z)),
                                        ));
                                    }
                                }
                            }
                        }
                        Value::set(out)
                    }
                    CombineOp::PProd => {
                        let mut out = Vec::new();
                        for &(x, y) in &f {
                            for &(z, w) in &h {
                                out.push(pair(
                                    pair(Value::Int(x), Value::Int(z)),
                                    pair(Value::Int(y), Value::Int(w)),
                                ));
                            }
                        }
                        Value::set(out)
                    }
                };
                same(
                    format!("{f:?} {name} {h:?}"),
                    rel_combine(op, &rv(&f), &rv(&h)),
                    Ok(want),
                )
            }),
        ));
    }
    cases.push((
        "image",
        Box::new(|g| {
            let u = g.size();
            let (r, s) = (g.rel(u, 0.3), g.set(u));
            let want: S = (0..u)
                .filter(|y| s.iter().any(|x| r.contains(&(*x, *y))))
                .collect();
            same(
                format!("{r:?}[{s:?}]"),
                rel_image(&rv(&r), &sv(&s)),
                Ok(sv(&want)),
            )
        }),
    ));
    cases.push((
        "apply",
        Box::new(|g| {
            let u = g.size();
            let r = g.rel(u, 0.2);
            let x = g.elem(u);
            let ys: Vec<i64> = (0..u).filter(|y| r.contains(&(x, *y))).collect();
            let want = match ys.as_slice() {
                [] => Err(MathError::NotInDomain(Value::Int(x))),
                [y] => Ok(Value::Int(*y)),
                _ => Err(MathError::NotFunctionalAt(Value::Int(x))),
            };
            same(
                format!("{r:?}({x})"),
                rel_apply(&rv(&r), &Value::Int(x)),
                want,
            )
        }),
    ));
    for (name, op) in [
        ("card", AggregateOp::Card),
        ("min", AggregateOp::Min),
        ("max", AggregateOp::Max),
    ] {
        cases.push((
            name,
            Box::new(move |g| {
                let u = g.size();
                let s: S = g.set(u).into_iter().map(|x| x * 3 - 5).collect();
                let want = match op {
                    AggregateOp::Card => Ok(Value::Int(s.iter().count() as i64)),
                    _ => {
                        let pick = s.iter().copied().filter(|x| {
                            s.iter().all(|y| {
                                if op == AggregateOp::Min {
                                    x <= y
                                } else {
                                    x >= y
                                }
                            })
                        });
                        pick.last()
                            .map(Value::Int)
                            .ok_or(MathError::EmptyAggregate(name))
                    }
                };
                same(format!("{name}({s:?})"), aggregate(op, &sv(&s)), want)
            }),
        ));
    }
    for (name, op) in [
        ("gen-union", AggregateOp::GenUnion),
        ("gen-inter", AggregateOp::GenInter),
    ] {
        cases.push((
            name,
            Box::new(move |g| {
                let u = g.size();
                let k = g.0.gen_range(0..4);
                let family: Vec<S> = (0..k).map(|_| g.set(u)).collect();
                let arg = Value::set(family.iter().map(sv));
                let distinct: BTreeSet<&S> = family.iter().collect();
                let want = match op {
                    AggregateOp::GenUnion => Ok(sv(&(0..u)
                        .filter(|x| distinct.iter().any(|t| t.contains(x)))
                        .collect())),
                    _ if distinct.is_empty() => Err(MathError::EmptyAggregate("inter")),
                    _ => Ok(sv(&(0..u)
                        .filter(|x| distinct.iter().all(|t| t.contains(x)))
                        .collect())),
                };
                same(format!("{name}({arg})"), aggregate(op, &arg), want)
            }),
        ));
    }
    cases.push((
        "kind classification",
        Box::new(|g| {
            let u = g.size();
            let (a, b) = (g.set(u), g.set(u));
            let r: R = if g.0.gen_bool(0.7) {
                // Mostly functions into b, so the function kinds are exercised.
                a.iter()
                    .filter_map(|&x| {
                        let ys: Vec<&i64> = b.iter().collect();
                        (!ys.is_empty() && g.0.gen_bool(0.8))
                            .then(|| (x, *ys[g.0.gen_range(0..ys.len())]))
                    })
                    .collect()
            } else {
                g.rel(u, 0.3)
            };
            let facts = rel_classify(&rv(&r), &sv(&a), &sv(&b));
            RelKind::ALL
                .into_iter()
                .find(|k| k.admits(&facts) != kind_member(*k, &r, &a, &b))
                .map(|k| format!("{r:?} in {a:?} {} {b:?}", k.ascii()))
        }),
    ));
    cases.push((
        "kind sets",
        Box::new(move |g| {
            let a: S = (0..g.0.gen_range(0..=3)).collect();
            let b: S = (0..g.0.gen_range(0..=2)).collect();
            let k = RelKind::ALL[g.0.gen_range(0..RelKind::ALL.len())];
            let pairs: Vec<(i64, i64)> = a
                .iter()
                .flat_map(|&x| b.iter().map(move |&y| (x, y)))
                .collect();
            let want = all_subsets(&pairs)
                .into_iter()
                .filter(|r| kind_member(k, r, &a, &b))
                .map(|r| rv(&r));
            same(
                format!("{a:?} {} {b:?}", k.ascii()),
                relations_of_kind(k, &sv(&a), &sv(&b), &lim),
                Ok(Value::set(want)),
            )
        }),
    ));
    for (name, op) in [
        ("add", ArithOp::Add),
        ("sub", ArithOp::Sub),
        ("mul", ArithOp::Mul),
        ("div", ArithOp::Div),
        ("mod", ArithOp::Mod),
        ("exp", ArithOp::Exp),
    ] {
        cases.push((
            name,
            Box::new(move |g| {
                let (a, b) = (g.0.gen_range(-50..50), g.0.gen_range(-6..7));
                let want = match op {
                    ArithOp::Add => Ok(a + b),
                    ArithOp::Sub => Ok(a - b),
                    ArithOp::Mul => Ok(a * b),
                    ArithOp::Div | ArithOp::Mod if b == 0 => Err(MathError::DivisionByZero),
                    ArithOp::Div => Ok(floor_oracle(a, b)),
                    ArithOp::Mod => Ok(a - b * floor_oracle(a, b)),
                    ArithOp::Exp if b < 0 => Err(MathError::NegativeExponent(b)),
                    ArithOp::Exp => Ok((0..b).fold(1i64, |acc, _| acc * a)),
                };
                same(
                    format!("{a} {name} {b}"),
                    arith(op, &Value::Int(a), &Value::Int(b)),
                    want.map(Value::Int),
                )
            }),
        ));
    }
    cases
}

fn mathkit_oracles() -> Check {
    const N: usize = 10_000;
    let cases = mathkit_cases();
    let mut g = Gen(ChaCha8Rng::seed_from_u64(3));
    let mut bad = Vec::new();
    for (name, case) in &cases {
        let misses: Vec<String> = (0..N).filter_map(|_| case(&mut g)).collect();
        if let Some(first) = misses.first() {
            bad.push(format!("{name}: {} mismatches, e.g. {first}", misses.len()));
        }
    }
    if bad.is_empty() {
        Ok(format!(
            "{} operators x {N} cases, 0 mismatches",
            cases.len()
        ))
    } else {
        Err(bad.join("; "))
    }
}

// ---------------------------------------------------------------------------
// 4

fn po_reproduction() -> Check {
    let t = typed(SEARCH);
    let mut pos = gen_pos(&t, "m0_a").map_err(|e| e.to_string())?;
    pos.extend(gen_pos(&t, "m1_a").map_err(|e| e.to_string())?);
    let base = [
        "ax1", "ax2", "ax3", "thm1", "inv1", "inv1_r1", "inv2_r1", "thm1_r1",
    ];
    let abs = ["ax1", "ax2", "ax3", "thm1", "inv1"];
    let expected: &[(&str, Family, &[&str], &[&str], &str)] = &[
        (
            "search/inv1/INV",
            Family::Inv,
            &abs,
            &["grd1", "grd2", "act1"],
            "i' : 1..n",
        ),
        (
            "search/grd2/GRD",
            Family::Grd,
            &base,
            &["grd1_r1", "k"],
            "f(k) = v",
        ),
        (
            "search/act1/SIM",
            Family::Sim,
            &base,
            &["grd1_r1", "k", "act1_r1"],
            "i' = k",
        ),
        (
            "progress/NAT",
            Family::Nat,
            &base,
            &["grd1_r1"],
            "n - j : NAT",
        ),
        (
            "progress/VAR",
            Family::Var,
            &base,
            &["grd1_r1", "act1_r1"],
            "n - (j + 1) < n - j",
        ),
        (
            "search/k/WFIS",
            Family::Wfis,
            &base,
            &["grd1_r1", "act1_r1"],
            "#k . j + 1 = k",
        ),
    ];
    let mut bounds = Bounds::default();
    bounds.grounding.carriers.insert("D".into(), 2);
    bounds.grounding.int_range = Some((-1, 4));
    let mut errors = Vec::new();
    for (name, family, pre, extra, goal) in expected {
        let Some(s) = pos.iter().find(|s| s.name == *name) else {
            errors.push(format!("{name} missing"));
            continue;
        };
        let labels: Vec<&str> = s.hyps.iter().map(|h| h.label.as_str()).collect();
        let want: Vec<&str> = pre.iter().chain(extra.iter()).copied().collect();
        if s.family != *family || labels != want || render_formula(&s.goal) != *goal {
            errors.push(format!("{name}: {labels:?} |- {}", render_formula(&s.goal)));
            continue;
        }
        match check_sequent_finite(s, &bounds) {
            Ok(r) if r.verdict == Verdict::Valid => {}
            other => errors.push(format!("{name}: {other:?}")),
        }
    }
    if errors.is_empty() {
        Ok(format!("INV, GRD, SIM, NAT, VAR, WFIS match and are Valid at D=2, Int -1..4 ({} POs generated)", pos.len()))
    } else {
        Err(errors.join("; "))
    }
}

// ---------------------------------------------------------------------------
// 5

fn social_config() -> SimConfig {
    let mut cfg = SimConfig::default();
    cfg.grounding.carriers.insert("PERSON".into(), 3);
    cfg.grounding.carriers.insert("CONTENTS".into(), 3);
    cfg
}

/// Runs with successive seeds until `total` steps have been taken.
fn steps_without_violation(
    p: &MachineProgram,
    base: &SimConfig,
    total: usize,
    fresh: &mut dyn FnMut(u64) -> Result<State, SimError>,
) -> Result<usize, String> {
    let (mut done, mut seed) = (0, 0u64);
    while done < total {
        let cfg = SimConfig {
            seed,
            step_limit: total - done,
            ..base.clone()
        };
        let st = fresh(seed).map_err(|e| format!("{} seed {seed}: {e}", p.name))?;
        let r = run_from(p, &cfg, st);
        if let Some(e) = r.error {
            return Err(format!("{} seed {seed}: {e}", p.name));
        }
        done += r.trace.entries.len();
        seed += 1;
        if seed > 100_000 {
            return Err(format!("{} makes no progress", p.name));
        }
    }
    Ok(seed as usize)
}

fn invariant_preservation() -> Check {
    const TOTAL: usize = 10_000;
    let mut notes = Vec::new();
    let bin = program(BIN, "bin_m2", Mode::Interleaving);
    let bcfg = SimConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let runs = steps_without_violation(&bin, &bcfg, TOTAL, &mut |seed| {
        let n = rng.gen_range(1..=6);
        let mut xs: Vec<i64> = Vec::new();
        while xs.len() < n {
            let x = rng.gen_range(0..=20);
            if !xs.contains(&x) {
                xs.push(x);
            }
        }
        xs.sort_unstable();
        let v = xs[rng.gen_range(0..n)];
        start(
            &bin,
            &bcfg,
            search_frame(&bin, &bcfg, &xs, v),
            &mut action_rng(seed),
        )
    })?;
    notes.push(format!("bin_m2 {runs} runs"));
    let cases: [(&[&str], &str, SimConfig); 3] = [
        (SOCIAL, "social", social_config()),
        (
            MIO,
            "mio_abstract",
            config("mio.bindings", Mode::Interleaving),
        ),
        (MIO, "mio_ref1", config("mio.bindings", Mode::Interleaving)),
    ];
    for (files, m, cfg) in cases {
        let p = program(files, m, Mode::Interleaving);
        let runs = steps_without_violation(&p, &cfg, TOTAL, &mut |seed| {
            init_state(
                &p,
                &SimConfig {
                    seed,
                    ..cfg.clone()
                },
            )
        })?;
        notes.push(format!("{m} {runs} runs"));
    }
    // A broken `inc` must be caught.
    let src = read("bin_m2.ebm");
    let broken = src.replacen("@act2 p := r + 1", "@act2 p := q + 1", 1);
    assert_ne!(src, broken);
    let t = load_project(&[
        SourceFile::new("bin_c0.ebc", read("bin_c0.ebc")),
        SourceFile::new("bin_m2.ebm", broken),
    ])
    .map_err(|e| e.to_string())?;
    let (_, p) = build_program(&t, "bin_m2", Mode::Interleaving).map_err(|e| e.to_string())?;
    let cfg = SimConfig {
        step_limit: 100,
        ..config("bin.bindings", Mode::Interleaving)
    };
    let r = run(&p, &cfg);
    match r.error {
        Some(SimError::InvariantViolation { ref label, .. }) if label == "inv1" => {
            notes.push(format!(
                "broken inc flagged inv1 at step {}",
                r.trace.entries.len()
            ));
        }
        other => {
            return Err(format!(
                "broken inc: expected inv1 violation, got {other:?}"
            ))
        }
    }
    Ok(format!(
        "{TOTAL} steps each without violation: {}",
        notes.join(", ")
    ))
}

// ---------------------------------------------------------------------------
// 6

fn variant_discipline() -> Check {
    let p = program(SEARCH, "m1_a", Mode::Interleaving);
    let base = SimConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut firings, mut traces) = (0, 0);
    for seed in 0..300u64 {
        let n = rng.gen_range(1..=6i64);
        let f: Vec<i64> = (0..n)
            .map(|_| rng.gen_range(0..base.grounding.default_carrier))
            .collect();
        let v = f[rng.gen_range(0..n as usize)];
        let mut fr = p.blank_frame(&base.grounding);
        fr[slot_of(&p, "n")] = Value::Int(n);
        fr[slot_of(&p, "f")] =
            Value::int_rel(f.iter().enumerate().map(|(i, x)| (i as i64 + 1, *x)));
        fr[slot_of(&p, "v")] = Value::Int(v);
        let cfg = SimConfig {
            seed,
            ..base.clone()
        };
        let st = start(&p, &cfg, fr, &mut action_rng(seed))
            .map_err(|e| format!("f={f:?} v={v}: {e}"))?;
        let r = run_from(&p, &cfg, st);
        if let Some(e) = r.error {
            return Err(format!("f={f:?} v={v}: {e}"));
        }
        traces += 1;
        for e in r.trace.entries.iter().filter(|e| e.event == "progress") {
            let parse = |s: &Option<String>| s.as_deref().and_then(|s| s.parse::<i64>().ok());
            match (parse(&e.variant_before), parse(&e.variant_after)) {
                (Some(a), Some(b)) if b < a => firings += 1,
                other => return Err(format!("step {}: variant {other:?}", e.step)),
            }
        }
    }
    let src = read("m1_a.ebm");
    let mutated = src.replacen("@act1_r1 j := j + 1", "@act1_r1 j := j", 1);
    assert_ne!(src, mutated);
    let t = load_project(&[
        SourceFile::new("ctx0.ebc", read("ctx0.ebc")),
        SourceFile::new("m0_a.ebm", read("m0_a.ebm")),
        SourceFile::new("m1_a.ebm", mutated),
    ])
    .map_err(|e| e.to_string())?;
    let (_, bad) = build_program(&t, "m1_a", Mode::Interleaving).map_err(|e| e.to_string())?;
    let r = run(&bad, &config("search.bindings", Mode::Interleaving));
    let earlier = r
        .trace
        .entries
        .iter()
        .filter(|e| e.event == "progress")
        .count();
    match r.error {
        Some(SimError::VariantViolation { ref event, .. })
            if event == "progress" && earlier == 0 => {}
        other => return Err(format!(
            "mutant: expected VariantViolation on first progress, got {other:?} after {earlier}"
        )),
    }
    Ok(format!("{firings} convergent firings over {traces} traces all decrease; `j := j` flagged on first firing"))
}

// ---------------------------------------------------------------------------
// 7

struct Corpus {
    files: &'static [&'static str],
    machine: &'static str,
    cfg: SimConfig,
}

fn corpus() -> Vec<Corpus> {
    let with = |b: &str| config(b, Mode::Interleaving);
    vec![
        Corpus {
            files: BIN,
            machine: "bin_m2",
            cfg: with("bin.bindings"),
        },
        Corpus {
            files: SEARCH,
            machine: "m0_a",
            cfg: with("search.bindings"),
        },
        Corpus {
            files: SEARCH,
            machine: "m1_a",
            cfg: with("search.bindings"),
        },
        Corpus {
            files: SOCIAL,
            machine: "social",
            cfg: social_config(),
        },
        Corpus {
            files: MIO,
            machine: "mio_abstract",
            cfg: with("mio.bindings"),
        },
        Corpus {
            files: MIO,
            machine: "mio_ref1",
            cfg: with("mio.bindings"),
        },
    ]
}

/// Writes trace, contract and VC files for every corpus machine.
fn write_outputs(dir: &Path, seed: u64) {
    for c in corpus() {
        let t = typed(c.files);
        let (_, p) = build_program(&t, c.machine, Mode::Interleaving).unwrap();
        let cfg = SimConfig {
            seed,
            step_limit: 300,
            ..c.cfg.clone()
        };
        let trace: Trace = run(&p, &cfg).trace;
        fs::write(dir.join(format!("{}.trace", c.machine)), trace.to_text()).unwrap();
        fs::write(dir.join(format!("{}.json", c.machine)), trace.to_json()).unwrap();
        fs::write(
            dir.join(format!("{}.contracts", c.machine)),
            emit_contracts(&p.contracts),
        )
        .unwrap();
        for s in gen_pos(&t, c.machine).unwrap() {
            let name = format!("{}.{}.vc", c.machine, s.name.replace('/', "."));
            fs::write(dir.join(name), emit_vc(&s)).unwrap();
        }
    }
}

fn dir_contents(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

fn determinism() -> Check {
    let (a, b, c) = (
        tempfile::tempdir().unwrap(),
        tempfile::tempdir().unwrap(),
        tempfile::tempdir().unwrap(),
    );
    write_outputs(a.path(), 42);
    write_outputs(b.path(), 42);
    write_outputs(c.path(), 43);
    let (da, db, dc) = (
        dir_contents(a.path()),
        dir_contents(b.path()),
        dir_contents(c.path()),
    );
    if da != db {
        let diff: Vec<&String> = da.keys().filter(|k| da.get(*k) != db.get(*k)).collect();
        return Err(format!("files differ: {diff:?}"));
    }
    let seed_sensitive = da
        .iter()
        .filter(|(k, v)| k.ends_with(".trace") && dc.get(*k) != Some(v))
        .count();
    Ok(format!(
        "{} files byte-identical across two runs; {seed_sensitive} traces change with the seed",
        da.len()
    ))
}

// ---------------------------------------------------------------------------
// 8

#[derive(Clone, Copy, PartialEq)]
enum Ty {
    Int,
    Elem,
    Set,
}

#[derive(Clone, Debug, PartialEq)]
enum V {
    I(i64),
    S(S),
}

#[derive(Clone)]
enum E {
    Var(usize),
    Lit(i64),
    Add(Box<E>, Box<E>),
    Sub(Box<E>, Box<E>),
    Card(Box<E>),
    Empty,
    Single(Box<E>),
    Union(Box<E>, Box<E>),
    Inter(Box<E>, Box<E>),
    Diff(Box<E>, Box<E>),
}

#[derive(Clone)]
enum P {
    Lt(E, E),
    Le(E, E),
    Eq(E, E),
    Neq(E, E),
    In(E, E),
    Sub(E, E),
    And(Box<P>, Box<P>),
    Or(Box<P>, Box<P>),
    Imp(Box<P>, Box<P>),
    Not(Box<P>),
}

struct Fuzz<'a> {
    rng: &'a mut ChaCha8Rng,
    tys: &'a [Ty],
    int_lo: i64,
    int_hi: i64,
}

impl Fuzz<'_> {
    fn vars(&self, t: Ty) -> Vec<usize> {
        (0..self.tys.len()).filter(|i| self.tys[*i] == t).collect()
    }

    fn pick(&mut self, xs: &[usize]) -> Option<usize> {
        (!xs.is_empty()).then(|| xs[self.rng.gen_range(0..xs.len())])
    }

    fn int_atom(&mut self) -> E {
        match self.pick(&self.vars(Ty::Int)) {
            Some(v) if self.rng.gen_bool(0.7) => E::Var(v),
            _ => E::Lit(self.rng.gen_range(self.int_lo..=self.int_hi)),
        }
    }

    fn int(&mut self, depth: u32) -> E {
        if depth == 0 {
            return self.int_atom();
        }
        match self.rng.gen_range(0..5) {
            0 => E::Add(Box::new(self.int(depth - 1)), Box::new(self.int(depth - 1))),
            1 => E::Sub(Box::new(self.int(depth - 1)), Box::new(self.int(depth - 1))),
            2 if self.can_set() => E::Card(Box::new(self.set(depth - 1))),
            _ => self.int_atom(),
        }
    }

    fn can_set(&self) -> bool {
        self.tys.iter().any(|t| *t != Ty::Int)
    }

    fn set(&mut self, depth: u32) -> E {
        let sets = self.vars(Ty::Set);
        let elems = self.vars(Ty::Elem);
        let r = if depth == 0 {
            0
        } else {
            self.rng.gen_range(0..6)
        };
        match r {
            1 => E::Union(Box::new(self.set(depth - 1)), Box::new(self.set(depth - 1))),
            2 => E::Inter(Box::new(self.set(depth - 1)), Box::new(self.set(depth - 1))),
            3 => E::Diff(Box::new(self.set(depth - 1)), Box::new(self.set(depth - 1))),
            _ => match (self.pick(&sets), self.pick(&elems)) {
                (Some(s), _) if self.rng.gen_bool(0.7) => E::Var(s),
                (_, Some(e)) if self.rng.gen_bool(0.6) => E::Single(Box::new(E::Var(e))),
                (Some(s), _) => E::Var(s),
                _ => E::Empty,
            },
        }
    }

    /// `hyp` keeps integer equalities between atoms, so that no hypothesis
    /// pins an integer symbol outside the enumerated range.
    fn pred(&mut self, depth: u32, hyp: bool) -> P {
        let r = if depth == 0 {
            self.rng.gen_range(0..6)
        } else {
            self.rng.gen_range(0..10)
        };
        let sub = |f: &mut Self| Box::new(f.pred(depth.saturating_sub(1), hyp));
        match r {
            0 => P::Lt(self.int(depth), self.int(depth)),
            1 => P::Le(self.int(depth), self.int(depth)),
            2 if hyp => P::Eq(self.int_atom(), self.int_atom()),
            2 => P::Eq(self.int(depth), self.int(depth)),
            3 => P::Neq(self.int(depth), self.int(depth)),
            4 if !self.vars(Ty::Elem).is_empty() => {
                let e = self.pick(&self.vars(Ty::Elem)).unwrap();
                P::In(E::Var(e), self.set(depth))
            }
            4 | 5 if self.can_set() => {
                if self.rng.gen_bool(0.5) {
                    P::Sub(self.set(depth), self.set(depth))
                } else {
                    P::Eq(self.set(depth), self.set(depth))
                }
            }
            6 => P::And(sub(self), sub(self)),
            7 => P::Or(sub(self), sub(self)),
            8 => P::Imp(sub(self), sub(self)),
            9 => P::Not(sub(self)),
            _ => P::Le(self.int_atom(), self.int(depth)),
        }
    }
}

fn show_e(e: &E) -> String {
    match e {
        E::Var(i) => format!("x{i}"),
        E::Lit(n) if *n < 0 => format!("(0 - {})", -n),
        E::Lit(n) => n.to_string(),
        E::Add(a, b) => format!("({} + {})", show_e(a), show_e(b)),
        E::Sub(a, b) => format!("({} - {})", show_e(a), show_e(b)),
        E::Card(s) => format!("card({})", show_e(s)),
        E::Empty => "{}".into(),
        E::Single(x) => format!("{{{}}}", show_e(x)),
        E::Union(a, b) => format!("({} \\/ {})", show_e(a), show_e(b)),
        E::Inter(a, b) => format!("({} /\\ {})", show_e(a), show_e(b)),
        E::Diff(a, b) => format!("({} \\ {})", show_e(a), show_e(b)),
    }
}

fn show_p(p: &P) -> String {
    let bin = |a: &E, op: &str, b: &E| format!("({} {op} {})", show_e(a), show_e(b));
    match p {
        P::Lt(a, b) => bin(a, "<", b),
        P::Le(a, b) => bin(a, "<=", b),
        P::Eq(a, b) => bin(a, "=", b),
        P::Neq(a, b) => bin(a, "/=", b),
        P::In(a, b) => bin(a, ":", b),
        P::Sub(a, b) => bin(a, "<:", b),
        P::And(a, b) => format!("({} & {})", show_p(a), show_p(b)),
        P::Or(a, b) => format!("({} or {})", show_p(a), show_p(b)),
        P::Imp(a, b) => format!("({} => {})", show_p(a), show_p(b)),
        P::Not(a) => format!("not({})", show_p(a)),
    }
}

fn eval_e(e: &E, env: &[V]) -> V {
    let int = |e: &E| match eval_e(e, env) {
        V::I(n) => n,
        V::S(_) => unreachable!("int expected"),
    };
    let set = |e: &E| match eval_e(e, env) {
        V::S(s) => s,
        V::I(_) => unreachable!("set expected"),
    };
    match e {
        E::Var(i) => env[*i].clone(),
        E::Lit(n) => V::I(*n),
        E::Add(a, b) => V::I(int(a) + int(b)),
        E::Sub(a, b) => V::I(int(a) - int(b)),
        E::Card(s) => V::I(set(s).len() as i64),
        E::Empty => V::S(S::new()),
        E::Single(x) => V::S([int(x)].into()),
        E::Union(a, b) => V::S(set(a).union(&set(b)).copied().collect()),
        E::Inter(a, b) => V::S(set(a).intersection(&set(b)).copied().collect()),
        E::Diff(a, b) => V::S(set(a).difference(&set(b)).copied().collect()),
    }
}

fn eval_p(p: &P, env: &[V]) -> bool {
    let int = |e: &E| match eval_e(e, env) {
        V::I(n) => n,
        V::S(_) => unreachable!(),
    };
    match p {
        P::Lt(a, b) => int(a) < int(b),
        P::Le(a, b) => int(a) <= int(b),
        P::Eq(a, b) => eval_e(a, env) == eval_e(b, env),
        P::Neq(a, b) => eval_e(a, env) != eval_e(b, env),
        P::In(a, b) => match (eval_e(a, env), eval_e(b, env)) {
            (V::I(x), V::S(s)) => s.contains(&x),
            _ => unreachable!(),
        },
        P::Sub(a, b) => match (eval_e(a, env), eval_e(b, env)) {
            (V::S(x), V::S(y)) => x.is_subset(&y),
            _ => unreachable!(),
        },
        P::And(a, b) => eval_p(a, env) && eval_p(b, env),
        P::Or(a, b) => eval_p(a, env) || eval_p(b, env),
        P::Imp(a, b) => !eval_p(a, env) || eval_p(b, env),
        P::Not(a) => !eval_p(a, env),
    }
}

fn domain(t: Ty, int: (i64, i64), k: i64) -> Vec<V> {
    match t {
        Ty::Int => (int.0..=int.1).map(V::I).collect(),
        Ty::Elem => (0..k).map(V::I).collect(),
        Ty::Set => all_subsets(&(0..k).collect::<Vec<_>>())
            .into_iter()
            .map(V::S)
            .collect(),
    }
}

/// Truth-table search for an assignment with all hypotheses true and the
/// goal false.
fn oracle_counterexample(
    tys: &[Ty],
    hyps: &[P],
    goal: &P,
    int: (i64, i64),
    k: i64,
) -> Option<Vec<V>> {
    fn go(i: usize, env: &mut Vec<V>, doms: &[Vec<V>], hyps: &[P], goal: &P) -> Option<Vec<V>> {
        if i == doms.len() {
            return (hyps.iter().all(|h| eval_p(h, env)) && !eval_p(goal, env))
                .then(|| env.clone());
        }
        for v in &doms[i] {
            env.push(v.clone());
            if let Some(w) = go(i + 1, env, doms, hyps, goal) {
                return Some(w);
            }
            env.pop();
        }
        None
    }
    let doms: Vec<Vec<V>> = tys.iter().map(|t| domain(*t, int, k)).collect();
    go(0, &mut Vec::new(), &doms, hyps, goal)
}

fn to_v(v: &Value) -> V {
    match v {
        Value::Int(n) => V::I(*n),
        Value::Set(s) => V::S(
            s.iter()
                .map(|x| x.as_int().expect("carrier element"))
                .collect(),
        ),
        other => panic!("unexpected {other}"),
    }
}

fn counterexample_soundness() -> Check {
    const N: usize = 1000;
    let int = (-1, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut valid, mut refuted) = (0, 0);
    for case in 0..N {
        let k = rng.gen_range(2..=3);
        let count = rng.gen_range(1..=3);
        let tys: Vec<Ty> = (0..count)
            .map(|_| [Ty::Int, Ty::Elem, Ty::Set][rng.gen_range(0..3)])
            .collect();
        let nh = rng.gen_range(0..=3);
        let mut fz = Fuzz {
            rng: &mut rng,
            tys: &tys,
            int_lo: int.0,
            int_hi: int.1,
        };
        let hyps: Vec<P> = (0..nh).map(|_| fz.pred(2, true)).collect();
        let goal = fz.pred(2, false);
        let types: Vec<Type> = tys
            .iter()
            .map(|t| match t {
                Ty::Int => Type::Int,
                Ty::Elem => Type::Carrier("D".into()),
                Ty::Set => Type::set(Type::Carrier("D".into())),
            })
            .collect();
        let env = (0..count)
            .map(|i| (format!("x{i}"), types[i].clone()))
            .collect();
        let formula = |p: &P| -> Result<Formula, String> {
            let mut f = parse_formula(&show_p(p))
                .map_err(|e| format!("case {case}: {} in {}", e.message, show_p(p)))?;
            annotate(&mut f, &env).map_err(|e| format!("case {case}: {e} in {}", show_p(p)))?;
            Ok(f)
        };
        let seq = Sequent {
            name: format!("fuzz{case}/THM"),
            family: Family::Thm,
            hyps: hyps
                .iter()
                .enumerate()
                .map(|(i, h)| {
                    Ok(Hyp {
                        label: format!("h{i}"),
                        formula: formula(h)?,
                    })
                })
                .collect::<Result<_, String>>()?,
            goal: formula(&goal)?,
            symbols: (0..count)
                .map(|i| (format!("x{i}"), types[i].clone()))
                .collect(),
        };
        let mut bounds = Bounds::default();
        bounds.grounding.carriers.insert("D".into(), k);
        bounds.grounding.int_range = Some(int);
        let verdict = check_sequent_finite(&seq, &bounds)
            .map_err(|e| format!("case {case}: {e}"))?
            .verdict;
        let oracle = oracle_counterexample(&tys, &hyps, &goal, int, k);
        let describe = || {
            format!(
                "case {case}: {} |- {}",
                hyps.iter().map(show_p).collect::<Vec<_>>().join(", "),
                show_p(&goal)
            )
        };
        match verdict {
            Verdict::Valid if oracle.is_none() => valid += 1,
            Verdict::Valid => return Err(format!("{}: Valid but oracle refutes", describe())),
            Verdict::Counterexample(xs) => {
                let mut env = vec![V::I(0); count];
                for (name, v) in &xs {
                    let i: usize = name[1..].parse().unwrap();
                    env[i] = to_v(v);
                }
                if xs.len() != count || !hyps.iter().all(|h| eval_p(h, &env)) || eval_p(&goal, &env)
                {
                    return Err(format!("{}: unsound counterexample {xs:?}", describe()));
                }
                refuted += 1;
            }
            Verdict::Unbounded(s) => return Err(format!("{}: unbounded {s}", describe())),
        }
    }
    Ok(format!("{N} sequents: {refuted} counterexamples re-evaluate, {valid} Valid agree with the truth table"))
}
