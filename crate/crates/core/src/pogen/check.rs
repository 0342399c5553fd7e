//! Exhaustive evaluation of a sequent over grounded symbol domains.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::mathkit::{MathError, Value};
use crate::model::{Formula, Type};
use crate::translate::compile::{pattern, Pattern};
use crate::translate::{
    compile, compile_plan, BinderPlan, Code, CompileError, EvalError, Frame, Grounding, Scope,
};

use super::Sequent;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub grounding: Grounding,
    /// Upper limit on complete assignments visited.
    pub max_states: u64,
}

impl Default for Bounds {
    fn default() -> Self {
        let mut grounding = Grounding {
            default_carrier: 3,
            ..Grounding::default()
        };
        grounding.int_range = Some((-1, 4));
        Bounds {
            grounding,
            max_states: 5_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    /// Values of the free symbols, in sequent order.
    Counterexample(Vec<(String, Value)>),
    /// A symbol or binder of this type has no finite domain.
    Unbounded(String),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Valid => f.write_str("Valid"),
            Verdict::Counterexample(xs) => {
                let parts: Vec<String> = xs.iter().map(|(n, v)| format!("{n}={v}")).collect();
                write!(f, "Counterexample({})", parts.join(", "))
            }
            Verdict::Unbounded(s) => write!(f, "Unbounded({s})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub verdict: Verdict,
    /// Complete assignments evaluated.
    pub states: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("domain of `{symbol}` is too large: {source}")]
    BoundExceeded {
        symbol: String,
        #[source]
        source: MathError,
    },
    #[error("more than {0} assignments")]
    StateLimit(u64),
    #[error("{0}")]
    Unsupported(#[from] CompileError),
}

fn weight(t: &Type) -> u32 {
    match t {
        Type::Int | Type::Bool | Type::Carrier(_) => 1,
        Type::Pair(a, b) => weight(a) + weight(b),
        Type::Set(e) => 8 * weight(e),
    }
}

fn is_carrier(name: &str, ty: &Type) -> bool {
    matches!(ty, Type::Set(e) if matches!(&**e, Type::Carrier(c) if c == name))
}

/// Orders symbols so that each one whose domain a hypothesis gives comes
/// after the symbols that domain mentions. When nothing is ready the
/// symbol with the simplest type goes next.
fn order_symbols(
    free: &[String],
    types: &HashMap<&String, &Type>,
    conj: &[&Formula],
    fixed: &BTreeSet<String>,
) -> Vec<String> {
    let mut done: Vec<String> = Vec::new();
    let mut rest: Vec<String> = free.to_vec();
    while !rest.is_empty() {
        let ready = |x: &String| {
            conj.iter().any(|c| match pattern(c, x, true) {
                Some(Pattern::In(r) | Pattern::Subset(r) | Pattern::Equal(r)) => r
                    .free_vars()
                    .iter()
                    .all(|v| fixed.contains(v) || done.contains(v) || !free.contains(v)),
                None => false,
            })
        };
        let pick = rest.iter().position(ready).unwrap_or_else(|| {
            (0..rest.len())
                .min_by_key(|&k| weight(&types[&rest[k]]))
                .expect("nonempty")
        });
        done.push(rest.remove(pick));
    }
    done
}

enum Fault {
    Unbounded(String),
    Check(CheckError),
}

fn classify(e: EvalError, symbol: &str) -> Option<Fault> {
    match e {
        EvalError::Unbounded(t) => Some(Fault::Unbounded(t)),
        EvalError::Math(m @ MathError::BoundExceeded { .. }) => {
            Some(Fault::Check(CheckError::BoundExceeded {
                symbol: symbol.to_string(),
                source: m,
            }))
        }
        _ => None,
    }
}

struct Search<'a> {
    plan: &'a BinderPlan,
    leaf_hyps: &'a [Code],
    goal: &'a Code,
    g: &'a Grounding,
    max: u64,
    states: u64,
    witness: Option<Frame>,
}

impl Search<'_> {
    /// Returns `false` once a counterexample is found.
    fn level(&mut self, i: usize, fr: &mut Frame) -> Result<bool, Fault> {
        if i == self.plan.levels.len() {
            self.states += 1;
            if self.states > self.max {
                return Err(Fault::Check(CheckError::StateLimit(self.max)));
            }
            for h in self.leaf_hyps {
                match h.eval_bool(fr, self.g) {
                    Ok(true) => {}
                    Ok(false) => return Ok(true),
                    Err(e) => return classify(e, "hypothesis").map_or(Ok(true), Err),
                }
            }
            let refuted = match self.goal.eval_bool(fr, self.g) {
                Ok(holds) => !holds,
                Err(e) => match classify(e, "goal") {
                    Some(fault) => return Err(fault),
                    None => true,
                },
            };
            if refuted {
                self.witness = Some(fr.clone());
            }
            return Ok(!refuted);
        }
        let level = &self.plan.levels[i];
        let dom = match self.plan.domain_values(i, fr, self.g) {
            Ok(d) => d,
            Err(EvalError::Unbounded(_)) => return Err(Fault::Unbounded(level.name.clone())),
            Err(e) => return classify(e, &level.name).map_or(Ok(true), Err),
        };
        'values: for v in dom {
            fr[level.slot] = v;
            for f in &level.filters {
                match f.eval_bool(fr, self.g) {
                    Ok(true) => {}
                    Ok(false) => continue 'values,
                    Err(e) => match classify(e, &level.name) {
                        Some(fault) => return Err(fault),
                        None => continue 'values,
                    },
                }
            }
            if !self.level(i + 1, fr)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Valid iff every grounded assignment that satisfies all hypotheses
/// satisfies the goal. A hypothesis that cannot be evaluated excludes the
/// assignment; a goal that cannot be evaluated refutes it.
pub fn check_sequent_finite(seq: &Sequent, bounds: &Bounds) -> Result<CheckResult, CheckError> {
    let start = Instant::now();
    let g = &bounds.grounding;
    let mut sc = Scope::new();
    sc.int_grounding = true;
    sc.declared = seq.symbols.iter().cloned().collect();
    let mut fr: Frame = Vec::new();
    let mut fixed = BTreeSet::new();
    let mut free = Vec::new();
    for (name, ty) in &seq.symbols {
        if is_carrier(name, ty) {
            sc.declare(name);
            fr.push(Value::Set(g.carrier_set(name)));
            fixed.insert(name.clone());
        } else {
            free.push(name.clone());
        }
    }
    let conj: Vec<&Formula> = seq
        .hyps
        .iter()
        .flat_map(|h| h.formula.conjuncts())
        .collect();
    let hints: Vec<&Formula> = seq
        .hyps
        .iter()
        .map(|h| &h.formula)
        .chain([&seq.goal])
        .collect();
    let types: HashMap<&String, &Type> = seq.symbols.iter().map(|(n, t)| (n, t)).collect();
    let order = order_symbols(&free, &types, &conj, &fixed);
    let plan = compile_plan(&order, &conj, &hints, &mut sc)?;
    let goal = compile(&seq.goal, &mut sc)?;
    let leaf_hyps = if plan.levels.is_empty() {
        conj.iter()
            .map(|c| compile(c, &mut sc))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        Vec::new()
    };
    fr.resize(sc.size, Value::Int(0));
    let mut search = Search {
        plan: &plan,
        leaf_hyps: &leaf_hyps,
        goal: &goal,
        g,
        max: bounds.max_states,
        states: 0,
        witness: None,
    };
    let verdict = match search.level(0, &mut fr) {
        Err(Fault::Check(e)) => return Err(e),
        Err(Fault::Unbounded(t)) => Verdict::Unbounded(t),
        Ok(_) => match search.witness.take() {
            None => Verdict::Valid,
            Some(w) => {
                let slot_of = |n: &str| plan.levels.iter().find(|l| l.name == n).map(|l| l.slot);
                Verdict::Counterexample(
                    free.iter()
                        .filter_map(|n| slot_of(n).map(|s| (n.clone(), w[s].clone())))
                        .collect(),
                )
            }
        },
    };
    Ok(CheckResult {
        verdict,
        states: search.states,
        elapsed: start.elapsed(),
    })
}
