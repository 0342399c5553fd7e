//! Execution of machine programs: constant binding, initialisation, the
//! sequential and interleaving schedulers, and runtime checking.

pub mod trace;

use std::collections::BTreeMap;
use std::fmt::Write;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::mathkit::Value;
use crate::model::Formula;
use crate::parser::parse_formula;
use crate::translate::{
    compile, compile_plan, Code, Domain, EvalError, EventProgram, Frame, Grounding, MachineProgram,
    Mode, Scope, StatusPost, Step,
};
pub use trace::{Fnv, Termination, Trace, TraceEntry};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamSearch {
    Exhaustive,
    /// Up to `k` random candidates per event and step.
    Sampled(usize),
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub mode: Mode,
    pub seed: u64,
    pub step_limit: usize,
    pub check_invariants: bool,
    pub param_search: ParamSearch,
    pub grounding: Grounding,
    /// Failed sampling rounds before a sampled run declares deadlock.
    pub sampling_rounds: usize,
    /// `name = expr` constant bindings, in file order.
    pub bindings: Vec<(String, Formula)>,
    /// Search for values of unbound constants that satisfy the axioms.
    pub solve_constants: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            mode: Mode::Interleaving,
            seed: 0,
            step_limit: 1000,
            check_invariants: true,
            param_search: ParamSearch::Exhaustive,
            grounding: Grounding::default(),
            sampling_rounds: 1000,
            bindings: Vec::new(),
            solve_constants: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("axiom `{0}` does not hold")]
    AxiomViolation(String),
    #[error("invariant `{0}` does not hold after initialisation")]
    InvariantViolationAtInit(String),
    #[error("invariant `{label}` violated by event `{event}`")]
    InvariantViolation { label: String, event: String },
    #[error("event `{event}` breaks the variant ({before} -> {after})")]
    VariantViolation {
        event: String,
        before: String,
        after: String,
    },
    #[error("parameter `{param}` of `{event}` has no finite domain; give an integer range")]
    UnboundedParameterDomain { event: String, param: String },
    #[error("constant `{0}` is not bound")]
    UnboundConstant(String),
    #[error("binding `{name}`: {message}")]
    Binding { name: String, message: String },
    #[error("unknown event `{0}`")]
    UnknownEvent(String),
    #[error("{context}: {source}")]
    Eval {
        context: String,
        #[source]
        source: EvalError,
    },
}

fn in_ctx(context: impl Into<String>) -> impl FnOnce(EvalError) -> SimError {
    let context = context.into();
    move |source| SimError::Eval { context, source }
}

/// Reads `name = expr` lines. Blank lines and `#` comments are skipped.
pub fn parse_bindings(text: &str) -> Result<Vec<(String, Formula)>, SimError> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (name, expr) = line.split_once('=').ok_or_else(|| SimError::Binding {
            name: line.to_string(),
            message: "expected `name = expr`".into(),
        })?;
        let name = name.trim().to_string();
        let f = parse_formula(expr.trim()).map_err(|e| SimError::Binding {
            name: name.clone(),
            message: e.message,
        })?;
        out.push((name, f));
    }
    Ok(out)
}

/// Machine state: the whole slot frame plus the step counter. Only the
/// carrier, constant and variable slots are meaningful between steps.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub frame: Frame,
    pub steps: usize,
}

impl State {
    pub fn value(&self, p: &MachineProgram, name: &str) -> Option<&Value> {
        p.carriers
            .iter()
            .chain(&p.constants)
            .chain(&p.variables)
            .find(|s| s.name == name)
            .map(|s| &self.frame[s.slot])
    }

    pub fn variables(&self, p: &MachineProgram) -> BTreeMap<String, Value> {
        p.variables
            .iter()
            .map(|s| (s.name.clone(), self.frame[s.slot].clone()))
            .collect()
    }

    pub fn constants(&self, p: &MachineProgram) -> BTreeMap<String, Value> {
        p.constants
            .iter()
            .map(|s| (s.name.clone(), self.frame[s.slot].clone()))
            .collect()
    }

    /// `v1=.., v2=..` in declaration order.
    pub fn render(&self, p: &MachineProgram) -> String {
        let parts: Vec<String> = p
            .variables
            .iter()
            .map(|s| format!("{}={}", s.name, self.frame[s.slot]))
            .collect();
        parts.join(", ")
    }

    /// Stable hash of the variables' canonical rendering.
    pub fn hash(&self, p: &MachineProgram) -> u64 {
        let mut h = Fnv::default();
        for s in &p.variables {
            let _ = write!(h, "{}={};", s.name, self.frame[s.slot]);
        }
        h.0
    }

    fn same_variables(&self, other: &Frame, p: &MachineProgram) -> bool {
        p.variables
            .iter()
            .all(|s| self.frame[s.slot] == other[s.slot])
    }
}

fn symbol_scope(p: &MachineProgram) -> Scope {
    let mut sc = Scope::new();
    for s in p.carriers.iter().chain(&p.constants).chain(&p.variables) {
        sc.alias(&s.name, s.slot);
    }
    sc.size = p.frame_size;
    sc
}

/// A frame with carriers grounded and constants bound from the config.
pub fn constants_frame(p: &MachineProgram, cfg: &SimConfig) -> Result<Frame, SimError> {
    let g = &cfg.grounding;
    let mut fr = p.blank_frame(g);
    let mut sc = symbol_scope(p);
    let mut bound = Vec::new();
    for (name, f) in &cfg.bindings {
        let slot = p
            .constants
            .iter()
            .find(|c| &c.name == name)
            .map(|c| c.slot)
            .ok_or_else(|| SimError::Binding {
                name: name.clone(),
                message: "not a constant of this machine".into(),
            })?;
        let code = compile(f, &mut sc).map_err(|e| SimError::Binding {
            name: name.clone(),
            message: e.to_string(),
        })?;
        fr.resize(fr.len().max(sc.size), Value::Int(0));
        fr[slot] = code.eval(&mut fr, g).map_err(|source| SimError::Eval {
            context: format!("binding `{name}`"),
            source,
        })?;
        bound.push(name.clone());
    }
    let unbound: Vec<String> = p
        .constants
        .iter()
        .filter(|c| !bound.contains(&c.name))
        .map(|c| c.name.clone())
        .collect();
    if unbound.is_empty() {
        return Ok(fr);
    }
    if !cfg.solve_constants {
        return Err(SimError::UnboundConstant(unbound[0].clone()));
    }
    solve_constants(p, g, &unbound, fr, &mut sc)
}

fn solve_constants(
    p: &MachineProgram,
    g: &Grounding,
    unbound: &[String],
    mut fr: Frame,
    sc: &mut Scope,
) -> Result<Frame, SimError> {
    let axioms: Vec<&Formula> = p
        .axioms
        .iter()
        .filter(|a| !a.theorem && a.code.is_some())
        .map(|a| &a.formula)
        .collect();
    let conj: Vec<&Formula> = axioms.iter().flat_map(|a| a.conjuncts()).collect();
    sc.int_grounding = true;
    let plan = compile_plan(unbound, &conj, &axioms, sc).map_err(|e| SimError::Binding {
        name: unbound.join(", "),
        message: e.to_string(),
    })?;
    fr.resize(fr.len().max(sc.size), Value::Int(0));
    let mut found: Option<Vec<Value>> = None;
    plan.for_each(&mut fr, g, &mut |fr| {
        for a in &p.axioms {
            if let (false, Some(c)) = (a.theorem, &a.code) {
                if !c.eval_bool(fr, g)? {
                    return Ok(true);
                }
            }
        }
        found = Some(plan.levels.iter().map(|l| fr[l.slot].clone()).collect());
        Ok(false)
    })
    .map_err(|e| match e {
        EvalError::Unbounded(_) => SimError::Binding {
            name: unbound.join(", "),
            message: "integer constants need an integer range to be solved".into(),
        },
        e => in_ctx("solving constants")(e),
    })?;
    let vals = found.ok_or_else(|| SimError::Binding {
        name: unbound.join(", "),
        message: "no values satisfy the axioms".into(),
    })?;
    for (name, v) in unbound.iter().zip(vals) {
        let slot = p
            .constants
            .iter()
            .find(|c| &c.name == name)
            .expect("constant")
            .slot;
        fr[slot] = v;
    }
    fr.truncate(p.frame_size.max(sc.size));
    Ok(fr)
}

/// Random source for non-deterministic actions, independent of the
/// scheduler's choices so that traces replay.
pub fn action_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15)
}

fn check_axioms(p: &MachineProgram, fr: &mut Frame, g: &Grounding) -> Result<(), SimError> {
    for a in &p.axioms {
        if let Some(c) = &a.code {
            if !c.eval_bool(fr, g).map_err(|source| SimError::Eval {
                context: format!("axiom `{}`", a.label),
                source,
            })? {
                return Err(SimError::AxiomViolation(a.label.clone()));
            }
        }
    }
    Ok(())
}

/// First invariant that fails in `fr`, if any.
fn failing_invariant(
    p: &MachineProgram,
    fr: &mut Frame,
    g: &Grounding,
) -> Result<Option<String>, EvalError> {
    for i in &p.invariants {
        if let Some(c) = &i.code {
            if !c.eval_bool(fr, g)? {
                return Ok(Some(i.label.clone()));
            }
        }
    }
    Ok(None)
}

/// Checks the axioms over `fr`, runs the initialisation and checks the
/// invariants.
pub fn start(
    p: &MachineProgram,
    cfg: &SimConfig,
    mut fr: Frame,
    rng: &mut impl Rng,
) -> Result<State, SimError> {
    let g = &cfg.grounding;
    fr.resize(fr.len().max(p.frame_size), Value::Int(0));
    check_axioms(p, &mut fr, g)?;
    p.init
        .execute(&mut fr, g, rng)
        .map_err(in_ctx("initialisation"))?;
    if cfg.check_invariants {
        if let Some(l) = failing_invariant(p, &mut fr, g).map_err(in_ctx("initialisation"))? {
            return Err(SimError::InvariantViolationAtInit(l));
        }
    }
    Ok(State {
        frame: fr,
        steps: 0,
    })
}

pub fn init_state(p: &MachineProgram, cfg: &SimConfig) -> Result<State, SimError> {
    let fr = constants_frame(p, cfg)?;
    start(p, cfg, fr, &mut action_rng(cfg.seed))
}

fn variant_value(
    p: &MachineProgram,
    fr: &mut Frame,
    g: &Grounding,
    ev: &str,
) -> Result<Option<Value>, SimError> {
    match &p.variant {
        None => Ok(None),
        Some(v) => v.eval(fr, g).map(Some).map_err(|source| SimError::Eval {
            context: format!("variant in `{ev}`"),
            source,
        }),
    }
}

fn enabled(
    e: &EventProgram,
    p: &MachineProgram,
    fr: &mut Frame,
    g: &Grounding,
) -> Result<bool, EvalError> {
    if !e.guard.eval_bool(fr, g)? {
        return Ok(false);
    }
    match (&p.variant, e.status_guard) {
        (Some(v), true) => Ok(v.eval_int(fr, g)? >= 0),
        _ => Ok(true),
    }
}

fn unbounded_param(e: &EventProgram) -> SimError {
    let param = e
        .param_plan
        .levels
        .iter()
        .find(|l| matches!(&l.domain, Domain::Type(t) if t.mentions_int()))
        .or(e.param_plan.levels.first())
        .map(|l| l.name.clone())
        .unwrap_or_default();
    SimError::UnboundedParameterDomain {
        event: e.name.clone(),
        param,
    }
}

fn param_error(e: &EventProgram) -> impl FnOnce(EvalError) -> SimError + '_ {
    move |err| match err {
        EvalError::Unbounded(_) => unbounded_param(e),
        err => in_ctx(format!("guard of `{}`", e.name))(err),
    }
}

fn event_index(p: &MachineProgram, name: &str) -> Result<usize, SimError> {
    p.events
        .iter()
        .position(|e| e.name == name)
        .ok_or_else(|| SimError::UnknownEvent(name.to_string()))
}

fn exhaustive(
    e: &EventProgram,
    p: &MachineProgram,
    st: &mut State,
    g: &Grounding,
) -> Result<Vec<Vec<Value>>, SimError> {
    let mut out = Vec::new();
    e.param_plan
        .for_each(&mut st.frame, g, &mut |fr| {
            if enabled(e, p, fr, g)? {
                out.push(e.params.iter().map(|s| fr[s.slot].clone()).collect());
            }
            Ok(true)
        })
        .map_err(param_error(e))?;
    Ok(out)
}

fn sampled(
    e: &EventProgram,
    p: &MachineProgram,
    st: &mut State,
    g: &Grounding,
    k: usize,
    rng: &mut dyn RngCore,
) -> Result<Vec<Vec<Value>>, SimError> {
    let plan = &e.param_plan;
    let mut out: Vec<Vec<Value>> = Vec::new();
    let fr = &mut st.frame;
    let attempt =
        |fr: &mut Frame, rng: &mut dyn RngCore| -> Result<Option<Vec<Value>>, EvalError> {
            for i in 0..plan.levels.len() {
                let dom = plan.domain_values(i, fr, g)?;
                if dom.is_empty() {
                    return Ok(None);
                }
                fr[plan.levels[i].slot] = dom[rng.gen_range(0..dom.len())].clone();
                if !plan.filters_hold(i, fr, g)? {
                    return Ok(None);
                }
            }
            if !enabled(e, p, fr, g)? {
                return Ok(None);
            }
            Ok(Some(e.params.iter().map(|s| fr[s.slot].clone()).collect()))
        };
    for _ in 0..k.max(1) {
        if let Some(c) = attempt(fr, rng).map_err(param_error(e))? {
            if !out.contains(&c) {
                out.push(c);
            }
        }
    }
    Ok(out)
}

/// Parameter values under which `event` is enabled. Exhaustive search
/// yields them in canonical order.
pub fn solve_params(
    p: &MachineProgram,
    event: &str,
    st: &mut State,
    cfg: &SimConfig,
    rng: &mut impl Rng,
) -> Result<Vec<Vec<Value>>, SimError> {
    let e = &p.events[event_index(p, event)?];
    match cfg.param_search {
        ParamSearch::Exhaustive => exhaustive(e, p, st, &cfg.grounding),
        ParamSearch::Sampled(k) => sampled(e, p, st, &cfg.grounding, k, rng),
    }
}

/// What one call to [`fire`] did.
#[derive(Clone, Debug, PartialEq)]
pub struct Firing {
    pub fired: bool,
    pub variant_before: Option<Value>,
    pub variant_after: Option<Value>,
}

fn decreases(post: StatusPost, before: &Value, after: &Value) -> bool {
    match (post, before, after) {
        (StatusPost::None, ..) => true,
        (StatusPost::StrictDecrease, Value::Int(a), Value::Int(b)) => b < a,
        (StatusPost::NonIncrease, Value::Int(a), Value::Int(b)) => b <= a,
        (StatusPost::StrictDecrease, Value::Set(a), Value::Set(b)) => {
            b.len() < a.len() && b.iter().all(|x| a.contains(x))
        }
        (StatusPost::NonIncrease, Value::Set(a), Value::Set(b)) => b.iter().all(|x| a.contains(x)),
        _ => false,
    }
}

/// Runs `event` with `params` if its guard holds; otherwise leaves the
/// state unchanged. Checks the variant and, if configured, the invariants.
pub fn fire(
    p: &MachineProgram,
    event: &str,
    params: &[Value],
    st: &mut State,
    cfg: &SimConfig,
    rng: &mut impl Rng,
) -> Result<Firing, SimError> {
    let e = &p.events[event_index(p, event)?];
    let g = &cfg.grounding;
    for (s, v) in e.params.iter().zip(params) {
        st.frame[s.slot] = v.clone();
    }
    let not_fired = Firing {
        fired: false,
        variant_before: None,
        variant_after: None,
    };
    if !enabled(e, p, &mut st.frame, g).map_err(param_error(e))? {
        return Ok(not_fired);
    }
    let before = variant_value(p, &mut st.frame, g, &e.name)?;
    e.action
        .execute(&mut st.frame, g, rng)
        .map_err(|source| SimError::Eval {
            context: format!("event `{}`", e.name),
            source,
        })?;
    let after = variant_value(p, &mut st.frame, g, &e.name)?;
    st.steps += 1;
    if let (Some(a), Some(b)) = (&before, &after) {
        if !decreases(e.status_post, a, b) {
            return Err(SimError::VariantViolation {
                event: e.name.clone(),
                before: a.to_string(),
                after: b.to_string(),
            });
        }
    }
    if cfg.check_invariants {
        if let Some(label) =
            failing_invariant(p, &mut st.frame, g).map_err(|source| SimError::Eval {
                context: format!("invariants after `{}`", e.name),
                source,
            })?
        {
            return Err(SimError::InvariantViolation {
                label,
                event: e.name.clone(),
            });
        }
    }
    Ok(Firing {
        fired: true,
        variant_before: before,
        variant_after: after,
    })
}

/// Result of a run; `error` is set when it stopped on a violation.
#[derive(Clone, Debug)]
pub struct Run {
    pub trace: Trace,
    pub state: Option<State>,
    pub error: Option<SimError>,
}

fn has_choice(e: &EventProgram) -> bool {
    e.action
        .steps
        .iter()
        .any(|s| matches!(s, Step::Solve { .. }))
}

/// Enabled `(event index, params)` pairs for the current step.
fn candidates(
    p: &MachineProgram,
    st: &mut State,
    cfg: &SimConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(usize, Vec<Value>)>, SimError> {
    let rounds = match cfg.param_search {
        ParamSearch::Sampled(_) => cfg.sampling_rounds.max(1),
        ParamSearch::Exhaustive => 1,
    };
    for _ in 0..rounds {
        let mut out = Vec::new();
        for (i, e) in p.events.iter().enumerate() {
            let sols = solve_params(p, &e.name, st, cfg, rng)?;
            if cfg.mode == Mode::Sequential {
                if let Some(first) = sols.into_iter().next() {
                    return Ok(vec![(i, first)]);
                }
            } else {
                out.extend(sols.into_iter().map(|s| (i, s)));
            }
        }
        if !out.is_empty() {
            return Ok(out);
        }
    }
    Ok(Vec::new())
}

/// Whether no enabled pair can change the state any more.
fn converged(
    p: &MachineProgram,
    st: &State,
    pairs: &[(usize, Vec<Value>)],
    cfg: &SimConfig,
) -> Result<bool, SimError> {
    for (i, params) in pairs {
        let e = &p.events[*i];
        if has_choice(e) {
            return Ok(false);
        }
        let mut probe = st.clone();
        let quiet = SimConfig {
            check_invariants: false,
            ..cfg.clone()
        };
        fire(p, &e.name, params, &mut probe, &quiet, &mut action_rng(0))?;
        if !probe.same_variables(&st.frame, p) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn hex(h: u64) -> String {
    format!("{h:016x}")
}

/// Runs from an initialised state until deadlock, convergence, the step
/// limit or a violation.
pub fn run_from(p: &MachineProgram, cfg: &SimConfig, mut st: State) -> Run {
    let mut sched = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut act = action_rng(cfg.seed);
    let mut trace = Trace::new(cfg.seed);
    let mut pre = st.hash(p);
    let outcome = loop {
        if trace.entries.len() >= cfg.step_limit {
            break Ok(Termination::StepLimit);
        }
        let pairs = match candidates(p, &mut st, cfg, &mut sched) {
            Ok(ps) => ps,
            Err(e) => break Err(e),
        };
        if pairs.is_empty() {
            break Ok(Termination::Deadlock);
        }
        let pick = if cfg.mode == Mode::Sequential || pairs.len() == 1 {
            0
        } else {
            sched.gen_range(0..pairs.len())
        };
        let (ei, params) = &pairs[pick];
        let e = &p.events[*ei];
        let pre_frame = st.frame.clone();
        let fired = match fire(p, &e.name, params, &mut st, cfg, &mut act) {
            Ok(f) => f,
            Err(err) => break Err(err),
        };
        trace.entries.push(TraceEntry {
            step: trace.entries.len() + 1,
            event: e.name.clone(),
            params: e
                .params
                .iter()
                .zip(params)
                .map(|(s, v)| (s.name.clone(), v.to_string()))
                .collect(),
            pre_hash: hex(std::mem::replace(&mut pre, st.hash(p))),
            post_hash: hex(pre),
            variant_before: fired.variant_before.map(|v| v.to_string()),
            variant_after: fired.variant_after.map(|v| v.to_string()),
        });
        if st.same_variables(&pre_frame, p) {
            let done = if cfg.mode == Mode::Sequential {
                Ok(!has_choice(e))
            } else {
                converged(p, &st, &pairs, cfg)
            };
            match done {
                Ok(true) => break Ok(Termination::Converged),
                Ok(false) => {}
                Err(err) => break Err(err),
            }
        }
    };
    match outcome {
        Ok(t) => {
            trace.termination = Some(t);
            Run {
                trace,
                state: Some(st),
                error: None,
            }
        }
        Err(err) => {
            trace.termination = Some(Termination::Error(err.to_string()));
            Run {
                trace,
                state: Some(st),
                error: Some(err),
            }
        }
    }
}

/// Binds constants, initialises and runs.
pub fn run(p: &MachineProgram, cfg: &SimConfig) -> Run {
    match init_state(p, cfg) {
        Ok(st) => run_from(p, cfg, st),
        Err(err) => {
            let mut trace = Trace::new(cfg.seed);
            trace.termination = Some(Termination::Error(err.to_string()));
            Run {
                trace,
                state: None,
                error: Some(err),
            }
        }
    }
}

/// Re-fires the trace's events from a fresh initial state.
pub fn replay(p: &MachineProgram, cfg: &SimConfig, trace: &Trace) -> Result<State, SimError> {
    let mut st = init_state(p, cfg)?;
    let mut act = action_rng(cfg.seed);
    let mut sc = symbol_scope(p);
    for entry in &trace.entries {
        let mut params = Vec::new();
        for (name, text) in &entry.params {
            let bad = |message: String| SimError::Binding {
                name: name.clone(),
                message,
            };
            let f = parse_formula(text).map_err(|e| bad(e.message))?;
            let code: Code = compile(&f, &mut sc).map_err(|e| bad(e.to_string()))?;
            let mut scratch = st.frame.clone();
            scratch.resize(scratch.len().max(sc.size), Value::Int(0));
            params.push(
                code.eval(&mut scratch, &cfg.grounding)
                    .map_err(in_ctx("replay"))?,
            );
        }
        fire(p, &entry.event, &params, &mut st, cfg, &mut act)?;
    }
    Ok(st)
}
