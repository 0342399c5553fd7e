//! Executable form of a flattened machine, and its contract rendering.
//!
//! Every symbol lives in a numbered slot of a [`Frame`]: carriers first,
//! then constants, variables, and finally the slots that events allocate
//! for parameters, snapshots and quantifier binders.

pub mod code;
pub mod compile;
pub mod contracts;
pub mod ground;
pub mod plan;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::mathkit::{MathError, Value};
use crate::model::{frame, EventStatus, FlatEvent, FlatMachine, Formula, Labeled, Type, TypeEnv};
use crate::typecheck::{annotate, TypedProject};

pub use code::{BinderPlan, Code, Domain, Frame, Level, SetCode};
pub use compile::{compile, compile_plan, CompileError, Scope};
pub use contracts::{
    build_contracts, emit_contracts, parse_contracts, Clause, ContractDoc, EventSpec, SpecCase,
};
pub use ground::Grounding;
pub use plan::{lower_actions, ActionPlan, Step};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Math(#[from] MathError),
    #[error("no finite range for a value of type {0}; set an integer range")]
    Unbounded(String),
    #[error("expected {expected}, found {found}")]
    Type {
        expected: &'static str,
        found: String,
    },
    #[error("action `{0}` has no admissible after-state")]
    Infeasible(String),
}

#[derive(Debug, Error)]
pub enum TranslateError {
    #[error("unknown machine `{0}`")]
    UnknownMachine(String),
    #[error("machine `{0}` has no initialisation")]
    MissingInit(String),
    #[error("event `{event}`: {source}")]
    Unsupported {
        event: String,
        #[source]
        source: CompileError,
    },
    #[error("variant: {0}")]
    Variant(CompileError),
    #[error("{0}")]
    Type(#[from] crate::typecheck::TypeError),
}

/// Firing policy of the simulator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    /// First enabled event in declaration order.
    Sequential,
    /// Uniform choice among enabled events and parameter values.
    #[default]
    Interleaving,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StatusPost {
    None,
    /// Convergent: the variant strictly decreases.
    StrictDecrease,
    /// Anticipated: the variant does not increase.
    NonIncrease,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Symbol {
    pub name: String,
    pub ty: Type,
    pub slot: usize,
}

/// An axiom or invariant. `code` is absent for formulas outside the
/// executable subset; those remain in the contracts only.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub label: String,
    pub theorem: bool,
    pub formula: Formula,
    pub code: Option<Code>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EventProgram {
    pub name: String,
    pub status: EventStatus,
    pub params: Vec<Symbol>,
    /// Enumerates parameter values; its filters include the whole guard
    /// once every parameter is bound.
    pub param_plan: BinderPlan,
    pub guard: Code,
    pub action: ActionPlan,
    pub frame: BTreeSet<String>,
    /// Enabledness also requires a non-negative variant.
    pub status_guard: bool,
    pub status_post: StatusPost,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MachineProgram {
    pub name: String,
    pub mode: Mode,
    pub carriers: Vec<Symbol>,
    pub constants: Vec<Symbol>,
    pub variables: Vec<Symbol>,
    pub axioms: Vec<Check>,
    pub invariants: Vec<Check>,
    pub init: ActionPlan,
    pub events: Vec<EventProgram>,
    pub variant: Option<Code>,
    pub variant_is_set: bool,
    pub contracts: ContractDoc,
    pub frame_size: usize,
}

impl MachineProgram {
    pub fn event(&self, name: &str) -> Option<&EventProgram> {
        self.events.iter().find(|e| e.name == name)
    }

    /// A frame with carriers filled in and every other slot zero.
    pub fn blank_frame(&self, g: &Grounding) -> Frame {
        let mut fr = vec![Value::Int(0); self.frame_size];
        for c in &self.carriers {
            fr[c.slot] = Value::Set(g.carrier_set(&c.name));
        }
        fr
    }
}

/// Slot layout and event summary, one item per line.
impl fmt::Display for MachineProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mode = match self.mode {
            Mode::Sequential => "sequential",
            Mode::Interleaving => "interleaving",
        };
        writeln!(
            f,
            "PROGRAM {} mode={mode} slots={}",
            self.name, self.frame_size
        )?;
        for (kind, syms) in [
            ("carrier", &self.carriers),
            ("constant", &self.constants),
            ("variable", &self.variables),
        ] {
            for s in syms {
                writeln!(f, "  {kind} {} : {} @{}", s.name, s.ty, s.slot)?;
            }
        }
        for (kind, checks) in [("axiom", &self.axioms), ("invariant", &self.invariants)] {
            for c in checks {
                let how = if c.code.is_some() {
                    "checked"
                } else {
                    "contract-only"
                };
                let thm = if c.theorem { " theorem" } else { "" };
                writeln!(f, "  {kind}{thm} {} {how}", c.label)?;
            }
        }
        if self.variant.is_some() {
            writeln!(
                f,
                "  variant {}",
                if self.variant_is_set {
                    "set"
                } else {
                    "integer"
                }
            )?;
        }
        for e in &self.events {
            let params: Vec<String> = e
                .params
                .iter()
                .map(|p| format!("{} : {}", p.name, p.ty))
                .collect();
            let frame: Vec<&str> = e.frame.iter().map(String::as_str).collect();
            writeln!(
                f,
                "  event {} {} any({}) writes({})",
                e.name,
                e.status.name(),
                params.join(", "),
                frame.join(", ")
            )?;
        }
        Ok(())
    }
}

fn typed(f: &Formula, env: &TypeEnv) -> Formula {
    let mut f = f.clone();
    if f.ty.is_none() {
        let _ = annotate(&mut f, env);
    }
    f
}

fn checks(items: &[Labeled], env: &TypeEnv, sc: &mut Scope) -> Vec<Check> {
    items
        .iter()
        .map(|l| {
            let formula = typed(&l.formula, env);
            Check {
                label: l.label.clone(),
                theorem: l.theorem,
                code: compile(&formula, sc).ok(),
                formula,
            }
        })
        .collect()
}

fn symbols(names: &[String], env: &TypeEnv, sc: &mut Scope) -> Vec<Symbol> {
    names
        .iter()
        .map(|n| Symbol {
            name: n.clone(),
            ty: env.get(n).cloned().unwrap_or(Type::Int),
            slot: sc.declare(n),
        })
        .collect()
}

fn translate_event(
    e: &FlatEvent,
    env: &TypeEnv,
    has_variant: bool,
    variant_is_set: bool,
    sc: &mut Scope,
) -> Result<EventProgram, CompileError> {
    let mark = sc.mark();
    let guards: Vec<Formula> = e.guards.iter().map(|g| typed(&g.formula, env)).collect();
    let conj: Vec<&Formula> = guards.iter().flat_map(|g| g.conjuncts()).collect();
    let hints: Vec<&Formula> = guards.iter().collect();
    let saved = sc.int_grounding;
    sc.int_grounding = true;
    let planned = compile_plan(&e.params, &conj, &hints, sc);
    sc.int_grounding = saved;
    let param_plan = planned?;
    let params = e
        .params
        .iter()
        .zip(&param_plan.levels)
        .map(|(p, l)| Symbol {
            name: p.clone(),
            ty: env.get(p).cloned().unwrap_or(Type::Int),
            slot: l.slot,
        })
        .collect();
    let guard = compile(&Formula::and_all(guards.iter().cloned()), sc)?;
    let mut actions = e.actions.clone();
    for a in &mut actions {
        for f in a.formulas_mut() {
            if f.ty.is_none() {
                let _ = annotate(f, env);
            }
        }
    }
    let action = lower_actions(&actions, sc)?;
    sc.restore(mark);
    let ranked = has_variant && e.status != EventStatus::Ordinary;
    Ok(EventProgram {
        name: e.name.clone(),
        status: e.status,
        params,
        param_plan,
        guard,
        action,
        frame: frame(&e.actions),
        status_guard: ranked && !variant_is_set,
        status_post: match e.status {
            _ if !ranked => StatusPost::None,
            EventStatus::Convergent => StatusPost::StrictDecrease,
            _ => StatusPost::NonIncrease,
        },
    })
}

/// Compiles a flattened machine. Guards and actions must be executable;
/// axioms and invariants that are not are kept for the contracts only.
pub fn translate_machine(
    typed_project: &TypedProject,
    flat: &FlatMachine,
    mode: Mode,
) -> Result<MachineProgram, TranslateError> {
    let mt = typed_project
        .machines
        .get(&flat.name)
        .ok_or_else(|| TranslateError::UnknownMachine(flat.name.clone()))?;
    let env = &mt.env;
    let mut sc = Scope::new();
    let carriers = symbols(&flat.sets, env, &mut sc);
    let constants = symbols(&flat.constants, env, &mut sc);
    let variables = symbols(&flat.variables, env, &mut sc);
    let axioms = checks(&flat.axioms, env, &mut sc);
    let invariants = checks(&flat.invariants, env, &mut sc);
    let (variant, variant_is_set) = match &flat.variant {
        None => (None, false),
        Some(v) => {
            let v = typed(v, env);
            let is_set = matches!(v.ty, Some(Type::Set(_)));
            let code = compile(&v, &mut sc).map_err(TranslateError::Variant)?;
            (Some(code), is_set)
        }
    };
    let init_ev = flat
        .initialisation()
        .ok_or_else(|| TranslateError::MissingInit(flat.name.clone()))?;
    let init = {
        let mut actions = init_ev.actions.clone();
        for a in &mut actions {
            for f in a.formulas_mut() {
                if f.ty.is_none() {
                    let _ = annotate(f, env);
                }
            }
        }
        lower_actions(&actions, &mut sc).map_err(|source| TranslateError::Unsupported {
            event: init_ev.name.clone(),
            source,
        })?
    };
    let mut events = Vec::new();
    for e in flat.events.iter().filter(|e| !e.is_initialisation()) {
        let penv = typed_project.event_env(&flat.name, Some(&e.name));
        let ep = translate_event(e, &penv, variant.is_some(), variant_is_set, &mut sc).map_err(
            |source| TranslateError::Unsupported {
                event: e.name.clone(),
                source,
            },
        )?;
        events.push(ep);
    }
    Ok(MachineProgram {
        name: flat.name.clone(),
        mode,
        carriers,
        constants,
        variables,
        axioms,
        invariants,
        init,
        events,
        variant,
        variant_is_set,
        contracts: build_contracts(flat, variant_is_set),
        frame_size: sc.size,
    })
}
