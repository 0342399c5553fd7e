//! Contexts, machines and events.

use std::collections::BTreeSet;

use super::ast::{Formula, Span};

/// A formula with its label, e.g. `@inv1 p : 1..n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Labeled {
    pub label: String,
    pub formula: Formula,
    /// Theorem items are derived facts: proven, not assumed.
    pub theorem: bool,
    pub span: Span,
}

impl Labeled {
    pub fn new(label: impl Into<String>, formula: Formula) -> Self {
        let span = formula.span.clone();
        Labeled {
            label: label.into(),
            formula,
            theorem: false,
            span,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Context {
    pub name: String,
    pub extends: Vec<String>,
    pub sets: Vec<String>,
    pub constants: Vec<String>,
    pub axioms: Vec<Labeled>,
    pub theorems: Vec<Labeled>,
    pub span: Span,
}

impl Context {
    pub fn new(name: impl Into<String>) -> Self {
        Context {
            name: name.into(),
            extends: vec![],
            sets: vec![],
            constants: vec![],
            axioms: vec![],
            theorems: vec![],
            span: Span::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum EventStatus {
    #[default]
    Ordinary,
    Convergent,
    Anticipated,
}

impl EventStatus {
    pub fn name(self) -> &'static str {
        match self {
            EventStatus::Ordinary => "ordinary",
            EventStatus::Convergent => "convergent",
            EventStatus::Anticipated => "anticipated",
        }
    }
}

/// Left-hand side of a deterministic assignment: `v` or `v(i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Lhs {
    pub name: String,
    pub index: Option<Formula>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ActionKind {
    /// `x, y := E, F`
    Deterministic { lhs: Vec<Lhs>, rhs: Vec<Formula> },
    /// `x, y :| BA(x, y, x', y')`
    NonDeterministic { targets: Vec<String>, pred: Formula },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Action {
    pub label: String,
    pub kind: ActionKind,
    pub span: Span,
}

impl Action {
    /// Variables assigned by this action.
    pub fn targets(&self) -> Vec<&str> {
        match &self.kind {
            ActionKind::Deterministic { lhs, .. } => lhs.iter().map(|l| l.name.as_str()).collect(),
            ActionKind::NonDeterministic { targets, .. } => {
                targets.iter().map(String::as_str).collect()
            }
        }
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self.kind, ActionKind::Deterministic { .. })
    }

    pub fn formulas(&self) -> Vec<&Formula> {
        match &self.kind {
            ActionKind::Deterministic { lhs, rhs } => lhs
                .iter()
                .filter_map(|l| l.index.as_ref())
                .chain(rhs.iter())
                .collect(),
            ActionKind::NonDeterministic { pred, .. } => vec![pred],
        }
    }

    pub fn formulas_mut(&mut self) -> Vec<&mut Formula> {
        match &mut self.kind {
            ActionKind::Deterministic { lhs, rhs } => lhs
                .iter_mut()
                .filter_map(|l| l.index.as_mut())
                .chain(rhs.iter_mut())
                .collect(),
            ActionKind::NonDeterministic { pred, .. } => vec![pred],
        }
    }
}

/// `with @x P`: the value of a disappearing parameter or (primed) variable.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub name: String,
    pub formula: Formula,
    pub span: Span,
}

pub const INITIALISATION: &str = "initialisation";

#[derive(Clone, Debug, PartialEq)]
pub struct Event {
    pub name: String,
    pub status: EventStatus,
    pub refines: Vec<String>,
    /// `extends` inherits the abstract parameters, guards and actions.
    pub extends: bool,
    pub params: Vec<String>,
    pub guards: Vec<Labeled>,
    pub witnesses: Vec<Witness>,
    pub actions: Vec<Action>,
    pub span: Span,
}

impl Event {
    pub fn new(name: impl Into<String>) -> Self {
        Event {
            name: name.into(),
            status: EventStatus::Ordinary,
            refines: vec![],
            extends: false,
            params: vec![],
            guards: vec![],
            witnesses: vec![],
            actions: vec![],
            span: Span::default(),
        }
    }

    pub fn is_initialisation(&self) -> bool {
        self.name == INITIALISATION
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Machine {
    pub name: String,
    pub refines: Option<String>,
    pub sees: Vec<String>,
    pub variables: Vec<String>,
    pub invariants: Vec<Labeled>,
    pub variant: Option<Formula>,
    pub events: Vec<Event>,
    pub span: Span,
}

impl Machine {
    pub fn new(name: impl Into<String>) -> Self {
        Machine {
            name: name.into(),
            refines: None,
            sees: vec![],
            variables: vec![],
            invariants: vec![],
            variant: None,
            events: vec![],
            span: Span::default(),
        }
    }

    pub fn event(&self, name: &str) -> Option<&Event> {
        self.events.iter().find(|e| e.name == name)
    }

    pub fn initialisation(&self) -> Option<&Event> {
        self.event(INITIALISATION)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Component {
    Context(Context),
    Machine(Machine),
}

impl Component {
    pub fn name(&self) -> &str {
        match self {
            Component::Context(c) => &c.name,
            Component::Machine(m) => &m.name,
        }
    }
}

/// A set of parsed components.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Project {
    pub contexts: Vec<Context>,
    pub machines: Vec<Machine>,
}

impl Project {
    pub fn context(&self, name: &str) -> Option<&Context> {
        self.contexts.iter().find(|c| c.name == name)
    }

    pub fn machine(&self, name: &str) -> Option<&Machine> {
        self.machines.iter().find(|m| m.name == name)
    }

    pub fn add(&mut self, c: Component) {
        match c {
            Component::Context(c) => self.contexts.push(c),
            Component::Machine(m) => self.machines.push(m),
        }
    }

    /// Every formula in the project, mutably, in declaration order.
    pub fn formulas_mut(&mut self) -> Vec<&mut Formula> {
        let mut out: Vec<&mut Formula> = Vec::new();
        for c in &mut self.contexts {
            for l in c.axioms.iter_mut().chain(c.theorems.iter_mut()) {
                out.push(&mut l.formula);
            }
        }
        for m in &mut self.machines {
            for l in &mut m.invariants {
                out.push(&mut l.formula);
            }
            if let Some(v) = &mut m.variant {
                out.push(v);
            }
            for e in &mut m.events {
                for g in &mut e.guards {
                    out.push(&mut g.formula);
                }
                for w in &mut e.witnesses {
                    out.push(&mut w.formula);
                }
                for a in &mut e.actions {
                    out.extend(a.formulas_mut());
                }
            }
        }
        out
    }
}

/// Variables assigned by a list of actions; `v(i) := E` contributes `v`.
pub fn frame(actions: &[Action]) -> BTreeSet<String> {
    actions
        .iter()
        .flat_map(|a| a.targets())
        .map(str::to_string)
        .collect()
}

/// Free identifiers of a formula.
pub fn free_vars(f: &Formula) -> BTreeSet<String> {
    f.free_vars()
}
