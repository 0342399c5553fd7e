//! Refinement flattening: one effective machine per refinement chain.

use std::collections::BTreeSet;

use thiserror::Error;

use super::ast::{Formula, Span};
use super::project::{
    Action, Context, Event, EventStatus, Labeled, Machine, Project, Witness, INITIALISATION,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlattenError {
    #[error("unknown machine `{0}`")]
    UnknownMachine(String),
    #[error("unknown context `{0}`")]
    UnknownContext(String),
    #[error("circular {kind} through `{name}`")]
    Cycle { kind: &'static str, name: String },
    #[error("event `{event}` refines unknown abstract event `{target}`")]
    UnknownAbstractEvent { event: String, target: String },
}

/// An event with everything it inherits through `extends` merged in.
#[derive(Clone, Debug, PartialEq)]
pub struct FlatEvent {
    pub name: String,
    pub status: EventStatus,
    pub refines: Vec<String>,
    pub params: Vec<String>,
    pub guards: Vec<Labeled>,
    /// The first `inherited_guards` guards come from the abstract event.
    pub inherited_guards: usize,
    pub witnesses: Vec<Witness>,
    pub actions: Vec<Action>,
    pub inherited_actions: usize,
    pub span: Span,
}

impl FlatEvent {
    pub fn is_initialisation(&self) -> bool {
        self.name == INITIALISATION
    }

    pub fn own_guards(&self) -> &[Labeled] {
        &self.guards[self.inherited_guards..]
    }

    pub fn own_actions(&self) -> &[Action] {
        &self.actions[self.inherited_actions..]
    }

    pub fn guard(&self) -> Formula {
        Formula::and_all(self.guards.iter().map(|g| g.formula.clone()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlatMachine {
    pub name: String,
    /// Context closure, ancestors before descendants.
    pub contexts: Vec<String>,
    pub sets: Vec<String>,
    pub constants: Vec<String>,
    /// Axioms and context theorems in closure order (see [`Labeled::theorem`]).
    pub axioms: Vec<Labeled>,
    pub variables: Vec<String>,
    /// Invariant chain: every ancestor's invariants, then this machine's.
    pub invariants: Vec<Labeled>,
    /// Index of the first invariant declared by this machine.
    pub own_invariants_from: usize,
    pub variant: Option<Formula>,
    pub events: Vec<FlatEvent>,
    /// (concrete event, abstract event) for every refinement edge.
    pub pairing: Vec<(String, String)>,
    pub abstract_machine: Option<Box<FlatMachine>>,
}

impl FlatMachine {
    pub fn event(&self, name: &str) -> Option<&FlatEvent> {
        self.events.iter().find(|e| e.name == name)
    }

    pub fn initialisation(&self) -> Option<&FlatEvent> {
        self.event(INITIALISATION)
    }

    pub fn abstract_invariants(&self) -> &[Labeled] {
        &self.invariants[..self.own_invariants_from]
    }

    pub fn own_invariants(&self) -> &[Labeled] {
        &self.invariants[self.own_invariants_from..]
    }

    /// Abstract variables that this machine no longer declares.
    pub fn disappeared_variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut m = self.abstract_machine.as_deref();
        while let Some(a) = m {
            for v in &a.variables {
                if !self.variables.contains(v) && !out.contains(v) {
                    out.push(v.clone());
                }
            }
            m = a.abstract_machine.as_deref();
        }
        out
    }

    pub fn abstract_events_of(&self, event: &str) -> Vec<&str> {
        self.pairing
            .iter()
            .filter(|(c, _)| c == event)
            .map(|(_, a)| a.as_str())
            .collect()
    }

    /// The flattened result as a refinement-free project: one context holding
    /// the closure and one machine holding the effective components.
    pub fn to_project(&self) -> Project {
        let ctx_name = format!("{}_ctx", self.name);
        let mut ctx = Context::new(ctx_name.clone());
        ctx.sets = self.sets.clone();
        ctx.constants = self.constants.clone();
        for a in &self.axioms {
            let mut a = a.clone();
            if a.theorem {
                a.theorem = false;
                ctx.theorems.push(a);
            } else {
                ctx.axioms.push(a);
            }
        }
        let mut m = Machine::new(self.name.clone());
        m.sees = if self.contexts.is_empty() {
            vec![]
        } else {
            vec![ctx_name]
        };
        m.variables = self.variables.clone();
        m.invariants = self.invariants.clone();
        m.variant = self.variant.clone();
        for e in &self.events {
            let mut ev = Event::new(e.name.clone());
            ev.status = e.status;
            ev.params = e.params.clone();
            ev.guards = e.guards.clone();
            ev.actions = e.actions.clone();
            ev.span = e.span.clone();
            m.events.push(ev);
        }
        Project {
            contexts: if self.contexts.is_empty() {
                vec![]
            } else {
                vec![ctx]
            },
            machines: vec![m],
        }
    }
}

/// Contexts reachable from `roots` through `extends`, each after everything
/// it extends.
pub fn context_closure<'p>(
    project: &'p Project,
    roots: &[String],
) -> Result<Vec<&'p Context>, FlattenError> {
    fn visit<'p>(
        project: &'p Project,
        name: &str,
        stack: &mut Vec<String>,
        out: &mut Vec<&'p Context>,
    ) -> Result<(), FlattenError> {
        if out.iter().any(|c| c.name == name) {
            return Ok(());
        }
        if stack.iter().any(|s| s == name) {
            return Err(FlattenError::Cycle {
                kind: "context extension",
                name: name.to_string(),
            });
        }
        let ctx = project
            .context(name)
            .ok_or_else(|| FlattenError::UnknownContext(name.to_string()))?;
        stack.push(name.to_string());
        for parent in &ctx.extends {
            visit(project, parent, stack, out)?;
        }
        stack.pop();
        out.push(ctx);
        Ok(())
    }
    let mut out = Vec::new();
    for r in roots {
        visit(project, r, &mut Vec::new(), &mut out)?;
    }
    Ok(out)
}

/// The refinement chain of `name`, most abstract first.
pub fn refinement_chain<'p>(
    project: &'p Project,
    name: &str,
) -> Result<Vec<&'p Machine>, FlattenError> {
    let mut chain: Vec<&Machine> = Vec::new();
    let mut cur = Some(name.to_string());
    while let Some(n) = cur {
        if chain.iter().any(|m| m.name == n) {
            return Err(FlattenError::Cycle {
                kind: "refinement",
                name: n,
            });
        }
        let m = project
            .machine(&n)
            .ok_or_else(|| FlattenError::UnknownMachine(n.clone()))?;
        chain.push(m);
        cur = m.refines.clone();
    }
    chain.reverse();
    Ok(chain)
}

pub fn flatten(project: &Project, machine: &str) -> Result<FlatMachine, FlattenError> {
    let chain = refinement_chain(project, machine)?;
    let mut flat: Option<FlatMachine> = None;
    for m in chain {
        flat = Some(flatten_one(project, m, flat)?);
    }
    Ok(flat.expect("chain is never empty"))
}

fn flatten_one(
    project: &Project,
    m: &Machine,
    abs: Option<FlatMachine>,
) -> Result<FlatMachine, FlattenError> {
    let mut roots: Vec<String> = abs.as_ref().map(|a| a.contexts.clone()).unwrap_or_default();
    for s in &m.sees {
        if !roots.contains(s) {
            roots.push(s.clone());
        }
    }
    let closure = context_closure(project, &roots)?;
    let mut sets = Vec::new();
    let mut constants = Vec::new();
    let mut axioms = Vec::new();
    for c in &closure {
        sets.extend(c.sets.iter().cloned());
        constants.extend(c.constants.iter().cloned());
        axioms.extend(c.axioms.iter().cloned());
        axioms.extend(c.theorems.iter().cloned().map(|mut t| {
            t.theorem = true;
            t
        }));
    }

    let mut invariants: Vec<Labeled> = abs
        .as_ref()
        .map(|a| a.invariants.clone())
        .unwrap_or_default();
    let own_invariants_from = invariants.len();
    invariants.extend(m.invariants.iter().cloned());

    let mut events = Vec::new();
    let mut pairing = Vec::new();
    for e in &m.events {
        let mut refines = e.refines.clone();
        if e.is_initialisation() && abs.is_some() && refines.is_empty() {
            refines.push(INITIALISATION.to_string());
        }
        let mut fe = FlatEvent {
            name: e.name.clone(),
            status: e.status,
            refines: refines.clone(),
            params: vec![],
            guards: vec![],
            inherited_guards: 0,
            witnesses: e.witnesses.clone(),
            actions: vec![],
            inherited_actions: 0,
            span: e.span.clone(),
        };
        if let Some(a) = &abs {
            for r in &refines {
                if a.event(r).is_none() {
                    return Err(FlattenError::UnknownAbstractEvent {
                        event: e.name.clone(),
                        target: r.clone(),
                    });
                }
                pairing.push((e.name.clone(), r.clone()));
            }
            if e.extends {
                if let Some(ae) = refines.first().and_then(|r| a.event(r)) {
                    fe.params.extend(ae.params.iter().cloned());
                    fe.guards.extend(ae.guards.iter().cloned());
                    fe.actions.extend(ae.actions.iter().cloned());
                }
            }
        } else if let Some(r) = refines.first() {
            return Err(FlattenError::UnknownAbstractEvent {
                event: e.name.clone(),
                target: r.clone(),
            });
        }
        fe.inherited_guards = fe.guards.len();
        fe.inherited_actions = fe.actions.len();
        fe.params.extend(e.params.iter().cloned());
        fe.guards.extend(e.guards.iter().cloned());
        fe.actions.extend(e.actions.iter().cloned());
        events.push(fe);
    }

    Ok(FlatMachine {
        name: m.name.clone(),
        contexts: closure.iter().map(|c| c.name.clone()).collect(),
        sets,
        constants,
        axioms,
        variables: m.variables.clone(),
        invariants,
        own_invariants_from,
        variant: m.variant.clone(),
        events,
        pairing,
        abstract_machine: abs.map(Box::new),
    })
}

/// Names visible to a machine's formulas: carriers, constants, variables
/// and variables that disappeared in refinement.
pub fn machine_symbols(flat: &FlatMachine) -> BTreeSet<String> {
    flat.sets
        .iter()
        .chain(&flat.constants)
        .chain(&flat.variables)
        .cloned()
        .chain(flat.disappeared_variables())
        .collect()
}
