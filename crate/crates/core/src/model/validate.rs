//! Static well-formedness checks on a parsed project.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::ast::{unprimed, Formula, Node, Span};
use super::flatten::{context_closure, flatten, refinement_chain, FlatMachine};
use super::project::{ActionKind, Labeled, Machine, Project};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DiagnosticKind {
    DuplicateName,
    DuplicateLabel,
    UnresolvedReference,
    Cycle,
    MissingInitialisation,
    InvalidInitialisation,
    UnassignedVariable,
    DuplicateAssignment,
    UnknownIdentifier,
    MisplacedPrime,
    InvalidWitness,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub span: Span,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)
    }
}

struct Sink(Vec<Diagnostic>);

impl Sink {
    fn push(&mut self, kind: DiagnosticKind, span: &Span, message: String) {
        self.0.push(Diagnostic {
            kind,
            span: span.clone(),
            message,
        });
    }
}

pub fn validate_project(project: &Project) -> Vec<Diagnostic> {
    let mut sink = Sink(Vec::new());
    let mut seen: HashMap<&str, &Span> = HashMap::new();
    for (name, span) in project
        .contexts
        .iter()
        .map(|c| (c.name.as_str(), &c.span))
        .chain(project.machines.iter().map(|m| (m.name.as_str(), &m.span)))
    {
        if seen.insert(name, span).is_some() {
            sink.push(
                DiagnosticKind::DuplicateName,
                span,
                format!("duplicate component name `{name}`"),
            );
        }
    }
    for c in &project.contexts {
        check_context(project, c, &mut sink);
    }
    for m in &project.machines {
        check_machine(project, m, &mut sink);
    }
    sink.0
}

fn check_labels<'a>(items: impl IntoIterator<Item = &'a Labeled>, sink: &mut Sink) {
    let mut seen = BTreeSet::new();
    for l in items {
        if !seen.insert(l.label.as_str()) {
            sink.push(
                DiagnosticKind::DuplicateLabel,
                &l.span,
                format!("duplicate label `{}`", l.label),
            );
        }
    }
}

fn check_names<'a>(
    names: impl IntoIterator<Item = &'a String>,
    span: &Span,
    what: &str,
    sink: &mut Sink,
) {
    let mut seen = BTreeSet::new();
    for n in names {
        if !seen.insert(n.as_str()) {
            sink.push(
                DiagnosticKind::DuplicateName,
                span,
                format!("{what} `{n}` declared twice"),
            );
        }
    }
}

fn check_idents(f: &Formula, scope: &BTreeSet<String>, primes_ok: bool, sink: &mut Sink) {
    let mut reported = BTreeSet::new();
    let mut check = |f: &Formula, name: &str| {
        if let Some(base) = unprimed(name) {
            if !primes_ok {
                if reported.insert(name.to_string()) {
                    sink.push(
                        DiagnosticKind::MisplacedPrime,
                        &f.span,
                        format!("primed identifier `{name}` outside a before-after predicate"),
                    );
                }
                return;
            }
            if scope.contains(name) || scope.contains(base) {
                return;
            }
        } else if scope.contains(name) {
            return;
        }
        if reported.insert(name.to_string()) {
            sink.push(
                DiagnosticKind::UnknownIdentifier,
                &f.span,
                format!("unknown identifier `{name}`"),
            );
        }
    };
    walk_free(f, &mut Vec::new(), &mut check);
}

fn walk_free(f: &Formula, bound: &mut Vec<String>, visit: &mut impl FnMut(&Formula, &str)) {
    match &f.node {
        Node::Ident(n) => {
            if !bound.contains(n) {
                visit(f, n);
            }
        }
        _ => {
            let mark = bound.len();
            bound.extend(f.binders().iter().cloned());
            for c in f.children() {
                walk_free(c, bound, visit);
            }
            bound.truncate(mark);
        }
    }
}

fn check_context(project: &Project, c: &super::project::Context, sink: &mut Sink) {
    for e in &c.extends {
        if project.context(e).is_none() {
            sink.push(
                DiagnosticKind::UnresolvedReference,
                &c.span,
                format!("context `{}` extends unknown context `{e}`", c.name),
            );
        }
    }
    check_labels(c.axioms.iter().chain(&c.theorems), sink);
    check_names(c.sets.iter().chain(&c.constants), &c.span, "symbol", sink);
    let closure = match context_closure(project, &[c.name.clone()]) {
        Ok(cl) => cl,
        Err(super::flatten::FlattenError::Cycle { name, .. }) => {
            sink.push(
                DiagnosticKind::Cycle,
                &c.span,
                format!("circular context extension through `{name}`"),
            );
            return;
        }
        Err(_) => return,
    };
    let scope: BTreeSet<String> = closure
        .iter()
        .flat_map(|x| x.sets.iter().chain(&x.constants).cloned())
        .collect();
    for l in c.axioms.iter().chain(&c.theorems) {
        check_idents(&l.formula, &scope, false, sink);
    }
}

fn check_machine(project: &Project, m: &Machine, sink: &mut Sink) {
    let before = sink.0.len();
    for s in &m.sees {
        if project.context(s).is_none() {
            sink.push(
                DiagnosticKind::UnresolvedReference,
                &m.span,
                format!("machine `{}` sees unknown context `{s}`", m.name),
            );
        }
    }
    if let Some(r) = &m.refines {
        if project.machine(r).is_none() {
            sink.push(
                DiagnosticKind::UnresolvedReference,
                &m.span,
                format!("machine `{}` refines unknown machine `{r}`", m.name),
            );
            return;
        }
    }
    if sink.0.len() > before {
        return;
    }
    if let Err(super::flatten::FlattenError::Cycle { name, .. }) =
        refinement_chain(project, &m.name)
    {
        sink.push(
            DiagnosticKind::Cycle,
            &m.span,
            format!("circular refinement through `{name}`"),
        );
        return;
    }
    check_labels(&m.invariants, sink);
    check_names(&m.variables, &m.span, "variable", sink);
    check_names(
        &m.events.iter().map(|e| e.name.clone()).collect::<Vec<_>>(),
        &m.span,
        "event",
        sink,
    );

    let flat = match flatten(project, &m.name) {
        Ok(f) => f,
        Err(e) => {
            let kind = match e {
                super::flatten::FlattenError::Cycle { .. } => DiagnosticKind::Cycle,
                _ => DiagnosticKind::UnresolvedReference,
            };
            sink.push(kind, &m.span, e.to_string());
            return;
        }
    };

    let mut scope: BTreeSet<String> = flat.sets.iter().chain(&flat.constants).cloned().collect();
    scope.extend(flat.variables.iter().cloned());
    let abstract_vars: BTreeSet<String> = abstract_variables(&flat);
    let mut inv_scope = scope.clone();
    inv_scope.extend(abstract_vars.iter().cloned());
    for l in flat.own_invariants() {
        check_idents(&l.formula, &inv_scope, false, sink);
    }
    if let Some(v) = &m.variant {
        check_idents(v, &scope, false, sink);
    }

    match m.initialisation() {
        None => sink.push(
            DiagnosticKind::MissingInitialisation,
            &m.span,
            format!("machine `{}` has no initialisation event", m.name),
        ),
        Some(init) => {
            if !init.params.is_empty() || !init.guards.is_empty() {
                sink.push(
                    DiagnosticKind::InvalidInitialisation,
                    &init.span,
                    "initialisation may not have parameters or guards".to_string(),
                );
            }
        }
    }
    if let Some(init) = flat.initialisation() {
        let assigned = super::project::frame(&init.actions);
        for v in &flat.variables {
            if !assigned.contains(v) {
                sink.push(
                    DiagnosticKind::UnassignedVariable,
                    &init.span,
                    format!("variable `{v}` is not assigned by initialisation"),
                );
            }
        }
    }

    for e in &flat.events {
        let own = m
            .event(&e.name)
            .expect("flat events mirror declared events");
        check_labels(e.guards.iter(), sink);
        let mut act_labels = BTreeSet::new();
        for a in &e.actions {
            if !act_labels.insert(a.label.as_str()) {
                sink.push(
                    DiagnosticKind::DuplicateLabel,
                    &a.span,
                    format!("duplicate label `{}` in event `{}`", a.label, e.name),
                );
            }
        }
        let mut ev_scope = scope.clone();
        ev_scope.extend(e.params.iter().cloned());
        for g in &own.guards {
            check_idents(&g.formula, &ev_scope, false, sink);
        }
        let mut targets = BTreeSet::new();
        for a in &e.actions {
            for t in a.targets() {
                if !flat.variables.iter().any(|v| v == t) {
                    sink.push(
                        DiagnosticKind::UnknownIdentifier,
                        &a.span,
                        format!(
                            "action `{}` assigns `{t}`, which is not a variable",
                            a.label
                        ),
                    );
                }
                if !targets.insert(t.to_string()) {
                    sink.push(
                        DiagnosticKind::DuplicateAssignment,
                        &a.span,
                        format!("variable `{t}` assigned twice in event `{}`", e.name),
                    );
                }
            }
        }
        for a in &own.actions {
            match &a.kind {
                ActionKind::Deterministic { .. } => {
                    for f in a.formulas() {
                        check_idents(f, &ev_scope, false, sink);
                    }
                }
                ActionKind::NonDeterministic { targets, pred } => {
                    let mut s = ev_scope.clone();
                    s.extend(targets.iter().map(|t| format!("{t}'")));
                    check_idents(pred, &s, true, sink);
                }
            }
        }
        check_witnesses(&flat, e, &ev_scope, &abstract_vars, sink);
    }
}

fn abstract_variables(flat: &FlatMachine) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut a = flat.abstract_machine.as_deref();
    while let Some(m) = a {
        out.extend(m.variables.iter().cloned());
        a = m.abstract_machine.as_deref();
    }
    out
}

fn check_witnesses(
    flat: &FlatMachine,
    e: &super::flatten::FlatEvent,
    ev_scope: &BTreeSet<String>,
    abstract_vars: &BTreeSet<String>,
    sink: &mut Sink,
) {
    let abs = flat.abstract_machine.as_deref();
    let abs_params: BTreeSet<String> = abs
        .map(|a| {
            e.refines
                .iter()
                .filter_map(|r| a.event(r))
                .flat_map(|ae| ae.params.iter().cloned())
                .collect()
        })
        .unwrap_or_default();
    let disappeared = flat.disappeared_variables();
    for w in &e.witnesses {
        let ok = match unprimed(&w.name) {
            Some(base) => disappeared.iter().any(|d| d == base),
            None => abs_params.contains(&w.name) && !e.params.contains(&w.name),
        };
        if !ok {
            sink.push(
                DiagnosticKind::InvalidWitness,
                &w.span,
                format!(
                    "witness `{}` names neither a disappearing abstract parameter nor a disappearing variable",
                    w.name
                ),
            );
        }
        if !w.formula.mentions(&w.name) {
            sink.push(
                DiagnosticKind::InvalidWitness,
                &w.span,
                format!("witness for `{}` does not mention it", w.name),
            );
        }
        let mut s = ev_scope.clone();
        s.insert(w.name.clone());
        s.extend(abstract_vars.iter().cloned());
        check_idents(&w.formula, &s, true, sink);
    }
}
