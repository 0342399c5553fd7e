//! Type inference: every identifier and formula node gets a [`Type`].
//!
//! Contexts are typed ancestors first, machines abstract first, so that a
//! refinement sees the settled types of everything it inherits.

mod infer;
mod unify;

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::model::flatten::{context_closure, refinement_chain};
use crate::model::{ActionKind, Formula, Project, Span, Type, TypeEnv};
use infer::Infer;
use unify::{Term, Unifier};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("{span}: cannot determine the type of `{name}`")]
    UntypedIdentifier { name: String, span: Span },
    #[error("{span}: type mismatch: expected {expected}, found {found}")]
    Mismatch {
        span: Span,
        expected: String,
        found: String,
    },
    #[error("{0}")]
    Structure(String),
}

/// Types of one machine's symbols.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MachineTypes {
    /// Carriers, constants and variables, including abstract variables.
    pub env: TypeEnv,
    /// Parameters of each event, inherited ones included.
    pub events: BTreeMap<String, TypeEnv>,
}

/// A project whose formulas are annotated, plus the symbol tables.
#[derive(Clone, Debug)]
pub struct TypedProject {
    pub project: Project,
    pub contexts: BTreeMap<String, TypeEnv>,
    pub machines: BTreeMap<String, MachineTypes>,
    /// `name : type` lines in declaration order; event parameters are
    /// qualified as `event.param`.
    pub table: Vec<(String, Type)>,
}

impl TypedProject {
    /// Machine symbols plus the parameters of `event`, if given.
    pub fn event_env(&self, machine: &str, event: Option<&str>) -> TypeEnv {
        let Some(mt) = self.machines.get(machine) else {
            return TypeEnv::new();
        };
        let mut env = mt.env.clone();
        if let Some(ps) = event.and_then(|e| mt.events.get(e)) {
            env.extend(ps.iter().map(|(k, v)| (k.clone(), v.clone())));
        }
        env
    }
}

fn structure(e: impl ToString) -> TypeError {
    TypeError::Structure(e.to_string())
}

fn globals_of(env: &TypeEnv) -> HashMap<String, Term> {
    env.iter()
        .map(|(k, t)| (k.clone(), Term::from_type(t)))
        .collect()
}

fn untyped(name: &str, span: &Span) -> TypeError {
    TypeError::UntypedIdentifier {
        name: name.to_string(),
        span: span.clone(),
    }
}

pub fn infer_types(project: &Project) -> Result<TypedProject, TypeError> {
    let mut out = project.clone();
    let mut contexts: BTreeMap<String, TypeEnv> = BTreeMap::new();
    let names: Vec<String> = project.contexts.iter().map(|c| c.name.clone()).collect();
    for c in context_closure(project, &names).map_err(structure)? {
        let env = infer_context(&mut out, &c.name, &contexts)?;
        contexts.insert(c.name.clone(), env);
    }
    let mut machines: BTreeMap<String, MachineTypes> = BTreeMap::new();
    for m in &project.machines {
        for step in refinement_chain(project, &m.name).map_err(structure)? {
            if !machines.contains_key(&step.name) {
                let mt = infer_machine(&mut out, &step.name, &contexts, &machines)?;
                machines.insert(step.name.clone(), mt);
            }
        }
    }
    let mut table = Vec::new();
    for c in &project.contexts {
        let env = &contexts[&c.name];
        for n in c.sets.iter().chain(&c.constants) {
            table.push((n.clone(), env[n].clone()));
        }
    }
    for m in &project.machines {
        let mt = &machines[&m.name];
        for v in &m.variables {
            table.push((v.clone(), mt.env[v].clone()));
        }
        for e in &m.events {
            let ps = &mt.events[&e.name];
            for p in &e.params {
                table.push((format!("{}.{}", e.name, p), ps[p].clone()));
            }
        }
    }
    Ok(TypedProject {
        project: out,
        contexts,
        machines,
        table,
    })
}

fn infer_context(
    project: &mut Project,
    name: &str,
    done: &BTreeMap<String, TypeEnv>,
) -> Result<TypeEnv, TypeError> {
    let idx = project
        .contexts
        .iter()
        .position(|c| c.name == name)
        .expect("context exists");
    let ctx = project.contexts[idx].clone();
    let mut u = Unifier::default();
    let mut globals: HashMap<String, Term> = HashMap::new();
    for p in context_closure(project, &[name.to_string()]).map_err(structure)? {
        if p.name != name {
            globals.extend(globals_of(&done[&p.name]));
        }
    }
    for s in &ctx.sets {
        globals.insert(s.clone(), Term::set(Term::Carrier(s.clone())));
    }
    for c in &ctx.constants {
        globals.insert(c.clone(), u.fresh());
    }
    let mut inf = Infer {
        u,
        globals: &globals,
        locals: Vec::new(),
        nodes: Vec::new(),
    };
    for l in ctx.axioms.iter().chain(&ctx.theorems) {
        let t = inf.formula(&l.formula)?;
        inf.expect(&l.formula.span, &Term::Bool, &t)?;
    }
    let mut env = TypeEnv::new();
    for (k, t) in &globals {
        let ty = inf.u.ground(t).ok_or_else(|| untyped(k, &ctx.span))?;
        env.insert(k.clone(), ty);
    }
    let mut cursor = 0;
    let target = &mut project.contexts[idx];
    for l in target.axioms.iter_mut().chain(target.theorems.iter_mut()) {
        inf.annotate(&mut l.formula, &mut cursor);
    }
    Ok(env)
}

fn infer_machine(
    project: &mut Project,
    name: &str,
    contexts: &BTreeMap<String, TypeEnv>,
    machines: &BTreeMap<String, MachineTypes>,
) -> Result<MachineTypes, TypeError> {
    let idx = project
        .machines
        .iter()
        .position(|m| m.name == name)
        .expect("machine exists");
    let m = project.machines[idx].clone();
    let abs = m.refines.as_ref().map(|r| &machines[r]);
    let abs_machine = m.refines.as_ref().and_then(|r| project.machine(r)).cloned();

    let mut u = Unifier::default();
    let mut globals: HashMap<String, Term> = HashMap::new();
    if let Some(a) = abs {
        globals.extend(globals_of(&a.env));
    }
    for c in context_closure(project, &m.sees).map_err(structure)? {
        globals.extend(globals_of(&contexts[&c.name]));
    }
    for v in &m.variables {
        if !globals.contains_key(v) {
            globals.insert(v.clone(), u.fresh());
        }
    }
    let mut inf = Infer {
        u,
        globals: &globals,
        locals: Vec::new(),
        nodes: Vec::new(),
    };

    for l in &m.invariants {
        let t = inf.formula(&l.formula)?;
        inf.expect(&l.formula.span, &Term::Bool, &t)?;
    }
    let variant = match &m.variant {
        Some(v) => Some((inf.formula(v)?, v.span.clone())),
        None => None,
    };

    let mut params: Vec<(String, Vec<(String, Term)>)> = Vec::new();
    for e in &m.events {
        let mut locals: Vec<(String, Term)> = Vec::new();
        let abstract_params: TypeEnv = e
            .refines
            .iter()
            .filter_map(|r| abs.and_then(|a| a.events.get(r)))
            .flat_map(|ps| ps.iter().map(|(k, v)| (k.clone(), v.clone())))
            .collect();
        if e.extends {
            let ae = abs_machine
                .as_ref()
                .and_then(|am| e.refines.first().and_then(|r| am.event(r)));
            let ps = e
                .refines
                .first()
                .and_then(|r| abs.and_then(|a| a.events.get(r)));
            if let (Some(ae), Some(ps)) = (ae, ps) {
                for p in &ae.params {
                    locals.push((p.clone(), Term::from_type(&ps[p])));
                }
                // Parameters the abstract event itself inherited.
                for (p, t) in ps {
                    if !locals.iter().any(|(k, _)| k == p) {
                        locals.push((p.clone(), Term::from_type(t)));
                    }
                }
            }
        }
        for p in &e.params {
            let t = inf.u.fresh();
            locals.push((p.clone(), t));
        }
        inf.locals = locals.clone();
        for g in &e.guards {
            let t = inf.formula(&g.formula)?;
            inf.expect(&g.formula.span, &Term::Bool, &t)?;
        }
        for w in &e.witnesses {
            let mark = inf.locals.len();
            if let Some(t) = abstract_params.get(&w.name) {
                inf.locals.push((w.name.clone(), Term::from_type(t)));
            }
            let t = inf.formula(&w.formula)?;
            inf.expect(&w.formula.span, &Term::Bool, &t)?;
            inf.locals.truncate(mark);
        }
        for a in &e.actions {
            match &a.kind {
                ActionKind::Deterministic { lhs, rhs } => {
                    let mut targets = Vec::new();
                    for l in lhs {
                        let base = inf
                            .lookup(&l.name)
                            .ok_or_else(|| untyped(&l.name, &a.span))?;
                        match &l.index {
                            Some(i) => {
                                let ti = inf.formula(i)?;
                                let r = inf.u.fresh();
                                inf.expect(&a.span, &base, &Term::rel(ti, r.clone()))?;
                                targets.push(r);
                            }
                            None => targets.push(base),
                        }
                    }
                    for (t, r) in targets.iter().zip(rhs) {
                        let tr = inf.formula(r)?;
                        inf.expect(&r.span, t, &tr)?;
                    }
                }
                ActionKind::NonDeterministic { pred, .. } => {
                    let t = inf.formula(pred)?;
                    inf.expect(&pred.span, &Term::Bool, &t)?;
                }
            }
        }
        params.push((e.name.clone(), locals));
    }
    inf.locals.clear();

    if let Some((t, span)) = &variant {
        let el = inf.u.fresh();
        let r = inf.u.resolve(t);
        if r != Term::Int && !inf.u.unify(t, &Term::set(el)) {
            return Err(TypeError::Mismatch {
                span: span.clone(),
                expected: "INT or a set".into(),
                found: r.to_string(),
            });
        }
    }

    let mut mt = MachineTypes::default();
    for (k, t) in &globals {
        let ty = inf.u.ground(t).ok_or_else(|| untyped(k, &m.span))?;
        mt.env.insert(k.clone(), ty);
    }
    for ((ename, locals), e) in params.iter().zip(&m.events) {
        let mut env = TypeEnv::new();
        for (p, t) in locals {
            let ty = inf.u.ground(t).ok_or_else(|| untyped(p, &e.span))?;
            env.insert(p.clone(), ty);
        }
        mt.events.insert(ename.clone(), env);
    }

    let mut cursor = 0;
    let target = &mut project.machines[idx];
    for l in &mut target.invariants {
        inf.annotate(&mut l.formula, &mut cursor);
    }
    if let Some(v) = &mut target.variant {
        inf.annotate(v, &mut cursor);
    }
    for e in &mut target.events {
        for g in &mut e.guards {
            inf.annotate(&mut g.formula, &mut cursor);
        }
        for w in &mut e.witnesses {
            inf.annotate(&mut w.formula, &mut cursor);
        }
        for a in &mut e.actions {
            for f in a.formulas_mut() {
                inf.annotate(f, &mut cursor);
            }
        }
    }
    debug_assert_eq!(cursor, inf.nodes.len());
    Ok(mt)
}

/// Types a standalone formula against ground symbol types and annotates
/// every node. Returns the formula's own type.
pub fn annotate(f: &mut Formula, env: &TypeEnv) -> Result<Type, TypeError> {
    annotate_as(f, env, None)
}

/// Like [`annotate`], with the formula's type fixed in advance.
pub fn annotate_as(f: &mut Formula, env: &TypeEnv, want: Option<&Type>) -> Result<Type, TypeError> {
    let globals = globals_of(env);
    let mut inf = Infer::new(&globals);
    let t = inf.formula(f)?;
    if let Some(w) = want {
        inf.expect(&f.span, &Term::from_type(w), &t)?;
    }
    let mut cursor = 0;
    inf.annotate(f, &mut cursor);
    Ok(inf.u.ground_or_int(&t))
}

/// Whether every node of `f` carries a type.
pub fn fully_typed(f: &Formula) -> bool {
    let mut ok = true;
    f.walk(&mut |n| ok &= n.ty.is_some());
    ok
}
