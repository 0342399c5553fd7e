//! Proof obligations as sequents, a finite-domain checker for them, and a
//! neutral text format for external provers.

pub mod check;
pub mod vc;
pub mod wd;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::model::{
    flatten, primed, Action, ActionKind, BinOp, EventStatus, FlatEvent, FlatMachine, FlattenError,
    Formula, Labeled, Node, Type, TypeEnv,
};
use crate::typecheck::{annotate, TypedProject};

pub use check::{check_sequent_finite, Bounds, CheckError, CheckResult, Verdict};
pub use vc::{emit_vc, parse_vc, report_row};
pub use wd::{type_set, wd_conditions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Inv,
    Grd,
    Sim,
    Fis,
    Wfis,
    Nat,
    Var,
    Thm,
    Mrg,
    Wd,
}

impl Family {
    pub const ALL: [Family; 10] = [
        Family::Inv,
        Family::Grd,
        Family::Sim,
        Family::Fis,
        Family::Wfis,
        Family::Nat,
        Family::Var,
        Family::Thm,
        Family::Mrg,
        Family::Wd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Inv => "INV",
            Family::Grd => "GRD",
            Family::Sim => "SIM",
            Family::Fis => "FIS",
            Family::Wfis => "WFIS",
            Family::Nat => "NAT",
            Family::Var => "VAR",
            Family::Thm => "THM",
            Family::Mrg => "MRG",
            Family::Wd => "WD",
        }
    }

    pub fn from_name(s: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.name() == s)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hyp {
    pub label: String,
    pub formula: Formula,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sequent {
    /// `event/label/FAMILY`, `label/FAMILY` or `event/FAMILY`.
    pub name: String,
    pub family: Family,
    pub hyps: Vec<Hyp>,
    pub goal: Formula,
    /// Free symbols in order of first occurrence, primed ones included.
    pub symbols: Vec<(String, Type)>,
}

impl Sequent {
    /// Drops spans and type annotations, for structural comparison.
    pub fn normalized(&self) -> Sequent {
        let mut s = self.clone();
        for f in s
            .hyps
            .iter_mut()
            .map(|h| &mut h.formula)
            .chain([&mut s.goal])
        {
            f.strip_spans();
            f.strip_types();
        }
        s
    }
}

fn hyp(label: &str, f: &Formula) -> Hyp {
    Hyp {
        label: label.to_string(),
        formula: f.clone(),
    }
}

fn hyps(items: &[Labeled]) -> Vec<Hyp> {
    items.iter().map(|l| hyp(&l.label, &l.formula)).collect()
}

/// Before-after predicate of each action, with primed targets.
pub fn before_after(actions: &[Action]) -> Vec<Hyp> {
    actions
        .iter()
        .map(|a| {
            let f = match &a.kind {
                ActionKind::Deterministic { lhs, rhs } => {
                    Formula::and_all(lhs.iter().zip(rhs).map(|(l, e)| {
                        let post = match &l.index {
                            None => e.clone(),
                            Some(i) => Formula::bin(
                                BinOp::Ovl,
                                Formula::ident(l.name.clone()),
                                Formula::synth(Node::SetExt(vec![Formula::bin(
                                    BinOp::Maplet,
                                    i.clone(),
                                    e.clone(),
                                )])),
                            ),
                        };
                        Formula::bin(BinOp::Eq, Formula::ident(primed(&l.name)), post)
                    }))
                }
                ActionKind::NonDeterministic { pred, .. } => pred.clone(),
            };
            hyp(&a.label, &f)
        })
        .collect()
}

/// `x -> E` for plain deterministic assignments, `x -> x'` otherwise.
fn post_substitution(actions: &[Action]) -> HashMap<String, Formula> {
    let mut map = HashMap::new();
    for a in actions {
        match &a.kind {
            ActionKind::Deterministic { lhs, rhs } => {
                for (l, e) in lhs.iter().zip(rhs) {
                    let post = match l.index {
                        None => e.clone(),
                        Some(_) => Formula::ident(primed(&l.name)),
                    };
                    map.insert(l.name.clone(), post);
                }
            }
            ActionKind::NonDeterministic { targets, .. } => {
                for t in targets {
                    map.insert(t.clone(), Formula::ident(primed(t)));
                }
            }
        }
    }
    map
}

fn same(a: &Formula, b: &Formula) -> bool {
    let (mut a, mut b) = (a.clone(), b.clone());
    a.strip_spans();
    a.strip_types();
    b.strip_spans();
    b.strip_types();
    a == b
}

/// Free identifiers with their types, in order of first occurrence.
fn collect_symbols(fs: &[&Formula], env: &TypeEnv) -> Vec<(String, Type)> {
    fn go(f: &Formula, bound: &mut Vec<String>, env: &TypeEnv, out: &mut Vec<(String, Type)>) {
        if let Node::Ident(n) = &f.node {
            if !bound.contains(n) && !out.iter().any(|(m, _)| m == n) {
                let ty =
                    f.ty.clone()
                        .or_else(|| env.get(n.trim_end_matches('\'')).cloned())
                        .unwrap_or(Type::Int);
                out.push((n.clone(), ty));
            }
            return;
        }
        let mark = bound.len();
        bound.extend(f.binders().iter().cloned());
        for c in f.children() {
            go(c, bound, env, out);
        }
        bound.truncate(mark);
    }
    let mut out = Vec::new();
    for f in fs {
        go(f, &mut Vec::new(), env, &mut out);
    }
    out
}

fn sequent(name: String, family: Family, hyps: Vec<Hyp>, goal: Formula, env: &TypeEnv) -> Sequent {
    let mut hyps = hyps;
    let mut goal = goal;
    for f in hyps.iter_mut().map(|h| &mut h.formula).chain([&mut goal]) {
        let _ = annotate(f, env);
    }
    let all: Vec<&Formula> = hyps.iter().map(|h| &h.formula).chain([&goal]).collect();
    let symbols = collect_symbols(&all, env);
    Sequent {
        name,
        family,
        hyps,
        goal,
        symbols,
    }
}

struct Gen<'a> {
    typed: &'a TypedProject,
    m: &'a FlatMachine,
    a: Vec<Hyp>,
    i: Vec<Hyp>,
    j: Vec<Hyp>,
    out: Vec<Sequent>,
}

impl Gen<'_> {
    fn env(&self, event: Option<&FlatEvent>) -> TypeEnv {
        let mut env = self
            .typed
            .event_env(&self.m.name, event.map(|e| e.name.as_str()));
        if let (Some(e), Some(abs)) = (event, &self.m.abstract_machine) {
            for ae in self.m.abstract_events_of(&e.name) {
                env.extend(self.typed.event_env(&abs.name, Some(ae)));
            }
        }
        env
    }

    fn push(&mut self, name: String, family: Family, hyps: Vec<Hyp>, goal: Formula, env: &TypeEnv) {
        self.out.push(sequent(name, family, hyps, goal, env));
    }

    fn wd(&mut self, prefix: &str, label: &str, f: &Formula, hyps: &[Hyp], env: &TypeEnv) {
        for (k, cond) in wd_conditions(f).into_iter().enumerate() {
            let label = if k == 0 {
                label.to_string()
            } else {
                format!("{label}.{}", k + 1)
            };
            let name = if prefix.is_empty() {
                format!("{label}/WD")
            } else {
                format!("{prefix}/{label}/WD")
            };
            self.push(name, Family::Wd, hyps.to_vec(), cond, env);
        }
    }

    fn context_level(&mut self) {
        let env = self.env(None);
        let mut before: Vec<Hyp> = Vec::new();
        for ax in &self.m.axioms {
            self.wd("", &ax.label, &ax.formula, &before, &env);
            if ax.theorem {
                let name = format!("{}/THM", ax.label);
                self.push(name, Family::Thm, before.clone(), ax.formula.clone(), &env);
            }
            before.push(hyp(&ax.label, &ax.formula));
        }
    }

    fn machine_level(&mut self) {
        let env = self.env(None);
        let mut before: Vec<Hyp> = [self.a.clone(), self.i.clone()].concat();
        for inv in self.m.own_invariants() {
            self.wd("", &inv.label, &inv.formula, &before, &env);
            if inv.theorem {
                let name = format!("{}/THM", inv.label);
                self.push(name, Family::Thm, before.clone(), inv.formula.clone(), &env);
            }
            before.push(hyp(&inv.label, &inv.formula));
        }
        if let Some(v) = &self.m.variant {
            let base = [self.a.clone(), self.i.clone(), self.j.clone()].concat();
            self.wd("", "variant", v, &base, &env);
        }
    }

    fn event(&mut self, e: &FlatEvent) {
        let env = self.env(Some(e));
        let init = e.is_initialisation();
        let (a, i, j) = (self.a.clone(), self.i.clone(), self.j.clone());
        let aij = [a.clone(), i.clone(), j.clone()].concat();
        let h = hyps(&e.guards);
        let w: Vec<Hyp> = e
            .witnesses
            .iter()
            .map(|w| hyp(&w.name, &w.formula))
            .collect();
        let ba = before_after(&e.actions);
        let frame = crate::model::frame(&e.actions);
        let abstract_events: Vec<FlatEvent> = match &self.m.abstract_machine {
            Some(abs) => self
                .m
                .abstract_events_of(&e.name)
                .into_iter()
                .filter_map(|n| abs.event(n).cloned())
                .collect(),
            None => vec![],
        };
        let extends = e.inherited_guards > 0 || e.inherited_actions > 0;

        let mut before = aij.clone();
        for g in e.own_guards() {
            self.wd(&e.name, &g.label, &g.formula, &before, &env);
            before.push(hyp(&g.label, &g.formula));
        }
        let aijh = [aij.clone(), h.clone()].concat();
        for wt in &e.witnesses {
            self.wd(&e.name, &wt.name, &wt.formula, &aijh, &env);
        }
        for act in e.own_actions() {
            for f in act.formulas() {
                self.wd(&e.name, &act.label, f, &aijh, &env);
            }
        }

        if !init {
            for ae in &abstract_events {
                for g in &ae.guards {
                    let inherited = extends
                        && e.guards[..e.inherited_guards]
                            .iter()
                            .any(|c| same(&c.formula, &g.formula));
                    if inherited || e.guards.iter().any(|c| same(&c.formula, &g.formula)) {
                        continue;
                    }
                    let name = format!("{}/{}/GRD", e.name, g.label);
                    self.push(
                        name,
                        Family::Grd,
                        [aijh.clone(), w.clone()].concat(),
                        g.formula.clone(),
                        &env,
                    );
                }
            }
            if abstract_events.len() > 1 {
                let goal = Formula::or_all(abstract_events.iter().map(|ae| ae.guard()));
                let hs = [a.clone(), i.clone(), h.clone()].concat();
                self.push(format!("{}/MRG", e.name), Family::Mrg, hs, goal, &env);
            }
        }
        for wt in &e.witnesses {
            if wt.name.ends_with('\'') {
                continue;
            }
            let goal = Formula::exists(vec![wt.name.clone()], wt.formula.clone());
            let hs = [aijh.clone(), ba.clone()].concat();
            self.push(
                format!("{}/{}/WFIS", e.name, wt.name),
                Family::Wfis,
                hs,
                goal,
                &env,
            );
        }
        for act in e.own_actions() {
            if let ActionKind::NonDeterministic { targets, pred } = &act.kind {
                let goal =
                    Formula::exists(targets.iter().map(|t| primed(t)).collect(), pred.clone());
                let hs = if init { a.clone() } else { aijh.clone() };
                self.push(
                    format!("{}/{}/FIS", e.name, act.label),
                    Family::Fis,
                    hs,
                    goal,
                    &env,
                );
            }
        }
        for ae in &abstract_events {
            for (k, aa) in before_after(&ae.actions).into_iter().enumerate() {
                let src = &ae.actions[k];
                let kept = e.actions.iter().any(|c| {
                    c.label == src.label
                        && same(
                            &before_after(std::slice::from_ref(c))[0].formula,
                            &aa.formula,
                        )
                });
                if kept {
                    continue;
                }
                let hs = if init {
                    [a.clone(), w.clone(), ba.clone()].concat()
                } else {
                    [aijh.clone(), w.clone(), ba.clone()].concat()
                };
                self.push(
                    format!("{}/{}/SIM", e.name, aa.label),
                    Family::Sim,
                    hs,
                    aa.formula,
                    &env,
                );
            }
        }
        let own: Vec<Labeled> = self.m.own_invariants().to_vec();
        for inv in own.iter().filter(|l| !l.theorem) {
            if inv.formula.free_vars().is_disjoint(&frame) {
                continue;
            }
            let goal = crate::model::prime_vars(&inv.formula, &frame);
            let hs = if init {
                [a.clone(), w.clone(), ba.clone()].concat()
            } else {
                [aijh.clone(), w.clone(), ba.clone()].concat()
            };
            self.push(
                format!("{}/{}/INV", e.name, inv.label),
                Family::Inv,
                hs,
                goal,
                &env,
            );
        }
        if let (Some(v), false) = (&self.m.variant, init || e.status == EventStatus::Ordinary) {
            let is_set = matches!(self.typed_variant(v, &env), Some(Type::Set(_)));
            if !is_set {
                let nat = Formula::bin(
                    BinOp::In,
                    v.clone(),
                    Formula::synth(Node::Universe(crate::model::Universe::Nat)),
                );
                self.push(
                    format!("{}/NAT", e.name),
                    Family::Nat,
                    aijh.clone(),
                    nat,
                    &env,
                );
            }
            let after = v.substitute(&post_substitution(&e.actions));
            let op = match (e.status, is_set) {
                (EventStatus::Convergent, false) => BinOp::Lt,
                (_, false) => BinOp::Le,
                (EventStatus::Convergent, true) => BinOp::PSubset,
                (_, true) => BinOp::Subset,
            };
            let goal = Formula::bin(op, after, v.clone());
            let hs = [aijh.clone(), ba.clone()].concat();
            self.push(format!("{}/VAR", e.name), Family::Var, hs, goal, &env);
        }
    }

    fn typed_variant(&self, v: &Formula, env: &TypeEnv) -> Option<Type> {
        if v.ty.is_some() {
            return v.ty.clone();
        }
        let mut v = v.clone();
        annotate(&mut v, env).ok()
    }
}

/// All proof obligations of `machine`, grouped as: context axioms and
/// theorems, machine invariants and variant, then each event in order.
pub fn gen_pos(typed: &TypedProject, machine: &str) -> Result<Vec<Sequent>, FlattenError> {
    let m = flatten(&typed.project, machine)?;
    let mut g = Gen {
        typed,
        a: hyps(&m.axioms),
        i: hyps(m.abstract_invariants()),
        j: hyps(m.own_invariants()),
        m: &m,
        out: Vec::new(),
    };
    g.context_level();
    g.machine_level();
    for e in &m.events {
        g.event(e);
    }
    Ok(g.out)
}

/// Names in `pos` that occur more than once.
pub fn duplicate_names(pos: &[Sequent]) -> BTreeSet<String> {
    let mut seen = BTreeSet::new();
    pos.iter()
        .filter(|s| !seen.insert(s.name.clone()))
        .map(|s| s.name.clone())
        .collect()
}
