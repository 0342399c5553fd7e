//! Design-by-contract rendering of a flattened machine.

use std::collections::HashMap;

use crate::model::{
    primed, Action, ActionKind, BinOp, EventStatus, FlatEvent, FlatMachine, Formula, Node,
};
use crate::parser::{parse_formula, render_formula, ParseError};

#[derive(Clone, Debug, PartialEq)]
pub struct Clause {
    pub label: String,
    pub formula: Formula,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpecCase {
    pub requires: Formula,
    /// Empty means `nothing`.
    pub assignable: Vec<String>,
    pub ensures: Formula,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EventSpec {
    pub name: String,
    pub params: Vec<String>,
    pub normal: SpecCase,
    /// The disabled case: state unchanged.
    pub otherwise: SpecCase,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContractDoc {
    pub machine: String,
    /// Axioms.
    pub static_invariants: Vec<Clause>,
    /// Context and machine theorems.
    pub redundant_invariants: Vec<Clause>,
    /// `c = old(c)` for every constant.
    pub constraints: Vec<Formula>,
    pub invariants: Vec<Clause>,
    pub initially: Formula,
    pub variant: Option<Formula>,
    pub events: Vec<EventSpec>,
}

impl ContractDoc {
    /// Drops spans and type annotations, for structural comparison.
    pub fn normalized(&self) -> ContractDoc {
        let mut d = self.clone();
        let norm = |f: &mut Formula| {
            f.strip_spans();
            f.strip_types();
        };
        for c in d
            .static_invariants
            .iter_mut()
            .chain(d.redundant_invariants.iter_mut())
            .chain(d.invariants.iter_mut())
        {
            norm(&mut c.formula);
        }
        d.constraints.iter_mut().for_each(norm);
        norm(&mut d.initially);
        if let Some(v) = &mut d.variant {
            norm(v);
        }
        for e in &mut d.events {
            for c in [&mut e.normal, &mut e.otherwise] {
                norm(&mut c.requires);
                norm(&mut c.ensures);
            }
        }
        d
    }
}

fn old_state(f: &Formula, vars: &[String]) -> Formula {
    let map: HashMap<String, Formula> = vars
        .iter()
        .map(|v| (v.clone(), Formula::old(Formula::ident(v.clone()))))
        .collect();
    f.substitute(&map)
}

/// Post-state of `actions` as a predicate over `x` and, when `old` is set,
/// `old(..)` of the pre-state.
pub fn ensures_of(actions: &[Action], vars: &[String], old: bool) -> Formula {
    let mut parts = Vec::new();
    for a in actions {
        match &a.kind {
            ActionKind::Deterministic { lhs, rhs } => {
                for (l, e) in lhs.iter().zip(rhs) {
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
                    parts.push(Formula::bin(
                        BinOp::Eq,
                        Formula::ident(l.name.clone()),
                        if old { Formula::old(post) } else { post },
                    ));
                }
            }
            ActionKind::NonDeterministic { targets, pred } => {
                let pre = old_state(pred, vars);
                let unprime: HashMap<String, String> =
                    targets.iter().map(|t| (primed(t), t.clone())).collect();
                parts.push(pre.rename(&unprime));
            }
        }
    }
    Formula::and_all(parts)
}

fn event_spec(e: &FlatEvent, m: &FlatMachine, variant_is_set: bool) -> EventSpec {
    let mut requires = e.guard();
    let mut ensures = ensures_of(&e.actions, &m.variables, true);
    if let (Some(v), true) = (&m.variant, e.status != EventStatus::Ordinary) {
        if !variant_is_set {
            requires = Formula::and_all(
                requires
                    .conjuncts()
                    .into_iter()
                    .cloned()
                    .chain([Formula::bin(BinOp::Ge, v.clone(), Formula::int(0))])
                    .filter(|f| !f.is_true()),
            );
        }
        let op = match (e.status, variant_is_set) {
            (EventStatus::Convergent, false) => BinOp::Lt,
            (_, false) => BinOp::Le,
            (EventStatus::Convergent, true) => BinOp::PSubset,
            (_, true) => BinOp::Subset,
        };
        let dec = Formula::bin(op, v.clone(), Formula::old(v.clone()));
        ensures = Formula::and_all(
            ensures
                .conjuncts()
                .into_iter()
                .cloned()
                .chain([dec])
                .filter(|f| !f.is_true()),
        );
    }
    let assignable: Vec<String> = crate::model::frame(&e.actions).into_iter().collect();
    EventSpec {
        name: e.name.clone(),
        params: e.params.clone(),
        otherwise: SpecCase {
            requires: Formula::not(requires.clone()),
            assignable: vec![],
            ensures: Formula::boolean(true),
        },
        normal: SpecCase {
            requires,
            assignable,
            ensures,
        },
    }
}

/// Builds the contract document. `variant_is_set` selects `<<:` over `<`.
pub fn build_contracts(m: &FlatMachine, variant_is_set: bool) -> ContractDoc {
    let clause = |l: &crate::model::Labeled| Clause {
        label: l.label.clone(),
        formula: l.formula.clone(),
    };
    ContractDoc {
        machine: m.name.clone(),
        static_invariants: m.axioms.iter().filter(|a| !a.theorem).map(clause).collect(),
        redundant_invariants: m
            .axioms
            .iter()
            .chain(m.own_invariants())
            .filter(|a| a.theorem)
            .map(clause)
            .collect(),
        constraints: m
            .constants
            .iter()
            .map(|c| {
                Formula::bin(
                    BinOp::Eq,
                    Formula::ident(c.clone()),
                    Formula::old(Formula::ident(c.clone())),
                )
            })
            .collect(),
        invariants: m
            .invariants
            .iter()
            .filter(|i| !i.theorem)
            .map(clause)
            .collect(),
        initially: m
            .initialisation()
            .map(|i| ensures_of(&i.actions, &[], false))
            .unwrap_or_else(|| Formula::boolean(true)),
        variant: m.variant.clone(),
        events: m
            .events
            .iter()
            .filter(|e| !e.is_initialisation())
            .map(|e| event_spec(e, m, variant_is_set))
            .collect(),
    }
}

fn names(xs: &[String]) -> String {
    if xs.is_empty() {
        "nothing".to_string()
    } else {
        xs.join(", ")
    }
}

pub fn emit_contracts(d: &ContractDoc) -> String {
    let mut out = format!("MACHINE {}\n", d.machine);
    let section = |out: &mut String, title: &str, kw: &str, cs: &[Clause]| {
        out.push_str(title);
        out.push('\n');
        for c in cs {
            out.push_str(&format!(
                "  {kw} {} // {}\n",
                render_formula(&c.formula),
                c.label
            ));
        }
    };
    section(
        &mut out,
        "STATIC-INVARIANTS",
        "static invariant",
        &d.static_invariants,
    );
    section(
        &mut out,
        "REDUNDANT-INVARIANTS",
        "redundant invariant",
        &d.redundant_invariants,
    );
    out.push_str("CONSTRAINTS\n");
    for c in &d.constraints {
        out.push_str(&format!("  constraint {}\n", render_formula(c)));
    }
    section(&mut out, "INVARIANTS", "invariant", &d.invariants);
    out.push_str(&format!(
        "INITIALLY\n  initially {}\n",
        render_formula(&d.initially)
    ));
    if let Some(v) = &d.variant {
        out.push_str(&format!("VARIANT\n  variant {}\n", render_formula(v)));
    }
    for e in &d.events {
        out.push_str(&format!("SPEC {}\n", e.name));
        for (i, c) in [&e.normal, &e.otherwise].into_iter().enumerate() {
            if i == 1 {
                out.push_str("also\n");
            } else if !e.params.is_empty() {
                out.push_str(&format!("  any: {}\n", e.params.join(", ")));
            }
            out.push_str(&format!("  requires: {}\n", render_formula(&c.requires)));
            out.push_str(&format!("  assignable: {}\n", names(&c.assignable)));
            out.push_str(&format!("  ensures: {}\n", render_formula(&c.ensures)));
        }
        out.push_str("END\n");
    }
    out
}

fn err(line: usize, msg: impl Into<String>) -> ParseError {
    let mut e = ParseError::new(Default::default(), msg);
    e.message = format!("line {}: {}", line + 1, e.message);
    e
}

fn formula(line: usize, text: &str) -> Result<Formula, ParseError> {
    parse_formula(text).map_err(|e| err(line, e.message))
}

fn labeled(line: usize, text: &str) -> Result<Clause, ParseError> {
    let (f, label) = text
        .rsplit_once(" // ")
        .ok_or_else(|| err(line, "missing `// label`"))?;
    Ok(Clause {
        label: label.trim().to_string(),
        formula: formula(line, f)?,
    })
}

fn list(text: &str) -> Vec<String> {
    let t = text.trim();
    if t == "nothing" || t.is_empty() {
        return vec![];
    }
    t.split(',').map(|s| s.trim().to_string()).collect()
}

/// Reads back the output of [`emit_contracts`].
pub fn parse_contracts(text: &str) -> Result<ContractDoc, ParseError> {
    let mut d = ContractDoc {
        machine: String::new(),
        static_invariants: vec![],
        redundant_invariants: vec![],
        constraints: vec![],
        invariants: vec![],
        initially: Formula::boolean(true),
        variant: None,
        events: vec![],
    };
    let empty_case = || SpecCase {
        requires: Formula::boolean(true),
        assignable: vec![],
        ensures: Formula::boolean(true),
    };
    let mut current: Option<EventSpec> = None;
    let mut in_also = false;
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix("MACHINE ") {
            d.machine = name.trim().to_string();
        } else if let Some(r) = line.strip_prefix("static invariant ") {
            d.static_invariants.push(labeled(n, r)?);
        } else if let Some(r) = line.strip_prefix("redundant invariant ") {
            d.redundant_invariants.push(labeled(n, r)?);
        } else if let Some(r) = line.strip_prefix("constraint ") {
            d.constraints.push(formula(n, r)?);
        } else if let Some(r) = line.strip_prefix("invariant ") {
            d.invariants.push(labeled(n, r)?);
        } else if let Some(r) = line.strip_prefix("initially ") {
            d.initially = formula(n, r)?;
        } else if let Some(r) = line.strip_prefix("variant ") {
            d.variant = Some(formula(n, r)?);
        } else if let Some(name) = line.strip_prefix("SPEC ") {
            current = Some(EventSpec {
                name: name.trim().to_string(),
                params: vec![],
                normal: empty_case(),
                otherwise: empty_case(),
            });
            in_also = false;
        } else if line == "also" {
            in_also = true;
        } else if line == "END" {
            d.events
                .push(current.take().ok_or_else(|| err(n, "END outside SPEC"))?);
        } else if let Some((key, rest)) = line
            .split_once(':')
            .filter(|(k, _)| matches!(*k, "any" | "requires" | "assignable" | "ensures"))
        {
            let e = current
                .as_mut()
                .ok_or_else(|| err(n, "clause outside SPEC"))?;
            let case = if in_also {
                &mut e.otherwise
            } else {
                &mut e.normal
            };
            match key {
                "any" => e.params = list(rest),
                "requires" => case.requires = formula(n, rest)?,
                "assignable" => case.assignable = list(rest),
                _ => case.ensures = formula(n, rest)?,
            }
        } else if !matches!(
            line,
            "STATIC-INVARIANTS"
                | "REDUNDANT-INVARIANTS"
                | "CONSTRAINTS"
                | "INVARIANTS"
                | "INITIALLY"
                | "VARIANT"
        ) {
            return Err(err(n, format!("unexpected line `{line}`")));
        }
    }
    if current.is_some() {
        return Err(err(text.lines().count(), "unterminated SPEC"));
    }
    Ok(d)
}
