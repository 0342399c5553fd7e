//! Rendering back to the ASCII surface syntax with minimal parentheses.

use std::fmt::{self, Write};

use crate::model::{
    ActionKind, BinOp, Component, Context, Event, EventStatus, Formula, Labeled, Machine, Node,
    QuantSetOp, Quantifier, UnOp,
};

const QUANT: u8 = 0;
const IFF: u8 = 1;
const IMPLIES: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const NOT: u8 = 5;
const PRED: u8 = 6;
const KIND: u8 = 7;
const SETOP: u8 = 8;
const MAPLET: u8 = 9;
const RANGE: u8 = 10;
const ADD: u8 = 11;
const MUL: u8 = 12;
const POW: u8 = 13;
const UNARY: u8 = 14;
const POSTFIX: u8 = 15;
const ATOM: u8 = 16;

pub fn binop_symbol(op: BinOp) -> &'static str {
    match op {
        BinOp::And => "&",
        BinOp::Or => "or",
        BinOp::Implies => "=>",
        BinOp::Iff => "<=>",
        BinOp::Eq => "=",
        BinOp::Neq => "/=",
        BinOp::Lt => "<",
        BinOp::Le => "<=",
        BinOp::Gt => ">",
        BinOp::Ge => ">=",
        BinOp::In => ":",
        BinOp::NotIn => "/:",
        BinOp::Subset => "<:",
        BinOp::NotSubset => "/<:",
        BinOp::PSubset => "<<:",
        BinOp::NotPSubset => "/<<:",
        BinOp::Add => "+",
        BinOp::Sub => "-",
        BinOp::Mul => "*",
        BinOp::Div => "/",
        BinOp::Mod => "mod",
        BinOp::Exp => "^",
        BinOp::Maplet => "|->",
        BinOp::Range => "..",
        BinOp::Union => "\\/",
        BinOp::Inter => "/\\",
        BinOp::Diff => "\\",
        BinOp::Cross => "**",
        BinOp::DomRes => "<|",
        BinOp::RanRes => "|>",
        BinOp::DomSub => "<<|",
        BinOp::RanSub => "|>>",
        BinOp::FComp => ";",
        BinOp::BComp => "circ",
        BinOp::Ovl => "<+",
        BinOp::DProd => "><",
        BinOp::PProd => "||",
        BinOp::Kind(k) => k.ascii(),
        BinOp::Apply => "apply",
        BinOp::Image => "image",
    }
}

/// (own level, minimum level of the left operand, of the right operand)
fn bin_levels(op: BinOp) -> (u8, u8, u8) {
    match op {
        BinOp::Iff => (IFF, IMPLIES, IMPLIES),
        BinOp::Implies => (IMPLIES, OR, IMPLIES),
        BinOp::Or => (OR, OR, AND),
        BinOp::And => (AND, AND, NOT),
        BinOp::Kind(_) => (KIND, SETOP, KIND),
        BinOp::Maplet => (MAPLET, MAPLET, RANGE),
        BinOp::Range => (RANGE, ADD, ADD),
        BinOp::Add | BinOp::Sub => (ADD, ADD, MUL),
        BinOp::Mul | BinOp::Div | BinOp::Mod => (MUL, MUL, POW),
        BinOp::Exp => (POW, UNARY, POW),
        BinOp::Apply | BinOp::Image => (POSTFIX, POSTFIX, QUANT),
        op if op.is_relational_predicate() => (PRED, KIND, KIND),
        _ => (SETOP, SETOP, MAPLET),
    }
}

fn level(f: &Formula) -> u8 {
    match &f.node {
        Node::Int(i) if *i < 0 => UNARY,
        Node::Int(_) | Node::Bool(_) | Node::Ident(_) | Node::Universe(_) => ATOM,
        Node::SetExt(_) | Node::Comprehension(..) | Node::Call(..) | Node::Old(_) => ATOM,
        Node::Unary(UnOp::Not, _) => NOT,
        Node::Unary(UnOp::Neg, _) => UNARY,
        Node::Unary(UnOp::Inverse, _) => POSTFIX,
        Node::Bin(op, _, _) => bin_levels(*op).0,
        Node::Quant(..) | Node::QuantSet(..) => QUANT,
    }
}

struct R<'a>(&'a Formula, u8);

impl fmt::Display for R<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let R(f, min) = *self;
        if level(f) < min {
            write!(out, "(")?;
            write_formula(out, f)?;
            write!(out, ")")
        } else {
            write_formula(out, f)
        }
    }
}

fn write_list(out: &mut fmt::Formatter<'_>, items: &[Formula]) -> fmt::Result {
    for (i, x) in items.iter().enumerate() {
        if i > 0 {
            out.write_str(", ")?;
        }
        write!(out, "{}", R(x, QUANT))?;
    }
    Ok(())
}

fn write_formula(out: &mut fmt::Formatter<'_>, f: &Formula) -> fmt::Result {
    match &f.node {
        Node::Int(i) => write!(out, "{i}"),
        Node::Bool(true) => out.write_str("TRUE"),
        Node::Bool(false) => out.write_str("FALSE"),
        Node::Ident(n) => out.write_str(n),
        Node::Universe(u) => out.write_str(u.name()),
        Node::Unary(UnOp::Not, a) => write!(out, "not {}", R(a, NOT)),
        Node::Unary(UnOp::Neg, a) => {
            if matches!(a.node, Node::Int(i) if i >= 0) {
                write!(out, "-({})", R(a, QUANT))
            } else {
                write!(out, "-{}", R(a, UNARY))
            }
        }
        Node::Unary(UnOp::Inverse, a) => write!(out, "{}~", R(a, POSTFIX)),
        Node::Bin(BinOp::Apply, a, b) => write!(out, "{}({})", R(a, POSTFIX), R(b, QUANT)),
        Node::Bin(BinOp::Image, a, b) => write!(out, "{}[{}]", R(a, POSTFIX), R(b, QUANT)),
        Node::Bin(BinOp::Range, a, b) => write!(out, "{}..{}", R(a, ADD), R(b, ADD)),
        Node::Bin(op, a, b) => {
            let (_, l, r) = bin_levels(*op);
            write!(out, "{} {} {}", R(a, l), binop_symbol(*op), R(b, r))
        }
        Node::Quant(q, bs, body) => {
            let sym = match q {
                Quantifier::Forall => "!",
                Quantifier::Exists => "#",
            };
            write!(out, "{sym}{} . {}", bs.join(","), R(body, QUANT))
        }
        Node::SetExt(xs) if xs.is_empty() => out.write_str("{}"),
        Node::SetExt(xs) => {
            out.write_str("{")?;
            write_list(out, xs)?;
            out.write_str("}")
        }
        Node::Comprehension(bs, p, e) => {
            write!(
                out,
                "{{{} . {} | {}}}",
                bs.join(","),
                R(p, QUANT),
                R(e, QUANT)
            )
        }
        Node::QuantSet(op, bs, p, e) => {
            let kw = match op {
                QuantSetOp::Union => "UNION",
                QuantSetOp::Inter => "INTER",
            };
            write!(
                out,
                "{kw} {} . {} | {}",
                bs.join(","),
                R(p, QUANT),
                R(e, QUANT)
            )
        }
        Node::Call(b, args) => {
            write!(out, "{}(", b.name())?;
            write_list(out, args)?;
            out.write_str(")")
        }
        Node::Old(a) => write!(out, "old({})", R(a, QUANT)),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self)
    }
}

pub fn render_formula(f: &Formula) -> String {
    f.to_string()
}

fn write_items(out: &mut String, items: &[&Labeled], indent: &str) {
    for l in items {
        let th = if l.theorem { "theorem " } else { "" };
        let _ = writeln!(out, "{indent}{th}@{} {}", l.label, l.formula);
    }
}

pub fn render_context(c: &Context) -> String {
    let mut s = format!("context {}\n", c.name);
    if !c.extends.is_empty() {
        let _ = writeln!(s, "extends {}", c.extends.join(" "));
    }
    if !c.sets.is_empty() {
        let _ = writeln!(s, "sets {}", c.sets.join(" "));
    }
    if !c.constants.is_empty() {
        let _ = writeln!(s, "constants {}", c.constants.join(" "));
    }
    if !c.axioms.is_empty() {
        s.push_str("axioms\n");
        write_items(&mut s, &c.axioms.iter().collect::<Vec<_>>(), "  ");
    }
    if !c.theorems.is_empty() {
        s.push_str("theorems\n");
        write_items(&mut s, &c.theorems.iter().collect::<Vec<_>>(), "  ");
    }
    s.push_str("end\n");
    s
}

fn render_event(s: &mut String, e: &Event) {
    let _ = write!(s, "  event {}", e.name);
    if e.status != EventStatus::Ordinary {
        let _ = write!(s, " status {}", e.status.name());
    }
    if e.extends {
        let _ = write!(s, " extends {}", e.refines.join(" "));
    } else if !e.refines.is_empty() {
        let _ = write!(s, " refines {}", e.refines.join(" "));
    }
    s.push('\n');
    if !e.params.is_empty() {
        let _ = writeln!(s, "    any {}", e.params.join(" "));
    }
    if !e.guards.is_empty() {
        s.push_str("    where\n");
        write_items(s, &e.guards.iter().collect::<Vec<_>>(), "      ");
    }
    if !e.witnesses.is_empty() {
        s.push_str("    with\n");
        for w in &e.witnesses {
            let _ = writeln!(s, "      @{} {}", w.name, w.formula);
        }
    }
    if !e.actions.is_empty() {
        s.push_str("    then\n");
        for a in &e.actions {
            let _ = write!(s, "      @{} ", a.label);
            match &a.kind {
                ActionKind::Deterministic { lhs, rhs } => {
                    let l: Vec<String> = lhs
                        .iter()
                        .map(|l| match &l.index {
                            Some(i) => format!("{}({})", l.name, i),
                            None => l.name.clone(),
                        })
                        .collect();
                    let r: Vec<String> = rhs.iter().map(|f| f.to_string()).collect();
                    let _ = writeln!(s, "{} := {}", l.join(", "), r.join(", "));
                }
                ActionKind::NonDeterministic { targets, pred } => {
                    let _ = writeln!(s, "{} :| {}", targets.join(", "), pred);
                }
            }
        }
    }
    s.push_str("  end\n");
}

pub fn render_machine(m: &Machine) -> String {
    let mut s = format!("machine {}", m.name);
    if let Some(r) = &m.refines {
        let _ = write!(s, " refines {r}");
    }
    if !m.sees.is_empty() {
        let _ = write!(s, " sees {}", m.sees.join(" "));
    }
    s.push('\n');
    if !m.variables.is_empty() {
        let _ = writeln!(s, "variables {}", m.variables.join(" "));
    }
    if !m.invariants.is_empty() {
        s.push_str("invariants\n");
        write_items(&mut s, &m.invariants.iter().collect::<Vec<_>>(), "  ");
    }
    if let Some(v) = &m.variant {
        let _ = writeln!(s, "variant {v}");
    }
    if !m.events.is_empty() {
        s.push_str("events\n");
        for e in &m.events {
            render_event(&mut s, e);
        }
    }
    s.push_str("end\n");
    s
}

pub fn render_component(c: &Component) -> String {
    match c {
        Component::Context(c) => render_context(c),
        Component::Machine(m) => render_machine(m),
    }
}
