//! S-expression rendering of sequents, a reader for it, and report rows.
//!
//! ```text
//! (vc search/inv1/INV
//!   (declare i' INT)
//!   (assume (! (= i' k) :named act1))
//!   (assert (: i' (.. 1 n))))
//! ```

use std::fmt::Write;

use thiserror::Error;

use crate::mathkit::RelKind;
use crate::model::{BinOp, Builtin, Formula, Node, QuantSetOp, Quantifier, Type, UnOp, Universe};
use crate::parser::binop_symbol;

use super::check::{CheckError, CheckResult};
use super::{Family, Hyp, Sequent};

const BINOPS: [BinOp; 39] = [
    BinOp::And,
    BinOp::Or,
    BinOp::Implies,
    BinOp::Iff,
    BinOp::Eq,
    BinOp::Neq,
    BinOp::Lt,
    BinOp::Le,
    BinOp::Gt,
    BinOp::Ge,
    BinOp::In,
    BinOp::NotIn,
    BinOp::Subset,
    BinOp::NotSubset,
    BinOp::PSubset,
    BinOp::NotPSubset,
    BinOp::Add,
    BinOp::Sub,
    BinOp::Mul,
    BinOp::Div,
    BinOp::Mod,
    BinOp::Exp,
    BinOp::Maplet,
    BinOp::Range,
    BinOp::Union,
    BinOp::Inter,
    BinOp::Diff,
    BinOp::Cross,
    BinOp::DomRes,
    BinOp::RanRes,
    BinOp::DomSub,
    BinOp::RanSub,
    BinOp::FComp,
    BinOp::BComp,
    BinOp::Ovl,
    BinOp::DProd,
    BinOp::PProd,
    BinOp::Apply,
    BinOp::Image,
];

fn binop_from(s: &str) -> Option<BinOp> {
    BINOPS
        .into_iter()
        .chain(RelKind::ALL.into_iter().map(BinOp::Kind))
        .find(|op| binop_symbol(*op) == s)
}

fn names(xs: &[String]) -> String {
    format!("({})", xs.join(" "))
}

/// Prefix rendering of a formula.
pub fn sexpr(f: &Formula) -> String {
    let mut out = String::new();
    write_sexpr(f, &mut out);
    out
}

fn write_sexpr(f: &Formula, out: &mut String) {
    let list = |head: &str, parts: &[&Formula], out: &mut String| {
        out.push('(');
        out.push_str(head);
        for p in parts {
            out.push(' ');
            write_sexpr(p, out);
        }
        out.push(')');
    };
    match &f.node {
        Node::Int(i) => {
            let _ = write!(out, "{i}");
        }
        Node::Bool(b) => out.push_str(if *b { "TRUE" } else { "FALSE" }),
        Node::Ident(n) => out.push_str(n),
        Node::Universe(u) => out.push_str(u.name()),
        Node::Unary(op, a) => {
            let head = match op {
                UnOp::Not => "not",
                UnOp::Neg => "neg",
                UnOp::Inverse => "~",
            };
            list(head, &[a], out);
        }
        Node::Bin(op, a, b) => list(binop_symbol(*op), &[a, b], out),
        Node::Quant(q, xs, body) => {
            let head = match q {
                Quantifier::Forall => "forall",
                Quantifier::Exists => "exists",
            };
            list(&format!("{head} {}", names(xs)), &[body], out);
        }
        Node::SetExt(xs) => list("set", &xs.iter().collect::<Vec<_>>(), out),
        Node::Comprehension(xs, p, e) => list(&format!("cset {}", names(xs)), &[p, e], out),
        Node::QuantSet(op, xs, p, e) => {
            let head = match op {
                QuantSetOp::Union => "UNION",
                QuantSetOp::Inter => "INTER",
            };
            list(&format!("{head} {}", names(xs)), &[p, e], out);
        }
        Node::Call(b, args) => list(
            &format!("call {}", b.name()),
            &args.iter().collect::<Vec<_>>(),
            out,
        ),
        Node::Old(a) => list("old", &[a], out),
    }
}

fn type_sexpr(t: &Type) -> String {
    match t {
        Type::Int => "INT".into(),
        Type::Bool => "BOOL".into(),
        Type::Carrier(c) => c.clone(),
        Type::Set(e) => format!("(POW {})", type_sexpr(e)),
        Type::Pair(a, b) => format!("(** {} {})", type_sexpr(a), type_sexpr(b)),
    }
}

pub fn emit_vc(seq: &Sequent) -> String {
    let mut out = format!("(vc {}\n", seq.name);
    for (n, t) in &seq.symbols {
        let _ = writeln!(out, "  (declare {n} {})", type_sexpr(t));
    }
    for h in &seq.hyps {
        let _ = writeln!(
            out,
            "  (assume (! {} :named {}))",
            sexpr(&h.formula),
            h.label
        );
    }
    let _ = writeln!(out, "  (assert {}))", sexpr(&seq.goal));
    out
}

/// `name | family | verdict | states | ms`
pub fn report_row(seq: &Sequent, result: &Result<CheckResult, CheckError>) -> String {
    match result {
        Ok(r) => format!(
            "{} | {} | {} | {} | {:.1}",
            seq.name,
            seq.family,
            r.verdict,
            r.states,
            r.elapsed.as_secs_f64() * 1000.0
        ),
        Err(e) => format!("{} | {} | Error({e}) | 0 | 0.0", seq.name, seq.family),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("vc: {0}")]
pub struct VcError(String);

fn bad<T>(msg: impl Into<String>) -> Result<T, VcError> {
    Err(VcError(msg.into()))
}

#[derive(Clone, Debug, PartialEq)]
enum Sx {
    Atom(String),
    List(Vec<Sx>),
}

fn read_sx(text: &str) -> Result<Sx, VcError> {
    let mut stack: Vec<Vec<Sx>> = vec![Vec::new()];
    let mut atom = String::new();
    let flush = |atom: &mut String, stack: &mut Vec<Vec<Sx>>| {
        if !atom.is_empty() {
            stack
                .last_mut()
                .expect("open list")
                .push(Sx::Atom(std::mem::take(atom)));
        }
    };
    for c in text.chars() {
        match c {
            '(' => {
                flush(&mut atom, &mut stack);
                stack.push(Vec::new());
            }
            ')' => {
                flush(&mut atom, &mut stack);
                let done = stack.pop().expect("open list");
                match stack.last_mut() {
                    Some(parent) => parent.push(Sx::List(done)),
                    None => return bad("unbalanced `)`"),
                }
            }
            c if c.is_whitespace() => flush(&mut atom, &mut stack),
            c => atom.push(c),
        }
    }
    flush(&mut atom, &mut stack);
    match (stack.len(), stack.pop()) {
        (1, Some(mut top)) if top.len() == 1 => Ok(top.remove(0)),
        (1, _) => bad("expected exactly one top-level form"),
        _ => bad("unbalanced `(`"),
    }
}

fn atom(s: &Sx) -> Result<&str, VcError> {
    match s {
        Sx::Atom(a) => Ok(a),
        Sx::List(_) => bad("expected an atom"),
    }
}

fn binder_list(s: &Sx) -> Result<Vec<String>, VcError> {
    match s {
        Sx::List(xs) => xs.iter().map(|x| atom(x).map(str::to_string)).collect(),
        Sx::Atom(_) => bad("expected a binder list"),
    }
}

fn to_formula(s: &Sx) -> Result<Formula, VcError> {
    let node = match s {
        Sx::Atom(a) => {
            if let Ok(i) = a.parse::<i64>() {
                Node::Int(i)
            } else {
                match a.as_str() {
                    "TRUE" => Node::Bool(true),
                    "FALSE" => Node::Bool(false),
                    "INT" => Node::Universe(Universe::Int),
                    "NAT" => Node::Universe(Universe::Nat),
                    "NAT1" => Node::Universe(Universe::Nat1),
                    "BOOL" => Node::Universe(Universe::Bool),
                    _ => Node::Ident(a.clone()),
                }
            }
        }
        Sx::List(xs) => {
            let Some((head, rest)) = xs.split_first() else {
                return bad("empty list");
            };
            let head = atom(head)?;
            let args = |from: usize| {
                rest[from..]
                    .iter()
                    .map(to_formula)
                    .collect::<Result<Vec<_>, _>>()
            };
            let one = |i: usize| -> Result<Box<Formula>, VcError> {
                rest.get(i)
                    .map(to_formula)
                    .transpose()?
                    .map(Box::new)
                    .ok_or_else(|| VcError(format!("`{head}` is missing an operand")))
            };
            match head {
                "not" => Node::Unary(UnOp::Not, one(0)?),
                "neg" => Node::Unary(UnOp::Neg, one(0)?),
                "~" => Node::Unary(UnOp::Inverse, one(0)?),
                "old" => Node::Old(one(0)?),
                "set" => Node::SetExt(args(0)?),
                "forall" | "exists" => {
                    let q = if head == "forall" {
                        Quantifier::Forall
                    } else {
                        Quantifier::Exists
                    };
                    Node::Quant(
                        q,
                        binder_list(rest.first().ok_or(VcError("binders".into()))?)?,
                        one(1)?,
                    )
                }
                "cset" => Node::Comprehension(
                    binder_list(rest.first().ok_or(VcError("binders".into()))?)?,
                    one(1)?,
                    one(2)?,
                ),
                "UNION" | "INTER" => {
                    let op = if head == "UNION" {
                        QuantSetOp::Union
                    } else {
                        QuantSetOp::Inter
                    };
                    Node::QuantSet(
                        op,
                        binder_list(rest.first().ok_or(VcError("binders".into()))?)?,
                        one(1)?,
                        one(2)?,
                    )
                }
                "call" => {
                    let name = atom(rest.first().ok_or(VcError("builtin name".into()))?)?;
                    let b = Builtin::from_name(name)
                        .ok_or_else(|| VcError(format!("unknown builtin `{name}`")))?;
                    Node::Call(b, args(1)?)
                }
                op => match binop_from(op) {
                    Some(op) => Node::Bin(op, one(0)?, one(1)?),
                    None => return bad(format!("unknown operator `{op}`")),
                },
            }
        }
    };
    Ok(Formula::synth(node))
}

fn to_type(s: &Sx) -> Result<Type, VcError> {
    match s {
        Sx::Atom(a) => Ok(match a.as_str() {
            "INT" => Type::Int,
            "BOOL" => Type::Bool,
            c => Type::Carrier(c.to_string()),
        }),
        Sx::List(xs) => match xs.as_slice() {
            [Sx::Atom(p), e] if p == "POW" => Ok(Type::set(to_type(e)?)),
            [Sx::Atom(p), a, b] if p == "**" => Ok(Type::pair(to_type(a)?, to_type(b)?)),
            _ => bad("malformed type"),
        },
    }
}

/// Reads a document written by [`emit_vc`]. Formulas come back without
/// spans or types.
pub fn parse_vc(text: &str) -> Result<Sequent, VcError> {
    let Sx::List(items) = read_sx(text)? else {
        return bad("expected `(vc ...)`");
    };
    let (head, rest) = items
        .split_first()
        .ok_or(VcError("empty document".into()))?;
    if atom(head)? != "vc" {
        return bad("expected `vc`");
    }
    let name = atom(rest.first().ok_or(VcError("missing name".into()))?)?.to_string();
    let family = name
        .rsplit('/')
        .next()
        .and_then(Family::from_name)
        .ok_or_else(|| VcError(format!("no family in `{name}`")))?;
    let mut symbols = Vec::new();
    let mut hyps = Vec::new();
    let mut goal = None;
    for item in &rest[1..] {
        let Sx::List(parts) = item else {
            return bad("expected a clause");
        };
        match parts.as_slice() {
            [Sx::Atom(k), n, t] if k == "declare" => {
                symbols.push((atom(n)?.to_string(), to_type(t)?))
            }
            [Sx::Atom(k), Sx::List(named)] if k == "assume" => match named.as_slice() {
                [Sx::Atom(bang), f, Sx::Atom(kw), Sx::Atom(label)]
                    if bang == "!" && kw == ":named" =>
                {
                    hyps.push(Hyp {
                        label: label.clone(),
                        formula: to_formula(f)?,
                    })
                }
                _ => return bad("expected `(assume (! F :named label))`"),
            },
            [Sx::Atom(k), f] if k == "assert" => goal = Some(to_formula(f)?),
            _ => return bad("unknown clause"),
        }
    }
    Ok(Sequent {
        name,
        family,
        hyps,
        goal: goal.ok_or(VcError("missing assert".into()))?,
        symbols,
    })
}
