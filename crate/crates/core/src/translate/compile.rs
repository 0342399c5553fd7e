//! Lowering of typed formulas to [`Code`].

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::mathkit::{
    AggregateOp, ArithOp, CombineOp, RelUnaryOp, RestrictOp, SetBinOp, SetValue, Value,
};
use crate::model::{
    BinOp, Builtin, Formula, Node, QuantSetOp, Quantifier, Span, Type, UnOp, Universe,
};

use super::code::{BinderPlan, Cmp, Code, Domain, Level, SetCode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("{span}: {what} is outside the executable subset")]
    Unsupported { span: Span, what: String },
    #[error("{span}: unknown identifier `{name}`")]
    Unknown { span: Span, name: String },
}

fn unsupported(f: &Formula, what: impl Into<String>) -> CompileError {
    CompileError::Unsupported {
        span: f.span.clone(),
        what: what.into(),
    }
}

/// Name-to-slot bindings with shadowing, plus the slot allocator.
#[derive(Clone, Debug, Default)]
pub struct Scope {
    stack: Vec<(String, usize)>,
    pub size: usize,
    /// Lets integer binders without a syntactic bound range over the
    /// configured integer interval.
    pub int_grounding: bool,
    /// Types of binders that no formula mentions.
    pub declared: HashMap<String, Type>,
}

impl Scope {
    pub fn new() -> Self {
        Scope::default()
    }

    /// Allocates a fresh slot for `name`.
    pub fn declare(&mut self, name: &str) -> usize {
        let slot = self.size;
        self.size += 1;
        self.stack.push((name.to_string(), slot));
        slot
    }

    /// Makes `name` refer to an existing slot.
    pub fn alias(&mut self, name: &str, slot: usize) {
        self.stack.push((name.to_string(), slot));
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.stack
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, s)| *s)
    }

    pub fn mark(&self) -> usize {
        self.stack.len()
    }

    pub fn restore(&mut self, mark: usize) {
        self.stack.truncate(mark);
    }
}

fn b(c: Code) -> Box<Code> {
    Box::new(c)
}

fn is_symbolic(f: &Formula) -> bool {
    match &f.node {
        Node::Universe(u) => *u != Universe::Bool,
        Node::Bin(BinOp::Kind(_), a, c) | Node::Bin(BinOp::Cross, a, c) => {
            is_symbolic(a) || is_symbolic(c)
        }
        Node::Call(Builtin::Pow | Builtin::Pow1, args) => is_symbolic(&args[0]),
        _ => false,
    }
}

pub fn compile(f: &Formula, sc: &mut Scope) -> Result<Code, CompileError> {
    use BinOp::*;
    Ok(match &f.node {
        Node::Int(i) => Code::Const(Value::Int(*i)),
        Node::Bool(v) => Code::Const(Value::Bool(*v)),
        Node::Ident(n) => Code::Slot(sc.lookup(n).ok_or_else(|| CompileError::Unknown {
            span: f.span.clone(),
            name: n.clone(),
        })?),
        Node::Universe(Universe::Bool) => Code::Const(Value::Set(SetValue::from_vec(vec![
            Value::Bool(false),
            Value::Bool(true),
        ]))),
        Node::Universe(u) if sc.int_grounding => Code::Grounded(*u),
        Node::Universe(u) => return Err(unsupported(f, format!("the infinite set {}", u.name()))),
        Node::Unary(UnOp::Not, a) => Code::Not(b(compile(a, sc)?)),
        Node::Unary(UnOp::Neg, a) => Code::Neg(b(compile(a, sc)?)),
        Node::Unary(UnOp::Inverse, a) => Code::RelUnary(RelUnaryOp::Inverse, b(compile(a, sc)?)),
        Node::Bin(op, x, y) => {
            let pair = |sc: &mut Scope| -> Result<(Box<Code>, Box<Code>), CompileError> {
                Ok((b(compile(x, sc)?), b(compile(y, sc)?)))
            };
            match op {
                And => {
                    let mut parts = Vec::new();
                    for c in f.conjuncts() {
                        parts.push(compile(c, sc)?);
                    }
                    Code::And(parts)
                }
                Or => {
                    let (l, r) = pair(sc)?;
                    match *l {
                        Code::Or(mut xs) => {
                            xs.push(*r);
                            Code::Or(xs)
                        }
                        l => Code::Or(vec![l, *r]),
                    }
                }
                Implies => {
                    let (l, r) = pair(sc)?;
                    Code::Implies(l, r)
                }
                Iff => {
                    let (l, r) = pair(sc)?;
                    Code::Iff(l, r)
                }
                Eq | Neq => {
                    if is_symbolic(x) || is_symbolic(y) {
                        return Err(unsupported(f, "equality with an infinite set"));
                    }
                    let (l, r) = pair(sc)?;
                    let eq = Code::Eq(l, r);
                    if *op == Eq {
                        eq
                    } else {
                        Code::Not(b(eq))
                    }
                }
                Lt | Le | Gt | Ge => {
                    let cmp = match op {
                        Lt => Cmp::Lt,
                        Le => Cmp::Le,
                        Gt => Cmp::Gt,
                        _ => Cmp::Ge,
                    };
                    let (l, r) = pair(sc)?;
                    Code::Cmp(cmp, l, r)
                }
                In | NotIn => {
                    let member = match &y.node {
                        Node::Bin(Range, lo, hi) => Code::InRange(
                            b(compile(x, sc)?),
                            b(compile(lo, sc)?),
                            b(compile(hi, sc)?),
                        ),
                        _ => Code::Member(b(compile(x, sc)?), Box::new(compile_set(y, sc)?)),
                    };
                    if *op == In {
                        member
                    } else {
                        Code::Not(b(member))
                    }
                }
                Subset | NotSubset | PSubset | NotPSubset => {
                    let test = Code::Subset {
                        elem: b(compile(x, sc)?),
                        of: Box::new(compile_set(y, sc)?),
                        strict: matches!(op, PSubset | NotPSubset),
                    };
                    if matches!(op, Subset | PSubset) {
                        test
                    } else {
                        Code::Not(b(test))
                    }
                }
                Add | Sub | Mul | Div | Mod | Exp => {
                    let a = match op {
                        Add => ArithOp::Add,
                        Sub => ArithOp::Sub,
                        Mul => ArithOp::Mul,
                        Div => ArithOp::Div,
                        Mod => ArithOp::Mod,
                        _ => ArithOp::Exp,
                    };
                    let (l, r) = pair(sc)?;
                    Code::Arith(a, l, r)
                }
                Maplet => {
                    let (l, r) = pair(sc)?;
                    Code::Maplet(l, r)
                }
                Range => {
                    let (l, r) = pair(sc)?;
                    Code::Range(l, r)
                }
                Union | Inter | Diff => {
                    let o = match op {
                        Union => SetBinOp::Union,
                        Inter => SetBinOp::Intersection,
                        _ => SetBinOp::Difference,
                    };
                    let (l, r) = pair(sc)?;
                    Code::SetBin(o, l, r)
                }
                Cross => {
                    let (l, r) = pair(sc)?;
                    Code::Cross(l, r)
                }
                DomRes | DomSub => {
                    let o = if *op == DomRes {
                        RestrictOp::DomRes
                    } else {
                        RestrictOp::DomSub
                    };
                    let (s, r) = pair(sc)?;
                    Code::Restrict(o, s, r)
                }
                RanRes | RanSub => {
                    let o = if *op == RanRes {
                        RestrictOp::RanRes
                    } else {
                        RestrictOp::RanSub
                    };
                    let (r, s) = pair(sc)?;
                    Code::Restrict(o, s, r)
                }
                FComp | BComp | Ovl | DProd | PProd => {
                    let o = match op {
                        FComp => CombineOp::FComp,
                        BComp => CombineOp::BComp,
                        Ovl => CombineOp::Override,
                        DProd => CombineOp::DProd,
                        _ => CombineOp::PProd,
                    };
                    let (l, r) = pair(sc)?;
                    Code::Combine(o, l, r)
                }
                Kind(k) => {
                    let (l, r) = pair(sc)?;
                    Code::KindSet(*k, l, r)
                }
                Apply => {
                    let (l, r) = pair(sc)?;
                    Code::Apply(l, r)
                }
                Image => {
                    let (l, r) = pair(sc)?;
                    Code::Image(l, r)
                }
            }
        }
        Node::Quant(q, bs, body) => {
            let (conds, rest): (Vec<&Formula>, Option<&Formula>) = match (q, &body.node) {
                (Quantifier::Forall, Node::Bin(BinOp::Implies, a, c)) => (a.conjuncts(), Some(c)),
                (Quantifier::Forall, _) => (vec![], Some(body)),
                (Quantifier::Exists, _) => (body.conjuncts(), None),
            };
            let mark = sc.mark();
            let plan = compile_plan(bs, &conds, &[body], sc)?;
            let body = match rest {
                Some(r) => compile(r, sc)?,
                None => Code::Const(Value::Bool(true)),
            };
            sc.restore(mark);
            Code::Quant {
                forall: *q == Quantifier::Forall,
                plan,
                body: b(body),
            }
        }
        Node::SetExt(xs) => {
            let mut out = Vec::with_capacity(xs.len());
            for x in xs {
                out.push(compile(x, sc)?);
            }
            if out.iter().all(|c| matches!(c, Code::Const(_))) {
                let vals = out
                    .into_iter()
                    .map(|c| match c {
                        Code::Const(v) => v,
                        _ => unreachable!(),
                    })
                    .collect();
                Code::Const(Value::Set(SetValue::from_vec(vals)))
            } else {
                Code::SetExt(out)
            }
        }
        Node::Comprehension(bs, p, e) | Node::QuantSet(_, bs, p, e) => {
            let mark = sc.mark();
            let plan = compile_plan(bs, &p.conjuncts(), &[p, e], sc)?;
            let expr = b(compile(e, sc)?);
            sc.restore(mark);
            match &f.node {
                Node::QuantSet(op, ..) => Code::QuantSet {
                    union: *op == QuantSetOp::Union,
                    plan,
                    expr,
                },
                _ => Code::Collect { plan, expr },
            }
        }
        Node::Call(bi, args) => {
            let arg = &args[0];
            if *bi == Builtin::Finite {
                if is_symbolic(arg) {
                    return Ok(Code::Const(Value::Bool(false)));
                }
                return Ok(Code::Aggregate(AggregateOp::Finite, b(compile(arg, sc)?)));
            }
            let a = b(compile(arg, sc)?);
            match bi {
                Builtin::Dom => Code::RelUnary(RelUnaryOp::Domain, a),
                Builtin::Ran => Code::RelUnary(RelUnaryOp::Range, a),
                Builtin::Id => Code::RelUnary(RelUnaryOp::IdentityOn, a),
                Builtin::Card => Code::Aggregate(AggregateOp::Card, a),
                Builtin::Min => Code::Aggregate(AggregateOp::Min, a),
                Builtin::Max => Code::Aggregate(AggregateOp::Max, a),
                Builtin::Union => Code::Aggregate(AggregateOp::GenUnion, a),
                Builtin::Inter => Code::Aggregate(AggregateOp::GenInter, a),
                Builtin::Pow => Code::Pow(a, false),
                Builtin::Pow1 => Code::Pow(a, true),
                Builtin::Prj1 => Code::Prj(true, a),
                Builtin::Prj2 => Code::Prj(false, a),
                Builtin::Finite => unreachable!(),
            }
        }
        Node::Old(_) => return Err(unsupported(f, "a pre-state marker")),
    })
}

/// Compiles the right-hand side of `:` or `<:`. Relation sets, power sets
/// and products stay symbolic so that membership never enumerates them.
pub fn compile_set(f: &Formula, sc: &mut Scope) -> Result<SetCode, CompileError> {
    let structural = matches!(
        &f.node,
        Node::Bin(BinOp::Kind(_) | BinOp::Cross, ..) | Node::Call(Builtin::Pow | Builtin::Pow1, _)
    );
    if !structural && !is_symbolic(f) {
        return Ok(SetCode::Value(compile(f, sc)?));
    }
    Ok(match &f.node {
        Node::Universe(Universe::Int) => SetCode::Int,
        Node::Universe(Universe::Nat) => SetCode::Nat,
        Node::Universe(Universe::Nat1) => SetCode::Nat1,
        Node::Bin(BinOp::Kind(k), a, c) => SetCode::Kind(
            *k,
            Box::new(compile_set(a, sc)?),
            Box::new(compile_set(c, sc)?),
        ),
        Node::Bin(BinOp::Cross, a, c) => {
            SetCode::Cross(Box::new(compile_set(a, sc)?), Box::new(compile_set(c, sc)?))
        }
        Node::Call(bi, args) => {
            SetCode::Pow(Box::new(compile_set(&args[0], sc)?), *bi == Builtin::Pow1)
        }
        _ => unreachable!("is_symbolic covers these shapes"),
    })
}

/// Type of the first annotated free occurrence of `name`.
fn binder_type(name: &str, hints: &[&Formula]) -> Option<Type> {
    fn find(f: &Formula, name: &str) -> Option<Type> {
        match &f.node {
            Node::Ident(n) if n == name => f.ty.clone(),
            _ if f.binders().iter().any(|b| b == name) => None,
            _ => f.children().into_iter().find_map(|c| find(c, name)),
        }
    }
    hints.iter().find_map(|h| find(h, name))
}

pub(crate) enum Pattern<'a> {
    In(&'a Formula),
    Subset(&'a Formula),
    Equal(&'a Formula),
}

/// With `grounded`, infinite integer sets count as enumerable.
pub(crate) fn pattern<'a>(c: &'a Formula, x: &str, grounded: bool) -> Option<Pattern<'a>> {
    let is_x = |f: &Formula| f.as_ident() == Some(x);
    let is_symbolic = |f: &Formula| !grounded && is_symbolic(f);
    match &c.node {
        Node::Bin(BinOp::In, l, r) if is_x(l) && !is_symbolic(r) => Some(Pattern::In(r)),
        Node::Bin(BinOp::Subset, l, r) if is_x(l) && !is_symbolic(r) => Some(Pattern::Subset(r)),
        Node::Bin(BinOp::Eq, l, r) if is_x(l) => Some(Pattern::Equal(r)),
        Node::Bin(BinOp::Eq, l, r) if is_x(r) => Some(Pattern::Equal(l)),
        _ => None,
    }
}

/// Declares `binders` in `sc` and plans their enumeration. Each binder's
/// domain comes from the first conjunct of the form `x : E`, `x <: E` or
/// `x = E` whose right side mentions only earlier binders; otherwise from
/// its type. The remaining conjuncts become filters at the earliest level
/// where they are decidable. The caller restores the scope.
pub fn compile_plan(
    binders: &[String],
    conjuncts: &[&Formula],
    hints: &[&Formula],
    sc: &mut Scope,
) -> Result<BinderPlan, CompileError> {
    let slots: Vec<usize> = binders.iter().map(|b| sc.declare(b)).collect();
    let deps: Vec<BTreeSet<usize>> = conjuncts
        .iter()
        .map(|c| {
            let fv = c.free_vars();
            binders
                .iter()
                .enumerate()
                .filter(|(_, b)| fv.contains(*b))
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    let mut used = vec![false; conjuncts.len()];
    let mut levels = Vec::with_capacity(binders.len());
    for (i, x) in binders.iter().enumerate() {
        let mut domain = None;
        for (ci, c) in conjuncts.iter().enumerate() {
            if used[ci] {
                continue;
            }
            let Some(p) = pattern(c, x, sc.int_grounding) else {
                continue;
            };
            let rhs = match &p {
                Pattern::In(r) | Pattern::Subset(r) | Pattern::Equal(r) => *r,
            };
            let later = rhs.free_vars();
            if binders[i..].iter().any(|b| later.contains(b)) {
                continue;
            }
            domain = Some(match p {
                Pattern::In(r) => match &r.node {
                    Node::Bin(BinOp::Range, lo, hi) => {
                        Domain::Range(compile(lo, sc)?, compile(hi, sc)?)
                    }
                    _ => Domain::Elements(compile(r, sc)?),
                },
                Pattern::Subset(r) => Domain::Subsets(compile(r, sc)?),
                Pattern::Equal(r) => Domain::Equal(compile(r, sc)?),
            });
            used[ci] = true;
            break;
        }
        let domain = match domain {
            Some(d) => d,
            None => {
                let c = conjuncts.first().copied().or(hints.first().copied());
                let ty = binder_type(x, &[conjuncts, hints].concat())
                    .or_else(|| sc.declared.get(x).cloned())
                    .ok_or_else(|| CompileError::Unsupported {
                        span: c.map(|c| c.span.clone()).unwrap_or_default(),
                        what: format!("untyped binder `{x}`"),
                    })?;
                if ty.mentions_int() && !sc.int_grounding {
                    return Err(CompileError::Unsupported {
                        span: c.map(|c| c.span.clone()).unwrap_or_default(),
                        what: format!("integer binder `{x}` without a finite bound"),
                    });
                }
                Domain::Type(ty)
            }
        };
        levels.push(Level {
            name: x.clone(),
            slot: slots[i],
            domain,
            filters: Vec::new(),
        });
    }
    for (ci, c) in conjuncts.iter().enumerate() {
        if used[ci] {
            continue;
        }
        let at = deps[ci].iter().max().copied().unwrap_or(0);
        let code = compile(c, sc)?;
        if let Some(l) = levels.get_mut(at) {
            l.filters.push(code);
        }
    }
    Ok(BinderPlan { levels })
}
