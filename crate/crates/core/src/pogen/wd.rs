//! Well-definedness conditions of partial operators.

use crate::mathkit::RelKind;
use crate::model::{BinOp, Builtin, Formula, Node, Type, Universe};

enum Ctx<'a> {
    Binders(&'a [String]),
    Assume(Formula),
}

/// A type written as the set of all its values, e.g. `POW(INT ** D)`.
pub fn type_set(t: &Type) -> Formula {
    match t {
        Type::Int => Formula::synth(Node::Universe(Universe::Int)),
        Type::Bool => Formula::synth(Node::Universe(Universe::Bool)),
        Type::Carrier(c) => Formula::ident(c.clone()),
        Type::Set(e) => Formula::synth(Node::Call(Builtin::Pow, vec![type_set(e)])),
        Type::Pair(a, b) => Formula::bin(BinOp::Cross, type_set(a), type_set(b)),
    }
}

fn close(cond: Formula, ctx: &[Ctx]) -> Formula {
    ctx.iter().rev().fold(cond, |acc, c| match c {
        Ctx::Assume(p) => Formula::bin(BinOp::Implies, p.clone(), acc),
        Ctx::Binders(xs) => Formula::synth(Node::Quant(
            crate::model::Quantifier::Forall,
            xs.to_vec(),
            Box::new(acc),
        )),
    })
}

fn visit<'a>(f: &'a Formula, ctx: &mut Vec<Ctx<'a>>, out: &mut Vec<Formula>) {
    match &f.node {
        Node::Bin(BinOp::And | BinOp::Implies, a, b) => {
            visit(a, ctx, out);
            ctx.push(Ctx::Assume((**a).clone()));
            visit(b, ctx, out);
            ctx.pop();
        }
        Node::Bin(BinOp::Or, a, b) => {
            visit(a, ctx, out);
            ctx.push(Ctx::Assume(Formula::not((**a).clone())));
            visit(b, ctx, out);
            ctx.pop();
        }
        Node::Quant(_, xs, body) => {
            ctx.push(Ctx::Binders(xs));
            visit(body, ctx, out);
            ctx.pop();
        }
        Node::Comprehension(xs, p, e) | Node::QuantSet(_, xs, p, e) => {
            ctx.push(Ctx::Binders(xs));
            visit(p, ctx, out);
            ctx.push(Ctx::Assume((**p).clone()));
            visit(e, ctx, out);
            ctx.pop();
            ctx.pop();
        }
        Node::Bin(BinOp::Apply, fun, arg) => {
            visit(fun, ctx, out);
            visit(arg, ctx, out);
            let in_dom = Formula::bin(
                BinOp::In,
                (**arg).clone(),
                Formula::synth(Node::Call(Builtin::Dom, vec![(**fun).clone()])),
            );
            let cond = match fun.ty.as_ref().and_then(|t| t.elem()) {
                Some(Type::Pair(a, b)) => Formula::bin(
                    BinOp::And,
                    in_dom,
                    Formula::bin(
                        BinOp::In,
                        (**fun).clone(),
                        Formula::bin(BinOp::Kind(RelKind::PartialFun), type_set(a), type_set(b)),
                    ),
                ),
                _ => in_dom,
            };
            out.push(close(cond, ctx));
        }
        Node::Bin(BinOp::Div | BinOp::Mod, a, b) => {
            visit(a, ctx, out);
            visit(b, ctx, out);
            out.push(close(
                Formula::bin(BinOp::Neq, (**b).clone(), Formula::int(0)),
                ctx,
            ));
        }
        Node::Call(Builtin::Min | Builtin::Max, args) => {
            for a in args {
                visit(a, ctx, out);
            }
            let empty = Formula::synth(Node::SetExt(vec![]));
            out.push(close(Formula::bin(BinOp::Neq, args[0].clone(), empty), ctx));
        }
        _ => {
            for c in f.children() {
                visit(c, ctx, out);
            }
        }
    }
}

/// One condition per partial-operator occurrence, closed over the binders
/// and left-hand assumptions in scope, in preorder.
pub fn wd_conditions(f: &Formula) -> Vec<Formula> {
    let mut out = Vec::new();
    visit(f, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_formula, render_formula};

    fn wd(src: &str) -> Vec<String> {
        wd_conditions(&parse_formula(src).unwrap())
            .iter()
            .map(render_formula)
            .collect()
    }

    #[test]
    fn conditions_per_occurrence() {
        assert_eq!(wd("x + 1 > 0"), Vec::<String>::new());
        assert_eq!(wd("a / b > c mod d"), ["b /= 0", "d /= 0"]);
        assert_eq!(wd("f(k) = v"), ["k : dom(f)"]);
        assert_eq!(wd("k : 1..n & f(k) = v"), ["k : 1..n => k : dom(f)"]);
        assert_eq!(
            wd("!i . i : 1..n => f(i) > 0"),
            ["!i . i : 1..n => i : dom(f)"]
        );
        assert_eq!(wd("min(s) < 2"), ["s /= {}"]);
    }
}
