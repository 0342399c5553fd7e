//! Typing rules for formula nodes.

use std::collections::HashMap;

use super::unify::{Term, Unifier};
use super::TypeError;
use crate::model::{unprimed, BinOp, Builtin, Formula, Node, Span, UnOp, Universe};

/// Inference state for one component. `nodes` records every visited node's
/// term in pre-order so that the annotation pass can replay it.
pub(crate) struct Infer<'g> {
    pub u: Unifier,
    pub globals: &'g HashMap<String, Term>,
    pub locals: Vec<(String, Term)>,
    pub nodes: Vec<Term>,
}

impl<'g> Infer<'g> {
    pub fn new(globals: &'g HashMap<String, Term>) -> Self {
        Infer {
            u: Unifier::default(),
            globals,
            locals: Vec::new(),
            nodes: Vec::new(),
        }
    }

    pub fn lookup(&self, name: &str) -> Option<Term> {
        let find = |n: &str| {
            self.locals
                .iter()
                .rev()
                .find(|(k, _)| k == n)
                .map(|(_, t)| t.clone())
                .or_else(|| self.globals.get(n).cloned())
        };
        find(name).or_else(|| unprimed(name).and_then(find))
    }

    pub fn expect(&mut self, span: &Span, want: &Term, got: &Term) -> Result<(), TypeError> {
        if self.u.unify(want, got) {
            Ok(())
        } else {
            Err(TypeError::Mismatch {
                span: span.clone(),
                expected: self.u.resolve(want).to_string(),
                found: self.u.resolve(got).to_string(),
            })
        }
    }

    fn check(&mut self, f: &Formula, want: &Term) -> Result<(), TypeError> {
        let got = self.formula(f)?;
        self.expect(&f.span, want, &got)
    }

    fn set_of(&mut self, f: &Formula) -> Result<Term, TypeError> {
        let e = self.u.fresh();
        self.check(f, &Term::set(e.clone()))?;
        Ok(e)
    }

    fn rel_of(&mut self, f: &Formula) -> Result<(Term, Term), TypeError> {
        let (a, b) = (self.u.fresh(), self.u.fresh());
        self.check(f, &Term::rel(a.clone(), b.clone()))?;
        Ok((a, b))
    }

    fn bind(&mut self, names: &[String]) -> usize {
        let mark = self.locals.len();
        for n in names {
            let t = self.u.fresh();
            self.locals.push((n.clone(), t));
        }
        mark
    }

    /// Infers the type of `f`, recording every node on the way.
    pub fn formula(&mut self, f: &Formula) -> Result<Term, TypeError> {
        let slot = self.nodes.len();
        let me = self.u.fresh();
        self.nodes.push(me.clone());
        let t = self.node(f)?;
        debug_assert!(slot < self.nodes.len());
        self.expect(&f.span, &me, &t)?;
        Ok(t)
    }

    fn node(&mut self, f: &Formula) -> Result<Term, TypeError> {
        use BinOp::*;
        Ok(match &f.node {
            Node::Int(_) => Term::Int,
            Node::Bool(_) => Term::Bool,
            Node::Ident(n) => self.lookup(n).ok_or_else(|| TypeError::UntypedIdentifier {
                name: n.clone(),
                span: f.span.clone(),
            })?,
            Node::Universe(Universe::Bool) => Term::set(Term::Bool),
            Node::Universe(_) => Term::set(Term::Int),
            Node::Unary(UnOp::Not, a) => {
                self.check(a, &Term::Bool)?;
                Term::Bool
            }
            Node::Unary(UnOp::Neg, a) => {
                self.check(a, &Term::Int)?;
                Term::Int
            }
            Node::Unary(UnOp::Inverse, a) => {
                let (x, y) = self.rel_of(a)?;
                Term::rel(y, x)
            }
            Node::Bin(op, a, b) => match op {
                And | Or | Implies | Iff => {
                    self.check(a, &Term::Bool)?;
                    self.check(b, &Term::Bool)?;
                    Term::Bool
                }
                Eq | Neq => {
                    let ta = self.formula(a)?;
                    self.check(b, &ta)?;
                    Term::Bool
                }
                Lt | Le | Gt | Ge => {
                    self.check(a, &Term::Int)?;
                    self.check(b, &Term::Int)?;
                    Term::Bool
                }
                In | NotIn => {
                    let ta = self.formula(a)?;
                    self.check(b, &Term::set(ta))?;
                    Term::Bool
                }
                Subset | NotSubset | PSubset | NotPSubset => {
                    let e = self.set_of(a)?;
                    self.check(b, &Term::set(e))?;
                    Term::Bool
                }
                Add | Sub | Mul | Div | Mod | Exp => {
                    self.check(a, &Term::Int)?;
                    self.check(b, &Term::Int)?;
                    Term::Int
                }
                Maplet => {
                    let ta = self.formula(a)?;
                    let tb = self.formula(b)?;
                    Term::pair(ta, tb)
                }
                Range => {
                    self.check(a, &Term::Int)?;
                    self.check(b, &Term::Int)?;
                    Term::set(Term::Int)
                }
                Union | Inter | Diff => {
                    let e = self.set_of(a)?;
                    let t = Term::set(e);
                    self.check(b, &t)?;
                    t
                }
                Cross => {
                    let x = self.set_of(a)?;
                    let y = self.set_of(b)?;
                    Term::rel(x, y)
                }
                DomRes | DomSub => {
                    let x = self.set_of(a)?;
                    let y = self.u.fresh();
                    let t = Term::rel(x, y);
                    self.check(b, &t)?;
                    t
                }
                RanRes | RanSub => {
                    let (x, y) = self.rel_of(a)?;
                    self.check(b, &Term::set(y.clone()))?;
                    Term::rel(x, y)
                }
                FComp => {
                    let (x, y) = self.rel_of(a)?;
                    let z = self.u.fresh();
                    self.check(b, &Term::rel(y, z.clone()))?;
                    Term::rel(x, z)
                }
                BComp => {
                    let (y, z) = self.rel_of(a)?;
                    let x = self.u.fresh();
                    self.check(b, &Term::rel(x.clone(), y))?;
                    Term::rel(x, z)
                }
                Ovl => {
                    let (x, y) = self.rel_of(a)?;
                    let t = Term::rel(x, y);
                    self.check(b, &t)?;
                    t
                }
                DProd => {
                    let (x, y) = self.rel_of(a)?;
                    let z = self.u.fresh();
                    self.check(b, &Term::rel(x.clone(), z.clone()))?;
                    Term::rel(x, Term::pair(y, z))
                }
                PProd => {
                    let (x, y) = self.rel_of(a)?;
                    let (z, w) = self.rel_of(b)?;
                    Term::rel(Term::pair(x, z), Term::pair(y, w))
                }
                Kind(_) => {
                    let x = self.set_of(a)?;
                    let y = self.set_of(b)?;
                    Term::set(Term::rel(x, y))
                }
                Apply => {
                    let (x, y) = self.rel_of(a)?;
                    self.check(b, &x)?;
                    y
                }
                Image => {
                    let (x, y) = self.rel_of(a)?;
                    self.check(b, &Term::set(x))?;
                    Term::set(y)
                }
            },
            Node::Quant(_, bs, body) => {
                let mark = self.bind(bs);
                self.check(body, &Term::Bool)?;
                self.locals.truncate(mark);
                Term::Bool
            }
            Node::SetExt(xs) => {
                let e = self.u.fresh();
                for x in xs {
                    self.check(x, &e)?;
                }
                Term::set(e)
            }
            Node::Comprehension(bs, p, e) => {
                let mark = self.bind(bs);
                self.check(p, &Term::Bool)?;
                let t = self.formula(e)?;
                self.locals.truncate(mark);
                Term::set(t)
            }
            Node::QuantSet(_, bs, p, e) => {
                let mark = self.bind(bs);
                self.check(p, &Term::Bool)?;
                let el = self.set_of(e)?;
                self.locals.truncate(mark);
                Term::set(el)
            }
            Node::Call(b, args) => {
                let arg = &args[0];
                match b {
                    Builtin::Dom => Term::set(self.rel_of(arg)?.0),
                    Builtin::Ran => Term::set(self.rel_of(arg)?.1),
                    Builtin::Card => {
                        self.set_of(arg)?;
                        Term::Int
                    }
                    Builtin::Min | Builtin::Max => {
                        self.check(arg, &Term::set(Term::Int))?;
                        Term::Int
                    }
                    Builtin::Finite => {
                        self.set_of(arg)?;
                        Term::Bool
                    }
                    Builtin::Pow | Builtin::Pow1 => {
                        let e = self.set_of(arg)?;
                        Term::set(Term::set(e))
                    }
                    Builtin::Union | Builtin::Inter => {
                        let e = self.u.fresh();
                        self.check(arg, &Term::set(Term::set(e.clone())))?;
                        Term::set(e)
                    }
                    Builtin::Id => {
                        let e = self.set_of(arg)?;
                        Term::rel(e.clone(), e)
                    }
                    Builtin::Prj1 | Builtin::Prj2 => {
                        let (x, y) = (self.u.fresh(), self.u.fresh());
                        self.check(arg, &Term::pair(x.clone(), y.clone()))?;
                        if *b == Builtin::Prj1 {
                            x
                        } else {
                            y
                        }
                    }
                }
            }
            Node::Old(a) => self.formula(a)?,
        })
    }

    /// Writes the recorded types back, in the same pre-order.
    pub fn annotate(&self, f: &mut Formula, cursor: &mut usize) {
        f.walk_mut(&mut |n| {
            n.ty = Some(self.u.ground_or_int(&self.nodes[*cursor]));
            *cursor += 1;
        });
    }
}
