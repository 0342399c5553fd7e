//! Formula trees shared by predicates and expressions.
//!
//! Predicates are expressions of type BOOL, so a guard may be the literal
//! `TRUE` and the same node type serves both syntactic categories.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::mathkit::RelKind;

/// A region of a source document. Lines and columns start at 1; a zeroed
/// span marks a synthesized node.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Span {
    pub file: Arc<str>,
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

pub type SourceSpan = Span;

impl Span {
    pub fn new(file: Arc<str>, start: (u32, u32), end: (u32, u32)) -> Self {
        Span {
            file,
            start_line: start.0,
            start_col: start.1,
            end_line: end.0,
            end_col: end.1,
        }
    }

    pub fn is_synthetic(&self) -> bool {
        self.start_line == 0
    }

    /// Smallest span covering both.
    pub fn join(&self, other: &Span) -> Span {
        if self.is_synthetic() {
            return other.clone();
        }
        if other.is_synthetic() {
            return self.clone();
        }
        let start = (self.start_line, self.start_col).min((other.start_line, other.start_col));
        let end = (self.end_line, self.end_col).max((other.end_line, other.end_col));
        Span::new(self.file.clone(), start, end)
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let file = if self.file.is_empty() {
            "<input>"
        } else {
            &self.file
        };
        write!(f, "{}:{}:{}", file, self.start_line, self.start_col)
    }
}

/// Inferred type of a formula node.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Int,
    Bool,
    Carrier(String),
    Pair(Box<Type>, Box<Type>),
    Set(Box<Type>),
}

pub type TypeTag = Type;

impl Type {
    pub fn set(t: Type) -> Type {
        Type::Set(Box::new(t))
    }

    pub fn pair(a: Type, b: Type) -> Type {
        Type::Pair(Box::new(a), Box::new(b))
    }

    pub fn rel(a: Type, b: Type) -> Type {
        Type::set(Type::pair(a, b))
    }

    pub fn elem(&self) -> Option<&Type> {
        match self {
            Type::Set(t) => Some(t),
            _ => None,
        }
    }

    /// Carrier names mentioned by this type, in order of appearance.
    pub fn carriers(&self, out: &mut Vec<String>) {
        match self {
            Type::Carrier(c) => {
                if !out.contains(c) {
                    out.push(c.clone());
                }
            }
            Type::Pair(a, b) => {
                a.carriers(out);
                b.carriers(out);
            }
            Type::Set(t) => t.carriers(out),
            Type::Int | Type::Bool => {}
        }
    }

    pub fn mentions_int(&self) -> bool {
        match self {
            Type::Int => true,
            Type::Bool | Type::Carrier(_) => false,
            Type::Pair(a, b) => a.mentions_int() || b.mentions_int(),
            Type::Set(t) => t.mentions_int(),
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Int => f.write_str("INT"),
            Type::Bool => f.write_str("BOOL"),
            Type::Carrier(c) => f.write_str(c),
            Type::Set(t) => write!(f, "POW({t})"),
            Type::Pair(a, b) => {
                write!(f, "{a} ** ")?;
                if matches!(**b, Type::Pair(..)) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnOp {
    Not,
    Neg,
    Inverse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    And,
    Or,
    Implies,
    Iff,
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
    In,
    NotIn,
    Subset,
    NotSubset,
    PSubset,
    NotPSubset,
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Exp,
    Maplet,
    Range,
    Union,
    Inter,
    Diff,
    Cross,
    DomRes,
    RanRes,
    DomSub,
    RanSub,
    FComp,
    BComp,
    Ovl,
    DProd,
    PProd,
    Kind(RelKind),
    Apply,
    Image,
}

impl BinOp {
    pub fn is_logical(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or | BinOp::Implies | BinOp::Iff)
    }

    pub fn is_relational_predicate(self) -> bool {
        matches!(
            self,
            BinOp::Eq
                | BinOp::Neq
                | BinOp::Lt
                | BinOp::Le
                | BinOp::Gt
                | BinOp::Ge
                | BinOp::In
                | BinOp::NotIn
                | BinOp::Subset
                | BinOp::NotSubset
                | BinOp::PSubset
                | BinOp::NotPSubset
        )
    }

    pub fn is_predicate(self) -> bool {
        self.is_logical() || self.is_relational_predicate()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QuantSetOp {
    Union,
    Inter,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Builtin {
    Dom,
    Ran,
    Card,
    Min,
    Max,
    Finite,
    Pow,
    Pow1,
    Union,
    Inter,
    Id,
    Prj1,
    Prj2,
}

impl Builtin {
    pub const ALL: [Builtin; 13] = [
        Builtin::Dom,
        Builtin::Ran,
        Builtin::Card,
        Builtin::Min,
        Builtin::Max,
        Builtin::Finite,
        Builtin::Pow,
        Builtin::Pow1,
        Builtin::Union,
        Builtin::Inter,
        Builtin::Id,
        Builtin::Prj1,
        Builtin::Prj2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Dom => "dom",
            Builtin::Ran => "ran",
            Builtin::Card => "card",
            Builtin::Min => "min",
            Builtin::Max => "max",
            Builtin::Finite => "finite",
            Builtin::Pow => "POW",
            Builtin::Pow1 => "POW1",
            Builtin::Union => "union",
            Builtin::Inter => "inter",
            Builtin::Id => "id",
            Builtin::Prj1 => "prj1",
            Builtin::Prj2 => "prj2",
        }
    }

    pub fn from_name(s: &str) -> Option<Builtin> {
        Builtin::ALL.into_iter().find(|b| b.name() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Universe {
    Int,
    Nat,
    Nat1,
    Bool,
}

impl Universe {
    pub fn name(self) -> &'static str {
        match self {
            Universe::Int => "INT",
            Universe::Nat => "NAT",
            Universe::Nat1 => "NAT1",
            Universe::Bool => "BOOL",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Int(i64),
    Bool(bool),
    /// A plain or primed (`x'`) name.
    Ident(String),
    Universe(Universe),
    Unary(UnOp, Box<Formula>),
    Bin(BinOp, Box<Formula>, Box<Formula>),
    Quant(Quantifier, Vec<String>, Box<Formula>),
    /// Set extension; `{}` is the empty set.
    SetExt(Vec<Formula>),
    /// `{x, y . P | E}`
    Comprehension(Vec<String>, Box<Formula>, Box<Formula>),
    /// `UNION x . P | E` and `INTER x . P | E`
    QuantSet(QuantSetOp, Vec<String>, Box<Formula>, Box<Formula>),
    Call(Builtin, Vec<Formula>),
    /// Pre-state marker used in contracts.
    Old(Box<Formula>),
}

/// A formula node with its source span and, after inference, its type.
/// Equality is structural and ignores both.
#[derive(Clone, Debug)]
pub struct Formula {
    pub node: Node,
    pub span: Span,
    pub ty: Option<Type>,
}

impl PartialEq for Formula {
    fn eq(&self, other: &Self) -> bool {
        self.node == other.node
    }
}

impl Formula {
    pub fn new(node: Node, span: Span) -> Self {
        Formula {
            node,
            span,
            ty: None,
        }
    }

    pub fn synth(node: Node) -> Self {
        Formula::new(node, Span::default())
    }

    pub fn int(i: i64) -> Self {
        Formula::synth(Node::Int(i))
    }

    pub fn boolean(b: bool) -> Self {
        Formula::synth(Node::Bool(b))
    }

    pub fn ident(name: impl Into<String>) -> Self {
        Formula::synth(Node::Ident(name.into()))
    }

    pub fn bin(op: BinOp, a: Formula, b: Formula) -> Self {
        let span = a.span.join(&b.span);
        Formula::new(Node::Bin(op, Box::new(a), Box::new(b)), span)
    }

    pub fn unary(op: UnOp, a: Formula) -> Self {
        let span = a.span.clone();
        Formula::new(Node::Unary(op, Box::new(a)), span)
    }

    pub fn not(a: Formula) -> Self {
        Formula::unary(UnOp::Not, a)
    }

    pub fn exists(binders: Vec<String>, body: Formula) -> Self {
        let span = body.span.clone();
        Formula::new(
            Node::Quant(Quantifier::Exists, binders, Box::new(body)),
            span,
        )
    }

    pub fn old(a: Formula) -> Self {
        let span = a.span.clone();
        Formula::new(Node::Old(Box::new(a)), span)
    }

    /// Conjunction of all parts; `TRUE` when empty.
    pub fn and_all(parts: impl IntoIterator<Item = Formula>) -> Self {
        let mut it = parts.into_iter();
        match it.next() {
            None => Formula::boolean(true),
            Some(first) => it.fold(first, |acc, p| Formula::bin(BinOp::And, acc, p)),
        }
    }

    /// Disjunction of all parts; `FALSE` when empty.
    pub fn or_all(parts: impl IntoIterator<Item = Formula>) -> Self {
        let mut it = parts.into_iter();
        match it.next() {
            None => Formula::boolean(false),
            Some(first) => it.fold(first, |acc, p| Formula::bin(BinOp::Or, acc, p)),
        }
    }

    pub fn with_span(mut self, span: Span) -> Self {
        self.span = span;
        self
    }

    pub fn as_ident(&self) -> Option<&str> {
        match &self.node {
            Node::Ident(n) => Some(n),
            _ => None,
        }
    }

    pub fn is_true(&self) -> bool {
        matches!(self.node, Node::Bool(true))
    }

    /// Flattens nested conjunctions into their parts, left to right.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        fn go<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
            match &f.node {
                Node::Bin(BinOp::And, a, b) => {
                    go(a, out);
                    go(b, out);
                }
                _ => out.push(f),
            }
        }
        go(self, &mut out);
        out
    }

    pub fn children(&self) -> Vec<&Formula> {
        match &self.node {
            Node::Int(_) | Node::Bool(_) | Node::Ident(_) | Node::Universe(_) => vec![],
            Node::Unary(_, a) | Node::Old(a) | Node::Quant(_, _, a) => vec![a],
            Node::Bin(_, a, b) => vec![a, b],
            Node::SetExt(xs) | Node::Call(_, xs) => xs.iter().collect(),
            Node::Comprehension(_, p, e) | Node::QuantSet(_, _, p, e) => vec![p, e],
        }
    }

    pub fn children_mut(&mut self) -> Vec<&mut Formula> {
        match &mut self.node {
            Node::Int(_) | Node::Bool(_) | Node::Ident(_) | Node::Universe(_) => vec![],
            Node::Unary(_, a) | Node::Old(a) | Node::Quant(_, _, a) => vec![a],
            Node::Bin(_, a, b) => vec![a, b],
            Node::SetExt(xs) | Node::Call(_, xs) => xs.iter_mut().collect(),
            Node::Comprehension(_, p, e) | Node::QuantSet(_, _, p, e) => vec![p, e],
        }
    }

    pub fn binders(&self) -> &[String] {
        match &self.node {
            Node::Quant(_, bs, _) | Node::Comprehension(bs, _, _) | Node::QuantSet(_, bs, _, _) => {
                bs
            }
            _ => &[],
        }
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a Formula)) {
        visit(self);
        for c in self.children() {
            c.walk(visit);
        }
    }

    pub fn walk_mut(&mut self, visit: &mut impl FnMut(&mut Formula)) {
        visit(self);
        for c in self.children_mut() {
            c.walk_mut(visit);
        }
    }

    /// Free identifiers, in order of first occurrence.
    pub fn free_vars_ordered(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut bound: Vec<String> = Vec::new();
        collect_free(self, &mut bound, &mut out);
        out
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        self.free_vars_ordered().into_iter().collect()
    }

    pub fn mentions(&self, name: &str) -> bool {
        self.free_vars_ordered().iter().any(|n| n == name)
    }

    /// Replaces free occurrences of identifiers. Binders that would capture
    /// a free name of a replacement are renamed first.
    pub fn substitute(&self, map: &HashMap<String, Formula>) -> Formula {
        if map.is_empty() {
            return self.clone();
        }
        match &self.node {
            Node::Ident(n) => match map.get(n) {
                Some(r) => r.clone(),
                None => self.clone(),
            },
            Node::Quant(..) | Node::Comprehension(..) | Node::QuantSet(..) => {
                self.substitute_binding(map)
            }
            _ => {
                let mut out = self.clone();
                out.ty = self.ty.clone();
                for (c, orig) in out.children_mut().into_iter().zip(self.children()) {
                    *c = orig.substitute(map);
                }
                out
            }
        }
    }

    fn substitute_binding(&self, map: &HashMap<String, Formula>) -> Formula {
        let binders = self.binders().to_vec();
        let mut inner: HashMap<String, Formula> = map
            .iter()
            .filter(|(k, _)| !binders.contains(k))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        let incoming: BTreeSet<String> = inner.values().flat_map(|f| f.free_vars()).collect();
        let mut used: BTreeSet<String> = incoming.clone();
        used.extend(self.free_vars());
        let mut new_binders = Vec::with_capacity(binders.len());
        for b in &binders {
            if incoming.contains(b) {
                let fresh = fresh_name(b, &used);
                used.insert(fresh.clone());
                inner.insert(b.clone(), Formula::ident(fresh.clone()));
                new_binders.push(fresh);
            } else {
                new_binders.push(b.clone());
            }
        }
        let mut out = self.clone();
        match &mut out.node {
            Node::Quant(_, bs, _) | Node::Comprehension(bs, _, _) | Node::QuantSet(_, bs, _, _) => {
                *bs = new_binders
            }
            _ => unreachable!(),
        }
        for (c, orig) in out.children_mut().into_iter().zip(self.children()) {
            *c = orig.substitute(&inner);
        }
        out
    }

    /// Renames free identifiers according to `map`.
    pub fn rename(&self, map: &HashMap<String, String>) -> Formula {
        let sub: HashMap<String, Formula> = map
            .iter()
            .map(|(k, v)| (k.clone(), Formula::ident(v.clone())))
            .collect();
        self.substitute(&sub)
    }

    /// Clears type annotations throughout.
    pub fn strip_types(&mut self) {
        self.walk_mut(&mut |f| f.ty = None);
    }

    /// Clears spans throughout.
    pub fn strip_spans(&mut self) {
        self.walk_mut(&mut |f| f.span = Span::default());
    }
}

fn collect_free(f: &Formula, bound: &mut Vec<String>, out: &mut Vec<String>) {
    match &f.node {
        Node::Ident(n) => {
            if !bound.contains(n) && !out.contains(n) {
                out.push(n.clone());
            }
        }
        Node::Quant(_, bs, _) | Node::Comprehension(bs, _, _) | Node::QuantSet(_, bs, _, _) => {
            let mark = bound.len();
            bound.extend(bs.iter().cloned());
            for c in f.children() {
                collect_free(c, bound, out);
            }
            bound.truncate(mark);
        }
        _ => {
            for c in f.children() {
                collect_free(c, bound, out);
            }
        }
    }
}

fn fresh_name(base: &str, used: &BTreeSet<String>) -> String {
    (1..)
        .map(|i| format!("{base}_{i}"))
        .find(|n| !used.contains(n))
        .expect("infinite supply")
}

/// Name of the primed (after-state) copy of a variable.
pub fn primed(name: &str) -> String {
    format!("{name}'")
}

/// Strips one trailing prime, if any.
pub fn unprimed(name: &str) -> Option<&str> {
    name.strip_suffix('\'')
}

/// Renames each listed variable to its primed copy.
pub fn prime_vars<'a>(f: &Formula, vars: impl IntoIterator<Item = &'a String>) -> Formula {
    let map: HashMap<String, String> = vars.into_iter().map(|v| (v.clone(), primed(v))).collect();
    f.rename(&map)
}

/// Maps names to types for lookups during later phases.
pub type TypeEnv = BTreeMap<String, Type>;

#[cfg(test)]
mod tests {
    use super::*;

    fn id(n: &str) -> Formula {
        Formula::ident(n)
    }

    #[test]
    fn free_vars_respects_binders() {
        let f = Formula::exists(vec!["x".into()], Formula::bin(BinOp::Lt, id("x"), id("y")));
        assert_eq!(f.free_vars_ordered(), vec!["y".to_string()]);
        let g = Formula::bin(BinOp::Add, id("x"), id("x"));
        assert_eq!(g.free_vars_ordered(), vec!["x".to_string()]);
    }

    #[test]
    fn substitution_avoids_capture() {
        // (# x . x < y)[y := x + 1]
        let f = Formula::exists(vec!["x".into()], Formula::bin(BinOp::Lt, id("x"), id("y")));
        let mut map = HashMap::new();
        map.insert(
            "y".to_string(),
            Formula::bin(BinOp::Add, id("x"), Formula::int(1)),
        );
        let g = f.substitute(&map);
        assert_eq!(g.binders(), &["x_1".to_string()]);
        assert_eq!(g.free_vars_ordered(), vec!["x".to_string()]);
    }

    #[test]
    fn type_rendering() {
        let t = Type::set(Type::pair(Type::Int, Type::Carrier("D".into())));
        assert_eq!(t.to_string(), "POW(INT ** D)");
        let nested = Type::pair(Type::Int, Type::pair(Type::Bool, Type::Int));
        assert_eq!(nested.to_string(), "INT ** (BOOL ** INT)");
    }
}
