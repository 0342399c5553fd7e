//! Recursive-descent parser for predicates and expressions.

use std::sync::Arc;

use super::lexer::{Tok, Token};
use super::ParseError;
use crate::mathkit::RelKind;
use crate::model::{BinOp, Builtin, Formula, Node, QuantSetOp, Quantifier, Span, UnOp, Universe};

/// Words that can never be identifiers.
pub const RESERVED: &[&str] = &[
    "machine",
    "refines",
    "sees",
    "variables",
    "invariants",
    "variant",
    "events",
    "event",
    "status",
    "any",
    "where",
    "when",
    "with",
    "then",
    "begin",
    "end",
    "context",
    "extends",
    "sets",
    "constants",
    "axioms",
    "theorems",
    "theorem",
    "TRUE",
    "FALSE",
    "INT",
    "NAT",
    "NAT1",
    "BOOL",
    "POW",
    "POW1",
    "dom",
    "ran",
    "card",
    "min",
    "max",
    "finite",
    "union",
    "inter",
    "UNION",
    "INTER",
    "id",
    "prj1",
    "prj2",
    "partition",
    "old",
];

pub fn is_reserved(word: &str) -> bool {
    RESERVED.contains(&word)
}

pub struct Parser<'t> {
    pub(crate) toks: &'t [Token],
    pub(crate) pos: usize,
    pub(crate) file: Arc<str>,
}

fn relop(s: &str) -> Option<BinOp> {
    Some(match s {
        "=" => BinOp::Eq,
        "/=" => BinOp::Neq,
        "<" => BinOp::Lt,
        "<=" => BinOp::Le,
        ">" => BinOp::Gt,
        ">=" => BinOp::Ge,
        ":" => BinOp::In,
        "/:" => BinOp::NotIn,
        "<:" => BinOp::Subset,
        "/<:" => BinOp::NotSubset,
        "<<:" => BinOp::PSubset,
        "/<<:" => BinOp::NotPSubset,
        _ => return None,
    })
}

fn arrow(s: &str) -> Option<RelKind> {
    RelKind::ALL.into_iter().find(|k| k.ascii() == s)
}

fn setop(s: &str) -> Option<BinOp> {
    Some(match s {
        "\\/" => BinOp::Union,
        "/\\" => BinOp::Inter,
        "\\" => BinOp::Diff,
        "**" => BinOp::Cross,
        "<|" => BinOp::DomRes,
        "|>" => BinOp::RanRes,
        "<<|" => BinOp::DomSub,
        "|>>" => BinOp::RanSub,
        ";" => BinOp::FComp,
        "circ" => BinOp::BComp,
        "<+" => BinOp::Ovl,
        "><" => BinOp::DProd,
        "||" => BinOp::PProd,
        _ => return None,
    })
}

impl<'t> Parser<'t> {
    pub fn new(toks: &'t [Token], file: Arc<str>) -> Self {
        Parser { toks, pos: 0, file }
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub(crate) fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub(crate) fn bump(&mut self) -> &Token {
        let t = &self.toks[self.pos];
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn span_of(&self, t: &Token) -> Span {
        Span::new(self.file.clone(), (t.line, t.col), (t.end_line, t.end_col))
    }

    pub(crate) fn here(&self) -> Span {
        self.span_of(&self.toks[self.pos])
    }

    /// Span from token index `start` to the previous token.
    pub(crate) fn since(&self, start: usize) -> Span {
        let a = &self.toks[start];
        let b = &self.toks[self.pos.saturating_sub(1).max(start)];
        Span::new(self.file.clone(), (a.line, a.col), (b.end_line, b.end_col))
    }

    pub(crate) fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    pub(crate) fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == w)
    }

    pub(crate) fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn eat_word(&mut self, w: &str) -> bool {
        if self.is_word(w) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn describe(tok: &Tok) -> String {
        match tok {
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Int(i) => format!("'{i}'"),
            Tok::Label(l) => format!("'@{l}'"),
            Tok::Sym(s) => format!("'{s}'"),
            Tok::Eof => "end of input".to_string(),
        }
    }

    pub(crate) fn error(&self, expected: &[&str]) -> ParseError {
        let list: Vec<String> = expected.iter().map(|e| e.to_string()).collect();
        let msg = format!(
            "expected {}, found {}",
            join_expected(&list),
            Self::describe(self.peek())
        );
        ParseError::new(self.here(), msg).with_expected(list)
    }

    pub(crate) fn expect_sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.error(&[&format!("'{s}'")]))
        }
    }

    pub(crate) fn expect_ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_reserved(&s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    /// Adjacent to the previous token: no whitespace in between.
    fn adjacent(&self) -> bool {
        if self.pos == 0 {
            return false;
        }
        let prev = &self.toks[self.pos - 1];
        let cur = &self.toks[self.pos];
        prev.end_line == cur.line && prev.end_col == cur.col
    }

    pub fn formula(&mut self) -> Result<Formula, ParseError> {
        self.iff()
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.implies()?;
        if self.eat_sym("<=>") {
            let rhs = self.implies()?;
            return Ok(Formula::bin(BinOp::Iff, lhs, rhs));
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if self.eat_sym("=>") {
            let rhs = self.implies()?;
            return Ok(Formula::bin(BinOp::Implies, lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while self.eat_sym("or") {
            let rhs = self.and()?;
            lhs = Formula::bin(BinOp::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.not()?;
        while self.eat_sym("&") {
            let rhs = self.not()?;
            lhs = Formula::bin(BinOp::And, lhs, rhs);
        }
        Ok(lhs)
    }

    fn not(&mut self) -> Result<Formula, ParseError> {
        let start = self.pos;
        if self.eat_sym("not") {
            let inner = self.not()?;
            return Ok(Formula::new(
                Node::Unary(UnOp::Not, Box::new(inner)),
                self.since(start),
            ));
        }
        self.predicate()
    }

    fn predicate(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.relkind()?;
        if let Tok::Sym(s) = self.peek() {
            if let Some(op) = relop(s) {
                self.bump();
                let rhs = self.relkind()?;
                return Ok(Formula::bin(op, lhs, rhs));
            }
        }
        Ok(lhs)
    }

    fn relkind(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.setops()?;
        if let Tok::Sym(s) = self.peek() {
            if let Some(k) = arrow(s) {
                self.bump();
                let rhs = self.relkind()?;
                return Ok(Formula::bin(BinOp::Kind(k), lhs, rhs));
            }
        }
        Ok(lhs)
    }

    fn setops(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.maplet()?;
        while let Tok::Sym(s) = self.peek() {
            let Some(op) = setop(s) else { break };
            self.bump();
            let rhs = self.maplet()?;
            lhs = Formula::bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn maplet(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.range()?;
        while self.eat_sym("|->") {
            let rhs = self.range()?;
            lhs = Formula::bin(BinOp::Maplet, lhs, rhs);
        }
        Ok(lhs)
    }

    fn range(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.additive()?;
        if self.eat_sym("..") {
            let rhs = self.additive()?;
            return Ok(Formula::bin(BinOp::Range, lhs, rhs));
        }
        Ok(lhs)
    }

    fn additive(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = if self.is_sym("+") {
                BinOp::Add
            } else if self.is_sym("-") {
                BinOp::Sub
            } else {
                break;
            };
            self.bump();
            let rhs = self.multiplicative()?;
            lhs = Formula::bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn multiplicative(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.power()?;
        loop {
            let op = if self.is_sym("*") {
                BinOp::Mul
            } else if self.is_sym("/") {
                BinOp::Div
            } else if self.is_sym("mod") {
                BinOp::Mod
            } else {
                break;
            };
            self.bump();
            let rhs = self.power()?;
            lhs = Formula::bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn power(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        if self.eat_sym("^") {
            let rhs = self.power()?;
            return Ok(Formula::bin(BinOp::Exp, lhs, rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let start = self.pos;
        if self.eat_sym("-") {
            if let Tok::Int(n) = *self.peek() {
                // Negative literals fold so that rendering round-trips.
                let next_is_postfix = matches!(self.peek_at(1), Tok::Sym("~"));
                if !next_is_postfix {
                    self.bump();
                    return Ok(Formula::new(Node::Int(-n), self.since(start)));
                }
            }
            let inner = self.unary()?;
            return Ok(Formula::new(
                Node::Unary(UnOp::Neg, Box::new(inner)),
                self.since(start),
            ));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Formula, ParseError> {
        let start = self.pos;
        let mut e = self.primary()?;
        loop {
            if self.is_sym("(") && self.adjacent() {
                self.bump();
                let args = self.comma_list(")")?;
                let arg = args
                    .into_iter()
                    .reduce(|a, b| Formula::bin(BinOp::Maplet, a, b))
                    .ok_or_else(|| self.error(&["argument"]))?;
                self.expect_sym(")")?;
                e = Formula::new(
                    Node::Bin(BinOp::Apply, Box::new(e), Box::new(arg)),
                    self.since(start),
                );
            } else if self.is_sym("[") && self.adjacent() {
                self.bump();
                let arg = self.formula()?;
                self.expect_sym("]")?;
                e = Formula::new(
                    Node::Bin(BinOp::Image, Box::new(e), Box::new(arg)),
                    self.since(start),
                );
            } else if self.is_sym("~") {
                self.bump();
                e = Formula::new(Node::Unary(UnOp::Inverse, Box::new(e)), self.since(start));
            } else {
                break;
            }
        }
        Ok(e)
    }

    fn comma_list(&mut self, close: &str) -> Result<Vec<Formula>, ParseError> {
        let mut out = Vec::new();
        if self.is_sym(close) {
            return Ok(out);
        }
        loop {
            out.push(self.formula()?);
            if !self.eat_sym(",") {
                break;
            }
        }
        Ok(out)
    }

    fn binder_list(&mut self) -> Result<Vec<String>, ParseError> {
        let mut out = vec![self.expect_ident()?];
        while self.eat_sym(",") {
            out.push(self.expect_ident()?);
        }
        Ok(out)
    }

    /// True when the tokens ahead read `x, y, ... .`, the start of a
    /// comprehension.
    fn comprehension_ahead(&self) -> bool {
        let mut k = 0;
        loop {
            match self.peek_at(k) {
                Tok::Ident(s) if !is_reserved(s) => {}
                _ => return false,
            }
            match self.peek_at(k + 1) {
                Tok::Sym(",") => k += 2,
                Tok::Sym(".") => return true,
                _ => return false,
            }
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        let start = self.pos;
        let tok = self.peek().clone();
        match tok {
            Tok::Int(n) => {
                self.bump();
                Ok(Formula::new(Node::Int(n), self.since(start)))
            }
            Tok::Sym("(") => {
                self.bump();
                let mut inner = self.formula()?;
                self.expect_sym(")")?;
                inner.span = self.since(start);
                Ok(inner)
            }
            Tok::Sym("{}") => {
                self.bump();
                Ok(Formula::new(Node::SetExt(vec![]), self.since(start)))
            }
            Tok::Sym("{") => {
                self.bump();
                if self.comprehension_ahead() {
                    let binders = self.binder_list()?;
                    self.expect_sym(".")?;
                    let pred = self.formula()?;
                    self.expect_sym("|")?;
                    let expr = self.formula()?;
                    self.expect_sym("}")?;
                    return Ok(Formula::new(
                        Node::Comprehension(binders, Box::new(pred), Box::new(expr)),
                        self.since(start),
                    ));
                }
                let elems = self.comma_list("}")?;
                self.expect_sym("}")?;
                Ok(Formula::new(Node::SetExt(elems), self.since(start)))
            }
            Tok::Sym(q @ ("!" | "#")) => {
                self.bump();
                let binders = self.binder_list()?;
                self.expect_sym(".")?;
                let body = self.formula()?;
                let quant = if q == "!" {
                    Quantifier::Forall
                } else {
                    Quantifier::Exists
                };
                Ok(Formula::new(
                    Node::Quant(quant, binders, Box::new(body)),
                    self.since(start),
                ))
            }
            Tok::Ident(word) => self.word(start, &word),
            _ => Err(self.error(&["expression"])),
        }
    }

    fn word(&mut self, start: usize, word: &str) -> Result<Formula, ParseError> {
        let simple = |node: Node, p: &mut Self| {
            p.bump();
            Ok(Formula::new(node, p.since(start)))
        };
        match word {
            "TRUE" => return simple(Node::Bool(true), self),
            "FALSE" => return simple(Node::Bool(false), self),
            "INT" => return simple(Node::Universe(Universe::Int), self),
            "NAT" => return simple(Node::Universe(Universe::Nat), self),
            "NAT1" => return simple(Node::Universe(Universe::Nat1), self),
            "BOOL" => return simple(Node::Universe(Universe::Bool), self),
            "UNION" | "INTER" => {
                self.bump();
                let op = if word == "UNION" {
                    QuantSetOp::Union
                } else {
                    QuantSetOp::Inter
                };
                let binders = self.binder_list()?;
                self.expect_sym(".")?;
                let pred = self.formula()?;
                self.expect_sym("|")?;
                let expr = self.formula()?;
                return Ok(Formula::new(
                    Node::QuantSet(op, binders, Box::new(pred), Box::new(expr)),
                    self.since(start),
                ));
            }
            "old" => {
                self.bump();
                self.expect_sym("(")?;
                let inner = self.formula()?;
                self.expect_sym(")")?;
                return Ok(Formula::new(Node::Old(Box::new(inner)), self.since(start)));
            }
            "partition" => {
                self.bump();
                self.expect_sym("(")?;
                let args = self.comma_list(")")?;
                self.expect_sym(")")?;
                if args.is_empty() {
                    return Err(ParseError::new(
                        self.since(start),
                        "partition needs at least one argument",
                    ));
                }
                return Ok(desugar_partition(args).with_span(self.since(start)));
            }
            _ => {}
        }
        if let Some(b) = Builtin::from_name(word) {
            self.bump();
            self.expect_sym("(")?;
            let arg = self.formula()?;
            self.expect_sym(")")?;
            return Ok(Formula::new(Node::Call(b, vec![arg]), self.since(start)));
        }
        if is_reserved(word) {
            return Err(self.error(&["expression"]));
        }
        self.bump();
        Ok(Formula::new(
            Node::Ident(word.to_string()),
            self.since(start),
        ))
    }
}

fn join_expected(list: &[String]) -> String {
    match list.len() {
        0 => "something else".to_string(),
        1 => list[0].clone(),
        _ => {
            let (last, rest) = list.split_last().expect("nonempty");
            format!("{} or {}", rest.join(", "), last)
        }
    }
}

/// `partition(S, a, b, ...)` becomes `S = a \/ b \/ ... & a /\ b = {} & ...`.
fn desugar_partition(mut args: Vec<Formula>) -> Formula {
    let whole = args.remove(0);
    let parts = args;
    let cover = parts
        .iter()
        .cloned()
        .reduce(|a, b| Formula::bin(BinOp::Union, a, b))
        .unwrap_or_else(|| Formula::synth(Node::SetExt(vec![])));
    let mut conj = vec![Formula::bin(BinOp::Eq, whole, cover)];
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            conj.push(Formula::bin(
                BinOp::Eq,
                Formula::bin(BinOp::Inter, parts[i].clone(), parts[j].clone()),
                Formula::synth(Node::SetExt(vec![])),
            ));
        }
    }
    Formula::and_all(conj)
}
