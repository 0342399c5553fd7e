//! Plain-text Event-B syntax: `.ebc` contexts and `.ebm` machines.

mod component;
mod formula;
mod lexer;
mod render;

use std::fmt;
use std::sync::Arc;

use crate::model::{Component, Formula, Project, Span};

pub use formula::{is_reserved, RESERVED};
pub use render::{binop_symbol, render_component, render_context, render_formula, render_machine};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub span: Span,
    pub message: String,
    pub expected: Vec<String>,
}

impl ParseError {
    pub fn new(span: Span, message: impl Into<String>) -> Self {
        ParseError {
            span,
            message: message.into(),
            expected: vec![],
        }
    }

    pub fn with_expected(mut self, expected: Vec<String>) -> Self {
        self.expected = expected;
        self
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)
    }
}

impl std::error::Error for ParseError {}

/// A named source document.
#[derive(Clone, Debug)]
pub struct SourceFile {
    pub name: String,
    pub text: String,
}

impl SourceFile {
    pub fn new(name: impl Into<String>, text: impl Into<String>) -> Self {
        SourceFile {
            name: name.into(),
            text: text.into(),
        }
    }
}

/// Parses exactly one component from a document.
pub fn parse_component(file: &str, text: &str) -> Result<Component, ParseError> {
    let file: Arc<str> = Arc::from(file);
    let toks = lexer::tokenize(&file, text)?;
    let mut p = formula::Parser::new(&toks, file);
    let c = p.component()?;
    if !matches!(p.peek(), lexer::Tok::Eof) {
        return Err(p.error(&["end of input"]));
    }
    Ok(c)
}

/// Parses one component per file. Top-level names must be unique.
pub fn parse_project(files: &[SourceFile]) -> Result<Project, ParseError> {
    let mut project = Project::default();
    for f in files {
        let c = parse_component(&f.name, &f.text)?;
        let dup = project.context(c.name()).is_some() || project.machine(c.name()).is_some();
        if dup {
            let span = match &c {
                Component::Context(c) => c.span.clone(),
                Component::Machine(m) => m.span.clone(),
            };
            return Err(ParseError::new(
                span,
                format!("duplicate top-level name `{}`", c.name()),
            ));
        }
        project.add(c);
    }
    Ok(project)
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    parse_formula_in("", text)
}

pub fn parse_formula_in(file: &str, text: &str) -> Result<Formula, ParseError> {
    let file: Arc<str> = Arc::from(file);
    let toks = lexer::tokenize(&file, text)?;
    let mut p = formula::Parser::new(&toks, file);
    let f = p.formula()?;
    if !matches!(p.peek(), lexer::Tok::Eof) {
        return Err(p.error(&["operator", "end of input"]));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mathkit::RelKind;
    use crate::model::{BinOp, Node};

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap_or_else(|e| panic!("{s}: {e}"))
    }

    fn id(n: &str) -> Formula {
        Formula::ident(n)
    }

    #[test]
    fn application_and_equality() {
        let f = p("f(j+1) = v");
        let expected = Formula::bin(
            BinOp::Eq,
            Formula::bin(
                BinOp::Apply,
                id("f"),
                Formula::bin(BinOp::Add, id("j"), Formula::int(1)),
            ),
            id("v"),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn maplet_and_cross() {
        assert_eq!(p("x |-> y"), Formula::bin(BinOp::Maplet, id("x"), id("y")));
        let f = p("pages \\/ ({rc} ** prs)");
        let rc = Formula::synth(Node::SetExt(vec![id("rc")]));
        let expected = Formula::bin(
            BinOp::Union,
            id("pages"),
            Formula::bin(BinOp::Cross, rc, id("prs")),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn precedence_levels() {
        assert_eq!(p("a & b or c"), p("(a & b) or c"));
        assert_eq!(p("a => b => c"), p("a => (b => c)"));
        assert_eq!(p("f : 1..n --> NAT"), p("f : ((1..n) --> NAT)"));
        assert_eq!(p("x + y * z"), p("x + (y * z)"));
        assert_eq!(p("r |-> s \\/ t"), p("(r |-> s) \\/ t"));
        assert_eq!(p("not x = y & z"), p("(not (x = y)) & z"));
        assert!(matches!(
            p("A >->> B").node,
            Node::Bin(BinOp::Kind(RelKind::TotalBij), _, _)
        ));
    }

    #[test]
    fn unicode_matches_ascii() {
        assert_eq!(p("∀i·i ∈ 1‥n ⇒ f(i) ≤ v"), p("!i . i : 1..n => f(i) <= v"));
        assert_eq!(p("v ∉ f[i ‥ j]"), p("v /: f[i..j]"));
    }

    #[test]
    fn comprehension_and_quantified_union() {
        let f = p("{x . x : S | f(x)}");
        assert!(matches!(f.node, Node::Comprehension(..)));
        let vars: Vec<String> = f.free_vars().into_iter().collect();
        assert_eq!(vars, ["S", "f"]);
        assert!(matches!(
            p("UNION x . x : S | {x}").node,
            Node::QuantSet(..)
        ));
    }

    #[test]
    fn application_must_be_adjacent() {
        assert!(parse_formula("f (x)").is_err());
    }

    #[test]
    fn errors_carry_spans() {
        let e = parse_formula("a + ").unwrap_err();
        assert_eq!(e.span.start_line, 1);
        let e = parse_component("empty.ebm", "").unwrap_err();
        assert!(
            e.message.contains("expected 'machine' or 'context'"),
            "{}",
            e.message
        );
    }

    #[test]
    fn round_trip_samples() {
        for s in [
            "!i,j . i : 1..n & j : 1..n & i <= j => f(i) <= f(j)",
            "r := (r + 1 + q) / 2",
            "-x ^ 2 - -1",
            "busStat \\ {b |-> busStat(b)}",
            "parked : 0..min({n, m})",
            "(a => b) => c",
            "s <<| r |>> t <+ g",
            "f~[{1}] = dom(g ; h circ k)",
            "# k . j + 1 = k",
            "card(busStat) <= min({n, m}) & finite(busStat)",
            "{x,y . x |-> y : r | x + y}",
            "a & (!x . x : S => x > 0) & b",
        ] {
            let Ok(first) = parse_formula(s) else {
                // action syntax is not a formula
                continue;
            };
            let again = p(&first.to_string());
            assert_eq!(first, again, "{s} -> {first}");
        }
    }
}
