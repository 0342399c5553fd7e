//! Contexts and machines.

use super::formula::Parser;
use super::lexer::Tok;
use super::ParseError;
use crate::model::{
    Action, ActionKind, BinOp, Component, Context, Event, EventStatus, Formula, Labeled, Lhs,
    Machine, Node, Witness,
};

const CONTEXT_SECTIONS: &[&str] = &["extends", "sets", "constants", "axioms", "theorems", "end"];
const MACHINE_SECTIONS: &[&str] = &[
    "refines",
    "sees",
    "variables",
    "invariants",
    "variant",
    "events",
    "end",
];
const EVENT_SECTIONS: &[&str] = &["any", "where", "when", "with", "then", "begin", "end"];

/// Hands out `g1`, `g2`, ... to unlabeled items.
struct AutoLabel(usize);

impl AutoLabel {
    fn next(&mut self, explicit: Option<String>) -> String {
        self.0 += 1;
        explicit.unwrap_or_else(|| format!("g{}", self.0))
    }
}

impl Parser<'_> {
    pub fn component(&mut self) -> Result<Component, ParseError> {
        if self.is_word("context") {
            self.context().map(Component::Context)
        } else if self.is_word("machine") {
            self.machine().map(Component::Machine)
        } else {
            Err(self.error(&["'machine'", "'context'"]))
        }
    }

    fn names_until(&mut self, stops: &[&str]) -> Result<Vec<String>, ParseError> {
        let mut out = Vec::new();
        while let Tok::Ident(w) = self.peek() {
            if stops.contains(&w.as_str()) {
                break;
            }
            out.push(self.expect_ident()?);
            self.eat_sym(",");
        }
        Ok(out)
    }

    fn label(&mut self) -> Option<String> {
        if let Tok::Label(l) = self.peek().clone() {
            self.bump();
            Some(l)
        } else {
            None
        }
    }

    fn at_stop(&self, stops: &[&str]) -> bool {
        match self.peek() {
            Tok::Ident(w) => stops.contains(&w.as_str()),
            Tok::Eof => true,
            _ => false,
        }
    }

    /// Labeled formulas until a section keyword. `theorem` marks an item
    /// as derived.
    fn items(&mut self, stops: &[&str], auto: &mut AutoLabel) -> Result<Vec<Labeled>, ParseError> {
        let mut out = Vec::new();
        while !self.at_stop(stops) {
            let start = self.pos;
            let theorem = self.eat_word("theorem");
            let label = self.label();
            let formula = self.formula()?;
            out.push(Labeled {
                label: auto.next(label),
                formula,
                theorem,
                span: self.since(start),
            });
        }
        Ok(out)
    }

    fn context(&mut self) -> Result<Context, ParseError> {
        let start = self.pos;
        self.bump();
        let mut ctx = Context::new(self.expect_ident()?);
        let mut auto = AutoLabel(0);
        loop {
            if self.eat_word("extends") {
                ctx.extends.extend(self.names_until(CONTEXT_SECTIONS)?);
            } else if self.eat_word("sets") {
                ctx.sets.extend(self.names_until(CONTEXT_SECTIONS)?);
            } else if self.eat_word("constants") {
                ctx.constants.extend(self.names_until(CONTEXT_SECTIONS)?);
            } else if self.eat_word("axioms") {
                for item in self.items(CONTEXT_SECTIONS, &mut auto)? {
                    if item.theorem {
                        ctx.theorems.push(Labeled {
                            theorem: false,
                            ..item
                        });
                    } else {
                        ctx.axioms.push(item);
                    }
                }
            } else if self.eat_word("theorems") || self.eat_word("theorem") {
                for item in self.items(CONTEXT_SECTIONS, &mut auto)? {
                    ctx.theorems.push(Labeled {
                        theorem: false,
                        ..item
                    });
                }
            } else if self.eat_word("end") {
                break;
            } else {
                return Err(self.error(&[
                    "'extends'",
                    "'sets'",
                    "'constants'",
                    "'axioms'",
                    "'theorems'",
                    "'end'",
                ]));
            }
        }
        ctx.span = self.since(start);
        Ok(ctx)
    }

    fn machine(&mut self) -> Result<Machine, ParseError> {
        let start = self.pos;
        self.bump();
        let mut m = Machine::new(self.expect_ident()?);
        let mut inv_auto = AutoLabel(0);
        loop {
            if self.eat_word("refines") {
                m.refines = Some(self.expect_ident()?);
            } else if self.eat_word("sees") {
                m.sees.extend(self.names_until(MACHINE_SECTIONS)?);
            } else if self.eat_word("variables") {
                m.variables.extend(self.names_until(MACHINE_SECTIONS)?);
            } else if self.eat_word("invariants") {
                m.invariants
                    .extend(self.items(MACHINE_SECTIONS, &mut inv_auto)?);
            } else if self.eat_word("variant") {
                m.variant = Some(self.formula()?);
            } else if self.eat_word("events") {
                while self.is_word("event") {
                    m.events.push(self.event()?);
                }
            } else if self.eat_word("end") {
                break;
            } else {
                return Err(self.error(&[
                    "'refines'",
                    "'sees'",
                    "'variables'",
                    "'invariants'",
                    "'variant'",
                    "'events'",
                    "'end'",
                ]));
            }
        }
        m.span = self.since(start);
        Ok(m)
    }

    fn event(&mut self) -> Result<Event, ParseError> {
        let start = self.pos;
        self.bump();
        let mut e = Event::new(self.expect_ident()?);
        let mut auto = AutoLabel(0);
        loop {
            if self.eat_word("status") {
                e.status = if self.eat_word("convergent") {
                    EventStatus::Convergent
                } else if self.eat_word("anticipated") {
                    EventStatus::Anticipated
                } else if self.eat_word("ordinary") {
                    EventStatus::Ordinary
                } else {
                    return Err(self.error(&["'ordinary'", "'convergent'", "'anticipated'"]));
                };
            } else if self.eat_word("refines") {
                e.refines.extend(self.names_until(EVENT_SECTIONS)?);
            } else if self.eat_word("extends") {
                e.extends = true;
                e.refines.push(self.expect_ident()?);
            } else {
                break;
            }
        }
        loop {
            if self.eat_word("any") {
                e.params.extend(self.names_until(EVENT_SECTIONS)?);
            } else if self.eat_word("where") || self.eat_word("when") {
                e.guards.extend(self.items(EVENT_SECTIONS, &mut auto)?);
            } else if self.eat_word("with") {
                while let Tok::Label(name) = self.peek().clone() {
                    let wstart = self.pos;
                    self.bump();
                    let formula = self.formula()?;
                    e.witnesses.push(Witness {
                        name,
                        formula,
                        span: self.since(wstart),
                    });
                }
            } else if self.eat_word("then") || self.eat_word("begin") {
                while !self.at_stop(EVENT_SECTIONS) {
                    e.actions.push(self.action(&mut auto)?);
                }
            } else if self.eat_word("end") {
                break;
            } else {
                return Err(self.error(&["'any'", "'where'", "'with'", "'then'", "'end'"]));
            }
        }
        e.span = self.since(start);
        Ok(e)
    }

    fn action(&mut self, auto: &mut AutoLabel) -> Result<Action, ParseError> {
        let start = self.pos;
        let label = auto.next(self.label());
        let mut lhs = Vec::new();
        loop {
            let name = self.expect_ident()?;
            let index = if self.eat_sym("(") {
                let i = self.formula()?;
                self.expect_sym(")")?;
                Some(i)
            } else {
                None
            };
            lhs.push(Lhs { name, index });
            if !self.eat_sym(",") {
                break;
            }
        }
        let kind = if self.eat_sym(":=") {
            let mut rhs = vec![self.formula()?];
            while self.eat_sym(",") {
                rhs.push(self.formula()?);
            }
            if rhs.len() != lhs.len() {
                return Err(ParseError::new(
                    self.since(start),
                    format!(
                        "{} variables assigned but {} expressions given",
                        lhs.len(),
                        rhs.len()
                    ),
                ));
            }
            ActionKind::Deterministic { lhs, rhs }
        } else if self.is_sym(":|") || self.is_sym("::") {
            if lhs.iter().any(|l| l.index.is_some()) {
                return Err(ParseError::new(
                    self.since(start),
                    "indexed targets are only allowed with ':='",
                ));
            }
            let targets: Vec<String> = lhs.into_iter().map(|l| l.name).collect();
            if self.eat_sym(":|") {
                ActionKind::NonDeterministic {
                    targets,
                    pred: self.formula()?,
                }
            } else {
                self.bump();
                if targets.len() != 1 {
                    return Err(ParseError::new(
                        self.since(start),
                        "'::' assigns exactly one variable",
                    ));
                }
                let set = self.formula()?;
                let primed =
                    Formula::new(Node::Ident(format!("{}'", targets[0])), set.span.clone());
                ActionKind::NonDeterministic {
                    targets,
                    pred: Formula::bin(BinOp::In, primed, set),
                }
            }
        } else {
            return Err(self.error(&["':='", "':|'", "'::'"]));
        };
        Ok(Action {
            label,
            kind,
            span: self.since(start),
        })
    }
}
