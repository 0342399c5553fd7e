//! Type terms with variables and a substitution-based unifier.

use std::fmt;

use crate::model::Type;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Term {
    Var(usize),
    Int,
    Bool,
    Carrier(String),
    Pair(Box<Term>, Box<Term>),
    Set(Box<Term>),
}

impl Term {
    pub fn set(t: Term) -> Term {
        Term::Set(Box::new(t))
    }

    pub fn pair(a: Term, b: Term) -> Term {
        Term::Pair(Box::new(a), Box::new(b))
    }

    pub fn rel(a: Term, b: Term) -> Term {
        Term::set(Term::pair(a, b))
    }

    pub fn from_type(t: &Type) -> Term {
        match t {
            Type::Int => Term::Int,
            Type::Bool => Term::Bool,
            Type::Carrier(c) => Term::Carrier(c.clone()),
            Type::Pair(a, b) => Term::pair(Term::from_type(a), Term::from_type(b)),
            Type::Set(e) => Term::set(Term::from_type(e)),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(_) => f.write_str("?"),
            Term::Int => f.write_str("INT"),
            Term::Bool => f.write_str("BOOL"),
            Term::Carrier(c) => f.write_str(c),
            Term::Set(t) => write!(f, "POW({t})"),
            Term::Pair(a, b) => {
                write!(f, "{a} ** ")?;
                if matches!(**b, Term::Pair(..)) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
        }
    }
}

#[derive(Default)]
pub(crate) struct Unifier {
    bindings: Vec<Option<Term>>,
}

impl Unifier {
    pub fn fresh(&mut self) -> Term {
        self.bindings.push(None);
        Term::Var(self.bindings.len() - 1)
    }

    /// Follows variable bindings at the root only.
    fn shallow(&self, t: &Term) -> Term {
        let mut cur = t.clone();
        while let Term::Var(v) = cur {
            match &self.bindings[v] {
                Some(next) => cur = next.clone(),
                None => break,
            }
        }
        cur
    }

    fn occurs(&self, v: usize, t: &Term) -> bool {
        match self.shallow(t) {
            Term::Var(w) => v == w,
            Term::Pair(a, b) => self.occurs(v, &a) || self.occurs(v, &b),
            Term::Set(e) => self.occurs(v, &e),
            _ => false,
        }
    }

    pub fn unify(&mut self, a: &Term, b: &Term) -> bool {
        let (a, b) = (self.shallow(a), self.shallow(b));
        match (&a, &b) {
            (Term::Var(x), Term::Var(y)) if x == y => true,
            (Term::Var(x), t) | (t, Term::Var(x)) => {
                if self.occurs(*x, t) {
                    return false;
                }
                self.bindings[*x] = Some(t.clone());
                true
            }
            (Term::Int, Term::Int) | (Term::Bool, Term::Bool) => true,
            (Term::Carrier(x), Term::Carrier(y)) => x == y,
            (Term::Pair(a1, b1), Term::Pair(a2, b2)) => self.unify(a1, a2) && self.unify(b1, b2),
            (Term::Set(x), Term::Set(y)) => self.unify(x, y),
            _ => false,
        }
    }

    /// Applies the substitution everywhere.
    pub fn resolve(&self, t: &Term) -> Term {
        match self.shallow(t) {
            Term::Pair(a, b) => Term::pair(self.resolve(&a), self.resolve(&b)),
            Term::Set(e) => Term::set(self.resolve(&e)),
            other => other,
        }
    }

    /// The ground type, if no variable remains.
    pub fn ground(&self, t: &Term) -> Option<Type> {
        Some(match self.shallow(t) {
            Term::Var(_) => return None,
            Term::Int => Type::Int,
            Term::Bool => Type::Bool,
            Term::Carrier(c) => Type::Carrier(c),
            Term::Pair(a, b) => Type::pair(self.ground(&a)?, self.ground(&b)?),
            Term::Set(e) => Type::set(self.ground(&e)?),
        })
    }

    /// Like [`Unifier::ground`] but unconstrained variables become `INT`.
    pub fn ground_or_int(&self, t: &Term) -> Type {
        match self.shallow(t) {
            Term::Var(_) | Term::Int => Type::Int,
            Term::Bool => Type::Bool,
            Term::Carrier(c) => Type::Carrier(c),
            Term::Pair(a, b) => Type::pair(self.ground_or_int(&a), self.ground_or_int(&b)),
            Term::Set(e) => Type::set(self.ground_or_int(&e)),
        }
    }
}
