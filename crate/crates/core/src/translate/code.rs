//! Compiled expressions: a slot-addressed tree evaluated over a [`Frame`].

use crate::mathkit::{
    aggregate, cross, int_arith, interval, pow, rel_apply, rel_combine, rel_image, rel_restrict,
    rel_unary, relation_facts, relations_of_kind, set_binary, subsets, AggregateOp, ArithOp,
    CombineOp, RelKind, RelUnaryOp, RestrictOp, SetBinOp, SetValue, Value,
};
use crate::model::{Type, Universe};

use super::ground::Grounding;
use super::EvalError;

/// Slot storage: carriers, constants, variables, parameters, temporaries
/// and binders all live at fixed indices.
pub type Frame = Vec<Value>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Code {
    Const(Value),
    Slot(usize),
    Not(Box<Code>),
    And(Vec<Code>),
    Or(Vec<Code>),
    Implies(Box<Code>, Box<Code>),
    Iff(Box<Code>, Box<Code>),
    Eq(Box<Code>, Box<Code>),
    Cmp(Cmp, Box<Code>, Box<Code>),
    Arith(ArithOp, Box<Code>, Box<Code>),
    Neg(Box<Code>),
    Member(Box<Code>, Box<SetCode>),
    /// `x : lo..hi` without building the interval.
    InRange(Box<Code>, Box<Code>, Box<Code>),
    Subset {
        elem: Box<Code>,
        of: Box<SetCode>,
        strict: bool,
    },
    Maplet(Box<Code>, Box<Code>),
    Range(Box<Code>, Box<Code>),
    SetBin(SetBinOp, Box<Code>, Box<Code>),
    Cross(Box<Code>, Box<Code>),
    /// Operands in (set, relation) order.
    Restrict(RestrictOp, Box<Code>, Box<Code>),
    Combine(CombineOp, Box<Code>, Box<Code>),
    RelUnary(RelUnaryOp, Box<Code>),
    Apply(Box<Code>, Box<Code>),
    Image(Box<Code>, Box<Code>),
    SetExt(Vec<Code>),
    Aggregate(AggregateOp, Box<Code>),
    Pow(Box<Code>, bool),
    Prj(bool, Box<Code>),
    /// `INT`, `NAT` or `NAT1` cut to the grounding's integer range.
    Grounded(Universe),
    /// All relations of a kind between two finite sets.
    KindSet(RelKind, Box<Code>, Box<Code>),
    Quant {
        forall: bool,
        plan: BinderPlan,
        body: Box<Code>,
    },
    Collect {
        plan: BinderPlan,
        expr: Box<Code>,
    },
    QuantSet {
        union: bool,
        plan: BinderPlan,
        expr: Box<Code>,
    },
}

/// Right-hand side of a membership or inclusion test, where the symbolic
/// integer universes and relation arrows may appear.
#[derive(Clone, Debug, PartialEq)]
pub enum SetCode {
    Value(Code),
    Int,
    Nat,
    Nat1,
    Kind(RelKind, Box<SetCode>, Box<SetCode>),
    Pow(Box<SetCode>, bool),
    Cross(Box<SetCode>, Box<SetCode>),
}

enum SetView {
    Finite(SetValue),
    Int,
    Nat,
    Nat1,
    Kind(RelKind, Box<SetView>, Box<SetView>),
    Pow(Box<SetView>, bool),
    Cross(Box<SetView>, Box<SetView>),
}

impl SetView {
    fn contains(&self, v: &Value) -> bool {
        match self {
            SetView::Finite(s) => s.contains(v),
            SetView::Int => v.as_int().is_some(),
            SetView::Nat => v.as_int().is_some_and(|i| i >= 0),
            SetView::Nat1 => v.as_int().is_some_and(|i| i >= 1),
            SetView::Kind(k, a, b) => match v.as_set() {
                Some(r) if r.is_relation() => {
                    let facts = relation_facts(
                        r,
                        |x| a.contains(x),
                        |y| b.contains(y),
                        a.finite(),
                        b.finite(),
                    );
                    k.admits(&facts)
                }
                _ => false,
            },
            SetView::Pow(inner, nonempty) => match v.as_set() {
                Some(s) => (!nonempty || !s.is_empty()) && s.iter().all(|x| inner.contains(x)),
                None => false,
            },
            SetView::Cross(a, b) => match v.as_pair() {
                Some((x, y)) => a.contains(x) && b.contains(y),
                None => false,
            },
        }
    }

    fn finite(&self) -> Option<&SetValue> {
        match self {
            SetView::Finite(s) => Some(s),
            _ => None,
        }
    }
}

/// One binder of a quantifier, comprehension or parameter search.
#[derive(Clone, Debug, PartialEq)]
pub struct Level {
    pub name: String,
    pub slot: usize,
    pub domain: Domain,
    /// Conjuncts that become decidable once this binder is bound.
    pub filters: Vec<Code>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    Elements(Code),
    Subsets(Code),
    Equal(Code),
    Range(Code, Code),
    Type(Type),
}

/// Nested enumeration of binder values with early filtering.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BinderPlan {
    pub levels: Vec<Level>,
}

type Visit<'a> = dyn FnMut(&mut Frame) -> Result<bool, EvalError> + 'a;

impl BinderPlan {
    /// Calls `visit` on every binding that passes all filters, stopping
    /// when it returns `false`. Returns `false` if stopped early.
    pub fn for_each(
        &self,
        fr: &mut Frame,
        g: &Grounding,
        visit: &mut Visit<'_>,
    ) -> Result<bool, EvalError> {
        self.level(0, fr, g, visit)
    }

    /// Candidate values of level `i` in the current frame.
    pub fn domain_values(
        &self,
        i: usize,
        fr: &mut Frame,
        g: &Grounding,
    ) -> Result<Vec<Value>, EvalError> {
        Ok(match &self.levels[i].domain {
            Domain::Range(lo, hi) => {
                let (lo, hi) = (lo.eval_int(fr, g)?, hi.eval_int(fr, g)?);
                match interval(lo, hi, &g.limits)? {
                    Value::Set(s) => s.as_slice().to_vec(),
                    _ => unreachable!(),
                }
            }
            Domain::Elements(c) => c.eval_set(fr, g)?.as_slice().to_vec(),
            Domain::Subsets(c) => {
                let mut all = subsets(&c.eval_set(fr, g)?, &g.limits)?;
                all.sort_unstable();
                all
            }
            Domain::Equal(c) => vec![c.eval(fr, g)?],
            Domain::Type(t) => g.universe(t)?,
        })
    }

    pub fn filters_hold(&self, i: usize, fr: &mut Frame, g: &Grounding) -> Result<bool, EvalError> {
        for f in &self.levels[i].filters {
            if !f.eval_bool(fr, g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn level(
        &self,
        i: usize,
        fr: &mut Frame,
        g: &Grounding,
        visit: &mut Visit<'_>,
    ) -> Result<bool, EvalError> {
        if i == self.levels.len() {
            return visit(fr);
        }
        let slot = self.levels[i].slot;
        if let Domain::Range(lo, hi) = &self.levels[i].domain {
            let (lo, hi) = (lo.eval_int(fr, g)?, hi.eval_int(fr, g)?);
            for x in lo..=hi {
                fr[slot] = Value::Int(x);
                if self.filters_hold(i, fr, g)? && !self.level(i + 1, fr, g, visit)? {
                    return Ok(false);
                }
            }
            return Ok(true);
        }
        for x in self.domain_values(i, fr, g)? {
            fr[slot] = x;
            if self.filters_hold(i, fr, g)? && !self.level(i + 1, fr, g, visit)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn not_a(expected: &'static str, v: &Value) -> EvalError {
    EvalError::Type {
        expected,
        found: v.kind_name().to_string(),
    }
}

impl Code {
    pub fn boxed(self) -> Box<Code> {
        Box::new(self)
    }

    pub fn eval_int(&self, fr: &mut Frame, g: &Grounding) -> Result<i64, EvalError> {
        match self {
            Code::Const(Value::Int(i)) => Ok(*i),
            Code::Slot(i) => match &fr[*i] {
                Value::Int(n) => Ok(*n),
                v => Err(not_a("integer", v)),
            },
            Code::Arith(op, a, b) => {
                let x = a.eval_int(fr, g)?;
                let y = b.eval_int(fr, g)?;
                Ok(int_arith(*op, x, y)?)
            }
            _ => {
                let v = self.eval(fr, g)?;
                v.as_int().ok_or_else(|| not_a("integer", &v))
            }
        }
    }

    pub fn eval_set(&self, fr: &mut Frame, g: &Grounding) -> Result<SetValue, EvalError> {
        match self.eval(fr, g)? {
            Value::Set(s) => Ok(s),
            v => Err(not_a("set", &v)),
        }
    }

    pub fn eval_bool(&self, fr: &mut Frame, g: &Grounding) -> Result<bool, EvalError> {
        Ok(match self {
            Code::Const(Value::Bool(b)) => *b,
            Code::Not(a) => !a.eval_bool(fr, g)?,
            Code::And(xs) => {
                for x in xs {
                    if !x.eval_bool(fr, g)? {
                        return Ok(false);
                    }
                }
                true
            }
            Code::Or(xs) => {
                for x in xs {
                    if x.eval_bool(fr, g)? {
                        return Ok(true);
                    }
                }
                false
            }
            Code::Implies(a, b) => !a.eval_bool(fr, g)? || b.eval_bool(fr, g)?,
            Code::Iff(a, b) => a.eval_bool(fr, g)? == b.eval_bool(fr, g)?,
            Code::Eq(a, b) => a.eval(fr, g)? == b.eval(fr, g)?,
            Code::Cmp(op, a, b) => {
                let (x, y) = (a.eval_int(fr, g)?, b.eval_int(fr, g)?);
                match op {
                    Cmp::Lt => x < y,
                    Cmp::Le => x <= y,
                    Cmp::Gt => x > y,
                    Cmp::Ge => x >= y,
                }
            }
            Code::InRange(x, lo, hi) => {
                let x = x.eval(fr, g)?;
                let lo = lo.eval_int(fr, g)?;
                let hi = hi.eval_int(fr, g)?;
                x.as_int().is_some_and(|x| lo <= x && x <= hi)
            }
            Code::Member(x, s) => {
                let x = x.eval(fr, g)?;
                match &**s {
                    SetCode::Value(c) => c.eval_set(fr, g)?.contains(&x),
                    other => view(other, fr, g)?.contains(&x),
                }
            }
            Code::Subset { elem, of, strict } => {
                let x = elem.eval_set(fr, g)?;
                let s = view(of, fr, g)?;
                let inside = x.iter().all(|e| s.contains(e));
                match (strict, s.finite()) {
                    (false, _) => inside,
                    (true, Some(fin)) => inside && x != *fin,
                    (true, None) => inside,
                }
            }
            Code::Quant { forall, plan, body } => {
                if *forall {
                    let mut all = true;
                    plan.for_each(fr, g, &mut |fr| {
                        all = body.eval_bool(fr, g)?;
                        Ok(all)
                    })?;
                    all
                } else {
                    let mut found = false;
                    plan.for_each(fr, g, &mut |fr| {
                        found = body.eval_bool(fr, g)?;
                        Ok(!found)
                    })?;
                    found
                }
            }
            _ => {
                let v = self.eval(fr, g)?;
                v.as_bool().ok_or_else(|| not_a("predicate", &v))?
            }
        })
    }

    pub fn eval(&self, fr: &mut Frame, g: &Grounding) -> Result<Value, EvalError> {
        Ok(match self {
            Code::Const(v) => v.clone(),
            Code::Slot(i) => fr[*i].clone(),
            Code::Not(_)
            | Code::And(_)
            | Code::Or(_)
            | Code::Implies(..)
            | Code::Iff(..)
            | Code::Eq(..)
            | Code::Cmp(..)
            | Code::InRange(..)
            | Code::Member(..)
            | Code::Subset { .. }
            | Code::Quant { .. } => Value::Bool(self.eval_bool(fr, g)?),
            Code::Arith(..) => Value::Int(self.eval_int(fr, g)?),
            Code::Neg(a) => Value::Int(int_arith(ArithOp::Sub, 0, a.eval_int(fr, g)?)?),
            Code::Maplet(a, b) => Value::pair(a.eval(fr, g)?, b.eval(fr, g)?),
            Code::Range(a, b) => interval(a.eval_int(fr, g)?, b.eval_int(fr, g)?, &g.limits)?,
            Code::SetBin(op, a, b) => set_binary(*op, &a.eval(fr, g)?, &b.eval(fr, g)?)?,
            Code::Cross(a, b) => cross(&a.eval(fr, g)?, &b.eval(fr, g)?, &g.limits)?,
            Code::Restrict(op, s, r) => rel_restrict(*op, &s.eval(fr, g)?, &r.eval(fr, g)?)?,
            Code::Combine(op, a, b) => rel_combine(*op, &a.eval(fr, g)?, &b.eval(fr, g)?)?,
            Code::RelUnary(op, a) => rel_unary(*op, &a.eval(fr, g)?)?,
            Code::Apply(f, x) => match (&**f, &**x) {
                (Code::Slot(i), Code::Slot(j)) => rel_apply(&fr[*i], &fr[*j])?,
                (Code::Slot(i), x) => {
                    let x = x.eval(fr, g)?;
                    rel_apply(&fr[*i], &x)?
                }
                (f, x) => {
                    let x = x.eval(fr, g)?;
                    rel_apply(&f.eval(fr, g)?, &x)?
                }
            },
            Code::Image(r, s) => rel_image(&r.eval(fr, g)?, &s.eval(fr, g)?)?,
            Code::SetExt(xs) => {
                let mut out = Vec::with_capacity(xs.len());
                for x in xs {
                    out.push(x.eval(fr, g)?);
                }
                Value::Set(SetValue::from_vec(out))
            }
            Code::Aggregate(op, a) => aggregate(*op, &a.eval(fr, g)?)?,
            Code::Pow(a, nonempty) => {
                let p = pow(&a.eval(fr, g)?, &g.limits)?;
                match (nonempty, p) {
                    (true, Value::Set(s)) => Value::Set(
                        s.iter()
                            .filter(|x| x.as_set().is_some_and(|x| !x.is_empty()))
                            .cloned()
                            .collect(),
                    ),
                    (_, p) => p,
                }
            }
            Code::Prj(first, a) => {
                let v = a.eval(fr, g)?;
                let (x, y) = v.as_pair().ok_or_else(|| not_a("pair", &v))?;
                if *first {
                    x.clone()
                } else {
                    y.clone()
                }
            }
            Code::Grounded(u) => {
                let (lo, hi) = g
                    .int_range
                    .ok_or_else(|| EvalError::Unbounded(u.name().to_string()))?;
                let lo = match u {
                    Universe::Nat => lo.max(0),
                    Universe::Nat1 => lo.max(1),
                    _ => lo,
                };
                Value::Set(SetValue::from_sorted((lo..=hi).map(Value::Int).collect()))
            }
            Code::KindSet(k, a, b) => {
                relations_of_kind(*k, &a.eval(fr, g)?, &b.eval(fr, g)?, &g.limits)?
            }
            Code::Collect { plan, expr } => {
                let mut out = Vec::new();
                plan.for_each(fr, g, &mut |fr| {
                    out.push(expr.eval(fr, g)?);
                    Ok(true)
                })?;
                Value::Set(SetValue::from_vec(out))
            }
            Code::QuantSet { union, plan, expr } => {
                let mut parts = Vec::new();
                plan.for_each(fr, g, &mut |fr| {
                    parts.push(expr.eval(fr, g)?);
                    Ok(true)
                })?;
                let op = if *union {
                    AggregateOp::GenUnion
                } else {
                    AggregateOp::GenInter
                };
                aggregate(op, &Value::Set(SetValue::from_vec(parts)))?
            }
        })
    }
}

fn view(s: &SetCode, fr: &mut Frame, g: &Grounding) -> Result<SetView, EvalError> {
    Ok(match s {
        SetCode::Value(c) => SetView::Finite(c.eval_set(fr, g)?),
        SetCode::Int => SetView::Int,
        SetCode::Nat => SetView::Nat,
        SetCode::Nat1 => SetView::Nat1,
        SetCode::Kind(k, a, b) => {
            SetView::Kind(*k, Box::new(view(a, fr, g)?), Box::new(view(b, fr, g)?))
        }
        SetCode::Pow(a, ne) => SetView::Pow(Box::new(view(a, fr, g)?), *ne),
        SetCode::Cross(a, b) => {
            SetView::Cross(Box::new(view(a, fr, g)?), Box::new(view(b, fr, g)?))
        }
    })
}
