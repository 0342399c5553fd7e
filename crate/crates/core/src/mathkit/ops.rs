//! Set, relation and arithmetic operators over [`Value`].
//!
//! Every function is pure. Inputs of the wrong shape produce
//! [`MathError::Type`]; the size-sensitive constructors (`pow`, `cross`,
//! `interval`) check their output against [`Limits`] before allocating.

use std::cmp::Ordering;

use super::value::{SetValue, Value};
use super::MathError;

/// Size bounds for the operators that can blow up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest set `pow` accepts.
    pub pow_max_elems: usize,
    /// Largest result `interval`, `cross` and type grounding may produce.
    pub universe_max: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            pow_max_elems: 16,
            universe_max: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetBinOp {
    Union,
    Intersection,
    Difference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetPredOp {
    Member,
    Subset,
    ProperSubset,
    Equal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelUnaryOp {
    Domain,
    Range,
    Inverse,
    IdentityOn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RestrictOp {
    /// `s <| r`
    DomRes,
    /// `r |> s`
    RanRes,
    /// `s <<| r`
    DomSub,
    /// `r |>> s`
    RanSub,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CombineOp {
    /// `f ; g`
    FComp,
    /// `f circ g`, i.e. `g ; f`
    BComp,
    /// `f <+ g`
    Override,
    /// `f >< g`
    DProd,
    /// `f || g`
    PProd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AggregateOp {
    Card,
    Min,
    Max,
    Finite,
    GenUnion,
    GenInter,
}

/// The relation and function arrows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelKind {
    /// `<->`
    Rel,
    /// `<<->`
    TotalRel,
    /// `<->>`
    SurjRel,
    /// `<<->>`
    TotalSurjRel,
    /// `+->`
    PartialFun,
    /// `-->`
    TotalFun,
    /// `>+>`
    PartialInj,
    /// `>->`
    TotalInj,
    /// `+>>`
    PartialSurj,
    /// `->>`
    TotalSurj,
    /// `>->>`
    TotalBij,
}

impl RelKind {
    pub const ALL: [RelKind; 11] = [
        RelKind::Rel,
        RelKind::TotalRel,
        RelKind::SurjRel,
        RelKind::TotalSurjRel,
        RelKind::PartialFun,
        RelKind::TotalFun,
        RelKind::PartialInj,
        RelKind::TotalInj,
        RelKind::PartialSurj,
        RelKind::TotalSurj,
        RelKind::TotalBij,
    ];

    pub fn ascii(self) -> &'static str {
        match self {
            RelKind::Rel => "<->",
            RelKind::TotalRel => "<<->",
            RelKind::SurjRel => "<->>",
            RelKind::TotalSurjRel => "<<->>",
            RelKind::PartialFun => "+->",
            RelKind::TotalFun => "-->",
            RelKind::PartialInj => ">+>",
            RelKind::TotalInj => ">->",
            RelKind::PartialSurj => "+>>",
            RelKind::TotalSurj => "->>",
            RelKind::TotalBij => ">->>",
        }
    }

    /// (functional, injective, total, surjective)
    fn requirements(self) -> (bool, bool, bool, bool) {
        match self {
            RelKind::Rel => (false, false, false, false),
            RelKind::TotalRel => (false, false, true, false),
            RelKind::SurjRel => (false, false, false, true),
            RelKind::TotalSurjRel => (false, false, true, true),
            RelKind::PartialFun => (true, false, false, false),
            RelKind::TotalFun => (true, false, true, false),
            RelKind::PartialInj => (true, true, false, false),
            RelKind::TotalInj => (true, true, true, false),
            RelKind::PartialSurj => (true, false, false, true),
            RelKind::TotalSurj => (true, false, true, true),
            RelKind::TotalBij => (true, true, true, true),
        }
    }

    /// Whether a relation with the given facts belongs to `d <kind> rng`.
    pub fn admits(self, facts: &RelationFacts) -> bool {
        let (fun, inj, total, surj) = self.requirements();
        facts.is_relation
            && (!fun || facts.is_function)
            && (!inj || facts.is_injective)
            && (!total || facts.total_on_domain)
            && (!surj || facts.surjective_on_range)
    }
}

/// Classification of one relation against one candidate domain and range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RelationFacts {
    /// `r ∈ d ↔ rng`
    pub is_relation: bool,
    /// additionally functional
    pub is_function: bool,
    /// additionally inverse-functional
    pub is_injective: bool,
    /// `dom(r) = d`
    pub total_on_domain: bool,
    /// `ran(r) = rng`
    pub surjective_on_range: bool,
}

fn expect_set<'a>(op: &'static str, v: &'a Value) -> Result<&'a SetValue, MathError> {
    v.as_set()
        .ok_or_else(|| MathError::type_error(op, "set", v))
}

fn expect_int(op: &'static str, v: &Value) -> Result<i64, MathError> {
    v.as_int()
        .ok_or_else(|| MathError::type_error(op, "integer", v))
}

fn expect_rel<'a>(op: &'static str, v: &'a Value) -> Result<&'a SetValue, MathError> {
    let s = expect_set(op, v)?;
    if s.is_relation() {
        return Ok(s);
    }
    let bad = s
        .iter()
        .find(|e| e.as_pair().is_none())
        .expect("non-pair element");
    Err(MathError::type_error(op, "relation", bad))
}

fn pair_parts(v: &Value) -> (&Value, &Value) {
    v.as_pair().expect("relation element is a pair")
}

// ---------------------------------------------------------------------------
// Elementary set operators

pub fn set_binary(op: SetBinOp, a: &Value, b: &Value) -> Result<Value, MathError> {
    let name = match op {
        SetBinOp::Union => "union",
        SetBinOp::Intersection => "intersection",
        SetBinOp::Difference => "difference",
    };
    let a = expect_set(name, a)?;
    let b = expect_set(name, b)?;
    Ok(Value::Set(match op {
        SetBinOp::Union => union(a, b),
        SetBinOp::Intersection => intersection(a, b),
        SetBinOp::Difference => difference(a, b),
    }))
}

pub(crate) fn union(a: &SetValue, b: &SetValue) -> SetValue {
    if a.is_empty() {
        return b.clone();
    }
    if b.is_empty() {
        return a.clone();
    }
    let (xs, ys) = (a.as_slice(), b.as_slice());
    let mut out = Vec::with_capacity(xs.len() + ys.len());
    let (mut i, mut j) = (0, 0);
    while i < xs.len() && j < ys.len() {
        match xs[i].cmp(&ys[j]) {
            Ordering::Less => {
                out.push(xs[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                out.push(ys[j].clone());
                j += 1;
            }
            Ordering::Equal => {
                out.push(xs[i].clone());
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&xs[i..]);
    out.extend_from_slice(&ys[j..]);
    SetValue::from_sorted(out)
}

pub(crate) fn intersection(a: &SetValue, b: &SetValue) -> SetValue {
    SetValue::from_sorted(a.iter().filter(|x| b.contains(x)).cloned().collect())
}

pub(crate) fn difference(a: &SetValue, b: &SetValue) -> SetValue {
    if b.is_empty() {
        return a.clone();
    }
    SetValue::from_sorted(a.iter().filter(|x| !b.contains(x)).cloned().collect())
}

pub(crate) fn is_subset(a: &SetValue, b: &SetValue) -> bool {
    a.len() <= b.len() && a.iter().all(|x| b.contains(x))
}

pub fn set_predicate(op: SetPredOp, a: &Value, b: &Value) -> Result<bool, MathError> {
    let name = match op {
        SetPredOp::Member => "member",
        SetPredOp::Subset => "subset",
        SetPredOp::ProperSubset => "propersubset",
        SetPredOp::Equal => "equal",
    };
    let b = expect_set(name, b)?;
    if op == SetPredOp::Member {
        return Ok(b.contains(a));
    }
    let a = expect_set(name, a)?;
    Ok(match op {
        SetPredOp::Subset => is_subset(a, b),
        SetPredOp::ProperSubset => a.len() < b.len() && is_subset(a, b),
        SetPredOp::Equal => a == b,
        SetPredOp::Member => unreachable!(),
    })
}

/// All subsets of `a`.
pub fn pow(a: &Value, limits: &Limits) -> Result<Value, MathError> {
    let a = expect_set("pow", a)?;
    Ok(Value::Set(SetValue::from_vec(subsets(a, limits)?)))
}

/// Subsets of `a` in bitmask order (not canonical order).
pub(crate) fn subsets(a: &SetValue, limits: &Limits) -> Result<Vec<Value>, MathError> {
    if a.len() > limits.pow_max_elems {
        return Err(MathError::BoundExceeded {
            what: "pow",
            size: a.len() as u64,
            limit: limits.pow_max_elems as u64,
        });
    }
    let elems = a.as_slice();
    let n = elems.len();
    let mut out = Vec::with_capacity(1usize << n);
    for mask in 0u32..(1u32 << n) {
        let picked: Vec<Value> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| elems[i].clone())
            .collect();
        out.push(Value::Set(SetValue::from_sorted(picked)));
    }
    Ok(out)
}

/// All members of `a <kind> b`. Functional kinds are enumerated one
/// image choice per domain element; the others go through `subsets`.
pub fn relations_of_kind(
    k: RelKind,
    a: &Value,
    b: &Value,
    limits: &Limits,
) -> Result<Value, MathError> {
    let (sa, sb) = (expect_set("relations", a)?, expect_set("relations", b)?);
    let (functional, _, total, _) = k.requirements();
    let mut out = Vec::new();
    let mut keep = |r: SetValue| {
        if k.admits(&relation_facts(
            &r,
            |x| sa.contains(x),
            |y| sb.contains(y),
            Some(sa),
            Some(sb),
        )) {
            out.push(Value::Set(r));
        }
    };
    if functional {
        let choices = sb.len() as u64 + u64::from(!total);
        let count = (choices as f64).powi(sa.len() as i32);
        if count > limits.universe_max as f64 {
            return Err(MathError::BoundExceeded {
                what: "relations",
                size: count.min(u64::MAX as f64) as u64,
                limit: limits.universe_max,
            });
        }
        // Odometer over image indices; index `sb.len()` means undefined.
        let mut idx = vec![0usize; sa.len()];
        loop {
            let pairs = sa
                .iter()
                .zip(&idx)
                .filter(|(_, &i)| i < sb.len())
                .map(|(x, &i)| Value::pair(x.clone(), sb.as_slice()[i].clone()));
            keep(SetValue::from_vec(pairs.collect()));
            let mut pos = 0;
            loop {
                if pos == idx.len() {
                    return Ok(Value::Set(SetValue::from_vec(out)));
                }
                idx[pos] += 1;
                if (idx[pos] as u64) < choices {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }
    let all = cross(a, b, limits)?;
    for r in subsets(expect_set("relations", &all)?, limits)? {
        let Value::Set(r) = r else {
            unreachable!("subset")
        };
        keep(r);
    }
    Ok(Value::Set(SetValue::from_vec(out)))
}

pub fn cross(a: &Value, b: &Value, limits: &Limits) -> Result<Value, MathError> {
    let a = expect_set("cross", a)?;
    let b = expect_set("cross", b)?;
    let size = a.len() as u64 * b.len() as u64;
    if size > limits.universe_max {
        return Err(MathError::BoundExceeded {
            what: "cross",
            size,
            limit: limits.universe_max,
        });
    }
    // Lexicographic order of pairs follows the nested loop order.
    let mut out = Vec::with_capacity(size as usize);
    for x in a {
        for y in b {
            out.push(Value::pair(x.clone(), y.clone()));
        }
    }
    Ok(Value::Set(SetValue::from_sorted(out)))
}

pub fn interval(a: i64, b: i64, limits: &Limits) -> Result<Value, MathError> {
    if a > b {
        return Ok(Value::empty_set());
    }
    let size = (b as i128 - a as i128 + 1) as u64;
    if size > limits.universe_max {
        return Err(MathError::BoundExceeded {
            what: "interval",
            size,
            limit: limits.universe_max,
        });
    }
    Ok(Value::Set(SetValue::from_sorted(
        (a..=b).map(Value::Int).collect(),
    )))
}

// ---------------------------------------------------------------------------
// Binary relations

pub fn rel_unary(op: RelUnaryOp, r: &Value) -> Result<Value, MathError> {
    match op {
        RelUnaryOp::IdentityOn => {
            let s = expect_set("id", r)?;
            Ok(Value::Set(SetValue::from_sorted(
                s.iter()
                    .map(|x| Value::pair(x.clone(), x.clone()))
                    .collect(),
            )))
        }
        RelUnaryOp::Domain => {
            let s = expect_rel("dom", r)?;
            let mut out: Vec<Value> = s.iter().map(|p| pair_parts(p).0.clone()).collect();
            out.dedup();
            Ok(Value::Set(SetValue::from_sorted(out)))
        }
        RelUnaryOp::Range => {
            let s = expect_rel("ran", r)?;
            Ok(Value::Set(
                s.iter().map(|p| pair_parts(p).1.clone()).collect(),
            ))
        }
        RelUnaryOp::Inverse => {
            let s = expect_rel("inverse", r)?;
            Ok(Value::Set(
                s.iter()
                    .map(|p| {
                        let (a, b) = pair_parts(p);
                        Value::pair(b.clone(), a.clone())
                    })
                    .collect(),
            ))
        }
    }
}

/// Relational image `r[s]`.
pub fn rel_image(r: &Value, s: &Value) -> Result<Value, MathError> {
    let r = expect_rel("image", r)?;
    let s = expect_set("image", s)?;
    let mut out = Vec::new();
    for x in s {
        out.extend(r.maplets_of(x).iter().map(|p| pair_parts(p).1.clone()));
    }
    Ok(Value::Set(SetValue::from_vec(out)))
}

/// Function application `r(x)`.
pub fn rel_apply(r: &Value, x: &Value) -> Result<Value, MathError> {
    let r = expect_rel("apply", r)?;
    match r.maplets_of(x) {
        [] => Err(MathError::NotInDomain(x.clone())),
        [one] => Ok(pair_parts(one).1.clone()),
        _ => Err(MathError::NotFunctionalAt(x.clone())),
    }
}

pub fn rel_restrict(op: RestrictOp, s: &Value, r: &Value) -> Result<Value, MathError> {
    let name = match op {
        RestrictOp::DomRes => "domres",
        RestrictOp::RanRes => "ranres",
        RestrictOp::DomSub => "domsub",
        RestrictOp::RanSub => "ransub",
    };
    let s = expect_set(name, s)?;
    let r = expect_rel(name, r)?;
    let keep = |p: &Value| {
        let (a, b) = pair_parts(p);
        match op {
            RestrictOp::DomRes => s.contains(a),
            RestrictOp::RanRes => s.contains(b),
            RestrictOp::DomSub => !s.contains(a),
            RestrictOp::RanSub => !s.contains(b),
        }
    };
    Ok(Value::Set(SetValue::from_sorted(
        r.iter().filter(|p| keep(p)).cloned().collect(),
    )))
}

pub fn rel_combine(op: CombineOp, f: &Value, g: &Value) -> Result<Value, MathError> {
    let name = match op {
        CombineOp::FComp => "fcomp",
        CombineOp::BComp => "bcomp",
        CombineOp::Override => "override",
        CombineOp::DProd => "dprod",
        CombineOp::PProd => "pprod",
    };
    let fs = expect_rel(name, f)?;
    let gs = expect_rel(name, g)?;
    let out = match op {
        CombineOp::FComp => forward_compose(fs, gs),
        CombineOp::BComp => forward_compose(gs, fs),
        CombineOp::Override => {
            let gdom: SetValue = gs.iter().map(|p| pair_parts(p).0.clone()).collect();
            let mut out: Vec<Value> = fs
                .iter()
                .filter(|p| !gdom.contains(pair_parts(p).0))
                .cloned()
                .collect();
            out.extend(gs.iter().cloned());
            SetValue::from_vec(out)
        }
        CombineOp::DProd => {
            let mut out = Vec::new();
            for p in fs {
                let (x, y) = pair_parts(p);
                for q in gs.maplets_of(x) {
                    let z = pair_parts(q).1;
                    out.push(Value::pair(x.clone(), Value::pair(y.clone(), z.clone())));
                }
            }
            SetValue::from_vec(out)
        }
        CombineOp::PProd => {
            let mut out = Vec::with_capacity(fs.len() * gs.len());
            for p in fs {
                let (a, b) = pair_parts(p);
                for q in gs {
                    let (c, d) = pair_parts(q);
                    out.push(Value::pair(
                        Value::pair(a.clone(), c.clone()),
                        Value::pair(b.clone(), d.clone()),
                    ));
                }
            }
            SetValue::from_vec(out)
        }
    };
    Ok(Value::Set(out))
}

fn forward_compose(f: &SetValue, g: &SetValue) -> SetValue {
    let mut out = Vec::new();
    for p in f {
        let (x, y) = pair_parts(p);
        for q in g.maplets_of(y) {
            out.push(Value::pair(x.clone(), pair_parts(q).1.clone()));
        }
    }
    SetValue::from_vec(out)
}

fn is_functional(r: &SetValue) -> bool {
    r.as_slice()
        .windows(2)
        .all(|w| pair_parts(&w[0]).0 != pair_parts(&w[1]).0)
}

fn is_inverse_functional(r: &SetValue) -> bool {
    let mut seen: Vec<&Value> = r.iter().map(|p| pair_parts(p).1).collect();
    seen.sort_unstable();
    seen.windows(2).all(|w| w[0] != w[1])
}

/// Evaluates the relation-kind facts of `r` against domain `d` and range `rng`.
///
/// Never fails: a non-relation simply has every fact false.
pub fn rel_classify(r: &Value, d: &Value, rng: &Value) -> RelationFacts {
    let (Some(r), Some(d), Some(rng)) = (r.as_set(), d.as_set(), rng.as_set()) else {
        return RelationFacts::default();
    };
    if !r.is_relation() {
        return RelationFacts::default();
    }
    relation_facts(
        r,
        |x| d.contains(x),
        |y| rng.contains(y),
        Some(d),
        Some(rng),
    )
}

/// Fact evaluation with membership predicates, so that symbolic carriers
/// (integers, naturals) can stand in for the domain or range. A `None` set
/// means the carrier is infinite, which no finite relation can cover.
pub(crate) fn relation_facts(
    r: &SetValue,
    in_dom: impl Fn(&Value) -> bool,
    in_ran: impl Fn(&Value) -> bool,
    dom_set: Option<&SetValue>,
    ran_set: Option<&SetValue>,
) -> RelationFacts {
    let is_relation = r.iter().all(|p| {
        let (a, b) = pair_parts(p);
        in_dom(a) && in_ran(b)
    });
    let functional = is_functional(r);
    let is_function = is_relation && functional;
    let is_injective = is_function && is_inverse_functional(r);
    let dom: SetValue = {
        let mut v: Vec<Value> = r.iter().map(|p| pair_parts(p).0.clone()).collect();
        v.dedup();
        SetValue::from_sorted(v)
    };
    let ran: SetValue = r.iter().map(|p| pair_parts(p).1.clone()).collect();
    let total_on_domain = dom_set.is_some_and(|d| *d == dom);
    let surjective_on_range = ran_set.is_some_and(|t| *t == ran);
    RelationFacts {
        is_relation,
        is_function,
        is_injective,
        total_on_domain: is_relation && total_on_domain,
        surjective_on_range: is_relation && surjective_on_range,
    }
}

// ---------------------------------------------------------------------------
// Aggregates

pub fn aggregate(op: AggregateOp, s: &Value) -> Result<Value, MathError> {
    let name = match op {
        AggregateOp::Card => "card",
        AggregateOp::Min => "min",
        AggregateOp::Max => "max",
        AggregateOp::Finite => "finite",
        AggregateOp::GenUnion => "union",
        AggregateOp::GenInter => "inter",
    };
    let set = expect_set(name, s)?;
    match op {
        AggregateOp::Card => Ok(Value::Int(set.len() as i64)),
        AggregateOp::Finite => Ok(Value::Bool(true)),
        AggregateOp::Min | AggregateOp::Max => {
            let pick = if op == AggregateOp::Min {
                set.first()
            } else {
                set.last()
            };
            let v = pick.ok_or(MathError::EmptyAggregate(name))?;
            // Every element must be an integer; ints sort before other kinds.
            if let Some(bad) = set.iter().find(|v| v.as_int().is_none()) {
                return Err(MathError::type_error(name, "integer", bad));
            }
            Ok(v.clone())
        }
        AggregateOp::GenUnion => {
            let mut acc = SetValue::empty();
            for e in set {
                acc = union(&acc, expect_set(name, e)?);
            }
            Ok(Value::Set(acc))
        }
        AggregateOp::GenInter => {
            let mut it = set.iter();
            let first = it.next().ok_or(MathError::EmptyAggregate(name))?;
            let mut acc = expect_set(name, first)?.clone();
            for e in it {
                acc = intersection(&acc, expect_set(name, e)?);
            }
            Ok(Value::Set(acc))
        }
    }
}

// ---------------------------------------------------------------------------
// Integer arithmetic: checked, with floor division.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Exp,
}

pub fn arith(op: ArithOp, a: &Value, b: &Value) -> Result<Value, MathError> {
    let name = match op {
        ArithOp::Add => "+",
        ArithOp::Sub => "-",
        ArithOp::Mul => "*",
        ArithOp::Div => "/",
        ArithOp::Mod => "mod",
        ArithOp::Exp => "^",
    };
    let x = expect_int(name, a)?;
    let y = expect_int(name, b)?;
    int_arith(op, x, y).map(Value::Int)
}

pub fn int_arith(op: ArithOp, x: i64, y: i64) -> Result<i64, MathError> {
    let overflow = |name| MathError::Overflow(name);
    match op {
        ArithOp::Add => x.checked_add(y).ok_or(overflow("+")),
        ArithOp::Sub => x.checked_sub(y).ok_or(overflow("-")),
        ArithOp::Mul => x.checked_mul(y).ok_or(overflow("*")),
        ArithOp::Div => floor_div(x, y),
        ArithOp::Mod => floor_mod(x, y),
        ArithOp::Exp => {
            if y < 0 {
                return Err(MathError::NegativeExponent(y));
            }
            let e = u32::try_from(y).map_err(|_| overflow("^"))?;
            x.checked_pow(e).ok_or(overflow("^"))
        }
    }
}

/// Quotient rounded toward negative infinity.
pub fn floor_div(x: i64, y: i64) -> Result<i64, MathError> {
    if y == 0 {
        return Err(MathError::DivisionByZero);
    }
    let q = x.checked_div(y).ok_or(MathError::Overflow("/"))?;
    if (x % y != 0) && ((x < 0) != (y < 0)) {
        Ok(q - 1)
    } else {
        Ok(q)
    }
}

/// Remainder whose sign follows the divisor.
pub fn floor_mod(x: i64, y: i64) -> Result<i64, MathError> {
    if y == 0 {
        return Err(MathError::DivisionByZero);
    }
    let r = x.checked_rem(y).unwrap_or(0);
    if r != 0 && ((r < 0) != (y < 0)) {
        Ok(r + y)
    } else {
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(xs: &[i64]) -> Value {
        Value::int_set(xs.iter().copied())
    }

    fn rel(ps: &[(i64, i64)]) -> Value {
        Value::int_rel(ps.iter().copied())
    }

    #[test]
    fn set_binary_examples() {
        let u = set_binary(SetBinOp::Union, &ints(&[1, 2]), &ints(&[2, 3])).unwrap();
        assert_eq!(u, ints(&[1, 2, 3]));
        let s = ints(&[4, 7, 9]);
        assert_eq!(
            set_binary(SetBinOp::Difference, &s, &s).unwrap(),
            Value::empty_set()
        );
        let i = set_binary(SetBinOp::Intersection, &ints(&[1, 2, 3]), &ints(&[2, 4])).unwrap();
        assert_eq!(i, ints(&[2]));
        assert!(matches!(
            set_binary(SetBinOp::Union, &Value::Int(1), &ints(&[1])),
            Err(MathError::Type { .. })
        ));
    }

    #[test]
    fn set_predicate_examples() {
        assert!(set_predicate(SetPredOp::Member, &Value::Int(2), &ints(&[1, 2])).unwrap());
        assert!(!set_predicate(SetPredOp::ProperSubset, &ints(&[1]), &ints(&[1])).unwrap());
        assert!(set_predicate(SetPredOp::Subset, &ints(&[1, 3]), &ints(&[1, 2, 3])).unwrap());
        assert!(set_predicate(SetPredOp::Member, &Value::Int(1), &Value::Int(1)).is_err());
    }

    #[test]
    fn pow_examples() {
        let l = Limits::default();
        assert_eq!(
            pow(&Value::empty_set(), &l).unwrap(),
            Value::set([Value::empty_set()])
        );
        let p = pow(&ints(&[1, 2]), &l).unwrap();
        assert_eq!(
            p,
            Value::set([Value::empty_set(), ints(&[1]), ints(&[2]), ints(&[1, 2])])
        );
        let big = ints(&(0..17).collect::<Vec<_>>());
        assert!(matches!(
            pow(&big, &l),
            Err(MathError::BoundExceeded { limit: 16, .. })
        ));
    }

    #[test]
    fn cross_examples() {
        let l = Limits::default();
        assert_eq!(
            cross(&ints(&[1]), &ints(&[2, 3]), &l).unwrap(),
            rel(&[(1, 2), (1, 3)])
        );
        assert_eq!(
            cross(&Value::empty_set(), &ints(&[1]), &l).unwrap(),
            Value::empty_set()
        );
    }

    #[test]
    fn relation_examples() {
        assert_eq!(
            rel_unary(RelUnaryOp::Inverse, &rel(&[(1, 2), (3, 4)])).unwrap(),
            rel(&[(2, 1), (4, 3)])
        );
        assert_eq!(
            rel_unary(RelUnaryOp::Domain, &rel(&[(1, 2), (1, 3), (2, 4)])).unwrap(),
            ints(&[1, 2])
        );
        assert_eq!(
            rel_unary(RelUnaryOp::IdentityOn, &ints(&[5, 6])).unwrap(),
            rel(&[(5, 5), (6, 6)])
        );
        assert!(rel_unary(RelUnaryOp::Domain, &ints(&[1])).is_err());
        assert_eq!(
            rel_image(&rel(&[(1, 2), (1, 3), (2, 4)]), &ints(&[1])).unwrap(),
            ints(&[2, 3])
        );
        let f = rel(&[(1, 2), (2, 5), (3, 9)]);
        assert_eq!(rel_image(&f, &ints(&[2, 3])).unwrap(), ints(&[5, 9]));
        assert_eq!(
            rel_image(&f, &Value::empty_set()).unwrap(),
            Value::empty_set()
        );
    }

    #[test]
    fn apply_errors_name_the_argument() {
        assert_eq!(
            rel_apply(&rel(&[(1, 10), (2, 20)]), &Value::Int(2)).unwrap(),
            Value::Int(20)
        );
        assert_eq!(
            rel_apply(&rel(&[(1, 10)]), &Value::Int(3)),
            Err(MathError::NotInDomain(Value::Int(3)))
        );
        assert_eq!(
            rel_apply(&rel(&[(1, 10), (1, 11)]), &Value::Int(1)),
            Err(MathError::NotFunctionalAt(Value::Int(1)))
        );
    }

    #[test]
    fn restriction_examples() {
        let r = rel(&[(1, 2), (2, 3)]);
        assert_eq!(
            rel_restrict(RestrictOp::DomRes, &ints(&[1]), &r).unwrap(),
            rel(&[(1, 2)])
        );
        assert_eq!(
            rel_restrict(RestrictOp::DomSub, &Value::empty_set(), &r).unwrap(),
            r
        );
        assert_eq!(
            rel_restrict(RestrictOp::RanSub, &ints(&[3]), &r).unwrap(),
            rel(&[(1, 2)])
        );
    }

    #[test]
    fn combine_examples() {
        assert_eq!(
            rel_combine(
                CombineOp::Override,
                &rel(&[(1, 10)]),
                &rel(&[(1, 20), (2, 5)])
            )
            .unwrap(),
            rel(&[(1, 20), (2, 5)])
        );
        assert_eq!(
            rel_combine(CombineOp::FComp, &rel(&[(1, 2)]), &rel(&[(2, 9)])).unwrap(),
            rel(&[(1, 9)])
        );
        assert_eq!(
            rel_combine(CombineOp::DProd, &rel(&[(1, 2)]), &rel(&[(1, 3)])).unwrap(),
            Value::set([Value::pair(
                Value::Int(1),
                Value::pair(Value::Int(2), Value::Int(3))
            )])
        );
    }

    #[test]
    fn classify_examples() {
        let facts = rel_classify(&rel(&[(1, 2), (2, 3)]), &ints(&[1, 2]), &ints(&[2, 3]));
        assert!(RelKind::TotalBij.admits(&facts));
        assert!(facts.is_relation && facts.is_function && facts.is_injective);
        assert!(facts.total_on_domain && facts.surjective_on_range);
        let facts = rel_classify(&rel(&[(1, 2), (1, 3)]), &ints(&[1]), &ints(&[2, 3]));
        assert!(!facts.is_function);
    }

    #[test]
    fn aggregate_examples() {
        assert_eq!(
            aggregate(AggregateOp::Min, &ints(&[3, 1, 7])).unwrap(),
            Value::Int(1)
        );
        assert_eq!(
            aggregate(AggregateOp::Card, &Value::empty_set()).unwrap(),
            Value::Int(0)
        );
        assert_eq!(
            aggregate(
                AggregateOp::GenUnion,
                &Value::set([ints(&[1]), ints(&[2, 3])])
            )
            .unwrap(),
            ints(&[1, 2, 3])
        );
        assert_eq!(
            aggregate(AggregateOp::Max, &Value::empty_set()),
            Err(MathError::EmptyAggregate("max"))
        );
        assert_eq!(
            aggregate(AggregateOp::GenInter, &Value::empty_set()),
            Err(MathError::EmptyAggregate("inter"))
        );
    }

    #[test]
    fn interval_examples() {
        let l = Limits::default();
        assert_eq!(interval(1, 3, &l).unwrap(), ints(&[1, 2, 3]));
        assert_eq!(interval(5, 4, &l).unwrap(), Value::empty_set());
        assert_eq!(
            aggregate(AggregateOp::Card, &interval(0, 5, &l).unwrap()).unwrap(),
            Value::Int(6)
        );
        assert!(matches!(
            interval(0, 2_000_000, &l),
            Err(MathError::BoundExceeded {
                what: "interval",
                ..
            })
        ));
    }

    #[test]
    fn floor_division_semantics() {
        assert_eq!(floor_div(7, 2), Ok(3));
        assert_eq!(floor_div(-7, 2), Ok(-4));
        assert_eq!(floor_div(7, -2), Ok(-4));
        assert_eq!(floor_mod(-7, 2), Ok(1));
        assert_eq!(floor_mod(7, -2), Ok(-1));
        assert_eq!(floor_div(1, 0), Err(MathError::DivisionByZero));
        assert_eq!(floor_div(i64::MIN, -1), Err(MathError::Overflow("/")));
        assert_eq!(
            int_arith(ArithOp::Add, i64::MAX, 1),
            Err(MathError::Overflow("+"))
        );
        assert_eq!(int_arith(ArithOp::Exp, 2, 10), Ok(1024));
    }

    #[test]
    fn relations_of_kind_agree_with_filtered_subsets() {
        let lim = Limits::default();
        let (a, b) = (ints(&[1, 2, 3]), ints(&[0, 1]));
        let all = cross(&a, &b, &lim).unwrap();
        for k in RelKind::ALL {
            let expected: Vec<Value> = subsets(all.as_set().unwrap(), &lim)
                .unwrap()
                .into_iter()
                .filter(|r| k.admits(&rel_classify(r, &a, &b)))
                .collect();
            let got = relations_of_kind(k, &a, &b, &lim).unwrap();
            assert_eq!(got, Value::set(expected), "{}", k.ascii());
        }
        let total = relations_of_kind(
            RelKind::TotalFun,
            &ints(&[1, 2, 3, 4]),
            &ints(&[0, 1, 2, 3, 4]),
            &lim,
        );
        assert_eq!(total.unwrap().as_set().unwrap().len(), 625);
    }
}
