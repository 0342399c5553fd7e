//! Runtime values of the Event-B mathematical language.
//!
//! Relations have no dedicated representation: a relation is a [`Value::Set`]
//! whose elements are all [`Value::Pair`]s. Sets keep their elements sorted in
//! the canonical order and free of duplicates, so structural equality on the
//! representation is set equality.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

/// An immutable Event-B value.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Pair(Arc<(Value, Value)>),
    Set(SetValue),
}

/// Alias kept for readers who know the runtime library by its original name.
pub type EBValue = Value;

impl Value {
    pub fn pair(a: Value, b: Value) -> Value {
        Value::Pair(Arc::new((a, b)))
    }

    pub fn set<I: IntoIterator<Item = Value>>(elems: I) -> Value {
        Value::Set(SetValue::from_iter(elems))
    }

    pub fn empty_set() -> Value {
        Value::Set(SetValue::empty())
    }

    pub fn int_set<I: IntoIterator<Item = i64>>(elems: I) -> Value {
        Value::set(elems.into_iter().map(Value::Int))
    }

    /// Builds a relation from integer maplets.
    pub fn int_rel<I: IntoIterator<Item = (i64, i64)>>(pairs: I) -> Value {
        Value::set(
            pairs
                .into_iter()
                .map(|(a, b)| Value::pair(Value::Int(a), Value::Int(b))),
        )
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_pair(&self) -> Option<(&Value, &Value)> {
        match self {
            Value::Pair(p) => Some((&p.0, &p.1)),
            _ => None,
        }
    }

    pub fn as_set(&self) -> Option<&SetValue> {
        match self {
            Value::Set(s) => Some(s),
            _ => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Value::Int(_) => "integer",
            Value::Bool(_) => "boolean",
            Value::Pair(_) => "pair",
            Value::Set(_) => "set",
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Value::Int(_) => 0,
            Value::Bool(_) => 1,
            Value::Pair(_) => 2,
            Value::Set(_) => 3,
        }
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => a.cmp(b),
            (Value::Bool(a), Value::Bool(b)) => a.cmp(b),
            (Value::Pair(a), Value::Pair(b)) => a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)),
            (Value::Set(a), Value::Set(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<i64> for Value {
    fn from(i: i64) -> Self {
        Value::Int(i)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<SetValue> for Value {
    fn from(s: SetValue) -> Self {
        Value::Set(s)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Bool(true) => f.write_str("TRUE"),
            Value::Bool(false) => f.write_str("FALSE"),
            Value::Pair(p) => write!(f, "({} |-> {})", p.0, p.1),
            Value::Set(s) => write!(f, "{s}"),
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A finite set in canonical form: sorted ascending, duplicate-free.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct SetValue(Arc<Vec<Value>>);

impl SetValue {
    pub fn empty() -> Self {
        SetValue(Arc::new(Vec::new()))
    }

    pub fn singleton(v: Value) -> Self {
        SetValue(Arc::new(vec![v]))
    }

    /// Wraps a vector the caller guarantees is sorted and duplicate-free.
    pub(crate) fn from_sorted(elems: Vec<Value>) -> Self {
        debug_assert!(elems.windows(2).all(|w| w[0] < w[1]));
        SetValue(Arc::new(elems))
    }

    pub fn from_vec(mut elems: Vec<Value>) -> Self {
        elems.sort_unstable();
        elems.dedup();
        SetValue(Arc::new(elems))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: &Value) -> bool {
        self.0.binary_search(v).is_ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Value> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[Value] {
        &self.0
    }

    pub fn first(&self) -> Option<&Value> {
        self.0.first()
    }

    pub fn last(&self) -> Option<&Value> {
        self.0.last()
    }

    /// True when every element is a pair. Elements sort by kind, so the
    /// ends decide.
    pub fn is_relation(&self) -> bool {
        let pair = |v: Option<&Value>| matches!(v, None | Some(Value::Pair(_)));
        pair(self.0.first()) && pair(self.0.last())
    }

    /// The maplets whose first component equals `x`, located by binary search
    /// (pairs sort by first component first).
    pub(crate) fn maplets_of(&self, x: &Value) -> &[Value] {
        let before = |v: &Value| match (v, x) {
            (Value::Pair(p), Value::Int(k)) => match &p.0 {
                Value::Int(a) => a < k,
                a => a < x,
            },
            (Value::Pair(p), _) => p.0 < *x,
            (other, _) => other.rank() < 2,
        };
        let lo = self.0.partition_point(before);
        let len = self.0[lo..]
            .iter()
            .take_while(|v| matches!(v, Value::Pair(p) if p.0 == *x))
            .count();
        &self.0[lo..lo + len]
    }
}

impl FromIterator<Value> for SetValue {
    fn from_iter<I: IntoIterator<Item = Value>>(iter: I) -> Self {
        SetValue::from_vec(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a SetValue {
    type Item = &'a Value;
    type IntoIter = std::slice::Iter<'a, Value>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl Ord for SetValue {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.iter().cmp(other.0.iter()))
    }
}

impl PartialOrd for SetValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SetValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for SetValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_across_variants() {
        let mut vs = vec![
            Value::empty_set(),
            Value::pair(Value::Int(1), Value::Int(2)),
            Value::Bool(false),
            Value::Int(3),
            Value::Bool(true),
            Value::Int(-1),
        ];
        vs.sort();
        let rendered: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
        assert_eq!(rendered, ["-1", "3", "FALSE", "TRUE", "(1 |-> 2)", "{}"]);
    }

    #[test]
    fn sets_order_by_length_first() {
        let a = Value::int_set([5]);
        let b = Value::int_set([1, 2]);
        assert!(a < b);
        assert!(Value::int_set([1, 3]) > Value::int_set([1, 2]));
    }

    #[test]
    fn set_construction_is_canonical() {
        let a = Value::int_set([3, 1, 2, 1]);
        let b = Value::int_set([1, 2, 3]);
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "{1, 2, 3}");
    }

    #[test]
    fn rendering() {
        let r = Value::int_rel([(1, 2)]);
        assert_eq!(r.to_string(), "{(1 |-> 2)}");
        assert_eq!(Value::empty_set().to_string(), "{}");
    }

    #[test]
    fn maplet_lookup() {
        let r = Value::int_rel([(1, 10), (1, 11), (2, 20), (3, 30)]);
        let s = r.as_set().unwrap();
        assert_eq!(s.maplets_of(&Value::Int(1)).len(), 2);
        assert_eq!(s.maplets_of(&Value::Int(4)).len(), 0);
    }
}
