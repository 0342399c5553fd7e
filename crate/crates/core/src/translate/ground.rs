//! Finite universes for carrier sets and types.

use std::collections::BTreeMap;

use crate::mathkit::{cross, subsets, Limits, SetValue, Value};
use crate::model::Type;

use super::EvalError;

/// How abstract types become finite at run time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grounding {
    /// Carrier name to size `k`; the carrier becomes `0..k-1`.
    pub carriers: BTreeMap<String, i64>,
    pub default_carrier: i64,
    /// Range for integer-typed symbols without a syntactic bound.
    pub int_range: Option<(i64, i64)>,
    pub limits: Limits,
}

impl Default for Grounding {
    fn default() -> Self {
        Grounding {
            carriers: BTreeMap::new(),
            default_carrier: 4,
            int_range: None,
            limits: Limits::default(),
        }
    }
}

impl Grounding {
    pub fn carrier_size(&self, name: &str) -> i64 {
        self.carriers
            .get(name)
            .copied()
            .unwrap_or(self.default_carrier)
    }

    pub fn carrier_set(&self, name: &str) -> SetValue {
        SetValue::from_vec((0..self.carrier_size(name)).map(Value::Int).collect())
    }

    /// Every value of type `ty`, in canonical order.
    pub fn universe(&self, ty: &Type) -> Result<Vec<Value>, EvalError> {
        Ok(match ty {
            Type::Int => {
                let (lo, hi) = self
                    .int_range
                    .ok_or_else(|| EvalError::Unbounded(ty.to_string()))?;
                (lo..=hi).map(Value::Int).collect()
            }
            Type::Bool => vec![Value::Bool(false), Value::Bool(true)],
            Type::Carrier(c) => (0..self.carrier_size(c)).map(Value::Int).collect(),
            Type::Pair(a, b) => {
                let a = Value::Set(SetValue::from_vec(self.universe(a)?));
                let b = Value::Set(SetValue::from_vec(self.universe(b)?));
                match cross(&a, &b, &self.limits)? {
                    Value::Set(s) => s.as_slice().to_vec(),
                    _ => unreachable!(),
                }
            }
            Type::Set(e) => {
                let base = SetValue::from_vec(self.universe(e)?);
                let mut all = subsets(&base, &self.limits)?;
                all.sort_unstable();
                all
            }
        })
    }

    /// Whether [`Grounding::universe`] can succeed for `ty`.
    pub fn groundable(&self, ty: &Type) -> bool {
        self.int_range.is_some() || !ty.mentions_int()
    }
}
