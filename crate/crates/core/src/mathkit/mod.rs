//! Finite sets, relations and integers: the runtime value library.

mod ops;
mod value;

pub use ops::*;
pub use value::{EBValue, SetValue, Value};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MathError {
    #[error("{op}: expected {expected}, found {found}")]
    Type {
        op: &'static str,
        expected: &'static str,
        found: String,
    },
    #[error("{what} of size {size} exceeds the bound {limit}")]
    BoundExceeded {
        what: &'static str,
        size: u64,
        limit: u64,
    },
    #[error("{0} is not in the domain")]
    NotInDomain(Value),
    #[error("relation is not functional at {0}")]
    NotFunctionalAt(Value),
    #[error("{0} of an empty set")]
    EmptyAggregate(&'static str),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("division by zero")]
    DivisionByZero,
    #[error("negative exponent {0}")]
    NegativeExponent(i64),
}

impl MathError {
    pub(crate) fn type_error(op: &'static str, expected: &'static str, found: &Value) -> Self {
        let mut rendered = found.to_string();
        if rendered.len() > 60 {
            rendered.truncate(57);
            rendered.push_str("...");
        }
        MathError::Type {
            op,
            expected,
            found: format!("{} {}", found.kind_name(), rendered),
        }
    }
}
