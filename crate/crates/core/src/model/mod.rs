//! Abstract syntax and static structure of Event-B projects.

pub mod ast;
pub mod flatten;
pub mod project;
pub mod validate;

pub use ast::*;
pub use flatten::{flatten, FlatEvent, FlatMachine, FlattenError};
pub use project::*;
pub use validate::{validate_project, Diagnostic, DiagnosticKind};
