//! Event-B modelling toolchain: parsing, type checking, translation to an
//! executable program, simulation and finite proof-obligation checking.

pub mod mathkit;
pub mod model;
pub mod parser;
pub mod pogen;
pub mod simulate;
pub mod translate;
pub mod typecheck;

use thiserror::Error;

use model::{flatten, validate_project, Diagnostic, FlatMachine, FlattenError};
use parser::{parse_project, ParseError, SourceFile};
use translate::{translate_machine, MachineProgram, Mode, TranslateError};
use typecheck::{infer_types, TypeError, TypedProject};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Diagnostic>),
    #[error("{0}")]
    Type(#[from] TypeError),
    #[error("{0}")]
    Flatten(#[from] FlattenError),
    #[error("{0}")]
    Translate(#[from] TranslateError),
}

/// Parses, validates and types a set of source files.
pub fn load_project(files: &[SourceFile]) -> Result<TypedProject, PipelineError> {
    let project = parse_project(files)?;
    let diags = validate_project(&project);
    if !diags.is_empty() {
        return Err(PipelineError::Invalid(diags));
    }
    Ok(infer_types(&project)?)
}

/// Flattens and translates one machine of a typed project.
pub fn build_program(
    typed: &TypedProject,
    machine: &str,
    mode: Mode,
) -> Result<(FlatMachine, MachineProgram), PipelineError> {
    let flat = flatten(&typed.project, machine)?;
    let program = translate_machine(typed, &flat, mode)?;
    Ok((flat, program))
}
