#![allow(dead_code)]

use std::fs;
use std::path::PathBuf;

use ebforge_core::parser::SourceFile;
use ebforge_core::simulate::{parse_bindings, SimConfig};
use ebforge_core::translate::{MachineProgram, Mode};
use ebforge_core::typecheck::TypedProject;
use ebforge_core::{build_program, load_project};

pub fn models_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

pub fn read(name: &str) -> String {
    fs::read_to_string(models_dir().join(name)).unwrap()
}

pub fn sources(names: &[&str]) -> Vec<SourceFile> {
    names.iter().map(|n| SourceFile::new(*n, read(n))).collect()
}

pub fn typed(names: &[&str]) -> TypedProject {
    load_project(&sources(names)).unwrap()
}

pub fn program(names: &[&str], machine: &str, mode: Mode) -> MachineProgram {
    build_program(&typed(names), machine, mode).unwrap().1
}

pub fn config(bindings: &str, mode: Mode) -> SimConfig {
    SimConfig {
        mode,
        bindings: parse_bindings(&read(bindings)).unwrap(),
        ..SimConfig::default()
    }
}

pub const BIN: &[&str] = &["bin_c0.ebc", "bin_m2.ebm"];
pub const SEARCH: &[&str] = &["ctx0.ebc", "m0_a.ebm", "m1_a.ebm"];
pub const SOCIAL: &[&str] = &["c.ebc", "social.ebm"];
pub const MIO: &[&str] = &["ctx1.ebc", "ctx2.ebc", "mio_abstract.ebm", "mio_ref1.ebm"];
