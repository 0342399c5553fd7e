use std::fs;
use std::path::PathBuf;

use ebforge_core::model::validate_project;
use ebforge_core::parser::{parse_project, SourceFile};
use ebforge_core::typecheck::{fully_typed, infer_types};

fn models_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn load(names: &[&str]) -> ebforge_core::model::Project {
    let files: Vec<SourceFile> = names
        .iter()
        .map(|n| {
            let p = models_dir().join(n);
            SourceFile::new(*n, fs::read_to_string(&p).unwrap())
        })
        .collect();
    parse_project(&files).unwrap()
}

const ALL: &[&str] = &[
    "bin_c0.ebc",
    "bin_m2.ebm",
    "ctx0.ebc",
    "m0_a.ebm",
    "m1_a.ebm",
    "c.ebc",
    "social.ebm",
    "ctx1.ebc",
    "ctx2.ebc",
    "mio_abstract.ebm",
    "mio_ref1.ebm",
];

#[test]
fn corpus_groups_validate_and_type() {
    for group in [&ALL[0..2], &ALL[2..5], &ALL[5..7], &ALL[7..11]] {
        let p = load(group);
        let diags = validate_project(&p);
        assert!(diags.is_empty(), "{group:?}: {diags:?}");
        let tp = infer_types(&p).unwrap();
        for m in &tp.project.machines {
            for l in &m.invariants {
                assert!(fully_typed(&l.formula));
            }
        }
    }
}
