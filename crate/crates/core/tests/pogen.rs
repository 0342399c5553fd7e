mod common;

use common::*;
use ebforge_core::mathkit::Value;
use ebforge_core::parser::render_formula;
use ebforge_core::pogen::*;

fn bounds() -> Bounds {
    let mut b = Bounds::default();
    b.grounding.default_carrier = 2;
    b
}

fn pos(machine: &str) -> Vec<Sequent> {
    gen_pos(&typed(SEARCH), machine).unwrap()
}

fn find<'a>(pos: &'a [Sequent], name: &str) -> &'a Sequent {
    pos.iter()
        .find(|s| s.name == name)
        .unwrap_or_else(|| panic!("no {name}"))
}

fn shape(s: &Sequent) -> (Vec<&str>, String) {
    (
        s.hyps.iter().map(|h| h.label.as_str()).collect(),
        render_formula(&s.goal),
    )
}

#[test]
fn abstract_search_obligations() {
    let pos = pos("m0_a");
    let names: Vec<&str> = pos.iter().map(|s| s.name.as_str()).collect();
    assert_eq!(
        names,
        [
            "thm1/THM",
            "initialisation/inv1/INV",
            "search/grd2/WD",
            "search/inv1/INV"
        ]
    );
    assert_eq!(
        shape(find(&pos, "search/inv1/INV")),
        (
            vec!["ax1", "ax2", "ax3", "thm1", "inv1", "grd1", "grd2", "act1"],
            "i' : 1..n".into()
        )
    );
    assert_eq!(
        shape(find(&pos, "search/grd2/WD")),
        (
            vec!["ax1", "ax2", "ax3", "thm1", "inv1", "grd1"],
            "k : dom(f) & f : INT +-> D".into()
        )
    );
}

#[test]
fn refinement_obligations_match_the_hand_derivation() {
    let pos = pos("m1_a");
    assert!(duplicate_names(&pos).is_empty());
    let base = [
        "ax1", "ax2", "ax3", "thm1", "inv1", "inv1_r1", "inv2_r1", "thm1_r1",
    ];
    let with = |extra: &[&'static str]| base.iter().chain(extra).copied().collect::<Vec<_>>();
    let cases: &[(&str, &[&str], &str)] = &[
        ("search/grd1/GRD", &["grd1_r1", "k"], "k : 1..n"),
        ("search/grd2/GRD", &["grd1_r1", "k"], "f(k) = v"),
        ("search/k/WFIS", &["grd1_r1", "act1_r1"], "#k . j + 1 = k"),
        ("search/act1/SIM", &["grd1_r1", "k", "act1_r1"], "i' = k"),
        (
            "search/inv2_r1/INV",
            &["grd1_r1", "k", "act1_r1"],
            "v /: f[i'..j]",
        ),
        ("progress/inv1_r1/INV", &["grd1_r1", "act1_r1"], "j' : 0..n"),
        ("progress/NAT", &["grd1_r1"], "n - j : NAT"),
        (
            "progress/VAR",
            &["grd1_r1", "act1_r1"],
            "n - (j + 1) < n - j",
        ),
    ];
    for (name, extra, goal) in cases {
        assert_eq!(
            shape(find(&pos, name)),
            (with(extra), goal.to_string()),
            "{name}"
        );
    }
    // The guard and action of the abstract event are not re-proved for
    // events that keep them, and theorems carry no preservation PO.
    assert!(pos.iter().all(|s| s.name != "progress/thm1_r1/INV"));
    assert!(pos
        .iter()
        .all(|s| s.family != Family::Fis && s.family != Family::Mrg));
}

#[test]
fn search_obligations_are_discharged_except_the_inverted_range_theorem() {
    let b = bounds();
    for m in ["m0_a", "m1_a"] {
        for s in pos(m) {
            let r = check_sequent_finite(&s, &b).unwrap();
            if s.name == "thm1_r1/THM" {
                // `f[i..j]` leaves positions below `i` unconstrained.
                let Verdict::Counterexample(xs) = &r.verdict else {
                    panic!("{}", report_row(&s, &Ok(r)));
                };
                let get = |n: &str| {
                    xs.iter()
                        .find(|(k, _)| k == n)
                        .map(|(_, v)| v.clone())
                        .unwrap()
                };
                assert!(get("i") > Value::Int(1));
            } else {
                assert_eq!(
                    r.verdict,
                    Verdict::Valid,
                    "{}",
                    report_row(&s, &Ok(r.clone()))
                );
            }
        }
    }
}

#[test]
fn vc_documents_round_trip() {
    for m in ["m0_a", "m1_a"] {
        for s in pos(m) {
            let text = emit_vc(&s);
            let back = parse_vc(&text).unwrap();
            assert_eq!(back, s.normalized(), "{text}");
            assert_eq!(emit_vc(&back), text);
        }
    }
}

#[test]
fn report_rows_have_five_columns() {
    let pos = pos("m0_a");
    let s = find(&pos, "search/inv1/INV");
    let row = report_row(s, &check_sequent_finite(s, &bounds()));
    let cols: Vec<&str> = row.split(" | ").collect();
    assert_eq!(&cols[..3], ["search/inv1/INV", "INV", "Valid"]);
    assert!(cols[3].parse::<u64>().unwrap() > 0);
    assert_eq!(cols.len(), 5);
}

#[test]
fn binary_search_obligations() {
    let t = typed(BIN);
    let pos = gen_pos(&t, "bin_m2").unwrap();
    assert!(duplicate_names(&pos).is_empty());
    let families: std::collections::BTreeSet<Family> = pos.iter().map(|s| s.family).collect();
    assert_eq!(
        families.into_iter().collect::<Vec<_>>(),
        [Family::Inv, Family::Thm, Family::Wd]
    );
    let b = bounds();
    for s in &pos {
        let r = check_sequent_finite(s, &b).unwrap();
        assert_eq!(
            r.verdict,
            Verdict::Valid,
            "{}",
            report_row(s, &Ok(r.clone()))
        );
    }
    let names: Vec<&str> = pos
        .iter()
        .filter(|s| s.name.starts_with("inc/"))
        .map(|s| s.name.as_str())
        .collect();
    assert_eq!(
        names,
        [
            "inc/grd1/WD",
            "inc/act1/WD",
            "inc/inv1/INV",
            "inc/inv3/INV",
            "inc/inv4/INV"
        ]
    );
    assert!(pos.iter().any(|s| s.name == "axm2.2/WD"));
}

#[test]
fn social_and_bus_obligations_hold() {
    let b = bounds();
    for (files, m) in [(SOCIAL, "social"), (MIO, "mio_abstract"), (MIO, "mio_ref1")] {
        let pos = gen_pos(&typed(files), m).unwrap();
        assert!(!pos.is_empty());
        for s in &pos {
            let r = check_sequent_finite(s, &b).unwrap();
            assert_eq!(
                r.verdict,
                Verdict::Valid,
                "{m}: {}",
                report_row(s, &Ok(r.clone()))
            );
        }
    }
}
