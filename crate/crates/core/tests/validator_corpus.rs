//! Sweeps the hand-built validator corpus: every accepting file must
//! validate cleanly, every rejecting file must report exactly the expected
//! clause-tagged violations, and between them the rejecting files must
//! exercise every checkable clause.

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;

use equitree_core::tree::{parse, validate, Violation};

/// Reads a corpus directory into `(file name, contents)` pairs in name order.
fn corpus(dir: &str) -> Vec<(String, String)> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/corpus").join(dir);
    let mut paths: Vec<PathBuf> = fs::read_dir(&root)
        .expect("corpus directory exists")
        .map(|entry| entry.expect("directory entry").path())
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            let body = fs::read_to_string(&p).expect("corpus file reads");
            (name, body)
        })
        .collect()
}

fn v(clause: &str, orbits: &[u64]) -> Violation {
    Violation { clause: clause.to_string(), orbits: orbits.to_vec() }
}

#[test]
fn every_accepting_file_validates() {
    let files = corpus("accept");
    assert!(files.len() >= 20, "want at least 20 accepting files, have {}", files.len());
    for (name, body) in &files {
        let raw = parse(body).unwrap_or_else(|e| panic!("{name}: parse error: {e}"));
        if let Err(violations) = validate(&raw) {
            panic!("{name}: unexpected violations {violations:?}");
        }
    }
}

#[test]
fn every_rejecting_file_reports_the_expected_clauses() {
    let expected: Vec<(&str, Vec<Violation>)> = vec![
        ("r01_clause1_type2_fixed_child.json", vec![v("1", &[1])]),
        ("r02_clause1_type2_fixed_child_c9.json", vec![v("1", &[1])]),
        ("r03_clause3_stab_not_dividing.json", vec![v("3", &[1])]),
        ("r04_clause3_imprimitive_root.json", vec![v("3", &[0])]),
        ("r05_clause3_zero_stab.json", vec![v("3", &[1])]),
        ("r06_clause3_root_not_full.json", vec![v("3", &[0])]),
        ("r07_clause5_bad_fixed_child.json", vec![v("5", &[1])]),
        ("r08_clause5_bad_fixed_child_c15.json", vec![v("5", &[1])]),
        ("r09_clause5_fourth_class.json", vec![v("5", &[4])]),
        ("r10_clause6_equal_siblings.json", vec![v("6", &[1, 2])]),
        ("r11_clause6_siblings_up_to_sign.json", vec![v("6", &[1, 2])]),
        ("r12_clause6_twin_free_orbits.json", vec![v("6", &[1, 2])]),
        ("r13_clause7a_bad_grandchild.json", vec![v("7a", &[2])]),
        ("r14_clause7a_bad_grandchild_c9.json", vec![v("7a", &[2])]),
        ("r15_clause7b_no_fixed_circle.json", vec![v("7b", &[1])]),
        ("r16_clause7b_no_zero_entry.json", vec![v("7b", &[1])]),
        ("r17_clause7b_wrong_unit_c25.json", vec![v("7b", &[1])]),
        ("r18_clause7b_wrong_unit.json", vec![v("7b", &[1])]),
        ("r19_clause7b_stab_chain_broken.json", vec![v("7b", &[2])]),
        ("r20_clause1_with_valid_sibling.json", vec![v("1", &[1])]),
        ("r21_clause3_imprimitive_child.json", vec![v("3", &[1])]),
        ("r22_clause6_stab5_twins.json", vec![v("6", &[1, 2])]),
        ("r23_two_clauses_at_once.json", vec![v("3", &[2]), v("5", &[1])]),
    ];

    let files = corpus("reject");
    assert!(files.len() >= 20, "want at least 20 rejecting files, have {}", files.len());
    assert_eq!(files.len(), expected.len(), "expectation table covers the whole corpus");

    let mut clauses_seen = BTreeSet::new();
    for ((name, body), (expected_name, want)) in files.iter().zip(&expected) {
        assert_eq!(name, expected_name, "corpus files and expectation table are aligned");
        let raw = parse(body).unwrap_or_else(|e| panic!("{name}: parse error: {e}"));
        let got = match validate(&raw) {
            Err(violations) => violations,
            Ok(_) => panic!("{name}: unexpectedly valid"),
        };
        assert_eq!(&got, want, "{name}: wrong violation report");
        for violation in &got {
            clauses_seen.insert(violation.clause.clone());
        }
    }

    // One rejecting file per checkable clause at minimum.  Structural clauses
    // beyond these cannot be violated by a tree that parses: orbit constancy
    // is built into the one-node-per-orbit representation, and the fixed-point
    // count of each vertex sphere is forced by the stabiliser data.
    let want: BTreeSet<String> =
        ["1", "3", "5", "6", "7a", "7b"].iter().map(|s| s.to_string()).collect();
    assert_eq!(clauses_seen, want, "rejecting corpus covers every checkable clause");
}
