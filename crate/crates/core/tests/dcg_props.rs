mod common;

use std::collections::BTreeSet;

use common::QaDag;
use logicgen::dcg::{build_qatree, render_dcg, tree_to_dcg, GO_DRIVER};
use logicgen::oracle::ReplayOracle;
use proptest::prelude::*;

fn qa_dag() -> impl Strategy<Value = QaDag> {
    (2usize..12)
        .prop_flat_map(|n| {
            let kids = (0..n)
                .map(|i| {
                    prop::collection::btree_set(0..n, 0..=3)
                        .prop_map(move |s| s.into_iter().filter(|&k| k > i).collect::<BTreeSet<usize>>())
                })
                .collect::<Vec<_>>();
            (kids, prop::collection::vec(0..n + 3, n))
        })
        .prop_map(|(followups, answers)| QaDag { followups, answers })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn language_size_matches_path_count(dag in qa_dag(), limit in 1usize..6) {
        if let Err(e) = dag.check(limit) {
            prop_assert!(false, "{}", e);
        }
    }
}

#[test]
fn constructive_negation_session_shapes() {
    let oracle = ReplayOracle::load(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/constructive_negation_replay.json")).unwrap();
    let tree = build_qatree("How constructive negation works in logic and constraint programming?", 3, &oracle).unwrap();
    let text = render_dcg(&tree_to_dcg(&tree));
    let rule = regex::Regex::new(r"^q(\d+)-->q(\d+)_,a(\d+)_(?:,q(\d+))?\.$").unwrap();
    let rules: Vec<&str> = text.lines().filter(|l| rule.is_match(l)).collect();
    assert_eq!(rules.first(), Some(&"q0-->q0_,a0_,q1."));
    assert!(rules.iter().any(|l| !l.contains(",q") && l.starts_with("q12-->q12_,a")));
    assert!(text.lines().any(|l| l.starts_with("opens('") && l.ends_with(").")));
    assert!(text.trim_end().ends_with(GO_DRIVER));
}
