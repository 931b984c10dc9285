//! Property tests for pattern matching and join-point enumeration.

use aspecis_core::awm::builtin_metamodels;
use aspecis_core::pointcut::{
    enumerate_joinpoints, match_pointcut, parse_pattern, wildcard_match, PointcutKind,
};
use aspecis_testkit::gen::{gen_core_model, gen_pattern, rng_from_seed};
use aspecis_testkit::oracle::{glob_oracle, match_oracle};
use proptest::prelude::*;

/// Segment characters the pattern grammar accepts.
fn segment_strategy() -> impl Strategy<Value = String> {
    proptest::collection::vec(
        proptest::sample::select(vec!['a', 'b', 'c', 'N', 'S', '_', '-', '*']),
        0..8,
    )
    .prop_map(|cs| cs.into_iter().collect())
}

proptest! {
    #[test]
    fn wildcard_match_agrees_with_backtracking_oracle(
        pattern in segment_strategy(),
        text in segment_strategy(),
    ) {
        // Texts never contain stars in real names, but the matcher must
        // treat them as plain characters; keep them in the alphabet.
        prop_assert_eq!(
            wildcard_match(&pattern, &text),
            glob_oracle(&pattern, &text),
            "pattern {:?} text {:?}",
            pattern,
            text
        );
    }

    #[test]
    fn match_pointcut_agrees_with_structural_oracle(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let core = gen_core_model(&mut rng, "M1");
        let mms = builtin_metamodels();
        for _ in 0..8 {
            let pattern_text = gen_pattern(&mut rng, &core);
            let pattern = parse_pattern(&pattern_text).expect("generated patterns parse");
            let got: Vec<(String, String)> = match_pointcut(&core, &mms.core, "call", &pattern)
                .unwrap()
                .into_iter()
                .map(|jp| (jp.class_id, jp.operation_id))
                .collect();
            prop_assert_eq!(
                got,
                match_oracle(&core, &pattern_text),
                "pattern {:?}",
                pattern_text
            );
        }
    }

    #[test]
    fn starring_a_segment_never_shrinks_the_match_set(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let core = gen_core_model(&mut rng, "M1");
        let mms = builtin_metamodels();
        let pattern_text = gen_pattern(&mut rng, &core);
        let narrow = parse_pattern(&pattern_text).unwrap();
        let (class_seg, op_seg) = pattern_text.split_once('.').unwrap();
        for wider_text in [format!("*.{}", op_seg), format!("{}.*", class_seg), "*.*".to_owned()]
        {
            let wide = parse_pattern(&wider_text).unwrap();
            let narrow_set = match_pointcut(&core, &mms.core, "call", &narrow).unwrap();
            let wide_set = match_pointcut(&core, &mms.core, "call", &wide).unwrap();
            for jp in &narrow_set {
                prop_assert!(
                    wide_set.contains(jp),
                    "{:?} in {:?} but missing from {:?}",
                    jp,
                    pattern_text,
                    wider_text
                );
            }
        }
    }

    #[test]
    fn matching_is_deterministic_and_sorted(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let core = gen_core_model(&mut rng, "M1");
        let mms = builtin_metamodels();
        let pattern = parse_pattern(&gen_pattern(&mut rng, &core)).unwrap();
        let first = match_pointcut(&core, &mms.core, "execution", &pattern).unwrap();
        let second = match_pointcut(&core, &mms.core, "execution", &pattern).unwrap();
        prop_assert_eq!(&first, &second);
        let mut sorted = first.clone();
        sorted.sort_by(|a, b| a.operation_id.cmp(&b.operation_id));
        prop_assert_eq!(first, sorted);
    }

    #[test]
    fn call_and_execution_differ_only_in_kind(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let core = gen_core_model(&mut rng, "M1");
        let mms = builtin_metamodels();
        let pattern = parse_pattern(&gen_pattern(&mut rng, &core)).unwrap();
        let calls = match_pointcut(&core, &mms.core, "call", &pattern).unwrap();
        let execs = match_pointcut(&core, &mms.core, "execution", &pattern).unwrap();
        prop_assert_eq!(calls.len(), execs.len());
        for (c, e) in calls.iter().zip(execs.iter()) {
            prop_assert_eq!(&c.class_id, &e.class_id);
            prop_assert_eq!(&c.operation_id, &e.operation_id);
            prop_assert_eq!(c.kind, PointcutKind::Call);
            prop_assert_eq!(e.kind, PointcutKind::Execution);
        }
    }

    #[test]
    fn join_point_count_equals_operation_count(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let core = gen_core_model(&mut rng, "M1");
        let mms = builtin_metamodels();
        let jps = enumerate_joinpoints(&core, &mms.core, PointcutKind::Call).unwrap();
        let n_ops =
            core.elements().iter().filter(|e| e.type_name == "Operation").count();
        prop_assert_eq!(jps.len(), n_ops);
    }

    #[test]
    fn parsed_patterns_render_back_to_their_source(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let core = gen_core_model(&mut rng, "M1");
        let text = gen_pattern(&mut rng, &core);
        let pattern = parse_pattern(&text).unwrap();
        prop_assert_eq!(pattern.to_string(), text);
    }
}

#[test]
fn prefix_star_selects_exactly_the_prefixed_operations() {
    let fixture = include_str!("../../../fixtures/m1_core.json");
    let core = aspecis_core::model::parse_model(fixture).unwrap();
    let mms = builtin_metamodels();
    let pattern = parse_pattern("Student.New*").unwrap();
    let ops: Vec<String> = match_pointcut(&core, &mms.core, "call", &pattern)
        .unwrap()
        .into_iter()
        .map(|jp| jp.operation_id)
        .collect();
    let oracle: Vec<String> =
        match_oracle(&core, "Student.New*").into_iter().map(|(_, op)| op).collect();
    assert_eq!(ops, oracle);
    assert_eq!(ops, ["M1/Student/NewSpeciality", "M1/Student/NewSubscription"]);
}
