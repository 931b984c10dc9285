//! Property tests for application collection, conflict handling and weaving.

use aspecis_core::awm::{builtin_metamodels, open_weaving, ModelRoleSet};
use aspecis_core::diag::Code;
use aspecis_core::model::{
    canonical_serialize, check_conformance, parse_model, Element, ModelInstance, SlotValue,
};
use aspecis_core::weaver::{
    collect_applications, detect_conflicts, resolve_dominant, weave, Conflict, Resolution,
    ResolveMode,
};
use aspecis_testkit::gen::{
    empty_aspect, empty_weaving, gen_contenders, gen_populated_core, gen_weave_scenario,
    rng_from_seed,
};
use aspecis_testkit::oracle::dominant_oracle;
use proptest::prelude::*;
use rand::Rng;

const M1_JSON: &str = include_str!("../../../fixtures/m1_core.json");

fn roles(rng: &mut impl Rng) -> ModelRoleSet {
    let core = gen_populated_core(rng, "M1", 1);
    let scenario = gen_weave_scenario(rng, &core, "M2", "WM").expect("core has operations");
    ModelRoleSet { core, aspect: scenario.aspect, weaving: scenario.weaving }
}

fn sorted_elements(m: &ModelInstance) -> Vec<Element> {
    let mut v = m.elements().to_vec();
    v.sort_by(|a, b| a.id.cmp(&b.id));
    v
}

/// True when `grown` equals `original` except that reference lists may have
/// gained new entries after the original prefix.
fn preserves_slots(original: &Element, grown: &Element) -> bool {
    original.type_name == grown.type_name
        && original.slots.iter().all(|(feature, value)| match (value, grown.slots.get(feature)) {
            (SlotValue::RefList(old), Some(SlotValue::RefList(new))) => {
                new.starts_with(old)
            }
            (SlotValue::Ref(old), Some(SlotValue::RefList(new))) => {
                new.first().map(String::as_str) == Some(old.as_str())
            }
            (old, Some(new)) => old == new,
            (_, None) => false,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weaving_nothing_reproduces_the_core(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let core = gen_populated_core(&mut rng, "M1", 0);
        let rs = ModelRoleSet {
            core: core.clone(),
            aspect: empty_aspect("M2"),
            weaving: empty_weaving("M1", "M2", "WM"),
        };
        let woven = weave(&rs, ResolveMode::Fail).unwrap();
        prop_assert_eq!(woven.model().conforms_to(), "WovenMM");
        prop_assert!(woven.bindings().is_empty());
        prop_assert!(woven.provenance().is_empty());
        prop_assert_eq!(sorted_elements(woven.model()), sorted_elements(&core));
    }

    #[test]
    fn woven_output_preserves_every_core_element(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let rs = roles(&mut rng);
        let woven = weave(&rs, ResolveMode::Fail).unwrap();
        for original in rs.core.elements() {
            let grown = woven.model().element(&original.id);
            prop_assert!(
                grown.is_some_and(|g| preserves_slots(original, g)),
                "core element {} was not preserved: {:?} vs {:?}",
                original.id,
                original,
                grown
            );
        }
    }

    #[test]
    fn woven_output_conforms_to_the_woven_metamodel(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let rs = roles(&mut rng);
        let mms = builtin_metamodels();
        prop_assert!(check_conformance(&rs.core, &mms.core).is_empty());
        prop_assert!(check_conformance(&rs.aspect, &mms.aspect).is_empty());
        prop_assert!(check_conformance(&rs.weaving, &mms.awm).is_empty());
        let woven = weave(&rs, ResolveMode::Fail).unwrap();
        let diags = check_conformance(woven.model(), &mms.woven);
        prop_assert!(diags.is_empty(), "woven output has diagnostics: {:?}", diags);
    }

    #[test]
    fn weaving_twice_produces_identical_bytes(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let rs = roles(&mut rng);
        let first = canonical_serialize(weave(&rs, ResolveMode::Fail).unwrap().model());
        let second = canonical_serialize(weave(&rs, ResolveMode::Fail).unwrap().model());
        prop_assert_eq!(first, second);
    }

    #[test]
    fn binding_count_equals_application_count(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let rs = roles(&mut rng);
        let view = open_weaving(&rs).unwrap();
        let apps = collect_applications(&rs, &view).unwrap();
        let woven = weave(&rs, ResolveMode::Fail).unwrap();
        prop_assert_eq!(woven.bindings().len(), apps.len());
    }

    #[test]
    fn higher_priority_takes_smaller_order_index(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let rs = roles(&mut rng);
        let view = open_weaving(&rs).unwrap();
        let apps = collect_applications(&rs, &view).unwrap();
        for a in &apps {
            for b in &apps {
                if a.join_point == b.join_point && a.kind == b.kind && a.priority > b.priority {
                    prop_assert!(
                        a.order_index < b.order_index,
                        "priority {} got index {} but priority {} got index {}",
                        a.priority,
                        a.order_index,
                        b.priority,
                        b.order_index
                    );
                }
            }
        }
    }

    #[test]
    fn distinct_priorities_resolve_like_the_max_scan_oracle(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let n = rng.gen_range(2..=6);
        let contenders = gen_contenders(&mut rng, n, true);
        let conflict = conflict_over(contenders.clone());
        let winner = resolve_dominant(&conflict).unwrap();
        prop_assert_eq!(Some(winner.clone()), dominant_oracle(&contenders));

        for factor in [2, 10] {
            let scaled: Vec<(String, i64)> =
                contenders.iter().map(|(id, p)| (id.clone(), p * factor)).collect();
            let rescaled = resolve_dominant(&conflict_over(scaled)).unwrap();
            prop_assert_eq!(&rescaled, &winner, "scaling by {} changed the winner", factor);
        }
    }

    #[test]
    fn tied_priorities_are_conflicts_under_any_scaling(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let n = rng.gen_range(2..=6);
        let mut contenders = gen_contenders(&mut rng, n, false);
        // Force a tie at the maximum.
        let max = contenders.iter().map(|(_, p)| *p).max().unwrap();
        contenders[0].1 = max;
        contenders[1].1 = max;
        prop_assert!(dominant_oracle(&contenders).is_none());
        for factor in [1, 2, 10] {
            let scaled: Vec<(String, i64)> =
                contenders.iter().map(|(id, p)| (id.clone(), p * factor)).collect();
            let err = resolve_dominant(&conflict_over(scaled)).unwrap_err();
            prop_assert_eq!(err.code(), Code::Conflict);
        }
    }
}

fn conflict_over(contenders: Vec<(String, i64)>) -> Conflict {
    Conflict {
        join_point: aspecis_core::pointcut::JoinPoint {
            class_id: "M1/Student".to_owned(),
            operation_id: "M1/Student/NewSubscription".to_owned(),
            kind: aspecis_core::pointcut::PointcutKind::Call,
        },
        contenders,
        resolution: Resolution::Unresolved,
    }
}

/// Around advices with the given priorities, all attached to
/// Student.NewSubscription of the M1 fixture.
fn around_roles(priorities: &[i64]) -> ModelRoleSet {
    let core = parse_model(M1_JSON).unwrap();

    let mut aspect_elements = Vec::new();
    let mut weaving_elements = Vec::new();
    let mut link_refs = Vec::new();
    for (i, p) in priorities.iter().enumerate() {
        let mut pc = Element::new(format!("pc{}", i), "Pointcut");
        pc.set("name", SlotValue::Str("pc".to_owned()))
            .set("typePointcut", SlotValue::Str("call".to_owned()))
            .set("pattern", SlotValue::Str("Student.NewSubscription".to_owned()));
        aspect_elements.push(pc);
        let mut advice = Element::new(format!("adv{}", i), "Advice");
        advice
            .set("name", SlotValue::Str(format!("adv{}", i)))
            .set("kind", SlotValue::Str("around".to_owned()))
            .set("bodyAdvice", SlotValue::Str(format!("around body {}", i)))
            .set("pointcut", SlotValue::Ref(format!("pc{}", i)));
        aspect_elements.push(advice);
        let mut aspect = Element::new(format!("asp{}", i), "Aspect");
        aspect
            .set("name", SlotValue::Str(format!("A{}", i)))
            .set("priority", SlotValue::Int(*p))
            .set("advices", SlotValue::RefList(vec![format!("adv{}", i)]));
        aspect_elements.push(aspect);

        let mut ec = Element::new(format!("ec{}", i), "EndCore");
        ec.set("name", SlotValue::Str(format!("ec{}", i)))
            .set("ref", SlotValue::Str("M1/Student/NewSubscription".to_owned()));
        weaving_elements.push(ec);
        let mut ea = Element::new(format!("ea{}", i), "EndAspect");
        ea.set("name", SlotValue::Str(format!("ea{}", i)))
            .set("ref", SlotValue::Str(format!("M2/A{}/adv{}", i, i)));
        weaving_elements.push(ea);
        let mut link = Element::new(format!("link{}", i), "Pointcut-Core_Aspect");
        link.set("name", SlotValue::Str(format!("L{}", i)))
            .set("endCore", SlotValue::Ref(format!("ec{}", i)))
            .set("endAspect", SlotValue::Ref(format!("ea{}", i)));
        weaving_elements.push(link);
        link_refs.push(format!("link{}", i));
    }

    let mut core_ref = Element::new("mr_core", "WModelRef");
    core_ref
        .set("name", SlotValue::Str("coreRef".to_owned()))
        .set("modelName", SlotValue::Str("M1".to_owned()));
    weaving_elements.push(core_ref);
    let mut aspect_ref = Element::new("mr_aspect", "WModelRef");
    aspect_ref
        .set("name", SlotValue::Str("aspectRef".to_owned()))
        .set("modelName", SlotValue::Str("M2".to_owned()));
    weaving_elements.push(aspect_ref);
    let mut root = Element::new("wm", "Weaving-Core_Aspect");
    root.set("name", SlotValue::Str("W".to_owned()))
        .set("Core", SlotValue::Ref("mr_core".to_owned()))
        .set("Aspect", SlotValue::Ref("mr_aspect".to_owned()))
        .set("links", SlotValue::RefList(link_refs));
    weaving_elements.push(root);

    ModelRoleSet {
        core,
        aspect: ModelInstance::new("M2", "AspectMM", aspect_elements).unwrap(),
        weaving: ModelInstance::new("WM", "AWM", weaving_elements).unwrap(),
    }
}

#[test]
fn two_arounds_at_one_join_point_are_one_conflict_with_two_contenders() {
    let rs = around_roles(&[7, 3]);
    let view = open_weaving(&rs).unwrap();
    let apps = collect_applications(&rs, &view).unwrap();
    let conflicts = detect_conflicts(&apps);
    assert_eq!(conflicts.len(), 1);
    assert_eq!(conflicts[0].contenders.len(), 2);
    assert_eq!(conflicts[0].resolution, Resolution::Dominant("M2/A0/adv0".to_owned()));

    let err = weave(&rs, ResolveMode::Fail).unwrap_err();
    assert_eq!(err.code(), Code::Conflict);

    let woven = weave(&rs, ResolveMode::Priority).unwrap();
    let kept: Vec<&str> = woven
        .bindings()
        .iter()
        .filter_map(|b| b.str_slot("adviceName"))
        .collect();
    assert_eq!(kept, ["adv0"]);
}

#[test]
fn tie_at_maximal_priority_stays_unresolved() {
    let rs = around_roles(&[5, 5, 2]);
    let view = open_weaving(&rs).unwrap();
    let conflicts = detect_conflicts(&collect_applications(&rs, &view).unwrap());
    assert_eq!(conflicts.len(), 1);
    assert_eq!(conflicts[0].contenders.len(), 3);
    assert_eq!(conflicts[0].resolution, Resolution::Unresolved);
    assert_eq!(weave(&rs, ResolveMode::Priority).unwrap_err().code(), Code::Conflict);
}

#[test]
fn duplicate_links_to_one_advice_weave_once() {
    let mut rng = rng_from_seed(20260819);
    let core = gen_populated_core(&mut rng, "M1", 1);
    let scenario = gen_weave_scenario(&mut rng, &core, "M2", "WM").unwrap();
    let rs = ModelRoleSet {
        core: core.clone(),
        aspect: scenario.aspect.clone(),
        weaving: scenario.weaving.clone(),
    };
    let baseline = canonical_serialize(weave(&rs, ResolveMode::Fail).unwrap().model());

    // Clone link0 (with fresh element ids) and append it to the root.
    let mut elements = scenario.weaving.elements().to_vec();
    let ec = elements.iter().find(|e| e.id == "ec0").unwrap().clone();
    let ea = elements.iter().find(|e| e.id == "ea0").unwrap().clone();
    let mut dup_ec = Element::new("dup_ec", "EndCore");
    dup_ec
        .set("name", SlotValue::Str("dup_ec".to_owned()))
        .set("ref", SlotValue::Str(ec.str_slot("ref").unwrap().to_owned()));
    let mut dup_ea = Element::new("dup_ea", "EndAspect");
    dup_ea
        .set("name", SlotValue::Str("dup_ea".to_owned()))
        .set("ref", SlotValue::Str(ea.str_slot("ref").unwrap().to_owned()));
    let mut dup_link = Element::new("dup_link", "Pointcut-Core_Aspect");
    dup_link
        .set("name", SlotValue::Str("Ldup".to_owned()))
        .set("endCore", SlotValue::Ref("dup_ec".to_owned()))
        .set("endAspect", SlotValue::Ref("dup_ea".to_owned()));
    elements.push(dup_ec);
    elements.push(dup_ea);
    elements.push(dup_link);
    let root = elements.iter_mut().find(|e| e.id == "wm").unwrap();
    let SlotValue::RefList(links) = root.slots.get("links").unwrap().clone() else {
        panic!("root links slot is a reference list");
    };
    let mut links = links;
    links.push("dup_link".to_owned());
    root.set("links", SlotValue::RefList(links));

    let doubled = ModelRoleSet {
        core,
        aspect: scenario.aspect,
        weaving: ModelInstance::new("WM", "AWM", elements).unwrap(),
    };
    let rewoven = canonical_serialize(weave(&doubled, ResolveMode::Fail).unwrap().model());
    assert_eq!(baseline, rewoven);
}
