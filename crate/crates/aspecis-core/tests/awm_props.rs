//! Property tests for weaving-model views: root discovery, model references
//! and link-end resolution.

use aspecis_core::awm::{builtin_metamodels, link_kind, open_weaving, ModelRoleSet};
use aspecis_core::diag::Code;
use aspecis_core::model::{
    check_conformance, parse_model, resolve_id, Element, ModelInstance, SlotValue,
};
use aspecis_testkit::gen::{gen_populated_core, gen_weave_scenario, rng_from_seed};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn roles(rng: &mut impl Rng) -> ModelRoleSet {
    let core = gen_populated_core(rng, "M1", 1);
    let scenario = gen_weave_scenario(rng, &core, "M2", "WM").expect("core has operations");
    ModelRoleSet { core, aspect: scenario.aspect, weaving: scenario.weaving }
}

#[test]
fn every_awm_class_transitively_extends_welement() {
    let mms = builtin_metamodels();
    for class in mms.awm.classes() {
        assert!(
            mms.awm.is_subclass_of(&class.name, "WElement"),
            "{} does not reach WElement",
            class.name
        );
    }
}

#[test]
fn shipped_weaving_fixture_conforms_and_opens() {
    let rs = ModelRoleSet {
        core: parse_model(include_str!("../../../fixtures/m1_core.json")).unwrap(),
        aspect: parse_model(include_str!("../../../fixtures/m2_aspect.json")).unwrap(),
        weaving: parse_model(include_str!("../../../fixtures/weaving_hgs.json")).unwrap(),
    };
    let mms = builtin_metamodels();
    assert!(check_conformance(&rs.weaving, &mms.awm).is_empty());
    let view = open_weaving(&rs).unwrap();
    let n_links = rs
        .weaving
        .elements()
        .iter()
        .filter(|e| e.type_name == "Pointcut-Core_Aspect")
        .count();
    assert_eq!(view.links.len(), n_links);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn view_links_mirror_the_weaving_model(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let rs = roles(&mut rng);
        let view = open_weaving(&rs).unwrap();
        let n_links = rs
            .weaving
            .elements()
            .iter()
            .filter(|e| e.type_name == "Pointcut-Core_Aspect")
            .count();
        prop_assert_eq!(view.links.len(), n_links);
    }

    #[test]
    fn link_kinds_match_independent_resolution(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let rs = roles(&mut rng);
        let mms = builtin_metamodels();
        let view = open_weaving(&rs).unwrap();
        for lk in &view.links {
            let (core_kind, aspect_kind) = link_kind(lk, &rs).unwrap();
            let core_end = resolve_id(&rs.core, &mms.core, &lk.end_core).unwrap();
            let aspect_end = resolve_id(&rs.aspect, &mms.aspect, &lk.end_aspect).unwrap();
            prop_assert_eq!(core_kind, core_end.type_name.clone());
            prop_assert_eq!(aspect_kind, aspect_end.type_name.clone());
        }
    }

    #[test]
    fn corrupting_one_end_identifier_fails_resolution(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let rs = roles(&mut rng);
        prop_assert!(open_weaving(&rs).is_ok());

        let mut elements: Vec<Element> = rs.weaving.elements().to_vec();
        let end_ids: Vec<String> = elements
            .iter()
            .filter(|e| e.type_name == "EndCore" || e.type_name == "EndAspect")
            .map(|e| e.id.clone())
            .collect();
        let victim = end_ids.choose(&mut rng).unwrap().clone();
        elements
            .iter_mut()
            .find(|e| e.id == victim)
            .unwrap()
            .set("ref", SlotValue::Str("M9/Nowhere/nothing".to_owned()));

        let corrupted = ModelRoleSet {
            core: rs.core,
            aspect: rs.aspect,
            weaving: ModelInstance::new("WM", "AWM", elements).unwrap(),
        };
        let err = open_weaving(&corrupted).unwrap_err();
        prop_assert_eq!(err.code(), Code::EndResolve);
    }
}
