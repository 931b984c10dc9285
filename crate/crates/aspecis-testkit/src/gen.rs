//! Seeded random generators for core models, patterns and weave scenarios.
//!
//! Generated models follow the builtin metamodel structures: classes at the
//! model root with operation and attribute children, plus optional
//! associations. All names are drawn from disjoint pools so that name-path
//! identifiers stay injective by construction (tests that need ambiguity
//! introduce it deliberately via [`with_duplicate_sibling`]).

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use aspecis_core::model::{Element, ModelInstance, SlotValue};

const CLASS_NAMES: [&str; 10] = [
    "Student", "University", "Speciality", "Order", "Invoice", "Sensor", "Account", "Course",
    "Library", "Vehicle",
];
const OP_NAMES: [&str; 10] = [
    "NewSubscription",
    "NewSpeciality",
    "getName",
    "setLevel",
    "verify",
    "register",
    "cancel",
    "update",
    "compute",
    "close",
];
const ATTR_NAMES: [&str; 6] = ["IdStudent", "NbreOfHours", "Title", "Level", "Code", "Size"];
const ASSOC_NAMES: [&str; 4] = ["enrollment", "subscription", "ownership", "supervision"];
const PRIMITIVES: [&str; 3] = ["String", "Integer", "Boolean"];
const PARAM_POOL: [&str; 4] = ["", "IdSpecialty", "id : String", "level : Integer"];
const RETURN_POOL: [&str; 5] = ["", "Boolean", "Integer", "String", "Speciality"];

/// Deterministic RNG for a test seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random core model: 0..=5 classes, each with 0..=4 operations and
/// 0..=3 attributes, plus 0..=2 associations between classes.
pub fn gen_core_model(rng: &mut impl Rng, model_name: &str) -> ModelInstance {
    let n_classes = rng.gen_range(0..=5);
    let class_names: Vec<&str> =
        CLASS_NAMES.choose_multiple(rng, n_classes).copied().collect();

    let mut elements = Vec::new();
    for (ci, class_name) in class_names.iter().enumerate() {
        let n_ops = rng.gen_range(0..=4);
        let n_attrs = rng.gen_range(0..=3);
        let op_names: Vec<&str> = OP_NAMES.choose_multiple(rng, n_ops).copied().collect();
        let attr_names: Vec<&str> = ATTR_NAMES.choose_multiple(rng, n_attrs).copied().collect();

        let mut op_refs = Vec::new();
        for (oi, op_name) in op_names.iter().enumerate() {
            let id = format!("c{}_o{}", ci, oi);
            let mut e = Element::new(id.clone(), "Operation");
            e.set("name", SlotValue::Str((*op_name).to_owned()))
                .set("params", SlotValue::Str((*PARAM_POOL.choose(rng).unwrap()).to_owned()))
                .set("returnType", SlotValue::Str((*RETURN_POOL.choose(rng).unwrap()).to_owned()));
            elements.push(e);
            op_refs.push(id);
        }
        let mut attr_refs = Vec::new();
        for (ai, attr_name) in attr_names.iter().enumerate() {
            let id = format!("c{}_a{}", ci, ai);
            let mut e = Element::new(id.clone(), "Attribute");
            e.set("name", SlotValue::Str((*attr_name).to_owned()))
                .set("type", SlotValue::Str((*PRIMITIVES.choose(rng).unwrap()).to_owned()));
            elements.push(e);
            attr_refs.push(id);
        }

        let mut class = Element::new(format!("c{}", ci), "Class");
        class.set("name", SlotValue::Str((*class_name).to_owned()));
        if !op_refs.is_empty() || rng.gen_bool(0.5) {
            class.set("operations", SlotValue::RefList(op_refs));
        }
        if !attr_refs.is_empty() {
            class.set("attributes", SlotValue::RefList(attr_refs));
        }
        elements.push(class);
    }

    if n_classes >= 1 {
        let n_assocs = rng.gen_range(0..=2usize.min(ASSOC_NAMES.len()));
        let assoc_names: Vec<&str> = ASSOC_NAMES.choose_multiple(rng, n_assocs).copied().collect();
        for (si, assoc_name) in assoc_names.iter().enumerate() {
            let from = rng.gen_range(0..n_classes);
            let to = rng.gen_range(0..n_classes);
            let mut e = Element::new(format!("s{}", si), "Association");
            e.set("name", SlotValue::Str((*assoc_name).to_owned()))
                .set("from", SlotValue::Ref(format!("c{}", from)))
                .set("to", SlotValue::Ref(format!("c{}", to)));
            elements.push(e);
        }
    }

    ModelInstance::new(model_name, "CoreMM", elements).expect("generated ids are unique")
}

/// (class name, operation name) pairs of a generated core model, walking the
/// generator's structure directly.
pub fn class_op_pairs(core: &ModelInstance) -> Vec<(String, String)> {
    let mut pairs = Vec::new();
    for class in core.elements().iter().filter(|e| e.type_name == "Class") {
        let Some(class_name) = class.name_slot() else { continue };
        let Some(ops) = class.slots.get("operations") else { continue };
        for op_id in ops.ref_ids() {
            if let Some(op_name) = core.element(op_id).and_then(|o| o.name_slot()) {
                pairs.push((class_name.to_owned(), op_name.to_owned()));
            }
        }
    }
    pairs
}

/// A core model guaranteed to contain at least `min_ops` operations.
pub fn gen_populated_core(rng: &mut impl Rng, model_name: &str, min_ops: usize) -> ModelInstance {
    loop {
        let m = gen_core_model(rng, model_name);
        if class_op_pairs(&m).len() >= min_ops {
            return m;
        }
    }
}

/// A pattern that always parses; flavors range from exact names taken from
/// the model to fully synthetic starred segments.
pub fn gen_pattern(rng: &mut impl Rng, core: &ModelInstance) -> String {
    let pairs = class_op_pairs(core);
    let pick = |rng: &mut dyn rand::RngCore, pairs: &[(String, String)]| {
        pairs.choose(rng).cloned().unwrap_or(("Ghost".to_owned(), "missing".to_owned()))
    };
    match rng.gen_range(0..7) {
        0 => {
            let (c, o) = pick(rng, &pairs);
            format!("{}.{}", c, o)
        }
        1 => {
            let (c, _) = pick(rng, &pairs);
            format!("{}.*", c)
        }
        2 => {
            let (_, o) = pick(rng, &pairs);
            format!("*.{}", o)
        }
        3 => {
            let (c, o) = pick(rng, &pairs);
            let cut = rng.gen_range(0..=o.chars().count());
            let prefix: String = o.chars().take(cut).collect();
            format!("{}.{}*", c, prefix)
        }
        4 => {
            let (c, o) = pick(rng, &pairs);
            let cut = rng.gen_range(0..=c.chars().count());
            let suffix: String = c.chars().skip(cut).collect();
            format!("*{}.{}", suffix, o)
        }
        5 => "*.*".to_owned(),
        _ => {
            let alphabet = ['a', 'b', 'e', 'N', 'S', 'w', '*', '*'];
            let seg = |rng: &mut dyn rand::RngCore| -> String {
                (0..rng.gen_range(1..=5)).map(|_| *alphabet.choose(rng).unwrap()).collect()
            };
            format!("{}.{}", seg(rng), seg(rng))
        }
    }
}

/// One advice planned by [`gen_weave_scenario`].
pub struct PlannedAdvice {
    pub aspect_name: String,
    pub advice_name: String,
    pub kind: &'static str,
    pub priority: i64,
    pub target_class: String,
    pub target_op: String,
    pub pattern: String,
    pub type_pointcut: &'static str,
    pub template_names: Vec<String>,
}

/// A generated aspect model and matching weaving model over `core`.
pub struct WeaveScenario {
    pub aspect: ModelInstance,
    pub weaving: ModelInstance,
    pub advices: Vec<PlannedAdvice>,
}

/// Generates a conformant (aspect, weaving) pair over `core`: 1..=3 aspects
/// with distinct priorities, 1..=4 advices total, at most one around advice
/// (so fail-mode weaving always succeeds), every link end guaranteed to be
/// in its pattern's match set. Returns None when `core` has no operations.
pub fn gen_weave_scenario(
    rng: &mut impl Rng,
    core: &ModelInstance,
    aspect_model_name: &str,
    weaving_model_name: &str,
) -> Option<WeaveScenario> {
    let pairs = class_op_pairs(core);
    if pairs.is_empty() {
        return None;
    }

    let n_aspects = rng.gen_range(1..=3);
    let priorities: Vec<i64> = {
        let mut pool: Vec<i64> = (0..20).collect();
        pool.shuffle(rng);
        pool.into_iter().take(n_aspects).collect()
    };
    let n_advices = rng.gen_range(1..=4);
    let mut around_used = false;
    let mut template_counter = 0usize;

    let mut aspect_elements: Vec<Element> = Vec::new();
    let mut advices: Vec<PlannedAdvice> = Vec::new();
    let mut advice_refs_per_aspect: Vec<Vec<String>> = vec![Vec::new(); n_aspects];

    for ai in 0..n_advices {
        let owner = rng.gen_range(0..n_aspects);
        let aspect_name = format!("A{}", owner);
        let advice_name = format!("adv{}", ai);
        let kind = if !around_used && rng.gen_bool(0.25) {
            around_used = true;
            "around"
        } else if rng.gen_bool(0.5) {
            "before"
        } else {
            "after"
        };
        let (target_class, target_op) = pairs.choose(rng).cloned().unwrap();
        let pattern = match rng.gen_range(0..3) {
            0 => format!("{}.{}", target_class, target_op),
            1 => format!("{}.*", target_class),
            _ => format!("*.{}", target_op),
        };
        let type_pointcut = if rng.gen_bool(0.5) { "call" } else { "execution" };

        let advice_id = format!("a{}_adv{}", owner, ai);
        let pc_id = format!("{}_pc", advice_id);
        let mut pc = Element::new(pc_id.clone(), "Pointcut");
        pc.set("name", SlotValue::Str(format!("pc{}", ai)))
            .set("typePointcut", SlotValue::Str(type_pointcut.to_owned()))
            .set("pattern", SlotValue::Str(pattern.clone()));
        aspect_elements.push(pc);

        let n_templates = rng.gen_range(0..=2);
        let mut template_refs = Vec::new();
        let mut template_names = Vec::new();
        for _ in 0..n_templates {
            let tpl_name = format!("tpl{}", template_counter);
            let tpl_id = format!("{}_t{}", advice_id, template_counter);
            template_counter += 1;
            let mut t = Element::new(tpl_id.clone(), "OperationTemplate");
            t.set("name", SlotValue::Str(tpl_name.clone()))
                .set("params", SlotValue::Str((*PARAM_POOL.choose(rng).unwrap()).to_owned()))
                .set("returnType", SlotValue::Str((*RETURN_POOL.choose(rng).unwrap()).to_owned()));
            aspect_elements.push(t);
            template_refs.push(tpl_id);
            template_names.push(tpl_name);
        }

        let mut advice = Element::new(advice_id.clone(), "Advice");
        advice
            .set("name", SlotValue::Str(advice_name.clone()))
            .set("kind", SlotValue::Str(kind.to_owned()))
            .set("bodyAdvice", SlotValue::Str(format!("generated advice {}", ai)))
            .set("pointcut", SlotValue::Ref(pc_id));
        if !template_refs.is_empty() {
            advice.set("addedOperations", SlotValue::RefList(template_refs));
        }
        aspect_elements.push(advice);
        advice_refs_per_aspect[owner].push(advice_id);

        advices.push(PlannedAdvice {
            aspect_name,
            advice_name,
            kind,
            priority: priorities[owner],
            target_class,
            target_op,
            pattern,
            type_pointcut,
            template_names,
        });
    }

    for (i, advice_refs) in advice_refs_per_aspect.iter().enumerate() {
        let mut aspect = Element::new(format!("asp{}", i), "Aspect");
        aspect
            .set("name", SlotValue::Str(format!("A{}", i)))
            .set("priority", SlotValue::Int(priorities[i]));
        if !advice_refs.is_empty() {
            aspect.set("advices", SlotValue::RefList(advice_refs.clone()));
        }
        aspect_elements.push(aspect);
    }

    let aspect_model = ModelInstance::new(aspect_model_name, "AspectMM", aspect_elements)
        .expect("generated aspect ids are unique");

    let mut weaving_elements = Vec::new();
    let mut link_refs = Vec::new();
    for (ai, advice) in advices.iter().enumerate() {
        let end_core_id = format!("ec{}", ai);
        let end_aspect_id = format!("ea{}", ai);
        let mut ec = Element::new(end_core_id.clone(), "EndCore");
        ec.set("name", SlotValue::Str(end_core_id.clone())).set(
            "ref",
            SlotValue::Str(format!(
                "{}/{}/{}",
                core.name(),
                advice.target_class,
                advice.target_op
            )),
        );
        weaving_elements.push(ec);
        let mut ea = Element::new(end_aspect_id.clone(), "EndAspect");
        ea.set("name", SlotValue::Str(end_aspect_id.clone())).set(
            "ref",
            SlotValue::Str(format!(
                "{}/{}/{}",
                aspect_model_name, advice.aspect_name, advice.advice_name
            )),
        );
        weaving_elements.push(ea);
        let link_id = format!("link{}", ai);
        let mut link = Element::new(link_id.clone(), "Pointcut-Core_Aspect");
        link.set("name", SlotValue::Str(format!("L{}", ai)))
            .set("endCore", SlotValue::Ref(end_core_id))
            .set("endAspect", SlotValue::Ref(end_aspect_id));
        weaving_elements.push(link);
        link_refs.push(link_id);
    }
    weaving_elements.extend(weaving_scaffold(core.name(), aspect_model_name, link_refs));

    let weaving = ModelInstance::new(weaving_model_name, "AWM", weaving_elements)
        .expect("generated weaving ids are unique");

    Some(WeaveScenario { aspect: aspect_model, weaving, advices })
}

fn weaving_scaffold(
    core_name: &str,
    aspect_name: &str,
    link_refs: Vec<String>,
) -> Vec<Element> {
    let mut core_ref = Element::new("modelref_core", "WModelRef");
    core_ref
        .set("name", SlotValue::Str("coreRef".to_owned()))
        .set("modelName", SlotValue::Str(core_name.to_owned()));
    let mut aspect_ref = Element::new("modelref_aspect", "WModelRef");
    aspect_ref
        .set("name", SlotValue::Str("aspectRef".to_owned()))
        .set("modelName", SlotValue::Str(aspect_name.to_owned()));
    let mut root = Element::new("wm", "Weaving-Core_Aspect");
    root.set("name", SlotValue::Str("W".to_owned()))
        .set("Core", SlotValue::Ref("modelref_core".to_owned()))
        .set("Aspect", SlotValue::Ref("modelref_aspect".to_owned()));
    if !link_refs.is_empty() {
        root.set("links", SlotValue::RefList(link_refs));
    }
    vec![core_ref, aspect_ref, root]
}

/// An aspect model with no elements; conforms to AspectMM trivially.
pub fn empty_aspect(name: &str) -> ModelInstance {
    ModelInstance::new(name, "AspectMM", Vec::new()).expect("empty model is valid")
}

/// A weaving model with the root and model references but zero links.
pub fn empty_weaving(core_name: &str, aspect_name: &str, weaving_name: &str) -> ModelInstance {
    ModelInstance::new(weaving_name, "AWM", weaving_scaffold(core_name, aspect_name, Vec::new()))
        .expect("scaffold ids are unique")
}

/// Renames one operation of a multi-operation class to collide with a
/// sibling, making name paths ambiguous. None when no class has two
/// operations.
pub fn with_duplicate_sibling(rng: &mut impl Rng, core: &ModelInstance) -> Option<ModelInstance> {
    let candidates: Vec<(&str, Vec<&str>)> = core
        .elements()
        .iter()
        .filter(|e| e.type_name == "Class")
        .filter_map(|e| {
            let ops = e.slots.get("operations")?.ref_ids();
            (ops.len() >= 2).then_some((e.id.as_str(), ops))
        })
        .collect();
    let (_, ops) = candidates.choose(rng)?;
    let donor = core.element(ops[0])?.name_slot()?.to_owned();
    let victim_id = ops[1].to_owned();

    let elements: Vec<Element> = core
        .elements()
        .iter()
        .map(|e| {
            let mut e = e.clone();
            if e.id == victim_id {
                e.set("name", SlotValue::Str(donor.clone()));
            }
            e
        })
        .collect();
    Some(ModelInstance::new(core.name(), core.conforms_to(), elements).expect("ids unchanged"))
}

/// Random contender list for dominance tests; priorities all distinct when
/// `distinct`, otherwise ties are possible (and likely).
pub fn gen_contenders(rng: &mut impl Rng, n: usize, distinct: bool) -> Vec<(String, i64)> {
    let priorities: Vec<i64> = if distinct {
        let mut pool: Vec<i64> = (0..(n as i64 * 4)).collect();
        pool.shuffle(rng);
        pool.into_iter().take(n).collect()
    } else {
        (0..n).map(|_| rng.gen_range(0..(n as i64 + 2) / 2)).collect()
    };
    priorities
        .into_iter()
        .enumerate()
        .map(|(i, p)| (format!("M2/A{}/adv{}", i, i), p))
        .collect()
}
