//! Weaving: applying matched advices to the core model.
//!
//! The pipeline is open_weaving → [`collect_applications`] →
//! [`detect_conflicts`] → (optionally [`resolve_dominant`] per conflict) →
//! [`apply_weave`], wrapped end to end by [`weave`].
//!
//! Weaving is additive: every input core element survives unchanged except
//! that class operation lists may grow (new entries appended after the
//! originals). Each surviving application leaves one WeaveBinding element
//! recording the join point, advice, kind and order; each advice's added
//! operations are injected into the matched class, namespaced under the
//! class id. Conflicts exist only between around advices sharing a join
//! point and are settled by strict stakeholder-priority dominance.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::awm::{builtin_metamodels, sole_ref_id, ModelRoleSet, WeavingView};
use crate::diag::{Code, Error, Result};
use crate::model::{parent_map, resolve_id, Element, ModelInstance, SlotValue};
use crate::pointcut::{match_pointcut, JoinPoint};

/// When an advice runs relative to its join point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AdviceKind {
    Before,
    After,
    Around,
}

impl AdviceKind {
    /// Parses an Advice.kind slot value; anything else is E_KIND.
    pub fn parse(text: &str, path: &str) -> Result<Self> {
        match text {
            "before" => Ok(AdviceKind::Before),
            "after" => Ok(AdviceKind::After),
            "around" => Ok(AdviceKind::Around),
            other => Err(Error::new(
                Code::Kind,
                path,
                format!("advice kind must be `before`, `after` or `around`, found `{}`", other),
            )),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            AdviceKind::Before => "before",
            AdviceKind::After => "after",
            AdviceKind::Around => "around",
        }
    }

    // stable report order: before, after, around
    fn rank(&self) -> u8 {
        match self {
            AdviceKind::Before => 0,
            AdviceKind::After => 1,
            AdviceKind::Around => 2,
        }
    }
}

impl fmt::Display for AdviceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How [`weave`] treats conflicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResolveMode {
    /// Any conflict is an error.
    Fail,
    /// Keep the strictly dominant around advice per conflict; ties error.
    Priority,
}

/// One advice attached to one join point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdviceApplication {
    pub join_point: JoinPoint,
    /// Name-path identifier of the advice in the aspect model.
    pub advice_id: String,
    pub aspect_name: String,
    pub advice_name: String,
    pub kind: AdviceKind,
    pub priority: i64,
    /// Position within the (join point, kind) group: consecutive from 0,
    /// ascending by (priority descending, aspect name, advice name).
    pub order_index: usize,
}

/// Outcome stored on a [`Conflict`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Resolution {
    Dominant(String),
    Unresolved,
}

/// Two or more around advices at one join point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conflict {
    pub join_point: JoinPoint,
    /// (advice identifier, priority), in group order.
    pub contenders: Vec<(String, i64)>,
    pub resolution: Resolution,
}

/// Where an injected element came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProvenanceRecord {
    /// File-local id of the element added to the woven model.
    pub injected_id: String,
    /// Name-path identifier of the source OperationTemplate in the aspect
    /// model.
    pub source_id: String,
    /// Opaque bodyAdvice text of the advice that carried the template.
    pub body_advice: String,
}

/// The woven Cooperative-Requirements model.
#[derive(Debug, Clone)]
pub struct WovenModel {
    model: ModelInstance,
    provenance: Vec<ProvenanceRecord>,
}

impl WovenModel {
    pub fn model(&self) -> &ModelInstance {
        &self.model
    }

    pub fn provenance(&self) -> &[ProvenanceRecord] {
        &self.provenance
    }

    /// The WeaveBinding elements, in element order.
    pub fn bindings(&self) -> Vec<&Element> {
        self.model.elements().iter().filter(|e| e.type_name == "WeaveBinding").collect()
    }
}

fn no_advice(weaving: &ModelInstance, link_id: &str, message: String) -> Error {
    Error::new(Code::NoAdvice, format!("{}/{}", weaving.name(), link_id), message)
}

/// Sorts applications canonically and assigns group-local order indices.
///
/// Global order: (operation id, join-point kind, advice kind), then within
/// each such group (priority descending, aspect name, advice name, advice
/// id). The order index restarts at 0 per group.
fn normalize_order(apps: &mut [AdviceApplication]) {
    apps.sort_by(|a, b| {
        (a.join_point.operation_id.as_str(), a.join_point.kind, a.kind.rank())
            .cmp(&(b.join_point.operation_id.as_str(), b.join_point.kind, b.kind.rank()))
            .then_with(|| b.priority.cmp(&a.priority))
            .then_with(|| a.aspect_name.cmp(&b.aspect_name))
            .then_with(|| a.advice_name.cmp(&b.advice_name))
            .then_with(|| a.advice_id.cmp(&b.advice_id))
    });
    let mut group: Option<(String, crate::pointcut::PointcutKind, u8)> = None;
    let mut counter = 0usize;
    for app in apps.iter_mut() {
        let key = (app.join_point.operation_id.clone(), app.join_point.kind, app.kind.rank());
        if group.as_ref() != Some(&key) {
            group = Some(key);
            counter = 0;
        }
        app.order_index = counter;
        counter += 1;
    }
}

/// Resolves every link of `view` into advice applications.
///
/// Each link's endAspect must name an Advice owned by an Aspect; the
/// advice's pointcut is matched against the core model and the link's
/// endCore must be among the matched join points. One application is
/// emitted per matched join point, exact duplicates collapsed.
pub fn collect_applications(
    rs: &ModelRoleSet,
    view: &WeavingView,
) -> Result<Vec<AdviceApplication>> {
    let mms = builtin_metamodels();
    let aspect_parents = parent_map(&rs.aspect, &mms.aspect);

    let mut apps: Vec<AdviceApplication> = Vec::new();
    let mut seen: HashSet<(String, JoinPoint)> = HashSet::new();
    for link in &view.links {
        let advice = resolve_id(&rs.aspect, &mms.aspect, &link.end_aspect).map_err(|e| {
            Error::new(
                Code::EndResolve,
                format!("{}/{}/endAspect", rs.weaving.name(), link.link_id),
                e.diagnostic().message.clone(),
            )
        })?;
        if advice.type_name != "Advice" {
            return Err(no_advice(
                &rs.weaving,
                &link.link_id,
                format!("endAspect `{}` is a {}, expected an Advice", link.end_aspect, advice.type_name),
            ));
        }
        let owner = aspect_parents
            .get(advice.id.as_str())
            .and_then(|ps| ps.first())
            .and_then(|pid| rs.aspect.element(pid))
            .filter(|p| p.type_name == "Aspect")
            .ok_or_else(|| {
                no_advice(
                    &rs.weaving,
                    &link.link_id,
                    format!("advice `{}` has no owning Aspect", link.end_aspect),
                )
            })?;
        let priority = owner.int_slot("priority").unwrap_or(0);

        let kind_text = advice.str_slot("kind").ok_or_else(|| {
            Error::new(
                Code::Kind,
                format!("{}/{}/kind", rs.aspect.name(), advice.id),
                "advice carries no kind".to_owned(),
            )
        })?;
        let kind =
            AdviceKind::parse(kind_text, &format!("{}/{}/kind", rs.aspect.name(), advice.id))?;

        let pointcut = advice
            .slots
            .get("pointcut")
            .and_then(sole_ref_id)
            .and_then(|id| rs.aspect.element(id))
            .filter(|p| p.type_name == "Pointcut")
            .ok_or_else(|| {
                no_advice(
                    &rs.weaving,
                    &link.link_id,
                    format!("advice `{}` carries no pointcut", link.end_aspect),
                )
            })?;
        let type_text = pointcut.str_slot("typePointcut").ok_or_else(|| {
            Error::new(
                Code::PcType,
                format!("{}/{}/typePointcut", rs.aspect.name(), pointcut.id),
                "pointcut carries no typePointcut".to_owned(),
            )
        })?;
        let pattern_text = pointcut.str_slot("pattern").ok_or_else(|| {
            Error::new(
                Code::Pattern,
                format!("{}/{}/pattern", rs.aspect.name(), pointcut.id),
                "pointcut carries no pattern".to_owned(),
            )
        })?;
        let pattern = crate::pointcut::parse_pattern(pattern_text)?;

        let matched = match_pointcut(&rs.core, &mms.core, type_text, &pattern)?;
        if !matched.iter().any(|jp| jp.operation_id == link.end_core) {
            return Err(Error::new(
                Code::EndNotMatched,
                format!("{}/{}/endCore", rs.weaving.name(), link.link_id),
                format!(
                    "`{}` is not among the {} join points matched by pattern `{}`",
                    link.end_core,
                    matched.len(),
                    pattern
                ),
            ));
        }

        for jp in matched {
            if seen.insert((link.end_aspect.clone(), jp.clone())) {
                apps.push(AdviceApplication {
                    join_point: jp,
                    advice_id: link.end_aspect.clone(),
                    aspect_name: owner.name_slot().unwrap_or("").to_owned(),
                    advice_name: advice.name_slot().unwrap_or("").to_owned(),
                    kind,
                    priority,
                    order_index: 0,
                });
            }
        }
    }

    normalize_order(&mut apps);
    Ok(apps)
}

/// Groups around advices by join point; ≥2 at one join point is a conflict.
/// Stacked before/after advices never conflict.
pub fn detect_conflicts(apps: &[AdviceApplication]) -> Vec<Conflict> {
    let mut groups: HashMap<&JoinPoint, Vec<&AdviceApplication>> = HashMap::new();
    for app in apps.iter().filter(|a| a.kind == AdviceKind::Around) {
        groups.entry(&app.join_point).or_default().push(app);
    }
    let mut conflicts: Vec<Conflict> = groups
        .into_iter()
        .filter(|(_, group)| group.len() >= 2)
        .map(|(jp, mut group)| {
            group.sort_by_key(|a| a.order_index);
            let contenders: Vec<(String, i64)> =
                group.iter().map(|a| (a.advice_id.clone(), a.priority)).collect();
            let max = contenders.iter().map(|(_, p)| *p).max().expect("non-empty group");
            let at_max: Vec<&(String, i64)> =
                contenders.iter().filter(|(_, p)| *p == max).collect();
            let resolution = match at_max.as_slice() {
                [winner] => Resolution::Dominant(winner.0.clone()),
                _ => Resolution::Unresolved,
            };
            Conflict { join_point: jp.clone(), contenders, resolution }
        })
        .collect();
    conflicts.sort_by(|a, b| {
        (a.join_point.operation_id.as_str(), a.join_point.kind)
            .cmp(&(b.join_point.operation_id.as_str(), b.join_point.kind))
    });
    conflicts
}

fn contender_list(c: &Conflict) -> String {
    c.contenders
        .iter()
        .map(|(id, p)| format!("`{}` (priority {})", id, p))
        .collect::<Vec<_>>()
        .join(", ")
}

/// The contender with strictly maximal priority. A shared maximum is
/// E_CONFLICT: silently picking a dominant requirement owner would hide a
/// stakeholder disagreement.
pub fn resolve_dominant(c: &Conflict) -> Result<String> {
    let max = c.contenders.iter().map(|(_, p)| *p).max().ok_or_else(|| {
        Error::new(
            Code::Conflict,
            c.join_point.operation_id.clone(),
            "conflict has no contenders".to_owned(),
        )
    })?;
    let at_max: Vec<&(String, i64)> = c.contenders.iter().filter(|(_, p)| *p == max).collect();
    match at_max.as_slice() {
        [winner] => Ok(winner.0.clone()),
        _ => Err(Error::new(
            Code::Conflict,
            c.join_point.operation_id.clone(),
            format!(
                "priority tie at {} between around advices: {}",
                max,
                contender_list(c)
            ),
        )),
    }
}

fn operation_signature(e: &Element) -> (Option<&str>, Option<&str>) {
    (e.str_slot("params"), e.str_slot("returnType"))
}

/// Injects `template` as an Operation of `class_json_id` in `woven`.
/// Returns the injected element id, or None when an identical operation is
/// already present (silent dedup). A same-named operation with a different
/// definition is E_NAMECLASH.
fn inject_operation(
    woven: &mut ModelInstance,
    class_json_id: &str,
    template: &Element,
) -> Result<Option<String>> {
    let op_name = template.name_slot().map(str::to_owned).ok_or_else(|| {
        Error::new(
            Code::NoName,
            format!("{}/{}", woven.name(), template.id),
            "added operation has no name".to_owned(),
        )
    })?;

    let class = woven.element(class_json_id).expect("join point class exists in woven copy");
    let class_name = class.name_slot().unwrap_or(class_json_id).to_owned();
    let existing_ids: Vec<String> = class
        .slots
        .get("operations")
        .map(|v| v.ref_ids().into_iter().map(str::to_owned).collect())
        .unwrap_or_default();
    for id in &existing_ids {
        let Some(op) = woven.element(id) else { continue };
        if op.name_slot() == Some(op_name.as_str()) {
            if operation_signature(op) == operation_signature(template) {
                return Ok(None);
            }
            return Err(Error::new(
                Code::NameClash,
                format!("{}/{}/operations", woven.name(), class_json_id),
                format!(
                    "class `{}` already has an operation `{}` with a different definition",
                    class_name, op_name
                ),
            ));
        }
    }

    let mut new_id = format!("{}.{}", class_json_id, op_name);
    let mut bump = 1usize;
    while woven.element(&new_id).is_some() {
        bump += 1;
        new_id = format!("{}.{}_{}", class_json_id, op_name, bump);
    }
    let mut injected = Element::new(new_id.clone(), "Operation");
    injected.slots = template.slots.clone();
    woven.push_element(injected)?;

    let class = woven.element_mut(class_json_id).expect("class id still present");
    match class.slots.get_mut("operations") {
        Some(SlotValue::RefList(ids)) => ids.push(new_id.clone()),
        Some(SlotValue::Ref(first)) => {
            let list = vec![first.clone(), new_id.clone()];
            class.slots.insert("operations".to_owned(), SlotValue::RefList(list));
        }
        _ => {
            class.slots.insert("operations".to_owned(), SlotValue::RefList(vec![new_id.clone()]));
        }
    }
    Ok(Some(new_id))
}

fn fresh_binding_id(woven: &ModelInstance, counter: &mut usize) -> String {
    loop {
        let candidate = format!("binding.{}", *counter);
        *counter += 1;
        if woven.element(&candidate).is_none() {
            return candidate;
        }
    }
}

/// Builds the woven model from resolved applications: a copy of the core
/// model (now conforming to WovenMM) plus injected operations and one
/// WeaveBinding element per application.
pub fn apply_weave(rs: &ModelRoleSet, apps: &[AdviceApplication]) -> Result<WovenModel> {
    let mms = builtin_metamodels();
    let mut woven = rs.core.clone();
    woven.conforms_to = "WovenMM".to_owned();
    let mut provenance = Vec::new();
    let mut binding_counter = 0usize;

    for app in apps {
        let advice = resolve_id(&rs.aspect, &mms.aspect, &app.advice_id)?;
        let body_advice = advice.str_slot("bodyAdvice").unwrap_or("").to_owned();
        let class_json_id =
            resolve_id(&rs.core, &mms.core, &app.join_point.class_id)?.id.clone();

        if let Some(SlotValue::RefList(template_ids)) = advice.slots.get("addedOperations") {
            for tid in template_ids {
                let template = rs.aspect.element(tid).ok_or_else(|| {
                    Error::new(
                        Code::Ref,
                        format!("{}/{}/addedOperations", rs.aspect.name(), advice.id),
                        format!("reference to missing element `{}`", tid),
                    )
                })?;
                if let Some(injected_id) = inject_operation(&mut woven, &class_json_id, template)? {
                    provenance.push(ProvenanceRecord {
                        injected_id,
                        source_id: crate::model::element_id(&rs.aspect, &mms.aspect, template)?,
                        body_advice: body_advice.clone(),
                    });
                }
            }
        }

        let mut binding =
            Element::new(fresh_binding_id(&woven, &mut binding_counter), "WeaveBinding");
        binding
            .set("joinPointRef", SlotValue::Str(app.join_point.operation_id.clone()))
            .set("adviceName", SlotValue::Str(app.advice_name.clone()))
            .set("kind", SlotValue::Str(app.kind.as_str().to_owned()))
            .set("orderIndex", SlotValue::Int(app.order_index as i64));
        woven.push_element(binding)?;
    }

    Ok(WovenModel { model: woven, provenance })
}

fn unresolved_conflict_error(c: &Conflict) -> Error {
    Error::new(
        Code::Conflict,
        c.join_point.operation_id.clone(),
        format!(
            "{} around advices contend at this join point: {}",
            c.contenders.len(),
            contender_list(c)
        ),
    )
}

/// Full weaving pipeline over a role set.
///
/// Mode [`ResolveMode::Fail`] treats any conflict as an error; mode
/// [`ResolveMode::Priority`] keeps the strictly dominant around advice per
/// conflict and drops the rest, erroring only on priority ties. Output is
/// byte-deterministic under [`crate::model::canonical_serialize`].
pub fn weave(rs: &ModelRoleSet, mode: ResolveMode) -> Result<WovenModel> {
    let view = crate::awm::open_weaving(rs)?;
    let mut apps = collect_applications(rs, &view)?;
    let conflicts = detect_conflicts(&apps);
    match mode {
        ResolveMode::Fail => {
            if let Some(c) = conflicts.first() {
                return Err(unresolved_conflict_error(c));
            }
        }
        ResolveMode::Priority => {
            if !conflicts.is_empty() {
                let mut dropped: HashSet<(String, JoinPoint)> = HashSet::new();
                for c in &conflicts {
                    let dominant = resolve_dominant(c)?;
                    for (advice_id, _) in &c.contenders {
                        if *advice_id != dominant {
                            dropped.insert((advice_id.clone(), c.join_point.clone()));
                        }
                    }
                }
                apps.retain(|a| {
                    a.kind != AdviceKind::Around
                        || !dropped.contains(&(a.advice_id.clone(), a.join_point.clone()))
                });
                normalize_order(&mut apps);
            }
        }
    }
    apply_weave(rs, &apps)
}
