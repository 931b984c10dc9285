//! Built-in metamodels and the typed view over weaving models.
//!
//! Four metamodels ship embedded in the library: `CoreMM` (a UML class
//! diagram subset for existing-requirements models), `AspectMM` (aspects,
//! advices, pointcuts), `AWM` (the weaving metamodel: WElement, WModel,
//! WLink, WLinkEnd, WElementRef, WModelRef plus the Weaving-Core_Aspect and
//! Pointcut-Core_Aspect extensions) and `WovenMM` (CoreMM plus WeaveBinding).
//!
//! [`open_weaving`] turns a conformant weaving model into a [`WeavingView`]:
//! the single Weaving-Core_Aspect root, the two model references, and one
//! [`PointcutLink`] per Pointcut-Core_Aspect element with both end
//! identifiers resolved against their target models. Views are complete or
//! absent; there is no partially resolved view.

use crate::diag::{Code, Error, Result};
use crate::km3::{parse_km3, Metamodel};
use crate::model::{check_conformance, resolve_id, Element, ModelInstance, SlotValue};

const CORE_KM3: &str = include_str!("../../../metamodels/core.km3");
const ASPECT_KM3: &str = include_str!("../../../metamodels/aspect.km3");
const AWM_KM3: &str = include_str!("../../../metamodels/awm.km3");
const WOVEN_KM3: &str = include_str!("../../../metamodels/woven.km3");

/// The embedded metamodels, parsed and validated.
#[derive(Debug, Clone)]
pub struct BuiltinMetamodels {
    pub core: Metamodel,
    pub aspect: Metamodel,
    pub awm: Metamodel,
    pub woven: Metamodel,
}

/// Parses the embedded `.km3` resources. A parse failure here is a build
/// defect, not a runtime condition.
pub fn builtin_metamodels() -> BuiltinMetamodels {
    BuiltinMetamodels {
        core: parse_km3(CORE_KM3).expect("embedded core.km3 is valid"),
        aspect: parse_km3(ASPECT_KM3).expect("embedded aspect.km3 is valid"),
        awm: parse_km3(AWM_KM3).expect("embedded awm.km3 is valid"),
        woven: parse_km3(WOVEN_KM3).expect("embedded woven.km3 is valid"),
    }
}

/// The three models taking part in one weaving.
#[derive(Debug, Clone)]
pub struct ModelRoleSet {
    /// Existing-requirements model; conforms to CoreMM.
    pub core: ModelInstance,
    /// Aspectual-requirements model; conforms to AspectMM.
    pub aspect: ModelInstance,
    /// Weaving model; conforms to AWM.
    pub weaving: ModelInstance,
}

/// A WModelRef: model name plus optional file-path hint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelRef {
    pub model_name: String,
    pub path: Option<String>,
}

/// One Pointcut-Core_Aspect link with both ends resolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointcutLink {
    /// WElement name of the link ("" when unnamed).
    pub name: String,
    /// File-local id of the link element, for diagnostics.
    pub link_id: String,
    /// Name-path identifier into the core model.
    pub end_core: String,
    /// Name-path identifier into the aspect model.
    pub end_aspect: String,
}

/// Validated view over a weaving model.
#[derive(Debug, Clone)]
pub struct WeavingView {
    pub root_id: String,
    pub core_ref: ModelRef,
    pub aspect_ref: ModelRef,
    /// Links in weaving-model element order.
    pub links: Vec<PointcutLink>,
}

fn single_ref<'m>(
    m: &'m ModelInstance,
    owner: &Element,
    slot: &str,
    code: Code,
) -> Result<&'m Element> {
    let path = format!("{}/{}/{}", m.name(), owner.id, slot);
    let value = owner
        .slots
        .get(slot)
        .ok_or_else(|| Error::new(code, path.clone(), format!("missing `{}` reference", slot)))?;
    let ids = value.ref_ids();
    if ids.len() != 1 {
        return Err(Error::new(
            code,
            path,
            format!("`{}` must carry exactly one reference, found {}", slot, ids.len()),
        ));
    }
    m.element(ids[0])
        .ok_or_else(|| Error::new(code, path, format!("reference to missing element `{}`", ids[0])))
}

fn model_ref(m: &ModelInstance, root: &Element, slot: &str) -> Result<ModelRef> {
    let target = single_ref(m, root, slot, Code::ModelRef)?;
    let model_name = target.str_slot("modelName").unwrap_or("").to_owned();
    if model_name.is_empty() {
        return Err(Error::new(
            Code::ModelRef,
            format!("{}/{}", m.name(), target.id),
            "WModelRef has no modelName".to_owned(),
        ));
    }
    let path = target.str_slot("path").filter(|p| !p.is_empty()).map(str::to_owned);
    Ok(ModelRef { model_name, path })
}

fn end_identifier(weaving: &ModelInstance, link: &Element, slot: &str) -> Result<String> {
    let end = single_ref(weaving, link, slot, Code::EndResolve)?;
    match end.str_slot("ref") {
        Some(ident) if !ident.is_empty() => Ok(ident.to_owned()),
        _ => Err(Error::new(
            Code::EndResolve,
            format!("{}/{}/ref", weaving.name(), end.id),
            "link end carries no target identifier".to_owned(),
        )),
    }
}

fn resolve_end<'m>(
    target: &'m ModelInstance,
    target_mm: &Metamodel,
    weaving_name: &str,
    link_id: &str,
    slot: &str,
    ident: &str,
) -> Result<&'m Element> {
    resolve_id(target, target_mm, ident).map_err(|e| {
        Error::new(
            Code::EndResolve,
            format!("{}/{}/{}", weaving_name, link_id, slot),
            format!("`{}` does not resolve in model `{}`: {}", ident, target.name(), e.diagnostic().message),
        )
    })
}

/// Opens a weaving model as a validated [`WeavingView`].
///
/// All three models are conformance-checked against the built-in metamodels
/// first; the weaving must contain exactly one Weaving-Core_Aspect root
/// whose Core/Aspect references name `rs.core`/`rs.aspect`, and every link
/// end must resolve in its target model.
pub fn open_weaving(rs: &ModelRoleSet) -> Result<WeavingView> {
    let mms = builtin_metamodels();
    for (m, mm) in [(&rs.core, &mms.core), (&rs.aspect, &mms.aspect), (&rs.weaving, &mms.awm)] {
        if let Some(d) = check_conformance(m, mm).into_iter().next() {
            return Err(d.into());
        }
    }

    let roots: Vec<&Element> = rs
        .weaving
        .elements()
        .iter()
        .filter(|e| e.type_name == "Weaving-Core_Aspect")
        .collect();
    let root = match roots.as_slice() {
        [one] => *one,
        _ => {
            return Err(Error::new(
                Code::Root,
                rs.weaving.name(),
                format!("expected exactly one Weaving-Core_Aspect element, found {}", roots.len()),
            ));
        }
    };

    let core_ref = model_ref(&rs.weaving, root, "Core")?;
    let aspect_ref = model_ref(&rs.weaving, root, "Aspect")?;
    if core_ref.model_name != rs.core.name() {
        return Err(Error::new(
            Code::ModelRef,
            format!("{}/{}/Core", rs.weaving.name(), root.id),
            format!("Core reference names `{}` but the core model is `{}`", core_ref.model_name, rs.core.name()),
        ));
    }
    if aspect_ref.model_name != rs.aspect.name() {
        return Err(Error::new(
            Code::ModelRef,
            format!("{}/{}/Aspect", rs.weaving.name(), root.id),
            format!("Aspect reference names `{}` but the aspect model is `{}`", aspect_ref.model_name, rs.aspect.name()),
        ));
    }
    if core_ref.model_name == aspect_ref.model_name {
        return Err(Error::new(
            Code::ModelRef,
            format!("{}/{}", rs.weaving.name(), root.id),
            "Core and Aspect references must name distinct models".to_owned(),
        ));
    }

    let mut links = Vec::new();
    for e in rs.weaving.elements() {
        if e.type_name != "Pointcut-Core_Aspect" {
            continue;
        }
        let end_core = end_identifier(&rs.weaving, e, "endCore")?;
        let end_aspect = end_identifier(&rs.weaving, e, "endAspect")?;
        resolve_end(&rs.core, &mms.core, rs.weaving.name(), &e.id, "endCore", &end_core)?;
        resolve_end(&rs.aspect, &mms.aspect, rs.weaving.name(), &e.id, "endAspect", &end_aspect)?;
        links.push(PointcutLink {
            name: e.name_slot().unwrap_or("").to_owned(),
            link_id: e.id.clone(),
            end_core,
            end_aspect,
        });
    }

    Ok(WeavingView { root_id: root.id.clone(), core_ref, aspect_ref, links })
}

/// MetaClass names of the two resolved end elements of a link,
/// (core end, aspect end).
pub fn link_kind(lk: &PointcutLink, rs: &ModelRoleSet) -> Result<(String, String)> {
    let mms = builtin_metamodels();
    let core_end =
        resolve_end(&rs.core, &mms.core, rs.weaving.name(), &lk.link_id, "endCore", &lk.end_core)?;
    let aspect_end = resolve_end(
        &rs.aspect,
        &mms.aspect,
        rs.weaving.name(),
        &lk.link_id,
        "endAspect",
        &lk.end_aspect,
    )?;
    Ok((core_end.type_name.clone(), aspect_end.type_name.clone()))
}

/// Convenience: reads a slot as the single id it references.
pub(crate) fn sole_ref_id(value: &SlotValue) -> Option<&str> {
    match value.ref_ids().as_slice() {
        [one] => Some(*one),
        _ => None,
    }
}
