//! Generic model instances, conformance checking and element identification.
//!
//! Models are stored in the Model-JSON format:
//!
//! ```text
//! {
//!   "model": "<name>",
//!   "conformsTo": "<metamodel name>",
//!   "elements": [
//!     { "id": "<element id>",
//!       "type": "<MetaClass name>",
//!       "slots": { "<feature>": <string|int|bool> | {"ref":"<id>"} | [{"ref":"<id>"}, ...] } }
//!   ]
//! }
//! ```
//!
//! Unknown keys are rejected rather than ignored so that fixture typos
//! surface early. Containment is expressed by container-reference slots
//! listing child ids; the containment relation must form a forest.
//!
//! Elements are addressed two ways: by their file-local `id`, and by the
//! name-path identifier `<model>/<names from containment root>` that
//! [`element_id`] computes and [`resolve_id`] inverts. Name paths keep
//! weaving models human-writable; models with duplicate sibling names are
//! therefore not addressable (E_AMBIGUOUS).

use std::collections::{BTreeMap, HashMap, HashSet};

use serde_json::Value;

use crate::diag::{Code, Diagnostic, Error, Result};
use crate::km3::{Feature, Metamodel};

/// Value held by one slot of an element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SlotValue {
    Str(String),
    Int(i64),
    Bool(bool),
    Ref(String),
    RefList(Vec<String>),
}

impl SlotValue {
    fn kind_name(&self) -> &'static str {
        match self {
            SlotValue::Str(_) => "string",
            SlotValue::Int(_) => "integer",
            SlotValue::Bool(_) => "boolean",
            SlotValue::Ref(_) => "reference",
            SlotValue::RefList(_) => "reference list",
        }
    }

    /// The referenced ids, in order; empty for primitive values.
    pub fn ref_ids(&self) -> Vec<&str> {
        match self {
            SlotValue::Ref(id) => vec![id.as_str()],
            SlotValue::RefList(ids) => ids.iter().map(String::as_str).collect(),
            _ => Vec::new(),
        }
    }
}

/// One model element: a typed record of slots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    pub id: String,
    pub type_name: String,
    pub slots: BTreeMap<String, SlotValue>,
}

impl Element {
    pub fn new(id: impl Into<String>, type_name: impl Into<String>) -> Self {
        Element { id: id.into(), type_name: type_name.into(), slots: BTreeMap::new() }
    }

    pub fn set(&mut self, feature: impl Into<String>, value: SlotValue) -> &mut Self {
        self.slots.insert(feature.into(), value);
        self
    }

    pub fn str_slot(&self, feature: &str) -> Option<&str> {
        match self.slots.get(feature) {
            Some(SlotValue::Str(s)) => Some(s),
            _ => None,
        }
    }

    pub fn int_slot(&self, feature: &str) -> Option<i64> {
        match self.slots.get(feature) {
            Some(SlotValue::Int(i)) => Some(*i),
            _ => None,
        }
    }

    /// The `name` slot when present and non-empty.
    pub fn name_slot(&self) -> Option<&str> {
        self.str_slot("name").filter(|s| !s.is_empty())
    }
}

/// An immutable, parsed model. Element ids are unique.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelInstance {
    pub(crate) name: String,
    pub(crate) conforms_to: String,
    pub(crate) elements: Vec<Element>,
    pub(crate) index: HashMap<String, usize>,
}

impl ModelInstance {
    /// Builds a model, rejecting duplicate element ids (E_DUPID).
    pub fn new(
        name: impl Into<String>,
        conforms_to: impl Into<String>,
        elements: Vec<Element>,
    ) -> Result<Self> {
        let name = name.into();
        let mut index = HashMap::with_capacity(elements.len());
        for (i, e) in elements.iter().enumerate() {
            if index.insert(e.id.clone(), i).is_some() {
                return Err(Error::new(
                    Code::DupId,
                    format!("{}/{}", name, e.id),
                    format!("duplicate element id `{}`", e.id),
                ));
            }
        }
        Ok(ModelInstance { name, conforms_to: conforms_to.into(), elements, index })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn conforms_to(&self) -> &str {
        &self.conforms_to
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    /// Finds an element by its file-local id.
    pub fn element(&self, id: &str) -> Option<&Element> {
        self.index.get(id).map(|&i| &self.elements[i])
    }

    pub(crate) fn element_mut(&mut self, id: &str) -> Option<&mut Element> {
        let i = *self.index.get(id)?;
        Some(&mut self.elements[i])
    }

    /// Appends an element, keeping the id index consistent.
    pub(crate) fn push_element(&mut self, e: Element) -> Result<()> {
        if self.index.contains_key(&e.id) {
            return Err(Error::new(
                Code::DupId,
                format!("{}/{}", self.name, e.id),
                format!("duplicate element id `{}`", e.id),
            ));
        }
        self.index.insert(e.id.clone(), self.elements.len());
        self.elements.push(e);
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Parsing

fn schema_err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::new(Code::Schema, path, message)
}

fn take_string(obj: &mut serde_json::Map<String, Value>, key: &str, path: &str) -> Result<String> {
    match obj.remove(key) {
        Some(Value::String(s)) => Ok(s),
        Some(_) => Err(schema_err(
            if path.is_empty() { key.to_owned() } else { format!("{}.{}", path, key) },
            format!("key `{}` must be a string", key),
        )),
        None => Err(schema_err(
            if path.is_empty() { key.to_owned() } else { format!("{}.{}", path, key) },
            format!("missing required key `{}`", key),
        )),
    }
}

fn ref_from_json(v: &Value, path: &str) -> Result<String> {
    let obj = v
        .as_object()
        .ok_or_else(|| schema_err(path, "reference list items must be {\"ref\": \"<id>\"} objects"))?;
    if obj.len() != 1 {
        return Err(schema_err(path, "reference objects carry exactly the key `ref`"));
    }
    match obj.get("ref") {
        Some(Value::String(id)) => Ok(id.clone()),
        Some(_) => Err(schema_err(path, "`ref` must be a string element id")),
        None => Err(schema_err(path, "reference objects carry exactly the key `ref`")),
    }
}

fn slot_from_json(v: &Value, path: &str) -> Result<SlotValue> {
    match v {
        Value::String(s) => Ok(SlotValue::Str(s.clone())),
        Value::Bool(b) => Ok(SlotValue::Bool(*b)),
        Value::Number(n) => n
            .as_i64()
            .map(SlotValue::Int)
            .ok_or_else(|| schema_err(path, "slot numbers must be integers")),
        Value::Object(_) => Ok(SlotValue::Ref(ref_from_json(v, path)?)),
        Value::Array(items) => {
            let mut ids = Vec::with_capacity(items.len());
            for (i, item) in items.iter().enumerate() {
                ids.push(ref_from_json(item, &format!("{}[{}]", path, i))?);
            }
            Ok(SlotValue::RefList(ids))
        }
        Value::Null => Err(schema_err(path, "slot values may not be null")),
    }
}

/// Parses Model-JSON text. Elements keep file order; no conformance
/// checking happens here.
pub fn parse_model(source: &str) -> Result<ModelInstance> {
    let value: Value = serde_json::from_str(source).map_err(|e| {
        Error::new(Code::Json, format!("{}:{}", e.line(), e.column()), e.to_string())
    })?;
    let mut root = match value {
        Value::Object(o) => o,
        _ => return Err(schema_err("", "top-level value must be an object")),
    };

    let name = take_string(&mut root, "model", "")?;
    let conforms_to = take_string(&mut root, "conformsTo", "")?;
    let elements_json = match root.remove("elements") {
        Some(Value::Array(items)) => items,
        Some(_) => return Err(schema_err("elements", "key `elements` must be an array")),
        None => return Err(schema_err("elements", "missing required key `elements`")),
    };
    if let Some(extra) = root.keys().next() {
        return Err(schema_err(extra.clone(), format!("unknown key `{}`", extra)));
    }

    let mut elements = Vec::with_capacity(elements_json.len());
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (i, item) in elements_json.into_iter().enumerate() {
        let epath = format!("elements[{}]", i);
        let mut obj = match item {
            Value::Object(o) => o,
            _ => return Err(schema_err(epath, "elements must be objects")),
        };
        let id = take_string(&mut obj, "id", &epath)?;
        let type_name = take_string(&mut obj, "type", &epath)?;
        let slots_json = match obj.remove("slots") {
            Some(Value::Object(o)) => o,
            Some(_) => return Err(schema_err(format!("{}.slots", epath), "`slots` must be an object")),
            None => return Err(schema_err(format!("{}.slots", epath), "missing required key `slots`")),
        };
        if let Some(extra) = obj.keys().next() {
            return Err(schema_err(
                format!("{}.{}", epath, extra),
                format!("unknown key `{}`", extra),
            ));
        }
        if let Some(first) = seen.insert(id.clone(), i) {
            return Err(Error::new(
                Code::DupId,
                format!("{}.id", epath),
                format!("duplicate element id `{}` (first at elements[{}])", id, first),
            ));
        }
        let mut slots = BTreeMap::new();
        for (feat, v) in &slots_json {
            let spath = format!("{}.slots.{}", epath, feat);
            slots.insert(feat.clone(), slot_from_json(v, &spath)?);
        }
        elements.push(Element { id, type_name, slots });
    }

    ModelInstance::new(name, conforms_to, elements)
}

// ---------------------------------------------------------------------------
// Conformance

/// Checks `m` against `mm`. Empty result iff the model conforms.
///
/// The diagnostics multiset does not depend on element order in the file:
/// every finding is anchored to element ids, containment cycles are reported
/// once at their smallest member, and double parents at the child.
pub fn check_conformance(m: &ModelInstance, mm: &Metamodel) -> Vec<Diagnostic> {
    if m.conforms_to != mm.name() {
        return vec![Diagnostic::new(
            Code::Name,
            m.name.clone(),
            format!("model declares conformsTo `{}` but was checked against `{}`", m.conforms_to, mm.name()),
        )];
    }

    let mut diags = Vec::new();
    for e in &m.elements {
        let epath = format!("{}/{}", m.name, e.id);
        if mm.lookup_class(&e.type_name).is_none() {
            diags.push(Diagnostic::new(
                Code::Type,
                epath,
                format!("unknown element type `{}`", e.type_name),
            ));
            continue;
        }
        let features: HashMap<&str, &Feature> = match mm.features_of(&e.type_name) {
            Ok(fs) => fs.into_iter().map(|f| (f.name(), f)).collect(),
            Err(_) => continue,
        };
        for (slot, value) in &e.slots {
            let spath = format!("{}/{}", epath, slot);
            let feature = match features.get(slot.as_str()) {
                Some(f) => f,
                None => {
                    diags.push(Diagnostic::new(
                        Code::Feat,
                        spath,
                        format!("type `{}` has no feature `{}`", e.type_name, slot),
                    ));
                    continue;
                }
            };
            match feature {
                Feature::Attribute { type_name, .. } => {
                    let ok = matches!(
                        (type_name.as_str(), value),
                        ("String", SlotValue::Str(_))
                            | ("Integer", SlotValue::Int(_))
                            | ("Boolean", SlotValue::Bool(_))
                    );
                    if !ok {
                        diags.push(Diagnostic::new(
                            Code::Val,
                            spath,
                            format!(
                                "attribute `{}` expects {} but holds {}",
                                slot,
                                type_name,
                                value.kind_name()
                            ),
                        ));
                    }
                }
                Feature::Reference { type_name: declared, .. } => {
                    if matches!(value, SlotValue::Str(_) | SlotValue::Int(_) | SlotValue::Bool(_)) {
                        diags.push(Diagnostic::new(
                            Code::Val,
                            spath,
                            format!(
                                "reference `{}` expects element references but holds {}",
                                slot,
                                value.kind_name()
                            ),
                        ));
                        continue;
                    }
                    for id in value.ref_ids() {
                        match m.element(id) {
                            None => diags.push(Diagnostic::new(
                                Code::Ref,
                                spath.clone(),
                                format!("reference to missing element `{}`", id),
                            )),
                            Some(target) => {
                                // skip targets with unknown types; they already
                                // carry their own E_TYPE
                                if mm.lookup_class(&target.type_name).is_some()
                                    && !mm.is_subclass_of(&target.type_name, declared)
                                {
                                    diags.push(Diagnostic::new(
                                        Code::Val,
                                        spath.clone(),
                                        format!(
                                            "reference `{}` expects `{}` but `{}` is a `{}`",
                                            slot, declared, id, target.type_name
                                        ),
                                    ));
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    diags.extend(containment_diagnostics(m, mm));
    diags
}

/// Child json-id -> parent json-ids, in parent model order. Only declared
/// container features of known types contribute; dangling targets are
/// skipped (they are already E_REF findings).
pub(crate) fn parent_map<'m>(m: &'m ModelInstance, mm: &Metamodel) -> HashMap<&'m str, Vec<&'m str>> {
    let mut parents: HashMap<&str, Vec<&str>> = HashMap::new();
    for e in &m.elements {
        let features = match mm.features_of(&e.type_name) {
            Ok(fs) => fs,
            Err(_) => continue,
        };
        for f in features {
            if !f.is_container() {
                continue;
            }
            if let Some(value) = e.slots.get(f.name()) {
                for child in value.ref_ids() {
                    if m.element(child).is_some() {
                        parents.entry(child).or_default().push(&e.id);
                    }
                }
            }
        }
    }
    parents
}

fn containment_diagnostics(m: &ModelInstance, mm: &Metamodel) -> Vec<Diagnostic> {
    let parents = parent_map(m, mm);
    let mut diags = Vec::new();

    let mut children: Vec<&str> = parents
        .iter()
        .filter(|(_, ps)| ps.len() > 1)
        .map(|(c, _)| *c)
        .collect();
    children.sort_unstable();
    for child in children {
        let mut ps: Vec<&str> = parents[child].clone();
        ps.sort_unstable();
        diags.push(Diagnostic::new(
            Code::Contain,
            format!("{}/{}", m.name, child),
            format!("element has {} container parents: {}", ps.len(), ps.join(", ")),
        ));
    }

    // Cycle detection: strongly connected components of the child -> parent
    // relation; every containment cycle is one SCC of size > 1 (self-loops
    // are size-1 SCCs with an edge to themselves).
    let n = m.elements.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut has_self_loop = vec![false; n];
    for (child, ps) in &parents {
        let c = m.index[*child];
        for p in ps {
            let p = m.index[*p];
            if p == c {
                has_self_loop[c] = true;
            }
            adj[c].push(p);
        }
    }
    let mut cycles: Vec<Vec<usize>> = sccs(&adj)
        .into_iter()
        .filter(|scc| scc.len() > 1 || has_self_loop[scc[0]])
        .collect();
    for cycle in &mut cycles {
        cycle.sort_unstable_by_key(|&i| m.elements[i].id.as_str());
    }
    cycles.sort_unstable_by_key(|c| m.elements[c[0]].id.as_str());
    for cycle in cycles {
        let ids: Vec<&str> = cycle.iter().map(|&i| m.elements[i].id.as_str()).collect();
        diags.push(Diagnostic::new(
            Code::Contain,
            format!("{}/{}", m.name, ids[0]),
            format!("containment cycle through: {}", ids.join(", ")),
        ));
    }
    diags
}

/// Tarjan's strongly-connected-components, iterative to keep stack use flat.
fn sccs(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut result = Vec::new();

    for start in 0..n {
        if index[start] != usize::MAX {
            continue;
        }
        // frames of (node, next child position)
        let mut frames: Vec<(usize, usize)> = vec![(start, 0)];
        while let Some(&mut (v, ref mut ci)) = frames.last_mut() {
            if *ci == 0 {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if let Some(&w) = adj[v].get(*ci) {
                *ci += 1;
                if index[w] == usize::MAX {
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                frames.pop();
                if let Some(&mut (parent, _)) = frames.last_mut() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut scc = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        scc.push(w);
                        if w == v {
                            break;
                        }
                    }
                    result.push(scc);
                }
            }
        }
    }
    result
}

// ---------------------------------------------------------------------------
// Identification

/// Name-path identifier of one element, after walking to its containment
/// root. `e` must belong to `m`.
pub fn element_id(m: &ModelInstance, mm: &Metamodel, e: &Element) -> Result<String> {
    let parents = parent_map(m, mm);
    let ident = path_id(m, &parents, e)?;
    for other in &m.elements {
        if other.id != e.id {
            if let Ok(other_ident) = path_id(m, &parents, other) {
                if other_ident == ident {
                    let mut pair = [e.id.as_str(), other.id.as_str()];
                    pair.sort_unstable();
                    return Err(Error::new(
                        Code::Ambiguous,
                        ident.clone(),
                        format!("elements `{}` and `{}` share identifier `{}`", pair[0], pair[1], ident),
                    ));
                }
            }
        }
    }
    Ok(ident)
}

fn path_id(m: &ModelInstance, parents: &HashMap<&str, Vec<&str>>, e: &Element) -> Result<String> {
    let mut names: Vec<&str> = Vec::new();
    let mut seen: HashSet<&str> = HashSet::new();
    let mut cursor = e;
    loop {
        if !seen.insert(&cursor.id) {
            return Err(Error::new(
                Code::Contain,
                format!("{}/{}", m.name, cursor.id),
                format!("containment cycle while identifying `{}`", e.id),
            ));
        }
        match cursor.name_slot() {
            Some(name) => names.push(name),
            None => {
                return Err(Error::new(
                    Code::NoName,
                    format!("{}/{}", m.name, cursor.id),
                    format!("element `{}` has no usable name slot", cursor.id),
                ));
            }
        }
        match parents.get(cursor.id.as_str()).and_then(|ps| ps.first()) {
            Some(pid) => cursor = m.element(pid).expect("parent map ids resolve"),
            None => break,
        }
    }
    names.push(m.name.as_str());
    names.reverse();
    Ok(names.join("/"))
}

/// Path identifiers for every element that can produce one, keyed by
/// file-local id. Elements without usable names are skipped; a collision
/// between two computed identifiers is E_AMBIGUOUS (identifiers must be
/// injective over the whole model).
pub(crate) fn all_path_ids<'m>(
    m: &'m ModelInstance,
    mm: &Metamodel,
) -> Result<HashMap<&'m str, String>> {
    let parents = parent_map(m, mm);
    let mut ids: HashMap<&str, String> = HashMap::new();
    let mut owners: HashMap<String, &str> = HashMap::new();
    for e in &m.elements {
        match path_id(m, &parents, e) {
            Ok(ident) => {
                if let Some(prev) = owners.insert(ident.clone(), &e.id) {
                    let mut pair = [prev, e.id.as_str()];
                    pair.sort_unstable();
                    return Err(Error::new(
                        Code::Ambiguous,
                        ident.clone(),
                        format!("elements `{}` and `{}` share identifier `{}`", pair[0], pair[1], ident),
                    ));
                }
                ids.insert(&e.id, ident);
            }
            Err(err) if matches!(err.code(), Code::NoName | Code::Contain) => continue,
            Err(err) => return Err(err),
        }
    }
    Ok(ids)
}

/// Finds the unique element whose [`element_id`] equals `ident`.
///
/// Elements that cannot build an identifier (missing names) are skipped;
/// E_AMBIGUOUS is raised only when several elements claim `ident` itself.
pub fn resolve_id<'m>(m: &'m ModelInstance, mm: &Metamodel, ident: &str) -> Result<&'m Element> {
    let parents = parent_map(m, mm);
    let mut matches = Vec::new();
    for e in &m.elements {
        if let Ok(candidate) = path_id(m, &parents, e) {
            if candidate == ident {
                matches.push(e);
            }
        }
    }
    match matches.len() {
        0 => Err(Error::new(
            Code::NoResolve,
            ident,
            format!("no element of model `{}` has this identifier", m.name),
        )),
        1 => Ok(matches[0]),
        _ => {
            let mut ids: Vec<&str> = matches.iter().map(|e| e.id.as_str()).collect();
            ids.sort_unstable();
            Err(Error::new(
                Code::Ambiguous,
                ident,
                format!("identifier names several elements: {}", ids.join(", ")),
            ))
        }
    }
}

// ---------------------------------------------------------------------------
// Canonical serialization

fn slot_to_json(v: &SlotValue) -> Value {
    fn ref_obj(id: &str) -> Value {
        let mut o = serde_json::Map::new();
        o.insert("ref".to_owned(), Value::String(id.to_owned()));
        Value::Object(o)
    }
    match v {
        SlotValue::Str(s) => Value::String(s.clone()),
        SlotValue::Int(i) => Value::Number((*i).into()),
        SlotValue::Bool(b) => Value::Bool(*b),
        SlotValue::Ref(id) => ref_obj(id),
        SlotValue::RefList(ids) => Value::Array(ids.iter().map(|i| ref_obj(i)).collect()),
    }
}

/// Renders `m` in canonical form: elements sorted by id, object keys sorted
/// lexicographically, 2-space indentation, LF line endings, trailing newline.
/// Parsing the output yields a model structurally equal to `m`.
pub fn canonical_serialize(m: &ModelInstance) -> String {
    let mut order: Vec<usize> = (0..m.elements.len()).collect();
    order.sort_unstable_by_key(|&i| m.elements[i].id.as_str());

    let elements: Vec<Value> = order
        .into_iter()
        .map(|i| {
            let e = &m.elements[i];
            // serde_json maps are BTreeMaps, so keys serialize sorted
            let mut obj = serde_json::Map::new();
            obj.insert("id".to_owned(), Value::String(e.id.clone()));
            obj.insert("type".to_owned(), Value::String(e.type_name.clone()));
            let slots: serde_json::Map<String, Value> =
                e.slots.iter().map(|(k, v)| (k.clone(), slot_to_json(v))).collect();
            obj.insert("slots".to_owned(), Value::Object(slots));
            Value::Object(obj)
        })
        .collect();

    let mut root = serde_json::Map::new();
    root.insert("model".to_owned(), Value::String(m.name.clone()));
    root.insert("conformsTo".to_owned(), Value::String(m.conforms_to.clone()));
    root.insert("elements".to_owned(), Value::Array(elements));

    let mut text = serde_json::to_string_pretty(&Value::Object(root))
        .expect("model values serialize infallibly");
    text.push('\n');
    text
}
