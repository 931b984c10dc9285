//! Independent reference implementations used to cross-check the engine.
//!
//! Every function here deliberately uses a different algorithm than the
//! production code: the glob matcher is a recursive backtracker instead of a
//! two-pointer scan, join-point matching walks the generator's known model
//! structure instead of the metamodel-driven tables, and dominance is a
//! plain max scan.

use aspecis_core::km3::{Feature, Metamodel};
use aspecis_core::model::ModelInstance;

/// Glob matching by exhaustive recursion: `*` tries every possible
/// consumption length.
pub fn glob_oracle(pattern: &str, text: &str) -> bool {
    fn go(p: &[char], t: &[char]) -> bool {
        match p.split_first() {
            None => t.is_empty(),
            Some(('*', rest)) => (0..=t.len()).any(|k| go(rest, &t[k..])),
            Some((c, rest)) => t.split_first().is_some_and(|(tc, tr)| tc == c && go(rest, tr)),
        }
    }
    let p: Vec<char> = pattern.chars().collect();
    let t: Vec<char> = text.chars().collect();
    go(&p, &t)
}

/// Join points of a generated core model matching `pattern`
/// ("classGlob.opGlob"), as (class path, operation path) pairs sorted by
/// operation path. Walks classes at the model root and their `operations`
/// lists directly, so it only works on models shaped like the generators'
/// output (and the shipped fixtures).
pub fn match_oracle(core: &ModelInstance, pattern: &str) -> Vec<(String, String)> {
    let (class_glob, op_glob) = pattern.split_once('.').expect("pattern has two segments");
    let mut rows = Vec::new();
    for class in core.elements().iter().filter(|e| e.type_name == "Class") {
        let Some(class_name) = class.name_slot() else { continue };
        if !glob_oracle(class_glob, class_name) {
            continue;
        }
        let Some(ops) = class.slots.get("operations") else { continue };
        for op_id in ops.ref_ids() {
            let Some(op_name) = core.element(op_id).and_then(|o| o.name_slot()) else { continue };
            if glob_oracle(op_glob, op_name) {
                rows.push((
                    format!("{}/{}", core.name(), class_name),
                    format!("{}/{}/{}", core.name(), class_name, op_name),
                ));
            }
        }
    }
    rows.sort_by(|a, b| a.1.cmp(&b.1));
    rows.dedup();
    rows
}

/// Strict dominance by max scan: Some(winner id) iff exactly one contender
/// carries the maximum priority.
pub fn dominant_oracle(contenders: &[(String, i64)]) -> Option<String> {
    let max = contenders.iter().map(|(_, p)| *p).max()?;
    let mut at_max = contenders.iter().filter(|(_, p)| *p == max);
    let winner = at_max.next()?;
    if at_max.next().is_some() {
        None
    } else {
        Some(winner.0.clone())
    }
}

/// Effective features of a class by naive superclass chain walk (no
/// recursion machinery, just a loop with a visited cap). Returns
/// (feature name, type name) pairs, superclass features first.
pub fn features_chain_oracle(mm: &Metamodel, class_name: &str) -> Vec<(String, String)> {
    let mut chain = Vec::new();
    let mut cursor = Some(class_name);
    let mut hops = 0;
    while let Some(name) = cursor {
        let Some(class) = mm.lookup_class(name) else { break };
        chain.push(class);
        hops += 1;
        if hops > mm.classes().len() {
            break;
        }
        cursor = class.super_name.as_deref();
    }
    chain.reverse();
    chain
        .iter()
        .flat_map(|c| c.features.iter())
        .map(|f: &Feature| (f.name().to_owned(), f.type_name().to_owned()))
        .collect()
}
