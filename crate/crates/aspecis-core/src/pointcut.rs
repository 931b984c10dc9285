//! Join-point enumeration and pointcut matching over core models.
//!
//! A join point is a (Class, Operation) containment pair of the core model,
//! tagged with the pointcut kind that selected it. Patterns have the form
//! `<classSegment>.<operationSegment>` where each segment is identifier
//! characters plus `*`, and `*` matches any (possibly empty) character run.
//! Matching is by element name, not by path, and ignores parameters.
//!
//! The kinds `call` and `execution` select the same pairs; with no runtime
//! behavior in scope they differ only as metadata carried into bindings.

use std::collections::HashSet;
use std::fmt;

use crate::diag::{Code, Error, Result};
use crate::km3::Metamodel;
use crate::model::{all_path_ids, Element, ModelInstance};

/// The two supported pointcut types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PointcutKind {
    Call,
    Execution,
}

impl PointcutKind {
    /// Parses a typePointcut value; anything but "call"/"execution" is
    /// E_PCTYPE.
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "call" => Ok(PointcutKind::Call),
            "execution" => Ok(PointcutKind::Execution),
            other => Err(Error::new(
                Code::PcType,
                other,
                "typePointcut must be `call` or `execution`".to_owned(),
            )),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            PointcutKind::Call => "call",
            PointcutKind::Execution => "execution",
        }
    }
}

impl fmt::Display for PointcutKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A parsed `<class>.<operation>` pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub class_pattern: String,
    pub op_pattern: String,
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.class_pattern, self.op_pattern)
    }
}

fn valid_segment(seg: &str) -> bool {
    !seg.is_empty() && seg.chars().all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '*'))
}

/// Parses pattern text. Exactly one dot, both segments non-empty, segment
/// characters restricted to identifier characters plus `*`.
pub fn parse_pattern(text: &str) -> Result<Pattern> {
    let mut parts = text.split('.');
    let (class_pattern, op_pattern) = match (parts.next(), parts.next(), parts.next()) {
        (Some(c), Some(o), None) => (c, o),
        _ => {
            return Err(Error::new(
                Code::Pattern,
                text,
                "pattern must have the form `<class>.<operation>`".to_owned(),
            ));
        }
    };
    if !valid_segment(class_pattern) || !valid_segment(op_pattern) {
        return Err(Error::new(
            Code::Pattern,
            text,
            "pattern segments must be non-empty identifier text, `*` allowed".to_owned(),
        ));
    }
    Ok(Pattern { class_pattern: class_pattern.to_owned(), op_pattern: op_pattern.to_owned() })
}

/// Glob match with `*` as the only metacharacter, by two-pointer scanning
/// with backtracking to the latest star.
pub fn wildcard_match(pattern: &str, text: &str) -> bool {
    let p: Vec<char> = pattern.chars().collect();
    let t: Vec<char> = text.chars().collect();
    let (mut pi, mut ti) = (0usize, 0usize);
    let mut star: Option<(usize, usize)> = None; // (pattern pos after '*', text pos it consumed to)
    while ti < t.len() {
        if pi < p.len() && p[pi] == '*' {
            pi += 1;
            star = Some((pi, ti));
        } else if pi < p.len() && p[pi] == t[ti] {
            pi += 1;
            ti += 1;
        } else if let Some((star_pi, star_ti)) = star {
            pi = star_pi;
            ti = star_ti + 1;
            star = Some((star_pi, ti));
        } else {
            return false;
        }
    }
    while pi < p.len() && p[pi] == '*' {
        pi += 1;
    }
    pi == p.len()
}

/// One advice attachment site: an operation in its containing class.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JoinPoint {
    pub class_id: String,
    pub operation_id: String,
    pub kind: PointcutKind,
}

fn joinpoint_table<'m>(
    core: &'m ModelInstance,
    mm: &Metamodel,
    kind: PointcutKind,
) -> Result<Vec<(JoinPoint, &'m Element, &'m Element)>> {
    let ids = all_path_ids(core, mm)?;
    let mut seen: HashSet<(&str, &str)> = HashSet::new();
    let mut rows = Vec::new();
    for class in core.elements() {
        if !mm.is_subclass_of(&class.type_name, "Class") {
            continue;
        }
        let Some(class_pid) = ids.get(class.id.as_str()) else { continue };
        let features = match mm.features_of(&class.type_name) {
            Ok(fs) => fs,
            Err(_) => continue,
        };
        for feature in features.into_iter().filter(|f| f.is_container()) {
            let Some(value) = class.slots.get(feature.name()) else { continue };
            for child_id in value.ref_ids() {
                let Some(op) = core.element(child_id) else { continue };
                if !mm.is_subclass_of(&op.type_name, "Operation") {
                    continue;
                }
                let Some(op_pid) = ids.get(op.id.as_str()) else { continue };
                if seen.insert((&class.id, &op.id)) {
                    rows.push((
                        JoinPoint {
                            class_id: class_pid.clone(),
                            operation_id: op_pid.clone(),
                            kind,
                        },
                        class,
                        op,
                    ));
                }
            }
        }
    }
    rows.sort_by(|a, b| a.0.operation_id.cmp(&b.0.operation_id));
    Ok(rows)
}

/// All (Class, Operation) containment pairs of `core`, sorted by operation
/// identifier. Elements that cannot build a name path are skipped.
pub fn enumerate_joinpoints(
    core: &ModelInstance,
    mm: &Metamodel,
    kind: PointcutKind,
) -> Result<Vec<JoinPoint>> {
    Ok(joinpoint_table(core, mm, kind)?.into_iter().map(|(jp, _, _)| jp).collect())
}

/// The join points whose class and operation names match `pattern`, in
/// canonical (operation identifier) order.
pub fn match_pointcut(
    core: &ModelInstance,
    mm: &Metamodel,
    type_pointcut: &str,
    pattern: &Pattern,
) -> Result<Vec<JoinPoint>> {
    let kind = PointcutKind::parse(type_pointcut)?;
    let rows = joinpoint_table(core, mm, kind)?;
    Ok(rows
        .into_iter()
        .filter(|(_, class, op)| {
            wildcard_match(&pattern.class_pattern, class.name_slot().unwrap_or(""))
                && wildcard_match(&pattern.op_pattern, op.name_slot().unwrap_or(""))
        })
        .map(|(jp, _, _)| jp)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::km3::parse_km3;
    use crate::model::parse_model;

    const M1_JSON: &str = include_str!("../../../fixtures/m1_core.json");
    const CORE_KM3: &str = include_str!("../../../metamodels/core.km3");

    fn m1() -> ModelInstance {
        parse_model(M1_JSON).unwrap()
    }

    fn core_mm() -> Metamodel {
        parse_km3(CORE_KM3).unwrap()
    }

    #[test]
    fn pattern_parses_and_round_trips() {
        let p = parse_pattern("Student.NewSubscription").unwrap();
        assert_eq!(p.class_pattern, "Student");
        assert_eq!(p.op_pattern, "NewSubscription");
        assert_eq!(p.to_string(), "Student.NewSubscription");

        let all = parse_pattern("*.*").unwrap();
        assert_eq!(all.to_string(), "*.*");
    }

    #[test]
    fn malformed_patterns_are_epattern() {
        for bad in ["NoDot", "a.b.c", ".op", "class.", "cl ass.op", "a.b!"] {
            let err = parse_pattern(bad).unwrap_err();
            assert_eq!(err.code(), Code::Pattern, "pattern {:?}", bad);
        }
    }

    #[test]
    fn wildcard_match_covers_star_positions() {
        assert!(wildcard_match("abc", "abc"));
        assert!(!wildcard_match("abc", "abd"));
        assert!(!wildcard_match("abc", "abcd"));
        assert!(wildcard_match("*", ""));
        assert!(wildcard_match("*", "anything"));
        assert!(wildcard_match("New*", "NewSubscription"));
        assert!(wildcard_match("New*", "New"));
        assert!(!wildcard_match("New*", "Ne"));
        assert!(wildcard_match("*tion", "NewSubscription"));
        assert!(wildcard_match("N*S*n", "NewSubscription"));
        assert!(!wildcard_match("N*z*n", "NewSubscription"));
        assert!(wildcard_match("a**b", "ab"));
        assert!(!wildcard_match("", "x"));
        assert!(wildcard_match("", ""));
    }

    #[test]
    fn enumerates_fixture_joinpoints_in_id_order() {
        let jps = enumerate_joinpoints(&m1(), &core_mm(), PointcutKind::Call).unwrap();
        let op_count = m1().elements().iter().filter(|e| e.type_name == "Operation").count();
        assert_eq!(jps.len(), op_count);
        assert!(jps.iter().any(|jp| {
            jp.class_id == "M1/Student"
                && jp.operation_id == "M1/Student/NewSubscription"
                && jp.kind == PointcutKind::Call
        }));
        let mut sorted = jps.clone();
        sorted.sort_by(|a, b| a.operation_id.cmp(&b.operation_id));
        assert_eq!(jps, sorted);
    }

    #[test]
    fn classes_without_operations_enumerate_empty() {
        let m = parse_model(
            r#"{"model":"M","conformsTo":"CoreMM","elements":[
                {"id":"c","type":"Class","slots":{"name":"C"}}]}"#,
        )
        .unwrap();
        assert!(enumerate_joinpoints(&m, &core_mm(), PointcutKind::Call).unwrap().is_empty());
    }

    #[test]
    fn exact_pattern_matches_single_fixture_joinpoint() {
        let p = parse_pattern("Student.NewSubscription").unwrap();
        let jps = match_pointcut(&m1(), &core_mm(), "call", &p).unwrap();
        assert_eq!(jps.len(), 1);
        assert_eq!(jps[0].operation_id, "M1/Student/NewSubscription");
    }

    #[test]
    fn match_all_pattern_equals_enumeration() {
        let p = parse_pattern("*.*").unwrap();
        let matched = match_pointcut(&m1(), &core_mm(), "call", &p).unwrap();
        let all = enumerate_joinpoints(&m1(), &core_mm(), PointcutKind::Call).unwrap();
        assert_eq!(matched, all);
    }

    // brute-force oracle: filter the full enumeration by checking names
    // character-by-character against the segments
    #[test]
    fn prefix_pattern_matches_exactly_the_new_operations() {
        let p = parse_pattern("Student.New*").unwrap();
        let matched = match_pointcut(&m1(), &core_mm(), "call", &p).unwrap();
        let ops: Vec<&str> = matched.iter().map(|jp| jp.operation_id.as_str()).collect();
        assert_eq!(ops, vec!["M1/Student/NewSpeciality", "M1/Student/NewSubscription"]);
    }

    #[test]
    fn unknown_type_pointcut_is_epctype() {
        let p = parse_pattern("*.*").unwrap();
        let err = match_pointcut(&m1(), &core_mm(), "around", &p).unwrap_err();
        assert_eq!(err.code(), Code::PcType);
    }

    #[test]
    fn call_and_execution_differ_only_in_kind() {
        let p = parse_pattern("*.*").unwrap();
        let call = match_pointcut(&m1(), &core_mm(), "call", &p).unwrap();
        let exec = match_pointcut(&m1(), &core_mm(), "execution", &p).unwrap();
        assert_eq!(call.len(), exec.len());
        for (c, e) in call.iter().zip(&exec) {
            assert_eq!(c.class_id, e.class_id);
            assert_eq!(c.operation_id, e.operation_id);
            assert_eq!(c.kind, PointcutKind::Call);
            assert_eq!(e.kind, PointcutKind::Execution);
        }
    }

    #[test]
    fn repeated_matching_is_deterministic() {
        let p = parse_pattern("*.New*").unwrap();
        let first = match_pointcut(&m1(), &core_mm(), "call", &p).unwrap();
        let second = match_pointcut(&m1(), &core_mm(), "call", &p).unwrap();
        assert_eq!(first, second);
    }
}
