//! Parser and structure queries for the KM3-subset metamodel language.
//!
//! Supported grammar:
//!
//! ```text
//! metamodel  := package
//! package    := "package" IDENT "{" class* "}"
//! class      := "class" IDENT ("extends" IDENT)? "{" feature* "}"
//! feature    := "attribute" IDENT ":" IDENT ";"
//!             | "reference" IDENT ("container")? ":" IDENT ";"
//! IDENT      := letter (letter | digit | "_" | "-")*
//! comments   := "--" to end of line
//! ```
//!
//! Identifiers may contain hyphens (class names such as `Weaving-Core_Aspect`
//! do), so `--` opens a comment only at a token boundary. Primitive types are
//! `String`, `Integer` and `Boolean`; attributes must use them, references
//! must target classes. Inheritance is single; `extends A, B` is rejected at
//! parse with E_CYCLE.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::diag::{Code, Diagnostic, Error, Result};

/// Primitive slot types usable by attributes.
pub const PRIMITIVES: [&str; 3] = ["String", "Integer", "Boolean"];

pub fn is_primitive(name: &str) -> bool {
    PRIMITIVES.contains(&name)
}

/// A structural feature of a metaclass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feature {
    Attribute { name: String, type_name: String },
    Reference { name: String, type_name: String, container: bool },
}

impl Feature {
    pub fn name(&self) -> &str {
        match self {
            Feature::Attribute { name, .. } | Feature::Reference { name, .. } => name,
        }
    }

    pub fn type_name(&self) -> &str {
        match self {
            Feature::Attribute { type_name, .. } | Feature::Reference { type_name, .. } => {
                type_name
            }
        }
    }

    pub fn is_reference(&self) -> bool {
        matches!(self, Feature::Reference { .. })
    }

    pub fn is_container(&self) -> bool {
        matches!(self, Feature::Reference { container: true, .. })
    }
}

/// A class declaration: optional single superclass plus owned features.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetaClass {
    pub name: String,
    pub super_name: Option<String>,
    pub features: Vec<Feature>,
}

/// A parsed package of classes. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Metamodel {
    name: String,
    classes: Vec<MetaClass>,
    // first occurrence wins; duplicates surface through validate()
    index: HashMap<String, usize>,
}

impl PartialEq for Metamodel {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.classes == other.classes
    }
}
impl Eq for Metamodel {}

impl Metamodel {
    pub fn new(name: impl Into<String>, classes: Vec<MetaClass>) -> Self {
        let mut index = HashMap::new();
        for (i, c) in classes.iter().enumerate() {
            index.entry(c.name.clone()).or_insert(i);
        }
        Metamodel { name: name.into(), classes, index }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn classes(&self) -> &[MetaClass] {
        &self.classes
    }

    /// Finds a class by name; absence is not an error.
    pub fn lookup_class(&self, name: &str) -> Option<&MetaClass> {
        self.index.get(name).map(|&i| &self.classes[i])
    }

    /// Features of `class_name` and all transitive superclasses,
    /// superclass-first.
    pub fn features_of(&self, class_name: &str) -> Result<Vec<&Feature>> {
        let mut chain = Vec::new();
        let mut seen = HashSet::new();
        let mut cursor = Some(class_name);
        while let Some(name) = cursor {
            let class = match self.lookup_class(name) {
                Some(c) => c,
                None if name == class_name => {
                    return Err(Error::new(
                        Code::NoClass,
                        name,
                        format!("no class `{}` in metamodel `{}`", name, self.name),
                    ));
                }
                // broken extends target; validate() reports it as E_BADTYPE
                None => break,
            };
            if !seen.insert(name.to_owned()) {
                return Err(Error::new(
                    Code::Cycle,
                    class_name,
                    format!("inheritance cycle through `{}`", name),
                ));
            }
            chain.push(class);
            cursor = class.super_name.as_deref();
        }
        Ok(chain.iter().rev().flat_map(|c| c.features.iter()).collect())
    }

    /// Reflexive-transitive subclass test; false on unknown names or cycles.
    pub fn is_subclass_of(&self, sub: &str, sup: &str) -> bool {
        let mut seen = HashSet::new();
        let mut cursor = Some(sub);
        while let Some(name) = cursor {
            if name == sup {
                return true;
            }
            if !seen.insert(name) {
                return false;
            }
            cursor = self.lookup_class(name).and_then(|c| c.super_name.as_deref());
        }
        false
    }
}

/// KM3 source rendering; re-parses to a structurally equal metamodel.
impl fmt::Display for Metamodel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "package {} {{", self.name)?;
        for class in &self.classes {
            match &class.super_name {
                Some(sup) => writeln!(f, "  class {} extends {} {{", class.name, sup)?,
                None => writeln!(f, "  class {} {{", class.name)?,
            }
            for feat in &class.features {
                match feat {
                    Feature::Attribute { name, type_name } => {
                        writeln!(f, "    attribute {} : {};", name, type_name)?
                    }
                    Feature::Reference { name, type_name, container } => {
                        let c = if *container { " container" } else { "" };
                        writeln!(f, "    reference {}{} : {};", name, c, type_name)?
                    }
                }
            }
            writeln!(f, "  }}")?;
        }
        write!(f, "}}")
    }
}

// ---------------------------------------------------------------------------
// Lexing

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LBrace,
    RBrace,
    Colon,
    Semi,
    Comma,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{}`", s),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Comma => f.write_str("`,`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn parse_err(line: usize, col: usize, message: impl Into<String>) -> Error {
    Error::new(Code::Parse, format!("{}:{}", line, col), message)
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic()
}

fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

fn lex(source: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let mut chars = source.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);

    while let Some(&c) = chars.peek() {
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            ' ' | '\t' | '\r' => {
                chars.next();
                col += 1;
            }
            '-' => {
                let (l, co) = (line, col);
                chars.next();
                col += 1;
                if chars.peek() == Some(&'-') {
                    // comment to end of line
                    for c in chars.by_ref() {
                        if c == '\n' {
                            line += 1;
                            col = 1;
                            break;
                        }
                    }
                } else {
                    return Err(parse_err(l, co, "unexpected `-` (identifiers start with a letter; comments start with `--`)"));
                }
            }
            '{' | '}' | ':' | ';' | ',' => {
                let tok = match c {
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    ':' => Tok::Colon,
                    ';' => Tok::Semi,
                    _ => Tok::Comma,
                };
                tokens.push(Token { tok, line, col });
                chars.next();
                col += 1;
            }
            c if is_ident_start(c) => {
                let (l, co) = (line, col);
                let mut ident = String::new();
                while let Some(&c) = chars.peek() {
                    if is_ident_continue(c) {
                        ident.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                tokens.push(Token { tok: Tok::Ident(ident), line: l, col: co });
            }
            other => {
                return Err(parse_err(line, col, format!("unexpected character `{}`", other)));
            }
        }
    }
    Ok(tokens)
}

// ---------------------------------------------------------------------------
// Parsing

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> (usize, usize) {
        match self.peek() {
            Some(t) => (t.line, t.col),
            None => self
                .tokens
                .last()
                .map(|t| (t.line, t.col))
                .unwrap_or((1, 1)),
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<String> {
        let (line, col) = self.here();
        match self.next() {
            Some(Token { tok: Tok::Ident(s), .. }) => Ok(s),
            Some(Token { tok, line, col }) => {
                Err(parse_err(line, col, format!("expected {}, found {}", what, tok)))
            }
            None => Err(parse_err(line, col, format!("expected {}, found end of input", what))),
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<()> {
        let got = self.expect_ident(&format!("`{}`", kw))?;
        if got == kw {
            Ok(())
        } else {
            let (line, col) = match self.tokens.get(self.pos - 1) {
                Some(t) => (t.line, t.col),
                None => (1, 1),
            };
            Err(parse_err(line, col, format!("expected `{}`, found `{}`", kw, got)))
        }
    }

    fn expect_tok(&mut self, want: Tok) -> Result<()> {
        let (line, col) = self.here();
        match self.next() {
            Some(Token { tok, .. }) if tok == want => Ok(()),
            Some(Token { tok, line, col }) => {
                Err(parse_err(line, col, format!("expected {}, found {}", want, tok)))
            }
            None => Err(parse_err(line, col, format!("expected {}, found end of input", want))),
        }
    }

    fn parse_package(&mut self) -> Result<Metamodel> {
        self.expect_keyword("package")?;
        let name = self.expect_ident("package name")?;
        self.expect_tok(Tok::LBrace)?;
        let mut classes = Vec::new();
        loop {
            match self.peek() {
                Some(Token { tok: Tok::RBrace, .. }) => {
                    self.next();
                    break;
                }
                Some(Token { tok: Tok::Ident(kw), .. }) if kw == "class" => {
                    classes.push(self.parse_class()?);
                }
                Some(Token { tok, line, col }) => {
                    return Err(parse_err(
                        *line,
                        *col,
                        format!("expected `class` or `}}`, found {}", tok),
                    ));
                }
                None => {
                    let (line, col) = self.here();
                    return Err(parse_err(line, col, "unclosed package: expected `}`"));
                }
            }
        }
        if let Some(Token { tok, line, col }) = self.peek() {
            return Err(parse_err(*line, *col, format!("trailing {} after package", tok)));
        }
        Ok(Metamodel::new(name, classes))
    }

    fn parse_class(&mut self) -> Result<MetaClass> {
        self.expect_keyword("class")?;
        let name = self.expect_ident("class name")?;
        let mut super_name = None;
        if let Some(Token { tok: Tok::Ident(kw), .. }) = self.peek() {
            if kw == "extends" {
                self.next();
                super_name = Some(self.expect_ident("superclass name")?);
                if let Some(Token { tok: Tok::Comma, line, col }) = self.peek() {
                    return Err(Error::new(
                        Code::Cycle,
                        format!("{}:{}", line, col),
                        format!("class `{}`: multiple inheritance is not supported", name),
                    ));
                }
            }
        }
        self.expect_tok(Tok::LBrace)?;
        let mut features = Vec::new();
        loop {
            match self.peek() {
                Some(Token { tok: Tok::RBrace, .. }) => {
                    self.next();
                    break;
                }
                Some(Token { tok: Tok::Ident(kw), .. }) if kw == "attribute" || kw == "reference" => {
                    features.push(self.parse_feature()?);
                }
                Some(Token { tok, line, col }) => {
                    return Err(parse_err(
                        *line,
                        *col,
                        format!("expected `attribute`, `reference` or `}}`, found {}", tok),
                    ));
                }
                None => {
                    let (line, col) = self.here();
                    return Err(parse_err(line, col, format!("unclosed class `{}`: expected `}}`", name)));
                }
            }
        }
        Ok(MetaClass { name, super_name, features })
    }

    fn parse_feature(&mut self) -> Result<Feature> {
        let kw = self.expect_ident("`attribute` or `reference`")?;
        let name = self.expect_ident("feature name")?;
        let mut container = false;
        if kw == "reference" {
            if let Some(Token { tok: Tok::Ident(c), .. }) = self.peek() {
                if c == "container" {
                    self.next();
                    container = true;
                }
            }
        }
        self.expect_tok(Tok::Colon)?;
        let type_name = self.expect_ident("type name")?;
        self.expect_tok(Tok::Semi)?;
        Ok(match kw.as_str() {
            "attribute" => Feature::Attribute { name, type_name },
            _ => Feature::Reference { name, type_name, container },
        })
    }
}

/// Parses KM3 source into a validated [`Metamodel`].
///
/// Both syntactic and structural problems are rejected: the returned
/// metamodel always passes [`validate_metamodel`] with no diagnostics.
pub fn parse_km3(source: &str) -> Result<Metamodel> {
    let source = source.strip_prefix('\u{feff}').unwrap_or(source);
    let tokens = lex(source)?;
    let mut parser = Parser { tokens, pos: 0 };
    let mm = parser.parse_package()?;
    if let Some(d) = validate_metamodel(&mm).into_iter().next() {
        return Err(d.into());
    }
    Ok(mm)
}

/// Checks every metamodel invariant; empty iff the metamodel is valid.
///
/// One diagnostic per violation: E_DUPCLASS (duplicate or primitive-colliding
/// class names), E_BADTYPE (unresolved extends target, non-primitive
/// attribute type, non-class reference type), E_CYCLE (one per inheritance
/// cycle), E_DUPFEAT (feature redefinition within the inheritance closure).
pub fn validate_metamodel(mm: &Metamodel) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let classes = mm.classes();

    let mut seen_names: HashSet<&str> = HashSet::new();
    for class in classes {
        if is_primitive(&class.name) {
            diags.push(Diagnostic::new(
                Code::DupClass,
                &class.name,
                format!("class name `{}` collides with a primitive type", class.name),
            ));
        } else if !seen_names.insert(&class.name) {
            diags.push(Diagnostic::new(
                Code::DupClass,
                &class.name,
                format!("duplicate class `{}`", class.name),
            ));
        }
    }

    for class in classes {
        if let Some(sup) = &class.super_name {
            if mm.lookup_class(sup).is_none() || is_primitive(sup) {
                diags.push(Diagnostic::new(
                    Code::BadType,
                    &class.name,
                    format!("extends target `{}` is not a class of this metamodel", sup),
                ));
            }
        }
        for feat in &class.features {
            let path = format!("{}/{}", class.name, feat.name());
            match feat {
                Feature::Attribute { type_name, .. } if !is_primitive(type_name) => {
                    diags.push(Diagnostic::new(
                        Code::BadType,
                        path,
                        format!("attribute type `{}` is not primitive (String, Integer, Boolean)", type_name),
                    ));
                }
                Feature::Reference { type_name, .. }
                    if is_primitive(type_name) || mm.lookup_class(type_name).is_none() =>
                {
                    diags.push(Diagnostic::new(
                        Code::BadType,
                        path,
                        format!("reference type `{}` is not a class of this metamodel", type_name),
                    ));
                }
                _ => {}
            }
        }
    }

    // Inheritance cycles: each class has at most one parent, so the supergraph
    // is functional; every cycle is reported once, anchored at its
    // lexicographically smallest member.
    let mut on_cycle: HashSet<String> = HashSet::new();
    let mut cycles: Vec<Vec<String>> = Vec::new();
    for class in classes {
        if on_cycle.contains(&class.name) {
            continue;
        }
        let mut path: Vec<&str> = Vec::new();
        let mut seen: HashSet<&str> = HashSet::new();
        let mut cursor: Option<&str> = Some(&class.name);
        while let Some(name) = cursor {
            if seen.contains(name) {
                let start = path.iter().position(|&n| n == name).unwrap();
                let cycle: Vec<String> = path[start..].iter().map(|s| s.to_string()).collect();
                if !cycle.iter().any(|n| on_cycle.contains(n)) {
                    for n in &cycle {
                        on_cycle.insert(n.clone());
                    }
                    cycles.push(cycle);
                }
                break;
            }
            seen.insert(name);
            path.push(name);
            cursor = mm.lookup_class(name).and_then(|c| c.super_name.as_deref());
        }
    }
    for cycle in &mut cycles {
        let min = cycle.iter().enumerate().min_by_key(|(_, n)| n.as_str()).map(|(i, _)| i).unwrap();
        cycle.rotate_left(min);
        let mut display = cycle.clone();
        display.push(cycle[0].clone());
        diags.push(Diagnostic::new(
            Code::Cycle,
            cycle[0].clone(),
            format!("inheritance cycle: {}", display.join(" -> ")),
        ));
    }

    // Feature redefinition, reported at the declaring class. Classes on a
    // cycle are skipped (their closure is undefined).
    for class in classes {
        if on_cycle.contains(&class.name) {
            continue;
        }
        let mut inherited: HashSet<&str> = HashSet::new();
        let mut cursor = class.super_name.as_deref();
        while let Some(name) = cursor {
            if on_cycle.contains(name) {
                break;
            }
            match mm.lookup_class(name) {
                Some(c) => {
                    inherited.extend(c.features.iter().map(|f| f.name()));
                    cursor = c.super_name.as_deref();
                }
                None => break,
            }
        }
        let mut own: HashSet<&str> = HashSet::new();
        for feat in &class.features {
            if inherited.contains(feat.name()) || !own.insert(feat.name()) {
                diags.push(Diagnostic::new(
                    Code::DupFeature,
                    format!("{}/{}", class.name, feat.name()),
                    format!("feature `{}` redefined in class `{}`", feat.name(), class.name),
                ));
            }
        }
    }

    diags
}

#[cfg(test)]
mod tests {
    use super::*;

    const AWM_KM3: &str = include_str!("../../../metamodels/awm.km3");

    #[test]
    fn parses_awm_package_with_weaving_class() {
        let mm = parse_km3(AWM_KM3).unwrap();
        assert_eq!(mm.name(), "AWM");
        let weaving = mm.lookup_class("Weaving-Core_Aspect").unwrap();
        assert_eq!(weaving.super_name.as_deref(), Some("WModel"));
        assert_eq!(
            weaving.features,
            vec![
                Feature::Reference {
                    name: "Core".into(),
                    type_name: "WModelRef".into(),
                    container: true
                },
                Feature::Reference {
                    name: "Aspect".into(),
                    type_name: "WModelRef".into(),
                    container: true
                },
            ]
        );
    }

    #[test]
    fn parses_empty_package() {
        let mm = parse_km3("package P { }").unwrap();
        assert_eq!(mm.name(), "P");
        assert!(mm.classes().is_empty());
    }

    #[test]
    fn features_of_four_class_chain() {
        let src = "package P {\n\
                   class A { attribute a : String; }\n\
                   class B extends A { attribute b : String; }\n\
                   class C extends B { attribute c : String; }\n\
                   class D extends C { attribute d : String; }\n\
                   }";
        let mm = parse_km3(src).unwrap();
        // oracle: walk the extends chain by hand
        let expected = ["a", "b", "c", "d"];
        let feats = mm.features_of("D").unwrap();
        assert_eq!(feats.len(), 4);
        for (f, want) in feats.iter().zip(expected) {
            assert_eq!(f.name(), want);
        }
    }

    #[test]
    fn features_of_includes_inherited_welement_features() {
        let mm = parse_km3(AWM_KM3).unwrap();
        let names: Vec<&str> = mm
            .features_of("Weaving-Core_Aspect")
            .unwrap()
            .iter()
            .map(|f| f.name())
            .collect();
        assert_eq!(names, vec!["name", "description", "wovenModels", "links", "Core", "Aspect"]);
    }

    #[test]
    fn features_of_class_without_superclass() {
        let mm = parse_km3("package P { class A { attribute x : Integer; } }").unwrap();
        let feats = mm.features_of("A").unwrap();
        assert_eq!(feats.len(), 1);
        assert_eq!(feats[0].name(), "x");
    }

    #[test]
    fn features_of_missing_class_is_noclass() {
        let mm = parse_km3("package P { }").unwrap();
        assert_eq!(mm.features_of("Ghost").unwrap_err().code(), Code::NoClass);
    }

    #[test]
    fn lookup_class_finds_wlink_and_signals_absence() {
        let mm = parse_km3(AWM_KM3).unwrap();
        assert!(mm.lookup_class("WLink").is_some());
        assert!(mm.lookup_class("Nonexistent").is_none());
    }

    #[test]
    fn lookup_succeeds_for_every_listed_class() {
        let mm = parse_km3(AWM_KM3).unwrap();
        for class in mm.classes() {
            assert!(mm.lookup_class(&class.name).is_some(), "lookup lost {}", class.name);
        }
    }

    #[test]
    fn duplicate_class_is_rejected() {
        let err = parse_km3("package P { class A { } class A { } }").unwrap_err();
        assert_eq!(err.code(), Code::DupClass);
    }

    #[test]
    fn unresolved_types_are_rejected() {
        let err = parse_km3("package P { class A { attribute x : Whatever; } }").unwrap_err();
        assert_eq!(err.code(), Code::BadType);
        let err = parse_km3("package P { class A { reference r : String; } }").unwrap_err();
        assert_eq!(err.code(), Code::BadType);
        let err = parse_km3("package P { class A extends Ghost { } }").unwrap_err();
        assert_eq!(err.code(), Code::BadType);
    }

    #[test]
    fn self_extension_is_one_cycle_diagnostic() {
        let mm = Metamodel::new(
            "P",
            vec![MetaClass { name: "A".into(), super_name: Some("A".into()), features: vec![] }],
        );
        let diags = validate_metamodel(&mm);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, Code::Cycle);
    }

    #[test]
    fn two_class_cycle_is_one_diagnostic() {
        let err = parse_km3("package P { class A extends B { } class B extends A { } }")
            .unwrap_err();
        assert_eq!(err.code(), Code::Cycle);
        let mm = Metamodel::new(
            "P",
            vec![
                MetaClass { name: "B".into(), super_name: Some("A".into()), features: vec![] },
                MetaClass { name: "A".into(), super_name: Some("B".into()), features: vec![] },
            ],
        );
        let diags = validate_metamodel(&mm);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, Code::Cycle);
        assert_eq!(diags[0].path, "A");
    }

    #[test]
    fn multiple_parent_syntax_is_cycle_error() {
        let err = parse_km3("package P { class A { } class B { } class C extends A, B { } }")
            .unwrap_err();
        assert_eq!(err.code(), Code::Cycle);
    }

    #[test]
    fn feature_redefinition_is_dupfeat() {
        let err = parse_km3(
            "package P { class A { attribute x : String; } class B extends A { attribute x : Integer; } }",
        )
        .unwrap_err();
        assert_eq!(err.code(), Code::DupFeature);
    }

    #[test]
    fn parse_error_carries_line_and_column() {
        let err = parse_km3("package P {\n  class A {\n    attribute x String;\n  }\n}")
            .unwrap_err();
        assert_eq!(err.code(), Code::Parse);
        assert!(err.diagnostic().path.starts_with("3:"), "path was {}", err.diagnostic().path);
    }

    #[test]
    fn comments_crlf_and_hyphen_identifiers() {
        let src = "-- top comment\r\npackage P {\r\n  -- a class\r\n  class My-Class_2 {\r\n  }\r\n}\r\n";
        let mm = parse_km3(src).unwrap();
        assert!(mm.lookup_class("My-Class_2").is_some());
    }

    #[test]
    fn trailing_tokens_after_package_rejected() {
        let err = parse_km3("package P { } class X { }").unwrap_err();
        assert_eq!(err.code(), Code::Parse);
    }

    #[test]
    fn class_name_colliding_with_primitive_rejected() {
        let err = parse_km3("package P { class String { } }").unwrap_err();
        assert_eq!(err.code(), Code::DupClass);
    }

    #[test]
    fn pretty_print_reparses_structurally_equal() {
        let mm = parse_km3(AWM_KM3).unwrap();
        let printed = mm.to_string();
        let reparsed = parse_km3(&printed).unwrap();
        assert_eq!(mm, reparsed);
    }
}
