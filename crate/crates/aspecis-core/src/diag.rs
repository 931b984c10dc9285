//! Diagnostic codes, diagnostics and the crate-wide error type.
//!
//! Diagnostics come in two flavours which share the same shape: validation
//! operations return them in lists (`Vec<Diagnostic>`), every other operation
//! raises the first problem it finds as an [`Error`].

use std::fmt;

/// Closed set of diagnostic codes emitted anywhere in the engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Code {
    /// Malformed KM3 syntax.
    Parse,
    /// Duplicate class name in a metamodel (or collision with a primitive type).
    DupClass,
    /// Feature redefined along an inheritance chain or within a class.
    DupFeature,
    /// Unresolved or ill-kinded type name in a metamodel.
    BadType,
    /// Inheritance cycle (also covers multiple-parent syntax, rejected at parse).
    Cycle,
    /// Class name not found in the metamodel.
    NoClass,
    /// Malformed JSON in a model file.
    Json,
    /// Model-JSON schema violation (missing, unknown or ill-typed keys).
    Schema,
    /// Duplicate element id within a model.
    DupId,
    /// Model's conformsTo does not name the metamodel checked against.
    Name,
    /// Element type unknown in the metamodel.
    Type,
    /// Slot key does not name a feature of the element's class.
    Feat,
    /// Slot value does not fit the feature's declared type.
    Val,
    /// Reference slot points at an id absent from the model.
    Ref,
    /// Containment is not a forest (double parent or cycle).
    Contain,
    /// Element on an identification path lacks a name slot.
    NoName,
    /// Two elements produce the same identifier (or several match one).
    Ambiguous,
    /// No element matches the identifier.
    NoResolve,
    /// Zero or multiple Weaving-Core_Aspect roots in a weaving model.
    Root,
    /// A weaving link end does not resolve in its target model.
    EndResolve,
    /// Core/Aspect model references do not match the supplied models.
    ModelRef,
    /// Malformed pointcut pattern.
    Pattern,
    /// typePointcut outside {call, execution}.
    PcType,
    /// A link's core end is not in its pointcut's match set.
    EndNotMatched,
    /// A link's aspect end does not resolve to an Advice.
    NoAdvice,
    /// Advice kind outside {before, after, around}.
    Kind,
    /// Injected operation clashes with an existing one of the same name.
    NameClash,
    /// Unresolved weaving conflict (tie at maximal priority, or fail mode).
    Conflict,
    /// File could not be read or written.
    Io,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::Parse => "E_PARSE",
            Code::DupClass => "E_DUPCLASS",
            Code::DupFeature => "E_DUPFEAT",
            Code::BadType => "E_BADTYPE",
            Code::Cycle => "E_CYCLE",
            Code::NoClass => "E_NOCLASS",
            Code::Json => "E_JSON",
            Code::Schema => "E_SCHEMA",
            Code::DupId => "E_DUPID",
            Code::Name => "E_NAME",
            Code::Type => "E_TYPE",
            Code::Feat => "E_FEAT",
            Code::Val => "E_VAL",
            Code::Ref => "E_REF",
            Code::Contain => "E_CONTAIN",
            Code::NoName => "E_NONAME",
            Code::Ambiguous => "E_AMBIGUOUS",
            Code::NoResolve => "E_NORESOLVE",
            Code::Root => "E_ROOT",
            Code::EndResolve => "E_ENDRESOLVE",
            Code::ModelRef => "E_MODELREF",
            Code::Pattern => "E_PATTERN",
            Code::PcType => "E_PCTYPE",
            Code::EndNotMatched => "E_ENDNOTMATCHED",
            Code::NoAdvice => "E_NOADVICE",
            Code::Kind => "E_KIND",
            Code::NameClash => "E_NAMECLASH",
            Code::Conflict => "E_CONFLICT",
            Code::Io => "E_IO",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One reported violation: code, coordinates, human-readable message.
///
/// `path` coordinates depend on what is being checked: `line:col` for KM3
/// sources, `Class` or `Class/feature` for metamodel validation,
/// `model/elementId` or `model/elementId/slot` for instance conformance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: Code,
    pub path: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(code: Code, path: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic { code, path: path.into(), message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}: {}", self.code, self.message)
        } else {
            write!(f, "{} {}: {}", self.code, self.path, self.message)
        }
    }
}

/// Error raised by fallible operations; wraps a single [`Diagnostic`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct Error(pub Diagnostic);

impl Error {
    pub fn new(code: Code, path: impl Into<String>, message: impl Into<String>) -> Self {
        Error(Diagnostic::new(code, path, message))
    }

    pub fn code(&self) -> Code {
        self.0.code
    }

    pub fn diagnostic(&self) -> &Diagnostic {
        &self.0
    }
}

impl From<Diagnostic> for Error {
    fn from(d: Diagnostic) -> Self {
        Error(d)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
