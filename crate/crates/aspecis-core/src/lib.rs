//! Aspect-oriented weaving of requirements models.
//!
//! This crate parses KM3-subset metamodels, loads JSON model instances,
//! checks model-to-metamodel conformance, matches pointcut patterns against
//! join points of a core model, and weaves aspect models into core models
//! under the direction of a weaving model. The result is a deterministic,
//! canonically serialized woven model.

pub mod awm;
pub mod diag;
pub mod km3;
pub mod model;
pub mod pointcut;
pub mod weaver;
