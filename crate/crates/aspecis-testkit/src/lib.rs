//! Random model generators and independent oracles used by the test suites
//! of the `aspecis` crates. Not part of the shipped library API.

pub mod gen;
pub mod oracle;
