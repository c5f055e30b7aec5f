//! Library half of the `quivertilt` binary: command reports and the session
//! service, kept here so tests can drive them without a process.

pub mod report;
pub mod service;
