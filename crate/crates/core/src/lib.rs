//! Versioned RDF quad store with a flat and a condensed evaluation engine.

pub mod algebra;
pub mod eval;
pub mod harness;
pub mod io;
pub mod model;
pub mod query;
