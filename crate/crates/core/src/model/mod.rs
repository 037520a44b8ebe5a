//! Terms, dictionary encoding, versions and the two dataset models.

mod dataset;
mod dictionary;
mod term;
mod version;
mod vi;

pub use dataset::{
    build_metadata_graph, condense, flatten, Catalog, CondensedDataset, DatasetBuilder,
    FlatDataset, Quad, VersionedQuad,
};
pub use dictionary::{TermDictionary, TermId};
pub use term::{
    format_rational, is_numeric_lexical, parse_decimal, LiteralKind, Term, XSD_BOOLEAN, XSD_STRING,
};
pub(crate) use term::escape_literal;
pub use version::{VersionId, VersionRegistry, VersionSet, METADATA_VERSION_LABEL};
pub use vi::VersionedIriRegistry;

use thiserror::Error;

/// Reserved IRIs of the versioning vocabulary.
pub mod vocab {
    /// Name given to the default graph of every version.
    pub const DEFAULT_GRAPH: &str = "default";
    pub const METADATA_GRAPH: &str = "ng:Metadata";
    pub const VERSION_OF: &str = "vers:version-of";
    pub const IN_VERSION: &str = "vers:in-version";

    /// Spellings accepted for the `version-of` predicate.
    pub const VERSION_OF_ALIASES: [&str; 4] = [
        "vers:version-of",
        "vers:is-version-of",
        "v:version-of",
        "v:is-version-of",
    ];
    /// Spellings accepted for the `in-version` predicate.
    pub const IN_VERSION_ALIASES: [&str; 2] = ["vers:in-version", "v:in-version"];

    pub fn is_version_of(iri: &str) -> bool {
        VERSION_OF_ALIASES.contains(&iri)
    }

    pub fn is_in_version(iri: &str) -> bool {
        IN_VERSION_ALIASES.contains(&iri)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("unknown term id {0}")]
    UnknownId(u32),
    #[error("{0} is not an IRI")]
    NotAnIri(String),
    #[error("term id {0} is not a versioned IRI")]
    NotVersionedIri(u32),
    #[error("versioned IRI {0} is already registered")]
    DuplicateVersionedIri(u32),
    #[error("duplicate version label {0:?}")]
    DuplicateVersion(String),
    #[error("unknown version ordinal {0}")]
    UnknownVersion(u32),
    #[error("version set of width {width} does not fit a registry of {registered} versions")]
    RegistryMismatch { width: u32, registered: usize },
    #[error("graph {graph} has no versioned IRI in version {version}")]
    MissingVersionedIri { version: u32, graph: u32 },
    #[error("condensed entry with an empty version set")]
    EmptyVersionSet,
    #[error("metadata row outside the reserved version v:0")]
    MetadataOutsideReservedVersion,
}
