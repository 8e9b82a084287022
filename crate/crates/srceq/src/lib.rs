//! srceq — decides whether two Java source archives are equivalent modulo
//! comments and formatting, explains non-equivalence with a build-cause
//! taxonomy, traces distributed sources back to a repository checkout, and
//! emits/verifies generator provenance manifests.

pub mod classify;
pub mod config;
pub mod diff;
pub mod equivalence;
pub mod lexer;
pub mod provenance;
pub mod report;
pub mod source;
pub mod trace;

pub use classify::{classify_archive, classify_pair, CauseLabel, CauseVerdict, ShadingMap};
pub use config::HeuristicsConfig;
pub use equivalence::{compare_archives, compare_pair, ArchiveVerdict, PairStatus, PairVerdict};
pub use lexer::{normalized_equal, tokenize, LexError, LexOptions, Token, TokenKind, TokenStream};
pub use provenance::{
    check_manifest, emit_manifest, parse_generator_id, GeneratorId, GeneratorKind, Manifest,
};
pub use source::{class_index, load_archive, QualifiedName, SourceArchive, SourceUnit, Validity};
pub use trace::{summarize_trace, trace, TraceResult, TraceStatus, TraceSummary};
