//! Tracing distributed sources back to a repository checkout: for every
//! class in an archive, decide whether the repository contains a matching
//! source, a template that gets instantiated at build time, or nothing —
//! the last two are the classes a build must have generated.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use globset::{Glob, GlobMatcher};
use serde::{Deserialize, Serialize};

use crate::equivalence::{compare_pair, PairStatus};
use crate::source::{class_index, load_directory, LoadError, QualifiedName, SourceArchive};

/// Default repository subtrees that never count as committed sources.
pub const DEFAULT_EXCLUDES: &[&str] = &[
    "**/.git/**",
    "**/.svn/**",
    "**/target/**",
    "**/build/**",
    "**/out/**",
];

/// Where one archive class stands relative to the repository.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceStatus {
    /// A repo source declares it with byte-identical content.
    RepoBackedIdentical,
    /// A repo source declares it, equal modulo comments and formatting.
    RepoBackedEquivalent,
    /// A repo source declares it but the token streams differ.
    RepoBackedDiffers,
    /// Only a template (unresolved variables outside literals) declares it.
    RepoTemplate,
    /// No repository source declares it.
    MissingInRepo,
}

impl TraceStatus {
    /// Templates and absent sources both mean the distributed file was
    /// produced by the build.
    pub fn is_missing(self) -> bool {
        matches!(self, TraceStatus::RepoTemplate | TraceStatus::MissingInRepo)
    }

    fn rank(self) -> u8 {
        match self {
            TraceStatus::RepoBackedIdentical => 0,
            TraceStatus::RepoBackedEquivalent => 1,
            TraceStatus::RepoBackedDiffers => 2,
            TraceStatus::RepoTemplate => 3,
            TraceStatus::MissingInRepo => 4,
        }
    }
}

/// Result of tracing one archive against one repository checkout.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceResult {
    pub per_class: BTreeMap<QualifiedName, TraceStatus>,
    /// Classes whose repo backing is a template or absent.
    pub missing_count: usize,
    pub repo_root: String,
    pub warnings: Vec<String>,
}

impl TraceResult {
    pub fn missing_names(&self) -> BTreeSet<QualifiedName> {
        self.per_class
            .iter()
            .filter(|(_, s)| s.is_missing())
            .map(|(q, _)| q.clone())
            .collect()
    }
}

/// Compiles exclusion globs, prepending the defaults.
pub fn build_excludes(extra: &[String]) -> Result<Vec<GlobMatcher>, globset::Error> {
    DEFAULT_EXCLUDES
        .iter()
        .map(|s| (*s).to_string())
        .chain(extra.iter().cloned())
        .map(|pat| Glob::new(&pat).map(|g| g.compile_matcher()))
        .collect()
}

/// Traces every class of `archive` to the checkout at `repo_root`.
///
/// Matching is by qualified name, not path, since repository layouts
/// (src/main/java/...) differ from archive layouts. When several repo or
/// archive units declare the same name, the best outcome wins and a
/// warning is recorded.
pub fn trace(
    archive: &SourceArchive,
    repo_root: &Path,
    extra_excludes: &[String],
) -> Result<TraceResult, LoadError> {
    let excludes = build_excludes(extra_excludes).map_err(|e| LoadError::Archive {
        path: repo_root.to_path_buf(),
        reason: format!("bad exclude glob: {e}"),
    })?;
    let repo = load_directory(repo_root, "repo", &excludes)?;
    Ok(trace_against(archive, &repo))
}

/// Trace with an already-loaded repository tree.
pub fn trace_against(archive: &SourceArchive, repo: &SourceArchive) -> TraceResult {
    let archive_index = class_index(archive);
    let repo_index = class_index(repo);

    let mut warnings: Vec<String> = Vec::new();
    warnings.extend(archive_index.warnings.iter().cloned());
    warnings.extend(repo_index.warnings.iter().cloned());

    let mut per_class = BTreeMap::new();
    for (qn, archive_decls) in &archive_index.entries {
        let status = match repo_index.entries.get(qn) {
            None => TraceStatus::MissingInRepo,
            Some(repo_decls) => {
                let mut best = TraceStatus::MissingInRepo;
                for rd in repo_decls {
                    let candidate = if rd.template {
                        TraceStatus::RepoTemplate
                    } else {
                        let repo_unit = &repo.units[&rd.path];
                        archive_decls
                            .iter()
                            .map(|ad| {
                                let archive_unit = &archive.units[&ad.path];
                                match compare_pair(archive_unit, repo_unit).status {
                                    PairStatus::Identical => TraceStatus::RepoBackedIdentical,
                                    PairStatus::EquivalentModuloFormat => {
                                        TraceStatus::RepoBackedEquivalent
                                    }
                                    _ => TraceStatus::RepoBackedDiffers,
                                }
                            })
                            .min_by_key(|s| s.rank())
                            .unwrap_or(TraceStatus::RepoTemplate)
                    };
                    if candidate.rank() < best.rank() {
                        best = candidate;
                    }
                }
                best
            }
        };
        per_class.insert(qn.clone(), status);
    }

    let missing_count = per_class.values().filter(|s| s.is_missing()).count();
    TraceResult {
        per_class,
        missing_count,
        repo_root: repo.origin.display().to_string(),
        warnings,
    }
}

/// Per-package rollup across releases: a class missing from several
/// releases counts once.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceSummary {
    pub unique_missing: BTreeSet<QualifiedName>,
}

impl TraceSummary {
    pub fn count(&self) -> usize {
        self.unique_missing.len()
    }
}

/// Union of missing class names across per-release trace results.
pub fn summarize_trace(results: &[TraceResult]) -> TraceSummary {
    let mut unique_missing = BTreeSet::new();
    for r in results {
        unique_missing.extend(r.missing_names());
    }
    TraceSummary { unique_missing }
}
