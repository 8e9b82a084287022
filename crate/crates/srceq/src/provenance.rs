//! Generator provenance: a purl-style naming scheme for code generators,
//! extraction of `@Generated` annotations, and a per-file manifest that
//! records each source's origin with a digest over its normalized token
//! stream — so the manifest survives reformatting but not code changes.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::lexer::{Token, TokenKind};
use crate::source::{SourceArchive, SourceUnit};
use crate::trace::{TraceResult, TraceStatus};

/// What kind of tool produced a file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeneratorKind {
    #[serde(rename = "annotation-processor")]
    AnnotationProcessor,
    #[serde(rename = "build-plugin")]
    BuildPlugin,
    #[serde(rename = "external-tool")]
    ExternalTool,
    #[serde(rename = "template-engine")]
    TemplateEngine,
}

impl GeneratorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GeneratorKind::AnnotationProcessor => "annotation-processor",
            GeneratorKind::BuildPlugin => "build-plugin",
            GeneratorKind::ExternalTool => "external-tool",
            GeneratorKind::TemplateEngine => "template-engine",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "annotation-processor" => Some(GeneratorKind::AnnotationProcessor),
            "build-plugin" => Some(GeneratorKind::BuildPlugin),
            "external-tool" => Some(GeneratorKind::ExternalTool),
            "template-engine" => Some(GeneratorKind::TemplateEngine),
            _ => None,
        }
    }
}

/// Canonical generator identity: `gen:<kind>/<name>@<version>` with an
/// optional `?config=<digest>` qualifier. Versions are mandatory; a
/// generator without a version cannot be reasoned about.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorId {
    pub kind: GeneratorKind,
    pub name: String,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub config_digest: Option<String>,
}

impl fmt::Display for GeneratorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "gen:{}/{}@{}",
            self.kind.as_str(),
            self.name,
            self.version
        )?;
        if let Some(d) = &self.config_digest {
            write!(f, "?config={d}")?;
        }
        Ok(())
    }
}

/// Placeholder identity for files known to be generated by an
/// unidentified tool (e.g. missing from the repository with no annotation
/// or hint).
pub fn unknown_generator() -> GeneratorId {
    GeneratorId {
        kind: GeneratorKind::ExternalTool,
        name: "unknown".to_string(),
        version: "unknown".to_string(),
        config_digest: None,
    }
}

/// Malformed input with the byte position of the problem.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("format error at {pos}: {reason}")]
pub struct FormatError {
    pub pos: usize,
    pub reason: String,
}

impl FormatError {
    fn new(pos: usize, reason: impl Into<String>) -> Self {
        FormatError {
            pos,
            reason: reason.into(),
        }
    }
}

fn valid_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '_' | ':' | '/')
}

fn valid_version_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '_' | '+')
}

/// Parses the canonical `gen:` form.
pub fn parse_generator_id(text: &str) -> Result<GeneratorId, FormatError> {
    let rest = text
        .strip_prefix("gen:")
        .ok_or_else(|| FormatError::new(0, "expected gen: prefix"))?;
    let slash = rest
        .find('/')
        .ok_or_else(|| FormatError::new(text.len(), "expected '/' after generator kind"))?;
    let kind = GeneratorKind::parse(&rest[..slash]).ok_or_else(|| {
        FormatError::new(4, format!("unknown generator kind {:?}", &rest[..slash]))
    })?;

    let after_kind = &rest[slash + 1..];
    let base_pos = 4 + slash + 1;
    let (body, query) = match after_kind.find('?') {
        Some(q) => (&after_kind[..q], Some(&after_kind[q + 1..])),
        None => (after_kind, None),
    };
    let at = body
        .rfind('@')
        .ok_or_else(|| FormatError::new(base_pos + body.len(), "missing @version"))?;
    let name = &body[..at];
    let version = &body[at + 1..];
    if name.is_empty() {
        return Err(FormatError::new(base_pos, "empty generator name"));
    }
    if let Some(bad) = name.find(|c| !valid_name_char(c)) {
        return Err(FormatError::new(
            base_pos + bad,
            "invalid character in generator name",
        ));
    }
    if version.is_empty() {
        return Err(FormatError::new(
            base_pos + at + 1,
            "missing generator version",
        ));
    }
    if let Some(bad) = version.find(|c| !valid_version_char(c)) {
        return Err(FormatError::new(
            base_pos + at + 1 + bad,
            "invalid character in generator version",
        ));
    }

    let config_digest = match query {
        None => None,
        Some(q) => {
            let digest = q.strip_prefix("config=").ok_or_else(|| {
                FormatError::new(base_pos + body.len() + 1, "expected config=<digest>")
            })?;
            if digest.is_empty()
                || !digest
                    .chars()
                    .all(|c| c.is_ascii_digit() || ('a'..='f').contains(&c))
            {
                return Err(FormatError::new(
                    base_pos + body.len() + 8,
                    "config digest must be lowercase hex",
                ));
            }
            Some(digest.to_string())
        }
    };

    Ok(GeneratorId {
        kind,
        name: name.to_string(),
        version: version.to_string(),
        config_digest,
    })
}

/// One `@Generated` annotation found in a source file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratedAnnotationInfo {
    /// Resolved via a qualified use or a matching import; empty when the
    /// source never names the package.
    pub annotation_package: String,
    pub value: Vec<String>,
    pub date: Option<String>,
    pub comments: Option<String>,
}

const GENERATED_SIMPLE_NAME: &str = "Generated";

/// Scans a unit's token stream for `@Generated` annotations (any
/// package) and extracts their attributes. Read-only: never affects
/// validity or equivalence.
pub fn extract_generated_annotations(unit: &SourceUnit) -> Vec<GeneratedAnnotationInfo> {
    let tokens = &unit.stream.tokens;
    let imported_package = find_import_package(tokens);

    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        if tokens[i].key() != (TokenKind::Separator, "@") {
            i += 1;
            continue;
        }
        // Collect the dotted annotation name.
        let mut names: Vec<&str> = Vec::new();
        let mut j = i + 1;
        while let Some(t) = tokens.get(j) {
            if t.kind != TokenKind::Identifier {
                break;
            }
            names.push(&t.text);
            if tokens.get(j + 1).map(Token::key) == Some((TokenKind::Separator, ".")) {
                j += 2;
            } else {
                j += 1;
                break;
            }
        }
        if names.last().copied() != Some(GENERATED_SIMPLE_NAME) {
            i = j.max(i + 1);
            continue;
        }
        let annotation_package = if names.len() > 1 {
            names[..names.len() - 1].join(".")
        } else {
            imported_package.clone().unwrap_or_default()
        };

        let mut info = GeneratedAnnotationInfo {
            annotation_package,
            value: Vec::new(),
            date: None,
            comments: None,
        };
        if tokens.get(j).map(Token::key) == Some((TokenKind::Separator, "(")) {
            let end = matching_paren(tokens, j);
            parse_annotation_args(&tokens[j + 1..end], &mut info);
            i = end + 1;
        } else {
            i = j;
        }
        out.push(info);
    }
    out
}

/// Package of an `import x.y.Generated;` declaration, when present.
fn find_import_package(tokens: &[Token]) -> Option<String> {
    let mut i = 0;
    while i < tokens.len() {
        if tokens[i].key() == (TokenKind::Keyword, "import") {
            let mut segs: Vec<&str> = Vec::new();
            let mut j = i + 1;
            while let Some(t) = tokens.get(j) {
                match t.key() {
                    (TokenKind::Identifier, text) => segs.push(text),
                    (TokenKind::Separator, ".") => {}
                    (TokenKind::Separator, ";") => break,
                    _ => break,
                }
                j += 1;
            }
            if segs.last().copied() == Some(GENERATED_SIMPLE_NAME) && segs.len() > 1 {
                return Some(segs[..segs.len() - 1].join("."));
            }
            i = j;
        }
        i += 1;
    }
    None
}

fn matching_paren(tokens: &[Token], open: usize) -> usize {
    let mut depth = 0;
    for (k, t) in tokens.iter().enumerate().skip(open) {
        match t.key() {
            (TokenKind::Separator, "(") => depth += 1,
            (TokenKind::Separator, ")") => {
                depth -= 1;
                if depth == 0 {
                    return k;
                }
            }
            _ => {}
        }
    }
    tokens.len().saturating_sub(1)
}

/// Parses `"v"`, `{"a", "b"}`, or `name = ...` attribute lists.
fn parse_annotation_args(args: &[Token], info: &mut GeneratedAnnotationInfo) {
    let unquote = |text: &str| -> String {
        text.trim_start_matches('"')
            .trim_end_matches('"')
            .to_string()
    };
    let mut i = 0;
    let mut slot_known = false;
    while i < args.len() {
        // Named attribute?
        if args[i].kind == TokenKind::Identifier
            && args.get(i + 1).map(Token::key) == Some((TokenKind::Operator, "="))
        {
            let name = args[i].text.clone();
            let (values, next) = read_attribute_value(args, i + 2, &unquote);
            match name.as_str() {
                "value" => info.value = values,
                "date" => info.date = values.into_iter().next(),
                "comments" => info.comments = values.into_iter().next(),
                _ => {}
            }
            slot_known = true;
            i = next;
            continue;
        }
        // Bare value shorthand.
        if !slot_known {
            let (values, next) = read_attribute_value(args, i, &unquote);
            if !values.is_empty() {
                info.value = values;
                slot_known = true;
                i = next;
                continue;
            }
        }
        i += 1;
    }
}

fn read_attribute_value(
    args: &[Token],
    start: usize,
    unquote: &dyn Fn(&str) -> String,
) -> (Vec<String>, usize) {
    let mut values = Vec::new();
    let mut i = start;
    if args.get(i).map(Token::key) == Some((TokenKind::Separator, "{")) {
        i += 1;
        while i < args.len() && args[i].key() != (TokenKind::Separator, "}") {
            if args[i].kind == TokenKind::StringLiteral {
                values.push(unquote(&args[i].text));
            }
            i += 1;
        }
        i += 1;
    } else if args.get(i).map(|t| t.kind) == Some(TokenKind::StringLiteral) {
        values.push(unquote(&args[i].text));
        i += 1;
    }
    // Skip a trailing comma.
    if args.get(i).map(Token::key) == Some((TokenKind::Separator, ",")) {
        i += 1;
    }
    (values, i)
}

/// Origin of one distributed source file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FileOrigin {
    Handwritten,
    Generated,
    Template,
}

/// One manifest record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProvenanceRecord {
    pub path: String,
    pub qualified_names: Vec<String>,
    pub status: FileOrigin,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorId>,
    pub source_digest: String,
}

pub const MANIFEST_FORMAT: &str = "source-provenance";
pub const MANIFEST_VERSION: u32 = 1;
pub const DIGEST_ALGORITHM: &str = "sha256";

/// The provenance manifest: a versioned header plus one record per file,
/// sorted by path so manifest diffs stay reviewable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub format_version: u32,
    pub digest_algorithm: String,
    pub records: Vec<ProvenanceRecord>,
}

impl Manifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<Manifest, FormatError> {
        let manifest: Manifest = serde_json::from_str(text)
            .map_err(|e| FormatError::new(0, format!("malformed manifest: {e}")))?;
        if manifest.format != MANIFEST_FORMAT {
            return Err(FormatError::new(
                0,
                format!("unsupported manifest format {:?}", manifest.format),
            ));
        }
        if manifest.format_version != MANIFEST_VERSION {
            return Err(FormatError::new(
                0,
                format!("unsupported manifest version {}", manifest.format_version),
            ));
        }
        if manifest.digest_algorithm != DIGEST_ALGORITHM {
            return Err(FormatError::new(
                0,
                format!(
                    "unsupported digest algorithm {:?}",
                    manifest.digest_algorithm
                ),
            ));
        }
        Ok(manifest)
    }
}

/// SHA-256 over the comment-stripped token texts joined with single
/// spaces; invariant under comments and reformatting, variant under any
/// token change. Files that do not lex are digested over raw text.
pub fn source_digest(unit: &SourceUnit) -> String {
    let payload = if unit.lex_error.is_none() {
        unit.stream.normalized_text()
    } else {
        unit.text.clone()
    };
    let mut hasher = Sha256::new();
    hasher.update(payload.as_bytes());
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for byte in digest {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

/// Path-glob to generator-id hints, checked in declaration order.
#[derive(Debug, Default, Clone)]
pub struct GeneratorHints {
    entries: Vec<(globset::GlobMatcher, String, GeneratorId)>,
}

impl GeneratorHints {
    /// Parses a hints file: one `glob = gen:...` per line, `#` comments.
    pub fn parse(text: &str) -> Result<GeneratorHints, FormatError> {
        let mut entries = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (glob_text, id_text) = line.split_once('=').ok_or_else(|| {
                FormatError::new(
                    0,
                    format!("hints line {}: expected glob = gen:...", idx + 1),
                )
            })?;
            let glob_text = glob_text.trim();
            let id = parse_generator_id(id_text.trim())?;
            let matcher = globset::Glob::new(glob_text)
                .map_err(|e| FormatError::new(0, format!("hints line {}: bad glob: {e}", idx + 1)))?
                .compile_matcher();
            entries.push((matcher, glob_text.to_string(), id));
        }
        Ok(GeneratorHints { entries })
    }

    pub fn load(path: &Path) -> Result<GeneratorHints, FormatError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            FormatError::new(0, format!("cannot read hints {}: {e}", path.display()))
        })?;
        Self::parse(&text)
    }

    pub fn lookup(&self, path: &str) -> Option<&GeneratorId> {
        self.entries
            .iter()
            .find(|(m, _, _)| m.is_match(path))
            .map(|(_, _, id)| id)
    }
}

/// Emission failure: a hint and an in-source annotation disagree about
/// who generated a file. Reported, never silently resolved.
#[derive(Debug, Error)]
pub enum EmitError {
    #[error("{path}: hint names generator {hint:?} but annotation names {annotation:?}")]
    Conflict {
        path: String,
        hint: String,
        annotation: String,
    },
}

/// Builds the manifest for an archive. Trace results mark files the
/// repository cannot account for; annotations and hints identify the
/// generator.
pub fn emit_manifest(
    archive: &SourceArchive,
    trace: Option<&TraceResult>,
    hints: &GeneratorHints,
) -> Result<Manifest, EmitError> {
    let mut records = Vec::new();
    for unit in archive.units.values() {
        let annotations = extract_generated_annotations(unit);
        let hint = hints.lookup(&unit.path);
        let (missing, template) = trace_flags(unit, trace);

        let annotation_name = annotations
            .iter()
            .find(|a| !a.value.is_empty())
            .map(|a| a.value[0].clone());
        if let (Some(h), Some(a)) = (hint, &annotation_name) {
            if &h.name != a {
                return Err(EmitError::Conflict {
                    path: unit.path.clone(),
                    hint: h.name.clone(),
                    annotation: a.clone(),
                });
            }
        }

        let status = if missing || !annotations.is_empty() || hint.is_some() {
            FileOrigin::Generated
        } else if template {
            FileOrigin::Template
        } else {
            FileOrigin::Handwritten
        };
        let generator = match status {
            FileOrigin::Generated => Some(match (hint, annotation_name) {
                (Some(h), _) => h.clone(),
                (None, Some(name)) => GeneratorId {
                    kind: GeneratorKind::AnnotationProcessor,
                    name,
                    version: "unknown".to_string(),
                    config_digest: None,
                },
                (None, None) => unknown_generator(),
            }),
            _ => None,
        };

        records.push(ProvenanceRecord {
            path: unit.path.clone(),
            qualified_names: unit
                .qualified_names()
                .iter()
                .map(|q| q.to_string())
                .collect(),
            status,
            generator,
            source_digest: source_digest(unit),
        });
    }

    Ok(Manifest {
        format: MANIFEST_FORMAT.to_string(),
        format_version: MANIFEST_VERSION,
        digest_algorithm: DIGEST_ALGORITHM.to_string(),
        records,
    })
}

fn trace_flags(unit: &SourceUnit, trace: Option<&TraceResult>) -> (bool, bool) {
    let Some(trace) = trace else {
        return (false, false);
    };
    let mut missing = false;
    let mut template = false;
    for qn in unit.qualified_names() {
        match trace.per_class.get(&qn) {
            Some(TraceStatus::MissingInRepo) => missing = true,
            Some(TraceStatus::RepoTemplate) => template = true,
            _ => {}
        }
    }
    (missing, template)
}

/// Per-file verification outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CheckStatus {
    Ok,
    DigestMismatch,
    /// Manifest record whose path is not in the archive.
    MissingFromArchive,
    /// Archive unit absent from the manifest.
    NotInManifest,
}

/// Result of checking a manifest against an archive.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub per_file: BTreeMap<String, CheckStatus>,
    pub pass: bool,
}

/// Recomputes digests and reconciles paths; passes only when every file
/// in both the manifest and the archive checks out.
pub fn check_manifest(archive: &SourceArchive, manifest: &Manifest) -> VerificationReport {
    let mut per_file = BTreeMap::new();
    for record in &manifest.records {
        let status = match archive.units.get(&record.path) {
            None => CheckStatus::MissingFromArchive,
            Some(unit) => {
                if source_digest(unit) == record.source_digest {
                    CheckStatus::Ok
                } else {
                    CheckStatus::DigestMismatch
                }
            }
        };
        per_file.insert(record.path.clone(), status);
    }
    for path in archive.units.keys() {
        per_file
            .entry(path.clone())
            .or_insert(CheckStatus::NotInManifest);
    }
    let pass = per_file.values().all(|s| *s == CheckStatus::Ok);
    VerificationReport { per_file, pass }
}
