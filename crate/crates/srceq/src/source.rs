//! Source files and archives: loading from zips or directories, package and
//! top-level type extraction, and the validity check that separates real
//! Java sources from build-time templates.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use walkdir::WalkDir;

use crate::lexer::{tokenize, LexError, LexOptions, Token, TokenKind, TokenStream};

/// Validity of one source file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Validity {
    /// Lexes, structurally plausible, no unresolved template markers.
    Valid,
    /// Tokenization failed.
    LexInvalid,
    /// Unbalanced delimiters, or a nonempty file with no top-level type.
    StructInvalid,
    /// Contains an unresolved template marker outside literals and comments.
    Template,
}

/// A package-qualified top-level type name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QualifiedName {
    pub package: String,
    pub simple: String,
}

impl QualifiedName {
    pub fn new(package: impl Into<String>, simple: impl Into<String>) -> Self {
        QualifiedName {
            package: package.into(),
            simple: simple.into(),
        }
    }
}

impl fmt::Display for QualifiedName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.package.is_empty() {
            write!(f, "{}", self.simple)
        } else {
            write!(f, "{}.{}", self.package, self.simple)
        }
    }
}

/// One `.java` file: its text, normalized token stream, extracted names,
/// and validity verdict.
#[derive(Debug, Clone)]
pub struct SourceUnit {
    /// Archive- or repo-relative path with '/' separators.
    pub path: String,
    pub text: String,
    /// Comment-stripped stream; empty when the file does not lex.
    pub stream: TokenStream,
    pub package_name: String,
    /// Simple names of top-level type declarations in source order.
    pub top_level_types: Vec<String>,
    pub validity: Validity,
    pub lex_error: Option<LexError>,
}

impl SourceUnit {
    /// Analyzes raw text into a unit. Never fails: lexing problems are
    /// recorded as `LexInvalid`.
    pub fn analyze(path: impl Into<String>, text: impl Into<String>) -> SourceUnit {
        let path = path.into();
        let text = text.into();
        match tokenize(&text, &LexOptions::default()) {
            Ok(stream) => {
                let (package_name, top_level_types) = extract_names(&stream);
                let validity = check_validity(&stream, &top_level_types);
                SourceUnit {
                    path,
                    text,
                    stream,
                    package_name,
                    top_level_types,
                    validity,
                    lex_error: None,
                }
            }
            Err(err) => SourceUnit {
                path,
                text,
                stream: TokenStream::default(),
                package_name: String::new(),
                top_level_types: Vec::new(),
                validity: Validity::LexInvalid,
                lex_error: Some(err),
            },
        }
    }

    /// Re-tokenizes with comments retained. Cause detection reads banner
    /// comments, so it needs the raw stream rather than the stored one.
    pub fn raw_stream(&self) -> TokenStream {
        let opts = LexOptions {
            strip_comments: false,
            ..LexOptions::default()
        };
        tokenize(&self.text, &opts).unwrap_or_default()
    }

    /// Qualified names of this unit's top-level types.
    pub fn qualified_names(&self) -> Vec<QualifiedName> {
        self.top_level_types
            .iter()
            .map(|s| QualifiedName::new(self.package_name.clone(), s.clone()))
            .collect()
    }
}

/// Extracts the package declaration and the simple names of all top-level
/// type declarations (class, interface, enum, record, @interface) from a
/// comment-stripped stream.
pub fn extract_names(stream: &TokenStream) -> (String, Vec<String>) {
    let tokens = &stream.tokens;
    let mut package = String::new();
    let mut types = Vec::new();
    let mut depth: i32 = 0;
    let mut i = 0;

    while i < tokens.len() {
        let t = &tokens[i];
        match t.key() {
            (TokenKind::Separator, "{") => depth += 1,
            (TokenKind::Separator, "}") => depth -= 1,
            (TokenKind::Keyword, "package") if depth == 0 && package.is_empty() => {
                let (name, next) = read_dotted_name(tokens, i + 1);
                package = name;
                i = next;
                continue;
            }
            (TokenKind::Keyword, "class" | "interface" | "enum") if depth == 0 => {
                if let Some(name) = ident_at(tokens, i + 1) {
                    types.push(name);
                }
            }
            // A record declaration: the contextual keyword lexes as an
            // identifier, so require the header parenthesis or type params.
            (TokenKind::Identifier, "record") if depth == 0 => {
                if let Some(name) = ident_at(tokens, i + 1) {
                    if matches!(
                        tokens.get(i + 2).map(Token::key),
                        Some((TokenKind::Separator, "(")) | Some((TokenKind::Operator, "<"))
                    ) {
                        types.push(name);
                    }
                }
            }
            _ => {}
        }
        i += 1;
    }
    (package, types)
}

fn ident_at(tokens: &[Token], i: usize) -> Option<String> {
    match tokens.get(i) {
        Some(t) if t.kind == TokenKind::Identifier => Some(t.text.clone()),
        _ => None,
    }
}

/// Reads `a.b.c` starting at `i`; returns the dotted name and the index
/// after the last consumed token.
fn read_dotted_name(tokens: &[Token], mut i: usize) -> (String, usize) {
    let mut name = String::new();
    loop {
        match tokens.get(i) {
            Some(t) if t.kind == TokenKind::Identifier => {
                name.push_str(&t.text);
                i += 1;
            }
            _ => break,
        }
        match tokens.get(i) {
            Some(t) if t.key() == (TokenKind::Separator, ".") => {
                name.push('.');
                i += 1;
            }
            _ => break,
        }
    }
    if name.ends_with('.') {
        name.pop();
    }
    (name, i)
}

/// Validity verdict for an already-lexed unit. Template markers outside
/// literals win over structural problems; literal interiors are opaque to
/// the scan because they are single tokens.
pub fn check_validity(stream: &TokenStream, top_level_types: &[String]) -> Validity {
    if has_template_marker(stream) {
        return Validity::Template;
    }
    if !delimiters_balanced(stream) {
        return Validity::StructInvalid;
    }
    if !stream.is_empty() && top_level_types.is_empty() {
        return Validity::StructInvalid;
    }
    Validity::Valid
}

/// Detects `${`...`}` spans (an identifier ending in '$' immediately
/// followed by '{') and `$NAME$` identifiers.
fn has_template_marker(stream: &TokenStream) -> bool {
    let tokens = &stream.tokens;
    for (i, t) in tokens.iter().enumerate() {
        if t.kind != TokenKind::Identifier {
            continue;
        }
        if is_dollar_delimited(&t.text) {
            return true;
        }
        if t.text.ends_with('$') {
            if let Some(next) = tokens.get(i + 1) {
                if next.key() == (TokenKind::Separator, "{") && next.offset == t.end {
                    return true;
                }
            }
        }
    }
    false
}

/// `$NAME$`: fully dollar-delimited with a nonempty name between.
fn is_dollar_delimited(text: &str) -> bool {
    text.len() >= 3
        && text.starts_with('$')
        && text.ends_with('$')
        && text[1..text.len() - 1].chars().all(|c| c != '$')
}

fn delimiters_balanced(stream: &TokenStream) -> bool {
    let mut stack = Vec::new();
    for t in &stream.tokens {
        if t.kind != TokenKind::Separator {
            continue;
        }
        match t.text.as_str() {
            "(" | "[" | "{" => stack.push(t.text.as_str()),
            ")" if stack.pop() != Some("(") => return false,
            "]" if stack.pop() != Some("[") => return false,
            "}" if stack.pop() != Some("{") => return false,
            _ => {}
        }
    }
    stack.is_empty()
}

/// A set of source units loaded from a zip archive or directory tree.
#[derive(Debug, Clone)]
pub struct SourceArchive {
    pub origin: PathBuf,
    /// Free-form build label, e.g. "upstream" or "rebuild".
    pub label: String,
    pub units: BTreeMap<String, SourceUnit>,
    pub warnings: Vec<String>,
}

/// Archive loading failure.
#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("corrupt archive {path}: {reason}")]
    Archive { path: PathBuf, reason: String },
}

/// Loads every `.java` entry from a zip archive or a directory tree.
/// Bytes are decoded as UTF-8 with lossy replacement; a warning is
/// recorded per affected unit.
pub fn load_archive(origin: &Path, label: &str) -> Result<SourceArchive, LoadError> {
    let meta = std::fs::metadata(origin).map_err(|e| LoadError::Io {
        path: origin.to_path_buf(),
        source: e,
    })?;
    if meta.is_dir() {
        load_directory(origin, label, &[])
    } else {
        load_zip(origin, label)
    }
}

/// Directory variant with exclusion globs matched against relative paths
/// (used by repository tracing to skip VCS metadata and build output).
pub fn load_directory(
    root: &Path,
    label: &str,
    exclude: &[globset::GlobMatcher],
) -> Result<SourceArchive, LoadError> {
    let mut units = BTreeMap::new();
    let mut warnings = Vec::new();

    let mut paths: Vec<PathBuf> = Vec::new();
    for entry in WalkDir::new(root).follow_links(false) {
        let entry = entry.map_err(|e| LoadError::Io {
            path: root.to_path_buf(),
            source: e.into(),
        })?;
        if entry.file_type().is_file() {
            paths.push(entry.path().to_path_buf());
        }
    }
    paths.sort();

    for path in paths {
        let rel = path
            .strip_prefix(root)
            .unwrap_or(&path)
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        if !rel.ends_with(".java") {
            continue;
        }
        if exclude.iter().any(|g| g.is_match(&rel)) {
            continue;
        }
        let bytes = std::fs::read(&path).map_err(|e| LoadError::Io {
            path: path.clone(),
            source: e,
        })?;
        insert_unit(&mut units, &mut warnings, rel, &bytes);
    }

    Ok(SourceArchive {
        origin: root.to_path_buf(),
        label: label.to_string(),
        units,
        warnings,
    })
}

fn load_zip(origin: &Path, label: &str) -> Result<SourceArchive, LoadError> {
    let file = File::open(origin).map_err(|e| LoadError::Io {
        path: origin.to_path_buf(),
        source: e,
    })?;
    let mut archive = zip::ZipArchive::new(file).map_err(|e| LoadError::Archive {
        path: origin.to_path_buf(),
        reason: e.to_string(),
    })?;

    let mut units = BTreeMap::new();
    let mut warnings = Vec::new();
    for i in 0..archive.len() {
        let mut entry = archive.by_index(i).map_err(|e| LoadError::Archive {
            path: origin.to_path_buf(),
            reason: e.to_string(),
        })?;
        if entry.is_dir() || !entry.name().ends_with(".java") {
            continue;
        }
        let name = entry.name().trim_start_matches('/').to_string();
        let mut bytes = Vec::with_capacity(entry.size() as usize);
        entry
            .read_to_end(&mut bytes)
            .map_err(|e| LoadError::Archive {
                path: origin.to_path_buf(),
                reason: format!("entry {name}: {e}"),
            })?;
        if units.contains_key(&name) {
            warnings.push(format!("duplicate zip entry {name}: later entry wins"));
        }
        insert_unit(&mut units, &mut warnings, name, &bytes);
    }

    Ok(SourceArchive {
        origin: origin.to_path_buf(),
        label: label.to_string(),
        units,
        warnings,
    })
}

fn insert_unit(
    units: &mut BTreeMap<String, SourceUnit>,
    warnings: &mut Vec<String>,
    path: String,
    bytes: &[u8],
) {
    let text = String::from_utf8_lossy(bytes);
    if text.contains('\u{FFFD}') && std::str::from_utf8(bytes).is_err() {
        warnings.push(format!("{path}: invalid UTF-8, decoded lossily"));
    }
    let unit = SourceUnit::analyze(path.clone(), text.into_owned());
    units.insert(path, unit);
}

/// One declaration site of a qualified name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassDecl {
    pub path: String,
    pub template: bool,
}

/// Index of top-level qualified names over an archive's Valid and
/// Template units.
#[derive(Debug, Clone, Default)]
pub struct ClassIndex {
    pub entries: BTreeMap<QualifiedName, Vec<ClassDecl>>,
    pub warnings: Vec<String>,
}

impl ClassIndex {
    pub fn names(&self) -> impl Iterator<Item = &QualifiedName> {
        self.entries.keys()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Builds the qualified-name index for an archive. Units that are
/// LexInvalid or StructInvalid contribute nothing; duplicate declarations
/// are kept with a warning.
pub fn class_index(archive: &SourceArchive) -> ClassIndex {
    let mut index = ClassIndex::default();
    for unit in archive.units.values() {
        if !matches!(unit.validity, Validity::Valid | Validity::Template) {
            continue;
        }
        for qn in unit.qualified_names() {
            let decls = index.entries.entry(qn.clone()).or_default();
            if !decls.is_empty() {
                index.warnings.push(format!(
                    "DuplicateName: {qn} declared in {} and {}",
                    decls[0].path, unit.path
                ));
            }
            decls.push(ClassDecl {
                path: unit.path.clone(),
                template: unit.validity == Validity::Template,
            });
        }
    }
    index
}
