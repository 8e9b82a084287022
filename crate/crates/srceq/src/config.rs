//! Tunable heuristics for cause detection. Defaults cover the common
//! generators (metadata fields, annotation processors, istack, protobuf,
//! antlr, groovy stubs); a plain key=value file can override them without
//! code changes.

use std::path::Path;

use thiserror::Error;

/// Detection heuristics: lexicon terms, banner strings, and thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicsConfig {
    /// Substrings (matched case-insensitively) of identifiers that name
    /// build/project metadata fields.
    pub meta_lexicon: Vec<String>,
    /// Banner substrings marking protobuf-generated files.
    pub proto_banners: Vec<String>,
    /// Dotted-name markers of the protobuf runtime surface.
    pub proto_markers: Vec<String>,
    /// Banner substrings marking parser-generator output.
    pub antlr_banners: Vec<String>,
    /// Simple names of annotations that mark generated code.
    pub generated_annotations: Vec<String>,
    /// Top-level class names produced by the istack resource generator.
    pub istack_classes: Vec<String>,
    /// Labels below this confidence are dropped from verdicts.
    pub min_confidence: f64,
}

impl Default for HeuristicsConfig {
    fn default() -> Self {
        HeuristicsConfig {
            meta_lexicon: [
                "VERSION",
                "REVISION",
                "BUILD",
                "TIMESTAMP",
                "COMMIT",
                "GIT",
                "ID",
                "HASH",
                "DATE",
                "BRANCH",
                "URL",
                "USER",
            ]
            .map(String::from)
            .to_vec(),
            proto_banners: vec!["Generated by the protocol buffer compiler".to_string()],
            proto_markers: vec!["com.google.protobuf".to_string()],
            antlr_banners: vec!["$ANTLR".to_string(), "Generated from".to_string()],
            generated_annotations: vec!["Generated".to_string()],
            istack_classes: vec!["LocalizationMessages".to_string()],
            min_confidence: 0.0,
        }
    }
}

/// Config file problem.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

impl HeuristicsConfig {
    /// Loads overrides from a key=value file. Unknown keys are rejected.
    ///
    /// Recognized keys: `meta_lexicon` (comma-separated, replaces the
    /// default list), `proto_banner`, `proto_marker`, `antlr_banner`,
    /// `generated_annotation`, `istack_class` (each repeatable; first
    /// occurrence replaces the defaults), and `min_confidence`.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut config = HeuristicsConfig::default();
        let mut replaced: Vec<&str> = Vec::new();
        let push =
            |list: &mut Vec<String>, key: &'static str, value: &str, replaced: &mut Vec<&str>| {
                if !replaced.contains(&key) {
                    list.clear();
                    replaced.push(key);
                }
                list.push(value.to_string());
            };

        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Parse {
                    line: idx + 1,
                    reason: format!("expected key = value, got {line:?}"),
                });
            };
            let key = key.trim();
            let value = value.trim();
            match key {
                "meta_lexicon" => {
                    config.meta_lexicon = value
                        .split(',')
                        .map(|s| s.trim().to_uppercase())
                        .filter(|s| !s.is_empty())
                        .collect();
                }
                "proto_banner" => push(
                    &mut config.proto_banners,
                    "proto_banner",
                    value,
                    &mut replaced,
                ),
                "proto_marker" => push(
                    &mut config.proto_markers,
                    "proto_marker",
                    value,
                    &mut replaced,
                ),
                "antlr_banner" => push(
                    &mut config.antlr_banners,
                    "antlr_banner",
                    value,
                    &mut replaced,
                ),
                "generated_annotation" => push(
                    &mut config.generated_annotations,
                    "generated_annotation",
                    value,
                    &mut replaced,
                ),
                "istack_class" => push(
                    &mut config.istack_classes,
                    "istack_class",
                    value,
                    &mut replaced,
                ),
                "min_confidence" => {
                    config.min_confidence = value.parse().map_err(|_| ConfigError::Parse {
                        line: idx + 1,
                        reason: format!("min_confidence must be a number, got {value:?}"),
                    })?;
                }
                other => {
                    return Err(ConfigError::Parse {
                        line: idx + 1,
                        reason: format!("unknown key {other:?}"),
                    });
                }
            }
        }
        Ok(config)
    }
}
