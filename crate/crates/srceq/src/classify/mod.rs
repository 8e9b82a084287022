//! Cause classification for non-equivalent file pairs. Detection rules run
//! in a fixed order over the diff hunks of a pair, each explaining the
//! hunks it recognizes; a label's confidence is the fraction of hunks its
//! rule explains. Files no rule can explain fall back to the
//! inconsistent-commit hypothesis (strengthened by repository evidence
//! when a trace is available) or to Unknown.

mod detectors;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::HeuristicsConfig;
use crate::equivalence::{ArchiveVerdict, PairStatus, PairVerdict};
use crate::source::{SourceArchive, SourceUnit};
use crate::trace::{TraceResult, TraceStatus};

pub use detectors::{
    detect_antlr, detect_generated_annotation, detect_groovy, detect_istack, detect_meta,
    detect_proto, detect_shading, Detection, PairContext,
};

/// The build-cause taxonomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CauseLabel {
    #[serde(rename = "codegen/meta")]
    CodegenMeta,
    #[serde(rename = "codegen/@generated")]
    CodegenGeneratedAnnotation,
    #[serde(rename = "codegen/istack")]
    CodegenIstack,
    #[serde(rename = "codegen/proto")]
    CodegenProto,
    #[serde(rename = "codegen/antlr")]
    CodegenAntlr,
    #[serde(rename = "codegen/groovy")]
    CodegenGroovy,
    #[serde(rename = "shading")]
    Shading,
    #[serde(rename = "inconsistentcommit")]
    InconsistentCommit,
    #[serde(rename = "unknown")]
    Unknown,
}

impl std::fmt::Display for CauseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CauseLabel::CodegenMeta => "codegen/meta",
            CauseLabel::CodegenGeneratedAnnotation => "codegen/@generated",
            CauseLabel::CodegenIstack => "codegen/istack",
            CauseLabel::CodegenProto => "codegen/proto",
            CauseLabel::CodegenAntlr => "codegen/antlr",
            CauseLabel::CodegenGroovy => "codegen/groovy",
            CauseLabel::Shading => "shading",
            CauseLabel::InconsistentCommit => "inconsistentcommit",
            CauseLabel::Unknown => "unknown",
        };
        f.write_str(s)
    }
}

/// Which source a snippet was taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

/// An exact snippet of one of the two sources, with the position of its
/// first token.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub side: Side,
    pub snippet: String,
    pub line: u32,
    pub col: u32,
}

/// One ranked label with its supporting evidence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabelEvidence {
    pub label: CauseLabel,
    pub confidence: f64,
    pub evidence: Vec<Evidence>,
}

/// Consistent package-prefix rewrite recovered from a shaded pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShadingMap {
    /// (from_prefix, to_prefix) dotted-name pairs, sorted by from_prefix.
    pub prefix_pairs: Vec<(String, String)>,
}

impl ShadingMap {
    /// Rewrites a dotted name's segments using the longest matching
    /// from-prefix; returns None when no pair applies.
    pub fn apply(&self, segments: &[String]) -> Option<Vec<String>> {
        let mut best: Option<(usize, &str)> = None;
        for (from, to) in &self.prefix_pairs {
            let from_segs: Vec<&str> = from.split('.').collect();
            if from_segs.len() <= segments.len()
                && from_segs
                    .iter()
                    .zip(segments.iter())
                    .all(|(f, s)| *f == s.as_str())
                && best.is_none_or(|(n, _)| from_segs.len() > n)
            {
                best = Some((from_segs.len(), to));
            }
        }
        let (n, to) = best?;
        let mut out: Vec<String> = to.split('.').map(String::from).collect();
        out.extend(segments[n..].iter().cloned());
        Some(out)
    }
}

/// Classification of one non-equivalent pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CauseVerdict {
    pub path: String,
    /// Ranked labels, confidences non-increasing; Unknown appears alone.
    pub labels: Vec<LabelEvidence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shading_map: Option<ShadingMap>,
}

impl CauseVerdict {
    pub fn has_label(&self, label: CauseLabel) -> bool {
        self.labels.iter().any(|l| l.label == label)
    }

    pub fn confidence_of(&self, label: CauseLabel) -> Option<f64> {
        self.labels
            .iter()
            .find(|l| l.label == label)
            .map(|l| l.confidence)
    }
}

/// Classifies one non-equivalent pair. Detection rules run in a fixed
/// order on the raw units (banners live in comments); every rule that
/// explains at least one hunk contributes a label.
pub fn classify_pair(
    verdict: &PairVerdict,
    ua: &SourceUnit,
    ub: &SourceUnit,
    repo_hint: Option<&TraceResult>,
    config: &HeuristicsConfig,
) -> CauseVerdict {
    debug_assert_eq!(verdict.status, PairStatus::NonEquivalent);
    let ctx = PairContext::new(verdict, ua, ub, config);
    let total = verdict.diff_hunks.len().max(1) as f64;

    type Rule = (CauseLabel, fn(&PairContext) -> Detection);
    let rules: [Rule; 7] = [
        (
            CauseLabel::CodegenGeneratedAnnotation,
            detect_generated_annotation,
        ),
        (CauseLabel::CodegenMeta, detect_meta),
        (CauseLabel::CodegenIstack, detect_istack),
        (CauseLabel::CodegenProto, detect_proto),
        (CauseLabel::CodegenAntlr, detect_antlr),
        (CauseLabel::CodegenGroovy, detect_groovy),
        (CauseLabel::Shading, detect_shading),
    ];

    let mut labels: Vec<LabelEvidence> = Vec::new();
    let mut shading_map = None;
    let mut any_evidence = false;
    for (label, rule) in rules {
        let detection = rule(&ctx);
        if detection.explained.is_empty() {
            continue;
        }
        any_evidence = true;
        let confidence = detection.explained.len() as f64 / total;
        if confidence < config.min_confidence {
            continue;
        }
        if label == CauseLabel::Shading {
            shading_map = detection.shading_map.clone();
        }
        labels.push(LabelEvidence {
            label,
            confidence,
            evidence: detection.evidence,
        });
    }

    // Stable by detector order on ties, descending confidence otherwise.
    labels.sort_by(|x, y| y.confidence.partial_cmp(&x.confidence).unwrap());

    if labels.is_empty() {
        labels.push(residual_label(verdict, ua, repo_hint, any_evidence));
    }

    CauseVerdict {
        path: verdict.path.clone(),
        labels,
        shading_map,
    }
}

/// Residual verdict when no rule explains any hunk: with repository
/// evidence that the file exists at different content, the builds likely
/// used different commits; without a trace that stays a hypothesis at
/// half confidence; otherwise Unknown.
fn residual_label(
    verdict: &PairVerdict,
    ua: &SourceUnit,
    repo_hint: Option<&TraceResult>,
    any_evidence: bool,
) -> LabelEvidence {
    let first_hunk_evidence = || {
        verdict
            .diff_hunks
            .first()
            .map(|h| {
                let mut ev = Vec::new();
                if let Some(e) = detectors::hunk_evidence_side(ua, &h.a_tokens, Side::A) {
                    ev.push(e);
                }
                ev
            })
            .unwrap_or_default()
    };

    if any_evidence {
        // Rules matched but everything fell under the confidence floor.
        return LabelEvidence {
            label: CauseLabel::Unknown,
            confidence: 0.0,
            evidence: Vec::new(),
        };
    }
    match repo_hint {
        Some(trace) => {
            let differs = ua
                .qualified_names()
                .iter()
                .any(|qn| trace.per_class.get(qn) == Some(&TraceStatus::RepoBackedDiffers));
            if differs {
                LabelEvidence {
                    label: CauseLabel::InconsistentCommit,
                    confidence: 1.0,
                    evidence: first_hunk_evidence(),
                }
            } else {
                LabelEvidence {
                    label: CauseLabel::Unknown,
                    confidence: 0.0,
                    evidence: Vec::new(),
                }
            }
        }
        None => LabelEvidence {
            label: CauseLabel::InconsistentCommit,
            confidence: 0.5,
            evidence: first_hunk_evidence(),
        },
    }
}

/// Per-archive classification: verdicts for every non-equivalent pair and
/// a label-to-file-count summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArchiveCauseReport {
    pub verdicts: Vec<CauseVerdict>,
    pub summary: BTreeMap<CauseLabel, usize>,
}

/// Classifies every non-equivalent pair of an archive comparison.
pub fn classify_archive(
    av: &ArchiveVerdict,
    a: &SourceArchive,
    b: &SourceArchive,
    trace: Option<&TraceResult>,
    config: &HeuristicsConfig,
) -> ArchiveCauseReport {
    let mut verdicts = Vec::new();
    let mut summary: BTreeMap<CauseLabel, usize> = BTreeMap::new();

    for pair in av.non_equivalent_paths() {
        // Relocated pairs exist under the a-side path.
        let Some(ua) = a.units.get(&pair.path) else {
            continue;
        };
        let ub = match b.units.get(&pair.path) {
            Some(u) => u,
            None => match find_by_names(b, ua) {
                Some(u) => u,
                None => continue,
            },
        };
        let verdict = classify_pair(pair, ua, ub, trace, config);
        for l in &verdict.labels {
            *summary.entry(l.label).or_default() += 1;
        }
        verdicts.push(verdict);
    }

    ArchiveCauseReport { verdicts, summary }
}

fn find_by_names<'a>(archive: &'a SourceArchive, like: &SourceUnit) -> Option<&'a SourceUnit> {
    let names = like.qualified_names();
    if names.is_empty() {
        return None;
    }
    archive
        .units
        .values()
        .find(|u| u.qualified_names() == names)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::compare_pair;
    use crate::source::SourceUnit;

    fn classify(a_text: &str, b_text: &str) -> CauseVerdict {
        let ua = SourceUnit::analyze("T.java", a_text);
        let ub = SourceUnit::analyze("T.java", b_text);
        let pv = compare_pair(&ua, &ub);
        assert_eq!(pv.status, PairStatus::NonEquivalent, "fixture must differ");
        classify_pair(&pv, &ua, &ub, None, &HeuristicsConfig::default())
    }

    #[test]
    fn version_field_change_is_meta() {
        let v = classify(
            "class Version { public static final String ID = \"1.0-abc\"; }",
            "class Version { public static final String ID = \"1.0-xyz\"; }",
        );
        assert!(v.has_label(CauseLabel::CodegenMeta));
        assert_eq!(v.confidence_of(CauseLabel::CodegenMeta), Some(1.0));
    }

    #[test]
    fn unexplained_diff_without_trace_is_commit_hypothesis() {
        let v = classify(
            "class Logic { int compute() { return 1; } }",
            "class Logic { int compute() { return grow(); } int grow() { return 2; } }",
        );
        assert_eq!(v.labels.len(), 1);
        assert_eq!(v.labels[0].label, CauseLabel::InconsistentCommit);
        assert_eq!(v.labels[0].confidence, 0.5);
    }

    #[test]
    fn confidences_are_non_increasing_and_unknown_alone() {
        let v = classify(
            "class Logic { void f() { alpha(); } }",
            "class Logic { void f() { beta(); } }",
        );
        for w in v.labels.windows(2) {
            assert!(w[0].confidence >= w[1].confidence);
        }
        if v.has_label(CauseLabel::Unknown) {
            assert_eq!(v.labels.len(), 1);
        }
    }

    #[test]
    fn evidence_snippets_are_exact_substrings() {
        let a = "class Version { public static final String ID = \"1.0-abc\"; }";
        let b = "class Version { public static final String ID = \"1.0-xyz\"; }";
        let v = classify(a, b);
        for label in &v.labels {
            for e in &label.evidence {
                let source = match e.side {
                    Side::A => a,
                    Side::B => b,
                };
                assert!(
                    source.contains(&e.snippet),
                    "snippet {:?} not in source {:?}",
                    e.snippet,
                    e.side
                );
            }
        }
    }

    #[test]
    fn classification_is_deterministic() {
        let run = || {
            let v = classify(
                "class V { static final String BUILD = \"a\"; static final String HASH = \"h1\"; }",
                "class V { static final String BUILD = \"b\"; static final String HASH = \"h2\"; }",
            );
            format!("{v:?}")
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn shading_map_applies_longest_prefix() {
        let map = ShadingMap {
            prefix_pairs: vec![
                ("a.b".to_string(), "x".to_string()),
                ("a.b.c".to_string(), "y.z".to_string()),
            ],
        };
        let segs: Vec<String> = ["a", "b", "c", "D"].map(String::from).to_vec();
        assert_eq!(
            map.apply(&segs),
            Some(["y", "z", "D"].map(String::from).to_vec())
        );
        let segs2: Vec<String> = ["a", "b", "E"].map(String::from).to_vec();
        assert_eq!(
            map.apply(&segs2),
            Some(["x", "E"].map(String::from).to_vec())
        );
        let other: Vec<String> = ["q", "R"].map(String::from).to_vec();
        assert_eq!(map.apply(&other), None);
    }

    #[test]
    fn archive_classification_follows_relocated_pairs() {
        use crate::equivalence::compare_archives;
        use crate::source::SourceArchive;
        use std::collections::BTreeMap;
        use std::path::PathBuf;

        let mk = |label: &str, path: &str, text: &str| {
            let mut units = BTreeMap::new();
            units.insert(path.to_string(), SourceUnit::analyze(path, text));
            SourceArchive {
                origin: PathBuf::from(format!("<{label}>")),
                label: label.to_string(),
                units,
                warnings: Vec::new(),
            }
        };
        let a = mk(
            "a",
            "p/V.java",
            "package p; class V { static final String ID = \"1-a\"; }",
        );
        let b = mk(
            "b",
            "src/main/java/p/V.java",
            "package p; class V { static final String ID = \"1-b\"; }",
        );
        let verdict = compare_archives(&a, &b);
        assert!(!verdict.equivalent);
        let report = classify_archive(&verdict, &a, &b, None, &HeuristicsConfig::default());
        assert_eq!(report.verdicts.len(), 1);
        assert!(report.verdicts[0].has_label(CauseLabel::CodegenMeta));
    }

    #[test]
    fn min_confidence_filters_labels() {
        let config = HeuristicsConfig {
            min_confidence: 0.9,
            ..HeuristicsConfig::default()
        };
        // Two hunks, only one meta-explained: confidence 0.5 < 0.9.
        let ua = SourceUnit::analyze(
            "T.java",
            "class T { static final String VERSION = \"1\"; void f() { alpha(); beta(); gamma(); delta(); } }",
        );
        let ub = SourceUnit::analyze(
            "T.java",
            "class T { static final String VERSION = \"2\"; void f() { alpha(); epsilon(); gamma(); zeta(); } }",
        );
        let pv = compare_pair(&ua, &ub);
        let v = classify_pair(&pv, &ua, &ub, None, &config);
        assert!(!v.has_label(CauseLabel::CodegenMeta));
        assert_eq!(v.labels[0].label, CauseLabel::Unknown);
    }
}
