//! Archive-level and file-level source equivalence: two sources are
//! equivalent when their comment-stripped token streams agree. Files are
//! paired by path, then by qualified name for relocated source roots, and
//! non-equivalent pairs carry token-level diff hunks for cause analysis.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::diff;
use crate::lexer::{normalized_equal, Token};
use crate::source::{SourceArchive, SourceUnit, Validity};

/// Comparison outcome for one path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PairStatus {
    /// Raw texts are byte-equal.
    Identical,
    /// Token streams agree but the texts differ (formatting, comments).
    EquivalentModuloFormat,
    NonEquivalent,
    OnlyInA,
    OnlyInB,
}

/// One diff hunk with materialized tokens from both sides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffHunk {
    pub a_range: (usize, usize),
    pub b_range: (usize, usize),
    pub a_tokens: Vec<Token>,
    pub b_tokens: Vec<Token>,
}

impl DiffHunk {
    pub fn is_insertion(&self) -> bool {
        self.a_tokens.is_empty()
    }

    pub fn is_deletion(&self) -> bool {
        self.b_tokens.is_empty()
    }
}

/// Verdict for one paired file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairVerdict {
    pub path: String,
    pub status: PairStatus,
    pub diff_hunks: Vec<DiffHunk>,
}

/// Verdict for a whole archive pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArchiveVerdict {
    pub equivalent: bool,
    pub pair_verdicts: Vec<PairVerdict>,
    /// Totals per status.
    pub counts: BTreeMap<PairStatus, usize>,
}

impl ArchiveVerdict {
    pub fn non_equivalent_paths(&self) -> impl Iterator<Item = &PairVerdict> {
        self.pair_verdicts
            .iter()
            .filter(|p| p.status == PairStatus::NonEquivalent)
    }
}

/// A pairing of units across two archives. `None` on one side means the
/// path exists only in the other archive.
#[derive(Debug, Clone)]
pub struct UnitPair<'a> {
    pub path: String,
    pub a: Option<&'a SourceUnit>,
    pub b: Option<&'a SourceUnit>,
}

/// Pairs units by path, then retries unmatched units by qualified-name
/// set (covers relocated source roots). Residual units become one-sided
/// pairs. Output is ordered by path.
pub fn pair_files<'a>(a: &'a SourceArchive, b: &'a SourceArchive) -> Vec<UnitPair<'a>> {
    let mut pairs = Vec::new();
    let mut unmatched_a: Vec<&SourceUnit> = Vec::new();
    let mut b_taken: BTreeMap<&str, bool> = b.units.keys().map(|k| (k.as_str(), false)).collect();

    for (path, ua) in &a.units {
        if let Some(ub) = b.units.get(path) {
            b_taken.insert(path, true);
            pairs.push(UnitPair {
                path: path.clone(),
                a: Some(ua),
                b: Some(ub),
            });
        } else {
            unmatched_a.push(ua);
        }
    }

    // Second pass: match leftover units whose declared qualified names
    // coincide exactly, provided the match is unambiguous.
    let mut by_names: BTreeMap<Vec<String>, Vec<&SourceUnit>> = BTreeMap::new();
    for (path, ub) in &b.units {
        if b_taken[path.as_str()] {
            continue;
        }
        let names: Vec<String> = ub.qualified_names().iter().map(|q| q.to_string()).collect();
        if !names.is_empty() {
            by_names.entry(names).or_default().push(ub);
        }
    }
    for ua in unmatched_a {
        let names: Vec<String> = ua.qualified_names().iter().map(|q| q.to_string()).collect();
        let matched = if names.is_empty() {
            None
        } else {
            match by_names.get(&names) {
                Some(candidates)
                    if candidates.len() == 1 && !b_taken[candidates[0].path.as_str()] =>
                {
                    Some(candidates[0])
                }
                _ => None,
            }
        };
        match matched {
            Some(ub) => {
                b_taken.insert(ub.path.as_str(), true);
                pairs.push(UnitPair {
                    path: ua.path.clone(),
                    a: Some(ua),
                    b: Some(ub),
                });
            }
            None => pairs.push(UnitPair {
                path: ua.path.clone(),
                a: Some(ua),
                b: None,
            }),
        }
    }

    for (path, taken) in b_taken {
        if !taken {
            pairs.push(UnitPair {
                path: path.to_string(),
                a: None,
                b: Some(&b.units[path]),
            });
        }
    }

    pairs.sort_by(|x, y| x.path.cmp(&y.path));
    pairs
}

/// Compares one pair of units. Units that failed to lex compare by raw
/// text only; a non-equal such pair gets a single whole-file hunk with no
/// token detail.
pub fn compare_pair(ua: &SourceUnit, ub: &SourceUnit) -> PairVerdict {
    let path = ua.path.clone();
    if ua.text == ub.text {
        return PairVerdict {
            path,
            status: PairStatus::Identical,
            diff_hunks: Vec::new(),
        };
    }
    if ua.validity == Validity::LexInvalid || ub.validity == Validity::LexInvalid {
        return PairVerdict {
            path,
            status: PairStatus::NonEquivalent,
            diff_hunks: vec![DiffHunk {
                a_range: (0, ua.stream.len()),
                b_range: (0, ub.stream.len()),
                a_tokens: Vec::new(),
                b_tokens: Vec::new(),
            }],
        };
    }
    if normalized_equal(&ua.stream, &ub.stream) {
        return PairVerdict {
            path,
            status: PairStatus::EquivalentModuloFormat,
            diff_hunks: Vec::new(),
        };
    }

    let hunks = diff::diff_hunks(&ua.stream.tokens, &ub.stream.tokens)
        .into_iter()
        .map(|h| DiffHunk {
            a_range: h.a_range,
            b_range: h.b_range,
            a_tokens: ua.stream.tokens[h.a_range.0..h.a_range.1].to_vec(),
            b_tokens: ub.stream.tokens[h.b_range.0..h.b_range.1].to_vec(),
        })
        .collect();
    PairVerdict {
        path,
        status: PairStatus::NonEquivalent,
        diff_hunks: hunks,
    }
}

/// Compares two archives file by file.
pub fn compare_archives(a: &SourceArchive, b: &SourceArchive) -> ArchiveVerdict {
    let mut pair_verdicts = Vec::new();
    for pair in pair_files(a, b) {
        let verdict = match (pair.a, pair.b) {
            (Some(ua), Some(ub)) => compare_pair(ua, ub),
            (Some(_), None) => PairVerdict {
                path: pair.path,
                status: PairStatus::OnlyInA,
                diff_hunks: Vec::new(),
            },
            (None, Some(_)) => PairVerdict {
                path: pair.path,
                status: PairStatus::OnlyInB,
                diff_hunks: Vec::new(),
            },
            (None, None) => unreachable!("pairing never yields an empty pair"),
        };
        pair_verdicts.push(verdict);
    }

    let mut counts: BTreeMap<PairStatus, usize> = BTreeMap::new();
    for v in &pair_verdicts {
        *counts.entry(v.status).or_default() += 1;
    }
    let equivalent = pair_verdicts.iter().all(|v| {
        matches!(
            v.status,
            PairStatus::Identical | PairStatus::EquivalentModuloFormat
        )
    });

    ArchiveVerdict {
        equivalent,
        pair_verdicts,
        counts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::SourceUnit;
    use std::collections::BTreeMap;
    use std::path::PathBuf;

    fn unit(path: &str, text: &str) -> SourceUnit {
        SourceUnit::analyze(path, text)
    }

    fn archive(label: &str, files: &[(&str, &str)]) -> SourceArchive {
        let mut units = BTreeMap::new();
        for (path, text) in files {
            units.insert(path.to_string(), unit(path, text));
        }
        SourceArchive {
            origin: PathBuf::from(format!("<{label}>")),
            label: label.to_string(),
            units,
            warnings: Vec::new(),
        }
    }

    #[test]
    fn identical_text_is_identical() {
        let a = unit("A.java", "class A {}");
        let b = unit("A.java", "class A {}");
        assert_eq!(compare_pair(&a, &b).status, PairStatus::Identical);
    }

    #[test]
    fn reformatted_with_license_header_is_equivalent() {
        let a = unit("A.java", "package p;\nclass A { int x = 1; }\n");
        let b = unit(
            "A.java",
            "/* Licensed under the Apache License, Version 2.0. */\npackage p;\nclass A {\n    int x = 1;\n}\n",
        );
        let v = compare_pair(&a, &b);
        assert_eq!(v.status, PairStatus::EquivalentModuloFormat);
        assert!(v.diff_hunks.is_empty());
    }

    #[test]
    fn version_field_diff_is_one_literal_hunk() {
        // A metadata field whose generated value differs across builds.
        let a = unit(
            "Version.java",
            "package io.netty.util;\npublic final class Version {\n  public static final String ID = \"3.10.6.Final-5ab1f5b\";\n}\n",
        );
        let b = unit(
            "Version.java",
            "package io.netty.util;\npublic final class Version {\n  public static final String ID = \"3.10.6.Final-9ec37ae\";\n}\n",
        );
        let v = compare_pair(&a, &b);
        assert_eq!(v.status, PairStatus::NonEquivalent);
        assert_eq!(v.diff_hunks.len(), 1);
        let h = &v.diff_hunks[0];
        assert_eq!(h.a_tokens.len(), 1);
        assert_eq!(h.b_tokens.len(), 1);
        assert_eq!(h.a_tokens[0].text, "\"3.10.6.Final-5ab1f5b\"");
        assert_eq!(h.b_tokens[0].text, "\"3.10.6.Final-9ec37ae\"");
    }

    #[test]
    fn lex_invalid_pairs_compare_by_raw_text() {
        let a = unit("A.java", "class A { String s = \"x; }");
        let b = unit("A.java", "class A { String s = \"y; }");
        let v = compare_pair(&a, &b);
        assert_eq!(v.status, PairStatus::NonEquivalent);
        assert_eq!(v.diff_hunks.len(), 1);
        assert!(v.diff_hunks[0].a_tokens.is_empty());

        let c = unit("A.java", "class A { String s = \"x; }");
        assert_eq!(compare_pair(&a, &c).status, PairStatus::Identical);
    }

    #[test]
    fn pairing_by_path_and_one_sided_files() {
        let a = archive(
            "a",
            &[
                ("p/Foo.java", "package p; class Foo {}"),
                ("p/Old.java", "package p; class Old {}"),
            ],
        );
        let b = archive(
            "b",
            &[
                ("p/Foo.java", "package p; class Foo {}"),
                ("p/New.java", "package p; class New {}"),
            ],
        );
        let verdict = compare_archives(&a, &b);
        assert!(!verdict.equivalent);
        assert_eq!(verdict.counts[&PairStatus::Identical], 1);
        assert_eq!(verdict.counts[&PairStatus::OnlyInA], 1);
        assert_eq!(verdict.counts[&PairStatus::OnlyInB], 1);
    }

    #[test]
    fn relocated_root_pairs_by_qualified_name() {
        let a = archive("a", &[("a/Foo.java", "package a; class Foo { int x; }")]);
        let b = archive(
            "b",
            &[("src/a/Foo.java", "package a; class Foo { int x; }")],
        );
        let pairs = pair_files(&a, &b);
        assert_eq!(pairs.len(), 1);
        assert!(pairs[0].a.is_some() && pairs[0].b.is_some());
        let verdict = compare_archives(&a, &b);
        assert!(verdict.equivalent);
    }

    #[test]
    fn ambiguous_name_matches_stay_unpaired() {
        let a = archive("a", &[("x/Foo.java", "package p; class Foo {}")]);
        let b = archive(
            "b",
            &[
                ("y/Foo.java", "package p; class Foo {}"),
                ("z/Foo.java", "package p; class Foo {}"),
            ],
        );
        let verdict = compare_archives(&a, &b);
        assert_eq!(verdict.counts[&PairStatus::OnlyInA], 1);
        assert_eq!(verdict.counts[&PairStatus::OnlyInB], 2);
    }

    #[test]
    fn empty_archives_are_equivalent() {
        let a = archive("a", &[]);
        let b = archive("b", &[]);
        let v = compare_archives(&a, &b);
        assert!(v.equivalent);
        assert!(v.pair_verdicts.is_empty());
    }

    #[test]
    fn whitespace_only_differences_are_equivalent() {
        let a = archive(
            "a",
            &[
                ("A.java", "class A{int x;}"),
                ("B.java", "class B { void f ( ) { } }"),
            ],
        );
        let b = archive(
            "b",
            &[
                ("A.java", "class A {\n  int x;\n}"),
                ("B.java", "class B{void f(){}}"),
            ],
        );
        let v = compare_archives(&a, &b);
        assert!(v.equivalent);
        assert_eq!(v.counts[&PairStatus::EquivalentModuloFormat], 2);
    }

    #[test]
    fn annotation_vs_comment_breaks_equivalence() {
        // One build marks generated code with an annotation, the other
        // only with a comment; stripped streams differ.
        let a = archive(
            "a",
            &[(
                "G.java",
                "package p;\n// Generated by com.example.Proc\nfinal class G {}\n",
            )],
        );
        let b = archive(
            "b",
            &[(
                "G.java",
                "package p;\n@Generated(\"com.example.Proc\")\nfinal class G {}\n",
            )],
        );
        let v = compare_archives(&a, &b);
        assert!(!v.equivalent);
        assert_eq!(v.counts[&PairStatus::NonEquivalent], 1);
    }

    #[test]
    fn compare_is_reflexive_and_symmetric() {
        let a = archive(
            "a",
            &[
                ("A.java", "class A { int x = 1; }"),
                ("B.java", "class B {}"),
            ],
        );
        let b = archive(
            "b",
            &[
                ("A.java", "class A { int x = 2; }"),
                ("C.java", "class C {}"),
            ],
        );

        let self_verdict = compare_archives(&a, &a);
        assert!(self_verdict.equivalent);
        assert!(self_verdict
            .pair_verdicts
            .iter()
            .all(|p| p.status == PairStatus::Identical));

        let ab = compare_archives(&a, &b);
        let ba = compare_archives(&b, &a);
        assert_eq!(ab.equivalent, ba.equivalent);
        assert_eq!(
            ab.counts.get(&PairStatus::OnlyInA),
            ba.counts.get(&PairStatus::OnlyInB)
        );
    }

    #[test]
    fn equivalence_implies_identical_class_index() {
        let a = archive("a", &[("p/Foo.java", "package p; class Foo{int x;}")]);
        let b = archive(
            "b",
            &[("p/Foo.java", "package p;\nclass Foo {\n int x;\n}")],
        );
        assert!(compare_archives(&a, &b).equivalent);
        let ia: Vec<_> = crate::source::class_index(&a).names().cloned().collect();
        let ib: Vec<_> = crate::source::class_index(&b).names().cloned().collect();
        assert_eq!(ia, ib);
    }
}
