//! Report assembly and serialization. JSON output is byte-deterministic
//! for identical inputs: struct-ordered keys, sorted collections, and no
//! timestamps unless explicitly stamped.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::classify::{ArchiveCauseReport, CauseLabel, CauseVerdict};
use crate::equivalence::{ArchiveVerdict, PairStatus, PairVerdict};
use crate::lexer::Token;
use crate::provenance::{FileOrigin, Manifest, VerificationReport};
use crate::trace::{TraceResult, TraceStatus};

const MAX_REPORTED_HUNKS: usize = 20;
const MAX_TOKENS_PER_SIDE: usize = 24;

/// One compared input.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportInput {
    pub origin: String,
    pub label: String,
}

/// A hunk rendered as joined token texts, truncated for readability.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HunkView {
    pub a: String,
    pub b: String,
}

/// Per-file comparison entry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairReport {
    pub path: String,
    pub status: PairStatus,
    pub hunk_count: usize,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub hunks: Vec<HunkView>,
}

/// Archive verdict in report form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArchiveVerdictReport {
    pub equivalent: bool,
    pub counts: BTreeMap<PairStatus, usize>,
    pub pairs: Vec<PairReport>,
}

/// Trace result with string keys, ready for JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceReport {
    pub repo_root: String,
    pub missing_count: usize,
    pub per_class: BTreeMap<String, TraceStatus>,
}

/// Provenance rollup.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProvenanceSummary {
    pub counts: BTreeMap<FileOrigin, usize>,
    pub generators: Vec<String>,
}

/// The machine-readable report emitted by every subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub tool_version: String,
    pub command: String,
    pub inputs: Vec<ReportInput>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub archive_verdict: Option<ArchiveVerdictReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cause_verdicts: Option<Vec<CauseVerdict>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cause_summary: Option<BTreeMap<CauseLabel, usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provenance: Option<ProvenanceSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check: Option<VerificationReport>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

impl Report {
    pub fn new(command: &str, inputs: Vec<ReportInput>) -> Report {
        Report {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            inputs,
            archive_verdict: None,
            cause_verdicts: None,
            cause_summary: None,
            trace: None,
            provenance: None,
            check: None,
            warnings: Vec::new(),
            timestamp: None,
        }
    }

    pub fn with_archive_verdict(mut self, verdict: &ArchiveVerdict) -> Report {
        self.archive_verdict = Some(render_archive_verdict(verdict));
        self
    }

    pub fn with_causes(mut self, causes: &ArchiveCauseReport) -> Report {
        self.cause_verdicts = Some(causes.verdicts.clone());
        self.cause_summary = Some(causes.summary.clone());
        self
    }

    pub fn with_trace(mut self, trace: &TraceResult) -> Report {
        self.warnings.extend(trace.warnings.iter().cloned());
        self.trace = Some(TraceReport {
            repo_root: trace.repo_root.clone(),
            missing_count: trace.missing_count,
            per_class: trace
                .per_class
                .iter()
                .map(|(qn, s)| (qn.to_string(), *s))
                .collect(),
        });
        self
    }

    pub fn with_provenance(mut self, manifest: &Manifest) -> Report {
        let mut counts: BTreeMap<FileOrigin, usize> = BTreeMap::new();
        let mut generators: Vec<String> = Vec::new();
        for r in &manifest.records {
            *counts.entry(r.status).or_default() += 1;
            if let Some(g) = &r.generator {
                let s = g.to_string();
                if !generators.contains(&s) {
                    generators.push(s);
                }
            }
        }
        generators.sort();
        self.provenance = Some(ProvenanceSummary { counts, generators });
        self
    }

    pub fn with_check(mut self, check: &VerificationReport) -> Report {
        self.check = Some(check.clone());
        self
    }

    pub fn stamped(mut self) -> Report {
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs().to_string())
            .unwrap_or_default();
        self.timestamp = Some(now);
        self
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Human-readable rendering: per-file statuses, diff digests, cause
    /// labels with evidence, trace statuses.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let p = |out: &mut String, line: &str| {
            out.push_str(line);
            out.push('\n');
        };
        p(
            &mut out,
            &format!("srceq {} (v{})", self.command, self.tool_version),
        );
        for input in &self.inputs {
            p(
                &mut out,
                &format!("  input [{}] {}", input.label, input.origin),
            );
        }

        if let Some(v) = &self.archive_verdict {
            p(&mut out, &format!("equivalent: {}", v.equivalent));
            let line = v
                .counts
                .iter()
                .map(|(s, n)| format!("{}={}", status_name(*s), n))
                .collect::<Vec<_>>()
                .join(" ");
            p(&mut out, &format!("  {line}"));
            for pair in &v.pairs {
                if pair.status == PairStatus::Identical {
                    continue;
                }
                p(
                    &mut out,
                    &format!("  {} {}", status_name(pair.status), pair.path),
                );
                for h in &pair.hunks {
                    p(&mut out, &format!("    - a: {}", h.a));
                    p(&mut out, &format!("      b: {}", h.b));
                }
            }
        }

        if let Some(causes) = &self.cause_verdicts {
            for c in causes {
                let labels = c
                    .labels
                    .iter()
                    .map(|l| format!("{} ({:.2})", l.label, l.confidence))
                    .collect::<Vec<_>>()
                    .join(", ");
                p(&mut out, &format!("cause {}: {}", c.path, labels));
                for l in &c.labels {
                    for e in l.evidence.iter().take(3) {
                        p(
                            &mut out,
                            &format!("    [{:?} {}:{}] {}", e.side, e.line, e.col, e.snippet),
                        );
                    }
                }
            }
        }
        if let Some(summary) = &self.cause_summary {
            let rendered = summary
                .iter()
                .map(|(l, n)| format!("{l}: {n}"))
                .collect::<Vec<_>>()
                .join(", ");
            p(&mut out, &format!("cause summary: {{{rendered}}}"));
        }

        if let Some(t) = &self.trace {
            p(
                &mut out,
                &format!(
                    "trace against {} (missing: {})",
                    t.repo_root, t.missing_count
                ),
            );
            for (name, status) in &t.per_class {
                p(&mut out, &format!("  {name}: {status:?}"));
            }
        }

        if let Some(pv) = &self.provenance {
            let counts = pv
                .counts
                .iter()
                .map(|(k, n)| format!("{k:?}: {n}"))
                .collect::<Vec<_>>()
                .join(", ");
            p(&mut out, &format!("provenance: {{{counts}}}"));
            for g in &pv.generators {
                p(&mut out, &format!("  generator {g}"));
            }
        }

        if let Some(check) = &self.check {
            p(&mut out, &format!("manifest check pass: {}", check.pass));
            for (path, status) in &check.per_file {
                if *status != crate::provenance::CheckStatus::Ok {
                    p(&mut out, &format!("  {path}: {status:?}"));
                }
            }
        }

        for w in &self.warnings {
            p(&mut out, &format!("warning: {w}"));
        }
        out
    }
}

fn status_name(s: PairStatus) -> &'static str {
    match s {
        PairStatus::Identical => "identical",
        PairStatus::EquivalentModuloFormat => "equivalent-modulo-format",
        PairStatus::NonEquivalent => "non-equivalent",
        PairStatus::OnlyInA => "only-in-a",
        PairStatus::OnlyInB => "only-in-b",
    }
}

fn render_archive_verdict(verdict: &ArchiveVerdict) -> ArchiveVerdictReport {
    ArchiveVerdictReport {
        equivalent: verdict.equivalent,
        counts: verdict.counts.clone(),
        pairs: verdict.pair_verdicts.iter().map(render_pair).collect(),
    }
}

fn render_pair(pair: &PairVerdict) -> PairReport {
    PairReport {
        path: pair.path.clone(),
        status: pair.status,
        hunk_count: pair.diff_hunks.len(),
        hunks: pair
            .diff_hunks
            .iter()
            .take(MAX_REPORTED_HUNKS)
            .map(|h| HunkView {
                a: join_tokens(&h.a_tokens),
                b: join_tokens(&h.b_tokens),
            })
            .collect(),
    }
}

fn join_tokens(tokens: &[Token]) -> String {
    let mut s = tokens
        .iter()
        .take(MAX_TOKENS_PER_SIDE)
        .map(|t| t.text.as_str())
        .collect::<Vec<_>>()
        .join(" ");
    if tokens.len() > MAX_TOKENS_PER_SIDE {
        s.push_str(" ...");
    }
    s
}
