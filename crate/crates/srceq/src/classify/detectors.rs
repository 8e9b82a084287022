//! The detection rules behind the cause taxonomy. Each rule inspects the
//! diff hunks of one pair and reports which hunks it explains, with exact
//! source snippets as evidence. Rules run on raw units: generator banners
//! live in comments, which equivalence strips but detection must see.

use std::collections::BTreeMap;

use super::{Evidence, ShadingMap, Side};
use crate::config::HeuristicsConfig;
use crate::diff;
use crate::equivalence::{DiffHunk, PairVerdict};
use crate::lexer::{Token, TokenKind};
use crate::source::SourceUnit;

const MAX_EVIDENCE: usize = 8;
const SNIPPET_CAP: usize = 160;
const PROTO_CONTEXT: usize = 10;

/// Inputs shared by all detectors.
pub struct PairContext<'a> {
    pub verdict: &'a PairVerdict,
    pub ua: &'a SourceUnit,
    pub ub: &'a SourceUnit,
    pub config: &'a HeuristicsConfig,
}

impl<'a> PairContext<'a> {
    pub fn new(
        verdict: &'a PairVerdict,
        ua: &'a SourceUnit,
        ub: &'a SourceUnit,
        config: &'a HeuristicsConfig,
    ) -> Self {
        PairContext {
            verdict,
            ua,
            ub,
            config,
        }
    }

    fn hunks(&self) -> &[DiffHunk] {
        &self.verdict.diff_hunks
    }
}

/// What one rule found: explained hunk indices plus evidence.
#[derive(Debug, Default, Clone)]
pub struct Detection {
    pub explained: Vec<usize>,
    pub evidence: Vec<Evidence>,
    pub shading_map: Option<ShadingMap>,
}

impl Detection {
    fn explain(&mut self, idx: usize) {
        self.explained.push(idx);
    }

    fn add_evidence(&mut self, ev: Option<Evidence>) {
        if let Some(ev) = ev {
            if self.evidence.len() < MAX_EVIDENCE {
                self.evidence.push(ev);
            }
        }
    }
}

/// Snippet spanning a run of tokens in one unit's source.
pub(crate) fn hunk_evidence_side(
    unit: &SourceUnit,
    tokens: &[Token],
    side: Side,
) -> Option<Evidence> {
    let first = tokens.first()?;
    let last = tokens.last()?;
    Some(make_evidence(
        unit,
        first.offset,
        last.end,
        first.line,
        first.col,
        side,
    ))
}

fn make_evidence(
    unit: &SourceUnit,
    start: usize,
    end: usize,
    line: u32,
    col: u32,
    side: Side,
) -> Evidence {
    let mut cut = end.min(start + SNIPPET_CAP).min(unit.text.len());
    while cut > start && !unit.text.is_char_boundary(cut) {
        cut -= 1;
    }
    Evidence {
        side,
        snippet: unit.text[start..cut].to_string(),
        line,
        col,
    }
}

fn offset_evidence(unit: &SourceUnit, offset: usize, len: usize, side: Side) -> Evidence {
    let before = &unit.text[..offset];
    let line = 1 + before.matches('\n').count() as u32;
    let col = (offset - before.rfind('\n').map_or(0, |i| i + 1)) as u32 + 1;
    make_evidence(unit, offset, offset + len, line, col, side)
}

// ---------------------------------------------------------------------------
// codegen/meta
// ---------------------------------------------------------------------------

/// Build/project metadata baked into fields: hunks that change only
/// literals under a metadata-named identifier, or literals carrying an
/// unresolved template marker like `${...}` or `$NAME$`.
pub fn detect_meta(ctx: &PairContext) -> Detection {
    let mut det = Detection::default();
    for (i, h) in ctx.hunks().iter().enumerate() {
        let both_literal = !h.a_tokens.is_empty()
            && !h.b_tokens.is_empty()
            && h.a_tokens.iter().all(|t| t.kind.is_literal())
            && h.b_tokens.iter().all(|t| t.kind.is_literal());
        let lexicon_hit = both_literal
            && nearest_preceding_identifier(&ctx.ua.stream.tokens, h.a_range.0)
                .is_some_and(|id| lexicon_match(&ctx.config.meta_lexicon, id));
        let template_hit = h
            .a_tokens
            .iter()
            .chain(h.b_tokens.iter())
            .any(|t| t.kind.is_literal() && contains_template_marker(&t.text));
        if lexicon_hit || template_hit {
            det.explain(i);
            det.add_evidence(hunk_evidence_side(ctx.ua, &h.a_tokens, Side::A));
            det.add_evidence(hunk_evidence_side(ctx.ub, &h.b_tokens, Side::B));
        }
    }
    det
}

/// Nearest identifier before `start`, not crossing a statement or block
/// boundary.
fn nearest_preceding_identifier(tokens: &[Token], start: usize) -> Option<&str> {
    for t in tokens[..start].iter().rev() {
        match t.key() {
            (TokenKind::Identifier, text) => return Some(text),
            (TokenKind::Separator, ";" | "{" | "}") => return None,
            _ => {}
        }
    }
    None
}

fn lexicon_match(lexicon: &[String], ident: &str) -> bool {
    let upper = ident.to_uppercase();
    lexicon.iter().any(|term| upper.contains(term.as_str()))
}

/// `${...}` span or `$NAME$` anywhere in a lexeme.
fn contains_template_marker(text: &str) -> bool {
    if let Some(open) = text.find("${") {
        if text[open + 2..].contains('}') {
            return true;
        }
    }
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == '$' {
            let mut j = i + 1;
            while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            if j > i + 1 && j < chars.len() && chars[j] == '$' {
                return true;
            }
        }
        i += 1;
    }
    false
}

// ---------------------------------------------------------------------------
// codegen/@generated
// ---------------------------------------------------------------------------

/// Differences confined to `@Generated` annotations (any package): changed
/// attributes such as build timestamps, a whole annotation present on only
/// one side, or the import that comes with it.
pub fn detect_generated_annotation(ctx: &PairContext) -> Detection {
    let spans_a = annotation_spans(&ctx.ua.stream.tokens, &ctx.config.generated_annotations);
    let spans_b = annotation_spans(&ctx.ub.stream.tokens, &ctx.config.generated_annotations);

    let mut det = Detection::default();
    for (i, h) in ctx.hunks().iter().enumerate() {
        if h.a_tokens.is_empty() && h.b_tokens.is_empty() {
            continue;
        }
        let a_ok = h.a_tokens.is_empty()
            || side_covered(
                &ctx.ua.stream.tokens,
                h.a_range,
                &spans_a,
                &ctx.config.generated_annotations,
            );
        let b_ok = h.b_tokens.is_empty()
            || side_covered(
                &ctx.ub.stream.tokens,
                h.b_range,
                &spans_b,
                &ctx.config.generated_annotations,
            );
        if a_ok && b_ok {
            det.explain(i);
            det.add_evidence(hunk_evidence_side(ctx.ua, &h.a_tokens, Side::A));
            det.add_evidence(hunk_evidence_side(ctx.ub, &h.b_tokens, Side::B));
        }
    }
    det
}

/// Token spans (half-open) of `@Name(...)` annotations whose simple name
/// is in `names`, including qualified uses like `@javax.annotation.Name`.
fn annotation_spans(tokens: &[Token], names: &[String]) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        if tokens[i].key() != (TokenKind::Separator, "@") {
            i += 1;
            continue;
        }
        // Dotted annotation name.
        let mut j = i + 1;
        if tokens.get(j).map(|t| t.kind) != Some(TokenKind::Identifier) {
            i += 1;
            continue;
        }
        while tokens.get(j + 1).map(Token::key) == Some((TokenKind::Separator, "."))
            && tokens.get(j + 2).map(|t| t.kind) == Some(TokenKind::Identifier)
        {
            j += 2;
        }
        if !names.iter().any(|n| n == &tokens[j].text) {
            i = j + 1;
            continue;
        }
        let mut end = j + 1;
        if tokens.get(end).map(Token::key) == Some((TokenKind::Separator, "(")) {
            let mut depth = 0;
            for (k, t) in tokens.iter().enumerate().skip(end) {
                match t.key() {
                    (TokenKind::Separator, "(") => depth += 1,
                    (TokenKind::Separator, ")") => {
                        depth -= 1;
                        if depth == 0 {
                            end = k + 1;
                            break;
                        }
                    }
                    _ => {}
                }
            }
        }
        spans.push((i, end));
        i = end;
    }
    spans
}

/// Greedy coverage of a one-sided or in-place hunk range by annotation
/// spans and `import ...Generated;` declarations.
fn side_covered(
    tokens: &[Token],
    range: (usize, usize),
    spans: &[(usize, usize)],
    names: &[String],
) -> bool {
    let (mut pos, end) = range;
    'scan: while pos < end {
        // Inside (or at the start of) an annotation span?
        for &(s, e) in spans {
            if pos >= s && pos < e {
                pos = e.min(end);
                continue 'scan;
            }
        }
        if let Some(next) = generated_import_end(tokens, pos, names) {
            pos = next;
            continue;
        }
        return false;
    }
    true
}

/// If an `import a.b.Generated;` declaration starts at `pos`, returns the
/// index one past its semicolon.
fn generated_import_end(tokens: &[Token], pos: usize, names: &[String]) -> Option<usize> {
    if tokens.get(pos).map(Token::key) != Some((TokenKind::Keyword, "import")) {
        return None;
    }
    let mut j = pos + 1;
    let mut last_ident: Option<&str>;
    loop {
        match tokens.get(j) {
            Some(t) if t.kind == TokenKind::Identifier => {
                last_ident = Some(&t.text);
                j += 1;
            }
            _ => return None,
        }
        match tokens.get(j).map(Token::key) {
            Some((TokenKind::Separator, ".")) => j += 1,
            Some((TokenKind::Separator, ";")) => {
                return (names.iter().any(|n| Some(n.as_str()) == last_ident)).then_some(j + 1);
            }
            _ => return None,
        }
    }
}

// ---------------------------------------------------------------------------
// codegen/istack
// ---------------------------------------------------------------------------

/// Resource-accessor classes regenerated with members in a different
/// order. Gated on the class name; full confidence requires the top-level
/// member blocks to be equal as multisets, tolerating one extra private
/// parameterless constructor on either side.
pub fn detect_istack(ctx: &PairContext) -> Detection {
    let gate = |u: &SourceUnit| {
        u.top_level_types.len() == 1 && ctx.config.istack_classes.contains(&u.top_level_types[0])
    };
    if !gate(ctx.ua) || !gate(ctx.ub) || ctx.ua.top_level_types != ctx.ub.top_level_types {
        return Detection::default();
    }
    let class_name = &ctx.ua.top_level_types[0];
    let Some(members_a) = class_members(&ctx.ua.stream.tokens) else {
        return Detection::default();
    };
    let Some(members_b) = class_members(&ctx.ub.stream.tokens) else {
        return Detection::default();
    };

    let keys_a = member_keys(&ctx.ua.stream.tokens, &members_a);
    let keys_b = member_keys(&ctx.ub.stream.tokens, &members_b);
    let counts_a = count_keys(&keys_a);
    let counts_b = count_keys(&keys_b);

    let mut only_a: Vec<&MemberKey> = surplus(&counts_a, &counts_b);
    let mut only_b: Vec<&MemberKey> = surplus(&counts_b, &counts_a);

    // One private parameterless constructor may exist on one side only.
    let allowance = |extra: &mut Vec<&MemberKey>, other: &Vec<&MemberKey>| {
        other.is_empty()
            && extra.len() == 1
            && is_private_parameterless_ctor(extra[0], class_name)
            && {
                extra.clear();
                true
            }
    };
    let _ = allowance(&mut only_a, &only_b) || allowance(&mut only_b, &only_a);

    let mut det = Detection::default();
    if only_a.is_empty() && only_b.is_empty() {
        for (i, h) in ctx.hunks().iter().enumerate() {
            det.explain(i);
            det.add_evidence(hunk_evidence_side(ctx.ua, &h.a_tokens, Side::A));
        }
        return det;
    }

    // Partial case: hunks confined to members present on both sides.
    let matched_a = matched_ranges(&members_a, &keys_a, &counts_a, &counts_b);
    let matched_b = matched_ranges(&members_b, &keys_b, &counts_b, &counts_a);
    for (i, h) in ctx.hunks().iter().enumerate() {
        let a_ok = h.a_tokens.is_empty() || range_within(h.a_range, &matched_a);
        let b_ok = h.b_tokens.is_empty() || range_within(h.b_range, &matched_b);
        if a_ok && b_ok {
            det.explain(i);
            det.add_evidence(hunk_evidence_side(ctx.ua, &h.a_tokens, Side::A));
        }
    }
    det
}

type MemberKey = Vec<(TokenKind, String)>;

/// Splits the body of the sole top-level class into member token ranges.
/// A member ends at a ';' at body depth or at the '}' closing a block
/// opened at body depth. The body brace is searched after the type
/// keyword so annotation array initializers don't masquerade as it.
fn class_members(tokens: &[Token]) -> Option<Vec<(usize, usize)>> {
    let decl = tokens.iter().position(|t| {
        matches!(
            t.key(),
            (TokenKind::Keyword, "class" | "interface" | "enum")
        )
    })?;
    let start = (decl..tokens.len()).find(|&i| tokens[i].key() == (TokenKind::Separator, "{"))?;
    let mut depth = 0;
    let mut body_end = None;
    for (i, t) in tokens.iter().enumerate().skip(start) {
        match t.key() {
            (TokenKind::Separator, "{") => depth += 1,
            (TokenKind::Separator, "}") => {
                depth -= 1;
                if depth == 0 {
                    body_end = Some(i);
                    break;
                }
            }
            _ => {}
        }
    }
    let end = body_end?;

    let mut members = Vec::new();
    let mut seg_start = start + 1;
    let mut rel = 1;
    let mut parens = 0;
    for (i, token) in tokens.iter().enumerate().take(end).skip(start + 1) {
        match token.key() {
            (TokenKind::Separator, "(") => parens += 1,
            (TokenKind::Separator, ")") => parens -= 1,
            (TokenKind::Separator, "{") => rel += 1,
            (TokenKind::Separator, "}") => {
                rel -= 1;
                // A block closing at body depth ends the member, unless a
                // ';' follows (array initializer) or we are inside an
                // annotation's parentheses.
                let initializer_tail =
                    tokens.get(i + 1).map(Token::key) == Some((TokenKind::Separator, ";"));
                if rel == 1 && parens == 0 && !initializer_tail {
                    members.push((seg_start, i + 1));
                    seg_start = i + 1;
                }
            }
            (TokenKind::Separator, ";") if rel == 1 && parens == 0 => {
                members.push((seg_start, i + 1));
                seg_start = i + 1;
            }
            _ => {}
        }
    }
    if seg_start < end {
        members.push((seg_start, end));
    }
    Some(members)
}

fn member_keys(tokens: &[Token], members: &[(usize, usize)]) -> Vec<MemberKey> {
    members
        .iter()
        .map(|&(s, e)| {
            tokens[s..e]
                .iter()
                .map(|t| (t.kind, t.text.clone()))
                .collect()
        })
        .collect()
}

fn count_keys(keys: &[MemberKey]) -> BTreeMap<&MemberKey, usize> {
    let mut map = BTreeMap::new();
    for k in keys {
        *map.entry(k).or_insert(0) += 1;
    }
    map
}

fn surplus<'a>(
    these: &BTreeMap<&'a MemberKey, usize>,
    those: &BTreeMap<&MemberKey, usize>,
) -> Vec<&'a MemberKey> {
    let mut out = Vec::new();
    for (&k, &n) in these {
        let m = those.get(k).copied().unwrap_or(0);
        for _ in m..n {
            out.push(k);
        }
    }
    out
}

fn is_private_parameterless_ctor(key: &MemberKey, class_name: &str) -> bool {
    key.len() == 6
        && key[0] == (TokenKind::Keyword, "private".to_string())
        && key[1] == (TokenKind::Identifier, class_name.to_string())
        && key[2].1 == "("
        && key[3].1 == ")"
        && key[4].1 == "{"
        && key[5].1 == "}"
}

/// Ranges of member occurrences matched on both sides (occurrence-ranked
/// per key, so duplicates match pairwise).
fn matched_ranges(
    members: &[(usize, usize)],
    keys: &[MemberKey],
    own: &BTreeMap<&MemberKey, usize>,
    other: &BTreeMap<&MemberKey, usize>,
) -> Vec<(usize, usize)> {
    let mut seen: BTreeMap<&MemberKey, usize> = BTreeMap::new();
    let mut out = Vec::new();
    for (range, key) in members.iter().zip(keys) {
        let rank = seen.entry(key).or_insert(0);
        let quota = own
            .get(key)
            .copied()
            .unwrap_or(0)
            .min(other.get(key).copied().unwrap_or(0));
        if *rank < quota {
            out.push(*range);
        }
        *rank += 1;
    }
    out
}

fn range_within(range: (usize, usize), allowed: &[(usize, usize)]) -> bool {
    (range.0..range.1).all(|i| allowed.iter().any(|&(s, e)| i >= s && i < e))
}

// ---------------------------------------------------------------------------
// codegen/proto
// ---------------------------------------------------------------------------

/// Protobuf-compiler output: the generator banner in a comment explains
/// the whole file; otherwise hunks adjacent to protobuf runtime names are
/// explained individually.
pub fn detect_proto(ctx: &PairContext) -> Detection {
    let mut det = Detection::default();
    let banner = find_banner(&ctx.ua.text, &ctx.config.proto_banners)
        .map(|(off, len)| offset_evidence(ctx.ua, off, len, Side::A))
        .or_else(|| {
            find_banner(&ctx.ub.text, &ctx.config.proto_banners)
                .map(|(off, len)| offset_evidence(ctx.ub, off, len, Side::B))
        });

    if let Some(ev) = banner {
        det.add_evidence(Some(ev));
        for i in 0..ctx.hunks().len() {
            det.explain(i);
        }
        return det;
    }

    for (i, h) in ctx.hunks().iter().enumerate() {
        let hit_a = proto_marker_near(&ctx.ua.stream.tokens, h.a_range, &ctx.config.proto_markers);
        let hit_b = proto_marker_near(&ctx.ub.stream.tokens, h.b_range, &ctx.config.proto_markers);
        if let Some((lo, hi)) = hit_a.or(hit_b) {
            det.explain(i);
            let (unit, side) = if hit_a.is_some() {
                (ctx.ua, Side::A)
            } else {
                (ctx.ub, Side::B)
            };
            det.add_evidence(hunk_evidence_side(unit, &unit.stream.tokens[lo..hi], side));
        }
    }
    det
}

fn find_banner(text: &str, banners: &[String]) -> Option<(usize, usize)> {
    banners
        .iter()
        .filter_map(|b| text.find(b.as_str()).map(|off| (off, b.len())))
        .min()
}

/// Looks for a dotted run carrying a protobuf marker near a hunk.
fn proto_marker_near(
    tokens: &[Token],
    range: (usize, usize),
    markers: &[String],
) -> Option<(usize, usize)> {
    let lo = range.0.saturating_sub(PROTO_CONTEXT);
    let hi = (range.1 + PROTO_CONTEXT).min(tokens.len());
    let mut i = lo;
    while i < hi {
        if tokens[i].kind == TokenKind::Identifier {
            if let Some((s, e, segments)) = dotted_run_at(tokens, i) {
                if segments.len() >= 2 {
                    let joined = segments.join(".");
                    if markers.iter().any(|m| joined.contains(m.as_str()))
                        || segments.iter().any(|s| s == "protobuf")
                    {
                        return Some((s, e));
                    }
                }
                i = e;
                continue;
            }
        }
        i += 1;
    }
    None
}

// ---------------------------------------------------------------------------
// codegen/antlr
// ---------------------------------------------------------------------------

/// Parser-generator output whose diffs are pure reorderings. Gated on a
/// generation banner (or Parser/Lexer type names plus an antlr mention);
/// hunks are explained when the deleted and inserted token multisets
/// cancel out.
pub fn detect_antlr(ctx: &PairContext) -> Detection {
    let banner_of = |u: &SourceUnit| {
        ctx.config
            .antlr_banners
            .iter()
            .filter_map(|b| u.text.find(b.as_str()).map(|off| (off, b.len())))
            .min()
            .filter(|_| u.text.contains(".g"))
    };
    let type_gate = |u: &SourceUnit| {
        u.top_level_types
            .iter()
            .any(|n| n.ends_with("Parser") || n.ends_with("Lexer"))
            && (u.text.contains("antlr") || u.text.contains("ANTLR"))
    };

    let banner = banner_of(ctx.ua)
        .map(|(off, len)| offset_evidence(ctx.ua, off, len, Side::A))
        .or_else(|| banner_of(ctx.ub).map(|(off, len)| offset_evidence(ctx.ub, off, len, Side::B)));
    if banner.is_none() && !type_gate(ctx.ua) && !type_gate(ctx.ub) {
        return Detection::default();
    }

    let mut det = Detection::default();
    det.add_evidence(banner);

    // Draw each hunk's deletions from the pool of insertions and vice
    // versa; a hunk is a displacement when both draws succeed.
    let mut pool_a = token_pool(ctx.hunks().iter().map(|h| &h.a_tokens));
    let mut pool_b = token_pool(ctx.hunks().iter().map(|h| &h.b_tokens));
    for (i, h) in ctx.hunks().iter().enumerate() {
        if draw_all(&h.a_tokens, &mut pool_b) && draw_all(&h.b_tokens, &mut pool_a) {
            det.explain(i);
            det.add_evidence(hunk_evidence_side(ctx.ua, &h.a_tokens, Side::A));
        }
    }
    if det.explained.is_empty() {
        det.evidence.clear();
    }
    det
}

fn token_pool<'a>(
    sides: impl Iterator<Item = &'a Vec<Token>>,
) -> BTreeMap<(TokenKind, &'a str), usize> {
    let mut pool = BTreeMap::new();
    for tokens in sides {
        for t in tokens {
            *pool.entry((t.kind, t.text.as_str())).or_insert(0) += 1;
        }
    }
    pool
}

/// All-or-nothing multiset draw.
fn draw_all<'a>(tokens: &'a [Token], pool: &mut BTreeMap<(TokenKind, &'a str), usize>) -> bool {
    let mut need: BTreeMap<(TokenKind, &str), usize> = BTreeMap::new();
    for t in tokens {
        *need.entry((t.kind, t.text.as_str())).or_insert(0) += 1;
    }
    if need
        .iter()
        .any(|(k, n)| pool.get(k).copied().unwrap_or(0) < *n)
    {
        return false;
    }
    for (k, n) in need {
        *pool.get_mut(&k).unwrap() -= n;
    }
    true
}

// ---------------------------------------------------------------------------
// codegen/groovy
// ---------------------------------------------------------------------------

/// Groovy stub idiosyncrasy: qualified type names on one side, simple
/// names on the other. A hunk qualifies when every inner edit inserts or
/// deletes an `Ident.`+ prefix directly before an identifier.
pub fn detect_groovy(ctx: &PairContext) -> Detection {
    let mut det = Detection::default();
    for (i, h) in ctx.hunks().iter().enumerate() {
        let edits = diff::diff_edits(&h.a_tokens, &h.b_tokens);
        if edits.is_empty() {
            continue;
        }
        let all_prefix_edits = edits.iter().all(|e| {
            let a_len = e.a_end - e.a_start;
            let b_len = e.b_end - e.b_start;
            match (a_len, b_len) {
                (0, 0) => false,
                (_, 0) => {
                    is_qualifier_prefix(&h.a_tokens[e.a_start..e.a_end])
                        && next_is_identifier(&ctx.ua.stream.tokens, h.a_range.0 + e.a_end)
                }
                (0, _) => {
                    is_qualifier_prefix(&h.b_tokens[e.b_start..e.b_end])
                        && next_is_identifier(&ctx.ub.stream.tokens, h.b_range.0 + e.b_end)
                }
                _ => false,
            }
        });
        if all_prefix_edits {
            det.explain(i);
            let (unit, tokens, side) = if h.a_tokens.len() >= h.b_tokens.len() {
                (ctx.ua, &h.a_tokens, Side::A)
            } else {
                (ctx.ub, &h.b_tokens, Side::B)
            };
            det.add_evidence(hunk_evidence_side(unit, tokens, side));
        }
    }
    det
}

/// `(Ident .)+` — a dotted qualifier ending in a dot.
fn is_qualifier_prefix(tokens: &[Token]) -> bool {
    if tokens.is_empty() || !tokens.len().is_multiple_of(2) {
        return false;
    }
    tokens.chunks(2).all(|pair| {
        pair[0].kind == TokenKind::Identifier && pair[1].key() == (TokenKind::Separator, ".")
    })
}

fn next_is_identifier(tokens: &[Token], idx: usize) -> bool {
    tokens.get(idx).map(|t| t.kind) == Some(TokenKind::Identifier)
}

// ---------------------------------------------------------------------------
// shading
// ---------------------------------------------------------------------------

/// Package-prefix rewrites. Hunks made of name tokens are grouped into
/// rewrite sites by the maximal dotted run around them (one rename can
/// split into several hunks when the prefixes share segments); (from, to)
/// prefix pairs are induced per site by stripping the common dotted
/// suffix. The map is kept only when it is consistent and mechanically
/// rewrites every site from the A form to the B form.
pub fn detect_shading(ctx: &PairContext) -> Detection {
    // Site key: (a_span, b_span) of the surrounding dotted runs.
    struct Site {
        hunks: Vec<usize>,
        a_segments: Vec<String>,
        b_segments: Vec<String>,
    }
    type SpanPair = ((usize, usize), (usize, usize));

    let mut sites: BTreeMap<SpanPair, Site> = BTreeMap::new();
    let all_name_tokens = |tokens: &[Token]| {
        tokens
            .iter()
            .all(|t| t.kind == TokenKind::Identifier || t.key() == (TokenKind::Separator, "."))
    };

    for (i, h) in ctx.hunks().iter().enumerate() {
        if !all_name_tokens(&h.a_tokens) || !all_name_tokens(&h.b_tokens) {
            continue;
        }
        let Some((a_s, a_e, a_segments)) = expand_dotted(&ctx.ua.stream.tokens, h.a_range) else {
            continue;
        };
        let Some((b_s, b_e, b_segments)) = expand_dotted(&ctx.ub.stream.tokens, h.b_range) else {
            continue;
        };
        let site = sites
            .entry(((a_s, a_e), (b_s, b_e)))
            .or_insert_with(|| Site {
                hunks: Vec::new(),
                a_segments,
                b_segments,
            });
        site.hunks.push(i);
    }

    // Induce one prefix pair per site with differing runs.
    let mut pairs: BTreeMap<String, String> = BTreeMap::new();
    let mut rewrite_sites: Vec<&Site> = Vec::new();
    for site in sites.values() {
        if site.a_segments == site.b_segments {
            continue;
        }
        let a = &site.a_segments;
        let b = &site.b_segments;
        let mut suffix = 0;
        while suffix < a.len().min(b.len()) && a[a.len() - 1 - suffix] == b[b.len() - 1 - suffix] {
            suffix += 1;
        }
        if suffix == 0 {
            continue;
        }
        let from = a[..a.len() - suffix].join(".");
        let to = b[..b.len() - suffix].join(".");
        // An empty side would be a qualification change, not a rename.
        if from.is_empty() || to.is_empty() {
            continue;
        }
        match pairs.get(&from) {
            Some(existing) if existing != &to => return Detection::default(),
            _ => {
                pairs.insert(from, to);
            }
        }
        rewrite_sites.push(site);
    }

    if rewrite_sites.is_empty() {
        return Detection::default();
    }
    let map = ShadingMap {
        prefix_pairs: pairs.into_iter().collect(),
    };

    // Soundness gate: the induced map must rewrite every site exactly.
    for site in &rewrite_sites {
        if map.apply(&site.a_segments) != Some(site.b_segments.clone()) {
            return Detection::default();
        }
    }

    let mut det = Detection::default();
    for site in &rewrite_sites {
        for &idx in &site.hunks {
            det.explain(idx);
        }
        let h = &ctx.hunks()[site.hunks[0]];
        det.add_evidence(hunk_evidence_side(ctx.ua, &h.a_tokens, Side::A));
        det.add_evidence(hunk_evidence_side(ctx.ub, &h.b_tokens, Side::B));
    }
    det.explained.sort_unstable();
    det.explained.dedup();
    det.shading_map = Some(map);
    det
}

/// Maximal alternating `Ident (. Ident)*` run around a token range.
/// Returns the run's token span and its identifier segments. An empty
/// range (one-sided hunk) seeds from an adjacent name token, yielding
/// the run the edit happened inside.
fn expand_dotted(tokens: &[Token], range: (usize, usize)) -> Option<(usize, usize, Vec<String>)> {
    let is_name_tok =
        |t: &Token| t.kind == TokenKind::Identifier || t.key() == (TokenKind::Separator, ".");
    let (mut s, mut e) = range;
    if s >= e {
        if s < tokens.len() && is_name_tok(&tokens[s]) {
            e = s + 1;
        } else if s > 0 && is_name_tok(&tokens[s - 1]) {
            s -= 1;
            e = s + 1;
        } else {
            return None;
        }
    }
    let alternates = |prev: &Token, cur: &Token| {
        (prev.kind == TokenKind::Identifier) != (cur.kind == TokenKind::Identifier)
    };
    // Seed must itself be an alternating name run.
    for w in tokens[s..e].windows(2) {
        if !is_name_tok(&w[0]) || !is_name_tok(&w[1]) || !alternates(&w[0], &w[1]) {
            return None;
        }
    }
    if !is_name_tok(&tokens[s]) {
        return None;
    }
    while s > 0 && is_name_tok(&tokens[s - 1]) && alternates(&tokens[s - 1], &tokens[s]) {
        s -= 1;
    }
    while e < tokens.len() && is_name_tok(&tokens[e]) && alternates(&tokens[e - 1], &tokens[e]) {
        e += 1;
    }
    // Trim boundary dots.
    if tokens[s].kind != TokenKind::Identifier {
        s += 1;
    }
    if e > s && tokens[e - 1].kind != TokenKind::Identifier {
        e -= 1;
    }
    if s >= e {
        return None;
    }
    let segments: Vec<String> = tokens[s..e]
        .iter()
        .filter(|t| t.kind == TokenKind::Identifier)
        .map(|t| t.text.clone())
        .collect();
    if segments.is_empty() {
        return None;
    }
    Some((s, e, segments))
}

/// Dotted run starting at an identifier index.
fn dotted_run_at(tokens: &[Token], start: usize) -> Option<(usize, usize, Vec<String>)> {
    if tokens.get(start).map(|t| t.kind) != Some(TokenKind::Identifier) {
        return None;
    }
    expand_dotted(tokens, (start, start + 1))
}
