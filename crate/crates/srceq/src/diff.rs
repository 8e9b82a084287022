//! Minimal token-level diff (Myers' greedy algorithm) plus hunk merging.
//!
//! Hunks carry token index ranges into both streams. Edits separated by
//! fewer than three unchanged tokens merge into one hunk so that evidence
//! extraction sees one region per logical change.

use crate::lexer::Token;

/// Number of unchanged tokens below which adjacent edits merge.
pub const MERGE_GAP: usize = 3;

// Beyond this edit distance the diff degrades to one coarse replace hunk;
// keeps memory bounded on pathological inputs.
const MAX_D: usize = 4096;

/// One raw edit: replace `a[a_start..a_end]` with `b[b_start..b_end]`.
/// Either range (but not both) may be empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edit {
    pub a_start: usize,
    pub a_end: usize,
    pub b_start: usize,
    pub b_end: usize,
}

/// A merged hunk over token index ranges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hunk {
    pub a_range: (usize, usize),
    pub b_range: (usize, usize),
}

fn token_eq(a: &Token, b: &Token) -> bool {
    a.kind == b.kind && a.text == b.text
}

/// Computes the raw edit script between two token slices.
pub fn diff_edits(a: &[Token], b: &[Token]) -> Vec<Edit> {
    // Trim common prefix and suffix first; Myers runs on the middle.
    let mut lo = 0;
    while lo < a.len() && lo < b.len() && token_eq(&a[lo], &b[lo]) {
        lo += 1;
    }
    let mut a_hi = a.len();
    let mut b_hi = b.len();
    while a_hi > lo && b_hi > lo && token_eq(&a[a_hi - 1], &b[b_hi - 1]) {
        a_hi -= 1;
        b_hi -= 1;
    }
    if lo == a_hi && lo == b_hi {
        return Vec::new();
    }

    let mid_a = &a[lo..a_hi];
    let mid_b = &b[lo..b_hi];
    let mut edits = match myers(mid_a, mid_b) {
        Some(edits) => edits,
        None => vec![Edit {
            a_start: 0,
            a_end: mid_a.len(),
            b_start: 0,
            b_end: mid_b.len(),
        }],
    };
    for e in &mut edits {
        e.a_start += lo;
        e.a_end += lo;
        e.b_start += lo;
        e.b_end += lo;
    }
    edits
}

/// Myers' O(ND) shortest-edit-script search with full trace for backtrack.
/// Returns None when the edit distance exceeds `MAX_D`.
fn myers(a: &[Token], b: &[Token]) -> Option<Vec<Edit>> {
    let n = a.len() as isize;
    let m = b.len() as isize;
    let max = (n + m) as usize;
    let bound = max.min(MAX_D);
    let offset = bound as isize;
    let width = 2 * bound + 1;

    let mut v = vec![0isize; width];
    let mut trace: Vec<Vec<isize>> = Vec::new();

    'outer: {
        for d in 0..=bound as isize {
            trace.push(v.clone());
            let mut k = -d;
            while k <= d {
                let idx = (k + offset) as usize;
                let mut x = if k == -d || (k != d && v[idx - 1] < v[idx + 1]) {
                    v[idx + 1]
                } else {
                    v[idx - 1] + 1
                };
                let mut y = x - k;
                while x < n && y < m && token_eq(&a[x as usize], &b[y as usize]) {
                    x += 1;
                    y += 1;
                }
                v[idx] = x;
                if x >= n && y >= m {
                    trace.push(v.clone());
                    break 'outer;
                }
                k += 2;
            }
        }
        return None;
    }

    // Backtrack the trace into point pairs, then collect edits.
    let mut path = vec![(n, m)];
    let (mut x, mut y) = (n, m);
    for d in (1..trace.len() as isize - 1).rev() {
        let v = &trace[d as usize];
        let k = x - y;
        let idx = (k + offset) as usize;
        let prev_k = if k == -d || (k != d && v[idx - 1] < v[idx + 1]) {
            k + 1
        } else {
            k - 1
        };
        let prev_x = v[(prev_k + offset) as usize];
        let prev_y = prev_x - prev_k;
        // Walk back through the diagonal run.
        while x > prev_x && y > prev_y {
            x -= 1;
            y -= 1;
            path.push((x, y));
        }
        if d > 0 {
            path.push((prev_x, prev_y));
        }
        x = prev_x;
        y = prev_y;
    }
    while x > 0 && y > 0 {
        x -= 1;
        y -= 1;
        path.push((x, y));
    }
    if x > 0 || y > 0 {
        path.push((0, 0));
    }
    path.reverse();

    let mut edits: Vec<Edit> = Vec::new();
    let mut cur: Option<Edit> = None;
    for w in path.windows(2) {
        let ((px, py), (qx, qy)) = (w[0], w[1]);
        let diagonal = qx == px + 1 && qy == py + 1;
        if diagonal {
            if let Some(e) = cur.take() {
                edits.push(e);
            }
        } else {
            let e = cur.get_or_insert(Edit {
                a_start: px as usize,
                a_end: px as usize,
                b_start: py as usize,
                b_end: py as usize,
            });
            e.a_end = qx as usize;
            e.b_end = qy as usize;
        }
    }
    if let Some(e) = cur.take() {
        edits.push(e);
    }
    Some(edits)
}

/// Merges raw edits closer than `MERGE_GAP` unchanged tokens into hunks.
/// Merged hunks include the unchanged tokens between the edits on both
/// sides, so applying a hunk's b-range over its a-range stays correct.
pub fn merge_edits(edits: &[Edit]) -> Vec<Hunk> {
    let mut hunks: Vec<Hunk> = Vec::new();
    for e in edits {
        if let Some(last) = hunks.last_mut() {
            if e.a_start - last.a_range.1 < MERGE_GAP {
                last.a_range.1 = e.a_end;
                last.b_range.1 = e.b_end;
                continue;
            }
        }
        hunks.push(Hunk {
            a_range: (e.a_start, e.a_end),
            b_range: (e.b_start, e.b_end),
        });
    }
    hunks
}

/// Diff two token slices into merged hunks.
pub fn diff_hunks(a: &[Token], b: &[Token]) -> Vec<Hunk> {
    merge_edits(&diff_edits(a, b))
}

/// Applies hunks to `a`, producing the token sequence they describe.
/// Used by tests to assert the patch property.
pub fn apply_hunks(a: &[Token], b: &[Token], hunks: &[Hunk]) -> Vec<Token> {
    let mut out = Vec::with_capacity(b.len());
    let mut pos = 0;
    for h in hunks {
        out.extend_from_slice(&a[pos..h.a_range.0]);
        out.extend_from_slice(&b[h.b_range.0..h.b_range.1]);
        pos = h.a_range.1;
    }
    out.extend_from_slice(&a[pos..]);
    out
}
