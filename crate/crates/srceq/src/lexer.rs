//! Java lexical analysis with comment stripping and formatting normalization.
//!
//! Tokenizes Java 17 source text so that two sources can be compared as
//! token streams: comments are dropped, whitespace between tokens is
//! discarded (positions are kept as metadata), and `\uXXXX` escapes are
//! decoded before lexing, following the JLS translation phases.
//!
//! Contextual keywords (`var`, `record`, `sealed`, `yield`, ...) lex as
//! identifiers; only the reserved words are classified as keywords. The
//! distinction never affects stream equality since both sides of a
//! comparison are lexed the same way.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Category of a lexical token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TokenKind {
    Identifier,
    Keyword,
    IntLiteral,
    FloatLiteral,
    StringLiteral,
    TextBlockLiteral,
    CharLiteral,
    Separator,
    Operator,
    Comment,
}

impl TokenKind {
    /// True for the literal kinds (string, text block, char, int, float).
    pub fn is_literal(self) -> bool {
        matches!(
            self,
            TokenKind::IntLiteral
                | TokenKind::FloatLiteral
                | TokenKind::StringLiteral
                | TokenKind::TextBlockLiteral
                | TokenKind::CharLiteral
        )
    }
}

/// One lexical token. `text` is the exact lexeme after unicode-escape
/// decoding; `offset..end` is the byte range of the lexeme in the original
/// (undecoded) source, so callers can always slice an exact snippet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// 1-based source line of the first character.
    pub line: u32,
    /// 1-based source column of the first character.
    pub col: u32,
    /// Byte offset of the lexeme start in the original text.
    pub offset: usize,
    /// Byte offset one past the lexeme end in the original text.
    pub end: usize,
}

impl Token {
    /// (kind, text) pair — the unit of normalized comparison.
    pub fn key(&self) -> (TokenKind, &str) {
        (self.kind, &self.text)
    }
}

/// Options controlling tokenization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LexOptions {
    pub strip_comments: bool,
    pub decode_unicode_escapes: bool,
}

impl Default for LexOptions {
    fn default() -> Self {
        LexOptions {
            strip_comments: true,
            decode_unicode_escapes: true,
        }
    }
}

/// A normalized token stream.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenStream {
    pub tokens: Vec<Token>,
    /// True iff comments were encountered and stripped.
    pub had_comments: bool,
}

impl TokenStream {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Token texts joined with single spaces — the canonical normalized
    /// rendering used for digests.
    pub fn normalized_text(&self) -> String {
        let mut out = String::new();
        for (i, t) in self.tokens.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(&t.text);
        }
        out
    }
}

/// True iff the two streams agree as sequences of (kind, text) pairs.
/// Positions and `had_comments` are ignored.
pub fn normalized_equal(a: &TokenStream, b: &TokenStream) -> bool {
    a.tokens.len() == b.tokens.len()
        && a.tokens
            .iter()
            .zip(b.tokens.iter())
            .all(|(x, y)| x.key() == y.key())
}

/// Lexical error with 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("lex error at {line}:{col}: {reason}")]
pub struct LexError {
    pub line: u32,
    pub col: u32,
    pub reason: String,
}

impl LexError {
    fn new(line: u32, col: u32, reason: impl Into<String>) -> Self {
        LexError {
            line,
            col,
            reason: reason.into(),
        }
    }
}

// Java 17 reserved words (JLS 3.9), plus the boolean and null literals,
// which we classify as keywords for stream purposes.
const KEYWORDS: &[&str] = &[
    "abstract",
    "assert",
    "boolean",
    "break",
    "byte",
    "case",
    "catch",
    "char",
    "class",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extends",
    "final",
    "finally",
    "float",
    "for",
    "goto",
    "if",
    "implements",
    "import",
    "instanceof",
    "int",
    "interface",
    "long",
    "native",
    "new",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "short",
    "static",
    "strictfp",
    "super",
    "switch",
    "synchronized",
    "this",
    "throw",
    "throws",
    "transient",
    "try",
    "void",
    "volatile",
    "while",
    "_",
    "true",
    "false",
    "null",
];

fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c == '$'
}

fn is_ident_part(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '$'
}

/// One input character after the unicode-escape translation phase, tagged
/// with its position in the original text.
#[derive(Debug, Clone, Copy)]
struct Scalar {
    ch: char,
    line: u32,
    col: u32,
    /// Byte offset of the first original char this scalar came from.
    offset: usize,
    /// Byte offset one past the last original char (an escape spans 6+).
    end: usize,
}

/// Unicode-escape translation (JLS 3.3). A backslash starts an escape only
/// when preceded by an even number of contiguous backslashes; one or more
/// `u`s may follow; exactly four hex digits are required. Surrogate pairs
/// written as two escapes combine; unpaired surrogates decode to U+FFFD.
fn decode_scalars(text: &str, decode: bool) -> Result<Vec<Scalar>, LexError> {
    let mut out = Vec::with_capacity(text.len());
    let bytes = text.as_bytes();
    let mut line: u32 = 1;
    let mut col: u32 = 1;
    let mut iter = text.char_indices().peekable();
    let mut backslash_run = 0usize;
    let mut prev = '\0';

    // Advances line/col past one original char; \r, \n and \r\n each
    // count as a single line terminator.
    fn bump_with(prev: &mut char, ch: char, line: &mut u32, col: &mut u32) {
        if ch == '\n' && *prev == '\r' {
            // Second half of CRLF: already counted.
        } else if ch == '\n' || ch == '\r' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
        *prev = ch;
    }
    let mut bump = |ch: char, line: &mut u32, col: &mut u32| bump_with(&mut prev, ch, line, col);

    while let Some((i, ch)) = iter.next() {
        if decode && ch == '\\' && backslash_run.is_multiple_of(2) {
            if let Some(&(_, 'u')) = iter.peek() {
                let (sl, sc) = (line, col);
                bump(ch, &mut line, &mut col);
                // One or more u's.
                while let Some(&(_, 'u')) = iter.peek() {
                    let (_, u) = iter.next().unwrap();
                    bump(u, &mut line, &mut col);
                }
                let mut value: u32 = 0;
                for _ in 0..4 {
                    match iter.next() {
                        Some((_, h)) if h.is_ascii_hexdigit() => {
                            value = value * 16 + h.to_digit(16).unwrap();
                            bump(h, &mut line, &mut col);
                        }
                        _ => return Err(LexError::new(sl, sc, "malformed unicode escape")),
                    }
                }
                let end = iter.peek().map_or(bytes.len(), |&(j, _)| j);
                let decoded = if (0xD800..0xDC00).contains(&value) {
                    // High surrogate: try to pair with a following escape.
                    try_pair_surrogate(value, &mut iter, &mut line, &mut col, bytes.len())
                } else if (0xDC00..0xE000).contains(&value) {
                    (char::REPLACEMENT_CHARACTER, end)
                } else {
                    (
                        char::from_u32(value).unwrap_or(char::REPLACEMENT_CHARACTER),
                        end,
                    )
                };
                out.push(Scalar {
                    ch: decoded.0,
                    line: sl,
                    col: sc,
                    offset: i,
                    end: decoded.1,
                });
                backslash_run = 0;
                continue;
            }
        }
        backslash_run = if ch == '\\' { backslash_run + 1 } else { 0 };
        out.push(Scalar {
            ch,
            line,
            col,
            offset: i,
            end: i + ch.len_utf8(),
        });
        bump(ch, &mut line, &mut col);
    }
    Ok(out)
}

type CharIter<'a> = std::iter::Peekable<std::str::CharIndices<'a>>;

fn try_pair_surrogate(
    high: u32,
    iter: &mut CharIter<'_>,
    line: &mut u32,
    col: &mut u32,
    text_len: usize,
) -> (char, usize) {
    // Only a directly following `\uXXXX` low surrogate pairs up.
    let mut probe = iter.clone();
    let (mut l2, mut c2) = (*line, *col);
    fn bump(ch: char, line: &mut u32, col: &mut u32) {
        if ch == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    }
    if let Some((_, '\\')) = probe.peek().copied() {
        let (_, bs) = probe.next().unwrap();
        bump(bs, &mut l2, &mut c2);
        let mut saw_u = false;
        while let Some(&(_, 'u')) = probe.peek() {
            let (_, u) = probe.next().unwrap();
            bump(u, &mut l2, &mut c2);
            saw_u = true;
        }
        if saw_u {
            let mut low: u32 = 0;
            let mut ok = true;
            for _ in 0..4 {
                match probe.next() {
                    Some((_, h)) if h.is_ascii_hexdigit() => {
                        low = low * 16 + h.to_digit(16).unwrap();
                        bump(h, &mut l2, &mut c2);
                    }
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok && (0xDC00..0xE000).contains(&low) {
                let combined = 0x10000 + ((high - 0xD800) << 10) + (low - 0xDC00);
                let end = probe.peek().map_or(text_len, |&(j, _)| j);
                *iter = probe;
                *line = l2;
                *col = c2;
                return (
                    char::from_u32(combined).unwrap_or(char::REPLACEMENT_CHARACTER),
                    end,
                );
            }
        }
    }
    let end = iter.peek().map_or(text_len, |&(j, _)| j);
    (char::REPLACEMENT_CHARACTER, end)
}

struct Lexer<'a> {
    scalars: &'a [Scalar],
    pos: usize,
    text_len: usize,
}

impl<'a> Lexer<'a> {
    fn peek(&self, ahead: usize) -> Option<char> {
        self.scalars.get(self.pos + ahead).map(|s| s.ch)
    }

    fn cur(&self) -> Option<&Scalar> {
        self.scalars.get(self.pos)
    }

    fn at_eof(&self) -> bool {
        self.pos >= self.scalars.len()
    }

    fn advance(&mut self) {
        self.pos += 1;
    }

    fn slice_text(&self, start: usize) -> String {
        self.scalars[start..self.pos].iter().map(|s| s.ch).collect()
    }

    fn make_token(&self, kind: TokenKind, start: usize) -> Token {
        let first = &self.scalars[start];
        Token {
            kind,
            text: self.slice_text(start),
            line: first.line,
            col: first.col,
            offset: first.offset,
            end: self
                .scalars
                .get(self.pos - 1)
                .map_or(self.text_len, |s| s.end),
        }
    }

    fn error_here(&self, reason: &str) -> LexError {
        match self.cur() {
            Some(s) => LexError::new(s.line, s.col, reason),
            None => {
                let last = self.scalars.last();
                LexError::new(
                    last.map_or(1, |s| s.line),
                    last.map_or(1, |s| s.col + 1),
                    reason,
                )
            }
        }
    }

    fn error_at(&self, start: usize, reason: &str) -> LexError {
        let s = &self.scalars[start];
        LexError::new(s.line, s.col, reason)
    }

    fn skip_whitespace(&mut self) {
        while let Some(c) = self.peek(0) {
            match c {
                ' ' | '\t' | '\u{000C}' | '\n' | '\r' => self.advance(),
                // A SUB character is tolerated as the last character.
                '\u{001A}' if self.pos + 1 == self.scalars.len() => self.advance(),
                _ => break,
            }
        }
    }

    fn scan_line_comment(&mut self) -> Token {
        let start = self.pos;
        while let Some(c) = self.peek(0) {
            if c == '\n' || c == '\r' {
                break;
            }
            self.advance();
        }
        self.make_token(TokenKind::Comment, start)
    }

    fn scan_block_comment(&mut self) -> Result<Token, LexError> {
        let start = self.pos;
        self.advance(); // '/'
        self.advance(); // '*'
        loop {
            match self.peek(0) {
                None => return Err(self.error_at(start, "unterminated comment")),
                Some('*') if self.peek(1) == Some('/') => {
                    self.advance();
                    self.advance();
                    return Ok(self.make_token(TokenKind::Comment, start));
                }
                Some(_) => self.advance(),
            }
        }
    }

    fn scan_string(&mut self) -> Result<Token, LexError> {
        let start = self.pos;
        self.advance(); // opening quote
        loop {
            match self.peek(0) {
                None | Some('\n') | Some('\r') => {
                    return Err(self.error_at(start, "unterminated string literal"))
                }
                Some('\\') => {
                    self.advance();
                    if self.at_eof() {
                        return Err(self.error_at(start, "unterminated string literal"));
                    }
                    self.advance();
                }
                Some('"') => {
                    self.advance();
                    return Ok(self.make_token(TokenKind::StringLiteral, start));
                }
                Some(_) => self.advance(),
            }
        }
    }

    fn scan_text_block(&mut self) -> Result<Token, LexError> {
        let start = self.pos;
        self.advance();
        self.advance();
        self.advance(); // opening """
        loop {
            match self.peek(0) {
                None => return Err(self.error_at(start, "unterminated text block")),
                Some('\\') => {
                    self.advance();
                    if !self.at_eof() {
                        self.advance();
                    }
                }
                Some('"') if self.peek(1) == Some('"') && self.peek(2) == Some('"') => {
                    self.advance();
                    self.advance();
                    self.advance();
                    return Ok(self.make_token(TokenKind::TextBlockLiteral, start));
                }
                Some(_) => self.advance(),
            }
        }
    }

    fn scan_char(&mut self) -> Result<Token, LexError> {
        let start = self.pos;
        self.advance(); // opening quote
        let mut content = 0usize;
        loop {
            match self.peek(0) {
                None | Some('\n') | Some('\r') => {
                    return Err(self.error_at(start, "unterminated character literal"))
                }
                Some('\\') => {
                    self.advance();
                    if self.at_eof() {
                        return Err(self.error_at(start, "unterminated character literal"));
                    }
                    self.advance();
                    content += 1;
                }
                Some('\'') => {
                    if content == 0 {
                        return Err(self.error_at(start, "empty character literal"));
                    }
                    self.advance();
                    return Ok(self.make_token(TokenKind::CharLiteral, start));
                }
                Some(_) => {
                    self.advance();
                    content += 1;
                }
            }
        }
    }

    fn scan_identifier(&mut self) -> Token {
        let start = self.pos;
        self.advance();
        while let Some(c) = self.peek(0) {
            if is_ident_part(c) {
                self.advance();
            } else {
                break;
            }
        }
        let mut tok = self.make_token(TokenKind::Identifier, start);
        if is_keyword(&tok.text) {
            tok.kind = TokenKind::Keyword;
        }
        tok
    }

    fn eat_digits(&mut self, pred: fn(char) -> bool) -> usize {
        let mut n = 0;
        while let Some(c) = self.peek(0) {
            if pred(c) || c == '_' {
                if pred(c) {
                    n += 1;
                }
                self.advance();
            } else {
                break;
            }
        }
        n
    }

    /// Consumes an exponent (`e`/`E` or `p`/`P` with optional sign) only
    /// when digits actually follow; returns whether one was consumed.
    fn eat_exponent(&mut self, markers: [char; 2]) -> bool {
        if let Some(c) = self.peek(0) {
            if c == markers[0] || c == markers[1] {
                let mut look = 1;
                if matches!(self.peek(1), Some('+') | Some('-')) {
                    look = 2;
                }
                if matches!(self.peek(look), Some(d) if d.is_ascii_digit()) {
                    for _ in 0..look {
                        self.advance();
                    }
                    self.eat_digits(|c| c.is_ascii_digit());
                    return true;
                }
            }
        }
        false
    }

    fn scan_number(&mut self) -> Token {
        let start = self.pos;
        let mut float = false;

        if self.peek(0) == Some('0') && matches!(self.peek(1), Some('x') | Some('X')) {
            if self.peek(2).is_some_and(|c| c.is_ascii_hexdigit())
                || (self.peek(2) == Some('.')
                    && self.peek(3).is_some_and(|c| c.is_ascii_hexdigit()))
            {
                self.advance();
                self.advance();
                self.eat_digits(|c| c.is_ascii_hexdigit());
                if self.peek(0) == Some('.') && self.peek(1).is_some_and(|c| c.is_ascii_hexdigit())
                {
                    // Hex fraction is only a float with a p-exponent; probe it.
                    let mark = self.pos;
                    self.advance();
                    self.eat_digits(|c| c.is_ascii_hexdigit());
                    if self.eat_exponent(['p', 'P']) {
                        float = true;
                    } else {
                        self.pos = mark;
                    }
                } else if self.eat_exponent(['p', 'P']) {
                    float = true;
                }
            } else {
                // "0x" with no digits: lex the 0, let x start an identifier.
                self.advance();
                return self.make_token(TokenKind::IntLiteral, start);
            }
        } else if self.peek(0) == Some('0') && matches!(self.peek(1), Some('b') | Some('B')) {
            if matches!(self.peek(2), Some('0') | Some('1')) {
                self.advance();
                self.advance();
                self.eat_digits(|c| c == '0' || c == '1');
            } else {
                self.advance();
                return self.make_token(TokenKind::IntLiteral, start);
            }
        } else {
            // Decimal (also covers legacy octal spellings like 017).
            if self.peek(0) == Some('.') {
                float = true;
                self.advance();
                self.eat_digits(|c| c.is_ascii_digit());
            } else {
                self.eat_digits(|c| c.is_ascii_digit());
                if self.peek(0) == Some('.') {
                    let next_is_digit = self.peek(1).is_some_and(|c| c.is_ascii_digit());
                    let next_is_dot = self.peek(1) == Some('.');
                    // "1." is a float unless the dot begins "..." or a
                    // member access cannot follow a digit anyway.
                    if next_is_digit || !next_is_dot {
                        float = true;
                        self.advance();
                        self.eat_digits(|c| c.is_ascii_digit());
                    }
                }
            }
            if self.eat_exponent(['e', 'E']) {
                float = true;
            }
        }

        match self.peek(0) {
            Some('f') | Some('F') | Some('d') | Some('D') => {
                self.advance();
                float = true;
            }
            Some('l') | Some('L') if !float => {
                self.advance();
            }
            _ => {}
        }

        let kind = if float {
            TokenKind::FloatLiteral
        } else {
            TokenKind::IntLiteral
        };
        self.make_token(kind, start)
    }

    fn scan_operator(&mut self) -> Result<Token, LexError> {
        // Longest match first (JLS maximal munch).
        const OPS4: &[&str] = &[">>>="];
        const OPS3: &[&str] = &["...", ">>>", "<<=", ">>="];
        const OPS2: &[&str] = &[
            "::", "->", "==", ">=", "<=", "!=", "&&", "||", "++", "--", "<<", ">>", "+=", "-=",
            "*=", "/=", "&=", "|=", "^=", "%=",
        ];
        const SINGLES: &str = "(){}[];,.@=><!~?:+-*/&|^%";

        let start = self.pos;
        let take = |lexer: &Self, n: usize| -> String {
            (0..n).filter_map(|k| lexer.peek(k)).collect::<String>()
        };
        for (n, table) in [(4usize, OPS4), (3, OPS3), (2, OPS2)] {
            let probe = take(self, n);
            if probe.chars().count() == n && table.contains(&probe.as_str()) {
                for _ in 0..n {
                    self.advance();
                }
                let kind = if probe == "..." || probe == "::" {
                    TokenKind::Separator
                } else {
                    TokenKind::Operator
                };
                return Ok(self.make_token(kind, start));
            }
        }
        let c = self.peek(0).unwrap();
        if SINGLES.contains(c) {
            self.advance();
            let kind = match c {
                '(' | ')' | '{' | '}' | '[' | ']' | ';' | ',' | '.' | '@' => TokenKind::Separator,
                _ => TokenKind::Operator,
            };
            return Ok(self.make_token(kind, start));
        }
        Err(self.error_here(&format!("illegal character '{c}'")))
    }
}

/// Tokenizes Java source text. Whitespace between tokens is discarded;
/// comments are dropped when `options.strip_comments` is set (the default)
/// and `had_comments` records that they were seen.
pub fn tokenize(text: &str, options: &LexOptions) -> Result<TokenStream, LexError> {
    let scalars = decode_scalars(text, options.decode_unicode_escapes)?;
    let start_at = usize::from(scalars.first().is_some_and(|s| s.ch == '\u{FEFF}'));

    let mut lexer = Lexer {
        scalars: &scalars[start_at..],
        pos: 0,
        text_len: text.len(),
    };
    let mut tokens = Vec::new();
    let mut saw_comment = false;

    loop {
        lexer.skip_whitespace();
        let Some(c) = lexer.peek(0) else { break };
        let token = match c {
            '/' if lexer.peek(1) == Some('/') => {
                saw_comment = true;
                let t = lexer.scan_line_comment();
                if options.strip_comments {
                    continue;
                }
                t
            }
            '/' if lexer.peek(1) == Some('*') => {
                saw_comment = true;
                let t = lexer.scan_block_comment()?;
                if options.strip_comments {
                    continue;
                }
                t
            }
            '"' => {
                if lexer.peek(1) == Some('"') && lexer.peek(2) == Some('"') {
                    lexer.scan_text_block()?
                } else {
                    lexer.scan_string()?
                }
            }
            '\'' => lexer.scan_char()?,
            '.' if lexer.peek(1).is_some_and(|c| c.is_ascii_digit()) => lexer.scan_number(),
            c if c.is_ascii_digit() => lexer.scan_number(),
            c if is_ident_start(c) => lexer.scan_identifier(),
            _ => lexer.scan_operator()?,
        };
        tokens.push(token);
    }

    Ok(TokenStream {
        tokens,
        had_comments: options.strip_comments && saw_comment,
    })
}
