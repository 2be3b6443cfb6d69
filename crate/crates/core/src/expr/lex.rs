//! Tokenizer for the expression grammar.
//!
//! Tokens carry the byte offset of their first byte so parse errors can point
//! at an exact position in the input.

use super::parse::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub(super) enum Tok {
    Num(f64),
    /// An identifier: a variable name or function name, classified later.
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    pub(super) fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number `{v}`"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

/// A token plus the byte offset where it starts.
#[derive(Debug, Clone, PartialEq)]
pub(super) struct Spanned {
    pub tok: Tok,
    pub offset: usize,
}

pub(super) fn tokenize(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        match b {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
            }
            b'+' => {
                toks.push(Spanned { tok: Tok::Plus, offset: start });
                i += 1;
            }
            b'-' => {
                toks.push(Spanned { tok: Tok::Minus, offset: start });
                i += 1;
            }
            b'*' => {
                toks.push(Spanned { tok: Tok::Star, offset: start });
                i += 1;
            }
            b'/' => {
                toks.push(Spanned { tok: Tok::Slash, offset: start });
                i += 1;
            }
            b'^' => {
                toks.push(Spanned { tok: Tok::Caret, offset: start });
                i += 1;
            }
            b'(' => {
                toks.push(Spanned { tok: Tok::LParen, offset: start });
                i += 1;
            }
            b')' => {
                toks.push(Spanned { tok: Tok::RParen, offset: start });
                i += 1;
            }
            b'0'..=b'9' => {
                i = scan_number(src, start, &mut toks)?;
            }
            b'a'..=b'z' | b'A'..=b'Z' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric()) {
                    i += 1;
                }
                toks.push(Spanned {
                    tok: Tok::Ident(src[start..i].to_string()),
                    offset: start,
                });
            }
            _ => {
                return Err(ParseError::syntax(
                    start,
                    &["a number", "a variable", "an operator", "`(`"],
                    format!("unexpected character `{}`", &src[start..start + utf8_len(b)]),
                ));
            }
        }
    }
    toks.push(Spanned { tok: Tok::Eof, offset: bytes.len() });
    Ok(toks)
}

/// Scan a decimal literal: digits, optional fraction, optional exponent.
/// A leading dot (`.5`) is rejected by the caller (dots only appear after
/// digits), and a trailing dot (`3.`) is a syntax error.
fn scan_number(src: &str, start: usize, toks: &mut Vec<Spanned>) -> Result<usize, ParseError> {
    let bytes = src.as_bytes();
    let mut i = start;
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    if i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        if i >= bytes.len() || !bytes[i].is_ascii_digit() {
            return Err(ParseError::syntax(
                i,
                &["a digit"],
                "a decimal point must be followed by digits".to_string(),
            ));
        }
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
    }
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let mut j = i + 1;
        if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
            j += 1;
        }
        // Only treat `e`/`E` as an exponent marker when digits follow;
        // otherwise it begins an identifier (e.g. `2exp(...)` is a syntax
        // error downstream, not a malformed number here).
        if j < bytes.len() && bytes[j].is_ascii_digit() {
            i = j;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
        }
    }
    let text = &src[start..i];
    let value: f64 = text.parse().map_err(|_| {
        ParseError::syntax(start, &["a number"], format!("malformed number `{text}`"))
    })?;
    if !value.is_finite() {
        return Err(ParseError::syntax(
            start,
            &["a finite number"],
            format!("literal `{text}` overflows double precision"),
        ));
    }
    toks.push(Spanned { tok: Tok::Num(value), offset: start });
    Ok(i)
}

fn utf8_len(first_byte: u8) -> usize {
    match first_byte {
        0x00..=0x7f => 1,
        0xc0..=0xdf => 2,
        0xe0..=0xef => 3,
        _ => 4,
    }
}
