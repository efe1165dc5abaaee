//! The line-oriented `.clg` text format.
//!
//! ```text
//! # comment
//! X1 -> 'a'
//! X2 -> X1 X1
//! X3 -> X2 ^ 4
//! X4 -> X3 [2..7)
//! start X4
//! ```
//!
//! Labels in the file are arbitrary positive integers; rules are
//! renumbered 1.. in file order.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use thiserror::Error;

use super::{CollageSystem, NtId, Rule};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("X{referent} is used before it is defined")]
    ForwardReference { referent: u64 },
    #[error("X{0} is defined twice")]
    DuplicateId(u64),
    #[error("start symbol X{0} is never defined")]
    UndefinedStart(u64),
    #[error("more than one start directive")]
    DuplicateStart,
    #[error("repetition count 2 is a concatenation; write `X{0} X{0}` instead")]
    RepeatTwo(u64),
    #[error("repetition count {0} is below 3")]
    RepeatTooSmall(BigUint),
    #[error("no rules")]
    Empty,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Nonterminal(u64),
    Arrow,
    Char(char),
    Caret,
    LBracket,
    DotDot,
    RParen,
    Number(BigUint),
    Start,
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl Lexer {
    fn new(src: &str, line: usize) -> Self {
        Lexer {
            chars: src.chars().collect(),
            pos: 0,
            line,
        }
    }

    fn err(&self, col: usize, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: self.line,
            col: col + 1,
            kind,
        }
    }

    fn syntax(&self, col: usize, msg: impl Into<String>) -> ParseError {
        self.err(col, ParseErrorKind::Syntax(msg.into()))
    }

    fn digits(&mut self) -> String {
        let begin = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.chars[begin..self.pos].iter().collect()
    }

    /// Next token with its 0-based column, or `None` at end of line or
    /// at a comment.
    fn next(&mut self) -> Result<Option<(usize, Token)>, ParseError> {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
        let col = self.pos;
        let Some(&c) = self.chars.get(self.pos) else {
            return Ok(None);
        };
        let tok = match c {
            '#' => {
                self.pos = self.chars.len();
                return Ok(None);
            }
            'X' => {
                self.pos += 1;
                let digits = self.digits();
                let id: u64 = digits
                    .parse()
                    .map_err(|_| self.syntax(col, "expected a nonterminal like X12"))?;
                if id == 0 {
                    return Err(self.syntax(col, "nonterminal ids start at 1"));
                }
                Token::Nonterminal(id)
            }
            '-' if self.chars.get(self.pos + 1) == Some(&'>') => {
                self.pos += 2;
                Token::Arrow
            }
            '.' if self.chars.get(self.pos + 1) == Some(&'.') => {
                self.pos += 2;
                Token::DotDot
            }
            '^' => {
                self.pos += 1;
                Token::Caret
            }
            '[' => {
                self.pos += 1;
                Token::LBracket
            }
            ')' => {
                self.pos += 1;
                Token::RParen
            }
            '\'' => {
                self.pos += 1;
                let ch = self.char_literal(col)?;
                if self.chars.get(self.pos) != Some(&'\'') {
                    return Err(self.syntax(col, "unterminated character literal"));
                }
                self.pos += 1;
                Token::Char(ch)
            }
            d if d.is_ascii_digit() => {
                let digits = self.digits();
                Token::Number(digits.parse().expect("ascii digits"))
            }
            _ if self.chars[self.pos..].starts_with(&['s', 't', 'a', 'r', 't']) => {
                self.pos += 5;
                Token::Start
            }
            other => return Err(self.syntax(col, format!("unexpected character {other:?}"))),
        };
        Ok(Some((col, tok)))
    }

    fn char_literal(&mut self, col: usize) -> Result<char, ParseError> {
        let Some(&c) = self.chars.get(self.pos) else {
            return Err(self.syntax(col, "unterminated character literal"));
        };
        self.pos += 1;
        if c != '\\' {
            if c == '\'' {
                return Err(self.syntax(col, "empty character literal"));
            }
            return Ok(c);
        }
        let Some(&e) = self.chars.get(self.pos) else {
            return Err(self.syntax(col, "unterminated escape"));
        };
        self.pos += 1;
        Ok(match e {
            '\\' => '\\',
            '\'' => '\'',
            'n' => '\n',
            't' => '\t',
            'r' => '\r',
            'u' => {
                if self.chars.get(self.pos) != Some(&'{') {
                    return Err(self.syntax(col, "expected \\u{...}"));
                }
                let begin = self.pos + 1;
                let end = self.chars[begin..]
                    .iter()
                    .position(|&c| c == '}')
                    .map(|p| begin + p)
                    .ok_or_else(|| self.syntax(col, "unterminated \\u{...}"))?;
                let hex: String = self.chars[begin..end].iter().collect();
                self.pos = end + 1;
                u32::from_str_radix(&hex, 16)
                    .ok()
                    .and_then(char::from_u32)
                    .ok_or_else(|| self.syntax(col, format!("invalid code point {hex}")))?
            }
            other => return Err(self.syntax(col, format!("unknown escape \\{other}"))),
        })
    }
}

/// Parses `.clg` text. Useless nonterminals and truncation bounds are left
/// for [`super::validate`]; repetition counts below 3 are rejected here.
pub fn parse_system(text: &str) -> Result<CollageSystem, ParseError> {
    let mut ids: HashMap<u64, NtId> = HashMap::new();
    let mut rules: Vec<Rule> = Vec::new();
    let mut start: Option<(usize, usize, u64)> = None;

    for (line_idx, line) in text.lines().enumerate() {
        let mut lx = Lexer::new(line, line_idx + 1);
        let mut toks = Vec::new();
        while let Some(t) = lx.next()? {
            toks.push(t);
        }
        if toks.is_empty() {
            continue;
        }
        let end_col = lx.chars.len();
        let tok_at = |i: usize| toks.get(i).map(|(_, t)| t);
        let col_at = |i: usize| toks.get(i).map_or(end_col, |(c, _)| *c);

        let resolve = |i: usize, ids: &HashMap<u64, NtId>| -> Result<NtId, ParseError> {
            match tok_at(i) {
                Some(Token::Nonterminal(label)) => ids
                    .get(label)
                    .copied()
                    .ok_or_else(|| lx.err(col_at(i), ParseErrorKind::ForwardReference { referent: *label })),
                _ => Err(lx.syntax(col_at(i), "expected a nonterminal")),
            }
        };
        let expect_end = |i: usize| -> Result<(), ParseError> {
            if toks.len() > i {
                Err(lx.syntax(col_at(i), "unexpected trailing input"))
            } else {
                Ok(())
            }
        };

        match tok_at(0) {
            Some(Token::Start) => {
                let Some(Token::Nonterminal(label)) = tok_at(1) else {
                    return Err(lx.syntax(col_at(1), "expected `start X<id>`"));
                };
                expect_end(2)?;
                if start.is_some() {
                    return Err(lx.err(col_at(0), ParseErrorKind::DuplicateStart));
                }
                start = Some((line_idx + 1, col_at(1) + 1, *label));
            }
            Some(Token::Nonterminal(label)) => {
                let label = *label;
                if tok_at(1) != Some(&Token::Arrow) {
                    return Err(lx.syntax(col_at(1), "expected `->`"));
                }
                if ids.contains_key(&label) {
                    return Err(lx.err(col_at(0), ParseErrorKind::DuplicateId(label)));
                }
                let rule = match (tok_at(2), tok_at(3)) {
                    (Some(Token::Char(c)), _) => {
                        expect_end(3)?;
                        Rule::Atomic(*c)
                    }
                    (Some(Token::Nonterminal(_)), Some(Token::Nonterminal(_))) => {
                        let y = resolve(2, &ids)?;
                        let z = resolve(3, &ids)?;
                        expect_end(4)?;
                        Rule::Concat(y, z)
                    }
                    (Some(Token::Nonterminal(base)), Some(Token::Caret)) => {
                        let y = resolve(2, &ids)?;
                        let Some(Token::Number(r)) = tok_at(4) else {
                            return Err(lx.syntax(col_at(4), "expected a repetition count"));
                        };
                        expect_end(5)?;
                        if *r == BigUint::from(2u8) {
                            return Err(lx.err(col_at(4), ParseErrorKind::RepeatTwo(*base)));
                        }
                        if r.to_u8().is_some_and(|v| v < 3) {
                            return Err(lx.err(col_at(4), ParseErrorKind::RepeatTooSmall(r.clone())));
                        }
                        Rule::Repeat(y, r.clone())
                    }
                    (Some(Token::Nonterminal(_)), Some(Token::LBracket)) => {
                        let y = resolve(2, &ids)?;
                        let (Some(Token::Number(b)), Some(Token::DotDot), Some(Token::Number(e)), Some(Token::RParen)) =
                            (tok_at(4), tok_at(5), tok_at(6), tok_at(7))
                        else {
                            return Err(lx.syntax(col_at(4), "expected `[b..e)`"));
                        };
                        expect_end(8)?;
                        Rule::Truncate(y, b.clone(), e.clone())
                    }
                    (Some(Token::Nonterminal(_)), _) => {
                        return Err(lx.syntax(col_at(3), "expected a nonterminal, `^`, or `[`"));
                    }
                    _ => return Err(lx.syntax(col_at(2), "expected a rule body")),
                };
                rules.push(rule);
                ids.insert(label, rules.len());
            }
            _ => return Err(lx.syntax(col_at(0), "expected a rule or a start directive")),
        }
    }

    if rules.is_empty() {
        return Err(ParseError {
            line: text.lines().count().max(1),
            col: 1,
            kind: ParseErrorKind::Empty,
        });
    }
    let start_id = match start {
        None => rules.len(),
        Some((line, col, label)) => *ids.get(&label).ok_or(ParseError {
            line,
            col,
            kind: ParseErrorKind::UndefinedStart(label),
        })?,
    };
    Ok(CollageSystem::new(rules, start_id).expect("ids resolved in file order"))
}

pub(crate) fn escape_char(c: char) -> String {
    match c {
        '\\' => "\\\\".into(),
        '\'' => "\\'".into(),
        '\n' => "\\n".into(),
        '\t' => "\\t".into(),
        '\r' => "\\r".into(),
        c if c.is_control() => format!("\\u{{{:x}}}", c as u32),
        c => c.to_string(),
    }
}

/// Writes `g` in `.clg` form; always ends with a `start` line.
pub fn serialize_system(g: &CollageSystem) -> String {
    let mut out = String::new();
    for id in g.ids() {
        writeln!(out, "X{id} -> {}", g.rule(id)).unwrap();
    }
    writeln!(out, "start X{}", g.start()).unwrap();
    out
}
