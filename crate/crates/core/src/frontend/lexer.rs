use std::fmt;

use super::ast::{Operator, Pos};
use super::SyntaxError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keyword {
    Let,
    Load,
    Save,
    Print,
    Import,
}

impl Keyword {
    fn from_ident(s: &str) -> Option<Keyword> {
        Some(match s {
            "let" => Keyword::Let,
            "load" => Keyword::Load,
            "save" => Keyword::Save,
            "print" => Keyword::Print,
            "import" => Keyword::Import,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Let => "let",
            Keyword::Load => "load",
            Keyword::Save => "save",
            Keyword::Print => "print",
            Keyword::Import => "import",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Keyword(Keyword),
    Ident(String),
    Num(f64),
    Str(String),
    Op(Operator),
    LParen,
    RParen,
    Comma,
    /// The binding `=` of `let` and `load`.
    Assign,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Keyword(k) => write!(f, "keyword `{}`", k.as_str()),
            TokenKind::Ident(s) => write!(f, "identifier `{s}`"),
            TokenKind::Num(v) => write!(f, "number {v}"),
            TokenKind::Str(s) => write!(f, "string {s:?}"),
            TokenKind::Op(op) => write!(f, "operator `{op}`"),
            TokenKind::LParen => f.write_str("`(`"),
            TokenKind::RParen => f.write_str("`)`"),
            TokenKind::Comma => f.write_str("`,`"),
            TokenKind::Assign => f.write_str("`=`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub pos: Pos,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    col: u32,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn pos(&self) -> Pos {
        Pos { line: self.line, col: self.col }
    }
}

/// Splits imgql source text into tokens. `//` comments run to end of line.
pub fn tokenize(text: &str) -> Result<Vec<Token>, SyntaxError> {
    let mut cur = Cursor { chars: text.chars().peekable(), line: 1, col: 1 };
    let mut out = Vec::new();

    while let Some(c) = cur.peek() {
        let pos = cur.pos();
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        let kind = match c {
            '/' => {
                cur.bump();
                if cur.eat('/') {
                    while let Some(c) = cur.peek() {
                        if c == '\n' {
                            break;
                        }
                        cur.bump();
                    }
                    continue;
                }
                TokenKind::Op(Operator::Div)
            }
            '(' => {
                cur.bump();
                TokenKind::LParen
            }
            ')' => {
                cur.bump();
                TokenKind::RParen
            }
            ',' => {
                cur.bump();
                TokenKind::Comma
            }
            '!' => {
                cur.bump();
                TokenKind::Op(Operator::Not)
            }
            '&' => {
                cur.bump();
                TokenKind::Op(Operator::And)
            }
            '|' => {
                cur.bump();
                TokenKind::Op(Operator::Or)
            }
            '+' => {
                cur.bump();
                TokenKind::Op(Operator::Add)
            }
            '-' => {
                cur.bump();
                TokenKind::Op(Operator::Sub)
            }
            '*' => {
                cur.bump();
                TokenKind::Op(Operator::Mul)
            }
            '=' => {
                cur.bump();
                if cur.eat('.') {
                    TokenKind::Op(Operator::Eq)
                } else {
                    TokenKind::Assign
                }
            }
            '>' | '<' => {
                cur.bump();
                let inclusive = cur.eat('=');
                if !cur.eat('.') {
                    return Err(SyntaxError::new(
                        pos,
                        format!("expected `.` after `{c}{}`", if inclusive { "=" } else { "" }),
                    ));
                }
                TokenKind::Op(match (c, inclusive) {
                    ('>', false) => Operator::Gt,
                    ('>', true) => Operator::Ge,
                    ('<', false) => Operator::Lt,
                    _ => Operator::Le,
                })
            }
            '"' => {
                cur.bump();
                let mut s = String::new();
                loop {
                    match cur.bump() {
                        None | Some('\n') => {
                            return Err(SyntaxError::new(pos, "unterminated string literal"))
                        }
                        Some('"') => break,
                        Some('\\') => match cur.bump() {
                            Some('"') => s.push('"'),
                            Some('\\') => s.push('\\'),
                            Some('n') => s.push('\n'),
                            other => {
                                return Err(SyntaxError::new(
                                    cur.pos(),
                                    format!("invalid escape sequence {other:?}"),
                                ))
                            }
                        },
                        Some(c) => s.push(c),
                    }
                }
                TokenKind::Str(s)
            }
            c if c.is_ascii_digit() => lex_number(&mut cur, pos)?,
            c if c.is_alphabetic() => {
                let mut s = String::new();
                while let Some(c) = cur.peek() {
                    if c.is_alphanumeric() || c == '_' {
                        s.push(c);
                        cur.bump();
                    } else {
                        break;
                    }
                }
                match Keyword::from_ident(&s) {
                    Some(k) => TokenKind::Keyword(k),
                    None => TokenKind::Ident(s),
                }
            }
            other => {
                return Err(SyntaxError::new(pos, format!("unexpected character {other:?}")));
            }
        };
        out.push(Token { kind, pos });
    }
    Ok(out)
}

fn lex_number(cur: &mut Cursor<'_>, pos: Pos) -> Result<TokenKind, SyntaxError> {
    let mut s = String::new();
    let digits = |cur: &mut Cursor<'_>, s: &mut String| {
        while let Some(c) = cur.peek().filter(char::is_ascii_digit) {
            s.push(c);
            cur.bump();
        }
    };
    digits(cur, &mut s);
    if cur.peek() == Some('.') {
        // `1.` followed by a non-digit is not a number continuation.
        let mut ahead = cur.chars.clone();
        ahead.next();
        if ahead.peek().is_some_and(char::is_ascii_digit) {
            s.push('.');
            cur.bump();
            digits(cur, &mut s);
        }
    }
    if matches!(cur.peek(), Some('e' | 'E')) {
        s.push('e');
        cur.bump();
        if let Some(sign @ ('+' | '-')) = cur.peek() {
            s.push(sign);
            cur.bump();
        }
        let before = s.len();
        digits(cur, &mut s);
        if s.len() == before {
            return Err(SyntaxError::new(pos, "malformed exponent in number literal"));
        }
    }
    s.parse::<f64>()
        .map(TokenKind::Num)
        .map_err(|e| SyntaxError::new(pos, format!("invalid number literal: {e}")))
}
