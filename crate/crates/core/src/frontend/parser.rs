use std::collections::HashSet;

use super::ast::{Command, CommandKind, Expr, ExprKind, Pos};
use super::lexer::{Keyword, Token, TokenKind};
use super::SyntaxError;

/// Expressions nested deeper than this are rejected instead of risking the
/// stack.
pub const MAX_NESTING: usize = 4096;

/// Parses a token stream into a command list.
pub fn parse(tokens: &[Token]) -> Result<Vec<Command>, SyntaxError> {
    let mut p = Parser { tokens, idx: 0, depth: 0 };
    let mut commands = Vec::new();
    let mut defined: HashSet<String> = HashSet::new();
    while !p.at_end() {
        let cmd = p.command()?;
        let name = match &cmd.kind {
            CommandKind::Let { name, .. } | CommandKind::Load { name, .. } => Some(name),
            _ => None,
        };
        if let Some(name) = name {
            if !defined.insert(name.clone()) {
                return Err(SyntaxError::new(cmd.pos, format!("`{name}` is defined more than once")));
            }
        }
        commands.push(cmd);
    }
    Ok(commands)
}

struct Parser<'t> {
    tokens: &'t [Token],
    idx: usize,
    depth: usize,
}

impl<'t> Parser<'t> {
    fn at_end(&self) -> bool {
        self.idx >= self.tokens.len()
    }

    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.idx)
    }

    fn end_pos(&self) -> Pos {
        self.tokens.last().map(|t| Pos { line: t.pos.line, col: t.pos.col + 1 }).unwrap_or_default()
    }

    fn next(&mut self, what: &str) -> Result<&'t Token, SyntaxError> {
        match self.tokens.get(self.idx) {
            Some(t) => {
                self.idx += 1;
                Ok(t)
            }
            None => Err(SyntaxError::new(self.end_pos(), format!("unexpected end of input, expected {what}"))),
        }
    }

    fn expect(&mut self, kind: &TokenKind, what: &str) -> Result<Pos, SyntaxError> {
        let t = self.next(what)?;
        if &t.kind == kind {
            Ok(t.pos)
        } else {
            Err(SyntaxError::new(t.pos, format!("expected {what}, found {}", t.kind)))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, SyntaxError> {
        let t = self.next(what)?;
        match &t.kind {
            TokenKind::Ident(s) => Ok(s.clone()),
            other => Err(SyntaxError::new(t.pos, format!("expected {what}, found {other}"))),
        }
    }

    fn string(&mut self, what: &str) -> Result<String, SyntaxError> {
        let t = self.next(what)?;
        match &t.kind {
            TokenKind::Str(s) if s.is_empty() => Err(SyntaxError::new(t.pos, format!("{what} must not be empty"))),
            TokenKind::Str(s) => Ok(s.clone()),
            other => Err(SyntaxError::new(t.pos, format!("expected {what}, found {other}"))),
        }
    }

    fn command(&mut self) -> Result<Command, SyntaxError> {
        let t = self.next("a command")?;
        let pos = t.pos;
        let kw = match t.kind {
            TokenKind::Keyword(k) => k,
            ref other => {
                return Err(SyntaxError::new(
                    pos,
                    format!("expected one of `let`, `load`, `save`, `print`, `import`, found {other}"),
                ))
            }
        };
        let kind = match kw {
            Keyword::Let => {
                let name = self.ident("a name after `let`")?;
                let mut params = Vec::new();
                if matches!(self.peek().map(|t| &t.kind), Some(TokenKind::LParen)) {
                    self.idx += 1;
                    loop {
                        let ppos = self.peek().map(|t| t.pos).unwrap_or_else(|| self.end_pos());
                        let param = self.ident("a parameter name")?;
                        if params.contains(&param) {
                            return Err(SyntaxError::new(ppos, format!("duplicate parameter `{param}` in `{name}`")));
                        }
                        params.push(param);
                        let t = self.next("`,` or `)`")?;
                        match t.kind {
                            TokenKind::Comma => continue,
                            TokenKind::RParen => break,
                            ref other => {
                                return Err(SyntaxError::new(t.pos, format!("expected `,` or `)`, found {other}")))
                            }
                        }
                    }
                }
                self.expect(&TokenKind::Assign, "`=`")?;
                let body = self.expr(0)?;
                CommandKind::Let { name, params, body }
            }
            Keyword::Load => {
                let name = self.ident("a name after `load`")?;
                self.expect(&TokenKind::Assign, "`=`")?;
                let path = self.string("a file path")?;
                CommandKind::Load { name, path }
            }
            Keyword::Save => {
                let path = self.string("a file path")?;
                let expr = self.expr(0)?;
                CommandKind::Save { path, expr }
            }
            Keyword::Print => {
                let label = self.string("a label")?;
                let expr = self.expr(0)?;
                CommandKind::Print { label, expr }
            }
            Keyword::Import => CommandKind::Import { path: self.string("a file path")? },
        };
        Ok(Command { kind, pos })
    }

    /// Precedence climbing over the infix operators; `min_prec` is the
    /// weakest operator this call may consume.
    fn expr(&mut self, min_prec: u8) -> Result<Expr, SyntaxError> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            let pos = self.peek().map(|t| t.pos).unwrap_or_else(|| self.end_pos());
            return Err(SyntaxError::new(pos, "expression nested too deeply"));
        }
        let mut lhs = self.unary()?;
        while let Some(Token { kind: TokenKind::Op(op), .. }) = self.peek() {
            let Some(prec) = op.infix_precedence() else { break };
            if prec < min_prec {
                break;
            }
            let op = *op;
            self.idx += 1;
            // Left associativity: the right operand only takes tighter operators.
            let rhs = self.expr(prec + 1)?;
            let pos = lhs.pos;
            lhs = Expr::new(ExprKind::Infix { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }, pos);
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        let t = self.next("an expression")?;
        let pos = t.pos;
        match &t.kind {
            TokenKind::Op(op) if op.is_prefix() => {
                self.depth += 1;
                if self.depth > MAX_NESTING {
                    return Err(SyntaxError::new(pos, "expression nested too deeply"));
                }
                let arg = self.unary()?;
                self.depth -= 1;
                Ok(Expr::new(ExprKind::Prefix { op: *op, arg: Box::new(arg) }, pos))
            }
            TokenKind::Num(v) => Ok(Expr::new(ExprKind::Num(*v), pos)),
            TokenKind::Ident(name) => {
                if !matches!(self.peek().map(|t| &t.kind), Some(TokenKind::LParen)) {
                    return Ok(Expr::new(ExprKind::Ident(name.clone()), pos));
                }
                self.idx += 1;
                let mut args = vec![self.expr(0)?];
                loop {
                    let t = self.next("`,` or `)`")?;
                    match t.kind {
                        TokenKind::Comma => args.push(self.expr(0)?),
                        TokenKind::RParen => break,
                        ref other => {
                            return Err(SyntaxError::new(t.pos, format!("expected `,` or `)`, found {other}")))
                        }
                    }
                }
                Ok(Expr::new(ExprKind::Apply { func: name.clone(), args }, pos))
            }
            TokenKind::LParen => {
                let inner = self.expr(0)?;
                self.expect(&TokenKind::RParen, "`)`")?;
                Ok(Expr::new(ExprKind::Paren(Box::new(inner)), pos))
            }
            other => Err(SyntaxError::new(pos, format!("expected an expression, found {other}"))),
        }
    }
}
