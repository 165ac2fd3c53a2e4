use std::fmt::Write;

use super::ast::{Command, CommandKind, Expr, ExprKind};

/// Renders an expression as imgql source. Parentheses appear exactly where
/// the tree has `Paren` nodes.
pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e);
    out
}

/// Renders a program, one command per line.
pub fn print_program(cmds: &[Command]) -> String {
    let mut out = String::new();
    for c in cmds {
        write_command(&mut out, c);
        out.push('\n');
    }
    out
}

pub fn print_command(c: &Command) -> String {
    let mut out = String::new();
    write_command(&mut out, c);
    out
}

fn write_command(out: &mut String, c: &Command) {
    match &c.kind {
        CommandKind::Let { name, params, body } => {
            out.push_str("let ");
            out.push_str(name);
            if !params.is_empty() {
                let _ = write!(out, "({})", params.join(", "));
            }
            out.push_str(" = ");
            write_expr(out, body);
        }
        CommandKind::Load { name, path } => {
            let _ = write!(out, "load {name} = {}", quote(path));
        }
        CommandKind::Save { path, expr } => {
            let _ = write!(out, "save {} ", quote(path));
            write_expr(out, expr);
        }
        CommandKind::Print { label, expr } => {
            let _ = write!(out, "print {} ", quote(label));
            write_expr(out, expr);
        }
        CommandKind::Import { path } => {
            let _ = write!(out, "import {}", quote(path));
        }
    }
}

fn write_expr(out: &mut String, e: &Expr) {
    match &e.kind {
        // `{}` on f64 is the shortest representation that parses back exactly.
        ExprKind::Num(v) => {
            let _ = write!(out, "{v}");
        }
        ExprKind::Ident(name) => out.push_str(name),
        ExprKind::Apply { func, args } => {
            out.push_str(func);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, a);
            }
            out.push(')');
        }
        ExprKind::Infix { op, lhs, rhs } => {
            write_expr(out, lhs);
            let _ = write!(out, " {op} ");
            write_expr(out, rhs);
        }
        ExprKind::Prefix { op, arg } => {
            out.push_str(op.symbol());
            write_expr(out, arg);
        }
        ExprKind::Paren(inner) => {
            out.push('(');
            write_expr(out, inner);
            out.push(')');
        }
    }
}

fn quote(s: &str) -> String {
    let mut q = String::with_capacity(s.len() + 2);
    q.push('"');
    for c in s.chars() {
        match c {
            '"' => q.push_str("\\\""),
            '\\' => q.push_str("\\\\"),
            '\n' => q.push_str("\\n"),
            c => q.push(c),
        }
    }
    q.push('"');
    q
}
