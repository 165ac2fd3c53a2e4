use std::fmt;

/// Line/column of a token, both 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Operator symbols usable in infix or prefix position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Operator {
    Not,
    And,
    Or,
    Add,
    Sub,
    Mul,
    Div,
    Gt,
    Ge,
    Lt,
    Le,
    Eq,
}

impl Operator {
    pub const ALL: [Operator; 12] = [
        Operator::Not,
        Operator::And,
        Operator::Or,
        Operator::Add,
        Operator::Sub,
        Operator::Mul,
        Operator::Div,
        Operator::Gt,
        Operator::Ge,
        Operator::Lt,
        Operator::Le,
        Operator::Eq,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Operator::Not => "!",
            Operator::And => "&",
            Operator::Or => "|",
            Operator::Add => "+",
            Operator::Sub => "-",
            Operator::Mul => "*",
            Operator::Div => "/",
            Operator::Gt => ">.",
            Operator::Ge => ">=.",
            Operator::Lt => "<.",
            Operator::Le => "<=.",
            Operator::Eq => "=.",
        }
    }

    /// Binding strength when used infix; higher binds tighter. `None` for
    /// prefix-only operators.
    pub fn infix_precedence(self) -> Option<u8> {
        match self {
            Operator::Or => Some(1),
            Operator::And => Some(2),
            Operator::Gt | Operator::Ge | Operator::Lt | Operator::Le | Operator::Eq => Some(3),
            Operator::Add | Operator::Sub => Some(4),
            Operator::Mul | Operator::Div => Some(5),
            Operator::Not => None,
        }
    }

    pub fn is_prefix(self) -> bool {
        matches!(self, Operator::Not | Operator::Sub)
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// An expression together with the position of its first token.
///
/// Equality ignores positions, so a re-parsed pretty-printed tree compares
/// equal to the original.
#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Num(f64),
    Ident(String),
    Apply { func: String, args: Vec<Expr> },
    Infix { op: Operator, lhs: Box<Expr>, rhs: Box<Expr> },
    Prefix { op: Operator, arg: Box<Expr> },
    Paren(Box<Expr>),
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Expr {
    pub fn new(kind: ExprKind, pos: Pos) -> Self {
        Expr { kind, pos }
    }

    /// Expression with a default position, for building trees in code.
    pub fn synthetic(kind: ExprKind) -> Self {
        Expr { kind, pos: Pos::default() }
    }

    pub fn num(v: f64) -> Self {
        Self::synthetic(ExprKind::Num(v))
    }

    pub fn ident(name: impl Into<String>) -> Self {
        Self::synthetic(ExprKind::Ident(name.into()))
    }

    pub fn apply(func: impl Into<String>, args: Vec<Expr>) -> Self {
        Self::synthetic(ExprKind::Apply { func: func.into(), args })
    }

    pub fn infix(op: Operator, lhs: Expr, rhs: Expr) -> Self {
        Self::synthetic(ExprKind::Infix { op, lhs: Box::new(lhs), rhs: Box::new(rhs) })
    }

    pub fn prefix(op: Operator, arg: Expr) -> Self {
        Self::synthetic(ExprKind::Prefix { op, arg: Box::new(arg) })
    }

    pub fn paren(inner: Expr) -> Self {
        Self::synthetic(ExprKind::Paren(Box::new(inner)))
    }

    /// Number of AST nodes, counting parentheses as transparent.
    pub fn size(&self) -> usize {
        match &self.kind {
            ExprKind::Num(_) | ExprKind::Ident(_) => 1,
            ExprKind::Apply { args, .. } => 1 + args.iter().map(Expr::size).sum::<usize>(),
            ExprKind::Infix { lhs, rhs, .. } => 1 + lhs.size() + rhs.size(),
            ExprKind::Prefix { arg, .. } => 1 + arg.size(),
            ExprKind::Paren(inner) => inner.size(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Command {
    pub kind: CommandKind,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CommandKind {
    Let { name: String, params: Vec<String>, body: Expr },
    Load { name: String, path: String },
    Save { path: String, expr: Expr },
    Print { label: String, expr: Expr },
    Import { path: String },
}

impl PartialEq for Command {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Command {
    pub fn synthetic(kind: CommandKind) -> Self {
        Command { kind, pos: Pos::default() }
    }
}
