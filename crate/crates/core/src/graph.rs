//! Expansion of a parsed program into a hash-consed task DAG.
//!
//! Macros are substituted call-by-name: arguments are elaborated in the
//! caller's scope and bound to the macro parameters, so substitution is
//! capture-avoiding by construction. Every task goes through a hash-consing
//! table keyed on (opcode, payload, dependencies), so structurally equal
//! subexpressions become a single node no matter where they appear. Tasks
//! that no output depends on are dropped at the end.

use std::collections::{BinaryHeap, HashMap, HashSet};
use std::cmp::Reverse;
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::frontend::{self, Command, CommandKind, Expr, ExprKind, Operator, Pos, SyntaxError};
use crate::kernels::{ArithOp, Cmp};

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Op {
    Load,
    Save,
    Print,
    Const,
    Not,
    Neg,
    And,
    Or,
    Threshold(Cmp),
    Arith(ArithOp),
    Near,
    Reach,
    Intensity,
    Volume,
}

impl Op {
    pub fn name(self) -> &'static str {
        match self {
            Op::Load => "load",
            Op::Save => "save",
            Op::Print => "print",
            Op::Const => "const",
            Op::Not => "not",
            Op::Neg => "neg",
            Op::And => "and",
            Op::Or => "or",
            Op::Threshold(Cmp::Gt) => "gt",
            Op::Threshold(Cmp::Ge) => "ge",
            Op::Threshold(Cmp::Lt) => "lt",
            Op::Threshold(Cmp::Le) => "le",
            Op::Threshold(Cmp::Eq) => "eq",
            Op::Arith(ArithOp::Add) => "add",
            Op::Arith(ArithOp::Sub) => "sub",
            Op::Arith(ArithOp::Mul) => "mul",
            Op::Arith(ArithOp::Div) => "div",
            Op::Near => "near",
            Op::Reach => "reach",
            Op::Intensity => "intensity",
            Op::Volume => "volume",
        }
    }

    pub fn is_output(self) -> bool {
        matches!(self, Op::Save | Op::Print)
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Payload {
    None,
    Number(f64),
    /// File path of a load or save.
    Path(String),
    /// Label of a print.
    Label(String),
}

impl Payload {
    fn key(&self) -> PayloadKey {
        match self {
            Payload::None => PayloadKey::None,
            Payload::Number(v) => PayloadKey::Number(v.to_bits()),
            Payload::Path(s) => PayloadKey::Path(s.clone()),
            Payload::Label(s) => PayloadKey::Label(s.clone()),
        }
    }
}

impl fmt::Display for Payload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Payload::None => f.write_str("-"),
            Payload::Number(v) => write!(f, "{v}"),
            Payload::Path(s) | Payload::Label(s) => write!(f, "{s:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum PayloadKey {
    None,
    Number(u64),
    Path(String),
    Label(String),
}

/// Static type of a task's result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Ty {
    Number,
    BoolImage,
    U16Image,
    /// Outputs produce nothing.
    Unit,
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ty::Number => "number",
            Ty::BoolImage => "boolean image",
            Ty::U16Image => "intensity image",
            Ty::Unit => "nothing",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Task {
    pub op: Op,
    pub payload: Payload,
    pub deps: Vec<NodeId>,
    pub ty: Ty,
}

/// An immutable DAG of tasks. Node ids are dense and every dependency id is
/// smaller than the id of the node using it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TaskGraph {
    nodes: Vec<Task>,
    outputs: Vec<NodeId>,
    index: HashMap<(Op, PayloadKey, Vec<NodeId>), NodeId>,
}

impl TaskGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a task, returning the id of an existing identical task if there
    /// is one.
    ///
    /// # Panics
    /// If a dependency does not name an existing node.
    pub fn add(&mut self, op: Op, payload: Payload, deps: Vec<NodeId>, ty: Ty) -> NodeId {
        assert!(deps.iter().all(|&d| d < self.nodes.len()), "dependency on a node that does not exist");
        let key = (op, payload.key(), deps);
        if let Some(&id) = self.index.get(&key) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(Task { op, payload, deps: key.2.clone(), ty });
        self.index.insert(key, id);
        id
    }

    pub fn mark_output(&mut self, id: NodeId) {
        if !self.outputs.contains(&id) {
            self.outputs.push(id);
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn task(&self, id: NodeId) -> &Task {
        &self.nodes[id]
    }

    pub fn tasks(&self) -> impl Iterator<Item = (NodeId, &Task)> {
        self.nodes.iter().enumerate()
    }

    /// Output (save/print) nodes in program order.
    pub fn outputs(&self) -> &[NodeId] {
        &self.outputs
    }

    pub fn count_op(&self, op: Op) -> usize {
        self.nodes.iter().filter(|t| t.op == op).count()
    }

    /// Nodes that depend on each node, in ascending order.
    pub fn dependents(&self) -> Vec<Vec<NodeId>> {
        let mut out = vec![Vec::new(); self.nodes.len()];
        for (id, t) in self.tasks() {
            for &d in &t.deps {
                if !out[d].contains(&id) {
                    out[d].push(id);
                }
            }
        }
        out
    }

    /// Drops every node no output depends on and renumbers the rest,
    /// preserving relative order.
    pub fn collect_garbage(&mut self) {
        let mut live = vec![false; self.nodes.len()];
        let mut stack: Vec<NodeId> = self.outputs.clone();
        while let Some(id) = stack.pop() {
            if !std::mem::replace(&mut live[id], true) {
                stack.extend(&self.nodes[id].deps);
            }
        }
        let mut remap = vec![usize::MAX; self.nodes.len()];
        let mut kept = TaskGraph::new();
        for (id, t) in self.nodes.iter().enumerate() {
            if live[id] {
                let deps = t.deps.iter().map(|&d| remap[d]).collect();
                remap[id] = kept.add(t.op, t.payload.clone(), deps, t.ty);
            }
        }
        for &o in &self.outputs {
            kept.mark_output(remap[o]);
        }
        *self = kept;
    }

    /// One line per node: `id opcode payload deps`, deps comma-separated or
    /// `-` when there are none.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (id, t) in self.tasks() {
            let deps = if t.deps.is_empty() {
                "-".to_string()
            } else {
                t.deps.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",")
            };
            let _ = writeln!(out, "{id} {} {} {deps}", t.op, t.payload);
        }
        out
    }
}

/// Every node after all of its dependencies; among ready nodes the
/// smallest id goes first.
pub fn toposort(graph: &TaskGraph) -> Vec<NodeId> {
    let dependents = graph.dependents();
    let mut pending: Vec<usize> = graph.tasks().map(|(_, t)| distinct(&t.deps)).collect();
    let mut ready: BinaryHeap<Reverse<NodeId>> =
        (0..graph.len()).filter(|&i| pending[i] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(graph.len());
    while let Some(Reverse(id)) = ready.pop() {
        order.push(id);
        for &d in &dependents[id] {
            pending[d] -= 1;
            if pending[d] == 0 {
                ready.push(Reverse(d));
            }
        }
    }
    order
}

pub(crate) fn distinct(deps: &[NodeId]) -> usize {
    let mut v = deps.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

#[derive(Debug, thiserror::Error)]
#[error("{}{pos}: {kind}", file.as_deref().map(|f| format!("{f}:")).unwrap_or_default())]
pub struct ExpandError {
    /// Import path of the file the error is in; `None` for the main program.
    pub file: Option<String>,
    pub pos: Pos,
    pub kind: ExpandErrorKind,
}

#[derive(Debug, thiserror::Error)]
pub enum ExpandErrorKind {
    #[error("unbound identifier `{0}`")]
    Unbound(String),
    #[error("`{0}` is used inside its own definition")]
    Recursive(String),
    #[error("`{name}` expects {expected} argument(s), got {found}")]
    Arity { name: String, expected: usize, found: usize },
    #[error("`{0}` is a function and must be applied to arguments")]
    NotAValue(String),
    #[error("`{0}` is not a function")]
    NotAFunction(String),
    #[error("type error: {0}")]
    Type(String),
    #[error("`{0}` is already defined")]
    Duplicate(String),
    #[error("cannot import {path:?}: {reason}")]
    ImportNotFound { path: String, reason: String },
    #[error("in import {path:?}: {error}")]
    ImportSyntax { path: String, error: SyntaxError },
}

/// Supplies the text of imported files.
pub trait ImportResolver {
    /// Returns a key identifying the file (used to import it at most once)
    /// and its contents.
    fn resolve(&mut self, path: &str) -> Result<(String, String), String>;
}

/// Resolves imports on the file system, relative paths against `base`.
#[derive(Debug, Clone, Default)]
pub struct FsResolver {
    pub base: PathBuf,
}

impl FsResolver {
    pub fn new(base: impl Into<PathBuf>) -> Self {
        FsResolver { base: base.into() }
    }
}

impl ImportResolver for FsResolver {
    fn resolve(&mut self, path: &str) -> Result<(String, String), String> {
        let full = resolve_path(&self.base, path);
        let text = std::fs::read_to_string(&full).map_err(|e| format!("{}: {e}", full.display()))?;
        let key = full.canonicalize().unwrap_or(full).display().to_string();
        Ok((key, text))
    }
}

/// Resolves imports from an in-memory table.
#[derive(Debug, Clone, Default)]
pub struct MapResolver(pub HashMap<String, String>);

impl ImportResolver for MapResolver {
    fn resolve(&mut self, path: &str) -> Result<(String, String), String> {
        self.0.get(path).map(|t| (path.to_string(), t.clone())).ok_or_else(|| "no such file".to_string())
    }
}

pub fn resolve_path(base: &Path, path: &str) -> PathBuf {
    let p = Path::new(path);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Expands a program into a task graph.
pub fn expand(program: &[Command], resolver: &mut dyn ImportResolver) -> Result<TaskGraph, ExpandError> {
    let mut ex = Expander::new(resolver);
    ex.include(program, None)?;
    Ok(ex.finish())
}

/// An elaborated expression: the node computing it and its type.
#[derive(Debug, Clone, Copy)]
struct Operand {
    id: NodeId,
    ty: Ty,
}

#[derive(Debug, Clone)]
enum Binding {
    Value(Operand),
    Macro { params: Vec<String>, body: Expr, file: Option<String> },
}

struct Global {
    order: usize,
    binding: Binding,
}

/// Incremental expander: feed it command lists (a prelude, then a program)
/// with [`Expander::include`], then take the graph with
/// [`Expander::finish`].
pub struct Expander<'r> {
    resolver: &'r mut dyn ImportResolver,
    graph: TaskGraph,
    globals: HashMap<String, Global>,
    imported: HashSet<String>,
    next_order: usize,
}

struct Scope<'a> {
    /// Only globals defined before this point are visible.
    order: usize,
    /// Name of the macro being expanded, to report self-reference.
    defining: Option<&'a str>,
    params: &'a HashMap<String, Operand>,
    file: &'a Option<String>,
}

impl<'r> Expander<'r> {
    pub fn new(resolver: &'r mut dyn ImportResolver) -> Self {
        Expander { resolver, graph: TaskGraph::new(), globals: HashMap::new(), imported: HashSet::new(), next_order: 0 }
    }

    /// Elaborates commands into the graph. `file` names the import the
    /// commands came from, for error messages.
    pub fn include(&mut self, program: &[Command], file: Option<&str>) -> Result<(), ExpandError> {
        let file = file.map(str::to_string);
        let err = |pos: Pos, kind| ExpandError { file: file.clone(), pos, kind };
        let no_params = HashMap::new();
        for cmd in program {
            let order = self.next_order;
            self.next_order += 1;
            let scope = Scope { order, defining: None, params: &no_params, file: &file };
            match &cmd.kind {
                CommandKind::Let { name, params, body } => {
                    self.check_fresh(name, cmd.pos, &file)?;
                    let binding = if params.is_empty() {
                        let scope = Scope { defining: Some(name), ..scope };
                        Binding::Value(self.elaborate(body, &scope)?)
                    } else {
                        self.check_body(name, params, body, order, &file)?;
                        Binding::Macro { params: params.clone(), body: body.clone(), file: file.clone() }
                    };
                    self.globals.insert(name.clone(), Global { order, binding });
                }
                CommandKind::Load { name, path } => {
                    self.check_fresh(name, cmd.pos, &file)?;
                    let id = self.graph.add(Op::Load, Payload::Path(path.clone()), vec![], Ty::U16Image);
                    self.globals.insert(name.clone(), Global { order, binding: Binding::Value(Operand { id, ty: Ty::U16Image }) });
                }
                CommandKind::Save { path, expr } => {
                    let v = self.elaborate(expr, &scope)?;
                    if !matches!(v.ty, Ty::BoolImage | Ty::U16Image) {
                        return Err(err(expr.pos, ExpandErrorKind::Type(format!("save needs an image, got a {}", v.ty))));
                    }
                    let id = self.graph.add(Op::Save, Payload::Path(path.clone()), vec![v.id], Ty::Unit);
                    self.graph.mark_output(id);
                }
                CommandKind::Print { label, expr } => {
                    let v = self.elaborate(expr, &scope)?;
                    if v.ty != Ty::Number {
                        return Err(err(expr.pos, ExpandErrorKind::Type(format!("print needs a number, got a {}", v.ty))));
                    }
                    let id = self.graph.add(Op::Print, Payload::Label(label.clone()), vec![v.id], Ty::Unit);
                    self.graph.mark_output(id);
                }
                CommandKind::Import { path } => {
                    let (key, text) = self
                        .resolver
                        .resolve(path)
                        .map_err(|reason| err(cmd.pos, ExpandErrorKind::ImportNotFound { path: path.clone(), reason }))?;
                    if !self.imported.insert(key) {
                        continue;
                    }
                    let cmds = frontend::parse_str(&text).map_err(|error| {
                        err(cmd.pos, ExpandErrorKind::ImportSyntax { path: path.clone(), error })
                    })?;
                    self.include(&cmds, Some(path))?;
                }
            }
        }
        Ok(())
    }

    pub fn finish(mut self) -> TaskGraph {
        self.graph.collect_garbage();
        self.graph
    }

    fn check_fresh(&self, name: &str, pos: Pos, file: &Option<String>) -> Result<(), ExpandError> {
        if self.globals.contains_key(name) || builtin(name).is_some() {
            return Err(ExpandError { file: file.clone(), pos, kind: ExpandErrorKind::Duplicate(name.into()) });
        }
        Ok(())
    }

    /// Name resolution and arity checks for a macro body, so errors in
    /// macros are reported even if they are never called.
    fn check_body(&self, name: &str, params: &[String], body: &Expr, order: usize, file: &Option<String>) -> Result<(), ExpandError> {
        let err = |pos, kind| Err(ExpandError { file: file.clone(), pos, kind });
        match &body.kind {
            ExprKind::Num(_) => Ok(()),
            ExprKind::Ident(id) => {
                if params.contains(id) {
                    return Ok(());
                }
                if id == name {
                    return err(body.pos, ExpandErrorKind::Recursive(id.clone()));
                }
                match self.visible(id, order) {
                    Some(Binding::Value(_)) => Ok(()),
                    Some(Binding::Macro { .. }) => err(body.pos, ExpandErrorKind::NotAValue(id.clone())),
                    None if builtin(id).is_some() => err(body.pos, ExpandErrorKind::NotAValue(id.clone())),
                    None => err(body.pos, ExpandErrorKind::Unbound(id.clone())),
                }
            }
            ExprKind::Apply { func, args } => {
                if func == name {
                    return err(body.pos, ExpandErrorKind::Recursive(func.clone()));
                }
                let expected = if params.contains(func) {
                    return err(body.pos, ExpandErrorKind::NotAFunction(func.clone()));
                } else if let Some(Binding::Macro { params, .. }) = self.visible(func, order) {
                    params.len()
                } else if let Some(Binding::Value(_)) = self.visible(func, order) {
                    return err(body.pos, ExpandErrorKind::NotAFunction(func.clone()));
                } else if let Some(b) = builtin(func) {
                    b.arity()
                } else {
                    return err(body.pos, ExpandErrorKind::Unbound(func.clone()));
                };
                if expected != args.len() {
                    return err(body.pos, ExpandErrorKind::Arity { name: func.clone(), expected, found: args.len() });
                }
                args.iter().try_for_each(|a| self.check_body(name, params, a, order, file))
            }
            ExprKind::Infix { lhs, rhs, .. } => {
                self.check_body(name, params, lhs, order, file)?;
                self.check_body(name, params, rhs, order, file)
            }
            ExprKind::Prefix { arg, .. } => self.check_body(name, params, arg, order, file),
            ExprKind::Paren(inner) => self.check_body(name, params, inner, order, file),
        }
    }

    fn visible(&self, name: &str, order: usize) -> Option<&Binding> {
        self.globals.get(name).filter(|g| g.order < order).map(|g| &g.binding)
    }

    fn elaborate(&mut self, e: &Expr, scope: &Scope<'_>) -> Result<Operand, ExpandError> {
        let err = |kind| ExpandError { file: scope.file.clone(), pos: e.pos, kind };
        match &e.kind {
            ExprKind::Num(v) => Ok(self.node(Op::Const, Payload::Number(*v), vec![], Ty::Number)),
            ExprKind::Paren(inner) => self.elaborate(inner, scope),
            ExprKind::Ident(name) => {
                if let Some(&v) = scope.params.get(name) {
                    return Ok(v);
                }
                if scope.defining == Some(name.as_str()) {
                    return Err(err(ExpandErrorKind::Recursive(name.clone())));
                }
                match self.visible(name, scope.order) {
                    Some(Binding::Value(v)) => Ok(*v),
                    Some(Binding::Macro { .. }) => Err(err(ExpandErrorKind::NotAValue(name.clone()))),
                    None if builtin(name).is_some() => Err(err(ExpandErrorKind::NotAValue(name.clone()))),
                    None => Err(err(ExpandErrorKind::Unbound(name.clone()))),
                }
            }
            ExprKind::Prefix { op, arg } => {
                let a = self.elaborate(arg, scope)?;
                let (op, want) = match op {
                    Operator::Not => (Op::Not, Ty::BoolImage),
                    Operator::Sub => (Op::Neg, Ty::Number),
                    other => return Err(err(ExpandErrorKind::Type(format!("`{other}` is not a prefix operator")))),
                };
                expect_ty(a, want, op.name()).map_err(|m| err(ExpandErrorKind::Type(m)))?;
                Ok(self.node(op, Payload::None, vec![a.id], want))
            }
            ExprKind::Infix { op, lhs, rhs } => {
                let l = self.elaborate(lhs, scope)?;
                let r = self.elaborate(rhs, scope)?;
                let (task, lt, rt, out) = match op {
                    Operator::And => (Op::And, Ty::BoolImage, Ty::BoolImage, Ty::BoolImage),
                    Operator::Or => (Op::Or, Ty::BoolImage, Ty::BoolImage, Ty::BoolImage),
                    Operator::Add => (Op::Arith(ArithOp::Add), Ty::Number, Ty::Number, Ty::Number),
                    Operator::Sub => (Op::Arith(ArithOp::Sub), Ty::Number, Ty::Number, Ty::Number),
                    Operator::Mul => (Op::Arith(ArithOp::Mul), Ty::Number, Ty::Number, Ty::Number),
                    Operator::Div => (Op::Arith(ArithOp::Div), Ty::Number, Ty::Number, Ty::Number),
                    Operator::Gt => (Op::Threshold(Cmp::Gt), Ty::U16Image, Ty::Number, Ty::BoolImage),
                    Operator::Ge => (Op::Threshold(Cmp::Ge), Ty::U16Image, Ty::Number, Ty::BoolImage),
                    Operator::Lt => (Op::Threshold(Cmp::Lt), Ty::U16Image, Ty::Number, Ty::BoolImage),
                    Operator::Le => (Op::Threshold(Cmp::Le), Ty::U16Image, Ty::Number, Ty::BoolImage),
                    Operator::Eq => (Op::Threshold(Cmp::Eq), Ty::U16Image, Ty::Number, Ty::BoolImage),
                    Operator::Not => return Err(err(ExpandErrorKind::Type("`!` is not an infix operator".into()))),
                };
                expect_ty(l, lt, op.symbol()).map_err(|m| err(ExpandErrorKind::Type(m)))?;
                expect_ty(r, rt, op.symbol()).map_err(|m| err(ExpandErrorKind::Type(m)))?;
                Ok(self.node(task, Payload::None, vec![l.id, r.id], out))
            }
            ExprKind::Apply { func, args } => {
                if scope.defining == Some(func.as_str()) {
                    return Err(err(ExpandErrorKind::Recursive(func.clone())));
                }
                if scope.params.contains_key(func) {
                    return Err(err(ExpandErrorKind::NotAFunction(func.clone())));
                }
                match self.visible(func, scope.order).cloned() {
                    Some(Binding::Value(_)) => Err(err(ExpandErrorKind::NotAFunction(func.clone()))),
                    Some(Binding::Macro { params, body, file }) => {
                        if params.len() != args.len() {
                            return Err(err(ExpandErrorKind::Arity {
                                name: func.clone(),
                                expected: params.len(),
                                found: args.len(),
                            }));
                        }
                        let mut bound = HashMap::new();
                        for (p, a) in params.iter().zip(args) {
                            bound.insert(p.clone(), self.elaborate(a, scope)?);
                        }
                        let order = self.globals[func].order;
                        let inner = Scope { order, defining: Some(func), params: &bound, file: &file };
                        self.elaborate(&body, &inner)
                    }
                    None => {
                        let Some(b) = builtin(func) else {
                            return Err(err(ExpandErrorKind::Unbound(func.clone())));
                        };
                        if b.arity() != args.len() {
                            return Err(err(ExpandErrorKind::Arity {
                                name: func.clone(),
                                expected: b.arity(),
                                found: args.len(),
                            }));
                        }
                        let mut deps = Vec::with_capacity(args.len());
                        for (a, &want) in args.iter().zip(b.params) {
                            let v = self.elaborate(a, scope)?;
                            expect_ty(v, want, func).map_err(|m| {
                                ExpandError { file: scope.file.clone(), pos: a.pos, kind: ExpandErrorKind::Type(m) }
                            })?;
                            deps.push(v.id);
                        }
                        Ok(self.node(b.op, Payload::None, deps, b.result))
                    }
                }
            }
        }
    }

    fn node(&mut self, op: Op, payload: Payload, deps: Vec<NodeId>, ty: Ty) -> Operand {
        Operand { id: self.graph.add(op, payload, deps, ty), ty }
    }
}

/// Intensity images are accepted where a boolean image is expected; nonzero
/// pixels read as true.
fn expect_ty(v: Operand, want: Ty, what: &str) -> Result<(), String> {
    if v.ty == want || (want == Ty::BoolImage && v.ty == Ty::U16Image) {
        Ok(())
    } else {
        Err(format!("`{what}` expects a {want}, got a {}", v.ty))
    }
}

struct Builtin {
    op: Op,
    params: &'static [Ty],
    result: Ty,
}

impl Builtin {
    fn arity(&self) -> usize {
        self.params.len()
    }
}

fn builtin(name: &str) -> Option<Builtin> {
    Some(match name {
        "near" => Builtin { op: Op::Near, params: &[Ty::BoolImage], result: Ty::BoolImage },
        "reach" => Builtin { op: Op::Reach, params: &[Ty::BoolImage, Ty::BoolImage], result: Ty::BoolImage },
        "intensity" => Builtin { op: Op::Intensity, params: &[Ty::U16Image], result: Ty::U16Image },
        "volume" => Builtin { op: Op::Volume, params: &[Ty::BoolImage], result: Ty::Number },
        _ => return None,
    })
}

/// Names of the built-in functions.
pub const BUILTINS: [&str; 4] = ["near", "reach", "intensity", "volume"];
