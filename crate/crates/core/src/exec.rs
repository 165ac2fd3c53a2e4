//! Evaluation of a task graph.
//!
//! Tasks whose dependencies have all completed are spawned onto a rayon pool
//! of the requested size; kernels inside a task parallelise over pixels on
//! the same pool. Each node is evaluated once and its value kept for every
//! dependent. A failure stops further scheduling and is reported with the
//! failing node.

use std::borrow::Cow;
use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, AtomicU32, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use log::{debug, info};
use serde::Serialize;

use crate::ccl::{CclConfig, CclStats};
use crate::graph::{self, NodeId, Op, Payload, TaskGraph};
use crate::image::{self, BoolImage, ImageError, U16Image, Value};
use crate::kernels::{self, KernelError};
use crate::reach::{self, ReachError};

#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Worker threads; 0 uses one per available core.
    pub workers: usize,
    pub ccl: CclConfig,
    /// Relative load/save paths are resolved against this directory.
    pub base_dir: PathBuf,
    /// When false, save tasks compute their value but write nothing.
    pub write_outputs: bool,
    /// Images served to `load` tasks by path instead of reading the file.
    pub preloaded: HashMap<String, Arc<U16Image>>,
    /// When set, every reach task writes its intermediate CCL label images
    /// here as colour PNGs.
    pub ccl_dump_dir: Option<PathBuf>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            workers: 0,
            ccl: CclConfig::default(),
            base_dir: PathBuf::from("."),
            write_outputs: true,
            preloaded: HashMap::new(),
            ccl_dump_dir: None,
        }
    }
}

impl RunOptions {
    pub fn with_workers(workers: usize) -> Self {
        RunOptions { workers, ..Self::default() }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TaskError {
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Reach(#[from] ReachError),
    #[error("unexpected operand: {0}")]
    Operand(String),
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("task {node} ({op}) failed: {cause}")]
    Task { node: NodeId, op: Op, cause: TaskError },
    #[error("cannot build worker pool: {0}")]
    Pool(String),
}

/// Lifecycle of a node during a run.
#[derive(Debug, Clone, Default)]
pub enum TaskState {
    #[default]
    Pending,
    Running,
    Done(Value),
    Failed(String),
}

#[derive(Debug, Clone, Serialize)]
pub struct TaskRecord {
    pub node: NodeId,
    pub op: String,
    pub payload: String,
    /// Microseconds since the start of computation.
    pub start_us: u64,
    pub end_us: u64,
    pub millis: f64,
    /// Number of times the node was evaluated in this run.
    pub evaluations: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct PrintRecord {
    pub node: NodeId,
    pub label: String,
    pub value: f64,
}

impl PrintRecord {
    /// `label=value`, the value with at most 6 significant digits.
    pub fn line(&self) -> String {
        format!("{}={}", self.label, format_number(self.value))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CclRecord {
    pub node: NodeId,
    #[serde(flatten)]
    pub stats: CclStats,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub workers: usize,
    pub task_count: usize,
    /// From `starting computation` until the last output completed.
    pub computation_ms: f64,
    /// One record per evaluated node, ordered by node id.
    pub tasks: Vec<TaskRecord>,
    /// Print outputs in program order.
    pub prints: Vec<PrintRecord>,
    /// Paths written by save tasks, in program order.
    pub saved: Vec<String>,
    pub ccl: Vec<CclRecord>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Event {
    pub node: NodeId,
    pub start_us: u64,
    pub end_us: u64,
}

/// Task executions ordered by start time (ties by node id).
pub fn completion_events(report: &RunReport) -> Vec<Event> {
    let mut ev: Vec<Event> =
        report.tasks.iter().map(|t| Event { node: t.node, start_us: t.start_us, end_us: t.end_us }).collect();
    ev.sort_by_key(|e| (e.start_us, e.node));
    ev
}

#[derive(Debug)]
pub struct RunOutput {
    pub report: RunReport,
    /// For every output node, the value it consumed (the saved image or the
    /// printed number).
    pub values: HashMap<NodeId, Value>,
}

impl RunOutput {
    /// Value consumed by the save task writing `path`.
    pub fn saved(&self, graph: &TaskGraph, path: &str) -> Option<&Value> {
        graph.outputs().iter().find_map(|&o| match &graph.task(o).payload {
            Payload::Path(p) if p == path => self.values.get(&o),
            _ => None,
        })
    }
}

struct Ctx<'g> {
    graph: &'g TaskGraph,
    opts: &'g RunOptions,
    dependents: Vec<Vec<NodeId>>,
    pending: Vec<AtomicUsize>,
    states: Vec<Mutex<TaskState>>,
    evaluations: Vec<AtomicU32>,
    timings: Vec<Mutex<Option<(u64, u64)>>>,
    ccl: Mutex<Vec<CclRecord>>,
    failed: AtomicBool,
    failure: Mutex<Option<RunError>>,
    t0: Instant,
}

/// Runs every output of `graph`.
pub fn run(graph: &TaskGraph, opts: &RunOptions) -> Result<RunOutput, RunError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if opts.workers > 0 {
        builder = builder.num_threads(opts.workers);
    }
    let pool = builder.build().map_err(|e| RunError::Pool(e.to_string()))?;
    let workers = pool.current_num_threads();

    let n = graph.len();
    let ctx = Ctx {
        graph,
        opts,
        dependents: graph.dependents(),
        pending: graph.tasks().map(|(_, t)| AtomicUsize::new(graph::distinct(&t.deps))).collect(),
        states: (0..n).map(|_| Mutex::new(TaskState::Pending)).collect(),
        evaluations: (0..n).map(|_| AtomicU32::new(0)).collect(),
        timings: (0..n).map(|_| Mutex::new(None)).collect(),
        ccl: Mutex::new(Vec::new()),
        failed: AtomicBool::new(false),
        failure: Mutex::new(None),
        t0: Instant::now(),
    };

    info!("starting computation");
    let t0 = Instant::now();
    pool.install(|| {
        rayon::scope(|s| {
            for id in 0..n {
                if ctx.pending[id].load(Ordering::Relaxed) == 0 {
                    spawn(s, &ctx, id);
                }
            }
        })
    });
    let computation_ms = t0.elapsed().as_secs_f64() * 1e3;

    if let Some(err) = ctx.failure.into_inner().unwrap() {
        return Err(err);
    }

    let states: Vec<TaskState> = ctx.states.into_iter().map(|m| m.into_inner().unwrap()).collect();
    let value_of = |id: NodeId| match &states[id] {
        TaskState::Done(v) => v.clone(),
        other => panic!("node {id} finished in state {other:?}"),
    };
    let mut tasks = Vec::with_capacity(n);
    for (id, t) in graph.tasks() {
        let (start_us, end_us) = ctx.timings[id].lock().unwrap().expect("every node ran");
        tasks.push(TaskRecord {
            node: id,
            op: t.op.name().to_string(),
            payload: t.payload.to_string(),
            start_us,
            end_us,
            millis: (end_us - start_us) as f64 / 1e3,
            evaluations: ctx.evaluations[id].load(Ordering::Relaxed),
        });
    }
    let mut values = HashMap::new();
    let mut prints = Vec::new();
    let mut saved = Vec::new();
    for &o in graph.outputs() {
        let task = graph.task(o);
        let v = value_of(task.deps[0]);
        match &task.payload {
            Payload::Label(label) => prints.push(PrintRecord {
                node: o,
                label: label.clone(),
                value: v.as_number().expect("print of a number"),
            }),
            Payload::Path(p) => saved.push(p.clone()),
            _ => {}
        }
        values.insert(o, v);
    }
    let mut ccl = ctx.ccl.into_inner().unwrap();
    ccl.sort_by_key(|r| r.node);

    Ok(RunOutput {
        report: RunReport { workers, task_count: n, computation_ms, tasks, prints, saved, ccl },
        values,
    })
}

fn spawn<'s>(s: &rayon::Scope<'s>, ctx: &'s Ctx<'s>, id: NodeId) {
    s.spawn(move |s| {
        if ctx.failed.load(Ordering::Acquire) {
            return;
        }
        if !execute(ctx, id) {
            return;
        }
        for &d in &ctx.dependents[id] {
            if ctx.pending[d].fetch_sub(1, Ordering::AcqRel) == 1 {
                spawn(s, ctx, d);
            }
        }
    });
}

/// Evaluates one node whose dependencies are done. Returns false on failure.
fn execute(ctx: &Ctx<'_>, id: NodeId) -> bool {
    let task = ctx.graph.task(id);
    let args: Vec<Value> = task
        .deps
        .iter()
        .map(|&d| match &*ctx.states[d].lock().unwrap() {
            TaskState::Done(v) => v.clone(),
            other => panic!("node {id} scheduled while dependency {d} is {other:?}"),
        })
        .collect();
    {
        let mut st = ctx.states[id].lock().unwrap();
        assert!(matches!(*st, TaskState::Pending), "node {id} evaluated twice");
        *st = TaskState::Running;
    }
    ctx.evaluations[id].fetch_add(1, Ordering::Relaxed);
    let start = ctx.t0.elapsed();
    let result = evaluate(ctx, id, &args);
    let end = ctx.t0.elapsed();
    *ctx.timings[id].lock().unwrap() = Some((start.as_micros() as u64, end.as_micros() as u64));
    debug!("task {id} {} {}ms", task.op, (end - start).as_millis());
    match result {
        Ok(v) => {
            *ctx.states[id].lock().unwrap() = TaskState::Done(v);
            true
        }
        Err(cause) => {
            *ctx.states[id].lock().unwrap() = TaskState::Failed(cause.to_string());
            let mut slot = ctx.failure.lock().unwrap();
            if slot.is_none() {
                *slot = Some(RunError::Task { node: id, op: task.op, cause });
            }
            ctx.failed.store(true, Ordering::Release);
            false
        }
    }
}

/// Intensity images are read as masks of their nonzero pixels.
fn bool_arg(v: &Value) -> Result<Cow<'_, BoolImage>, TaskError> {
    single_component(v)?;
    if let Some(b) = v.as_bool() {
        return Ok(Cow::Borrowed(b));
    }
    match v.as_u16() {
        Some(u) => Ok(Cow::Owned(kernels::nonzero(u))),
        None => Err(TaskError::Operand(format!("expected a boolean image, got {:?}", v.pixel_kind()))),
    }
}

fn u16_arg(v: &Value) -> Result<&U16Image, TaskError> {
    single_component(v)?;
    v.as_u16().ok_or_else(|| TaskError::Operand(format!("expected an intensity image, got {:?}", v.pixel_kind())))
}

fn num_arg(v: &Value) -> Result<f64, TaskError> {
    v.as_number().ok_or_else(|| TaskError::Operand("expected a number, got an image".into()))
}

fn single_component(v: &Value) -> Result<(), TaskError> {
    if let Value::Image { components, .. } = v {
        kernels::check_single_component(*components)?;
    }
    Ok(())
}

fn evaluate(ctx: &Ctx<'_>, id: NodeId, args: &[Value]) -> Result<Value, TaskError> {
    let task = ctx.graph.task(id);
    let opts = ctx.opts;
    Ok(match task.op {
        Op::Const => match task.payload {
            Payload::Number(v) => Value::Number(v),
            _ => return Err(TaskError::Operand("constant without a number".into())),
        },
        Op::Load => {
            let Payload::Path(path) = &task.payload else {
                return Err(TaskError::Operand("load without a path".into()));
            };
            match opts.preloaded.get(path) {
                Some(img) => Value::u16_image((**img).clone()),
                None => Value::u16_image(image::load_png(&graph::resolve_path(&opts.base_dir, path))?),
            }
        }
        Op::Save => {
            let Payload::Path(path) = &task.payload else {
                return Err(TaskError::Operand("save without a path".into()));
            };
            if opts.write_outputs {
                let full = graph::resolve_path(&opts.base_dir, path);
                info!("saving file {}", full.display());
                image::save_png(&full, &args[0])?;
            }
            args[0].clone()
        }
        Op::Print => {
            let v = num_arg(&args[0])?;
            if let Payload::Label(label) = &task.payload {
                info!("{label}={}", format_number(v));
            }
            Value::Number(v)
        }
        Op::Not => Value::bool_image(kernels::not(&*bool_arg(&args[0])?)),
        Op::And => Value::bool_image(kernels::and(&*bool_arg(&args[0])?, &*bool_arg(&args[1])?)?),
        Op::Or => Value::bool_image(kernels::or(&*bool_arg(&args[0])?, &*bool_arg(&args[1])?)?),
        Op::Near => Value::bool_image(kernels::near(&*bool_arg(&args[0])?)),
        Op::Threshold(cmp) => Value::bool_image(kernels::threshold(cmp, u16_arg(&args[0])?, num_arg(&args[1])?)),
        Op::Arith(op) => Value::Number(kernels::arith(op, num_arg(&args[0])?, num_arg(&args[1])?)?),
        Op::Neg => Value::Number(-num_arg(&args[0])?),
        Op::Volume => Value::Number(kernels::volume(&*bool_arg(&args[0])?)),
        Op::Intensity => {
            u16_arg(&args[0])?;
            args[0].clone()
        }
        Op::Reach => {
            let (target, through) = (bool_arg(&args[0])?, bool_arg(&args[1])?);
            let (target, through) = (&*target, &*through);
            let (img, stats) = match &opts.ccl_dump_dir {
                None => reach::reach_with_stats(target, through, &opts.ccl)?,
                Some(dir) => {
                    let mut dump_err = None;
                    let res = reach::reach_observed(target, through, &opts.ccl, |pass, _, labels| {
                        let path = dir.join(format!("ccl-node{id}-{pass:04}.png"));
                        if let Err(e) = image::save_labels(&path, labels) {
                            dump_err.get_or_insert(e);
                        }
                    })?;
                    if let Some(e) = dump_err {
                        return Err(e.into());
                    }
                    res
                }
            };
            debug!(
                "task {id} reach: {} rounds, {} main iterations, reconnect updates {:?}",
                stats.rounds, stats.main_iterations, stats.reconnect_updates
            );
            ctx.ccl.lock().unwrap().push(CclRecord { node: id, stats });
            Value::bool_image(img)
        }
    })
}

/// Formats a number with at most 6 significant digits, like C's `%g`.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let m = trim_zeros(mantissa);
        return format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    let decimals = (5 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Convenience for callers holding images in memory.
pub fn preload(path: &str, img: U16Image) -> (String, Arc<U16Image>) {
    (path.to_string(), Arc::new(img))
}

/// Absolute path a save task writes to under `opts`.
pub fn output_path(opts: &RunOptions, path: &str) -> PathBuf {
    graph::resolve_path(&opts.base_dir, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_str;
    use crate::graph::{expand, MapResolver};
    use crate::image::Grid;

    fn compile(src: &str) -> TaskGraph {
        expand(&parse_str(src).unwrap(), &mut MapResolver::default()).unwrap()
    }

    fn opts_with(img: U16Image, workers: usize) -> RunOptions {
        let mut o = RunOptions::with_workers(workers);
        o.write_outputs = false;
        o.preloaded.insert("x.png".into(), Arc::new(img));
        o
    }

    #[test]
    fn number_formatting() {
        assert_eq!(format_number(62258.25), "62258.2");
        assert_eq!(format_number(20.0), "20");
        assert_eq!(format_number(1.0 / 3.0), "0.333333");
        assert_eq!(format_number(1234567.0), "1.23457e+06");
        assert_eq!(format_number(0.0000123), "1.23e-05");
        assert_eq!(format_number(-2.5), "-2.5");
        assert_eq!(format_number(999999.7), "1e+06");
    }

    #[test]
    fn load_save_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let img = Grid::from_fn(5, 3, |r, c| (r * 1000 + c * 7) as u16);
        image::save_u16(&dir.path().join("in.png"), &img).unwrap();
        let g = compile("load x = \"in.png\"\nsave \"out.png\" x");
        let mut opts = RunOptions::with_workers(2);
        opts.base_dir = dir.path().into();
        let out = run(&g, &opts).unwrap();
        assert_eq!(image::load_png(&dir.path().join("out.png")).unwrap(), img);
        assert_eq!(out.report.saved, vec!["out.png".to_string()]);
    }

    #[test]
    fn contradiction_evaluates_near_once() {
        let img = Grid::from_fn(9, 7, |r, c| ((r * 31 + c * 17) % 5 * 10000) as u16);
        let g = compile("load x = \"x.png\"\nlet b = x >. 20000\nsave \"o.png\" near(b) & !near(b)");
        let out = run(&g, &opts_with(img, 3)).unwrap();
        assert_eq!(out.saved(&g, "o.png").unwrap().as_bool().unwrap(), &Grid::filled(9, 7, false));
        let nears: Vec<_> = out.report.tasks.iter().filter(|t| t.op == "near").collect();
        assert_eq!(nears.len(), 1);
        assert!(out.report.tasks.iter().all(|t| t.evaluations == 1));
    }

    #[test]
    fn prints_in_program_order() {
        let img = Grid::filled(4, 5, 100u16);
        let g = compile("load x = \"x.png\"\nprint \"all\" volume(x >=. 0)\nprint \"third\" 1 / 3\nprint \"neg\" -2 * 3");
        let out = run(&g, &opts_with(img, 1)).unwrap();
        let lines: Vec<String> = out.report.prints.iter().map(PrintRecord::line).collect();
        assert_eq!(lines, ["all=20", "third=0.333333", "neg=-6"]);
    }

    #[test]
    fn failure_names_node_and_cause() {
        let g = compile("print \"bad\" 1 / (2 - 2)");
        let err = run(&g, &RunOptions::with_workers(2)).unwrap_err();
        match err {
            RunError::Task { op, cause, .. } => {
                assert_eq!(op, Op::Arith(kernels::ArithOp::Div));
                assert!(matches!(cause, TaskError::Kernel(KernelError::DivisionByZero)));
            }
            other => panic!("unexpected {other:?}"),
        }
        let g = compile("load x = \"missing.png\"\nsave \"o.png\" near(x >. 1)");
        let err = run(&g, &RunOptions::with_workers(2)).unwrap_err();
        assert!(matches!(err, RunError::Task { op: Op::Load, .. }));
    }

    #[test]
    fn chain_events_are_strictly_ordered() {
        let img = Grid::filled(16, 16, 5u16);
        let mut e = "(x >. 1)".to_string();
        for i in 0..20 {
            e = if i % 2 == 0 { format!("near({e})") } else { format!("!{e}") };
        }
        let g = compile(&format!("load x = \"x.png\"\nsave \"o.png\" {e}"));
        let out = run(&g, &opts_with(img, 4)).unwrap();
        let ev = completion_events(&out.report);
        assert_eq!(ev.len(), g.len());
        for (id, t) in g.tasks() {
            let me = ev.iter().find(|e| e.node == id).unwrap();
            for &d in &t.deps {
                let dep = ev.iter().find(|e| e.node == d).unwrap();
                assert!(me.start_us >= dep.end_us);
            }
        }
    }

    #[test]
    fn ccl_dump_writes_frames() {
        let dir = tempfile::tempdir().unwrap();
        let img = Grid::from_fn(8, 8, |r, c| if r == c || r == 7 { 60000 } else { 0 });
        let g = compile("load x = \"x.png\"\nlet a = x >. 1\nsave \"o.png\" reach(a, a)");
        let mut opts = opts_with(img, 2);
        opts.ccl_dump_dir = Some(dir.path().into());
        let out = run(&g, &opts).unwrap();
        let frames = std::fs::read_dir(dir.path()).unwrap().count();
        assert_eq!(frames, out.report.ccl[0].stats.passes() + 1);
    }

    #[test]
    fn json_report_has_tasks() {
        let g = compile("print \"v\" 2 + 2");
        let out = run(&g, &RunOptions::with_workers(1)).unwrap();
        let json: serde_json::Value = serde_json::from_str(&out.report.to_json()).unwrap();
        // the two literals share a node
        assert_eq!(json["task_count"], 3);
        assert_eq!(json["prints"][0]["value"], 4.0);
    }
}
