//! Scaling benchmark over generated formulas.

use std::collections::HashMap;
use std::fmt;
use std::io;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use crate::exec::{self, RunOptions};
use crate::graph::MapResolver;
use crate::image::U16Image;
use crate::synth::{self, ImageKind};
use crate::{compile, CompileError, Prelude};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormulaKind {
    Sequential,
    Random,
}

impl fmt::Display for FormulaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FormulaKind::Sequential => "sequential",
            FormulaKind::Random => "random",
        })
    }
}

impl FromStr for FormulaKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "sequential" => Ok(FormulaKind::Sequential),
            "random" => Ok(FormulaKind::Random),
            _ => Err(format!("unknown formula kind `{s}` (expected sequential or random)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchSpec {
    pub kind: FormulaKind,
    /// Depth for sequential formulas, operator count for random ones.
    pub size: usize,
    /// Seeds the formula (random kind) and the input images.
    pub seed: u64,
    pub width: usize,
    pub height: usize,
}

impl BenchSpec {
    pub fn program(&self) -> String {
        match self.kind {
            FormulaKind::Sequential => synth::gen_sequential(self.size),
            FormulaKind::Random => synth::gen_random(self.size, self.seed),
        }
    }

    /// Blob-noise inputs, one per image the program loads.
    pub fn inputs(&self) -> HashMap<String, Arc<U16Image>> {
        let paths: &[&str] = match self.kind {
            FormulaKind::Sequential => &[synth::SEQUENTIAL_INPUT],
            FormulaKind::Random => &synth::RANDOM_INPUTS,
        };
        paths
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let img = synth::synthetic_image(ImageKind::BlobNoise, self.width, self.height, self.seed + i as u64);
                (p.to_string(), Arc::new(img))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub kind: FormulaKind,
    pub size: usize,
    pub seed: u64,
    pub workers: usize,
    pub tasks: usize,
    pub wall_ms_mean: f64,
    pub wall_ms_stddev: f64,
    /// Checksum of the saved mask, identical across worker counts.
    #[serde(skip)]
    pub checksum: String,
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("generated program does not compile: {0}")]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Run(#[from] exec::RunError),
}

/// Runs `spec` `repetitions` times (at least once) for every worker count
/// (0 means all cores), returning one row per worker count. Images are
/// generated in memory and nothing is written.
pub fn bench(spec: &BenchSpec, repetitions: usize, workers: &[usize]) -> Result<Vec<BenchRow>, BenchError> {
    let text = spec.program();
    // Deep formulas recurse once per nesting level while being compiled.
    let graph = with_big_stack(|| compile(&text, &Prelude::Builtin, &mut MapResolver::default()))?;
    let preloaded = spec.inputs();
    let mut rows = Vec::new();
    for &w in workers {
        let opts = RunOptions { workers: w, write_outputs: false, preloaded: preloaded.clone(), ..RunOptions::default() };
        let mut times = Vec::new();
        let mut checksum = String::new();
        let mut used = w;
        for _ in 0..repetitions.max(1) {
            let t = Instant::now();
            let out = exec::run(&graph, &opts)?;
            times.push(t.elapsed().as_secs_f64() * 1e3);
            used = out.report.workers;
            checksum = out
                .saved(&graph, synth::OUTPUT)
                .and_then(|v| v.as_bool().map(synth::mask_checksum).or_else(|| v.as_u16().map(synth::pixel_checksum)))
                .unwrap_or_default();
        }
        let (mean, sd) = mean_stddev(&times);
        rows.push(BenchRow {
            kind: spec.kind,
            size: spec.size,
            seed: spec.seed,
            workers: used,
            tasks: graph.len(),
            wall_ms_mean: mean,
            wall_ms_stddev: sd,
            checksum,
        });
    }
    Ok(rows)
}

/// Sample mean and standard deviation (0 for a single sample).
pub fn mean_stddev(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn write_csv<W: io::Write>(rows: &[BenchRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(["kind", "size", "seed", "workers", "tasks", "wall_ms_mean", "wall_ms_stddev"])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Gnuplot script plotting mean wall time against size from a CSV written
/// by [`write_csv`], one line per worker count.
pub fn gnuplot_script(csv_path: &str, png_path: &str) -> String {
    format!(
        r#"set datafile separator ","
set terminal pngcairo size 900,600
set output "{png_path}"
set xlabel "formula size"
set ylabel "wall time (ms)"
set key top left
plot for [w in system("tail -n +2 {csv_path} | cut -d, -f4 | sort -nu | tr '\n' ' '")] \
    "{csv_path}" using ($4 == w ? $2 : 1/0):6:7 with yerrorlines title "workers ".w
"#
    )
}

pub(crate) fn with_big_stack<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(256 << 20)
            .spawn_scoped(s, f)
            .expect("spawn compiler thread")
            .join()
            .unwrap_or_else(|p| std::panic::resume_unwind(p))
    })
}
