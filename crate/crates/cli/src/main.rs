use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use imgql::bench::{self, BenchSpec, FormulaKind};
use imgql::ccl::CclConfig;
use imgql::synth::{self, ImageKind};
use imgql::{FsResolver, Prelude, RunOptions};

/// Runs an imgql specification over 2D images.
#[derive(Parser, Debug)]
#[command(name = "imgql", version, args_conflicts_with_subcommands = true, subcommand_negates_reqs = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Specification file.
    #[arg(required = true)]
    spec: Option<PathBuf>,
    /// Worker threads (0: one per core).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Main iterations between CCL reconnect passes.
    #[arg(long, default_value_t = imgql::ccl::DEFAULT_RECONNECT_INTERVAL)]
    reconnect_interval: usize,
    /// Print the task graph before running it.
    #[arg(long)]
    dump_dag: bool,
    /// Write a JSON run report here.
    #[arg(long, value_name = "PATH")]
    json_report: Option<PathBuf>,
    /// Use this library instead of the built-in one.
    #[arg(long, value_name = "PATH")]
    stdlib: Option<PathBuf>,
    /// Write the intermediate CCL label images of every reach into DIR.
    #[arg(long, value_name = "DIR", num_args = 0..=1, default_missing_value = "ccl-debug")]
    debug_ccl: Option<PathBuf>,
    /// Log every task with its timing.
    #[arg(short, long)]
    verbose: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Time generated formulas and write CSV.
    Bench {
        #[arg(long, default_value = "sequential")]
        kind: FormulaKind,
        /// Depths (sequential) or operator counts (random).
        #[arg(long, value_delimiter = ',', default_value = "64,128,256,512")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 512)]
        width: usize,
        #[arg(long, default_value_t = 512)]
        height: usize,
        #[arg(long, default_value_t = 5)]
        repetitions: usize,
        /// Worker counts to compare (0: one per core).
        #[arg(long, value_delimiter = ',', default_value = "1,0")]
        workers: Vec<usize>,
        /// CSV destination; standard output when absent.
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Also write a gnuplot script plotting the CSV.
        #[arg(long, value_name = "PATH", requires = "output")]
        gnuplot: Option<PathBuf>,
    },
    /// Write a synthetic 16-bit test image.
    GenImage {
        #[arg(long)]
        kind: ImageKind,
        #[arg(long, default_value_t = 256)]
        width: usize,
        #[arg(long, default_value_t = 256)]
        height: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        path: PathBuf,
    },
    /// Print a generated benchmark formula.
    GenFormula {
        #[arg(long)]
        kind: FormulaKind,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

enum Failure {
    Spec(anyhow::Error),
    Runtime(anyhow::Error),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let verbose = cli.run.verbose;
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(if verbose { "debug" } else { "info" }))
        .format_timestamp_millis()
        .init();

    // Deeply nested specifications recurse in the parser and expander.
    let outcome = std::thread::Builder::new()
        .stack_size(512 << 20)
        .spawn(move || dispatch(cli))
        .expect("spawn main thread")
        .join()
        .unwrap_or_else(|p| std::panic::resume_unwind(p));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Spec(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        None => run_spec(cli.run),
        Some(Command::Bench { kind, sizes, seed, width, height, repetitions, workers, output, gnuplot }) => {
            let mut rows = Vec::new();
            for size in sizes {
                let spec = BenchSpec { kind, size, seed, width, height };
                log::info!("bench {kind} size {size}");
                rows.extend(bench::bench(&spec, repetitions, &workers).map_err(|e| Failure::Runtime(e.into()))?);
            }
            let write = || -> Result<()> {
                match &output {
                    Some(p) => {
                        let f = fs::File::create(p).with_context(|| format!("cannot create {}", p.display()))?;
                        bench::write_csv(&rows, f)?;
                    }
                    None => bench::write_csv(&rows, io::stdout().lock())?,
                }
                if let (Some(g), Some(csv)) = (&gnuplot, &output) {
                    let png = csv.with_extension("png");
                    fs::write(g, bench::gnuplot_script(&csv.display().to_string(), &png.display().to_string()))
                        .with_context(|| format!("cannot write {}", g.display()))?;
                }
                Ok(())
            };
            write().map_err(Failure::Runtime)
        }
        Some(Command::GenImage { kind, width, height, seed, path }) => {
            synth::gen_synthetic_image(kind, width, height, seed, &path).map_err(|e| Failure::Runtime(e.into()))?;
            Ok(())
        }
        Some(Command::GenFormula { kind, size, seed }) => {
            let text = match kind {
                FormulaKind::Sequential => synth::gen_sequential(size),
                FormulaKind::Random => synth::gen_random(size, seed),
            };
            print!("{text}");
            Ok(())
        }
    }
}

fn run_spec(args: RunArgs) -> Result<(), Failure> {
    let spec = args.spec.expect("clap requires a specification file");
    if args.reconnect_interval == 0 {
        return Err(Failure::Spec(anyhow::anyhow!("--reconnect-interval must be at least 1")));
    }
    let text = fs::read_to_string(&spec)
        .with_context(|| format!("cannot read {}", spec.display()))
        .map_err(Failure::Spec)?;
    let prelude = match &args.stdlib {
        None => Prelude::Builtin,
        Some(p) => Prelude::Custom(
            fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display())).map_err(Failure::Spec)?,
        ),
    };
    let base = spec.parent().map(Path::to_path_buf).unwrap_or_default();
    let graph = imgql::compile(&text, &prelude, &mut FsResolver::new(&base))
        .map_err(|e| Failure::Spec(anyhow::anyhow!("{}:{e}", spec.display())))?;
    if args.dump_dag {
        print!("{}", graph.dump());
    }

    if let Some(dir) = &args.debug_ccl {
        fs::create_dir_all(dir)
            .with_context(|| format!("cannot create {}", dir.display()))
            .map_err(Failure::Runtime)?;
    }
    let opts = RunOptions {
        workers: args.workers,
        ccl: CclConfig::with_interval(args.reconnect_interval),
        base_dir: base,
        ccl_dump_dir: args.debug_ccl.clone(),
        ..RunOptions::default()
    };
    let out = imgql::run(&graph, &opts).map_err(|e| Failure::Runtime(e.into()))?;
    let mut stdout = io::stdout().lock();
    for p in &out.report.prints {
        writeln!(stdout, "{}", p.line()).map_err(|e| Failure::Runtime(e.into()))?;
    }
    log::info!("{} tasks in {:.1} ms", out.report.task_count, out.report.computation_ms);
    if let Some(path) = &args.json_report {
        fs::write(path, out.report.to_json())
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(Failure::Runtime)?;
    }
    Ok(())
}
