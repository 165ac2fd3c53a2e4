//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod oracle;

use std::collections::HashMap;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::Rng;

use imgql::bench::{self, BenchSpec, FormulaKind};
use imgql::ccl::{self, CclConfig};
use imgql::graph::Op;
use imgql::image::{self, BoolImage, Grid, LabelImage, U16Image};
use imgql::kernels::{self, Cmp};
use imgql::synth::{self, ImageKind};
use imgql::{compile, MapResolver, Prelude, RunOptions};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap()
}

fn max_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Worker counts compared for determinism: one, all cores, and a fixed
/// oversubscribed count so machines with one core still interleave.
fn worker_counts() -> Vec<usize> {
    let mut v = vec![1, max_workers(), 4];
    v.dedup();
    v
}

fn ccl_instances() -> Vec<BoolImage> {
    let mut rng = oracle::rng(0xcc1);
    (0..500)
        .map(|_| {
            let d = rng.gen_range(0.1..=0.9);
            oracle::random_mask(&mut rng, 64, 64, d)
        })
        .collect()
}

fn reach_instances() -> Vec<(BoolImage, BoolImage)> {
    let mut rng = oracle::rng(0x4eac);
    (0..200)
        .map(|_| {
            let dt = rng.gen_range(0.01..0.2);
            let dp = rng.gen_range(0.2..0.8);
            (oracle::random_mask(&mut rng, 32, 32, dt), oracle::random_mask(&mut rng, 32, 32, dp))
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let mut rounds = 0;
    for (i, img) in ccl_instances().iter().enumerate() {
        let (labels, stats) = ccl::label(img, &CclConfig::default()).map_err(|e| format!("instance {i}: {e}"))?;
        ensure!(labels == ccl::flood_fill_label(img), "instance {i}: labels differ from flood fill");
        rounds = rounds.max(stats.rounds);
    }
    let elapsed = t.elapsed();
    ensure!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    Ok(format!("500/500 equal, max {rounds} rounds, {:.1}s", elapsed.as_secs_f64()))
}

fn criterion_2() -> Outcome {
    let img = kernels::nonzero(&synth::synthetic_image(ImageKind::ConcaveCorner, 64, 64, 0));
    let (labels, stats) = ccl::label(&img, &CclConfig::default()).map_err(|e| e.to_string())?;
    ensure!(labels == ccl::flood_fill_label(&img), "labels differ from flood fill");
    ensure!(ccl::component_count(&labels) == 64, "expected 64 L shapes, got {}", ccl::component_count(&labels));
    let merged: usize = stats.reconnect_updates.iter().sum();
    ensure!(merged >= 1, "no reconnect pass changed a label: {:?}", stats.reconnect_updates);
    Ok(format!("64 components, reconnect updates {:?}", stats.reconnect_updates))
}

fn criterion_3() -> Outcome {
    let img = kernels::nonzero(&synth::synthetic_image(ImageKind::Spiral, 2048, 2048, 0));
    let t = Instant::now();
    let cfg = CclConfig::default();
    let (labels, stats) = ccl::label(&img, &cfg).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    ensure!(ccl::component_count(&labels) == 1, "{} components", ccl::component_count(&labels));
    ensure!(labels == ccl::flood_fill_label(&img), "labels differ from flood fill");
    let guard = 4 * (2048 + 2048);
    ensure!(stats.rounds <= guard, "{} rounds over the guard {guard}", stats.rounds);
    Ok(format!(
        "1 component, {} rounds, {} main iterations, {:.2}s",
        stats.rounds,
        stats.main_iterations,
        elapsed.as_secs_f64()
    ))
}

fn criterion_4() -> Outcome {
    for (i, (t, p)) in reach_instances().iter().enumerate() {
        let got = imgql::reach::reach(t, p, &CclConfig::default()).map_err(|e| e.to_string())?;
        ensure!(got == oracle::reach(t, p), "instance {i} differs from the path oracle");
    }
    Ok("200/200 equal".into())
}

fn as_u16(mask: &BoolImage) -> Arc<U16Image> {
    Arc::new(mask.map(|&b| if b { 65535 } else { 0 }))
}

/// Runs `save "o.png" <call>` with `a` and `b` bound to loaded masks.
fn run_derived(call: &str, a: &BoolImage, b: &BoolImage) -> Result<BoolImage, String> {
    let text = format!("load a = \"a.png\"\nload b = \"b.png\"\nsave \"o.png\" {call}\n");
    let graph = compile(&text, &Prelude::Builtin, &mut MapResolver::default()).map_err(|e| e.to_string())?;
    let preloaded = HashMap::from([("a.png".to_string(), as_u16(a)), ("b.png".to_string(), as_u16(b))]);
    let opts = RunOptions { workers: 2, write_outputs: false, preloaded, ..RunOptions::default() };
    let out = imgql::run(&graph, &opts).map_err(|e| e.to_string())?;
    out.saved(&graph, "o.png").and_then(|v| v.as_bool().cloned()).ok_or_else(|| "no boolean output".to_string())
}

fn criterion_5() -> Outcome {
    type Oracle = fn(&BoolImage, &BoolImage) -> BoolImage;
    let cases: [(&str, Oracle); 4] = [
        ("interior(a)", |a, _| oracle::interior(a)),
        ("touch(a, b)", oracle::touch),
        ("grow(a, b)", oracle::grow),
        ("surrounded(a, b)", oracle::surrounded),
    ];
    let mut rng = oracle::rng(0xd3e1);
    for (call, expected) in cases {
        for i in 0..100 {
            let da = rng.gen_range(0.1..0.9);
            let db = rng.gen_range(0.1..0.9);
            let a = oracle::random_mask(&mut rng, 16, 16, da);
            let b = oracle::random_mask(&mut rng, 16, 16, db);
            let got = run_derived(call, &a, &b)?;
            ensure!(got == expected(&a, &b), "{call}: instance {i} differs from the oracle");
        }
    }
    Ok("4 x 100 instances equal".into())
}

fn criterion_6() -> Outcome {
    let g = compile("load x = \"x.png\"\nsave \"o\" near(x) & !near(x)", &Prelude::Builtin, &mut MapResolver::default())
        .map_err(|e| e.to_string())?;
    ensure!(g.count_op(Op::Near) == 1, "{} near nodes", g.count_op(Op::Near));

    let img = Arc::new(synth::synthetic_image(ImageKind::BlobNoise, 32, 32, 3));
    let preloaded = HashMap::from([("x.png".to_string(), img.clone()), (synth::SEQUENTIAL_INPUT.to_string(), img)]);
    let opts = RunOptions { workers: 2, write_outputs: false, preloaded, ..RunOptions::default() };
    let out = imgql::run(&g, &opts).map_err(|e| e.to_string())?;
    ensure!(out.report.tasks.len() == g.len(), "report lists {} of {} tasks", out.report.tasks.len(), g.len());
    ensure!(out.report.tasks.iter().all(|t| t.evaluations == 1), "a node ran more than once");

    for depth in [1, 2, 10, 100, 300] {
        let text = synth::gen_sequential(depth);
        let g = compile(&text, &Prelude::Builtin, &mut MapResolver::default()).map_err(|e| e.to_string())?;
        ensure!(g.len() == depth + 2, "depth {depth}: {} nodes", g.len());
        let out = imgql::run(&g, &opts).map_err(|e| e.to_string())?;
        ensure!(out.report.tasks.len() == depth + 2, "depth {depth}: {} task records", out.report.tasks.len());
        ensure!(out.report.tasks.iter().all(|t| t.evaluations == 1), "depth {depth}: a node ran more than once");
    }
    Ok("1 near node; depth N gives N + 2 nodes, each evaluated once".into())
}

fn shipped_spec() -> String {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../specs/segmentation.imgql");
    std::fs::read_to_string(p).expect("shipped specification")
}

/// Runs the shipped segmentation on a blob-noise image and returns the
/// decoded output.
fn run_segmentation(input: &U16Image, workers: usize) -> Result<U16Image, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    image::save_u16(&dir.path().join("normalised-MRI-flair.png"), input).map_err(|e| e.to_string())?;
    let graph = compile(&shipped_spec(), &Prelude::Builtin, &mut imgql::FsResolver::new(dir.path()))
        .map_err(|e| e.to_string())?;
    let opts = RunOptions { workers, base_dir: dir.path().to_path_buf(), ..RunOptions::default() };
    imgql::run(&graph, &opts).map_err(|e| e.to_string())?;
    image::load_png(&dir.path().join("segmentation.png")).map_err(|e| e.to_string())
}

const BLOB_SIZE: usize = 256;

fn criterion_7() -> Outcome {
    let input = synth::synthetic_image(ImageKind::BlobNoise, BLOB_SIZE, BLOB_SIZE, 1);
    let got = run_segmentation(&input, 0)?;
    let a = kernels::threshold(Cmp::Gt, &input, 62258.0);
    let b = kernels::threshold(Cmp::Gt, &input, 56360.0);
    let expected = kernels::or(&a, &oracle::touch(&b, &a)).unwrap();
    ensure!(*as_u16(&expected) == got, "segmentation differs from a | touch(b, a)");

    // the disc and halo are kept, the salt is dropped
    let c = BLOB_SIZE as f64 / 2.0;
    let halo = BLOB_SIZE as f64 / 4.0;
    let mut salt = 0;
    for r in 0..BLOB_SIZE {
        for col in 0..BLOB_SIZE {
            let d = ((r as f64 + 0.5 - c).powi(2) + (col as f64 + 0.5 - c).powi(2)).sqrt();
            let on = *got.get(r, col) == 65535;
            if d <= halo {
                ensure!(on, "pixel ({r}, {col}) of the disc or halo is missing");
            } else if *b.get(r, col) {
                salt += 1;
                ensure!(!on, "salt pixel ({r}, {col}) survived");
            }
        }
    }
    ensure!(salt > 0, "fixture has no salt noise");
    let kept = got.data().iter().filter(|&&v| v == 65535).count();
    Ok(format!("output equals oracle; {kept} pixels kept, {salt} salt pixels removed"))
}

fn criterion_8() -> Outcome {
    let counts = worker_counts();
    let ccl_inputs = ccl_instances();
    let reach_inputs = reach_instances();
    let blob = synth::synthetic_image(ImageKind::BlobNoise, BLOB_SIZE, BLOB_SIZE, 1);

    let mut first: Option<(Vec<LabelImage>, Vec<BoolImage>, U16Image)> = None;
    for &n in &counts {
        let p = pool(n);
        let labels: Vec<LabelImage> = p.install(|| {
            ccl_inputs.iter().map(|i| ccl::label(i, &CclConfig::default()).unwrap().0).collect()
        });
        let reached: Vec<BoolImage> = p.install(|| {
            reach_inputs.iter().map(|(t, q)| imgql::reach::reach(t, q, &CclConfig::default()).unwrap()).collect()
        });
        let seg = run_segmentation(&blob, n)?;
        match &first {
            None => first = Some((labels, reached, seg)),
            Some((l, r, s)) => {
                ensure!(*l == labels, "CCL labels differ with {n} workers");
                ensure!(*r == reached, "reach results differ with {n} workers");
                ensure!(*s == seg, "segmentation differs with {n} workers");
            }
        }
    }
    Ok(format!("identical across worker counts {counts:?}"))
}

fn criterion_9() -> Outcome {
    let spec = |size| BenchSpec { kind: FormulaKind::Sequential, size, seed: 1, width: 256, height: 256 };
    let mut rows = Vec::new();
    for depth in [256, 512] {
        rows.extend(bench::bench(&spec(depth), 3, &[0]).map_err(|e| e.to_string())?);
    }
    let mut csv = Vec::new();
    bench::write_csv(&rows, &mut csv).map_err(|e| e.to_string())?;
    let csv = String::from_utf8(csv).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    ensure!(lines.len() == 3, "expected header and two rows:\n{csv}");
    for (line, depth) in lines[1..].iter().zip([256, 512]) {
        let tasks: usize = line.split(',').nth(4).and_then(|t| t.parse().ok()).ok_or("bad tasks column")?;
        ensure!(tasks == depth + 2, "depth {depth}: tasks column {tasks}");
    }
    let (t256, t512) = (rows[0].wall_ms_mean, rows[1].wall_ms_mean);
    ensure!(t512 <= 3.0 * t256, "depth 512 took {t512:.1} ms, depth 256 {t256:.1} ms");
    Ok(format!("256: {t256:.1} ms, 512: {t512:.1} ms, ratio {:.2}", t512 / t256))
}

fn criterion_10() -> Outcome {
    let mut rng = oracle::rng(0xa19e);
    let n = 200;
    for i in 0..n {
        let (w, h) = (rng.gen_range(1..40), rng.gen_range(1..40));
        let da = rng.gen_range(0.0..0.6);
        let a = oracle::random_mask(&mut rng, w, h, da);
        let db = rng.gen_range(0.0..0.6);
        let extra = oracle::random_mask(&mut rng, w, h, db);
        let b = kernels::or(&a, &extra).unwrap();
        let near_a = kernels::near(&a);
        ensure!(near_a == oracle::near(&a), "{i}: near differs from the window definition");
        ensure!(oracle::subset(&a, &near_a), "{i}: near is not extensive");
        ensure!(oracle::subset(&near_a, &kernels::near(&b)), "{i}: near is not monotone");
        ensure!(
            kernels::near(&kernels::or(&a, &extra).unwrap()) == kernels::or(&near_a, &kernels::near(&extra)).unwrap(),
            "{i}: near does not distribute over union"
        );
        let not = kernels::not;
        ensure!(
            not(&kernels::and(&a, &extra).unwrap()) == kernels::or(&not(&a), &not(&extra)).unwrap(),
            "{i}: De Morgan fails for and"
        );
        ensure!(
            not(&kernels::or(&a, &extra).unwrap()) == kernels::and(&not(&a), &not(&extra)).unwrap(),
            "{i}: De Morgan fails for or"
        );
        ensure!(not(&not(&a)) == a, "{i}: ! is not an involution");
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for i in 0..n {
        let (w, h) = (rng.gen_range(1..50), rng.gen_range(1..50));
        let img: U16Image = Grid::from_fn(w, h, |_, _| rng.gen());
        let path = dir.path().join(format!("{i}.png"));
        image::save_u16(&path, &img).map_err(|e| e.to_string())?;
        ensure!(image::load_png(&path).map_err(|e| e.to_string())? == img, "{i}: PNG round trip changed pixels");
    }
    Ok(format!("{n} instances per law, {n} PNG round trips"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("CCL equals flood fill on 500 random 64x64 masks", criterion_1),
        ("CCL on tiled concave corners uses reconnect", criterion_2),
        ("CCL on a 2048x2048 spiral", criterion_3),
        ("reach equals the path oracle on 200 random 32x32 pairs", criterion_4),
        ("derived operators through stdlib, parser and graph", criterion_5),
        ("memoization and node counts", criterion_6),
        ("segmentation example on the blob-noise fixture", criterion_7),
        ("determinism across worker counts", criterion_8),
        ("sequential benchmark scaling", criterion_9),
        ("kernel algebra and PNG round trip", criterion_10),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = match panic::catch_unwind(AssertUnwindSafe(f)) {
            Ok(o) => o,
            Err(p) => Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into())),
        };
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {:>2}. {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  {:>2}. {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
