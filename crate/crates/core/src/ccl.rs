//! Connected component labelling by iterated pointer jumping.
//!
//! Every true pixel starts labelled with its own coordinates. A main
//! iteration makes each pixel adopt the largest label found in the Moore
//! window around the pixel its current label points to. Main iterations
//! alone can stall with a component split between labels whose roots never
//! see each other (concave corners), so every `k` iterations a reconnect
//! pass lets each pixel push the largest label of its own window onto the
//! root it points to, with an atomic maximum. The driver stops once no true
//! pixel has a true neighbour carrying a different label.
//!
//! On exit each component is labelled with its lexicographically largest
//! coordinate, independent of how work was scheduled.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::image::{BoolImage, Grid, Label, LabelImage};

pub const DEFAULT_RECONNECT_INTERVAL: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CclConfig {
    /// Main iterations between reconnect passes.
    pub reconnect_interval: usize,
    /// Upper bound on rounds (`k` main iterations + reconnect + check).
    /// `None` means `4 * (width + height)`.
    pub max_rounds: Option<usize>,
}

impl Default for CclConfig {
    fn default() -> Self {
        CclConfig { reconnect_interval: DEFAULT_RECONNECT_INTERVAL, max_rounds: None }
    }
}

impl CclConfig {
    pub fn with_interval(k: usize) -> Self {
        CclConfig { reconnect_interval: k, ..Self::default() }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CclError {
    #[error("reconnect interval must be at least 1")]
    ZeroInterval,
    #[error("labelling did not converge within {rounds} rounds ({main_iterations} main iterations)")]
    RoundLimit { rounds: usize, main_iterations: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CclStats {
    pub rounds: usize,
    pub main_iterations: usize,
    /// Number of label cells raised by each reconnect pass, in order.
    pub reconnect_updates: Vec<usize>,
}

impl CclStats {
    /// Main iterations plus reconnect passes.
    pub fn passes(&self) -> usize {
        self.main_iterations + self.reconnect_updates.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Init,
    Main,
    Reconnect,
}

/// Labels each true pixel with its own coordinates, false pixels with `NULL`.
pub fn initialization(start: &BoolImage) -> LabelImage {
    let w = start.width();
    let mut out = Grid::filled(w, start.height(), Label::NULL);
    out.data_mut().par_chunks_mut(w).enumerate().for_each(|(r, row)| {
        for (c, o) in row.iter_mut().enumerate() {
            if *start.get(r, c) {
                *o = Label::at(r, c);
            }
        }
    });
    out
}

fn window_max(w: usize, h: usize, row: usize, col: usize, read: impl Fn(usize) -> Label) -> Label {
    let mut best = Label::NULL;
    for r in row.saturating_sub(1)..=(row + 1).min(h - 1) {
        for c in col.saturating_sub(1)..=(col + 1).min(w - 1) {
            best = best.max(read(r * w + c));
        }
    }
    best
}

/// Lexicographic maximum of the labels in the clipped 3×3 window around
/// `(row, col)`, centre included. `NULL` entries never win.
pub fn max_neighbour(labels: &LabelImage, row: usize, col: usize) -> Label {
    let (w, h) = labels.dims();
    window_max(w, h, row, col, |i| labels.data()[i])
}

/// One pointer-jumping step: every true pixel takes the window maximum
/// around the pixel its label points to.
pub fn main_iteration(start: &BoolImage, input: &LabelImage) -> LabelImage {
    let mut out = Grid::filled(input.width(), input.height(), Label::NULL);
    main_iteration_into(start, input, &mut out);
    out
}

fn main_iteration_into(start: &BoolImage, input: &LabelImage, output: &mut LabelImage) {
    let (w, h) = input.dims();
    let src = input.data();
    output.data_mut().par_chunks_mut(w).enumerate().for_each(|(r, row)| {
        for (c, o) in row.iter_mut().enumerate() {
            *o = if *start.get(r, c) {
                let (pr, pc) = src[r * w + c].coords().expect("true pixel without a label");
                window_max(w, h, pr, pc, |i| src[i])
            } else {
                Label::NULL
            };
        }
    });
}

/// For every true pixel `p` whose label points at `q`: if the largest label
/// around `p` exceeds the label stored at `q`, raise `q` to it. Updates go
/// through an atomic maximum, so concurrent writers to the same `q` settle on
/// the largest value. Returns the number of successful raises.
pub fn reconnect(start: &BoolImage, labels: &mut LabelImage) -> usize {
    let (w, h) = labels.dims();
    let cells: Vec<AtomicU64> = labels.data().iter().map(|l| AtomicU64::new(l.bits())).collect();
    let raised = AtomicUsize::new(0);
    let read = |i: usize| Label::from_bits(cells[i].load(Ordering::Relaxed));
    (0..h).into_par_iter().for_each(|r| {
        let mut local = 0;
        for c in 0..w {
            if !*start.get(r, c) {
                continue;
            }
            let Some((pr, pc)) = read(r * w + c).coords() else { continue };
            let m = window_max(w, h, r, c, read);
            let target = &cells[pr * w + pc];
            let prev = target.fetch_max(m.bits(), Ordering::Relaxed);
            if prev < m.bits() {
                local += 1;
            }
        }
        raised.fetch_add(local, Ordering::Relaxed);
    });
    for (dst, cell) in labels.data_mut().iter_mut().zip(cells) {
        *dst = Label::from_bits(cell.into_inner());
    }
    raised.into_inner()
}

/// True iff no true pixel has a true Moore neighbour with a different label.
pub fn termination_check(start: &BoolImage, labels: &LabelImage) -> bool {
    let (w, h) = labels.dims();
    let unsettled = AtomicBool::new(false);
    (0..h).into_par_iter().for_each(|r| {
        if unsettled.load(Ordering::Relaxed) {
            return;
        }
        for c in 0..w {
            if !*start.get(r, c) {
                continue;
            }
            let own = *labels.get(r, c);
            for rr in r.saturating_sub(1)..=(r + 1).min(h - 1) {
                for cc in c.saturating_sub(1)..=(c + 1).min(w - 1) {
                    if *start.get(rr, cc) && *labels.get(rr, cc) != own {
                        unsettled.store(true, Ordering::Relaxed);
                        return;
                    }
                }
            }
        }
    });
    !unsettled.into_inner()
}

/// Runs the labelling driver to convergence.
pub fn label(start: &BoolImage, cfg: &CclConfig) -> Result<(LabelImage, CclStats), CclError> {
    label_observed(start, cfg, |_, _, _| {})
}

/// Like [`label`], calling `observe(pass, phase, labels)` after
/// initialisation (pass 0) and after every main iteration and reconnect.
pub fn label_observed(
    start: &BoolImage,
    cfg: &CclConfig,
    mut observe: impl FnMut(usize, Phase, &LabelImage),
) -> Result<(LabelImage, CclStats), CclError> {
    if cfg.reconnect_interval == 0 {
        return Err(CclError::ZeroInterval);
    }
    let max_rounds = cfg.max_rounds.unwrap_or(4 * (start.width() + start.height()));
    let mut stats = CclStats::default();
    let mut cur = initialization(start);
    observe(0, Phase::Init, &cur);
    let mut next = cur.clone();
    loop {
        for _ in 0..cfg.reconnect_interval {
            main_iteration_into(start, &cur, &mut next);
            std::mem::swap(&mut cur, &mut next);
            stats.main_iterations += 1;
            observe(stats.passes(), Phase::Main, &cur);
        }
        let raised = reconnect(start, &mut cur);
        stats.reconnect_updates.push(raised);
        observe(stats.passes(), Phase::Reconnect, &cur);
        stats.rounds += 1;
        if termination_check(start, &cur) {
            return Ok((cur, stats));
        }
        if stats.rounds >= max_rounds {
            return Err(CclError::RoundLimit { rounds: stats.rounds, main_iterations: stats.main_iterations });
        }
    }
}

/// Sequential breadth-first labelling with Moore connectivity, each
/// component labelled by its lexicographically largest coordinate.
pub fn flood_fill_label(start: &BoolImage) -> LabelImage {
    let (w, h) = start.dims();
    let mut out = Grid::filled(w, h, Label::NULL);
    let mut seen = vec![false; w * h];
    let mut queue = VecDeque::new();
    let mut members = Vec::new();
    for seed in 0..w * h {
        if !start.data()[seed] || seen[seed] {
            continue;
        }
        seen[seed] = true;
        queue.push_back(seed);
        members.clear();
        let mut best = seed;
        while let Some(i) = queue.pop_front() {
            members.push(i);
            best = best.max(i);
            let (r, c) = (i / w, i % w);
            for rr in r.saturating_sub(1)..=(r + 1).min(h - 1) {
                for cc in c.saturating_sub(1)..=(c + 1).min(w - 1) {
                    let j = rr * w + cc;
                    if start.data()[j] && !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
        }
        // Row-major index order is the lexicographic coordinate order.
        let l = Label::at(best / w, best % w);
        for &i in &members {
            out.data_mut()[i] = l;
        }
    }
    out
}

/// Number of distinct non-null labels.
pub fn component_count(labels: &LabelImage) -> usize {
    let mut v: Vec<Label> = labels.data().iter().copied().filter(|l| !l.is_null()).collect();
    v.sort_unstable();
    v.dedup();
    v.len()
}
