//! The reachability primitive and the imgql standard library.
//!
//! `reach(target, through)` holds at `x` when some Moore path starts at `x`,
//! ends on a `target` pixel, and every pixel strictly between the two ends
//! satisfies `through`. Paths of length 0 and 1 are covered by
//! `near(target)`. Longer paths enter a `through` component that comes
//! within one step of `target`, so the result is `near(target)` joined with
//! the dilation of every such component.

use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;

use crate::ccl::{self, CclConfig, CclError, CclStats};
use crate::image::{BoolImage, Grid, LabelImage};
use crate::kernels::{self, KernelError};

/// Source of the derived operators, auto-imported ahead of user programs.
pub const STDLIB: &str = include_str!("../stdlib.imgql");

#[derive(Debug, thiserror::Error)]
pub enum ReachError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Ccl(#[from] CclError),
}

pub fn reach(target: &BoolImage, through: &BoolImage, cfg: &CclConfig) -> Result<BoolImage, ReachError> {
    reach_with_stats(target, through, cfg).map(|(img, _)| img)
}

pub fn reach_with_stats(
    target: &BoolImage,
    through: &BoolImage,
    cfg: &CclConfig,
) -> Result<(BoolImage, CclStats), ReachError> {
    reach_observed(target, through, cfg, |_, _, _| {})
}

/// [`reach`] with access to the intermediate label images of the CCL run.
pub fn reach_observed(
    target: &BoolImage,
    through: &BoolImage,
    cfg: &CclConfig,
    observe: impl FnMut(usize, ccl::Phase, &LabelImage),
) -> Result<(BoolImage, CclStats), ReachError> {
    target.same_dims(through).map_err(KernelError::from)?;
    let (w, h) = target.dims();
    let near_target = kernels::near(target);
    let (labels, stats) = ccl::label_observed(through, cfg, observe)?;

    // Flag every component that has a pixel under near(target). Labels are
    // coordinates, so the flag array is indexed like the image.
    let flags: Vec<AtomicBool> = (0..w * h).map(|_| AtomicBool::new(false)).collect();
    labels.data().par_iter().zip(near_target.data().par_iter()).for_each(|(l, &hit)| {
        if let (true, Some((r, c))) = (hit, l.coords()) {
            flags[r * w + c].store(true, Ordering::Relaxed);
        }
    });
    let selected: Vec<bool> = labels
        .data()
        .par_iter()
        .map(|l| l.coords().is_some_and(|(r, c)| flags[r * w + c].load(Ordering::Relaxed)))
        .collect();
    let selected = Grid::from_vec(w, h, selected);
    let out = kernels::or(&near_target, &kernels::near(&selected))?;
    Ok((out, stats))
}
