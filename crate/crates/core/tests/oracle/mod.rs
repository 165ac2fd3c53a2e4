//! Brute-force reference implementations used by the integration tests.

#![allow(dead_code)]

use std::collections::VecDeque;

use imgql::image::{BoolImage, Grid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_mask(rng: &mut ChaCha8Rng, w: usize, h: usize, density: f64) -> BoolImage {
    Grid::from_fn(w, h, |_, _| rng.gen_bool(density))
}

pub fn neighbours(w: usize, h: usize, r: usize, c: usize) -> impl Iterator<Item = (usize, usize)> {
    (-1i64..=1).flat_map(move |dr| (-1i64..=1).map(move |dc| (dr, dc))).filter_map(move |(dr, dc)| {
        let (rr, cc) = (r as i64 + dr, c as i64 + dc);
        ((dr, dc) != (0, 0) && rr >= 0 && cc >= 0 && rr < h as i64 && cc < w as i64).then_some((rr as usize, cc as usize))
    })
}

/// Is there a Moore path `p = q0, ..., qn` with `end(qn)` and `mid(qi)` for
/// every `0 < i < n`? Paths of length zero count.
pub fn path_exists(
    w: usize,
    h: usize,
    p: (usize, usize),
    end: impl Fn(usize, usize) -> bool,
    mid: impl Fn(usize, usize) -> bool,
) -> bool {
    if end(p.0, p.1) {
        return true;
    }
    let mut seen = vec![false; w * h];
    seen[p.0 * w + p.1] = true;
    let mut queue = VecDeque::from([p]);
    while let Some((r, c)) = queue.pop_front() {
        for (rr, cc) in neighbours(w, h, r, c) {
            if end(rr, cc) {
                return true;
            }
            if mid(rr, cc) && !seen[rr * w + cc] {
                seen[rr * w + cc] = true;
                queue.push_back((rr, cc));
            }
        }
    }
    false
}

pub fn reach(target: &BoolImage, through: &BoolImage) -> BoolImage {
    let (w, h) = target.dims();
    Grid::from_fn(w, h, |r, c| path_exists(w, h, (r, c), |a, b| *target.get(a, b), |a, b| *through.get(a, b)))
}

/// Dilation read straight off the definition: some pixel of the clipped
/// 3×3 window is set.
pub fn near(a: &BoolImage) -> BoolImage {
    let (w, h) = a.dims();
    Grid::from_fn(w, h, |r, c| *a.get(r, c) || neighbours(w, h, r, c).any(|(rr, cc)| *a.get(rr, cc)))
}

/// Every pixel of the clipped window is set.
pub fn interior(a: &BoolImage) -> BoolImage {
    let (w, h) = a.dims();
    Grid::from_fn(w, h, |r, c| *a.get(r, c) && neighbours(w, h, r, c).all(|(rr, cc)| *a.get(rr, cc)))
}

/// Points of `a` with a path to `b` that stays inside `a` until its last step.
pub fn touch(a: &BoolImage, b: &BoolImage) -> BoolImage {
    let (w, h) = a.dims();
    Grid::from_fn(w, h, |r, c| {
        *a.get(r, c) && path_exists(w, h, (r, c), |x, y| *b.get(x, y), |x, y| *a.get(x, y))
    })
}

/// `a` plus the connected regions of `b` adjacent to (or overlapping) `a`.
pub fn grow(a: &BoolImage, b: &BoolImage) -> BoolImage {
    let (w, h) = a.dims();
    let mut out = a.clone();
    let mut seen = vec![false; w * h];
    for r in 0..h {
        for c in 0..w {
            if !*b.get(r, c) || seen[r * w + c] {
                continue;
            }
            // collect the b-region and check contact with a
            let mut region = vec![(r, c)];
            seen[r * w + c] = true;
            let mut i = 0;
            while i < region.len() {
                let (x, y) = region[i];
                i += 1;
                for (xx, yy) in neighbours(w, h, x, y) {
                    if *b.get(xx, yy) && !seen[xx * w + yy] {
                        seen[xx * w + yy] = true;
                        region.push((xx, yy));
                    }
                }
            }
            let contact = region
                .iter()
                .any(|&(x, y)| *a.get(x, y) || neighbours(w, h, x, y).any(|(xx, yy)| *a.get(xx, yy)));
            if contact {
                for (x, y) in region {
                    out.set(x, y, true);
                }
            }
        }
    }
    out
}

/// Points of `a` such that every path from them that reaches a point
/// outside `a` meets `b` at some step after the first.
pub fn surrounded(a: &BoolImage, b: &BoolImage) -> BoolImage {
    let (w, h) = a.dims();
    Grid::from_fn(w, h, |r, c| {
        *a.get(r, c)
            && !path_exists(w, h, (r, c), |x, y| !*a.get(x, y) && !*b.get(x, y), |x, y| !*b.get(x, y))
    })
}

pub fn subset(a: &BoolImage, b: &BoolImage) -> bool {
    a.data().iter().zip(b.data()).all(|(&x, &y)| !x || y)
}
