//! Data-parallel per-pixel primitives.
//!
//! Every kernel reads only its input buffers and writes a fresh output, so
//! rows are processed independently on the ambient rayon pool.

use rayon::prelude::*;
use serde::Serialize;

use crate::image::{BoolImage, Grid, ImageError, U16Image};

#[derive(Debug, thiserror::Error)]
pub enum KernelError {
    #[error(transparent)]
    Dimensions(#[from] ImageError),
    #[error("division by zero")]
    DivisionByZero,
    #[error("expected a single-component image, got {0} components")]
    MultiComponent(u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Cmp {
    Gt,
    Ge,
    Lt,
    Le,
    Eq,
}

impl Cmp {
    pub fn holds(self, x: f64, n: f64) -> bool {
        match self {
            Cmp::Gt => x > n,
            Cmp::Ge => x >= n,
            Cmp::Lt => x < n,
            Cmp::Le => x <= n,
            Cmp::Eq => x == n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

fn map_rows<T: Sync, U: Send + Default + Clone>(
    src: &Grid<T>,
    f: impl Fn(usize, &mut [U]) + Sync + Send,
) -> Grid<U> {
    let (w, h) = src.dims();
    let mut out = Grid::filled(w, h, U::default());
    out.data_mut().par_chunks_mut(w).enumerate().for_each(|(r, row)| f(r, row));
    out
}

pub fn not(a: &BoolImage) -> BoolImage {
    map_rows(a, |r, row| {
        let w = row.len();
        for (o, &i) in row.iter_mut().zip(&a.data()[r * w..(r + 1) * w]) {
            *o = !i;
        }
    })
}

fn zip_with(a: &BoolImage, b: &BoolImage, f: fn(bool, bool) -> bool) -> Result<BoolImage, KernelError> {
    a.same_dims(b)?;
    Ok(map_rows(a, |r, row| {
        let w = row.len();
        let ra = &a.data()[r * w..(r + 1) * w];
        let rb = &b.data()[r * w..(r + 1) * w];
        for ((o, &x), &y) in row.iter_mut().zip(ra).zip(rb) {
            *o = f(x, y);
        }
    }))
}

pub fn and(a: &BoolImage, b: &BoolImage) -> Result<BoolImage, KernelError> {
    zip_with(a, b, |x, y| x && y)
}

pub fn or(a: &BoolImage, b: &BoolImage) -> Result<BoolImage, KernelError> {
    zip_with(a, b, |x, y| x || y)
}

/// Pixel-wise comparison of an intensity image against a real constant.
pub fn threshold(cmp: Cmp, img: &U16Image, n: f64) -> BoolImage {
    map_rows(img, |r, row| {
        let w = row.len();
        for (o, &p) in row.iter_mut().zip(&img.data()[r * w..(r + 1) * w]) {
            *o = cmp.holds(f64::from(p), n);
        }
    })
}

/// Mask of the nonzero pixels.
pub fn nonzero(img: &U16Image) -> BoolImage {
    threshold(Cmp::Gt, img, 0.0)
}

/// Dilation by the 3×3 Moore window, centre included, clipped at the border.
pub fn near(a: &BoolImage) -> BoolImage {
    let (w, h) = a.dims();
    // Horizontal pass then vertical pass; the 3×3 square is separable.
    let horiz = map_rows(a, |r, row| {
        let src = &a.data()[r * w..(r + 1) * w];
        for (c, o) in row.iter_mut().enumerate() {
            let lo = c.saturating_sub(1);
            let hi = (c + 1).min(w - 1);
            *o = src[lo..=hi].iter().any(|&v| v);
        }
    });
    map_rows(a, |r, row| {
        let lo = r.saturating_sub(1);
        let hi = (r + 1).min(h - 1);
        for rr in lo..=hi {
            for (o, &v) in row.iter_mut().zip(&horiz.data()[rr * w..(rr + 1) * w]) {
                *o |= v;
            }
        }
    })
}

pub fn arith(op: ArithOp, x: f64, y: f64) -> Result<f64, KernelError> {
    Ok(match op {
        ArithOp::Add => x + y,
        ArithOp::Sub => x - y,
        ArithOp::Mul => x * y,
        ArithOp::Div if y == 0.0 => return Err(KernelError::DivisionByZero),
        ArithOp::Div => x / y,
    })
}

/// Number of true pixels.
pub fn volume(a: &BoolImage) -> f64 {
    a.data().par_iter().filter(|&&v| v).count() as f64
}

/// The intensity of a single-component image is the image itself.
pub fn check_single_component(components: u8) -> Result<(), KernelError> {
    if components == 1 {
        Ok(())
    } else {
        Err(KernelError::MultiComponent(components))
    }
}
