//! Generated inputs: benchmark formulas and synthetic test images.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::image::{self, Grid, ImageError, U16Image};

/// Image read by sequential formulas.
pub const SEQUENTIAL_INPUT: &str = "input.png";
/// Images read by random formulas.
pub const RANDOM_INPUTS: [&str; 2] = ["a.png", "b.png"];
pub const OUTPUT: &str = "o.png";

/// `near(!near(!...near(x)))` with `depth` applications over one loaded
/// image. The outermost application is always `near`, so the text depends on
/// `depth` alone.
pub fn gen_sequential(depth: usize) -> String {
    let mut body = String::from("x");
    for i in (0..depth).rev() {
        // count from the outside: even positions are near
        body = if i % 2 == 0 { format!("near({body})") } else { format!("!{body}") };
    }
    format!("load x = \"{SEQUENTIAL_INPUT}\"\nsave \"{OUTPUT}\" {body}\n")
}

/// A random boolean formula with exactly `size` operators drawn from
/// `! & | near reach` and the thresholds, over two loaded images.
pub fn gen_random(size: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let body = random_expr(&mut rng, size);
    let mut out = String::new();
    for (name, path) in ["a", "b"].iter().zip(RANDOM_INPUTS) {
        out.push_str(&format!("load {name} = \"{path}\"\n"));
    }
    out.push_str(&format!("save \"{OUTPUT}\" {body}\n"));
    out
}

fn random_expr(rng: &mut ChaCha8Rng, ops: usize) -> String {
    let leaf = |rng: &mut ChaCha8Rng| if rng.gen_bool(0.5) { "a" } else { "b" }.to_string();
    if ops == 0 {
        return leaf(rng);
    }
    // A threshold needs an intensity operand, so it only appears on a leaf.
    let choice = rng.gen_range(0..if ops == 1 { 6 } else { 5 });
    match choice {
        0 => format!("!{}", random_expr(rng, ops - 1)),
        1 => format!("near({})", random_expr(rng, ops - 1)),
        2..=4 => {
            let left = rng.gen_range(0..ops);
            let (l, r) = (random_expr(rng, left), random_expr(rng, ops - 1 - left));
            match choice {
                2 => format!("({} & {})", l, r),
                3 => format!("({} | {})", l, r),
                _ => format!("reach({l}, {r})"),
            }
        }
        _ => {
            let cmp = [">.", ">=.", "<.", "<=."][rng.gen_range(0..4)];
            format!("({} {cmp} {})", leaf(rng), rng.gen_range(0..=65535u32))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ImageKind {
    BlobNoise,
    Spiral,
    Checker,
    ConcaveCorner,
}

impl ImageKind {
    pub const ALL: [ImageKind; 4] = [ImageKind::BlobNoise, ImageKind::Spiral, ImageKind::Checker, ImageKind::ConcaveCorner];

    pub fn name(self) -> &'static str {
        match self {
            ImageKind::BlobNoise => "blob-noise",
            ImageKind::Spiral => "spiral",
            ImageKind::Checker => "checker",
            ImageKind::ConcaveCorner => "concave-corner",
        }
    }
}

impl fmt::Display for ImageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ImageKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        ImageKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown image kind `{s}` (expected blob-noise, spiral, checker or concave-corner)"))
    }
}

/// Brightest value of the halo and the salt noise; the disc is above it.
pub const HALO_MAX: u16 = 62258;
/// The halo and the salt noise are above this value, the background below.
pub const HALO_MIN_EXCLUSIVE: u16 = 56360;

pub fn synthetic_image(kind: ImageKind, width: usize, height: usize, seed: u64) -> U16Image {
    match kind {
        ImageKind::BlobNoise => blob_noise(width, height, seed),
        ImageKind::Spiral => spiral(width, height),
        ImageKind::Checker => Grid::from_fn(width, height, |r, c| if (r + c) % 2 == 0 { 65535 } else { 0 }),
        ImageKind::ConcaveCorner => concave_corners(width, height),
    }
}

pub fn gen_synthetic_image(
    kind: ImageKind,
    width: usize,
    height: usize,
    seed: u64,
    path: &Path,
) -> Result<U16Image, ImageError> {
    let img = synthetic_image(kind, width, height, seed);
    image::save_u16(path, &img)?;
    Ok(img)
}

/// A bright disc in the middle, a ring of mid intensity around it, salt of
/// the same mid intensity scattered at a distance, and a dark background.
fn blob_noise(w: usize, h: usize, seed: u64) -> U16Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (cr, cc) = (h as f64 / 2.0, w as f64 / 2.0);
    let disc = w.min(h) as f64 / 8.0;
    let halo = 2.0 * disc;
    Grid::from_fn(w, h, |r, c| {
        let d = ((r as f64 + 0.5 - cr).powi(2) + (c as f64 + 0.5 - cc).powi(2)).sqrt();
        if d <= disc {
            rng.gen_range(HALO_MAX + 1..=65535)
        } else if d <= halo || (d > halo + 3.0 && rng.gen_bool(0.02)) {
            rng.gen_range(HALO_MIN_EXCLUSIVE + 1..=HALO_MAX)
        } else {
            rng.gen_range(0..40000)
        }
    })
}

/// A square spiral one pixel wide, starting at the top-left corner and
/// winding inwards with one blank pixel between consecutive turns.
fn spiral(w: usize, h: usize) -> U16Image {
    let mut img = Grid::filled(w, h, 0u16);
    if w == 0 || h == 0 {
        return img;
    }
    let (mut top, mut bottom, mut left, mut right) = (0i64, h as i64 - 1, 0i64, w as i64 - 1);
    let (mut r, mut c) = (0i64, 0i64);
    let mut set = |r: i64, c: i64| img.set(r as usize, c as usize, 65535);
    set(r, c);
    loop {
        if c >= right {
            break;
        }
        while c < right {
            c += 1;
            set(r, c);
        }
        if r >= bottom {
            break;
        }
        while r < bottom {
            r += 1;
            set(r, c);
        }
        if c <= left {
            break;
        }
        while c > left {
            c -= 1;
            set(r, c);
        }
        if r <= top + 2 {
            break;
        }
        while r > top + 2 {
            r -= 1;
            set(r, c);
        }
        top += 2;
        left += 2;
        right -= 2;
        bottom -= 2;
    }
    img
}

pub const CORNER_TILE: usize = 8;

/// 8×8 tiles, each holding an L whose arms meet at the tile's top-left
/// pixel. Labels settle on the two arm ends separately before a reconnect
/// merges them.
fn concave_corners(w: usize, h: usize) -> U16Image {
    let arm = CORNER_TILE - 1;
    Grid::from_fn(w, h, |r, c| {
        let (tr, tc) = (r % CORNER_TILE, c % CORNER_TILE);
        let full_tile = r - tr + arm <= h && c - tc + arm <= w;
        let on = (tr == 0 && tc < arm) || (tc == 0 && tr < arm);
        if on && full_tile {
            65535
        } else {
            0
        }
    })
}

/// SHA-256 over the dimensions (little-endian u32) and the pixels
/// (big-endian u16, row-major), as lowercase hex.
pub fn pixel_checksum(img: &U16Image) -> String {
    let mut h = Sha256::new();
    h.update((img.width() as u32).to_le_bytes());
    h.update((img.height() as u32).to_le_bytes());
    for p in img.data() {
        h.update(p.to_be_bytes());
    }
    hex::encode(h.finalize())
}

/// [`pixel_checksum`] of a mask saved as 0/65535.
pub fn mask_checksum(mask: &crate::image::BoolImage) -> String {
    pixel_checksum(&mask.map(|&b| if b { 65535 } else { 0 }))
}
