//! Image buffers, runtime values and PNG input/output.
//!
//! Coordinates are `(row, col)`, row-major, origin top-left.

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum ImageError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{path}: invalid PNG: {reason}")]
    Decode { path: PathBuf, reason: String },
    #[error("{path}: unsupported PNG format: {reason}")]
    Unsupported { path: PathBuf, reason: String },
    #[error("{path}: PNG encoding failed: {reason}")]
    Encode { path: PathBuf, reason: String },
    #[error("cannot save a number as an image; use print")]
    NotAnImage,
    #[error("images have different dimensions: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
}

/// A dense `width × height` grid stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Clone> Grid<T> {
    pub fn filled(width: usize, height: usize, value: T) -> Self {
        assert!(width >= 1 && height >= 1, "images are at least 1x1");
        Grid { width, height, data: vec![value; width * height] }
    }
}

impl<T> Grid<T> {
    pub fn from_vec(width: usize, height: usize, data: Vec<T>) -> Self {
        assert!(width >= 1 && height >= 1, "images are at least 1x1");
        assert_eq!(data.len(), width * height, "pixel count does not match dimensions");
        Grid { width, height, data }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                data.push(f(r, c));
            }
        }
        Self::from_vec(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.width + col
    }

    pub fn get(&self, row: usize, col: usize) -> &T {
        &self.data[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: T) {
        let i = row * self.width + col;
        self.data[i] = v;
    }

    pub fn same_dims<U>(&self, other: &Grid<U>) -> Result<(), ImageError> {
        if self.dims() == other.dims() {
            Ok(())
        } else {
            Err(ImageError::DimensionMismatch(self.width, self.height, other.width, other.height))
        }
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Grid<U> {
        Grid { width: self.width, height: self.height, data: self.data.iter().map(f).collect() }
    }
}

pub type BoolImage = Grid<bool>;
pub type U16Image = Grid<u16>;
pub type LabelImage = Grid<Label>;

/// A pixel coordinate, or the absence of one, packed into a single word so
/// that integer order is the lexicographic `(row, col)` order and `NULL`
/// sorts below every coordinate.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Label(u64);

impl Label {
    pub const NULL: Label = Label(0);

    pub fn at(row: usize, col: usize) -> Label {
        debug_assert!(row < u32::MAX as usize && col <= u32::MAX as usize);
        Label(((row as u64 + 1) << 32) | col as u64)
    }

    pub fn from_bits(bits: u64) -> Label {
        Label(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn is_null(self) -> bool {
        self.0 == 0
    }

    /// `(row, col)`, or `None` for `NULL`.
    pub fn coords(self) -> Option<(usize, usize)> {
        if self.is_null() {
            None
        } else {
            Some(((self.0 >> 32) as usize - 1, (self.0 & 0xffff_ffff) as usize))
        }
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.coords() {
            None => f.write_str("Null"),
            Some((r, c)) => write!(f, "({r},{c})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PixelKind {
    Bool,
    U16,
    Label,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ImageBuffer {
    Bool(BoolImage),
    U16(U16Image),
    Label(LabelImage),
}

impl ImageBuffer {
    pub fn kind(&self) -> PixelKind {
        match self {
            ImageBuffer::Bool(_) => PixelKind::Bool,
            ImageBuffer::U16(_) => PixelKind::U16,
            ImageBuffer::Label(_) => PixelKind::Label,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        match self {
            ImageBuffer::Bool(g) => g.dims(),
            ImageBuffer::U16(g) => g.dims(),
            ImageBuffer::Label(g) => g.dims(),
        }
    }
}

/// Result of a task: a number or a shared, immutable image.
#[derive(Debug, Clone)]
pub enum Value {
    Number(f64),
    Image { buffer: Arc<ImageBuffer>, components: u8 },
}

impl Value {
    pub fn image(buffer: ImageBuffer) -> Value {
        Value::Image { buffer: Arc::new(buffer), components: 1 }
    }

    pub fn bool_image(g: BoolImage) -> Value {
        Value::image(ImageBuffer::Bool(g))
    }

    pub fn u16_image(g: U16Image) -> Value {
        Value::image(ImageBuffer::U16(g))
    }

    pub fn pixel_kind(&self) -> Option<PixelKind> {
        match self {
            Value::Number(_) => None,
            Value::Image { buffer, .. } => Some(buffer.kind()),
        }
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Value::Number(v) => Some(*v),
            Value::Image { .. } => None,
        }
    }

    pub fn as_bool(&self) -> Option<&BoolImage> {
        match self {
            Value::Image { buffer, .. } => match &**buffer {
                ImageBuffer::Bool(g) => Some(g),
                _ => None,
            },
            Value::Number(_) => None,
        }
    }

    pub fn as_u16(&self) -> Option<&U16Image> {
        match self {
            Value::Image { buffer, .. } => match &**buffer {
                ImageBuffer::U16(g) => Some(g),
                _ => None,
            },
            Value::Number(_) => None,
        }
    }

    /// Structural equality: numbers bitwise, images pixel-exact.
    pub fn same_as(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Number(a), Value::Number(b)) => a.to_bits() == b.to_bits(),
            (Value::Image { buffer: a, components: ca }, Value::Image { buffer: b, components: cb }) => {
                ca == cb && a == b
            }
            _ => false,
        }
    }
}

/// Loads a PNG as a single-component 16-bit image.
///
/// 16-bit grayscale loads verbatim and 8-bit samples are widened by `v * 257`
/// so 255 maps to 65535. For images with several channels only the first one
/// is kept. Sub-byte depths and palette images are rejected.
pub fn load_png(path: &Path) -> Result<U16Image, ImageError> {
    let file = File::open(path).map_err(|source| ImageError::Read { path: path.into(), source })?;
    let decode_err = |e: png::DecodingError| ImageError::Decode { path: path.into(), reason: e.to_string() };
    let mut decoder = png::Decoder::new(BufReader::new(file));
    decoder.set_transformations(png::Transformations::IDENTITY);
    let mut reader = decoder.read_info().map_err(decode_err)?;
    let mut buf = vec![0; reader.output_buffer_size().ok_or_else(|| ImageError::Decode {
        path: path.into(),
        reason: "image too large".into(),
    })?];
    let info = reader.next_frame(&mut buf).map_err(decode_err)?;

    let channels = match info.color_type {
        png::ColorType::Grayscale => 1,
        png::ColorType::GrayscaleAlpha => 2,
        png::ColorType::Rgb => 3,
        png::ColorType::Rgba => 4,
        png::ColorType::Indexed => {
            return Err(ImageError::Unsupported { path: path.into(), reason: "palette images".into() })
        }
    };
    let bytes_per_sample = match info.bit_depth {
        png::BitDepth::Eight => 1,
        png::BitDepth::Sixteen => 2,
        other => {
            return Err(ImageError::Unsupported { path: path.into(), reason: format!("{other:?}-bit samples") })
        }
    };
    let (w, h) = (info.width as usize, info.height as usize);
    if w == 0 || h == 0 {
        return Err(ImageError::Decode { path: path.into(), reason: "empty image".into() });
    }
    let stride = channels * bytes_per_sample;
    let mut data = Vec::with_capacity(w * h);
    for row in buf.chunks_exact(info.line_size).take(h) {
        for px in row[..w * stride].chunks_exact(stride) {
            data.push(match bytes_per_sample {
                1 => u16::from(px[0]) * 257,
                _ => u16::from_be_bytes([px[0], px[1]]),
            });
        }
    }
    Ok(Grid::from_vec(w, h, data))
}

/// Writes a value as PNG: boolean images as 16-bit grayscale (true = 65535),
/// 16-bit images verbatim, label images as 8-bit RGB false colour.
pub fn save_png(path: &Path, value: &Value) -> Result<(), ImageError> {
    match value {
        Value::Number(_) => Err(ImageError::NotAnImage),
        Value::Image { buffer, .. } => match &**buffer {
            ImageBuffer::Bool(g) => save_u16(path, &g.map(|&b| if b { u16::MAX } else { 0 })),
            ImageBuffer::U16(g) => save_u16(path, g),
            ImageBuffer::Label(g) => save_labels(path, g),
        },
    }
}

pub fn save_u16(path: &Path, img: &U16Image) -> Result<(), ImageError> {
    let bytes: Vec<u8> = img.data().iter().flat_map(|v| v.to_be_bytes()).collect();
    write_png(path, img.dims(), png::ColorType::Grayscale, png::BitDepth::Sixteen, &bytes)
}

pub fn save_labels(path: &Path, img: &LabelImage) -> Result<(), ImageError> {
    let bytes: Vec<u8> = img.data().iter().flat_map(|&l| label_colour(l)).collect();
    write_png(path, img.dims(), png::ColorType::Rgb, png::BitDepth::Eight, &bytes)
}

/// Deterministic false colour for a label; `NULL` is black and no coordinate
/// maps to black.
pub fn label_colour(label: Label) -> [u8; 3] {
    if label.is_null() {
        return [0, 0, 0];
    }
    // splitmix64 finaliser
    let mut z = label.bits().wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    let [r, g, b, ..] = z.to_le_bytes();
    [r | 0x20, g | 0x20, b | 0x20]
}

fn write_png(
    path: &Path,
    (w, h): (usize, usize),
    colour: png::ColorType,
    depth: png::BitDepth,
    bytes: &[u8],
) -> Result<(), ImageError> {
    let encode_err = |e: png::EncodingError| ImageError::Encode { path: path.into(), reason: e.to_string() };
    let file = File::create(path).map_err(|source| ImageError::Write { path: path.into(), source })?;
    let mut enc = png::Encoder::new(BufWriter::new(file), w as u32, h as u32);
    enc.set_color(colour);
    enc.set_depth(depth);
    let mut writer = enc.write_header().map_err(encode_err)?;
    writer.write_image_data(bytes).map_err(encode_err)?;
    writer.finish().map_err(encode_err)
}
