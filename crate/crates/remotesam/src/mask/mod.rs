//! Raster and mask primitives shared by every other module: probability
//! maps, binary masks, run-length coding, connected components and IoU.
//!
//! All operations here are pure functions over immutable inputs; values are
//! `Send + Sync` and callers are free to parallelize per image.

mod components;
mod rle;

pub use components::{connected_components, Connectivity, InstanceMask};
pub use rle::{rle_decode, rle_encode, RleMask};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors produced by mask primitives.
#[derive(Debug, Error)]
pub enum MaskError {
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(u32, u32, u32, u32),
    #[error("zero-sized raster: {0}x{1}")]
    EmptyRaster(u32, u32),
    #[error("value count {found} does not equal width*height = {expected}")]
    BadValueCount { expected: usize, found: usize },
    #[error("probability {0} outside [0,1]")]
    BadProbability(f32),
    #[error("run lengths sum to {found}, expected width*height = {expected}")]
    BadRunSum { expected: u64, found: u64 },
    #[error("mask is empty")]
    EmptyMask,
}

/// Per-pixel probability raster answering for one class or expression.
///
/// Values are row-major, `values[y * width + x]`, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbMap {
    width: u32,
    height: u32,
    values: Vec<f32>,
    /// Class name or referring expression this map answers for.
    pub label: String,
}

impl ProbMap {
    pub fn new(
        width: u32,
        height: u32,
        values: Vec<f32>,
        label: impl Into<String>,
    ) -> Result<Self, MaskError> {
        if width == 0 || height == 0 {
            return Err(MaskError::EmptyRaster(width, height));
        }
        let expected = width as usize * height as usize;
        if values.len() != expected {
            return Err(MaskError::BadValueCount {
                expected,
                found: values.len(),
            });
        }
        if let Some(&v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(MaskError::BadProbability(v));
        }
        Ok(Self {
            width,
            height,
            values,
            label: label.into(),
        })
    }

    /// Map with every pixel set to `value`.
    pub fn uniform(
        width: u32,
        height: u32,
        value: f32,
        label: impl Into<String>,
    ) -> Result<Self, MaskError> {
        let n = width as usize * height as usize;
        Self::new(width, height, vec![value; n], label)
    }

    /// Builds a map from a per-pixel closure `(x, y) -> p`, clamping to `[0, 1]`.
    pub fn from_fn(
        width: u32,
        height: u32,
        label: impl Into<String>,
        mut f: impl FnMut(u32, u32) -> f32,
    ) -> Result<Self, MaskError> {
        let mut values = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                values.push(f(x, y).clamp(0.0, 1.0));
            }
        }
        Self::new(width, height, values, label)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> f32 {
        self.values[y as usize * self.width as usize + x as usize]
    }

    pub fn same_dims(&self, other: &ProbMap) -> bool {
        self.width == other.width && self.height == other.height
    }
}

/// Binary mask over a raster; the unit every task conversion consumes.
///
/// Stored row-major with one byte per pixel, 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: u32,
    height: u32,
    bits: Vec<u8>,
}

impl BinaryMask {
    pub fn new(width: u32, height: u32, bits: Vec<u8>) -> Result<Self, MaskError> {
        if width == 0 || height == 0 {
            return Err(MaskError::EmptyRaster(width, height));
        }
        let expected = width as usize * height as usize;
        if bits.len() != expected {
            return Err(MaskError::BadValueCount {
                expected,
                found: bits.len(),
            });
        }
        let bits = bits.into_iter().map(|b| u8::from(b != 0)).collect();
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn zeros(width: u32, height: u32) -> Result<Self, MaskError> {
        Self::new(width, height, vec![0; width as usize * height as usize])
    }

    pub fn from_fn(
        width: u32,
        height: u32,
        mut f: impl FnMut(u32, u32) -> bool,
    ) -> Result<Self, MaskError> {
        let mut bits = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                bits.push(u8::from(f(x, y)));
            }
        }
        Self::new(width, height, bits)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[y as usize * self.width as usize + x as usize] != 0
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, on: bool) {
        self.bits[y as usize * self.width as usize + x as usize] = u8::from(on);
    }

    /// Number of foreground pixels.
    pub fn area(&self) -> u64 {
        self.bits.iter().map(|&b| u64::from(b)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }

    pub fn same_dims(&self, other: &BinaryMask) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// Coordinates of foreground pixels in row-major order.
    pub fn foreground(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let w = self.width;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b != 0)
            .map(move |(i, _)| ((i as u32) % w, (i as u32) / w))
    }

    /// Pixelwise OR with `other`.
    pub fn union_with(&mut self, other: &BinaryMask) -> Result<(), MaskError> {
        if !self.same_dims(other) {
            return Err(MaskError::DimensionMismatch(
                self.width,
                self.height,
                other.width,
                other.height,
            ));
        }
        for (a, &b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
        Ok(())
    }
}

/// Axis-aligned box in pixel coordinates; bounds are inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BBox {
    pub x_min: u32,
    pub y_min: u32,
    pub x_max: u32,
    pub y_max: u32,
}

impl BBox {
    pub fn new(x_min: u32, y_min: u32, x_max: u32, y_max: u32) -> Self {
        debug_assert!(x_min <= x_max && y_min <= y_max);
        Self {
            x_min,
            y_min,
            x_max,
            y_max,
        }
    }

    /// Inclusive-pixel area.
    pub fn area(&self) -> u64 {
        u64::from(self.x_max - self.x_min + 1) * u64::from(self.y_max - self.y_min + 1)
    }

    /// Box center in continuous pixel coordinates.
    pub fn center(&self) -> (f64, f64) {
        (
            (f64::from(self.x_min) + f64::from(self.x_max)) / 2.0,
            (f64::from(self.y_min) + f64::from(self.y_max)) / 2.0,
        )
    }

    /// Grows the box by `padding` pixels on every side, clamped to the image.
    pub fn expand_clamped(&self, padding: u32, width: u32, height: u32) -> BBox {
        BBox {
            x_min: self.x_min.saturating_sub(padding),
            y_min: self.y_min.saturating_sub(padding),
            x_max: (self.x_max + padding).min(width - 1),
            y_max: (self.y_max + padding).min(height - 1),
        }
    }
}

/// Thresholds a probability map into a binary mask.
///
/// A pixel is foreground exactly when its value is `>= threshold`; the tie
/// at equality is inclusive.
pub fn binarize(map: &ProbMap, threshold: f32) -> BinaryMask {
    let bits = map
        .values
        .iter()
        .map(|&v| u8::from(v >= threshold))
        .collect();
    BinaryMask {
        width: map.width,
        height: map.height,
        bits,
    }
}

/// Intersection-over-union of two same-sized masks.
///
/// Defined as 1.0 when both masks are empty, so an all-zero prediction
/// scores perfectly against an all-zero ground truth.
pub fn mask_iou(a: &BinaryMask, b: &BinaryMask) -> Result<f64, MaskError> {
    let (inter, union) = mask_overlap(a, b)?;
    if union == 0 {
        return Ok(1.0);
    }
    Ok(inter as f64 / union as f64)
}

/// Raw (intersection, union) pixel counts of two same-sized masks.
pub fn mask_overlap(a: &BinaryMask, b: &BinaryMask) -> Result<(u64, u64), MaskError> {
    if !a.same_dims(b) {
        return Err(MaskError::DimensionMismatch(
            a.width, a.height, b.width, b.height,
        ));
    }
    let mut inter = 0u64;
    let mut union = 0u64;
    for (&x, &y) in a.bits.iter().zip(&b.bits) {
        inter += u64::from(x & y);
        union += u64::from(x | y);
    }
    Ok((inter, union))
}
