//! Binary instance masks and the row-major run-length codec.
//!
//! Runs alternate between unset and set pixels and always start with an
//! unset run, which may have length zero. Pixel `(x, y)` has linear index
//! `y * width + x` and its centre sits at integer coordinates `(x, y)`, so a
//! sub-pixel point falls into the pixel obtained by rounding each axis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{round_half_up, Scalar};

pub const RLE_FORMAT: &str = "rle_rowmajor";

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InstanceMask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl InstanceMask {
    pub fn empty(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width as usize * height as usize],
        }
    }

    pub fn full(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            bits: vec![true; width as usize * height as usize],
        }
    }

    /// Builds a mask by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        Self { width, height, bits }
    }

    pub fn from_bits(width: u32, height: u32, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != width as usize * height as usize {
            return Err(Error::Geometry(format!(
                "{} bits for a {width}x{height} mask",
                bits.len()
            )));
        }
        Ok(Self { width, height, bits })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        x < self.width && y < self.height && self.bits[self.index(x, y)]
    }

    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        let i = self.index(x, y);
        self.bits[i] = value;
    }

    fn index(&self, x: u32, y: u32) -> usize {
        y as usize * self.width as usize + x as usize
    }

    /// Number of set pixels.
    pub fn area(&self) -> u64 {
        self.bits.iter().filter(|&&b| b).count() as u64
    }

    /// Whether the pixel containing `(x, y)` is set. Points outside the
    /// mask extent are never contained.
    pub fn contains_point<T: Scalar>(&self, x: T, y: T) -> bool {
        match pixel_index(x, y, self.width, self.height) {
            Some((px, py)) => self.bits[self.index(px, py)],
            None => false,
        }
    }

    pub fn intersection_area(&self, other: &Self) -> Result<u64> {
        self.check_same_dims(other)?;
        Ok(self
            .bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| **a && **b)
            .count() as u64)
    }

    /// Pixels set in `self` but not in `other`.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.check_same_dims(other)?;
        let bits = self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| *a && !*b)
            .collect();
        Ok(Self {
            width: self.width,
            height: self.height,
            bits,
        })
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.check_same_dims(other)?;
        let bits = self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| *a || *b)
            .collect();
        Ok(Self {
            width: self.width,
            height: self.height,
            bits,
        })
    }

    fn check_same_dims(&self, other: &Self) -> Result<()> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::Geometry(format!(
                "mask dimensions differ: {}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )));
        }
        Ok(())
    }

    /// Inclusive pixel extent `(x_min, y_min, x_max, y_max)` of the set bits.
    pub fn pixel_extent(&self) -> Option<(u32, u32, u32, u32)> {
        let mut extent: Option<(u32, u32, u32, u32)> = None;
        for y in 0..self.height {
            for x in 0..self.width {
                if !self.bits[self.index(x, y)] {
                    continue;
                }
                extent = Some(match extent {
                    None => (x, y, x, y),
                    Some((x0, y0, x1, y1)) => (x0.min(x), y0.min(y), x1.max(x), y1.max(y)),
                });
            }
        }
        extent
    }

    /// Window of size `width x height` starting at `(x0, y0)`; pixels outside
    /// the source read as unset.
    pub fn crop(&self, x0: u32, y0: u32, width: u32, height: u32) -> Self {
        Self::from_fn(width, height, |x, y| self.get(x0 + x, y0 + y))
    }
}

/// Rounds a sub-pixel point to its pixel, or `None` when outside
/// `[0, width) x [0, height)`.
pub fn pixel_index<T: Scalar>(x: T, y: T, width: u32, height: u32) -> Option<(u32, u32)> {
    if !(x.is_finite() && y.is_finite()) {
        return None;
    }
    let px = round_half_up(x);
    let py = round_half_up(y);
    if px < T::zero() || py < T::zero() {
        return None;
    }
    let px = px.to_u64()?;
    let py = py.to_u64()?;
    (px < width as u64 && py < height as u64).then_some((px as u32, py as u32))
}

/// Expands row-major run-length counts into a mask.
pub fn rle_decode<C>(counts: &[C], width: u32, height: u32) -> Result<InstanceMask>
where
    C: Copy + TryInto<u64> + std::fmt::Display,
{
    let total = width as u64 * height as u64;
    let mut bits = Vec::with_capacity(total as usize);
    let mut value = false;
    for (i, &c) in counts.iter().enumerate() {
        let run: u64 = c
            .try_into()
            .map_err(|_| Error::Codec(format!("count {i} is negative or too large: {c}")))?;
        if bits.len() as u64 + run > total {
            return Err(Error::Codec(format!(
                "counts overrun a {width}x{height} mask at run {i}"
            )));
        }
        bits.resize(bits.len() + run as usize, value);
        value = !value;
    }
    if bits.len() as u64 != total {
        return Err(Error::Codec(format!(
            "counts sum to {} but the mask has {total} pixels",
            bits.len()
        )));
    }
    Ok(InstanceMask {
        width,
        height,
        bits,
    })
}

/// Canonical run-length counts: a leading unset run (possibly zero) followed
/// by strictly positive alternating runs.
pub fn rle_encode(mask: &InstanceMask) -> Vec<u64> {
    let mut counts = Vec::new();
    let mut current = false;
    let mut run = 0u64;
    for &bit in &mask.bits {
        if bit == current {
            run += 1;
        } else {
            counts.push(run);
            current = bit;
            run = 1;
        }
    }
    if run > 0 || counts.is_empty() {
        counts.push(run);
    }
    counts
}

/// Wire form of a mask inside frame and pair documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaskDocument {
    pub format: String,
    pub counts: Vec<i64>,
    pub width: u32,
    pub height: u32,
}

impl MaskDocument {
    pub fn from_mask(mask: &InstanceMask) -> Self {
        Self {
            format: RLE_FORMAT.to_owned(),
            counts: rle_encode(mask).into_iter().map(|c| c as i64).collect(),
            width: mask.width,
            height: mask.height,
        }
    }

    pub fn decode(&self) -> Result<InstanceMask> {
        if self.format != RLE_FORMAT {
            return Err(Error::Codec(format!(
                "unsupported mask format `{}`, expected `{RLE_FORMAT}`",
                self.format
            )));
        }
        rle_decode(&self.counts, self.width, self.height)
    }
}

impl Serialize for InstanceMask {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MaskDocument::from_mask(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for InstanceMask {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        MaskDocument::deserialize(d)?
            .decode()
            .map_err(serde::de::Error::custom)
    }
}
