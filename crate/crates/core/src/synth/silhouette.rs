//! Binary silhouette masks and their image IO.

use std::path::Path;

use image::{GrayImage, Luma};

use crate::error::{Error, Result};

/// W x H binary mask. Row-major, `true` = foreground.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Silhouette {
    pub width: usize,
    pub height: usize,
    mask: Vec<bool>,
}

impl Silhouette {
    pub fn new(width: usize, height: usize) -> Self {
        Silhouette {
            width,
            height,
            mask: vec![false; width * height],
        }
    }

    pub fn from_mask(width: usize, height: usize, mask: Vec<bool>) -> Self {
        assert_eq!(mask.len(), width * height);
        Silhouette {
            width,
            height,
            mask,
        }
    }

    /// Builds a mask from a predicate over (x, y) pixel coordinates.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut mask = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                mask.push(f(x, y));
            }
        }
        Silhouette {
            width,
            height,
            mask,
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.mask[y * self.width + x]
    }

    /// Out-of-bounds coordinates read as background.
    #[inline]
    pub fn get_clamped(&self, x: i64, y: i64) -> bool {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            false
        } else {
            self.mask[y as usize * self.width + x as usize]
        }
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.mask[y * self.width + x] = v;
    }

    pub fn pixels(&self) -> &[bool] {
        &self.mask
    }

    /// Foreground pixel count.
    pub fn area(&self) -> usize {
        self.mask.iter().filter(|&&v| v).count()
    }

    /// Mean of foreground pixel coordinates; None when empty.
    pub fn centroid(&self) -> Option<[f64; 2]> {
        let mut n = 0usize;
        let (mut sx, mut sy) = (0.0f64, 0.0f64);
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(x, y) {
                    n += 1;
                    sx += x as f64;
                    sy += y as f64;
                }
            }
        }
        if n == 0 {
            None
        } else {
            Some([sx / n as f64, sy / n as f64])
        }
    }

    /// Writes the mask as an 8-bit grayscale PNG (foreground = 255).
    pub fn save_png(&self, path: &Path) -> Result<()> {
        let img = GrayImage::from_fn(self.width as u32, self.height as u32, |x, y| {
            Luma([if self.get(x as usize, y as usize) { 255 } else { 0 }])
        });
        img.save(path)?;
        Ok(())
    }

    /// Loads a grayscale image; values >= 128 are foreground.
    pub fn load_png(path: &Path) -> Result<Self> {
        let img = image::open(path)
            .map_err(|e| Error::CorruptImage {
                path: path.display().to_string(),
                reason: e.to_string(),
            })?
            .into_luma8();
        let (w, h) = (img.width() as usize, img.height() as usize);
        let mut sil = Silhouette::new(w, h);
        for y in 0..h {
            for x in 0..w {
                sil.set(x, y, img.get_pixel(x as u32, y as u32).0[0] >= 128);
            }
        }
        Ok(sil)
    }
}
