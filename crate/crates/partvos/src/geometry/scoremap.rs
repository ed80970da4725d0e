use super::{BinaryMask, BoundingBox};
use crate::error::{Error, Result};

/// Real-valued per-pixel map with every value finite and inside `[0, 1]`.
/// Used for tracker responses and segmentation probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMap {
    width: u32,
    height: u32,
    values: Vec<f64>,
}

impl ScoreMap {
    /// Build from raw values. Non-finite values are an error; values slightly
    /// outside `[0, 1]` from floating-point roundoff are clamped.
    pub fn new(width: u32, height: u32, values: Vec<f64>) -> Result<Self> {
        assert!(width > 0 && height > 0, "score map dimensions must be positive");
        assert_eq!(values.len(), width as usize * height as usize);
        let mut values = values;
        for v in &mut values {
            if !v.is_finite() {
                return Err(Error::Config(format!("non-finite score value {v}")));
            }
            *v = v.clamp(0.0, 1.0);
        }
        Ok(ScoreMap {
            width,
            height,
            values,
        })
    }

    pub fn uniform(width: u32, height: u32, value: f64) -> Self {
        assert!((0.0..=1.0).contains(&value));
        ScoreMap {
            width,
            height,
            values: vec![value; width as usize * height as usize],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> f64 {
        self.values[y as usize * self.width as usize + x as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Index of the maximum value, ties broken by the lowest row-major index.
    pub fn argmax(&self) -> (u32, u32) {
        let mut best = 0usize;
        for (i, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = i;
            }
        }
        (
            (best % self.width as usize) as u32,
            (best / self.width as usize) as u32,
        )
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Foreground mask of pixels strictly above `threshold`.
    pub fn threshold(&self, threshold: f64) -> BinaryMask {
        BinaryMask::from_fn(self.width, self.height, |x, y| self.get(x, y) > threshold)
    }

    /// Mean value over the pixels of `bbox` (clipped to the map); 0 if the
    /// box misses the map entirely.
    pub fn mean_in_box(&self, bbox: &BoundingBox) -> f64 {
        let Some(b) = bbox.clip(self.width, self.height) else {
            return 0.0;
        };
        let mut sum = 0.0;
        for y in b.y as u32..b.bottom() as u32 {
            for x in b.x as u32..b.right() as u32 {
                sum += self.get(x, y);
            }
        }
        sum / b.area() as f64
    }
}

/// Single-channel float image plane without the `[0,1]` restriction of
/// [`ScoreMap`]. Holds luminance patches for correlation tracking and
/// feature channels for segmentation.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    width: u32,
    height: u32,
    data: Vec<f64>,
}

impl Plane {
    pub fn new(width: u32, height: u32, data: Vec<f64>) -> Self {
        assert!(width > 0 && height > 0);
        assert_eq!(data.len(), width as usize * height as usize);
        Plane {
            width,
            height,
            data,
        }
    }

    pub fn zeros(width: u32, height: u32) -> Self {
        Plane::new(width, height, vec![0.0; width as usize * height as usize])
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> f64 {
        self.data[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, v: f64) {
        self.data[y as usize * self.width as usize + x as usize] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn crop(&self, bbox: &BoundingBox) -> Result<Plane> {
        if !bbox.fits(self.width, self.height) {
            return Err(Error::BoxOutsideFrame {
                x: bbox.x,
                y: bbox.y,
                w: bbox.w,
                h: bbox.h,
                fw: self.width,
                fh: self.height,
            });
        }
        let mut out = Plane::zeros(bbox.w as u32, bbox.h as u32);
        for y in 0..bbox.h as u32 {
            for x in 0..bbox.w as u32 {
                out.set(x, y, self.get(bbox.x as u32 + x, bbox.y as u32 + y));
            }
        }
        Ok(out)
    }

    /// Pointwise blend `alpha * self + (1 - alpha) * other`.
    pub fn blend(&self, other: &Plane, alpha: f64) -> Plane {
        assert_eq!(self.width, other.width);
        assert_eq!(self.height, other.height);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| alpha * a + (1.0 - alpha) * b)
            .collect();
        Plane::new(self.width, self.height, data)
    }
}
