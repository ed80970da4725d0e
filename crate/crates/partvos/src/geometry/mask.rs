use super::BoundingBox;
use crate::error::{Error, Result};

/// Per-pixel foreground bitmap, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: u32,
    height: u32,
    data: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: u32, height: u32) -> Self {
        assert!(width > 0 && height > 0, "mask dimensions must be positive");
        BinaryMask {
            width,
            height,
            data: vec![false; width as usize * height as usize],
        }
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> bool) -> Self {
        let mut m = BinaryMask::new(width, height);
        for y in 0..height {
            for x in 0..width {
                m.set(x, y, f(x, y));
            }
        }
        m
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> bool {
        self.data[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, v: bool) {
        self.data[y as usize * self.width as usize + x as usize] = v;
    }

    /// Number of foreground pixels.
    pub fn area(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.data.iter().any(|&b| b)
    }

    pub fn same_dims(&self, other: &BinaryMask) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// Tight bounding box of the foreground, `None` when empty.
    pub fn tight_box(&self) -> Option<BoundingBox> {
        let (mut x0, mut y0) = (i64::MAX, i64::MAX);
        let (mut x1, mut y1) = (i64::MIN, i64::MIN);
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(x, y) {
                    x0 = x0.min(x as i64);
                    y0 = y0.min(y as i64);
                    x1 = x1.max(x as i64);
                    y1 = y1.max(y as i64);
                }
            }
        }
        if x1 < x0 {
            return None;
        }
        Some(BoundingBox {
            x: x0,
            y: y0,
            w: x1 - x0 + 1,
            h: y1 - y0 + 1,
        })
    }

    /// Copy the pixels under `bbox` into a box-sized mask. The box must lie
    /// within the mask.
    pub fn crop(&self, bbox: &BoundingBox) -> Result<BinaryMask> {
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
        let mut out = BinaryMask::new(bbox.w as u32, bbox.h as u32);
        for y in 0..bbox.h as u32 {
            for x in 0..bbox.w as u32 {
                out.set(x, y, self.get(bbox.x as u32 + x, bbox.y as u32 + y));
            }
        }
        Ok(out)
    }

    /// Count foreground pixels inside `bbox` (clipped to the mask).
    pub fn count_in_box(&self, bbox: &BoundingBox) -> usize {
        let Some(b) = bbox.clip(self.width, self.height) else {
            return 0;
        };
        let mut n = 0;
        for y in b.y as u32..b.bottom() as u32 {
            for x in b.x as u32..b.right() as u32 {
                if self.get(x, y) {
                    n += 1;
                }
            }
        }
        n
    }

    /// Integral image of foreground counts; entry `(x, y)` holds the number of
    /// foreground pixels in the rectangle `[0,x) x [0,y)`.
    pub fn integral(&self) -> MaskIntegral {
        let w = self.width as usize + 1;
        let h = self.height as usize + 1;
        let mut table = vec![0u64; w * h];
        for y in 0..self.height as usize {
            let mut row = 0u64;
            for x in 0..self.width as usize {
                if self.data[y * self.width as usize + x] {
                    row += 1;
                }
                table[(y + 1) * w + x + 1] = table[y * w + x + 1] + row;
            }
        }
        MaskIntegral {
            width: self.width,
            table,
        }
    }
}

/// Summed-area table over a mask, for O(1) box queries.
pub struct MaskIntegral {
    width: u32,
    table: Vec<u64>,
}

impl MaskIntegral {
    /// Foreground count inside `bbox`; the box must be clipped already.
    pub fn count(&self, bbox: &BoundingBox) -> u64 {
        let w = self.width as usize + 1;
        let (x0, y0) = (bbox.x as usize, bbox.y as usize);
        let (x1, y1) = (bbox.right() as usize, bbox.bottom() as usize);
        self.table[y1 * w + x1] + self.table[y0 * w + x0]
            - self.table[y0 * w + x1]
            - self.table[y1 * w + x0]
    }
}

/// Mask IoU: `|a ∧ b| / |a ∨ b|`. Two empty masks count as a perfect match
/// (1.0), so frames where prediction and ground truth are both empty score
/// as success.
pub fn mask_iou(a: &BinaryMask, b: &BinaryMask) -> Result<f64> {
    if !a.same_dims(b) {
        return Err(Error::DimensionMismatch(a.width, a.height, b.width, b.height));
    }
    let mut inter = 0u64;
    let mut union = 0u64;
    for (&pa, &pb) in a.data.iter().zip(&b.data) {
        if pa && pb {
            inter += 1;
        }
        if pa || pb {
            union += 1;
        }
    }
    if union == 0 {
        return Ok(1.0);
    }
    Ok(inter as f64 / union as f64)
}

/// Smallest box enclosing the foreground pixels of `mask` inside `bbox`.
/// Returns the input box unchanged when no foreground pixel lies inside it.
pub fn tighten_box(bbox: &BoundingBox, mask: &BinaryMask) -> BoundingBox {
    let Some(b) = bbox.clip(mask.width, mask.height) else {
        return *bbox;
    };
    let (mut x0, mut y0) = (i64::MAX, i64::MAX);
    let (mut x1, mut y1) = (i64::MIN, i64::MIN);
    for y in b.y..b.bottom() {
        for x in b.x..b.right() {
            if mask.get(x as u32, y as u32) {
                x0 = x0.min(x);
                y0 = y0.min(y);
                x1 = x1.max(x);
                y1 = y1.max(y);
            }
        }
    }
    if x1 < x0 {
        return *bbox;
    }
    BoundingBox {
        x: x0,
        y: y0,
        w: x1 - x0 + 1,
        h: y1 - y0 + 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_mask(rng: &mut ChaCha8Rng, w: u32, h: u32, density: f64) -> BinaryMask {
        BinaryMask::from_fn(w, h, |_, _| rng.random_range(0.0..1.0) < density)
    }

    #[test]
    fn iou_identity_and_empty() {
        let mut a = BinaryMask::new(8, 8);
        a.set(2, 2, true);
        a.set(3, 2, true);
        assert_eq!(mask_iou(&a, &a).unwrap(), 1.0);

        let empty = BinaryMask::new(8, 8);
        assert_eq!(mask_iou(&a, &empty).unwrap(), 0.0);
        assert_eq!(mask_iou(&empty, &empty).unwrap(), 1.0);
    }

    #[test]
    fn iou_hand_counted() {
        // a: rows 0..4 x cols 0..4 (16 px), b: rows 2..6 x cols 1..5 (16 px)
        // overlap rows 2..4 x cols 1..4 = 2*3? Draw masks with 12 overlap / 20 union.
        let a = BinaryMask::from_fn(8, 8, |x, y| x < 4 && y < 4);
        let b = BinaryMask::from_fn(8, 8, |x, y| (1..5).contains(&x) && y < 4);
        // overlap: x in 1..4, y in 0..4 = 12; union = 16 + 16 - 12 = 20
        assert!((mask_iou(&a, &b).unwrap() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn iou_dim_mismatch_errors() {
        let a = BinaryMask::new(4, 4);
        let b = BinaryMask::new(5, 4);
        assert!(mask_iou(&a, &b).is_err());
    }

    #[test]
    fn iou_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let a = random_mask(&mut rng, 16, 16, 0.4);
            let b = random_mask(&mut rng, 16, 16, 0.4);
            assert_eq!(mask_iou(&a, &b).unwrap(), mask_iou(&b, &a).unwrap());
        }
    }

    #[test]
    fn tighten_known_blob() {
        // 4x4 blob centered at (6..10, 6..10) inside a generous box.
        let mask = BinaryMask::from_fn(20, 20, |x, y| (6..10).contains(&x) && (6..10).contains(&y));
        let big = BoundingBox::new(2, 2, 16, 16).unwrap();
        let tight = tighten_box(&big, &mask);
        assert_eq!(tight, BoundingBox::new(6, 6, 4, 4).unwrap());

        // A box already hugging the blob stays put.
        assert_eq!(tighten_box(&tight, &mask), tight);

        // Pure background keeps the input box.
        let bg = BoundingBox::new(0, 0, 4, 4).unwrap();
        assert_eq!(tighten_box(&bg, &mask), bg);
    }

    #[test]
    fn tighten_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..100 {
            let mask = random_mask(&mut rng, 32, 32, 0.2);
            let b = super::super::tests::random_box(&mut rng, 32);
            let once = tighten_box(&b, &mask);
            assert_eq!(tighten_box(&once, &mask), once);
        }
    }

    #[test]
    fn integral_counts_match_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mask = random_mask(&mut rng, 40, 30, 0.3);
        let integral = mask.integral();
        for _ in 0..200 {
            let b = super::super::tests::random_box(&mut rng, 30);
            let clipped = b.clip(40, 30).unwrap();
            assert_eq!(integral.count(&clipped) as usize, mask.count_in_box(&clipped));
        }
    }

    #[test]
    fn crop_roundtrip() {
        let mask = BinaryMask::from_fn(10, 10, |x, y| (x + y) % 3 == 0);
        let b = BoundingBox::new(2, 3, 5, 4).unwrap();
        let c = mask.crop(&b).unwrap();
        assert_eq!(c.width(), 5);
        assert_eq!(c.height(), 4);
        for y in 0..4 {
            for x in 0..5 {
                assert_eq!(c.get(x, y), mask.get(x + 2, y + 3));
            }
        }
    }
}
