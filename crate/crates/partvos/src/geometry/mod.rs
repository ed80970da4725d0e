//! Pixel-grid primitives shared by every other module: boxes, binary masks,
//! score maps, IoU, NMS, connected components and binary morphology.
//!
//! Everything here works on discrete pixels: a box `(x, y, w, h)` covers the
//! integer pixels `x..x+w-1`, `y..y+h-1`, and all overlap measures are pixel
//! counts, not continuous areas. All values are immutable after construction
//! and safe to share across threads.

mod components;
mod mask;
mod morph;
mod scoremap;

pub use components::connected_components;
pub use mask::{mask_iou, tighten_box, BinaryMask};
pub use morph::{morphology, MorphOp};
pub use scoremap::{Plane, ScoreMap};

use crate::error::{Error, Result};

/// Axis-aligned pixel rectangle. `w` and `h` are always at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoundingBox {
    pub x: i64,
    pub y: i64,
    pub w: i64,
    pub h: i64,
}

impl BoundingBox {
    pub fn new(x: i64, y: i64, w: i64, h: i64) -> Result<Self> {
        if w < 1 || h < 1 {
            return Err(Error::InvalidBox { x, y, w, h });
        }
        Ok(BoundingBox { x, y, w, h })
    }

    /// Exclusive right edge (first column to the right of the box).
    pub fn right(&self) -> i64 {
        self.x + self.w
    }

    /// Exclusive bottom edge.
    pub fn bottom(&self) -> i64 {
        self.y + self.h
    }

    pub fn area(&self) -> i64 {
        self.w * self.h
    }

    /// Box center in continuous coordinates.
    pub fn center(&self) -> (f64, f64) {
        (
            self.x as f64 + self.w as f64 / 2.0,
            self.y as f64 + self.h as f64 / 2.0,
        )
    }

    /// Pixel-count intersection area with another box.
    pub fn intersection_area(&self, other: &BoundingBox) -> i64 {
        let ix = self.x.max(other.x);
        let iy = self.y.max(other.y);
        let ix2 = self.right().min(other.right());
        let iy2 = self.bottom().min(other.bottom());
        (ix2 - ix).max(0) * (iy2 - iy).max(0)
    }

    /// Intersect with a `w x h` frame. `None` when the box lies fully outside.
    pub fn clip(&self, frame_w: u32, frame_h: u32) -> Option<BoundingBox> {
        let x = self.x.max(0);
        let y = self.y.max(0);
        let x2 = self.right().min(frame_w as i64);
        let y2 = self.bottom().min(frame_h as i64);
        if x2 <= x || y2 <= y {
            return None;
        }
        Some(BoundingBox {
            x,
            y,
            w: x2 - x,
            h: y2 - y,
        })
    }

    /// Translate the box (keeping its size) so that it lies inside the frame.
    /// Boxes larger than the frame are clipped to the frame instead.
    pub fn shift_into(&self, frame_w: u32, frame_h: u32) -> BoundingBox {
        let w = self.w.min(frame_w as i64);
        let h = self.h.min(frame_h as i64);
        let x = self.x.clamp(0, frame_w as i64 - w);
        let y = self.y.clamp(0, frame_h as i64 - h);
        BoundingBox { x, y, w, h }
    }

    /// True when the box lies fully within a `w x h` frame.
    pub fn fits(&self, frame_w: u32, frame_h: u32) -> bool {
        self.x >= 0 && self.y >= 0 && self.right() <= frame_w as i64 && self.bottom() <= frame_h as i64
    }
}

/// Intersection-over-union of two boxes by pixel-area arithmetic.
/// Disjoint boxes score 0.
pub fn box_iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let inter = a.intersection_area(b);
    if inter == 0 {
        return 0.0;
    }
    let union = a.area() + b.area() - inter;
    inter as f64 / union as f64
}

/// Fraction of `bbox` covered by `gtbox`: `area(bbox ∩ gtbox) / area(bbox)`.
pub fn containment_score(bbox: &BoundingBox, gtbox: &BoundingBox) -> f64 {
    bbox.intersection_area(gtbox) as f64 / bbox.area() as f64
}

/// Greedy non-maximum suppression.
///
/// Repeatedly keeps the highest-scored remaining box and drops every box
/// whose IoU with it exceeds `overlap_threshold`. Score ties go to the lower
/// input index. Returns kept indices in keep order (descending score).
pub fn nms(boxes: &[BoundingBox], scores: &[f64], overlap_threshold: f64) -> Result<Vec<usize>> {
    if boxes.len() != scores.len() {
        return Err(Error::LengthMismatch {
            left: boxes.len(),
            right: scores.len(),
        });
    }
    let mut order: Vec<usize> = (0..boxes.len()).collect();
    // Stable sort keeps lower input index first on equal scores.
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap_or(std::cmp::Ordering::Equal));

    let mut keep = Vec::new();
    let mut suppressed = vec![false; boxes.len()];
    for (i, &idx) in order.iter().enumerate() {
        if suppressed[idx] {
            continue;
        }
        keep.push(idx);
        for &other in &order[i + 1..] {
            if !suppressed[other] && box_iou(&boxes[idx], &boxes[other]) > overlap_threshold {
                suppressed[other] = true;
            }
        }
    }
    Ok(keep)
}
