//! Part generation: reduce thousands of random box proposals over the
//! first-frame object mask to at most 300 representative parts via a
//! two-threshold filter (mask-region IoU, purity), NMS and box tightening.

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::geometry::{containment_score, nms, tighten_box, BinaryMask, BoundingBox};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A tracked unit of the object: a box plus the local object mask inside it.
/// `feature` and the two weights are filled in by the segmenter/aggregation
/// stages; right after generation the feature is empty and weights are 1.
#[derive(Debug, Clone)]
pub struct Part {
    pub id: u32,
    pub box_: BoundingBox,
    /// Box-sized foreground mask. At generation this is the object mask
    /// cropped to the box; during tracking it becomes the binarized
    /// segmentation output.
    pub local_mask: BinaryMask,
    pub feature: Vec<f64>,
    pub sim_weight: f64,
    pub con_weight: f64,
}

/// IoU between the pixel set of a box and the foreground of a mask:
/// `|box ∧ mask| / |box ∨ mask|`.
pub fn mask_region_iou(bbox: &BoundingBox, mask: &BinaryMask, mask_area: usize, fg_in_box: usize) -> f64 {
    debug_assert!(bbox.fits(mask.width(), mask.height()));
    let union = bbox.area() as usize + mask_area - fg_in_box;
    if union == 0 {
        return 0.0;
    }
    fg_in_box as f64 / union as f64
}

/// Draw `n` box proposals around the object: centers uniform over the
/// object's tight box expanded by 10% per side, sides uniform in
/// [0.2, 0.6] of the object box dimensions, clipped to the frame.
/// Deterministic given the seed.
pub fn sample_proposals(object_mask: &BinaryMask, n: u32, seed: u64) -> Result<Vec<BoundingBox>> {
    let Some(obj) = object_mask.tight_box() else {
        return Err(Error::EmptyMask);
    };
    let (fw, fh) = (object_mask.width(), object_mask.height());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let cx_lo = obj.x as f64 - 0.1 * obj.w as f64;
    let cx_hi = obj.right() as f64 + 0.1 * obj.w as f64;
    let cy_lo = obj.y as f64 - 0.1 * obj.h as f64;
    let cy_hi = obj.bottom() as f64 + 0.1 * obj.h as f64;

    let mut out = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let cx = rng.random_range(cx_lo..cx_hi);
        let cy = rng.random_range(cy_lo..cy_hi);
        let w = (rng.random_range(0.2..0.6) * obj.w as f64).round().max(1.0) as i64;
        let h = (rng.random_range(0.2..0.6) * obj.h as f64).round().max(1.0) as i64;
        let raw = BoundingBox {
            x: (cx - w as f64 / 2.0).round() as i64,
            y: (cy - h as f64 / 2.0).round() as i64,
            w,
            h,
        };
        // Clip to the frame; a proposal that misses the frame entirely is
        // translated back in so exactly n boxes come out.
        let clipped = raw.clip(fw, fh).unwrap_or_else(|| raw.shift_into(fw, fh));
        out.push(clipped);
    }
    Ok(out)
}

/// Survivors of the proposal filter, before tightening. Exposed so tests can
/// check the NMS overlap invariant on the exact boxes NMS saw.
pub struct FilteredProposals {
    pub boxes: Vec<BoundingBox>,
    pub scores: Vec<f64>,
}

/// Filter proposals by mask-region IoU and purity, then NMS.
pub fn filter_proposals(
    proposals: &[BoundingBox],
    object_mask: &BinaryMask,
    config: &RunConfig,
) -> Result<FilteredProposals> {
    let gtbox = object_mask.tight_box().ok_or(Error::EmptyMask)?;
    let mask_area = object_mask.area();
    let integral = object_mask.integral();

    let mut boxes = Vec::new();
    let mut scores = Vec::new();
    for bbox in proposals {
        let fg_in_box = integral.count(bbox) as usize;
        let iou = mask_region_iou(bbox, object_mask, mask_area, fg_in_box);
        if iou < config.parts_iou_min {
            continue;
        }
        let purity = if config.parts_purity_pixel_level {
            fg_in_box as f64 / bbox.area() as f64
        } else {
            containment_score(bbox, &gtbox)
        };
        if purity <= config.parts_purity_min {
            continue;
        }
        boxes.push(*bbox);
        scores.push(iou);
    }

    let keep = nms(&boxes, &scores, config.parts_nms_overlap)?;
    Ok(FilteredProposals {
        boxes: keep.iter().map(|&i| boxes[i]).collect(),
        scores: keep.iter().map(|&i| scores[i]).collect(),
    })
}

/// Full part-generation pipeline: sample, two-threshold filter, NMS,
/// tighten to the object mask, cap at the configured maximum. Errors when
/// fewer than the configured minimum survive.
pub fn generate_parts(object_mask: &BinaryMask, config: &RunConfig, seed: u64) -> Result<Vec<Part>> {
    let proposals = sample_proposals(object_mask, config.parts_n_proposals, seed)?;
    let filtered = filter_proposals(&proposals, object_mask, config)?;

    // NMS keep order is descending score, so the cap keeps the highest-scored.
    let capped = filtered.boxes.len().min(config.parts_max_count);
    let mut parts = Vec::with_capacity(capped);
    for (i, bbox) in filtered.boxes[..capped].iter().enumerate() {
        let tight = tighten_box(bbox, object_mask);
        let local_mask = object_mask.crop(&tight)?;
        parts.push(Part {
            id: i as u32,
            box_: tight,
            local_mask,
            feature: Vec::new(),
            sim_weight: 1.0,
            con_weight: 1.0,
        });
    }

    if parts.len() < config.parts_min_count {
        return Err(Error::TooFewParts {
            got: parts.len(),
            min: config.parts_min_count,
        });
    }
    Ok(parts)
}
