//! Deterministic synthetic sequences: a textured rigid shape moving over a
//! distinct background, with exact per-frame ground-truth masks. These are
//! the test oracle for tracking and for end-to-end runs.

use crate::dataset::{FrameSequence, InstanceMask};
use crate::error::{Error, Result};
use crate::geometry::{BinaryMask, BoundingBox};
use image::RgbImage;

#[derive(Debug, Clone, Copy)]
pub enum SynthShape {
    Rect { w: u32, h: u32 },
    Ellipse { rx: u32, ry: u32 },
}

impl SynthShape {
    /// Inside test in object-local continuous coordinates.
    fn contains(&self, lx: f64, ly: f64) -> bool {
        match *self {
            SynthShape::Rect { w, h } => lx.abs() <= w as f64 / 2.0 && ly.abs() <= h as f64 / 2.0,
            SynthShape::Ellipse { rx, ry } => {
                let nx = lx / rx as f64;
                let ny = ly / ry as f64;
                nx * nx + ny * ny <= 1.0
            }
        }
    }
}

/// A second, static textured blob rendered as part of the background (it is
/// absent from the ground truth). Useful for decoy / false-positive tests.
#[derive(Debug, Clone, Copy)]
pub struct DecoySpec {
    pub shape: SynthShape,
    pub center: (f64, f64),
    pub rgb: [u8; 3],
    pub noise: u8,
}

/// Description of a synthetic sequence. Together with a seed it fully
/// determines every output pixel.
#[derive(Debug, Clone)]
pub struct SynthSpec {
    pub width: u32,
    pub height: u32,
    pub n_frames: u32,
    pub shape: SynthShape,
    pub start_center: (f64, f64),
    /// Translation per frame in pixels.
    pub velocity: (f64, f64),
    pub rotation_deg_per_frame: f64,
    pub object_rgb: [u8; 3],
    /// Texture amplitude added to the object base color.
    pub object_noise: u8,
    pub background_rgb: [u8; 3],
    pub background_noise: u8,
    pub decoy: Option<DecoySpec>,
}

impl SynthSpec {
    /// A 100x80 textured rectangle drifting over a blue background.
    pub fn default_rect(width: u32, height: u32, n_frames: u32) -> Self {
        SynthSpec {
            width,
            height,
            n_frames,
            shape: SynthShape::Rect { w: 100, h: 80 },
            start_center: (width as f64 * 0.3, height as f64 * 0.5),
            velocity: (3.0, 2.0),
            rotation_deg_per_frame: 0.0,
            object_rgb: [200, 60, 50],
            object_noise: 50,
            background_rgb: [40, 80, 170],
            background_noise: 25,
            decoy: None,
        }
    }
}

/// SplitMix64-style pixel hash: deterministic texture noise in [0, 1).
fn hash01(x: i64, y: i64, salt: u64) -> f64 {
    let mut z = (x as u64)
        .wrapping_mul(0x9E3779B97F4A7C15)
        .wrapping_add((y as u64).wrapping_mul(0xBF58476D1CE4E5B9))
        .wrapping_add(salt);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 53) as f64
}

fn textured(base: [u8; 3], noise: u8, x: i64, y: i64, salt: u64) -> [u8; 3] {
    let mut out = [0u8; 3];
    for c in 0..3 {
        let n = (hash01(x, y, salt.wrapping_add(c as u64)) - 0.5) * 2.0 * noise as f64;
        out[c] = (base[c] as f64 + n).clamp(0.0, 255.0) as u8;
    }
    out
}

/// Render a deterministic sequence of a textured shape translating and
/// rotating over a distinct background. Every frame carries an exact
/// ground-truth annotation. Errors when the shape touches the frame border
/// or vanishes (the trajectory must keep it inside).
pub fn synth_sequence(spec: &SynthSpec, seed: u64) -> Result<FrameSequence> {
    let object_salt = seed.wrapping_mul(3).wrapping_add(1);
    let background_salt = seed.wrapping_mul(3).wrapping_add(2);
    let decoy_salt = seed.wrapping_mul(3).wrapping_add(3);

    let mut frames = Vec::with_capacity(spec.n_frames as usize);
    let mut annotations = Vec::with_capacity(spec.n_frames as usize);
    let mut frame_stems = Vec::with_capacity(spec.n_frames as usize);

    for t in 0..spec.n_frames {
        let cx = spec.start_center.0 + t as f64 * spec.velocity.0;
        let cy = spec.start_center.1 + t as f64 * spec.velocity.1;
        let theta = (t as f64 * spec.rotation_deg_per_frame).to_radians();
        let (sin_t, cos_t) = theta.sin_cos();

        let mut img = RgbImage::new(spec.width, spec.height);
        let mut mask = BinaryMask::new(spec.width, spec.height);

        for py in 0..spec.height {
            for px in 0..spec.width {
                // Inverse transform into object-local coordinates.
                let dx = px as f64 - cx;
                let dy = py as f64 - cy;
                let lx = cos_t * dx + sin_t * dy;
                let ly = -sin_t * dx + cos_t * dy;

                let rgb = if spec.shape.contains(lx, ly) {
                    mask.set(px, py, true);
                    textured(
                        spec.object_rgb,
                        spec.object_noise,
                        lx.round() as i64,
                        ly.round() as i64,
                        object_salt,
                    )
                } else if let Some(d) = spec.decoy.filter(|d| {
                    d.shape
                        .contains(px as f64 - d.center.0, py as f64 - d.center.1)
                }) {
                    textured(
                        d.rgb,
                        d.noise,
                        px as i64 - d.center.0 as i64,
                        py as i64 - d.center.1 as i64,
                        decoy_salt,
                    )
                } else {
                    textured(
                        spec.background_rgb,
                        spec.background_noise,
                        px as i64,
                        py as i64,
                        background_salt,
                    )
                };
                img.put_pixel(px, py, image::Rgb(rgb));
            }
        }

        if mask.is_empty() {
            return Err(Error::Synth(format!("shape left the frame entirely at frame {t}")));
        }
        let tight = mask.tight_box().unwrap();
        if tight.x == 0
            || tight.y == 0
            || tight.right() == spec.width as i64
            || tight.bottom() == spec.height as i64
        {
            return Err(Error::Synth(format!("shape touches the frame border at frame {t}")));
        }

        frames.push(img);
        annotations.push(Some(InstanceMask::from_binary(&mask)));
        frame_stems.push(format!("{t:05}"));
    }

    Ok(FrameSequence {
        name: "synth".to_string(),
        frame_stems,
        frames,
        annotations,
    })
}

/// Ground-truth tight boxes of a synthetic (fully annotated) sequence.
pub fn gt_boxes(seq: &FrameSequence) -> Vec<BoundingBox> {
    seq.annotations
        .iter()
        .map(|a| {
            a.as_ref()
                .expect("synthetic sequences are fully annotated")
                .instance(1)
                .tight_box()
                .expect("synthetic masks are nonempty")
        })
        .collect()
}
