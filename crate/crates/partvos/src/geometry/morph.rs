use super::BinaryMask;

/// Binary morphology operator selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MorphOp {
    Dilate,
    Erode,
    Open,
    Close,
}

impl MorphOp {
    pub fn parse(s: &str) -> Option<MorphOp> {
        match s {
            "dilate" => Some(MorphOp::Dilate),
            "erode" => Some(MorphOp::Erode),
            "open" => Some(MorphOp::Open),
            "close" => Some(MorphOp::Close),
            _ => None,
        }
    }
}

/// Disc structuring element: offsets with `dx^2 + dy^2 <= radius^2`.
fn disc_offsets(radius: u32) -> Vec<(i64, i64)> {
    let r = radius as i64;
    let mut offsets = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            if dx * dx + dy * dy <= r * r {
                offsets.push((dx, dy));
            }
        }
    }
    offsets
}

fn dilate(mask: &BinaryMask, offsets: &[(i64, i64)]) -> BinaryMask {
    let (w, h) = (mask.width(), mask.height());
    let mut out = BinaryMask::new(w, h);
    for y in 0..h {
        for x in 0..w {
            if !mask.get(x, y) {
                continue;
            }
            for &(dx, dy) in offsets {
                let nx = x as i64 + dx;
                let ny = y as i64 + dy;
                if nx >= 0 && ny >= 0 && nx < w as i64 && ny < h as i64 {
                    out.set(nx as u32, ny as u32, true);
                }
            }
        }
    }
    out
}

fn erode(mask: &BinaryMask, offsets: &[(i64, i64)]) -> BinaryMask {
    let (w, h) = (mask.width(), mask.height());
    BinaryMask::from_fn(w, h, |x, y| {
        offsets.iter().all(|&(dx, dy)| {
            let nx = x as i64 + dx;
            let ny = y as i64 + dy;
            // Pixels beyond the frame count as background.
            nx >= 0 && ny >= 0 && nx < w as i64 && ny < h as i64 && mask.get(nx as u32, ny as u32)
        })
    })
}

/// Binary morphology with a disc structuring element of the given radius.
pub fn morphology(mask: &BinaryMask, op: MorphOp, radius: u32) -> BinaryMask {
    assert!(radius >= 1, "morphology radius must be at least 1");
    let offsets = disc_offsets(radius);
    match op {
        MorphOp::Dilate => dilate(mask, &offsets),
        MorphOp::Erode => erode(mask, &offsets),
        MorphOp::Open => dilate(&erode(mask, &offsets), &offsets),
        MorphOp::Close => erode(&dilate(mask, &offsets), &offsets),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dilate_single_pixel_radius_one_is_cross() {
        let mut m = BinaryMask::new(7, 7);
        m.set(3, 3, true);
        let d = morphology(&m, MorphOp::Dilate, 1);
        assert_eq!(d.area(), 5);
        for (x, y) in [(3, 3), (2, 3), (4, 3), (3, 2), (3, 4)] {
            assert!(d.get(x, y));
        }
    }

    #[test]
    fn open_removes_speckle() {
        let mut m = BinaryMask::new(9, 9);
        m.set(4, 4, true);
        assert!(morphology(&m, MorphOp::Open, 1).is_empty());
    }

    #[test]
    fn close_then_open_keeps_smooth_blob() {
        // Disc-shaped blob of radius 6: smooth at structuring radius 2.
        let blob = BinaryMask::from_fn(24, 24, |x, y| {
            let dx = x as i64 - 12;
            let dy = y as i64 - 12;
            dx * dx + dy * dy <= 36
        });
        let closed = morphology(&blob, MorphOp::Close, 2);
        let opened = morphology(&closed, MorphOp::Open, 2);
        assert_eq!(opened, blob);
    }

    #[test]
    fn opening_is_anti_extensive() {
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let m = BinaryMask::from_fn(20, 20, |_, _| rng.random_range(0.0..1.0) < 0.5);
            let radius = rng.random_range(1..=3);
            let opened = morphology(&m, MorphOp::Open, radius);
            for y in 0..20 {
                for x in 0..20 {
                    assert!(!opened.get(x, y) || m.get(x, y), "opening grew the mask");
                }
            }
        }
    }
}
