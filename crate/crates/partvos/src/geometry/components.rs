use super::{BinaryMask, BoundingBox};

/// 4-connectivity connected components of a mask, each returned with its
/// tight bounding box, sorted by descending area. Components of equal area
/// keep raster-scan discovery order.
pub fn connected_components(mask: &BinaryMask) -> Vec<(BinaryMask, BoundingBox)> {
    let (w, h) = (mask.width(), mask.height());
    let mut visited = BinaryMask::new(w, h);
    let mut out: Vec<(BinaryMask, BoundingBox, usize)> = Vec::new();
    let mut stack: Vec<(u32, u32)> = Vec::new();

    for sy in 0..h {
        for sx in 0..w {
            if !mask.get(sx, sy) || visited.get(sx, sy) {
                continue;
            }
            let mut component = BinaryMask::new(w, h);
            let mut area = 0usize;
            let (mut x0, mut y0, mut x1, mut y1) = (sx, sy, sx, sy);
            stack.push((sx, sy));
            visited.set(sx, sy, true);
            while let Some((x, y)) = stack.pop() {
                component.set(x, y, true);
                area += 1;
                x0 = x0.min(x);
                y0 = y0.min(y);
                x1 = x1.max(x);
                y1 = y1.max(y);
                let mut push = |nx: u32, ny: u32| {
                    if mask.get(nx, ny) && !visited.get(nx, ny) {
                        visited.set(nx, ny, true);
                        stack.push((nx, ny));
                    }
                };
                if x > 0 {
                    push(x - 1, y);
                }
                if x + 1 < w {
                    push(x + 1, y);
                }
                if y > 0 {
                    push(x, y - 1);
                }
                if y + 1 < h {
                    push(x, y + 1);
                }
            }
            let bbox = BoundingBox {
                x: x0 as i64,
                y: y0 as i64,
                w: (x1 - x0 + 1) as i64,
                h: (y1 - y0 + 1) as i64,
            };
            out.push((component, bbox, area));
        }
    }

    out.sort_by(|a, b| b.2.cmp(&a.2));
    out.into_iter().map(|(m, b, _)| (m, b)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Recursive flood-fill labelling used as the reference.
    fn flood_fill_labels(mask: &BinaryMask) -> Vec<i32> {
        let (w, h) = (mask.width() as usize, mask.height() as usize);
        let mut labels = vec![-1i32; w * h];
        let mut next = 0;
        fn fill(mask: &BinaryMask, labels: &mut [i32], x: usize, y: usize, label: i32) {
            let w = mask.width() as usize;
            if labels[y * w + x] != -1 || !mask.get(x as u32, y as u32) {
                return;
            }
            labels[y * w + x] = label;
            if x > 0 {
                fill(mask, labels, x - 1, y, label);
            }
            if x + 1 < w {
                fill(mask, labels, x + 1, y, label);
            }
            if y > 0 {
                fill(mask, labels, x, y - 1, label);
            }
            if y + 1 < mask.height() as usize {
                fill(mask, labels, x, y + 1, label);
            }
        }
        for y in 0..h {
            for x in 0..w {
                if mask.get(x as u32, y as u32) && labels[y * w + x] == -1 {
                    fill(mask, &mut labels, x, y, next);
                    next += 1;
                }
            }
        }
        labels
    }

    #[test]
    fn empty_mask_yields_nothing() {
        assert!(connected_components(&BinaryMask::new(8, 8)).is_empty());
    }

    #[test]
    fn two_disjoint_squares() {
        let mask = BinaryMask::from_fn(16, 16, |x, y| {
            (x < 3 && y < 3) || ((10..13).contains(&x) && (10..13).contains(&y))
        });
        let comps = connected_components(&mask);
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].0.area(), 9);
        assert_eq!(comps[1].0.area(), 9);
        assert_eq!(comps[0].1, BoundingBox::new(0, 0, 3, 3).unwrap());
        assert_eq!(comps[1].1, BoundingBox::new(10, 10, 3, 3).unwrap());
    }

    #[test]
    fn matches_flood_fill_oracle_on_random_masks() {
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..30 {
            let mask = BinaryMask::from_fn(32, 32, |_, _| rng.random_range(0.0..1.0) < 0.4);
            let comps = connected_components(&mask);
            let labels = flood_fill_labels(&mask);
            let n_labels = labels.iter().max().map_or(0, |&m| m + 1) as usize;
            assert_eq!(comps.len(), n_labels);

            // Each returned component must be exactly one oracle label class.
            let mut seen = vec![false; n_labels];
            for (comp, bbox) in &comps {
                let mut label = None;
                let mut area = 0usize;
                for y in 0..32u32 {
                    for x in 0..32u32 {
                        if comp.get(x, y) {
                            area += 1;
                            let l = labels[y as usize * 32 + x as usize];
                            assert!(l >= 0);
                            match label {
                                None => label = Some(l),
                                Some(prev) => assert_eq!(prev, l, "component mixes oracle labels"),
                            }
                        }
                    }
                }
                let l = label.unwrap() as usize;
                assert!(!seen[l], "oracle label split across components");
                seen[l] = true;
                let oracle_area = labels.iter().filter(|&&v| v == l as i32).count();
                assert_eq!(area, oracle_area);
                assert_eq!(*bbox, comp.tight_box().unwrap());
            }
        }
    }

    #[test]
    fn sorted_by_descending_area() {
        let mask = BinaryMask::from_fn(16, 16, |x, y| {
            (x < 2 && y < 2) || ((5..10).contains(&x) && (5..10).contains(&y))
        });
        let comps = connected_components(&mask);
        assert_eq!(comps[0].0.area(), 25);
        assert_eq!(comps[1].0.area(), 4);
    }
}
