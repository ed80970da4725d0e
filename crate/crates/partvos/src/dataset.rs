//! DAVIS-style sequence IO: numbered frame images, indexed-palette
//! annotation masks, prediction output and CSV reports.

use crate::error::{Error, Result};
use crate::geometry::BinaryMask;
use image::RgbImage;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Per-pixel instance labels: 0 is background, `k >= 1` is instance `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceMask {
    width: u32,
    height: u32,
    labels: Vec<u16>,
}

impl InstanceMask {
    pub fn new(width: u32, height: u32) -> Self {
        assert!(width > 0 && height > 0);
        InstanceMask {
            width,
            height,
            labels: vec![0; width as usize * height as usize],
        }
    }

    pub fn from_labels(width: u32, height: u32, labels: Vec<u16>) -> Self {
        assert_eq!(labels.len(), width as usize * height as usize);
        InstanceMask {
            width,
            height,
            labels,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u16 {
        self.labels[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, label: u16) {
        self.labels[y as usize * self.width as usize + x as usize] = label;
    }

    pub fn labels(&self) -> &[u16] {
        &self.labels
    }

    /// Largest label present (0 for an all-background mask).
    pub fn max_label(&self) -> u16 {
        self.labels.iter().copied().max().unwrap_or(0)
    }

    /// Binary mask of one instance.
    pub fn instance(&self, label: u16) -> BinaryMask {
        BinaryMask::from_fn(self.width, self.height, |x, y| self.get(x, y) == label && label > 0)
    }

    /// Build from a single foreground mask (label 1).
    pub fn from_binary(mask: &BinaryMask) -> Self {
        let mut out = InstanceMask::new(mask.width(), mask.height());
        for y in 0..mask.height() {
            for x in 0..mask.width() {
                if mask.get(x, y) {
                    out.set(x, y, 1);
                }
            }
        }
        out
    }

    /// Check that the label set is exactly `{1..=k}` (plus background) and
    /// return `k`. An all-background mask returns 0.
    pub fn contiguous_label_count(&self) -> Result<u16> {
        let max = self.max_label();
        let mut present = vec![false; max as usize + 1];
        for &l in &self.labels {
            present[l as usize] = true;
        }
        for l in 1..=max {
            if !present[l as usize] {
                return Err(Error::Dataset(format!(
                    "instance labels are not contiguous: label {l} missing below max {max}"
                )));
            }
        }
        Ok(max)
    }
}

/// A loaded sequence: frames plus whatever annotations exist alongside them.
/// Frame 0 always has an annotation.
#[derive(Debug, Clone)]
pub struct FrameSequence {
    pub name: String,
    /// Numeric file stems, one per frame, in frame order (e.g. "00004").
    pub frame_stems: Vec<String>,
    pub frames: Vec<RgbImage>,
    pub annotations: Vec<Option<InstanceMask>>,
}

impl FrameSequence {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn width(&self) -> u32 {
        self.frames[0].width()
    }

    pub fn height(&self) -> u32 {
        self.frames[0].height()
    }
}

/// Files in `dir` whose stem parses as an integer, sorted by (value, name).
fn numbered_files(dir: &Path, extensions: &[&str]) -> Result<Vec<(u64, String, PathBuf)>> {
    let mut out = Vec::new();
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        if !path.is_file() {
            continue;
        }
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase());
        if !ext.as_deref().is_some_and(|e| extensions.contains(&e)) {
            continue;
        }
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or_default()
            .to_string();
        let Ok(number) = stem.parse::<u64>() else {
            return Err(Error::Dataset(format!(
                "{}: file stem `{stem}` is not numeric",
                path.display()
            )));
        };
        out.push((number, stem, path));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    Ok(out)
}

/// Load a DAVIS-layout sequence: numbered frame images in `frames_dir`,
/// numbered mask images (matched by stem number) in `annotations_dir`.
/// Frame order is by numeric stem regardless of directory listing order;
/// gaps in numbering are permitted. Frame 0 must carry an annotation.
pub fn load_sequence(frames_dir: &Path, annotations_dir: &Path) -> Result<FrameSequence> {
    let frame_files = numbered_files(frames_dir, &["jpg", "jpeg", "png", "bmp"])?;
    if frame_files.is_empty() {
        return Err(Error::Dataset(format!("{}: no frames found", frames_dir.display())));
    }
    let mask_files = numbered_files(annotations_dir, &["png", "bmp"])?;

    let name = frames_dir
        .file_name()
        .and_then(|s| s.to_str())
        .unwrap_or("sequence")
        .to_string();

    let mut frames = Vec::with_capacity(frame_files.len());
    let mut frame_stems = Vec::with_capacity(frame_files.len());
    for (_, stem, path) in &frame_files {
        let img = image::open(path)
            .map_err(|e| Error::ImageDecode {
                path: path.clone(),
                message: e.to_string(),
            })?
            .to_rgb8();
        frames.push(img);
        frame_stems.push(stem.clone());
    }
    let (w, h) = (frames[0].width(), frames[0].height());
    for (i, f) in frames.iter().enumerate() {
        if f.width() != w || f.height() != h {
            return Err(Error::DimensionMismatch(w, h, f.width(), f.height()));
        }
        let _ = i;
    }

    let mut annotations: Vec<Option<InstanceMask>> = vec![None; frames.len()];
    for (number, _, path) in &mask_files {
        if let Some(idx) = frame_files.iter().position(|(n, _, _)| n == number) {
            let mask = load_instance_mask(path)?;
            if mask.width() != w || mask.height() != h {
                return Err(Error::DimensionMismatch(w, h, mask.width(), mask.height()));
            }
            annotations[idx] = Some(mask);
        }
    }

    let Some(first) = annotations[0].as_mut() else {
        return Err(Error::Dataset(format!(
            "{}: frame 0 has no annotation (the first-frame mask is required)",
            annotations_dir.display()
        )));
    };

    // Binary 0/255 grayscale masks are a common single-object convention;
    // fold them onto label 1 so the contiguity invariant holds.
    if first.max_label() == 255 && first.labels().iter().all(|&l| l == 0 || l == 255) {
        for ann in annotations.iter_mut().flatten() {
            for l in &mut ann.labels {
                if *l == 255 {
                    *l = 1;
                }
            }
        }
    }
    annotations[0].as_ref().unwrap().contiguous_label_count()?;

    Ok(FrameSequence {
        name,
        frame_stems,
        frames,
        annotations,
    })
}

/// Read an instance mask from an indexed-palette or grayscale PNG. Palette
/// indices (or gray values) become labels unchanged.
pub fn load_instance_mask(path: &Path) -> Result<InstanceMask> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut decoder = png::Decoder::new(std::io::BufReader::new(file));
    // Keep palette indices as written instead of expanding to RGB.
    decoder.set_transformations(png::Transformations::IDENTITY);
    let mut reader = decoder.read_info().map_err(|e| Error::ImageDecode {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let mut buf = vec![0u8; reader.output_buffer_size().unwrap_or(0)];
    let info = reader.next_frame(&mut buf).map_err(|e| Error::ImageDecode {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let (w, h) = (info.width, info.height);
    let bits = info.bit_depth as u32 as u8;

    match info.color_type {
        png::ColorType::Indexed | png::ColorType::Grayscale => {
            let mut labels = Vec::with_capacity(w as usize * h as usize);
            let row_bytes = info.line_size;
            match bits {
                8 => {
                    for y in 0..h as usize {
                        let row = &buf[y * row_bytes..];
                        labels.extend(row[..w as usize].iter().map(|&b| b as u16));
                    }
                }
                16 => {
                    for y in 0..h as usize {
                        let row = &buf[y * row_bytes..];
                        for x in 0..w as usize {
                            labels.push(u16::from_be_bytes([row[2 * x], row[2 * x + 1]]));
                        }
                    }
                }
                1 | 2 | 4 => {
                    let per_byte = 8 / bits as usize;
                    let mask = (1u16 << bits) - 1;
                    for y in 0..h as usize {
                        let row = &buf[y * row_bytes..];
                        for x in 0..w as usize {
                            let byte = row[x / per_byte];
                            let shift = 8 - bits as usize * (x % per_byte + 1);
                            labels.push((byte >> shift) as u16 & mask);
                        }
                    }
                }
                _ => {
                    return Err(Error::ImageDecode {
                        path: path.to_path_buf(),
                        message: format!("unsupported bit depth {bits}"),
                    })
                }
            }
            Ok(InstanceMask::from_labels(w, h, labels))
        }
        other => Err(Error::ImageDecode {
            path: path.to_path_buf(),
            message: format!("mask must be indexed or grayscale, got {other:?}"),
        }),
    }
}

/// The standard 256-entry segmentation palette (the DAVIS/VOC colormap),
/// generated by bit-interleaving so label k always maps to the same color.
pub fn label_palette() -> [u8; 768] {
    let mut palette = [0u8; 768];
    for (k, chunk) in palette.chunks_exact_mut(3).enumerate() {
        let mut id = k;
        let (mut r, mut g, mut b) = (0u8, 0u8, 0u8);
        for shift in 0..8 {
            r |= (((id >> 0) & 1) as u8) << (7 - shift);
            g |= (((id >> 1) & 1) as u8) << (7 - shift);
            b |= (((id >> 2) & 1) as u8) << (7 - shift);
            id >>= 3;
        }
        chunk[0] = r;
        chunk[1] = g;
        chunk[2] = b;
    }
    palette
}

/// Write one indexed PNG per frame into `out_dir/sequence_name/`, one file
/// per mask named after the matching frame stem. Round-trips losslessly
/// through [`load_instance_mask`].
pub fn save_masks(
    sequence_name: &str,
    frame_stems: &[String],
    masks: &[InstanceMask],
    out_dir: &Path,
) -> Result<()> {
    if frame_stems.len() != masks.len() {
        return Err(Error::LengthMismatch {
            left: frame_stems.len(),
            right: masks.len(),
        });
    }
    let dir = out_dir.join(sequence_name);
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    for (stem, mask) in frame_stems.iter().zip(masks) {
        let path = dir.join(format!("{stem}.png"));
        save_instance_mask(mask, &path)?;
    }
    Ok(())
}

/// Write a single instance mask as an 8-bit indexed PNG with the standard
/// palette. Labels above 255 are rejected.
pub fn save_instance_mask(mask: &InstanceMask, path: &Path) -> Result<()> {
    if mask.max_label() > 255 {
        return Err(Error::Dataset(format!(
            "label {} does not fit an 8-bit indexed PNG",
            mask.max_label()
        )));
    }
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut encoder = png::Encoder::new(std::io::BufWriter::new(file), mask.width(), mask.height());
    encoder.set_color(png::ColorType::Indexed);
    encoder.set_depth(png::BitDepth::Eight);
    encoder.set_palette(label_palette().to_vec());
    let mut writer = encoder.write_header().map_err(|e| Error::ImageDecode {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let bytes: Vec<u8> = mask.labels().iter().map(|&l| l as u8).collect();
    writer.write_image_data(&bytes).map_err(|e| Error::ImageDecode {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    Ok(())
}

/// Format a value with 6 significant digits and a decimal point, the fixed
/// numeric format of every CSV this crate writes.
pub fn fmt_sig(x: f64) -> String {
    const SIG: i32 = 6;
    if x == 0.0 || !x.is_finite() {
        return format!("{:.*}", (SIG - 1) as usize, x);
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (SIG - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Write a CSV file: header row, then rows of pre-formatted cells.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    writeln!(out, "{}", header.join(",")).map_err(|e| Error::io(path, e))?;
    for row in rows {
        writeln!(out, "{}", row.join(",")).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_instance_mask(seed: u64, w: u32, h: u32, k: u16) -> InstanceMask {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let labels = (0..w as usize * h as usize)
            .map(|_| rng.random_range(0..=k))
            .collect();
        InstanceMask::from_labels(w, h, labels)
    }

    #[test]
    fn mask_png_roundtrip_is_identity() {
        let dir = tempfile::tempdir().unwrap();
        for seed in 0..3 {
            let mask = random_instance_mask(seed, 37, 23, 3);
            let path = dir.path().join(format!("{seed}.png"));
            save_instance_mask(&mask, &path).unwrap();
            let back = load_instance_mask(&path).unwrap();
            assert_eq!(mask, back);
        }
    }

    #[test]
    fn empty_mask_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let mask = InstanceMask::new(16, 16);
        let path = dir.path().join("empty.png");
        save_instance_mask(&mask, &path).unwrap();
        let back = load_instance_mask(&path).unwrap();
        assert_eq!(back.max_label(), 0);
    }

    #[test]
    fn three_instances_preserved() {
        let dir = tempfile::tempdir().unwrap();
        let mut mask = InstanceMask::new(12, 12);
        mask.set(1, 1, 1);
        mask.set(5, 5, 2);
        mask.set(9, 9, 3);
        let path = dir.path().join("multi.png");
        save_instance_mask(&mask, &path).unwrap();
        let back = load_instance_mask(&path).unwrap();
        assert_eq!(back.contiguous_label_count().unwrap(), 3);
        assert_eq!(back.get(1, 1), 1);
        assert_eq!(back.get(5, 5), 2);
        assert_eq!(back.get(9, 9), 3);
    }

    #[test]
    fn load_sequence_sorted_with_gaps() {
        let dir = tempfile::tempdir().unwrap();
        let frames = dir.path().join("frames");
        let anns = dir.path().join("anns");
        std::fs::create_dir_all(&frames).unwrap();
        std::fs::create_dir_all(&anns).unwrap();

        // Write frames 00000, 00002, 00010 out of order.
        for stem in ["00002", "00000", "00010"] {
            let img = RgbImage::from_fn(8, 6, |x, y| image::Rgb([x as u8, y as u8, 7]));
            img.save(frames.join(format!("{stem}.png"))).unwrap();
        }
        let mut mask = InstanceMask::new(8, 6);
        mask.set(2, 2, 1);
        save_instance_mask(&mask, &anns.join("00000.png")).unwrap();

        let seq = load_sequence(&frames, &anns).unwrap();
        assert_eq!(seq.len(), 3);
        assert_eq!(seq.frame_stems, vec!["00000", "00002", "00010"]);
        assert!(seq.annotations[0].is_some());
        assert!(seq.annotations[1].is_none());
    }

    #[test]
    fn missing_frame0_annotation_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let frames = dir.path().join("frames");
        let anns = dir.path().join("anns");
        std::fs::create_dir_all(&frames).unwrap();
        std::fs::create_dir_all(&anns).unwrap();
        let img = RgbImage::new(4, 4);
        img.save(frames.join("00000.png")).unwrap();
        img.save(frames.join("00001.png")).unwrap();
        let mut mask = InstanceMask::new(4, 4);
        mask.set(0, 0, 1);
        save_instance_mask(&mask, &anns.join("00001.png")).unwrap();
        assert!(load_sequence(&frames, &anns).is_err());
    }

    #[test]
    fn binary_255_convention_folds_to_label_1() {
        let dir = tempfile::tempdir().unwrap();
        let frames = dir.path().join("frames");
        let anns = dir.path().join("anns");
        std::fs::create_dir_all(&frames).unwrap();
        std::fs::create_dir_all(&anns).unwrap();
        let img = RgbImage::new(4, 4);
        img.save(frames.join("0.png")).unwrap();
        let mut mask = InstanceMask::new(4, 4);
        mask.set(1, 1, 255);
        save_instance_mask(&mask, &anns.join("0.png")).unwrap();

        let seq = load_sequence(&frames, &anns).unwrap();
        assert_eq!(seq.annotations[0].as_ref().unwrap().get(1, 1), 1);
    }

    #[test]
    fn sig_digit_formatting() {
        assert_eq!(fmt_sig(0.8), "0.800000");
        assert_eq!(fmt_sig(1.0), "1.00000");
        assert_eq!(fmt_sig(0.0), "0.00000");
        assert_eq!(fmt_sig(123456.7), "123457");
        assert_eq!(fmt_sig(0.000123456), "0.000123456");
    }
}
