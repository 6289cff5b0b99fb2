//! Binary NetPBM (P5 gray / P6 RGB) reader and writer, maxval 255.
//!
//! The reader is lenient about header whitespace and `#` comments; the
//! writer always emits the canonical form `P5\n<w> <h>\n255\n` followed by
//! raw samples, so `save(load(x))` is byte-identical for canonically
//! written files and `load(save(img))` always round-trips the buffer.

use super::{ImageBuffer, ImagingError};
use std::fs;
use std::path::Path;

pub fn load_image(path: impl AsRef<Path>) -> Result<ImageBuffer, ImagingError> {
    decode(&fs::read(path)?)
}

pub fn save_image(img: &ImageBuffer, path: impl AsRef<Path>) -> Result<(), ImagingError> {
    fs::write(path, encode(img))?;
    Ok(())
}

pub(crate) fn decode(bytes: &[u8]) -> Result<ImageBuffer, ImagingError> {
    let channels = match bytes.get(..2) {
        Some(b"P5") => 1,
        Some(b"P6") => 3,
        _ => return Err(ImagingError::MalformedHeader("not a P5/P6 file".into())),
    };
    let mut pos = 2;
    let width = read_header_int(bytes, &mut pos)?;
    let height = read_header_int(bytes, &mut pos)?;
    let maxval = read_header_int(bytes, &mut pos)?;
    if width == 0 || height == 0 {
        return Err(ImagingError::MalformedHeader("zero dimensions".into()));
    }
    if maxval != 255 {
        return Err(ImagingError::UnsupportedMaxval(maxval));
    }
    // exactly one whitespace byte separates the header from the samples
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => {
            return Err(ImagingError::MalformedHeader(
                "missing sample separator".into(),
            ))
        }
    }
    let expected = width as usize * height as usize * channels as usize;
    let data = bytes
        .get(pos..pos + expected)
        .ok_or(ImagingError::TruncatedData {
            expected,
            actual: bytes.len().saturating_sub(pos),
        })?;
    ImageBuffer::new(width, height, channels, data.to_vec())
}

pub(crate) fn encode(img: &ImageBuffer) -> Vec<u8> {
    let magic = if img.channels() == 1 { "P5" } else { "P6" };
    let mut out = format!("{magic}\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.data());
    out
}

/// Reads the next unsigned decimal token, skipping whitespace and
/// `#`-to-end-of-line comments.
fn read_header_int(bytes: &[u8], pos: &mut usize) -> Result<u32, ImagingError> {
    loop {
        match bytes.get(*pos) {
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(b'#') => {
                while !matches!(bytes.get(*pos), None | Some(b'\n')) {
                    *pos += 1;
                }
            }
            Some(b) if b.is_ascii_digit() => break,
            _ => {
                return Err(ImagingError::MalformedHeader(
                    "expected integer field".into(),
                ))
            }
        }
    }
    let mut value: u64 = 0;
    while let Some(b) = bytes.get(*pos) {
        if !b.is_ascii_digit() {
            break;
        }
        value = value * 10 + (b - b'0') as u64;
        if value > u32::MAX as u64 {
            return Err(ImagingError::MalformedHeader("integer overflow".into()));
        }
        *pos += 1;
    }
    Ok(value as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p5_decode_maps_bytes_directly() {
        let img = decode(b"P5\n2 2\n255\n\x00\xff\x80\x40").unwrap();
        assert_eq!(img.channels(), 1);
        assert_eq!(img.data(), &[0, 255, 128, 64]);
    }

    #[test]
    fn p6_decode_keeps_rgb_order() {
        let bytes = b"P6\n3 1\n255\n\xff\x00\x00\x00\xff\x00\x00\x00\xff";
        let img = decode(bytes).unwrap();
        assert_eq!(img.channels(), 3);
        assert_eq!(img.pixel(0, 0), &[255, 0, 0]);
        assert_eq!(img.pixel(1, 0), &[0, 255, 0]);
        assert_eq!(img.pixel(2, 0), &[0, 0, 255]);
    }

    #[test]
    fn zero_dimensions_rejected() {
        assert!(matches!(
            decode(b"P5 0 0 255 "),
            Err(ImagingError::MalformedHeader(_))
        ));
    }

    #[test]
    fn wrong_maxval_rejected() {
        assert!(matches!(
            decode(b"P5\n2 1\n65535\n\x00\x00\x00\x00"),
            Err(ImagingError::UnsupportedMaxval(65535))
        ));
    }

    #[test]
    fn truncated_samples_rejected() {
        assert!(matches!(
            decode(b"P5\n2 2\n255\n\x00\x01"),
            Err(ImagingError::TruncatedData {
                expected: 4,
                actual: 2
            })
        ));
    }

    #[test]
    fn comments_and_odd_whitespace_accepted() {
        let img = decode(b"P5 # comment\n # more\n 2\t1 # w h\n255\n\x05\x06").unwrap();
        assert_eq!(img.data(), &[5, 6]);
    }

    #[test]
    fn canonical_round_trip_is_byte_identical() {
        let img = ImageBuffer::new(3, 2, 3, (0..18).collect()).unwrap();
        let bytes = encode(&img);
        let reloaded = decode(&bytes).unwrap();
        assert_eq!(reloaded, img);
        assert_eq!(encode(&reloaded), bytes);
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.pgm");
        let img = ImageBuffer::new(4, 3, 1, (0..12).collect()).unwrap();
        save_image(&img, &path).unwrap();
        assert_eq!(load_image(&path).unwrap(), img);
    }
}
