//! Binary PGM (P5, maxval 255) reader and writer.
//!
//! See <https://netpbm.sourceforge.net/doc/pgm.html>.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{PgmError, Result};
use crate::image::Image;

pub fn load_pgm(path: impl AsRef<Path>) -> Result<Image> {
    let bytes = fs::read(path).map_err(PgmError::Io)?;
    decode_pgm(&bytes)
}

pub fn save_pgm(img: &Image, path: impl AsRef<Path>) -> Result<()> {
    let bytes = encode_pgm(img);
    let mut file = fs::File::create(path).map_err(PgmError::Io)?;
    file.write_all(&bytes).map_err(PgmError::Io)?;
    Ok(())
}

/// Quantizes one sample: round half away from zero, then clamp to `[0, 255]`.
#[inline]
pub fn quantize(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Returns the image after an 8-bit encode/decode cycle.
pub fn quantized(img: &Image) -> Image {
    let samples = img.samples().iter().map(|&v| quantize(v) as f64).collect();
    Image::new(img.width(), img.height(), samples).expect("dimensions already valid")
}

pub fn encode_pgm(img: &Image) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(img.samples().iter().map(|&v| quantize(v)));
    out
}

pub fn decode_pgm(bytes: &[u8]) -> Result<Image> {
    let mut header = Header { bytes, pos: 0 };
    let magic = header.token()?;
    if magic != b"P5" {
        return Err(PgmError::UnsupportedVariant(String::from_utf8_lossy(magic).into_owned()).into());
    }
    let width = header.number("width")?;
    let height = header.number("height")?;
    let maxval = header.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(PgmError::MalformedHeader("zero image dimension").into());
    }
    if maxval != 255 {
        return Err(PgmError::UnsupportedMaxval(maxval as u32).into());
    }
    // exactly one whitespace byte separates the header from the raster
    match bytes.get(header.pos) {
        Some(b) if b.is_ascii_whitespace() => header.pos += 1,
        _ => return Err(PgmError::MalformedHeader("missing separator after maxval").into()),
    }
    let expected = width
        .checked_mul(height)
        .ok_or(PgmError::MalformedHeader("image dimensions overflow"))?;
    let payload = &bytes[header.pos..];
    if payload.len() < expected {
        return Err(PgmError::Truncated {
            expected,
            found: payload.len(),
        }
        .into());
    }
    let samples = payload[..expected].iter().map(|&b| b as f64).collect();
    Image::new(width, height, samples)
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Header<'a> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Result<&'a [u8], PgmError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| !b.is_ascii_whitespace() && *b != b'#')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(PgmError::MalformedHeader("unexpected end of header"));
        }
        Ok(&self.bytes[start..self.pos])
    }

    fn number(&mut self, what: &'static str) -> Result<usize, PgmError> {
        let tok = self.token()?;
        if !tok.iter().all(u8::is_ascii_digit) {
            return Err(PgmError::MalformedHeader(match what {
                "width" => "width is not a decimal integer",
                "height" => "height is not a decimal integer",
                _ => "maxval is not a decimal integer",
            }));
        }
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or(PgmError::MalformedHeader("numeric field out of range"))
    }
}
