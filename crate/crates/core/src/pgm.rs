//! Binary grayscale PGM (`P5`) I/O.
//!
//! Samples are mapped to `[0, 1]` by dividing by maxval. Writing always produces maxval 255 with
//! `round(255 · clamp(v, 0, 1))`.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::Image;

fn bad(msg: impl Into<String>) -> Error {
    Error::Pgm(msg.into())
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.buf.len() {
            match self.buf[self.pos] {
                b'#' => {
                    while self.pos < self.buf.len() && self.buf[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                b if b.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn header_number(&mut self, what: &str) -> Result<usize> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.buf.len() && self.buf[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(bad(format!("missing {what}")));
        }
        std::str::from_utf8(&self.buf[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| bad(format!("{what} out of range")))
    }
}

/// Decodes a `P5` image.
pub fn decode(bytes: &[u8]) -> Result<Image> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(bad("not a binary PGM (expected magic `P5`)"));
    }
    let mut cur = Cursor { buf: bytes, pos: 2 };
    let width = cur.header_number("width")?;
    let height = cur.header_number("height")?;
    let maxval = cur.header_number("maxval")?;
    if width == 0 || height == 0 {
        return Err(bad("zero image dimension"));
    }
    if !(1..=65535).contains(&maxval) {
        return Err(bad(format!("maxval {maxval} outside 1..=65535")));
    }
    // Exactly one whitespace byte separates the header from the raster.
    match bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => return Err(bad("missing whitespace after maxval")),
    }
    let bytes_per_sample = if maxval < 256 { 1 } else { 2 };
    let needed = width * height * bytes_per_sample;
    let raster = &bytes[cur.pos..];
    if raster.len() < needed {
        return Err(bad(format!(
            "raster truncated: need {needed} bytes, have {}",
            raster.len()
        )));
    }
    let scale = maxval as f64;
    let pixels: Vec<f64> = if bytes_per_sample == 1 {
        raster[..needed].iter().map(|&b| b as f64 / scale).collect()
    } else {
        raster[..needed]
            .chunks_exact(2)
            .map(|p| u16::from_be_bytes([p[0], p[1]]) as f64 / scale)
            .collect()
    };
    if pixels.iter().any(|&v| v > 1.0) {
        return Err(bad("sample exceeds maxval"));
    }
    Image::new(height, width, pixels)
}

/// Encodes as 8-bit `P5`.
pub fn encode(img: &Image) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.cols(), img.rows()).into_bytes();
    out.extend(img.pixels().map(to_byte));
    out
}

/// Quantizes a `[0, 1]` intensity to 8 bits.
pub fn to_byte(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Rounds every pixel to the nearest 8-bit level, as a write/read round trip would.
pub fn quantize(img: &Image) -> Image {
    img.map(|v| to_byte(v) as f64 / 255.0)
}

pub fn read(path: impl AsRef<Path>) -> Result<Image> {
    decode(&fs::read(path)?)
}

pub fn write(path: impl AsRef<Path>, img: &Image) -> Result<()> {
    let mut file = fs::File::create(path)?;
    file.write_all(&encode(img))?;
    Ok(())
}
