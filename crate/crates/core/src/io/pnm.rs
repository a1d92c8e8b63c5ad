use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use super::{read_all, write_all};
use crate::error::{Error, Result};
use crate::model::{ChromaSubsampling, ColorFrame, ColorSpace, LumaPlane, Plane};

/// A decoded P5 or P6 image.
#[derive(Clone, Debug, PartialEq)]
pub enum PnmImage {
    Gray(LumaPlane),
    Rgb(ColorFrame),
}

impl PnmImage {
    /// Luma of the image: the gray plane, or BT.709 luma of RGB.
    pub fn luma(&self) -> Result<Plane> {
        match self {
            PnmImage::Gray(l) => Ok(l.to_plane()),
            PnmImage::Rgb(f) => crate::color::luma_of(f),
        }
    }

    pub fn bit_depth(&self) -> u8 {
        match self {
            PnmImage::Gray(l) => l.bit_depth(),
            PnmImage::Rgb(f) => f.bit_depth(),
        }
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            let c = self.bytes[self.pos];
            if c == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if c.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::BadHeader(format!("missing {what}")))
    }
}

pub fn read_pnm_from<R: Read>(reader: R) -> Result<PnmImage> {
    let bytes = read_all(reader)?;
    if bytes.len() < 2 || bytes[0] != b'P' {
        return Err(Error::BadHeader("not a PNM file".into()));
    }
    let channels = match bytes[1] {
        b'5' => 1,
        b'6' => 3,
        other => return Err(Error::BadHeader(format!("unsupported PNM type P{}", other as char))),
    };
    let mut cur = Cursor { bytes: &bytes, pos: 2 };
    let width = cur.number("width")? as usize;
    let height = cur.number("height")? as usize;
    let maxval = cur.number("maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::UnsupportedMaxval(maxval));
    }
    if width == 0 || height == 0 {
        return Err(Error::BadHeader(format!("image size {width}x{height}")));
    }
    // exactly one whitespace byte separates the header from the raster
    match bytes.get(cur.pos) {
        Some(c) if c.is_ascii_whitespace() => cur.pos += 1,
        _ => return Err(Error::BadHeader("missing raster separator".into())),
    }
    let wide = maxval > 255;
    let b = if wide { 2 } else { 1 };
    let n = width * height;
    let expected = n * channels * b;
    let raster = &bytes[cur.pos..];
    if raster.len() < expected {
        return Err(Error::TruncatedFrame {
            frame: 0,
            expected,
            got: raster.len(),
        });
    }
    let samples: Vec<u16> = raster[..expected]
        .chunks_exact(b)
        .map(|s| if wide { u16::from_be_bytes([s[0], s[1]]) } else { s[0] as u16 })
        .collect();
    if samples.iter().any(|&s| s as u32 > maxval) {
        return Err(Error::BadHeader(format!("sample exceeds maxval {maxval}")));
    }
    let bit_depth = if wide { 16 } else { 8 };
    if channels == 1 {
        return Ok(PnmImage::Gray(LumaPlane::new(width, height, bit_depth, samples)?));
    }
    let plane = |c: usize| Plane::new(width, height, samples.iter().skip(c).step_by(3).map(|&s| s as f64).collect());
    Ok(PnmImage::Rgb(ColorFrame::new(
        [plane(0)?, plane(1)?, plane(2)?],
        bit_depth,
        ColorSpace::Rgb,
        ChromaSubsampling::Cs444,
    )?))
}

pub fn read_pnm(path: &Path) -> Result<PnmImage> {
    read_pnm_from(BufReader::new(File::open(path)?))
}

fn push_sample(out: &mut Vec<u8>, v: u16, wide: bool) {
    if wide {
        out.extend_from_slice(&v.to_be_bytes());
    } else {
        out.push(v as u8);
    }
}

pub fn write_pnm_gray<W: Write>(w: &mut W, plane: &LumaPlane) -> Result<()> {
    let maxval = plane.peak() as u32;
    let wide = maxval > 255;
    let mut out = format!("P5\n{} {}\n{maxval}\n", plane.width(), plane.height()).into_bytes();
    for &s in plane.samples() {
        push_sample(&mut out, s, wide);
    }
    write_all(w, &out)
}

pub fn write_pnm_rgb<W: Write>(w: &mut W, frame: &ColorFrame) -> Result<()> {
    frame.expect_space(ColorSpace::Rgb)?;
    let maxval = frame.peak() as u32;
    let wide = maxval > 255;
    let mut out = format!("P6\n{} {}\n{maxval}\n", frame.width(), frame.height()).into_bytes();
    let [r, g, b] = frame.planes();
    for i in 0..r.data().len() {
        for p in [r, g, b] {
            push_sample(&mut out, p.data()[i].round().clamp(0.0, maxval as f64) as u16, wide);
        }
    }
    write_all(w, &out)
}
