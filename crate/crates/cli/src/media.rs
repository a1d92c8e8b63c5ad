//! Opening reference and distorted inputs as frame sequences.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use ssimkit::io::{read_planar_raw, read_pnm, read_y4m, PnmImage, VideoStream};
use ssimkit::{ChromaSubsampling, ColorFrame, Plane};

use crate::error::{CliError, CliResult, Context};

/// One decoded frame.
#[derive(Clone, Debug)]
pub enum Frame {
    Gray { plane: Plane, bit_depth: u8 },
    Color(ColorFrame),
}

impl Frame {
    pub fn bit_depth(&self) -> u8 {
        match self {
            Frame::Gray { bit_depth, .. } => *bit_depth,
            Frame::Color(f) => f.bit_depth(),
        }
    }

    pub fn luma(&self) -> ssimkit::Result<Plane> {
        match self {
            Frame::Gray { plane, .. } => Ok(plane.clone()),
            Frame::Color(f) => ssimkit::color::luma_of(f),
        }
    }
}

impl From<PnmImage> for Frame {
    fn from(img: PnmImage) -> Self {
        match img {
            PnmImage::Gray(l) => Frame::Gray {
                bit_depth: l.bit_depth(),
                plane: l.to_plane(),
            },
            PnmImage::Rgb(f) => Frame::Color(f),
        }
    }
}

/// Geometry of headerless planar input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RawGeometry {
    pub width: usize,
    pub height: usize,
    pub bit_depth: u8,
    pub chroma: ChromaSubsampling,
}

/// Frames of one input, read lazily.
pub enum Source {
    Stream(VideoStream),
    Single(Option<Frame>),
}

impl Iterator for Source {
    type Item = ssimkit::Result<Frame>;

    fn next(&mut self) -> Option<Self::Item> {
        match self {
            Source::Stream(s) => s.next().map(|r| r.map(Frame::Color)),
            Source::Single(f) => f.take().map(Ok),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Y4m,
    Pnm,
    Raw,
}

fn sniff(path: &Path) -> CliResult<Kind> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase());
    match ext.as_deref() {
        Some("y4m") => return Ok(Kind::Y4m),
        Some("pgm" | "ppm" | "pnm") => return Ok(Kind::Pnm),
        Some("yuv" | "raw") => return Ok(Kind::Raw),
        _ => {}
    }
    let mut magic = [0u8; 9];
    let n = File::open(path)?.read(&mut magic)?;
    if n >= 9 && &magic == b"YUV4MPEG2" {
        Ok(Kind::Y4m)
    } else if n >= 2 && (&magic[..2] == b"P5" || &magic[..2] == b"P6") {
        Ok(Kind::Pnm)
    } else {
        Ok(Kind::Raw)
    }
}

/// Opens `path` as Y4M, binary PNM, or raw planar YUV (which needs `raw`).
pub fn open(path: &Path, raw: Option<RawGeometry>) -> CliResult<Source> {
    let ctx = || format!("reading {}", path.display());
    match sniff(path).context(ctx())? {
        Kind::Y4m => Ok(Source::Stream(read_y4m(path).context(ctx())?)),
        Kind::Pnm => Ok(Source::Single(Some(read_pnm(path).context(ctx())?.into()))),
        Kind::Raw => {
            let g = raw.ok_or_else(|| {
                CliError::input("raw input needs --width and --height (or manifest width/height)").context(ctx())
            })?;
            Ok(Source::Stream(
                read_planar_raw(path, g.width, g.height, g.bit_depth, g.chroma).context(ctx())?,
            ))
        }
    }
}
