//! Decoded-pixel media formats (Y4M, raw planar YUV, binary PNM) and
//! score reports.

mod pnm;
mod raw;
mod report;
mod y4m;

use std::io::{BufRead, Read, Write};

pub use pnm::{read_pnm, read_pnm_from, write_pnm_gray, write_pnm_rgb, PnmImage};
pub use raw::{read_planar_raw, write_planar_raw};
pub use report::{format_float, write_report, ReportFormat, ReportValue};
pub use y4m::{read_y4m, read_y4m_from, write_y4m, write_y4m_header, write_y4m_frame};

use crate::error::{Error, Result};
use crate::model::{ChromaSubsampling, ColorFrame, ColorSpace, Plane};

/// Geometry and sample format shared by every frame of a stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StreamHeader {
    pub width: usize,
    pub height: usize,
    /// Frames per second as a rational, when known.
    pub frame_rate: Option<(u32, u32)>,
    pub chroma: ChromaSubsampling,
    pub bit_depth: u8,
}

impl StreamHeader {
    pub fn new(width: usize, height: usize, chroma: ChromaSubsampling, bit_depth: u8) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::BadHeader(format!("frame size {width}x{height}")));
        }
        if !(8..=16).contains(&bit_depth) {
            return Err(Error::BadHeader(format!("bit depth {bit_depth} outside 8..=16")));
        }
        Ok(Self {
            width,
            height,
            frame_rate: None,
            chroma,
            bit_depth,
        })
    }

    pub fn bytes_per_sample(&self) -> usize {
        if self.bit_depth > 8 {
            2
        } else {
            1
        }
    }

    pub fn chroma_dims(&self) -> (usize, usize) {
        self.chroma.chroma_dims(self.width, self.height)
    }

    /// `W H B + 2 Wc Hc B` bytes.
    pub fn frame_size(&self) -> usize {
        let (cw, ch) = self.chroma_dims();
        (self.width * self.height + 2 * cw * ch) * self.bytes_per_sample()
    }

    pub fn fps(&self) -> Option<f64> {
        self.frame_rate
            .filter(|&(_, d)| d != 0)
            .map(|(n, d)| n as f64 / d as f64)
    }

    /// Little-endian planar samples to a YCbCr frame.
    fn decode(&self, bytes: &[u8]) -> Result<ColorFrame> {
        let b = self.bytes_per_sample();
        let peak = (1u32 << self.bit_depth) - 1;
        let (cw, ch) = self.chroma_dims();
        let dims = [(self.width, self.height), (cw, ch), (cw, ch)];
        let mut offset = 0;
        let mut planes = Vec::with_capacity(3);
        for (w, h) in dims {
            let n = w * h;
            let chunk = &bytes[offset..offset + n * b];
            offset += n * b;
            let mut data = Vec::with_capacity(n);
            for s in chunk.chunks_exact(b) {
                let v = if b == 2 {
                    u16::from_le_bytes([s[0], s[1]]) as u32
                } else {
                    s[0] as u32
                };
                if v > peak {
                    return Err(Error::InvalidPlane(format!(
                        "sample {v} exceeds {}-bit range",
                        self.bit_depth
                    )));
                }
                data.push(v as f64);
            }
            planes.push(Plane::new(w, h, data)?);
        }
        let planes: [Plane; 3] = planes.try_into().expect("three planes");
        ColorFrame::new(planes, self.bit_depth, ColorSpace::YCbCrBt709, self.chroma)
    }

    /// A frame's samples, rounded and clamped to the sample range.
    fn encode(&self, frame: &ColorFrame) -> Result<Vec<u8>> {
        if frame.width() != self.width || frame.height() != self.height || frame.chroma() != self.chroma {
            return Err(Error::DimensionMismatch {
                left_w: self.width,
                left_h: self.height,
                right_w: frame.width(),
                right_h: frame.height(),
            });
        }
        let peak = ((1u32 << self.bit_depth) - 1) as f64;
        let b = self.bytes_per_sample();
        let mut out = Vec::with_capacity(self.frame_size());
        for p in frame.planes() {
            for &v in p.data() {
                let s = v.round().clamp(0.0, peak) as u16;
                if b == 2 {
                    out.extend_from_slice(&s.to_le_bytes());
                } else {
                    out.push(s as u8);
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug)]
enum Container {
    Y4m,
    Raw,
}

/// Lazily decoded sequence of YCbCr frames. Only one frame is held at a time.
pub struct VideoStream {
    header: StreamHeader,
    reader: Box<dyn BufRead + Send>,
    container: Container,
    next_index: usize,
    done: bool,
}

impl std::fmt::Debug for VideoStream {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VideoStream")
            .field("header", &self.header)
            .field("container", &self.container)
            .field("next_index", &self.next_index)
            .finish()
    }
}

impl VideoStream {
    pub fn header(&self) -> &StreamHeader {
        &self.header
    }

    /// Reads up to `buf.len()` bytes; returns how many arrived before EOF.
    fn fill(&mut self, buf: &mut [u8]) -> Result<usize> {
        let mut got = 0;
        while got < buf.len() {
            match self.reader.read(&mut buf[got..]) {
                Ok(0) => break,
                Ok(n) => got += n,
                Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
                Err(e) => return Err(e.into()),
            }
        }
        Ok(got)
    }

    fn next_frame(&mut self) -> Result<Option<ColorFrame>> {
        let index = self.next_index;
        if let Container::Y4m = self.container {
            if !y4m::read_frame_marker(&mut self.reader)? {
                return Ok(None);
            }
        }
        let expected = self.header.frame_size();
        let mut buf = vec![0u8; expected];
        let got = self.fill(&mut buf)?;
        if got == 0 && matches!(self.container, Container::Raw) {
            return Ok(None);
        }
        if got < expected {
            return Err(Error::TruncatedFrame {
                frame: index,
                expected,
                got,
            });
        }
        self.next_index += 1;
        self.header.decode(&buf).map(Some)
    }
}

impl Iterator for VideoStream {
    type Item = Result<ColorFrame>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.next_frame() {
            Ok(Some(f)) => Some(Ok(f)),
            Ok(None) => {
                self.done = true;
                None
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

fn write_all<W: Write>(w: &mut W, bytes: &[u8]) -> Result<()> {
    w.write_all(bytes).map_err(Error::from)
}

fn read_all<R: Read>(mut r: R) -> Result<Vec<u8>> {
    let mut v = Vec::new();
    r.read_to_end(&mut v)?;
    Ok(v)
}
