use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;

use super::{write_all, Container, StreamHeader, VideoStream};
use crate::error::{Error, Result};
use crate::model::{ChromaSubsampling, ColorFrame};

/// Headerless planar YUV; samples above 8 bits are 16-bit little-endian.
pub fn read_planar_raw(
    path: &Path,
    width: usize,
    height: usize,
    bit_depth: u8,
    chroma: ChromaSubsampling,
) -> Result<VideoStream> {
    let header = StreamHeader::new(width, height, chroma, bit_depth)?;
    let file = File::open(path)?;
    let size = file.metadata()?.len();
    let frame_size = header.frame_size();
    if size % frame_size as u64 != 0 {
        return Err(Error::SizeNotMultiple { size, frame_size });
    }
    Ok(VideoStream {
        header,
        reader: Box::new(BufReader::new(file)),
        container: Container::Raw,
        next_index: 0,
        done: false,
    })
}

pub fn write_planar_raw<'a, W: Write>(
    w: &mut W,
    header: &StreamHeader,
    frames: impl IntoIterator<Item = &'a ColorFrame>,
) -> Result<()> {
    for f in frames {
        write_all(w, &header.encode(f)?)?;
    }
    Ok(())
}
