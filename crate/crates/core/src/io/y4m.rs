use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::{write_all, Container, StreamHeader, VideoStream};
use crate::error::{Error, Result};
use crate::model::{ChromaSubsampling, ColorFrame};

const MAGIC: &str = "YUV4MPEG2";
const FRAME: &str = "FRAME";

fn parse_chroma(tag: &str) -> Result<(ChromaSubsampling, u8)> {
    let (base, depth) = match tag.find('p') {
        Some(i) if tag[i + 1..].chars().all(|c| c.is_ascii_digit()) && i + 1 < tag.len() => {
            let d: u8 = tag[i + 1..]
                .parse()
                .map_err(|_| Error::UnsupportedChroma(tag.to_string()))?;
            (&tag[..i], d)
        }
        _ => (tag, 8),
    };
    let chroma = match base {
        "420" | "420jpeg" | "420mpeg2" | "420paldv" => ChromaSubsampling::Cs420,
        "444" => ChromaSubsampling::Cs444,
        _ => return Err(Error::UnsupportedChroma(tag.to_string())),
    };
    if !(8..=16).contains(&depth) {
        return Err(Error::UnsupportedChroma(tag.to_string()));
    }
    Ok((chroma, depth))
}

fn parse_header(line: &str) -> Result<StreamHeader> {
    let mut tokens = line.split_ascii_whitespace();
    if tokens.next() != Some(MAGIC) {
        return Err(Error::BadMagic { expected: MAGIC });
    }
    let (mut w, mut h, mut rate) = (None, None, None);
    let (mut chroma, mut depth) = (ChromaSubsampling::Cs420, 8);
    for tok in tokens {
        let (key, val) = tok.split_at(1);
        let num = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| Error::BadHeader(format!("bad token {tok:?}")))
        };
        match key {
            "W" => w = Some(num(val)?),
            "H" => h = Some(num(val)?),
            "F" => {
                let (n, d) = val
                    .split_once(':')
                    .ok_or_else(|| Error::BadHeader(format!("bad frame rate {tok:?}")))?;
                let n = n.parse().map_err(|_| Error::BadHeader(format!("bad frame rate {tok:?}")))?;
                let d = d.parse().map_err(|_| Error::BadHeader(format!("bad frame rate {tok:?}")))?;
                rate = Some((n, d));
            }
            "C" => (chroma, depth) = parse_chroma(val)?,
            // interlacing, aspect ratio and extensions do not affect decoding
            _ => {}
        }
    }
    let w = w.ok_or_else(|| Error::BadHeader("missing W".into()))?;
    let h = h.ok_or_else(|| Error::BadHeader("missing H".into()))?;
    let mut header = StreamHeader::new(w, h, chroma, depth)?;
    header.frame_rate = rate;
    Ok(header)
}

fn read_line<R: BufRead + ?Sized>(r: &mut R) -> Result<Option<String>> {
    let mut buf = Vec::new();
    let n = r.read_until(b'\n', &mut buf)?;
    if n == 0 {
        return Ok(None);
    }
    if buf.last() == Some(&b'\n') {
        buf.pop();
    }
    String::from_utf8(buf)
        .map(Some)
        .map_err(|_| Error::BadHeader("non-ASCII header line".into()))
}

/// Consumes a `FRAME` line; false at a clean end of stream.
pub(super) fn read_frame_marker(r: &mut Box<dyn BufRead + Send>) -> Result<bool> {
    match read_line(r.as_mut())? {
        None => Ok(false),
        Some(line) if line.split_ascii_whitespace().next() == Some(FRAME) => Ok(true),
        Some(line) => Err(Error::BadHeader(format!(
            "expected FRAME, found {:?}",
            line.chars().take(16).collect::<String>()
        ))),
    }
}

/// Y4M stream from any buffered reader.
pub fn read_y4m_from<R: BufRead + Send + 'static>(mut reader: R) -> Result<VideoStream> {
    let mut magic = [0u8; 9];
    let got = {
        let buf = reader.fill_buf()?;
        let n = buf.len().min(magic.len());
        magic[..n].copy_from_slice(&buf[..n]);
        n
    };
    if got < magic.len() || &magic != MAGIC.as_bytes() {
        return Err(Error::BadMagic { expected: MAGIC });
    }
    let line = read_line(&mut reader)?.ok_or(Error::BadMagic { expected: MAGIC })?;
    let header = parse_header(&line)?;
    Ok(VideoStream {
        header,
        reader: Box::new(reader),
        container: Container::Y4m,
        next_index: 0,
        done: false,
    })
}

pub fn read_y4m(path: &Path) -> Result<VideoStream> {
    read_y4m_from(BufReader::new(File::open(path)?))
}

fn chroma_tag(header: &StreamHeader) -> String {
    let base = match header.chroma {
        ChromaSubsampling::Cs420 => "420jpeg",
        ChromaSubsampling::Cs444 => "444",
    };
    if header.bit_depth == 8 {
        format!("C{base}")
    } else {
        let base = base.trim_end_matches("jpeg");
        format!("C{base}p{}", header.bit_depth)
    }
}

pub fn write_y4m_header<W: Write>(w: &mut W, header: &StreamHeader) -> Result<()> {
    let (n, d) = header.frame_rate.unwrap_or((25, 1));
    let line = format!(
        "{MAGIC} W{} H{} F{n}:{d} Ip A1:1 {}\n",
        header.width,
        header.height,
        chroma_tag(header)
    );
    write_all(w, line.as_bytes())
}

pub fn write_y4m_frame<W: Write>(w: &mut W, header: &StreamHeader, frame: &ColorFrame) -> Result<()> {
    let bytes = header.encode(frame)?;
    write_all(w, b"FRAME\n")?;
    write_all(w, &bytes)
}

pub fn write_y4m<'a, W: Write>(
    w: &mut W,
    header: &StreamHeader,
    frames: impl IntoIterator<Item = &'a ColorFrame>,
) -> Result<()> {
    write_y4m_header(w, header)?;
    for f in frames {
        write_y4m_frame(w, header, f)?;
    }
    Ok(())
}
