//! Input loading: FASTA and raw byte files into a sentinel-terminated
//! [`TextBuffer`].
//!
//! Byte conventions used throughout the crate:
//!
//! * `0x00` is the sentinel. A text ends with exactly `w` sentinels and
//!   contains no other `0x00`.
//! * `0x01` is the dictionary phrase separator and never appears in a text.
//! * Content bytes are `>= 0x02`. Multi-record FASTA input may optionally
//!   place [`RECORD_SEPARATOR`] (`0x02`) between records.

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use crate::error::{Error, Result};

pub const SENTINEL: u8 = 0x00;
pub const SEPARATOR: u8 = 0x01;
pub const RECORD_SEPARATOR: u8 = 0x02;
/// Smallest byte value allowed in text content.
pub const MIN_CONTENT_BYTE: u8 = 0x02;

/// An input string terminated by `w_pad` sentinel bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextBuffer {
    data: Vec<u8>,
    w_pad: usize,
    alphabet: Vec<u8>,
}

impl TextBuffer {
    /// Appends `w` sentinels to `content` after validating it.
    pub fn from_content(mut content: Vec<u8>, w: usize) -> Result<Self> {
        if w == 0 {
            return Err(Error::Config("window width must be at least 1".into()));
        }
        if content.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut seen = [false; 256];
        for (offset, &byte) in content.iter().enumerate() {
            if byte < MIN_CONTENT_BYTE {
                return Err(Error::ReservedByte {
                    offset: offset as u64,
                    byte,
                });
            }
            seen[byte as usize] = true;
        }
        let alphabet = (0..=255u8).filter(|&b| seen[b as usize]).collect();
        content.resize(content.len() + w, SENTINEL);
        Ok(TextBuffer {
            data: content,
            w_pad: w,
            alphabet,
        })
    }

    /// Full text including the trailing sentinels.
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    /// Text without the trailing sentinels.
    pub fn content(&self) -> &[u8] {
        &self.data[..self.data.len() - self.w_pad]
    }

    /// Length `n`, sentinels included.
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn w_pad(&self) -> usize {
        self.w_pad
    }

    /// Sorted distinct content bytes.
    pub fn alphabet(&self) -> &[u8] {
        &self.alphabet
    }

    pub fn sigma(&self) -> usize {
        self.alphabet.len()
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RecordSeparatorPolicy {
    /// Records are joined with nothing between them.
    #[default]
    Concatenate,
    /// A [`RECORD_SEPARATOR`] byte is placed between consecutive records.
    SeparatorByte,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IngestConfig {
    /// Keep only `A`, `C`, `G`, `T` and `N` (lowercase is upper-cased first).
    pub strip_to_dna: bool,
    /// Append the reverse complement of the whole content after it.
    pub add_revcomp: bool,
    pub record_separator_policy: RecordSeparatorPolicy,
}

/// Loads a FASTA file into a [`TextBuffer`] terminated by `w` sentinels.
pub fn load_fasta(path: impl AsRef<Path>, cfg: &IngestConfig, w: usize) -> Result<TextBuffer> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut content = Vec::new();
    stream_fasta(BufReader::new(file), cfg, |chunk| {
        content.extend_from_slice(chunk);
        Ok(())
    })?;
    TextBuffer::from_content(content, w)
}

/// Loads a raw byte file unchanged, terminated by `w` sentinels.
pub fn load_raw(path: impl AsRef<Path>, w: usize) -> Result<TextBuffer> {
    let path = path.as_ref();
    let mut content = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut content))
        .map_err(|e| Error::io(path, e))?;
    TextBuffer::from_content(content, w)
}

/// Streams the filtered content of a FASTA reader through `sink`, one
/// sequence line at a time. Returns the total number of content bytes.
///
/// With `add_revcomp` the forward content is buffered so its reverse
/// complement can be emitted once the input is exhausted.
pub fn stream_fasta<R, F>(mut reader: R, cfg: &IngestConfig, mut sink: F) -> Result<u64>
where
    R: BufRead,
    F: FnMut(&[u8]) -> Result<()>,
{
    let mut line = Vec::new();
    let mut filtered = Vec::new();
    let mut forward = Vec::new();
    let mut total = 0u64;
    let mut record_has_content = false;

    loop {
        line.clear();
        if reader.read_until(b'\n', &mut line)? == 0 {
            break;
        }
        if line.first() == Some(&b'>') {
            record_has_content = false;
            continue;
        }
        filtered.clear();
        for &b in &line {
            if b.is_ascii_whitespace() {
                continue;
            }
            if cfg.strip_to_dna {
                let up = b.to_ascii_uppercase();
                if matches!(up, b'A' | b'C' | b'G' | b'T' | b'N') {
                    filtered.push(up);
                }
            } else {
                filtered.push(b);
            }
        }
        if filtered.is_empty() {
            continue;
        }
        if let Some(pos) = filtered.iter().position(|&b| b < MIN_CONTENT_BYTE) {
            return Err(Error::ReservedByte {
                offset: total + pos as u64,
                byte: filtered[pos],
            });
        }
        if !record_has_content
            && total > 0
            && cfg.record_separator_policy == RecordSeparatorPolicy::SeparatorByte
        {
            filtered.insert(0, RECORD_SEPARATOR);
        }
        record_has_content = true;
        total += filtered.len() as u64;
        if cfg.add_revcomp {
            forward.extend_from_slice(&filtered);
        }
        sink(&filtered)?;
    }

    if total == 0 {
        return Err(Error::EmptyInput);
    }
    if cfg.add_revcomp {
        reverse_complement_in_place(&mut forward);
        total += forward.len() as u64;
        sink(&forward)?;
    }
    Ok(total)
}

/// Streams a raw byte reader through `sink`, rejecting reserved bytes.
pub fn stream_raw<R, F>(mut reader: R, mut sink: F) -> Result<u64>
where
    R: Read,
    F: FnMut(&[u8]) -> Result<()>,
{
    let mut buf = vec![0u8; 1 << 16];
    let mut total = 0u64;
    loop {
        let got = match reader.read(&mut buf) {
            Ok(0) => break,
            Ok(k) => k,
            Err(e) if e.kind() == std::io::ErrorKind::Interrupted => continue,
            Err(e) => return Err(e.into()),
        };
        let chunk = &buf[..got];
        if let Some(pos) = chunk.iter().position(|&b| b < MIN_CONTENT_BYTE) {
            return Err(Error::ReservedByte {
                offset: total + pos as u64,
                byte: chunk[pos],
            });
        }
        total += got as u64;
        sink(chunk)?;
    }
    if total == 0 {
        return Err(Error::EmptyInput);
    }
    Ok(total)
}

/// Watson-Crick complement; bytes outside `ACGTN` (either case) map to
/// themselves.
pub fn complement(b: u8) -> u8 {
    match b {
        b'A' => b'T',
        b'T' => b'A',
        b'C' => b'G',
        b'G' => b'C',
        b'a' => b't',
        b't' => b'a',
        b'c' => b'g',
        b'g' => b'c',
        other => other,
    }
}

pub fn reverse_complement_in_place(seq: &mut [u8]) {
    seq.reverse();
    for b in seq.iter_mut() {
        *b = complement(*b);
    }
}
