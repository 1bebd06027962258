//! Single-file `.ri` serialization, all integers little-endian:
//! magic, flags (φ⁻¹ key family), n, r, C array (256 entries), run heads,
//! run lengths, start-run pairs, end-run pairs, SA[n-1].

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::{BoundaryFamily, RIndex, RunLengthBwt, SaSample, PHI_INVERSE_FAMILY};

/// Five identifying bytes followed by the ASCII format version digit.
pub const MAGIC: &[u8; 6] = b"PFPRI1";
pub const FORMAT_VERSION: u8 = b'1';

pub fn save(idx: &RIndex, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_to(idx, &mut w)
        .and_then(|()| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn write_to<W: Write>(idx: &RIndex, w: &mut W) -> std::io::Result<()> {
    let bwt = idx.bwt();
    w.write_all(MAGIC)?;
    w.write_all(&[PHI_INVERSE_FAMILY.flag()])?;
    w.write_all(&bwt.len().to_le_bytes())?;
    w.write_all(&(bwt.runs() as u64).to_le_bytes())?;
    for c in bwt.c_array() {
        w.write_all(&c.to_le_bytes())?;
    }
    w.write_all(bwt.heads())?;
    for len in bwt.run_lengths() {
        w.write_all(&len.to_le_bytes())?;
    }
    for (pos, sa) in idx
        .sample()
        .ssa_pairs(bwt)
        .chain(idx.sample().esa_pairs(bwt))
    {
        w.write_all(&pos.to_le_bytes())?;
        w.write_all(&sa.to_le_bytes())?;
    }
    w.write_all(&idx.last_sa().to_le_bytes())
}

pub fn load(path: &Path) -> Result<RIndex> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_from(BufReader::new(file))
}

struct Input<R> {
    inner: R,
}

impl<R: Read> Input<R> {
    fn bytes(&mut self, buf: &mut [u8], what: &str) -> Result<()> {
        self.inner.read_exact(buf).map_err(|e| match e.kind() {
            std::io::ErrorKind::UnexpectedEof => {
                Error::Truncated(format!("index ends inside {what}"))
            }
            _ => Error::Stream(e),
        })
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        let mut b = [0u8; 8];
        self.bytes(&mut b, what)?;
        Ok(u64::from_le_bytes(b))
    }

    fn u64s(&mut self, count: usize, what: &str) -> Result<Vec<u64>> {
        (0..count).map(|_| self.u64(what)).collect()
    }
}

pub fn read_from<R: Read>(reader: R) -> Result<RIndex> {
    let mut input = Input { inner: reader };
    let mut magic = [0u8; 6];
    input.bytes(&mut magic, "the header")?;
    if magic[..5] != MAGIC[..5] {
        return Err(Error::Format("not an r-index file (bad magic)".into()));
    }
    if magic[5] != FORMAT_VERSION {
        return Err(Error::Version {
            found: magic[5],
            expected: FORMAT_VERSION,
        });
    }
    let mut flags = [0u8; 1];
    input.bytes(&mut flags, "the header")?;
    if BoundaryFamily::from_flag(flags[0]) != Some(PHI_INVERSE_FAMILY) {
        return Err(Error::Format(format!(
            "unsupported boundary family flag {:#04x}",
            flags[0]
        )));
    }
    let n = input.u64("the header")?;
    let r = input.u64("the header")?;
    if r == 0 || r > n {
        return Err(Error::Format(format!("{r} runs for length {n}")));
    }
    let r = usize::try_from(r).map_err(|_| Error::Format("run count too large".into()))?;
    let c_array = input.u64s(256, "the C array")?;
    let mut heads = vec![0u8; r];
    input.bytes(&mut heads, "the run heads")?;
    let lengths = input.u64s(r, "the run lengths")?;
    let read_pairs = |input: &mut Input<R>, what| -> Result<Vec<(u64, u64)>> {
        (0..r)
            .map(|_| Ok((input.u64(what)?, input.u64(what)?)))
            .collect()
    };
    let ssa = read_pairs(&mut input, "the run-start samples")?;
    let esa = read_pairs(&mut input, "the run-end samples")?;
    let last_sa = input.u64("the trailer")?;
    if input.inner.read(&mut [0u8; 1])? != 0 {
        return Err(Error::Format("trailing bytes after index".into()));
    }

    let bwt = RunLengthBwt::from_runs(heads, &lengths)?;
    if bwt.len() != n || bwt.c_array()[..] != c_array[..] {
        return Err(Error::Format("header disagrees with run data".into()));
    }
    // Re-validates the sample against the runs.
    SaSample::new(&bwt, &ssa, &esa)?;
    let idx = RIndex::from_parts(bwt, &ssa, &esa)?;
    if idx.last_sa() != last_sa {
        return Err(Error::Format(
            "stored SA[n-1] disagrees with samples".into(),
        ));
    }
    Ok(idx)
}
